//! Surfaces glued from polygons, carrying geometric embeddings of complete
//! graphs: ideal `N`-gon surfaces, their truncations with funnels, triangle
//! surfaces built from a rotation system, closures and chains of blocks.

use crate::error::{Error, Result};
use crate::formulas::{
    default_hole_length, equilateral_side, holed_triangle_metrics, ideal_clique_distance,
    truncated_clique_distance,
};
use crate::kernel::{
    dist, equilateral_triangle, ideal_regular_polygon, saccheri_quadrilateral,
    semi_regular_polygon, DevelopedChain, Gluing, HPoint, PolygonGeometry,
};
use crate::rotation::{genus_of, is_triangular, trace_faces, RotationSystem};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

/// Shape of one polygon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PolygonKind {
    /// Regular ideal `n`-gon.
    IdealRegular { n: usize },
    /// Right-angled `2n`-gon, sides alternating `s` (even) and `t` (odd).
    SemiRegular { n: usize, t: f64 },
    /// Equilateral triangle with angles `2π/n`.
    Equilateral { n: usize },
    /// One third of a one-holed triangle with angles `2π/n` and hole length
    /// `t`: a quadrilateral with base `t/3` on the hole, right angles at the
    /// base and angles `π/n` at the two triangle vertices.
    HoledTriangleSector { n: usize, t: f64 },
}

impl PolygonKind {
    pub fn side_count(&self) -> usize {
        match *self {
            PolygonKind::IdealRegular { n } => n,
            PolygonKind::SemiRegular { n, .. } => 2 * n,
            PolygonKind::Equilateral { .. } => 3,
            PolygonKind::HoledTriangleSector { .. } => 4,
        }
    }

    pub fn realize(&self) -> Result<PolygonGeometry> {
        match *self {
            PolygonKind::IdealRegular { n } => ideal_regular_polygon(n),
            PolygonKind::SemiRegular { n, t } => semi_regular_polygon(n, t),
            PolygonKind::Equilateral { n } => equilateral_triangle(n),
            PolygonKind::HoledTriangleSector { n, t } => {
                Ok(saccheri_quadrilateral(t / 3.0, PI / n as f64)?.geometry)
            }
        }
    }

    fn cache_key(&self) -> (u8, usize, u64) {
        match *self {
            PolygonKind::IdealRegular { n } => (0, n, 0),
            PolygonKind::SemiRegular { n, t } => (1, n, t.to_bits()),
            PolygonKind::Equilateral { n } => (2, n, 0),
            PolygonKind::HoledTriangleSector { n, t } => (3, n, t.to_bits()),
        }
    }
}

/// Side `a` glued to side `b`; `twisted` reverses orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    pub a: (usize, usize),
    pub b: (usize, usize),
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub twisted: bool,
}

impl Pairing {
    pub fn new(a: (usize, usize), b: (usize, usize)) -> Self {
        Pairing {
            a,
            b,
            twisted: false,
        }
    }
}

/// What the unpaired sides stand for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    /// Capped by a funnel; paths never need to enter it.
    Funnel,
    /// To be pasted; paths may leave through it.
    Open,
}

/// A combinatorial surface of genus `genus` glued onto boundary cycles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenusPatch {
    pub genus: i64,
    pub length: f64,
    /// Boundary cycles of the complex it is attached to.
    pub attached: Vec<Vec<(usize, usize)>>,
}

/// Where the clique vertices sit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "at", rename_all = "kebab-case")]
pub enum Marks {
    /// One vertex at the center of each polygon.
    Centers,
    /// `corners[p][k]`: clique vertex at corner `k` of polygon `p`, if any.
    Corners { corners: Vec<Vec<Option<usize>>> },
}

#[derive(Clone, Debug)]
pub struct GluedSurface {
    pub construction: String,
    polygons: Vec<PolygonKind>,
    geometry: Vec<PolygonGeometry>,
    pairings: Vec<Pairing>,
    partner: Vec<Vec<Option<(usize, usize, bool)>>>,
    boundary_kind: BoundaryKind,
    patches: Vec<GenusPatch>,
    marks: Marks,
    /// Number of clique vertices.
    clique_size: usize,
    /// Common distance between clique vertices.
    edge_length: f64,
}

impl Gluing for GluedSurface {
    fn polygon_count(&self) -> usize {
        self.polygons.len()
    }
    fn geometry(&self, polygon: usize) -> &PolygonGeometry {
        &self.geometry[polygon]
    }
    fn partner(&self, polygon: usize, side: usize) -> Option<(usize, usize, bool)> {
        self.partner[polygon][side]
    }
}

/// Topological data of the complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerData {
    #[serde(rename = "V")]
    pub v: usize,
    #[serde(rename = "E")]
    pub e: usize,
    #[serde(rename = "F")]
    pub f: usize,
    pub cusps: usize,
    pub boundaries: usize,
    pub chi: i64,
    /// `None` for non-orientable surfaces.
    pub genus: Option<i64>,
    pub orientable: bool,
    pub connected: bool,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Corner of `q` matched with corner `c` of `p` through the glued side
/// `(p, i) ↔ (q, j)`; `c` must be an endpoint of side `i`.
fn matched_corner(np: usize, nq: usize, i: usize, j: usize, twisted: bool, c: usize) -> usize {
    let start = c == i;
    debug_assert!(start || c == (i + 1) % np);
    match (twisted, start) {
        (false, true) => (j + 1) % nq,
        (false, false) => j,
        (true, true) => j,
        (true, false) => (j + 1) % nq,
    }
}

impl GluedSurface {
    fn assemble(
        construction: impl Into<String>,
        polygons: Vec<PolygonKind>,
        pairings: Vec<Pairing>,
        boundary_kind: BoundaryKind,
        marks: Marks,
        clique_size: usize,
        edge_length: f64,
    ) -> Result<Self> {
        let mut cache: HashMap<(u8, usize, u64), PolygonGeometry> = HashMap::new();
        let mut geometry = Vec::with_capacity(polygons.len());
        for kind in &polygons {
            let g = match cache.get(&kind.cache_key()) {
                Some(g) => g.clone(),
                None => {
                    let g = kind.realize()?;
                    cache.insert(kind.cache_key(), g.clone());
                    g
                }
            };
            geometry.push(g);
        }
        let mut partner: Vec<Vec<Option<(usize, usize, bool)>>> = polygons
            .iter()
            .map(|k| vec![None; k.side_count()])
            .collect();
        for pr in &pairings {
            for &(p, s) in &[pr.a, pr.b] {
                if p >= polygons.len() || s >= polygons[p].side_count() {
                    return Err(Error::Combinatorial(format!("no side {s} on polygon {p}")));
                }
            }
            if pr.a == pr.b {
                return Err(Error::Combinatorial(format!(
                    "side {:?} glued to itself",
                    pr.a
                )));
            }
            for &(x, y) in &[(pr.a, pr.b), (pr.b, pr.a)] {
                if partner[x.0][x.1].is_some() {
                    return Err(Error::ConstructionRule(format!(
                        "side {} of polygon {} is in two pairings",
                        x.1, x.0
                    )));
                }
                partner[x.0][x.1] = Some((y.0, y.1, pr.twisted));
            }
        }
        let s = GluedSurface {
            construction: construction.into(),
            polygons,
            geometry,
            pairings,
            partner,
            boundary_kind,
            patches: Vec::new(),
            marks,
            clique_size,
            edge_length,
        };
        s.audit_lengths()?;
        Ok(s)
    }

    fn audit_lengths(&self) -> Result<()> {
        for pr in &self.pairings {
            let la = self.geometry[pr.a.0].sides[pr.a.1].length;
            let lb = self.geometry[pr.b.0].sides[pr.b.1].length;
            let same = (la.is_infinite() && lb.is_infinite())
                || (la - lb).abs() <= 1e-10 * la.abs().max(1.0);
            if !same {
                return Err(Error::ConstructionRule(format!(
                    "paired sides {:?} and {:?} have lengths {la} and {lb}",
                    pr.a, pr.b
                )));
            }
        }
        Ok(())
    }

    pub fn polygons(&self) -> &[PolygonKind] {
        &self.polygons
    }

    pub fn pairings(&self) -> &[Pairing] {
        &self.pairings
    }

    pub fn patches(&self) -> &[GenusPatch] {
        &self.patches
    }

    pub fn marks(&self) -> &Marks {
        &self.marks
    }

    pub fn boundary_kind(&self) -> BoundaryKind {
        self.boundary_kind
    }

    pub fn clique_size(&self) -> usize {
        self.clique_size
    }

    pub fn edge_length(&self) -> f64 {
        self.edge_length
    }

    fn corner_ids(&self) -> (Vec<usize>, usize) {
        let mut offset = Vec::with_capacity(self.polygons.len());
        let mut total = 0;
        for k in &self.polygons {
            offset.push(total);
            total += k.side_count();
        }
        (offset, total)
    }

    /// Union-find over corners identified by the pairings.
    fn vertex_classes(&self) -> (Vec<usize>, UnionFind) {
        let (offset, total) = self.corner_ids();
        let mut uf = UnionFind::new(total);
        for pr in &self.pairings {
            let (p, i) = pr.a;
            let (q, j) = pr.b;
            let (np, nq) = (self.polygons[p].side_count(), self.polygons[q].side_count());
            for c in [i, (i + 1) % np] {
                let d = matched_corner(np, nq, i, j, pr.twisted, c);
                uf.union(offset[p] + c, offset[q] + d);
            }
        }
        (offset, uf)
    }

    fn patched_sides(&self) -> HashMap<(usize, usize), usize> {
        let mut m = HashMap::new();
        for (k, patch) in self.patches.iter().enumerate() {
            for cycle in &patch.attached {
                for &side in cycle {
                    m.insert(side, k);
                }
            }
        }
        m
    }

    /// Cycles of unpaired sides, each listed in traversal order. Sides
    /// attached to genus patches are included.
    pub fn boundary_cycles(&self) -> Vec<Vec<(usize, usize)>> {
        let mut seen: HashMap<(usize, usize), ()> = HashMap::new();
        let mut cycles = Vec::new();
        for p in 0..self.polygons.len() {
            for s in 0..self.polygons[p].side_count() {
                if self.partner[p][s].is_some() || seen.contains_key(&(p, s)) {
                    continue;
                }
                let mut cycle = Vec::new();
                // Walk forward along (p, s): from its start corner to its end.
                let (mut poly, mut side, mut forward) = (p, s, true);
                loop {
                    if seen.insert((poly, side), ()).is_some() {
                        break;
                    }
                    cycle.push((poly, side));
                    let n = self.polygons[poly].side_count();
                    let mut corner = if forward { (side + 1) % n } else { side };
                    if self.geometry[poly].corners[corner].is_none() {
                        break;
                    }
                    let mut from = side;
                    // Rotate around the vertex until the next unpaired side.
                    loop {
                        let n = self.polygons[poly].side_count();
                        let other = if from == corner {
                            (corner + n - 1) % n
                        } else {
                            corner
                        };
                        match self.partner[poly][other] {
                            None => {
                                side = other;
                                forward = other == corner;
                                break;
                            }
                            Some((q, j, tw)) => {
                                let nq = self.polygons[q].side_count();
                                corner = matched_corner(n, nq, other, j, tw, corner);
                                poly = q;
                                from = j;
                            }
                        }
                    }
                }
                cycles.push(cycle);
            }
        }
        cycles
    }

    fn orientation(&self) -> (bool, bool) {
        let n = self.polygons.len();
        let mut sign = vec![0i8; n];
        let mut orientable = true;
        for s in 0..n {
            if sign[s] != 0 {
                continue;
            }
            sign[s] = 1;
            let mut stack = vec![s];
            while let Some(p) = stack.pop() {
                for x in self.partner[p].iter().flatten() {
                    let (q, _, tw) = *x;
                    let want = if tw { -sign[p] } else { sign[p] };
                    if sign[q] == 0 {
                        sign[q] = want;
                        stack.push(q);
                    } else if sign[q] != want {
                        orientable = false;
                    }
                }
            }
        }
        // Patches glued to two cycles join the corresponding components.
        let mut uf = UnionFind::new(n);
        for pr in &self.pairings {
            uf.union(pr.a.0, pr.b.0);
        }
        for patch in &self.patches {
            let polys: Vec<usize> = patch
                .attached
                .iter()
                .filter_map(|c| c.first().map(|x| x.0))
                .collect();
            for w in polys.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        let roots = (0..n)
            .map(|p| uf.find(p))
            .collect::<std::collections::HashSet<_>>();
        (orientable, roots.len() <= 1)
    }

    /// Euler characteristic, genus and boundary count, recomputed from the
    /// pasted complex. Ideal vertices are cusps and do not count in `V`.
    pub fn euler(&self) -> EulerData {
        let (offset, mut uf) = self.vertex_classes();
        let mut finite = std::collections::HashSet::new();
        let mut ideal = std::collections::HashSet::new();
        for (p, g) in self.geometry.iter().enumerate() {
            for (k, c) in g.corners.iter().enumerate() {
                let root = uf.find(offset[p] + k);
                if c.is_some() {
                    finite.insert(root);
                } else {
                    ideal.insert(root);
                }
            }
        }
        let sides: usize = self.polygons.iter().map(PolygonKind::side_count).sum();
        let e = sides - self.pairings.len();
        let f = self.polygons.len();
        let v = finite.len();
        let cusps = ideal.len();
        let patched = self.patched_sides();
        let cycles = self.boundary_cycles();
        let boundaries = cycles
            .iter()
            .filter(|c| !c.iter().any(|s| patched.contains_key(s)))
            .count();
        let mut chi = v as i64 - e as i64 + f as i64;
        for patch in &self.patches {
            chi += 2 - 2 * patch.genus - patch.attached.len() as i64;
        }
        let (orientable, connected) = self.orientation();
        let twice = 2 - chi - boundaries as i64 - cusps as i64;
        let genus = (orientable && twice % 2 == 0).then_some(twice / 2);
        EulerData {
            v,
            e,
            f,
            cusps,
            boundaries,
            chi,
            genus,
            orientable,
            connected,
        }
    }

    /// Sum of corner angles around each finite interior vertex.
    pub fn vertex_angle_sums(&self) -> Vec<f64> {
        let (offset, mut uf) = self.vertex_classes();
        let boundary_corners: std::collections::HashSet<usize> = self
            .boundary_cycles()
            .iter()
            .flatten()
            .flat_map(|&(p, s)| {
                let n = self.polygons[p].side_count();
                [offset[p] + s, offset[p] + (s + 1) % n]
            })
            .collect();
        let mut on_boundary = std::collections::HashSet::new();
        for &c in &boundary_corners {
            on_boundary.insert(uf.find(c));
        }
        let mut sums: std::collections::BTreeMap<usize, f64> = Default::default();
        for (p, g) in self.geometry.iter().enumerate() {
            for (k, c) in g.corners.iter().enumerate() {
                let root = uf.find(offset[p] + k);
                if c.is_some() && !on_boundary.contains(&root) {
                    *sums.entry(root).or_insert(0.0) += g.angles[k];
                }
            }
        }
        sums.into_values().collect()
    }

    /// Same surface with polygon `p` renamed `perm[p]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        let n = self.polygons.len();
        let mut polygons = vec![self.polygons[0]; n];
        for p in 0..n {
            polygons[perm[p]] = self.polygons[p];
        }
        let pairings = self
            .pairings
            .iter()
            .map(|pr| Pairing {
                a: (perm[pr.a.0], pr.a.1),
                b: (perm[pr.b.0], pr.b.1),
                twisted: pr.twisted,
            })
            .collect();
        let marks = match &self.marks {
            Marks::Centers => Marks::Centers,
            Marks::Corners { corners } => {
                let mut c = vec![Vec::new(); n];
                for p in 0..n {
                    c[perm[p]] = corners[p].clone();
                }
                Marks::Corners { corners: c }
            }
        };
        let mut s = GluedSurface::assemble(
            self.construction.clone(),
            polygons,
            pairings,
            self.boundary_kind,
            marks,
            self.clique_size,
            self.edge_length,
        )?;
        s.patches = self
            .patches
            .iter()
            .map(|patch| GenusPatch {
                genus: patch.genus,
                length: patch.length,
                attached: patch
                    .attached
                    .iter()
                    .map(|c| c.iter().map(|&(p, side)| (perm[p], side)).collect())
                    .collect(),
            })
            .collect();
        Ok(s)
    }

    fn require_connected(self) -> Result<Self> {
        if !self.euler().connected {
            return Err(Error::Connectivity(format!(
                "{} surface has more than one component",
                self.construction
            )));
        }
        Ok(self)
    }
}

/// Round-robin pairing of `n + 1` polygons with `n` glued sides each: the
/// side of polygon `i` towards polygon `j` is `j` if `j < i`, else `j − 1`,
/// scaled by `stride`.
pub fn canonical_pairing(n: usize, stride: usize) -> Vec<Pairing> {
    let mut out = Vec::new();
    for i in 0..=n {
        for j in i + 1..=n {
            out.push(Pairing::new((i, stride * (j - 1)), (j, stride * i)));
        }
    }
    out
}

/// Checks that every two of the `count` polygons share exactly one side.
fn check_one_shared_side(count: usize, pairings: &[Pairing]) -> Result<()> {
    let mut shared = vec![vec![0usize; count]; count];
    for pr in pairings {
        let (p, q) = (pr.a.0, pr.b.0);
        if p >= count || q >= count {
            return Err(Error::Combinatorial(format!(
                "pairing {pr:?} names a missing polygon"
            )));
        }
        if p == q {
            return Err(Error::ConstructionRule(format!(
                "polygon {p} is glued to itself"
            )));
        }
        shared[p][q] += 1;
        shared[q][p] += 1;
    }
    for (p, row) in shared.iter().enumerate() {
        for (q, &k) in row.iter().enumerate().skip(p + 1) {
            if k != 1 {
                return Err(Error::ConstructionRule(format!(
                    "polygons {p} and {q} share {k} sides, expected exactly one"
                )));
            }
        }
    }
    Ok(())
}

/// `N + 1` regular ideal `N`-gons, every two glued along one side,
/// midpoint to midpoint. The centers are pairwise at distance `d_N`.
pub fn build_ideal_surface(n: usize, pairing: Option<Vec<Pairing>>) -> Result<GluedSurface> {
    let d = ideal_clique_distance(n)?;
    let pairings = pairing.unwrap_or_else(|| canonical_pairing(n, 1));
    check_one_shared_side(n + 1, &pairings)?;
    let polygons = vec![PolygonKind::IdealRegular { n }; n + 1];
    GluedSurface::assemble(
        "ideal",
        polygons,
        pairings,
        BoundaryKind::Funnel,
        Marks::Centers,
        n + 1,
        d,
    )?
    .require_connected()
}

/// The truncated version: right-angled `2N`-gons glued along their `s`
/// sides, the `t` sides forming funnel-capped boundary geodesics.
pub fn build_truncated_surface(
    n: usize,
    t: f64,
    pairing: Option<Vec<Pairing>>,
) -> Result<GluedSurface> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("t must be positive, got {t}")));
    }
    let d = truncated_clique_distance(n, t)?;
    let pairings = pairing.unwrap_or_else(|| canonical_pairing(n, 2));
    for pr in &pairings {
        if pr.a.1 % 2 == 1 || pr.b.1 % 2 == 1 {
            return Err(Error::ConstructionRule(format!(
                "pairing {pr:?} uses a boundary side (odd index)"
            )));
        }
    }
    check_one_shared_side(n + 1, &pairings)?;
    let polygons = vec![PolygonKind::SemiRegular { n, t }; n + 1];
    let s = GluedSurface::assemble(
        "truncated",
        polygons,
        pairings,
        BoundaryKind::Funnel,
        Marks::Centers,
        n + 1,
        d,
    )?
    .require_connected()?;
    if !s.euler().orientable {
        return Err(Error::Orientability(
            "the truncated surface must be orientable".into(),
        ));
    }
    Ok(s)
}

/// Triangle shape used by [`build_triangle_surface`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TriangleMode {
    Equilateral,
    /// One-holed triangles with hole length `t`.
    Holed {
        t: f64,
    },
}

impl TriangleMode {
    pub fn holed_default() -> Self {
        TriangleMode::Holed {
            t: default_hole_length(),
        }
    }
}

fn check_blueprint(rs: &RotationSystem) -> Result<usize> {
    if rs.vertex_count() < 3 {
        return Err(Error::Blueprint(
            "blueprint needs at least three vertices".into(),
        ));
    }
    if !is_triangular(rs) {
        return Err(Error::Blueprint(
            "rotation system has non-triangular faces".into(),
        ));
    }
    let deg = rs.rotation(0).len();
    if (0..rs.vertex_count()).any(|v| rs.rotation(v).len() != deg) {
        return Err(Error::Blueprint("rotation system is not regular".into()));
    }
    Ok(deg)
}

/// Glues one triangle per face of a triangular, regular rotation system of
/// degree `N`. Angles are `2π/N`, so every vertex is smooth.
pub fn build_triangle_surface(rs: &RotationSystem, mode: TriangleMode) -> Result<GluedSurface> {
    let deg = check_blueprint(rs)?;
    if deg <= 6 {
        return Err(Error::FlatBlueprint {
            degree: deg,
            genus: genus_of(rs)?,
        });
    }
    triangle_complex(rs, mode, deg)
}

fn triangle_complex(rs: &RotationSystem, mode: TriangleMode, deg: usize) -> Result<GluedSurface> {
    let faces = trace_faces(rs);
    let clique = rs.vertex_count();
    // Directed edge u → v ↦ (face, position of u in the face).
    let mut owner: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for (f, face) in faces.iter().enumerate() {
        for k in 0..3 {
            owner.insert((face[k], face[(k + 1) % 3]), (f, k));
        }
    }
    let edge_pairs = || {
        let mut out = Vec::new();
        for (f, face) in faces.iter().enumerate() {
            for k in 0..3 {
                let (u, v) = (face[k], face[(k + 1) % 3]);
                let (g, j) = owner[&(v, u)];
                if (f, k) < (g, j) {
                    out.push(((f, k), (g, j)));
                }
            }
        }
        out
    };
    match mode {
        TriangleMode::Equilateral => {
            let edge = equilateral_side(deg)?;
            let polygons = vec![PolygonKind::Equilateral { n: deg }; faces.len()];
            let pairings = edge_pairs()
                .into_iter()
                .map(|(a, b)| Pairing::new(a, b))
                .collect();
            let corners = faces
                .iter()
                .map(|f| f.iter().map(|&v| Some(v)).collect())
                .collect();
            GluedSurface::assemble(
                "triangle-equilateral",
                polygons,
                pairings,
                BoundaryKind::Open,
                Marks::Corners { corners },
                clique,
                edge,
            )
        }
        TriangleMode::Holed { t } => {
            let edge = if deg >= 7 {
                holed_triangle_metrics(deg, t)?.side
            } else {
                2.0 * ((t / 6.0).cosh() / (PI / deg as f64).sin()).acosh()
            };
            // Face f, side k is sector 3f + k; its summit (side 2) runs from
            // corner C = face[k] to corner D = face[k + 1].
            let polygons = vec![PolygonKind::HoledTriangleSector { n: deg, t }; 3 * faces.len()];
            let mut pairings = Vec::new();
            for f in 0..faces.len() {
                for k in 0..3 {
                    pairings.push(Pairing::new((3 * f + k, 3), (3 * f + (k + 1) % 3, 1)));
                }
            }
            for ((f, k), (g, j)) in edge_pairs() {
                pairings.push(Pairing::new((3 * f + k, 2), (3 * g + j, 2)));
            }
            let mut corners = Vec::with_capacity(3 * faces.len());
            for face in &faces {
                for k in 0..3 {
                    corners.push(vec![None, None, Some(face[k]), Some(face[(k + 1) % 3])]);
                }
            }
            GluedSurface::assemble(
                "triangle-holed",
                polygons,
                pairings,
                BoundaryKind::Open,
                Marks::Corners { corners },
                clique,
                edge,
            )
        }
    }
}

/// Closes every open boundary: an odd one out is capped by a one-boundary
/// patch of genus `k`; if the count is even and `k > 0`, a two-boundary
/// patch of genus `k` joins the first two. The rest are pasted in pairs.
pub fn close_surface(surface: &GluedSurface, extra_genus: i64) -> Result<GluedSurface> {
    if extra_genus < 0 {
        return Err(Error::InvalidInput(format!(
            "extra genus must be ≥ 0, got {extra_genus}"
        )));
    }
    let patched = surface.patched_sides();
    let mut cycles: Vec<_> = surface
        .boundary_cycles()
        .into_iter()
        .filter(|c| !c.iter().any(|s| patched.contains_key(s)))
        .collect();
    if cycles.is_empty() {
        if extra_genus > 0 {
            return Err(Error::Pairing(
                "no boundary to attach the genus patch to".into(),
            ));
        }
        return Ok(surface.clone());
    }
    if surface.boundary_kind == BoundaryKind::Funnel {
        return Err(Error::Pairing(
            "funnel boundaries are complete ends and cannot be pasted".into(),
        ));
    }
    let mut out = surface.clone();
    out.construction = format!("{}+closed", surface.construction);
    let patch_length = cycles[0]
        .iter()
        .map(|&(p, s)| surface.geometry[p].sides[s].length)
        .sum();
    if cycles.len() % 2 == 1 {
        if extra_genus == 0 {
            return Err(Error::Pairing(format!(
                "{} boundaries cannot be pasted in pairs without a genus patch",
                cycles.len()
            )));
        }
        let c = cycles.remove(0);
        out.patches.push(GenusPatch {
            genus: extra_genus,
            length: patch_length,
            attached: vec![c],
        });
    } else if extra_genus > 0 {
        let a = cycles.remove(0);
        let b = cycles.remove(0);
        out.patches.push(GenusPatch {
            genus: extra_genus,
            length: patch_length,
            attached: vec![a, b],
        });
    }
    let mut new = Vec::new();
    for pair in cycles.chunks(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.len() != b.len() {
            return Err(Error::Pairing(format!(
                "boundary cycles of {} and {} sides cannot be pasted",
                a.len(),
                b.len()
            )));
        }
        let m = a.len();
        for i in 0..m {
            new.push(Pairing::new(a[i], b[(m - i) % m]));
        }
    }
    for pr in new {
        for &(x, y) in &[(pr.a, pr.b), (pr.b, pr.a)] {
            out.partner[x.0][x.1] = Some((y.0, y.1, false));
        }
        out.pairings.push(pr);
    }
    out.audit_lengths()?;
    Ok(out)
}

/// One block of a chain: `n` is the vertex degree of the blueprint.
#[derive(Clone, Debug)]
pub struct ChainBlock {
    pub n: usize,
    pub system: Option<RotationSystem>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockSummary {
    #[serde(rename = "N")]
    pub n: usize,
    pub clique: usize,
    pub edge_length: f64,
    /// Whether the block's metric argument applies (`N ≥ 7`).
    pub metric_feasible: bool,
    pub boundaries: usize,
}

#[derive(Clone, Debug)]
pub struct ChainSurface {
    /// `None` for an empty chain.
    pub surface: Option<GluedSurface>,
    pub blocks: Vec<BlockSummary>,
    /// Lower bound on the chromatic number after each prefix.
    pub prefix_bounds: Vec<usize>,
    pub lower_bound: usize,
}

/// Finite prefix of a chain of one-holed-triangle blocks, block `i` pasted
/// to block `i + 1` along one boundary geodesic.
pub fn build_infinite_chain(blocks: &[ChainBlock], prefix: usize, t: f64) -> Result<ChainSurface> {
    let used = &blocks[..prefix.min(blocks.len())];
    let mut polygons = Vec::new();
    let mut pairings = Vec::new();
    let mut corners = Vec::new();
    let mut summaries = Vec::new();
    let mut prefix_bounds = Vec::new();
    let mut best = 0;
    let mut previous_tail: Option<Vec<(usize, usize)>> = None;
    for (i, block) in used.iter().enumerate() {
        let rs = block.system.as_ref().ok_or_else(|| {
            Error::Blueprint(format!(
                "no rotation system supplied for block {i} (N = {})",
                block.n
            ))
        })?;
        let deg = check_blueprint(rs)?;
        if deg != block.n {
            return Err(Error::Blueprint(format!(
                "block {i}: rotation system has degree {deg}, expected N = {}",
                block.n
            )));
        }
        let b = triangle_complex(rs, TriangleMode::Holed { t }, deg)?;
        let base = polygons.len();
        let cycles = b.boundary_cycles();
        let shift = |c: &Vec<(usize, usize)>| -> Vec<(usize, usize)> {
            c.iter().map(|&(p, s)| (p + base, s)).collect()
        };
        polygons.extend_from_slice(&b.polygons);
        pairings.extend(b.pairings.iter().map(|pr| Pairing {
            a: (pr.a.0 + base, pr.a.1),
            b: (pr.b.0 + base, pr.b.1),
            twisted: pr.twisted,
        }));
        let offset_vertex = summaries
            .iter()
            .map(|s: &BlockSummary| s.clique)
            .sum::<usize>();
        if let Marks::Corners { corners: c } = &b.marks {
            corners.extend(c.iter().map(|row| {
                row.iter()
                    .map(|v| v.map(|v| v + offset_vertex))
                    .collect::<Vec<_>>()
            }));
        }
        if let Some(tail) = previous_tail.take() {
            let head = shift(&cycles[0]);
            let m = head.len();
            for k in 0..m {
                pairings.push(Pairing::new(tail[k], head[(m - k) % m]));
            }
        }
        previous_tail = cycles.last().map(shift);
        let feasible = deg >= 7;
        if feasible {
            best = best.max(rs.vertex_count());
        }
        prefix_bounds.push(best);
        summaries.push(BlockSummary {
            n: deg,
            clique: rs.vertex_count(),
            edge_length: b.edge_length,
            metric_feasible: feasible,
            boundaries: cycles.len(),
        });
    }
    let surface = if polygons.is_empty() {
        None
    } else {
        Some(GluedSurface::assemble(
            "chain",
            polygons,
            pairings,
            BoundaryKind::Open,
            Marks::Corners { corners },
            best,
            f64::NAN,
        )?)
    };
    Ok(ChainSurface {
        surface,
        blocks: summaries,
        prefix_bounds,
        lower_bound: best,
    })
}

/// Outcome of [`certify_clique`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateStatus {
    /// Every enumerated alternative is strictly longer than the edge.
    Certified,
    /// Some alternative is not longer.
    Violated,
    /// No alternative path exists within the budget.
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliqueCertificate {
    /// Clique vertex ids (polygon index for centers, blueprint vertex for corners).
    pub vertices: Vec<usize>,
    pub edge_length: f64,
    /// Largest deviation of a developed direct edge from `edge_length`.
    pub edge_error: f64,
    /// Shortest developed alternative, over chains and boundary detours.
    pub best_alternative: Option<f64>,
    pub margin: Option<f64>,
    pub depth: usize,
    pub paths: usize,
    pub status: CertificateStatus,
}

#[derive(Default)]
struct Tally {
    edge_error: f64,
    best_alternative: Option<f64>,
    paths: usize,
    /// Closest approach to an open boundary line per clique vertex.
    to_boundary: HashMap<usize, f64>,
}

impl Tally {
    fn alternative(&mut self, x: f64) {
        self.paths += 1;
        self.best_alternative = Some(self.best_alternative.map_or(x, |b: f64| b.min(x)));
    }
    fn merge(mut self, other: Tally) -> Tally {
        self.edge_error = self.edge_error.max(other.edge_error);
        if let Some(x) = other.best_alternative {
            self.best_alternative = Some(self.best_alternative.map_or(x, |b| b.min(x)));
        }
        self.paths += other.paths;
        for (v, h) in other.to_boundary {
            let e = self.to_boundary.entry(v).or_insert(h);
            *e = e.min(h);
        }
        self
    }
}

fn side_touches(n: usize, side: usize, corner: usize) -> bool {
    side == corner || (side + 1) % n == corner
}

/// Develops every non-backtracking chain of at most `max_polygons` polygons
/// between clique vertices and checks that the direct edge is the shortest.
pub fn certify_clique(s: &GluedSurface, max_polygons: usize) -> CliqueCertificate {
    let starts: Vec<(usize, Option<usize>)> = match &s.marks {
        Marks::Centers => (0..s.polygons.len()).map(|p| (p, None)).collect(),
        Marks::Corners { corners } => corners
            .iter()
            .enumerate()
            .flat_map(|(p, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| v.is_some())
                    .map(move |(k, _)| (p, Some(k)))
            })
            .collect(),
    };
    let tally = starts
        .par_iter()
        .map(|&(p, corner)| {
            let mut t = Tally::default();
            let chain = DevelopedChain::start(p);
            let direct = direct_points(s, p, corner);
            explore(s, &chain, corner, &direct, max_polygons, &mut t);
            t
        })
        .reduce(Tally::default, Tally::merge);
    let mut tally = tally;
    let has_chain_alternative = tally.best_alternative.is_some();
    if s.boundary_kind == BoundaryKind::Open || !s.patches.is_empty() {
        let mut h: Vec<f64> = tally.to_boundary.values().copied().collect();
        h.sort_by(f64::total_cmp);
        if h.len() >= 2 {
            tally.best_alternative = Some(
                tally
                    .best_alternative
                    .map_or(h[0] + h[1], |b| b.min(h[0] + h[1])),
            );
        }
    }
    let vertices: Vec<usize> = match &s.marks {
        Marks::Centers => (0..s.polygons.len()).collect(),
        Marks::Corners { corners } => {
            let mut v: Vec<usize> = corners.iter().flatten().flatten().copied().collect();
            v.sort_unstable();
            v.dedup();
            v
        }
    };
    let margin = tally.best_alternative.map(|b| b - s.edge_length);
    let status = match margin {
        _ if !has_chain_alternative => CertificateStatus::Indeterminate,
        Some(m) if m > 0.0 => CertificateStatus::Certified,
        _ => CertificateStatus::Violated,
    };
    CliqueCertificate {
        vertices,
        edge_length: s.edge_length,
        edge_error: tally.edge_error,
        best_alternative: tally.best_alternative,
        margin,
        depth: max_polygons,
        paths: tally.paths,
        status,
    }
}

fn mark_point(s: &GluedSurface, p: usize, corner: Option<usize>) -> HPoint {
    match corner {
        None => s.geometry[p].center,
        Some(k) => s.geometry[p].corners[k].expect("marked corners are finite"),
    }
}

fn corner_vertex(s: &GluedSurface, p: usize, k: usize) -> Option<usize> {
    match &s.marks {
        Marks::Centers => None,
        Marks::Corners { corners } => corners[p][k],
    }
}

/// Developed endpoints of the direct edges at a start. For a corner these
/// are the neighboring marks in every polygon of the fan around it, since a
/// chain winding round a smooth vertex can land on one of them.
fn direct_points(s: &GluedSurface, p: usize, corner: Option<usize>) -> Vec<HPoint> {
    let mut out = Vec::new();
    let Some(c0) = corner else {
        for side in 0..s.polygons[p].side_count() {
            let mut c = DevelopedChain::start(p);
            if c.extend(s, side).is_ok() {
                out.push(c.place(1, &s.geometry[c.last()].center));
            }
        }
        return out;
    };
    let u = corner_vertex(s, p, c0);
    let push_neighbors = |out: &mut Vec<HPoint>, chain: &DevelopedChain, c: usize| {
        let q = chain.last();
        let n = s.polygons[q].side_count();
        for nb in [(c + 1) % n, (c + n - 1) % n] {
            if let Some(v) = corner_vertex(s, q, nb) {
                if Some(v) != u {
                    let k = chain.len() - 1;
                    out.push(chain.place(k, &s.geometry[q].corners[nb].unwrap()));
                }
            }
        }
    };
    // Walk the fan both ways: through the side starting at the corner, and
    // through the side ending there.
    for first_side in [
        c0,
        (c0 + s.polygons[p].side_count() - 1) % s.polygons[p].side_count(),
    ] {
        let mut chain = DevelopedChain::start(p);
        let mut c = c0;
        let mut side = first_side;
        push_neighbors(&mut out, &chain, c);
        for _ in 0..FAN_LIMIT {
            let q = chain.last();
            let nq = s.polygons[q].side_count();
            let Some((r, j, tw)) = s.partner[q][side] else {
                break;
            };
            let nr = s.polygons[r].side_count();
            let next_c = matched_corner(nq, nr, side, j, tw, c);
            if chain.extend(s, side).is_err() || (r == p && next_c == c0) {
                break;
            }
            c = next_c;
            side = if j == c { (c + nr - 1) % nr } else { c };
            push_neighbors(&mut out, &chain, c);
        }
    }
    out
}

const FAN_LIMIT: usize = 256;

fn is_direct(direct: &[HPoint], p: &HPoint) -> bool {
    direct.iter().any(|q| dist(p, q) < 1e-9)
}

fn explore(
    s: &GluedSurface,
    chain: &DevelopedChain,
    start_corner: Option<usize>,
    direct: &[HPoint],
    max_polygons: usize,
    t: &mut Tally,
) {
    let k = chain.len() - 1;
    let first = chain.polygons[0];
    let here = chain.last();
    let origin = chain.place(0, &mark_point(s, first, start_corner));
    let n_here = s.polygons[here].side_count();
    match start_corner {
        None => {
            if k >= 1 && here != first {
                let x = dist(&origin, &chain.place(k, &s.geometry[here].center));
                if k == 1 {
                    t.edge_error = t.edge_error.max((x - s.edge_length).abs());
                } else if !is_direct(direct, &chain.place(k, &s.geometry[here].center)) {
                    t.alternative(x);
                }
            }
        }
        Some(c0) => {
            let u = corner_vertex(s, first, c0).unwrap();
            if k == 0 {
                // Direct edges are the sides at the start corner.
                let n = s.polygons[first].side_count();
                for c in [(c0 + 1) % n, (c0 + n - 1) % n] {
                    if corner_vertex(s, first, c).is_some_and(|v| v != u) {
                        let x = dist(&origin, &mark_point(s, first, Some(c)));
                        t.edge_error = t.edge_error.max((x - s.edge_length).abs());
                    }
                }
            } else {
                let entry = chain.entries[k - 1];
                for c in 0..n_here {
                    let Some(v) = corner_vertex(s, here, c) else {
                        continue;
                    };
                    if v == u || side_touches(n_here, entry, c) {
                        continue;
                    }
                    let target = chain.place(k, &mark_point(s, here, Some(c)));
                    if !is_direct(direct, &target) {
                        t.alternative(dist(&origin, &target));
                    }
                }
            }
            // Unpaired sides are holes still to be pasted or patched; any
            // path through them costs at least the distance to their line.
            if s.boundary_kind == BoundaryKind::Open {
                for side in (0..n_here).filter(|&x| s.partner[here][x].is_none()) {
                    let line = s.geometry[here].sides[side]
                        .line
                        .transformed(&chain.placements[k]);
                    let h = line.distance_to(&origin);
                    let e = t.to_boundary.entry(u).or_insert(h);
                    *e = e.min(h);
                }
            }
        }
    }
    if chain.len() >= max_polygons {
        return;
    }
    let came_through = if k == 0 {
        None
    } else {
        Some(chain.entries[k - 1])
    };
    for side in 0..n_here {
        if Some(side) == came_through || s.partner[here][side].is_none() {
            continue;
        }
        if k == 0 {
            if let Some(c0) = start_corner {
                if side_touches(n_here, side, c0) {
                    continue;
                }
            }
        }
        let mut next = chain.clone();
        if next.extend(s, side).is_ok() {
            explore(s, &next, start_corner, direct, max_polygons, t);
        }
    }
}

/// Serializable description of a surface; parsing it back rebuilds the
/// geometry and re-derives the topology.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDescriptor {
    pub construction: String,
    pub polygons: Vec<PolygonEntry>,
    pub pairings: Vec<[(usize, usize); 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub twisted: Vec<usize>,
    pub boundary_kind: BoundaryKind,
    pub boundaries: Vec<BoundaryEntry>,
    pub patches: Vec<GenusPatch>,
    pub marks: Marks,
    pub clique: CliqueEntry,
    pub derived: EulerData,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonEntry {
    #[serde(flatten)]
    pub kind: PolygonKind,
    /// Side lengths; `null` for sides between ideal vertices.
    pub sides: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEntry {
    pub length: f64,
    pub sides: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliqueEntry {
    pub size: usize,
    pub edge_length: Option<f64>,
}

impl GluedSurface {
    pub fn descriptor(&self) -> SurfaceDescriptor {
        let patched = self.patched_sides();
        SurfaceDescriptor {
            construction: self.construction.clone(),
            polygons: self
                .polygons
                .iter()
                .zip(&self.geometry)
                .map(|(k, g)| PolygonEntry {
                    kind: *k,
                    sides: g
                        .sides
                        .iter()
                        .map(|s| s.length.is_finite().then_some(s.length))
                        .collect(),
                })
                .collect(),
            pairings: self.pairings.iter().map(|p| [p.a, p.b]).collect(),
            twisted: self
                .pairings
                .iter()
                .enumerate()
                .filter(|(_, p)| p.twisted)
                .map(|(i, _)| i)
                .collect(),
            boundary_kind: self.boundary_kind,
            boundaries: self
                .boundary_cycles()
                .into_iter()
                .filter(|c| !c.iter().any(|s| patched.contains_key(s)))
                .map(|c| BoundaryEntry {
                    length: c
                        .iter()
                        .map(|&(p, s)| self.geometry[p].sides[s].length)
                        .sum(),
                    sides: c,
                })
                .collect(),
            patches: self.patches.clone(),
            marks: self.marks.clone(),
            clique: CliqueEntry {
                size: self.clique_size,
                edge_length: self.edge_length.is_finite().then_some(self.edge_length),
            },
            derived: self.euler(),
        }
    }

    /// Rebuilds a surface and checks the stored derived data against a
    /// fresh computation.
    pub fn from_descriptor(d: &SurfaceDescriptor) -> Result<Self> {
        let pairings = d
            .pairings
            .iter()
            .enumerate()
            .map(|(i, [a, b])| Pairing {
                a: *a,
                b: *b,
                twisted: d.twisted.contains(&i),
            })
            .collect();
        let mut s = GluedSurface::assemble(
            d.construction.clone(),
            d.polygons.iter().map(|p| p.kind).collect(),
            pairings,
            d.boundary_kind,
            d.marks.clone(),
            d.clique.size,
            d.clique.edge_length.unwrap_or(f64::NAN),
        )?;
        s.patches = d.patches.clone();
        for (entry, g) in d.polygons.iter().zip(&s.geometry) {
            for (stored, side) in entry.sides.iter().zip(&g.sides) {
                let ok = match stored {
                    None => side.length.is_infinite(),
                    Some(l) => (l - side.length).abs() <= 1e-9,
                };
                if !ok {
                    return Err(Error::Validation(
                        "stored side length does not match".into(),
                    ));
                }
            }
        }
        if s.euler() != d.derived {
            return Err(Error::Validation(format!(
                "stored topology {:?} differs from recomputed {:?}",
                d.derived,
                s.euler()
            )));
        }
        Ok(s)
    }
}
