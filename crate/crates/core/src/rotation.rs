//! Rotation systems: cyclic neighbor orders that define a cellular embedding
//! of a graph in an oriented surface.

use crate::bounds::ringel_youngs_genus;
use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct RotationSystem {
    rot: Vec<Vec<usize>>,
    /// `pos[v][w]`: index of `w` in `rot[v]`.
    pos: Vec<HashMap<usize, usize>>,
}

impl fmt::Debug for RotationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RotationSystem")
            .field("rot", &self.rot)
            .finish()
    }
}

fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

impl RotationSystem {
    /// Checks that adjacency is symmetric and every neighbor appears once.
    pub fn new(rot: Vec<Vec<usize>>) -> Result<Self> {
        let n = rot.len();
        let mut pos = Vec::with_capacity(n);
        for (v, list) in rot.iter().enumerate() {
            let mut map = HashMap::with_capacity(list.len());
            for (i, &w) in list.iter().enumerate() {
                if w >= n {
                    return Err(validation(format!("vertex {v} lists unknown vertex {w}")));
                }
                if w == v {
                    return Err(validation(format!("vertex {v} lists itself")));
                }
                if map.insert(w, i).is_some() {
                    return Err(validation(format!("vertex {v} lists {w} twice")));
                }
            }
            pos.push(map);
        }
        for (v, list) in rot.iter().enumerate() {
            for &w in list {
                if !pos[w].contains_key(&v) {
                    return Err(validation(format!(
                        "edge {v}-{w} missing from the rotation at {w}"
                    )));
                }
            }
        }
        Ok(RotationSystem { rot, pos })
    }

    pub fn vertex_count(&self) -> usize {
        self.rot.len()
    }

    pub fn edge_count(&self) -> usize {
        self.rot.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rot[v]
    }

    /// Neighbor following `w` in the cyclic order at `v`.
    pub fn succ(&self, v: usize, w: usize) -> usize {
        let r = &self.rot[v];
        r[(self.pos[v][&w] + 1) % r.len()]
    }

    pub fn is_complete(&self) -> bool {
        let n = self.vertex_count();
        self.rot.iter().all(|l| l.len() + 1 == n)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.rot[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Same system with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let mut rot = vec![Vec::new(); self.vertex_count()];
        for (v, list) in self.rot.iter().enumerate() {
            rot[perm[v]] = list.iter().map(|&w| perm[w]).collect();
        }
        RotationSystem::new(rot)
    }

    /// Parses the text format: one `v: a b c` line per vertex, `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(usize, Vec<usize>)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: i + 1,
                message,
            };
            let (head, tail) = line
                .split_once(':')
                .ok_or_else(|| parse_err("expected `v: neighbors`".into()))?;
            let v: usize = head
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("bad vertex {:?}", head.trim())))?;
            let list = tail
                .split_whitespace()
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| parse_err(format!("bad neighbor {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            entries.push((v, list));
        }
        let n = entries.len();
        let mut rot = vec![None; n];
        for (v, list) in entries {
            if v >= n {
                return Err(validation(format!("vertex {v} out of range for {n} lines")));
            }
            if rot[v].replace(list).is_some() {
                return Err(validation(format!("vertex {v} listed twice")));
            }
        }
        RotationSystem::new(rot.into_iter().map(Option::unwrap).collect())
    }
}

impl fmt::Display for RotationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, list) in self.rot.iter().enumerate() {
            write!(f, "{v}:")?;
            for w in list {
                write!(f, " {w}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Faces as vertex cycles. The face after the directed edge `u → v` continues
/// with `v → succ_v(u)`.
pub fn trace_faces(rs: &RotationSystem) -> Vec<Vec<usize>> {
    let n = rs.vertex_count();
    let mut used: Vec<Vec<bool>> = (0..n).map(|v| vec![false; rs.rot[v].len()]).collect();
    let mut faces = Vec::new();
    for u0 in 0..n {
        for i0 in 0..rs.rot[u0].len() {
            if used[u0][i0] {
                continue;
            }
            let mut face = Vec::new();
            let (mut u, mut v) = (u0, rs.rot[u0][i0]);
            loop {
                let i = rs.pos[u][&v];
                if used[u][i] {
                    break;
                }
                used[u][i] = true;
                face.push(u);
                let w = rs.succ(v, u);
                u = v;
                v = w;
            }
            faces.push(face);
        }
    }
    faces
}

/// `(2 − V + E − F) / 2`.
pub fn genus_of(rs: &RotationSystem) -> Result<i64> {
    if !rs.is_connected() {
        return Err(validation("rotation system is not connected"));
    }
    let v = rs.vertex_count() as i64;
    let e = rs.edge_count() as i64;
    let f = trace_faces(rs).len() as i64;
    let twice = 2 - v + e - f;
    if twice % 2 != 0 {
        return Err(Error::Consistency(format!(
            "odd Euler characteristic: V={v} E={e} F={f}"
        )));
    }
    Ok(twice / 2)
}

pub fn is_triangular(rs: &RotationSystem) -> bool {
    trace_faces(rs).iter().all(|f| f.len() == 3)
}

/// Whether `rs` embeds `K_n` in its minimal genus.
pub fn verify_ringel_youngs(rs: &RotationSystem, n: usize) -> Result<bool> {
    if rs.vertex_count() != n || !rs.is_complete() {
        return Err(validation(format!(
            "not a rotation system of K_{n} ({} vertices)",
            rs.vertex_count()
        )));
    }
    Ok(genus_of(rs)? == ringel_youngs_genus(n)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceReport {
    #[serde(rename = "V")]
    pub v: usize,
    #[serde(rename = "E")]
    pub e: usize,
    #[serde(rename = "F")]
    pub f: usize,
    pub genus: i64,
    pub triangular: bool,
    pub face_lengths: Vec<usize>,
}

pub fn face_report(rs: &RotationSystem) -> Result<FaceReport> {
    let faces = trace_faces(rs);
    let mut face_lengths: Vec<usize> = faces.iter().map(Vec::len).collect();
    face_lengths.sort_unstable();
    face_lengths.dedup();
    Ok(FaceReport {
        v: rs.vertex_count(),
        e: rs.edge_count(),
        f: faces.len(),
        genus: genus_of(rs)?,
        triangular: faces.iter().all(|f| f.len() == 3),
        face_lengths,
    })
}

/// The tetrahedron.
pub fn k4() -> RotationSystem {
    RotationSystem::new(vec![
        vec![1, 2, 3],
        vec![0, 3, 2],
        vec![0, 1, 3],
        vec![0, 2, 1],
    ])
    .unwrap()
}

/// The cyclic torus embedding of `K_7`.
pub fn k7() -> RotationSystem {
    let rot = (0..7)
        .map(|i| [1, 3, 2, 6, 4, 5].iter().map(|k| (i + k) % 7).collect())
        .collect();
    RotationSystem::new(rot).unwrap()
}

/// Outcome of [`search_triangular_embedding`].
#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found { system: RotationSystem, nodes: u64 },
    NotFound { nodes: u64 },
}

/// Complete graphs on `n` vertices admit triangular embeddings exactly when
/// `(n − 3)(n − 4) ≡ 0 mod 12`.
pub fn triangular_admissible(n: usize) -> bool {
    n >= 3 && matches!(n % 12, 0 | 3 | 4 | 7)
}

/// Backtracking search for a triangular embedding of `K_n`.
///
/// The state is a set of oriented triangles. Each triangle `(a, b, c)`
/// fixes `succ_b(a) = c`, `succ_c(b) = a` and `succ_a(c) = b`; a choice is
/// rejected if it gives some vertex two successors, or closes a successor
/// cycle at a vertex before all its neighbors are on it. Every directed edge
/// must end up in exactly one triangle.
pub fn search_triangular_embedding(n: usize, seed: u64, budget: u64) -> Result<SearchOutcome> {
    if !triangular_admissible(n) {
        return Err(Error::InvalidInput(format!(
            "K_{n} has no triangular embedding (need n ≡ 0, 3, 4, 7 mod 12)"
        )));
    }
    let mut s = Search::new(n, seed, budget);
    // Fix the rotation at vertex 0 to 1, 2, …, n−1 (any embedding can be
    // relabeled so), which seeds the triangles (i, 0, i+1).
    for i in 1..n {
        let j = if i + 1 == n { 1 } else { i + 1 };
        if !s.place(i, 0, j) {
            return Ok(SearchOutcome::NotFound { nodes: 0 });
        }
    }
    let found = s.run();
    let nodes = s.nodes;
    if !found {
        return Ok(SearchOutcome::NotFound { nodes });
    }
    let system = s.extract()?;
    if !is_triangular(&system) || !verify_ringel_youngs(&system, n)? {
        return Err(Error::Consistency(
            "search produced an invalid system".into(),
        ));
    }
    Ok(SearchOutcome::Found { system, nodes })
}

const NIL: usize = usize::MAX;

struct Search {
    n: usize,
    /// `succ[v][a]` = neighbor after `a` in the rotation at `v`.
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    /// `edge_used[a][b]`: directed edge `a → b` lies on a triangle.
    edge_used: Vec<Vec<bool>>,
    trail: Vec<(usize, usize, usize)>,
    rng: ChaCha8Rng,
    nodes: u64,
    budget: u64,
}

impl Search {
    fn new(n: usize, seed: u64, budget: u64) -> Self {
        Search {
            n,
            succ: vec![vec![NIL; n]; n],
            pred: vec![vec![NIL; n]; n],
            edge_used: vec![vec![false; n]; n],
            trail: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            nodes: 0,
            budget,
        }
    }

    /// Length of the successor chain through `a` at `v`, if it is a cycle.
    fn closed_cycle_len(&self, v: usize, a: usize) -> Option<usize> {
        let mut len = 1;
        let mut x = self.succ[v][a];
        while x != NIL && x != a {
            len += 1;
            x = self.succ[v][x];
        }
        (x == a).then_some(len)
    }

    fn can_link(&self, v: usize, a: usize, c: usize) -> bool {
        if self.succ[v][a] != NIL || self.pred[v][c] != NIL {
            return false;
        }
        // Linking a → c closes a cycle iff the chain from c already reaches a.
        let mut len = 1;
        let mut x = c;
        while x != NIL {
            if x == a {
                return len == self.n - 1;
            }
            len += 1;
            x = self.succ[v][x];
        }
        true
    }

    /// Oriented triangle: directed edges `a→b`, `b→c`, `c→a`.
    fn place(&mut self, a: usize, b: usize, c: usize) -> bool {
        if self.edge_used[a][b] || self.edge_used[b][c] || self.edge_used[c][a] {
            return false;
        }
        // Face a→b→c: at b, succ_b(a) = c; at c, succ_c(b) = a; at a, succ_a(c) = b.
        let links = [(b, a, c), (c, b, a), (a, c, b)];
        let mut done = 0;
        for &(v, x, y) in &links {
            if !self.can_link(v, x, y) {
                break;
            }
            self.succ[v][x] = y;
            self.pred[v][y] = x;
            done += 1;
        }
        if done < 3 {
            for &(v, x, y) in &links[..done] {
                self.succ[v][x] = NIL;
                self.pred[v][y] = NIL;
            }
            return false;
        }
        self.edge_used[a][b] = true;
        self.edge_used[b][c] = true;
        self.edge_used[c][a] = true;
        self.trail.push((a, b, c));
        true
    }

    fn undo(&mut self) {
        let (a, b, c) = self.trail.pop().unwrap();
        for &(v, x, y) in &[(b, a, c), (c, b, a), (a, c, b)] {
            self.succ[v][x] = NIL;
            self.pred[v][y] = NIL;
        }
        self.edge_used[a][b] = false;
        self.edge_used[b][c] = false;
        self.edge_used[c][a] = false;
    }

    /// Candidate third vertices for a triangle on the directed edge `a → b`.
    fn candidates(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&c| {
                c != a
                    && c != b
                    && !self.edge_used[b][c]
                    && !self.edge_used[c][a]
                    && self.succ[b][a] == NIL
                    && self.pred[b][c] == NIL
                    && self.succ[c][b] == NIL
                    && self.pred[c][a] == NIL
                    && self.succ[a][c] == NIL
                    && self.pred[a][b] == NIL
            })
            .collect()
    }

    fn run(&mut self) -> bool {
        if self.nodes >= self.budget {
            return false;
        }
        self.nodes += 1;
        // Most constrained open directed edge.
        let mut best: Option<(usize, usize, Vec<usize>)> = None;
        for a in 0..self.n {
            for b in 0..self.n {
                if a == b || self.edge_used[a][b] {
                    continue;
                }
                let cand = self.candidates(a, b);
                if cand.is_empty() {
                    return false;
                }
                if best.as_ref().is_none_or(|(_, _, c)| cand.len() < c.len()) {
                    let one = cand.len() == 1;
                    best = Some((a, b, cand));
                    if one {
                        break;
                    }
                }
            }
            if best.as_ref().is_some_and(|(_, _, c)| c.len() == 1) {
                break;
            }
        }
        let Some((a, b, mut cand)) = best else {
            return true;
        };
        cand.shuffle(&mut self.rng);
        for c in cand {
            if self.place(a, b, c) {
                if self.run() {
                    return true;
                }
                self.undo();
            }
            if self.nodes >= self.budget {
                return false;
            }
        }
        false
    }

    fn extract(&self) -> Result<RotationSystem> {
        let mut rot = Vec::with_capacity(self.n);
        for v in 0..self.n {
            let start = if v == 0 { 1 } else { 0 };
            let mut list = vec![start];
            let mut x = self.succ[v][start];
            while x != start {
                list.push(x);
                x = self.succ[v][x];
            }
            rot.push(list);
        }
        debug_assert!((0..self.n)
            .all(|v| self.closed_cycle_len(v, if v == 0 { 1 } else { 0 }) == Some(self.n - 1)));
        RotationSystem::new(rot)
    }
}
