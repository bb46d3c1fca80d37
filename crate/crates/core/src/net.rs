//! Maximal separated nets in a metric disk, their distance graphs, and
//! sampled checks that the induced coloring of the disk is a `d`-coloring.

use crate::bounds::upper_bound_in_d;
use crate::error::{invalid, Error, Result};
use crate::formulas::{degree_bound, net_radius};
use crate::graph::{greedy_color, Coloring, Graph, Ordering};
use crate::kernel::{dist, minkowski, minkowski_cross, point_at, HPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// Consecutive rejected darts after which throwing stops.
pub const REJECTION_STREAK: usize = 5000;
/// Samples per coverage audit.
pub const AUDIT_SAMPLES: usize = 10_000;

/// Buckets by distance band and angular sector around the origin.
#[derive(Clone, Debug)]
struct PolarIndex {
    width: f64,
    /// `bands[k][s]`: centers with `ρ ∈ [k·width, (k+1)·width)` in sector `s`.
    bands: Vec<Vec<Vec<usize>>>,
}

fn sector_of(theta: f64, m: usize) -> usize {
    let t = theta.rem_euclid(TAU);
    ((t / TAU * m as f64) as usize).min(m - 1)
}

impl PolarIndex {
    fn new(width: f64, max_rho: f64) -> Self {
        let count = (max_rho / width).floor() as usize + 1;
        let bands = (0..count)
            .map(|k| {
                let outer = (k + 1) as f64 * width;
                let m = ((TAU * outer.sinh() / width).ceil() as usize).max(1);
                vec![Vec::new(); m]
            })
            .collect();
        PolarIndex { width, bands }
    }

    fn band_of(&self, rho: f64) -> usize {
        ((rho / self.width).floor() as usize).min(self.bands.len() - 1)
    }

    fn insert(&mut self, p: &HPoint, id: usize) {
        let (rho, theta) = p.polar();
        let k = self.band_of(rho);
        let m = self.bands[k].len();
        self.bands[k][sector_of(theta, m)].push(id);
    }

    /// Whether `f` holds for some id near `p`, stopping at the first.
    fn any_near(&self, p: &HPoint, reach: f64, mut f: impl FnMut(usize) -> bool) -> bool {
        let mut found = false;
        self.for_each_near_until(p, reach, |i| {
            found = f(i);
            found
        });
        found
    }

    /// Calls `f` on every id stored within distance `reach` of `p` (and
    /// possibly some further away).
    fn for_each_near(&self, p: &HPoint, reach: f64, mut f: impl FnMut(usize)) {
        self.for_each_near_until(p, reach, |i| {
            f(i);
            false
        });
    }

    /// As [`Self::for_each_near`], stopping once `f` returns true.
    fn for_each_near_until(&self, p: &HPoint, reach: f64, mut f: impl FnMut(usize) -> bool) {
        let (rho, theta) = p.polar();
        let lo = ((rho - reach).max(0.0) / self.width).floor() as usize;
        if lo >= self.bands.len() {
            return;
        }
        let hi = self.band_of(rho + reach);
        for k in lo..=hi {
            let band = &self.bands[k];
            let m = band.len();
            let inner = k as f64 * self.width;
            // A point at angle Δθ > π/2 from p is farther than its own ρ,
            // otherwise sinh(ρ_q) sin Δθ ≤ sinh(reach).
            let half = if inner > reach {
                (reach.sinh() / inner.sinh()).min(1.0).asin() + 1e-9
            } else {
                PI
            };
            if half >= PI || m == 1 {
                if band.iter().flatten().any(|&i| f(i)) {
                    return;
                }
                continue;
            }
            let a = ((theta - half) / TAU * m as f64).floor() as i64;
            let b = ((theta + half) / TAU * m as f64).floor() as i64;
            if (b - a + 1) as usize >= m {
                if band.iter().flatten().any(|&i| f(i)) {
                    return;
                }
                continue;
            }
            for s in a..=b {
                for &i in &band[s.rem_euclid(m as i64) as usize] {
                    if f(i) {
                        return;
                    }
                }
            }
        }
    }
}

/// An `r`-separated set of centers in the disk of radius `R` about the origin.
#[derive(Clone, Debug)]
pub struct Net {
    pub centers: Vec<HPoint>,
    pub r: f64,
    pub radius: f64,
    pub base: HPoint,
    pub seed: u64,
    index: PolarIndex,
}

/// Uniform point of the disk of radius `radius` about the origin.
pub fn sample_disk<R: Rng>(rng: &mut R, radius: f64) -> HPoint {
    let u: f64 = rng.gen();
    let rho = 2.0 * (u.sqrt() * (radius / 2.0).sinh()).asinh();
    let theta = rng.gen::<f64>() * TAU;
    HPoint::from_polar(rho, theta)
}

impl Net {
    fn empty(radius: f64, r: f64, seed: u64) -> Self {
        Net {
            centers: Vec::new(),
            r,
            radius,
            base: HPoint::origin(),
            seed,
            index: PolarIndex::new(r, radius + r),
        }
    }

    fn push(&mut self, p: HPoint) {
        self.index.insert(&p, self.centers.len());
        self.centers.push(p);
    }

    /// Builds a net from the given centers (for tests and permutations).
    pub fn from_centers(centers: Vec<HPoint>, radius: f64, r: f64, seed: u64) -> Self {
        let mut net = Net::empty(radius, r, seed);
        for c in centers {
            net.push(c);
        }
        net
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Whether some center lies within distance `r` (inclusive) of `p`.
    pub fn covers(&self, p: &HPoint) -> bool {
        self.index.any_near(p, self.r, |i| self.within_r(p, i))
    }

    /// Compares `cosh` of the distance, leaving near-ties to `dist`.
    fn within_r(&self, p: &HPoint, i: usize) -> bool {
        let c = self.r.cosh();
        let m = minkowski(&p.coords(), &self.centers[i].coords());
        if m <= c * (1.0 - 1e-12) {
            true
        } else if m >= c * (1.0 + 1e-12) {
            false
        } else {
            dist(p, &self.centers[i]) <= self.r
        }
    }

    /// Lowest-index center within distance `r` of `p`.
    pub fn covering_center(&self, p: &HPoint) -> Option<usize> {
        let mut best = None;
        self.index.for_each_near(p, self.r, |i| {
            if best.is_none_or(|b| i < b) && self.within_r(p, i) {
                best = Some(i);
            }
        });
        best
    }

    /// Center indices within distance `reach` of `p`, sorted.
    pub fn near(&self, p: &HPoint, reach: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.index.for_each_near(p, reach, |i| {
            if dist(p, &self.centers[i]) <= reach {
                out.push(i);
            }
        });
        out.sort_unstable();
        out
    }

    /// Smallest pairwise center distance by brute force.
    pub fn min_separation(&self) -> f64 {
        let c = &self.centers;
        (0..c.len())
            .into_par_iter()
            .map(|i| {
                c[i + 1..]
                    .iter()
                    .map(|q| dist(&c[i], q))
                    .fold(f64::INFINITY, f64::min)
            })
            .reduce(|| f64::INFINITY, f64::min)
    }
}

/// Maximal `r`-separated net in the disk of radius `R`: dart throwing, then
/// an exact gap fill, then coverage audits. Deterministic in `seed`.
pub fn build_net(radius: f64, r: f64, seed: u64) -> Result<Net> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid(format!(
            "region radius must be positive, got {radius}"
        )));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid(format!("separation must be positive, got {r}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = Net::empty(radius, r, seed);
    net.push(HPoint::origin());
    let mut streak = 0;
    while streak < REJECTION_STREAK {
        let p = sample_disk(&mut rng, radius);
        if net.covers(&p) {
            streak += 1;
        } else {
            net.push(p);
            streak = 0;
        }
    }
    lattice_pass(&mut net);
    fill_voronoi_gaps(&mut net);
    // The audit is redundant after the exact fill and stays as a sampled
    // cross-check; it would insert any uncovered sample it found.
    loop {
        let mut added = false;
        for _ in 0..AUDIT_SAMPLES {
            let p = sample_disk(&mut rng, radius);
            if !net.covers(&p) {
                net.push(p);
                added = true;
            }
        }
        if !added {
            break;
        }
    }
    Ok(net)
}

/// Offers every point of a polar lattice with covering radius `r/4`. After
/// it, no point of the disk is farther than `5r/4` from the net.
fn lattice_pass(net: &mut Net) {
    let r = net.r;
    let radius = net.radius;
    let step = LATTICE_STEP * r;
    let bands = (radius / step).ceil() as usize;
    for k in 0..=bands {
        let rho = (k as f64 * step).min(radius);
        let m = ((TAU * rho.sinh() / step).ceil() as usize).max(1);
        for s in 0..m {
            let p = HPoint::from_polar(rho, TAU * s as f64 / m as f64);
            if !net.covers(&p) {
                net.push(p);
            }
        }
    }
}

/// Makes the net exactly maximal. An uncovered point exists iff the distance
/// to the nearest center exceeds `r` somewhere in the disk, and its maximum is
/// attained at a Voronoi vertex, where a bisector meets the rim, or at the
/// rim point opposite a center. After [`lattice_pass`] that distance is at
/// most `5r/4`, so only centers within `5r/2` of each other need pairing.
fn fill_voronoi_gaps(net: &mut Net) {
    // Candidates of old centers only were settled in the previous round and
    // coverage only grows, so each round anchors on the newly added centers.
    let mut from = 0;
    loop {
        let candidates = gap_candidates(net, from);
        from = net.len();
        let mut added = false;
        for p in candidates {
            if !net.covers(&p) {
                net.push(p);
                added = true;
            }
        }
        if !added {
            break;
        }
    }
}

const LATTICE_STEP: f64 = 0.25;

/// Candidates from triples and pairs whose largest index is at least `from`.
fn gap_candidates(net: &Net, from: usize) -> Vec<HPoint> {
    let (r, radius) = (net.r, net.radius);
    let (ch, sh) = (radius.cosh(), radius.sinh());
    let inside = |p: &HPoint| p.polar().0 <= radius;
    (from..net.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let a = net.centers[i].coords();
            let mut near: Vec<usize> = net.near(&net.centers[i], 2.0 * (1.0 + LATTICE_STEP) * r);
            near.retain(|&j| j < i);
            let mut out = Vec::new();
            for (x, &j) in near.iter().enumerate() {
                let b = net.centers[j].coords();
                let ab = sub3(&a, &b);
                for &k in &near[x + 1..] {
                    let v = minkowski_cross(&ab, &sub3(&a, &net.centers[k].coords()));
                    if minkowski(&v, &v) <= 0.0 {
                        continue;
                    }
                    let p = HPoint::from_timelike(&v);
                    if dist(&p, &net.centers[i]) > r && inside(&p) && !net.covers(&p) {
                        out.push(p);
                    }
                }
                // Rim points x(θ) with ⟨x, a − b⟩ = 0.
                let amp = ab[1].hypot(ab[2]);
                let rhs = ab[0] * ch / sh;
                if amp > 0.0 && rhs.abs() <= amp {
                    let phase = ab[2].atan2(ab[1]);
                    let spread = (rhs / amp).acos();
                    for theta in [phase - spread, phase + spread] {
                        let p = HPoint::from_polar(radius, theta);
                        if !net.covers(&p) {
                            out.push(p);
                        }
                    }
                }
            }
            let (rho, theta) = net.centers[i].polar();
            if rho >= radius - (1.0 + LATTICE_STEP) * r {
                let p = HPoint::from_polar(radius, theta + PI);
                if !net.covers(&p) {
                    out.push(p);
                }
            }
            out
        })
        .collect()
}

fn sub3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Fraction of `samples` uniform points of the disk not covered by the net.
pub fn coverage_gaps(net: &Net, samples: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .filter(|_| !net.covers(&sample_disk(&mut rng, net.radius)))
        .count()
}

/// Centers joined when `|dist − d| ≤ 2 r0`.
#[derive(Clone, Debug)]
pub struct DistanceGraph {
    pub graph: Graph,
    pub d: f64,
    pub r0: f64,
    pub max_degree: usize,
}

pub fn build_distance_graph(net: &Net, d: f64) -> Result<DistanceGraph> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(invalid(format!("d must be positive, got {d}")));
    }
    let r0 = net.r;
    if r0 > 2.0 * d / 5.0 * (1.0 + 1e-12) {
        return Err(invalid(format!(
            "r0 = {r0} exceeds 2d/5 = {} for d = {d}",
            2.0 * d / 5.0
        )));
    }
    let lists: Vec<Vec<usize>> = (0..net.len())
        .into_par_iter()
        .map(|i| {
            let p = &net.centers[i];
            let mut out = Vec::new();
            net.index.for_each_near(p, d + 2.0 * r0, |j| {
                if j > i && (dist(p, &net.centers[j]) - d).abs() <= 2.0 * r0 {
                    out.push(j);
                }
            });
            out
        })
        .collect();
    let mut graph = Graph::new(net.len());
    for (i, list) in lists.into_iter().enumerate() {
        for j in list {
            graph.add_edge(i, j);
        }
    }
    graph.finish();
    let max_degree = graph.max_degree();
    Ok(DistanceGraph {
        graph,
        d,
        r0,
        max_degree,
    })
}

/// Color of `p`: the color of the lowest-index center whose `r`-ball holds
/// it, or `None` when `p` is uncovered.
pub fn point_color(net: &Net, coloring: &Coloring, p: &HPoint) -> Option<usize> {
    net.covering_center(p).map(|i| coloring.colors[i])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub trials: u64,
    pub violations: u64,
    /// Pairs with an uncovered endpoint (skipped).
    pub uncovered: u64,
}

/// Number of independent random streams used by [`validate_coloring`].
pub const VALIDATION_SHARDS: u64 = 64;

/// Samples pairs at distance exactly `d` inside the disk of radius `R − d`
/// and counts those that receive the same color.
pub fn validate_coloring(
    net: &Net,
    coloring: &Coloring,
    d: f64,
    trials: u64,
    seed: u64,
) -> Result<Validation> {
    if trials == 0 {
        return Ok(Validation {
            trials: 0,
            violations: 0,
            uncovered: 0,
        });
    }
    let safe = net.radius - d;
    if safe <= 0.0 {
        return Err(invalid(format!(
            "region radius {} leaves no room for pairs at distance {d}",
            net.radius
        )));
    }
    if coloring.colors.len() != net.len() {
        return Err(Error::Validation("coloring does not match the net".into()));
    }
    let (violations, uncovered) = (0..VALIDATION_SHARDS)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard + 1);
            let share = trials / VALIDATION_SHARDS + u64::from(shard < trials % VALIDATION_SHARDS);
            let mut bad = 0u64;
            let mut open = 0u64;
            for _ in 0..share {
                let x = sample_disk(&mut rng, safe);
                let theta = rng.gen::<f64>() * TAU;
                let y = point_at(&x, theta, d).expect("d checked above");
                match (
                    point_color(net, coloring, &x),
                    point_color(net, coloring, &y),
                ) {
                    (Some(a), Some(b)) if a == b => bad += 1,
                    (Some(_), Some(_)) => {}
                    _ => open += 1,
                }
            }
            (bad, open)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(Validation {
        trials,
        violations,
        uncovered,
    })
}

/// Parameters of one net experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct NetConfig {
    pub d: f64,
    pub radius: f64,
    /// Separation; defaults to `min(2d/5, arcsinh 1)`.
    pub r0: Option<f64>,
    pub seed: u64,
    pub trials: u64,
    pub ordering: Ordering,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetExperiment {
    #[serde(rename = "R")]
    pub radius: f64,
    pub r0: f64,
    pub d: f64,
    pub seed: u64,
    pub centers: usize,
    pub edges: usize,
    pub max_degree: usize,
    pub degree_bound: f64,
    pub colors_used: usize,
    pub phi_plus_one: u64,
    pub ordering: Ordering,
    pub trials: u64,
    pub violations: u64,
    pub uncovered: u64,
    pub wall_time: Option<f64>,
}

/// Net, graph, coloring and validation in one run. Also returns the net and
/// coloring for rendering.
pub fn run_experiment(cfg: &NetConfig) -> Result<(NetExperiment, Net, Coloring)> {
    let r0 = cfg.r0.unwrap_or_else(|| net_radius(cfg.d));
    if r0.is_nan() || r0 <= 0.0 || r0 > 2.0 * cfg.d / 5.0 * (1.0 + 1e-12) {
        return Err(invalid(format!(
            "r0 = {r0} must lie in (0, 2d/5 = {}]",
            2.0 * cfg.d / 5.0
        )));
    }
    let net = build_net(cfg.radius, r0, cfg.seed)?;
    let g = build_distance_graph(&net, cfg.d)?;
    let coloring = greedy_color(&g.graph, cfg.ordering);
    let v = validate_coloring(&net, &coloring, cfg.d, cfg.trials, cfg.seed)?;
    let report = NetExperiment {
        radius: cfg.radius,
        r0,
        d: cfg.d,
        seed: cfg.seed,
        centers: net.len(),
        edges: g.graph.edge_count(),
        max_degree: g.max_degree,
        degree_bound: degree_bound(cfg.d, r0)?,
        colors_used: coloring.count,
        phi_plus_one: upper_bound_in_d(cfg.d)?,
        ordering: cfg.ordering,
        trials: v.trials,
        violations: v.violations,
        uncovered: v.uncovered,
        wall_time: None,
    };
    Ok((report, net, coloring))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_region_has_one_center() {
        let net = build_net(0.1, 0.4, 3).unwrap();
        assert_eq!(net.len(), 1);
        assert_eq!(net.centers[0], HPoint::origin());
    }

    #[test]
    fn separation_and_coverage() {
        let net = build_net(3.0, 0.4, 11).unwrap();
        assert!(net.min_separation() > 0.4);
        assert_eq!(coverage_gaps(&net, 10_000, 99), 0);
    }

    #[test]
    fn index_matches_brute_force() {
        let net = build_net(4.0, 0.3, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let p = sample_disk(&mut rng, 4.5);
            let reach = rng.gen::<f64>() * 2.0;
            let brute: Vec<usize> = (0..net.len())
                .filter(|&i| dist(&p, &net.centers[i]) <= reach)
                .collect();
            assert_eq!(net.near(&p, reach), brute);
        }
    }

    #[test]
    fn edge_interval() {
        let d = 1.0;
        let r0 = 0.4;
        let a = HPoint::origin();
        let on = HPoint::from_polar(d, 0.3);
        let off = HPoint::from_polar(d + 2.0 * r0 + 1e-6, 0.3);
        let net = Net::from_centers(vec![a, on], 5.0, r0, 0);
        assert_eq!(build_distance_graph(&net, d).unwrap().graph.edge_count(), 1);
        let net = Net::from_centers(vec![a, off], 5.0, r0, 0);
        assert_eq!(build_distance_graph(&net, d).unwrap().graph.edge_count(), 0);
        assert!(build_distance_graph(&net, 0.5).is_err());
    }
}
