use super::{dist, HPoint, Isometry, PolygonGeometry};
use crate::error::{Error, Result};

/// Read access to a polygon complex with side pairings.
pub trait Gluing {
    fn polygon_count(&self) -> usize;
    fn geometry(&self, polygon: usize) -> &PolygonGeometry;
    /// `(polygon, side, twisted)` glued to the given side, if any.
    fn partner(&self, polygon: usize, side: usize) -> Option<(usize, usize, bool)>;
}

/// Isometry carrying polygon `q` (in its own coordinates) onto the far side
/// of side `i` of polygon `p`, midpoint to midpoint.
///
/// A plain gluing reverses the direction along the shared side, which keeps
/// orientations compatible; a twisted one keeps it and reflects.
pub fn gluing_isometry(
    p: &PolygonGeometry,
    i: usize,
    q: &PolygonGeometry,
    j: usize,
    twisted: bool,
) -> Isometry {
    let sp = &p.sides[i];
    let sq = &q.sides[j];
    let t = if twisted {
        sp.tangent
    } else {
        [-sp.tangent[0], -sp.tangent[1], -sp.tangent[2]]
    };
    let n = [-sp.outward[0], -sp.outward[1], -sp.outward[2]];
    Isometry::from_frame(&sp.midpoint, &t, &n).compose(&sq.frame().inverse())
}

/// A sequence of polygons laid out in the plane so that consecutive ones
/// meet along the crossed side.
#[derive(Clone, Debug)]
pub struct DevelopedChain {
    pub polygons: Vec<usize>,
    pub placements: Vec<Isometry>,
    /// `crossings[k]` is the side of `polygons[k]` crossed into `polygons[k + 1]`.
    pub crossings: Vec<usize>,
    /// `entries[k]` is the side of `polygons[k + 1]` entered through.
    pub entries: Vec<usize>,
}

impl DevelopedChain {
    pub fn start(polygon: usize) -> Self {
        DevelopedChain {
            polygons: vec![polygon],
            placements: vec![Isometry::identity()],
            crossings: Vec::new(),
            entries: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.polygons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polygons.is_empty()
    }

    pub fn last(&self) -> usize {
        *self.polygons.last().expect("chain is never empty")
    }

    /// Crosses `side` of the last polygon.
    pub fn extend<G: Gluing + ?Sized>(&mut self, g: &G, side: usize) -> Result<()> {
        let p = self.last();
        let geom = g.geometry(p);
        if side >= geom.side_count() {
            return Err(Error::Combinatorial(format!(
                "polygon {p} has no side {side}"
            )));
        }
        let (q, j, twisted) = g.partner(p, side).ok_or_else(|| {
            Error::Combinatorial(format!("side {side} of polygon {p} is not glued"))
        })?;
        let step = gluing_isometry(geom, side, g.geometry(q), j, twisted);
        let placed = self.placements.last().unwrap().compose(&step);
        self.polygons.push(q);
        self.placements.push(placed);
        self.crossings.push(side);
        self.entries.push(j);
        Ok(())
    }

    /// Image of a point given in the coordinates of chain member `k`.
    pub fn place(&self, k: usize, p: &HPoint) -> HPoint {
        self.placements[k].apply(p)
    }

    /// Largest mismatch between the two developed copies of each crossed
    /// side (corners when finite, midpoints otherwise).
    pub fn seam_error<G: Gluing + ?Sized>(&self, g: &G) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.crossings.len() {
            let a = g.geometry(self.polygons[k]);
            let b = g.geometry(self.polygons[k + 1]);
            let (i, j) = (self.crossings[k], self.entries[k]);
            let ma = self.place(k, &a.sides[i].midpoint);
            let mb = self.place(k + 1, &b.sides[j].midpoint);
            worst = worst.max(dist(&ma, &mb));
            let na = a.corners.len();
            let nb = b.corners.len();
            let ends_a = [a.corners[i], a.corners[(i + 1) % na]];
            let ends_b = [b.corners[j], b.corners[(j + 1) % nb]];
            if let (Some(a0), Some(a1), Some(b0), Some(b1)) =
                (ends_a[0], ends_a[1], ends_b[0], ends_b[1])
            {
                let pa = [self.place(k, &a0), self.place(k, &a1)];
                let pb = [self.place(k + 1, &b0), self.place(k + 1, &b1)];
                let direct = dist(&pa[0], &pb[1]).max(dist(&pa[1], &pb[0]));
                let flipped = dist(&pa[0], &pb[0]).max(dist(&pa[1], &pb[1]));
                worst = worst.max(direct.min(flipped));
            }
        }
        worst
    }
}

/// Develops `path`, a sequence of `(polygon, side)` crossings starting at
/// polygon `start`. Each step must leave from the polygon the previous step
/// entered.
pub fn develop<G: Gluing + ?Sized>(
    g: &G,
    start: usize,
    path: &[(usize, usize)],
) -> Result<DevelopedChain> {
    if start >= g.polygon_count() {
        return Err(Error::Combinatorial(format!("no polygon {start}")));
    }
    let mut chain = DevelopedChain::start(start);
    for &(p, side) in path {
        if p != chain.last() {
            return Err(Error::Combinatorial(format!(
                "path leaves polygon {p} but the chain is in polygon {}",
                chain.last()
            )));
        }
        chain.extend(g, side)?;
    }
    Ok(chain)
}
