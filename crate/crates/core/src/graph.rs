//! Simple undirected graphs, greedy colorings and a small exact solver.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Undirected simple graph on vertices `0..n` with sorted adjacency lists.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list; loops and duplicates are dropped.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g.finish();
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g.finish();
        g
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges)
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, &edges)
    }

    /// Appends an edge without restoring sortedness; call [`Graph::finish`]
    /// after a batch of insertions.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u == v {
            return;
        }
        self.adj[u].push(v);
        self.adj[v].push(u);
    }

    /// Sorts and deduplicates the adjacency lists.
    pub fn finish(&mut self) {
        for list in &mut self.adj {
            list.sort_unstable();
            list.dedup();
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Subgraph induced by `vertices`, relabeled in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut index = std::collections::HashMap::new();
        for (i, &v) in vertices.iter().enumerate() {
            index.insert(v, i);
        }
        let mut g = Graph::new(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            for w in &self.adj[v] {
                if let Some(&j) = index.get(w) {
                    if i < j {
                        g.add_edge(i, j);
                    }
                }
            }
        }
        g.finish();
        g
    }
}

/// A color index per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub colors: Vec<usize>,
    pub count: usize,
}

impl Coloring {
    pub fn new(colors: Vec<usize>) -> Self {
        let count = colors.iter().map(|&c| c + 1).max().unwrap_or(0);
        Coloring { colors, count }
    }

    /// Edges whose endpoints share a color.
    pub fn conflicts(&self, g: &Graph) -> Vec<(usize, usize)> {
        g.edges()
            .filter(|&(u, v)| self.colors[u] == self.colors[v])
            .collect()
    }

    pub fn is_proper(&self, g: &Graph) -> bool {
        self.colors.len() == g.vertex_count() && self.conflicts(g).is_empty()
    }
}

/// Vertex ordering used by [`greedy_color`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering {
    Natural,
    LargestFirst,
    Dsatur,
}

impl std::str::FromStr for Ordering {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" => Ok(Ordering::Natural),
            "largest-first" => Ok(Ordering::LargestFirst),
            "dsatur" => Ok(Ordering::Dsatur),
            _ => Err(Error::InvalidInput(format!("unknown ordering {s:?}"))),
        }
    }
}

fn smallest_free(g: &Graph, colors: &[usize], v: usize, scratch: &mut Vec<bool>) -> usize {
    scratch.clear();
    scratch.resize(g.degree(v) + 1, false);
    for &w in g.neighbors(v) {
        let c = colors[w];
        if c < scratch.len() {
            scratch[c] = true;
        }
    }
    scratch.iter().position(|&used| !used).unwrap()
}

/// First-fit coloring; never uses more than `max_degree + 1` colors.
pub fn greedy_color(g: &Graph, order: Ordering) -> Coloring {
    let n = g.vertex_count();
    const NONE: usize = usize::MAX;
    let mut colors = vec![NONE; n];
    let mut scratch = Vec::new();
    match order {
        Ordering::Natural | Ordering::LargestFirst => {
            let mut seq: Vec<usize> = (0..n).collect();
            if order == Ordering::LargestFirst {
                seq.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
            }
            for v in seq {
                colors[v] = smallest_free(g, &colors, v, &mut scratch);
            }
        }
        Ordering::Dsatur => {
            // Saturation sets as sorted color lists; uncolored vertices keyed
            // by (saturation, degree, lowest index first).
            use std::cmp::Reverse;
            use std::collections::BTreeSet;
            let mut seen: Vec<Vec<usize>> = vec![Vec::new(); n];
            let key = |v: usize, sat: usize| (sat, g.degree(v), Reverse(v));
            let mut queue: BTreeSet<_> = (0..n).map(|v| key(v, 0)).collect();
            while let Some((_, _, Reverse(v))) = queue.pop_last() {
                let c = smallest_free(g, &colors, v, &mut scratch);
                colors[v] = c;
                for &w in g.neighbors(v) {
                    if colors[w] != NONE {
                        continue;
                    }
                    if let Err(pos) = seen[w].binary_search(&c) {
                        queue.remove(&key(w, seen[w].len()));
                        seen[w].insert(pos, c);
                        queue.insert(key(w, seen[w].len()));
                    }
                }
            }
        }
    }
    Coloring::new(colors)
}

/// Default vertex limit of [`exact_chromatic`].
pub const EXACT_LIMIT: usize = 40;

/// Exact chromatic number by branch and bound (DSATUR branching with a
/// greedy clique as lower bound).
pub fn exact_chromatic(g: &Graph, limit: usize) -> Result<usize> {
    let n = g.vertex_count();
    if n > limit {
        return Err(Error::SizeExceeded { vertices: n, limit });
    }
    if n == 0 {
        return Ok(0);
    }
    let lower = greedy_clique(g).len();
    let mut best = greedy_color(g, Ordering::Dsatur).count;
    if best == lower {
        return Ok(best);
    }
    let mut colors = vec![usize::MAX; n];
    branch(g, &mut colors, 0, 0, lower, &mut best);
    Ok(best)
}

fn branch(
    g: &Graph,
    colors: &mut [usize],
    placed: usize,
    used: usize,
    lower: usize,
    best: &mut usize,
) {
    let n = g.vertex_count();
    if used >= *best || *best == lower {
        return;
    }
    if placed == n {
        *best = used;
        return;
    }
    // Most saturated uncolored vertex.
    let mut pick = usize::MAX;
    let mut key = (0usize, 0usize);
    for v in 0..n {
        if colors[v] != usize::MAX {
            continue;
        }
        let mut mask = 0u64;
        for &w in g.neighbors(v) {
            if colors[w] != usize::MAX {
                mask |= 1 << colors[w];
            }
        }
        let k = (mask.count_ones() as usize, g.degree(v));
        if pick == usize::MAX || k > key {
            pick = v;
            key = k;
        }
    }
    let v = pick;
    let mut mask = 0u64;
    for &w in g.neighbors(v) {
        if colors[w] != usize::MAX {
            mask |= 1 << colors[w];
        }
    }
    for c in 0..=used.min(*best - 1) {
        if c < 64 && mask & (1 << c) != 0 {
            continue;
        }
        let next_used = used.max(c + 1);
        if next_used >= *best {
            continue;
        }
        colors[v] = c;
        branch(g, colors, placed + 1, next_used, lower, best);
        colors[v] = usize::MAX;
    }
}

/// A maximal clique grown greedily from each vertex; returns the largest.
pub fn greedy_clique(g: &Graph) -> Vec<usize> {
    let mut best = Vec::new();
    for start in 0..g.vertex_count() {
        let mut clique = vec![start];
        let mut cand: Vec<usize> = g.neighbors(start).to_vec();
        cand.sort_by_key(|&v| std::cmp::Reverse(g.degree(v)));
        for v in cand {
            if clique.iter().all(|&u| g.has_edge(u, v)) {
                clique.push(v);
            }
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best
}

/// Chromatic number by trying every assignment; only for tiny graphs.
pub fn brute_force_chromatic(g: &Graph) -> usize {
    let n = g.vertex_count();
    if n == 0 {
        return 0;
    }
    let edges: Vec<_> = g.edges().collect();
    for k in 1..=n {
        let mut colors = vec![0usize; n];
        loop {
            if edges.iter().all(|&(u, v)| colors[u] != colors[v]) {
                return k;
            }
            let mut i = 0;
            while i < n {
                colors[i] += 1;
                if colors[i] < k {
                    break;
                }
                colors[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    n
}
