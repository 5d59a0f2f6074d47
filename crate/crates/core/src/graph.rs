//! Labeled simple graphs with bit-packed adjacency rows, and the combinatorial
//! derivations built on them: complement, second power, distances,
//! eccentricities, distance-two pairs and the far set.

use std::fmt;

use thiserror::Error;

/// Largest vertex count accepted by the dense representation.
pub const MAX_ORDER: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph order must be at least 1")]
    EmptyOrder,
    #[error("graph order {0} exceeds the supported maximum of {MAX_ORDER}")]
    OrderTooLarge(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("endpoint {vertex} out of range for a graph of order {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
}

/// A simple undirected graph on the vertices `0..n`.
///
/// Row `r` is a bitset of the neighbors of `r`; rows are `words` 64-bit
/// words wide and stored back to back.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// Unordered vertex pairs `(r, s)` with `r < s`, in lexicographic order.
pub fn vertex_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |r| (r + 1..n).map(move |s| (r, s)))
}

impl Graph {
    /// The graph on `n` vertices without edges.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyOrder);
        }
        if n > MAX_ORDER {
            return Err(GraphError::OrderTooLarge(n));
        }
        let words = words_for(n);
        Ok(Self {
            n,
            words,
            bits: vec![0; n * words],
        })
    }

    /// Builds a graph from an explicit edge list. Self-loops, endpoints out
    /// of range and repeated pairs are rejected.
    pub fn build(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for &(r, s) in edges {
            g.insert_edge(r, s)?;
        }
        Ok(g)
    }

    pub(crate) fn insert_edge(&mut self, r: usize, s: usize) -> Result<(), GraphError> {
        for v in [r, s] {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
            }
        }
        if r == s {
            return Err(GraphError::SelfLoop(r));
        }
        if self.has_edge(r, s) {
            return Err(GraphError::DuplicateEdge(r.min(s), r.max(s)));
        }
        self.set(r, s, true);
        Ok(())
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        Ok(Self::empty(n)?.complement())
    }

    pub fn path(n: usize) -> Result<Self, GraphError> {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::build(n, &edges)
    }

    /// The cycle `0-1-...-(n-1)-0`. For `n < 3` this is the path.
    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        if n >= 3 {
            edges.push((n - 1, 0));
        }
        Self::build(n, &edges)
    }

    /// The star with center 0 and `n - 1` leaves.
    pub fn star(n: usize) -> Result<Self, GraphError> {
        let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
        Self::build(n, &edges)
    }

    /// Disjoint union, with the vertices of `other` shifted past those of `self`.
    pub fn disjoint_union(&self, other: &Graph) -> Result<Self, GraphError> {
        let mut g = Self::empty(self.n + other.n)?;
        for (r, s) in self.edges() {
            g.set(r, s, true);
        }
        for (r, s) in other.edges() {
            g.set(r + self.n, s + self.n, true);
        }
        Ok(g)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words..(r + 1) * self.words]
    }

    #[inline]
    fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.bits[r * self.words..(r + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, r: usize, s: usize) -> bool {
        (self.bits[r * self.words + s / 64] >> (s % 64)) & 1 == 1
    }

    fn set(&mut self, r: usize, s: usize, on: bool) {
        for (a, b) in [(r, s), (s, r)] {
            let w = &mut self.bits[a * self.words + b / 64];
            if on {
                *w |= 1 << (b % 64);
            } else {
                *w &= !(1 << (b % 64));
            }
        }
    }

    /// A copy of this graph with the pair `{r, s}` toggled.
    ///
    /// Panics if `r == s` or either vertex is out of range.
    pub fn flipped(&self, r: usize, s: usize) -> Graph {
        assert!(r != s && r < self.n && s < self.n, "invalid pair {{{r}, {s}}}");
        let mut g = self.clone();
        g.set(r, s, !self.has_edge(r, s));
        g
    }

    #[inline]
    pub fn degree(&self, r: usize) -> usize {
        self.row(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|r| self.degree(r)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.degrees().iter().sum::<usize>() / 2
    }

    /// Neighbors of `r` in increasing order.
    pub fn neighbors(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        bit_indices(self.row(r))
    }

    /// Edges `(r, s)` with `r < s`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |r| self.neighbors(r).filter(move |&s| s > r).map(move |s| (r, s)))
    }

    /// Number of common neighbors of `r` and `s`.
    pub fn common_neighbors(&self, r: usize, s: usize) -> usize {
        self.row(r)
            .iter()
            .zip(self.row(s))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn full_mask(&self, w: usize) -> u64 {
        let lo = w * 64;
        let len = (self.n - lo).min(64);
        if len == 64 {
            u64::MAX
        } else {
            (1u64 << len) - 1
        }
    }

    /// The complement graph: `{r, s}` is an edge iff it is not one here.
    pub fn complement(&self) -> Graph {
        let mut g = self.clone();
        for r in 0..self.n {
            for w in 0..self.words {
                let mask = self.full_mask(w);
                g.bits[r * self.words + w] = !self.bits[r * self.words + w] & mask;
            }
            g.bits[r * self.words + r / 64] &= !(1 << (r % 64));
        }
        g
    }

    /// The second power: `{r, s}` is an edge iff `r` and `s` are at distance
    /// one or two.
    pub fn square(&self) -> Graph {
        let mut g = self.clone();
        for r in 0..self.n {
            let mut acc = self.row(r).to_vec();
            for s in self.neighbors(r) {
                for (a, b) in acc.iter_mut().zip(self.row(s)) {
                    *a |= b;
                }
            }
            acc[r / 64] &= !(1 << (r % 64));
            g.row_mut(r).copy_from_slice(&acc);
        }
        g
    }

    /// Breadth-first distances from every vertex.
    pub fn distances(&self) -> DistanceMatrix {
        let n = self.n;
        let mut entries = vec![Distance::Unreachable; n * n];
        let mut visited = vec![0u64; self.words];
        let mut frontier = vec![0u64; self.words];
        let mut next = vec![0u64; self.words];
        for src in 0..n {
            visited.iter_mut().for_each(|w| *w = 0);
            frontier.iter_mut().for_each(|w| *w = 0);
            visited[src / 64] |= 1 << (src % 64);
            frontier[src / 64] |= 1 << (src % 64);
            let mut depth = 0u32;
            loop {
                for v in bit_indices(&frontier) {
                    entries[src * n + v] = Distance::Finite(depth);
                }
                next.iter_mut().for_each(|w| *w = 0);
                for v in bit_indices(&frontier) {
                    for (a, b) in next.iter_mut().zip(self.row(v)) {
                        *a |= b;
                    }
                }
                let mut any = false;
                for (a, seen) in next.iter_mut().zip(visited.iter_mut()) {
                    *a &= !*seen;
                    *seen |= *a;
                    any |= *a != 0;
                }
                if !any {
                    break;
                }
                std::mem::swap(&mut frontier, &mut next);
                depth += 1;
            }
        }
        DistanceMatrix { n, entries }
    }

    /// Unordered pairs at distance exactly two, lexicographically ordered.
    pub fn distance_two_pairs(&self) -> Vec<(usize, usize)> {
        let sq = self.square();
        sq.edges().filter(|&(r, s)| !self.has_edge(r, s)).collect()
    }

    pub fn eccentricities(&self) -> Vec<Distance> {
        self.distances().eccentricities()
    }

    /// Vertices of eccentricity at least three, where unreachable counts as
    /// at least three.
    pub fn far_set(&self) -> Vec<usize> {
        self.eccentricities()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.at_least(3))
            .map(|(v, _)| v)
            .collect()
    }

    /// The subgraph induced by `keep`, relabeled so that `keep[t]` becomes `t`.
    pub fn induced_subgraph(&self, keep: &[usize]) -> Result<Graph, GraphError> {
        let mut g = Graph::empty(keep.len())?;
        for (a, &r) in keep.iter().enumerate() {
            if r >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: r, n: self.n });
            }
            for (b, &s) in keep.iter().enumerate().skip(a + 1) {
                if self.has_edge(r, s) {
                    g.set(a, b, true);
                }
            }
        }
        Ok(g)
    }

    /// The spanning subgraph with only the edges for which `keep` is true.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize, usize) -> bool) -> Graph {
        let mut g = Graph::empty(self.n).expect("order already validated");
        for (r, s) in self.edges() {
            if keep(r, s) {
                g.set(r, s, true);
            }
        }
        g
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// Indices of set bits, ascending.
pub(crate) fn bit_indices(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(w, &word)| {
        let mut rest = word;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + b)
            }
        })
    })
}

/// A graph distance. `Unreachable` compares greater than every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(u32),
    Unreachable,
}

impl Distance {
    pub fn finite(self) -> Option<u32> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Unreachable => None,
        }
    }

    pub fn at_least(self, d: u32) -> bool {
        self >= Distance::Finite(d)
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Unreachable => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<Distance>,
}

impl DistanceMatrix {
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, s: usize) -> Distance {
        self.entries[r * self.n + s]
    }

    pub fn eccentricities(&self) -> Vec<Distance> {
        (0..self.n)
            .map(|r| {
                (0..self.n)
                    .map(|s| self.get(r, s))
                    .max()
                    .unwrap_or(Distance::Finite(0))
            })
            .collect()
    }
}
