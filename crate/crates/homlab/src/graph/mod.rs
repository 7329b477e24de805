//! Finite simple graphs on dense vertex sets, labeled graphs over a pebble
//! alphabet, relational structures and the elementary operations on them.

mod formats;
mod iso;
mod labeled;
mod minor;
mod pebble;
mod structure;

pub use formats::{from_graph6, to_dot, to_graph6};
pub use iso::{are_isomorphic, find_colored_isomorphism, find_isomorphism, invariant_key, labeled_isomorphic};
pub use labeled::LabeledGraph;
pub use minor::{minor_step, MinorOp};
pub use pebble::{Alphabet, Pebble};
pub use structure::{RelStructure, Relation};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Serialized form of a [`Graph`].
#[derive(Serialize, Deserialize)]
struct EdgeList {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl From<Graph> for EdgeList {
    fn from(g: Graph) -> Self {
        EdgeList { n: g.n(), edges: g.edges() }
    }
}

impl TryFrom<EdgeList> for Graph {
    type Error = Error;

    fn try_from(e: EdgeList) -> Result<Graph> {
        Graph::from_edges(e.n, &e.edges)
    }
}

/// Vertex subset of a graph with at most 64 vertices.
pub type VSet = u64;

pub const MAX_VERTICES: usize = 64;

/// Iterates the members of a vertex set in increasing order.
pub fn members(mut s: VSet) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if s == 0 {
            None
        } else {
            let v = s.trailing_zeros() as usize;
            s &= s - 1;
            Some(v)
        }
    })
}

pub fn full_set(n: usize) -> VSet {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn set_of(vs: impl IntoIterator<Item = usize>) -> VSet {
    vs.into_iter().fold(0, |acc, v| acc | (1u64 << v))
}

#[inline]
pub fn bit(v: usize) -> VSet {
    1u64 << v
}

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(into = "EdgeList", try_from = "EdgeList")]
pub struct Graph {
    n: usize,
    adj: Vec<VSet>,
}

impl Graph {
    pub fn empty(n: usize) -> Graph {
        assert!(n <= MAX_VERTICES, "graph on {n} vertices exceeds {MAX_VERTICES}");
        Graph { n, adj: vec![0; n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        if n > MAX_VERTICES {
            return Err(Error::TooLarge { n, max: MAX_VERTICES });
        }
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn path(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        for v in 1..n {
            g.add_edge(v - 1, v);
        }
        g
    }

    pub fn cycle(n: usize) -> Graph {
        let mut g = Graph::path(n);
        if n >= 3 {
            g.add_edge(n - 1, 0);
        }
        g
    }

    pub(crate) fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adj[u] |= bit(v);
            self.adj[v] |= bit(u);
        }
    }

    pub(crate) fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u] &= !bit(v);
        self.adj[v] &= !bit(u);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> VSet {
        full_set(self.n)
    }

    pub fn neighbors(&self, v: usize) -> VSet {
        self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u] & bit(v) != 0
    }

    /// Edges as sorted pairs `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in members(self.adj[u] & !full_set(u + 1)) {
                out.push((u, v));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = (0..self.n).map(|v| self.degree(v)).collect();
        d.sort_unstable();
        d
    }

    /// Vertices reachable from `v` inside `allowed` (empty if `v` is not allowed).
    pub fn component_of(&self, v: usize, allowed: VSet) -> VSet {
        if allowed & bit(v) == 0 {
            return 0;
        }
        let mut comp = bit(v);
        let mut frontier = comp;
        while frontier != 0 {
            let mut next = 0;
            for u in members(frontier) {
                next |= self.adj[u];
            }
            next &= allowed & !comp;
            comp |= next;
            frontier = next;
        }
        comp
    }

    /// Connected components of the subgraph induced by `allowed`, ordered by least vertex.
    pub fn components_within(&self, allowed: VSet) -> Vec<VSet> {
        let mut rest = allowed & self.vertices();
        let mut out = Vec::new();
        while rest != 0 {
            let c = self.component_of(rest.trailing_zeros() as usize, rest);
            out.push(c);
            rest &= !c;
        }
        out
    }

    pub fn components(&self) -> Vec<VSet> {
        self.components_within(self.vertices())
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Subgraph induced by `keep`, renumbered in increasing order; also returns new→old.
    pub fn induced(&self, keep: VSet) -> (Graph, Vec<usize>) {
        let old: Vec<usize> = members(keep & self.vertices()).collect();
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in old.iter().enumerate() {
            pos[v] = i;
        }
        let mut g = Graph::empty(old.len());
        for (i, &v) in old.iter().enumerate() {
            for u in members(self.adj[v] & keep) {
                g.adj[i] |= bit(pos[u]);
            }
        }
        (g, old)
    }

    /// Same vertex set, only edges with both ends in `keep`.
    pub fn restrict_edges(&self, keep: VSet) -> Graph {
        let mut g = self.clone();
        for v in 0..self.n {
            g.adj[v] = if keep & bit(v) != 0 { self.adj[v] & keep } else { 0 };
        }
        g
    }

    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let mut g = Graph::empty(self.n + other.n);
        for v in 0..self.n {
            g.adj[v] = self.adj[v];
        }
        for v in 0..other.n {
            g.adj[self.n + v] = other.adj[v] << self.n;
        }
        g
    }

    /// Image under a vertex map into `0..m`; edges collapsing to a point are dropped.
    pub fn quotient(&self, class_of: &[usize], m: usize) -> Graph {
        let mut g = Graph::empty(m);
        for (u, v) in self.edges() {
            g.add_edge(class_of[u], class_of[v]);
        }
        g
    }

    pub fn permuted(&self, perm: &[usize]) -> Graph {
        let mut g = Graph::empty(self.n);
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        g
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for v in 0..self.n {
            g.adj[v] = self.vertices() & !self.adj[v] & !bit(v);
        }
        g
    }
}
