use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{bit, members, Alphabet, Graph, Pebble, VSet};
use crate::error::{Error, Result};

/// Serialized form of a [`LabeledGraph`].
#[derive(Serialize, Deserialize)]
struct LabeledForm {
    #[serde(flatten)]
    graph: Graph,
    /// Defaults to the smallest alphabet holding every label.
    #[serde(default)]
    alphabet: Option<Alphabet>,
    #[serde(default)]
    labels: BTreeMap<Pebble, usize>,
}

impl From<LabeledGraph> for LabeledForm {
    fn from(g: LabeledGraph) -> Self {
        let labels = g.labels().collect();
        LabeledForm { graph: g.graph, alphabet: Some(g.alphabet), labels }
    }
}

impl TryFrom<LabeledForm> for LabeledGraph {
    type Error = Error;

    fn try_from(f: LabeledForm) -> Result<LabeledGraph> {
        let labels: Vec<(Pebble, usize)> = f.labels.into_iter().collect();
        let alphabet = f.alphabet.unwrap_or_else(|| Alphabet::covering(labels.iter().map(|&(p, _)| p)));
        LabeledGraph::with_labels(f.graph, alphabet, &labels)
    }
}

/// A graph with a partial map from pebbles to vertices. `None` plays the role of ⊥.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(into = "LabeledForm", try_from = "LabeledForm")]
pub struct LabeledGraph {
    graph: Graph,
    alphabet: Alphabet,
    labels: Vec<Option<usize>>,
}

impl LabeledGraph {
    pub fn unlabeled(graph: Graph, alphabet: Alphabet) -> LabeledGraph {
        let labels = vec![None; alphabet.size()];
        LabeledGraph { graph, alphabet, labels }
    }

    /// The empty graph, the unit of [`LabeledGraph::product`].
    pub fn empty(alphabet: Alphabet) -> LabeledGraph {
        LabeledGraph::unlabeled(Graph::empty(0), alphabet)
    }

    pub fn with_labels(graph: Graph, alphabet: Alphabet, labels: &[(Pebble, usize)]) -> Result<LabeledGraph> {
        let mut g = LabeledGraph::unlabeled(graph, alphabet);
        for &(p, v) in labels {
            g = g.relabel(p, Some(v))?;
        }
        Ok(g)
    }

    /// Every vertex labeled by the pebbles given for it; `vertex_labels[v]` lists the pebbles on `v`.
    pub fn fully_labeled(graph: Graph, alphabet: Alphabet, vertex_labels: &[Vec<Pebble>]) -> Result<LabeledGraph> {
        let mut pairs = Vec::new();
        for (v, ps) in vertex_labels.iter().enumerate() {
            pairs.extend(ps.iter().map(|&p| (p, v)));
        }
        LabeledGraph::with_labels(graph, alphabet, &pairs)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn label(&self, p: Pebble) -> Option<usize> {
        self.alphabet.slot(p).and_then(|s| self.labels[s])
    }

    /// Assigned labels in alphabet order.
    pub fn labels(&self) -> impl Iterator<Item = (Pebble, usize)> + '_ {
        self.labels.iter().enumerate().filter_map(move |(s, v)| v.map(|v| (self.alphabet.pebble(s), v)))
    }

    /// The label set `L_G`.
    pub fn label_set(&self) -> Vec<Pebble> {
        self.labels().map(|(p, _)| p).collect()
    }

    /// Image of the labeling.
    pub fn labeled_vertices(&self) -> VSet {
        self.labels().fold(0, |acc, (_, v)| acc | bit(v))
    }

    pub fn pebbles_on(&self, v: usize) -> Vec<Pebble> {
        self.labels().filter(|&(_, u)| u == v).map(|(p, _)| p).collect()
    }

    pub fn is_fully_labeled(&self) -> bool {
        self.labeled_vertices() == self.graph.vertices()
    }

    pub fn is_unlabeled(&self) -> bool {
        self.labels.iter().all(Option::is_none)
    }

    /// `G[z → v]`; `v = None` deletes the label.
    pub fn relabel(&self, z: Pebble, v: Option<usize>) -> Result<LabeledGraph> {
        let slot = self.alphabet.slot(z).ok_or_else(|| Error::UnknownPebble(z.to_string()))?;
        if let Some(v) = v {
            if v >= self.n() {
                return Err(Error::VertexOutOfRange { vertex: v, n: self.n() });
            }
        }
        let mut g = self.clone();
        g.labels[slot] = v;
        Ok(g)
    }

    /// `G[z̄ → v̄]`, applied left to right.
    pub fn relabel_seq(&self, moves: &[(Pebble, Option<usize>)]) -> Result<LabeledGraph> {
        moves.iter().try_fold(self.clone(), |g, &(z, v)| g.relabel(z, v))
    }

    pub fn unlabel(&self) -> LabeledGraph {
        LabeledGraph::unlabeled(self.graph.clone(), self.alphabet)
    }

    /// Same graph and labels over a larger alphabet.
    pub fn widen(&self, alphabet: Alphabet) -> LabeledGraph {
        let alphabet = self.alphabet.join(alphabet);
        let mut g = LabeledGraph::unlabeled(self.graph.clone(), alphabet);
        for (p, v) in self.labels() {
            g.labels[alphabet.slot(p).expect("joined alphabet")] = Some(v);
        }
        g
    }

    /// Vertex colours encoding the pebble set on each vertex, for labeled isomorphism tests.
    pub fn label_colors(&self) -> Vec<u64> {
        let mut c = vec![0u64; self.n()];
        for (s, v) in self.labels.iter().enumerate() {
            if let Some(v) = v {
                c[*v] |= 1 << s;
            }
        }
        c
    }

    /// Disjoint union followed by identification of equally labeled vertices. Edges whose ends
    /// get identified are dropped, so callers needing hom multiplicativity must avoid them.
    pub fn product(&self, other: &LabeledGraph) -> LabeledGraph {
        self.product_with_maps(other).0
    }

    /// Product together with the vertex maps of both factors into it.
    pub fn product_with_maps(&self, other: &LabeledGraph) -> (LabeledGraph, Vec<usize>, Vec<usize>) {
        let alphabet = self.alphabet.join(other.alphabet);
        let a = self.widen(alphabet);
        let b = other.widen(alphabet);
        let n1 = a.n();
        let total = n1 + b.n();
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for p in alphabet.pebbles() {
            if let (Some(u), Some(v)) = (a.label(p), b.label(p)) {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, n1 + v));
                if ru != rv {
                    parent[ru.max(rv)] = ru.min(rv);
                }
            }
        }
        let mut class_of = vec![usize::MAX; total];
        let mut root_class = vec![usize::MAX; total];
        let mut m = 0;
        for x in 0..total {
            let r = find(&mut parent, x);
            if root_class[r] == usize::MAX {
                root_class[r] = m;
                m += 1;
            }
            class_of[x] = root_class[r];
        }
        let union = a.graph.disjoint_union(&b.graph);
        let graph = union.quotient(&class_of, m);
        let mut out = LabeledGraph::unlabeled(graph, alphabet);
        for p in alphabet.pebbles() {
            let v = a.label(p).map(|u| class_of[u]).or_else(|| b.label(p).map(|u| class_of[n1 + u]));
            out.labels[alphabet.slot(p).expect("own alphabet")] = v;
        }
        let right = class_of.split_off(n1);
        (out, class_of, right)
    }

    /// `F^0`: the fully labeled edgeless graph on the image of the labeling.
    pub fn label_skeleton(&self) -> LabeledGraph {
        let image: Vec<usize> = members(self.labeled_vertices()).collect();
        let mut out = LabeledGraph::unlabeled(Graph::empty(image.len()), self.alphabet);
        for (s, v) in self.labels.iter().enumerate() {
            if let Some(v) = v {
                out.labels[s] = Some(image.iter().position(|u| u == v).expect("in image"));
            }
        }
        out
    }

    /// `F^j` as a `j`-fold product; `j = 0` gives [`LabeledGraph::label_skeleton`].
    pub fn power(&self, j: usize) -> LabeledGraph {
        let mut acc = self.label_skeleton();
        for _ in 0..j {
            acc = acc.product(self);
        }
        acc
    }

    /// Induced labeled subgraph on `keep`; labels pointing outside become ⊥.
    pub fn induced(&self, keep: VSet) -> LabeledGraph {
        let (g, old) = self.graph.induced(keep);
        let mut out = LabeledGraph::unlabeled(g, self.alphabet);
        for (s, v) in self.labels.iter().enumerate() {
            out.labels[s] = v.and_then(|v| old.iter().position(|&u| u == v));
        }
        out
    }
}
