use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

/// One relation symbol with its interpretation.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    pub arity: usize,
    pub tuples: BTreeSet<Vec<usize>>,
}

/// A finite relational structure with universe `0..n`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RelStructure {
    n: usize,
    relations: Vec<Relation>,
}

impl RelStructure {
    pub fn new(n: usize) -> RelStructure {
        RelStructure { n, relations: Vec::new() }
    }

    pub fn with_relations(n: usize, relations: Vec<Relation>) -> Result<RelStructure> {
        let mut s = RelStructure::new(n);
        for r in relations {
            let idx = s.declare(&r.name, r.arity);
            for t in r.tuples {
                s.insert(idx, t)?;
            }
        }
        Ok(s)
    }

    /// The symmetric edge relation `E` of a graph.
    pub fn from_graph(g: &Graph) -> RelStructure {
        let mut s = RelStructure::new(g.n());
        let e = s.declare("E", 2);
        for (u, v) in g.edges() {
            s.relations[e].tuples.insert(vec![u, v]);
            s.relations[e].tuples.insert(vec![v, u]);
        }
        s
    }

    /// Declares a relation symbol (idempotent) and returns its index.
    pub fn declare(&mut self, name: &str, arity: usize) -> usize {
        if let Some(i) = self.relations.iter().position(|r| r.name == name) {
            return i;
        }
        self.relations.push(Relation { name: name.to_string(), arity, tuples: BTreeSet::new() });
        self.relations.len() - 1
    }

    pub fn insert(&mut self, rel: usize, tuple: Vec<usize>) -> Result<()> {
        let r = &mut self.relations[rel];
        if tuple.len() != r.arity || tuple.iter().any(|&a| a >= self.n) {
            return Err(Error::BadTuple { name: r.name.clone(), arity: r.arity, tuple });
        }
        r.tuples.insert(tuple);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name == name)
    }

    pub fn holds(&self, rel: usize, tuple: &[usize]) -> bool {
        self.relations[rel].tuples.contains(tuple)
    }

    /// Same signature (names and arities, in order).
    pub fn same_signature(&self, other: &RelStructure) -> bool {
        self.relations.len() == other.relations.len()
            && self.relations.iter().zip(&other.relations).all(|(a, b)| a.name == b.name && a.arity == b.arity)
    }

    /// Gaifman graph: `a ≠ b` adjacent iff they co-occur in some tuple.
    pub fn gaifman(&self) -> Result<Graph> {
        let mut edges = Vec::new();
        for r in &self.relations {
            for t in &r.tuples {
                for (i, &a) in t.iter().enumerate() {
                    for &b in &t[i + 1..] {
                        if a != b {
                            edges.push((a, b));
                        }
                    }
                }
            }
        }
        Graph::from_edges(self.n, &edges)
    }

    /// Adds the identity relation `I` (the extended signature used in iso mode).
    pub fn with_identity(&self) -> RelStructure {
        let mut s = self.clone();
        let i = s.declare("I", 2);
        for a in 0..self.n {
            s.relations[i].tuples.insert(vec![a, a]);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaifman_examples() {
        let mut s = RelStructure::new(3);
        let r = s.declare("R", 2);
        s.insert(r, vec![0, 1]).unwrap();
        assert_eq!(s.gaifman().unwrap().edges(), vec![(0, 1)]);

        let mut t = RelStructure::new(3);
        let r = t.declare("T", 3);
        t.insert(r, vec![0, 1, 2]).unwrap();
        assert_eq!(t.gaifman().unwrap().edge_count(), 3);

        assert_eq!(RelStructure::new(4).gaifman().unwrap().edge_count(), 0);
        assert!(t.insert(r, vec![0, 1]).is_err());
        assert!(t.insert(r, vec![0, 1, 3]).is_err());
    }

    #[test]
    fn gaifman_of_graph_is_graph() {
        let g = Graph::cycle(5);
        assert_eq!(RelStructure::from_graph(&g).gaifman().unwrap(), g);
    }
}
