use serde::{Deserialize, Serialize};

use super::{bit, full_set, Graph};
use crate::error::{Error, Result};

/// One elementary minor operation.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum MinorOp {
    DeleteVertex(usize),
    DeleteEdge(usize, usize),
    /// Merges the second endpoint into the first.
    ContractEdge(usize, usize),
}

pub fn minor_step(g: &Graph, op: MinorOp) -> Result<Graph> {
    match op {
        MinorOp::DeleteVertex(v) => {
            if v >= g.n() {
                return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
            }
            Ok(g.induced(full_set(g.n()) & !bit(v)).0)
        }
        MinorOp::DeleteEdge(u, v) => {
            if !g.has_edge(u, v) {
                return Err(Error::MissingEdge(u, v));
            }
            let mut h = g.clone();
            h.remove_edge(u, v);
            Ok(h)
        }
        MinorOp::ContractEdge(u, v) => {
            if !g.has_edge(u, v) {
                return Err(Error::MissingEdge(u, v));
            }
            let mut h = g.clone();
            for w in super::members(g.neighbors(v)) {
                h.add_edge(u, w);
            }
            Ok(h.induced(full_set(g.n()) & !bit(v)).0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::are_isomorphic;

    #[test]
    fn standard_minors() {
        let k2 = minor_step(&Graph::complete(3), MinorOp::ContractEdge(0, 1)).unwrap();
        assert!(are_isomorphic(&k2, &Graph::complete(2)).is_some());
        let p3 = minor_step(&Graph::cycle(4), MinorOp::DeleteVertex(2)).unwrap();
        assert!(are_isomorphic(&p3, &Graph::path(3)).is_some());
        let c3 = minor_step(&Graph::cycle(4), MinorOp::ContractEdge(1, 2)).unwrap();
        assert!(are_isomorphic(&c3, &Graph::cycle(3)).is_some());
        let p4 = minor_step(&Graph::cycle(4), MinorOp::DeleteEdge(3, 0)).unwrap();
        assert!(are_isomorphic(&p4, &Graph::path(4)).is_some());
        assert!(minor_step(&Graph::path(3), MinorOp::DeleteEdge(0, 2)).is_err());
        assert!(minor_step(&Graph::path(3), MinorOp::DeleteVertex(3)).is_err());
    }
}
