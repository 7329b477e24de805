//! Node searching with an invisible fugitive and cops-and-robber with a visible robber and a
//! round budget, both with `k1` reusable and `k2` non-reusable pursuers.

mod cr;
mod ns;

pub use cr::{cr_decomposition, solve_cr, CrMove, CrSolution, CrStrategy};
pub use ns::{ns_decomposition, pathwidth, simulate_ns, solve_ns, solve_ns_direct, NsSolution, NsStrategy};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bit, members, Graph, Pebble, VSet};

/// Pebble-to-vertex placement.
pub type Placement = BTreeMap<Pebble, usize>;

pub(crate) fn image(p: &Placement) -> VSet {
    p.values().fold(0, |a, &v| a | bit(v))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Outcome {
    /// Searchers or cops have a winning strategy.
    PursuersWin,
    /// Fugitive or robber escapes.
    EvaderWins,
    /// The search budget ran out first.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Strategy {
    Ns(NsStrategy),
    Cr(CrStrategy),
}

/// Vertices reachable from `region` in `g` avoiding `blocked`.
pub(crate) fn closure(g: &Graph, region: VSet, blocked: VSet) -> VSet {
    let allowed = g.vertices() & !blocked;
    let mut out = 0;
    for v in members(region & allowed) {
        if out & bit(v) == 0 {
            out |= g.component_of(v, allowed);
        }
    }
    out
}

/// Neighbourhood of a vertex set, excluding the set.
pub(crate) fn boundary(g: &Graph, set: VSet) -> VSet {
    members(set).fold(0, |a, v| a | g.neighbors(v)) & !set
}

/// True iff no play consistent with `s` ever lets the evader region grow when a pursuer lifts.
pub fn is_monotone(s: &Strategy, g: &Graph) -> Result<bool> {
    match s {
        Strategy::Ns(ns) => Ok(simulate_ns(ns, g)?.monotone),
        Strategy::Cr(cr) => {
            for (i, m) in cr.moves.iter().enumerate() {
                cr::check_move(cr, m, g).map_err(|e| Error::invalid(format!("move {i}: {e}")))?;
                let lifted = m.placement.get(&m.pebble).copied();
                if let Some(u) = lifted {
                    let after = closure(g, m.robber, image(&m.placement) & !bit(u));
                    if after & !m.robber != 0 {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
    }
}

/// Graph classes decided through the games.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum GameClass {
    /// Path decompositions of width `(k1, k2)`.
    Path { k1: usize, k2: usize },
    /// Disjoint unions of graphs in `Path`.
    UnionPath { k1: usize, k2: usize },
    /// Tree decompositions of width `(k1, k2)` and depth `q`.
    Tree { k1: usize, k2: usize, q: usize },
}

pub fn membership(g: &Graph, class: GameClass) -> Result<bool> {
    Ok(match class {
        GameClass::Path { k1, k2 } => solve_ns(g, k1, k2)?.outcome == Outcome::PursuersWin,
        GameClass::UnionPath { k1, k2 } => {
            for comp in g.components() {
                let (sub, _) = g.induced(comp);
                if solve_ns(&sub, k1, k2)?.outcome != Outcome::PursuersWin {
                    return Ok(false);
                }
            }
            true
        }
        GameClass::Tree { k1, k2, q } => solve_cr(g, k1, k2, q)?.outcome == Outcome::PursuersWin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_examples() {
        let c4 = Graph::cycle(4);
        assert!(membership(&c4, GameClass::Path { k1: 3, k2: 0 }).unwrap());
        assert!(!membership(&c4, GameClass::Path { k1: 2, k2: 0 }).unwrap());
        let two_c4 = c4.disjoint_union(&c4);
        assert!(!membership(&two_c4, GameClass::Path { k1: 2, k2: 1 }).unwrap());
        assert!(membership(&two_c4, GameClass::UnionPath { k1: 2, k2: 1 }).unwrap());
        assert!(membership(&Graph::empty(1), GameClass::Tree { k1: 1, k2: 0, q: 1 }).unwrap());
    }
}
