use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::decomp::{DecompKind, Exceptions, RootedDecomposition};
use crate::error::{Error, Result};
use crate::graph::{are_isomorphic, bit, from_graph6, invariant_key, members, Graph};
use crate::pursuit::{ns_decomposition, solve_cr, Outcome};

/// Largest order enumerated without an explicit budget.
pub const DEFAULT_MAX_N: usize = 8;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum FamilyClass {
    /// Path decompositions of class width `(k1, k2)`.
    Path { k1: usize, k2: usize },
    /// Disjoint unions of members of `Path`.
    UnionPath { k1: usize, k2: usize },
    /// Tree decompositions of class width `(k1, k2)` and depth `q`.
    Tree { k1: usize, k2: usize, q: usize },
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FamilySpec {
    pub class: FamilyClass,
    pub max_n: usize,
    pub connected: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FamilyMember {
    pub graph: Graph,
    /// Decomposition witnessing membership; component width for `UnionPath`.
    pub certificate: Option<RootedDecomposition>,
}

/// One graph per isomorphism class with `1 ≤ n ≤ n_max` vertices, ordered by order and then by
/// generation. Graphs on `n` vertices are generated from those on `n - 1` by adding a vertex.
pub fn enumerate_graphs(n_max: usize, connected: bool) -> Result<Vec<Graph>> {
    enumerate_graphs_with_budget(n_max, connected, DEFAULT_MAX_N)
}

pub fn enumerate_graphs_with_budget(n_max: usize, connected: bool, budget: usize) -> Result<Vec<Graph>> {
    let spec = FamilySpec { class: FamilyClass::All, max_n: n_max, connected };
    Ok(enumerate_family_with_budget(spec, budget)?.into_iter().map(|m| m.graph).collect())
}

/// Members of a class, generated level by level. Every class here is closed under deleting
/// vertices, so extending the members on `n - 1` vertices reaches every member on `n`.
pub fn enumerate_family(spec: FamilySpec) -> Result<Vec<FamilyMember>> {
    enumerate_family_with_budget(spec, DEFAULT_MAX_N)
}

pub fn enumerate_family_with_budget(spec: FamilySpec, budget: usize) -> Result<Vec<FamilyMember>> {
    if spec.max_n > budget {
        return Err(Error::Budget);
    }
    let mut out = Vec::new();
    let mut level: Vec<FamilyMember> = Vec::new();
    for n in 1..=spec.max_n {
        let mut next: Vec<FamilyMember> = Vec::new();
        let mut buckets: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
        let seeds: Vec<Graph> = if n == 1 { vec![Graph::empty(0)] } else { level.iter().map(|m| m.graph.clone()).collect() };
        for base in &seeds {
            for mask in 0u64..1 << base.n() {
                let mut edges = base.edges();
                edges.extend(members(mask).map(|u| (u, base.n())));
                let g = Graph::from_edges(base.n() + 1, &edges)?;
                let key = invariant_key(&g, &[]);
                let bucket = buckets.entry(key).or_default();
                if bucket.iter().any(|&i| are_isomorphic(&next[i].graph, &g).is_some()) {
                    continue;
                }
                if let Some(certificate) = certify(&g, spec.class)? {
                    bucket.push(next.len());
                    next.push(FamilyMember { graph: g, certificate });
                }
            }
        }
        out.extend(next.iter().filter(|m| !spec.connected || m.graph.is_connected()).cloned());
        level = next;
    }
    Ok(out)
}

/// `None` for non-members; `Some(None)` for members of `All`.
fn certify(g: &Graph, class: FamilyClass) -> Result<Option<Option<RootedDecomposition>>> {
    Ok(match class {
        FamilyClass::All => Some(None),
        FamilyClass::Path { k1, k2 } => ns_decomposition(g, k1, k2)?.map(Some),
        FamilyClass::Tree { k1, k2, q } => {
            let s = solve_cr(g, k1, k2, q)?;
            (s.outcome == Outcome::PursuersWin).then_some(s.decomposition)
        }
        FamilyClass::UnionPath { k1, k2 } => component_width(g, k1, k2)?.map(Some),
    })
}

/// Concatenates per-component path decompositions into one of component width `(k1, k2)`.
fn component_width(g: &Graph, k1: usize, k2: usize) -> Result<Option<RootedDecomposition>> {
    let mut bags = Vec::new();
    let mut sets = Vec::new();
    for comp in g.components() {
        let (sub, old) = g.induced(comp);
        let Some(d) = ns_decomposition(&sub, k1, k2)? else {
            return Ok(None);
        };
        let lift = |s: u64| members(s).fold(0, |a, v| a | bit(old[v]));
        let forest = d.forest()?;
        let leaf = forest.leaves()[0];
        sets.push(lift(d.leaf_exceptions(leaf)));
        bags.extend(forest.ancestors(leaf).into_iter().rev().map(|t| lift(d.bags[t])));
    }
    if bags.is_empty() {
        bags.push(0);
    }
    let parent = (0..bags.len()).map(|i| i.checked_sub(1)).collect();
    Ok(Some(RootedDecomposition { parent, bags, kind: DecompKind::Path, exceptions: Exceptions::PerComponent(sets) }))
}

/// Reads a graph6 list, one graph per non-empty line; errors carry the line number.
pub fn read_graph6_list(text: &str) -> Result<Vec<Graph>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            from_graph6(l).map_err(|e| match e {
                Error::Parse { col, msg, .. } => Error::Parse { line: i + 1, col, msg },
                other => other,
            })
        })
        .collect()
}
