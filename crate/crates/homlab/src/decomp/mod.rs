//! Decompositions with exception sets, pebble forest covers and construction trees:
//! verification, conversion in both directions, and hom evaluation along construction trees.
//!
//! Widths are given in the class sense: parameters `(k1, k2)` mean that after removing at most
//! `k2` exceptions every bag has at most `k1` vertices. With `k2 > 0` the value `k1 = 0` is allowed
//! and forces all bags into the exception set.

mod construction;
mod convert;
mod cover;
mod forest;
mod nice;
mod verify;

pub use construction::{
    eval_hom_via_construction, product_with_maps, verify_construction_tree, ConstructionTree, CtNode, NodeTag,
};
pub use convert::{
    construction_to_decomposition, convert, cover_to_decomposition, decomposition_to_construction,
    decomposition_to_cover, DecompObject, ObjectKind,
};
pub use cover::{verify_forest_cover, CoverVariant, ForestCover};
pub use forest::Forest;
pub use nice::{is_nice, make_nice};
pub use verify::{decomposition_depth, verify_decomposition};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::{members, set_of, VSet, MAX_VERTICES};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum DecompKind {
    Tree,
    Path,
}

/// Exception sets: one per leaf, or (component width) one per connected component of the graph.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Exceptions {
    PerLeaf(BTreeMap<usize, VSet>),
    PerComponent(Vec<VSet>),
}

/// Serialized form of a [`RootedDecomposition`]: bags and exception sets as sorted vertex lists.
#[derive(Serialize, Deserialize)]
struct DecompositionForm {
    kind: DecompKind,
    parent: Vec<Option<usize>>,
    bags: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exceptions_per_leaf: Option<BTreeMap<usize, Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exceptions_per_component: Option<Vec<Vec<usize>>>,
}

fn to_list(s: VSet) -> Vec<usize> {
    members(s).collect()
}

fn to_set(vs: &[usize]) -> crate::Result<VSet> {
    if let Some(&v) = vs.iter().find(|&&v| v >= MAX_VERTICES) {
        return Err(crate::Error::VertexOutOfRange { vertex: v, n: MAX_VERTICES });
    }
    Ok(set_of(vs.iter().copied()))
}

impl From<RootedDecomposition> for DecompositionForm {
    fn from(d: RootedDecomposition) -> Self {
        let (per_leaf, per_component) = match &d.exceptions {
            Exceptions::PerLeaf(m) => (Some(m.iter().map(|(&l, &s)| (l, to_list(s))).collect()), None),
            Exceptions::PerComponent(v) => (None, Some(v.iter().map(|&s| to_list(s)).collect())),
        };
        DecompositionForm {
            kind: d.kind,
            parent: d.parent,
            bags: d.bags.iter().map(|&b| to_list(b)).collect(),
            exceptions_per_leaf: per_leaf,
            exceptions_per_component: per_component,
        }
    }
}

impl TryFrom<DecompositionForm> for RootedDecomposition {
    type Error = crate::Error;

    fn try_from(f: DecompositionForm) -> crate::Result<RootedDecomposition> {
        let exceptions = match (f.exceptions_per_leaf, f.exceptions_per_component) {
            (Some(_), Some(_)) => return Err(crate::Error::invalid("exceptions given both per leaf and per component")),
            (_, Some(v)) => Exceptions::PerComponent(v.iter().map(|s| to_set(s)).collect::<crate::Result<_>>()?),
            (m, None) => Exceptions::PerLeaf(
                m.unwrap_or_default().into_iter().map(|(l, s)| Ok((l, to_set(&s)?))).collect::<crate::Result<_>>()?,
            ),
        };
        let bags = f.bags.iter().map(|b| to_set(b)).collect::<crate::Result<_>>()?;
        Ok(RootedDecomposition { parent: f.parent, bags, kind: f.kind, exceptions })
    }
}

/// Rooted tree or path decomposition with exception sets.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(into = "DecompositionForm", try_from = "DecompositionForm")]
pub struct RootedDecomposition {
    pub parent: Vec<Option<usize>>,
    pub bags: Vec<VSet>,
    pub kind: DecompKind,
    pub exceptions: Exceptions,
}

impl RootedDecomposition {
    pub fn forest(&self) -> crate::Result<Forest> {
        Forest::new(&self.parent)
    }

    pub fn root(&self) -> Option<usize> {
        self.parent.iter().position(Option::is_none)
    }

    /// Exception set of a leaf (empty when none is recorded).
    pub fn leaf_exceptions(&self, leaf: usize) -> VSet {
        match &self.exceptions {
            Exceptions::PerLeaf(m) => m.get(&leaf).copied().unwrap_or(0),
            Exceptions::PerComponent(v) => v.iter().fold(0, |a, s| a | s),
        }
    }

    /// Path decomposition from a bag sequence, first bag at the root.
    pub fn path(bags: Vec<VSet>, exceptions: VSet) -> RootedDecomposition {
        let m = bags.len();
        let parent = (0..m).map(|i| i.checked_sub(1)).collect();
        let mut ex = BTreeMap::new();
        if m > 0 {
            ex.insert(m - 1, exceptions);
        }
        RootedDecomposition { parent, bags, kind: DecompKind::Path, exceptions: Exceptions::PerLeaf(ex) }
    }
}

/// Outcome of a verifier: validity, the first violated condition, and the measured depth.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub ok: bool,
    pub diagnostic: Option<String>,
    pub depth: usize,
}

impl Verdict {
    pub fn pass(depth: usize) -> Verdict {
        Verdict { ok: true, diagnostic: None, depth }
    }

    pub fn fail(depth: usize, msg: impl Into<String>) -> Verdict {
        Verdict { ok: false, diagnostic: Some(msg.into()), depth }
    }
}
