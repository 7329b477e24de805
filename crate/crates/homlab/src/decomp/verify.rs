use super::{DecompKind, Exceptions, Forest, RootedDecomposition, Verdict};
use crate::error::{Error, Result};
use crate::graph::{bit, Graph, VSet};

/// `max_v |⋃_{t ⪯ v} β(t)|`.
pub fn decomposition_depth(d: &RootedDecomposition, forest: &Forest) -> usize {
    let mut union = vec![0 as VSet; d.bags.len()];
    let mut best = 0;
    for &t in &forest.preorder {
        union[t] = d.bags[t] | forest.parent[t].map_or(0, |p| union[p]);
        best = best.max(union[t].count_ones() as usize);
    }
    best
}

/// Checks that `d` is a decomposition of `g` of class width `(k1, k2)` and, if given, depth at most `q`.
pub fn verify_decomposition(d: &RootedDecomposition, g: &Graph, k1: usize, k2: usize, q: Option<usize>) -> Result<Verdict> {
    let forest = d.forest()?;
    if d.bags.len() != d.parent.len() {
        return Err(Error::invalid("bag count differs from node count"));
    }
    if forest.roots.len() != 1 {
        return Err(Error::invalid(format!("expected exactly one root, found {}", forest.roots.len())));
    }
    let all = g.vertices();
    for (t, &b) in d.bags.iter().enumerate() {
        if b & !all != 0 {
            return Err(Error::invalid(format!("bag {t} names a vertex outside the graph")));
        }
    }
    let depth = decomposition_depth(d, &forest);
    if d.kind == DecompKind::Path && !forest.is_linear() {
        return Ok(Verdict::fail(depth, "path decomposition whose tree is not a path"));
    }
    let covered = d.bags.iter().fold(0, |a, b| a | b);
    if covered != all {
        let v = (all & !covered).trailing_zeros();
        return Ok(Verdict::fail(depth, format!("vertex {v} lies in no bag")));
    }
    for (u, v) in g.edges() {
        if !d.bags.iter().any(|b| b & bit(u) != 0 && b & bit(v) != 0) {
            return Ok(Verdict::fail(depth, format!("edge {u}-{v} lies in no bag")));
        }
    }
    for v in 0..g.n() {
        let tops = (0..d.bags.len())
            .filter(|&t| d.bags[t] & bit(v) != 0 && forest.parent[t].is_none_or(|p| d.bags[p] & bit(v) == 0))
            .count();
        if tops != 1 {
            return Ok(Verdict::fail(depth, format!("nodes containing vertex {v} are not connected")));
        }
    }
    match &d.exceptions {
        Exceptions::PerLeaf(map) => {
            for (&leaf, &s) in map {
                if leaf >= d.bags.len() || !forest.children[leaf].is_empty() {
                    return Ok(Verdict::fail(depth, format!("exception set attached to non-leaf node {leaf}")));
                }
                if s & !all != 0 {
                    return Err(Error::invalid(format!("exceptions of leaf {leaf} name a vertex outside the graph")));
                }
            }
            for leaf in forest.leaves() {
                let s = d.leaf_exceptions(leaf);
                if s.count_ones() as usize > k2 {
                    return Ok(Verdict::fail(depth, format!("leaf {leaf} has {} exceptions, allowed {k2}", s.count_ones())));
                }
                for t in forest.ancestors(leaf) {
                    let size = (d.bags[t] & !s).count_ones() as usize;
                    if size > k1 {
                        return Ok(Verdict::fail(
                            depth,
                            format!("bag {t} on the branch of leaf {leaf} has {size} non-exception vertices, allowed {k1}"),
                        ));
                    }
                }
            }
        }
        Exceptions::PerComponent(sets) => {
            if d.kind != DecompKind::Path {
                return Ok(Verdict::fail(depth, "component width is defined for path decompositions only"));
            }
            let comps = g.components();
            if sets.len() != comps.len() {
                return Ok(Verdict::fail(depth, format!("{} exception sets for {} components", sets.len(), comps.len())));
            }
            let mut union = 0;
            for (i, (&s, &c)) in sets.iter().zip(&comps).enumerate() {
                if s & !c != 0 {
                    return Ok(Verdict::fail(depth, format!("exception set {i} leaves its component")));
                }
                if s.count_ones() as usize > k2 {
                    return Ok(Verdict::fail(depth, format!("component {i} has {} exceptions, allowed {k2}", s.count_ones())));
                }
                union |= s;
            }
            for (t, &b) in d.bags.iter().enumerate() {
                let size = (b & !union).count_ones() as usize;
                if size > k1 {
                    return Ok(Verdict::fail(depth, format!("bag {t} has {size} non-exception vertices, allowed {k1}")));
                }
            }
        }
    }
    if let Some(q) = q {
        if depth > q {
            return Ok(Verdict::fail(depth, format!("depth {depth} exceeds {q}")));
        }
    }
    Ok(Verdict::pass(depth))
}
