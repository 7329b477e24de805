use std::collections::BTreeMap;

use super::{verify_decomposition, DecompKind, Exceptions, Forest, RootedDecomposition};
use crate::error::{Error, Result};
use crate::graph::{bit, members, Graph, VSet};

/// Smallest class width `(k1, k2)` the recorded exceptions certify.
pub(crate) fn recorded_width(d: &RootedDecomposition, forest: &Forest) -> (usize, usize) {
    let mut k1 = 0;
    let mut k2 = 0;
    for leaf in forest.leaves() {
        let s = d.leaf_exceptions(leaf);
        let own = match &d.exceptions {
            Exceptions::PerLeaf(_) => s.count_ones() as usize,
            Exceptions::PerComponent(sets) => sets.iter().map(|c| c.count_ones() as usize).max().unwrap_or(0),
        };
        k2 = k2.max(own);
        for t in forest.ancestors(leaf) {
            k1 = k1.max((d.bags[t] & !s).count_ones() as usize);
        }
    }
    (k1, k2)
}

/// True iff every inner node is an introduce, forget or join node; for paths the root endpoint
/// is exempt and joins do not occur.
pub fn is_nice(d: &RootedDecomposition) -> bool {
    let Ok(forest) = d.forest() else { return false };
    (0..d.bags.len()).all(|t| match forest.children[t].as_slice() {
        [] => true,
        [_] if d.kind == DecompKind::Path && forest.parent[t].is_none() => true,
        [c] => {
            let (a, b) = (d.bags[t], d.bags[*c]);
            (a ^ b).count_ones() == 1
        }
        [c1, c2] => d.kind == DecompKind::Tree && d.bags[*c1] == d.bags[t] && d.bags[*c2] == d.bags[t],
        _ => false,
    })
}

/// True iff exceptions never leave the bags on the way down to their leaf.
pub fn exceptions_persist(d: &RootedDecomposition, forest: &Forest) -> bool {
    forest.leaves().into_iter().all(|leaf| {
        let s = d.leaf_exceptions(leaf);
        let chain = forest.ancestors(leaf);
        chain.windows(2).all(|w| s & d.bags[w[1]] & !d.bags[w[0]] == 0)
    })
}

/// Nice decomposition of the same width and depth whose exception vertices persist downwards
/// (once an exception vertex of leaf `ℓ` is in a bag on the branch of `ℓ`, it stays in every
/// bag below it on that branch). The root bag is empty. The output is re-verified.
pub fn make_nice(d: &RootedDecomposition, g: &Graph) -> Result<RootedDecomposition> {
    let forest = d.forest()?;
    let (k1, k2) = recorded_width(d, &forest);
    let input = verify_decomposition(d, g, k1, k2, None)?;
    if !input.ok {
        return Err(Error::invalid(format!("make_nice needs a valid decomposition: {}", input.diagnostic.unwrap_or_default())));
    }
    let depth = input.depth;
    let mut w = Work::from(d);
    w.enforce_persistence(&forest, k1, k2)?;
    w.contract();
    let out = w.build_nice(d.kind);
    let out_forest = out.forest()?;
    let check = verify_decomposition(&out, g, k1, k2, Some(depth))?;
    if !check.ok || !is_nice(&out) || !exceptions_persist(&out, &out_forest) {
        return Err(Error::TheoremViolation(format!(
            "nice decomposition failed re-verification: {}",
            check.diagnostic.unwrap_or_else(|| "niceness or persistence".into())
        )));
    }
    Ok(out)
}

/// Mutable tree used during the transformation.
struct Work {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    bags: Vec<VSet>,
    alive: Vec<bool>,
    leaf_ex: BTreeMap<usize, VSet>,
    component: Option<Vec<VSet>>,
}

impl Work {
    fn from(d: &RootedDecomposition) -> Work {
        let forest = Forest::new(&d.parent).expect("validated");
        let mut leaf_ex = BTreeMap::new();
        for leaf in forest.leaves() {
            let chain_union = forest.ancestors(leaf).iter().fold(0, |a, &t| a | d.bags[t]);
            leaf_ex.insert(leaf, d.leaf_exceptions(leaf) & chain_union);
        }
        let component = match &d.exceptions {
            Exceptions::PerComponent(sets) => Some(sets.clone()),
            Exceptions::PerLeaf(_) => None,
        };
        Work {
            parent: d.parent.clone(),
            children: forest.children.clone(),
            bags: d.bags.clone(),
            alive: vec![true; d.bags.len()],
            leaf_ex,
            component,
        }
    }

    fn chain(&self, leaf: usize) -> Vec<usize> {
        let mut out = vec![leaf];
        let mut cur = self.parent[leaf];
        while let Some(c) = cur {
            out.push(c);
            cur = self.parent[c];
        }
        out.reverse();
        out
    }

    fn persistent_on(&self, chain: &[usize], s: VSet) -> bool {
        chain.windows(2).all(|w| s & self.bags[w[0]] & !self.bags[w[1]] == 0)
    }

    fn width_ok(&self, chain: &[usize], s: VSet, k1: usize) -> bool {
        chain.iter().all(|&t| (self.bags[t] & !s).count_ones() as usize <= k1)
    }

    /// Adds each exception vertex to the bags below its last occurrence on its branch.
    fn extend(&mut self, chain: &[usize], s: VSet) {
        for v in members(s) {
            let Some(last) = chain.iter().rposition(|&t| self.bags[t] & bit(v) != 0) else { continue };
            for &t in &chain[last + 1..] {
                self.bags[t] |= bit(v);
            }
        }
    }

    fn enforce_persistence(&mut self, forest: &Forest, k1: usize, k2: usize) -> Result<()> {
        if self.component.is_some() || forest.is_linear() {
            // A single branch: extending exceptions never affects the width.
            for leaf in forest.leaves() {
                let chain = self.chain(leaf);
                let s = self.leaf_ex[&leaf];
                self.extend(&chain, s);
            }
            return Ok(());
        }
        let leaves = forest.leaves();
        for _round in 0..=self.bags.len() * 2 {
            let mut stable = true;
            for &leaf in &leaves {
                let chain = self.chain(leaf);
                let current = self.leaf_ex[&leaf];
                let union = chain.iter().fold(0, |a, &t| a | self.bags[t]);
                let candidates = std::iter::once(current).chain(subsets_up_to(union, k2));
                let mut best: Option<(VSet, bool)> = None;
                for s in candidates {
                    if !self.width_ok(&chain, s, k1) {
                        continue;
                    }
                    let persistent = self.persistent_on(&chain, s);
                    if best.is_none() || persistent {
                        best = Some((s, persistent));
                    }
                    if persistent {
                        break;
                    }
                }
                match best {
                    None => {
                        return Err(Error::TheoremViolation(format!(
                            "no exception set of size <= {k2} keeps leaf {leaf} within width {k1} after making exceptions persistent"
                        )))
                    }
                    Some((s, persistent)) => {
                        self.leaf_ex.insert(leaf, s);
                        if !persistent {
                            stable = false;
                            self.extend(&chain, s);
                        }
                    }
                }
            }
            if stable {
                return Ok(());
            }
        }
        Err(Error::TheoremViolation("exception persistence did not stabilise".into()))
    }

    /// Removes `t`; its children take its place under its parent.
    fn remove_into_parent(&mut self, t: usize) {
        let p = self.parent[t].expect("non-root");
        let kids = std::mem::take(&mut self.children[t]);
        for &c in &kids {
            self.parent[c] = Some(p);
        }
        let pos = self.children[p].iter().position(|&c| c == t).expect("child listed");
        self.children[p].splice(pos..=pos, kids);
        self.alive[t] = false;
        if let Some(s) = self.leaf_ex.remove(&t) {
            if self.children[p].is_empty() {
                self.leaf_ex.insert(p, s);
            }
        }
    }

    /// Contracts child-into-parent when the child's bag is a subset, and a parent into its only
    /// child when the parent's bag is a subset.
    fn contract(&mut self) {
        loop {
            let mut changed = false;
            for t in 0..self.bags.len() {
                if !self.alive[t] {
                    continue;
                }
                let Some(p) = self.parent[t] else { continue };
                if self.bags[t] & !self.bags[p] == 0 {
                    self.remove_into_parent(t);
                    changed = true;
                } else if self.children[p].len() == 1 && self.bags[p] & !self.bags[t] == 0 {
                    // Parent p merges into t: t takes p's place.
                    let grand = self.parent[p];
                    self.parent[t] = grand;
                    if let Some(gp) = grand {
                        let pos = self.children[gp].iter().position(|&c| c == p).expect("listed");
                        self.children[gp][pos] = t;
                    }
                    self.children[p].clear();
                    self.alive[p] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn build_nice(&self, kind: DecompKind) -> RootedDecomposition {
        let root = (0..self.bags.len()).find(|&t| self.alive[t] && self.parent[t].is_none()).expect("root");
        let mut parent: Vec<Option<usize>> = Vec::new();
        let mut bags: Vec<VSet> = Vec::new();
        let mut leaf_ex = BTreeMap::new();
        let push = |parent_vec: &mut Vec<Option<usize>>, bags_vec: &mut Vec<VSet>, p: Option<usize>, b: VSet| {
            parent_vec.push(p);
            bags_vec.push(b);
            parent_vec.len() - 1
        };
        // Empty root, then introduce the original root bag one vertex at a time.
        let mut top = push(&mut parent, &mut bags, None, 0);
        let mut cur = 0;
        for v in members(self.bags[root]) {
            cur |= bit(v);
            top = push(&mut parent, &mut bags, Some(top), cur);
        }
        let mut stack = vec![(root, top)];
        while let Some((t, at)) = stack.pop() {
            let kids = &self.children[t];
            if kids.is_empty() {
                leaf_ex.insert(at, self.leaf_ex.get(&t).copied().unwrap_or(0));
                continue;
            }
            // Binary tree of copies with one attachment point per child.
            let mut slots = vec![at];
            while slots.len() < kids.len() {
                let s = slots.remove(0);
                let a = push(&mut parent, &mut bags, Some(s), self.bags[t]);
                let b = push(&mut parent, &mut bags, Some(s), self.bags[t]);
                slots.push(a);
                slots.push(b);
            }
            for (&c, &slot) in kids.iter().zip(&slots) {
                let mut prev = slot;
                let mut bag = self.bags[t];
                for v in members(self.bags[t] & !self.bags[c]) {
                    bag &= !bit(v);
                    prev = push(&mut parent, &mut bags, Some(prev), bag);
                }
                for v in members(self.bags[c] & !self.bags[t]) {
                    bag |= bit(v);
                    prev = push(&mut parent, &mut bags, Some(prev), bag);
                }
                stack.push((c, prev));
            }
        }
        let exceptions = match &self.component {
            Some(sets) => Exceptions::PerComponent(sets.clone()),
            None => Exceptions::PerLeaf(leaf_ex),
        };
        RootedDecomposition { parent, bags, kind, exceptions }
    }
}

/// Subsets of `set` with at most `k` members, smallest first.
pub(crate) fn subsets_up_to(set: VSet, k: usize) -> Vec<VSet> {
    let items: Vec<usize> = members(set).collect();
    let mut out = vec![0];
    let mut frontier = vec![(0 as VSet, 0usize)];
    for _ in 0..k {
        let mut next = Vec::new();
        for &(s, start) in &frontier {
            for (i, &v) in items.iter().enumerate().skip(start) {
                next.push((s | bit(v), i + 1));
            }
        }
        out.extend(next.iter().map(|&(s, _)| s));
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::set_of;

    #[test]
    fn forget_then_introduce_chain() {
        // Bags {a,b,c} -> {c,d} on the path a-b-c-d plus triangle abc.
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        let d = RootedDecomposition::path(vec![set_of([0, 1, 2]), set_of([2, 3])], 0);
        let nice = make_nice(&d, &g).unwrap();
        assert!(is_nice(&nice));
        let bags: Vec<VSet> = nice.bags.clone();
        let pos_abc = bags.iter().position(|&b| b == set_of([0, 1, 2])).unwrap();
        assert_eq!(&bags[pos_abc + 1..], &[set_of([1, 2]), set_of([2]), set_of([2, 3])]);
        let v = verify_decomposition(&nice, &g, 3, 0, Some(4)).unwrap();
        assert!(v.ok);
    }

    #[test]
    fn already_nice_keeps_width_and_depth() {
        let g = Graph::path(3);
        let d = RootedDecomposition::path(vec![0, set_of([0]), set_of([0, 1]), set_of([1]), set_of([1, 2])], 0);
        assert!(is_nice(&d));
        let nice = make_nice(&d, &g).unwrap();
        assert!(is_nice(&nice));
        let before = verify_decomposition(&d, &g, 2, 0, None).unwrap();
        let after = verify_decomposition(&nice, &g, 2, 0, None).unwrap();
        assert!(before.ok && after.ok);
        assert_eq!(before.depth, after.depth);
    }

    #[test]
    fn tree_with_join() {
        // Star with centre 0: bag {0} with three leaf bags.
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let d = RootedDecomposition {
            parent: vec![None, Some(0), Some(0), Some(0)],
            bags: vec![set_of([0]), set_of([0, 1]), set_of([0, 2]), set_of([0, 3])],
            kind: DecompKind::Tree,
            exceptions: Exceptions::PerLeaf(BTreeMap::new()),
        };
        let nice = make_nice(&d, &g).unwrap();
        assert!(is_nice(&nice));
        assert!(verify_decomposition(&nice, &g, 2, 0, Some(2)).unwrap().ok);
    }

    #[test]
    fn exceptions_are_extended() {
        // Edge 01 then isolated 2; exception 0 is forgotten in the input.
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let d = RootedDecomposition::path(vec![set_of([0, 1]), set_of([2])], set_of([0]));
        let nice = make_nice(&d, &g).unwrap();
        let f = nice.forest().unwrap();
        assert!(exceptions_persist(&nice, &f));
        assert!(verify_decomposition(&nice, &g, 1, 1, Some(3)).unwrap().ok);
    }

    #[test]
    fn subset_enumeration() {
        assert_eq!(subsets_up_to(0b111, 1).len(), 4);
        assert_eq!(subsets_up_to(0b111, 2).len(), 7);
    }
}
