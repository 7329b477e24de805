//! Brute-force existence searches for decompositions and forest covers. They share no code with
//! the game solvers or the conversions, and every object they return passes the decomp verifiers.

use std::collections::{BTreeMap, HashSet};

use crate::decomp::{verify_decomposition, verify_forest_cover, CoverVariant, DecompKind, Exceptions, ForestCover, RootedDecomposition};
use crate::error::{Error, Result};
use crate::graph::{bit, members, Alphabet, Graph, Pebble, VSet};

fn subsets_up_to(of: VSet, k: usize) -> Vec<VSet> {
    let elems: Vec<usize> = members(of).collect();
    let mut out: Vec<VSet> = (0u64..1 << elems.len())
        .filter(|m| m.count_ones() as usize <= k)
        .map(|m| members(m).fold(0, |acc, i| acc | bit(elems[i])))
        .collect();
    out.sort_by_key(|s| (s.count_ones(), *s));
    out
}

fn neighborhood(g: &Graph, set: VSet) -> VSet {
    members(set).fold(0, |acc, v| acc | g.neighbors(v))
}

fn checked_decomposition(d: RootedDecomposition, g: &Graph, k1: usize, k2: usize, q: Option<usize>) -> Result<RootedDecomposition> {
    let v = verify_decomposition(&d, g, k1, k2, q)?;
    if !v.ok {
        return Err(Error::TheoremViolation(format!("oracle decomposition rejected: {}", v.diagnostic.unwrap_or_default())));
    }
    Ok(d)
}

fn checked_cover(fc: ForestCover, g: &Graph) -> Result<ForestCover> {
    let v = verify_forest_cover(&fc, g)?;
    if !v.ok {
        return Err(Error::TheoremViolation(format!("oracle cover rejected: {}", v.diagnostic.unwrap_or_default())));
    }
    Ok(fc)
}

/// A path decomposition of class width `(k1, k2)`: an exception set `S` plus a sequence of bags
/// over `g - S` with at most `k1` vertices, found by search over (forgotten, bag) states.
pub fn exhaustive_path_decomposition(g: &Graph, k1: usize, k2: usize) -> Result<Option<RootedDecomposition>> {
    Alphabet::new(k1, k2)?;
    if g.n() == 0 {
        return Ok(Some(RootedDecomposition::path(vec![0], 0)));
    }
    for s in subsets_up_to(g.vertices(), k2) {
        let rest = g.vertices() & !s;
        let bags = if rest == 0 {
            Some(vec![0])
        } else if k1 == 0 {
            None
        } else {
            bag_sequence(g, rest, k1)
        };
        if let Some(bags) = bags {
            let bags = bags.into_iter().map(|b| b | s).collect();
            return checked_decomposition(RootedDecomposition::path(bags, s), g, k1, k2, None).map(Some);
        }
    }
    Ok(None)
}

fn bag_sequence(g: &Graph, rest: VSet, width: usize) -> Option<Vec<VSet>> {
    fn go(g: &Graph, rest: VSet, width: usize, forgotten: VSet, bag: VSet, seen: &mut HashSet<(VSet, VSet)>, out: &mut Vec<VSet>) -> bool {
        if forgotten | bag == rest {
            return true;
        }
        if !seen.insert((forgotten, bag)) {
            return false;
        }
        for v in members(bag) {
            if g.neighbors(v) & rest & !(forgotten | bag) == 0 && go(g, rest, width, forgotten | bit(v), bag & !bit(v), seen, out) {
                return true;
            }
        }
        if (bag.count_ones() as usize) < width {
            for v in members(rest & !(forgotten | bag)) {
                out.push(bag | bit(v));
                if go(g, rest, width, forgotten, bag | bit(v), seen, out) {
                    return true;
                }
                out.pop();
            }
        }
        false
    }
    let mut out = Vec::new();
    go(g, rest, width, 0, 0, &mut HashSet::new(), &mut out).then_some(out)
}

/// A linear `(k1, k2)`-pebble forest cover, searched as a single vertex ordering with pebbles.
/// A forest of paths can always be concatenated into one path, so this loses nothing.
pub fn exhaustive_linear_cover(g: &Graph, k1: usize, k2: usize) -> Result<Option<ForestCover>> {
    let alphabet = Alphabet::new(k1, k2)?;
    let mut s = LinearSearch { g, alphabet, order: Vec::new(), pebble: BTreeMap::new(), failed: HashSet::new() };
    if !s.go(0, 0) {
        return Ok(None);
    }
    let n = g.n();
    let mut parent = vec![None; n];
    let mut pebbles = vec![Pebble::X(1); n];
    for (i, &v) in s.order.iter().enumerate() {
        parent[v] = i.checked_sub(1).map(|j| s.order[j]);
        pebbles[v] = s.pebble[&v];
    }
    checked_cover(ForestCover { parent, pebbles, variant: CoverVariant::Linear, alphabet, depth: None }, g).map(Some)
}

struct LinearSearch<'g> {
    g: &'g Graph,
    alphabet: Alphabet,
    order: Vec<usize>,
    pebble: BTreeMap<usize, Pebble>,
    failed: HashSet<(VSet, Vec<(usize, Pebble)>, VSet)>,
}

impl LinearSearch<'_> {
    fn go(&mut self, placed: VSet, ys: VSet) -> bool {
        let unplaced = self.g.vertices() & !placed;
        if unplaced == 0 {
            return true;
        }
        // Placed vertices with a neighbour still to come constrain every later pebble.
        let open: Vec<(usize, Pebble)> =
            members(placed).filter(|&u| self.g.neighbors(u) & unplaced != 0).map(|u| (u, self.pebble[&u])).collect();
        let key = (placed, open.clone(), ys);
        if self.failed.contains(&key) {
            return false;
        }
        for w in members(unplaced) {
            for (slot, z) in self.alphabet.pebbles().enumerate() {
                if z.is_y() && ys & bit(slot) != 0 {
                    continue;
                }
                if open.iter().any(|&(_, p)| p == z) {
                    continue;
                }
                self.order.push(w);
                self.pebble.insert(w, z);
                let ys_next = if z.is_y() { ys | bit(slot) } else { ys };
                if self.go(placed | bit(w), ys_next) {
                    return true;
                }
                self.order.pop();
                self.pebble.remove(&w);
            }
        }
        self.failed.insert(key);
        false
    }
}

/// A `(k1, k2)`-pebble forest cover of depth at most `q`. Each component of what remains below a
/// vertex gets its own subtree.
pub fn exhaustive_tree_cover(g: &Graph, k1: usize, k2: usize, q: usize) -> Result<Option<ForestCover>> {
    let alphabet = Alphabet::new(k1, k2)?;
    let n = g.n();
    let mut s = TreeCoverSearch { g, alphabet, parent: vec![None; n], pebbles: vec![Pebble::X(1); n], failed: HashSet::new() };
    for c in g.components() {
        if !s.go(c, &mut Vec::new(), 0, q) {
            return Ok(None);
        }
    }
    let fc = ForestCover { parent: s.parent, pebbles: s.pebbles, variant: CoverVariant::Tree, alphabet, depth: Some(q) };
    checked_cover(fc, g).map(Some)
}

type CoverKey = (VSet, Vec<(VSet, Pebble)>, VSet, usize);

struct TreeCoverSearch<'g> {
    g: &'g Graph,
    alphabet: Alphabet,
    parent: Vec<Option<usize>>,
    pebbles: Vec<Pebble>,
    failed: HashSet<CoverKey>,
}

impl TreeCoverSearch<'_> {
    /// Covers component `c` below the chain `ancestors` (vertex, pebble).
    fn go(&mut self, c: VSet, ancestors: &mut Vec<(usize, Pebble)>, ys: VSet, depth_left: usize) -> bool {
        if depth_left == 0 {
            return false;
        }
        let mut relevant: Vec<(VSet, Pebble)> =
            ancestors.iter().map(|&(u, p)| (self.g.neighbors(u) & c, p)).filter(|&(nb, _)| nb != 0).collect();
        relevant.sort();
        let key = (c, relevant.clone(), ys, depth_left);
        if self.failed.contains(&key) {
            return false;
        }
        for r in members(c) {
            for (slot, z) in self.alphabet.pebbles().enumerate() {
                if (z.is_y() && ys & bit(slot) != 0) || relevant.iter().any(|&(_, p)| p == z) {
                    continue;
                }
                self.parent[r] = ancestors.last().map(|a| a.0);
                self.pebbles[r] = z;
                ancestors.push((r, z));
                let ys_next = if z.is_y() { ys | bit(slot) } else { ys };
                let ok = self.g.components_within(c & !bit(r)).into_iter().all(|d| self.go(d, ancestors, ys_next, depth_left - 1));
                ancestors.pop();
                if ok {
                    return true;
                }
            }
        }
        self.failed.insert(key);
        false
    }
}

/// A tree decomposition of class width `(k1, k2)` and depth at most `q`. Below a node with bag
/// `B`, every component `C` of what is left gets one child with bag `(N(C) ∩ B) ∪ X` for some
/// nonempty `X ⊆ C`; each leaf picks its exception set among the vertices on its branch.
pub fn exhaustive_tree_decomposition(g: &Graph, k1: usize, k2: usize, q: usize) -> Result<Option<RootedDecomposition>> {
    Alphabet::new(k1, k2)?;
    if g.n() == 0 {
        return Ok(Some(RootedDecomposition::path(vec![0], 0)));
    }
    let mut s = TreeDecompSearch { g, k1, k2, q, parent: Vec::new(), bags: Vec::new(), exceptions: BTreeMap::new() };
    for root in subsets_up_to(g.vertices(), q.min(k1 + k2)) {
        s.parent.clear();
        s.bags.clear();
        s.exceptions.clear();
        if s.node(None, root, &mut Vec::new(), root, g.vertices() & !root) {
            let d = RootedDecomposition {
                parent: s.parent,
                bags: s.bags,
                kind: DecompKind::Tree,
                exceptions: Exceptions::PerLeaf(s.exceptions),
            };
            return checked_decomposition(d, g, k1, k2, Some(q)).map(Some);
        }
    }
    Ok(None)
}

struct TreeDecompSearch<'g> {
    g: &'g Graph,
    k1: usize,
    k2: usize,
    q: usize,
    parent: Vec<Option<usize>>,
    bags: Vec<VSet>,
    exceptions: BTreeMap<usize, VSet>,
}

impl TreeDecompSearch<'_> {
    fn leaf_exceptions(&self, path: &[VSet]) -> Option<VSet> {
        let union = path.iter().fold(0, |a, b| a | b);
        subsets_up_to(union, self.k2).into_iter().find(|&s| path.iter().all(|b| (b & !s).count_ones() as usize <= self.k1))
    }

    /// Adds a node with `bag` under `parent` and covers `rest`, which lies entirely below it.
    fn node(&mut self, parent: Option<usize>, bag: VSet, path: &mut Vec<VSet>, union: VSet, rest: VSet) -> bool {
        let id = self.bags.len();
        self.parent.push(parent);
        self.bags.push(bag);
        path.push(bag);
        let ok = if rest == 0 {
            match self.leaf_exceptions(path) {
                Some(s) => {
                    self.exceptions.insert(id, s);
                    true
                }
                None => false,
            }
        } else {
            self.g.components_within(rest).into_iter().all(|c| self.child(id, bag, path, union, c))
        };
        path.pop();
        if !ok {
            self.parent.truncate(id);
            self.bags.truncate(id);
            self.exceptions.retain(|&leaf, _| leaf < id);
        }
        ok
    }

    fn child(&mut self, parent: usize, bag: VSet, path: &mut Vec<VSet>, union: VSet, c: VSet) -> bool {
        let base = neighborhood(self.g, c) & bag;
        for x in subsets_up_to(c, self.q) {
            if x == 0 {
                continue;
            }
            let child_bag = base | x;
            let next_union = union | x;
            let rest = c & !x;
            if next_union.count_ones() as usize > self.q
                || child_bag.count_ones() as usize > self.k1 + self.k2
                || neighborhood(self.g, rest) & next_union & !child_bag != 0
            {
                continue;
            }
            if self.node(Some(parent), child_bag, path, next_union, rest) {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_four() {
        let c4 = Graph::cycle(4);
        assert!(exhaustive_path_decomposition(&c4, 2, 0).unwrap().is_none());
        assert!(exhaustive_path_decomposition(&c4, 3, 0).unwrap().is_some());
        assert!(exhaustive_path_decomposition(&c4, 2, 1).unwrap().is_some());
        assert!(exhaustive_linear_cover(&c4, 2, 0).unwrap().is_none());
        assert!(exhaustive_linear_cover(&c4, 3, 0).unwrap().is_some());
        assert!(exhaustive_linear_cover(&c4, 2, 1).unwrap().is_some());
    }

    #[test]
    fn small_trees() {
        let p3 = Graph::path(3);
        assert!(exhaustive_tree_decomposition(&p3, 2, 0, 2).unwrap().is_some());
        assert!(exhaustive_tree_cover(&p3, 2, 0, 2).unwrap().is_some());
        assert!(exhaustive_tree_cover(&p3, 1, 1, 2).unwrap().is_some());
        assert!(exhaustive_tree_decomposition(&p3, 1, 1, 2).unwrap().is_some());
        let k3 = Graph::complete(3);
        for q in 1..=4 {
            assert!(exhaustive_tree_decomposition(&k3, 2, 0, q).unwrap().is_none());
            assert!(exhaustive_tree_cover(&k3, 2, 0, q).unwrap().is_none());
        }
        assert!(exhaustive_tree_decomposition(&Graph::path(2), 1, 0, 4).unwrap().is_none());
        assert!(exhaustive_tree_decomposition(&Graph::empty(1), 1, 0, 1).unwrap().is_some());
    }
}
