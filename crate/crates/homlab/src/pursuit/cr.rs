use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{boundary, closure, image, Outcome, Placement};
use crate::decomp::{DecompKind, Exceptions, RootedDecomposition};
use crate::error::{Error, Result};
use crate::graph::{bit, members, Alphabet, Graph, Pebble, VSet};

/// One entry of a cop strategy: in the given position the cops move `pebble` to `destination`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CrMove {
    pub placement: Placement,
    /// Robber region before the move (the whole graph before the robber is placed).
    pub robber: VSet,
    /// 1-based round number.
    pub round: usize,
    pub pebble: Pebble,
    pub destination: Option<usize>,
    /// Entry whose move led to this position.
    pub parent: Option<usize>,
}

/// Cop strategy as a table over all positions reachable against every robber.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CrStrategy {
    pub alphabet: Alphabet,
    pub rounds: usize,
    pub moves: Vec<CrMove>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrSolution {
    pub outcome: Outcome,
    /// Monotone winning strategy, when the cops win.
    pub strategy: Option<CrStrategy>,
    pub decomposition: Option<RootedDecomposition>,
    /// Set when the cops win but no monotone strategy was found.
    pub monotone_gap: bool,
}

pub(crate) fn check_move(cr: &CrStrategy, m: &CrMove, g: &Graph) -> std::result::Result<(), String> {
    if !cr.alphabet.contains(m.pebble) {
        return Err(format!("pebble {} outside {}", m.pebble, cr.alphabet));
    }
    if m.pebble.is_y() && m.placement.contains_key(&m.pebble) {
        return Err(format!("non-reusable cop {} is already placed", m.pebble));
    }
    if m.destination.is_some_and(|w| w >= g.n()) || m.placement.values().any(|&v| v >= g.n()) {
        return Err("vertex out of range".into());
    }
    if m.round == 0 || m.round > cr.rounds {
        return Err(format!("round {} outside 1..={}", m.round, cr.rounds));
    }
    Ok(())
}

/// Exact game value by memoised search over (reusable cop set, non-reusable cop set, robber
/// region, rounds left). Stacked cops are never useful and are not generated.
struct Exact<'a> {
    g: &'a Graph,
    k1: usize,
    k2: usize,
    memo: HashMap<(VSet, VSet, VSet, usize), bool>,
}

impl Exact<'_> {
    fn win(&mut self, xs: VSet, ys: VSet, region: VSet, rounds: usize) -> bool {
        if rounds == 0 {
            return false;
        }
        let key = (xs, ys, region, rounds);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let all = self.g.vertices();
        let occupied = xs | ys;
        let mut moves: Vec<(VSet, VSet, VSet)> = Vec::new();
        for u in members(xs) {
            let lifted = occupied & !bit(u);
            moves.push((xs & !bit(u), ys, lifted));
            for w in members(all & !lifted & !bit(u)) {
                moves.push((xs & !bit(u) | bit(w), ys, lifted));
            }
        }
        if (xs.count_ones() as usize) < self.k1 {
            for w in members(all & !occupied) {
                moves.push((xs | bit(w), ys, occupied));
            }
        }
        if (ys.count_ones() as usize) < self.k2 {
            for w in members(all & !occupied) {
                moves.push((xs, ys | bit(w), occupied));
            }
        }
        let mut result = false;
        for (nx, ny, lifted) in moves {
            let left = closure(self.g, region, lifted) & !(nx | ny);
            if self.g.components_within(left).into_iter().all(|d| self.win(nx, ny, d, rounds - 1)) {
                result = true;
                break;
            }
        }
        self.memo.insert(key, result);
        result
    }
}

/// Game restricted to robber-monotone play: cops are only placed inside the robber region and
/// cops adjacent to it never lift. Cops away from the region are irrelevant and dropped from
/// the state; only the count of used non-reusable cops persists.
struct Monotone<'a> {
    g: &'a Graph,
    k1: usize,
    k2: usize,
    memo: HashMap<(VSet, VSet, usize, VSet, usize), bool>,
}

impl Monotone<'_> {
    fn relevant(&self, set: VSet, region: VSet) -> VSet {
        set & boundary(self.g, region)
    }

    /// Outcome of placing on `w` (as reusable if `reusable`), `None` if illegal.
    fn after(&mut self, xs: VSet, ys: VSet, used: usize, region: VSet, rounds: usize, w: usize, reusable: bool) -> Option<bool> {
        let (nx, ny, nused) = if reusable {
            if xs.count_ones() as usize >= self.k1 {
                return None;
            }
            (xs | bit(w), ys, used)
        } else {
            if used >= self.k2 {
                return None;
            }
            (xs, ys | bit(w), used + 1)
        };
        let left = region & !bit(w);
        Some(self.g.components_within(left).into_iter().all(|d| {
            let (rx, ry) = (self.relevant(nx, d), self.relevant(ny, d));
            self.win(rx, ry, nused, d, rounds - 1)
        }))
    }

    fn win(&mut self, xs: VSet, ys: VSet, used: usize, region: VSet, rounds: usize) -> bool {
        if rounds == 0 {
            return false;
        }
        let key = (xs, ys, used, region, rounds);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let mut result = false;
        'outer: for w in members(region) {
            for reusable in [true, false] {
                if self.after(xs, ys, used, region, rounds, w, reusable) == Some(true) {
                    result = true;
                    break 'outer;
                }
            }
        }
        self.memo.insert(key, result);
        result
    }
}

/// Decides the cops-and-robber game with `q` rounds exactly and, when the cops win, extracts a
/// monotone strategy (lowest pebble, then lowest destination) and the decomposition it induces.
pub fn solve_cr(g: &Graph, k1: usize, k2: usize, q: usize) -> Result<CrSolution> {
    let alphabet = Alphabet::new(k1, k2)?;
    if q == 0 {
        return Err(Error::invalid("the round bound must be at least 1"));
    }
    let all = g.vertices();
    if all == 0 {
        let d = RootedDecomposition::path(vec![0], 0);
        let strategy = CrStrategy { alphabet, rounds: q, moves: Vec::new() };
        return Ok(CrSolution { outcome: Outcome::PursuersWin, strategy: Some(strategy), decomposition: Some(d), monotone_gap: false });
    }
    let mut mono = Monotone { g, k1, k2, memo: HashMap::new() };
    if mono.win(0, 0, 0, all, q) {
        let strategy = extract(&mut mono, alphabet, q);
        let decomposition = cr_decomposition(&strategy, g)?;
        return Ok(CrSolution { outcome: Outcome::PursuersWin, strategy: Some(strategy), decomposition: Some(decomposition), monotone_gap: false });
    }
    let mut exact = Exact { g, k1, k2, memo: HashMap::new() };
    if exact.win(0, 0, all, q) {
        return Ok(CrSolution { outcome: Outcome::PursuersWin, strategy: None, decomposition: None, monotone_gap: true });
    }
    Ok(CrSolution { outcome: Outcome::EvaderWins, strategy: None, decomposition: None, monotone_gap: false })
}

fn extract(mono: &mut Monotone, alphabet: Alphabet, q: usize) -> CrStrategy {
    let g = mono.g;
    let mut moves = Vec::new();
    let mut stack: Vec<(Placement, VSet, usize, Option<usize>)> = vec![(Placement::new(), g.vertices(), 1, None)];
    while let Some((gamma, region, round, parent)) = stack.pop() {
        let rounds_left = q + 1 - round;
        let near = boundary(g, region);
        let xs = image(&gamma.iter().filter(|(p, _)| p.is_x()).map(|(&p, &v)| (p, v)).collect()) & near;
        let ys = image(&gamma.iter().filter(|(p, _)| p.is_y()).map(|(&p, &v)| (p, v)).collect()) & near;
        let used = gamma.keys().filter(|p| p.is_y()).count();
        let mut chosen = None;
        'search: for pebble in alphabet.pebbles() {
            let legal = match pebble {
                Pebble::X(_) => gamma.get(&pebble).is_none_or(|&u| near & bit(u) == 0),
                Pebble::Y(_) => !gamma.contains_key(&pebble),
            };
            if !legal {
                continue;
            }
            for w in members(region) {
                if mono.after(xs, ys, used, region, rounds_left, w, pebble.is_x()) == Some(true) {
                    chosen = Some((pebble, w));
                    break 'search;
                }
            }
        }
        let (pebble, w) = chosen.expect("winning position has a winning move");
        let index = moves.len();
        moves.push(CrMove { placement: gamma.clone(), robber: region, round, pebble, destination: Some(w), parent });
        let mut next = gamma;
        next.insert(pebble, w);
        for d in g.components_within(region & !bit(w)).into_iter().rev() {
            stack.push((next.clone(), d, round + 1, Some(index)));
        }
    }
    CrStrategy { alphabet, rounds: q, moves }
}

/// Tree decomposition induced by a monotone cop strategy: one node per strategy entry, whose
/// bag holds the cops guarding the robber region plus the new cop.
pub fn cr_decomposition(s: &CrStrategy, g: &Graph) -> Result<RootedDecomposition> {
    let m = s.moves.len();
    if m == 0 {
        return Ok(RootedDecomposition::path(vec![0], 0));
    }
    let mut has_child = vec![false; m];
    for mv in &s.moves {
        if let Some(p) = mv.parent {
            if p >= m {
                return Err(Error::invalid(format!("strategy entry refers to missing parent {p}")));
            }
            has_child[p] = true;
        }
    }
    let bags: Vec<VSet> = s
        .moves
        .iter()
        .map(|mv| (image(&mv.placement) & boundary(g, mv.robber)) | mv.destination.map_or(0, bit))
        .collect();
    let mut ex = BTreeMap::new();
    for leaf in (0..m).filter(|&t| !has_child[t]) {
        let mut s_leaf = 0;
        let mut cur = Some(leaf);
        while let Some(t) = cur {
            let mv = &s.moves[t];
            if mv.pebble.is_y() {
                s_leaf |= mv.destination.map_or(0, bit);
            }
            cur = mv.parent;
        }
        ex.insert(leaf, s_leaf);
    }
    Ok(RootedDecomposition {
        parent: s.moves.iter().map(|mv| mv.parent).collect(),
        bags,
        kind: DecompKind::Tree,
        exceptions: Exceptions::PerLeaf(ex),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::verify_decomposition;
    use crate::pursuit::{is_monotone, Strategy};

    fn cops_win(g: &Graph, k1: usize, k2: usize, q: usize) -> bool {
        solve_cr(g, k1, k2, q).unwrap().outcome == Outcome::PursuersWin
    }

    #[test]
    fn examples() {
        let p3 = Graph::path(3);
        assert!(cops_win(&p3, 2, 0, 2));
        assert!(cops_win(&p3, 1, 1, 2));
        assert!(!cops_win(&p3, 1, 0, 3));
        for q in 1..=5 {
            assert!(!cops_win(&Graph::complete(3), 2, 0, q));
        }
        assert!(cops_win(&Graph::complete(3), 3, 0, 3));
        assert!(!cops_win(&Graph::complete(3), 3, 0, 2));
    }

    #[test]
    fn strategy_is_monotone_and_decomposes() {
        let g = Graph::cycle(5);
        for (k1, k2, q) in [(3, 0, 4), (2, 1, 4), (1, 2, 5)] {
            let sol = solve_cr(&g, k1, k2, q).unwrap();
            assert_eq!(sol.outcome, Outcome::PursuersWin, "{k1} {k2} {q}");
            let s = sol.strategy.unwrap();
            assert!(is_monotone(&Strategy::Cr(s), &g).unwrap());
            let d = sol.decomposition.unwrap();
            let v = verify_decomposition(&d, &g, k1, k2, Some(q)).unwrap();
            assert!(v.ok, "{:?}", v.diagnostic);
        }
    }

    #[test]
    fn exact_matches_monotone_on_small_graphs() {
        let graphs = [Graph::path(4), Graph::cycle(4), Graph::complete(4), Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (3, 4)]).unwrap()];
        for g in &graphs {
            for (k1, k2) in [(1, 0), (1, 1), (2, 0), (0, 2), (2, 1)] {
                for q in 1..=4 {
                    let sol = solve_cr(g, k1, k2, q).unwrap();
                    assert!(!sol.monotone_gap, "{g:?} {k1} {k2} {q}");
                }
            }
        }
    }
}
