use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{closure, image, Outcome, Placement};
use crate::decomp::{Exceptions, RootedDecomposition};
use crate::error::{Error, Result};
use crate::graph::{bit, members, Alphabet, Graph, Pebble, VSet};

/// Searcher positions `γ_1, …, γ_m`; consecutive positions differ in one pebble.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct NsStrategy {
    pub alphabet: Alphabet,
    pub positions: Vec<Placement>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NsSolution {
    pub outcome: Outcome,
    pub strategy: Option<NsStrategy>,
    /// Vertices holding the non-reusable searchers in the normal-form strategy.
    pub exceptions: VSet,
    pub decomposition: Option<RootedDecomposition>,
}

/// Result of replaying a search strategy.
#[derive(Clone, Debug)]
pub struct NsPlay {
    /// Possible fugitive positions after each move (`regions[0]` is the whole graph).
    pub regions: Vec<VSet>,
    pub monotone: bool,
    pub cleared: bool,
}

/// Replays `s`, checking legality: one pebble changes per move, pebbles come from the
/// alphabet, and a placed non-reusable searcher never moves again.
pub fn simulate_ns(s: &NsStrategy, g: &Graph) -> Result<NsPlay> {
    let mut prev = Placement::new();
    let mut region = g.vertices();
    let mut regions = vec![region];
    let mut monotone = true;
    for (i, next) in s.positions.iter().enumerate() {
        let changed: Vec<Pebble> = s
            .alphabet
            .pebbles()
            .filter(|p| prev.get(p) != next.get(p))
            .collect();
        if let Some(p) = next.keys().find(|p| !s.alphabet.contains(**p)) {
            return Err(Error::UnknownPebble(p.to_string()));
        }
        if let Some(&v) = next.values().find(|&&v| v >= g.n()) {
            return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
        }
        let z = match changed.as_slice() {
            [z] => *z,
            _ => return Err(Error::invalid(format!("position {} changes {} pebbles", i + 1, changed.len()))),
        };
        if z.is_y() && prev.contains_key(&z) {
            return Err(Error::invalid(format!("position {} moves the placed non-reusable searcher {z}", i + 1)));
        }
        let mut lifted = prev.clone();
        lifted.remove(&z);
        let spread = closure(g, region, image(&lifted));
        if spread & !closure(g, region, image(&prev)) != 0 {
            monotone = false;
        }
        region = spread & !image(next);
        regions.push(region);
        prev = next.clone();
    }
    Ok(NsPlay { cleared: region == 0, regions, monotone })
}

/// Vertex separation number and an optimal ordering, by dynamic programming over subsets.
fn vertex_separation(g: &Graph) -> Result<(usize, Vec<usize>)> {
    const MAX: usize = 22;
    let m = g.n();
    if m > MAX {
        return Err(Error::TooLarge { n: m, max: MAX });
    }
    let size = 1usize << m;
    let mut best = vec![u8::MAX; size];
    let mut last = vec![0u8; size];
    best[0] = 0;
    for s in 1..size {
        let set = s as VSet;
        let border = members(set).filter(|&u| g.neighbors(u) & !set != 0).count() as u8;
        let mut value = u8::MAX;
        for v in members(set) {
            let prev = best[s & !(1 << v)];
            if prev < value {
                value = prev;
                last[s] = v as u8;
            }
        }
        best[s] = value.max(border);
    }
    let mut order = Vec::with_capacity(m);
    let mut s = size - 1;
    while s != 0 {
        let v = last[s] as usize;
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    Ok((best[size - 1] as usize, order))
}

/// Pathwidth (`None` for the empty graph).
pub fn pathwidth(g: &Graph) -> Result<Option<usize>> {
    if g.n() == 0 {
        return Ok(None);
    }
    Ok(Some(vertex_separation(g)?.0))
}

/// Decides the node searching game via the normal form: non-reusable searchers first on a set
/// `I` (tried in increasing size), then `k1` reusable searchers clear `g - I`, which is possible
/// iff `pathwidth(g - I) <= k1 - 1`.
pub fn solve_ns(g: &Graph, k1: usize, k2: usize) -> Result<NsSolution> {
    let alphabet = Alphabet::new(k1, k2)?;
    let n = g.n();
    for size in 0..=k2.min(n) {
        for i_set in subsets_of_size(g.vertices(), size) {
            let rest = g.vertices() & !i_set;
            let (sub, old) = g.induced(rest);
            let bags: Vec<VSet> = if sub.n() == 0 {
                Vec::new()
            } else {
                let (vs, order) = vertex_separation(&sub)?;
                if vs + 1 > k1 {
                    continue;
                }
                separation_bags(&sub, &order).into_iter().map(|b| members(b).fold(0, |a, v| a | bit(old[v]))).collect()
            };
            return build_solution(g, alphabet, i_set, bags);
        }
    }
    Ok(NsSolution { outcome: Outcome::EvaderWins, strategy: None, exceptions: 0, decomposition: None })
}

/// Bags `{v_i} ∪ {u before v_i with a neighbour at or after v_i}`.
fn separation_bags(g: &Graph, order: &[usize]) -> Vec<VSet> {
    let mut placed = 0;
    let mut bags = Vec::with_capacity(order.len());
    for (i, &v) in order.iter().enumerate() {
        let suffix = order[i..].iter().fold(0, |a, &u| a | bit(u));
        let active = members(placed).filter(|&u| g.neighbors(u) & suffix != 0).fold(0, |a, u| a | bit(u));
        bags.push(active | bit(v));
        placed |= bit(v);
    }
    bags
}

fn build_solution(g: &Graph, alphabet: Alphabet, i_set: VSet, bags: Vec<VSet>) -> Result<NsSolution> {
    let mut positions = Vec::new();
    let mut gamma = Placement::new();
    for (j, v) in members(i_set).enumerate() {
        gamma.insert(Pebble::Y(j + 1), v);
        positions.push(gamma.clone());
    }
    for &bag in &bags {
        let held: Vec<(Pebble, usize)> = gamma.iter().filter(|(p, _)| p.is_x()).map(|(&p, &v)| (p, v)).collect();
        for (p, v) in held {
            if bag & bit(v) == 0 {
                gamma.remove(&p);
                positions.push(gamma.clone());
            }
        }
        let occupied = image(&gamma);
        for v in members(bag & !occupied) {
            let free = alphabet.xs().find(|p| !gamma.contains_key(p)).expect("bag fits the reusable searchers");
            gamma.insert(free, v);
            positions.push(gamma.clone());
        }
    }
    let mut strategy = NsStrategy { alphabet, positions };
    let play = simulate_ns(&strategy, g)?;
    let first_clear = play.regions.iter().position(|&r| r == 0).ok_or_else(|| {
        Error::TheoremViolation("normal-form search strategy does not clear the graph".into())
    })?;
    strategy.positions.truncate(first_clear);
    let mut dbags: Vec<VSet> = bags.iter().map(|b| b | i_set).collect();
    if dbags.is_empty() {
        dbags.push(i_set);
    }
    let mut decomposition = RootedDecomposition::path(dbags, i_set);
    if let Exceptions::PerLeaf(map) = &mut decomposition.exceptions {
        map.retain(|_, s| *s != 0);
    }
    Ok(NsSolution { outcome: Outcome::PursuersWin, strategy: Some(strategy), exceptions: i_set, decomposition: Some(decomposition) })
}

pub(crate) fn subsets_of_size(set: VSet, size: usize) -> Vec<VSet> {
    let items: Vec<usize> = members(set).collect();
    let mut out = Vec::new();
    fn rec(items: &[usize], start: usize, left: usize, acc: VSet, out: &mut Vec<VSet>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..items.len() {
            if items.len() - i < left {
                break;
            }
            rec(items, i + 1, left - 1, acc | bit(items[i]), out);
        }
    }
    rec(&items, 0, size, 0, &mut out);
    out
}

/// Path decomposition read off the normal-form searcher strategy, if the searchers win.
pub fn ns_decomposition(g: &Graph, k1: usize, k2: usize) -> Result<Option<RootedDecomposition>> {
    Ok(solve_ns(g, k1, k2)?.decomposition)
}

/// Decides the node searching game by breadth-first search over searcher placements and
/// fugitive regions, without assuming any normal form. Stacked searchers are never useful and
/// are not generated.
pub fn solve_ns_direct(g: &Graph, k1: usize, k2: usize, max_moves: usize) -> Result<Outcome> {
    Alphabet::new(k1, k2)?;
    let all = g.vertices();
    if all == 0 {
        return Ok(Outcome::PursuersWin);
    }
    let start = (0 as VSet, 0 as VSet, all);
    let mut seen: HashSet<(VSet, VSet, VSet)> = HashSet::from([start]);
    let mut frontier = vec![start];
    for _ in 0..max_moves {
        let mut next = Vec::new();
        for &(xs, ys, region) in &frontier {
            let occupied = xs | ys;
            let mut moves: Vec<(VSet, VSet, VSet, Option<usize>)> = Vec::new();
            // (new xs before placing, new ys before placing, occupied after lifting, destination)
            for u in members(xs) {
                let lifted = occupied & !bit(u);
                moves.push((xs & !bit(u), ys, lifted, None));
                for w in members(all & !lifted & !bit(u)) {
                    moves.push((xs & !bit(u) | bit(w), ys, lifted, Some(w)));
                }
            }
            if (xs.count_ones() as usize) < k1 {
                for w in members(all & !occupied) {
                    moves.push((xs | bit(w), ys, occupied, Some(w)));
                }
            }
            if (ys.count_ones() as usize) < k2 {
                for w in members(all & !occupied) {
                    moves.push((xs, ys | bit(w), occupied, Some(w)));
                }
            }
            for (nx, ny, lifted, _) in moves {
                let spread = closure(g, region, lifted);
                let left = spread & !(nx | ny);
                if left == 0 {
                    return Ok(Outcome::PursuersWin);
                }
                let state = (nx, ny, left);
                if seen.insert(state) {
                    next.push(state);
                }
            }
        }
        if next.is_empty() {
            return Ok(Outcome::EvaderWins);
        }
        frontier = next;
    }
    Ok(Outcome::Inconclusive)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wins(g: &Graph, k1: usize, k2: usize) -> bool {
        solve_ns(g, k1, k2).unwrap().outcome == Outcome::PursuersWin
    }

    #[test]
    fn examples() {
        assert!(wins(&Graph::path(5), 2, 0));
        assert!(!wins(&Graph::path(5), 1, 0));
        let c4 = Graph::cycle(4);
        assert!(!wins(&c4, 2, 0));
        assert!(wins(&c4, 3, 0));
        assert!(wins(&c4, 2, 1));
        let k1 = solve_ns(&Graph::empty(1), 1, 0).unwrap();
        assert_eq!(k1.strategy.unwrap().positions.len(), 1);
    }

    #[test]
    fn direct_agrees() {
        let graphs = [Graph::path(4), Graph::cycle(4), Graph::complete(3), Graph::complete(4), Graph::cycle(5)];
        for g in &graphs {
            for (k1, k2) in [(1, 0), (2, 0), (1, 1), (0, 2), (2, 1)] {
                let direct = solve_ns_direct(g, k1, k2, 64).unwrap();
                assert_ne!(direct, Outcome::Inconclusive);
                assert_eq!(direct == Outcome::PursuersWin, wins(g, k1, k2), "{g:?} {k1} {k2}");
            }
        }
        assert_eq!(solve_ns_direct(&Graph::complete(2), 0, 2, 10).unwrap(), Outcome::PursuersWin);
        assert_eq!(solve_ns_direct(&Graph::complete(3), 0, 2, 10).unwrap(), Outcome::EvaderWins);
    }

    #[test]
    fn strategies_are_monotone_and_decompose() {
        use crate::decomp::verify_decomposition;
        let g = Graph::cycle(5);
        let sol = solve_ns(&g, 2, 1).unwrap();
        let play = simulate_ns(sol.strategy.as_ref().unwrap(), &g).unwrap();
        assert!(play.monotone && play.cleared);
        let d = sol.decomposition.unwrap();
        assert!(verify_decomposition(&d, &g, 2, 1, None).unwrap().ok);
    }

    #[test]
    fn lifting_the_separator_is_not_monotone() {
        let g = Graph::path(3);
        let al = Alphabet::raw(3, 0);
        let pos = |pairs: &[(Pebble, usize)]| pairs.iter().copied().collect::<Placement>();
        let s = NsStrategy {
            alphabet: al,
            positions: vec![
                pos(&[(Pebble::X(1), 1)]),
                pos(&[(Pebble::X(1), 1), (Pebble::X(2), 0)]),
                pos(&[(Pebble::X(2), 0)]),
                pos(&[(Pebble::X(1), 2), (Pebble::X(2), 0)]),
                pos(&[(Pebble::X(1), 2), (Pebble::X(2), 0), (Pebble::X(3), 1)]),
            ],
        };
        let play = simulate_ns(&s, &g).unwrap();
        assert!(play.cleared);
        assert!(!play.monotone);
    }

    #[test]
    fn pathwidth_values() {
        assert_eq!(pathwidth(&Graph::path(6)).unwrap(), Some(1));
        assert_eq!(pathwidth(&Graph::cycle(6)).unwrap(), Some(2));
        assert_eq!(pathwidth(&Graph::complete(4)).unwrap(), Some(3));
        assert_eq!(pathwidth(&Graph::empty(0)).unwrap(), None);
    }
}
