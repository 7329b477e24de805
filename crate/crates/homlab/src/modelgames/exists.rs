use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{Certificate, GameVerdict, PebblePairing, Reply, Typer, Winner};
use crate::error::{Error, Result};
use crate::graph::{Alphabet, Pebble, RelStructure};

const MAX_STATES: usize = 1 << 22;

/// Spoiler places `pebble` on `element`; each Duplicator answer either breaks the partial
/// homomorphism at once (`None`) or leads to a further node.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SpoilerNode {
    pub pebble: Pebble,
    pub element: usize,
    pub answers: Vec<(usize, Option<Box<SpoilerNode>>)>,
}

/// Positions encoded in mixed radix: each slot holds 0 for empty or `1 + a * |B| + b`.
struct Space<'a> {
    a: &'a RelStructure,
    b: &'a RelStructure,
    alphabet: Alphabet,
    radix: usize,
    total: usize,
}

impl Space<'_> {
    fn digit(&self, state: usize, slot: usize) -> usize {
        state / self.radix.pow(slot as u32) % self.radix
    }

    fn set(&self, state: usize, slot: usize, a: usize, b: usize) -> usize {
        let weight = self.radix.pow(slot as u32);
        state - self.digit(state, slot) * weight + (1 + a * self.b.n() + b) * weight
    }

    fn decode(&self, state: usize) -> PebblePairing {
        let slots = (0..self.alphabet.size())
            .map(|s| match self.digit(state, s) {
                0 => None,
                d => Some(((d - 1) / self.b.n(), (d - 1) % self.b.n())),
            })
            .collect();
        let y_used = self.alphabet.ys().enumerate().filter(|&(j, _)| self.digit(state, self.alphabet.k1 + j) != 0).fold(0, |m, (j, _)| m | (1 << j));
        PebblePairing { alphabet: self.alphabet, slots, y_used }
    }

    /// Slots Spoiler may move: every x, and y slots still empty.
    fn movable(&self, state: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.alphabet.size()).filter(move |&s| s < self.alphabet.k1 || self.digit(state, s) == 0)
    }
}

/// Round-based existential game from the empty position. With `rounds = None` the unbounded game
/// is decided as a greatest fixpoint; otherwise Duplicator must survive `rounds` rounds.
pub fn solve_exists_pebble(a: &RelStructure, b: &RelStructure, k1: usize, k2: usize, rounds: Option<usize>) -> Result<GameVerdict> {
    let alphabet = Alphabet::new(k1, k2)?;
    let typer = Typer::new(a, b, alphabet.size()).ok_or_else(|| Error::invalid("relation arities disagree"))?;
    let radix = a.n() * b.n() + 1;
    let total = (0..alphabet.size()).try_fold(1usize, |acc, _| acc.checked_mul(radix).filter(|&t| t <= MAX_STATES)).ok_or(Error::Budget)?;
    let space = Space { a, b, alphabet, radix, total };
    if b.n() == 0 {
        return Ok(if a.n() == 0 { duplicator_trivial() } else { spoiler_immediate(alphabet, rounds) });
    }
    let levels = survival_levels(&space, &typer, rounds);
    if levels[0] == usize::MAX {
        return Ok(GameVerdict {
            winner: Winner::Duplicator,
            rounds: None,
            up_to: None,
            certificate: Certificate::DuplicatorReplies(duplicator_replies(&space, &levels, rounds)),
        });
    }
    let tree = spoiler_tree(&space, &levels, 0);
    Ok(GameVerdict { winner: Winner::Spoiler, rounds: Some(levels[0]), up_to: None, certificate: Certificate::SpoilerTree(tree) })
}

fn duplicator_trivial() -> GameVerdict {
    GameVerdict { winner: Winner::Duplicator, rounds: None, up_to: None, certificate: Certificate::DuplicatorReplies(Vec::new()) }
}

fn spoiler_immediate(alphabet: Alphabet, rounds: Option<usize>) -> GameVerdict {
    if rounds == Some(0) {
        return duplicator_trivial();
    }
    let node = SpoilerNode { pebble: alphabet.pebble(0), element: 0, answers: Vec::new() };
    GameVerdict { winner: Winner::Spoiler, rounds: Some(1), up_to: None, certificate: Certificate::SpoilerTree(node) }
}

/// `levels[s]` = number of rounds Duplicator survives from position `s` (`usize::MAX` for
/// forever), capped at `rounds` when given.
fn survival_levels(space: &Space, typer: &Typer, rounds: Option<usize>) -> Vec<usize> {
    let mut level: Vec<usize> = (0..space.total)
        .map(|s| {
            let pairing = space.decode(s);
            let left: Vec<Option<usize>> = pairing.slots.iter().map(|p| p.map(|x| x.0)).collect();
            let right: Vec<Option<usize>> = pairing.slots.iter().map(|p| p.map(|x| x.1)).collect();
            if typer.consistent(space.a, space.b, &left, &right, false) {
                usize::MAX
            } else {
                0
            }
        })
        .collect();
    // After iteration r, positions still at MAX survive at least r + 1 rounds.
    let cap = rounds.unwrap_or(usize::MAX);
    let mut r = 0;
    while r < cap {
        let alive = |s: usize, lv: &[usize]| lv[s] == usize::MAX;
        let mut dropped = Vec::new();
        for s in (0..space.total).filter(|&s| alive(s, &level)) {
            let escapes = space.movable(s).any(|slot| (0..space.a.n()).any(|x| (0..space.b.n()).all(|y| !alive(space.set(s, slot, x, y), &level))));
            if escapes {
                dropped.push(s);
            }
        }
        if dropped.is_empty() {
            break;
        }
        for s in dropped {
            level[s] = r + 1;
        }
        r += 1;
    }
    level
}

fn spoiler_tree(space: &Space, levels: &[usize], state: usize) -> SpoilerNode {
    let here = levels[state];
    for slot in space.movable(state) {
        for x in 0..space.a.n() {
            let children: Vec<usize> = (0..space.b.n()).map(|y| space.set(state, slot, x, y)).collect();
            if children.iter().all(|&c| levels[c] < here) {
                let answers = children
                    .iter()
                    .enumerate()
                    .map(|(y, &c)| (y, (levels[c] > 0).then(|| Box::new(spoiler_tree(space, levels, c)))))
                    .collect();
                return SpoilerNode { pebble: space.alphabet.pebble(slot), element: x, answers };
            }
        }
    }
    unreachable!("a position below the survival cap always has a winning Spoiler move")
}

fn duplicator_replies(space: &Space, levels: &[usize], rounds: Option<usize>) -> Vec<Reply> {
    let mut out = Vec::new();
    let mut explored: HashMap<usize, usize> = HashMap::new();
    let mut frontier = vec![(0usize, rounds.unwrap_or(usize::MAX))];
    while let Some((state, left)) = frontier.pop() {
        if left == 0 || explored.get(&state).is_some_and(|&l| l >= left) {
            continue;
        }
        let first = explored.insert(state, left).is_none();
        let position = space.decode(state);
        for slot in space.movable(state) {
            for x in 0..space.a.n() {
                let y = (0..space.b.n()).max_by_key(|&y| levels[space.set(state, slot, x, y)]).expect("nonempty");
                let next = space.set(state, slot, x, y);
                if first {
                    out.push(Reply { position: position.clone(), pebble: space.alphabet.pebble(slot), spoiler: x, duplicator: y });
                }
                frontier.push((next, left - 1));
            }
        }
    }
    out
}

/// Replays a certificate produced by [`solve_exists_pebble`] against the game rules.
pub fn replay(a: &RelStructure, b: &RelStructure, verdict: &GameVerdict, k1: usize, k2: usize, rounds: Option<usize>) -> bool {
    let alphabet = Alphabet::raw(k1, k2);
    let Some(typer) = Typer::new(a, b, alphabet.size()) else { return false };
    let ok = |m: &PebblePairing| {
        let left: Vec<Option<usize>> = m.slots.iter().map(|p| p.map(|x| x.0)).collect();
        let right: Vec<Option<usize>> = m.slots.iter().map(|p| p.map(|x| x.1)).collect();
        typer.consistent(a, b, &left, &right, false)
    };
    match (&verdict.certificate, verdict.winner) {
        (Certificate::SpoilerTree(node), Winner::Spoiler) => {
            fn walk(node: &SpoilerNode, at: &PebblePairing, depth: usize, bn: usize, ok: &dyn Fn(&PebblePairing) -> bool) -> Option<usize> {
                let complete = node.answers.len() == bn && node.answers.iter().enumerate().all(|(i, (y, _))| i == *y);
                if depth == 0 || !at.can_move(node.pebble) || !complete {
                    return None;
                }
                let mut deepest = 1;
                for (y, sub) in &node.answers {
                    let next = at.place(node.pebble, node.element, *y).ok()?;
                    match sub {
                        None if !ok(&next) => {}
                        None => return None,
                        Some(child) => deepest = deepest.max(1 + walk(child, &next, depth - 1, bn, ok)?),
                    }
                }
                Some(deepest)
            }
            let budget = verdict.rounds.unwrap_or(0);
            walk(node, &PebblePairing::empty(alphabet), budget, b.n(), &ok).is_some_and(|d| d <= budget && rounds.is_none_or(|q| d <= q))
        }
        (Certificate::DuplicatorReplies(replies), Winner::Duplicator) => {
            let table: BTreeMap<(Vec<Option<(usize, usize)>>, Pebble, usize), usize> =
                replies.iter().map(|r| ((r.position.slots.clone(), r.pebble, r.spoiler), r.duplicator)).collect();
            if b.n() == 0 {
                return a.n() == 0 || rounds == Some(0);
            }
            let mut explored: HashMap<Vec<Option<(usize, usize)>>, usize> = HashMap::new();
            let mut frontier = vec![(PebblePairing::empty(alphabet), rounds.unwrap_or(usize::MAX))];
            while let Some((at, left)) = frontier.pop() {
                if !ok(&at) {
                    return false;
                }
                if left == 0 || explored.get(&at.slots).is_some_and(|&l| l >= left) {
                    continue;
                }
                explored.insert(at.slots.clone(), left);
                for p in at.legal_pebbles() {
                    for x in 0..a.n() {
                        let Some(&y) = table.get(&(at.slots.clone(), p, x)) else { return false };
                        frontier.push((at.place(p, x, y).expect("legal"), left - 1));
                    }
                }
            }
            true
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn rs(g: &Graph) -> RelStructure {
        RelStructure::from_graph(g)
    }

    #[test]
    fn triangle_into_edge() {
        let k3 = rs(&Graph::complete(3));
        let k2 = rs(&Graph::complete(2));
        let two = solve_exists_pebble(&k3, &k2, 2, 0, None).unwrap();
        assert_eq!(two.winner, Winner::Duplicator);
        assert!(replay(&k3, &k2, &two, 2, 0, None));
        let three = solve_exists_pebble(&k3, &k2, 3, 0, None).unwrap();
        assert_eq!((three.winner, three.rounds), (Winner::Spoiler, Some(3)));
        assert!(replay(&k3, &k2, &three, 3, 0, None));
        let ys = solve_exists_pebble(&k3, &k2, 0, 3, None).unwrap();
        assert_eq!((ys.winner, ys.rounds), (Winner::Spoiler, Some(3)));
        assert!(replay(&k3, &k2, &ys, 0, 3, None));
        let short = solve_exists_pebble(&k3, &k2, 3, 0, Some(2)).unwrap();
        assert_eq!(short.winner, Winner::Duplicator);
        assert!(replay(&k3, &k2, &short, 3, 0, Some(2)));
    }

    #[test]
    fn homomorphism_means_duplicator() {
        let k2 = rs(&Graph::complete(2));
        let k3 = rs(&Graph::complete(3));
        let c5 = rs(&Graph::cycle(5));
        for (k1, k2p) in [(1, 0), (2, 1), (0, 2), (3, 0)] {
            assert_eq!(solve_exists_pebble(&k2, &k3, k1, k2p, None).unwrap().winner, Winner::Duplicator);
            assert_eq!(solve_exists_pebble(&c5, &c5, k1, k2p, Some(3)).unwrap().winner, Winner::Duplicator);
        }
    }

    #[test]
    fn odd_cycle_into_edge() {
        let c5 = rs(&Graph::cycle(5));
        let k2 = rs(&Graph::complete(2));
        assert_eq!(solve_exists_pebble(&c5, &k2, 2, 0, None).unwrap().winner, Winner::Duplicator);
        let three = solve_exists_pebble(&c5, &k2, 3, 0, None).unwrap();
        assert_eq!(three.winner, Winner::Spoiler);
        assert!(replay(&c5, &k2, &three, 3, 0, None));
        let tampered = GameVerdict { rounds: Some(1), ..three };
        assert!(!replay(&c5, &k2, &tampered, 3, 0, None));
    }
}
