//! Spoiler-Duplicator games with `k1` reusable and `k2` one-shot pebble pairs.

mod allinone;
mod bijective;
mod exists;

pub use allinone::solve_all_in_one;
pub use bijective::solve_bijective_pebble;
pub use exists::{replay, solve_exists_pebble, SpoilerNode};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Alphabet, Pebble, RelStructure};

/// Pebble pairs on the two structures. A slot is either empty on both sides or holds `(a, b)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct PebblePairing {
    pub alphabet: Alphabet,
    pub slots: Vec<Option<(usize, usize)>>,
    /// Bit `j` set once `y_{j+1}` has been placed.
    pub y_used: u64,
}

impl PebblePairing {
    pub fn empty(alphabet: Alphabet) -> PebblePairing {
        PebblePairing { alphabet, slots: vec![None; alphabet.size()], y_used: 0 }
    }

    pub fn get(&self, p: Pebble) -> Option<(usize, usize)> {
        self.alphabet.slot(p).and_then(|s| self.slots[s])
    }

    /// Whether `p` may be picked up and placed now.
    pub fn can_move(&self, p: Pebble) -> bool {
        match p {
            Pebble::X(_) => self.alphabet.contains(p),
            Pebble::Y(j) => self.alphabet.contains(p) && self.y_used & (1 << (j - 1)) == 0,
        }
    }

    pub fn place(&self, p: Pebble, a: usize, b: usize) -> Result<PebblePairing> {
        if !self.can_move(p) {
            return Err(Error::invalid(format!("pebble {p} cannot be placed again")));
        }
        let mut next = self.clone();
        next.slots[self.alphabet.slot(p).expect("checked")] = Some((a, b));
        if let Pebble::Y(j) = p {
            next.y_used |= 1 << (j - 1);
        }
        Ok(next)
    }

    pub fn legal_pebbles(&self) -> Vec<Pebble> {
        self.alphabet.pebbles().filter(|&p| self.can_move(p)).collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Winner {
    Spoiler,
    Duplicator,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Certificate {
    /// Spoiler strategy tree for the round-based existential game.
    SpoilerTree(SpoilerNode),
    /// Duplicator replies for every Spoiler move from every position reachable under them.
    DuplicatorReplies(Vec<Reply>),
    /// Spoiler line in the bijective game: at each position a pebble and a set of elements of
    /// the first structure whose compatible partners are too few for any bijection.
    HallLine(Vec<HallStep>),
    /// A Spoiler sequence with no valid Duplicator answer. `elements` is the Spoiler tuple in
    /// the existential variant and a tuple whose type count differs in the bijective variant.
    Witness { pebbles: Vec<Pebble>, elements: Vec<usize>, in_first: bool },
    /// Duplicator survived every Spoiler sequence up to the bound.
    Exhausted { sequences: usize },
    /// Sizes differ, so no bijection exists.
    SizeMismatch,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Reply {
    pub position: PebblePairing,
    pub pebble: Pebble,
    pub spoiler: usize,
    pub duplicator: usize,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct HallStep {
    pub position: PebblePairing,
    pub pebble: Pebble,
    pub deficient: Vec<usize>,
    pub partners: Vec<usize>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GameVerdict {
    pub winner: Winner,
    /// Rounds Spoiler needs, or sequence length for the all-in-one games.
    pub rounds: Option<usize>,
    /// Set when a Duplicator verdict only covers Spoiler sequences up to this length.
    pub up_to: Option<usize>,
    pub certificate: Certificate,
}

/// Whether the pebbled elements induce a partial homomorphism `a ⇀ b` (or a partial
/// isomorphism when `iso` is set).
pub fn is_partial_hom(a: &RelStructure, b: &RelStructure, m: &PebblePairing, iso: bool) -> bool {
    let left: Vec<Option<usize>> = m.slots.iter().map(|s| s.map(|p| p.0)).collect();
    let right: Vec<Option<usize>> = m.slots.iter().map(|s| s.map(|p| p.1)).collect();
    Typer::new(a, b, m.slots.len()).map(|t| t.consistent(a, b, &left, &right, iso)).unwrap_or(false)
}

/// Enumerates slot tuples for each relation once, so position types are cheap to compare.
pub(crate) struct Typer {
    slots: usize,
    /// Relation index in the first structure, in the second, and all slot tuples of its arity.
    rels: Vec<(usize, Option<usize>, Vec<Vec<usize>>)>,
}

impl Typer {
    pub(crate) fn new(a: &RelStructure, b: &RelStructure, slots: usize) -> Option<Typer> {
        let mut rels = Vec::new();
        for (i, r) in a.relations().iter().enumerate() {
            let j = b.relations().iter().position(|s| s.name == r.name);
            if let Some(j) = j {
                if b.relations()[j].arity != r.arity {
                    return None;
                }
            }
            let mut tuples = vec![Vec::new()];
            for _ in 0..r.arity {
                tuples = tuples.into_iter().flat_map(|t| (0..slots).map(move |s| [t.clone(), vec![s]].concat())).collect();
            }
            rels.push((i, j, tuples));
        }
        Some(Typer { slots, rels })
    }

    /// Requires the same signature in both directions.
    pub(crate) fn symmetric(a: &RelStructure, b: &RelStructure, slots: usize) -> Result<Typer> {
        if !a.same_signature(b) {
            return Err(Error::invalid("structures have different signatures"));
        }
        Ok(Typer::new(a, b, slots).expect("same signature"))
    }

    /// Atomic type of a position: placement pattern, equalities and relation memberships.
    pub(crate) fn atomic_type(&self, s: &RelStructure, pos: &[Option<usize>], first: bool) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.slots * self.slots);
        for i in 0..self.slots {
            for j in i..self.slots {
                out.push(match (pos[i], pos[j]) {
                    (Some(u), Some(v)) => u8::from(u == v),
                    _ => 2,
                });
            }
        }
        for (ia, ib, tuples) in &self.rels {
            let idx = if first { Some(*ia) } else { *ib };
            for t in tuples {
                let vals: Option<Vec<usize>> = t.iter().map(|&s| pos[s]).collect();
                out.push(match (vals, idx) {
                    (Some(v), Some(r)) => u8::from(s.holds(r, &v)),
                    (Some(_), None) => 0,
                    (None, _) => 2,
                });
            }
        }
        out
    }

    pub(crate) fn consistent(&self, a: &RelStructure, b: &RelStructure, left: &[Option<usize>], right: &[Option<usize>], iso: bool) -> bool {
        if left.iter().zip(right).any(|(l, r)| l.is_some() != r.is_some()) {
            return false;
        }
        if iso {
            return self.atomic_type(a, left, true) == self.atomic_type(b, right, false);
        }
        for i in 0..self.slots {
            for j in i + 1..self.slots {
                if let (Some(u), Some(v), Some(p), Some(q)) = (left[i], left[j], right[i], right[j]) {
                    if u == v && p != q {
                        return false;
                    }
                }
            }
        }
        for (ia, ib, tuples) in &self.rels {
            for t in tuples {
                let Some(va) = t.iter().map(|&s| left[s]).collect::<Option<Vec<_>>>() else { continue };
                if a.holds(*ia, &va) {
                    let vb: Vec<usize> = t.iter().map(|&s| right[s].expect("same domain")).collect();
                    if !ib.is_some_and(|r| b.holds(r, &vb)) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Perfect matching in a square bipartite relation given as rows of bitmasks; on failure returns
/// a deficient left set and its neighbourhood.
pub(crate) fn perfect_matching(rows: &[u64]) -> std::result::Result<Vec<usize>, (u64, u64)> {
    let n = rows.len();
    let mut owner = vec![usize::MAX; n];
    for left in 0..n {
        let mut seen = 0u64;
        if !augment(rows, left, &mut owner, &mut seen) {
            let mut reach = 1u64 << left;
            loop {
                let grown = crate::graph::members(reach).fold(0, |acc, l| acc | rows[l]);
                let new_reach = crate::graph::members(grown).filter(|&r| owner[r] != usize::MAX).fold(reach, |acc, r| acc | (1 << owner[r]));
                if new_reach == reach {
                    return Err((reach, grown));
                }
                reach = new_reach;
            }
        }
    }
    let mut assignment = vec![0; n];
    for (right, &left) in owner.iter().enumerate() {
        assignment[left] = right;
    }
    Ok(assignment)
}

fn augment(rows: &[u64], left: usize, owner: &mut [usize], seen: &mut u64) -> bool {
    for right in crate::graph::members(rows[left] & !*seen) {
        *seen |= 1 << right;
        if owner[right] == usize::MAX || augment(rows, owner[right], owner, seen) {
            owner[right] = left;
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn pairing(k1: usize, k2: usize, placed: &[(Pebble, usize, usize)]) -> PebblePairing {
        placed.iter().fold(PebblePairing::empty(Alphabet::raw(k1, k2)), |m, &(p, a, b)| m.place(p, a, b).unwrap())
    }

    #[test]
    fn partial_hom_examples() {
        let k3 = RelStructure::from_graph(&Graph::complete(3));
        let k2 = RelStructure::from_graph(&Graph::complete(2));
        assert!(is_partial_hom(&k3, &k2, &PebblePairing::empty(Alphabet::raw(2, 1)), false));
        let edge = pairing(3, 0, &[(Pebble::X(1), 0, 0), (Pebble::X(2), 1, 1)]);
        assert!(is_partial_hom(&k3, &k2, &edge, false));
        let all = pairing(3, 0, &[(Pebble::X(1), 0, 0), (Pebble::X(2), 1, 1), (Pebble::X(3), 2, 0)]);
        assert!(!is_partial_hom(&k3, &k2, &all, false));
        let collapse = pairing(2, 0, &[(Pebble::X(1), 0, 0), (Pebble::X(2), 0, 1)]);
        assert!(!is_partial_hom(&k3, &k2, &collapse, false));
        let merge = pairing(2, 0, &[(Pebble::X(1), 0, 0), (Pebble::X(2), 1, 0)]);
        assert!(!is_partial_hom(&k3, &k3, &merge, false));
        let p3 = RelStructure::from_graph(&Graph::path(3));
        let non_edge = pairing(2, 0, &[(Pebble::X(1), 0, 0), (Pebble::X(2), 2, 1)]);
        assert!(is_partial_hom(&p3, &k3, &non_edge, false));
        assert!(!is_partial_hom(&p3, &k3, &non_edge, true));
    }

    #[test]
    fn y_pebbles_are_one_shot() {
        let m = pairing(1, 1, &[(Pebble::Y(1), 0, 0)]);
        assert!(!m.can_move(Pebble::Y(1)));
        assert!(m.place(Pebble::Y(1), 1, 1).is_err());
        assert_eq!(m.legal_pebbles(), vec![Pebble::X(1)]);
    }

    #[test]
    fn hall_sets() {
        assert_eq!(perfect_matching(&[0b10, 0b01]).unwrap(), vec![1, 0]);
        let (left, right) = perfect_matching(&[0b01, 0b01, 0b110]).unwrap_err();
        assert!(left.count_ones() > (right & 0b111).count_ones());
    }
}
