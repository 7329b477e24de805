use std::collections::{BTreeSet, HashMap};

use super::{Certificate, GameVerdict, Typer, Winner};
use crate::error::{Error, Result};
use crate::graph::{Alphabet, Pebble, RelStructure};

const MAX_ENTRIES: usize = 1 << 22;

type Positions = Vec<Option<usize>>;

/// Single-round all-in-one game against Spoiler sequences of length at most `n_max`.
///
/// Hom mode: Spoiler announces pebbles and elements, Duplicator answers with a sequence of its
/// own. Bijective mode: Spoiler announces pebbles, Duplicator fixes a bijection of `n`-tuples.
/// A Spoiler witness settles the unbounded game; a Duplicator verdict carries `up_to = n_max`.
pub fn solve_all_in_one(a: &RelStructure, b: &RelStructure, k1: usize, k2: usize, n_max: usize, bijective: bool) -> Result<GameVerdict> {
    let alphabet = Alphabet::new(k1, k2)?;
    if n_max == 0 {
        return Err(Error::invalid("sequence bound must be at least 1"));
    }
    if bijective {
        let typer = Typer::symmetric(a, b, alphabet.size())?;
        Bijective { a, b, typer, alphabet, n_max, explored: 0 }.solve()
    } else {
        let typer = Typer::new(a, b, alphabet.size()).ok_or_else(|| Error::invalid("relation arities disagree"))?;
        Existential { a, b, typer, alphabet, memo: HashMap::new(), explored: 0 }.solve(n_max)
    }
}

struct Existential<'a> {
    a: &'a RelStructure,
    b: &'a RelStructure,
    typer: Typer,
    alphabet: Alphabet,
    /// Largest remaining length already searched without a witness.
    memo: HashMap<(Positions, BTreeSet<Positions>), usize>,
    explored: usize,
}

impl Existential<'_> {
    fn solve(mut self, n_max: usize) -> Result<GameVerdict> {
        let empty: Positions = vec![None; self.alphabet.size()];
        for len in 1..=n_max {
            self.memo.clear();
            let mut seq = Vec::new();
            let answers = BTreeSet::from([empty.clone()]);
            if self.search(&empty, 0, &answers, len, &mut seq)? {
                let (pebbles, elements) = seq.into_iter().unzip();
                return Ok(GameVerdict {
                    winner: Winner::Spoiler,
                    rounds: Some(len),
                    up_to: None,
                    certificate: Certificate::Witness { pebbles, elements, in_first: true },
                });
            }
        }
        Ok(GameVerdict { winner: Winner::Duplicator, rounds: None, up_to: Some(n_max), certificate: Certificate::Exhausted { sequences: self.explored } })
    }

    /// `answers` holds every Duplicator position consistent with all prefixes so far.
    fn search(&mut self, at: &Positions, y_used: u64, answers: &BTreeSet<Positions>, left: usize, seq: &mut Vec<(Pebble, usize)>) -> Result<bool> {
        if answers.is_empty() {
            return Ok(true);
        }
        if left == 0 {
            return Ok(false);
        }
        let key = (at.clone(), answers.clone());
        if self.memo.get(&key).is_some_and(|&l| l >= left) {
            return Ok(false);
        }
        self.explored += 1;
        if self.explored > MAX_ENTRIES {
            return Err(Error::Budget);
        }
        for slot in 0..self.alphabet.size() {
            let p = self.alphabet.pebble(slot);
            if p.is_y() && y_used & (1 << (slot - self.alphabet.k1)) != 0 {
                continue;
            }
            let used = if p.is_y() { y_used | (1 << (slot - self.alphabet.k1)) } else { y_used };
            for x in 0..self.a.n() {
                let mut next = at.clone();
                next[slot] = Some(x);
                let mut reply = BTreeSet::new();
                for d in answers {
                    for y in 0..self.b.n() {
                        let mut e = d.clone();
                        e[slot] = Some(y);
                        if self.typer.consistent(self.a, self.b, &next, &e, false) {
                            reply.insert(e);
                        }
                    }
                }
                seq.push((p, x));
                if self.search(&next, used, &reply, left - 1, seq)? {
                    return Ok(true);
                }
                seq.pop();
            }
        }
        self.memo.insert(key, left);
        Ok(false)
    }
}

struct Bijective<'a> {
    a: &'a RelStructure,
    b: &'a RelStructure,
    typer: Typer,
    alphabet: Alphabet,
    n_max: usize,
    explored: usize,
}

/// Tuples grouped by (history of atomic types, current positions): count and one representative.
type Layer = HashMap<(usize, Positions), (u128, Vec<usize>)>;

struct Witness {
    pebbles: Vec<Pebble>,
    tuple: Vec<usize>,
    in_first: bool,
}

impl Bijective<'_> {
    fn solve(mut self) -> Result<GameVerdict> {
        if self.a.n() != self.b.n() {
            return Ok(GameVerdict { winner: Winner::Spoiler, rounds: Some(0), up_to: None, certificate: Certificate::SizeMismatch });
        }
        let empty: Positions = vec![None; self.alphabet.size()];
        let start: Layer = HashMap::from([((0, empty), (1, Vec::new()))]);
        let mut interner: HashMap<(usize, Vec<u8>), usize> = HashMap::new();
        let mut best: Option<Witness> = None;
        let mut seq = Vec::new();
        self.extend(&start, &start, &mut seq, &mut interner, &mut best)?;
        Ok(match best {
            Some(w) => GameVerdict {
                winner: Winner::Spoiler,
                rounds: Some(w.pebbles.len()),
                up_to: None,
                certificate: Certificate::Witness { pebbles: w.pebbles, elements: w.tuple, in_first: w.in_first },
            },
            None => GameVerdict { winner: Winner::Duplicator, rounds: None, up_to: Some(self.n_max), certificate: Certificate::Exhausted { sequences: self.explored } },
        })
    }

    /// Pebble sequences in canonical order: a new x is always the lowest unused one, y pebbles
    /// are taken in index order and never repeated.
    fn next_pebbles(&self, seq: &[Pebble]) -> Vec<Pebble> {
        let used_x = seq.iter().filter(|p| p.is_x()).map(|p| p.index()).max().unwrap_or(0);
        let used_y = seq.iter().filter(|p| p.is_y()).count();
        let mut out: Vec<Pebble> = (1..=(used_x + 1).min(self.alphabet.k1)).map(Pebble::X).collect();
        if used_y < self.alphabet.k2 {
            out.push(Pebble::Y(used_y + 1));
        }
        out
    }

    fn step(&self, layer: &Layer, s: &RelStructure, first: bool, slot: usize, interner: &mut HashMap<(usize, Vec<u8>), usize>) -> Result<Layer> {
        let mut next: Layer = HashMap::new();
        for ((history, pos), (count, repr)) in layer {
            for v in 0..s.n() {
                let mut p = pos.clone();
                p[slot] = Some(v);
                let ty = self.typer.atomic_type(s, &p, first);
                let fresh = interner.len() + 1;
                let h = *interner.entry((*history, ty)).or_insert(fresh);
                let entry = next.entry((h, p)).or_insert_with(|| (0, [repr.clone(), vec![v]].concat()));
                entry.0 += count;
            }
        }
        if next.len() > MAX_ENTRIES {
            return Err(Error::Budget);
        }
        Ok(next)
    }

    fn totals(layer: &Layer) -> HashMap<usize, (u128, Vec<usize>)> {
        let mut out: HashMap<usize, (u128, Vec<usize>)> = HashMap::new();
        for ((h, _), (c, repr)) in layer {
            let e = out.entry(*h).or_insert_with(|| (0, repr.clone()));
            e.0 += c;
        }
        out
    }

    fn extend(&mut self, left: &Layer, right: &Layer, seq: &mut Vec<Pebble>, interner: &mut HashMap<(usize, Vec<u8>), usize>, best: &mut Option<Witness>) -> Result<()> {
        let limit = best.as_ref().map_or(self.n_max, |w| w.pebbles.len() - 1);
        if seq.len() >= limit {
            return Ok(());
        }
        for p in self.next_pebbles(seq) {
            let slot = self.alphabet.slot(p).expect("alphabet pebble");
            self.explored += 1;
            let l = self.step(left, self.a, true, slot, interner)?;
            let r = self.step(right, self.b, false, slot, interner)?;
            seq.push(p);
            let (tl, tr) = (Self::totals(&l), Self::totals(&r));
            let differing = tl.iter().find(|(h, (c, _))| tr.get(h).map_or(0, |x| x.0) != *c).map(|(_, (_, t))| (t.clone(), true)).or_else(|| {
                tr.iter().find(|(h, (c, _))| tl.get(h).map_or(0, |x| x.0) != *c).map(|(_, (_, t))| (t.clone(), false))
            });
            if let Some((tuple, in_first)) = differing {
                if best.as_ref().is_none_or(|w| w.pebbles.len() > seq.len()) {
                    *best = Some(Witness { pebbles: seq.clone(), tuple, in_first });
                }
            } else {
                self.extend(&l, &r, seq, interner, best)?;
            }
            seq.pop();
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfi::{cfi_even, cfi_odd};
    use crate::graph::Graph;

    fn rs(g: &Graph) -> RelStructure {
        RelStructure::from_graph(g)
    }

    /// No Duplicator sequence in `b` keeps every prefix a partial homomorphism.
    fn no_answer(a: &RelStructure, b: &RelStructure, alphabet: Alphabet, pebbles: &[Pebble], elements: &[usize]) -> bool {
        let typer = Typer::new(a, b, alphabet.size()).unwrap();
        let n = pebbles.len();
        let total = b.n().pow(n as u32);
        (0..total).all(|code| {
            let mut left: Positions = vec![None; alphabet.size()];
            let mut right = left.clone();
            let mut c = code;
            (0..n).any(|i| {
                let slot = alphabet.slot(pebbles[i]).unwrap();
                left[slot] = Some(elements[i]);
                right[slot] = Some(c % b.n());
                c /= b.n();
                !typer.consistent(a, b, &left, &right, false)
            })
        })
    }

    #[test]
    fn triangle_witness() {
        let k3 = rs(&Graph::complete(3));
        let k2 = rs(&Graph::complete(2));
        let v = solve_all_in_one(&k3, &k2, 0, 3, 4, false).unwrap();
        assert_eq!((v.winner, v.rounds), (Winner::Spoiler, Some(3)));
        let Certificate::Witness { pebbles, elements, .. } = &v.certificate else { panic!("witness expected") };
        assert!(no_answer(&k3, &k2, Alphabet::raw(0, 3), pebbles, elements));
        let two = solve_all_in_one(&k3, &k2, 2, 0, 5, false).unwrap();
        assert_eq!((two.winner, two.up_to), (Winner::Duplicator, Some(5)));
    }

    #[test]
    fn homomorphism_blocks_witnesses() {
        let c4 = rs(&Graph::cycle(4));
        let k2 = rs(&Graph::complete(2));
        assert_eq!(solve_all_in_one(&c4, &k2, 2, 1, 4, false).unwrap().winner, Winner::Duplicator);
    }

    #[test]
    fn bijective_counts() {
        let c6 = rs(&Graph::cycle(6));
        let two_c3 = rs(&Graph::cycle(3).disjoint_union(&Graph::cycle(3)));
        assert_eq!(solve_all_in_one(&c6, &c6, 2, 1, 4, true).unwrap().winner, Winner::Duplicator);
        assert_eq!(solve_all_in_one(&c6, &two_c3, 2, 0, 5, true).unwrap().winner, Winner::Duplicator);
        let v = solve_all_in_one(&c6, &two_c3, 0, 3, 3, true).unwrap();
        assert_eq!(v.winner, Winner::Spoiler);
        let star = rs(&Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap());
        let p4 = rs(&Graph::path(4));
        assert_eq!(solve_all_in_one(&star, &p4, 2, 0, 2, true).unwrap().winner, Winner::Duplicator);
        assert_eq!(solve_all_in_one(&star, &p4, 2, 0, 3, true).unwrap().rounds, Some(3));
        assert_eq!(solve_all_in_one(&star, &p4, 1, 0, 4, true).unwrap().winner, Winner::Duplicator);
    }

    #[test]
    fn cfi_pair_survives_two_reusable_pebbles() {
        let c4 = Graph::cycle(4);
        let x = rs(&cfi_even(&c4).unwrap().graph);
        let xt = rs(&cfi_odd(&c4).unwrap().graph);
        let v = solve_all_in_one(&x, &xt, 2, 0, 6, true).unwrap();
        assert_eq!((v.winner, v.up_to), (Winner::Duplicator, Some(6)));
    }
}
