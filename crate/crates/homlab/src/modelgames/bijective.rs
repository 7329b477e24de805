use std::collections::HashMap;

use super::{perfect_matching, Certificate, GameVerdict, HallStep, PebblePairing, Winner};
use crate::error::{Error, Result};
use crate::graph::{members, Alphabet, Graph};

const MAX_MEMO: usize = 1 << 23;

/// Position key: x pairs sorted (x pebbles are interchangeable), y slots kept in place.
type Key = (Vec<Option<(u8, u8)>>, usize);

struct Solver<'a> {
    a: &'a Graph,
    b: &'a Graph,
    alphabet: Alphabet,
    memo: HashMap<Key, bool>,
}

impl Solver<'_> {
    fn key(&self, m: &PebblePairing, rounds: usize) -> Key {
        let mut slots: Vec<Option<(u8, u8)>> = m.slots.iter().map(|s| s.map(|(x, y)| (x as u8, y as u8))).collect();
        slots[..self.alphabet.k1].sort_unstable_by_key(|s| s.map_or((u8::MAX, u8::MAX), |p| p));
        (slots, rounds)
    }

    fn partial_iso(&self, m: &PebblePairing) -> bool {
        let placed: Vec<(usize, usize)> = m.slots.iter().flatten().copied().collect();
        placed.iter().enumerate().all(|(i, &(u, p))| {
            placed[i + 1..].iter().all(|&(v, q)| (u == v) == (p == q) && self.a.has_edge(u, v) == self.b.has_edge(p, q))
        })
    }

    /// Compatibility rows for moving `pebble`: bit `b` of row `a` is set when Duplicator survives
    /// `rounds - 1` more rounds after the pair `(a, b)`.
    fn rows(&mut self, m: &PebblePairing, pebble: crate::graph::Pebble, rounds: usize) -> Result<Vec<u64>> {
        let mut rows = vec![0u64; self.a.n()];
        for (x, row) in rows.iter_mut().enumerate() {
            for y in 0..self.b.n() {
                if self.wins(&m.place(pebble, x, y)?, rounds - 1)? {
                    *row |= 1 << y;
                }
            }
        }
        Ok(rows)
    }

    fn wins(&mut self, m: &PebblePairing, rounds: usize) -> Result<bool> {
        if !self.partial_iso(m) {
            return Ok(false);
        }
        if rounds == 0 {
            return Ok(true);
        }
        let key = self.key(m, rounds);
        if let Some(&w) = self.memo.get(&key) {
            return Ok(w);
        }
        let mut result = true;
        for p in m.legal_pebbles() {
            let rows = self.rows(m, p, rounds)?;
            if perfect_matching(&rows).is_err() {
                result = false;
                break;
            }
        }
        if self.memo.len() >= MAX_MEMO {
            return Err(Error::Budget);
        }
        self.memo.insert(key, result);
        Ok(result)
    }

    /// Follows one line of a Spoiler win: the breaking pebble, a Hall-deficient set and a pair
    /// Duplicator's bijection is forced to use.
    fn hall_line(&mut self, start: PebblePairing, mut rounds: usize) -> Result<Vec<HallStep>> {
        let mut line = Vec::new();
        let mut at = start;
        while rounds > 0 && self.partial_iso(&at) {
            let mut step = None;
            for p in at.legal_pebbles() {
                let rows = self.rows(&at, p, rounds)?;
                if let Err((deficient, partners)) = perfect_matching(&rows) {
                    step = Some((p, deficient, partners));
                    break;
                }
            }
            let Some((p, deficient, partners)) = step else { break };
            let x = members(deficient).next().expect("nonempty Hall set");
            let y = (0..self.b.n()).find(|&y| partners & (1 << y) == 0).expect("partner outside neighbourhood");
            line.push(HallStep { position: at.clone(), pebble: p, deficient: members(deficient).collect(), partners: members(partners).collect() });
            at = at.place(p, x, y)?;
            rounds -= 1;
        }
        Ok(line)
    }
}

/// `rounds`-round bijective game: each round Spoiler picks a legal pebble, Duplicator picks a
/// bijection, Spoiler places the pair on `(v, f(v))`.
pub fn solve_bijective_pebble(a: &Graph, b: &Graph, k1: usize, k2: usize, rounds: usize) -> Result<GameVerdict> {
    let alphabet = Alphabet::new(k1, k2)?;
    if a.n() != b.n() {
        return Ok(GameVerdict { winner: Winner::Spoiler, rounds: Some(0), up_to: None, certificate: Certificate::SizeMismatch });
    }
    if a.n() > u8::MAX as usize {
        return Err(Error::TooLarge { n: a.n(), max: u8::MAX as usize });
    }
    let mut solver = Solver { a, b, alphabet, memo: HashMap::new() };
    let start = PebblePairing::empty(alphabet);
    if solver.wins(&start, rounds)? {
        return Ok(GameVerdict { winner: Winner::Duplicator, rounds: None, up_to: None, certificate: Certificate::Exhausted { sequences: solver.memo.len() } });
    }
    let needed = (1..=rounds).find(|&r| solver.wins(&start, r).map(|w| !w).unwrap_or(true)).unwrap_or(rounds);
    let line = solver.hall_line(start, needed)?;
    Ok(GameVerdict { winner: Winner::Spoiler, rounds: Some(needed), up_to: None, certificate: Certificate::HallLine(line) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn winner(a: &Graph, b: &Graph, k1: usize, k2: usize, q: usize) -> Winner {
        solve_bijective_pebble(a, b, k1, k2, q).unwrap().winner
    }

    #[test]
    fn hexagon_against_two_triangles() {
        let c6 = Graph::cycle(6);
        let two_c3 = Graph::cycle(3).disjoint_union(&Graph::cycle(3));
        let v = solve_bijective_pebble(&c6, &two_c3, 3, 0, 3).unwrap();
        assert_eq!((v.winner, v.rounds), (Winner::Spoiler, Some(3)));
        assert!(matches!(&v.certificate, Certificate::HallLine(line) if !line.is_empty()));
        assert_eq!(winner(&c6, &two_c3, 0, 3, 3), Winner::Spoiler);
        for q in 0..=5 {
            assert_eq!(winner(&c6, &two_c3, 2, 0, q), Winner::Duplicator);
        }
        assert_eq!(winner(&c6, &two_c3, 3, 0, 2), Winner::Duplicator);
    }

    #[test]
    fn sizes_and_isomorphic_copies() {
        let v = solve_bijective_pebble(&Graph::path(3), &Graph::path(4), 1, 0, 1).unwrap();
        assert_eq!((v.winner, v.rounds), (Winner::Spoiler, Some(0)));
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (1, 4)]).unwrap();
        let h = g.permuted(&[4, 2, 0, 1, 3]);
        assert_eq!(winner(&g, &h, 2, 1, 4), Winner::Duplicator);
    }

    #[test]
    fn degree_is_seen_with_two_pebbles() {
        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let p4 = Graph::path(4);
        assert_eq!(winner(&star, &p4, 1, 0, 3), Winner::Duplicator);
        assert_eq!(winner(&star, &p4, 2, 0, 2), Winner::Spoiler);
        assert_eq!(winner(&star, &p4, 1, 1, 2), Winner::Spoiler);
    }
}
