//! Explicit bounded universes of the pebble-relation and pebbling comonads with restricted
//! reusability, coextension and the comonad laws, the coalgebra/forest-cover correspondence, and
//! coKleisli morphism and isomorphism search.

mod bridge;
mod search;

pub use bridge::{coalgebra_cover_bridge, coalgebra_to_cover, cover_to_coalgebra, BridgeObject, Coalgebra};
pub use search::{cokleisli_search, SearchResult};

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Alphabet, Pebble, RelStructure, Relation};

/// `Pr`: pairs (sequence, position), cut at a length bound since the full comonad is infinite.
/// `P`: sequences of length at most `q`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Kind {
    Pr,
    P,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ComonadParams {
    pub kind: Kind,
    pub k1: usize,
    pub k2: usize,
    /// Sequence length bound: `q` for `P`, the cut-off length for `Pr`.
    pub bound: usize,
}

pub type Seq = Vec<(Pebble, usize)>;

const MAX_UNIVERSE: usize = 1 << 18;

/// Whether the entry at `from` (0-based) is still active at `to`: its pebble is not placed again
/// in between.
pub(crate) fn active(seq: &[(Pebble, usize)], from: usize, to: usize) -> bool {
    let z = seq[from].0;
    seq[from + 1..=to].iter().all(|&(w, _)| w != z)
}

/// Relation `rel` of the base structure on chain positions `idx` of `seq` (0-based, any order):
/// compatibility on the entries plus the active-pebble condition towards the largest position.
pub(crate) fn chain_holds(base: &RelStructure, rel: usize, seq: &[(Pebble, usize)], idx: &[usize]) -> bool {
    let top = *idx.iter().max().expect("nonempty tuple");
    if !idx.iter().all(|&i| active(seq, i, top)) {
        return false;
    }
    let values: Vec<usize> = idx.iter().map(|&i| seq[i].1).collect();
    base.holds(rel, &values)
}

/// All index tuples of the given arity over `0..=last` that use `last`.
pub(crate) fn tuples_with(last: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out.into_iter().flat_map(|t| (0..=last).map(move |i| [t.clone(), vec![i]].concat())).collect();
    }
    out.retain(|t| t.contains(&last));
    out
}

/// A bounded comonad universe over a base structure.
#[derive(Clone, Debug)]
pub struct SeqStructure {
    pub params: ComonadParams,
    pub base: RelStructure,
    pub seqs: Vec<Seq>,
    /// `(sequence index, position)`; for `P` the position is always the last one.
    pub elements: Vec<(usize, usize)>,
    pub structure: RelStructure,
    pub counit: Vec<usize>,
    seq_index: HashMap<Seq, usize>,
    element_index: HashMap<(usize, usize), usize>,
}

impl SeqStructure {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::raw(self.params.k1, self.params.k2)
    }

    pub fn seq_id(&self, s: &[(Pebble, usize)]) -> Option<usize> {
        self.seq_index.get(s).copied()
    }

    pub fn element(&self, s: &[(Pebble, usize)], pos: usize) -> Option<usize> {
        self.element_index.get(&(self.seq_id(s)?, pos)).copied()
    }

    /// The element for a whole sequence (`P`) or a sequence with its position (`Pr`).
    pub fn element_of(&self, s: &[(Pebble, usize)], pos: Option<usize>) -> Option<usize> {
        match self.params.kind {
            Kind::P => self.element(s, s.len().checked_sub(1)?),
            Kind::Pr => self.element(s, pos?),
        }
    }

    pub fn sequence(&self, element: usize) -> (&Seq, usize) {
        let (s, i) = self.elements[element];
        (&self.seqs[s], i)
    }
}

pub(crate) fn legal_extensions(alphabet: Alphabet, n: usize, s: &[(Pebble, usize)]) -> Vec<(Pebble, usize)> {
    alphabet
        .pebbles()
        .filter(|&z| z.is_x() || s.iter().all(|&(w, _)| w != z))
        .flat_map(|z| (0..n).map(move |a| (z, a)))
        .collect()
}

/// Builds the universe with its relations and counit table.
pub fn build_universe(a: &RelStructure, params: ComonadParams) -> Result<SeqStructure> {
    if params.bound < 1 {
        return Err(Error::invalid("the length bound must be at least 1"));
    }
    let alphabet = Alphabet::new(params.k1, params.k2)?;
    let mut seqs: Vec<Seq> = Vec::new();
    let mut frontier: Vec<Seq> = vec![Vec::new()];
    for _ in 0..params.bound {
        let mut next = Vec::new();
        for s in &frontier {
            for e in legal_extensions(alphabet, a.n(), s) {
                let mut t = s.clone();
                t.push(e);
                next.push(t);
            }
        }
        seqs.extend(next.iter().cloned());
        if seqs.len() > MAX_UNIVERSE {
            return Err(Error::TooLarge { n: seqs.len(), max: MAX_UNIVERSE });
        }
        frontier = next;
    }
    let seq_index: HashMap<Seq, usize> = seqs.iter().cloned().zip(0..).collect();
    let mut elements = Vec::new();
    for (id, s) in seqs.iter().enumerate() {
        match params.kind {
            Kind::P => elements.push((id, s.len() - 1)),
            Kind::Pr => elements.extend((0..s.len()).map(|i| (id, i))),
        }
    }
    if elements.len() > MAX_UNIVERSE {
        return Err(Error::TooLarge { n: elements.len(), max: MAX_UNIVERSE });
    }
    let element_index: HashMap<(usize, usize), usize> = elements.iter().copied().zip(0..).collect();
    let counit = elements.iter().map(|&(s, i)| seqs[s][i].1).collect();
    let mut relations = Vec::new();
    for (r, rel) in a.relations().iter().enumerate() {
        let mut tuples = std::collections::BTreeSet::new();
        for (id, s) in seqs.iter().enumerate() {
            let last = s.len() - 1;
            match params.kind {
                // Tuples over the prefixes of `s` that include `s` itself.
                Kind::P => {
                    for idx in tuples_with(last, rel.arity) {
                        if chain_holds(a, r, s, &idx) {
                            tuples.insert(idx.iter().map(|&i| element_index[&(seq_index[&s[..=i]], i)]).collect());
                        }
                    }
                }
                Kind::Pr => {
                    for top in 0..=last {
                        for idx in tuples_with(top, rel.arity) {
                            if chain_holds(a, r, s, &idx) {
                                tuples.insert(idx.iter().map(|&i| element_index[&(id, i)]).collect());
                            }
                        }
                    }
                }
            }
        }
        relations.push(Relation { name: rel.name.clone(), arity: rel.arity, tuples });
    }
    let structure = RelStructure::with_relations(elements.len(), relations)?;
    Ok(SeqStructure { params, base: a.clone(), seqs, elements, structure, counit, seq_index, element_index })
}

/// `f*` for `f : universe(A) → V(B)`, as a map from universe(A) into `b_univ`.
pub fn coextend(f: &[usize], a_univ: &SeqStructure, b_univ: &SeqStructure) -> Result<Vec<usize>> {
    coextend_with(f, a_univ, b_univ, 0)
}

/// Coextension reading `f` at prefixes shifted by `skew` positions; `skew = 0` is the real one.
fn coextend_with(f: &[usize], a_univ: &SeqStructure, b_univ: &SeqStructure, skew: usize) -> Result<Vec<usize>> {
    if f.len() != a_univ.len() {
        return Err(Error::invalid(format!("map defined on {} of {} elements", f.len(), a_univ.len())));
    }
    if let Some(&b) = f.iter().find(|&&b| b >= b_univ.base.n()) {
        return Err(Error::VertexOutOfRange { vertex: b, n: b_univ.base.n() });
    }
    if a_univ.params != b_univ.params {
        return Err(Error::invalid("universes built with different parameters"));
    }
    let mut out = Vec::with_capacity(f.len());
    for e in 0..a_univ.len() {
        let (s, pos) = a_univ.sequence(e);
        let image: Seq = (0..s.len())
            .map(|j| {
                let at = (j + skew).min(s.len() - 1);
                let src = match a_univ.params.kind {
                    Kind::P => a_univ.element(&s[..=at], at),
                    Kind::Pr => a_univ.element(s, at),
                };
                (s[j].0, f[src.expect("prefix in universe")])
            })
            .collect();
        out.push(b_univ.element(&image, pos).expect("same pebble sequence"));
    }
    Ok(out)
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct LawReport {
    pub ok: bool,
    pub counterexample: Option<String>,
}

/// Checks `ε* = id`, `ε ∘ f* = f` and `(g ∘ f*)* = g* ∘ f*` on `panel` random maps
/// `f, g : universe(A) → V(A)`.
pub fn check_comonad_laws(a: &RelStructure, params: ComonadParams, panel: usize, seed: u64) -> Result<LawReport> {
    laws(a, params, panel, seed, 0)
}

fn laws(a: &RelStructure, params: ComonadParams, panel: usize, seed: u64, skew: usize) -> Result<LawReport> {
    let u = build_universe(a, params)?;
    let fail = |msg: String| Ok(LawReport { ok: false, counterexample: Some(msg) });
    let ext = |f: &[usize]| coextend_with(f, &u, &u, skew);
    let id = ext(&u.counit)?;
    if let Some(e) = (0..u.len()).find(|&e| id[e] != e) {
        return fail(format!("counit coextension moves element {:?}", u.sequence(e)));
    }
    if a.n() == 0 {
        return Ok(LawReport { ok: true, counterexample: None });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for round in 0..panel {
        let f: Vec<usize> = (0..u.len()).map(|_| rng.gen_range(0..a.n())).collect();
        let g: Vec<usize> = (0..u.len()).map(|_| rng.gen_range(0..a.n())).collect();
        let fs = ext(&f)?;
        if let Some(e) = (0..u.len()).find(|&e| u.counit[fs[e]] != f[e]) {
            return fail(format!("panel {round}: counit after coextension differs at {:?}", u.sequence(e)));
        }
        let gfs: Vec<usize> = fs.iter().map(|&e| g[e]).collect();
        let lhs = ext(&gfs)?;
        let gs = ext(&g)?;
        if let Some(e) = (0..u.len()).find(|&e| lhs[e] != gs[fs[e]]) {
            return fail(format!("panel {round}: associativity fails at {:?}", u.sequence(e)));
        }
    }
    Ok(LawReport { ok: true, counterexample: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use Pebble::{X, Y};

    fn params(kind: Kind, k1: usize, k2: usize, bound: usize) -> ComonadParams {
        ComonadParams { kind, k1, k2, bound }
    }

    #[test]
    fn tiny_universes() {
        let one = RelStructure::from_graph(&Graph::empty(1));
        let u = build_universe(&one, params(Kind::P, 1, 1, 1)).unwrap();
        assert_eq!(u.len(), 2);
        let two = RelStructure::from_graph(&Graph::complete(2));
        let p = build_universe(&two, params(Kind::P, 2, 0, 2)).unwrap();
        let e = p.element_of(&[(X(1), 0), (X(2), 1)], None).unwrap();
        assert_eq!(p.counit[e], 1);
        let pr = build_universe(&two, params(Kind::Pr, 1, 0, 2)).unwrap();
        let e = pr.element_of(&[(X(1), 0), (X(1), 1)], Some(0)).unwrap();
        assert_eq!(pr.counit[e], 0);
        assert!(build_universe(&two, params(Kind::P, 1, 0, 0)).is_err());
    }

    #[test]
    fn y_pebbles_appear_once() {
        let a = RelStructure::from_graph(&Graph::path(3));
        for kind in [Kind::P, Kind::Pr] {
            let u = build_universe(&a, params(kind, 1, 2, 3)).unwrap();
            for s in &u.seqs {
                for y in [Y(1), Y(2)] {
                    assert!(s.iter().filter(|e| e.0 == y).count() <= 1);
                }
            }
        }
    }

    #[test]
    fn relations_follow_the_clauses() {
        let a = RelStructure::from_graph(&Graph::complete(2));
        let u = build_universe(&a, params(Kind::P, 1, 0, 2)).unwrap();
        let e = |s: &[(Pebble, usize)]| u.element_of(s, None).unwrap();
        let r = &u.structure;
        assert!(!r.holds(0, &[e(&[(X(1), 0)]), e(&[(X(1), 0), (X(1), 1)])]));
        let v = build_universe(&a, params(Kind::P, 2, 0, 2)).unwrap();
        let f = |s: &[(Pebble, usize)]| v.element_of(s, None).unwrap();
        assert!(v.structure.holds(0, &[f(&[(X(1), 0)]), f(&[(X(1), 0), (X(2), 1)])]));
        assert!(!v.structure.holds(0, &[f(&[(X(1), 0), (X(2), 1)]), f(&[(X(2), 1)])]));
    }

    #[test]
    fn coextension_examples() {
        let a = RelStructure::from_graph(&Graph::path(3));
        let b = RelStructure::from_graph(&Graph::complete(2));
        let p = params(Kind::P, 2, 1, 2);
        let ua = build_universe(&a, p).unwrap();
        let ub = build_universe(&b, p).unwrap();
        assert_eq!(coextend(&ua.counit, &ua, &ua).unwrap(), (0..ua.len()).collect::<Vec<_>>());
        let constant = coextend(&vec![1; ua.len()], &ua, &ub).unwrap();
        for (e, &img) in constant.iter().enumerate() {
            let (s, _) = ua.sequence(e);
            let (t, _) = ub.sequence(img);
            assert!(t.iter().zip(s).all(|(x, y)| x.0 == y.0 && x.1 == 1));
        }
        assert!(coextend(&[0], &ua, &ub).is_err());
    }

    #[test]
    fn laws_hold_and_mutation_is_caught() {
        let a = RelStructure::from_graph(&Graph::path(3));
        for p in [params(Kind::P, 2, 1, 2), params(Kind::Pr, 1, 1, 3)] {
            assert!(check_comonad_laws(&a, p, 10, 7).unwrap().ok);
            let broken = laws(&a, p, 10, 7, 1).unwrap();
            assert!(!broken.ok && broken.counterexample.is_some());
        }
        let single = RelStructure::from_graph(&Graph::empty(1));
        assert!(check_comonad_laws(&single, params(Kind::P, 1, 1, 3), 10, 1).unwrap().ok);
    }
}
