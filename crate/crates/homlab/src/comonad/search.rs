use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::{build_universe, chain_holds, coextend, legal_extensions, tuples_with, ComonadParams, Kind, Seq, SeqStructure};
use crate::error::{Error, Result};
use crate::graph::{Alphabet, Pebble, RelStructure};

const MAX_NODES: usize = 1 << 24;

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SearchResult {
    pub exists: bool,
    /// `f` on the universe over the first structure with identity adjoined.
    pub morphism: Option<Vec<usize>>,
    /// `g` on the universe over the second structure, in isomorphism mode.
    pub inverse: Option<Vec<usize>>,
    pub universe_size: usize,
}

/// Searches for a coKleisli morphism `G(A) → B`, or with `iso` for a coKleisli isomorphism.
/// Both structures get the identity relation adjoined, so pebble coincidences are visible.
///
/// Relations only join elements on one prefix chain, so for `P` the search walks the prefix
/// tree and solves sibling subtrees independently; for `Pr` every sequence is its own problem.
/// Witnesses are checked against the explicit universes before they are returned.
pub fn cokleisli_search(a: &RelStructure, b: &RelStructure, params: ComonadParams, iso: bool) -> Result<SearchResult> {
    let ja = a.with_identity();
    let jb = b.with_identity();
    let mut rels = Vec::new();
    for (i, r) in ja.relations().iter().enumerate() {
        let j = jb.relations().iter().position(|s| s.name == r.name);
        if let Some(j) = j {
            if jb.relations()[j].arity != r.arity {
                return Err(Error::invalid(format!("relation {} has different arities", r.name)));
            }
        }
        rels.push((i, j, r.arity));
    }
    if iso && !ja.same_signature(&jb) {
        return Err(Error::invalid("structures have different signatures"));
    }
    let ua = build_universe(&ja, params)?;
    let alphabet = ua.alphabet();
    let mut s = Searcher { a: &ja, b: &jb, rels, alphabet, bound: params.bound, nodes: 0, matched: HashMap::new(), unanswerable: HashSet::new() };
    let result = match (params.kind, iso) {
        (Kind::P, false) => s.p_morphism(&ua)?,
        (Kind::Pr, false) => s.pr_morphism(&ua)?,
        (kind, true) => {
            let ub = build_universe(&jb, params)?;
            let fstar = if ja.n() != jb.n() {
                None
            } else if kind == Kind::P {
                s.p_iso(&ua, &ub)?
            } else {
                pr_iso(&mut s, &ua, &ub)?
            };
            match fstar {
                None => SearchResult { exists: false, morphism: None, inverse: None, universe_size: ua.len() },
                Some(fstar) => iso_witness(&ua, &ub, fstar)?,
            }
        }
    };
    if let (false, Some(f)) = (iso, &result.morphism) {
        check_morphism(&ua, &jb, f)?;
    }
    Ok(result)
}

struct Searcher<'s> {
    a: &'s RelStructure,
    b: &'s RelStructure,
    /// Relation index in `a`, its counterpart in `b`, arity.
    rels: Vec<(usize, Option<usize>, usize)>,
    alphabet: Alphabet,
    bound: usize,
    nodes: usize,
    /// Outcomes by active state, see `state`: all outcomes for `p_match`, failures for `p_extend`.
    matched: HashMap<State, bool>,
    unanswerable: HashSet<State>,
}

/// Current pair of each pebble and the remaining length. Relations only reach positions whose
/// pebble has not moved since, so this determines everything below a chain.
type State = (Vec<Option<(usize, usize)>>, usize);

impl Searcher<'_> {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > MAX_NODES {
            return Err(Error::Budget);
        }
        Ok(())
    }

    fn state(&self, left: &[(Pebble, usize)], right: &[(Pebble, usize)]) -> State {
        let mut pairs = vec![None; self.alphabet.size()];
        for (l, r) in left.iter().zip(right) {
            pairs[self.alphabet.slot(l.0).expect("pebble in alphabet")] = Some((l.1, r.1));
        }
        (pairs, self.bound - left.len())
    }

    /// Relations among chain positions ending at `top` agree between the two chains: preserved
    /// forwards, and reflected as well with `iso`.
    fn consistent(&self, left: &[(Pebble, usize)], right: &[(Pebble, usize)], top: usize, iso: bool) -> bool {
        self.rels.iter().all(|&(ra, rb, arity)| {
            tuples_with(top, arity).iter().all(|idx| {
                let ha = chain_holds(self.a, ra, left, idx);
                let hb = rb.is_some_and(|rb| chain_holds(self.b, rb, right, idx));
                (!ha || hb) && (!iso || !hb || ha)
            })
        })
    }

    fn p_morphism(&mut self, ua: &SeqStructure) -> Result<SearchResult> {
        let mut f = vec![0; ua.len()];
        let exists = self.p_extend(ua, &mut Vec::new(), &mut Vec::new(), &mut f)?;
        Ok(SearchResult { exists, morphism: exists.then_some(f), inverse: None, universe_size: ua.len() })
    }

    /// Whether every extension of the chain `left`, mapped to `right`, can be answered.
    fn p_extend(&mut self, ua: &SeqStructure, left: &mut Seq, right: &mut Seq, f: &mut [usize]) -> Result<bool> {
        if left.len() == self.bound {
            return Ok(true);
        }
        let state = self.state(left, right);
        if self.unanswerable.contains(&state) {
            return Ok(false);
        }
        for e in legal_extensions(self.alphabet, self.a.n(), left) {
            left.push(e);
            let mut answered = false;
            for b in 0..self.b.n() {
                self.tick()?;
                right.push((e.0, b));
                if self.consistent(left, right, left.len() - 1, false) && self.p_extend(ua, left, right, f)? {
                    f[ua.element_of(left, None).expect("in universe")] = b;
                    answered = true;
                }
                right.pop();
                if answered {
                    break;
                }
            }
            left.pop();
            if !answered {
                self.unanswerable.insert(state);
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn pr_morphism(&mut self, ua: &SeqStructure) -> Result<SearchResult> {
        let mut f = vec![0; ua.len()];
        for s in &ua.seqs {
            let mut right = Vec::new();
            if !self.pr_assign(s, &mut right)? {
                return Ok(SearchResult { exists: false, morphism: None, inverse: None, universe_size: ua.len() });
            }
            for (i, &(_, b)) in right.iter().enumerate() {
                f[ua.element(s, i).expect("in universe")] = b;
            }
        }
        Ok(SearchResult { exists: true, morphism: Some(f), inverse: None, universe_size: ua.len() })
    }

    /// Backtracking over the positions of one sequence.
    fn pr_assign(&mut self, s: &Seq, right: &mut Seq) -> Result<bool> {
        let at = right.len();
        if at == s.len() {
            return Ok(true);
        }
        for b in 0..self.b.n() {
            self.tick()?;
            right.push((s[at].0, b));
            if self.consistent(&s[..=at], right, at, false) && self.pr_assign(s, right)? {
                return Ok(true);
            }
            right.pop();
        }
        Ok(false)
    }

    /// `f*` as a map between universes, if a prefix-preserving isomorphism exists.
    fn p_iso(&mut self, ua: &SeqStructure, ub: &SeqStructure) -> Result<Option<Vec<usize>>> {
        let (mut left, mut right) = (Vec::new(), Vec::new());
        if !self.p_match(&mut left, &mut right)? {
            return Ok(None);
        }
        let mut fstar = vec![usize::MAX; ua.len()];
        self.p_record(ua, ub, &mut left, &mut right, &mut fstar)?;
        Ok(Some(fstar))
    }

    /// Compatibility of the children of `left` and `right` for pebble `z`: entry `[a][b]` says
    /// placing `z` on `a` and `b` keeps the chains isomorphic from here on.
    fn p_children(&mut self, left: &mut Seq, right: &mut Seq, z: Pebble) -> Result<Vec<Vec<bool>>> {
        let n = self.a.n();
        let mut ok = vec![vec![false; n]; n];
        for a in 0..n {
            left.push((z, a));
            for b in 0..n {
                self.tick()?;
                right.push((z, b));
                ok[a][b] = self.consistent(left, right, left.len() - 1, true) && self.p_match(left, right)?;
                right.pop();
            }
            left.pop();
        }
        Ok(ok)
    }

    fn p_match(&mut self, left: &mut Seq, right: &mut Seq) -> Result<bool> {
        if left.len() == self.bound {
            return Ok(true);
        }
        let state = self.state(left, right);
        if let Some(&known) = self.matched.get(&state) {
            return Ok(known);
        }
        let legal: Vec<_> = self.alphabet.pebbles().filter(|&z| z.is_x() || left.iter().all(|e| e.0 != z)).collect();
        let mut all = true;
        for z in legal {
            let ok = self.p_children(left, right, z)?;
            if perfect_matching(&ok).is_none() {
                all = false;
                break;
            }
        }
        self.matched.insert(state, all);
        Ok(all)
    }

    fn p_record(&mut self, ua: &SeqStructure, ub: &SeqStructure, left: &mut Seq, right: &mut Seq, fstar: &mut [usize]) -> Result<()> {
        if left.len() == self.bound {
            return Ok(());
        }
        let legal: Vec<_> = self.alphabet.pebbles().filter(|&z| z.is_x() || left.iter().all(|e| e.0 != z)).collect();
        for z in legal {
            let ok = self.p_children(left, right, z)?;
            let partner = perfect_matching(&ok).expect("matching found before");
            for (a, &b) in partner.iter().enumerate() {
                left.push((z, a));
                right.push((z, b));
                fstar[ua.element_of(left, None).expect("in universe")] = ub.element_of(right, None).expect("in universe");
                self.p_record(ua, ub, left, right, fstar)?;
                left.pop();
                right.pop();
            }
        }
        Ok(())
    }
}

/// Sequences over the same pebble sequence with the same relation pattern on their positions
/// are interchangeable; an isomorphism pairs them up class by class.
fn pr_iso(s: &mut Searcher, ua: &SeqStructure, ub: &SeqStructure) -> Result<Option<Vec<usize>>> {
    type Pattern = (Vec<Pebble>, Vec<bool>);
    let pattern = |st: &RelStructure, rels: &[usize], seq: &Seq| -> Pattern {
        let mut bits = Vec::new();
        for &r in rels {
            let arity = st.relations()[r].arity;
            for top in 0..seq.len() {
                for idx in tuples_with(top, arity) {
                    bits.push(chain_holds(st, r, seq, &idx));
                }
            }
        }
        (seq.iter().map(|e| e.0).collect(), bits)
    };
    let ra: Vec<usize> = s.rels.iter().map(|r| r.0).collect();
    let rb: Vec<usize> = s.rels.iter().map(|r| r.1.expect("same signature")).collect();
    let mut classes: HashMap<Pattern, (Vec<usize>, Vec<usize>)> = HashMap::new();
    for (id, seq) in ua.seqs.iter().enumerate() {
        s.tick()?;
        classes.entry(pattern(s.a, &ra, seq)).or_default().0.push(id);
    }
    for (id, seq) in ub.seqs.iter().enumerate() {
        s.tick()?;
        classes.entry(pattern(s.b, &rb, seq)).or_default().1.push(id);
    }
    if classes.values().any(|(l, r)| l.len() != r.len()) {
        return Ok(None);
    }
    let mut fstar = vec![usize::MAX; ua.len()];
    for (left, right) in classes.values() {
        for (&sa, &sb) in left.iter().zip(right) {
            for i in 0..ua.seqs[sa].len() {
                fstar[ua.element(&ua.seqs[sa], i).expect("in universe")] = ub.element(&ub.seqs[sb], i).expect("in universe");
            }
        }
    }
    Ok(Some(fstar))
}

/// Kuhn's augmenting paths; `partner[a]` is the column matched to row `a`.
fn perfect_matching(ok: &[Vec<bool>]) -> Option<Vec<usize>> {
    fn augment(a: usize, ok: &[Vec<bool>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for b in 0..ok.len() {
            if ok[a][b] && !seen[b] {
                seen[b] = true;
                if owner[b].is_none_or(|o| augment(o, ok, seen, owner)) {
                    owner[b] = Some(a);
                    return true;
                }
            }
        }
        false
    }
    let n = ok.len();
    let mut owner = vec![None; n];
    for a in 0..n {
        if !augment(a, ok, &mut vec![false; n], &mut owner) {
            return None;
        }
    }
    let mut partner = vec![0; n];
    for (b, a) in owner.iter().enumerate() {
        partner[a.expect("perfect")] = b;
    }
    Some(partner)
}

fn check_morphism(ua: &SeqStructure, b: &RelStructure, f: &[usize]) -> Result<()> {
    for r in ua.structure.relations() {
        let target = b.relation(&r.name);
        for t in &r.tuples {
            let image: Vec<usize> = t.iter().map(|&e| f[e]).collect();
            if !target.is_some_and(|rel| rel.tuples.contains(&image)) {
                return Err(Error::TheoremViolation(format!("coKleisli witness breaks {} on {t:?}", r.name)));
            }
        }
    }
    Ok(())
}

/// Turns a universe bijection into `(f, g)` and checks that their coextensions are mutually
/// inverse isomorphisms.
fn iso_witness(ua: &SeqStructure, ub: &SeqStructure, fstar: Vec<usize>) -> Result<SearchResult> {
    let violation = |msg: &str| Error::TheoremViolation(format!("coKleisli isomorphism witness: {msg}"));
    if ua.len() != ub.len() || fstar.iter().any(|&e| e >= ub.len()) {
        return Err(violation("not total"));
    }
    let mut back = vec![usize::MAX; ub.len()];
    for (e, &img) in fstar.iter().enumerate() {
        if back[img] != usize::MAX {
            return Err(violation("not injective"));
        }
        back[img] = e;
    }
    let f: Vec<usize> = fstar.iter().map(|&e| ub.counit[e]).collect();
    let g: Vec<usize> = back.iter().map(|&e| ua.counit[e]).collect();
    if coextend(&f, ua, ub)? != fstar || coextend(&g, ub, ua)? != back {
        return Err(violation("not a coextension"));
    }
    for (ra, rb) in ua.structure.relations().iter().zip(ub.structure.relations()) {
        let mapped: std::collections::BTreeSet<Vec<usize>> = ra.tuples.iter().map(|t| t.iter().map(|&e| fstar[e]).collect()).collect();
        if mapped != rb.tuples {
            return Err(violation(&format!("relation {} not preserved", ra.name)));
        }
    }
    Ok(SearchResult { exists: true, morphism: Some(f), inverse: Some(g), universe_size: ua.len() })
}
