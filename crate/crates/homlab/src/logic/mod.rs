//! Counting logic over graphs: formulas, fragment analysis, model checking, and translations
//! between construction trees, formulas and linear combinations of labeled graphs.
//!
//! Formulas are immutable DAGs (`Rc` children), so the order-relative tree translation can share
//! subformulas. Variables are pebble variables `x_i`, `y_i` and tally variables `w_i`; tally
//! variables are bound only by the tuple-counting quantifier `(count-tuples n (w..) body)`.

mod compile;
mod eval;
mod lincomb;
mod normal;

pub use compile::{formula_from_construction, type_sentence, Mode};
pub use eval::{count_solutions, evaluate};
pub use lincomb::lincomb_from_formula;
pub use normal::{primitive_disjuncts, to_primitive_normal_form};

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Alphabet, Pebble};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Var {
    P(Pebble),
    /// Tally variable `w_i`, 1-based.
    W(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::P(p) => write!(f, "{p}"),
            Var::W(i) => write!(f, "w{i}"),
        }
    }
}

impl Serialize for Var {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub type Node = Rc<Formula>;

#[derive(Debug)]
pub enum Formula {
    True,
    False,
    Eq(Var, Var),
    Edge(Var, Var),
    Not(Node),
    And(Vec<Node>),
    Or(Vec<Node>),
    Exists(Pebble, Node),
    /// At least `n` choices of the pebble satisfy the body.
    CountGe(usize, Pebble, Node),
    /// Exactly `n` tuples over the listed tally variables satisfy the body.
    CountTuples(usize, Vec<usize>, Node),
}

pub fn truth() -> Node {
    Rc::new(Formula::True)
}

pub fn falsity() -> Node {
    Rc::new(Formula::False)
}

pub fn eq(a: Var, b: Var) -> Node {
    Rc::new(Formula::Eq(a, b))
}

pub fn edge(a: Var, b: Var) -> Node {
    Rc::new(Formula::Edge(a, b))
}

pub fn not(f: Node) -> Node {
    Rc::new(Formula::Not(f))
}

/// Conjunction, flattening nested conjunctions; the empty conjunction is `true`.
pub fn and(parts: Vec<Node>) -> Node {
    let mut flat = Vec::with_capacity(parts.len());
    for p in parts {
        match &*p {
            Formula::And(inner) => flat.extend(inner.iter().cloned()),
            Formula::True => {}
            _ => flat.push(p),
        }
    }
    match flat.len() {
        0 => truth(),
        1 => flat.pop().expect("one part"),
        _ => Rc::new(Formula::And(flat)),
    }
}

/// Disjunction; the empty disjunction is `false`.
pub fn or(mut parts: Vec<Node>) -> Node {
    parts.retain(|p| !matches!(&**p, Formula::False));
    match parts.len() {
        0 => falsity(),
        1 => parts.pop().expect("one part"),
        _ => Rc::new(Formula::Or(parts)),
    }
}

pub fn exists(z: Pebble, body: Node) -> Node {
    Rc::new(Formula::Exists(z, body))
}

/// `∃z (z = w_l ∧ body)`.
pub fn guarded(z: Pebble, tally: usize, body: Node) -> Node {
    exists(z, and(vec![eq(Var::P(z), Var::W(tally)), body]))
}

pub fn count_ge(n: usize, z: Pebble, body: Node) -> Node {
    if n == 0 {
        return truth();
    }
    Rc::new(Formula::CountGe(n, z, body))
}

/// Exactly `n` choices, as `∃^{≥n} ∧ ¬∃^{≥n+1}`.
pub fn count_eq(n: usize, z: Pebble, body: Node) -> Node {
    and(vec![count_ge(n, z, body.clone()), not(count_ge(n + 1, z, body))])
}

pub fn count_tuples(n: usize, tallies: Vec<usize>, body: Node) -> Node {
    Rc::new(Formula::CountTuples(n, tallies, body))
}

pub(crate) fn key(f: &Node) -> usize {
    Rc::as_ptr(f) as usize
}

/// The pebble and tally `z` of a guard `z = w` among the conjuncts of `body`.
pub(crate) fn guard_of(z: Pebble, body: &Formula) -> Option<usize> {
    let is_guard = |c: &Formula| match c {
        Formula::Eq(Var::P(p), Var::W(w)) | Formula::Eq(Var::W(w), Var::P(p)) if *p == z => Some(*w),
        _ => None,
    };
    match body {
        Formula::And(parts) => parts.iter().find_map(|c| is_guard(c)),
        other => is_guard(other),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, head: &str, parts: &[Node]| {
            write!(f, "({head}")?;
            for p in parts {
                write!(f, " {p}")?;
            }
            write!(f, ")")
        };
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Edge(a, b) => write!(f, "(E {a} {b})"),
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(parts) => list(f, "and", parts),
            Formula::Or(parts) => list(f, "or", parts),
            Formula::Exists(z, g) => write!(f, "(exists {z} {g})"),
            Formula::CountGe(n, z, g) => write!(f, "(count>= {n} {z} {g})"),
            Formula::CountTuples(n, ws, g) => {
                let names: Vec<String> = ws.iter().map(|w| format!("w{w}")).collect();
                write!(f, "(count-tuples {n} ({}) {g})", names.join(" "))
            }
        }
    }
}

fn syntax(msg: impl Into<String>) -> Error {
    Error::Parse { line: 0, col: 0, msg: msg.into() }
}

fn parse_var(v: &lexpr::Value) -> Result<Var> {
    let s = v.as_symbol().ok_or_else(|| syntax(format!("expected a variable, got {v}")))?;
    if let Some(idx) = s.strip_prefix('w') {
        return match idx.parse::<usize>() {
            Ok(i) if i >= 1 => Ok(Var::W(i)),
            _ => Err(syntax(format!("bad tally variable {s}"))),
        };
    }
    s.parse::<Pebble>().map(Var::P).map_err(|_| syntax(format!("bad variable {s}")))
}

fn parse_pebble(v: &lexpr::Value) -> Result<Pebble> {
    match parse_var(v)? {
        Var::P(p) => Ok(p),
        Var::W(_) => Err(syntax("only pebble variables can be quantified individually")),
    }
}

fn parse_count(v: &lexpr::Value) -> Result<usize> {
    v.as_u64().map(|n| n as usize).ok_or_else(|| syntax(format!("expected a count, got {v}")))
}

fn parse_value(v: &lexpr::Value) -> Result<Node> {
    if let Some(s) = v.as_symbol() {
        return match s {
            "true" => Ok(truth()),
            "false" => Ok(falsity()),
            _ => Err(syntax(format!("unexpected symbol {s}"))),
        };
    }
    let items: Vec<&lexpr::Value> = v.list_iter().ok_or_else(|| syntax(format!("expected a list, got {v}")))?.collect();
    let (head, args) = items.split_first().ok_or_else(|| syntax("empty list"))?;
    let head = head.as_symbol().ok_or_else(|| syntax(format!("expected an operator, got {head}")))?;
    let arity = |k: usize| {
        if args.len() == k {
            Ok(())
        } else {
            Err(syntax(format!("{head} takes {k} arguments, got {}", args.len())))
        }
    };
    match head {
        "=" => {
            arity(2)?;
            Ok(eq(parse_var(args[0])?, parse_var(args[1])?))
        }
        "E" => {
            arity(2)?;
            Ok(edge(parse_var(args[0])?, parse_var(args[1])?))
        }
        "not" => {
            arity(1)?;
            Ok(not(parse_value(args[0])?))
        }
        "and" | "or" => {
            let parts = args.iter().map(|a| parse_value(a)).collect::<Result<Vec<_>>>()?;
            Ok(Rc::new(if head == "and" { Formula::And(parts) } else { Formula::Or(parts) }))
        }
        "exists" => {
            arity(2)?;
            Ok(exists(parse_pebble(args[0])?, parse_value(args[1])?))
        }
        "forall" => {
            arity(2)?;
            Ok(not(exists(parse_pebble(args[0])?, not(parse_value(args[1])?))))
        }
        "count>=" | "count=" => {
            arity(3)?;
            let (n, z, body) = (parse_count(args[0])?, parse_pebble(args[1])?, parse_value(args[2])?);
            Ok(if head == "count>=" { Rc::new(Formula::CountGe(n, z, body)) } else { count_eq(n, z, body) })
        }
        "count-tuples" => {
            arity(3)?;
            let n = parse_count(args[0])?;
            let ws = args[1]
                .list_iter()
                .ok_or_else(|| syntax("count-tuples expects a list of tally variables"))?
                .map(|w| match parse_var(w)? {
                    Var::W(i) => Ok(i),
                    Var::P(p) => Err(syntax(format!("{p} is not a tally variable"))),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(count_tuples(n, ws, parse_value(args[2])?))
        }
        _ => Err(syntax(format!("unknown operator {head}"))),
    }
}

/// Parses the S-expression syntax, e.g. `(exists x1 (and (= x1 w1) (E x1 x2)))`.
pub fn parse_formula(src: &str) -> Result<Node> {
    let value = lexpr::from_str(src).map_err(|e| {
        let (line, col) = e.location().map_or((0, 0), |l| (l.line(), l.column()));
        Error::Parse { line, col, msg: e.to_string() }
    })?;
    parse_value(&value)
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct FragmentReport {
    pub free: Vec<Var>,
    pub requantified: Vec<Pebble>,
    /// Every conjunction has at most one conjunct that contains a quantifier and has free variables.
    pub restricted_conjunction: bool,
    pub quantifier_rank: usize,
    /// Member of the restricted-conjunction counting logic over the alphabet.
    pub restricted_logic: bool,
    /// Member of the quantifier-rank-bounded counting logic (rank checked only when a bound was given).
    pub counting_logic: bool,
    /// No negation, no counting beyond `∃`, no tuple counting.
    pub existential_positive: bool,
}

#[derive(Default)]
struct Info {
    free: BTreeSet<Var>,
    bound: BTreeSet<Pebble>,
    requantified: BTreeSet<Pebble>,
    qr: usize,
    quantified: bool,
    restricted: bool,
    /// Shape of a non-counting formula of the restricted logic.
    non_counting: bool,
    /// Non-counting, or a disjunction of tuple counts over non-counting bodies.
    restricted_shape: bool,
    negation: bool,
    counting: bool,
    tuples: bool,
}

#[derive(Default)]
pub(crate) struct Analyzer {
    memo: HashMap<usize, Rc<Info>>,
}

impl Analyzer {
    fn info(&mut self, f: &Node) -> Rc<Info> {
        if let Some(i) = self.memo.get(&key(f)) {
            return i.clone();
        }
        let mut out = Info { restricted: true, ..Info::default() };
        let atom_vars = |out: &mut Info, a: Var, b: Var| {
            out.free.insert(a);
            out.free.insert(b);
        };
        match &**f {
            Formula::True | Formula::False => {
                out.non_counting = true;
            }
            Formula::Eq(a, b) => {
                atom_vars(&mut out, *a, *b);
                out.non_counting = true;
            }
            Formula::Edge(a, b) => {
                atom_vars(&mut out, *a, *b);
                out.non_counting = matches!((a, b), (Var::P(_), Var::P(_)));
            }
            Formula::Not(g) => {
                let c = self.info(g);
                out.absorb(&c);
                out.negation = true;
                out.non_counting = matches!(&**g, Formula::Eq(Var::P(_), Var::P(_)) | Formula::Edge(Var::P(_), Var::P(_)));
            }
            Formula::And(parts) | Formula::Or(parts) => {
                let infos: Vec<Rc<Info>> = parts.iter().map(|p| self.info(p)).collect();
                out.non_counting = true;
                for c in &infos {
                    out.absorb(c);
                    out.non_counting &= c.non_counting;
                }
                if matches!(&**f, Formula::And(_)) {
                    let heavy = infos.iter().filter(|c| c.quantified && !c.free.is_empty()).count();
                    out.restricted &= heavy <= 1;
                } else {
                    out.restricted_shape = infos.iter().all(|c| c.restricted_shape);
                }
            }
            Formula::Exists(z, g) | Formula::CountGe(_, z, g) => {
                let c = self.info(g);
                out.absorb(&c);
                out.free.remove(&Var::P(*z));
                if c.bound.contains(z) {
                    out.requantified.insert(*z);
                }
                out.bound.insert(*z);
                out.quantified = true;
                out.qr = c.qr + 1;
                match &**f {
                    Formula::CountGe(n, ..) => {
                        out.counting |= *n > 1;
                        out.non_counting = false;
                    }
                    _ => out.non_counting = c.non_counting && guard_of(*z, g).is_some(),
                }
            }
            Formula::CountTuples(_, ws, g) => {
                let c = self.info(g);
                out.absorb(&c);
                for w in ws {
                    out.free.remove(&Var::W(*w));
                }
                out.quantified = true;
                out.tuples = true;
                out.restricted_shape = c.non_counting;
            }
        }
        out.restricted_shape |= out.non_counting;
        let both: Vec<Pebble> = out.bound.iter().copied().filter(|p| out.free.contains(&Var::P(*p))).collect();
        out.requantified.extend(both);
        let info = Rc::new(out);
        self.memo.insert(key(f), info.clone());
        info
    }
}

impl Info {
    fn absorb(&mut self, c: &Info) {
        self.free.extend(c.free.iter().copied());
        self.bound.extend(c.bound.iter().copied());
        self.requantified.extend(c.requantified.iter().copied());
        self.qr = self.qr.max(c.qr);
        self.quantified |= c.quantified;
        self.restricted &= c.restricted;
        self.negation |= c.negation;
        self.counting |= c.counting;
        self.tuples |= c.tuples;
    }
}

/// Free variables of `f`, sorted.
pub fn free_variables(f: &Node) -> Vec<Var> {
    Analyzer::default().info(f).free.iter().copied().collect()
}

pub fn quantifier_rank(f: &Node) -> usize {
    Analyzer::default().info(f).qr
}

/// Requantification, restricted conjunction and fragment membership over `alphabet`, with the
/// quantifier rank bounded by `q` when given.
pub fn analyze(f: &Node, alphabet: Alphabet, q: Option<usize>) -> Result<FragmentReport> {
    let info = Analyzer::default().info(f);
    let pebbles = info.bound.iter().copied().chain(info.free.iter().filter_map(|v| match v {
        Var::P(p) => Some(*p),
        Var::W(_) => None,
    }));
    for p in pebbles {
        if !alphabet.contains(p) {
            return Err(Error::UnknownPebble(p.to_string()));
        }
    }
    let y_ok = info.requantified.iter().all(|p| p.is_x());
    let has_tally_free = info.free.iter().any(|v| matches!(v, Var::W(_)));
    Ok(FragmentReport {
        free: info.free.iter().copied().collect(),
        requantified: info.requantified.iter().copied().collect(),
        restricted_conjunction: info.restricted,
        quantifier_rank: info.qr,
        restricted_logic: y_ok && info.restricted && info.restricted_shape,
        counting_logic: y_ok && !info.tuples && !has_tally_free && q.is_none_or(|q| info.qr <= q),
        existential_positive: !info.negation && !info.counting && !info.tuples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(src: &str, k1: usize, k2: usize) -> FragmentReport {
        analyze(&parse_formula(src).unwrap(), Alphabet::raw(k1, k2), None).unwrap()
    }

    #[test]
    fn nested_requantification() {
        let r = report("(exists x1 (exists x1 (E x1 x1)))", 1, 0);
        assert_eq!(r.requantified, vec![Pebble::X(1)]);
        assert_eq!(r.quantifier_rank, 2);
        assert!(r.counting_logic && r.existential_positive);
    }

    #[test]
    fn parallel_scopes_are_not_requantification() {
        let r = report("(and (exists y1 (E y1 y1)) (exists y1 (= y1 y1)))", 0, 1);
        assert!(r.requantified.is_empty());
        assert!(r.counting_logic);
    }

    #[test]
    fn free_and_bound() {
        let r = report("(and (E x1 x2) (exists x1 (E x1 x2)))", 2, 0);
        assert_eq!(r.requantified, vec![Pebble::X(1)]);
        let y = report("(and (E y1 x1) (exists y1 (E y1 x1)))", 1, 1);
        assert_eq!(y.requantified, vec![Pebble::Y(1)]);
        assert!(!y.counting_logic);
    }

    #[test]
    fn restricted_conjunctions() {
        let ok = report("(count-tuples 2 (w1 w2) (exists x1 (and (= x1 w1) (E x1 x2) (exists y1 (and (= y1 w2) (E y1 x1))))))", 2, 1);
        assert!(ok.restricted_conjunction && ok.restricted_logic);
        assert_eq!(ok.free, vec![Var::P(Pebble::X(2))]);
        let two = report("(count-tuples 1 (w1 w2) (and (exists x1 (and (= x1 w1) (E x1 x2))) (exists y1 (and (= y1 w2) (E y1 x2)))))", 2, 1);
        assert!(!two.restricted_conjunction && !two.restricted_logic);
        let unguarded = report("(count-tuples 1 () (exists x1 (E x1 x2)))", 2, 0);
        assert!(unguarded.restricted_conjunction && !unguarded.restricted_logic);
    }

    #[test]
    fn alphabet_and_syntax_errors() {
        let f = parse_formula("(exists x3 true)").unwrap();
        assert!(matches!(analyze(&f, Alphabet::raw(2, 0), None), Err(Error::UnknownPebble(_))));
        assert!(matches!(parse_formula("(exists x1"), Err(Error::Parse { .. })));
        assert!(parse_formula("(frob x1)").is_err());
        assert!(parse_formula("(E x1)").is_err());
    }

    #[test]
    fn display_round_trips() {
        for src in ["(count>= 2 x1 (not (E x1 y1)))", "(count-tuples 3 (w1 w2) (or true (= x1 w2)))", "(and (= x1 x2) false)"] {
            let f = parse_formula(src).unwrap();
            assert_eq!(f.to_string(), src);
        }
        let q = analyze(&parse_formula("(count>= 2 x1 (exists x2 (E x1 x2)))").unwrap(), Alphabet::raw(2, 0), Some(1)).unwrap();
        assert!(!q.counting_logic && !q.existential_positive);
    }
}
