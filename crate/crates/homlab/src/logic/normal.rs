use super::{and, exists, falsity, guard_of, or, Analyzer, Formula, Node, Var};
use crate::error::{Error, Result};
use crate::graph::Pebble;

const MAX_DISJUNCTS: usize = 1 << 16;

/// Disjunction-free formulas whose disjunction is equivalent to the non-counting formula `f`.
/// Guarded quantifiers and conjunctions distribute over disjunctions.
pub fn primitive_disjuncts(f: &Node) -> Result<Vec<Node>> {
    Ok(match &**f {
        Formula::False => Vec::new(),
        Formula::True | Formula::Eq(..) | Formula::Edge(..) => vec![f.clone()],
        Formula::Not(g) if matches!(&**g, Formula::Eq(..) | Formula::Edge(..)) => vec![f.clone()],
        Formula::Not(_) => return Err(Error::Fragment(format!("negation of a compound formula: {f}"))),
        Formula::Or(parts) => {
            let mut out = Vec::new();
            for p in parts {
                out.extend(primitive_disjuncts(p)?);
            }
            out
        }
        Formula::And(parts) => {
            let mut acc: Vec<Vec<Node>> = vec![Vec::new()];
            for p in parts {
                let options = primitive_disjuncts(p)?;
                if acc.len() * options.len() > MAX_DISJUNCTS {
                    return Err(Error::Budget);
                }
                acc = acc.iter().flat_map(|prefix| options.iter().map(move |o| [prefix.clone(), vec![o.clone()]].concat())).collect();
            }
            acc.into_iter().map(and).collect()
        }
        Formula::Exists(z, body) if guard_of(*z, body).is_some() => {
            primitive_disjuncts(body)?.into_iter().map(|d| exists(*z, d)).collect()
        }
        _ => return Err(Error::Fragment(format!("not a non-counting formula: {f}"))),
    })
}

/// Removes every guarded `∃y` from a disjunction-free formula, returning the stripped formula and
/// the guards `(y, tally)` it removed.
fn strip_y(f: &Node, guards: &mut Vec<(Pebble, usize)>) -> Node {
    match &**f {
        Formula::Exists(z @ Pebble::Y(_), body) => {
            guards.push((*z, guard_of(*z, body).expect("guarded")));
            let inner = match &**body {
                Formula::And(parts) => and(parts.iter().filter(|c| !is_guard_of(*z, c)).cloned().collect()),
                _ => super::truth(),
            };
            strip_y(&inner, guards)
        }
        Formula::Exists(z, body) => exists(*z, strip_y(body, guards)),
        Formula::And(parts) => and(parts.iter().map(|p| strip_y(p, guards)).collect()),
        _ => f.clone(),
    }
}

fn is_guard_of(z: Pebble, c: &Node) -> bool {
    matches!(&**c, Formula::Eq(Var::P(p), Var::W(_)) | Formula::Eq(Var::W(_), Var::P(p)) if *p == z)
}

/// `∃y_1…∃y_k (⋀ y_i = w_{ℓ_i} ∧ χ)` with every y-quantifier in front.
fn pull_y(f: &Node) -> Node {
    let mut guards = Vec::new();
    let chi = strip_y(f, &mut guards);
    guards.sort();
    let mut body: Vec<Node> = guards.iter().map(|&(y, w)| super::eq(Var::P(y), Var::W(w))).collect();
    body.push(chi);
    guards.iter().rev().fold(and(body), |acc, &(y, _)| exists(y, acc))
}

/// Rewrites a sentence of the restricted-conjunction logic into a disjunction of tuple counts
/// whose bodies are disjunction-free with all y-quantifiers in front.
///
/// A count over a body that stays a proper disjunction is rejected: the exact count of a union
/// is not a disjunction of counts of its parts.
pub fn to_primitive_normal_form(f: &Node) -> Result<Node> {
    match &**f {
        Formula::Or(parts) => Ok(or(parts.iter().map(to_primitive_normal_form).collect::<Result<Vec<_>>>()?)),
        Formula::CountTuples(n, ws, body) => {
            let mut analyzer = Analyzer::default();
            let info = analyzer.info(body);
            if info.requantified.iter().any(|p| p.is_y()) || !info.restricted {
                return Err(Error::Fragment(format!("body outside the restricted logic: {body}")));
            }
            let mut ds = primitive_disjuncts(body)?;
            let inner = match ds.len() {
                0 => falsity(),
                1 => pull_y(&ds.pop().expect("one disjunct")),
                k => return Err(Error::Fragment(format!("count over a disjunction of {k} incompatible primitive parts"))),
            };
            Ok(super::count_tuples(*n, ws.clone(), inner))
        }
        _ => Err(Error::Fragment(format!("expected a disjunction of tuple counts: {f}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Alphabet, Graph, LabeledGraph};
    use crate::logic::{evaluate, parse_formula};

    fn all_graphs(max_n: usize) -> Vec<Graph> {
        let mut out = Vec::new();
        for n in 1..=max_n {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            for mask in 0u32..1 << pairs.len() {
                let es: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| *e).collect();
                out.push(Graph::from_edges(n, &es).unwrap());
            }
        }
        out
    }

    fn equivalent(a: &Node, b: &Node) {
        for g in all_graphs(4) {
            let g = LabeledGraph::unlabeled(g, Alphabet::raw(2, 2));
            assert_eq!(evaluate(a, &g).unwrap(), evaluate(b, &g).unwrap(), "{a} vs {b}");
        }
    }

    #[test]
    fn primitive_input_is_kept() {
        let f = parse_formula("(count-tuples 2 (w1) (exists x1 (and (= x1 w1) (E x1 x1))))").unwrap();
        let p = to_primitive_normal_form(&f).unwrap();
        assert_eq!(p.to_string(), f.to_string());
    }

    #[test]
    fn existential_pushed_through_disjunction() {
        let f = parse_formula("(exists x1 (and (= x1 w1) (or (E x1 x2) (= x1 x2))))").unwrap();
        let ds = primitive_disjuncts(&f).unwrap();
        let shown: Vec<String> = ds.iter().map(|d| d.to_string()).collect();
        assert_eq!(shown, ["(exists x1 (and (= x1 w1) (E x1 x2)))", "(exists x1 (and (= x1 w1) (= x1 x2)))"]);
        let s = parse_formula("(or (count-tuples 0 (w1) (exists x1 (and (= x1 w1) (E x1 x1)))) (count-tuples 3 () false))").unwrap();
        equivalent(&s, &to_primitive_normal_form(&s).unwrap());
    }

    #[test]
    fn y_quantifiers_move_to_the_front() {
        let f = parse_formula(
            "(count-tuples 6 (w1 w2 w3) (exists x1 (and (= x1 w1) (exists y2 (and (= y2 w2) (E x1 y2) (exists x1 (and (= x1 w3) (exists y1 (and (= y1 w3) (E x1 y2))))))))))",
        )
        .unwrap();
        let p = to_primitive_normal_form(&f).unwrap();
        assert!(p.to_string().starts_with("(count-tuples 6 (w1 w2 w3) (exists y1 (exists y2 (and (= y1 w3) (= y2 w2)"));
        equivalent(&f, &p);
        let distributed = parse_formula("(count-tuples 4 (w1 w2) (and (exists y1 (and (= y1 w1) (E y1 y1))) (or true false)))").unwrap();
        equivalent(&distributed, &to_primitive_normal_form(&distributed).unwrap());
    }

    #[test]
    fn counted_unions_are_rejected() {
        let f = parse_formula("(count-tuples 2 (w1) (exists x1 (and (= x1 w1) (or (E x1 x2) (= x1 x2)))))").unwrap();
        assert!(matches!(to_primitive_normal_form(&f), Err(Error::Fragment(_))));
        assert!(to_primitive_normal_form(&parse_formula("(E x1 x2)").unwrap()).is_err());
    }
}
