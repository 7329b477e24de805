use std::collections::HashMap;

use super::{key, Analyzer, Formula, Node, Var};
use crate::error::{Error, Result};
use crate::graph::{Graph, LabeledGraph};

struct Evaluator<'g> {
    g: &'g Graph,
    analyzer: Analyzer,
    env: HashMap<Var, usize>,
    memo: HashMap<(usize, Vec<usize>), bool>,
}

impl Evaluator<'_> {
    fn value(&self, v: Var) -> usize {
        self.env[&v]
    }

    /// Runs `body` with `v` bound to `value`, restoring the previous binding afterwards.
    fn with<T>(&mut self, v: Var, value: usize, body: impl FnOnce(&mut Self) -> T) -> T {
        let old = self.env.insert(v, value);
        let out = body(self);
        match old {
            Some(o) => self.env.insert(v, o),
            None => self.env.remove(&v),
        };
        out
    }

    fn eval(&mut self, f: &Node) -> bool {
        match &**f {
            Formula::True => return true,
            Formula::False => return false,
            Formula::Eq(a, b) => return self.value(*a) == self.value(*b),
            Formula::Edge(a, b) => return self.g.has_edge(self.value(*a), self.value(*b)),
            Formula::Not(g) => return !self.eval(g),
            Formula::And(parts) => return parts.iter().all(|p| self.eval(p)),
            Formula::Or(parts) => return parts.iter().any(|p| self.eval(p)),
            _ => {}
        }
        let free = self.analyzer.info(f);
        let point: Vec<usize> = free.free.iter().map(|v| self.value(*v)).collect();
        let memo_key = (key(f), point);
        if let Some(&b) = self.memo.get(&memo_key) {
            return b;
        }
        let n = self.g.n();
        let out = match &**f {
            Formula::True | Formula::False | Formula::Eq(..) | Formula::Edge(..) | Formula::Not(_) | Formula::And(_) | Formula::Or(_) => {
                unreachable!("handled above")
            }
            Formula::Exists(z, g) => (0..n).any(|v| self.with(Var::P(*z), v, |e| e.eval(g))),
            Formula::CountGe(t, z, g) => {
                let mut hits = 0;
                for v in 0..n {
                    if self.with(Var::P(*z), v, |e| e.eval(g)) {
                        hits += 1;
                        if hits >= *t {
                            break;
                        }
                    }
                }
                hits >= *t
            }
            Formula::CountTuples(t, ws, g) => self.tuples(ws, g) == *t as u128,
        };
        self.memo.insert(memo_key, out);
        out
    }

    fn tuples(&mut self, ws: &[usize], g: &Node) -> u128 {
        let Some((&w, rest)) = ws.split_first() else {
            return u128::from(self.eval(g));
        };
        (0..self.g.n()).map(|v| self.with(Var::W(w), v, |e| e.tuples(rest, g))).sum()
    }
}

fn evaluator<'g>(f: &Node, g: &'g LabeledGraph, tallies: &[usize]) -> Result<Evaluator<'g>> {
    let mut analyzer = Analyzer::default();
    let mut env = HashMap::new();
    for v in analyzer.info(f).free.iter() {
        match v {
            Var::P(p) => {
                env.insert(*v, g.label(*p).ok_or_else(|| Error::UnboundVariable(p.to_string()))?);
            }
            Var::W(w) if !tallies.contains(w) => return Err(Error::UnboundVariable(v.to_string())),
            Var::W(_) => {}
        }
    }
    Ok(Evaluator { g: g.graph(), analyzer, env, memo: HashMap::new() })
}

/// `g, ν_g ⊨ f`, with free pebble variables read from the labels of `g`.
pub fn evaluate(f: &Node, g: &LabeledGraph) -> Result<bool> {
    let mut e = evaluator(f, g, &[])?;
    Ok(e.eval(f))
}

/// Number of assignments to the listed tally variables under which `f` holds.
pub fn count_solutions(f: &Node, g: &LabeledGraph, tallies: &[usize]) -> Result<u128> {
    let mut e = evaluator(f, g, tallies)?;
    Ok(e.tuples(tallies, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Alphabet, Pebble};
    use crate::logic::parse_formula;

    fn unlabeled(g: Graph) -> LabeledGraph {
        LabeledGraph::unlabeled(g, Alphabet::raw(2, 1))
    }

    #[test]
    fn no_loops() {
        let f = parse_formula("(count>= 1 x1 (E x1 x1))").unwrap();
        assert!(!evaluate(&f, &unlabeled(Graph::complete(3))).unwrap());
    }

    #[test]
    fn counting_vertices() {
        for k in 0..6 {
            let f = parse_formula(&format!("(count>= {k} x1 true)")).unwrap();
            assert_eq!(evaluate(&f, &unlabeled(Graph::cycle(4))).unwrap(), k <= 4);
        }
        let two_leaves = parse_formula("(count= 2 x1 (count= 1 x2 (E x1 x2)))").unwrap();
        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(!evaluate(&two_leaves, &unlabeled(star)).unwrap());
        assert!(evaluate(&two_leaves, &unlabeled(Graph::path(4))).unwrap());
    }

    #[test]
    fn free_variables_come_from_labels() {
        let f = parse_formula("(exists x2 (E x1 x2))").unwrap();
        let g = unlabeled(Graph::empty(2).disjoint_union(&Graph::complete(2)));
        assert!(matches!(evaluate(&f, &g), Err(Error::UnboundVariable(_))));
        assert!(!evaluate(&f, &g.relabel(Pebble::X(1), Some(0)).unwrap()).unwrap());
        assert!(evaluate(&f, &g.relabel(Pebble::X(1), Some(2)).unwrap()).unwrap());
    }

    #[test]
    fn tally_counting() {
        let f = parse_formula("(exists x2 (and (= x2 w1) (E x1 x2)))").unwrap();
        let g = LabeledGraph::with_labels(Graph::path(3), Alphabet::raw(2, 0), &[(Pebble::X(1), 1)]).unwrap();
        assert_eq!(count_solutions(&f, &g, &[1]).unwrap(), 2);
        assert!(evaluate(&f, &g).is_err());
        let s = parse_formula("(count-tuples 4 (w1 w2) (exists x1 (and (= x1 w1) (exists x2 (and (= x2 w2) (E x1 x2))))))").unwrap();
        assert!(evaluate(&s, &g).unwrap());
    }
}
