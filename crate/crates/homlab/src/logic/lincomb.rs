use std::collections::HashSet;

use num_traits::{One, Zero};

use super::{guard_of, Analyzer, Formula, Mode, Node, Var};
use crate::decomp::{verify_construction_tree, ConstructionTree, CtNode, NodeTag};
use crate::error::{Error, Result};
use crate::graph::{labeled_isomorphic, Alphabet, MAX_VERTICES, Graph, LabeledGraph, Pebble};
use crate::homcount::{interpolation_polynomial, rat, LinComb, Rational};

const MAX_TERMS: usize = 4096;

/// A term graph together with a construction tree producing it.
#[derive(Clone)]
struct Built {
    nodes: Vec<CtNode>,
    root: usize,
    eliminations: bool,
}

impl Built {
    fn leaf(graph: LabeledGraph) -> Built {
        Built { nodes: vec![CtNode { graph, tag: NodeTag::Leaf, children: Vec::new() }], root: 0, eliminations: false }
    }

    fn graph(&self) -> &LabeledGraph {
        &self.nodes[self.root].graph
    }

    fn product(&self, other: &Built, caterpillar: bool) -> Result<Built> {
        let graph = self.graph().product(other.graph());
        if !self.eliminations && !other.eliminations {
            return Ok(Built::leaf(graph));
        }
        if caterpillar && self.eliminations && other.eliminations {
            return Err(Error::Fragment("conjunction of two quantified conjuncts".into()));
        }
        let offset = self.nodes.len();
        let mut nodes = self.nodes.clone();
        nodes.extend(other.nodes.iter().map(|n| CtNode { children: n.children.iter().map(|c| c + offset).collect(), ..n.clone() }));
        nodes.push(CtNode { graph, tag: NodeTag::Product, children: vec![self.root, other.root + offset] });
        Ok(Built { root: nodes.len() - 1, nodes, eliminations: true })
    }

    fn eliminate(&self, z: Pebble) -> Built {
        let graph = self.graph().relabel(z, None).expect("label in alphabet");
        let mut nodes = self.nodes.clone();
        nodes.push(CtNode { graph, tag: NodeTag::Elimination(z), children: vec![self.root] });
        Built { root: nodes.len() - 1, nodes, eliminations: true }
    }
}

type Terms = Vec<(Rational, Built)>;

fn merge(terms: Terms) -> Result<Terms> {
    let mut out: Terms = Vec::new();
    for (c, b) in terms {
        match out.iter_mut().find(|(_, o)| o.graph().n() == b.graph().n() && labeled_isomorphic(o.graph(), b.graph()).is_some()) {
            Some((k, _)) => *k += c,
            None => out.push((c, b)),
        }
    }
    out.retain(|(c, _)| !c.is_zero());
    if out.len() > MAX_TERMS {
        return Err(Error::Budget);
    }
    Ok(out)
}

struct Compiler {
    alphabet: Alphabet,
    mode: Mode,
    analyzer: Analyzer,
    tallies: HashSet<usize>,
}

impl Compiler {
    fn caterpillar(&self) -> bool {
        self.mode == Mode::Path
    }

    fn labeled(&self, g: Graph, labels: &[(Pebble, usize)]) -> Terms {
        vec![(Rational::one(), Built::leaf(LabeledGraph::with_labels(g, self.alphabet, labels).expect("labels in alphabet")))]
    }

    /// `I_L`: one isolated vertex per label, hom value 1 everywhere.
    fn one(&self, labels: &[Pebble]) -> Terms {
        let placed: Vec<(Pebble, usize)> = labels.iter().copied().zip(0..).collect();
        self.labeled(Graph::empty(labels.len()), &placed)
    }

    fn free_pebbles(&mut self, f: &Node) -> Vec<Pebble> {
        self.analyzer.info(f).free.iter().filter_map(|v| if let Var::P(p) = v { Some(*p) } else { None }).collect()
    }

    fn product(&self, a: &Terms, b: &Terms) -> Result<Terms> {
        let mut out = Vec::with_capacity(a.len() * b.len());
        for (c, x) in a {
            for (d, y) in b {
                if x.graph().n() + y.graph().n() > MAX_VERTICES {
                    return Err(Error::Budget);
                }
                out.push((c * d, x.product(y, self.caterpillar())?));
            }
        }
        merge(out)
    }

    fn sum(&self, a: Terms, b: Terms, scale_b: &Rational) -> Result<Terms> {
        merge(a.into_iter().chain(b.into_iter().map(|(c, t)| (c * scale_b, t))).collect())
    }

    fn pebbles(a: Var, b: Var) -> Result<(Pebble, Pebble)> {
        match (a, b) {
            (Var::P(p), Var::P(q)) => Ok((p, q)),
            _ => Err(Error::Fragment(format!("tally variable outside a guard: {a}, {b}"))),
        }
    }

    fn require_quantifier_free(&mut self, f: &Node, what: &str) -> Result<()> {
        if self.caterpillar() && self.analyzer.info(f).quantified {
            return Err(Error::Fragment(format!("{what} over a quantified formula: {f}")));
        }
        Ok(())
    }

    /// Sum over the values of `z` of the body's combination.
    fn summed(&mut self, z: Pebble, body: Terms) -> Result<Terms> {
        let marker = self.labeled(Graph::empty(1), &[(z, 0)]);
        let with_z = self.product(&body, &marker)?;
        merge(with_z.into_iter().map(|(c, b)| (c, b.eliminate(z))).collect())
    }

    fn compile(&mut self, f: &Node) -> Result<Terms> {
        match &**f {
            Formula::True => Ok(self.one(&[])),
            Formula::False => Ok(Vec::new()),
            Formula::Eq(a, b) => {
                let (p, q) = Self::pebbles(*a, *b)?;
                Ok(self.labeled(Graph::empty(1), &[(p, 0), (q, 0)]))
            }
            Formula::Edge(a, b) => {
                let (p, q) = Self::pebbles(*a, *b)?;
                if p == q {
                    return Ok(Vec::new());
                }
                Ok(self.labeled(Graph::complete(2), &[(p, 0), (q, 1)]))
            }
            Formula::Not(g) => {
                self.require_quantifier_free(g, "negation")?;
                let inner = self.compile(g)?;
                let labels = self.free_pebbles(g);
                self.sum(self.one(&labels), inner, &-Rational::one())
            }
            Formula::And(parts) => {
                let mut acc = self.one(&[]);
                for p in parts {
                    let next = self.compile(p)?;
                    acc = self.product(&acc, &next)?;
                }
                Ok(acc)
            }
            Formula::Or(parts) => {
                let mut none = self.one(&[]);
                for p in parts {
                    self.require_quantifier_free(p, "disjunction")?;
                    let labels = self.free_pebbles(p);
                    let inner = self.compile(p)?;
                    let negated = self.sum(self.one(&labels), inner, &-Rational::one())?;
                    none = self.product(&none, &negated)?;
                }
                self.sum(self.one(&[]), none, &-Rational::one())
            }
            Formula::Exists(z, body) => match self.mode {
                Mode::Path => self.guarded(*z, body),
                Mode::Tree { .. } => self.count_ge(1, *z, body),
            },
            Formula::CountGe(t, z, body) => match self.mode {
                Mode::Path => Err(Error::Fragment(format!("counting quantifier in a non-counting formula: {f}"))),
                Mode::Tree { .. } => self.count_ge(*t, *z, body),
            },
            Formula::CountTuples(..) => Err(Error::Fragment(format!("tuple counting has no linear combination: {f}"))),
        }
    }

    fn guarded(&mut self, z: Pebble, body: &Node) -> Result<Terms> {
        let tally = guard_of(z, body).ok_or_else(|| Error::Fragment(format!("unguarded quantifier over {z}")))?;
        if !self.tallies.insert(tally) {
            return Err(Error::Fragment(format!("tally variable w{tally} guards two quantifiers")));
        }
        let rest: Vec<Node> = match &**body {
            Formula::And(parts) => parts.iter().filter(|c| !matches!(&***c, Formula::Eq(Var::P(p), Var::W(_)) | Formula::Eq(Var::W(_), Var::P(p)) if *p == z)).cloned().collect(),
            _ => Vec::new(),
        };
        let inner = self.compile(&super::and(rest))?;
        self.summed(z, inner)
    }

    fn count_ge(&mut self, t: usize, z: Pebble, body: &Node) -> Result<Terms> {
        let Mode::Tree { order } = self.mode else { unreachable!("tree mode only") };
        let inner = self.compile(body)?;
        let tally = self.summed(z, inner)?;
        let below: Vec<Rational> = (0..t.min(order + 1)).map(|i| rat(i as i64)).collect();
        let above: Vec<Rational> = (t..=order).map(|i| rat(i as i64)).collect();
        let poly = interpolation_polynomial(&below, &above)?;
        let mut labels = self.free_pebbles(body);
        labels.retain(|&p| p != z);
        let mut power = self.one(&labels);
        let mut out = Vec::new();
        for (j, a) in poly.iter().enumerate() {
            if j > 0 {
                power = self.product(&power, &tally)?;
            }
            if !a.is_zero() {
                out = self.sum(out, power.clone(), a)?;
            }
        }
        Ok(out)
    }
}

fn alphabet_of(f: &Node) -> Alphabet {
    let info = Analyzer::default().info(f);
    let pebbles = info.bound.iter().copied().chain(info.free.iter().filter_map(|v| if let Var::P(p) = v { Some(*p) } else { None }));
    pebbles.fold(Alphabet::raw(0, 0), |a, p| match p {
        Pebble::X(i) => Alphabet::raw(a.k1.max(i), a.k2),
        Pebble::Y(i) => Alphabet::raw(a.k1, a.k2.max(i)),
    })
}

/// Linear combination of labeled graphs modelling `f`.
///
/// Path mode takes a non-counting formula of the restricted logic; the hom value is the number of
/// assignments to its free tally variables that satisfy it. Tree mode takes a formula of the
/// counting logic; the hom value is its truth value on graphs of the given order. Every term is
/// checked against a construction tree over the formula's alphabet (a caterpillar in path mode,
/// elimination depth at most the quantifier rank in tree mode).
pub fn lincomb_from_formula(f: &Node, mode: Mode) -> Result<LinComb> {
    let alphabet = alphabet_of(f);
    let mut analyzer = Analyzer::default();
    let info = analyzer.info(f);
    if info.requantified.iter().any(|p| p.is_y()) {
        return Err(Error::Fragment("a non-reusable variable is requantified".into()));
    }
    if mode == Mode::Path && !info.restricted {
        return Err(Error::Fragment("conjunction with two quantified conjuncts".into()));
    }
    let qr = info.qr;
    let mut compiler = Compiler { alphabet, mode, analyzer, tallies: HashSet::new() };
    let terms = compiler.compile(f)?;
    for (_, built) in &terms {
        let ct = ConstructionTree { nodes: built.nodes.clone(), root: built.root, caterpillar: mode == Mode::Path };
        let verdict = verify_construction_tree(&ct, built.graph(), alphabet.k1, alphabet.k2);
        if !verdict.ok {
            return Err(Error::TheoremViolation(format!("term outside the class: {}", verdict.diagnostic.unwrap_or_default())));
        }
        if matches!(mode, Mode::Tree { .. }) && verdict.depth > qr {
            return Err(Error::TheoremViolation(format!("term of elimination depth {} exceeds rank {qr}", verdict.depth)));
        }
    }
    Ok(LinComb::from_terms(terms.into_iter().map(|(c, b)| (c, b.graph().clone())).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homcount::hom_lincomb;
    use crate::logic::{count_solutions, evaluate, parse_formula};

    fn graphs(n: usize) -> Vec<Graph> {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        (0u32..1 << pairs.len())
            .map(|mask| {
                let es: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| *e).collect();
                Graph::from_edges(n, &es).unwrap()
            })
            .collect()
    }

    #[test]
    fn atoms() {
        let same = lincomb_from_formula(&parse_formula("(= x1 x2)").unwrap(), Mode::Path).unwrap();
        assert_eq!(same.len(), 1);
        assert_eq!(same.terms()[0].1.n(), 1);
        assert_eq!(same.terms()[0].1.label_set(), vec![Pebble::X(1), Pebble::X(2)]);
        assert!(lincomb_from_formula(&parse_formula("(E x1 x1)").unwrap(), Mode::Path).unwrap().is_empty());
    }

    #[test]
    fn path_mode_counts_solutions() {
        let f = parse_formula("(and (not (= x1 x2)) (exists x2 (and (= x2 w1) (E x1 x2) (not (E x2 x3)))))").unwrap();
        let lc = lincomb_from_formula(&f, Mode::Path).unwrap();
        for n in 1..=4 {
            for g in graphs(n) {
                for (a, b, c) in (0..n * n * n).map(|i| (i % n, i / n % n, i / n / n)) {
                    let labels = [(Pebble::X(1), a), (Pebble::X(2), b), (Pebble::X(3), c)];
                    let lg = LabeledGraph::with_labels(g.clone(), Alphabet::raw(3, 0), &labels).unwrap();
                    assert_eq!(hom_lincomb(&lc, &lg).unwrap(), rat(count_solutions(&f, &lg, &[1]).unwrap() as i64));
                }
            }
        }
    }

    #[test]
    fn path_mode_rejects_non_primitive_shapes() {
        for src in [
            "(count>= 2 x1 (E x1 x1))",
            "(exists x1 (E x1 x2))",
            "(or (exists x1 (and (= x1 w1) (E x1 x2))) (E x1 x2))",
            "(exists x1 (and (= x1 w1) (exists x2 (and (= x2 w1) (E x1 x2)))))",
        ] {
            assert!(matches!(lincomb_from_formula(&parse_formula(src).unwrap(), Mode::Path), Err(Error::Fragment(_))), "{src}");
        }
    }

    #[test]
    fn tree_mode_models_sentences() {
        let order = 3;
        for src in ["(count>= 2 x1 (exists x2 (E x1 x2)))", "(not (exists x1 (count>= 2 x2 (E x1 x2))))", "(or (exists y1 (forall x1 (not (E x1 y1)))) (count>= 3 x1 true))"] {
            let f = parse_formula(src).unwrap();
            let lc = lincomb_from_formula(&f, Mode::Tree { order }).unwrap();
            for g in graphs(order) {
                let lg = LabeledGraph::unlabeled(g, Alphabet::raw(2, 1));
                let expected = rat(i64::from(evaluate(&f, &lg).unwrap()));
                assert_eq!(hom_lincomb(&lc, &lg).unwrap(), expected, "{src}");
            }
        }
    }
}
