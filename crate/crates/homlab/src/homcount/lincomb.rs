use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::hom_count;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{labeled_isomorphic, Alphabet, Graph, LabeledGraph, Pebble};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Serialized term: the coefficient as a decimal fraction string such as `"-3/2"`.
#[derive(Serialize, Deserialize)]
struct TermForm {
    coef: String,
    graph: LabeledGraph,
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct LinCombForm {
    terms: Vec<TermForm>,
}

impl From<LinComb> for LinCombForm {
    fn from(lc: LinComb) -> Self {
        LinCombForm { terms: lc.terms.into_iter().map(|(c, graph)| TermForm { coef: c.to_string(), graph }).collect() }
    }
}

impl TryFrom<LinCombForm> for LinComb {
    type Error = Error;

    fn try_from(f: LinCombForm) -> Result<LinComb> {
        let terms = f
            .terms
            .into_iter()
            .map(|t| {
                let c: Rational = t.coef.parse().map_err(|_| Error::invalid(format!("bad coefficient {:?}", t.coef)))?;
                Ok((c, t.graph))
            })
            .collect::<Result<_>>()?;
        Ok(LinComb::from_terms(terms))
    }
}

/// Finite formal combination `Σ c_i F_i` of labeled graphs with nonzero rational coefficients.
#[derive(Clone, PartialEq, Debug, Default, Serialize, Deserialize)]
#[serde(into = "LinCombForm", try_from = "LinCombForm")]
pub struct LinComb {
    terms: Vec<(Rational, LabeledGraph)>,
}

impl LinComb {
    pub fn zero() -> LinComb {
        LinComb::default()
    }

    pub fn single(coef: Rational, g: LabeledGraph) -> LinComb {
        LinComb::from_terms(vec![(coef, g)])
    }

    pub fn graph(g: LabeledGraph) -> LinComb {
        LinComb::single(Rational::one(), g)
    }

    /// Zero coefficients are dropped.
    pub fn from_terms(terms: Vec<(Rational, LabeledGraph)>) -> LinComb {
        LinComb { terms: terms.into_iter().filter(|(c, _)| !c.is_zero()).collect() }
    }

    pub fn terms(&self) -> &[(Rational, LabeledGraph)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Union of the label sets of the terms.
    pub fn label_set(&self) -> Vec<Pebble> {
        let mut out: Vec<Pebble> = self.terms.iter().flat_map(|(_, g)| g.label_set()).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn add(&self, other: &LinComb) -> LinComb {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        LinComb::from_terms(terms).simplify()
    }

    pub fn scale(&self, c: &Rational) -> LinComb {
        LinComb::from_terms(self.terms.iter().map(|(k, g)| (k * c, g.clone())).collect())
    }

    pub fn neg(&self) -> LinComb {
        self.scale(&-Rational::one())
    }

    /// Bilinear extension of the labeled graph product.
    pub fn product(&self, other: &LinComb) -> LinComb {
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for (a, f) in &self.terms {
            for (b, g) in &other.terms {
                terms.push((a * b, f.product(g)));
            }
        }
        LinComb::from_terms(terms).simplify()
    }

    /// Applies `F ↦ F[z → ⊥]` to every term.
    pub fn delete_label(&self, z: Pebble) -> LinComb {
        let terms = self
            .terms
            .iter()
            .map(|(c, g)| (c.clone(), if g.alphabet().contains(z) { g.relabel(z, None).expect("valid pebble") } else { g.clone() }))
            .collect();
        LinComb::from_terms(terms).simplify()
    }

    /// Merges labeled-isomorphic terms and drops cancelled ones.
    pub fn simplify(&self) -> LinComb {
        let mut merged: Vec<(Rational, LabeledGraph)> = Vec::new();
        for (c, g) in &self.terms {
            match merged.iter_mut().find(|(_, h)| h.n() == g.n() && labeled_isomorphic(g, h).is_some()) {
                Some((k, _)) => *k += c,
                None => merged.push((c.clone(), g.clone())),
            }
        }
        LinComb::from_terms(merged)
    }

    /// The constant combination `1·I` with `I` the empty graph.
    pub fn one(alphabet: Alphabet) -> LinComb {
        LinComb::graph(LabeledGraph::unlabeled(Graph::empty(0), alphabet))
    }
}

/// `Σ c_i hom(F_i, g)`.
pub fn hom_lincomb(lc: &LinComb, g: &LabeledGraph) -> Result<Rational> {
    let mut total = Rational::zero();
    for (c, f) in lc.terms() {
        let h = hom_count(f, g)?;
        total += c * Rational::from_integer(BigInt::from(h));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linearity() {
        let a = Alphabet::raw(0, 0);
        let k1 = LabeledGraph::unlabeled(Graph::empty(1), a);
        let g = LabeledGraph::unlabeled(Graph::cycle(5), a);
        assert_eq!(hom_lincomb(&LinComb::zero(), &g).unwrap(), rat(0));
        let two = LinComb::from_terms(vec![(rat(1), k1.clone()), (rat(1), k1.clone())]);
        assert_eq!(hom_lincomb(&two, &g).unwrap(), rat(10));
        assert_eq!(two.simplify().len(), 1);
    }

    #[test]
    fn negation_pattern() {
        let a = Alphabet::new(2, 0).unwrap();
        let x = [Pebble::X(1), Pebble::X(2)];
        let f = LabeledGraph::with_labels(Graph::complete(2), a, &[(x[0], 0), (x[1], 1)]).unwrap();
        let i = f.label_skeleton();
        let lc = LinComb::from_terms(vec![(rat(-1), f), (rat(1), i)]);
        let g = LabeledGraph::with_labels(Graph::path(3), a, &[(x[0], 0), (x[1], 1)]).unwrap();
        assert_eq!(hom_lincomb(&lc, &g).unwrap(), rat(0));
    }
}
