use num_traits::{One, Zero};

use super::lincomb::{LinComb, Rational};
use crate::error::{Error, Result};
use crate::graph::LabeledGraph;

/// Coefficients `a_0, a_1, …` of the least-degree polynomial that is 0 on `s_minus` and 1 on `s_plus`.
pub fn interpolation_polynomial(s_minus: &[Rational], s_plus: &[Rational]) -> Result<Vec<Rational>> {
    if s_minus.iter().any(|a| s_plus.contains(a)) {
        return Err(Error::invalid("interpolation point sets overlap"));
    }
    let mut points: Vec<Rational> = s_minus.iter().chain(s_plus).cloned().collect();
    points.sort();
    points.dedup();
    let mut poly = vec![Rational::zero(); points.len().max(1)];
    for a in s_plus {
        let mut basis = vec![Rational::one()];
        for b in points.iter().filter(|b| *b != a) {
            let denom = a - b;
            let mut next = vec![Rational::zero(); basis.len() + 1];
            for (j, c) in basis.iter().enumerate() {
                next[j + 1] += c / &denom;
                next[j] -= c * b / &denom;
            }
            basis = next;
        }
        for (j, c) in basis.into_iter().enumerate() {
            poly[j] += c;
        }
    }
    Ok(poly)
}

/// Combination of powers `f^j` whose hom value is 1 where `hom(f,·) ∈ s_plus` and 0 where it lies in `s_minus`.
pub fn interpolate(f: &LabeledGraph, s_minus: &[Rational], s_plus: &[Rational]) -> Result<LinComb> {
    let poly = interpolation_polynomial(s_minus, s_plus)?;
    let terms = poly.into_iter().enumerate().map(|(j, c)| (c, f.power(j))).collect();
    Ok(LinComb::from_terms(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Alphabet, Graph, Pebble};
    use crate::homcount::lincomb::rat;
    use crate::homcount::{hom_count, hom_lincomb};

    fn labeled_edge() -> LabeledGraph {
        let a = Alphabet::new(2, 0).unwrap();
        LabeledGraph::with_labels(Graph::complete(2), a, &[(Pebble::X(1), 0), (Pebble::X(2), 1)]).unwrap()
    }

    #[test]
    fn identity_polynomial() {
        let f = labeled_edge();
        let lc = interpolate(&f, &[rat(0)], &[rat(1)]).unwrap();
        assert_eq!(lc.terms(), &[(rat(1), f)]);
    }

    #[test]
    fn one_minus_x() {
        let f = labeled_edge();
        let lc = interpolate(&f, &[rat(1)], &[rat(0)]).unwrap();
        assert_eq!(lc.terms(), &[(rat(1), f.label_skeleton()), (rat(-1), f)]);
    }

    #[test]
    fn three_points() {
        let a = Alphabet::new(1, 0).unwrap();
        let f = LabeledGraph::with_labels(Graph::complete(2), a, &[(Pebble::X(1), 0)]).unwrap();
        let lc = interpolate(&f, &[rat(0), rat(2)], &[rat(1)]).unwrap();
        let with_deg = |g: Graph, v: usize| LabeledGraph::with_labels(g, a, &[(Pebble::X(1), v)]).unwrap();
        let targets = [with_deg(Graph::path(2), 0), with_deg(Graph::empty(1), 0), with_deg(Graph::path(3), 1)];
        for (g, (h, e)) in targets.iter().zip([(1, 1), (0, 0), (2, 0)]) {
            assert_eq!(hom_count(&f, g).unwrap(), h);
            assert_eq!(hom_lincomb(&lc, g).unwrap(), rat(e));
        }
        assert!(interpolate(&f, &[rat(1)], &[rat(1)]).is_err());
    }
}
