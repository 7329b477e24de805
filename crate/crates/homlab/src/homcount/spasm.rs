use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::lincomb::{hom_lincomb, LinComb, Rational};
use super::{automorphism_count, hom, inj_count};
use crate::error::{Error, Result};
use crate::graph::{are_isomorphic, invariant_key, Alphabet, Graph, LabeledGraph};

/// Representatives of the homomorphic images of `f` obtained by merging non-adjacent vertices.
/// Sorted by decreasing vertex count; `f` itself comes first.
pub fn spasm(f: &Graph) -> Vec<Graph> {
    let n = f.n();
    let mut out: Vec<Graph> = Vec::new();
    let mut buckets: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
    let mut class_of = vec![0usize; n];
    let mut emit = |class_of: &[usize], blocks: usize| {
        let q = f.quotient(class_of, blocks);
        let key = invariant_key(&q, &[]);
        let bucket = buckets.entry(key).or_default();
        if bucket.iter().all(|&i| are_isomorphic(&out[i], &q).is_none()) {
            bucket.push(out.len());
            out.push(q);
        }
    };
    restricted_growth(f, 0, 0, &mut class_of, &mut emit);
    out.sort_by_key(|g| (std::cmp::Reverse(g.n()), std::cmp::Reverse(g.edge_count())));
    out
}

fn restricted_growth(f: &Graph, v: usize, blocks: usize, class_of: &mut [usize], emit: &mut impl FnMut(&[usize], usize)) {
    if v == f.n() {
        emit(class_of, blocks);
        return;
    }
    for c in 0..=blocks {
        if (0..v).any(|u| class_of[u] == c && f.has_edge(u, v)) {
            continue;
        }
        class_of[v] = c;
        restricted_growth(f, v + 1, blocks.max(c + 1), class_of, emit);
    }
}

/// Number of (not necessarily induced) subgraphs of `g` isomorphic to `f`.
pub fn sub_count(f: &Graph, g: &Graph) -> u128 {
    inj_count(f, g) / automorphism_count(f)
}

/// Coefficients `α` with `sub(f, G) = Σ α(F) hom(F, G)` over `F ∈ spasm(f)`, obtained by
/// evaluating both sides on the spasm members and solving the resulting linear system.
pub fn sub_coefficients(f: &Graph) -> Result<LinComb> {
    let members = spasm(f);
    let m = members.len();
    let mut rows: Vec<Vec<Rational>> = members
        .iter()
        .map(|target| {
            let mut row: Vec<Rational> = members.iter().map(|src| int(hom(src, target))).collect();
            row.push(int(sub_count(f, target)));
            row
        })
        .collect();
    let alpha = solve(&mut rows, m)?;
    let alphabet = Alphabet::raw(0, 0);
    let terms = alpha.into_iter().zip(members).map(|(c, g)| (c, LabeledGraph::unlabeled(g, alphabet))).collect();
    Ok(LinComb::from_terms(terms))
}

/// Evaluates a subgraph-count combination on an unlabeled graph.
pub fn sub_via_coefficients(lc: &LinComb, g: &Graph) -> Rational {
    hom_lincomb(lc, &LabeledGraph::unlabeled(g.clone(), Alphabet::raw(0, 0))).expect("unlabeled terms")
}

fn int(x: u128) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

/// Gauss-Jordan elimination on an augmented `m × (m+1)` matrix.
fn solve(rows: &mut [Vec<Rational>], m: usize) -> Result<Vec<Rational>> {
    for col in 0..m {
        let pivot = (col..m).find(|&r| !rows[r][col].is_zero()).ok_or(Error::Singular)?;
        rows.swap(col, pivot);
        let p = rows[col][col].clone();
        for x in rows[col].iter_mut() {
            *x /= &p;
        }
        let pivot_row = rows[col].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let factor = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &factor * y;
                }
            }
        }
    }
    Ok(rows.iter().map(|r| r[m].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homcount::lincomb::rat;

    fn contains_iso(list: &[Graph], g: &Graph) -> bool {
        list.iter().any(|h| are_isomorphic(h, g).is_some())
    }

    #[test]
    fn spasm_examples() {
        assert_eq!(spasm(&Graph::complete(3)).len(), 1);
        let p3 = spasm(&Graph::path(3));
        assert_eq!(p3.len(), 2);
        assert!(contains_iso(&p3, &Graph::complete(2)));
        let two_k2 = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let s = spasm(&two_k2);
        assert_eq!(s.len(), 3);
        assert!(contains_iso(&s, &Graph::path(3)));
        assert!(contains_iso(&s, &Graph::complete(2)));
        assert_eq!(s[0], two_k2);
    }

    #[test]
    fn coefficient_examples() {
        let half = Rational::new(1.into(), 2.into());
        let k2 = sub_coefficients(&Graph::complete(2)).unwrap();
        assert_eq!(k2.len(), 1);
        assert_eq!(k2.terms()[0].0, half);

        let p3 = sub_coefficients(&Graph::path(3)).unwrap();
        let coef_of = |lc: &LinComb, g: &Graph| lc.terms().iter().find(|(_, h)| are_isomorphic(h.graph(), g).is_some()).map(|(c, _)| c.clone());
        assert_eq!(coef_of(&p3, &Graph::path(3)), Some(half.clone()));
        assert_eq!(coef_of(&p3, &Graph::complete(2)), Some(-half));

        let k3 = sub_coefficients(&Graph::complete(3)).unwrap();
        assert_eq!(k3.terms()[0].0, Rational::new(1.into(), 6.into()));
    }

    #[test]
    fn p3_identity_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let lc = sub_coefficients(&Graph::path(3)).unwrap();
        for _ in 0..20 {
            let n = rng.gen_range(1..=7);
            let mut g = Graph::empty(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.5) {
                        g.add_edge(u, v);
                    }
                }
            }
            let direct: i64 = (0..n).map(|v| (g.degree(v) * g.degree(v).saturating_sub(1) / 2) as i64).sum();
            assert_eq!(sub_via_coefficients(&lc, &g), rat(direct));
        }
    }
}
