//! Reference values, each recomputed by a brute-force oracle local to this file.

use homlab::cfi::{build_cfi, parity_check};
use homlab::graph::{are_isomorphic, from_graph6, set_of, Graph, RelStructure};
use homlab::harness::enumerate_graphs;
use homlab::homcount::{hom, hom_profile, rat, spasm, sub_coefficients, sub_count, sub_via_coefficients};
use homlab::modelgames::{solve_all_in_one, solve_bijective_pebble, solve_exists_pebble};
use homlab::pursuit::{membership, pathwidth, solve_cr, solve_ns, GameClass, Outcome};

/// Counts maps V(f) -> V(g) preserving edges by trying all of them.
fn hom_by_maps(f: &Graph, g: &Graph) -> u128 {
    let (n, m) = (f.n(), g.n());
    let mut image = vec![0usize; n];
    let mut total = 0;
    loop {
        if f.edges().iter().all(|&(u, v)| g.has_edge(image[u], image[v])) {
            total += 1;
        }
        let mut i = 0;
        while i < n && image[i] + 1 == m {
            image[i] = 0;
            i += 1;
        }
        if i == n {
            return total;
        }
        image[i] += 1;
    }
}

/// Isomorphism by trying every permutation.
fn iso_by_permutations(a: &Graph, b: &Graph) -> bool {
    fn extend(a: &Graph, b: &Graph, perm: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let u = perm.len();
        if u == a.n() {
            return true;
        }
        for v in 0..b.n() {
            if used[v] || (0..u).any(|w| a.has_edge(u, w) != b.has_edge(v, perm[w])) {
                continue;
            }
            used[v] = true;
            perm.push(v);
            if extend(a, b, perm, used) {
                return true;
            }
            perm.pop();
            used[v] = false;
        }
        false
    }
    a.n() == b.n() && a.edge_count() == b.edge_count() && extend(a, b, &mut Vec::new(), &mut vec![false; b.n()])
}

fn two_triangles() -> Graph {
    Graph::cycle(3).disjoint_union(&Graph::cycle(3))
}

#[test]
fn hom_counts() {
    assert_eq!(hom(&Graph::cycle(4), &Graph::complete(3)), 18);
    assert_eq!(hom_by_maps(&Graph::cycle(4), &Graph::complete(3)), 18);
    let family = [Graph::complete(1), Graph::complete(2), Graph::complete(3)];
    assert_eq!(hom_profile(&family, &Graph::cycle(5)).counts, vec![5, 10, 0]);
    for f in enumerate_graphs(4, false).unwrap() {
        for g in enumerate_graphs(4, false).unwrap() {
            assert_eq!(hom(&f, &g), hom_by_maps(&f, &g));
        }
    }
}

#[test]
fn spasms_and_coefficients() {
    let p3 = Graph::path(3);
    let k2 = Graph::complete(2);
    let two_k2 = k2.disjoint_union(&k2);
    let matches = |family: Vec<Graph>, expected: &[&Graph]| {
        family.len() == expected.len() && expected.iter().all(|e| family.iter().any(|f| iso_by_permutations(f, e)))
    };
    assert!(matches(spasm(&p3), &[&p3, &k2]));
    assert!(matches(spasm(&two_k2), &[&two_k2, &p3, &k2]));

    let coeffs = sub_coefficients(&p3).unwrap();
    let coefficient_of = |h: &Graph| {
        coeffs.terms().iter().find(|(_, t)| iso_by_permutations(t.graph(), h)).map(|(c, _)| c.clone()).unwrap()
    };
    assert_eq!(coefficient_of(&p3), rat(1) / rat(2));
    assert_eq!(coefficient_of(&k2), rat(-1) / rat(2));
    let triangle = sub_coefficients(&Graph::complete(3)).unwrap();
    assert_eq!(triangle.terms().len(), 1);
    assert_eq!(triangle.terms()[0].0, rat(1) / rat(6));
    for g in enumerate_graphs(5, false).unwrap() {
        assert_eq!(sub_via_coefficients(&coeffs, &g), rat(sub_count(&p3, &g) as i64));
    }
}

#[test]
fn isomorphism_of_cycle_and_two_triangles() {
    assert!(are_isomorphic(&Graph::cycle(6), &two_triangles()).is_none());
    assert!(!iso_by_permutations(&Graph::cycle(6), &two_triangles()));
}

#[test]
fn searching_games() {
    let outcome = |g: &Graph, k1, k2| solve_ns(g, k1, k2).unwrap().outcome;
    assert_eq!(outcome(&Graph::path(5), 2, 0), Outcome::PursuersWin);
    let c4 = Graph::cycle(4);
    assert_eq!(outcome(&c4, 2, 0), Outcome::EvaderWins);
    assert_eq!(outcome(&c4, 3, 0), Outcome::PursuersWin);
    assert_eq!(outcome(&c4, 2, 1), Outcome::PursuersWin);
    assert_eq!(outcome(&Graph::complete(3), 0, 2), Outcome::EvaderWins);
    assert_eq!(pathwidth(&c4).unwrap(), Some(2));

    let two_c4 = c4.disjoint_union(&c4);
    assert!(!membership(&two_c4, GameClass::Path { k1: 2, k2: 1 }).unwrap());
    assert!(membership(&two_c4, GameClass::UnionPath { k1: 2, k2: 1 }).unwrap());

    let cops = |g: &Graph, k1, k2, q| solve_cr(g, k1, k2, q).unwrap().outcome;
    assert_eq!(cops(&Graph::path(3), 2, 0, 2), Outcome::PursuersWin);
    assert_eq!(cops(&Graph::path(3), 1, 1, 2), Outcome::PursuersWin);
    for q in 1..=5 {
        assert_eq!(cops(&Graph::complete(3), 2, 0, q), Outcome::EvaderWins);
        assert_eq!(cops(&Graph::complete(2), 1, 0, q), Outcome::EvaderWins);
    }
}

#[test]
fn cfi_graphs() {
    let k2 = build_cfi(&Graph::complete(2), 0).unwrap().graph;
    assert_eq!((k2.n(), k2.edge_count()), (2, 1));
    let c3 = Graph::cycle(3);
    let even = build_cfi(&c3, 0).unwrap().graph;
    let odd = build_cfi(&c3, set_of([1])).unwrap().graph;
    assert!(iso_by_permutations(&even, &two_triangles()));
    assert!(iso_by_permutations(&odd, &Graph::cycle(6)));
    assert!(!parity_check(&c3, 0, set_of([2])).unwrap());
    assert!(parity_check(&c3, set_of([0]), set_of([2])).unwrap());

    let c4 = Graph::cycle(4);
    let (x, x_twisted) = (build_cfi(&c4, 0).unwrap().graph, build_cfi(&c4, set_of([0])).unwrap().graph);
    assert_eq!(hom_by_maps(&c4, &x), 64);
    assert_eq!(hom_by_maps(&c4, &x_twisted), 48);
}

#[test]
fn model_games() {
    let s = RelStructure::from_graph;
    let (k2, k3) = (Graph::complete(2), Graph::complete(3));
    let winner = |a: &Graph, b: &Graph, k1, k2, q| format!("{:?}", solve_exists_pebble(&s(a), &s(b), k1, k2, q).unwrap().winner);
    assert_eq!(winner(&k2, &k3, 3, 0, None), "Duplicator");
    assert_eq!(winner(&k3, &k2, 2, 0, None), "Duplicator");
    assert_eq!(winner(&k3, &k2, 3, 0, None), "Spoiler");
    assert_eq!(winner(&k3, &k2, 0, 3, None), "Spoiler");

    let (c6, two_c3) = (Graph::cycle(6), two_triangles());
    let bp = |k1, k2, q| format!("{:?}", solve_bijective_pebble(&c6, &two_c3, k1, k2, q).unwrap().winner);
    assert_eq!(bp(3, 0, 3), "Spoiler");
    for q in 1..=4 {
        assert_eq!(bp(2, 0, q), "Duplicator");
    }

    let c4 = Graph::cycle(4);
    let (x, x_twisted) = (build_cfi(&c4, 0).unwrap().graph, build_cfi(&c4, set_of([0])).unwrap().graph);
    let verdict = solve_all_in_one(&s(&x), &s(&x_twisted), 2, 0, 6, true).unwrap();
    assert_eq!(format!("{:?}", verdict.winner), "Duplicator");
}

#[test]
fn graph6_decoding() {
    let g = from_graph6("D?{").unwrap();
    assert_eq!(g.n(), 5);
    assert_eq!(g.edge_count(), 4);
    assert!(iso_by_permutations(&g, &Graph::from_edges(5, &[(0, 4), (1, 4), (2, 4), (3, 4)]).unwrap()));
}

#[test]
fn enumeration_census() {
    let counts = |n, connected| enumerate_graphs(n, connected).unwrap().into_iter().filter(|g| g.n() == n).count();
    assert_eq!((1..=3).map(|n| counts(n, true)).collect::<Vec<_>>(), vec![1, 1, 2]);
    assert_eq!(counts(4, false), 11);
    assert_eq!(enumerate_graphs(4, false).unwrap().len(), 1 + 2 + 4 + 11);
}
