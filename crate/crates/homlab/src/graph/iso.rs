use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

use super::{bit, members, Graph, LabeledGraph, VSet};

/// Isomorphism test with a verified witness `perm` (vertex `v` of `g` maps to `perm[v]` of `h`).
pub fn are_isomorphic(g: &Graph, h: &Graph) -> Option<Vec<usize>> {
    find_isomorphism(g, h)
}

pub fn find_isomorphism(g: &Graph, h: &Graph) -> Option<Vec<usize>> {
    find_colored_isomorphism(g, &vec![0; g.n()], h, &vec![0; h.n()])
}

/// Isomorphism preserving labels exactly (same pebble set on corresponding vertices).
pub fn labeled_isomorphic(a: &LabeledGraph, b: &LabeledGraph) -> Option<Vec<usize>> {
    if a.alphabet() != b.alphabet() {
        let joined = a.alphabet().join(b.alphabet());
        return labeled_isomorphic(&a.widen(joined), &b.widen(joined));
    }
    find_colored_isomorphism(a.graph(), &a.label_colors(), b.graph(), &b.label_colors())
}

/// Colour-preserving isomorphism by joint colour refinement with individualization.
pub fn find_colored_isomorphism(g: &Graph, cg: &[u64], h: &Graph, ch: &[u64]) -> Option<Vec<usize>> {
    let n = g.n();
    if n != h.n() || g.edge_count() != h.edge_count() {
        return None;
    }
    let mut ids: BTreeMap<(u64, usize), usize> = BTreeMap::new();
    for v in 0..n {
        ids.entry((cg[v], g.degree(v))).or_insert(0);
        ids.entry((ch[v], h.degree(v))).or_insert(0);
    }
    for (i, val) in ids.values_mut().enumerate() {
        *val = i;
    }
    let a: Vec<usize> = (0..n).map(|v| ids[&(cg[v], g.degree(v))]).collect();
    let b: Vec<usize> = (0..n).map(|v| ids[&(ch[v], h.degree(v))]).collect();
    let map = individualize(g, h, a, b, ids.len())?;
    verify(g, cg, h, ch, &map).then_some(map)
}

fn individualize(g: &Graph, h: &Graph, a: Vec<usize>, b: Vec<usize>, classes: usize) -> Option<Vec<usize>> {
    let (a, b, classes) = refine(g, h, a, b, classes)?;
    let n = g.n();
    let sizes = histogram(&a, classes);
    let target = (0..n).filter(|&v| sizes[a[v]] > 1).min_by_key(|&v| (sizes[a[v]], v));
    let Some(v) = target else {
        let mut of_class = vec![0; classes];
        for w in 0..n {
            of_class[b[w]] = w;
        }
        let map: Vec<usize> = (0..n).map(|v| of_class[a[v]]).collect();
        return (0..n).all(|u| (0..n).all(|x| g.has_edge(u, x) == h.has_edge(map[u], map[x]))).then_some(map);
    };
    for w in (0..n).filter(|&w| b[w] == a[v]) {
        let mut a2 = a.clone();
        let mut b2 = b.clone();
        a2[v] = classes;
        b2[w] = classes;
        if let Some(map) = individualize(g, h, a2, b2, classes + 1) {
            return Some(map);
        }
    }
    None
}

fn verify(g: &Graph, cg: &[u64], h: &Graph, ch: &[u64], map: &[usize]) -> bool {
    let n = g.n();
    let mut seen: VSet = 0;
    for v in 0..n {
        if map[v] >= n || seen & bit(map[v]) != 0 || cg[v] != ch[map[v]] {
            return false;
        }
        seen |= bit(map[v]);
    }
    (0..n).all(|u| (0..n).all(|v| g.has_edge(u, v) == h.has_edge(map[u], map[v])))
}

type Refined = (Vec<usize>, Vec<usize>, usize);

/// Joint colour refinement to the stable partition; `None` once the colour histograms differ.
fn refine(g: &Graph, h: &Graph, mut a: Vec<usize>, mut b: Vec<usize>, mut classes: usize) -> Option<Refined> {
    let n = g.n();
    loop {
        if histogram(&a, classes) != histogram(&b, classes) {
            return None;
        }
        let sig = |gr: &Graph, col: &[usize], v: usize| {
            let mut nb: Vec<usize> = members(gr.neighbors(v)).map(|u| col[u]).collect();
            nb.sort_unstable();
            (col[v], nb)
        };
        let sa: Vec<_> = (0..n).map(|v| sig(g, &a, v)).collect();
        let sb: Vec<_> = (0..n).map(|v| sig(h, &b, v)).collect();
        let mut ids: BTreeMap<&(usize, Vec<usize>), usize> = BTreeMap::new();
        for s in sa.iter().chain(sb.iter()) {
            ids.entry(s).or_insert(0);
        }
        for (i, val) in ids.values_mut().enumerate() {
            *val = i;
        }
        a = sa.iter().map(|s| ids[s]).collect();
        b = sb.iter().map(|s| ids[s]).collect();
        let new_classes = ids.len();
        if new_classes == classes {
            return (histogram(&a, classes) == histogram(&b, classes)).then_some((a, b, classes));
        }
        classes = new_classes;
    }
}

fn histogram(col: &[usize], classes: usize) -> Vec<usize> {
    let mut hist = vec![0; classes];
    for &c in col {
        hist[c] += 1;
    }
    hist
}

/// Isomorphism-invariant fingerprint used for bucketing before exact tests.
pub fn invariant_key(g: &Graph, colors: &[u64]) -> Vec<u64> {
    let n = g.n();
    let mut cur: Vec<u64> = (0..n)
        .map(|v| {
            let mut s = DefaultHasher::new();
            (colors.get(v).copied().unwrap_or(0), g.degree(v)).hash(&mut s);
            s.finish()
        })
        .collect();
    for _ in 0..3 {
        cur = (0..n)
            .map(|v| {
                let mut nb: Vec<u64> = members(g.neighbors(v)).map(|u| cur[u]).collect();
                nb.sort_unstable();
                let mut s = DefaultHasher::new();
                (cur[v], nb).hash(&mut s);
                s.finish()
            })
            .collect();
    }
    cur.sort_unstable();
    let mut key = vec![n as u64, g.edge_count() as u64];
    key.extend(cur);
    key
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert!(are_isomorphic(&Graph::complete(3), &Graph::complete(3)).is_some());
        let two_triangles = Graph::cycle(3).disjoint_union(&Graph::cycle(3));
        assert!(are_isomorphic(&Graph::cycle(6), &two_triangles).is_none());
        let k2k1 = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert!(are_isomorphic(&Graph::path(3), &k2k1).is_none());
    }

    #[test]
    fn witness_is_valid_on_permutation() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5)]).unwrap();
        let perm = [3, 5, 0, 1, 2, 4];
        let h = g.permuted(&perm);
        let w = are_isomorphic(&g, &h).unwrap();
        for (u, v) in g.edges() {
            assert!(h.has_edge(w[u], w[v]));
        }
    }

    #[test]
    fn regular_non_isomorphic() {
        // Prism versus K_{3,3}: both 3-regular on 6 vertices.
        let prism = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)]).unwrap();
        let mut k33 = Graph::empty(6);
        for u in 0..3 {
            for v in 3..6 {
                k33.add_edge(u, v);
            }
        }
        assert!(are_isomorphic(&prism, &k33).is_none());
        assert_eq!(invariant_key(&prism, &[]).len(), 8);
    }
}
