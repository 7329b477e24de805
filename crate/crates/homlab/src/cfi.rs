//! CFI graphs over connected base graphs and the gadget-preserving isomorphisms that move a
//! twist along a path.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{are_isomorphic, bit, members, Graph, VSet, MAX_VERTICES};

/// `X_U(G)`: vertex `i` is the pair `(base vertex, edge subset)`; subsets are bitmasks over the
/// base edge list.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CfiGraph {
    pub base: Graph,
    pub twist: VSet,
    pub base_edges: Vec<(usize, usize)>,
    pub vertices: Vec<(usize, u64)>,
    pub graph: Graph,
    /// Indices of the gadget vertices of each base vertex.
    pub gadgets: Vec<Vec<usize>>,
}

impl CfiGraph {
    /// Projection to the base graph.
    pub fn project(&self, v: usize) -> usize {
        self.vertices[v].0
    }

    pub fn index_of(&self, base_vertex: usize, subset: u64) -> Option<usize> {
        self.gadgets.get(base_vertex)?.iter().copied().find(|&i| self.vertices[i].1 == subset)
    }
}

fn incident_edges(edges: &[(usize, usize)], v: usize) -> Vec<usize> {
    edges.iter().enumerate().filter(|(_, &(a, b))| a == v || b == v).map(|(i, _)| i).collect()
}

pub fn build_cfi(g: &Graph, twist: VSet) -> Result<CfiGraph> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if twist & !g.vertices() != 0 {
        return Err(Error::invalid("twist set names a vertex outside the base graph"));
    }
    let base_edges = g.edges();
    let gadget_size = |v: usize| match g.degree(v) {
        0 => usize::from(twist & bit(v) == 0),
        d => 1usize << (d - 1),
    };
    let total: usize = (0..g.n()).map(gadget_size).sum();
    if total > MAX_VERTICES {
        return Err(Error::TooLarge { n: total, max: MAX_VERTICES });
    }
    let mut vertices = Vec::new();
    let mut gadgets = vec![Vec::new(); g.n()];
    for v in 0..g.n() {
        let local = incident_edges(&base_edges, v);
        let parity = u32::from(twist & bit(v) != 0);
        for mask in 0u64..(1u64 << local.len()) {
            if mask.count_ones() % 2 != parity {
                continue;
            }
            let subset = local.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).fold(0u64, |a, (_, &e)| a | (1 << e));
            gadgets[v].push(vertices.len());
            vertices.push((v, subset));
        }
    }
    let mut graph = Graph::empty(vertices.len());
    for (e, &(a, b)) in base_edges.iter().enumerate() {
        for &i in &gadgets[a] {
            for &j in &gadgets[b] {
                if (vertices[i].1 ^ vertices[j].1) & (1 << e) == 0 {
                    graph.add_edge(i, j);
                }
            }
        }
    }
    Ok(CfiGraph { base: g.clone(), twist, base_edges, vertices, graph, gadgets })
}

/// `X(G)`.
pub fn cfi_even(g: &Graph) -> Result<CfiGraph> {
    build_cfi(g, 0)
}

/// `X̃(G)`, twisted at the smallest vertex.
pub fn cfi_odd(g: &Graph) -> Result<CfiGraph> {
    build_cfi(g, if g.n() == 0 { 0 } else { 1 })
}

/// Tests whether `X_S(G)` and `X_T(G)` are isomorphic and checks the answer against the parity
/// criterion; a mismatch is reported as a theorem violation.
pub fn parity_check(g: &Graph, s: VSet, t: VSet) -> Result<bool> {
    let xs = build_cfi(g, s)?;
    let xt = build_cfi(g, t)?;
    let iso = are_isomorphic(&xs.graph, &xt.graph).is_some();
    let expected = s.count_ones() % 2 == t.count_ones() % 2;
    if iso != expected {
        return Err(Error::TheoremViolation(format!(
            "CFI graphs for twist sets {s:#b} and {t:#b} are {}isomorphic, parity says otherwise",
            if iso { "" } else { "not " }
        )));
    }
    Ok(iso)
}

/// Isomorphism `X_{u}(G) → X_{v}(G)` obtained by toggling each path edge in the subsets of both
/// of its endpoints. Returned as a vertex map between the two constructions, verified.
pub fn twist_iso(g: &Graph, u: usize, v: usize, path: &[usize]) -> Result<Vec<usize>> {
    if path.first() != Some(&u) || path.last() != Some(&v) {
        return Err(Error::invalid("path must start at u and end at v"));
    }
    if let Some(w) = path.windows(2).find(|w| !g.has_edge(w[0], w[1])) {
        return Err(Error::invalid(format!("path step {}-{} is not an edge", w[0], w[1])));
    }
    let from = build_cfi(g, bit(u))?;
    let to = build_cfi(g, bit(v))?;
    let edge_id = |a: usize, b: usize| from.base_edges.iter().position(|&e| e == (a.min(b), a.max(b))).expect("edge");
    let mut toggle = vec![0u64; g.n()];
    for w in path.windows(2) {
        let e = 1u64 << edge_id(w[0], w[1]);
        toggle[w[0]] ^= e;
        toggle[w[1]] ^= e;
    }
    let mut map = Vec::with_capacity(from.vertices.len());
    for &(w, subset) in &from.vertices {
        let target = to
            .index_of(w, subset ^ toggle[w])
            .ok_or_else(|| Error::TheoremViolation(format!("twisted subset of gadget {w} has the wrong parity")))?;
        map.push(target);
    }
    let n = from.graph.n();
    let bijective = members(map.iter().fold(0 as VSet, |a, &x| a | bit(x))).count() == n;
    let preserves = (0..n).all(|a| (0..n).all(|b| from.graph.has_edge(a, b) == to.graph.has_edge(map[a], map[b])));
    let off_path_identity = (0..n).all(|a| {
        let w = from.project(a);
        to.project(map[a]) == w && (path.contains(&w) || to.vertices[map[a]].1 == from.vertices[a].1)
    });
    if !bijective || !preserves || !off_path_identity {
        return Err(Error::TheoremViolation("twist map failed verification".into()));
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homcount::hom;

    #[test]
    fn small_constructions() {
        let k2 = build_cfi(&Graph::complete(2), 0).unwrap();
        assert_eq!(k2.graph.n(), 2);
        assert_eq!(k2.graph.edge_count(), 1);
        let c3 = Graph::cycle(3);
        let even = build_cfi(&c3, 0).unwrap();
        let two_c3 = c3.disjoint_union(&c3);
        assert!(are_isomorphic(&even.graph, &two_c3).is_some());
        let odd = build_cfi(&c3, 0b1).unwrap();
        assert!(are_isomorphic(&odd.graph, &Graph::cycle(6)).is_some());
        assert!(build_cfi(&Graph::empty(2), 0).is_err());
    }

    #[test]
    fn cycle_hom_counts() {
        let c4 = Graph::cycle(4);
        assert_eq!(hom(&c4, &cfi_even(&c4).unwrap().graph), 64);
        assert_eq!(hom(&c4, &cfi_odd(&c4).unwrap().graph), 48);
    }

    #[test]
    fn parity() {
        let c3 = Graph::cycle(3);
        assert!(parity_check(&c3, 0b1, 0b1).unwrap());
        assert!(!parity_check(&c3, 0, 0b1).unwrap());
        assert!(parity_check(&c3, 0b1, 0b10).unwrap());
        let k4 = Graph::complete(4);
        assert!(!parity_check(&k4, 0, 0b100).unwrap());
        assert!(parity_check(&k4, 0b11, 0).unwrap());
    }

    #[test]
    fn twists() {
        let p3 = Graph::path(3);
        assert_eq!(twist_iso(&p3, 0, 0, &[0]).unwrap(), (0..build_cfi(&p3, 1).unwrap().graph.n()).collect::<Vec<_>>());
        let there = twist_iso(&p3, 0, 2, &[0, 1, 2]).unwrap();
        let back = twist_iso(&p3, 2, 0, &[2, 1, 0]).unwrap();
        assert!((0..there.len()).all(|i| back[there[i]] == i));
        assert!(twist_iso(&p3, 0, 2, &[0, 2]).is_err());
    }
}

