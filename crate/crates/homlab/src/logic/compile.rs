use std::collections::HashMap;

use super::{and, count_eq, count_tuples, edge, eq, falsity, guarded, not, or, truth, Node, Var};
use crate::decomp::{verify_construction_tree, ConstructionTree, NodeTag};
use crate::error::{Error, Result};
use crate::graph::{Graph, LabeledGraph, Pebble};

/// Which translation to use: caterpillars into the restricted-conjunction logic, or construction
/// trees into the counting logic relative to graphs of the given order.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Path,
    Tree { order: usize },
}

/// Conjunction of atoms stating that the labels of a fully labeled graph span a copy of it.
fn diagram(g: &LabeledGraph) -> Node {
    let mut rep: Vec<Option<Pebble>> = vec![None; g.n()];
    let mut atoms = Vec::new();
    for (p, v) in g.labels() {
        match rep[v] {
            Some(r) => atoms.push(eq(Var::P(r), Var::P(p))),
            None => rep[v] = Some(p),
        }
    }
    for (u, v) in g.graph().edges() {
        atoms.push(edge(Var::P(rep[u].expect("fully labeled")), Var::P(rep[v].expect("fully labeled"))));
    }
    if atoms.is_empty() {
        if let Some(p) = rep.iter().flatten().next() {
            return eq(Var::P(*p), Var::P(*p));
        }
    }
    and(atoms)
}

fn check(ct: &ConstructionTree, mode: Mode) -> Result<()> {
    let root = &ct.nodes.get(ct.root).ok_or_else(|| Error::invalid("root out of range"))?.graph;
    let alphabet = root.alphabet();
    let verdict = verify_construction_tree(ct, root, alphabet.k1, alphabet.k2);
    if !verdict.ok {
        return Err(Error::invalid(format!("invalid construction tree: {}", verdict.diagnostic.unwrap_or_default())));
    }
    if mode == Mode::Path && !ct.caterpillar {
        return Err(Error::invalid("path mode needs a construction caterpillar"));
    }
    Ok(())
}

/// A formula that holds in `g` (with the labels of the root read from `g`) exactly when
/// `hom(F, g) = m`, where `F` is the root of `ct`. In tree mode this is only promised for `g`
/// of at most the given order.
pub fn formula_from_construction(ct: &ConstructionTree, m: usize, mode: Mode) -> Result<Node> {
    check(ct, mode)?;
    match mode {
        Mode::Path => {
            let order = ct.forest()?.preorder;
            let mut tally = HashMap::new();
            for t in order {
                if matches!(ct.nodes[t].tag, NodeTag::Elimination(_)) {
                    let next = tally.len() + 1;
                    tally.insert(t, next);
                }
            }
            let body = path_body(ct, ct.root, &tally);
            Ok(count_tuples(m, (1..=tally.len()).collect(), body))
        }
        Mode::Tree { order } => Ok(TreeCompiler { ct, order, memo: HashMap::new() }.formula(ct.root, m)),
    }
}

fn path_body(ct: &ConstructionTree, t: usize, tally: &HashMap<usize, usize>) -> Node {
    let node = &ct.nodes[t];
    match node.tag {
        NodeTag::Leaf => diagram(&node.graph),
        NodeTag::Product => and(node.children.iter().map(|&c| path_body(ct, c, tally)).collect()),
        NodeTag::Elimination(z) => guarded(z, tally[&t], path_body(ct, node.children[0], tally)),
    }
}

struct TreeCompiler<'a> {
    ct: &'a ConstructionTree,
    order: usize,
    memo: HashMap<(usize, usize), Node>,
}

impl TreeCompiler<'_> {
    /// Largest hom count of the node's graph into a graph of the given order.
    fn bound(&self, t: usize) -> usize {
        let g = &self.ct.nodes[t].graph;
        let free = g.n() - g.labeled_vertices().count_ones() as usize;
        (0..free).fold(1usize, |acc, _| acc.saturating_mul(self.order))
    }

    fn formula(&mut self, t: usize, m: usize) -> Node {
        if let Some(f) = self.memo.get(&(t, m)) {
            return f.clone();
        }
        let node = &self.ct.nodes[t];
        let out = if m > self.bound(t) {
            falsity()
        } else {
            match node.tag {
                NodeTag::Leaf => match m {
                    0 => not(diagram(&node.graph)),
                    _ => diagram(&node.graph),
                },
                NodeTag::Product => self.product(&node.children, m),
                NodeTag::Elimination(z) => self.elimination(z, node.children[0], m),
            }
        };
        self.memo.insert((t, m), out.clone());
        out
    }

    fn product(&mut self, children: &[usize], m: usize) -> Node {
        if m == 0 {
            return or(children.iter().map(|&c| self.formula(c, 0)).collect());
        }
        let mut options = Vec::new();
        self.factorizations(children, 0, m, &mut Vec::new(), &mut options);
        or(options)
    }

    /// Factorizations `m = Π m_i` with each `m_i` within its child's bound.
    fn factorizations(&mut self, children: &[usize], at: usize, rest: usize, chosen: &mut Vec<usize>, out: &mut Vec<Node>) {
        let Some(&c) = children.get(at) else {
            if rest == 1 {
                let conj = children.iter().zip(chosen.iter()).map(|(&c, &mi)| self.formula(c, mi)).collect();
                out.push(and(conj));
            }
            return;
        };
        for d in (1..=self.bound(c).min(rest)).filter(|d| rest.is_multiple_of(*d)) {
            chosen.push(d);
            self.factorizations(children, at + 1, rest / d, chosen, out);
            chosen.pop();
        }
    }

    fn elimination(&mut self, z: Pebble, child: usize, m: usize) -> Node {
        let cap = self.bound(child).min(m.max(1));
        let mut options = Vec::new();
        let mut parts: Vec<(usize, usize)> = Vec::new();
        self.decompositions(z, child, 1, cap, m, self.order, &mut parts, &mut options);
        or(options)
    }

    /// Formal decompositions `Σ c_i m_i = m` with distinct `m_i ≥ from` and `Σ c_i ≤ budget`.
    #[allow(clippy::too_many_arguments)]
    fn decompositions(&mut self, z: Pebble, child: usize, from: usize, cap: usize, rest: usize, budget: usize, parts: &mut Vec<(usize, usize)>, out: &mut Vec<Node>) {
        if rest == 0 {
            let total: usize = parts.iter().map(|p| p.0).sum();
            let mut conj = vec![count_eq(total, z, not(self.formula(child, 0)))];
            for &(c, mi) in parts.iter() {
                conj.push(count_eq(c, z, self.formula(child, mi)));
            }
            out.push(and(conj));
            return;
        }
        for mi in from..=cap.min(rest) {
            for c in 1..=budget.min(rest / mi) {
                parts.push((c, mi));
                self.decompositions(z, child, mi + 1, cap, rest - c * mi, budget - c, parts, out);
                parts.pop();
            }
        }
    }
}

/// Sentence counting the tuples whose placements along `pebbles` realise the same sequence of
/// atomic types as `elements` does in `g`. It holds in `g` and fails in any graph where that
/// count differs.
pub fn type_sentence(g: &Graph, pebbles: &[Pebble], elements: &[usize]) -> Result<Node> {
    if pebbles.len() != elements.len() {
        return Err(Error::invalid("pebble and element sequences differ in length"));
    }
    if let Some(&v) = elements.iter().find(|&&v| v >= g.n()) {
        return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
    }
    let mut placed: Vec<(Pebble, usize)> = Vec::new();
    let mut types = Vec::new();
    for (&p, &v) in pebbles.iter().zip(elements) {
        placed.retain(|&(q, _)| q != p);
        placed.push((p, v));
        let mut atoms = Vec::new();
        for (i, &(p1, v1)) in placed.iter().enumerate() {
            for &(p2, v2) in &placed[i + 1..] {
                let same = eq(Var::P(p1), Var::P(p2));
                atoms.push(if v1 == v2 { same } else { not(same) });
                let adj = edge(Var::P(p1), Var::P(p2));
                atoms.push(if g.has_edge(v1, v2) { adj } else { not(adj) });
            }
        }
        types.push(and(atoms));
    }
    let body = pebbles.iter().enumerate().rev().fold(truth(), |inner, (i, &p)| guarded(p, i + 1, and(vec![types[i].clone(), inner])));
    let tallies: Vec<usize> = (1..=pebbles.len()).collect();
    let count = super::count_solutions(&body, &LabeledGraph::unlabeled(g.clone(), crate::graph::Alphabet::raw(0, 0)), &tallies)?;
    Ok(count_tuples(count as usize, tallies, body))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Alphabet;
    use crate::homcount::hom;
    use crate::logic::{analyze, evaluate, quantifier_rank};
    use crate::pursuit::{ns_decomposition, solve_cr};

    fn graphs(n: usize) -> Vec<Graph> {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        (0u32..1 << pairs.len())
            .map(|mask| {
                let es: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| *e).collect();
                Graph::from_edges(n, &es).unwrap()
            })
            .collect()
    }

    fn caterpillar(f: &Graph, k1: usize, k2: usize) -> ConstructionTree {
        let d = ns_decomposition(f, k1, k2).unwrap().expect("searchers win");
        crate::decomp::decomposition_to_construction(&d, f).unwrap()
    }

    fn target(g: &Graph) -> LabeledGraph {
        LabeledGraph::unlabeled(g.clone(), Alphabet::raw(0, 0))
    }

    #[test]
    fn vertex_count() {
        let ct = caterpillar(&Graph::empty(1), 1, 0);
        for g in [Graph::path(3), Graph::cycle(5), Graph::empty(2)] {
            assert!(evaluate(&formula_from_construction(&ct, g.n(), Mode::Path).unwrap(), &target(&g)).unwrap());
            assert!(!evaluate(&formula_from_construction(&ct, g.n() + 1, Mode::Path).unwrap(), &target(&g)).unwrap());
        }
    }

    #[test]
    fn edge_count() {
        let ct = caterpillar(&Graph::complete(2), 2, 0);
        for n in 1..=5 {
            for g in graphs(n) {
                let twice = 2 * g.edge_count();
                for m in [twice, twice + 1] {
                    let f = formula_from_construction(&ct, m, Mode::Path).unwrap();
                    assert_eq!(evaluate(&f, &target(&g)).unwrap(), m == twice);
                }
            }
        }
        let f = formula_from_construction(&ct, 4, Mode::Path).unwrap();
        let report = analyze(&f, Alphabet::raw(2, 0), None).unwrap();
        assert!(report.restricted_logic && report.free.is_empty());
    }

    #[test]
    fn triangle_in_tree_mode() {
        let k3 = Graph::complete(3);
        let solution = solve_cr(&k3, 3, 0, 3).unwrap();
        let ct = crate::decomp::decomposition_to_construction(&solution.decomposition.unwrap(), &k3).unwrap();
        let depth = ct.elimination_depth().unwrap();
        for g in graphs(4) {
            let count = hom(&k3, &g) as usize;
            for m in [count, count + 6] {
                let f = formula_from_construction(&ct, m, Mode::Tree { order: 4 }).unwrap();
                assert!(quantifier_rank(&f) <= depth.min(3));
                assert!(analyze(&f, Alphabet::raw(3, 0), Some(3)).unwrap().counting_logic);
                assert_eq!(evaluate(&f, &target(&g)).unwrap(), m == count);
            }
        }
    }

    #[test]
    fn caterpillar_flag_is_required() {
        let k3 = Graph::complete(3);
        let d = solve_cr(&k3, 3, 0, 3).unwrap().decomposition.unwrap();
        let mut ct = crate::decomp::decomposition_to_construction(&d, &k3).unwrap();
        ct.caterpillar = false;
        assert!(formula_from_construction(&ct, 6, Mode::Path).is_err());
    }

    #[test]
    fn type_sentences_separate_counts() {
        let c6 = Graph::cycle(6);
        let two_c3 = Graph::cycle(3).disjoint_union(&Graph::cycle(3));
        let ys = [Pebble::Y(1), Pebble::Y(2), Pebble::Y(3)];
        let s = type_sentence(&c6, &ys, &[0, 1, 2]).unwrap();
        assert!(evaluate(&s, &target(&c6)).unwrap());
        assert!(!evaluate(&s, &target(&two_c3)).unwrap());
        assert!(analyze(&s, Alphabet::raw(0, 3), None).unwrap().restricted_logic);
    }
}
