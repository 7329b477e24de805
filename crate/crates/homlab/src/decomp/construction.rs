use serde::{Deserialize, Serialize};

use super::{Forest, Verdict};
use crate::error::{Error, Result};
use crate::graph::{labeled_isomorphic, Alphabet, LabeledGraph, Pebble};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum NodeTag {
    Leaf,
    /// Deletes the given label from the single child.
    Elimination(Pebble),
    Product,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CtNode {
    pub graph: LabeledGraph,
    pub tag: NodeTag,
    pub children: Vec<usize>,
}

/// Tree of labeled graphs built from fully labeled leaves by label deletion and products.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstructionTree {
    pub nodes: Vec<CtNode>,
    pub root: usize,
    pub caterpillar: bool,
}

impl ConstructionTree {
    /// Parent array derived from the child lists.
    pub fn parents(&self) -> Result<Vec<Option<usize>>> {
        let m = self.nodes.len();
        if self.root >= m {
            return Err(Error::invalid(format!("root {} out of range", self.root)));
        }
        let mut parent = vec![None; m];
        for (t, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                if c >= m {
                    return Err(Error::invalid(format!("node {t} has child {c} out of range")));
                }
                if c == self.root || parent[c].is_some() {
                    return Err(Error::invalid(format!("node {c} has more than one parent")));
                }
                parent[c] = Some(t);
            }
        }
        let forest = Forest::new(&parent)?;
        if forest.roots != [self.root] {
            return Err(Error::invalid("construction tree is not connected"));
        }
        Ok(parent)
    }

    pub fn forest(&self) -> Result<Forest> {
        Forest::new(&self.parents()?)
    }

    /// Largest number of elimination nodes on a root-to-leaf path.
    pub fn elimination_depth(&self) -> Result<usize> {
        let forest = self.forest()?;
        let mut count = vec![0usize; self.nodes.len()];
        let mut best = 0;
        for &t in &forest.preorder {
            let own = usize::from(matches!(self.nodes[t].tag, NodeTag::Elimination(_)));
            count[t] = own + forest.parent[t].map_or(0, |p| count[p]);
            best = best.max(count[t]);
        }
        Ok(best)
    }
}

/// Product of several labeled graphs with the vertex map of each factor into it.
pub fn product_with_maps(factors: &[&LabeledGraph]) -> Option<(LabeledGraph, Vec<Vec<usize>>)> {
    let (first, rest) = factors.split_first()?;
    let mut acc = (*first).clone();
    let mut maps: Vec<Vec<usize>> = vec![(0..first.n()).collect()];
    for f in rest {
        let (prod, left, right) = acc.product_with_maps(f);
        for m in maps.iter_mut() {
            for x in m.iter_mut() {
                *x = left[*x];
            }
        }
        maps.push(right);
        acc = prod;
    }
    Some((acc, maps))
}

/// Maps every node's payload vertices to vertices of the root payload, checking all node
/// conditions on the way. Returns the first violation as `Err(message)`.
pub(crate) fn embeddings(ct: &ConstructionTree, forest: &Forest) -> std::result::Result<Vec<Vec<usize>>, String> {
    let mut emb: Vec<Vec<usize>> = vec![Vec::new(); ct.nodes.len()];
    emb[ct.root] = (0..ct.nodes[ct.root].graph.n()).collect();
    for &t in &forest.preorder {
        let node = &ct.nodes[t];
        match (node.tag, node.children.as_slice()) {
            (NodeTag::Leaf, []) => {
                if !node.graph.is_fully_labeled() {
                    return Err(format!("leaf {t} is not fully labeled"));
                }
            }
            (NodeTag::Elimination(z), [c]) => {
                let child = &ct.nodes[*c].graph;
                if child.label(z).is_none() {
                    return Err(format!("elimination node {t} deletes {z}, which child {c} does not carry"));
                }
                let deleted = child.relabel(z, None).map_err(|e| e.to_string())?;
                let iso = labeled_isomorphic(&deleted, &node.graph)
                    .ok_or_else(|| format!("elimination node {t} is not its child {c} with {z} deleted"))?;
                emb[*c] = iso.iter().map(|&v| emb[t][v]).collect();
            }
            (NodeTag::Product, kids) if kids.len() >= 2 => {
                let factors: Vec<&LabeledGraph> = kids.iter().map(|&c| &ct.nodes[c].graph).collect();
                let (prod, maps) = product_with_maps(&factors).expect("nonempty");
                let iso = labeled_isomorphic(&prod, &node.graph)
                    .ok_or_else(|| format!("product node {t} differs from the product of its children"))?;
                for (&c, m) in kids.iter().zip(maps) {
                    emb[c] = m.iter().map(|&v| emb[t][iso[v]]).collect();
                }
            }
            (tag, kids) => return Err(format!("node {t} tagged {tag:?} has {} children", kids.len())),
        }
    }
    Ok(emb)
}

/// Checks all construction-tree conditions against `target` over the alphabet `(k1, k2)`.
/// The verdict's depth is the elimination depth.
pub fn verify_construction_tree(ct: &ConstructionTree, target: &LabeledGraph, k1: usize, k2: usize) -> Verdict {
    let forest = match ct.forest() {
        Ok(f) => f,
        Err(e) => return Verdict::fail(0, e.to_string()),
    };
    let depth = ct.elimination_depth().expect("forest validated");
    let alphabet = Alphabet::raw(k1, k2);
    for (t, node) in ct.nodes.iter().enumerate() {
        if let Some((p, _)) = node.graph.labels().find(|&(p, _)| !alphabet.contains(p)) {
            return Verdict::fail(depth, format!("node {t} uses label {p} outside {alphabet}"));
        }
    }
    if labeled_isomorphic(&ct.nodes[ct.root].graph, target).is_none() {
        return Verdict::fail(depth, "root payload is not isomorphic to the target");
    }
    if let Err(msg) = embeddings(ct, &forest) {
        return Verdict::fail(depth, msg);
    }
    for (t, node) in ct.nodes.iter().enumerate() {
        if let NodeTag::Elimination(z) = node.tag {
            if z.is_y() {
                if let Some(&s) = forest.ancestors(t).iter().skip(1).find(|&&s| ct.nodes[s].graph.label(z).is_some()) {
                    return Verdict::fail(depth, format!("non-reusable label {z} deleted at node {t} reappears at ancestor {s}"));
                }
            }
        }
    }
    if ct.caterpillar {
        for (t, node) in ct.nodes.iter().enumerate() {
            let inner = node.children.iter().filter(|&&c| !ct.nodes[c].children.is_empty()).count();
            if node.tag == NodeTag::Product && inner > 1 {
                return Verdict::fail(depth, format!("product node {t} has {inner} non-leaf children in a caterpillar"));
            }
        }
    }
    Verdict::pass(depth)
}

/// Table of hom counts indexed by assignments of the listed labels to target vertices.
struct Table {
    labels: Vec<Pebble>,
    data: Vec<u128>,
}

const MAX_TABLE: usize = 1 << 24;

fn table_len(n: usize, arity: usize) -> Result<usize> {
    let mut size = 1usize;
    for _ in 0..arity {
        size = size.checked_mul(n).filter(|&s| s <= MAX_TABLE).ok_or(Error::TooLarge { n: arity, max: MAX_TABLE })?;
    }
    Ok(size)
}

fn decode(mut index: usize, n: usize, arity: usize) -> Vec<usize> {
    (0..arity)
        .map(|_| {
            let d = index % n;
            index /= n;
            d
        })
        .collect()
}

fn encode(assignment: impl Iterator<Item = usize>, n: usize) -> usize {
    let digits: Vec<usize> = assignment.collect();
    digits.iter().rev().fold(0, |acc, &d| acc * n + d)
}

fn overflow() -> Error {
    Error::invalid("hom count exceeds 128 bits")
}

/// `hom(root payload, g)` by dynamic programming over the construction tree.
pub fn eval_hom_via_construction(ct: &ConstructionTree, g: &LabeledGraph) -> Result<u128> {
    let root = &ct.nodes[ct.root].graph;
    let (k1, k2) = root_alphabet(ct);
    let verdict = verify_construction_tree(ct, root, k1, k2);
    if !verdict.ok {
        return Err(Error::invalid(format!("invalid construction tree: {}", verdict.diagnostic.unwrap_or_default())));
    }
    let table = eval_node(ct, ct.root, g.graph())?;
    let n = g.n();
    let mut point = Vec::with_capacity(table.labels.len());
    for &p in &table.labels {
        point.push(g.label(p).ok_or_else(|| Error::MissingLabel(p.to_string()))?);
    }
    if table.labels.is_empty() {
        return Ok(table.data[0]);
    }
    if n == 0 {
        return Ok(0);
    }
    Ok(table.data[encode(point.into_iter(), n)])
}

fn root_alphabet(ct: &ConstructionTree) -> (usize, usize) {
    ct.nodes.iter().fold((0, 0), |(a, b), node| {
        let al = node.graph.alphabet();
        (a.max(al.k1), b.max(al.k2))
    })
}

fn eval_node(ct: &ConstructionTree, t: usize, g: &crate::graph::Graph) -> Result<Table> {
    let node = &ct.nodes[t];
    let n = g.n();
    match node.tag {
        NodeTag::Leaf => {
            let f = &node.graph;
            let labels = f.label_set();
            let len = table_len(n, labels.len())?;
            let mut data = vec![0u128; len];
            for (idx, slot) in data.iter_mut().enumerate() {
                let a = decode(idx, n, labels.len());
                let mut image = vec![usize::MAX; f.n()];
                let mut consistent = true;
                for (i, &p) in labels.iter().enumerate() {
                    let v = f.label(p).expect("listed label");
                    if image[v] != usize::MAX && image[v] != a[i] {
                        consistent = false;
                        break;
                    }
                    image[v] = a[i];
                }
                if consistent && f.graph().edges().iter().all(|&(u, v)| g.has_edge(image[u], image[v])) {
                    *slot = 1;
                }
            }
            Ok(Table { labels, data })
        }
        NodeTag::Elimination(z) => {
            let child = eval_node(ct, node.children[0], g)?;
            let pos = child.labels.iter().position(|&p| p == z).expect("verified elimination");
            let labels: Vec<Pebble> = child.labels.iter().copied().filter(|&p| p != z).collect();
            let len = table_len(n, labels.len())?;
            let mut data = vec![0u128; len];
            for (idx, slot) in data.iter_mut().enumerate() {
                let a = decode(idx, n, labels.len());
                let mut total: u128 = 0;
                for v in 0..n {
                    let mut full = a.clone();
                    full.insert(pos, v);
                    total = total.checked_add(child.data[encode(full.into_iter(), n)]).ok_or_else(overflow)?;
                }
                *slot = total;
            }
            Ok(Table { labels, data })
        }
        NodeTag::Product => {
            let kids: Vec<Table> = node.children.iter().map(|&c| eval_node(ct, c, g)).collect::<Result<_>>()?;
            let mut labels: Vec<Pebble> = kids.iter().flat_map(|k| k.labels.iter().copied()).collect();
            labels.sort();
            labels.dedup();
            let len = table_len(n, labels.len())?;
            let positions: Vec<Vec<usize>> = kids
                .iter()
                .map(|k| k.labels.iter().map(|p| labels.binary_search(p).expect("union")).collect())
                .collect();
            let mut data = vec![0u128; len];
            for (idx, slot) in data.iter_mut().enumerate() {
                let a = decode(idx, n, labels.len());
                let mut prod: u128 = 1;
                for (k, pos) in kids.iter().zip(&positions) {
                    let entry = k.data[encode(pos.iter().map(|&i| a[i]), n)];
                    prod = prod.checked_mul(entry).ok_or_else(overflow)?;
                    if prod == 0 {
                        break;
                    }
                }
                *slot = prod;
            }
            Ok(Table { labels, data })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::homcount::hom_count;
    use Pebble::X;

    fn k2_tree() -> ConstructionTree {
        let al = Alphabet::raw(2, 0);
        let leaf = LabeledGraph::with_labels(Graph::complete(2), al, &[(X(1), 0), (X(2), 1)]).unwrap();
        let mid = leaf.relabel(X(2), None).unwrap();
        let top = mid.relabel(X(1), None).unwrap();
        ConstructionTree {
            nodes: vec![
                CtNode { graph: top, tag: NodeTag::Elimination(X(1)), children: vec![1] },
                CtNode { graph: mid, tag: NodeTag::Elimination(X(2)), children: vec![2] },
                CtNode { graph: leaf, tag: NodeTag::Leaf, children: vec![] },
            ],
            root: 0,
            caterpillar: true,
        }
    }

    #[test]
    fn k2_construction() {
        let ct = k2_tree();
        let target = LabeledGraph::unlabeled(Graph::complete(2), Alphabet::raw(2, 0));
        let v = verify_construction_tree(&ct, &target, 2, 0);
        assert!(v.ok, "{:?}", v.diagnostic);
        assert_eq!(v.depth, 2);
        let c4 = LabeledGraph::unlabeled(Graph::cycle(4), Alphabet::raw(2, 0));
        assert_eq!(eval_hom_via_construction(&ct, &c4).unwrap(), 8);
        assert!(!verify_construction_tree(&ct, &target, 1, 0).ok);
    }

    #[test]
    fn single_vertex_leaf() {
        let al = Alphabet::raw(1, 0);
        let leaf = LabeledGraph::with_labels(Graph::empty(1), al, &[(X(1), 0)]).unwrap();
        let ct = ConstructionTree { nodes: vec![CtNode { graph: leaf.clone(), tag: NodeTag::Leaf, children: vec![] }], root: 0, caterpillar: false };
        let v = verify_construction_tree(&ct, &leaf, 1, 0);
        assert!(v.ok);
        assert_eq!(v.depth, 0);
        let g = LabeledGraph::with_labels(Graph::path(3), al, &[(X(1), 2)]).unwrap();
        assert_eq!(eval_hom_via_construction(&ct, &g).unwrap(), 1);
        let k1 = ConstructionTree {
            nodes: vec![
                CtNode { graph: leaf.unlabel(), tag: NodeTag::Elimination(X(1)), children: vec![1] },
                CtNode { graph: leaf, tag: NodeTag::Leaf, children: vec![] },
            ],
            root: 0,
            caterpillar: false,
        };
        assert_eq!(eval_hom_via_construction(&k1, &g).unwrap(), 3);
    }

    #[test]
    fn bad_product() {
        let al = Alphabet::raw(2, 0);
        let a = LabeledGraph::with_labels(Graph::empty(1), al, &[(X(1), 0)]).unwrap();
        let b = LabeledGraph::with_labels(Graph::empty(1), al, &[(X(2), 0)]).unwrap();
        let wrong = LabeledGraph::with_labels(Graph::complete(2), al, &[(X(1), 0), (X(2), 1)]).unwrap();
        let ct = ConstructionTree {
            nodes: vec![
                CtNode { graph: wrong.clone(), tag: NodeTag::Product, children: vec![1, 2] },
                CtNode { graph: a, tag: NodeTag::Leaf, children: vec![] },
                CtNode { graph: b, tag: NodeTag::Leaf, children: vec![] },
            ],
            root: 0,
            caterpillar: false,
        };
        let v = verify_construction_tree(&ct, &wrong, 2, 0);
        assert!(v.diagnostic.unwrap().contains("product"));
    }

    #[test]
    fn product_path() {
        // P3 as the product of two labeled edges sharing x2, then three eliminations.
        let al = Alphabet::raw(3, 0);
        let e1 = LabeledGraph::with_labels(Graph::complete(2), al, &[(X(1), 0), (X(2), 1)]).unwrap();
        let e2 = LabeledGraph::with_labels(Graph::complete(2), al, &[(X(2), 0), (X(3), 1)]).unwrap();
        let prod = e1.product(&e2);
        let a = prod.relabel(X(1), None).unwrap();
        let b = a.relabel(X(3), None).unwrap();
        let c = b.relabel(X(2), None).unwrap();
        let ct = ConstructionTree {
            nodes: vec![
                CtNode { graph: c, tag: NodeTag::Elimination(X(2)), children: vec![1] },
                CtNode { graph: b, tag: NodeTag::Elimination(X(3)), children: vec![2] },
                CtNode { graph: a, tag: NodeTag::Elimination(X(1)), children: vec![3] },
                CtNode { graph: prod, tag: NodeTag::Product, children: vec![4, 5] },
                CtNode { graph: e1, tag: NodeTag::Leaf, children: vec![] },
                CtNode { graph: e2, tag: NodeTag::Leaf, children: vec![] },
            ],
            root: 0,
            caterpillar: true,
        };
        let target = LabeledGraph::unlabeled(Graph::path(3), al);
        assert!(verify_construction_tree(&ct, &target, 3, 0).ok);
        for g in [Graph::cycle(5), Graph::complete(4), Graph::path(4)] {
            let lg = LabeledGraph::unlabeled(g, al);
            assert_eq!(eval_hom_via_construction(&ct, &lg).unwrap(), hom_count(&target, &lg).unwrap());
        }
    }
}
