use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::construction::embeddings;
use super::nice::recorded_width;
use super::{
    make_nice, verify_construction_tree, verify_decomposition, verify_forest_cover, ConstructionTree, CoverVariant, CtNode,
    DecompKind, Exceptions, Forest, ForestCover, NodeTag, RootedDecomposition,
};
use crate::error::{Error, Result};
use crate::graph::{bit, members, Alphabet, Graph, LabeledGraph, Pebble, VSet};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum ObjectKind {
    Decomposition,
    Cover,
    Construction,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum DecompObject {
    Decomposition(RootedDecomposition),
    Cover(ForestCover),
    Construction(ConstructionTree),
}

impl DecompObject {
    pub fn kind(&self) -> ObjectKind {
        match self {
            DecompObject::Decomposition(_) => ObjectKind::Decomposition,
            DecompObject::Cover(_) => ObjectKind::Cover,
            DecompObject::Construction(_) => ObjectKind::Construction,
        }
    }
}

/// Converts between decompositions, forest covers and construction trees of `g`.
pub fn convert(src: &DecompObject, dst: ObjectKind, g: &Graph) -> Result<DecompObject> {
    let as_decomposition = |src: &DecompObject| -> Result<RootedDecomposition> {
        match src {
            DecompObject::Decomposition(d) => Ok(d.clone()),
            DecompObject::Cover(fc) => cover_to_decomposition(fc, g),
            DecompObject::Construction(ct) => construction_to_decomposition(ct, g),
        }
    };
    Ok(match (src, dst) {
        (DecompObject::Decomposition(d), ObjectKind::Decomposition) => DecompObject::Decomposition(make_nice(d, g)?),
        (DecompObject::Cover(fc), ObjectKind::Cover) => DecompObject::Cover(fc.clone()),
        (DecompObject::Construction(ct), ObjectKind::Construction) => DecompObject::Construction(ct.clone()),
        (_, ObjectKind::Decomposition) => DecompObject::Decomposition(as_decomposition(src)?),
        (_, ObjectKind::Cover) => DecompObject::Cover(decomposition_to_cover(&as_decomposition(src)?, g)?),
        (_, ObjectKind::Construction) => DecompObject::Construction(decomposition_to_construction(&as_decomposition(src)?, g)?),
    })
}

fn violation(what: &str, diagnostic: Option<String>) -> Error {
    Error::TheoremViolation(format!("{what} failed re-verification: {}", diagnostic.unwrap_or_default()))
}

/// Topmost node containing each vertex.
fn top_nodes(d: &RootedDecomposition, forest: &Forest, n: usize) -> Vec<usize> {
    let mut top = vec![usize::MAX; n];
    for &t in &forest.preorder {
        for v in members(d.bags[t]) {
            if top[v] == usize::MAX {
                top[v] = t;
            }
        }
    }
    top
}

/// Vertices that are exceptions of some leaf below their topmost node.
fn exception_vertices(d: &RootedDecomposition, forest: &Forest, top: &[usize]) -> VSet {
    let mut out = 0;
    for leaf in forest.leaves() {
        let s = d.leaf_exceptions(leaf);
        for v in members(s) {
            if top[v] != usize::MAX && forest.is_ancestor(top[v], leaf) {
                out |= bit(v);
            }
        }
    }
    out
}

fn min_free(candidates: impl Iterator<Item = Pebble>, used: &[Pebble]) -> Option<Pebble> {
    candidates.into_iter().find(|p| !used.contains(p))
}

/// Forest cover read off a nice version of `d`: vertices ordered by their topmost bag,
/// reusable pebbles chosen smallest-free within that bag.
pub fn decomposition_to_cover(d: &RootedDecomposition, g: &Graph) -> Result<ForestCover> {
    let nice = make_nice(d, g)?;
    let forest = nice.forest()?;
    let (k1, k2) = recorded_width(&nice, &forest);
    let depth = verify_decomposition(&nice, g, k1, k2, None)?.depth;
    let n = g.n();
    let alphabet = Alphabet::raw(k1, k2);
    let top = top_nodes(&nice, &forest, n);
    let exceptions = exception_vertices(&nice, &forest, &top);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| forest.preorder.iter().position(|&t| t == top[v]));
    let comp_of = {
        let mut c = vec![0; n];
        for (i, comp) in g.components().into_iter().enumerate() {
            for v in members(comp) {
                c[v] = i;
            }
        }
        c
    };
    let variant = match (&nice.kind, &nice.exceptions) {
        (DecompKind::Tree, _) => CoverVariant::Tree,
        (DecompKind::Path, Exceptions::PerLeaf(_)) => CoverVariant::Linear,
        (DecompKind::Path, Exceptions::PerComponent(_)) => CoverVariant::LinearComponent,
    };
    let mut parent = vec![None; n];
    for &v in &order {
        parent[v] = match variant {
            CoverVariant::Tree => {
                // Nearest strict ancestor node that is the topmost node of some vertex.
                let mut cur = forest.parent[top[v]];
                let mut found = None;
                while let Some(t) = cur {
                    if let Some(u) = (0..n).find(|&u| top[u] == t) {
                        found = Some(u);
                        break;
                    }
                    cur = forest.parent[t];
                }
                found
            }
            _ => order.iter().take_while(|&&u| u != v).filter(|&&u| comp_of[u] == comp_of[v]).last().copied(),
        };
    }
    let mut pebbles: Vec<Option<Pebble>> = vec![None; n];
    let mut next_y: BTreeMap<usize, usize> = BTreeMap::new();
    for &v in &order {
        let bag_used: Vec<Pebble> = members(nice.bags[top[v]]).filter(|&u| u != v).filter_map(|u| pebbles[u]).collect();
        let p = if exceptions & bit(v) == 0 {
            min_free(alphabet.xs(), &bag_used)
        } else {
            match variant {
                CoverVariant::Tree => {
                    let mut used = bag_used.clone();
                    let mut cur = parent[v];
                    while let Some(u) = cur {
                        used.extend(pebbles[u].filter(|p| p.is_y()));
                        cur = parent[u];
                    }
                    min_free(alphabet.ys(), &used)
                }
                CoverVariant::Linear | CoverVariant::LinearComponent => {
                    let scope = if variant == CoverVariant::Linear { 0 } else { comp_of[v] };
                    let j = next_y.entry(scope).or_insert(0);
                    *j += 1;
                    Some(Pebble::Y(*j)).filter(|&p| alphabet.contains(p))
                }
            }
        };
        pebbles[v] = Some(p.ok_or_else(|| Error::TheoremViolation(format!("no free pebble for vertex {v}")))?);
    }
    let fc = ForestCover {
        parent,
        pebbles: pebbles.into_iter().map(|p| p.expect("assigned")).collect(),
        variant,
        alphabet,
        depth: Some(depth),
    };
    let verdict = verify_forest_cover(&fc, g)?;
    if !verdict.ok {
        return Err(violation("decomposition-to-cover conversion", verdict.diagnostic));
    }
    Ok(fc)
}

/// Bag of a forest vertex: its ancestors whose pebble is not reused strictly between.
fn cover_bag(fc: &ForestCover, forest: &Forest, t: usize) -> VSet {
    let chain = forest.ancestors(t);
    let mut bag = 0;
    for (i, &u) in chain.iter().enumerate() {
        if chain[..i].iter().all(|&w| fc.pebbles[w] != fc.pebbles[u]) {
            bag |= bit(u);
        }
    }
    bag
}

/// Decomposition built on the cover's forest (with an empty root for tree covers, and paths
/// concatenated for linear covers).
pub fn cover_to_decomposition(fc: &ForestCover, g: &Graph) -> Result<RootedDecomposition> {
    let verdict = verify_forest_cover(fc, g)?;
    if !verdict.ok {
        return Err(Error::invalid(format!("invalid forest cover: {}", verdict.diagnostic.unwrap_or_default())));
    }
    let forest = fc.forest()?;
    let n = g.n();
    let ys = |set: VSet| members(set).filter(|&u| fc.pebbles[u].is_y()).fold(0, |a, u| a | bit(u));
    let d = match fc.variant {
        CoverVariant::Tree => {
            let mut parent = vec![None];
            let mut bags = vec![0];
            for v in 0..n {
                parent.push(Some(forest.parent[v].map_or(0, |p| p + 1)));
                bags.push(cover_bag(fc, &forest, v));
            }
            let mut ex = BTreeMap::new();
            for leaf in forest.leaves() {
                let chain = forest.ancestors(leaf).iter().fold(0, |a, &u| a | bit(u));
                ex.insert(leaf + 1, ys(chain));
            }
            if n == 0 {
                ex.insert(0, 0);
            }
            RootedDecomposition { parent, bags, kind: DecompKind::Tree, exceptions: Exceptions::PerLeaf(ex) }
        }
        CoverVariant::Linear | CoverVariant::LinearComponent => {
            let mut bags = Vec::new();
            for &r in &forest.roots {
                let mut cur = Some(r);
                while let Some(v) = cur {
                    bags.push(cover_bag(fc, &forest, v));
                    cur = forest.children[v].first().copied();
                }
            }
            if bags.is_empty() {
                bags.push(0);
            }
            let all_y = ys(g.vertices());
            let mut d = RootedDecomposition::path(bags, all_y);
            if fc.variant == CoverVariant::LinearComponent {
                d.exceptions = Exceptions::PerComponent(g.components().into_iter().map(|c| c & all_y).collect());
            }
            d
        }
    };
    let q = (fc.variant == CoverVariant::Tree).then_some(verdict.depth);
    let check = verify_decomposition(&d, g, fc.alphabet.k1, fc.alphabet.k2, q)?;
    if !check.ok {
        return Err(violation("cover-to-decomposition conversion", check.diagnostic));
    }
    Ok(d)
}

/// Construction tree (caterpillar for path decompositions) of `g` from a nice version of `d`.
pub fn decomposition_to_construction(d: &RootedDecomposition, g: &Graph) -> Result<ConstructionTree> {
    let nice = make_nice(d, g)?;
    let forest = nice.forest()?;
    let (k1, k2) = recorded_width(&nice, &forest);
    let alphabet = Alphabet::raw(k1, k2);
    let n = g.n();
    let top = top_nodes(&nice, &forest, n);
    let exceptions = exception_vertices(&nice, &forest, &top);
    let m = nice.bags.len();

    // Colouring assigned top-down where each vertex first appears.
    let mut colour: Vec<Option<Pebble>> = vec![None; n];
    let mut above_ys: Vec<Vec<Pebble>> = vec![Vec::new(); m];
    for &t in &forest.preorder {
        let inherited: Vec<Pebble> = forest.parent[t].map(|p| above_ys[p].clone()).unwrap_or_default();
        for v in members(nice.bags[t]) {
            if top[v] != t {
                continue;
            }
            let used: Vec<Pebble> = members(nice.bags[t]).filter(|&u| u != v).filter_map(|u| colour[u]).collect();
            let c = if exceptions & bit(v) != 0 {
                let mut blocked = used.clone();
                blocked.extend(inherited.iter().copied());
                min_free(alphabet.ys(), &blocked)
            } else {
                min_free(alphabet.xs(), &used)
            };
            colour[v] = Some(c.ok_or_else(|| Error::TheoremViolation(format!("no free label for vertex {v}")))?);
        }
        let mut here = inherited;
        here.extend(members(nice.bags[t]).filter_map(|u| colour[u]).filter(|p| p.is_y()));
        above_ys[t] = here;
    }

    let subtree_union: Vec<VSet> = (0..m).map(|t| forest.subtree(t).iter().fold(0, |a, &s| a | nice.bags[s])).collect();
    let payload = |vertices: VSet, labeled: VSet| -> LabeledGraph {
        let (sub, old) = g.induced(vertices);
        let labels: Vec<(Pebble, usize)> =
            old.iter().enumerate().filter(|&(_, &o)| labeled & bit(o) != 0).map(|(i, &o)| (colour[o].expect("coloured"), i)).collect();
        LabeledGraph::with_labels(sub, alphabet, &labels).expect("labels in alphabet")
    };

    let mut nodes: Vec<CtNode> = (0..m)
        .map(|t| CtNode { graph: payload(subtree_union[t], nice.bags[t]), tag: NodeTag::Leaf, children: Vec::new() })
        .collect();
    for t in 0..m {
        let kids = forest.children[t].clone();
        match kids.as_slice() {
            [] => {}
            [s] if nice.bags[*s] & !nice.bags[t] != 0 => {
                // One vertex more below: its label is deleted here.
                let v = (nice.bags[*s] & !nice.bags[t]).trailing_zeros() as usize;
                nodes[t].tag = NodeTag::Elimination(colour[v].expect("coloured"));
                nodes[t].children = vec![*s];
            }
            [s] => {
                let leaf = nodes.len();
                nodes.push(CtNode { graph: payload(nice.bags[t], nice.bags[t]), tag: NodeTag::Leaf, children: Vec::new() });
                nodes[t].tag = NodeTag::Product;
                nodes[t].children = vec![leaf, *s];
            }
            _ => {
                nodes[t].tag = NodeTag::Product;
                nodes[t].children = kids;
            }
        }
    }
    let root = nice.root().expect("nice root");
    let ct = ConstructionTree { nodes, root, caterpillar: nice.kind == DecompKind::Path };
    let target = LabeledGraph::unlabeled(g.clone(), alphabet);
    let verdict = verify_construction_tree(&ct, &target, k1, k2);
    let depth = verify_decomposition(&nice, g, k1, k2, None)?.depth;
    if !verdict.ok || verdict.depth > depth {
        return Err(violation("decomposition-to-construction conversion", verdict.diagnostic));
    }
    Ok(ct)
}

/// Decomposition whose bags are the labeled vertices of the payloads (the central path for
/// caterpillars), with non-reusable labels as exceptions.
pub fn construction_to_decomposition(ct: &ConstructionTree, g: &Graph) -> Result<RootedDecomposition> {
    let forest = ct.forest()?;
    let (k1, k2) = ct.nodes.iter().fold((0, 0), |(a, b), node| (a.max(node.graph.alphabet().k1), b.max(node.graph.alphabet().k2)));
    let target = LabeledGraph::unlabeled(g.clone(), Alphabet::raw(k1, k2));
    let verdict = verify_construction_tree(ct, &target, k1, k2);
    if !verdict.ok {
        return Err(Error::invalid(format!("invalid construction tree: {}", verdict.diagnostic.unwrap_or_default())));
    }
    let root_iso = crate::graph::labeled_isomorphic(&ct.nodes[ct.root].graph, &target).expect("verified");
    let emb = embeddings(ct, &forest).map_err(Error::invalid)?;
    let mapped = |t: usize, pick: &dyn Fn(Pebble) -> bool| -> VSet {
        ct.nodes[t].graph.labels().filter(|&(p, _)| pick(p)).fold(0, |a, (_, v)| a | bit(root_iso[emb[t][v]]))
    };
    let bag = |t: usize| mapped(t, &|_| true);
    let ybag = |t: usize| mapped(t, &|p: Pebble| p.is_y());
    let d = if ct.caterpillar {
        // Central path from the root to a deepest leaf.
        let deepest = (0..ct.nodes.len()).max_by_key(|&t| (forest.level[t], std::cmp::Reverse(t))).expect("nonempty");
        let mut path = forest.ancestors(deepest);
        path.reverse();
        let s = path.iter().fold(0, |a, &t| a | ybag(t));
        RootedDecomposition::path(path.iter().map(|&t| bag(t)).collect(), s)
    } else {
        let mut ex = BTreeMap::new();
        for leaf in forest.leaves() {
            ex.insert(leaf, forest.ancestors(leaf).iter().fold(0, |a, &t| a | ybag(t)));
        }
        RootedDecomposition {
            parent: forest.parent.clone(),
            bags: (0..ct.nodes.len()).map(bag).collect(),
            kind: DecompKind::Tree,
            exceptions: Exceptions::PerLeaf(ex),
        }
    };
    let q = (!ct.caterpillar).then_some(verdict.depth);
    let check = verify_decomposition(&d, g, k1, k2, q)?;
    if !check.ok {
        return Err(violation("construction-to-decomposition conversion", check.diagnostic));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::set_of;

    #[test]
    fn path_round_trip() {
        let g = Graph::path(3);
        let d = RootedDecomposition::path(vec![set_of([0, 1]), set_of([1, 2])], 0);
        let fc = decomposition_to_cover(&d, &g).unwrap();
        assert_eq!(fc.variant, CoverVariant::Linear);
        assert_eq!(fc.pebbles, vec![Pebble::X(1), Pebble::X(2), Pebble::X(1)]);
        let back = cover_to_decomposition(&fc, &g).unwrap();
        assert!(verify_decomposition(&back, &g, 2, 0, None).unwrap().ok);
    }

    #[test]
    fn triangle_construction() {
        let g = Graph::complete(3);
        let d = RootedDecomposition { parent: vec![None], bags: vec![0b111], kind: DecompKind::Tree, exceptions: Exceptions::PerLeaf(BTreeMap::new()) };
        let ct = decomposition_to_construction(&d, &g).unwrap();
        assert_eq!(ct.elimination_depth().unwrap(), 3);
        let leaves: Vec<&CtNode> = ct.nodes.iter().filter(|n| n.tag == NodeTag::Leaf).collect();
        assert!(leaves.iter().any(|n| n.graph.n() == 3 && n.graph.is_fully_labeled()));
        let back = construction_to_decomposition(&ct, &g).unwrap();
        assert!(verify_decomposition(&back, &g, 3, 0, Some(3)).unwrap().ok);
    }

    #[test]
    fn single_vertex_cover() {
        let g = Graph::empty(1);
        let fc = ForestCover { parent: vec![None], pebbles: vec![Pebble::X(1)], variant: CoverVariant::Tree, alphabet: Alphabet::raw(1, 0), depth: Some(1) };
        let d = cover_to_decomposition(&fc, &g).unwrap();
        assert_eq!(d.bags.iter().filter(|&&b| b != 0).count(), 1);
    }

    #[test]
    fn exceptions_survive_conversion() {
        // Star K_{1,3} with the centre as exception: width (1,1) path decomposition.
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let d = RootedDecomposition::path(vec![set_of([0, 1]), set_of([0, 2]), set_of([0, 3])], set_of([0]));
        assert!(verify_decomposition(&d, &g, 1, 1, None).unwrap().ok);
        for kind in [ObjectKind::Cover, ObjectKind::Construction] {
            let obj = convert(&DecompObject::Decomposition(d.clone()), kind, &g).unwrap();
            let back = convert(&obj, ObjectKind::Decomposition, &g).unwrap();
            let DecompObject::Decomposition(back) = back else { panic!() };
            assert!(verify_decomposition(&back, &g, 1, 1, None).unwrap().ok, "{kind:?}");
        }
    }
}
