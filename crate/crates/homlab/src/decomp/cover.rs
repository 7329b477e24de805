use serde::{Deserialize, Serialize};

use super::{Forest, Verdict};
use crate::error::{Error, Result};
use crate::graph::{Alphabet, Graph, Pebble};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum CoverVariant {
    Tree,
    /// Every tree of the forest is a path and each non-reusable pebble is used once overall.
    Linear,
    /// Every tree of the forest is a path and each non-reusable pebble is used once per path.
    LinearComponent,
}

/// Rooted forest on the vertices of a graph together with a pebbling.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ForestCover {
    pub parent: Vec<Option<usize>>,
    pub pebbles: Vec<Pebble>,
    pub variant: CoverVariant,
    pub alphabet: Alphabet,
    pub depth: Option<usize>,
}

impl ForestCover {
    pub fn forest(&self) -> Result<Forest> {
        Forest::new(&self.parent)
    }
}

/// Checks the cover conditions; the verdict's depth is the forest height.
pub fn verify_forest_cover(fc: &ForestCover, g: &Graph) -> Result<Verdict> {
    let n = g.n();
    if fc.parent.len() != n || fc.pebbles.len() != n {
        return Err(Error::invalid(format!(
            "cover has {} parents and {} pebbles for {n} vertices",
            fc.parent.len(),
            fc.pebbles.len()
        )));
    }
    let forest = fc.forest()?;
    let height = forest.height();
    let p = &fc.pebbles;
    for v in 0..n {
        if !fc.alphabet.contains(p[v]) {
            return Ok(Verdict::fail(height, format!("vertex {v} carries pebble {} outside {}", p[v], fc.alphabet)));
        }
    }
    for (u, v) in g.edges() {
        let (top, bottom) = if forest.is_ancestor(u, v) {
            (u, v)
        } else if forest.is_ancestor(v, u) {
            (v, u)
        } else {
            return Ok(Verdict::fail(height, format!("edge {u}-{v} joins incomparable vertices")));
        };
        let mut w = bottom;
        while w != top {
            if p[w] == p[top] {
                return Ok(Verdict::fail(
                    height,
                    format!("pebble {} of {top} repeats at {w} below it on edge {top}-{bottom}", p[top]),
                ));
            }
            w = forest.parent[w].expect("ancestor chain");
        }
    }
    for w in 0..n {
        for &u in forest.ancestors(w).iter().skip(1) {
            if p[u].is_y() && p[u] == p[w] {
                return Ok(Verdict::fail(height, format!("non-reusable pebble {} on {u} reused at descendant {w}", p[u])));
            }
        }
    }
    if fc.variant != CoverVariant::Tree {
        if let Some(t) = (0..n).find(|&t| forest.children[t].len() > 1) {
            return Ok(Verdict::fail(height, format!("vertex {t} has several children in a linear cover")));
        }
        let tree_of: Vec<usize> = (0..n).map(|v| *forest.ancestors(v).last().expect("nonempty")).collect();
        for u in 0..n {
            for w in u + 1..n {
                let same_scope = fc.variant == CoverVariant::Linear || tree_of[u] == tree_of[w];
                if p[u].is_y() && p[u] == p[w] && same_scope {
                    return Ok(Verdict::fail(height, format!("non-reusable pebble {} used on both {u} and {w}", p[u])));
                }
            }
        }
    }
    if let Some(q) = fc.depth {
        if height > q {
            return Ok(Verdict::fail(height, format!("forest height {height} exceeds {q}")));
        }
    }
    Ok(Verdict::pass(height))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Pebble::{X, Y};

    fn chain(pebbles: Vec<Pebble>, variant: CoverVariant, alphabet: Alphabet) -> ForestCover {
        let parent = (0..pebbles.len()).map(|i| i.checked_sub(1)).collect();
        ForestCover { parent, pebbles, variant, alphabet, depth: None }
    }

    #[test]
    fn path_cover() {
        let g = Graph::path(3);
        let fc = chain(vec![X(1), X(2), X(1)], CoverVariant::Linear, Alphabet::raw(2, 0));
        assert!(verify_forest_cover(&fc, &g).unwrap().ok);
        let bad = chain(vec![X(1), X(1), X(2)], CoverVariant::Linear, Alphabet::raw(2, 0));
        assert!(!verify_forest_cover(&bad, &g).unwrap().ok);
    }

    #[test]
    fn non_reusable_repeat() {
        let g = Graph::empty(2);
        let fc = chain(vec![Y(1), Y(1)], CoverVariant::Tree, Alphabet::raw(0, 1));
        let v = verify_forest_cover(&fc, &g).unwrap();
        assert!(v.diagnostic.unwrap().contains("non-reusable"));
    }

    #[test]
    fn linear_variants() {
        // Two separate roots each with y1.
        let g = Graph::empty(2);
        let mut fc = ForestCover {
            parent: vec![None, None],
            pebbles: vec![Y(1), Y(1)],
            variant: CoverVariant::Linear,
            alphabet: Alphabet::raw(0, 1),
            depth: Some(1),
        };
        assert!(!verify_forest_cover(&fc, &g).unwrap().ok);
        fc.variant = CoverVariant::LinearComponent;
        assert!(verify_forest_cover(&fc, &g).unwrap().ok);
        fc.variant = CoverVariant::Tree;
        assert!(verify_forest_cover(&fc, &g).unwrap().ok);
    }

    #[test]
    fn incomparable_edge_and_depth() {
        let g = Graph::path(2);
        let fc = ForestCover {
            parent: vec![None, None],
            pebbles: vec![X(1), X(1)],
            variant: CoverVariant::Tree,
            alphabet: Alphabet::raw(1, 0),
            depth: None,
        };
        assert!(!verify_forest_cover(&fc, &g).unwrap().ok);
        let mut fc = chain(vec![X(1), X(2)], CoverVariant::Tree, Alphabet::raw(2, 0));
        fc.depth = Some(1);
        assert!(verify_forest_cover(&fc, &g).unwrap().diagnostic.unwrap().contains("height"));
    }
}
