use serde::{Deserialize, Serialize};

use super::{chain_holds, Kind, Seq};
use crate::decomp::{verify_forest_cover, CoverVariant, ForestCover};
use crate::error::{Error, Result};
use crate::graph::{Alphabet, Graph, RelStructure};

/// A coalgebra `α : A → G(A)`, stored as the sequence and position assigned to each vertex.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Coalgebra {
    pub kind: Kind,
    pub alphabet: Alphabet,
    /// Length bound for `P`.
    pub bound: Option<usize>,
    pub alpha: Vec<(Seq, usize)>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum BridgeObject {
    Coalgebra(Coalgebra),
    Cover(ForestCover),
}

/// Converts in whichever direction `x` asks for.
pub fn coalgebra_cover_bridge(x: &BridgeObject, g: &Graph) -> Result<BridgeObject> {
    Ok(match x {
        BridgeObject::Coalgebra(c) => BridgeObject::Cover(coalgebra_to_cover(c, g)?),
        BridgeObject::Cover(fc) => BridgeObject::Coalgebra(cover_to_coalgebra(fc, g)?),
    })
}

/// Tree covers become `P` coalgebras bounded by the cover depth (or height); linear covers
/// become `Pr` coalgebras with one sequence per path.
pub fn cover_to_coalgebra(fc: &ForestCover, g: &Graph) -> Result<Coalgebra> {
    let verdict = verify_forest_cover(fc, g)?;
    if !verdict.ok {
        return Err(Error::invalid(format!("not a forest cover: {}", verdict.diagnostic.unwrap_or_default())));
    }
    let forest = fc.forest()?;
    let chain = |v: usize| -> Seq { forest.ancestors(v).iter().rev().map(|&u| (fc.pebbles[u], u)).collect() };
    let coalgebra = match fc.variant {
        CoverVariant::Tree => Coalgebra {
            kind: Kind::P,
            alphabet: fc.alphabet,
            bound: Some(fc.depth.unwrap_or(verdict.depth).max(1)),
            alpha: (0..g.n()).map(|v| (chain(v), forest.level[v])).collect(),
        },
        CoverVariant::Linear | CoverVariant::LinearComponent => {
            let alpha = (0..g.n())
                .map(|v| {
                    let mut bottom = v;
                    while let [child] = forest.children[bottom][..] {
                        bottom = child;
                    }
                    (chain(bottom), forest.level[v])
                })
                .collect();
            Coalgebra { kind: Kind::Pr, alphabet: fc.alphabet, bound: None, alpha }
        }
    };
    check_coalgebra(&coalgebra, g)?;
    Ok(coalgebra)
}

/// Reads the forest off the sequences: the parent of a vertex is the entry just before it.
pub fn coalgebra_to_cover(c: &Coalgebra, g: &Graph) -> Result<ForestCover> {
    check_coalgebra(c, g).map_err(|e| match e {
        Error::Invalid(msg) => Error::invalid(format!("not a coalgebra: {msg}")),
        other => other,
    })?;
    let parent = c.alpha.iter().map(|(s, i)| i.checked_sub(1).map(|j| s[j].1)).collect();
    let pebbles = c.alpha.iter().map(|(s, i)| s[*i].0).collect();
    let (variant, depth) = match c.kind {
        Kind::P => (CoverVariant::Tree, c.bound),
        Kind::Pr => (CoverVariant::LinearComponent, None),
    };
    let fc = ForestCover { parent, pebbles, variant, alphabet: c.alphabet, depth };
    let verdict = verify_forest_cover(&fc, g)?;
    if !verdict.ok {
        return Err(Error::TheoremViolation(format!("coalgebra gave a bad cover: {}", verdict.diagnostic.unwrap_or_default())));
    }
    Ok(fc)
}

/// Counit, comultiplication and homomorphism conditions.
fn check_coalgebra(c: &Coalgebra, g: &Graph) -> Result<()> {
    let n = g.n();
    if c.alpha.len() != n {
        return Err(Error::invalid(format!("{} images for {n} vertices", c.alpha.len())));
    }
    for (v, (s, i)) in c.alpha.iter().enumerate() {
        if *i >= s.len() || s[*i].1 != v {
            return Err(Error::invalid(format!("counit fails at vertex {v}")));
        }
        if c.kind == Kind::P && (*i + 1 != s.len() || c.bound.is_some_and(|q| s.len() > q)) {
            return Err(Error::invalid(format!("sequence of vertex {v} has the wrong length")));
        }
        for (j, &(z, u)) in s.iter().enumerate() {
            if !c.alphabet.contains(z) || u >= n {
                return Err(Error::invalid(format!("entry ({z}, {u}) of vertex {v} is out of range")));
            }
            if z.is_y() && s[..j].iter().any(|e| e.0 == z) {
                return Err(Error::invalid(format!("pebble {z} repeats in the sequence of vertex {v}")));
            }
            let expected = match c.kind {
                Kind::P => (&s[..=j], j),
                Kind::Pr => (&s[..], j),
            };
            let (t, k) = &c.alpha[u];
            if (&t[..], *k) != expected {
                return Err(Error::invalid(format!("comultiplication fails at vertex {u} inside the sequence of {v}")));
            }
        }
    }
    let structure = RelStructure::from_graph(g);
    for (u, v) in g.edges() {
        let ((su, iu), (sv, iv)) = (&c.alpha[u], &c.alpha[v]);
        let (longer, shorter) = if su.len() >= sv.len() { (su, sv) } else { (sv, su) };
        let related = match c.kind {
            Kind::P => longer.starts_with(shorter),
            Kind::Pr => su == sv,
        };
        if !related || !chain_holds(&structure, 0, longer, &[*iu, *iv]) {
            return Err(Error::invalid(format!("edge {u}-{v} is not preserved")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Pebble::{X, Y};

    #[test]
    fn path_cover_gives_one_shared_sequence() {
        let g = Graph::path(3);
        let fc = ForestCover {
            parent: vec![None, Some(0), Some(1)],
            pebbles: vec![X(1), X(2), X(1)],
            variant: CoverVariant::Linear,
            alphabet: Alphabet::raw(2, 0),
            depth: None,
        };
        let c = cover_to_coalgebra(&fc, &g).unwrap();
        let seq = vec![(X(1), 0), (X(2), 1), (X(1), 2)];
        assert_eq!(c.alpha, vec![(seq.clone(), 0), (seq.clone(), 1), (seq, 2)]);
        let back = coalgebra_to_cover(&c, &g).unwrap();
        assert_eq!(back.parent, fc.parent);
        assert_eq!(back.pebbles, fc.pebbles);
    }

    #[test]
    fn tree_cover_round_trip() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let fc = ForestCover {
            parent: vec![None, Some(0), Some(0), Some(0)],
            pebbles: vec![Y(1), X(1), X(1), X(1)],
            variant: CoverVariant::Tree,
            alphabet: Alphabet::raw(1, 1),
            depth: Some(2),
        };
        let c = coalgebra_cover_bridge(&BridgeObject::Cover(fc.clone()), &g).unwrap();
        assert_eq!(coalgebra_cover_bridge(&c, &g).unwrap(), BridgeObject::Cover(fc));
    }

    #[test]
    fn broken_coalgebras_are_rejected() {
        let g = Graph::path(2);
        let good = Coalgebra {
            kind: Kind::P,
            alphabet: Alphabet::raw(2, 0),
            bound: Some(2),
            alpha: vec![(vec![(X(1), 0)], 0), (vec![(X(1), 0), (X(2), 1)], 1)],
        };
        assert!(coalgebra_to_cover(&good, &g).is_ok());
        let mut bad = good.clone();
        bad.alpha[1].0[1].0 = X(1);
        assert!(coalgebra_to_cover(&bad, &g).is_err());
        let mut bad = good.clone();
        bad.alpha[0] = (vec![(X(2), 0)], 0);
        assert!(coalgebra_to_cover(&bad, &g).is_err());
        let mut bad = good;
        bad.bound = Some(1);
        assert!(coalgebra_to_cover(&bad, &g).is_err());
    }
}
