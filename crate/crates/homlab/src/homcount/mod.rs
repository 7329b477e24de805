//! Homomorphism and subgraph counts, linear combinations, interpolation and spasms.

mod interpolate;
mod lincomb;
mod spasm;

pub use interpolate::{interpolate, interpolation_polynomial};
pub use lincomb::{hom_lincomb, rat, LinComb, Rational};
pub use spasm::{spasm, sub_coefficients, sub_count, sub_via_coefficients};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bit, members, Graph, LabeledGraph, VSet};

/// Number of homomorphisms `f → g` that respect every label of `f`.
pub fn hom_count(f: &LabeledGraph, g: &LabeledGraph) -> Result<u128> {
    let pins = match pins(f, g)? {
        Some(p) => p,
        None => return Ok(0),
    };
    Ok(count_maps(f.graph(), g.graph(), pins, false))
}

/// Unlabeled convenience wrapper.
pub fn hom(f: &Graph, g: &Graph) -> u128 {
    count_maps(f, g, vec![None; f.n()], false)
}

/// Number of injective homomorphisms `f → g`.
pub fn inj_count(f: &Graph, g: &Graph) -> u128 {
    count_maps(f, g, vec![None; f.n()], true)
}

pub fn automorphism_count(f: &Graph) -> u128 {
    inj_count(f, f)
}

/// Pre-assigned images of labeled vertices; `None` if the labels already clash.
fn pins(f: &LabeledGraph, g: &LabeledGraph) -> Result<Option<Vec<Option<usize>>>> {
    let mut pin = vec![None; f.n()];
    for (p, v) in f.labels() {
        let target = g.label(p).ok_or_else(|| Error::MissingLabel(p.to_string()))?;
        match pin[v] {
            Some(t) if t != target => return Ok(None),
            _ => pin[v] = Some(target),
        }
    }
    Ok(Some(pin))
}

fn count_maps(f: &Graph, g: &Graph, pin: Vec<Option<usize>>, injective: bool) -> u128 {
    if injective && f.n() > g.n() {
        return 0;
    }
    for (u, v) in f.edges() {
        if let (Some(a), Some(b)) = (pin[u], pin[v]) {
            if !g.has_edge(a, b) {
                return 0;
            }
        }
    }
    if injective {
        let mut used: VSet = 0;
        for &t in pin.iter().flatten() {
            if used & bit(t) != 0 {
                return 0;
            }
            used |= bit(t);
        }
        let free: VSet = (0..f.n()).filter(|&v| pin[v].is_none()).fold(0, |a, v| a | bit(v));
        let order = order_within(f, free, &pin);
        let mut assign = pin;
        return extend(f, g, &order, 0, &mut assign, used, true);
    }
    let mut total: u128 = 1;
    for comp in f.components() {
        let free: VSet = members(comp).filter(|&v| pin[v].is_none()).fold(0, |a, v| a | bit(v));
        if free == 0 {
            continue;
        }
        let order = order_within(f, free, &pin);
        let mut assign = pin.clone();
        let c = extend(f, g, &order, 0, &mut assign, 0, false);
        total = total.saturating_mul(c);
        if total == 0 {
            return 0;
        }
    }
    total
}

/// Free vertices ordered so each has as many earlier (or pinned) neighbours as possible.
fn order_within(f: &Graph, free: VSet, pin: &[Option<usize>]) -> Vec<usize> {
    let mut placed: VSet = (0..f.n()).filter(|&v| pin[v].is_some()).fold(0, |a, v| a | bit(v));
    let mut rest = free;
    let mut order = Vec::new();
    while rest != 0 {
        let v = members(rest)
            .max_by_key(|&v| ((f.neighbors(v) & placed).count_ones(), f.degree(v), std::cmp::Reverse(v)))
            .expect("nonempty");
        order.push(v);
        placed |= bit(v);
        rest &= !bit(v);
    }
    order
}

fn extend(f: &Graph, g: &Graph, order: &[usize], i: usize, assign: &mut [Option<usize>], used: VSet, injective: bool) -> u128 {
    if i == order.len() {
        return 1;
    }
    let v = order[i];
    let mut cand = g.vertices();
    for u in members(f.neighbors(v)) {
        if let Some(a) = assign[u] {
            cand &= g.neighbors(a);
        }
    }
    if injective {
        cand &= !used;
    }
    if i + 1 == order.len() {
        return cand.count_ones() as u128;
    }
    let mut total = 0u128;
    for w in members(cand) {
        assign[v] = Some(w);
        total += extend(f, g, order, i + 1, assign, used | bit(w), injective);
    }
    assign[v] = None;
    total
}

/// Hom counts from each family member into `g`, by family position.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct HomProfile {
    pub counts: Vec<u128>,
}

pub fn hom_profile(family: &[Graph], g: &Graph) -> HomProfile {
    HomProfile { counts: family.par_iter().map(|f| hom(f, g)).collect() }
}
