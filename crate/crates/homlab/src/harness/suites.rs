//! Named cross-checking suites. Each suite expands into independent instances with stable ids;
//! instances run on the rayon pool and their observations are merged in id order.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::enumerate::{enumerate_family, enumerate_graphs_with_budget, FamilyClass, FamilySpec, DEFAULT_MAX_N};
use super::oracles::{exhaustive_linear_cover, exhaustive_path_decomposition, exhaustive_tree_cover, exhaustive_tree_decomposition};
use crate::cfi::{build_cfi, cfi_even, cfi_odd};
use crate::comonad::{build_universe, check_comonad_laws, coalgebra_to_cover, cokleisli_search, cover_to_coalgebra, ComonadParams, Kind};
use crate::decomp::{
    decomposition_to_construction, eval_hom_via_construction, verify_construction_tree, verify_decomposition, CoverVariant, ForestCover,
    RootedDecomposition,
};
use crate::error::{Error, Result};
use crate::graph::{are_isomorphic, full_set, to_graph6, Alphabet, Graph, LabeledGraph, Pebble, RelStructure};
use crate::homcount::{hom, hom_count, hom_lincomb, rat, sub_coefficients, sub_via_coefficients, LinComb};
use crate::logic::{
    analyze, count_solutions, evaluate, formula_from_construction, lincomb_from_formula, parse_formula, quantifier_rank,
    to_primitive_normal_form, Formula, Mode, Node,
};
use crate::modelgames::{solve_bijective_pebble, solve_exists_pebble, Winner};
use crate::pursuit::{is_monotone, solve_cr, solve_ns, solve_ns_direct, Outcome, Strategy};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Overrides the largest graph order of the suite (capped at `DEFAULT_MAX_N`).
    pub budget: Option<usize>,
    /// Runs only the instance with this id.
    pub instance: Option<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: DEFAULT_SEED, budget: None, instance: None }
    }
}

impl SuiteConfig {
    fn order(&self, default: usize) -> usize {
        self.budget.unwrap_or(default)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Counterexample {
    pub check: String,
    pub instance: String,
    pub detail: String,
    /// Command line that reruns just this instance.
    pub reproduce: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub instances: usize,
    pub checks: Vec<Check>,
    /// The first `MAX_COUNTEREXAMPLES` failures in instance order.
    pub counterexamples: Vec<Counterexample>,
    pub passed: bool,
}

const MAX_COUNTEREXAMPLES: usize = 100;

struct Obs {
    check: &'static str,
    ok: bool,
    detail: String,
}

fn obs(check: &'static str, ok: bool, detail: impl FnOnce() -> String) -> Obs {
    Obs { check, ok, detail: if ok { String::new() } else { detail() } }
}

type Job = Box<dyn Fn() -> Result<Vec<Obs>> + Send + Sync>;

struct Instance {
    id: String,
    job: Job,
}

fn instance(id: String, job: impl Fn() -> Result<Vec<Obs>> + Send + Sync + 'static) -> Instance {
    Instance { id, job: Box::new(job) }
}

type Builder = fn(&SuiteConfig) -> Result<Vec<Instance>>;

const SUITES: [(&str, Builder); 11] = [
    ("characterization-path", characterization_path),
    ("characterization-tree", characterization_tree),
    ("nonreusable-first", nonreusable_first),
    ("monotone-strategies", monotone_strategies),
    ("cfi-parity", cfi_parity),
    ("hdc-desk", hdc_desk),
    ("spasm-sub", spasm_sub),
    ("construction-dp", construction_dp),
    ("logic-roundtrip", logic_roundtrip),
    ("comonad-laws-bridge", comonad_laws_bridge),
    ("morphism-power", morphism_power),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).collect()
}

pub fn run_suite(name: &str, config: &SuiteConfig) -> Result<SuiteReport> {
    let build = SUITES.iter().find(|s| s.0 == name).map(|s| s.1).ok_or_else(|| Error::UnknownSuite {
        name: name.to_string(),
        available: suite_names().into_iter().map(String::from).collect(),
    })?;
    let mut instances = build(config)?;
    if let Some(id) = &config.instance {
        instances.retain(|i| &i.id == id);
        if instances.is_empty() {
            return Err(Error::invalid(format!("suite {name} has no instance '{id}'")));
        }
    }
    let results: Vec<Vec<Obs>> = instances
        .par_iter()
        .map(|i| (i.job)().unwrap_or_else(|e| vec![Obs { check: "no-error", ok: false, detail: e.to_string() }]))
        .collect();

    let budget = config.budget.map(|b| format!(" --budget {b}")).unwrap_or_default();
    let mut checks: Vec<Check> = Vec::new();
    let mut slot: HashMap<&str, usize> = HashMap::new();
    let mut counterexamples = Vec::new();
    let mut failures = 0;
    for (inst, observations) in instances.iter().zip(results) {
        for o in observations {
            let i = *slot.entry(o.check).or_insert_with(|| {
                checks.push(Check { name: o.check.to_string(), passed: 0, failed: 0 });
                checks.len() - 1
            });
            if o.ok {
                checks[i].passed += 1;
                continue;
            }
            checks[i].failed += 1;
            failures += 1;
            if counterexamples.len() < MAX_COUNTEREXAMPLES {
                counterexamples.push(Counterexample {
                    check: o.check.to_string(),
                    instance: inst.id.clone(),
                    detail: o.detail,
                    reproduce: format!("homlab suite {name} --seed {}{budget} --instance '{}'", config.seed, inst.id),
                });
            }
        }
    }
    Ok(SuiteReport {
        suite: name.to_string(),
        seed: config.seed,
        instances: instances.len(),
        passed: failures == 0 && !checks.is_empty(),
        checks,
        counterexamples,
    })
}

fn graphs(n_max: usize, connected: bool) -> Result<Vec<Graph>> {
    enumerate_graphs_with_budget(n_max, connected, DEFAULT_MAX_N)
}

/// `(k1, k2) ∈ {0..3} × {0..2}` with at least one pebble.
fn width_grid() -> Vec<(usize, usize)> {
    (0..=3).flat_map(|k1| (0..=2).map(move |k2| (k1, k2))).filter(|&(k1, k2)| k1 + k2 >= 1).collect()
}

fn pursuers_win(outcome: Outcome) -> Result<bool> {
    match outcome {
        Outcome::PursuersWin => Ok(true),
        Outcome::EvaderWins => Ok(false),
        Outcome::Inconclusive => Err(Error::Budget),
    }
}

fn characterization_path(config: &SuiteConfig) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for g in graphs(config.order(6), true)? {
        for (k1, k2) in width_grid() {
            let g = g.clone();
            out.push(instance(format!("{} {k1} {k2}", to_graph6(&g)), move || {
                let s = solve_ns(&g, k1, k2)?;
                let win = pursuers_win(s.outcome)?;
                let d = exhaustive_path_decomposition(&g, k1, k2)?;
                let fc = exhaustive_linear_cover(&g, k1, k2)?;
                let mut o = vec![
                    obs("game-vs-decomposition", win == d.is_some(), || format!("searchers win: {win}, decomposition: {}", d.is_some())),
                    obs("game-vs-linear-cover", win == fc.is_some(), || format!("searchers win: {win}, cover: {}", fc.is_some())),
                ];
                if let Some(dec) = &s.decomposition {
                    let v = verify_decomposition(dec, &g, k1, k2, None)?;
                    o.push(obs("certificate-verifies", v.ok, || v.diagnostic.clone().unwrap_or_default()));
                }
                Ok(o)
            }));
        }
    }
    Ok(out)
}

fn characterization_tree(config: &SuiteConfig) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for g in graphs(config.order(5), true)? {
        for (k1, k2) in width_grid() {
            for q in 1..=4 {
                let g = g.clone();
                out.push(instance(format!("{} {k1} {k2} {q}", to_graph6(&g)), move || {
                    let s = solve_cr(&g, k1, k2, q)?;
                    let win = pursuers_win(s.outcome)?;
                    let d = exhaustive_tree_decomposition(&g, k1, k2, q)?;
                    let fc = exhaustive_tree_cover(&g, k1, k2, q)?;
                    let mut o = vec![
                        obs("game-vs-decomposition", win == d.is_some(), || format!("cops win: {win}, decomposition: {}", d.is_some())),
                        obs("game-vs-tree-cover", win == fc.is_some(), || format!("cops win: {win}, cover: {}", fc.is_some())),
                    ];
                    if let Some(dec) = &s.decomposition {
                        let v = verify_decomposition(dec, &g, k1, k2, Some(q))?;
                        o.push(obs("certificate-verifies", v.ok, || v.diagnostic.clone().unwrap_or_default()));
                    }
                    Ok(o)
                }));
            }
        }
    }
    Ok(out)
}

fn nonreusable_first(config: &SuiteConfig) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for g in graphs(config.order(5), true)? {
        for (k1, k2) in width_grid() {
            let g = g.clone();
            out.push(instance(format!("{} {k1} {k2}", to_graph6(&g)), move || {
                let normal = solve_ns(&g, k1, k2)?.outcome;
                let direct = solve_ns_direct(&g, k1, k2, usize::MAX)?;
                Ok(vec![obs("normal-form-vs-direct", normal == direct, || format!("normal form {normal:?}, direct search {direct:?}"))])
            }));
        }
    }
    Ok(out)
}

fn monotone_strategies(config: &SuiteConfig) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for g in graphs(config.order(6), true)? {
        for (k1, k2) in width_grid() {
            let g = g.clone();
            out.push(instance(format!("ns {} {k1} {k2}", to_graph6(&g)), move || {
                let s = solve_ns(&g, k1, k2)?;
                if !pursuers_win(s.outcome)? {
                    return Ok(Vec::new());
                }
                let ok = match s.strategy {
                    Some(st) => is_monotone(&Strategy::Ns(st), &g)?,
                    None => false,
                };
                Ok(vec![obs("search-strategy-monotone", ok, || "winning search strategy missing or not monotone".into())])
            }));
        }
    }
    for g in graphs(config.order(5), true)? {
        for (k1, k2) in width_grid() {
            for q in 1..=4 {
                let g = g.clone();
                out.push(instance(format!("cr {} {k1} {k2} {q}", to_graph6(&g)), move || {
                    let s = solve_cr(&g, k1, k2, q)?;
                    if !pursuers_win(s.outcome)? {
                        return Ok(Vec::new());
                    }
                    let ok = !s.monotone_gap
                        && match s.strategy {
                            Some(st) => is_monotone(&Strategy::Cr(st), &g)?,
                            None => false,
                        };
                    Ok(vec![obs("cop-strategy-monotone", ok, || format!("monotone gap: {}", s.monotone_gap))])
                }));
            }
        }
    }
    Ok(out)
}

fn cfi_parity(config: &SuiteConfig) -> Result<Vec<Instance>> {
    let seed = config.seed;
    Ok(graphs(config.order(5), true)?
        .into_iter()
        .enumerate()
        .map(|(i, g)| {
            instance(to_graph6(&g), move || {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
                let all = full_set(g.n());
                let mut o = Vec::new();
                for _ in 0..10 {
                    let (s, t) = (rng.gen::<u64>() & all, rng.gen::<u64>() & all);
                    let iso = are_isomorphic(&build_cfi(&g, s)?.graph, &build_cfi(&g, t)?.graph).is_some();
                    let same = s.count_ones() % 2 == t.count_ones() % 2;
                    o.push(obs("iso-iff-same-parity", iso == same, || format!("twists {s:#b} and {t:#b}: isomorphic {iso}")));
                }
                Ok(o)
            })
        })
        .collect())
}

fn hdc_desk(config: &SuiteConfig) -> Result<Vec<Instance>> {
    let c4 = Graph::cycle(4);
    let even = Arc::new(cfi_even(&c4)?.graph);
    let odd = Arc::new(cfi_odd(&c4)?.graph);
    let spec = FamilySpec { class: FamilyClass::Path { k1: 2, k2: 0 }, max_n: config.order(8), connected: false };
    let mut out: Vec<Instance> = enumerate_family(spec)?
        .into_iter()
        .map(|m| {
            let (even, odd) = (even.clone(), odd.clone());
            instance(to_graph6(&m.graph), move || {
                let (a, b) = (hom(&m.graph, &even), hom(&m.graph, &odd));
                Ok(vec![obs("equal-over-family", a == b, || format!("hom counts {a} and {b}"))])
            })
        })
        .collect();
    out.push(instance("C4 golden".into(), move || {
        let (a, b) = (hom(&c4, &even), hom(&c4, &odd));
        let wide = solve_ns(&c4, 3, 0)?.outcome == Outcome::PursuersWin;
        let narrow = solve_ns(&c4, 2, 0)?.outcome == Outcome::PursuersWin;
        Ok(vec![
            obs("golden-counts", (a, b) == (64, 48), || format!("hom(C4, X) = {a}, hom(C4, X~) = {b}")),
            obs("separator-in-wider-class", wide && !narrow, || format!("C4 in width (3,0): {wide}, in (2,0): {narrow}")),
        ])
    }));
    Ok(out)
}

/// Graphs with at most `max_edges` edges and no isolated vertices, plus `K1`.
fn small_patterns(max_edges: usize) -> Result<Vec<Graph>> {
    let mut all = vec![Graph::empty(1)];
    let mut level = vec![Graph::empty(0)];
    for _ in 0..max_edges {
        let mut next: Vec<Graph> = Vec::new();
        for base in &level {
            let n = base.n();
            let mut options: Vec<(usize, (usize, usize))> = Vec::new();
            for u in 0..n {
                options.extend((u + 1..n).filter(|&v| !base.has_edge(u, v)).map(|v| (n, (u, v))));
                options.push((n + 1, (u, n)));
            }
            options.push((n + 2, (n, n + 1)));
            for (order, e) in options {
                let mut edges = base.edges();
                edges.push(e);
                let g = Graph::from_edges(order, &edges)?;
                if !next.iter().any(|h| are_isomorphic(h, &g).is_some()) {
                    next.push(g);
                }
            }
        }
        all.extend(next.iter().cloned());
        level = next;
    }
    Ok(all)
}

/// Subgraph counts by listing edge subsets of `g` and identifying the graphs they span.
fn subgraphs_by_listing(patterns: &[Graph], g: &Graph) -> Vec<u128> {
    let shape = |h: &Graph| (h.n(), h.edge_count(), h.degree_sequence());
    let mut by_shape: HashMap<(usize, usize, Vec<usize>), Vec<usize>> = HashMap::new();
    for (i, f) in patterns.iter().enumerate() {
        by_shape.entry(shape(f)).or_default().push(i);
    }
    let mut counts = vec![0u128; patterns.len()];
    for (i, f) in patterns.iter().enumerate() {
        if f.edge_count() == 0 {
            counts[i] = if f.n() == 1 { g.n() as u128 } else { 1 };
        }
    }
    let edges = g.edges();
    let max_edges = patterns.iter().map(Graph::edge_count).max().unwrap_or(0);
    let mut chosen = Vec::new();
    list_subsets(&edges, 0, max_edges, &mut chosen, &mut |subset| {
        let mut index = vec![usize::MAX; g.n()];
        let mut n = 0;
        for &(u, v) in subset {
            for w in [u, v] {
                if index[w] == usize::MAX {
                    index[w] = n;
                    n += 1;
                }
            }
        }
        let local: Vec<(usize, usize)> = subset.iter().map(|&(u, v)| (index[u], index[v])).collect();
        let h = Graph::from_edges(n, &local).expect("edges of g");
        if let Some(candidates) = by_shape.get(&shape(&h)) {
            if let Some(&i) = candidates.iter().find(|&&i| are_isomorphic(&patterns[i], &h).is_some()) {
                counts[i] += 1;
            }
        }
    });
    counts
}

fn list_subsets(edges: &[(usize, usize)], from: usize, left: usize, chosen: &mut Vec<(usize, usize)>, visit: &mut dyn FnMut(&[(usize, usize)])) {
    if !chosen.is_empty() {
        visit(chosen);
    }
    if left == 0 {
        return;
    }
    for i in from..edges.len() {
        chosen.push(edges[i]);
        list_subsets(edges, i + 1, left - 1, chosen, visit);
        chosen.pop();
    }
}

fn spasm_sub(config: &SuiteConfig) -> Result<Vec<Instance>> {
    let patterns = small_patterns(4)?;
    let coefficients: Vec<LinComb> = patterns.par_iter().map(sub_coefficients).collect::<Result<_>>()?;
    let shared = Arc::new((patterns, coefficients));
    Ok(graphs(config.order(7), false)?
        .into_iter()
        .map(|g| {
            let shared = shared.clone();
            instance(to_graph6(&g), move || {
                let (patterns, coefficients) = &*shared;
                let listed = subgraphs_by_listing(patterns, &g);
                Ok(patterns
                    .iter()
                    .zip(coefficients)
                    .zip(listed)
                    .map(|((f, lc), want)| {
                        let got = sub_via_coefficients(lc, &g);
                        obs("coefficients-vs-listing", got == rat(want as i64), || format!("pattern {}: {got} vs {want}", to_graph6(f)))
                    })
                    .collect())
            })
        })
        .collect())
}

/// Solver decompositions of `f` for the small width grid, as `(label, decomposition, k1, k2)`.
fn solver_decompositions(f: &Graph) -> Result<Vec<(String, RootedDecomposition, usize, usize)>> {
    let mut out = Vec::new();
    for (k1, k2) in [(1, 0), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2)] {
        if let Some(d) = solve_ns(f, k1, k2)?.decomposition {
            out.push((format!("path {k1} {k2}"), d, k1, k2));
        }
        if let Some(d) = solve_cr(f, k1, k2, f.n().max(1))?.decomposition {
            out.push((format!("tree {k1} {k2}"), d, k1, k2));
        }
    }
    Ok(out)
}

fn construction_dp(config: &SuiteConfig) -> Result<Vec<Instance>> {
    let n = config.order(5);
    let targets = Arc::new(graphs(n, false)?);
    let mut out = Vec::new();
    for f in graphs(n, false)? {
        let f = Arc::new(f);
        for (label, d, k1, k2) in solver_decompositions(&f)? {
            let (f, targets) = (f.clone(), targets.clone());
            let id = format!("{} {label}", to_graph6(&f));
            out.push(instance(id, move || {
                let ct = decomposition_to_construction(&d, &f)?;
                let root = ct.nodes[ct.root].graph.clone();
                let v = verify_construction_tree(&ct, &root, k1, k2);
                let mut o = vec![obs("tree-verifies", v.ok, || v.diagnostic.clone().unwrap_or_default())];
                for g in targets.iter() {
                    let target = LabeledGraph::unlabeled(g.clone(), root.alphabet());
                    let dp = eval_hom_via_construction(&ct, &target)?;
                    let direct = hom_count(&root, &target)?;
                    let plain = hom(&f, g);
                    o.push(obs("dp-vs-hom", dp == direct && direct == plain, || format!("target {}: {dp} vs {direct} vs {plain}", to_graph6(g))));
                }
                Ok(o)
            }));
        }
    }
    Ok(out)
}

fn unlabeled(g: &Graph, alphabet: Alphabet) -> LabeledGraph {
    LabeledGraph::unlabeled(g.clone(), alphabet)
}

/// Formulas checked on every labeling of every small graph.
const FORMULA_PANEL: [&str; 6] = [
    "(= x1 x2)",
    "(E x1 x1)",
    "(exists x1 (and (= x1 w1) (E x2 x1)))",
    "(and (not (= x1 x2)) (exists x2 (and (= x2 w1) (E x1 x2) (not (E x2 x3)))))",
    "(exists y1 (and (= y1 w1) (E y1 x1) (exists x2 (and (= x2 w2) (E x2 y1) (not (= x2 x1))))))",
    "(or (E x1 x2) (= x2 x3))",
];

fn every_labeling(g: &Graph, alphabet: Alphabet) -> Vec<LabeledGraph> {
    let pebbles: Vec<Pebble> = alphabet.pebbles().collect();
    let n = g.n();
    let total = n.pow(pebbles.len() as u32);
    (0..total)
        .map(|mut code| {
            let labels: Vec<(Pebble, usize)> = pebbles
                .iter()
                .map(|&p| {
                    let v = code % n;
                    code /= n;
                    (p, v)
                })
                .collect();
            LabeledGraph::with_labels(g.clone(), alphabet, &labels).expect("labels in range")
        })
        .collect()
}

fn tallies_of(f: &Node) -> usize {
    fn go(f: &Node, best: &mut usize) {
        match &**f {
            Formula::Eq(a, b) | Formula::Edge(a, b) => {
                for v in [a, b] {
                    if let crate::logic::Var::W(i) = v {
                        *best = (*best).max(*i);
                    }
                }
            }
            Formula::Not(g) | Formula::Exists(_, g) | Formula::CountGe(_, _, g) | Formula::CountTuples(_, _, g) => go(g, best),
            Formula::And(ps) | Formula::Or(ps) => ps.iter().for_each(|p| go(p, best)),
            Formula::True | Formula::False => {}
        }
    }
    let mut best = 0;
    go(f, &mut best);
    best
}

fn logic_roundtrip(config: &SuiteConfig) -> Result<Vec<Instance>> {
    let n = config.order(5);
    let targets = Arc::new(graphs(n, false)?);
    let small = Arc::new(graphs(n.min(4), false)?);
    let mut out = Vec::new();

    // Caterpillars: counting formulas, their primitive normal forms and the body's combination.
    for f in graphs(n, false)? {
        for (k1, k2) in [(2, 0), (1, 1), (3, 0), (2, 1)] {
            let Some(d) = solve_ns(&f, k1, k2)?.decomposition else { continue };
            let (f, d, targets, small) = (f.clone(), d.clone(), targets.clone(), small.clone());
            out.push(instance(format!("path {} {k1} {k2}", to_graph6(&f)), move || {
                let ct = decomposition_to_construction(&d, &f)?;
                let alphabet = Alphabet::new(k1, k2)?;
                let mut o = Vec::new();
                let probe = formula_from_construction(&ct, 0, Mode::Path)?;
                let report = analyze(&probe, alphabet, None)?;
                o.push(obs("restricted-fragment", report.restricted_logic && report.free.is_empty(), || format!("{report:?}")));
                let Formula::CountTuples(_, _, body) = &*probe else {
                    return Err(Error::TheoremViolation("path formula is not a tuple count".into()));
                };
                let lc = lincomb_from_formula(body, Mode::Path)?;
                for g in targets.iter() {
                    let m = hom(&f, g) as usize;
                    let lg = unlabeled(g, alphabet);
                    let holds = evaluate(&formula_from_construction(&ct, m, Mode::Path)?, &lg)?;
                    let off = evaluate(&formula_from_construction(&ct, m + 1, Mode::Path)?, &lg)?;
                    o.push(obs("formula-defines-count", holds && !off, || format!("target {}: at m {holds}, at m+1 {off}", to_graph6(g))));
                    let value = hom_lincomb(&lc, &lg)?;
                    o.push(obs("body-combination-counts", value == rat(m as i64), || format!("target {}: {value} vs {m}", to_graph6(g))));
                }
                let phi = formula_from_construction(&ct, 1, Mode::Path)?;
                let normal = to_primitive_normal_form(&phi)?;
                for g in small.iter() {
                    let lg = unlabeled(g, alphabet);
                    let (a, b) = (evaluate(&phi, &lg)?, evaluate(&normal, &lg)?);
                    o.push(obs("normal-form-equivalent", a == b, || format!("target {}", to_graph6(g))));
                }
                Ok(o)
            }));
        }
    }

    // Tree construction trees: counting-logic formulas relative to the order.
    let order = n.min(4);
    for f in graphs(order, false)? {
        for (k1, k2) in [(2, 0), (3, 0), (1, 1)] {
            let Some(d) = solve_cr(&f, k1, k2, f.n())?.decomposition else { continue };
            let (f, small) = (f.clone(), small.clone());
            out.push(instance(format!("tree {} {k1} {k2}", to_graph6(&f)), move || {
                let ct = decomposition_to_construction(&d, &f)?;
                let depth = ct.elimination_depth()?;
                let alphabet = Alphabet::new(k1, k2)?;
                let mut o = Vec::new();
                for g in small.iter().filter(|g| g.n() <= order) {
                    let m = hom(&f, g) as usize;
                    let lg = unlabeled(g, alphabet);
                    let phi = formula_from_construction(&ct, m, Mode::Tree { order })?;
                    let report = analyze(&phi, alphabet, Some(depth))?;
                    o.push(obs("rank-within-depth", quantifier_rank(&phi) <= depth && report.counting_logic, || format!("{report:?}")));
                    let holds = evaluate(&phi, &lg)?;
                    let off = evaluate(&formula_from_construction(&ct, m + 1, Mode::Tree { order })?, &lg)?;
                    o.push(obs("formula-defines-count", holds && !off, || format!("target {}: at m {holds}, at m+1 {off}", to_graph6(g))));
                }
                Ok(o)
            }));
        }
    }

    // Tree-mode combinations model the compiled sentences on graphs of one order. The expansion
    // of nested counting quantifiers grows exponentially, so only the smallest patterns are used.
    let single = Graph::empty(1);
    let mut cases: Vec<(Graph, usize, usize)> = Vec::new();
    for order in 1..=4 {
        cases.extend((order - 1..=order + 1).map(|m| (single.clone(), order, m)));
    }
    cases.extend((3..=5).map(|m| (Graph::empty(2), 2, m)));
    cases.push((Graph::complete(2), 2, 0));
    for (f, order, m) in cases {
        let exact = Arc::new(graphs(order, false)?.into_iter().filter(|g| g.n() == order).collect::<Vec<_>>());
        out.push(instance(format!("model {} {order} {m}", to_graph6(&f)), move || {
            let d = solve_cr(&f, 2, 0, f.n())?.decomposition.ok_or_else(|| Error::TheoremViolation("no decomposition".into()))?;
            let ct = decomposition_to_construction(&d, &f)?;
            let alphabet = Alphabet::new(2, 0)?;
            let phi = formula_from_construction(&ct, m, Mode::Tree { order })?;
            let lc = lincomb_from_formula(&phi, Mode::Tree { order })?;
            let mut o = Vec::new();
            for g in exact.iter() {
                let want = rat(i64::from(hom(&f, g) as usize == m));
                let got = hom_lincomb(&lc, &unlabeled(g, alphabet))?;
                o.push(obs("combination-models-sentence", got == want, || format!("target {}: {got} vs {want}", to_graph6(g))));
            }
            Ok(o)
        }));
    }

    // Fixed formulas: combinations count solutions, normal forms keep the meaning.
    for src in FORMULA_PANEL {
        let small = small.clone();
        out.push(instance(format!("panel {src}"), move || {
            let f = parse_formula(src)?;
            let alphabet = Alphabet::new(3, 1)?;
            let tallies: Vec<usize> = (1..=tallies_of(&f)).collect();
            let lc = lincomb_from_formula(&f, Mode::Path)?;
            let mut o = Vec::new();
            for g in small.iter() {
                for lg in every_labeling(g, alphabet) {
                    let want = count_solutions(&f, &lg, &tallies)?;
                    let got = hom_lincomb(&lc, &lg)?;
                    o.push(obs("combination-counts-solutions", got == rat(want as i64), || format!("target {}: {got} vs {want}", to_graph6(g))));
                }
            }
            Ok(o)
        }));
    }
    Ok(out)
}

fn random_structure(rng: &mut ChaCha8Rng) -> Result<RelStructure> {
    let n = rng.gen_range(1..=4);
    let mut s = RelStructure::new(n);
    let edge = s.declare("E", 2);
    let mark = s.declare("U", 1);
    for u in 0..n {
        if rng.gen_bool(0.4) {
            s.insert(mark, vec![u])?;
        }
        for v in 0..n {
            if rng.gen_bool(0.35) {
                s.insert(edge, vec![u, v])?;
            }
        }
    }
    Ok(s)
}

fn comonad_laws_bridge(config: &SuiteConfig) -> Result<Vec<Instance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::new();
    let mut drawn = 0;
    while drawn < 20 {
        let s = random_structure(&mut rng)?;
        let kind = if rng.gen_bool(0.5) { Kind::P } else { Kind::Pr };
        let (k1, k2) = (rng.gen_range(0..=2), rng.gen_range(0..=1));
        if k1 + k2 == 0 {
            continue;
        }
        let params = ComonadParams { kind, k1, k2, bound: rng.gen_range(1..=3) };
        match build_universe(&s, params) {
            Ok(u) if u.len() <= 10_000 => {}
            _ => continue,
        }
        let seed = rng.gen::<u64>();
        out.push(instance(format!("laws {drawn}"), move || {
            let r = check_comonad_laws(&s, params, 8, seed)?;
            Ok(vec![obs("comonad-laws", r.ok, || format!("{params:?}: {}", r.counterexample.clone().unwrap_or_default()))])
        }));
        drawn += 1;
    }
    for g in graphs(config.order(5), false)? {
        out.push(instance(format!("bridge {}", to_graph6(&g)), move || {
            let mut covers: Vec<ForestCover> = Vec::new();
            for (k1, k2) in [(1, 0), (2, 0), (1, 1), (0, 2), (3, 0)] {
                covers.extend(exhaustive_linear_cover(&g, k1, k2)?);
                for q in 1..=3 {
                    covers.extend(exhaustive_tree_cover(&g, k1, k2, q)?);
                }
            }
            let mut o = Vec::new();
            for fc in covers {
                let c = cover_to_coalgebra(&fc, &g)?;
                let back = coalgebra_to_cover(&c, &g)?;
                let expected = match fc.variant {
                    CoverVariant::Linear => ForestCover { variant: CoverVariant::LinearComponent, ..fc.clone() },
                    _ => fc.clone(),
                };
                o.push(obs("cover-round-trip", back == expected, || format!("{fc:?} came back as {back:?}")));
                let again = cover_to_coalgebra(&back, &g)?;
                o.push(obs("coalgebra-round-trip", again == c, || format!("{c:?} came back as {again:?}")));
            }
            Ok(o)
        }));
    }
    Ok(out)
}

fn morphism_power(config: &SuiteConfig) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    let small = graphs(config.order(4), false)?;
    for a in &small {
        for b in &small {
            for (k1, k2) in [(1, 0), (2, 0), (1, 1), (0, 2)] {
                let (a, b) = (a.clone(), b.clone());
                out.push(instance(format!("exists {} {} {k1} {k2}", to_graph6(&a), to_graph6(&b)), move || {
                    let (sa, sb) = (RelStructure::from_graph(&a), RelStructure::from_graph(&b));
                    let mut o = Vec::new();
                    for q in 1..=3 {
                        let params = ComonadParams { kind: Kind::P, k1, k2, bound: q };
                        let found = cokleisli_search(&sa, &sb, params, false)?.exists;
                        let game = solve_exists_pebble(&sa, &sb, k1, k2, Some(q))?.winner == Winner::Duplicator;
                        o.push(obs("morphism-iff-duplicator", found == game, || format!("q {q}: morphism {found}, duplicator {game}")));
                    }
                    Ok(o)
                }));
            }
        }
    }
    let pairs = graphs(config.order(5), false)?;
    for (i, a) in pairs.iter().enumerate() {
        for b in pairs[i..].iter().filter(|b| b.n() == a.n()) {
            for (k1, k2) in [(1, 0), (2, 0), (1, 1)] {
                let (a, b) = (a.clone(), b.clone());
                out.push(instance(format!("iso {} {} {k1} {k2}", to_graph6(&a), to_graph6(&b)), move || iso_checks(&a, &b, k1, k2, 1..=2)));
            }
        }
    }
    let c6 = Graph::cycle(6);
    let triangles = Graph::complete(3).disjoint_union(&Graph::complete(3));
    out.push(instance("golden C6 2C3".into(), move || {
        let mut o = Vec::new();
        for (k1, k2, q, spoiler) in [(3, 0, 3, true), (0, 3, 3, true), (2, 0, 1, false), (2, 0, 2, false), (2, 0, 3, false), (2, 0, 4, false)] {
            let game = solve_bijective_pebble(&c6, &triangles, k1, k2, q)?.winner;
            let params = ComonadParams { kind: Kind::P, k1, k2, bound: q };
            let iso = cokleisli_search(&RelStructure::from_graph(&c6), &RelStructure::from_graph(&triangles), params, true)?.exists;
            let want = if spoiler { Winner::Spoiler } else { Winner::Duplicator };
            o.push(obs("golden-game", game == want, || format!("({k1},{k2}) q {q}: {game:?}")));
            o.push(obs("golden-isomorphism", iso != spoiler, || format!("({k1},{k2}) q {q}: isomorphism {iso}")));
        }
        Ok(o)
    }));
    Ok(out)
}

fn iso_checks(a: &Graph, b: &Graph, k1: usize, k2: usize, rounds: std::ops::RangeInclusive<usize>) -> Result<Vec<Obs>> {
    let (sa, sb) = (RelStructure::from_graph(a), RelStructure::from_graph(b));
    let mut o = Vec::new();
    for q in rounds {
        let params = ComonadParams { kind: Kind::P, k1, k2, bound: q };
        let found = cokleisli_search(&sa, &sb, params, true)?.exists;
        let game = solve_bijective_pebble(a, b, k1, k2, q)?.winner == Winner::Duplicator;
        o.push(obs("isomorphism-iff-duplicator", found == game, || format!("q {q}: isomorphism {found}, duplicator {game}")));
    }
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_lists_the_others() {
        match run_suite("no-such-suite", &SuiteConfig::default()) {
            Err(Error::UnknownSuite { available, .. }) => assert_eq!(available.len(), 11),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn patterns_up_to_two_edges() {
        let p = small_patterns(2).unwrap();
        // K1, K2, P3, 2K2
        assert_eq!(p.len(), 4);
        assert_eq!(small_patterns(4).unwrap().len(), 1 + 1 + 2 + 5 + 11);
    }

    #[test]
    fn listing_counts_triangles_and_paths() {
        let p = small_patterns(3).unwrap();
        let k4 = Graph::complete(4);
        let counts = subgraphs_by_listing(&p, &k4);
        for (f, c) in p.iter().zip(counts) {
            assert_eq!(c, crate::homcount::sub_count(f, &k4), "{f:?}");
        }
    }

    #[test]
    fn single_instance_rerun() {
        let config = SuiteConfig { instance: Some("Bw".into()), ..SuiteConfig::default() };
        let r = run_suite("cfi-parity", &config).unwrap();
        assert_eq!(r.instances, 1);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn missing_instance_is_an_error() {
        let config = SuiteConfig { instance: Some("nothing".into()), ..SuiteConfig::default() };
        assert!(run_suite("cfi-parity", &config).is_err());
    }
}
