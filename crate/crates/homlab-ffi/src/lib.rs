//! C interface to homlab.
//!
//! Graphs cross the boundary as opaque `HomlabGraph` handles. Every fallible call returns a
//! `HomlabStatus`; on failure `homlab_last_error` describes the problem for the calling thread.
//! Strings returned by the library are owned by the caller and released with
//! `homlab_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use homlab::cfi::build_cfi;
use homlab::graph::{are_isomorphic, from_graph6, set_of, to_graph6, Alphabet, Graph, LabeledGraph, MAX_VERTICES};
use homlab::harness::io::{parse_graph, to_json};
use homlab::harness::{run_suite, SuiteConfig};
use homlab::homcount::{hom_lincomb, rat, sub_count, LinComb};
use homlab::pursuit::{solve_cr, solve_ns, Outcome};
use homlab::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HomlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidInput = 4,
    BudgetExhausted = 5,
    UnknownSuite = 6,
    Panic = 7,
}

/// Winner reported by the game solvers.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HomlabOutcome {
    PursuersWin = 0,
    EvaderWins = 1,
    Inconclusive = 2,
}

/// Opaque simple graph.
pub struct HomlabGraph(Graph);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(e: &Error) -> HomlabStatus {
    match e {
        Error::Parse { .. } => HomlabStatus::ParseError,
        Error::Budget => HomlabStatus::BudgetExhausted,
        Error::UnknownSuite { .. } => HomlabStatus::UnknownSuite,
        _ => HomlabStatus::InvalidInput,
    }
}

enum Failure {
    Status(HomlabStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `body`, converting errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> HomlabStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            HomlabStatus::Ok
        }
        Ok(Err(Failure::Status(status, msg))) => {
            set_error(&msg);
            status
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(panic) => {
            let msg = panic.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| panic.downcast_ref::<String>().cloned());
            set_error(&msg.unwrap_or_else(|| "internal panic".into()));
            HomlabStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(HomlabStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Failure::Status(HomlabStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn graph<'a>(g: *const HomlabGraph, what: &str) -> Result<&'a Graph, Failure> {
    g.as_ref().map(|h| &h.0).ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn boxed(g: Graph) -> *mut HomlabGraph {
    Box::into_raw(Box::new(HomlabGraph(g)))
}

/// Message for the last failed call on this thread; empty after a success.
///
/// The pointer stays valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn homlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a graph given as graph6 or as JSON.
///
/// # Safety
/// `input` must be a valid NUL-terminated string and `out` a valid pointer to write to.
#[no_mangle]
pub unsafe extern "C" fn homlab_graph_parse(input: *const c_char, out: *mut *mut HomlabGraph) -> HomlabStatus {
    guard(|| {
        let g = parse_graph(text(input, "input")?)?;
        put(out, boxed(g), "out")
    })
}

/// Builds a graph from `edge_count` vertex pairs stored flat in `edges`.
///
/// # Safety
/// `edges` must point to `2 * edge_count` readable values (it may be null when `edge_count` is 0);
/// `out` must be a valid pointer to write to.
#[no_mangle]
pub unsafe extern "C" fn homlab_graph_from_edges(n: usize, edges: *const usize, edge_count: usize, out: *mut *mut HomlabGraph) -> HomlabStatus {
    guard(|| {
        let flat: &[usize] = if edge_count == 0 {
            &[]
        } else if edges.is_null() {
            return Err(null("edges"));
        } else {
            std::slice::from_raw_parts(edges, 2 * edge_count)
        };
        let pairs: Vec<(usize, usize)> = flat.chunks_exact(2).map(|p| (p[0], p[1])).collect();
        let g = Graph::from_edges(n, &pairs)?;
        put(out, boxed(g), "out")
    })
}

/// Releases a graph. Null is ignored.
///
/// # Safety
/// `g` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn homlab_graph_free(g: *mut HomlabGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn homlab_graph_order(g: *const HomlabGraph) -> usize {
    g.as_ref().map_or(0, |h| h.0.n())
}

/// Number of edges, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn homlab_graph_size(g: *const HomlabGraph) -> usize {
    g.as_ref().map_or(0, |h| h.0.edge_count())
}

/// Writes the graph as JSON (`as_graph6 == false`) or graph6 into a new string.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer; free the result with `homlab_string_free`.
#[no_mangle]
pub unsafe extern "C" fn homlab_graph_to_string(g: *const HomlabGraph, as_graph6: bool, out: *mut *mut c_char) -> HomlabStatus {
    guard(|| {
        let g = graph(g, "graph")?;
        let s = if as_graph6 { to_graph6(g) } else { to_json(g)? };
        put(out, owned_string(s), "out")
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn homlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// hom(pattern, target) as a decimal string, exact at any size.
///
/// # Safety
/// Both handles must be live and `out` a valid pointer; free the result with `homlab_string_free`.
#[no_mangle]
pub unsafe extern "C" fn homlab_hom_count(pattern: *const HomlabGraph, target: *const HomlabGraph, out: *mut *mut c_char) -> HomlabStatus {
    guard(|| {
        let plain = |g: &Graph| LabeledGraph::unlabeled(g.clone(), Alphabet::raw(0, 0));
        let lc = LinComb::from_terms(vec![(rat(1), plain(graph(pattern, "pattern")?))]);
        let count = hom_lincomb(&lc, &plain(graph(target, "target")?))?;
        put(out, owned_string(count.to_string()), "out")
    })
}

/// Number of subgraphs of `target` isomorphic to `pattern`.
///
/// # Safety
/// Both handles must be live and `out` a valid pointer; free the result with `homlab_string_free`.
#[no_mangle]
pub unsafe extern "C" fn homlab_sub_count(pattern: *const HomlabGraph, target: *const HomlabGraph, out: *mut *mut c_char) -> HomlabStatus {
    guard(|| {
        let count = sub_count(graph(pattern, "pattern")?, graph(target, "target")?);
        put(out, owned_string(count.to_string()), "out")
    })
}

/// Writes whether the two graphs are isomorphic.
///
/// # Safety
/// Both handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn homlab_are_isomorphic(a: *const HomlabGraph, b: *const HomlabGraph, out: *mut bool) -> HomlabStatus {
    guard(|| {
        let iso = are_isomorphic(graph(a, "a")?, graph(b, "b")?).is_some();
        put(out, iso, "out")
    })
}

/// CFI graph over a connected base with the `twist_len` vertices in `twist` twisted.
///
/// # Safety
/// `base` must be live, `twist` must point to `twist_len` readable values (null allowed when
/// `twist_len` is 0) and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn homlab_cfi(base: *const HomlabGraph, twist: *const usize, twist_len: usize, out: *mut *mut HomlabGraph) -> HomlabStatus {
    guard(|| {
        let base = graph(base, "base")?;
        let vs: &[usize] = match (twist_len, twist.is_null()) {
            (0, _) => &[],
            (_, true) => return Err(null("twist")),
            _ => std::slice::from_raw_parts(twist, twist_len),
        };
        if let Some(&v) = vs.iter().find(|&&v| v >= base.n().min(MAX_VERTICES)) {
            return Err(Error::VertexOutOfRange { vertex: v, n: base.n() }.into());
        }
        let x = build_cfi(base, set_of(vs.iter().copied()))?;
        put(out, boxed(x.graph), "out")
    })
}

fn outcome(o: Outcome) -> HomlabOutcome {
    match o {
        Outcome::PursuersWin => HomlabOutcome::PursuersWin,
        Outcome::EvaderWins => HomlabOutcome::EvaderWins,
        Outcome::Inconclusive => HomlabOutcome::Inconclusive,
    }
}

/// Node searching with `k1` reusable and `k2` non-reusable searchers.
///
/// # Safety
/// `g` must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn homlab_solve_ns(g: *const HomlabGraph, k1: usize, k2: usize, out: *mut HomlabOutcome) -> HomlabStatus {
    guard(|| {
        let solution = solve_ns(graph(g, "graph")?, k1, k2)?;
        put(out, outcome(solution.outcome), "out")
    })
}

/// Cops and robber with `k1` reusable and `k2` non-reusable cops within `rounds` rounds.
///
/// # Safety
/// `g` must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn homlab_solve_cr(g: *const HomlabGraph, k1: usize, k2: usize, rounds: usize, out: *mut HomlabOutcome) -> HomlabStatus {
    guard(|| {
        let solution = solve_cr(graph(g, "graph")?, k1, k2, rounds)?;
        put(out, outcome(solution.outcome), "out")
    })
}

/// Runs a named suite. `instance` may be null to run all instances. The JSON report goes to
/// `report` (may be null to skip it) and the verdict to `passed`.
///
/// # Safety
/// `name` must be a valid string, `instance` null or a valid string, `passed` a valid pointer and
/// `report` null or a valid pointer; free the report with `homlab_string_free`.
#[no_mangle]
pub unsafe extern "C" fn homlab_run_suite(
    name: *const c_char,
    seed: u64,
    instance: *const c_char,
    passed: *mut bool,
    report: *mut *mut c_char,
) -> HomlabStatus {
    guard(|| {
        let name = text(name, "name")?;
        let instance = if instance.is_null() { None } else { Some(text(instance, "instance")?.to_string()) };
        let result = run_suite(name, &SuiteConfig { seed, budget: None, instance })?;
        put(passed, result.passed, "passed")?;
        if !report.is_null() {
            report.write(owned_string(to_json(&result)?));
        }
        Ok(())
    })
}

/// Parses graph6 only; JSON input is rejected.
///
/// # Safety
/// `input` must be a valid NUL-terminated string and `out` a valid pointer to write to.
#[no_mangle]
pub unsafe extern "C" fn homlab_graph_from_graph6(input: *const c_char, out: *mut *mut HomlabGraph) -> HomlabStatus {
    guard(|| {
        let g = from_graph6(text(input, "input")?.trim())?;
        put(out, boxed(g), "out")
    })
}
