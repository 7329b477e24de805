//! Graph and family enumeration, exhaustive oracles and cross-checking suites.

mod enumerate;
pub mod io;
pub mod oracles;
mod suites;

pub use enumerate::{
    enumerate_family, enumerate_family_with_budget, enumerate_graphs, enumerate_graphs_with_budget, read_graph6_list, FamilyClass,
    FamilyMember, FamilySpec, DEFAULT_MAX_N,
};
pub use suites::{run_suite, suite_names, Check, Counterexample, SuiteConfig, SuiteReport, DEFAULT_SEED};
