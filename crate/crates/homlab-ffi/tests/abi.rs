use std::ffi::{c_char, CStr, CString};
use std::ptr;

use homlab_ffi::*;

fn parse(text: &str) -> *mut HomlabGraph {
    let input = CString::new(text).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { homlab_graph_parse(input.as_ptr(), &mut g) }, HomlabStatus::Ok);
    g
}

fn take(s: *mut c_char) -> String {
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { homlab_string_free(s) };
    text
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(homlab_last_error()) }.to_str().unwrap().to_string()
}

#[test]
fn graphs_round_trip_through_handles() {
    let edges = [0usize, 1, 1, 2, 2, 3, 3, 0];
    let mut c4 = ptr::null_mut();
    assert_eq!(unsafe { homlab_graph_from_edges(4, edges.as_ptr(), 4, &mut c4) }, HomlabStatus::Ok);
    assert_eq!(unsafe { homlab_graph_order(c4) }, 4);
    assert_eq!(unsafe { homlab_graph_size(c4) }, 4);

    let mut g6 = ptr::null_mut();
    assert_eq!(unsafe { homlab_graph_to_string(c4, true, &mut g6) }, HomlabStatus::Ok);
    let again = parse(&take(g6));
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { homlab_graph_to_string(again, false, &mut json) }, HomlabStatus::Ok);
    let from_json = parse(&take(json));

    let mut iso = false;
    assert_eq!(unsafe { homlab_are_isomorphic(c4, from_json, &mut iso) }, HomlabStatus::Ok);
    assert!(iso);
    for g in [c4, again, from_json] {
        unsafe { homlab_graph_free(g) };
    }
    unsafe { homlab_graph_free(ptr::null_mut()) };
}

#[test]
fn counts_are_exact_strings() {
    let triangle = parse("Bw");
    let k4 = parse("C~");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { homlab_hom_count(triangle, k4, &mut out) }, HomlabStatus::Ok);
    assert_eq!(take(out), "24");
    assert_eq!(unsafe { homlab_sub_count(triangle, k4, &mut out) }, HomlabStatus::Ok);
    assert_eq!(take(out), "4");
    unsafe {
        homlab_graph_free(triangle);
        homlab_graph_free(k4);
    }
}

#[test]
fn cfi_twists_by_parity() {
    let k4 = parse("C~");
    let mut untwisted = ptr::null_mut();
    let mut once = ptr::null_mut();
    let mut twice = ptr::null_mut();
    unsafe {
        assert_eq!(homlab_cfi(k4, ptr::null(), 0, &mut untwisted), HomlabStatus::Ok);
        assert_eq!(homlab_cfi(k4, [2usize].as_ptr(), 1, &mut once), HomlabStatus::Ok);
        assert_eq!(homlab_cfi(k4, [0usize, 3].as_ptr(), 2, &mut twice), HomlabStatus::Ok);
    }
    let mut iso = true;
    unsafe { homlab_are_isomorphic(untwisted, once, &mut iso) };
    assert!(!iso);
    unsafe { homlab_are_isomorphic(untwisted, twice, &mut iso) };
    assert!(iso);

    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { homlab_cfi(k4, [9usize].as_ptr(), 1, &mut bad) }, HomlabStatus::InvalidInput);
    assert!(bad.is_null());
    for g in [k4, untwisted, once, twice] {
        unsafe { homlab_graph_free(g) };
    }
}

#[test]
fn games_report_the_winner() {
    let c4 = parse("Cr");
    let mut outcome = HomlabOutcome::Inconclusive;
    unsafe {
        assert_eq!(homlab_solve_ns(c4, 2, 0, &mut outcome), HomlabStatus::Ok);
        assert_eq!(outcome, HomlabOutcome::EvaderWins);
        assert_eq!(homlab_solve_ns(c4, 3, 0, &mut outcome), HomlabStatus::Ok);
        assert_eq!(outcome, HomlabOutcome::PursuersWin);
        assert_eq!(homlab_solve_cr(c4, 3, 0, 3, &mut outcome), HomlabStatus::Ok);
        assert_eq!(outcome, HomlabOutcome::PursuersWin);
        homlab_graph_free(c4);
    }
}

#[test]
fn failures_set_status_and_message() {
    let mut g = ptr::null_mut();
    let bad = CString::new("{\"n\": 2, \"edges\": [[0, 7]]}").unwrap();
    assert_eq!(unsafe { homlab_graph_parse(bad.as_ptr(), &mut g) }, HomlabStatus::ParseError);
    assert!(g.is_null());
    assert!(!last_error().is_empty());

    assert_eq!(unsafe { homlab_graph_parse(ptr::null(), &mut g) }, HomlabStatus::NullPointer);
    assert!(last_error().contains("input"));
    let junk = [0xffu8, 0];
    assert_eq!(unsafe { homlab_graph_parse(junk.as_ptr().cast(), &mut g) }, HomlabStatus::InvalidUtf8);

    let k2 = parse("A_");
    assert_eq!(unsafe { homlab_hom_count(k2, ptr::null(), &mut ptr::null_mut()) }, HomlabStatus::NullPointer);
    assert_eq!(unsafe { homlab_solve_ns(k2, 0, 0, &mut HomlabOutcome::Inconclusive) }, HomlabStatus::InvalidInput);
    assert!(!last_error().is_empty());
    let mut iso = false;
    assert_eq!(unsafe { homlab_are_isomorphic(k2, k2, &mut iso) }, HomlabStatus::Ok);
    assert!(last_error().is_empty());
    unsafe { homlab_graph_free(k2) };
}

#[test]
fn suites_run_by_name() {
    let name = CString::new("cfi-parity").unwrap();
    let instance = CString::new("Bw").unwrap();
    let mut passed = false;
    let mut report = ptr::null_mut();
    let status = unsafe { homlab_run_suite(name.as_ptr(), 7, instance.as_ptr(), &mut passed, &mut report) };
    assert_eq!(status, HomlabStatus::Ok, "{}", last_error());
    assert!(passed);
    assert!(take(report).contains("\"suite\": \"cfi-parity\""));

    let unknown = CString::new("no-such-suite").unwrap();
    let status = unsafe { homlab_run_suite(unknown.as_ptr(), 7, ptr::null(), &mut passed, ptr::null_mut()) };
    assert_eq!(status, HomlabStatus::UnknownSuite);
    assert!(last_error().contains("cfi-parity"));
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/homlab.h");
    let source = include_str!("../src/lib.rs");
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 12, "{exports:?}");
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}
