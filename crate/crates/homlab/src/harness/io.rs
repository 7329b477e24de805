//! JSON reading and writing for every serializable value, plus graph ingestion that accepts
//! either JSON or graph6.

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{from_graph6, Graph};

/// Parses JSON, reporting the position of the first problem.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), col: e.column(), msg: e.to_string() })
}

/// Pretty JSON. Maps are ordered and edge lists sorted, so equal values give equal text.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::invalid(e.to_string()))
}

/// A graph as JSON (`{"n": .., "edges": [..]}`) or as a single graph6 line.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        from_json(trimmed)
    } else {
        from_graph6(trimmed)
    }
}
