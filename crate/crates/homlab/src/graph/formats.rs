//! graph6 codec and DOT export.

use super::{Graph, LabeledGraph};
use crate::error::{Error, Result};

/// Decodes one graph6 line (optionally with the `>>graph6<<` header).
pub fn from_graph6(line: &str) -> Result<Graph> {
    let s = line.trim().trim_start_matches(">>graph6<<");
    let bytes = s.as_bytes();
    let err = |col: usize, msg: &str| Error::Parse { line: 1, col, msg: msg.to_string() };
    if bytes.is_empty() {
        return Err(err(0, "empty graph6 string"));
    }
    for (i, &b) in bytes.iter().enumerate() {
        if !(63..=126).contains(&b) {
            return Err(err(i, "byte outside the graph6 range 63..=126"));
        }
    }
    let (n, mut pos) = if bytes[0] != 126 {
        ((bytes[0] - 63) as usize, 1)
    } else if bytes.len() >= 4 && bytes[1] != 126 {
        let n = bytes[1..4].iter().fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize);
        (n, 4)
    } else {
        return Err(err(0, "graphs beyond 258047 vertices are unsupported"));
    };
    if n > super::MAX_VERTICES {
        return Err(Error::TooLarge { n, max: super::MAX_VERTICES });
    }
    let pairs = n * n.saturating_sub(1) / 2;
    let need = pairs.div_ceil(6);
    if bytes.len() - pos != need {
        return Err(err(pos, &format!("expected {need} data bytes, found {}", bytes.len() - pos)));
    }
    let mut g = Graph::empty(n);
    let mut k = 0;
    for v in 1..n {
        for u in 0..v {
            let byte = bytes[pos + k / 6] - 63;
            if byte & (1 << (5 - k % 6)) != 0 {
                g.add_edge(u, v);
            }
            k += 1;
        }
    }
    pos += need;
    debug_assert_eq!(pos, bytes.len());
    Ok(g)
}

pub fn to_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut out = String::new();
    out.push((n as u8 + 63) as char);
    let mut acc = 0u8;
    let mut k = 0;
    for v in 1..n {
        for u in 0..v {
            acc = (acc << 1) | g.has_edge(u, v) as u8;
            k += 1;
            if k % 6 == 0 {
                out.push((acc + 63) as char);
                acc = 0;
            }
        }
    }
    if k % 6 != 0 {
        acc <<= 6 - k % 6;
        out.push((acc + 63) as char);
    }
    out
}

/// DOT export; labels are drawn as vertex captions.
pub fn to_dot(g: &LabeledGraph, name: &str) -> String {
    let mut out = format!("graph {} {{\n", sanitize(name));
    for v in 0..g.n() {
        let pebbles: Vec<String> = g.pebbles_on(v).iter().map(|p| p.to_string()).collect();
        if pebbles.is_empty() {
            out.push_str(&format!("  {v};\n"));
        } else {
            out.push_str(&format!("  {v} [label=\"{v}:{}\"];\n", pebbles.join(",")));
        }
    }
    for (u, v) in g.graph().edges() {
        out.push_str(&format!("  {u} -- {v};\n"));
    }
    out.push_str("}\n");
    out
}

pub(crate) fn sanitize(name: &str) -> String {
    let s: String = name.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit()) {
        format!("g_{s}")
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Alphabet;

    #[test]
    fn decode_star() {
        let g = from_graph6("D?{").unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.degree(4), 4);
    }

    #[test]
    fn roundtrip() {
        for g in [Graph::cycle(5), Graph::complete(7), Graph::path(2), Graph::empty(1)] {
            assert_eq!(from_graph6(&to_graph6(&g)).unwrap(), g);
        }
        assert!(from_graph6("D?").is_err());
    }

    #[test]
    fn dot_shape() {
        let a = Alphabet::new(1, 0).unwrap();
        let g = LabeledGraph::with_labels(Graph::path(2), a, &[(crate::graph::Pebble::X(1), 0)]).unwrap();
        let dot = to_dot(&g, "p2");
        assert!(dot.starts_with("graph p2 {"));
        assert!(dot.contains("0 -- 1;"));
        assert!(dot.trim_end().ends_with('}'));
    }
}
