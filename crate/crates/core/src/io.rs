//! Line-oriented text formats for complexes and graphs.
//!
//! Complex file: `dims D` (number of dimension levels), then one line per simplex with its
//! space-separated vertices, dimensions ascending and lexicographic within a dimension.
//!
//! Graph file: `n <num_vertices>`, then one `u v` line per edge. Blank lines and lines
//! starting with `#` are ignored when reading.

use std::fmt::Write as _;

use crate::complex::DirectedSimplicialComplex;
use crate::error::{Error, Result};
use crate::lift::{Digraph, UndirectedGraph};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_numbers(line: usize, text: &str) -> Result<Vec<usize>> {
    text.split_ascii_whitespace()
        .map(|tok| tok.parse::<usize>().map_err(|_| parse_err(line, format!("expected a non-negative integer, got {tok:?}"))))
        .collect()
}

pub fn write_complex(k: &DirectedSimplicialComplex) -> String {
    let mut out = String::new();
    writeln!(out, "dims {}", k.per_dim_counts().len()).unwrap();
    for (_, s) in k.iter() {
        let line: Vec<String> = s.vertices().iter().map(usize::to_string).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}

/// Parses a complex file. The simplices are closed under ordered subtuples on load, so files
/// listing only generators are accepted; the header must match the closed complex.
pub fn read_complex(text: &str) -> Result<DirectedSimplicialComplex> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing `dims` header"))?;
    let dims = header
        .strip_prefix("dims")
        .map(str::trim)
        .ok_or_else(|| parse_err(hline, "expected `dims D`"))?
        .parse::<usize>()
        .map_err(|_| parse_err(hline, "`dims` needs a non-negative integer"))?;
    let mut gens = Vec::new();
    let mut last_len = 0;
    for (ln, l) in lines {
        let v = parse_numbers(ln, l)?;
        if v.len() < last_len {
            return Err(parse_err(ln, "simplices must be listed with dimensions ascending"));
        }
        if v.len() > dims {
            return Err(parse_err(ln, format!("simplex of dimension {} exceeds header `dims {dims}`", v.len() - 1)));
        }
        last_len = v.len();
        gens.push(v);
    }
    let k = DirectedSimplicialComplex::build(gens).map_err(|e| match e {
        Error::Parse { .. } => e,
        other => parse_err(0, other.to_string()),
    })?;
    if k.per_dim_counts().len() != dims {
        return Err(parse_err(hline, format!("header declares {dims} dimension levels, found {}", k.per_dim_counts().len())));
    }
    Ok(k)
}

fn read_edges(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing `n` header"))?;
    let n = header
        .strip_prefix('n')
        .map(str::trim)
        .ok_or_else(|| parse_err(hline, "expected `n <num_vertices>`"))?
        .parse::<usize>()
        .map_err(|_| parse_err(hline, "`n` needs a non-negative integer"))?;
    let mut edges = Vec::new();
    for (ln, l) in lines {
        let v = parse_numbers(ln, l)?;
        let [u, w] = v[..] else {
            return Err(parse_err(ln, "expected `u v`"));
        };
        if u >= n || w >= n {
            return Err(parse_err(ln, format!("vertex out of range 0..{n}")));
        }
        if u == w {
            return Err(parse_err(ln, "self-loops are not allowed"));
        }
        edges.push((u, w));
    }
    Ok((n, edges))
}

pub fn read_digraph(text: &str) -> Result<Digraph> {
    let (n, edges) = read_edges(text)?;
    Digraph::new(n, edges)
}

pub fn read_undirected(text: &str) -> Result<UndirectedGraph> {
    let (n, edges) = read_edges(text)?;
    UndirectedGraph::new(n, edges)
}

pub fn write_digraph(g: &Digraph) -> String {
    let mut out = format!("n {}\n", g.num_vertices());
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}
