//! Reader and writer for the alist sparse parity-check interchange format.
//!
//! Layout: line 1 `N M`, line 2 `max_col_deg max_row_deg`, line 3 the N
//! column degrees, line 4 the M row degrees, then N column adjacency lines
//! and M row adjacency lines with 1-based indices. Zero entries (padding up
//! to the maximum degree) are tolerated on read and never emitted on write.
//! Adjacency order is preserved exactly, so write-then-read reproduces the
//! graph structurally.

use std::fmt;

use crate::graph::CodeGraph;

/// Parse failure, carrying the 1-based line number where it was detected.
#[derive(Debug, Clone, PartialEq)]
pub struct AlistError {
    pub line: usize,
    pub message: String,
}

impl AlistError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        AlistError {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for AlistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alist line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for AlistError {}

/// Parse an alist document into a [`CodeGraph`].
pub fn load_alist(text: &str) -> Result<CodeGraph, AlistError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let mut take = |what: &str| {
        lines
            .next()
            .ok_or_else(|| AlistError::new(0, format!("unexpected end of file, expected {what}")))
    };

    let (lno, header) = take("header \"N M\"")?;
    let dims = parse_ints(header, lno)?;
    let [n, m] = dims[..] else {
        return Err(AlistError::new(
            lno,
            format!("malformed header: expected \"N M\", found {} values", dims.len()),
        ));
    };
    if n == 0 || m == 0 {
        return Err(AlistError::new(lno, "malformed header: N and M must be positive"));
    }

    let (lno, maxdeg) = take("max degrees")?;
    let maxima = parse_ints(maxdeg, lno)?;
    if maxima.len() != 2 {
        return Err(AlistError::new(
            lno,
            format!("expected \"max_col_deg max_row_deg\", found {} values", maxima.len()),
        ));
    }

    let (lno, coldeg_line) = take("column degrees")?;
    let col_degrees = parse_ints(coldeg_line, lno)?;
    if col_degrees.len() != n {
        return Err(AlistError::new(
            lno,
            format!("expected {n} column degrees, found {}", col_degrees.len()),
        ));
    }

    let (lno, rowdeg_line) = take("row degrees")?;
    let row_degrees = parse_ints(rowdeg_line, lno)?;
    if row_degrees.len() != m {
        return Err(AlistError::new(
            lno,
            format!("expected {m} row degrees, found {}", row_degrees.len()),
        ));
    }

    let mut var_adj: Vec<Vec<u32>> = Vec::with_capacity(n);
    for (v, &deg) in col_degrees.iter().enumerate() {
        let (lno, line) = take("column adjacency line")?;
        let entries = parse_adjacency(line, lno, m, deg, &format!("column {v}"))?;
        var_adj.push(entries);
    }
    let mut check_adj: Vec<Vec<u32>> = Vec::with_capacity(m);
    for (c, &deg) in row_degrees.iter().enumerate() {
        let (lno, line) = take("row adjacency line")?;
        let entries = parse_adjacency(line, lno, n, deg, &format!("row {c}"))?;
        check_adj.push(entries);
    }

    CodeGraph::from_parts(n, check_adj, var_adj)
        .map_err(|e| AlistError::new(0, format!("{e}")))
}

/// Serialize a graph as an alist document (no zero padding).
pub fn save_alist(graph: &CodeGraph) -> String {
    let n = graph.n_variables();
    let m = graph.n_checks();
    let mut out = String::new();
    out.push_str(&format!("{n} {m}\n"));
    out.push_str(&format!(
        "{} {}\n",
        graph.max_var_degree(),
        graph.max_check_degree()
    ));
    push_ints(&mut out, (0..n).map(|v| graph.var_degree(v)));
    push_ints(&mut out, (0..m).map(|c| graph.check_degree(c)));
    for v in 0..n {
        push_ints(
            &mut out,
            graph.var_neighbors(v).iter().map(|&c| c as usize + 1),
        );
    }
    for c in 0..m {
        push_ints(
            &mut out,
            graph.check_neighbors(c).iter().map(|&v| v as usize + 1),
        );
    }
    out
}

fn push_ints(out: &mut String, ints: impl Iterator<Item = usize>) {
    let mut first = true;
    for x in ints {
        if !first {
            out.push(' ');
        }
        out.push_str(&x.to_string());
        first = false;
    }
    out.push('\n');
}

fn parse_ints(line: &str, lno: usize) -> Result<Vec<usize>, AlistError> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| AlistError::new(lno, format!("not an integer: {tok:?}")))
        })
        .collect()
}

/// One adjacency line: `degree` positive 1-based entries, optionally padded
/// with zeros; converts to 0-based indices.
fn parse_adjacency(
    line: &str,
    lno: usize,
    bound: usize,
    degree: usize,
    what: &str,
) -> Result<Vec<u32>, AlistError> {
    let raw = parse_ints(line, lno)?;
    let entries: Vec<usize> = raw.into_iter().filter(|&x| x != 0).collect();
    if entries.len() != degree {
        return Err(AlistError::new(
            lno,
            format!(
                "{what} declares degree {degree} but lists {} entries",
                entries.len()
            ),
        ));
    }
    entries
        .into_iter()
        .map(|x| {
            if x > bound {
                Err(AlistError::new(
                    lno,
                    format!("{what} index {x} out of range 1..={bound}"),
                ))
            } else {
                Ok((x - 1) as u32)
            }
        })
        .collect()
}
