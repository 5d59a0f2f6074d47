//! graph6 encoding and plain edge-list ingestion.
//!
//! graph6 stores the order `n` followed by the upper triangle of the
//! adjacency matrix, column by column (`(0,1), (0,2), (1,2), (0,3), ...`),
//! six bits per byte, most significant bit first, each byte offset by 63.

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Graph, GraphError};

/// Largest order representable with the four-byte size header.
pub const GRAPH6_MAX_ORDER: usize = 258_047;

const HEADER: &str = ">>graph6<<";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Graph6Error {
    #[error("empty graph6 string")]
    Empty,
    #[error("byte {byte} at position {position} is outside the printable range 63..=126")]
    ByteOutOfRange { position: usize, byte: u8 },
    #[error("truncated size header")]
    TruncatedHeader,
    #[error("order {0} uses a longer size header than necessary")]
    NonCanonicalSize(usize),
    #[error("order {0} exceeds the graph6 size limit of {GRAPH6_MAX_ORDER}")]
    OrderTooLarge(usize),
    #[error("truncated adjacency payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("trailing bytes after adjacency payload: expected {expected} bytes, found {found}")]
    TrailingBytes { expected: usize, found: usize },
    #[error("nonzero padding bits in the last byte")]
    NonzeroPadding,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// How strictly to treat encodings that real catalogs sometimes get wrong.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// Reject nonzero padding and oversized size headers.
    #[default]
    Strict,
    Lenient,
}

pub fn encode_order(n: usize) -> Result<Vec<u8>, Graph6Error> {
    if n <= 62 {
        Ok(vec![n as u8 + 63])
    } else if n <= GRAPH6_MAX_ORDER {
        Ok(vec![
            126,
            ((n >> 12) & 63) as u8 + 63,
            ((n >> 6) & 63) as u8 + 63,
            (n & 63) as u8 + 63,
        ])
    } else {
        Err(Graph6Error::OrderTooLarge(n))
    }
}

/// Decodes the size header, returning the order and the header length.
fn decode_order(bytes: &[u8], strictness: Strictness) -> Result<(usize, usize), Graph6Error> {
    let sextets = |range: &[u8]| {
        range
            .iter()
            .fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize)
    };
    let (n, used) = match bytes {
        [] => return Err(Graph6Error::Empty),
        [126, 126, rest @ ..] => {
            if rest.len() < 6 {
                return Err(Graph6Error::TruncatedHeader);
            }
            (sextets(&rest[..6]), 8)
        }
        [126, rest @ ..] => {
            if rest.len() < 3 {
                return Err(Graph6Error::TruncatedHeader);
            }
            (sextets(&rest[..3]), 4)
        }
        [b, ..] => ((b - 63) as usize, 1),
    };
    let canonical = encode_order(n).map(|h| h.len()).unwrap_or(8);
    if strictness == Strictness::Strict && used != canonical {
        return Err(Graph6Error::NonCanonicalSize(n));
    }
    Ok((n, used))
}

/// Parses one graph6 string in strict mode.
pub fn parse_graph6(text: &str) -> Result<Graph, Graph6Error> {
    parse_graph6_with(text, Strictness::Strict)
}

pub fn parse_graph6_with(text: &str, strictness: Strictness) -> Result<Graph, Graph6Error> {
    let text = text.trim_end_matches(['\n', '\r']);
    let text = text.strip_prefix(HEADER).unwrap_or(text);
    let bytes = text.as_bytes();
    if let Some((position, &byte)) = bytes.iter().enumerate().find(|(_, b)| !(63..=126).contains(*b)) {
        return Err(Graph6Error::ByteOutOfRange { position, byte });
    }
    let (n, header) = decode_order(bytes, strictness)?;
    let mut g = Graph::empty(n)?;

    let nbits = n * (n - 1) / 2;
    let expected = nbits.div_ceil(6);
    let payload = &bytes[header..];
    if payload.len() < expected {
        return Err(Graph6Error::Truncated {
            expected,
            found: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(Graph6Error::TrailingBytes {
            expected,
            found: payload.len(),
        });
    }

    let bit = |k: usize| ((payload[k / 6] - 63) >> (5 - k % 6)) & 1 == 1;
    let mut k = 0;
    for s in 1..n {
        for r in 0..s {
            if bit(k) {
                g.insert_edge(r, s)?;
            }
            k += 1;
        }
    }
    if strictness == Strictness::Strict && (nbits..expected * 6).any(bit) {
        return Err(Graph6Error::NonzeroPadding);
    }
    Ok(g)
}

/// The graph6 encoding of `g` under its current labeling; padding bits are zero.
pub fn write_graph6(g: &Graph) -> Result<String, Graph6Error> {
    let n = g.order();
    let mut out = encode_order(n)?;
    let mut acc = 0u8;
    let mut filled = 0;
    for s in 1..n {
        for r in 0..s {
            acc = (acc << 1) | g.has_edge(r, s) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    Ok(String::from_utf8(out).expect("graph6 bytes are ASCII"))
}

/// A failure while reading multi-line input, tagged with its 1-based line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("line {line}: {source}")]
    Graph6 { line: usize, source: Graph6Error },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("no graphs in input")]
    NoGraphs,
}

/// Parses a newline-delimited stream of graph6 strings. Blank lines and
/// `>>graph6<<` header-only lines are skipped; order is preserved.
pub fn parse_graph6_lines(text: &str, strictness: Strictness) -> Result<Vec<Graph>, InputError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && *l != HEADER)
        .collect();
    lines
        .par_iter()
        .map(|&(line, l)| {
            parse_graph6_with(l, strictness).map_err(|source| InputError::Graph6 { line, source })
        })
        .collect()
}

/// Parses an edge list: the first significant line holds `n`, every
/// following line one edge `u v`. `#` starts a comment.
pub fn parse_edge_list(text: &str) -> Result<Graph, InputError> {
    let mut n = None;
    let mut edges = Vec::new();
    let mut edge_lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let parse = |t: &str| {
            t.parse::<usize>().map_err(|_| InputError::Malformed {
                line,
                message: format!("expected a nonnegative integer, found {t:?}"),
            })
        };
        match n {
            None => {
                if tokens.len() != 1 {
                    return Err(InputError::Malformed {
                        line,
                        message: "expected the vertex count alone on the first line".into(),
                    });
                }
                n = Some((parse(tokens[0])?, line));
            }
            Some(_) => {
                if tokens.len() != 2 {
                    return Err(InputError::Malformed {
                        line,
                        message: format!("expected two endpoints, found {} tokens", tokens.len()),
                    });
                }
                edges.push((parse(tokens[0])?, parse(tokens[1])?));
                edge_lines.push(line);
            }
        }
    }
    let (n, order_line) = n.ok_or(InputError::NoGraphs)?;
    let mut g = Graph::empty(n).map_err(|source| InputError::Graph {
        line: order_line,
        source,
    })?;
    for (&(u, v), &line) in edges.iter().zip(&edge_lines) {
        g.insert_edge(u, v)
            .map_err(|source| InputError::Graph { line, source })?;
    }
    Ok(g)
}
