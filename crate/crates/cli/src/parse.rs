//! Text formats: pattern files (one edge per line, whitespace-separated
//! vertex ids) and turnstile stream files (same, prefixed with a `+` or
//! `-` sign token). `#` starts a comment; blank lines are skipped. Vertex
//! ids must be decimal integers below 2^61 - 1. Edges are canonicalized
//! (sorted) at parse time.

use std::collections::BTreeSet;
use std::io::BufRead;

use thiserror::Error;

use hypercount_core::{Hypergraph, Sign, SketchError, StreamEdge, FIELD_PRIME};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: u64, message: String },
    #[error("line {line}: duplicate vertex {vertex} in edge")]
    DuplicateVertexInEdge { line: u64, vertex: u64 },
    #[error("line {line}: vertex id `{id}` is not a decimal integer below 2^61 - 1")]
    VertexIdOutOfRange { line: u64, id: String },
    #[error("line {line}: edge of size {size} exceeds maximum {max}")]
    EdgeTooLarge { line: u64, size: usize, max: usize },
    #[error("line {line}: repeated edge in pattern")]
    RepeatedEdge { line: u64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One parsed stream line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamRecord {
    pub line_number: u64,
    pub edge: StreamEdge,
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_vertex(token: &str, line: u64) -> Result<u64, ParseError> {
    let id: u64 = token.parse().map_err(|_| {
        if token.chars().all(|c| c.is_ascii_digit()) && !token.is_empty() {
            ParseError::VertexIdOutOfRange {
                line,
                id: token.to_string(),
            }
        } else {
            ParseError::Syntax {
                line,
                message: format!("expected vertex id, found `{}`", token),
            }
        }
    })?;
    if id >= FIELD_PRIME {
        return Err(ParseError::VertexIdOutOfRange {
            line,
            id: token.to_string(),
        });
    }
    Ok(id)
}

fn build_edge(
    sign: Sign,
    tokens: &[&str],
    line: u64,
    max_edge_size: usize,
) -> Result<StreamEdge, ParseError> {
    if tokens.is_empty() {
        return Err(ParseError::Syntax {
            line,
            message: "edge has no vertices".into(),
        });
    }
    if tokens.len() > max_edge_size {
        return Err(ParseError::EdgeTooLarge {
            line,
            size: tokens.len(),
            max: max_edge_size,
        });
    }
    let vertices = tokens
        .iter()
        .map(|t| parse_vertex(t, line))
        .collect::<Result<Vec<u64>, _>>()?;
    StreamEdge::new(sign, vertices).map_err(|e| match e {
        SketchError::DuplicateVertexInEdge(vertex) => {
            ParseError::DuplicateVertexInEdge { line, vertex }
        }
        other => ParseError::Syntax {
            line,
            message: other.to_string(),
        },
    })
}

/// Iterator over the signed edges of a stream file.
pub struct StreamParser<R: BufRead> {
    lines: std::io::Lines<R>,
    line_number: u64,
    max_edge_size: usize,
}

impl<R: BufRead> StreamParser<R> {
    pub fn new(reader: R, max_edge_size: usize) -> Self {
        StreamParser {
            lines: reader.lines(),
            line_number: 0,
            max_edge_size,
        }
    }
}

impl<R: BufRead> Iterator for StreamParser<R> {
    type Item = Result<StreamRecord, ParseError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => return Some(Err(e.into())),
            };
            self.line_number += 1;
            let content = strip_comment(&line);
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if tokens.is_empty() {
                continue;
            }
            let sign = match tokens[0] {
                "+" => Sign::Insert,
                "-" => Sign::Delete,
                other => {
                    return Some(Err(ParseError::Syntax {
                        line: self.line_number,
                        message: format!("expected sign `+` or `-`, found `{}`", other),
                    }))
                }
            };
            return Some(
                build_edge(sign, &tokens[1..], self.line_number, self.max_edge_size).map(|edge| {
                    StreamRecord {
                        line_number: self.line_number,
                        edge,
                    }
                }),
            );
        }
    }
}

/// Parses and canonicalizes every edge of a stream.
pub fn parse_stream<R: BufRead>(
    reader: R,
    max_edge_size: usize,
) -> Result<Vec<StreamRecord>, ParseError> {
    StreamParser::new(reader, max_edge_size).collect()
}

/// Parses a pattern hypergraph; the vertex set is the union of the edges.
pub fn parse_pattern<R: BufRead>(reader: R) -> Result<Hypergraph, ParseError> {
    let mut edges: Vec<Vec<u64>> = Vec::new();
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line_number = i as u64 + 1;
        let content = line?;
        let tokens: Vec<&str> = strip_comment(&content).split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        // reuse the edge validation; pattern files carry no sign token
        let edge = build_edge(Sign::Insert, &tokens, line_number, usize::MAX)?;
        let vertices = edge.vertices().to_vec();
        if !seen.insert(vertices.clone()) {
            return Err(ParseError::RepeatedEdge { line: line_number });
        }
        edges.push(vertices);
    }
    Ok(Hypergraph::from_edges(edges).expect("validated edge list"))
}
