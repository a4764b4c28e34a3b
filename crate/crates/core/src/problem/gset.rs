// SPDX-License-Identifier: Apache-2.0
//! G-Set text format: a header line `n m`, then `m` lines `i j w` with
//! 1-based node indices, whitespace separated.

use std::collections::HashSet;
use std::io::BufRead;

use super::{check_size, make_edge, MaxCutProblem, ProblemError};

pub fn parse_gset<R: BufRead>(reader: R, name: &str) -> Result<MaxCutProblem, ProblemError> {
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(idx, line)| (idx + 1, line))
        .filter(|(_, line)| line.as_ref().map_or(true, |l| !l.trim().is_empty()));

    let (header_line, header) = match lines.next() {
        Some((no, line)) => (no, line.map_err(io_error)?),
        None => {
            return Err(ProblemError::Parse {
                line: 1,
                message: "missing header \"n m\"".into(),
            })
        }
    };
    let fields = parse_fields(&header, header_line)?;
    let [n, m] = fields[..] else {
        return Err(ProblemError::Parse {
            line: header_line,
            message: format!("header must be \"n m\", got {:?}", header.trim()),
        });
    };
    if n < 0 || m < 0 {
        return Err(ProblemError::Range {
            line: header_line,
            message: "node and edge counts must be non-negative".into(),
        });
    }
    let (n, m) = (n as usize, m as usize);
    check_size(n)?;

    let mut seen = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    for (line_no, line) in lines {
        let line = line.map_err(io_error)?;
        if edges.len() == m {
            return Err(ProblemError::Parse {
                line: line_no,
                message: format!("more than the declared {m} edges"),
            });
        }
        let fields = parse_fields(&line, line_no)?;
        let [i, j, w] = fields[..] else {
            return Err(ProblemError::Parse {
                line: line_no,
                message: format!("edge line must be \"i j w\", got {:?}", line.trim()),
            });
        };
        if i < 1 || j < 1 || i as usize > n || j as usize > n {
            return Err(ProblemError::Range {
                line: line_no,
                message: format!("node index out of 1..={n} in edge ({i}, {j})"),
            });
        }
        if w != 1 && w != -1 {
            return Err(ProblemError::Range {
                line: line_no,
                message: format!("weight {w} is not -1 or +1"),
            });
        }
        let edge = make_edge(n, i as usize - 1, j as usize - 1, w as i8).map_err(|message| {
            ProblemError::Range {
                line: line_no,
                message,
            }
        })?;
        if !seen.insert((edge.i, edge.j)) {
            return Err(ProblemError::DuplicateEdge {
                i: edge.i + 1,
                j: edge.j + 1,
            });
        }
        edges.push(edge);
    }
    if edges.len() != m {
        return Err(ProblemError::Parse {
            line: header_line,
            message: format!("header declares {m} edges but {} were found", edges.len()),
        });
    }
    Ok(MaxCutProblem {
        name: name.to_string(),
        n,
        edges,
    })
}

fn parse_fields(line: &str, line_no: usize) -> Result<Vec<i64>, ProblemError> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<i64>().map_err(|_| ProblemError::Parse {
                line: line_no,
                message: format!("{tok:?} is not an integer"),
            })
        })
        .collect()
}

fn io_error(e: std::io::Error) -> ProblemError {
    ProblemError::Io(e.to_string())
}
