//! Plain-text instance files.
//!
//! QUBO format: a `QUBO n=<N>` header followed by `i j value` triples with
//! `i <= j`; omitted pairs are zero. Max-Cut format: `MAXCUT n=<N> m=<M>`
//! followed by `i j weight` lines, one per edge. In both formats `#` starts
//! a comment (anywhere in a line) and blank lines are skipped. Values are
//! written with 17 significant digits, so write -> read reproduces every
//! coefficient bit-exactly; names and generator seeds are not part of the
//! format.

use super::{MaxCutInstance, QuboError, QuboProblem, TriMatrix};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

pub fn write_qubo<W: Write>(q: &QuboProblem, mut w: W) -> Result<(), QuboError> {
    writeln!(w, "QUBO n={}", q.n())?;
    for i in 0..q.n() {
        for j in i..q.n() {
            let v = q.get(i, j);
            if v != 0.0 {
                writeln!(w, "{i} {j} {v:.16e}")?;
            }
        }
    }
    Ok(())
}

pub fn write_maxcut<W: Write>(inst: &MaxCutInstance, mut w: W) -> Result<(), QuboError> {
    writeln!(w, "MAXCUT n={} m={}", inst.n(), inst.edges().len())?;
    for &(i, j, weight) in inst.edges() {
        writeln!(w, "{i} {j} {weight:.16e}")?;
    }
    Ok(())
}

pub fn read_qubo<R: Read>(r: R) -> Result<QuboProblem, QuboError> {
    let mut lines = content_lines(r);
    let (line_no, header) = lines
        .next()
        .transpose()?
        .ok_or_else(|| QuboError::InvalidInput("empty file".into()))?;
    let n = parse_header(&header, line_no, "QUBO", &["n"])?[0];
    if n == 0 {
        return Err(QuboError::Parse {
            line: line_no,
            msg: "dimension must be at least 1".into(),
        });
    }
    let mut matrix = TriMatrix::zeros(n);
    let mut seen = vec![false; n * (n + 1) / 2];
    for item in lines {
        let (line_no, line) = item?;
        let (i, j, v) = parse_triple(&line, line_no)?;
        if i > j {
            return Err(QuboError::Parse {
                line: line_no,
                msg: format!("expected i <= j, got ({i}, {j})"),
            });
        }
        if j >= n {
            return Err(QuboError::Parse {
                line: line_no,
                msg: format!("index {j} out of range for n={n}"),
            });
        }
        let slot = i * n - i * (i.wrapping_sub(1)) / 2 + (j - i);
        if seen[slot] {
            return Err(QuboError::Parse {
                line: line_no,
                msg: format!("duplicate entry ({i}, {j})"),
            });
        }
        seen[slot] = true;
        if !v.is_finite() {
            return Err(QuboError::Parse {
                line: line_no,
                msg: format!("coefficient ({i}, {j}) is not finite"),
            });
        }
        matrix.set(i, j, v);
    }
    Ok(QuboProblem::from_matrix(matrix, "qubo"))
}

pub fn read_maxcut<R: Read>(r: R) -> Result<MaxCutInstance, QuboError> {
    let mut lines = content_lines(r);
    let (line_no, header) = lines
        .next()
        .transpose()?
        .ok_or_else(|| QuboError::InvalidInput("empty file".into()))?;
    let parsed = parse_header(&header, line_no, "MAXCUT", &["n", "m"])?;
    let (n, m) = (parsed[0], parsed[1]);
    let mut edges = Vec::with_capacity(m);
    for item in lines {
        let (line_no, line) = item?;
        let (i, j, w) = parse_triple(&line, line_no)?;
        if i == j {
            return Err(QuboError::Parse {
                line: line_no,
                msg: format!("self-loop at vertex {i}"),
            });
        }
        edges.push((i, j, w));
    }
    if edges.len() != m {
        return Err(QuboError::InvalidInput(format!(
            "header declares {m} edges but the file has {}",
            edges.len()
        )));
    }
    MaxCutInstance::new(n, edges, "maxcut")
}

/// A problem file of either format, detected by the header keyword.
#[derive(Clone, Debug)]
pub enum LoadedProblem {
    Qubo(QuboProblem),
    MaxCut(MaxCutInstance),
}

impl LoadedProblem {
    /// The QUBO to optimize: Max-Cut instances are converted to their
    /// negated-cut encoding.
    pub fn into_qubo(self) -> QuboProblem {
        match self {
            LoadedProblem::Qubo(q) => q,
            LoadedProblem::MaxCut(inst) => inst.to_qubo(),
        }
    }
}

pub fn load_problem(path: &Path) -> Result<LoadedProblem, QuboError> {
    let file = File::open(path).map_err(|e| {
        QuboError::InvalidInput(format!("cannot open {}: {e}", path.display()))
    })?;
    let mut reader = BufReader::new(file);
    let mut head = String::new();
    // Peek enough to find the keyword, then restart the stream.
    reader.read_to_string(&mut head)?;
    let keyword = head
        .lines()
        .map(strip_comment)
        .find(|l| !l.is_empty())
        .map(|l| l.split_whitespace().next().unwrap_or("").to_string())
        .unwrap_or_default();
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "problem".into());
    match keyword.as_str() {
        "QUBO" => {
            let mut q = read_qubo(head.as_bytes())?;
            q.set_name(stem);
            Ok(LoadedProblem::Qubo(q))
        }
        "MAXCUT" => {
            let mut inst = read_maxcut(head.as_bytes())?;
            inst.set_name(stem);
            Ok(LoadedProblem::MaxCut(inst))
        }
        other => Err(QuboError::InvalidInput(format!(
            "{}: unrecognized header keyword {other:?}",
            path.display()
        ))),
    }
}

pub fn write_qubo_file(q: &QuboProblem, path: &Path) -> Result<(), QuboError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_qubo(q, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_maxcut_file(inst: &MaxCutInstance, path: &Path) -> Result<(), QuboError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_maxcut(inst, &mut w)?;
    w.flush()?;
    Ok(())
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

/// Iterator over (1-based line number, non-empty content) pairs.
fn content_lines<R: Read>(
    r: R,
) -> impl Iterator<Item = Result<(usize, String), QuboError>> {
    BufReader::new(r)
        .lines()
        .enumerate()
        .filter_map(|(idx, line)| match line {
            Err(e) => Some(Err(QuboError::Io(e))),
            Ok(l) => {
                let content = strip_comment(&l);
                (!content.is_empty()).then(|| Ok((idx + 1, content.to_string())))
            }
        })
}

/// Parses `KEYWORD k1=<int> k2=<int> ...` headers.
fn parse_header(
    line: &str,
    line_no: usize,
    keyword: &str,
    keys: &[&str],
) -> Result<Vec<usize>, QuboError> {
    let mut parts = line.split_whitespace();
    let head = parts.next().unwrap_or("");
    if head != keyword {
        return Err(QuboError::Parse {
            line: line_no,
            msg: format!("expected {keyword} header, found {head:?}"),
        });
    }
    let mut out = Vec::with_capacity(keys.len());
    for key in keys {
        let field = parts.next().ok_or_else(|| QuboError::Parse {
            line: line_no,
            msg: format!("missing {key}=<int>"),
        })?;
        let value = field
            .strip_prefix(&format!("{key}="))
            .and_then(|v| v.parse::<usize>().ok())
            .ok_or_else(|| QuboError::Parse {
                line: line_no,
                msg: format!("expected {key}=<int>, found {field:?}"),
            })?;
        out.push(value);
    }
    Ok(out)
}

fn parse_triple(line: &str, line_no: usize) -> Result<(usize, usize, f64), QuboError> {
    let mut parts = line.split_whitespace();
    let mut next_idx = |what: &str| -> Result<usize, QuboError> {
        parts
            .next()
            .and_then(|t| t.parse::<usize>().ok())
            .ok_or_else(|| QuboError::Parse {
                line: line_no,
                msg: format!("expected {what} index"),
            })
    };
    let i = next_idx("first")?;
    let j = next_idx("second")?;
    let v = parts
        .next()
        .and_then(|t| t.parse::<f64>().ok())
        .ok_or_else(|| QuboError::Parse {
            line: line_no,
            msg: "expected a numeric value".into(),
        })?;
    if parts.next().is_some() {
        return Err(QuboError::Parse {
            line: line_no,
            msg: "trailing tokens after value".into(),
        });
    }
    Ok((i, j, v))
}
