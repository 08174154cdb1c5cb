//! Plain-text matrix formats: dense CSV (rows, comma-separated, no header)
//! and observation CSV (`row,col,value`, 0-based).

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::solvers::CompletionProblem;

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn field<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::data(Some(line), format!("cannot parse `{}`", s.trim())))
}

pub fn parse_matrix_csv(text: &str) -> Result<Matrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|s| field::<f64>(s, k + 1))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::data(
                    Some(k + 1),
                    format!("expected {} columns, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::data(None, "matrix CSV is empty"));
    }
    let (m, n) = (rows.len(), rows[0].len());
    Ok(Matrix::from_fn(m, n, |i, j| rows[i][j]))
}

/// Values are written with the shortest representation that round-trips.
pub fn format_matrix_csv(x: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", x[(i, j)]);
        }
        out.push('\n');
    }
    out
}

pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<Matrix> {
    parse_matrix_csv(&read_text(path.as_ref())?)
}

pub fn write_matrix_csv(path: impl AsRef<Path>, x: &Matrix) -> Result<()> {
    write_text(path.as_ref(), &format_matrix_csv(x))
}

pub type Triplet = (usize, usize, f64);

pub fn parse_triplets(text: &str) -> Result<Vec<Triplet>> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::data(Some(k + 1), "expected row,col,value"));
        }
        out.push((
            field(parts[0], k + 1)?,
            field(parts[1], k + 1)?,
            field(parts[2], k + 1)?,
        ));
    }
    Ok(out)
}

pub fn format_triplets(problem: &CompletionProblem) -> String {
    let mut out = String::new();
    for (&(i, j), v) in problem.omega().iter().zip(problem.observed()) {
        let _ = writeln!(out, "{i},{j},{v}");
    }
    out
}

/// Reads observations; `shape` defaults to one past the largest indices.
pub fn read_problem(path: impl AsRef<Path>, shape: Option<(usize, usize)>) -> Result<CompletionProblem> {
    let triplets = parse_triplets(&read_text(path.as_ref())?)?;
    let shape = shape.unwrap_or_else(|| {
        triplets
            .iter()
            .fold((0, 0), |(m, n), &(i, j, _)| (m.max(i + 1), n.max(j + 1)))
    });
    let (omega, observed) = triplets.into_iter().map(|(i, j, v)| ((i, j), v)).unzip();
    CompletionProblem::new(shape, omega, observed).map_err(|e| Error::data(None, e.to_string()))
}

pub fn write_problem(path: impl AsRef<Path>, problem: &CompletionProblem) -> Result<()> {
    write_text(path.as_ref(), &format_triplets(problem))
}
