use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

fn parse_header(line_no: usize, line: &str) -> Result<(Format, Symmetry)> {
    let lower = line.to_ascii_lowercase();
    let tok: Vec<&str> = lower.split_whitespace().collect();
    if tok.len() != 5 || tok[0] != "%%matrixmarket" {
        return parse_err(line_no, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'");
    }
    if tok[1] != "matrix" {
        return parse_err(line_no, format!("unsupported object '{}'", tok[1]));
    }
    let format = match tok[2] {
        "coordinate" => Format::Coordinate,
        "array" => Format::Array,
        f => return parse_err(line_no, format!("unsupported format '{f}'")),
    };
    if tok[3] != "real" {
        return parse_err(line_no, format!("unsupported field '{}' (only real)", tok[3]));
    }
    let sym = match tok[4] {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        s => return parse_err(line_no, format!("unsupported symmetry '{s}'")),
    };
    Ok((format, sym))
}

fn parse_usize(line_no: usize, tok: &str, what: &str) -> Result<usize> {
    tok.parse().or_else(|_| parse_err(line_no, format!("invalid {what} '{tok}'")))
}

fn parse_real<T: Real>(line_no: usize, tok: &str) -> Result<T> {
    let v: f64 = tok.parse().or_else(|_| parse_err(line_no, format!("invalid value '{tok}'")))?;
    if !v.is_finite() {
        return parse_err(line_no, format!("non-finite value '{tok}'"));
    }
    Ok(T::lit(v))
}

/// Reads a real Matrix Market matrix (coordinate or array format).
///
/// Symmetric and skew-symmetric storage is expanded to full storage and
/// duplicate coordinate entries are summed. Errors carry 1-based line numbers.
pub fn parse_matrix_market<T: Real, R: BufRead>(reader: R) -> Result<CsrMatrix<T>> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (format, sym) = match lines.next() {
        Some((n, l)) => parse_header(n, &l?)?,
        None => return parse_err(1, "empty input"),
    };

    let mut data = Vec::new();
    for (n, l) in lines {
        let l = l?;
        let t = l.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        data.push((n, t.to_string()));
    }
    let mut it = data.into_iter();
    let (size_line, size) = it.next().map_or_else(|| parse_err(0, "missing size line"), Ok)?;
    let size_tok: Vec<&str> = size.split_whitespace().collect();

    let mut trip: Vec<(usize, usize, T)> = Vec::new();
    let (nrows, ncols) = match format {
        Format::Coordinate => {
            if size_tok.len() != 3 {
                return parse_err(size_line, "coordinate size line needs 'rows cols nnz'");
            }
            let nrows = parse_usize(size_line, size_tok[0], "row count")?;
            let ncols = parse_usize(size_line, size_tok[1], "column count")?;
            let nnz = parse_usize(size_line, size_tok[2], "entry count")?;
            let mut seen = 0;
            for (n, line) in it {
                let tok: Vec<&str> = line.split_whitespace().collect();
                if tok.len() != 3 {
                    return parse_err(n, "entry line needs 'row col value'");
                }
                let i = parse_usize(n, tok[0], "row index")?;
                let j = parse_usize(n, tok[1], "column index")?;
                if i == 0 || i > nrows || j == 0 || j > ncols {
                    return parse_err(n, format!("index ({i}, {j}) outside {nrows}x{ncols}"));
                }
                let v: T = parse_real(n, tok[2])?;
                seen += 1;
                if seen > nnz {
                    return parse_err(n, format!("more than the declared {nnz} entries"));
                }
                push_entry(&mut trip, n, sym, i - 1, j - 1, v)?;
            }
            if seen < nnz {
                return parse_err(size_line, format!("declared {nnz} entries, found {seen}"));
            }
            (nrows, ncols)
        }
        Format::Array => {
            if size_tok.len() != 2 {
                return parse_err(size_line, "array size line needs 'rows cols'");
            }
            let nrows = parse_usize(size_line, size_tok[0], "row count")?;
            let ncols = parse_usize(size_line, size_tok[1], "column count")?;
            if sym != Symmetry::General && nrows != ncols {
                return parse_err(size_line, "symmetric storage needs a square matrix");
            }
            // Column-major; symmetric stores the lower triangle, skew the
            // strict lower triangle.
            let positions: Vec<(usize, usize)> = (0..ncols)
                .flat_map(|j| {
                    let start = match sym {
                        Symmetry::General => 0,
                        Symmetry::Symmetric => j,
                        Symmetry::SkewSymmetric => j + 1,
                    };
                    (start..nrows).map(move |i| (i, j))
                })
                .collect();
            let mut values = Vec::with_capacity(positions.len());
            let mut last_line = size_line;
            for (n, line) in it {
                last_line = n;
                for tok in line.split_whitespace() {
                    values.push((n, parse_real::<T>(n, tok)?));
                }
            }
            if values.len() != positions.len() {
                return parse_err(last_line, format!("expected {} values, found {}", positions.len(), values.len()));
            }
            for ((i, j), (n, v)) in positions.into_iter().zip(values) {
                if v != T::zero() {
                    push_entry(&mut trip, n, sym, i, j, v)?;
                }
            }
            (nrows, ncols)
        }
    };
    CsrMatrix::from_triplets(nrows, ncols, &trip)
}

fn push_entry<T: Real>(trip: &mut Vec<(usize, usize, T)>, line: usize, sym: Symmetry, i: usize, j: usize, v: T) -> Result<()> {
    match sym {
        Symmetry::General => trip.push((i, j, v)),
        Symmetry::Symmetric => {
            if i < j {
                return parse_err(line, "symmetric storage expects the lower triangle");
            }
            trip.push((i, j, v));
            if i != j {
                trip.push((j, i, v));
            }
        }
        Symmetry::SkewSymmetric => {
            if i <= j {
                return parse_err(line, "skew-symmetric storage expects the strict lower triangle");
            }
            trip.push((i, j, v));
            trip.push((j, i, -v));
        }
    }
    Ok(())
}

pub fn read_matrix_market<T: Real>(path: impl AsRef<Path>) -> Result<CsrMatrix<T>> {
    parse_matrix_market(BufReader::new(File::open(path)?))
}

/// Writes `coordinate real general` with 1-based indices. Values use the
/// shortest representation that reads back to the same `f64`.
pub fn write_matrix_market<T: Real, W: Write>(mut out: W, m: &CsrMatrix<T>) -> Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for (i, j, v) in m.triplets() {
        writeln!(out, "{} {} {:e}", i + 1, j + 1, v.to_f64_lossy())?;
    }
    Ok(())
}

pub fn write_matrix_market_file<T: Real>(path: impl AsRef<Path>, m: &CsrMatrix<T>) -> Result<()> {
    let mut w = std::io::BufWriter::new(File::create(path)?);
    write_matrix_market(&mut w, m)?;
    w.flush()?;
    Ok(())
}

/// Reads a vector: either a one-column Matrix Market file, or plain
/// whitespace-separated numbers (`%` and `#` start comment lines).
pub fn read_vector<T: Real>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let text = std::fs::read_to_string(path)?;
    if text.trim_start().to_ascii_lowercase().starts_with("%%matrixmarket") {
        let m: CsrMatrix<T> = parse_matrix_market(text.as_bytes())?;
        if m.ncols() != 1 {
            return parse_err(1, format!("vector file has {} columns", m.ncols()));
        }
        let d = m.to_dense();
        return Ok(d.col(0).to_vec());
    }
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.starts_with('%') || t.starts_with('#') {
            continue;
        }
        for tok in t.split_whitespace() {
            out.push(parse_real(n + 1, tok)?);
        }
    }
    if out.is_empty() {
        return parse_err(1, "vector file has no values");
    }
    Ok(out)
}
