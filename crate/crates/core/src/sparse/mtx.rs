//! Matrix Market (`.mtx`) reading and writing.
//!
//! Coordinate files with `real` or `integer` fields and `general` or
//! `symmetric` symmetry are accepted. Indices are one-based on disk and
//! zero-based in memory. Duplicate entries are summed. Symmetric files keep
//! only the stored triangle; use [`super::expand_symmetric`] for the full
//! matrix.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use super::{CsrError, CsrMatrix};

#[derive(Debug, Error)]
pub enum MtxError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csr(#[from] CsrError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> MtxError {
    MtxError::Parse { line, msg: msg.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    General,
    Symmetric,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixMarket {
    pub matrix: CsrMatrix,
    pub symmetry: Symmetry,
}

/// Numbered lines that are neither blank nor comments.
fn data_lines(
    lines: impl Iterator<Item = (usize, io::Result<String>)>,
) -> impl Iterator<Item = Result<(usize, String), MtxError>> {
    lines.filter_map(|(n, l)| match l {
        Err(e) => Some(Err(MtxError::Io(e))),
        Ok(s) => {
            let t = s.trim();
            (!t.is_empty() && !t.starts_with('%')).then(|| Ok((n, t.to_string())))
        }
    })
}

fn parse_banner(line: &str, n: usize, expect_layout: &str) -> Result<Symmetry, MtxError> {
    let words: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(parse_err(n, "missing %%MatrixMarket banner"));
    }
    if words.len() != 5 {
        return Err(parse_err(n, "banner must read `%%MatrixMarket matrix <layout> <field> <symmetry>`"));
    }
    if words[1] != "matrix" {
        return Err(parse_err(n, format!("unsupported object `{}`", words[1])));
    }
    if words[2] != expect_layout {
        return Err(parse_err(n, format!("expected `{expect_layout}` layout, found `{}`", words[2])));
    }
    match words[3].as_str() {
        "real" | "integer" => {}
        "pattern" => return Err(parse_err(n, "pattern matrices carry no values and are not supported")),
        other => return Err(parse_err(n, format!("unsupported field `{other}`"))),
    }
    match words[4].as_str() {
        "general" => Ok(Symmetry::General),
        "symmetric" => Ok(Symmetry::Symmetric),
        other => Err(parse_err(n, format!("unsupported symmetry `{other}`"))),
    }
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, n: usize, what: &str) -> Result<T, MtxError> {
    let tok = tok.ok_or_else(|| parse_err(n, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(n, format!("invalid {what} `{tok}`")))
}

pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<MatrixMarket, MtxError> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (n0, banner) = match lines.next() {
        Some((n, l)) => (n, l?),
        None => return Err(parse_err(1, "empty input")),
    };
    let symmetry = parse_banner(&banner, n0, "coordinate")?;
    let mut data = data_lines(lines);

    let (ns, size) = data.next().ok_or_else(|| parse_err(n0, "missing size line"))??;
    let mut tok = size.split_whitespace();
    let n_rows: usize = parse_num(tok.next(), ns, "row count")?;
    let n_cols: usize = parse_num(tok.next(), ns, "column count")?;
    let nnz: usize = parse_num(tok.next(), ns, "entry count")?;
    if tok.next().is_some() {
        return Err(parse_err(ns, "size line must hold exactly three integers"));
    }
    if symmetry == Symmetry::Symmetric && n_rows != n_cols {
        return Err(parse_err(ns, format!("symmetric matrix must be square, got {n_rows}x{n_cols}")));
    }

    let mut triplets = Vec::with_capacity(nnz);
    let mut last_line = ns;
    for item in data {
        let (n, line) = item?;
        if triplets.len() == nnz {
            return Err(parse_err(n, format!("more entries than the declared {nnz}")));
        }
        let mut tok = line.split_whitespace();
        let i: usize = parse_num(tok.next(), n, "row index")?;
        let j: usize = parse_num(tok.next(), n, "column index")?;
        let v: f64 = parse_num(tok.next(), n, "value")?;
        if tok.next().is_some() {
            return Err(parse_err(n, "entry must hold exactly `row column value`"));
        }
        if i == 0 || i > n_rows || j == 0 || j > n_cols {
            return Err(parse_err(n, format!("index ({i}, {j}) out of range for {n_rows}x{n_cols}")));
        }
        triplets.push((i - 1, j - 1, v));
        last_line = n;
    }
    if triplets.len() != nnz {
        return Err(parse_err(last_line, format!("expected {nnz} entries, found {}", triplets.len())));
    }
    let matrix = CsrMatrix::from_triplets(n_rows, n_cols, triplets)?;
    Ok(MatrixMarket { matrix, symmetry })
}

pub fn read_matrix_market_file(path: impl AsRef<Path>) -> Result<MatrixMarket, MtxError> {
    read_matrix_market(BufReader::new(File::open(path)?))
}

/// Writes a coordinate file. With [`Symmetry::Symmetric`] only entries with
/// `row >= col` are written.
pub fn write_matrix_market<W: Write>(mut w: W, m: &CsrMatrix, symmetry: Symmetry) -> io::Result<()> {
    let kind = match symmetry {
        Symmetry::General => "general",
        Symmetry::Symmetric => "symmetric",
    };
    let keep = |i: usize, j: usize| symmetry == Symmetry::General || i >= j;
    let count = m.triplets().filter(|&(i, j, _)| keep(i, j)).count();
    writeln!(w, "%%MatrixMarket matrix coordinate real {kind}")?;
    writeln!(w, "{} {} {}", m.n_rows(), m.n_cols(), count)?;
    for (i, j, v) in m.triplets().filter(|&(i, j, _)| keep(i, j)) {
        writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
    }
    w.flush()
}

pub fn write_matrix_market_file(path: impl AsRef<Path>, m: &CsrMatrix, symmetry: Symmetry) -> io::Result<()> {
    write_matrix_market(BufWriter::new(File::create(path)?), m, symmetry)
}

/// Writes a dense column vector as a Matrix Market array file.
pub fn write_array<W: Write>(mut w: W, v: &[f64]) -> io::Result<()> {
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} 1", v.len())?;
    for x in v {
        writeln!(w, "{x:e}")?;
    }
    w.flush()
}

pub fn write_array_file(path: impl AsRef<Path>, v: &[f64]) -> io::Result<()> {
    write_array(BufWriter::new(File::create(path)?), v)
}

/// Reads a single-column Matrix Market array file.
pub fn read_array<R: BufRead>(reader: R) -> Result<Vec<f64>, MtxError> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (n0, banner) = match lines.next() {
        Some((n, l)) => (n, l?),
        None => return Err(parse_err(1, "empty input")),
    };
    if parse_banner(&banner, n0, "array")? != Symmetry::General {
        return Err(parse_err(n0, "array files must be general"));
    }
    let mut data = data_lines(lines);
    let (ns, size) = data.next().ok_or_else(|| parse_err(n0, "missing size line"))??;
    let mut tok = size.split_whitespace();
    let rows: usize = parse_num(tok.next(), ns, "row count")?;
    let cols: usize = parse_num(tok.next(), ns, "column count")?;
    if cols != 1 {
        return Err(parse_err(ns, format!("expected one column, found {cols}")));
    }
    let mut out = Vec::with_capacity(rows);
    let mut last_line = ns;
    for item in data {
        let (n, line) = item?;
        if out.len() == rows {
            return Err(parse_err(n, format!("more values than the declared {rows}")));
        }
        out.push(parse_num(Some(line.as_str()), n, "value")?);
        last_line = n;
    }
    if out.len() != rows {
        return Err(parse_err(last_line, format!("expected {rows} values, found {}", out.len())));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(s: &str) -> Result<MatrixMarket, MtxError> {
        read_matrix_market(s.as_bytes())
    }

    #[test]
    fn identity_2x2() {
        let mm = read("%%MatrixMarket matrix coordinate real general\n% comment\n2 2 2\n1 1 1.0\n2 2 1\n").unwrap();
        assert_eq!(mm.symmetry, Symmetry::General);
        assert_eq!(mm.matrix.row_ptr(), &[0, 1, 2]);
        assert_eq!(mm.matrix.col_idx(), &[0, 1]);
        assert_eq!(mm.matrix.values(), &[1.0, 1.0]);
    }

    #[test]
    fn symmetric_keeps_stored_triangle() {
        let mm = read("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n2 1 3.5\n").unwrap();
        assert_eq!(mm.symmetry, Symmetry::Symmetric);
        assert_eq!(mm.matrix.nnz(), 1);
        assert_eq!(mm.matrix.get(1, 0), Some(3.5));
        assert_eq!(mm.matrix.get(0, 1), None);
    }

    #[test]
    fn symmetric_3x3_by_hand() {
        // lower triangle of [[4,-1,0],[-1,4,-1],[0,-1,4]], entries shuffled,
        // with (3,3) split into two duplicates
        let text = "%%MatrixMarket matrix coordinate integer symmetric\n3 3 6\n\
                    2 1 -1\n1 1 4\n3 2 -1\n2 2 4\n3 3 3\n3 3 1\n";
        let mm = read(text).unwrap();
        assert_eq!(mm.matrix.row_ptr(), &[0, 1, 3, 5]);
        assert_eq!(mm.matrix.col_idx(), &[0, 0, 1, 1, 2]);
        assert_eq!(mm.matrix.values(), &[4.0, -1.0, 4.0, -1.0, 4.0]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1\n", 1, "pattern"),
            ("%%MatrixMarket matrix coordinate complex general\n", 1, "complex"),
            ("MatrixMarket matrix coordinate real general\n", 1, "banner"),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n", 3, "out of range"),
            ("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n", 3, "expected 2 entries"),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n\n1 1 x\n", 4, "invalid value"),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1\n2 2 2\n", 4, "more entries"),
            ("%%MatrixMarket matrix coordinate real symmetric\n2 3 0\n", 2, "square"),
        ];
        for (text, line, needle) in cases {
            match read(text) {
                Err(MtxError::Parse { line: l, msg }) => {
                    assert_eq!(l, line, "{text}");
                    assert!(msg.contains(needle), "{msg} should mention {needle}");
                }
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn write_then_read_is_identical() {
        let m = CsrMatrix::from_triplets(
            3,
            3,
            [(0, 0, 0.1), (1, 0, -1.0 / 3.0), (1, 1, 1e-300), (2, 1, 7.0e22), (2, 2, f64::MIN_POSITIVE)],
        )
        .unwrap();
        for sym in [Symmetry::General, Symmetry::Symmetric] {
            let mut buf = Vec::new();
            write_matrix_market(&mut buf, &m, sym).unwrap();
            let back = read_matrix_market(buf.as_slice()).unwrap();
            assert_eq!(back.matrix, m);
            assert_eq!(back.symmetry, sym);
        }
    }

    #[test]
    fn array_roundtrip() {
        let v = vec![1.0, -0.1, 3e-310, 2.0f64.powi(70)];
        let mut buf = Vec::new();
        write_array(&mut buf, &v).unwrap();
        assert_eq!(read_array(buf.as_slice()).unwrap(), v);
    }
}
