//! Plain-text file formats for matrices, vectors, and results.
//!
//! All formats are line-oriented, whitespace-separated, 0-indexed, and
//! write floats in Rust's shortest round-trip form:
//!
//! * matrix: `M N nnz` header, then one `m n re im` line per stored entry
//!   (emitted column by column; readers accept any order);
//! * bias: `M` header, then exactly one `m re im` line per row;
//! * signal: `N K` header, then one `n re im` line per nonzero;
//! * measurement: `M` header, then one `m y` line per row;
//! * recovery report: `key value` lines followed by per-entry diagnostics
//!   and the estimate as an embedded signal block;
//! * theory checks: a CSV with one verdict per row.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;

use crate::analysis::TheoryCheckRow;
use crate::error::{Error, Result};
use crate::model::{MeasurementVector, NoiseMeta, SparseSignal};
use crate::recovery::{RecoverOptions, RecoveryReport};
use crate::sensing::{BiasVector, SparseSensingMatrix, SparsityPattern};

fn parse_error(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

struct Tokens<'a> {
    path: &'a Path,
    line: usize,
    iter: std::str::SplitWhitespace<'a>,
}

impl<'a> Tokens<'a> {
    fn new(path: &'a Path, line: usize, text: &'a str) -> Self {
        Self {
            path,
            line,
            iter: text.split_whitespace(),
        }
    }

    fn next<T: FromStr>(&mut self, what: &str) -> Result<T> {
        let tok = self
            .iter
            .next()
            .ok_or_else(|| parse_error(self.path, self.line, format!("missing {what}")))?;
        tok.parse()
            .map_err(|_| parse_error(self.path, self.line, format!("bad {what}: '{tok}'")))
    }

    fn finish(mut self) -> Result<()> {
        match self.iter.next() {
            Some(extra) => Err(parse_error(
                self.path,
                self.line,
                format!("unexpected trailing token '{extra}'"),
            )),
            None => Ok(()),
        }
    }
}

/// Numbered nonempty lines, comment lines (starting with `#`) skipped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Render a matrix in the `m n re im` entry format.
pub fn matrix_to_string(matrix: &SparseSensingMatrix) -> String {
    let nnz: usize = matrix.pattern().nnz();
    let mut out = String::with_capacity(32 * (nnz + 1));
    let _ = writeln!(
        out,
        "{} {} {nnz}",
        matrix.num_rows(),
        matrix.num_cols()
    );
    for n in 0..matrix.num_cols() {
        for (m, v) in matrix.column_entries(n) {
            let _ = writeln!(out, "{m} {n} {} {}", v.re, v.im);
        }
    }
    out
}

/// Parse the matrix format. Entries may come in any order; duplicate
/// positions are rejected. The loaded matrix has no magnitude class.
pub fn matrix_from_str(text: &str, path: &Path) -> Result<SparseSensingMatrix> {
    let mut lines = content_lines(text);
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| parse_error(path, 1, "empty matrix file"))?;
    let mut toks = Tokens::new(path, line_no, header);
    let m_rows: usize = toks.next("row count")?;
    let n_cols: usize = toks.next("column count")?;
    let nnz: usize = toks.next("entry count")?;
    toks.finish()?;

    let mut columns: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); n_cols];
    let mut seen = 0usize;
    for (line_no, line) in lines {
        let mut toks = Tokens::new(path, line_no, line);
        let m: usize = toks.next("row index")?;
        let n: usize = toks.next("column index")?;
        let re: f64 = toks.next("real part")?;
        let im: f64 = toks.next("imaginary part")?;
        toks.finish()?;
        if m >= m_rows {
            return Err(parse_error(path, line_no, format!("row {m} out of range")));
        }
        if n >= n_cols {
            return Err(parse_error(
                path,
                line_no,
                format!("column {n} out of range"),
            ));
        }
        columns[n].push((m, Complex64::new(re, im)));
        seen += 1;
    }
    if seen != nnz {
        return Err(parse_error(
            path,
            1,
            format!("header promises {nnz} entries, file has {seen}"),
        ));
    }
    let mut supports = Vec::with_capacity(n_cols);
    let mut values = Vec::with_capacity(n_cols);
    for (n, mut column) in columns.into_iter().enumerate() {
        column.sort_by_key(|&(m, _)| m);
        if column.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(parse_error(
                path,
                1,
                format!("column {n} stores one row twice"),
            ));
        }
        supports.push(column.iter().map(|&(m, _)| m).collect::<Vec<_>>());
        values.push(column.into_iter().map(|(_, v)| v).collect::<Vec<_>>());
    }
    let pattern = SparsityPattern::new(m_rows, supports)?;
    SparseSensingMatrix::from_parts(pattern, values, None)
}

/// Render a bias vector in the `m re im` row format.
pub fn bias_to_string(bias: &BiasVector) -> String {
    let mut out = String::with_capacity(32 * (bias.len() + 1));
    let _ = writeln!(out, "{}", bias.len());
    for (m, b) in bias.values().iter().enumerate() {
        let _ = writeln!(out, "{m} {} {}", b.re, b.im);
    }
    out
}

/// Parse the bias format; every row must appear exactly once.
pub fn bias_from_str(text: &str, path: &Path) -> Result<BiasVector> {
    let mut lines = content_lines(text);
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| parse_error(path, 1, "empty bias file"))?;
    let mut toks = Tokens::new(path, line_no, header);
    let m_rows: usize = toks.next("row count")?;
    toks.finish()?;
    let mut values: Vec<Option<Complex64>> = vec![None; m_rows];
    for (line_no, line) in lines {
        let mut toks = Tokens::new(path, line_no, line);
        let m: usize = toks.next("row index")?;
        let re: f64 = toks.next("real part")?;
        let im: f64 = toks.next("imaginary part")?;
        toks.finish()?;
        if m >= m_rows {
            return Err(parse_error(path, line_no, format!("row {m} out of range")));
        }
        if values[m].replace(Complex64::new(re, im)).is_some() {
            return Err(parse_error(path, line_no, format!("row {m} appears twice")));
        }
    }
    let values: Vec<Complex64> = values
        .into_iter()
        .enumerate()
        .map(|(m, v)| v.ok_or_else(|| parse_error(path, 1, format!("row {m} is missing"))))
        .collect::<Result<_>>()?;
    Ok(BiasVector::from_values(values, None))
}

/// Render a sparse signal in the `n re im` nonzero format.
pub fn signal_to_string(signal: &SparseSignal) -> String {
    let mut out = String::with_capacity(32 * (signal.sparsity() + 1));
    let _ = writeln!(out, "{} {}", signal.len(), signal.sparsity());
    for (n, v) in signal.entries() {
        let _ = writeln!(out, "{n} {} {}", v.re, v.im);
    }
    out
}

/// Parse the signal format.
pub fn signal_from_str(text: &str, path: &Path) -> Result<SparseSignal> {
    let mut lines = content_lines(text);
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| parse_error(path, 1, "empty signal file"))?;
    let mut toks = Tokens::new(path, line_no, header);
    let len: usize = toks.next("signal length")?;
    let k: usize = toks.next("nonzero count")?;
    toks.finish()?;
    let mut entries: Vec<(usize, Complex64)> = Vec::with_capacity(k);
    for (line_no, line) in lines {
        let mut toks = Tokens::new(path, line_no, line);
        let n: usize = toks.next("index")?;
        let re: f64 = toks.next("real part")?;
        let im: f64 = toks.next("imaginary part")?;
        toks.finish()?;
        entries.push((n, Complex64::new(re, im)));
    }
    if entries.len() != k {
        return Err(parse_error(
            path,
            1,
            format!("header promises {k} nonzeros, file has {}", entries.len()),
        ));
    }
    entries.sort_by_key(|&(n, _)| n);
    let support: Vec<usize> = entries.iter().map(|&(n, _)| n).collect();
    let values: Vec<Complex64> = entries.into_iter().map(|(_, v)| v).collect();
    SparseSignal::new(len, support, values)
}

/// Render a measurement vector in the `m y` row format.
pub fn measurement_to_string(y: &MeasurementVector) -> String {
    let mut out = String::with_capacity(24 * (y.len() + 1));
    let _ = writeln!(out, "{}", y.len());
    for (m, v) in y.values().iter().enumerate() {
        let _ = writeln!(out, "{m} {v}");
    }
    out
}

/// Parse the measurement format; the noise record of a loaded vector is
/// [`NoiseMeta::Unspecified`].
pub fn measurement_from_str(text: &str, path: &Path) -> Result<MeasurementVector> {
    let mut lines = content_lines(text);
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| parse_error(path, 1, "empty measurement file"))?;
    let mut toks = Tokens::new(path, line_no, header);
    let m_rows: usize = toks.next("row count")?;
    toks.finish()?;
    let mut values: Vec<Option<f64>> = vec![None; m_rows];
    for (line_no, line) in lines {
        let mut toks = Tokens::new(path, line_no, line);
        let m: usize = toks.next("row index")?;
        let v: f64 = toks.next("measurement")?;
        toks.finish()?;
        if m >= m_rows {
            return Err(parse_error(path, line_no, format!("row {m} out of range")));
        }
        if values[m].replace(v).is_some() {
            return Err(parse_error(path, line_no, format!("row {m} appears twice")));
        }
    }
    let values: Vec<f64> = values
        .into_iter()
        .enumerate()
        .map(|(m, v)| v.ok_or_else(|| parse_error(path, 1, format!("row {m} is missing"))))
        .collect::<Result<_>>()?;
    Ok(MeasurementVector::from_values(values, NoiseMeta::Unspecified))
}

/// Render a recovery report: the options it ran with, the estimated
/// support with its vote counts, per-entry diagnostics, and the estimate.
pub fn report_to_string(report: &RecoveryReport, opts: &RecoverOptions) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "regime {}", opts.regime);
    let _ = writeln!(out, "eta {}", opts.eta);
    let _ = writeln!(out, "eps {}", opts.eps);
    let _ = writeln!(out, "tol {}", opts.tol);
    let _ = write!(out, "support");
    for n in &report.support.indices {
        let _ = write!(out, " {n}");
    }
    out.push('\n');
    for entry in &report.per_entry {
        let _ = writeln!(
            out,
            "entry column={} method={} outcome={} isolated_rows={} residual={} candidates={}",
            entry.column,
            entry.method,
            entry.outcome,
            entry.isolated_rows,
            entry.residual,
            entry.candidates,
        );
    }
    let _ = write!(out, "estimate ");
    out.push_str(&signal_to_string(&report.estimate));
    out
}

/// Render theory-check verdicts as CSV.
pub fn theory_rows_to_csv(rows: &[TheoryCheckRow]) -> String {
    let mut out = String::from("check_name,instance_id,lhs,rhs,gap,pass\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{:.11e},{:.11e},{:.11e},{}",
            row.check, row.instance, row.lhs, row.rhs, row.gap, row.pass
        );
    }
    out
}

/// Write a matrix file.
pub fn write_matrix(path: impl AsRef<Path>, matrix: &SparseSensingMatrix) -> Result<()> {
    Ok(std::fs::write(path, matrix_to_string(matrix))?)
}

/// Read a matrix file.
pub fn read_matrix(path: impl AsRef<Path>) -> Result<SparseSensingMatrix> {
    let path = path.as_ref();
    matrix_from_str(&std::fs::read_to_string(path)?, path)
}

/// Write a bias file.
pub fn write_bias(path: impl AsRef<Path>, bias: &BiasVector) -> Result<()> {
    Ok(std::fs::write(path, bias_to_string(bias))?)
}

/// Read a bias file.
pub fn read_bias(path: impl AsRef<Path>) -> Result<BiasVector> {
    let path = path.as_ref();
    bias_from_str(&std::fs::read_to_string(path)?, path)
}

/// Write a signal file.
pub fn write_signal(path: impl AsRef<Path>, signal: &SparseSignal) -> Result<()> {
    Ok(std::fs::write(path, signal_to_string(signal))?)
}

/// Read a signal file.
pub fn read_signal(path: impl AsRef<Path>) -> Result<SparseSignal> {
    let path = path.as_ref();
    signal_from_str(&std::fs::read_to_string(path)?, path)
}

/// Write a measurement file.
pub fn write_measurement(path: impl AsRef<Path>, y: &MeasurementVector) -> Result<()> {
    Ok(std::fs::write(path, measurement_to_string(y))?)
}

/// Read a measurement file.
pub fn read_measurement(path: impl AsRef<Path>) -> Result<MeasurementVector> {
    let path = path.as_ref();
    measurement_from_str(&std::fs::read_to_string(path)?, path)
}

/// Write a recovery report file.
pub fn write_report(
    path: impl AsRef<Path>,
    report: &RecoveryReport,
    opts: &RecoverOptions,
) -> Result<()> {
    Ok(std::fs::write(path, report_to_string(report, opts))?)
}

/// Write a theory-check CSV file.
pub fn write_theory_rows(path: impl AsRef<Path>, rows: &[TheoryCheckRow]) -> Result<()> {
    Ok(std::fs::write(path, theory_rows_to_csv(rows))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_signal, measure, SignalDist};
    use crate::recovery::{recover, Regime};
    use crate::sensing::{devore_pattern, random_bias, randomize_entries};

    fn label() -> &'static Path {
        Path::new("test-input")
    }

    #[test]
    fn matrix_round_trips() {
        let pattern = devore_pattern(5, 2, 25).unwrap();
        let matrix = randomize_entries(&pattern, std::f64::consts::SQRT_2, 3).unwrap();
        let text = matrix_to_string(&matrix);
        let back = matrix_from_str(&text, label()).unwrap();
        assert_eq!(back.pattern(), matrix.pattern());
        assert_eq!(back.num_rows(), 25);
        for n in 0..25 {
            assert_eq!(back.column_values(n), matrix.column_values(n));
        }
        // Loaded matrices do not claim a magnitude class.
        assert_eq!(back.magnitude_class(), None);
        // Shuffled entry order parses to the same matrix.
        let mut lines: Vec<&str> = text.lines().collect();
        lines[1..].reverse();
        let shuffled = lines.join("\n");
        let again = matrix_from_str(&shuffled, label()).unwrap();
        assert_eq!(again.pattern(), back.pattern());
    }

    #[test]
    fn matrix_parser_rejects_corruption() {
        let pattern = devore_pattern(3, 2, 9).unwrap();
        let matrix = randomize_entries(&pattern, 1.0, 0).unwrap();
        let text = matrix_to_string(&matrix);
        // Entry count mismatch.
        let mut truncated: Vec<&str> = text.lines().collect();
        truncated.pop();
        assert!(matrix_from_str(&truncated.join("\n"), label()).is_err());
        // Out-of-range row.
        let bad = text.replace("\n0 0 ", "\n99 0 ");
        assert!(matrix_from_str(&bad, label()).is_err());
        // Duplicate entry (count adjusted so only the duplication can fail).
        let first_entry = text.lines().nth(1).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines.push(first_entry.to_string());
        lines[0] = "9 9 19".to_string();
        assert!(matrix_from_str(&lines.join("\n"), label()).is_err());
    }

    #[test]
    fn bias_round_trips_and_validates() {
        let bias = random_bias(12, std::f64::consts::SQRT_2, 5).unwrap();
        let text = bias_to_string(&bias);
        let back = bias_from_str(&text, label()).unwrap();
        assert_eq!(back.values(), bias.values());
        // A missing row is caught.
        let missing: Vec<&str> = text.lines().take(12).collect();
        assert!(bias_from_str(&missing.join("\n"), label()).is_err());
        // A duplicated row is caught.
        let last = text.lines().last().unwrap();
        let dup = format!("{text}{last}\n");
        assert!(bias_from_str(&dup, label()).is_err());
    }

    #[test]
    fn signal_round_trips() {
        let signal = generate_signal(
            100,
            7,
            SignalDist::ComplexGaussian { variance: 2.0 },
            9,
        )
        .unwrap();
        let text = signal_to_string(&signal);
        let back = signal_from_str(&text, label()).unwrap();
        assert_eq!(back, signal);
        let empty = signal_from_str("10 0\n", label()).unwrap();
        assert_eq!(empty, SparseSignal::zero(10));
    }

    #[test]
    fn measurement_round_trips() {
        let pattern = devore_pattern(5, 2, 25).unwrap();
        let matrix = randomize_entries(&pattern, std::f64::consts::SQRT_2, 8).unwrap();
        let bias = random_bias(25, std::f64::consts::SQRT_2, 8).unwrap();
        let signal = generate_signal(25, 2, SignalDist::Circle { radius: 2.0 }, 8).unwrap();
        let y = measure(&matrix, &bias, &signal).unwrap();
        let text = measurement_to_string(&y);
        let back = measurement_from_str(&text, label()).unwrap();
        assert_eq!(back.values(), y.values());
        assert_eq!(back.noise_meta(), &NoiseMeta::Unspecified);
    }

    #[test]
    fn report_text_carries_the_outcome() {
        let pattern = devore_pattern(5, 2, 25).unwrap();
        let matrix = randomize_entries(&pattern, std::f64::consts::SQRT_2, 4).unwrap();
        let bias = random_bias(25, std::f64::consts::SQRT_2, 4).unwrap();
        let signal = generate_signal(25, 1, SignalDist::Circle { radius: 2.0 }, 4).unwrap();
        let y = measure(&matrix, &bias, &signal).unwrap();
        let opts = RecoverOptions::new(Regime::NoiseFree, 2.0);
        let report = recover(&y, &matrix, &bias, &opts).unwrap();
        let text = report_to_string(&report, &opts);
        assert!(text.starts_with("regime noise-free\n"));
        assert!(text.contains("\nsupport "));
        assert!(text.contains("method=closed-form"));
        assert!(text.contains("outcome=recovered"));
        assert!(text.contains("\nestimate 25 1\n"));
        // The embedded estimate parses back to the recovered signal.
        let embedded = text.split("estimate ").nth(1).unwrap();
        let parsed = signal_from_str(embedded, label()).unwrap();
        assert_eq!(parsed, report.estimate);
    }

    #[test]
    fn theory_csv_shape() {
        let rows = vec![TheoryCheckRow {
            check: "collinearity-identity",
            instance: "column-3".into(),
            lhs: 0.5,
            rhs: 0.5,
            gap: 0.0,
            pass: true,
        }];
        let text = theory_rows_to_csv(&rows);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("check_name,instance_id,lhs,rhs,gap,pass"));
        let row = lines.next().unwrap();
        assert!(row.starts_with("collinearity-identity,column-3,"));
        assert!(row.ends_with(",true"));
    }

    #[test]
    fn files_round_trip_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let pattern = devore_pattern(3, 2, 9).unwrap();
        let matrix = randomize_entries(&pattern, 1.5, 1).unwrap();
        let bias = random_bias(9, 1.0, 1).unwrap();
        let signal = generate_signal(9, 2, SignalDist::Circle { radius: 1.0 }, 1).unwrap();
        let y = measure(&matrix, &bias, &signal).unwrap();

        let mp = dir.path().join("matrix.txt");
        let bp = dir.path().join("bias.txt");
        let sp = dir.path().join("signal.txt");
        let yp = dir.path().join("y.txt");
        write_matrix(&mp, &matrix).unwrap();
        write_bias(&bp, &bias).unwrap();
        write_signal(&sp, &signal).unwrap();
        write_measurement(&yp, &y).unwrap();

        assert_eq!(read_matrix(&mp).unwrap().pattern(), matrix.pattern());
        assert_eq!(read_bias(&bp).unwrap().values(), bias.values());
        assert_eq!(read_signal(&sp).unwrap(), signal);
        assert_eq!(read_measurement(&yp).unwrap().values(), y.values());
    }
}
