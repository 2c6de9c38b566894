//! Two-stage recovery from magnitude-squared affine measurements.
//!
//! Stage I never touches values: a column is declared active when enough of
//! its rows deviate from the known baseline `|b_m|^2`. With a uniform
//! column weight `d` and pairwise overlap at most `r`, an inactive column
//! can collect at most `K r` deviating rows (plus one per outlier under
//! sparse noise) while an active column keeps almost all of its `d` rows
//! deviating, so a single vote threshold `eta` separates the two. See
//! [`eta_range`] for the admissible thresholds per regime.
//!
//! Stage II estimates each active entry from the rows only that column
//! touches, after discarding rows shared with other active columns
//! ([`reduced_support`]). On those isolated rows the measurement is a
//! one-dimensional phase retrieval problem with known affine references:
//!
//! * noise free, three rows suffice for a closed form
//!   ([`recover_entry_closed_form`]);
//! * sparse outliers, each row pair proposes circle-intersection candidates
//!   and the candidate consistent with most rows wins
//!   ([`recover_entry_majority`]);
//! * bounded noise, a linear least-squares estimate in `(s, conj s)`
//!   collapses to a two-term formula ([`recover_entry_ls`]).
//!
//! [`recover`] wires the stages together and reports per-entry diagnostics
//! instead of aborting on isolated failures.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{MeasurementVector, SparseSignal};
use crate::sensing::{BiasVector, SparseSensingMatrix, SparsityPattern};

/// Floating-point guard for the "equals the baseline" test when the noise
/// level is zero: a row counts as deviating only beyond this times
/// `max(1, |b_m|^2)`.
pub const EQUALITY_GUARD: f64 = 1e-9;

/// Relative lower bound on the collinearity term accepted by the closed
/// form; triples below it are scanned past.
pub const TRIPLE_COLLINEARITY_TOL: f64 = 1e-6;

/// Default geometric tolerance for circle membership and tangency tests.
pub const DEFAULT_GEOMETRY_TOL: f64 = 1e-6;

/// Relative margin under which centered references count as degenerate
/// (the least-squares normal matrix loses rank).
pub const DEGENERACY_MARGIN: f64 = 1e-12;

/// Noise regime the recovery is asked to assume.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    NoiseFree,
    Sparse,
    Bounded,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::NoiseFree => "noise-free",
            Regime::Sparse => "sparse",
            Regime::Bounded => "bounded",
        })
    }
}

/// Admissible vote-threshold interval for a regime, together with whether
/// the regime's sparsity condition holds. The two statements are
/// equivalent: the interval is nonempty exactly when the condition is met.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaRange {
    /// Half-open interval `[lo, hi)` of thresholds with a recovery
    /// guarantee, when nonempty.
    pub interval: Option<(f64, f64)>,
    /// The regime's sparsity condition on `(d, r, k, kv)`.
    pub sparsity_condition_holds: bool,
}

impl EtaRange {
    pub fn midpoint(&self) -> Option<f64> {
        self.interval.map(|(lo, hi)| 0.5 * (lo + hi))
    }
}

/// The guaranteed threshold interval for support identification.
///
/// With column weight `d`, overlap cap `r`, signal sparsity `k`, and (for
/// the sparse regime) outlier count `kv`:
///
/// * noise free: `[k r, d - k r + r - 2)`, nonempty iff `d + r - 2 > 2 k r`;
/// * sparse:     `[k r + kv, d - k r - kv + r - 2)`, nonempty iff
///   `d + r - 2 > 2 (k r + kv)`;
/// * bounded:    `[k r, d - k r + r)`, nonempty iff `d + r > 2 k r`.
pub fn eta_range(regime: Regime, d: usize, r: usize, k: usize, kv: usize) -> EtaRange {
    let (d, r, k, kv) = (d as i64, r as i64, k as i64, kv as i64);
    let (lo, hi, condition) = match regime {
        Regime::NoiseFree => (k * r, d - k * r + r - 2, d + r - 2 > 2 * k * r),
        Regime::Sparse => (
            k * r + kv,
            d - k * r - kv + r - 2,
            d + r - 2 > 2 * (k * r + kv),
        ),
        Regime::Bounded => (k * r, d - k * r + r, d + r > 2 * k * r),
    };
    let interval = (lo < hi).then_some((lo as f64, hi as f64));
    debug_assert_eq!(interval.is_some(), condition);
    EtaRange {
        interval,
        sparsity_condition_holds: condition,
    }
}

/// Stage I output: which columns were declared active, plus the raw vote
/// counts for every column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportEstimate {
    /// Ascending indices of columns whose votes exceeded the threshold.
    pub indices: Vec<usize>,
    /// Deviating-row count for every column of the matrix.
    pub per_column_votes: Vec<usize>,
}

/// Count, per column, the rows whose measurement deviates from `|b_m|^2` by
/// more than `max(eps, guard)`, and keep the columns with more than `eta`
/// votes. `eps` is the bounded-noise level (zero in the other regimes; the
/// guard then only absorbs floating-point residue).
pub fn identify_support(
    y: &MeasurementVector,
    matrix: &SparseSensingMatrix,
    bias: &BiasVector,
    eta: f64,
    eps: f64,
) -> Result<SupportEstimate> {
    let m_rows = matrix.num_rows();
    if y.len() != m_rows || bias.len() != m_rows {
        return Err(Error::DimensionMismatch(format!(
            "y has {} rows, bias {}, matrix {}",
            y.len(),
            bias.len(),
            m_rows
        )));
    }
    let d = matrix
        .pattern()
        .uniform_weight()
        .ok_or_else(|| Error::InvalidParameter("pattern must have uniform column weight".into()))?;
    if !(0.0..(d as f64)).contains(&eta) {
        return Err(Error::InvalidParameter(format!(
            "eta = {eta} outside [0, {d})"
        )));
    }
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be nonnegative, got {eps}"
        )));
    }

    let deviates: Vec<bool> = (0..m_rows)
        .map(|m| {
            let baseline = bias.value(m).norm_sqr();
            let threshold = eps.max(EQUALITY_GUARD * baseline.max(1.0));
            (y.value(m) - baseline).abs() > threshold
        })
        .collect();

    let per_column_votes: Vec<usize> = (0..matrix.num_cols())
        .map(|n| {
            matrix
                .pattern()
                .support(n)
                .iter()
                .filter(|&&m| deviates[m])
                .count()
        })
        .collect();
    let indices = per_column_votes
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v as f64 > eta)
        .map(|(n, _)| n)
        .collect();
    Ok(SupportEstimate {
        indices,
        per_column_votes,
    })
}

/// Rows of one active column that no other estimated-active column touches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedSupport {
    pub column: usize,
    /// Ascending row indices kept for this column.
    pub rows: Vec<usize>,
}

/// Strip from column `n`'s support every row shared with another column of
/// the estimated support. With sparsity `k` and overlap cap `r`, at least
/// `d - (k - 1) r` rows survive.
pub fn reduced_support(
    pattern: &SparsityPattern,
    n: usize,
    support_indices: &[usize],
) -> Result<ReducedSupport> {
    if !support_indices.contains(&n) {
        return Err(Error::NotInSupport { column: n });
    }
    let mut shared = vec![false; pattern.num_rows()];
    for &other in support_indices {
        if other == n {
            continue;
        }
        for &m in pattern.support(other) {
            shared[m] = true;
        }
    }
    let rows = pattern
        .support(n)
        .iter()
        .copied()
        .filter(|&m| !shared[m])
        .collect();
    Ok(ReducedSupport { column: n, rows })
}

fn column_entry(matrix: &SparseSensingMatrix, m: usize, n: usize) -> Result<Complex64> {
    matrix.entry(m, n).ok_or_else(|| {
        Error::InvalidParameter(format!("row {m} is not in the support of column {n}"))
    })
}

/// Closed-form estimate of one entry from three isolated rows.
///
/// With references `u_j = b_{m_j} / phi_{m_j,n}` and centered measurements
/// `w_j = (y_{m_j} - |b_{m_j}|^2) / |phi_{m_j,n}|^2`, the entry is
///
/// ```text
/// s_n = -i / (2 Im((u1-u2) conj(u1-u3)))
///       * [ (u1-u2)(w1-w3) - (u1-u3)(w1-w2) ]
/// ```
///
/// which is exact on noise-free data whenever the three reference points are
/// not collinear. Triples whose collinearity term is below
/// [`TRIPLE_COLLINEARITY_TOL`] (relative to the edge lengths) are rejected.
pub fn recover_entry_closed_form(
    y: &MeasurementVector,
    matrix: &SparseSensingMatrix,
    bias: &BiasVector,
    n: usize,
    rows: [usize; 3],
) -> Result<Complex64> {
    let mut u = [Complex64::new(0.0, 0.0); 3];
    let mut w = [0.0f64; 3];
    for (j, &m) in rows.iter().enumerate() {
        let phi = column_entry(matrix, m, n)?;
        let b = bias.value(m);
        u[j] = b / phi;
        w[j] = (y.value(m) - b.norm_sqr()) / phi.norm_sqr();
    }
    let e12 = u[0] - u[1];
    let e13 = u[0] - u[2];
    let im = (e12 * e13.conj()).im;
    if im.abs() <= TRIPLE_COLLINEARITY_TOL * e12.norm() * e13.norm() {
        return Err(Error::CollinearTriple { column: n, rows });
    }
    let bracket = e12 * (w[0] - w[2]) - e13 * (w[0] - w[1]);
    Ok(Complex64::new(0.0, -1.0) / (2.0 * im) * bracket)
}

/// One row's geometric constraint on an entry: the entry lies on a circle
/// around `-b_m / phi_{m,n}` of radius `sqrt(max(y_m, 0)) / |phi_{m,n}|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
    pub source_row: usize,
}

impl Circle {
    pub fn from_measurement(
        y: &MeasurementVector,
        matrix: &SparseSensingMatrix,
        bias: &BiasVector,
        n: usize,
        m: usize,
    ) -> Result<Self> {
        let phi = column_entry(matrix, m, n)?;
        Ok(Circle {
            center: -bias.value(m) / phi,
            // Noise can push a measurement slightly negative; clamp so the
            // circle degenerates to its center instead of a NaN radius.
            radius: y.value(m).max(0.0).sqrt() / phi.norm(),
            source_row: m,
        })
    }

    /// Signed distance from a point to this circle's ring.
    pub fn ring_distance(&self, z: Complex64) -> f64 {
        (z - self.center).norm() - self.radius
    }
}

/// Intersection points of two circles: two, one (tangency within `tol`), or
/// none. Near-coincident centers (distance below `tol * max(radius, 1)`)
/// yield no points, matching how degenerate row pairs are skipped.
pub fn circle_intersection(a: &Circle, b: &Circle, tol: f64) -> Vec<Complex64> {
    let scale = a.radius.max(b.radius).max(1.0);
    let dvec = b.center - a.center;
    let dist = dvec.norm();
    if dist < tol * scale {
        return Vec::new();
    }
    let along = (dist * dist + a.radius * a.radius - b.radius * b.radius) / (2.0 * dist);
    let h2 = a.radius * a.radius - along * along;
    let t2 = tol * scale * scale;
    let axis = dvec / dist;
    let foot = a.center + axis * along;
    if h2 < -t2 {
        Vec::new()
    } else if h2 <= t2 {
        vec![foot]
    } else {
        let h = h2.sqrt();
        let off = Complex64::new(0.0, 1.0) * axis * h;
        vec![foot + off, foot - off]
    }
}

/// Outcome of the majority vote on one entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorityEntry {
    pub value: Complex64,
    /// Circles consistent with the winning candidate.
    pub votes: usize,
    /// Candidates proposed by the row pairs.
    pub candidates: usize,
    /// Sum of squared ring distances of the winner over all circles.
    pub ring_residual: f64,
}

/// Majority-vote estimate of one entry, robust to outlier rows.
///
/// The isolated rows are paired in ascending order (an odd leftover row is
/// dropped), every pair's circle intersections become candidates, and the
/// candidate that lies within `tol * max(radius, 1)` of the most circles
/// wins. Ties fall to the smallest sum of squared ring distances, then to
/// proposal order.
pub fn recover_entry_majority(
    y: &MeasurementVector,
    matrix: &SparseSensingMatrix,
    bias: &BiasVector,
    n: usize,
    reduced: &ReducedSupport,
    tol: f64,
) -> Result<MajorityEntry> {
    if reduced.column != n {
        return Err(Error::InvalidParameter(format!(
            "reduced support belongs to column {}, not {n}",
            reduced.column
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let circles: Vec<Circle> = reduced
        .rows
        .iter()
        .map(|&m| Circle::from_measurement(y, matrix, bias, n, m))
        .collect::<Result<_>>()?;

    let mut candidates = Vec::new();
    for pair in circles.chunks_exact(2) {
        candidates.extend(circle_intersection(&pair[0], &pair[1], tol));
    }
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates { column: n });
    }

    let mut best: Option<(usize, f64, Complex64)> = None;
    for &cand in &candidates {
        let mut votes = 0usize;
        let mut residual = 0.0f64;
        for c in &circles {
            let dev = c.ring_distance(cand);
            if dev.abs() <= tol * c.radius.max(1.0) {
                votes += 1;
            }
            residual += dev * dev;
        }
        let better = match best {
            None => true,
            Some((bv, br, _)) => votes > bv || (votes == bv && residual < br),
        };
        if better {
            best = Some((votes, residual, cand));
        }
    }
    let (votes, ring_residual, value) = best.expect("candidates is nonempty");
    Ok(MajorityEntry {
        value,
        votes,
        candidates: candidates.len(),
        ring_residual,
    })
}

/// Least-squares estimate of one entry under bounded noise.
///
/// Per isolated row, divide through by the matrix entry: with
/// `bt_m = b_m / phi_{m,n}` and `yt_m = y_m / |phi_{m,n}|^2 - |bt_m|^2`,
/// the model is linear in `(s_n, conj s_n)`. Centering both vectors by
/// their means removes the `|s_n|^2` term, and the normal equations of the
/// remaining 2-variable system collapse to
///
/// ```text
/// s_n = ( <bt0, conj bt0> <bt0, yt0>_H - ||bt0||^2 <bt0, yt0>_T )
///       / ( |<bt0, conj bt0>|^2 - ||bt0||^4 )
/// ```
///
/// where `<.,.>_H` conjugates the first argument, `<.,.>_T` conjugates
/// nothing, and `<bt0, conj bt0> = sum_j bt0_j^2`. The denominator is zero
/// exactly when the centered references are collinear; within
/// [`DEGENERACY_MARGIN`] of that the column is reported degenerate.
pub fn recover_entry_ls(
    y: &MeasurementVector,
    matrix: &SparseSensingMatrix,
    bias: &BiasVector,
    n: usize,
    reduced: &ReducedSupport,
) -> Result<Complex64> {
    if reduced.column != n {
        return Err(Error::InvalidParameter(format!(
            "reduced support belongs to column {}, not {n}",
            reduced.column
        )));
    }
    let rows = &reduced.rows;
    if rows.len() < 3 {
        return Err(Error::TooFewIsolatedRows {
            column: n,
            kept: rows.len(),
            needed: 3,
        });
    }
    let len = rows.len() as f64;
    let mut bt = Vec::with_capacity(rows.len());
    let mut yt = Vec::with_capacity(rows.len());
    for &m in rows {
        let phi = column_entry(matrix, m, n)?;
        let b = bias.value(m) / phi;
        bt.push(b);
        yt.push(y.value(m) / phi.norm_sqr() - b.norm_sqr());
    }
    let b_mean = bt.iter().sum::<Complex64>() / len;
    let y_mean = yt.iter().sum::<f64>() / len;

    let mut self_inner = Complex64::new(0.0, 0.0); // sum of centered bt^2
    let mut norm_sqr = 0.0f64;
    let mut herm = Complex64::new(0.0, 0.0); // <bt0, yt0> conjugating bt0
    let mut plain = Complex64::new(0.0, 0.0); // <bt0, yt0> without conjugation
    for (&b, &v) in bt.iter().zip(&yt) {
        let b0 = b - b_mean;
        let y0 = v - y_mean;
        self_inner += b0 * b0;
        norm_sqr += b0.norm_sqr();
        herm += b0.conj() * y0;
        plain += b0 * y0;
    }
    if norm_sqr == 0.0 || self_inner.norm() >= norm_sqr * (1.0 - DEGENERACY_MARGIN) {
        return Err(Error::DegenerateColumn { column: n });
    }
    let denominator = self_inner.norm_sqr() - norm_sqr * norm_sqr;
    Ok((self_inner * herm - plain * norm_sqr) / denominator)
}

/// How one entry of the estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryMethod {
    ClosedForm,
    Majority,
    LeastSquares,
}

impl std::fmt::Display for EntryMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EntryMethod::ClosedForm => "closed-form",
            EntryMethod::Majority => "majority",
            EntryMethod::LeastSquares => "least-squares",
        })
    }
}

/// Why an entry could not be estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryFailure {
    /// Fewer than three isolated rows survived the overlap removal.
    TooFewIsolatedRows { kept: usize },
    /// Every row triple had collinear references.
    NoNoncollinearTriple,
    /// Centered references too close to collinear for least squares.
    Degenerate,
}

impl std::fmt::Display for EntryFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EntryFailure::TooFewIsolatedRows { kept } => {
                write!(f, "too-few-isolated-rows({kept})")
            }
            EntryFailure::NoNoncollinearTriple => f.write_str("no-noncollinear-triple"),
            EntryFailure::Degenerate => f.write_str("degenerate-references"),
        }
    }
}

/// Per-entry disposition recorded by [`recover`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntryOutcome {
    Recovered,
    /// The majority vote produced no candidates; the least-squares value was
    /// used instead.
    FellBackToLs,
    Failed(EntryFailure),
}

impl std::fmt::Display for EntryOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EntryOutcome::Recovered => f.write_str("recovered"),
            EntryOutcome::FellBackToLs => f.write_str("fell-back-to-ls"),
            EntryOutcome::Failed(reason) => write!(f, "failed:{reason}"),
        }
    }
}

/// Diagnostics for one estimated-support column.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryReport {
    pub column: usize,
    pub method: EntryMethod,
    pub outcome: EntryOutcome,
    /// Isolated rows the estimate was computed from.
    pub isolated_rows: usize,
    /// l2 norm of `y_m - |phi_{m,n} s_n + b_m|^2` over the isolated rows
    /// (NaN when the entry failed).
    pub residual: f64,
    /// Candidate count of the majority vote (zero for other methods).
    pub candidates: usize,
}

/// Output of [`recover`]: the estimate, the stage-I support, and one report
/// row per estimated-support column. Entries that failed are recorded here
/// and leave no value in the estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryReport {
    pub estimate: SparseSignal,
    pub support: SupportEstimate,
    pub per_entry: Vec<EntryReport>,
}

impl RecoveryReport {
    /// True when every estimated-support entry produced a value.
    pub fn is_clean(&self) -> bool {
        self.per_entry
            .iter()
            .all(|e| !matches!(e.outcome, EntryOutcome::Failed(_)))
    }
}

/// Options for [`recover`]. `eps` is only read in the bounded regime; `tol`
/// drives the geometric tests of the majority vote.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoverOptions {
    pub regime: Regime,
    pub eta: f64,
    pub eps: f64,
    pub tol: f64,
}

impl RecoverOptions {
    pub fn new(regime: Regime, eta: f64) -> Self {
        Self {
            regime,
            eta,
            eps: 0.0,
            tol: DEFAULT_GEOMETRY_TOL,
        }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// Full two-stage recovery. Deterministic given its inputs: support comes
/// from vote counting, entries are estimated in ascending column order, and
/// every tie-break is fixed.
pub fn recover(
    y: &MeasurementVector,
    matrix: &SparseSensingMatrix,
    bias: &BiasVector,
    opts: &RecoverOptions,
) -> Result<RecoveryReport> {
    let stage1_eps = match opts.regime {
        Regime::Bounded => opts.eps,
        _ => 0.0,
    };
    let support = identify_support(y, matrix, bias, opts.eta, stage1_eps)?;

    let mut est_support = Vec::new();
    let mut est_values = Vec::new();
    let mut per_entry = Vec::with_capacity(support.indices.len());
    for &n in &support.indices {
        let reduced = reduced_support(matrix.pattern(), n, &support.indices)?;
        let isolated_rows = reduced.rows.len();
        let (method, worked) = estimate_entry(y, matrix, bias, n, &reduced, opts);
        let mut report = EntryReport {
            column: n,
            method,
            outcome: EntryOutcome::Recovered,
            isolated_rows,
            residual: f64::NAN,
            candidates: 0,
        };
        match worked {
            EntryResult::Value(value, candidates, fell_back) => {
                report.candidates = candidates;
                report.outcome = if fell_back {
                    EntryOutcome::FellBackToLs
                } else {
                    EntryOutcome::Recovered
                };
                report.residual = entry_residual(y, matrix, bias, n, &reduced, value);
                est_support.push(n);
                est_values.push(value);
            }
            EntryResult::Failed(failure) => {
                report.outcome = EntryOutcome::Failed(failure);
            }
        }
        per_entry.push(report);
    }
    let estimate =
        SparseSignal::from_parts_unchecked(matrix.num_cols(), est_support, est_values);
    Ok(RecoveryReport {
        estimate,
        support,
        per_entry,
    })
}

enum EntryResult {
    /// Value, candidate count (majority only), fell back to least squares.
    Value(Complex64, usize, bool),
    Failed(EntryFailure),
}

fn estimate_entry(
    y: &MeasurementVector,
    matrix: &SparseSensingMatrix,
    bias: &BiasVector,
    n: usize,
    reduced: &ReducedSupport,
    opts: &RecoverOptions,
) -> (EntryMethod, EntryResult) {
    if reduced.rows.len() < 3 {
        let method = match opts.regime {
            Regime::NoiseFree => EntryMethod::ClosedForm,
            Regime::Sparse => EntryMethod::Majority,
            Regime::Bounded => EntryMethod::LeastSquares,
        };
        return (
            method,
            EntryResult::Failed(EntryFailure::TooFewIsolatedRows {
                kept: reduced.rows.len(),
            }),
        );
    }
    match opts.regime {
        Regime::NoiseFree => {
            let rows = &reduced.rows;
            for i in 0..rows.len() {
                for j in i + 1..rows.len() {
                    for l in j + 1..rows.len() {
                        match recover_entry_closed_form(
                            y,
                            matrix,
                            bias,
                            n,
                            [rows[i], rows[j], rows[l]],
                        ) {
                            Ok(v) => {
                                return (EntryMethod::ClosedForm, EntryResult::Value(v, 0, false))
                            }
                            Err(Error::CollinearTriple { .. }) => continue,
                            Err(_) => {
                                return (
                                    EntryMethod::ClosedForm,
                                    EntryResult::Failed(EntryFailure::NoNoncollinearTriple),
                                )
                            }
                        }
                    }
                }
            }
            (
                EntryMethod::ClosedForm,
                EntryResult::Failed(EntryFailure::NoNoncollinearTriple),
            )
        }
        Regime::Sparse => match recover_entry_majority(y, matrix, bias, n, reduced, opts.tol) {
            Ok(entry) => (
                EntryMethod::Majority,
                EntryResult::Value(entry.value, entry.candidates, false),
            ),
            Err(Error::EmptyCandidates { .. }) => {
                match recover_entry_ls(y, matrix, bias, n, reduced) {
                    Ok(v) => (EntryMethod::Majority, EntryResult::Value(v, 0, true)),
                    Err(_) => (
                        EntryMethod::Majority,
                        EntryResult::Failed(EntryFailure::Degenerate),
                    ),
                }
            }
            Err(_) => (
                EntryMethod::Majority,
                EntryResult::Failed(EntryFailure::Degenerate),
            ),
        },
        Regime::Bounded => match recover_entry_ls(y, matrix, bias, n, reduced) {
            Ok(v) => (EntryMethod::LeastSquares, EntryResult::Value(v, 0, false)),
            Err(_) => (
                EntryMethod::LeastSquares,
                EntryResult::Failed(EntryFailure::Degenerate),
            ),
        },
    }
}

fn entry_residual(
    y: &MeasurementVector,
    matrix: &SparseSensingMatrix,
    bias: &BiasVector,
    n: usize,
    reduced: &ReducedSupport,
    value: Complex64,
) -> f64 {
    reduced
        .rows
        .iter()
        .map(|&m| {
            let phi = matrix.entry(m, n).expect("row from this column's support");
            let predicted = (phi * value + bias.value(m)).norm_sqr();
            let dev = y.value(m) - predicted;
            dev * dev
        })
        .sum::<f64>()
        .sqrt()
}
