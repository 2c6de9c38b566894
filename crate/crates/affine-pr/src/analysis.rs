//! Error metrics, recovery-error bounds, and the geometry behind them.
//!
//! The least-squares entry error is controlled by how the centered,
//! entry-normalized bias values `bt0_j = b_{m_j}/phi_{m_j,n} - mean` spread
//! in the plane. Two scalars of that point set do all the work:
//!
//! * `||bt0||`, the overall spread, and
//! * `ip = |sum_j bt0_j^2| / ||bt0||^2`, a collinearity ratio in `[0, 1]`
//!   (0 for a perfectly balanced spread, 1 for points on a line).
//!
//! The per-column amplification is `factor = sqrt(L) / (||bt0|| (1 - ip))`
//! ([`CenteredBias::factor`]), the worst column over the support gives the
//! overall bound `sqrt(k) * factor * eps` ([`error_bound`]), and no bias of
//! moduli at most `b_max` through entries of moduli at least `phi_min` can
//! push the factor below `phi_min / b_max` ([`error_bound`], `lower_bound`).
//!
//! The collinearity ratio has an exact geometric twin: `1 - 2 r* / ||bt0||^2`
//! where `r*` is the summed squared distance of the points to their best-fit
//! line ([`verify_collinearity_identity`]). The line fit is computed by an
//! independent route (eigen-decomposition of the real 2x2 scatter matrix,
//! [`line_fit_residual`]) so the identity is a genuine cross-check, not a
//! reformulation.
//!
//! Metrics: [`relative_error`] compares signals as-is; since the bias makes
//! the model phase-identifiable, plain relative error is the headline
//! number, and [`ar_relative_error`] (best global rotation) is reported
//! alongside to show nothing is lost by not quotienting out a phase.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{
    apply_noise_from, generate_signal_on_support_from, measure, NoiseSpec, SignalDist, SparseSignal,
};
use crate::recovery::{eta_range, recover, reduced_support, RecoverOptions, ReducedSupport, Regime};
use crate::rng;
use crate::sensing::{BiasVector, SparseSensingMatrix};

/// Centered, entry-normalized bias values of one column over its isolated
/// rows, plus the two scalars the error analysis needs.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredBias {
    pub column: usize,
    /// `b_m / phi_{m,n} - mean`, aligned with the isolated rows.
    pub values: Vec<Complex64>,
    /// Mean of the uncentered `b_m / phi_{m,n}`.
    pub mean: Complex64,
    /// `||bt0||`, the l2 norm of `values`.
    pub norm: f64,
    /// `sum_j bt0_j^2` (no conjugation).
    pub self_inner: Complex64,
}

impl CenteredBias {
    /// Collinearity ratio `|sum bt0^2| / ||bt0||^2` in `[0, 1]`.
    pub fn collinearity(&self) -> f64 {
        let n2 = self.norm * self.norm;
        if n2 == 0.0 {
            1.0
        } else {
            self.self_inner.norm() / n2
        }
    }

    /// Error amplification `sqrt(L) / (||bt0|| (1 - ip))` of the
    /// least-squares entry estimate; infinite when the references are
    /// collinear to within [`crate::recovery::DEGENERACY_MARGIN`].
    pub fn factor(&self) -> f64 {
        let l = self.values.len() as f64;
        let slack = 1.0 - self.collinearity();
        if self.norm == 0.0 || slack < crate::recovery::DEGENERACY_MARGIN {
            f64::INFINITY
        } else {
            l.sqrt() / (self.norm * slack)
        }
    }
}

/// Compute the centered reference geometry of column `n` over the given
/// isolated rows.
pub fn centered_bias(
    matrix: &SparseSensingMatrix,
    bias: &BiasVector,
    n: usize,
    reduced: &ReducedSupport,
) -> Result<CenteredBias> {
    if reduced.column != n {
        return Err(Error::InvalidParameter(format!(
            "reduced support belongs to column {}, not {n}",
            reduced.column
        )));
    }
    let mut bt = Vec::with_capacity(reduced.rows.len());
    for &m in &reduced.rows {
        let phi = matrix.entry(m, n).ok_or_else(|| {
            Error::InvalidParameter(format!("row {m} is not in the support of column {n}"))
        })?;
        bt.push(bias.value(m) / phi);
    }
    if bt.is_empty() {
        return Err(Error::TooFewIsolatedRows {
            column: n,
            kept: 0,
            needed: 1,
        });
    }
    let mean = bt.iter().sum::<Complex64>() / bt.len() as f64;
    let values: Vec<Complex64> = bt.iter().map(|&b| b - mean).collect();
    let norm = values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let self_inner = values.iter().map(|&v| v * v).sum();
    Ok(CenteredBias {
        column: n,
        values,
        mean,
        norm,
        self_inner,
    })
}

fn diff_norm(a: &SparseSignal, b: &SparseSignal, rotation: Complex64) -> f64 {
    let (sa, va) = (a.support(), a.values());
    let (sb, vb) = (b.support(), b.values());
    let (mut i, mut j) = (0usize, 0usize);
    let mut acc = 0.0f64;
    while i < sa.len() || j < sb.len() {
        let d = match (sa.get(i), sb.get(j)) {
            (Some(&na), Some(&nb)) if na == nb => {
                let d = va[i] * rotation - vb[j];
                i += 1;
                j += 1;
                d
            }
            (Some(&na), Some(&nb)) if na < nb => {
                let d = va[i] * rotation;
                i += 1;
                d
            }
            (Some(_), Some(_)) => {
                let d = -vb[j];
                j += 1;
                d
            }
            (Some(_), None) => {
                let d = va[i] * rotation;
                i += 1;
                d
            }
            (None, Some(_)) => {
                let d = -vb[j];
                j += 1;
                d
            }
            (None, None) => unreachable!(),
        };
        acc += d.norm_sqr();
    }
    acc.sqrt()
}

/// `||estimate - truth|| / ||truth||`. Errors on a zero reference signal.
pub fn relative_error(estimate: &SparseSignal, truth: &SparseSignal) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::DimensionMismatch(format!(
            "estimate length {} vs truth length {}",
            estimate.len(),
            truth.len()
        )));
    }
    let scale = truth.norm();
    if scale == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok(diff_norm(estimate, truth, Complex64::new(1.0, 0.0)) / scale)
}

/// The rotation angle minimizing `||estimate e^{i w} - truth||`, namely
/// `-arg(sum_n estimate_n conj(truth_n))` (0 when the overlap is empty).
pub fn optimal_rotation(estimate: &SparseSignal, truth: &SparseSignal) -> f64 {
    let (sa, va) = (estimate.support(), estimate.values());
    let (sb, vb) = (truth.support(), truth.values());
    let (mut i, mut j) = (0usize, 0usize);
    let mut overlap = Complex64::new(0.0, 0.0);
    while i < sa.len() && j < sb.len() {
        if sa[i] == sb[j] {
            overlap += va[i] * vb[j].conj();
            i += 1;
            j += 1;
        } else if sa[i] < sb[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    if overlap.norm_sqr() == 0.0 {
        0.0
    } else {
        -overlap.arg()
    }
}

/// Ambiguity-removed relative error: the relative error after the best
/// global rotation of the estimate. Computed by explicit rotation (the
/// closed-form norm cancels catastrophically near zero error) and never
/// above [`relative_error`], since no rotation is always feasible.
pub fn ar_relative_error(estimate: &SparseSignal, truth: &SparseSignal) -> Result<f64> {
    let plain = relative_error(estimate, truth)?;
    let omega = optimal_rotation(estimate, truth);
    let rotation = Complex64::from_polar(1.0, omega);
    let rotated = diff_norm(estimate, truth, rotation) / truth.norm();
    Ok(rotated.min(plain))
}

/// A rotated copy of a signal: every value times `e^{i omega}`.
pub fn rotated(signal: &SparseSignal, omega: f64) -> SparseSignal {
    let rotation = Complex64::from_polar(1.0, omega);
    SparseSignal::from_parts_unchecked(
        signal.len(),
        signal.support().to_vec(),
        signal.values().iter().map(|&v| v * rotation).collect(),
    )
}

/// The recovery-error bound for a known support under bounded noise.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// Support column with the largest amplification factor (smallest index
    /// on ties).
    pub n_star: usize,
    /// `sqrt(k) * factor(n_star) * eps`: the l2 error bound.
    pub bound_value: f64,
    /// `(column, factor)` for every support column.
    pub per_column_factor: Vec<(usize, f64)>,
    /// `phi_min / b_max`: no column's factor can be below this.
    pub lower_bound: f64,
    /// `factor(n_star) / lower_bound - 1 >= 0`: how far the realized worst
    /// factor sits above the best any bias could achieve.
    pub delta_t: f64,
}

/// Compute the per-column amplification factors over the support's isolated
/// rows, the resulting l2 bound `sqrt(k) * max factor * eps`, and the
/// bias-optimality gap `delta_t`.
pub fn error_bound(
    matrix: &SparseSensingMatrix,
    bias: &BiasVector,
    support: &[usize],
    eps: f64,
) -> Result<BoundReport> {
    if support.is_empty() {
        return Err(Error::InvalidParameter(
            "error bound needs a nonempty support".into(),
        ));
    }
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be nonnegative, got {eps}"
        )));
    }
    let mut per_column_factor = Vec::with_capacity(support.len());
    for &n in support {
        let reduced = reduced_support(matrix.pattern(), n, support)?;
        let factor = if reduced.rows.is_empty() {
            f64::INFINITY
        } else {
            centered_bias(matrix, bias, n, &reduced)?.factor()
        };
        per_column_factor.push((n, factor));
    }
    let (n_star, worst) = per_column_factor
        .iter()
        .copied()
        .max_by(|a, b| {
            a.1.partial_cmp(&b.1)
                .expect("factors are never NaN")
                // On equal factors keep the earlier (smaller) column.
                .then(b.0.cmp(&a.0))
        })
        .expect("support is nonempty");
    let k = support.len() as f64;
    let phi_min = matrix.min_modulus();
    let b_max = bias.max_modulus();
    let lower_bound = if b_max > 0.0 { phi_min / b_max } else { f64::INFINITY };
    let delta_t = if lower_bound > 0.0 && lower_bound.is_finite() {
        (worst / lower_bound - 1.0).max(0.0)
    } else {
        f64::INFINITY
    };
    Ok(BoundReport {
        n_star,
        bound_value: k.sqrt() * worst * eps,
        per_column_factor,
        lower_bound,
        delta_t,
    })
}

/// The bound an optimally chosen bias would give: `sqrt(k) eps / (b_max
/// phi_min)`. With `b_max = phi_min = sqrt(2)`, `k = 1`, `eps = 0.1` this
/// is 0.05.
pub fn optimal_bound(k: usize, phi_min: f64, b_max: f64, eps: f64) -> f64 {
    (k as f64).sqrt() * eps / (b_max * phi_min)
}

/// Best-fit line of a planar point set, by the top eigenvector of the
/// centered 2x2 scatter matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    /// Unit direction of the line.
    pub direction: [f64; 2],
    /// A point on the line (the centroid).
    pub anchor: [f64; 2],
    /// Sum of squared distances of the points to the line.
    pub residual: f64,
}

/// Fit a line through at least two points, minimizing the summed squared
/// orthogonal distances. The residual is the smaller eigenvalue of the
/// scatter matrix; the direction is the larger one's eigenvector.
pub fn line_fit_residual(points: &[[f64; 2]]) -> Result<LineFit> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "line fit needs at least two points, got {}",
            points.len()
        )));
    }
    let len = points.len() as f64;
    let cx = points.iter().map(|p| p[0]).sum::<f64>() / len;
    let cy = points.iter().map(|p| p[1]).sum::<f64>() / len;
    let (mut a, mut b, mut c) = (0.0f64, 0.0f64, 0.0f64);
    for p in points {
        let x = p[0] - cx;
        let y = p[1] - cy;
        a += x * x;
        b += x * y;
        c += y * y;
    }
    let half_gap = 0.5 * (a - c);
    let spread = (half_gap * half_gap + b * b).sqrt();
    let lambda_max = 0.5 * (a + c) + spread;
    let residual = (a + c - lambda_max).max(0.0);
    let direction = if b != 0.0 {
        let v = [b, lambda_max - a];
        let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
        [v[0] / norm, v[1] / norm]
    } else if a >= c {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    };
    Ok(LineFit {
        direction,
        anchor: [cx, cy],
        residual,
    })
}

/// Result of checking the collinearity identity on one column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub column: usize,
    /// `|sum bt0^2| / ||bt0||^2`, straight from the complex sums.
    pub lhs: f64,
    /// `1 - 2 r* / ||bt0||^2`, with `r*` from the planar line fit.
    pub rhs: f64,
    pub gap: f64,
}

/// Check, on one column's circle centers `-b_m / phi_{m,n}`, that the
/// algebraic collinearity ratio equals its geometric form built from the
/// best-fit-line residual. The two sides are computed by disjoint routes
/// (complex sums vs a real 2x2 eigen-decomposition), so agreement is
/// evidence both are right.
pub fn verify_collinearity_identity(
    matrix: &SparseSensingMatrix,
    bias: &BiasVector,
    n: usize,
    reduced: &ReducedSupport,
) -> Result<IdentityCheck> {
    let cb = centered_bias(matrix, bias, n, reduced)?;
    if cb.values.len() < 2 {
        return Err(Error::TooFewIsolatedRows {
            column: n,
            kept: cb.values.len(),
            needed: 2,
        });
    }
    let lhs = cb.collinearity();
    // Circle centers are the negated references; centering makes the sign
    // irrelevant for the fit, so feed the centers as the geometry sees them.
    let points: Vec<[f64; 2]> = reduced
        .rows
        .iter()
        .map(|&m| {
            let c = -bias.value(m) / matrix.entry(m, n).expect("row in column support");
            [c.re, c.im]
        })
        .collect();
    let fit = line_fit_residual(&points)?;
    let n2 = cb.norm * cb.norm;
    if n2 == 0.0 {
        return Err(Error::ZeroReference);
    }
    let rhs = 1.0 - 2.0 * fit.residual / n2;
    Ok(IdentityCheck {
        column: n,
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    })
}

/// Worst-case growth of the error bound when the bias moduli wobble.
///
/// For biases with moduli in `[rho (1 - t'), rho (1 + t')]`, `t' <= t`,
/// around reference ratio `rho = b_c / phi_c`, the bound degrades by at
/// most a factor `1 + delta(t)` with
///
/// ```text
/// delta(t) = (4 (t + 1) / rho^2) / (1 - 4 (t^2 + t) / rho^2) * t
/// ```
///
/// valid for `0 <= t <= t_max = (-1 + sqrt(1 + rho^2)) / 2` (beyond which
/// the guarantee is vacuous; a nonpositive denominator reports infinity).
pub fn near_optimality_factor(rho: f64, t: f64) -> Result<f64> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "rho must be positive and finite, got {rho}"
        )));
    }
    let t_max = 0.5 * (-1.0 + (1.0 + rho * rho).sqrt());
    if !(0.0..=t_max).contains(&t) {
        return Err(Error::OutsideAdmissibleRange { t, t_max, rho });
    }
    let rho2 = rho * rho;
    let denominator = 1.0 - 4.0 * (t * t + t) / rho2;
    if denominator <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((4.0 * (t + 1.0) / rho2) / denominator * t)
}

/// How spread-out reference sets concentrate as they grow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationRow {
    /// Points per set.
    pub size: usize,
    /// 95th percentile of `|rho * factor - 1|` over the trials; should
    /// shrink as the size grows (the factor concentrates at `1 / rho`).
    pub p95: f64,
}

/// Sample `trials` reference sets of each size (i.i.d. uniform phases at
/// modulus `rho`), compute each set's amplification factor, and report the
/// 95th percentile of the normalized deviation `|rho * factor - 1|`.
pub fn reference_concentration(
    rho: f64,
    sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<ConcentrationRow>> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "rho must be positive and finite, got {rho}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for (si, &size) in sizes.iter().enumerate() {
        if size < 2 {
            return Err(Error::InvalidParameter(format!(
                "reference sets need at least two points, got {size}"
            )));
        }
        let mut deviations: Vec<f64> = (0..trials)
            .map(|t| {
                let mut rng =
                    rng::trial_stream(seed, (si * trials + t) as u64, rng::purpose::BIAS);
                let points: Vec<Complex64> =
                    (0..size).map(|_| rng::circle_point(&mut rng, rho)).collect();
                let mean = points.iter().sum::<Complex64>() / size as f64;
                let centered: Vec<Complex64> = points.iter().map(|&p| p - mean).collect();
                let norm_sqr: f64 = centered.iter().map(|v| v.norm_sqr()).sum();
                let self_inner: Complex64 = centered.iter().map(|&v| v * v).sum();
                let slack = 1.0 - self_inner.norm() / norm_sqr;
                let factor = (size as f64).sqrt() / (norm_sqr.sqrt() * slack);
                (rho * factor - 1.0).abs()
            })
            .collect();
        deviations.sort_by(|a, b| a.partial_cmp(b).expect("deviations are finite"));
        let idx = ((0.95 * trials as f64).ceil() as usize).clamp(1, trials) - 1;
        rows.push(ConcentrationRow {
            size,
            p95: deviations[idx],
        });
    }
    Ok(rows)
}

/// Which numerical guarantee to exercise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoryCheck {
    /// Algebraic vs geometric collinearity ratio, per support column.
    CollinearityIdentity,
    /// Realized recovery error vs the computed bound, per trial.
    ErrorBound,
    /// Per-column factor vs the universal `phi_min / b_max` floor.
    FactorLowerBound,
    /// Concentration of the factor for growing reference sets.
    Concentration,
}

impl TheoryCheck {
    pub fn name(self) -> &'static str {
        match self {
            TheoryCheck::CollinearityIdentity => "collinearity-identity",
            TheoryCheck::ErrorBound => "error-bound",
            TheoryCheck::FactorLowerBound => "factor-lower-bound",
            TheoryCheck::Concentration => "concentration",
        }
    }
}

impl std::str::FromStr for TheoryCheck {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "collinearity-identity" => Ok(TheoryCheck::CollinearityIdentity),
            "error-bound" => Ok(TheoryCheck::ErrorBound),
            "factor-lower-bound" => Ok(TheoryCheck::FactorLowerBound),
            "concentration" => Ok(TheoryCheck::Concentration),
            other => Err(Error::InvalidParameter(format!(
                "unknown theory check '{other}'"
            ))),
        }
    }
}

/// One verdict row of [`run_theory_checks`].
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryCheckRow {
    pub check: &'static str,
    /// What the row talks about: a column, a trial, or a set size.
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub pass: bool,
}

/// Tolerance for the exact identity checks (they agree to floating-point
/// roundoff; anything past this is a real disagreement).
pub const IDENTITY_GAP_TOL: f64 = 1e-9;

/// Settings for [`run_theory_checks`] beyond the instance itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryCheckOptions {
    /// Monte-Carlo trials for the stochastic checks.
    pub trials: usize,
    /// Master seed for everything random.
    pub seed: u64,
    /// Bounded-noise level for the error-bound check.
    pub eps: f64,
    /// Modulus of the trial signals' entries.
    pub signal_radius: f64,
}

impl Default for TheoryCheckOptions {
    fn default() -> Self {
        Self {
            trials: 100,
            seed: 0,
            eps: 1e-3,
            signal_radius: 3.0,
        }
    }
}

/// Exercise the requested guarantees on one instance (a matrix, a bias, and
/// a true support) and return one row per sub-check. `lhs <= rhs` (or
/// `gap <= tol` for the identities) is what "pass" means; failed rows stay
/// in the output so the caller sees what went wrong where.
pub fn run_theory_checks(
    matrix: &SparseSensingMatrix,
    bias: &BiasVector,
    support: &[usize],
    checks: &[TheoryCheck],
    opts: &TheoryCheckOptions,
) -> Result<Vec<TheoryCheckRow>> {
    let mut rows = Vec::new();
    for &check in checks {
        match check {
            TheoryCheck::CollinearityIdentity => {
                for &n in support {
                    let reduced = reduced_support(matrix.pattern(), n, support)?;
                    let id = verify_collinearity_identity(matrix, bias, n, &reduced)?;
                    rows.push(TheoryCheckRow {
                        check: check.name(),
                        instance: format!("column-{n}"),
                        lhs: id.lhs,
                        rhs: id.rhs,
                        gap: id.gap,
                        pass: id.gap < IDENTITY_GAP_TOL,
                    });
                }
            }
            TheoryCheck::ErrorBound => {
                rows.extend(error_bound_trials(matrix, bias, support, opts)?);
            }
            TheoryCheck::FactorLowerBound => {
                let report = error_bound(matrix, bias, support, opts.eps)?;
                for (n, factor) in report.per_column_factor {
                    let lower = report.lower_bound;
                    rows.push(TheoryCheckRow {
                        check: check.name(),
                        instance: format!("column-{n}"),
                        lhs: lower,
                        rhs: factor,
                        gap: factor - lower,
                        pass: factor >= lower * (1.0 - 1e-12),
                    });
                }
            }
            TheoryCheck::Concentration => {
                let rho = reference_modulus_ratio(matrix, bias);
                let sizes = [8usize, 16, 32, 64];
                let conc = reference_concentration(rho, &sizes, opts.trials, opts.seed)?;
                let mut previous = f64::INFINITY;
                for row in conc {
                    rows.push(TheoryCheckRow {
                        check: check.name(),
                        instance: format!("set-size-{}", row.size),
                        lhs: row.p95,
                        rhs: previous,
                        gap: previous - row.p95,
                        pass: row.p95 <= previous * (1.0 + 1e-9),
                    });
                    previous = row.p95;
                }
            }
        }
    }
    Ok(rows)
}

fn reference_modulus_ratio(matrix: &SparseSensingMatrix, bias: &BiasVector) -> f64 {
    let phi = matrix
        .magnitude_class()
        .unwrap_or_else(|| matrix.min_modulus());
    let b = bias.magnitude_class().unwrap_or_else(|| bias.max_modulus());
    b / phi
}

fn error_bound_trials(
    matrix: &SparseSensingMatrix,
    bias: &BiasVector,
    support: &[usize],
    opts: &TheoryCheckOptions,
) -> Result<Vec<TheoryCheckRow>> {
    if support.is_empty() {
        return Err(Error::InvalidParameter(
            "error bound needs a nonempty support".into(),
        ));
    }
    let d = matrix
        .pattern()
        .uniform_weight()
        .ok_or_else(|| Error::InvalidParameter("pattern must have uniform column weight".into()))?;
    let r = overlap_cap(matrix);
    let range = eta_range(Regime::Bounded, d, r, support.len(), 0);
    let eta = range.midpoint().unwrap_or((d - 1) as f64);
    let bound = error_bound(matrix, bias, support, opts.eps)?;
    let dist = SignalDist::Circle {
        radius: opts.signal_radius,
    };
    let mut rows = Vec::with_capacity(opts.trials);
    for t in 0..opts.trials {
        let mut signal_rng = rng::trial_stream(opts.seed, t as u64, rng::purpose::SIGNAL);
        let signal =
            generate_signal_on_support_from(&mut signal_rng, matrix.num_cols(), support, dist)?;
        let clean = measure(matrix, bias, &signal)?;
        let mut noise_rng = rng::trial_stream(opts.seed, t as u64, rng::purpose::NOISE);
        let y = apply_noise_from(&mut noise_rng, &clean, NoiseSpec::Bounded { eps: opts.eps })?;
        let report = recover(
            &y,
            matrix,
            bias,
            &RecoverOptions::new(Regime::Bounded, eta).with_eps(opts.eps),
        )?;
        if report.estimate.support() != support {
            rows.push(TheoryCheckRow {
                check: "error-bound",
                instance: format!("trial-{t}-support-miss"),
                lhs: f64::INFINITY,
                rhs: bound.bound_value,
                gap: f64::NEG_INFINITY,
                pass: false,
            });
            continue;
        }
        let err: f64 = report
            .estimate
            .values()
            .iter()
            .zip(signal.values())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        rows.push(TheoryCheckRow {
            check: "error-bound",
            instance: format!("trial-{t}"),
            lhs: err,
            rhs: bound.bound_value,
            gap: bound.bound_value - err,
            pass: err <= bound.bound_value,
        });
    }
    Ok(rows)
}

/// Largest pairwise support overlap among columns that share any row with a
/// support column; the pattern-wide cap is what the threshold theory uses,
/// and scanning all pairs is quadratic, so measure it over the whole
/// pattern only when it is small, otherwise fall back to the worst case
/// `d - 1`... in practice patterns built in this crate know their overlap
/// from construction, and this helper just recomputes it for hand-built
/// ones.
fn overlap_cap(matrix: &SparseSensingMatrix) -> usize {
    let pattern = matrix.pattern();
    let n = pattern.num_cols();
    if n > 512 {
        // A power-pattern's overlap equals degree - 1; recover it from the
        // row/weight structure: d = p, rows >= p^2 => degree = log_p(cols).
        if let Some(d) = pattern.uniform_weight() {
            if d > 1 {
                let mut degree = 1usize;
                let mut reach = d as u128;
                while reach < n as u128 {
                    reach *= d as u128;
                    degree += 1;
                }
                return degree.saturating_sub(1).max(1);
            }
        }
        return 1;
    }
    let mut worst = 0usize;
    for a in 0..n {
        for b in a + 1..n {
            let (mut i, mut j, mut overlap) = (0usize, 0usize, 0usize);
            let (sa, sb) = (pattern.support(a), pattern.support(b));
            while i < sa.len() && j < sb.len() {
                if sa[i] == sb[j] {
                    overlap += 1;
                    i += 1;
                    j += 1;
                } else if sa[i] < sb[j] {
                    i += 1;
                } else {
                    j += 1;
                }
            }
            worst = worst.max(overlap);
        }
    }
    worst.max(1)
}
