//! Seeded Monte-Carlo sweeps over problem sizes, sparsities, and noise.
//!
//! A sweep is described by one [`ExperimentConfig`]: a list of matrix
//! shapes, a list of sparsities, and one noise regime with its swept
//! parameter lists. The cartesian product of those lists gives the sweep
//! points; every point runs the same number of trials.
//!
//! Each trial is seeded by its global index through
//! [`crate::rng::trial_stream`], drawing its own matrix filling, bias,
//! signal, and noise. Trials therefore decouple completely from scheduling,
//! and the emitted records are byte-identical at any thread count (only the
//! `runtime_seconds` column, a wall-clock measurement, escapes that
//! contract).

use rand::RngExt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{ar_relative_error, error_bound, relative_error, rotated};
use crate::error::{Error, Result};
use crate::model::{
    apply_noise_from, generate_signal_from, measure, NoiseSpec, SignalDist, SparseSignal,
};
use crate::recovery::{eta_range, recover, RecoverOptions, Regime};
use crate::rng;
use crate::sensing::{
    devore_pattern, random_bias_from, randomize_entries_from, zero_pad, SparsityPattern,
};

/// Ambiguity-removed error below this counts a trial as a success.
pub const SUCCESS_THRESHOLD: f64 = 1e-5;

/// One matrix shape in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixConfig {
    /// Prime row parameter; the pattern has `p^2` rows before padding.
    pub p: u64,
    /// Polynomial degree bound; pairwise column overlap is `degree - 1`.
    pub degree: usize,
    /// Pad with empty rows up to this count (must be at least `p^2`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pad_rows: Option<usize>,
    /// Modulus of every matrix entry.
    pub phi_c: f64,
}

/// Signal side of a sweep: length, sparsity list, and value distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalConfig {
    pub n: usize,
    /// Sparsities to sweep.
    pub k: Vec<usize>,
    pub dist: DistConfig,
}

/// Serializable form of [`SignalDist`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DistConfig {
    ComplexGaussian { variance: f64 },
    Circle { radius: f64 },
}

impl From<DistConfig> for SignalDist {
    fn from(c: DistConfig) -> Self {
        match c {
            DistConfig::ComplexGaussian { variance } => SignalDist::ComplexGaussian { variance },
            DistConfig::Circle { radius } => SignalDist::Circle { radius },
        }
    }
}

/// Noise regime plus the parameter lists swept within it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NoiseConfig {
    /// Clean measurements.
    None,
    /// Outliers: sweep the outlier count and the outlier-to-signal power
    /// ratio in dB (`sigma_v^2 = 10^(db/10) * E|s_n|^2`).
    Sparse {
        kv: Vec<usize>,
        sigma_ratio_db: Vec<f64>,
    },
    /// Entrywise bounded noise: sweep either explicit levels or SNR points
    /// (exactly one list may be nonempty). SNR converts by the closed form
    /// `E||s||^2 / E||v||^2 = 3 K E|s_n|^2 / (M eps^2)`.
    Bounded {
        #[serde(default)]
        eps: Vec<f64>,
        #[serde(default)]
        snr_db: Vec<f64>,
    },
}

/// How the vote threshold is chosen at each sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EtaPolicy {
    /// Midpoint of the regime's guaranteed interval; falls back to `d - 1`
    /// (with a warning) when the interval is empty.
    TheoremMidpoint,
    /// The largest usable threshold, `d - 1`.
    #[serde(rename = "d-minus-1")]
    DMinusOne,
    /// A fixed value.
    Explicit { value: f64 },
}

/// Full description of one sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub matrix: Vec<MatrixConfig>,
    /// Modulus of every bias entry.
    pub bias_c: f64,
    pub signal: SignalConfig,
    pub noise: NoiseConfig,
    pub eta: EtaPolicy,
    /// Trials per sweep point.
    pub trials: usize,
    pub master_seed: u64,
}

/// One trial's outcome. Every float column is written with 12 significant
/// digits; `runtime_seconds` is wall-clock and excluded from determinism.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub point_id: usize,
    /// Global trial index (`point_id * trials + trial`), which also seeds
    /// the trial's random streams.
    pub trial_id: usize,
    pub p: u64,
    pub m_rows: usize,
    pub n_cols: usize,
    pub k: usize,
    pub kv: Option<usize>,
    pub sigma_ratio_db: Option<f64>,
    pub snr_db: Option<f64>,
    pub eps: Option<f64>,
    pub eta: f64,
    /// Stage I returned exactly the true support.
    pub support_exact: bool,
    /// Plain relative error.
    pub re: f64,
    /// Best-rotation relative error; never above `re`.
    pub ar_re: f64,
    /// The computed error bound (bounded regime only).
    pub bound_value: Option<f64>,
    pub runtime_seconds: f64,
}

/// Aggregates of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRecord {
    pub point_id: usize,
    pub p: u64,
    pub m_rows: usize,
    pub n_cols: usize,
    pub k: usize,
    pub kv: Option<usize>,
    pub sigma_ratio_db: Option<f64>,
    pub snr_db: Option<f64>,
    pub eps: Option<f64>,
    pub eta: f64,
    pub trials: usize,
    pub mean_re: f64,
    pub std_re: f64,
    pub mean_ar_re: f64,
    pub std_ar_re: f64,
    pub max_re: f64,
    /// Fraction of trials with `ar_re <` [`SUCCESS_THRESHOLD`].
    pub success_rate: f64,
    pub support_exact_rate: f64,
}

/// Everything a sweep produces.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<SummaryRecord>,
    /// Human-readable notes (threshold fallbacks and the like).
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum NoisePoint {
    None,
    Sparse { kv: usize, sigma_ratio_db: f64 },
    Bounded { eps: f64, snr_db: Option<f64> },
}

impl NoisePoint {
    fn regime(self) -> Regime {
        match self {
            NoisePoint::None => Regime::NoiseFree,
            NoisePoint::Sparse { .. } => Regime::Sparse,
            NoisePoint::Bounded { .. } => Regime::Bounded,
        }
    }
}

#[derive(Debug, Clone)]
struct SweepPoint {
    point_id: usize,
    matrix_index: usize,
    k: usize,
    noise: NoisePoint,
    eta: f64,
}

/// Convert an SNR point (dB) to the bounded-noise level for `k`-sparse
/// signals with per-entry mean square `ms` and `m` measurements:
/// `eps = sqrt(3 k ms / (m * 10^(snr/10)))`. For the modulus-5 circle
/// distribution this is the `75 K / (M eps^2)` form.
pub fn snr_db_to_eps(snr_db: f64, k: usize, m_rows: usize, mean_square: f64) -> f64 {
    (3.0 * k as f64 * mean_square / (m_rows as f64 * 10f64.powf(snr_db / 10.0))).sqrt()
}

fn build_patterns(config: &ExperimentConfig) -> Result<Vec<SparsityPattern>> {
    config
        .matrix
        .iter()
        .map(|mc| {
            let base = devore_pattern(mc.p, mc.degree, config.signal.n)?;
            match mc.pad_rows {
                Some(target) => zero_pad(&base, target),
                None => Ok(base),
            }
        })
        .collect()
}

fn enumerate_points(
    config: &ExperimentConfig,
    patterns: &[SparsityPattern],
    warnings: &mut Vec<String>,
) -> Result<Vec<SweepPoint>> {
    if config.matrix.is_empty() {
        return Err(Error::EmptySweep("no matrix configurations".into()));
    }
    if config.signal.k.is_empty() {
        return Err(Error::EmptySweep("no sparsity levels".into()));
    }
    if config.trials == 0 {
        return Err(Error::EmptySweep("zero trials per point".into()));
    }
    let dist: SignalDist = config.signal.dist.into();

    let noise_points = |m_rows: usize, k: usize| -> Result<Vec<NoisePoint>> {
        match &config.noise {
            NoiseConfig::None => Ok(vec![NoisePoint::None]),
            NoiseConfig::Sparse { kv, sigma_ratio_db } => {
                if kv.is_empty() || sigma_ratio_db.is_empty() {
                    return Err(Error::EmptySweep(
                        "sparse noise needs nonempty kv and sigma_ratio_db lists".into(),
                    ));
                }
                Ok(kv
                    .iter()
                    .flat_map(|&kv| {
                        sigma_ratio_db
                            .iter()
                            .map(move |&db| NoisePoint::Sparse {
                                kv,
                                sigma_ratio_db: db,
                            })
                    })
                    .collect())
            }
            NoiseConfig::Bounded { eps, snr_db } => match (eps.is_empty(), snr_db.is_empty()) {
                (false, true) => Ok(eps
                    .iter()
                    .map(|&eps| NoisePoint::Bounded { eps, snr_db: None })
                    .collect()),
                (true, false) => Ok(snr_db
                    .iter()
                    .map(|&db| NoisePoint::Bounded {
                        eps: snr_db_to_eps(db, k, m_rows, dist.mean_square()),
                        snr_db: Some(db),
                    })
                    .collect()),
                (true, true) => Err(Error::EmptySweep(
                    "bounded noise needs an eps or snr_db list".into(),
                )),
                (false, false) => Err(Error::Config(
                    "bounded noise takes either eps or snr_db, not both".into(),
                )),
            },
        }
    };

    let mut points = Vec::new();
    for (mi, (mc, pattern)) in config.matrix.iter().zip(patterns).enumerate() {
        let d = pattern
            .uniform_weight()
            .expect("power patterns have uniform weight");
        let r = mc.degree.saturating_sub(1);
        for &k in &config.signal.k {
            if k == 0 || k > config.signal.n {
                return Err(Error::Config(format!(
                    "sparsity {k} out of range for n = {}",
                    config.signal.n
                )));
            }
            for noise in noise_points(pattern.num_rows(), k)? {
                let kv = match noise {
                    NoisePoint::Sparse { kv, .. } => kv,
                    _ => 0,
                };
                let eta = match config.eta {
                    EtaPolicy::Explicit { value } => value,
                    EtaPolicy::DMinusOne => (d - 1) as f64,
                    EtaPolicy::TheoremMidpoint => {
                        let range = eta_range(noise.regime(), d, r, k, kv);
                        match range.midpoint() {
                            Some(mid) => mid,
                            None => {
                                warnings.push(format!(
                                    "point (p={}, k={k}, {:?}): no guaranteed threshold interval \
                                     for d={d}, r={r}; falling back to eta = d - 1 = {}",
                                    mc.p,
                                    noise,
                                    d - 1
                                ));
                                (d - 1) as f64
                            }
                        }
                    }
                };
                points.push(SweepPoint {
                    point_id: points.len(),
                    matrix_index: mi,
                    k,
                    noise,
                    eta,
                });
            }
        }
    }
    Ok(points)
}

fn run_trial(
    config: &ExperimentConfig,
    patterns: &[SparsityPattern],
    point: &SweepPoint,
    trial_id: usize,
) -> Result<TrialRecord> {
    let mc = &config.matrix[point.matrix_index];
    let pattern = &patterns[point.matrix_index];
    let dist: SignalDist = config.signal.dist.into();
    let g = trial_id as u64;

    let mut matrix_rng = rng::trial_stream(config.master_seed, g, rng::purpose::MATRIX);
    let matrix = randomize_entries_from(&mut matrix_rng, pattern, mc.phi_c)?;
    let mut bias_rng = rng::trial_stream(config.master_seed, g, rng::purpose::BIAS);
    let bias = random_bias_from(&mut bias_rng, pattern.num_rows(), config.bias_c)?;
    let mut signal_rng = rng::trial_stream(config.master_seed, g, rng::purpose::SIGNAL);
    let signal = generate_signal_from(&mut signal_rng, config.signal.n, point.k, dist)?;
    let clean = measure(&matrix, &bias, &signal)?;

    let (noise_spec, eps_opt, kv_opt, sigma_db_opt, snr_db_opt) = match point.noise {
        NoisePoint::None => (NoiseSpec::None, None, None, None, None),
        NoisePoint::Sparse {
            kv,
            sigma_ratio_db,
        } => {
            let sigma_v = (10f64.powf(sigma_ratio_db / 10.0) * dist.mean_square()).sqrt();
            (
                NoiseSpec::Sparse { kv, sigma_v },
                None,
                Some(kv),
                Some(sigma_ratio_db),
                None,
            )
        }
        NoisePoint::Bounded { eps, snr_db } => {
            (NoiseSpec::Bounded { eps }, Some(eps), None, None, snr_db)
        }
    };
    let mut noise_rng = rng::trial_stream(config.master_seed, g, rng::purpose::NOISE);
    let y = apply_noise_from(&mut noise_rng, &clean, noise_spec)?;

    let mut opts = RecoverOptions::new(point.noise.regime(), point.eta);
    if let Some(eps) = eps_opt {
        opts = opts.with_eps(eps);
    }
    let start = std::time::Instant::now();
    let report = recover(&y, &matrix, &bias, &opts)?;
    let runtime_seconds = start.elapsed().as_secs_f64();

    let re = relative_error(&report.estimate, &signal)?;
    let ar_re = ar_relative_error(&report.estimate, &signal)?;
    let bound_value = match eps_opt {
        Some(eps) => Some(error_bound(&matrix, &bias, signal.support(), eps)?.bound_value),
        None => None,
    };
    Ok(TrialRecord {
        point_id: point.point_id,
        trial_id,
        p: mc.p,
        m_rows: pattern.num_rows(),
        n_cols: pattern.num_cols(),
        k: point.k,
        kv: kv_opt,
        sigma_ratio_db: sigma_db_opt,
        snr_db: snr_db_opt,
        eps: eps_opt,
        eta: point.eta,
        support_exact: report.support.indices == signal.support(),
        re,
        ar_re,
        bound_value,
        runtime_seconds,
    })
}

/// Run a sweep. Trial records come back in `(point, trial)` order no matter
/// how rayon schedules them.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let patterns = build_patterns(config)?;
    let mut warnings = Vec::new();
    let points = enumerate_points(config, &patterns, &mut warnings)?;
    let total = points.len() * config.trials;

    let records: Vec<TrialRecord> = (0..total)
        .into_par_iter()
        .map(|g| {
            let point = &points[g / config.trials];
            run_trial(config, &patterns, point, g)
        })
        .collect::<Result<_>>()?;

    let summaries = points
        .iter()
        .map(|point| {
            let chunk = &records
                [point.point_id * config.trials..(point.point_id + 1) * config.trials];
            summarize(point, chunk, config.trials)
        })
        .collect();
    Ok(ExperimentResult {
        records,
        summaries,
        warnings,
    })
}

fn summarize(point: &SweepPoint, chunk: &[TrialRecord], trials: usize) -> SummaryRecord {
    let len = chunk.len() as f64;
    let mean = |f: &dyn Fn(&TrialRecord) -> f64| chunk.iter().map(|r| f(r)).sum::<f64>() / len;
    let mean_re = mean(&|r| r.re);
    let mean_ar_re = mean(&|r| r.ar_re);
    let var_re = mean(&|r| (r.re - mean_re) * (r.re - mean_re));
    let var_ar = mean(&|r| (r.ar_re - mean_ar_re) * (r.ar_re - mean_ar_re));
    let first = &chunk[0];
    SummaryRecord {
        point_id: point.point_id,
        p: first.p,
        m_rows: first.m_rows,
        n_cols: first.n_cols,
        k: point.k,
        kv: first.kv,
        sigma_ratio_db: first.sigma_ratio_db,
        snr_db: first.snr_db,
        eps: first.eps,
        eta: point.eta,
        trials,
        mean_re,
        std_re: var_re.sqrt(),
        mean_ar_re,
        std_ar_re: var_ar.sqrt(),
        max_re: chunk.iter().map(|r| r.re).fold(0.0, f64::max),
        success_rate: chunk.iter().filter(|r| r.ar_re < SUCCESS_THRESHOLD).count() as f64 / len,
        support_exact_rate: chunk.iter().filter(|r| r.support_exact).count() as f64 / len,
    }
}

/// One cell of a sparsity-vs-measurements success grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCell {
    pub k: usize,
    pub m_rows: usize,
    pub success_rate: f64,
}

/// Project a sweep onto the `(k, m_rows)` plane. Points that share a cell
/// (several noise settings per shape) average their success rates.
pub fn phase_transition_grid(result: &ExperimentResult) -> Vec<GridCell> {
    let mut cells: Vec<(usize, usize, f64, usize)> = Vec::new();
    for s in &result.summaries {
        match cells
            .iter_mut()
            .find(|c| c.0 == s.k && c.1 == s.m_rows)
        {
            Some(cell) => {
                cell.2 += s.success_rate;
                cell.3 += 1;
            }
            None => cells.push((s.k, s.m_rows, s.success_rate, 1)),
        }
    }
    cells
        .into_iter()
        .map(|(k, m_rows, sum, count)| GridCell {
            k,
            m_rows,
            success_rate: sum / count as f64,
        })
        .collect()
}

/// A deliberately wrong baseline: the true signal spun by a random global
/// phase. Against it, plain relative error averages `4 / pi` while the
/// rotation-removed error is zero, which calibrates how much of an error
/// metric the bias is buying.
pub fn phase_ambiguous_baseline(truth: &SparseSignal, seed: u64) -> SparseSignal {
    let mut r = rng::stream(seed, rng::BASELINE_STREAM);
    let omega = r.random_range(0.0..std::f64::consts::TAU);
    rotated(truth, omega)
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.11e}")
}

fn fmt_opt_f64(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn fmt_opt_usize(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Header of the per-trial CSV.
pub const RECORDS_HEADER: &str = "point_id,trial_id,p,m_rows,n_cols,k,kv,sigma_ratio_db,snr_db,\
                                  eps,eta,support_exact,re,ar_re,bound_value,runtime_seconds";

/// Header of the per-point summary CSV.
pub const SUMMARY_HEADER: &str = "point_id,p,m_rows,n_cols,k,kv,sigma_ratio_db,snr_db,eps,eta,\
                                  trials,mean_re,std_re,mean_ar_re,std_ar_re,max_re,success_rate,\
                                  support_exact_rate";

/// Render trial records as CSV text (12 significant digits on floats,
/// empty cells for inapplicable columns).
pub fn emit_records_csv(records: &[TrialRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(RECORDS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.point_id,
            r.trial_id,
            r.p,
            r.m_rows,
            r.n_cols,
            r.k,
            fmt_opt_usize(r.kv),
            fmt_opt_f64(r.sigma_ratio_db),
            fmt_opt_f64(r.snr_db),
            fmt_opt_f64(r.eps),
            fmt_f64(r.eta),
            r.support_exact,
            fmt_f64(r.re),
            fmt_f64(r.ar_re),
            fmt_opt_f64(r.bound_value),
            fmt_f64(r.runtime_seconds),
        ));
    }
    out
}

/// Render summaries as CSV text.
pub fn emit_summary_csv(summaries: &[SummaryRecord]) -> String {
    let mut out = String::with_capacity(64 * (summaries.len() + 1));
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for s in summaries {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            s.point_id,
            s.p,
            s.m_rows,
            s.n_cols,
            s.k,
            fmt_opt_usize(s.kv),
            fmt_opt_f64(s.sigma_ratio_db),
            fmt_opt_f64(s.snr_db),
            fmt_opt_f64(s.eps),
            fmt_f64(s.eta),
            s.trials,
            fmt_f64(s.mean_re),
            fmt_f64(s.std_re),
            fmt_f64(s.mean_ar_re),
            fmt_f64(s.std_ar_re),
            fmt_f64(s.max_re),
            fmt_f64(s.success_rate),
            fmt_f64(s.support_exact_rate),
        ));
    }
    out
}

fn parse_cell<T: std::str::FromStr>(cell: &str, line: usize, what: &str) -> Result<T> {
    cell.parse().map_err(|_| Error::Parse {
        path: "records csv".into(),
        line,
        msg: format!("bad {what}: '{cell}'"),
    })
}

fn parse_opt<T: std::str::FromStr>(cell: &str, line: usize, what: &str) -> Result<Option<T>> {
    if cell.is_empty() {
        Ok(None)
    } else {
        parse_cell(cell, line, what).map(Some)
    }
}

/// Parse CSV text produced by [`emit_records_csv`].
pub fn read_records_csv(text: &str) -> Result<Vec<TrialRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == RECORDS_HEADER => {}
        other => {
            return Err(Error::Parse {
                path: "records csv".into(),
                line: 1,
                msg: format!("unexpected header: {:?}", other.map(|(_, h)| h)),
            })
        }
    }
    let mut records = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let line_no = i + 1;
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 16 {
            return Err(Error::Parse {
                path: "records csv".into(),
                line: line_no,
                msg: format!("expected 16 columns, got {}", cells.len()),
            });
        }
        records.push(TrialRecord {
            point_id: parse_cell(cells[0], line_no, "point_id")?,
            trial_id: parse_cell(cells[1], line_no, "trial_id")?,
            p: parse_cell(cells[2], line_no, "p")?,
            m_rows: parse_cell(cells[3], line_no, "m_rows")?,
            n_cols: parse_cell(cells[4], line_no, "n_cols")?,
            k: parse_cell(cells[5], line_no, "k")?,
            kv: parse_opt(cells[6], line_no, "kv")?,
            sigma_ratio_db: parse_opt(cells[7], line_no, "sigma_ratio_db")?,
            snr_db: parse_opt(cells[8], line_no, "snr_db")?,
            eps: parse_opt(cells[9], line_no, "eps")?,
            eta: parse_cell(cells[10], line_no, "eta")?,
            support_exact: parse_cell(cells[11], line_no, "support_exact")?,
            re: parse_cell(cells[12], line_no, "re")?,
            ar_re: parse_cell(cells[13], line_no, "ar_re")?,
            bound_value: parse_opt(cells[14], line_no, "bound_value")?,
            runtime_seconds: parse_cell(cells[15], line_no, "runtime_seconds")?,
        });
    }
    Ok(records)
}

/// Drop the wall-clock column from a records CSV so two runs can be
/// compared under the determinism contract.
pub fn strip_runtime_column(csv: &str) -> String {
    csv.lines()
        .map(|line| match line.rfind(',') {
            Some(idx) => &line[..idx],
            None => line,
        })
        .map(|l| format!("{l}\n"))
        .collect()
}
