//! Sparse signals, the magnitude-squared affine measurement, and noise.
//!
//! A length-`N` signal with `K` nonzeros is measured through a column-sparse
//! matrix `Phi` and a known bias `b` as
//!
//! ```text
//! y_m = | sum_n phi_{m,n} s_n + b_m |^2 + v_m
//! ```
//!
//! The bias is what removes the global phase ambiguity of plain
//! magnitude-squared measurements: rows that no active column touches read
//! exactly `|b_m|^2`, and rows that do see the signal deviate from it.
//! Measuring costs `O(K d)` work on top of writing out the `M` baseline
//! values; it never expands the sparse matrix.

use num_complex::Complex64;
use rand::RngExt;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::rng;
use crate::sensing::{BiasVector, SparseSensingMatrix};

/// Value distribution for generated signals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalDist {
    /// Circularly symmetric complex Gaussian with the given total variance
    /// (each real component gets half of it).
    ComplexGaussian { variance: f64 },
    /// Fixed modulus, uniform phase.
    Circle { radius: f64 },
}

impl SignalDist {
    fn validate(self) -> Result<()> {
        match self {
            SignalDist::ComplexGaussian { variance } if !(variance > 0.0) => Err(
                Error::InvalidParameter(format!("signal variance must be positive, got {variance}")),
            ),
            SignalDist::Circle { radius } if !(radius > 0.0) => Err(Error::InvalidParameter(
                format!("signal radius must be positive, got {radius}"),
            )),
            _ => Ok(()),
        }
    }

    /// Mean squared modulus of one drawn value.
    pub fn mean_square(self) -> f64 {
        match self {
            SignalDist::ComplexGaussian { variance } => variance,
            SignalDist::Circle { radius } => radius * radius,
        }
    }
}

/// A sparse complex vector: sorted support indices plus matching values.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    len: usize,
    support: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseSignal {
    /// Requires a strictly increasing, in-range support and nonzero values.
    pub fn new(len: usize, support: Vec<usize>, values: Vec<Complex64>) -> Result<Self> {
        if support.len() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} support indices vs {} values",
                support.len(),
                values.len()
            )));
        }
        for pair in support.windows(2) {
            if pair[0] >= pair[1] {
                return Err(Error::InvalidParameter(
                    "signal support must be strictly increasing".into(),
                ));
            }
        }
        if let Some(&last) = support.last() {
            if last >= len {
                return Err(Error::InvalidParameter(format!(
                    "support index {last} out of range for length {len}"
                )));
            }
        }
        if values.iter().any(|v| v.norm_sqr() == 0.0 || !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "signal values must be nonzero and finite".into(),
            ));
        }
        Ok(Self {
            len,
            support,
            values,
        })
    }

    /// Internal constructor for values produced by recovery, where an
    /// estimate is kept verbatim even in the measure-zero event that it
    /// lands exactly on zero.
    pub(crate) fn from_parts_unchecked(
        len: usize,
        support: Vec<usize>,
        values: Vec<Complex64>,
    ) -> Self {
        debug_assert_eq!(support.len(), values.len());
        Self {
            len,
            support,
            values,
        }
    }

    pub fn zero(len: usize) -> Self {
        Self {
            len,
            support: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.support.iter().copied().zip(self.values.iter().copied())
    }

    /// The value at index `n` (zero off the support).
    pub fn get(&self, n: usize) -> Complex64 {
        let i = self.support.partition_point(|&s| s < n);
        if i < self.support.len() && self.support[i] == n {
            self.values[i]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Draw a `k`-sparse length-`n` signal: support uniform over all size-`k`
/// index sets, values i.i.d. from `dist` (and never exactly zero).
pub fn generate_signal(n: usize, k: usize, dist: SignalDist, seed: u64) -> Result<SparseSignal> {
    let mut rng = rng::stream(seed, rng::SIGNAL_STREAM);
    generate_signal_from(&mut rng, n, k, dist)
}

/// [`generate_signal`] driven by a caller-owned stream, for sweeps that
/// hand every trial its own substream.
pub fn generate_signal_from<R: RngExt>(
    rng: &mut R,
    n: usize,
    k: usize,
    dist: SignalDist,
) -> Result<SparseSignal> {
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "sparsity {k} exceeds signal length {n}"
        )));
    }
    dist.validate()?;
    let mut support = rand::seq::index::sample(rng, n, k).into_vec();
    support.sort_unstable();
    let values = draw_values(rng, k, dist);
    SparseSignal::new(n, support, values)
}

/// Like [`generate_signal`] but with the support fixed by the caller.
pub fn generate_signal_on_support(
    len: usize,
    support: &[usize],
    dist: SignalDist,
    seed: u64,
) -> Result<SparseSignal> {
    let mut rng = rng::stream(seed, rng::SIGNAL_STREAM);
    generate_signal_on_support_from(&mut rng, len, support, dist)
}

/// [`generate_signal_on_support`] driven by a caller-owned stream.
pub fn generate_signal_on_support_from<R: RngExt>(
    rng: &mut R,
    len: usize,
    support: &[usize],
    dist: SignalDist,
) -> Result<SparseSignal> {
    dist.validate()?;
    let values = draw_values(rng, support.len(), dist);
    SparseSignal::new(len, support.to_vec(), values)
}

fn draw_values<R: RngExt>(rng: &mut R, k: usize, dist: SignalDist) -> Vec<Complex64> {
    match dist {
        SignalDist::ComplexGaussian { variance } => {
            let component = Normal::new(0.0, (variance / 2.0).sqrt()).expect("validated");
            (0..k)
                .map(|_| loop {
                    let v = Complex64::new(component.sample(rng), component.sample(rng));
                    if v.norm_sqr() > 0.0 {
                        break v;
                    }
                })
                .collect()
        }
        SignalDist::Circle { radius } => {
            (0..k).map(|_| rng::circle_point(rng, radius)).collect()
        }
    }
}

/// What a measurement vector carries besides the values: a record of the
/// noise that was mixed in. Diagnostics only; recovery never reads it.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseMeta {
    /// Straight out of [`measure`], no noise applied.
    Clean,
    /// Outlier noise: which rows were hit and by how much.
    Sparse { rows: Vec<usize>, values: Vec<f64> },
    /// Entrywise bounded noise: the level and the largest realized |v_m|.
    Bounded { eps: f64, realized_linf: f64 },
    /// Loaded from a file; provenance unknown.
    Unspecified,
}

/// Real measurement vector plus its noise record.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementVector {
    values: Vec<f64>,
    noise_meta: NoiseMeta,
}

impl MeasurementVector {
    pub fn from_values(values: Vec<f64>, noise_meta: NoiseMeta) -> Self {
        Self { values, noise_meta }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, m: usize) -> f64 {
        self.values[m]
    }

    pub fn noise_meta(&self) -> &NoiseMeta {
        &self.noise_meta
    }
}

/// Noise model applied on top of noiseless measurements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpec {
    None,
    /// `kv` uniformly chosen rows get an i.i.d. `N(0, sigma_v^2)` offset.
    Sparse { kv: usize, sigma_v: f64 },
    /// Every row gets an independent uniform offset with `|v_m| < eps`.
    Bounded { eps: f64 },
}

/// Noiseless magnitude-squared affine measurement of a sparse signal.
///
/// Rows outside the union of active column supports are written as
/// `|b_m|^2` directly, so they match the recovery stage's baseline exactly,
/// with no floating-point residue.
pub fn measure(
    matrix: &SparseSensingMatrix,
    bias: &BiasVector,
    signal: &SparseSignal,
) -> Result<MeasurementVector> {
    if signal.len() != matrix.num_cols() {
        return Err(Error::DimensionMismatch(format!(
            "signal length {} vs {} matrix columns",
            signal.len(),
            matrix.num_cols()
        )));
    }
    if bias.len() != matrix.num_rows() {
        return Err(Error::DimensionMismatch(format!(
            "bias length {} vs {} matrix rows",
            bias.len(),
            matrix.num_rows()
        )));
    }
    let m_rows = matrix.num_rows();
    let mut field = vec![Complex64::new(0.0, 0.0); m_rows];
    let mut touched = vec![false; m_rows];
    for (n, s_n) in signal.entries() {
        for (m, phi) in matrix.column_entries(n) {
            field[m] += phi * s_n;
            touched[m] = true;
        }
    }
    let values = (0..m_rows)
        .map(|m| {
            let b = bias.value(m);
            if touched[m] {
                (field[m] + b).norm_sqr()
            } else {
                b.norm_sqr()
            }
        })
        .collect();
    Ok(MeasurementVector::from_values(values, NoiseMeta::Clean))
}

/// Add noise to a measurement vector, deterministically in the seed. The
/// returned vector records what was done in its [`NoiseMeta`].
pub fn apply_noise(y: &MeasurementVector, noise: NoiseSpec, seed: u64) -> Result<MeasurementVector> {
    let mut rng = rng::stream(seed, rng::NOISE_STREAM);
    apply_noise_from(&mut rng, y, noise)
}

/// [`apply_noise`] driven by a caller-owned stream.
pub fn apply_noise_from<R: RngExt>(
    rng: &mut R,
    y: &MeasurementVector,
    noise: NoiseSpec,
) -> Result<MeasurementVector> {
    match noise {
        NoiseSpec::None => Ok(MeasurementVector::from_values(
            y.values.clone(),
            NoiseMeta::Clean,
        )),
        NoiseSpec::Sparse { kv, sigma_v } => {
            if kv > y.len() {
                return Err(Error::InvalidParameter(format!(
                    "kv = {kv} outliers in {} measurements",
                    y.len()
                )));
            }
            if !(sigma_v >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "sigma_v must be nonnegative, got {sigma_v}"
                )));
            }
            let mut rows = rand::seq::index::sample(rng, y.len(), kv).into_vec();
            rows.sort_unstable();
            let normal = Normal::new(0.0, sigma_v).expect("validated");
            let noise_values: Vec<f64> = rows.iter().map(|_| normal.sample(rng)).collect();
            let mut values = y.values.clone();
            for (&m, &v) in rows.iter().zip(&noise_values) {
                values[m] += v;
            }
            Ok(MeasurementVector::from_values(
                values,
                NoiseMeta::Sparse {
                    rows,
                    values: noise_values,
                },
            ))
        }
        NoiseSpec::Bounded { eps } => {
            if !(eps > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "eps must be positive, got {eps}"
                )));
            }
            let mut realized_linf = 0.0f64;
            let values = y
                .values
                .iter()
                .map(|&ym| {
                    // Redraw on the boundary so the bound is strict.
                    let v = loop {
                        let v: f64 = rng.random_range(-eps..eps);
                        if v.abs() < eps {
                            break v;
                        }
                    };
                    realized_linf = realized_linf.max(v.abs());
                    ym + v
                })
                .collect();
            Ok(MeasurementVector::from_values(
                values,
                NoiseMeta::Bounded { eps, realized_linf },
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::{devore_pattern, random_bias, randomize_entries, SparsityPattern};

    fn sqrt2() -> f64 {
        std::f64::consts::SQRT_2
    }

    #[test]
    fn gaussian_signal_shape() {
        let s = generate_signal(
            7500,
            15,
            SignalDist::ComplexGaussian { variance: 2.0 },
            42,
        )
        .unwrap();
        assert_eq!(s.len(), 7500);
        assert_eq!(s.sparsity(), 15);
        assert!(s.support().windows(2).all(|w| w[0] < w[1]));
        assert!(s.values().iter().all(|v| v.norm_sqr() > 0.0));
        let again = generate_signal(
            7500,
            15,
            SignalDist::ComplexGaussian { variance: 2.0 },
            42,
        )
        .unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn circle_signal_has_fixed_modulus() {
        let s = generate_signal(100, 10, SignalDist::Circle { radius: 5.0 }, 3).unwrap();
        for v in s.values() {
            assert!((v.norm() - 5.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_signal_is_fine() {
        let s = generate_signal(10, 0, SignalDist::Circle { radius: 1.0 }, 0).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.norm(), 0.0);
    }

    #[test]
    fn signal_parameter_validation() {
        assert!(generate_signal(3, 4, SignalDist::Circle { radius: 1.0 }, 0).is_err());
        assert!(generate_signal(3, 1, SignalDist::Circle { radius: 0.0 }, 0).is_err());
        assert!(
            generate_signal(3, 1, SignalDist::ComplexGaussian { variance: -1.0 }, 0).is_err()
        );
        assert!(SparseSignal::new(4, vec![1, 1], vec![Complex64::new(1.0, 0.0); 2]).is_err());
        assert!(SparseSignal::new(4, vec![5], vec![Complex64::new(1.0, 0.0)]).is_err());
        assert!(SparseSignal::new(4, vec![1], vec![Complex64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn signal_get_reads_support_and_zeros() {
        let s = SparseSignal::new(
            6,
            vec![1, 4],
            vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, -1.0)],
        )
        .unwrap();
        assert_eq!(s.get(1), Complex64::new(2.0, 0.0));
        assert_eq!(s.get(4), Complex64::new(0.0, -1.0));
        assert_eq!(s.get(0), Complex64::new(0.0, 0.0));
        assert_eq!(s.get(5), Complex64::new(0.0, 0.0));
        assert!((s.norm() - 5.0f64.sqrt()).abs() < 1e-15);
    }

    /// One column, unit entries on rows {0,1,2}, bias (1, i, -1), signal
    /// value 2: the measurements must read |2+1|^2, |2+i|^2, |2-1|^2.
    #[test]
    fn hand_measurement() {
        let pat = SparsityPattern::new(3, vec![vec![0, 1, 2]]).unwrap();
        let mat = crate::sensing::SparseSensingMatrix::from_parts(
            pat,
            vec![vec![Complex64::new(1.0, 0.0); 3]],
            Some(1.0),
        )
        .unwrap();
        let bias = BiasVector::from_values(
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(-1.0, 0.0),
            ],
            None,
        );
        let s = SparseSignal::new(1, vec![0], vec![Complex64::new(2.0, 0.0)]).unwrap();
        let y = measure(&mat, &bias, &s).unwrap();
        assert_eq!(y.values(), &[9.0, 5.0, 1.0]);
        assert_eq!(*y.noise_meta(), NoiseMeta::Clean);
    }

    #[test]
    fn zero_signal_reads_bias_exactly_everywhere() {
        let pat = devore_pattern(5, 2, 25).unwrap();
        let mat = randomize_entries(&pat, sqrt2(), 1).unwrap();
        let bias = random_bias(25, sqrt2(), 1).unwrap();
        let y = measure(&mat, &bias, &SparseSignal::zero(25)).unwrap();
        for (m, &ym) in y.values().iter().enumerate() {
            assert_eq!(ym, bias.value(m).norm_sqr());
            assert!(ym >= 0.0);
        }
    }

    #[test]
    fn untouched_rows_match_bias_exactly() {
        let pat = devore_pattern(5, 2, 25).unwrap();
        let mat = randomize_entries(&pat, sqrt2(), 7).unwrap();
        let bias = random_bias(25, sqrt2(), 7).unwrap();
        let s = generate_signal(25, 2, SignalDist::ComplexGaussian { variance: 2.0 }, 7).unwrap();
        let y = measure(&mat, &bias, &s).unwrap();
        let mut touched = vec![false; 25];
        for (n, _) in s.entries() {
            for m in pat.support(n) {
                touched[*m] = true;
            }
        }
        for m in 0..25 {
            if !touched[m] {
                assert_eq!(y.value(m), bias.value(m).norm_sqr(), "row {m}");
            }
            assert!(y.value(m) >= 0.0);
        }
    }

    #[test]
    fn measure_checks_dimensions() {
        let pat = devore_pattern(3, 2, 9).unwrap();
        let mat = randomize_entries(&pat, 1.0, 0).unwrap();
        let bias = random_bias(9, 1.0, 0).unwrap();
        let short = SparseSignal::zero(4);
        assert!(measure(&mat, &bias, &short).is_err());
        let wrong_bias = random_bias(8, 1.0, 0).unwrap();
        assert!(measure(&mat, &wrong_bias, &SparseSignal::zero(9)).is_err());
    }

    #[test]
    fn no_noise_is_identity() {
        let y = MeasurementVector::from_values(vec![1.0, 2.0, 3.0], NoiseMeta::Clean);
        let out = apply_noise(&y, NoiseSpec::None, 9).unwrap();
        assert_eq!(out.values(), y.values());
    }

    #[test]
    fn sparse_noise_hits_exactly_kv_rows() {
        let clean = MeasurementVector::from_values(vec![1.0; 1875], NoiseMeta::Clean);
        let noisy = apply_noise(
            &clean,
            NoiseSpec::Sparse {
                kv: 50,
                sigma_v: 3.0,
            },
            21,
        )
        .unwrap();
        let changed: Vec<usize> = (0..1875).filter(|&m| noisy.value(m) != 1.0).collect();
        assert_eq!(changed.len(), 50);
        match noisy.noise_meta() {
            NoiseMeta::Sparse { rows, values } => {
                assert_eq!(rows, &changed);
                assert_eq!(values.len(), 50);
                assert!(rows.windows(2).all(|w| w[0] < w[1]));
            }
            other => panic!("wrong meta {other:?}"),
        }
        assert!(apply_noise(&clean, NoiseSpec::Sparse { kv: 1876, sigma_v: 1.0 }, 0).is_err());
    }

    #[test]
    fn bounded_noise_stays_strictly_inside_eps() {
        let clean = MeasurementVector::from_values(vec![2.0; 4096], NoiseMeta::Clean);
        let eps = 0.1;
        let noisy = apply_noise(&clean, NoiseSpec::Bounded { eps }, 5).unwrap();
        let mut linf = 0.0f64;
        for m in 0..clean.len() {
            let dev = (noisy.value(m) - clean.value(m)).abs();
            assert!(dev < eps, "row {m} deviates by {dev}");
            linf = linf.max(dev);
        }
        match noisy.noise_meta() {
            NoiseMeta::Bounded { eps: e, realized_linf } => {
                assert_eq!(*e, eps);
                assert_eq!(*realized_linf, linf);
            }
            other => panic!("wrong meta {other:?}"),
        }
        assert!(apply_noise(&clean, NoiseSpec::Bounded { eps: 0.0 }, 0).is_err());
    }

    #[test]
    fn noise_is_reproducible() {
        let clean = MeasurementVector::from_values(vec![0.0; 100], NoiseMeta::Clean);
        let a = apply_noise(&clean, NoiseSpec::Sparse { kv: 10, sigma_v: 1.0 }, 13).unwrap();
        let b = apply_noise(&clean, NoiseSpec::Sparse { kv: 10, sigma_v: 1.0 }, 13).unwrap();
        let c = apply_noise(&clean, NoiseSpec::Sparse { kv: 10, sigma_v: 1.0 }, 14).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
