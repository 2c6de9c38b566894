//! Deterministic sparse sensing patterns and their randomized fillings.
//!
//! The pattern generator is polynomial based. Rows are indexed by pairs
//! `(x, q)` in `Z_p x Z_p`, flattened to `x * p + q`, and the column of a
//! polynomial `Q` of degree `< k` touches row `x * p + Q(x)` for every
//! `x in Z_p`. Distinct polynomials of degree `< k` agree on at most `k - 1`
//! points, so any two columns share at most `k - 1` rows while every column
//! holds exactly `p` entries. Recovery leans on exactly that combination:
//! a uniform column weight `d = p` together with a pairwise overlap cap
//! `r = k - 1`.
//!
//! Patterns carry no values. [`randomize_entries`] fills the nonzero slots
//! with fixed-modulus, uniform-phase values, and [`random_bias`] draws the
//! known offset added before the magnitude-squared measurement. Both are
//! deterministic in a seed; see [`crate::rng`].

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng;

/// Relative floor used when normalizing triangle areas; keeps degenerate
/// (coincident-point) triples classified as collinear instead of NaN.
const AREA_FLOOR: f64 = 1e-300;

/// Fixed seed for the internal triple sampler. The check's signature carries
/// no seed, so determinism comes from this constant plus per-column stream
/// ids.
const SAMPLER_SEED: u64 = 0x5eed_0005;

/// Which rows each column of a sparse matrix touches. Supports are sorted,
/// duplicate free, and in range; the constructor enforces that.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityPattern {
    num_rows: usize,
    supports: Vec<Vec<usize>>,
}

impl SparsityPattern {
    pub fn new(num_rows: usize, supports: Vec<Vec<usize>>) -> Result<Self> {
        for (n, rows) in supports.iter().enumerate() {
            for pair in rows.windows(2) {
                if pair[0] >= pair[1] {
                    return Err(Error::InvalidParameter(format!(
                        "support of column {n} is not strictly increasing"
                    )));
                }
            }
            if let Some(&last) = rows.last() {
                if last >= num_rows {
                    return Err(Error::InvalidParameter(format!(
                        "column {n} touches row {last}, but the pattern has {num_rows} rows"
                    )));
                }
            }
        }
        Ok(Self { num_rows, supports })
    }

    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    pub fn num_cols(&self) -> usize {
        self.supports.len()
    }

    /// Rows touched by column `n`, ascending.
    pub fn support(&self, n: usize) -> &[usize] {
        &self.supports[n]
    }

    pub fn supports(&self) -> impl Iterator<Item = &[usize]> {
        self.supports.iter().map(|s| s.as_slice())
    }

    /// The common column weight, if every column has the same number of
    /// entries (an empty pattern has none).
    pub fn uniform_weight(&self) -> Option<usize> {
        let first = self.supports.first()?.len();
        self.supports
            .iter()
            .all(|s| s.len() == first)
            .then_some(first)
    }

    pub fn nnz(&self) -> usize {
        self.supports.iter().map(|s| s.len()).sum()
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut f = 3;
    while f * f <= p {
        if p % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

/// Horner evaluation of `c[0] + c[1] x + ... + c[k-1] x^(k-1)` over `Z_p`.
fn eval_poly(coeffs: &[u64], x: u64, p: u64) -> u64 {
    let mut acc: u128 = 0;
    for &c in coeffs.iter().rev() {
        acc = (acc * x as u128 + c as u128) % p as u128;
    }
    acc as u64
}

/// Advance a coefficient vector to its lexicographic successor, the last
/// coordinate moving fastest. Returns false on wrap-around.
fn next_coeffs(coeffs: &mut [u64], p: u64) -> bool {
    for c in coeffs.iter_mut().rev() {
        *c += 1;
        if *c < p {
            return true;
        }
        *c = 0;
    }
    false
}

/// The deterministic `p^2 x n_cols` pattern built from polynomials over
/// `Z_p` of degree `< degree`. Column `j` belongs to the `j`-th coefficient
/// vector `(c_0, ..., c_{degree-1})` in lexicographic order (constant
/// coefficient most significant), and touches row `x * p + Q(x)` for every
/// `x`. Requires `p` prime and `n_cols <= p^degree`.
pub fn devore_pattern(p: u64, degree: usize, n_cols: usize) -> Result<SparsityPattern> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if degree == 0 {
        return Err(Error::InvalidParameter(
            "polynomial degree bound must be at least 1".into(),
        ));
    }
    if p >= 1 << 20 {
        return Err(Error::InvalidParameter(format!(
            "p = {p} is too large: p^2 rows would exceed the supported index space"
        )));
    }
    let available: u128 = (p as u128)
        .checked_pow(degree as u32)
        .unwrap_or(u128::MAX);
    if n_cols as u128 > available {
        return Err(Error::TooManyColumns {
            p,
            degree,
            requested: n_cols,
            available,
        });
    }

    let mut supports = Vec::with_capacity(n_cols);
    let mut coeffs = vec![0u64; degree];
    for j in 0..n_cols {
        let rows: Vec<usize> = (0..p)
            .map(|x| (x * p + eval_poly(&coeffs, x, p)) as usize)
            .collect();
        supports.push(rows);
        if j + 1 < n_cols {
            let advanced = next_coeffs(&mut coeffs, p);
            debug_assert!(advanced, "ran past the polynomial family");
        }
    }
    SparsityPattern::new((p * p) as usize, supports)
}

/// The same pattern with all-zero rows appended, so a `p^2`-row construction
/// can sit inside a taller measurement vector. Supports are untouched.
pub fn zero_pad(pattern: &SparsityPattern, m_rows: usize) -> Result<SparsityPattern> {
    if m_rows < pattern.num_rows {
        return Err(Error::PadBelowRows {
            requested: m_rows,
            rows: pattern.num_rows,
        });
    }
    Ok(SparsityPattern {
        num_rows: m_rows,
        supports: pattern.supports.clone(),
    })
}

/// Result of the structural checks. [`verify_uff`] fills the weight/overlap
/// half and [`check_assumption2`] the reference-geometry half; whichever
/// half a check does not touch keeps its `Default` value.
#[derive(Debug, Clone, Default)]
pub struct AssumptionReport {
    /// Every column has weight exactly `d` and pairwise overlaps stay `<= r`.
    pub uff_ok: bool,
    /// Largest pairwise column overlap observed.
    pub worst_overlap: usize,
    /// Every checked reference triple was safely non-collinear.
    pub assumption2_ok: bool,
    /// Smallest normalized triangle area over the checked triples.
    pub worst_collinearity: f64,
    pub triples_checked: usize,
}

fn column_bits(rows: &[usize], words: usize) -> Vec<u64> {
    let mut bits = vec![0u64; words];
    for &m in rows {
        bits[m / 64] |= 1u64 << (m % 64);
    }
    bits
}

fn overlap_count(a: &[u64], b: &[u64]) -> usize {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x & y).count_ones() as usize)
        .sum()
}

/// Exhaustive check that the pattern is a uniform family: every column
/// weight equals `d` and every pairwise overlap is `<= r`. Pairs are scanned
/// in parallel; the report's `worst_overlap` is the maximum seen.
pub fn verify_uff(pattern: &SparsityPattern, d: usize, r: usize) -> AssumptionReport {
    let weights_ok = pattern.supports.iter().all(|s| s.len() == d);
    let words = pattern.num_rows.div_ceil(64).max(1);
    let bits: Vec<Vec<u64>> = pattern
        .supports
        .iter()
        .map(|s| column_bits(s, words))
        .collect();
    let n = bits.len();
    let worst = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut local = 0usize;
            for j in i + 1..n {
                local = local.max(overlap_count(&bits[i], &bits[j]));
            }
            local
        })
        .max()
        .unwrap_or(0);
    AssumptionReport {
        uff_ok: weights_ok && worst <= r,
        worst_overlap: worst,
        ..Default::default()
    }
}

/// Column-sparse complex matrix: a pattern plus one value per nonzero slot.
/// Values are stored column major, aligned with the pattern supports, and
/// must be nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSensingMatrix {
    pattern: SparsityPattern,
    values: Vec<Vec<Complex64>>,
    magnitude_class: Option<f64>,
}

impl SparseSensingMatrix {
    /// Bundle explicit values with a pattern. `magnitude_class` records a
    /// common modulus when the caller knows one (fixed-modulus fillings set
    /// it; hand-built or file-loaded matrices may not have one).
    pub fn from_parts(
        pattern: SparsityPattern,
        values: Vec<Vec<Complex64>>,
        magnitude_class: Option<f64>,
    ) -> Result<Self> {
        if values.len() != pattern.num_cols() {
            return Err(Error::DimensionMismatch(format!(
                "{} value columns for a {}-column pattern",
                values.len(),
                pattern.num_cols()
            )));
        }
        for (n, (rows, vals)) in pattern.supports.iter().zip(&values).enumerate() {
            if rows.len() != vals.len() {
                return Err(Error::DimensionMismatch(format!(
                    "column {n}: {} values for {} pattern slots",
                    vals.len(),
                    rows.len()
                )));
            }
            if vals.iter().any(|v| v.norm_sqr() == 0.0 || !v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "column {n} holds a zero or non-finite value"
                )));
            }
        }
        Ok(Self {
            pattern,
            values,
            magnitude_class,
        })
    }

    pub fn pattern(&self) -> &SparsityPattern {
        &self.pattern
    }

    pub fn num_rows(&self) -> usize {
        self.pattern.num_rows()
    }

    pub fn num_cols(&self) -> usize {
        self.pattern.num_cols()
    }

    /// Values of column `n`, aligned with `pattern().support(n)`.
    pub fn column_values(&self, n: usize) -> &[Complex64] {
        &self.values[n]
    }

    /// `(row, value)` pairs of column `n`, ascending by row.
    pub fn column_entries(&self, n: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.pattern.support(n).iter().copied().zip(self.values[n].iter().copied())
    }

    /// The value at `(m, n)` if that slot is part of the pattern.
    pub fn entry(&self, m: usize, n: usize) -> Option<Complex64> {
        let rows = self.pattern.support(n);
        let i = rows.partition_point(|&row| row < m);
        (i < rows.len() && rows[i] == m).then(|| self.values[n][i])
    }

    pub fn magnitude_class(&self) -> Option<f64> {
        self.magnitude_class
    }

    /// Smallest modulus over the stored entries.
    pub fn min_modulus(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Fill a pattern's nonzero slots with phase-only randomness: every entry
/// has modulus exactly `phi_c` and an independent uniform phase. One seed,
/// one filling.
pub fn randomize_entries(
    pattern: &SparsityPattern,
    phi_c: f64,
    seed: u64,
) -> Result<SparseSensingMatrix> {
    let mut rng = rng::stream(seed, rng::MATRIX_STREAM);
    randomize_entries_from(&mut rng, pattern, phi_c)
}

/// [`randomize_entries`] driven by a caller-owned stream.
pub fn randomize_entries_from<R: rand::RngExt>(
    rng: &mut R,
    pattern: &SparsityPattern,
    phi_c: f64,
) -> Result<SparseSensingMatrix> {
    if !(phi_c > 0.0) || !phi_c.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "entry modulus must be positive and finite, got {phi_c}"
        )));
    }
    let values = pattern
        .supports
        .iter()
        .map(|rows| rows.iter().map(|_| rng::circle_point(rng, phi_c)).collect())
        .collect();
    SparseSensingMatrix::from_parts(pattern.clone(), values, Some(phi_c))
}

/// Known offsets added inside the magnitude-squared measurement, one per row.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasVector {
    values: Vec<Complex64>,
    magnitude_class: Option<f64>,
}

impl BiasVector {
    pub fn from_values(values: Vec<Complex64>, magnitude_class: Option<f64>) -> Self {
        Self {
            values,
            magnitude_class,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, m: usize) -> Complex64 {
        self.values[m]
    }

    pub fn magnitude_class(&self) -> Option<f64> {
        self.magnitude_class
    }

    /// Largest modulus over the rows.
    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|b| b.norm()).fold(0.0, f64::max)
    }
}

/// A bias of modulus exactly `b_c` per row, uniform phases, deterministic in
/// the seed.
pub fn random_bias(m_rows: usize, b_c: f64, seed: u64) -> Result<BiasVector> {
    let mut rng = rng::stream(seed, rng::BIAS_STREAM);
    random_bias_from(&mut rng, m_rows, b_c)
}

/// [`random_bias`] driven by a caller-owned stream.
pub fn random_bias_from<R: rand::RngExt>(rng: &mut R, m_rows: usize, b_c: f64) -> Result<BiasVector> {
    if !(b_c > 0.0) || !b_c.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "bias modulus must be positive and finite, got {b_c}"
        )));
    }
    let values = (0..m_rows).map(|_| rng::circle_point(rng, b_c)).collect();
    Ok(BiasVector::from_values(values, Some(b_c)))
}

/// Twice the area of the triangle `(z1, z2, z3)` divided by the product of
/// the two edge lengths at `z1`; 1 means a right angle at `z1`, 0 means
/// collinear (or coincident) points.
pub fn normalized_triangle_area(z1: Complex64, z2: Complex64, z3: Complex64) -> f64 {
    let u = z1 - z2;
    let w = z1 - z3;
    let num = (u * w.conj()).im.abs();
    let den = (u.norm() * w.norm()).max(AREA_FLOOR);
    num / den
}

fn triples_in(w: usize) -> u128 {
    if w < 3 {
        return 0;
    }
    let w = w as u128;
    w * (w - 1) * (w - 2) / 6
}

/// Check that no column's reference points `b_m / phi_{m,n}` contain a
/// (near-)collinear triple, the geometric condition the closed-form and
/// least-squares solvers rest on. All triples are tested when their total
/// count is at most `max_triples`; beyond that each column gets an equal
/// quota of deterministically sampled triples. A triple passes when its
/// normalized triangle area exceeds `tol`.
pub fn check_assumption2(
    matrix: &SparseSensingMatrix,
    bias: &BiasVector,
    tol: f64,
    max_triples: usize,
) -> Result<AssumptionReport> {
    if bias.len() != matrix.num_rows() {
        return Err(Error::DimensionMismatch(format!(
            "bias has {} rows, matrix has {}",
            bias.len(),
            matrix.num_rows()
        )));
    }
    if !(tol >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "collinearity tolerance must be nonnegative, got {tol}"
        )));
    }
    let n_cols = matrix.num_cols();
    let total: u128 = (0..n_cols)
        .map(|n| triples_in(matrix.pattern().support(n).len()))
        .sum();
    let exhaustive = total <= max_triples as u128;
    let quota = if n_cols == 0 {
        0
    } else {
        (max_triples / n_cols).max(1)
    };

    let per_column: Vec<(f64, usize)> = (0..n_cols)
        .into_par_iter()
        .map(|n| {
            let refs: Vec<Complex64> = matrix
                .column_entries(n)
                .map(|(m, phi)| {
                    let z = bias.value(m) / phi;
                    if z.is_finite() {
                        z
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect();
            let w = refs.len();
            if w < 3 {
                return (f64::INFINITY, 0);
            }
            let mut worst = f64::INFINITY;
            let mut count = 0usize;
            if exhaustive {
                for i in 0..w {
                    for j in i + 1..w {
                        for l in j + 1..w {
                            worst = worst.min(normalized_triangle_area(refs[i], refs[j], refs[l]));
                            count += 1;
                        }
                    }
                }
            } else {
                // Sampling stays deterministic: a fixed internal seed keyed
                // by the column index, independent of thread scheduling.
                let mut rng = rng::stream(SAMPLER_SEED, n as u64);
                for _ in 0..quota {
                    let pick = rand::seq::index::sample(&mut rng, w, 3);
                    let area = normalized_triangle_area(
                        refs[pick.index(0)],
                        refs[pick.index(1)],
                        refs[pick.index(2)],
                    );
                    worst = worst.min(area);
                    count += 1;
                }
            }
            (worst, count)
        })
        .collect();

    let worst = per_column
        .iter()
        .map(|&(w, _)| w)
        .fold(f64::INFINITY, f64::min);
    let triples_checked = per_column.iter().map(|&(_, c)| c).sum();
    Ok(AssumptionReport {
        assumption2_ok: worst > tol,
        worst_collinearity: if worst.is_finite() { worst } else { 0.0 },
        triples_checked,
        ..Default::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Columns of the p = 3, degree-2 family, worked out by hand: column j
    /// has coefficients (c0, c1) with c0 the most significant base-3 digit,
    /// and touches rows 3x + (c0 + c1 x mod 3).
    const P3_K2: [[usize; 3]; 9] = [
        [0, 3, 6],
        [0, 4, 8],
        [0, 5, 7],
        [1, 4, 7],
        [1, 5, 6],
        [1, 3, 8],
        [2, 5, 8],
        [2, 3, 7],
        [2, 4, 6],
    ];

    #[test]
    fn primality() {
        assert!(is_prime(2));
        assert!(is_prime(3));
        assert!(is_prime(43));
        assert!(!is_prime(1));
        assert!(!is_prime(4));
        assert!(!is_prime(49));
    }

    #[test]
    fn degree_one_family_is_disjoint() {
        let pat = devore_pattern(2, 1, 2).unwrap();
        assert_eq!(pat.num_rows(), 4);
        assert_eq!(pat.support(0), &[0, 2]);
        assert_eq!(pat.support(1), &[1, 3]);
        let report = verify_uff(&pat, 2, 0);
        assert!(report.uff_ok);
        assert_eq!(report.worst_overlap, 0);
    }

    #[test]
    fn p3_degree2_matches_hand_enumeration() {
        let pat = devore_pattern(3, 2, 9).unwrap();
        assert_eq!(pat.num_rows(), 9);
        assert_eq!(pat.num_cols(), 9);
        for (j, expected) in P3_K2.iter().enumerate() {
            assert_eq!(pat.support(j), expected, "column {j}");
        }
        // Independent overlap oracle: count polynomial agreements directly.
        for a in 0..9u64 {
            for b in (a + 1)..9 {
                let (c0a, c1a) = (a / 3, a % 3);
                let (c0b, c1b) = (b / 3, b % 3);
                let agreements = (0..3u64)
                    .filter(|&x| (c0a + c1a * x) % 3 == (c0b + c1b * x) % 3)
                    .count();
                let pattern_overlap = pat
                    .support(a as usize)
                    .iter()
                    .filter(|m| pat.support(b as usize).contains(m))
                    .count();
                assert_eq!(agreements, pattern_overlap);
                assert!(pattern_overlap <= 1);
            }
        }
        let report = verify_uff(&pat, 3, 1);
        assert!(report.uff_ok);
        assert_eq!(report.worst_overlap, 1);
    }

    #[test]
    fn paper_scale_family_verifies() {
        let pat = devore_pattern(43, 3, 7500).unwrap();
        assert_eq!(pat.num_rows(), 1849);
        assert_eq!(pat.num_cols(), 7500);
        assert_eq!(pat.uniform_weight(), Some(43));
        let report = verify_uff(&pat, 43, 2);
        assert!(report.uff_ok, "worst overlap {}", report.worst_overlap);
    }

    #[test]
    fn construction_rejects_bad_parameters() {
        assert!(matches!(devore_pattern(4, 2, 3), Err(Error::NotPrime(4))));
        assert!(matches!(
            devore_pattern(3, 2, 10),
            Err(Error::TooManyColumns { available: 9, .. })
        ));
        assert!(devore_pattern(3, 0, 1).is_err());
    }

    #[test]
    fn zero_padding_appends_empty_rows_only() {
        let pat = devore_pattern(3, 2, 9).unwrap();
        let padded = zero_pad(&pat, 12).unwrap();
        assert_eq!(padded.num_rows(), 12);
        for n in 0..9 {
            assert_eq!(padded.support(n), pat.support(n));
        }
        let same = zero_pad(&pat, 9).unwrap();
        assert_eq!(same, pat);
        assert!(matches!(
            zero_pad(&pat, 8),
            Err(Error::PadBelowRows { requested: 8, rows: 9 })
        ));

        let tall = zero_pad(&devore_pattern(43, 3, 7500).unwrap(), 1875).unwrap();
        assert_eq!(tall.num_rows(), 1875);
        assert!(verify_uff(&tall, 43, 2).uff_ok);
    }

    /// Small uniform family taken from a reference diagram: eight columns of
    /// weight 2 over five rows, encoded as the first eight 2-subsets in
    /// lexicographic order. Any two distinct 2-subsets share at most a row.
    #[test]
    fn two_subset_fixture_is_a_uniform_family() {
        let supports = vec![
            vec![0, 1],
            vec![0, 2],
            vec![0, 3],
            vec![0, 4],
            vec![1, 2],
            vec![1, 3],
            vec![1, 4],
            vec![2, 3],
        ];
        let pat = SparsityPattern::new(5, supports).unwrap();
        let report = verify_uff(&pat, 2, 1);
        assert!(report.uff_ok);
        assert_eq!(report.worst_overlap, 1);
        // Tightening the overlap budget to zero must fail.
        assert!(!verify_uff(&pat, 2, 0).uff_ok);
    }

    #[test]
    fn randomized_entries_have_exact_modulus_and_reproduce() {
        let pat = devore_pattern(5, 2, 25).unwrap();
        let phi_c = std::f64::consts::SQRT_2;
        let a = randomize_entries(&pat, phi_c, 11).unwrap();
        let b = randomize_entries(&pat, phi_c, 11).unwrap();
        let c = randomize_entries(&pat, phi_c, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.magnitude_class(), Some(phi_c));
        for n in 0..a.num_cols() {
            for v in a.column_values(n) {
                assert!((v.norm() - phi_c).abs() <= 1e-12);
            }
        }
        assert!(randomize_entries(&pat, 0.0, 1).is_err());
        assert!(randomize_entries(&pat, -1.0, 1).is_err());
    }

    #[test]
    fn phase_randomness_is_centered() {
        // 10^4 unit draws: each component's sample mean should sit within
        // 3 sigma of zero, sigma = phi_c / sqrt(2 * 10^4).
        let pat = SparsityPattern::new(1, vec![vec![0]; 10_000]).unwrap();
        let mat = randomize_entries(&pat, 1.0, 2024).unwrap();
        let sum: Complex64 = (0..10_000).map(|n| mat.column_values(n)[0]).sum();
        let mean = sum / 10_000.0;
        let sigma = 1.0 / (2.0_f64 * 10_000.0).sqrt();
        assert!(mean.re.abs() < 3.0 * sigma, "re mean {}", mean.re);
        assert!(mean.im.abs() < 3.0 * sigma, "im mean {}", mean.im);
    }

    #[test]
    fn bias_draws_match_contract() {
        let b_c = std::f64::consts::SQRT_2;
        let a = random_bias(529, b_c, 5).unwrap();
        let b = random_bias(529, b_c, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 529);
        for v in a.values() {
            assert!((v.norm() - b_c).abs() <= 1e-12);
        }
        let sum: Complex64 = random_bias(10_000, 1.0, 77).unwrap().values().iter().sum();
        let mean = sum / 10_000.0;
        let sigma = 1.0 / (2.0_f64 * 10_000.0).sqrt();
        assert!(mean.re.abs() < 3.0 * sigma);
        assert!(mean.im.abs() < 3.0 * sigma);
    }

    #[test]
    fn matrix_accessors() {
        let pat = devore_pattern(3, 2, 9).unwrap();
        let mat = randomize_entries(&pat, 1.0, 3).unwrap();
        assert_eq!(mat.entry(0, 0), Some(mat.column_values(0)[0]));
        assert_eq!(mat.entry(1, 0), None);
        assert!(mat.min_modulus() > 0.999999);
        // Mismatched values are rejected.
        let bad = SparseSensingMatrix::from_parts(pat.clone(), vec![vec![]; 9], None);
        assert!(bad.is_err());
        let zeros = vec![vec![Complex64::new(0.0, 0.0); 3]; 9];
        assert!(SparseSensingMatrix::from_parts(pat, zeros, None).is_err());
    }

    fn one_column_matrix(refs: &[Complex64]) -> (SparseSensingMatrix, BiasVector) {
        // Unit entries, bias equal to the requested reference points.
        let rows: Vec<usize> = (0..refs.len()).collect();
        let pat = SparsityPattern::new(refs.len(), vec![rows]).unwrap();
        let values = vec![vec![Complex64::new(1.0, 0.0); refs.len()]];
        let mat = SparseSensingMatrix::from_parts(pat, values, Some(1.0)).unwrap();
        let bias = BiasVector::from_values(refs.to_vec(), None);
        (mat, bias)
    }

    #[test]
    fn assumption2_accepts_a_proper_triangle() {
        let refs = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
        ];
        let (mat, bias) = one_column_matrix(&refs);
        let report = check_assumption2(&mat, &bias, 1e-8, 1_000_000).unwrap();
        assert!(report.assumption2_ok);
        assert_eq!(report.triples_checked, 1);
        // |Im((1-i) * conj(2))| / (|1-i| * |2|) = 2 / (2 sqrt 2) = 1/sqrt(2).
        assert!((report.worst_collinearity - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn assumption2_flags_collinear_references() {
        let refs = [
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
        ];
        let (mat, bias) = one_column_matrix(&refs);
        let report = check_assumption2(&mat, &bias, 1e-8, 1_000_000).unwrap();
        assert!(!report.assumption2_ok);
        assert_eq!(report.worst_collinearity, 0.0);
    }

    #[test]
    fn assumption2_passes_on_random_phase_fillings() {
        let pat = devore_pattern(5, 2, 25).unwrap();
        let mat = randomize_entries(&pat, std::f64::consts::SQRT_2, 9).unwrap();
        let bias = random_bias(25, std::f64::consts::SQRT_2, 9).unwrap();
        let report = check_assumption2(&mat, &bias, 1e-8, 1_000_000).unwrap();
        assert!(report.assumption2_ok);
        // 25 columns, C(5,3) = 10 triples each.
        assert_eq!(report.triples_checked, 250);
    }

    #[test]
    fn assumption2_sampling_is_deterministic() {
        let pat = devore_pattern(11, 2, 121).unwrap();
        let mat = randomize_entries(&pat, 1.0, 4).unwrap();
        let bias = random_bias(121, 1.0, 4).unwrap();
        // C(11,3) * 121 = 19965 total triples; cap below that to force
        // sampling.
        let a = check_assumption2(&mat, &bias, 1e-8, 1000).unwrap();
        let b = check_assumption2(&mat, &bias, 1e-8, 1000).unwrap();
        assert!(a.triples_checked < 19_965);
        assert_eq!(a.triples_checked, b.triples_checked);
        assert_eq!(a.worst_collinearity, b.worst_collinearity);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn small_families_verify(p in prop::sample::select(vec![2u64, 3, 5, 7, 11]),
                                     degree in 1usize..=3) {
                let available = (p as u128).pow(degree as u32);
                let n_cols = available.min(60) as usize;
                let pat = devore_pattern(p, degree, n_cols).unwrap();
                let report = verify_uff(&pat, p as usize, degree - 1);
                prop_assert!(report.uff_ok);
            }

            #[test]
            fn padding_never_touches_supports(extra in 0usize..40, seed in 0u64..1000) {
                let pat = devore_pattern(5, 2, 25).unwrap();
                let padded = zero_pad(&pat, pat.num_rows() + extra).unwrap();
                prop_assert_eq!(padded.num_rows(), 25 + extra);
                for n in 0..25 {
                    prop_assert_eq!(padded.support(n), pat.support(n));
                }
                let mat = randomize_entries(&padded, 1.5, seed).unwrap();
                for n in 0..25 {
                    for v in mat.column_values(n) {
                        prop_assert!((v.norm() - 1.5).abs() <= 1e-12);
                    }
                }
            }
        }
    }
}
