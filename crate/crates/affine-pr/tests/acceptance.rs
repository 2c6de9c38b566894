//! Release gate. Each test checks one acceptance criterion and prints a
//! single `criterion N: PASS/FAIL (...)` line; run
//! `cargo test --test acceptance -- --nocapture` to see all twelve lines
//! together.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::time::Instant;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use affine_pr::analysis::{
    ar_relative_error, error_bound, reference_concentration, relative_error, rotated,
    verify_collinearity_identity,
};
use affine_pr::bench::{
    emit_records_csv, phase_ambiguous_baseline, run_experiment, strip_runtime_column, DistConfig,
    EtaPolicy, ExperimentConfig, MatrixConfig, NoiseConfig, SignalConfig,
};
use affine_pr::model::{apply_noise, generate_signal, measure, NoiseSpec, SignalDist, SparseSignal};
use affine_pr::recovery::{
    eta_range, recover, recover_entry_closed_form, recover_entry_ls, RecoverOptions,
    ReducedSupport, Regime,
};
use affine_pr::sensing::{
    devore_pattern, random_bias, randomize_entries, verify_uff, BiasVector, SparseSensingMatrix,
    SparsityPattern,
};

fn report(criterion: usize, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {status} ({detail})");
    assert!(ok, "criterion {criterion} failed: {detail}");
}

/// A dense single-column instance: every row measures the one column.
fn one_column(
    phi: Vec<Complex64>,
    b: Vec<Complex64>,
) -> (SparseSensingMatrix, BiasVector, ReducedSupport) {
    let l = phi.len();
    let pattern = SparsityPattern::new(l, vec![(0..l).collect()]).unwrap();
    let matrix = SparseSensingMatrix::from_parts(pattern, vec![phi], None).unwrap();
    let bias = BiasVector::from_values(b, None);
    let reduced = ReducedSupport {
        column: 0,
        rows: (0..l).collect(),
    };
    (matrix, bias, reduced)
}

#[test]
fn criterion_01_sensing_pattern_construction() {
    let start = Instant::now();
    let mut ok = true;
    let mut patterns = 0usize;
    for &p in &[3u64, 5, 7, 11] {
        for &degree in &[2usize, 3] {
            let n_cols = (p as usize).pow(degree as u32);
            let pattern = devore_pattern(p, degree, n_cols).unwrap();
            let rep = verify_uff(&pattern, p as usize, degree - 1);
            ok &= rep.uff_ok && rep.worst_overlap <= degree - 1;
            patterns += 1;
        }
    }
    let dt = start.elapsed().as_secs_f64();
    ok &= dt < 5.0;
    report(
        1,
        ok,
        &format!("{patterns} full-width patterns verified exhaustively in {dt:.2}s"),
    );
}

#[test]
fn criterion_02_noise_free_exact_recovery() {
    let start = Instant::now();
    let (p, degree, n, k, trials) = (23u64, 3usize, 2000usize, 5usize, 250usize);
    let pattern = devore_pattern(p, degree, n).unwrap();
    let range = eta_range(Regime::NoiseFree, p as usize, degree - 1, k, 0);
    assert_eq!(range.interval, Some((10.0, 13.0)));
    let eta = range.midpoint().unwrap();
    let dist = SignalDist::ComplexGaussian { variance: 2.0 };
    let mut exact = 0usize;
    let mut max_re: f64 = 0.0;
    for t in 0..trials as u64 {
        let matrix = randomize_entries(&pattern, SQRT_2, t).unwrap();
        let bias = random_bias(pattern.num_rows(), SQRT_2, t).unwrap();
        let signal = generate_signal(n, k, dist, t).unwrap();
        let y = measure(&matrix, &bias, &signal).unwrap();
        let opts = RecoverOptions::new(Regime::NoiseFree, eta);
        let rep = recover(&y, &matrix, &bias, &opts).unwrap();
        if rep.support.indices == signal.support() {
            exact += 1;
        }
        max_re = max_re.max(relative_error(&rep.estimate, &signal).unwrap());
    }
    let dt = start.elapsed().as_secs_f64();
    let ok = exact == trials && max_re <= 1e-8 && dt < 30.0;
    report(
        2,
        ok,
        &format!("support exact {exact}/{trials}, max RE {max_re:.2e}, {dt:.1}s"),
    );
}

#[test]
fn criterion_03_noise_free_at_benchmark_scale() {
    let start = Instant::now();
    let config = ExperimentConfig {
        matrix: vec![MatrixConfig {
            p: 43,
            degree: 3,
            pad_rows: Some(1875),
            phi_c: SQRT_2,
        }],
        bias_c: SQRT_2,
        signal: SignalConfig {
            n: 7500,
            k: vec![5, 15, 25, 35],
            dist: DistConfig::ComplexGaussian { variance: 2.0 },
        },
        noise: NoiseConfig::None,
        eta: EtaPolicy::DMinusOne,
        trials: 50,
        master_seed: 301,
    };
    let result = run_experiment(&config).unwrap();
    let max_re = result.records.iter().map(|r| r.re).fold(0.0f64, f64::max);
    let clean = result.records.iter().filter(|r| r.re <= 1e-8).count();
    let eta_ok = result.records.iter().all(|r| r.eta == 42.0);
    let dt = start.elapsed().as_secs_f64();
    let ok = result.records.len() == 200 && clean == 200 && eta_ok && dt < 300.0;
    report(
        3,
        ok,
        &format!(
            "{clean}/200 trials with RE <= 1e-8 (max {max_re:.2e}) over K in {{5,15,25,35}}, {dt:.1}s"
        ),
    );
}

#[test]
fn criterion_04_sparse_noise_exact_recovery() {
    let start = Instant::now();
    // First the setting whose threshold interval is guaranteed.
    let (p, degree, n, k, kv, trials) = (43u64, 3usize, 7500usize, 3usize, 10usize, 250usize);
    let pattern = devore_pattern(p, degree, n).unwrap();
    let range = eta_range(Regime::Sparse, p as usize, degree - 1, k, kv);
    assert_eq!(range.interval, Some((16.0, 27.0)));
    let eta = range.midpoint().unwrap();
    let dist = SignalDist::ComplexGaussian { variance: 2.0 };
    // Outlier power sits 15 dB above the signal entry power.
    let sigma_v = (10f64.powf(1.5) * dist.mean_square()).sqrt();
    let mut exact = 0usize;
    let mut max_re: f64 = 0.0;
    for t in 0..trials as u64 {
        let matrix = randomize_entries(&pattern, SQRT_2, t).unwrap();
        let bias = random_bias(pattern.num_rows(), SQRT_2, t).unwrap();
        let signal = generate_signal(n, k, dist, t).unwrap();
        let clean = measure(&matrix, &bias, &signal).unwrap();
        let y = apply_noise(&clean, NoiseSpec::Sparse { kv, sigma_v }, t).unwrap();
        let opts = RecoverOptions::new(Regime::Sparse, eta);
        let rep = recover(&y, &matrix, &bias, &opts).unwrap();
        if rep.support.indices == signal.support() {
            exact += 1;
        }
        max_re = max_re.max(relative_error(&rep.estimate, &signal).unwrap());
    }
    // Then much heavier corruption through the benchmark driver.
    let config = ExperimentConfig {
        matrix: vec![MatrixConfig {
            p: 43,
            degree: 3,
            pad_rows: Some(1875),
            phi_c: SQRT_2,
        }],
        bias_c: SQRT_2,
        signal: SignalConfig {
            n: 7500,
            k: vec![15],
            dist: DistConfig::ComplexGaussian { variance: 2.0 },
        },
        noise: NoiseConfig::Sparse {
            kv: vec![50, 100],
            sigma_ratio_db: vec![15.0],
        },
        eta: EtaPolicy::DMinusOne,
        trials: 50,
        master_seed: 402,
    };
    let result = run_experiment(&config).unwrap();
    let max_re_b = result.records.iter().map(|r| r.re).fold(0.0f64, f64::max);
    let dt = start.elapsed().as_secs_f64();
    let ok = exact == trials
        && max_re <= 1e-8
        && result.records.len() == 100
        && max_re_b <= 1e-8
        && dt < 120.0;
    report(
        4,
        ok,
        &format!(
            "{exact}/{trials} exact at K=3, Kv=10 (max RE {max_re:.2e}); \
             100 trials at K=15, Kv in {{50,100}} max RE {max_re_b:.2e}; {dt:.1}s"
        ),
    );
}

#[test]
fn criterion_05_bounded_noise_bound_validity() {
    let start = Instant::now();
    let (p, degree, n, k, trials) = (43u64, 3usize, 7500usize, 11usize, 250usize);
    let eps: f64 = 1e-10;
    let radius = 5.0;
    // The support guarantee needs every nonzero modulus to clear
    // b_max/phi_min + sqrt((b_max/phi_min)^2 + 2 eps/phi_min^2); with both
    // moduli sqrt(2) that floor is barely above 2, far under the radius.
    assert!(radius >= 1.0 + (1.0 + eps).sqrt());
    let pattern = devore_pattern(p, degree, n).unwrap();
    let range = eta_range(Regime::Bounded, p as usize, degree - 1, k, 0);
    assert_eq!(range.interval, Some((22.0, 23.0)));
    let eta = range.midpoint().unwrap();
    let dist = SignalDist::Circle { radius };
    let mut exact = 0usize;
    let mut within = 0usize;
    let mut max_gap: f64 = 0.0;
    let mut min_margin = f64::INFINITY;
    for t in 0..trials as u64 {
        let matrix = randomize_entries(&pattern, SQRT_2, t).unwrap();
        let bias = random_bias(pattern.num_rows(), SQRT_2, t).unwrap();
        let signal = generate_signal(n, k, dist, t).unwrap();
        let clean = measure(&matrix, &bias, &signal).unwrap();
        let y = apply_noise(&clean, NoiseSpec::Bounded { eps }, t).unwrap();
        let opts = RecoverOptions::new(Regime::Bounded, eta).with_eps(eps);
        let rep = recover(&y, &matrix, &bias, &opts).unwrap();
        if rep.support.indices == signal.support() {
            exact += 1;
        }
        let re = relative_error(&rep.estimate, &signal).unwrap();
        let ar = ar_relative_error(&rep.estimate, &signal).unwrap();
        max_gap = max_gap.max((re - ar).abs());
        let err = re * signal.norm();
        let bound = error_bound(&matrix, &bias, signal.support(), eps)
            .unwrap()
            .bound_value;
        if err < bound {
            within += 1;
        }
        min_margin = min_margin.min(bound - err);
    }
    let dt = start.elapsed().as_secs_f64();
    let ok = exact == trials && within == trials && max_gap <= 1e-10 && dt < 120.0;
    report(
        5,
        ok,
        &format!(
            "support exact {exact}/{trials}, error under bound {within}/{trials} \
             (min margin {min_margin:.2e}), max |RE - AR-RE| {max_gap:.2e}, {dt:.1}s"
        ),
    );
}

#[test]
fn criterion_06_closed_form_matches_least_squares() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let l = rng.random_range(4..=8usize);
        let phi: Vec<Complex64> = (0..l)
            .map(|_| Complex64::from_polar(SQRT_2, TAU * rng.random::<f64>()))
            .collect();
        let b: Vec<Complex64> = (0..l)
            .map(|_| Complex64::from_polar(SQRT_2, TAU * rng.random::<f64>()))
            .collect();
        let s0 = Complex64::from_polar(0.5 + 2.5 * rng.random::<f64>(), TAU * rng.random::<f64>());
        let u: Vec<Complex64> = (0..l).map(|m| b[m] / phi[m]).collect();
        let (matrix, bias, reduced) = one_column(phi, b);
        let signal = SparseSignal::new(1, vec![0], vec![s0]).unwrap();
        let y = measure(&matrix, &bias, &signal).unwrap();
        let ls = recover_entry_ls(&y, &matrix, &bias, 0, &reduced).unwrap();
        // Solve the closed form on the best-conditioned row triple.
        let mut rows = [0usize, 1, 2];
        let mut best = -1.0f64;
        for i in 0..l {
            for j in (i + 1)..l {
                for m in (j + 1)..l {
                    let area = ((u[i] - u[j]) * (u[i] - u[m]).conj()).im.abs();
                    if area > best {
                        best = area;
                        rows = [i, j, m];
                    }
                }
            }
        }
        let cf = recover_entry_closed_form(&y, &matrix, &bias, 0, rows).unwrap();
        let gap = (cf - ls).norm() / s0.norm().max(1.0);
        worst = worst.max(gap);
        ok &= gap <= 1e-10;
    }
    report(
        6,
        ok,
        &format!("1000 clean columns, worst normalized estimator gap {worst:.2e}"),
    );
}

#[test]
fn criterion_07_collinearity_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let l = rng.random_range(3..=12usize);
        let phi: Vec<Complex64> = (0..l)
            .map(|_| Complex64::from_polar(0.5 + 1.5 * rng.random::<f64>(), TAU * rng.random::<f64>()))
            .collect();
        let b: Vec<Complex64> = (0..l)
            .map(|_| Complex64::from_polar(0.5 + 1.5 * rng.random::<f64>(), TAU * rng.random::<f64>()))
            .collect();
        let (matrix, bias, reduced) = one_column(phi, b);
        let check = verify_collinearity_identity(&matrix, &bias, 0, &reduced).unwrap();
        worst = worst.max(check.gap);
        ok &= check.gap < 1e-9;
    }
    // Hand instance with references 0, 1, i: both sides are exactly 1/2.
    let phi = vec![Complex64::new(1.0, 0.0); 3];
    let b = vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
    ];
    let (matrix, bias, reduced) = one_column(phi, b);
    let hand = verify_collinearity_identity(&matrix, &bias, 0, &reduced).unwrap();
    ok &= (hand.lhs - 0.5).abs() <= 1e-12 && (hand.rhs - 0.5).abs() <= 1e-12;
    report(
        7,
        ok,
        &format!(
            "1000 random columns, worst identity gap {worst:.2e}; \
             hand instance sides {:.12} and {:.12}",
            hand.lhs, hand.rhs
        ),
    );
}

#[test]
fn criterion_08_amplification_factor_floor() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut ok = true;
    let mut min_ratio = f64::INFINITY;
    for _ in 0..1000 {
        let l = rng.random_range(3..=10usize);
        let phi: Vec<Complex64> = (0..l)
            .map(|_| Complex64::from_polar(0.5 + 1.5 * rng.random::<f64>(), TAU * rng.random::<f64>()))
            .collect();
        let b: Vec<Complex64> = (0..l)
            .map(|_| Complex64::from_polar(0.5 + 1.5 * rng.random::<f64>(), TAU * rng.random::<f64>()))
            .collect();
        let (matrix, bias, _) = one_column(phi, b);
        let rep = error_bound(&matrix, &bias, &[0], 1.0).unwrap();
        let (_, factor) = rep.per_column_factor[0];
        min_ratio = min_ratio.min(factor / rep.lower_bound);
        ok &= factor >= rep.lower_bound * (1.0 - 1e-12);
    }
    // Equality case: one real modulus everywhere and references at the
    // fourth roots of unity, so the mean and the self inner product both
    // vanish and the factor sits exactly on the floor.
    let c = 1.5;
    let rho = 0.7;
    let phi = vec![Complex64::new(c, 0.0); 4];
    let b: Vec<Complex64> = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]
        .iter()
        .map(|&(re, im)| Complex64::new(re, im) * (c * rho))
        .collect();
    let (matrix, bias, _) = one_column(phi, b);
    let eq = error_bound(&matrix, &bias, &[0], 1.0).unwrap();
    let (_, eq_factor) = eq.per_column_factor[0];
    let eq_gap = (eq_factor - eq.lower_bound).abs();
    ok &= eq_gap <= 1e-9 && eq.delta_t.abs() <= 1e-9;
    report(
        8,
        ok,
        &format!("1000 varied-modulus columns, min factor/floor ratio {min_ratio:.6}; equality gap {eq_gap:.2e}"),
    );
}

#[test]
fn criterion_09_phase_ambiguous_baseline() {
    let truth = generate_signal(256, 12, SignalDist::ComplexGaussian { variance: 2.0 }, 9).unwrap();
    let trials = 10_000usize;
    let mut sum = 0.0;
    let mut max_ar: f64 = 0.0;
    for t in 0..trials as u64 {
        let spun = phase_ambiguous_baseline(&truth, t);
        sum += relative_error(&spun, &truth).unwrap();
        max_ar = max_ar.max(ar_relative_error(&spun, &truth).unwrap());
    }
    let mean = sum / trials as f64;
    let target = 4.0 / PI;
    let rel_dev = (mean - target).abs() / target;
    let ok = rel_dev <= 0.01 && max_ar <= 1e-12;
    report(
        9,
        ok,
        &format!(
            "mean RE {mean:.4} vs 4/pi {target:.4} ({:.2}% off), max AR-RE {max_ar:.2e}",
            rel_dev * 100.0
        ),
    );
}

#[test]
fn criterion_10_rotation_search_oracle() {
    let dist = SignalDist::ComplexGaussian { variance: 2.0 };
    let mut worst: f64 = 0.0;
    for pair in 0..100u64 {
        let est = generate_signal(64, 6, dist, 1000 + 2 * pair).unwrap();
        let truth = generate_signal(64, 6, dist, 1001 + 2 * pair).unwrap();
        let closed = ar_relative_error(&est, &truth).unwrap();
        let mut grid = f64::INFINITY;
        for j in 0..10_000 {
            let omega = TAU * j as f64 / 10_000.0;
            grid = grid.min(relative_error(&rotated(&est, omega), &truth).unwrap());
        }
        worst = worst.max((closed - grid).abs());
    }
    let ok = worst <= 1e-6;
    report(
        10,
        ok,
        &format!("100 pairs, worst gap between closed form and a 10^4-point grid {worst:.2e}"),
    );
}

#[test]
fn criterion_11_reference_concentration_trend() {
    let rows = reference_concentration(1.0, &[8, 16, 32, 64], 500, 11).unwrap();
    let ok = rows.windows(2).all(|w| w[1].p95 <= w[0].p95);
    let path: Vec<String> = rows
        .iter()
        .map(|r| format!("{}:{:.3}", r.size, r.p95))
        .collect();
    report(
        11,
        ok,
        &format!("p95 factor deviation by reference count: {}", path.join(" ")),
    );
}

#[test]
fn criterion_12_benchmark_determinism() {
    let config = ExperimentConfig {
        matrix: vec![MatrixConfig {
            p: 11,
            degree: 2,
            pad_rows: None,
            phi_c: SQRT_2,
        }],
        bias_c: SQRT_2,
        signal: SignalConfig {
            n: 121,
            k: vec![2, 3],
            dist: DistConfig::Circle { radius: 5.0 },
        },
        noise: NoiseConfig::Bounded {
            eps: vec![],
            snr_db: vec![30.0],
        },
        eta: EtaPolicy::TheoremMidpoint,
        trials: 5,
        master_seed: 12,
    };
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let eight = rayon::ThreadPoolBuilder::new()
        .num_threads(8)
        .build()
        .unwrap();
    let a = single.install(|| run_experiment(&config)).unwrap();
    let b = single.install(|| run_experiment(&config)).unwrap();
    let c = eight.install(|| run_experiment(&config)).unwrap();
    let ca = strip_runtime_column(&emit_records_csv(&a.records));
    let cb = strip_runtime_column(&emit_records_csv(&b.records));
    let cc = strip_runtime_column(&emit_records_csv(&c.records));
    let ok = ca == cb && ca == cc && !a.records.is_empty();
    report(
        12,
        ok,
        &format!(
            "records byte-identical across a repeat and 1 vs 8 threads ({} records)",
            a.records.len()
        ),
    );
}
