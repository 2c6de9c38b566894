//! Exact recovery when a few measurements are corrupted by outliers.
//!
//! Each measurement pins the signal entry to a circle in the complex
//! plane. Outliers move their circles, but the true value still lies on
//! every clean one, so the candidate with the most circle memberships
//! wins and the corrupted rows are simply outvoted.

use affine_pr::analysis::relative_error;
use affine_pr::model::{apply_noise, generate_signal, measure, NoiseSpec, SignalDist};
use affine_pr::recovery::{eta_range, recover, RecoverOptions, Regime};
use affine_pr::sensing::{devore_pattern, random_bias, randomize_entries};

fn main() -> affine_pr::Result<()> {
    let (p, degree, n, k) = (43u64, 3usize, 7500usize, 3usize);
    let d = p as usize;
    let kv = 10; // corrupted measurement count
    let pattern = devore_pattern(p, degree, n)?;
    let matrix = randomize_entries(&pattern, 2f64.sqrt(), 4)?;
    let bias = random_bias(pattern.num_rows(), 2f64.sqrt(), 4)?;

    let dist = SignalDist::ComplexGaussian { variance: 2.0 };
    let signal = generate_signal(n, k, dist, 4)?;
    let clean = measure(&matrix, &bias, &signal)?;

    // Outlier power 15 dB above the signal entry power: far from subtle.
    let sigma_v = (10f64.powf(1.5) * dist.mean_square()).sqrt();
    let y = apply_noise(&clean, NoiseSpec::Sparse { kv, sigma_v }, 4)?;
    let moved = (0..y.len())
        .filter(|&m| (y.value(m) - clean.value(m)).abs() > 0.0)
        .count();
    println!("{moved} of {} measurements corrupted (sigma_v = {sigma_v:.1})", y.len());

    // The vote threshold interval shrinks by the outlier budget on both
    // sides but stays usable at this sparsity.
    let range = eta_range(Regime::Sparse, d, degree - 1, k, kv);
    let (lo, hi) = range.interval.unwrap();
    let eta = range.midpoint().unwrap();
    println!("vote threshold interval [{lo}, {hi}), using {eta}");

    let opts = RecoverOptions::new(Regime::Sparse, eta);
    let report = recover(&y, &matrix, &bias, &opts)?;
    println!(
        "support exact: {}",
        report.support.indices == signal.support()
    );
    for entry in &report.per_entry {
        println!(
            "  column {}: {} candidates on {} isolated rows, picked one with outcome {}",
            entry.column, entry.candidates, entry.isolated_rows, entry.outcome
        );
    }
    let re = relative_error(&report.estimate, &signal)?;
    println!("relative error {re:.3e}: the majority never saw the outliers");
    Ok(())
}
