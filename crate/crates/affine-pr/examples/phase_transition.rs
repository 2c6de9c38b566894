//! A small Monte-Carlo sweep: success rate as a function of sparsity and
//! measurement count, the classic phase-transition picture.
//!
//! The whole sweep is deterministic: every trial derives its own random
//! streams from the master seed and its global index, so reruns (at any
//! thread count) reproduce the records byte for byte.

use affine_pr::bench::{
    phase_transition_grid, run_experiment, DistConfig, EtaPolicy, ExperimentConfig, MatrixConfig,
    NoiseConfig, SignalConfig,
};

fn main() -> affine_pr::Result<()> {
    // Two row budgets (two primes) against a ladder of sparsities.
    let config = ExperimentConfig {
        matrix: vec![
            MatrixConfig {
                p: 11,
                degree: 3,
                pad_rows: None,
                phi_c: 2f64.sqrt(),
            },
            MatrixConfig {
                p: 17,
                degree: 3,
                pad_rows: None,
                phi_c: 2f64.sqrt(),
            },
        ],
        bias_c: 2f64.sqrt(),
        signal: SignalConfig {
            n: 1000,
            k: vec![2, 4, 6, 8, 10, 12],
            dist: DistConfig::ComplexGaussian { variance: 2.0 },
        },
        noise: NoiseConfig::None,
        eta: EtaPolicy::TheoremMidpoint,
        trials: 40,
        master_seed: 2024,
    };
    let result = run_experiment(&config)?;
    for w in &result.warnings {
        println!("note: {w}");
    }
    println!(
        "{} trials over {} sweep points\n",
        result.records.len(),
        result.summaries.len()
    );

    println!("success rate by (K, rows):");
    let grid = phase_transition_grid(&result);
    let mut rows: Vec<usize> = grid.iter().map(|c| c.m_rows).collect();
    rows.sort_unstable();
    rows.dedup();
    print!("      ");
    for m in &rows {
        print!("  M={m:<5}");
    }
    println!();
    let mut ks: Vec<usize> = grid.iter().map(|c| c.k).collect();
    ks.sort_unstable();
    ks.dedup();
    for k in ks {
        print!("K={k:<4}");
        for &m in &rows {
            match grid.iter().find(|c| c.k == k && c.m_rows == m) {
                Some(cell) => print!("  {:>7.2}", cell.success_rate),
                None => print!("  {:>7}", "-"),
            }
        }
        println!();
    }

    println!("\nper-point mean relative error:");
    for s in &result.summaries {
        println!(
            "  p={:<3} K={:<2} eta={:<5} mean RE {:.2e} (exact support in {:.0}% of trials)",
            s.p,
            s.k,
            s.eta,
            s.mean_re,
            100.0 * s.support_exact_rate
        );
    }
    Ok(())
}
