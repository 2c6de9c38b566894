//! The geometry behind the error bound, checked numerically.
//!
//! For each supported column the bias values seen through that column's
//! matrix entries form a set of reference points. Three facts about those
//! points are verified here on a live instance:
//!
//!   1. the collinearity of the centered references equals one minus twice
//!      the normalized residual of their best-fit line, so "aligned
//!      references" and "large amplification" are literally the same thing;
//!   2. the per-column amplification factor never drops below
//!      phi_min / b_max, and a hand-built bias meets that floor exactly;
//!   3. with more references the factor concentrates at its optimum, which
//!      shows up as a shrinking 95th percentile of the deviation.

use affine_pr::analysis::{error_bound, reference_concentration, verify_collinearity_identity};
use affine_pr::model::{generate_signal, SignalDist};
use affine_pr::recovery::reduced_support;
use affine_pr::sensing::{devore_pattern, random_bias, randomize_entries};
use num_complex::Complex64;

fn main() -> affine_pr::Result<()> {
    let (p, degree, n, k) = (23u64, 3usize, 2000usize, 4usize);
    let pattern = devore_pattern(p, degree, n)?;
    let matrix = randomize_entries(&pattern, 2f64.sqrt(), 9)?;
    let bias = random_bias(pattern.num_rows(), 2f64.sqrt(), 9)?;
    let signal = generate_signal(n, k, SignalDist::ComplexGaussian { variance: 2.0 }, 9)?;

    println!("collinearity vs line-fit residual, per support column:");
    for &col in signal.support() {
        let reduced = reduced_support(matrix.pattern(), col, signal.support())?;
        let check = verify_collinearity_identity(&matrix, &bias, col, &reduced)?;
        println!(
            "  column {col}: lhs {:.12}, rhs {:.12}, gap {:.1e}",
            check.lhs, check.rhs, check.gap
        );
    }

    let bound = error_bound(&matrix, &bias, signal.support(), 1e-3)?;
    println!("\nper-column amplification factors (floor {:.4}):", bound.lower_bound);
    for (col, factor) in &bound.per_column_factor {
        println!("  column {col}: {factor:.4}");
    }

    // A bias whose references sit at the fourth roots of unity has zero
    // mean and zero self inner product, which is exactly the equality case.
    let rho = 0.7;
    let c = 1.5;
    let phi = vec![Complex64::new(c, 0.0); 4];
    let refs = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
    let b: Vec<Complex64> = refs
        .iter()
        .map(|&(re, im)| Complex64::new(re, im) * (c * rho))
        .collect();
    let pattern4 = affine_pr::sensing::SparsityPattern::new(4, vec![vec![0, 1, 2, 3]])?;
    let matrix4 = affine_pr::sensing::SparseSensingMatrix::from_parts(pattern4, vec![phi], None)?;
    let bias4 = affine_pr::sensing::BiasVector::from_values(b, None);
    let eq = error_bound(&matrix4, &bias4, &[0], 1.0)?;
    let (_, factor) = eq.per_column_factor[0];
    println!(
        "\nhand-built equality case: factor {factor:.9} vs floor {:.9}",
        eq.lower_bound
    );

    println!("\nconcentration of the factor around its optimum:");
    for row in reference_concentration(1.0, &[8, 16, 32, 64, 128], 400, 9)? {
        println!("  {} references: p95 deviation {:.4}", row.size, row.p95);
    }
    Ok(())
}
