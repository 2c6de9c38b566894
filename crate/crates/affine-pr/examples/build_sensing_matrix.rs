//! Build a deterministic column-sparse sensing matrix and check the two
//! structural properties recovery relies on: uniform column weight with a
//! small pairwise overlap, and reference triples that are never collinear.

use affine_pr::sensing::{
    check_assumption2, devore_pattern, random_bias, randomize_entries, verify_uff, zero_pad,
};

fn main() -> affine_pr::Result<()> {
    // A prime p gives p^2 rows; columns are indexed by polynomials over the
    // p-element field with degree below 3, so the pattern can host up to p^3
    // columns and any two columns share at most 2 rows.
    let p = 11u64;
    let degree = 3;
    let n_cols = 500;
    let pattern = devore_pattern(p, degree, n_cols)?;
    println!(
        "pattern: {} rows x {} columns, {} rows per column",
        pattern.num_rows(),
        pattern.num_cols(),
        pattern.uniform_weight().unwrap()
    );

    // The check is exhaustive over all column pairs.
    let report = verify_uff(&pattern, p as usize, degree - 1);
    println!(
        "uniform weight and overlap ok: {} (worst overlap {})",
        report.uff_ok, report.worst_overlap
    );

    // Sweep experiments sometimes want a fixed row budget across several
    // primes; padding appends rows that measure nothing.
    let padded = zero_pad(&pattern, 150)?;
    println!("padded to {} rows", padded.num_rows());

    // Entries keep one modulus and carry random phases, so the matrix is
    // deterministic given the seed.
    let matrix = randomize_entries(&pattern, 2f64.sqrt(), 7)?;
    let bias = random_bias(pattern.num_rows(), 2f64.sqrt(), 7)?;

    // Per-entry recovery intersects circles whose centers are -b_m/phi_mn.
    // That only works when no reference triple of a column degenerates onto
    // a line, so sample triples and report the worst normalized area.
    let geometry = check_assumption2(&matrix, &bias, 1e-9, 200_000)?;
    println!(
        "reference geometry ok: {} (worst normalized triangle area {:.3e} over {} triples)",
        geometry.assumption2_ok, geometry.worst_collinearity, geometry.triples_checked
    );
    Ok(())
}
