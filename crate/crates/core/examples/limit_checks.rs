// Monte Carlo checks of the covariance limits for the empirical field, the
// concomitant partial sums, and the residual bridges.

use regbridge::fixtures;
use regbridge::mclab::{interior_points, product_grid, verify_lemma1, verify_lemma2, verify_theorem2, VerificationReport};

pub fn run_example() -> regbridge::Result<Vec<VerificationReport>> {
    let (n, reps, seed) = (300, 500, 5);
    let reports = vec![
        verify_lemma1(&fixtures::lemma_null(), n, reps, &product_grid(&interior_points(3), 2), seed)?,
        verify_lemma1(&fixtures::lemma_centered_mean(), n, reps, &[vec![1.0, 1.0], vec![0.5, 0.5]], seed)?,
        verify_lemma2(&fixtures::lemma_null(), n, reps, &interior_points(5), &[(0, 0), (0, 1)], seed)?,
        verify_theorem2(&fixtures::two_uniform(1.0), n, reps, &[0.2, 0.4, 0.6, 0.8, 1.0], seed)?,
    ];
    for r in &reports {
        let worst = r.cells.iter().max_by(|a, b| a.abs_error.total_cmp(&b.abs_error));
        println!(
            "{:>8}: {} cells, max error {:.4}{}",
            r.experiment,
            r.cells.len(),
            r.max_abs_error,
            worst.map(|c| format!(" at {} (target {:.4})", c.label, c.target)).unwrap_or_default()
        );
    }
    Ok(reports)
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
