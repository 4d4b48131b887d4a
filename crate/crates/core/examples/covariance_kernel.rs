// The limit covariance K_ij(s,t): closed form for a uniform design against
// the plug-in estimate from a sample of the same model.

use regbridge::covmodel::{analytic_covariance, CovarianceModel};
use regbridge::dataset::sample_h0;
use regbridge::fixtures;

pub fn run_example() -> regbridge::Result<f64> {
    let model = fixtures::two_uniform(1.0);
    let exact = analytic_covariance(&model)?;
    let data = sample_h0(&model, 5000, 2)?;
    let plug_in = CovarianceModel::empirical(&data)?;

    println!("G^-1 =\n{:.3}", exact.gram_inv);
    let mut worst = 0.0f64;
    for (i, j) in [(0, 0), (0, 1), (1, 1)] {
        for (s, t) in [(0.25, 0.25), (0.5, 0.5), (0.25, 0.75), (1.0, 0.5)] {
            let (a, b) = (exact.khat(i, j, s, t)?, plug_in.khat(i, j, s, t)?);
            worst = worst.max((a - b).abs());
            println!("K_{}{}({s}, {t}): exact {a:+.5}, plug-in {b:+.5}", i + 1, j + 1);
        }
    }
    println!("largest gap {worst:.5}");
    Ok(worst)
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
