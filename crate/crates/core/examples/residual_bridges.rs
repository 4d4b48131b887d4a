// Residual bridges along each ordering and the omega-squared statistic.

use regbridge::bridge::{omega_sq, residual_bridge};
use regbridge::dataset::sample_h0;
use regbridge::fixtures;
use regbridge::ols::fit_lse;
use regbridge::ordering::all_orderings;

pub fn run_example() -> regbridge::Result<f64> {
    let data = sample_h0(&fixtures::two_uniform(1.0), 200, 3)?;
    let fit = fit_lse(&data)?;
    println!("theta_hat = {:.4?}, sigma2_hat = {:.4}", fit.theta_hat.as_slice(), fit.sigma2_hat);

    let mut bridges = Vec::new();
    for view in all_orderings(&data, &fit)? {
        let b = residual_bridge(&view, fit.sigma2_hat)?;
        let name = &data.regressor_names()[b.column];
        let peak = b.values().iter().fold(0.0f64, |m, z| m.max(z.abs()));
        println!(
            "ordering {name}: Z(1/4) = {:+.4}, Z(1/2) = {:+.4}, max |Z| = {peak:.4}, Z(1) = {:.1e}",
            b.evaluate(0.25)?,
            b.evaluate(0.5)?,
            b.endpoint()
        );
        bridges.push(b);
    }
    let stat = omega_sq(&bridges)?;
    println!("omega^2 = {stat:.5}");

    // plot data for the first bridge
    let mut csv = Vec::new();
    bridges[0].write_csv(&mut csv)?;
    println!("{}", String::from_utf8_lossy(&csv).lines().take(4).collect::<Vec<_>>().join("\n"));
    Ok(stat)
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
