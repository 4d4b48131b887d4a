// Rejection rates of the plug-in test under the model and under a quadratic
// alternative. Small replicate counts; the CLI `verify` runs the full study.

use regbridge::fixtures;
use regbridge::mclab::{size_power_study, RejectionTable, StudyConfig};

pub fn run_example() -> regbridge::Result<(RejectionTable, RejectionTable)> {
    let cfg = StudyConfig {
        replicates: 200,
        inner_replicates: 500,
        grid: 50,
        seed: 3,
        ..StudyConfig::default()
    };
    let size = size_power_study(&fixtures::single_uniform(1.0), None, &[100, 300], &cfg)?;
    let (model, breach) = fixtures::power_alternative();
    let power = size_power_study(&model, Some(&breach), &[100, 300], &cfg)?;
    for (name, table) in [("size", &size), ("power", &power)] {
        for row in &table.rows {
            println!("{name:>5} n = {:>3}: {}/{} rejected, rate {:.3}", row.n, row.rejections, row.replicates, row.rate);
        }
    }
    Ok((size, power))
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
