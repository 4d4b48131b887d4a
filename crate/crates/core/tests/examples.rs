//! Every example runs and produces sensible output.

macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(adequacy_test, "adequacy_test.rs");
example!(residual_bridges, "residual_bridges.rs");
example!(covariance_kernel, "covariance_kernel.rs");
example!(null_distribution, "null_distribution.rs");
example!(limit_checks, "limit_checks.rs");
example!(size_power, "size_power.rs");
example!(csv_io, "csv_io.rs");

#[test]
fn adequacy_test_flags_the_quadratic() {
    let rows = adequacy_test::run_example().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].2, "quadratic alternative not rejected: p = {}", rows[1].1);
}

#[test]
fn residual_bridges_statistic_is_positive() {
    assert!(residual_bridges::run_example().unwrap() > 0.0);
}

#[test]
fn covariance_kernel_plug_in_is_close() {
    assert!(covariance_kernel::run_example().unwrap() < 0.02);
}

#[test]
fn null_distribution_matches_brownian_bridge() {
    for (_, mean, q95) in null_distribution::run_example().unwrap() {
        assert!((mean - 1.0 / 6.0).abs() < 0.01);
        assert!((q95 - 0.4614).abs() < 0.03);
    }
}

#[test]
fn limit_checks_are_within_tolerance() {
    let tol = regbridge::fixtures::tolerances();
    for r in limit_checks::run_example().unwrap() {
        assert!(r.max_abs_error < 2.0 * tol.lemma1.max_abs_error, "{}: {}", r.experiment, r.max_abs_error);
    }
}

#[test]
fn size_power_orders_rates() {
    let (size, power) = size_power::run_example().unwrap();
    assert!(size.rows.iter().all(|r| r.rate < 0.15));
    assert!(power.rows[1].rate > power.rows[0].rate);
}

#[test]
fn csv_io_round_trips() {
    assert_eq!(csv_io::run_example().unwrap(), 5);
}
