//! Replication harness against the Gaussian limit.

use jamlab::mc::{clt_check, run_replications, ModelSpec};
use jamlab::meanfield::{jamming_fraction, variance};
use jamlab::Params;

const ALPHA_2: f64 = 0.586503;

fn limits(c: f64, alpha: f64) -> (f64, f64) {
    let q = Params::mean_field(c, alpha).unwrap();
    (jamming_fraction(&q, 1e-10).unwrap(), variance(&q, 1e-10).unwrap().vstar)
}

#[test]
fn scaled_variance_matches_clt_variance() {
    let p = Params::new(1000, 20.0, ALPHA_2, 1).unwrap();
    let s = run_replications(&ModelSpec::Explore(p), 2000, 5, 0).unwrap();
    let (j, v) = limits(20.0, ALPHA_2);
    let report = clt_check(&s, &p, j, v);
    let ratio = report.variance_ratio.unwrap();
    assert!((0.8..=1.2).contains(&ratio), "{ratio}");
    assert!((s.mean - 0.0786).abs() < 0.002, "{}", s.mean);
    assert_eq!(s.counts.iter().sum::<u64>(), 2000);
    assert!(!report.zero_variance);
}

#[test]
fn standardized_sample_passes_ks() {
    let p = Params::new(1000, 10.0, ALPHA_2, 1).unwrap();
    let s = run_replications(&ModelSpec::Explore(p), 2000, 6, 0).unwrap();
    let (j, v) = limits(10.0, ALPHA_2);
    let report = clt_check(&s, &p, j, v);
    let ks = report.ks_statistic.unwrap();
    assert!(ks < report.ks_critical_1pct, "{ks} >= {}", report.ks_critical_1pct);
    assert!((report.variance_to_mean - v / j).abs() < 1e-15);
}

#[test]
fn stderr_shrinks_with_replications() {
    let p = Params::new(500, 10.0, ALPHA_2, 1).unwrap();
    let small = run_replications(&ModelSpec::Explore(p), 1000, 7, 0).unwrap();
    let large = run_replications(&ModelSpec::Explore(p), 16_000, 7, 0).unwrap();
    let ratio = small.stderr / large.stderr;
    assert!((ratio / 4.0 - 1.0).abs() < 0.2, "{ratio}");
    assert!((small.stderr - (small.var / 1000.0).sqrt()).abs() < 1e-15);
}

#[test]
fn finite_size_bias_decreases_with_n() {
    let (j, _) = limits(10.0, ALPHA_2);
    let bias: Vec<f64> = [500, 1000, 2000]
        .iter()
        .map(|&n| {
            let p = Params::new(n, 10.0, ALPHA_2, 1).unwrap();
            let s = run_replications(&ModelSpec::Explore(p), 100_000, 8, 0).unwrap();
            (s.mean - j).abs()
        })
        .collect();
    assert!(bias[0] > bias[1] && bias[1] > bias[2], "{bias:?}");
}
