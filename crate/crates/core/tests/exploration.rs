//! The exploration chain: conservation and the hitting-time bound.

use jamlab::explore::{explore_jam, explore_trace};
use jamlab::{Params, RngStream};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conservation_at_every_step(n in 1usize..3000, c in 0.0f64..40.0, alpha in 0.0f64..=1.0, seed in any::<u64>()) {
        let p = Params::new(n, c, alpha, 1).unwrap();
        prop_assume!(p.global_edge_prob() <= 1.0);
        let (jam, trace) = explore_trace(&p, &mut RngStream::new(seed, 0)).unwrap();
        for s in &trace {
            let parts = s.partition(n);
            prop_assert_eq!(parts.total(), n as i64);
            prop_assert!(parts.all_non_negative());
            prop_assert!(s.x <= s.y && s.y as i64 <= n as i64 - s.t as i64);
        }
        prop_assert_eq!(trace.last().unwrap().x, 0);
        prop_assert_eq!(jam.jam_count as u64, trace.last().unwrap().t);
    }
}

#[test]
fn jam_fraction_stays_below_inverse_mean_household() {
    let n = 10_000;
    for &c in &[5.0, 10.0, 20.0, 30.0] {
        for &alpha in &[0.0, 0.3, 0.586503, 1.0] {
            let p = Params::new(n, c, alpha, 1).unwrap();
            for seed in 0..5 {
                let jam = explore_jam(&p, &mut RngStream::new(seed, 0)).unwrap();
                assert!(jam.jam_fraction < 1.0 / p.mu() + 0.05, "c = {c}, alpha = {alpha}");
            }
        }
    }
}

#[test]
fn zero_density_activates_everything() {
    let p = Params::new(777, 0.0, 0.4, 1).unwrap();
    assert_eq!(explore_jam(&p, &mut RngStream::new(0, 0)).unwrap().jam_count, 777);
}
