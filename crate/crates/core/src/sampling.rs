//! Exact discrete variates drawn from an [`RngStream`].
//!
//! The algorithms are part of the reproducibility contract (see
//! [`crate::rng`]); changing one changes every downstream sequence.
//!
//! - Poisson: sequential inversion for mean <= 10, otherwise Hormann's
//!   transformed rejection with squeeze (PTRS).
//! - Binomial: reduced to `p <= 1/2` by symmetry; sequential inversion for
//!   `n p < 10`, otherwise Hormann's BTRS transformed rejection.
//! - Hypergeometric: sequential draws without replacement when the sample has
//!   at most 64 items, otherwise inversion over a pmf table built outward from
//!   the mode with the ratio recurrence.

use crate::error::{domain, Result};
use crate::rng::RngStream;
use crate::special::ln_factorial;

const POISSON_INVERSION_MAX: f64 = 10.0;
const BINOMIAL_INVERSION_MAX: f64 = 10.0;
const HYPERGEOMETRIC_SEQUENTIAL_MAX: u64 = 64;

/// Poisson variate with the given mean (`mean >= 0`).
pub fn poisson(mean: f64, rng: &mut RngStream) -> u64 {
    debug_assert!(mean >= 0.0 && mean.is_finite());
    if mean <= 0.0 {
        0
    } else if mean <= POISSON_INVERSION_MAX {
        poisson_inversion(mean, rng)
    } else {
        poisson_ptrs(mean, rng)
    }
}

fn poisson_inversion(mean: f64, rng: &mut RngStream) -> u64 {
    let u = rng.uniform();
    let mut k = 0u64;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u >= cdf {
        k += 1;
        p *= mean / k as f64;
        let next = cdf + p;
        // Tail mass below rounding: u sits in the last representable gap.
        if next == cdf {
            break;
        }
        cdf = next;
    }
    k
}

fn poisson_ptrs(mean: f64, rng: &mut RngStream) -> u64 {
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.uniform() - 0.5;
        let v = rng.uniform();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        let rhs = -mean + k * loglam - ln_factorial(k as u64);
        if lhs <= rhs {
            return k as u64;
        }
    }
}

/// Binomial variate with `trials` trials and success probability `p`.
pub fn binomial(trials: u64, p: f64, rng: &mut RngStream) -> u64 {
    debug_assert!((0.0..=1.0).contains(&p));
    if trials == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return trials;
    }
    if p > 0.5 {
        return trials - binomial(trials, 1.0 - p, rng);
    }
    if trials as f64 * p < BINOMIAL_INVERSION_MAX {
        binomial_inversion(trials, p, rng)
    } else {
        binomial_btrs(trials, p, rng)
    }
}

fn binomial_inversion(trials: u64, p: f64, rng: &mut RngStream) -> u64 {
    let q = 1.0 - p;
    let s = p / q;
    let a = (trials as f64 + 1.0) * s;
    let mut r = (trials as f64 * (-p).ln_1p()).exp();
    let mut u = rng.uniform();
    let mut k = 0u64;
    while u >= r {
        u -= r;
        k += 1;
        if k > trials {
            // Only reachable through accumulated rounding in the tail.
            return trials;
        }
        r *= a / k as f64 - s;
    }
    k
}

fn binomial_btrs(trials: u64, p: f64, rng: &mut RngStream) -> u64 {
    let n = trials as f64;
    let q = 1.0 - p;
    let spq = (n * p * q).sqrt();
    let b = 1.15 + 2.53 * spq;
    let a = -0.0873 + 0.0248 * b + 0.01 * p;
    let c = n * p + 0.5;
    let vr = 0.92 - 4.2 / b;
    let alpha = (2.83 + 5.1 / b) * spq;
    let lpq = (p / q).ln();
    let m = ((n + 1.0) * p).floor();
    let h = ln_factorial(m as u64) + ln_factorial(trials - m as u64);
    loop {
        let u = rng.uniform() - 0.5;
        let v = rng.uniform();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + c).floor();
        if k < 0.0 || k > n {
            continue;
        }
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        let lhs = (v * alpha / (a / (us * us) + b)).ln();
        let rhs = h - ln_factorial(k as u64) - ln_factorial(trials - k as u64) + (k - m) * lpq;
        if lhs <= rhs {
            return k as u64;
        }
    }
}

/// Number of favourable items in a sample of `draws` items taken without
/// replacement from `population` items of which `good` are favourable.
pub fn hypergeometric(good: u64, population: u64, draws: u64, rng: &mut RngStream) -> Result<u64> {
    if good > population || draws > population {
        return Err(domain(format!(
            "hypergeometric needs good <= population and draws <= population, got ({good}, {population}, {draws})"
        )));
    }
    if draws == 0 || good == 0 {
        return Ok(0);
    }
    if good == population {
        return Ok(draws);
    }
    if draws <= HYPERGEOMETRIC_SEQUENTIAL_MAX {
        let (mut good_left, mut left) = (good, population);
        let mut hits = 0;
        for _ in 0..draws {
            if rng.below(left) < good_left {
                hits += 1;
                good_left -= 1;
            }
            left -= 1;
        }
        Ok(hits)
    } else {
        Ok(hypergeometric_inversion(good, population, draws, rng))
    }
}

fn hypergeometric_inversion(good: u64, population: u64, draws: u64, rng: &mut RngStream) -> u64 {
    let bad = population - good;
    let lo = draws.saturating_sub(bad);
    let hi = draws.min(good);
    let (gf, bf, df) = (good as f64, bad as f64, draws as f64);
    // p(k + 1) / p(k)
    let ratio = |k: f64| (gf - k) * (df - k) / ((k + 1.0) * (bf - df + k + 1.0));
    let mode = (((df + 1.0) * (gf + 1.0) / (population as f64 + 2.0)).floor() as u64).clamp(lo, hi);
    let ln_pmf = |k: u64| {
        ln_factorial(good) - ln_factorial(k) - ln_factorial(good - k) + ln_factorial(bad)
            - ln_factorial(draws - k)
            - ln_factorial(bad - (draws - k))
            - (ln_factorial(population) - ln_factorial(draws) - ln_factorial(population - draws))
    };
    let p_mode = ln_pmf(mode).exp();
    // Terms below this fraction of the mode mass cannot move a 53-bit uniform.
    let cutoff = p_mode * 1e-20;
    let mut below = Vec::new();
    let mut p = p_mode;
    let mut k = mode;
    while k > lo {
        p /= ratio(k as f64 - 1.0);
        k -= 1;
        if p < cutoff {
            break;
        }
        below.push(p);
    }
    let first = mode - below.len() as u64;
    let mut table: Vec<f64> = below.into_iter().rev().collect();
    table.push(p_mode);
    let mut p = p_mode;
    let mut k = mode;
    while k < hi {
        p *= ratio(k as f64);
        k += 1;
        if p < cutoff {
            break;
        }
        table.push(p);
    }
    let total: f64 = table.iter().sum();
    let mut u = rng.uniform() * total;
    for (i, &w) in table.iter().enumerate() {
        if u < w {
            return first + i as u64;
        }
        u -= w;
    }
    first + table.len() as u64 - 1
}
