//! Special functions and the dimension-to-clustering map.
//!
//! `alpha_d(d)` is the limiting wedge-closure clustering coefficient of the
//! random geometric graph in dimension `d`:
//!
//! ```text
//! alpha_d = d * int_0^1 x^(d-1) I_{1 - x^2/4}((d+1)/2, 1/2) dx
//! ```
//!
//! where `I_z(a, b)` is the regularized incomplete beta function. Setting the
//! household share of the clustered model to `alpha_d` matches its clustering
//! to that of the geometric graph.

#![allow(clippy::excessive_precision)]

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::graph::Graph;
use crate::numeric;

/// Largest dimension accepted by [`alpha_d`].
pub const MAX_DIM: usize = 64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the series in its accurate range.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, &p) in LANCZOS.iter().enumerate().skip(1) {
        a += p / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

const FACTORIAL_TABLE: usize = 256;

fn ln_factorial_table() -> &'static [f64; FACTORIAL_TABLE] {
    static TABLE: OnceLock<[f64; FACTORIAL_TABLE]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; FACTORIAL_TABLE];
        for k in 2..FACTORIAL_TABLE {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    })
}

/// `ln(k!)`: exact table below 256, Stirling series with three correction
/// terms above (relative error below 1e-16 there).
pub fn ln_factorial(k: u64) -> f64 {
    if (k as usize) < FACTORIAL_TABLE {
        return ln_factorial_table()[k as usize];
    }
    let x = k as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI * x).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_cf(z: f64, a: f64, b: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * z / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * z / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * z / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::Numerical(format!(
        "incomplete beta fraction diverged at z={z}, a={a}, b={b}"
    )))
}

/// Regularized incomplete beta function `I_z(a, b)`.
pub fn inc_beta_reg(z: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return Err(domain(format!("z must lie in [0, 1], got {z}")));
    }
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(domain(format!("a and b must be positive, got a={a}, b={b}")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == 1.0 {
        return Ok(1.0);
    }
    let front = (a * z.ln() + b * (-z).ln_1p() - ln_beta(a, b)).exp();
    if z < (a + 1.0) / (a + b + 2.0) {
        Ok(front * beta_cf(z, a, b)? / a)
    } else {
        Ok(1.0 - front * beta_cf(1.0 - z, b, a)? / b)
    }
}

/// Clustering level of the random geometric graph in dimension `d`.
pub fn alpha_d(d: usize) -> Result<f64> {
    if !(1..=MAX_DIM).contains(&d) {
        return Err(domain(format!("dimension must lie in 1..={MAX_DIM}, got {d}")));
    }
    let a = 0.5 * (d as f64 + 1.0);
    // The beta argument stays in [3/4, 1], so the integrand is smooth.
    let integrand = |x: f64| {
        let ib = inc_beta_reg(1.0 - 0.25 * x * x, a, 0.5).unwrap_or(f64::NAN);
        x.powi(d as i32 - 1) * ib
    };
    let q = numeric::integrate(integrand, 0.0, 1.0, 1e-14, 1e-13)?;
    if !q.value.is_finite() {
        return Err(Error::Numerical(format!("alpha_d({d}) evaluated to {}", q.value)));
    }
    Ok(d as f64 * q.value)
}

/// Table of `(d, alpha_d)` for `d = 1..=dmax`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaTable {
    pub rows: Vec<(usize, f64)>,
}

impl AlphaTable {
    pub fn compute(dmax: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dmax) {
            return Err(domain(format!("dmax must lie in 1..={MAX_DIM}, got {dmax}")));
        }
        let rows = (1..=dmax).map(|d| alpha_d(d).map(|a| (d, a))).collect::<Result<_>>()?;
        Ok(Self { rows })
    }

    pub fn get(&self, d: usize) -> Option<f64> {
        self.rows.iter().find(|(k, _)| *k == d).map(|&(_, a)| a)
    }
}

/// Counts of closed wedges (three per triangle) and all wedges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WedgeCounts {
    pub triangles: u64,
    pub wedges: u64,
}

pub fn wedge_counts(graph: &Graph) -> WedgeCounts {
    let mut triangles = 0u64;
    let mut wedges = 0u64;
    for u in 0..graph.n() {
        let deg = graph.degree(u) as u64;
        wedges += deg * deg.saturating_sub(1) / 2;
        let nu = graph.neighbors(u);
        for &v in nu.iter().filter(|&&v| v as usize > u) {
            // Common neighbours w > v, so each triangle u < v < w counts once.
            let nv = graph.neighbors(v as usize);
            let (mut i, mut j) = (nu.partition_point(|&w| w <= v), nv.partition_point(|&w| w <= v));
            while i < nu.len() && j < nv.len() {
                match nu[i].cmp(&nv[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        triangles += 1;
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    WedgeCounts { triangles, wedges }
}

/// Fraction of wedges (paths of length two) whose endpoints are adjacent.
pub fn empirical_clustering(graph: &Graph) -> Result<f64> {
    let WedgeCounts { triangles, wedges } = wedge_counts(graph);
    if wedges == 0 {
        return Err(Error::Undefined("graph has no wedges".into()));
    }
    Ok(3.0 * triangles as f64 / wedges as f64)
}
