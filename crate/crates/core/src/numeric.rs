//! Small numerical kernels used by the mean-field and special-function code:
//! adaptive Gauss-Kronrod quadrature, an embedded Dormand-Prince 5(4)
//! integrator and a bracketed bisection/Newton root finder.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 15-point Kronrod abscissae and weights; the odd-indexed nodes form the
// embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let s = f(center - dx) + f(center + dx);
        kronrod += w * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Result of an adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub segments: usize,
}

/// Globally adaptive 15-point Gauss-Kronrod quadrature of `f` on `[a, b]`.
///
/// Bisects the segment with the largest error estimate until the summed
/// estimate is below `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Quadrature> {
    const MAX_SEGMENTS: usize = 2000;
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            segments: 0,
        });
    }
    let (value, error) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() >= MAX_SEGMENTS {
            return Err(Error::Numerical(format!(
                "quadrature on [{a}, {b}] stalled at error {total_err:e} after {MAX_SEGMENTS} segments"
            )));
        }
        let worst = heap.pop().unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = gk15(&f, worst.a, mid);
        let (rv, re) = gk15(&f, mid, worst.b);
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
        // Near convergence the running sums drift; resum exactly.
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
    Ok(Quadrature {
        value: total,
        error: total_err,
        segments: heap.len(),
    })
}

/// Dormand-Prince 5(4) tableau.
mod dp {
    pub const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    pub const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    // Fifth-order weights minus the embedded fourth-order weights.
    pub const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
}

/// Tolerances for [`solve_ivp`].
#[derive(Debug, Clone, Copy)]
pub struct OdeTolerance {
    pub rel: f64,
    pub abs: f64,
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` with adaptive Dormand-Prince
/// 5(4) steps, landing exactly on `t1`.
///
/// `observe` is called with every accepted `(t, y)`, including the initial
/// point. Returns the state at `t1`.
pub fn solve_ivp<const N: usize, F, O>(
    f: F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    tol: OdeTolerance,
    mut observe: O,
) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]),
{
    const MAX_STEPS: usize = 1_000_000;
    let span = t1 - t0;
    observe(t0, &y0);
    if span == 0.0 {
        return Ok(y0);
    }
    let mut t = t0;
    let mut y = y0;
    let mut h = span * 1e-3;
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, &y);
    for _ in 0..MAX_STEPS {
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        for s in 1..7 {
            let mut ys = y;
            for (i, v) in ys.iter_mut().enumerate() {
                *v += h * (0..s).map(|j| dp::A[s][j] * k[j][i]).sum::<f64>();
            }
            k[s] = f(t + dp::C[s] * h, &ys);
        }
        let mut y_new = y;
        for (i, v) in y_new.iter_mut().enumerate() {
            *v += h * (0..6).map(|j| dp::A[6][j] * k[j][i]).sum::<f64>();
        }
        let mut err = 0.0;
        for i in 0..N {
            let e = h * (0..7).map(|j| dp::E[j] * k[j][i]).sum::<f64>();
            let scale = tol.abs + tol.rel * y[i].abs().max(y_new[i].abs());
            err += (e / scale).powi(2);
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() {
            h *= 0.1;
        } else if err <= 1.0 {
            t = if last { t1 } else { t + h };
            y = y_new;
            // First-same-as-last: stage 7 is f at the new point.
            k[0] = k[6];
            observe(t, &y);
            if last {
                return Ok(y);
            }
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
        if h.abs() < 1e-14 * span.abs().max(t.abs()) {
            return Err(Error::Numerical(format!("step size underflow at t = {t}")));
        }
    }
    Err(Error::Numerical(format!("no convergence within {MAX_STEPS} steps")))
}

/// Root of an increasing function on `[lo, hi]` with `f(lo) < 0 < f(hi)`.
///
/// Bisects until the bracket is narrower than `bracket_tol`, then polishes
/// with Newton steps using `df`, falling back to bisection whenever a Newton
/// step leaves the current bracket. Stops when `|f| <= ftol`.
pub fn bisect_newton<F, D>(f: F, df: D, mut lo: f64, mut hi: f64, bracket_tol: f64, ftol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
    D: Fn(f64) -> f64,
{
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::Numerical(format!(
            "bracket [{lo}, {hi}] does not straddle a root: f = ({f_lo}, {f_hi})"
        )));
    }
    while hi - lo > bracket_tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x)?;
        if fx.abs() <= ftol {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let step = fx / df(x);
        let next = x - step;
        x = if next > lo && next < hi && step.is_finite() {
            next
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * x.abs() {
            return Ok(x);
        }
    }
    Err(Error::Numerical(format!(
        "root not polished to {ftol:e} in [{lo}, {hi}]"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_polynomial_and_smooth() {
        let q = integrate(|x| x.powi(5) - 3.0 * x, 0.0, 2.0, 1e-14, 1e-14).unwrap();
        assert!((q.value - (64.0 / 6.0 - 6.0)).abs() < 1e-13);
        let q = integrate(f64::exp, 0.0, 1.0, 1e-15, 1e-15).unwrap();
        assert!((q.value - (std::f64::consts::E - 1.0)).abs() < 1e-14);
        assert_eq!(integrate(f64::exp, 1.0, 1.0, 1e-12, 0.0).unwrap().value, 0.0);
    }

    #[test]
    fn quadrature_handles_endpoint_singularity() {
        // Integrable 1/sqrt singularity: int_0^1 x^-1/2 = 2.
        let q = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 1e-10).unwrap();
        assert!((q.value - 2.0).abs() < 1e-9, "{q:?}");
    }

    #[test]
    fn dopri_matches_exponential() {
        let tol = OdeTolerance { rel: 1e-11, abs: 1e-13 };
        let mut count = 0;
        let y = solve_ivp(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            2.0,
            [0.0, 1.0],
            tol,
            |_, _| count += 1,
        )
        .unwrap();
        assert!((y[0] - 2f64.sin()).abs() < 1e-9);
        assert!((y[1] - 2f64.cos()).abs() < 1e-9);
        assert!(count > 2);
    }

    #[test]
    fn root_of_cubic() {
        let r = bisect_newton(|x| Ok(x * x * x - 2.0), |x| 3.0 * x * x, 0.0, 2.0, 1e-6, 1e-15).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
        assert!(bisect_newton(|x| Ok(x + 5.0), |_| 1.0, 0.0, 1.0, 1e-6, 1e-12).is_err());
    }
}
