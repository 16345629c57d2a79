//! Deterministic limits of the exploration chain.
//!
//! With `mu = 1 + alpha c`, `lambda = (1 - alpha) c` and `sigma^2 = alpha c`,
//! the scaled unexplored count follows
//!
//! ```text
//! x'(t) = -1 - (mu - 1) x / y - lambda x,    y(t) = 1 - mu t,    x(0) = 1,
//! ```
//!
//! whose solution is `x(t) = e^{-lambda t} (1 - mu t)^{(mu-1)/mu} (1 - I(t))`
//! with `I(t) = int_0^t e^{lambda s} (1 - mu s)^{-1 + 1/mu} ds`. The jamming
//! fraction `J*` is the root of `I(t) = 1` in `(0, 1/mu]`.
//!
//! Fluctuations around `x` are Gaussian on the `sqrt(n)` scale; the limiting
//! variance of the jam fraction is `sigma_xx(J*)`, obtained from a linear ODE
//! system driven by the fluid path.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::numeric::{bisect_newton, integrate, solve_ivp, OdeTolerance};
use crate::params::Params;

/// Default accuracy for [`jamming_fraction`] and [`variance`].
pub const DEFAULT_TOL: f64 = 1e-10;

/// Width of the bisection bracket before Newton polishing.
const BRACKET_TOL: f64 = 1e-6;

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(domain(format!("tolerance must be positive and finite, got {tol}")));
    }
    Ok(())
}

/// `1 - mu t` raised to `1 / mu`, computed without cancellation for small t.
fn u_of(params: &Params, t: f64) -> f64 {
    let mu = params.mu();
    ((-mu * t).ln_1p() / mu).exp()
}

/// `I(t)` for `0 <= t <= 1/mu`.
///
/// Substituting `u = (1 - mu s)^{1/mu}` gives
/// `I(t) = int_{U}^{1} exp(lambda (1 - u^mu) / mu) du` with
/// `U = (1 - mu t)^{1/mu}`; the integrand is smooth and bounded on `[0, 1]`.
pub fn integral_i(params: &Params, t: f64) -> Result<f64> {
    let mu = params.mu();
    if !(0.0..=1.0 / mu).contains(&t) {
        return Err(domain(format!("t = {t} outside [0, 1/mu = {}]", 1.0 / mu)));
    }
    integral_i_unchecked(params, t, 1e-15)
}

fn integral_i_unchecked(params: &Params, t: f64, tol: f64) -> Result<f64> {
    let (mu, lambda) = (params.mu(), params.lambda());
    if t <= 0.0 {
        return Ok(0.0);
    }
    let width = if mu * t >= 1.0 {
        1.0
    } else {
        -(((-mu * t).ln_1p() / mu).exp_m1())
    };
    if lambda == 0.0 {
        return Ok(width);
    }
    let lower = 1.0 - width;
    let q = integrate(
        |u: f64| (lambda * (1.0 - u.powf(mu)) / mu).exp(),
        lower,
        1.0,
        tol * 1e-2,
        tol,
    )?;
    Ok(q.value)
}

/// `I'(t) = e^{lambda t} (1 - mu t)^{-1 + 1/mu}`.
fn integrand(params: &Params, t: f64) -> f64 {
    let mu = params.mu();
    (params.lambda() * t).exp() * (1.0 - mu * t).powf(-1.0 + 1.0 / mu)
}

/// Fluid trajectory `x(t)` for `0 <= t < 1/mu`.
pub fn fluid_x(params: &Params, t: f64) -> Result<f64> {
    let mu = params.mu();
    if !(t >= 0.0 && t < 1.0 / mu) {
        return Err(domain(format!(
            "fluid path defined on [0, 1/mu = {}), got t = {t}",
            1.0 / mu
        )));
    }
    fluid_x_unchecked(params, t)
}

/// As [`fluid_x`] but also accepting `t = 1/mu`, where the limit is 0.
fn fluid_x_unchecked(params: &Params, t: f64) -> Result<f64> {
    let mu = params.mu();
    if mu * t >= 1.0 {
        return Ok(0.0);
    }
    let prefactor = (-params.lambda() * t).exp() * u_of(params, t).powf(mu - 1.0);
    Ok(prefactor * (1.0 - integral_i_unchecked(params, t, 1e-15)?))
}

/// Sampled fluid trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct FluidSolution {
    pub grid: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub jstar: f64,
}

/// Evaluates `x` and `y` on `points` equally spaced times in `[0, J*]`.
pub fn fluid_solution(params: &Params, points: usize, tol: f64) -> Result<FluidSolution> {
    if points < 2 {
        return Err(domain("a fluid trajectory needs at least 2 grid points"));
    }
    let jstar = jamming_fraction(params, tol)?;
    let grid: Vec<f64> = (0..points).map(|i| jstar * i as f64 / (points - 1) as f64).collect();
    let x = grid
        .iter()
        .map(|&t| fluid_x_unchecked(params, t))
        .collect::<Result<Vec<_>>>()?;
    let y = grid.iter().map(|&t| 1.0 - params.mu() * t).collect();
    Ok(FluidSolution { grid, x, y, jstar })
}

/// `J*(c, alpha)`: the smallest positive root of `I(t) = 1`.
///
/// Closed forms are used for `c = 0` (`J* = 1`), `alpha = 0`
/// (`ln(1 + c) / c`) and `alpha = 1` (`1 / (1 + c)`); otherwise the root is
/// bracketed in `(0, 1/mu)` and found by bisection followed by Newton steps
/// until `|I(J*) - 1| <= tol`.
pub fn jamming_fraction(params: &Params, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let c = params.c;
    if c == 0.0 {
        Ok(1.0)
    } else if params.lambda() == 0.0 {
        Ok(1.0 / params.mu())
    } else if params.sigma2() == 0.0 {
        Ok(c.ln_1p() / c)
    } else {
        jamming_fraction_by_root(params, tol)
    }
}

/// The root of `I(t) = 1` found numerically, without the closed-form
/// shortcuts of [`jamming_fraction`]. Requires `lambda > 0`, so that the
/// root lies strictly inside `(0, 1/mu)`.
pub fn jamming_fraction_by_root(params: &Params, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if !(params.lambda() > 0.0) {
        return Err(domain("the root search needs lambda = (1 - alpha) c > 0"));
    }
    let quad_tol = (tol * 1e-3).max(1e-15);
    bisect_newton(
        |t| Ok(integral_i_unchecked(params, t, quad_tol)? - 1.0),
        |t| integrand(params, t),
        0.0,
        1.0 / params.mu(),
        BRACKET_TOL,
        tol,
    )
}

/// Large-density approximation `J* ~ 1 / (1 + alpha c)`.
pub fn jamming_large_c(params: &Params) -> f64 {
    1.0 / params.mu()
}

/// Solution of the covariance system on `[0, J*]`.
#[derive(Debug, Clone, Serialize)]
pub struct VarianceSolution {
    pub grid: Vec<f64>,
    pub sigma_xx: Vec<f64>,
    pub sigma_xy: Vec<f64>,
    pub vstar: f64,
}

/// Right-hand side of the joint system `(x, sigma_xx, sigma_xy)`.
///
/// With `f = -(mu-1)/y - lambda`, `g = (mu-1) x / y^2` and
/// `beta = ((mu-1)/y + lambda) x`:
///
/// ```text
/// sigma_xx' = 2 sigma_xx f + 2 sigma_xy g + beta
/// sigma_xy' = sigma_xy f + t g sigma^2 + sigma^2 x / y
/// ```
///
/// The last term is `sqrt(beta) sigma rho` written so that it stays finite
/// when `sigma = 0`.
fn covariance_rhs(params: &Params, t: f64, s: &[f64; 3]) -> [f64; 3] {
    let (mu, lambda, s2) = (params.mu(), params.lambda(), params.sigma2());
    let [x, sxx, sxy] = *s;
    let y = 1.0 - mu * t;
    let f = -(mu - 1.0) / y - lambda;
    let g = (mu - 1.0) * x / (y * y);
    let beta = ((mu - 1.0) / y + lambda) * x;
    [
        -1.0 - (mu - 1.0) * x / y - lambda * x,
        2.0 * sxx * f + 2.0 * sxy * g + beta,
        sxy * f + t * g * s2 + s2 * x / y,
    ]
}

/// `V*(c, alpha) = sigma_xx(J*)`, integrated with adaptive Dormand-Prince
/// steps at relative tolerance `tol / 10`.
///
/// For `c = 0` the jam is deterministic and `V* = 0`. For `alpha = 1`
/// (`lambda = 0`) the jam is a renewal count of households with mean size
/// `mu` and variance `sigma^2`, and `V* = sigma^2 / mu^3`; here `x = y`
/// vanishes at `J* = 1/mu` with slope `-mu`, so `sigma_xx(J*) = sigma^2/mu`
/// is rescaled by the squared slope.
pub fn variance(params: &Params, tol: f64) -> Result<VarianceSolution> {
    check_tol(tol)?;
    let jstar = jamming_fraction(params, tol)?;
    if params.c == 0.0 {
        return Ok(VarianceSolution {
            grid: vec![0.0, jstar],
            sigma_xx: vec![0.0; 2],
            sigma_xy: vec![0.0; 2],
            vstar: 0.0,
        });
    }
    if params.lambda() == 0.0 {
        let (mu, s2) = (params.mu(), params.sigma2());
        let grid: Vec<f64> = (0..=64).map(|i| jstar * i as f64 / 64.0).collect();
        let linear: Vec<f64> = grid.iter().map(|&t| s2 * t).collect();
        return Ok(VarianceSolution {
            grid,
            sigma_xx: linear.clone(),
            sigma_xy: linear,
            vstar: s2 / mu.powi(3),
        });
    }
    let mut grid = Vec::new();
    let mut sigma_xx = Vec::new();
    let mut sigma_xy = Vec::new();
    let ode_tol = OdeTolerance {
        rel: tol / 10.0,
        abs: tol / 100.0,
    };
    let end = solve_ivp(
        |t, s| covariance_rhs(params, t, s),
        0.0,
        jstar,
        [1.0, 0.0, 0.0],
        ode_tol,
        |t, s| {
            grid.push(t);
            sigma_xx.push(s[1]);
            sigma_xy.push(s[2]);
        },
    )?;
    let vstar = end[1];
    if !vstar.is_finite() || vstar < 0.0 {
        return Err(Error::Numerical(format!("variance integration produced {vstar}")));
    }
    Ok(VarianceSolution {
        grid,
        sigma_xx,
        sigma_xy,
        vstar,
    })
}
