use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Model parameters shared by every generator and limit computation.
///
/// `c` is the density (mean degree), `alpha` splits it into a household part
/// `alpha * c` and a global part `(1 - alpha) * c`. `d` is only consulted by
/// the geometric generator. The household size moments are cached:
/// `mu = 1 + alpha c`, `sigma2 = alpha c`, `lambda = (1 - alpha) c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: usize,
    pub c: f64,
    pub alpha: f64,
    pub d: usize,
    mu: f64,
    lambda: f64,
    sigma2: f64,
}

impl Params {
    pub fn new(n: usize, c: f64, alpha: f64, d: usize) -> Result<Self> {
        if n < 1 {
            return Err(domain("n must be at least 1"));
        }
        if !(c >= 0.0) || !c.is_finite() {
            return Err(domain(format!("c must be finite and non-negative, got {c}")));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(domain(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        if d < 1 {
            return Err(domain("d must be at least 1"));
        }
        let sigma2 = alpha * c;
        // lambda = c - sigma2 keeps lambda + sigma2 == c to rounding.
        Ok(Self {
            n,
            c,
            alpha,
            d,
            mu: 1.0 + sigma2,
            lambda: c - sigma2,
            sigma2,
        })
    }

    /// Parameters for the deterministic limits, where `n` and `d` play no role.
    pub fn mean_field(c: f64, alpha: f64) -> Result<Self> {
        Self::new(1, c, alpha, 1)
    }

    /// Same model with a different vertex count.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(n, self.c, self.alpha, self.d)
    }

    /// Mean household size.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Global blocking rate.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Variance of the household size.
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Per-pair probability of a cross-household edge, `lambda / n`.
    pub fn global_edge_prob(&self) -> f64 {
        self.lambda / self.n as f64
    }
}
