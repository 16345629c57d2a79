//! Graph-free simulation of RSA on CRG(c, alpha).
//!
//! The graph is revealed only around the vertex being activated. At every
//! step one unexplored vertex becomes active; its household is drawn from the
//! vertices not yet assigned to any household, and its distant neighbours are
//! drawn among the remaining unexplored vertices. Only two counters matter:
//!
//! - `x`: unexplored vertices (neither active nor blocked),
//! - `y`: vertices not yet placed in a household (unexplored, or blocked only
//!   through a distant edge).
//!
//! The pair `(x, y)` is a Markov chain and the step at which `x` hits zero is
//! the jam count, equal in law to running [`crate::rsa::greedy_jam`] on a
//! sampled CRG.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::params::Params;
use crate::rng::RngStream;
use crate::rsa::JamResult;
use crate::sampling::{binomial, poisson};

pub use crate::sampling::hypergeometric;

/// State of the exploration chain after `t` activations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExplorationState {
    pub t: u64,
    pub x: u64,
    pub y: u64,
}

/// Sizes of the four vertex classes implied by a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionSizes {
    pub active: i64,
    pub unexplored: i64,
    pub blocked_household: i64,
    pub blocked_other: i64,
}

impl PartitionSizes {
    pub fn total(&self) -> i64 {
        self.active + self.unexplored + self.blocked_household + self.blocked_other
    }

    pub fn all_non_negative(&self) -> bool {
        self.active >= 0 && self.unexplored >= 0 && self.blocked_household >= 0 && self.blocked_other >= 0
    }
}

impl ExplorationState {
    pub fn initial(n: usize) -> Self {
        Self {
            t: 0,
            x: n as u64,
            y: n as u64,
        }
    }

    pub fn is_jammed(&self) -> bool {
        self.x == 0
    }

    pub fn partition(&self, n: usize) -> PartitionSizes {
        let (n, t, x, y) = (n as i64, self.t as i64, self.x as i64, self.y as i64);
        PartitionSizes {
            active: t,
            unexplored: x,
            blocked_household: n - t - y,
            blocked_other: y - x,
        }
    }

    /// `0 <= x <= y <= n - t` and the four classes add up to `n`.
    pub fn check(&self, n: usize) -> Result<()> {
        let sizes = self.partition(n);
        if sizes.total() != n as i64 || !sizes.all_non_negative() {
            return Err(Error::Precondition(format!(
                "inconsistent exploration state {self:?} for n = {n}"
            )));
        }
        Ok(())
    }
}

fn check_params(params: &Params) -> Result<()> {
    let p = params.global_edge_prob();
    if p > 1.0 {
        return Err(domain(format!(
            "global edge probability {p} exceeds 1 for n = {}",
            params.n
        )));
    }
    Ok(())
}

/// One activation.
///
/// With `X, Y` the current counters and the activated vertex removed:
/// `H = min(Poisson(alpha c), Y - 1)` household members are drawn from the
/// `Y - 1` unhoused vertices, `eta1 ~ Hypergeometric(X - 1 good, Y - 1, H)`
/// of them unexplored; then `eta2 ~ Bin(X - 1 - eta1, lambda / n)` distant
/// neighbours are blocked. `X -= 1 + eta1 + eta2`, `Y -= 1 + H`.
pub fn explore_step(state: ExplorationState, params: &Params, rng: &mut RngStream) -> Result<ExplorationState> {
    if state.x == 0 {
        return Err(Error::Precondition("no unexplored vertex left to activate".into()));
    }
    if state.x > state.y {
        return Err(Error::Precondition(format!("state {state:?} has x > y")));
    }
    let candidates = state.y - 1;
    let household = poisson(params.sigma2(), rng).min(candidates);
    let eta1 = hypergeometric(state.x - 1, candidates, household, rng)?;
    let eta2 = binomial(state.x - 1 - eta1, params.global_edge_prob(), rng);
    let next = ExplorationState {
        t: state.t + 1,
        x: state.x - 1 - eta1 - eta2,
        y: state.y - 1 - household,
    };
    debug_assert!(next.check(params.n).is_ok(), "{next:?}");
    Ok(next)
}

/// Runs the chain from `(n, n)` until no unexplored vertex is left.
pub fn explore_jam(params: &Params, rng: &mut RngStream) -> Result<JamResult> {
    check_params(params)?;
    let mut state = ExplorationState::initial(params.n);
    while !state.is_jammed() {
        state = explore_step(state, params, rng)?;
    }
    Ok(JamResult::from_count(state.t as usize, params.n))
}

/// As [`explore_jam`], also returning every visited state (starting with the
/// initial one) with the conservation identity checked at each step.
pub fn explore_trace(params: &Params, rng: &mut RngStream) -> Result<(JamResult, Vec<ExplorationState>)> {
    check_params(params)?;
    let mut state = ExplorationState::initial(params.n);
    let mut trace = vec![state];
    while !state.is_jammed() {
        state = explore_step(state, params, rng)?;
        state.check(params.n)?;
        trace.push(state);
    }
    Ok((JamResult::from_count(state.t as usize, params.n), trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_density_never_blocks() {
        let p = Params::new(40, 0.0, 0.0, 1).unwrap();
        let mut rng = RngStream::new(0, 0);
        let mut s = ExplorationState::initial(40);
        while !s.is_jammed() {
            let next = explore_step(s, &p, &mut rng).unwrap();
            assert_eq!((next.x, next.y), (s.x - 1, s.y - 1));
            s = next;
        }
        assert_eq!(explore_jam(&p, &mut rng).unwrap().jam_count, 40);
    }

    #[test]
    fn last_vertex_terminates() {
        let p = Params::new(10, 3.0, 0.5, 1).unwrap();
        let s = ExplorationState { t: 9, x: 1, y: 1 };
        let next = explore_step(s, &p, &mut RngStream::new(1, 0)).unwrap();
        assert_eq!(next, ExplorationState { t: 10, x: 0, y: 0 });
    }

    #[test]
    fn step_on_jammed_state_fails() {
        let p = Params::new(10, 3.0, 0.5, 1).unwrap();
        let s = ExplorationState { t: 4, x: 0, y: 3 };
        assert!(matches!(
            explore_step(s, &p, &mut RngStream::new(1, 0)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn household_drift_matches_mean_size() {
        // alpha = 1: each step removes 1 + min(Poisson(c), Y - 1) from Y.
        let p = Params::new(1_000_000, 4.0, 1.0, 1).unwrap();
        let mut rng = RngStream::new(2, 0);
        let mut s = ExplorationState::initial(p.n);
        let steps = 50_000;
        for _ in 0..steps {
            s = explore_step(s, &p, &mut rng).unwrap();
        }
        let drift = (p.n as u64 - s.y) as f64 / steps as f64;
        let se = (p.sigma2() / steps as f64).sqrt();
        assert!((drift - p.mu()).abs() < 4.0 * se, "drift {drift}");
        // With lambda = 0 nothing is blocked through distant edges.
        assert_eq!(s.x, s.y);
    }

    #[test]
    fn trace_conserves_vertices() {
        let p = Params::new(2000, 10.0, 0.586503, 1).unwrap();
        let (jam, trace) = explore_trace(&p, &mut RngStream::new(3, 0)).unwrap();
        assert_eq!(trace.first().unwrap(), &ExplorationState::initial(2000));
        assert_eq!(trace.len(), jam.jam_count + 1);
        for w in trace.windows(2) {
            assert!(w[1].x <= w[1].y && w[1].y < w[0].y && w[1].x < w[0].x);
            assert_eq!(w[1].partition(p.n).total(), 2000);
        }
    }

    #[test]
    fn rejects_too_dense_global_part() {
        let p = Params::new(2, 5.0, 0.0, 1).unwrap();
        assert!(explore_jam(&p, &mut RngStream::new(0, 0)).is_err());
    }
}
