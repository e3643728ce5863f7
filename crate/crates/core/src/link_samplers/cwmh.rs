//! Component-wise Metropolis–Hastings for the level block under an arbitrary
//! link, with per-site adaptive random-walk scales.

use rand::Rng;
use rand_distr::StandardNormal;

use super::link::{normal_log_pdf, Link};
use crate::error::{Error, Result};
use crate::poly_dlm::PolyDlmState;

pub const TARGET_ACCEPTANCE: f64 = 0.44;
pub const BATCH_LEN: u32 = 50;
const MAX_LOG_STEP: f64 = 0.01;

/// Per-observation log-likelihood as a function of the weight `α_t`.
pub trait ObservationModel {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn log_likelihood(&self, t: usize, prob: f64) -> f64;
}

/// `successes_t ~ Bin(trials, α_t)`; Bernoulli when `trials == 1`.
#[derive(Debug, Clone, Copy)]
pub struct BinomialObs<'a> {
    pub successes: &'a [u32],
    pub trials: u32,
}

impl ObservationModel for BinomialObs<'_> {
    fn len(&self) -> usize {
        self.successes.len()
    }

    fn log_likelihood(&self, t: usize, prob: f64) -> f64 {
        let k = self.successes[t] as f64;
        let n = self.trials as f64;
        let mut ll = 0.0;
        if k > 0.0 {
            ll += k * prob.ln();
        }
        if n > k {
            ll += (n - k) * (1.0 - prob).ln();
        }
        ll
    }
}

/// Random-walk scales adapted in batches of [`BATCH_LEN`] sweeps towards an
/// acceptance rate of [`TARGET_ACCEPTANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveScales {
    log_sd: Vec<f64>,
    batch_accepted: Vec<u32>,
    batch_sweeps: u32,
    batch_index: u64,
    total_accepted: Vec<u64>,
    total_sweeps: u64,
    nonfinite: u64,
}

impl AdaptiveScales {
    /// Unit proposal standard deviation at every site.
    pub fn new(len: usize) -> Self {
        Self {
            log_sd: vec![0.0; len],
            batch_accepted: vec![0; len],
            batch_sweeps: 0,
            batch_index: 1,
            total_accepted: vec![0; len],
            total_sweeps: 0,
            nonfinite: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.log_sd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_sd.is_empty()
    }

    pub fn sd(&self, t: usize) -> f64 {
        self.log_sd[t].exp()
    }

    pub fn log_sd(&self) -> &[f64] {
        &self.log_sd
    }

    /// Index `n` of the batch currently being collected (starts at 1).
    pub fn batch_index(&self) -> u64 {
        self.batch_index
    }

    pub fn batch_sweeps(&self) -> u32 {
        self.batch_sweeps
    }

    /// Proposals rejected because the log acceptance ratio was not finite.
    pub fn nonfinite_proposals(&self) -> u64 {
        self.nonfinite
    }

    pub fn record(&mut self, t: usize, accepted: bool) {
        if accepted {
            self.batch_accepted[t] += 1;
            self.total_accepted[t] += 1;
        }
    }

    /// Closes one sweep; adapts the scales when a batch is complete.
    pub fn finish_sweep(&mut self) {
        self.batch_sweeps += 1;
        self.total_sweeps += 1;
        if self.batch_sweeps >= BATCH_LEN {
            self.adapt();
        }
    }

    /// Moves every `log ς_t` by `±min(0.01, n^{-1/2})` depending on whether
    /// the batch acceptance fraction exceeded the target, then starts batch
    /// `n + 1`.
    pub fn adapt(&mut self) {
        let step = MAX_LOG_STEP.min((self.batch_index as f64).powf(-0.5));
        let sweeps = self.batch_sweeps.max(1) as f64;
        for (ls, acc) in self.log_sd.iter_mut().zip(self.batch_accepted.iter_mut()) {
            if *acc as f64 / sweeps > TARGET_ACCEPTANCE {
                *ls += step;
            } else {
                *ls -= step;
            }
            *acc = 0;
        }
        self.batch_sweeps = 0;
        self.batch_index += 1;
    }

    /// Clears the long-run acceptance counters (not the scales).
    pub fn reset_totals(&mut self) {
        self.total_accepted.fill(0);
        self.total_sweeps = 0;
    }

    /// Per-site acceptance rates since the last [`reset_totals`](Self::reset_totals).
    pub fn acceptance_rates(&self) -> Vec<f64> {
        let n = self.total_sweeps.max(1) as f64;
        self.total_accepted.iter().map(|a| *a as f64 / n).collect()
    }

    /// Sweeps counted in [`acceptance_rates`](Self::acceptance_rates).
    pub fn total_sweeps(&self) -> u64 {
        self.total_sweeps
    }
}

/// Mean and variance of `θ_{t,1}` given the rest of the level block and the
/// slope block, under the state prior (`t` is zero-based).
pub fn cwmh_conditional(state: &PolyDlmState, t: usize) -> Result<(f64, f64)> {
    let len = state.len();
    if t >= len {
        return Err(Error::IndexOutOfRange {
            index: t,
            limit: len,
        });
    }
    let level = &state.theta[0];
    let slope = state.theta.get(1);
    let slope_at = |i: usize| slope.map_or(0.0, |s| s[i]);
    let predicted = if t == 0 {
        state.theta0[0] + state.theta0.get(1).copied().unwrap_or(0.0)
    } else {
        level[t - 1] + slope_at(t - 1)
    };
    let w1 = state.w[0];
    if t + 1 < len {
        Ok((0.5 * ((level[t + 1] - slope_at(t)) + predicted), 0.5 * w1))
    } else {
        Ok((predicted, w1))
    }
}

/// Log Metropolis–Hastings ratio for moving `θ_{t,1}` to `candidate`.
pub fn log_acceptance_ratio<O: ObservationModel + ?Sized>(
    state: &PolyDlmState,
    t: usize,
    candidate: f64,
    obs: &O,
    link: Link,
) -> Result<f64> {
    let (mean, var) = cwmh_conditional(state, t)?;
    let current = state.theta[0][t];
    let prior = normal_log_pdf(candidate, mean, var) - normal_log_pdf(current, mean, var);
    let lik = obs.log_likelihood(t, link.inverse_clamped(candidate))
        - obs.log_likelihood(t, link.inverse_clamped(current));
    Ok(prior + lik)
}

/// One left-to-right sweep over `t = 1..T`, updating the level block in place.
pub fn cwmh_sweep<R, O>(
    rng: &mut R,
    state: &mut PolyDlmState,
    obs: &O,
    link: Link,
    scales: &mut AdaptiveScales,
) -> Result<()>
where
    R: Rng + ?Sized,
    O: ObservationModel + ?Sized,
{
    let len = state.len();
    if obs.len() != len || scales.len() != len {
        return Err(Error::Data(format!(
            "expected {len} responses and scales, found {} and {}",
            obs.len(),
            scales.len()
        )));
    }
    for t in 0..len {
        let candidate = state.theta[0][t] + scales.sd(t) * rng.sample::<f64, _>(StandardNormal);
        let log_ratio = log_acceptance_ratio(state, t, candidate, obs, link)?;
        let u: f64 = rng.random();
        let accepted = if log_ratio.is_finite() {
            log_ratio >= 0.0 || u.ln() < log_ratio
        } else {
            scales.nonfinite += 1;
            false
        };
        if accepted {
            state.theta[0][t] = candidate;
        }
        scales.record(t, accepted);
    }
    scales.finish_sweep();
    Ok(())
}
