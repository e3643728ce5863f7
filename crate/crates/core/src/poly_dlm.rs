//! The `p`-th order polynomial dynamic linear model with its states stored
//! block-wise: block `k` holds the `k`-th state component across all times,
//! `(θ_{1k}, …, θ_{Tk})`.
//!
//! Written that way the model is a chain of Gaussian regressions,
//!
//! ```text
//! y            ~ N(block_0, V I)
//! block_k | block_{k+1} ~ N(m_k, W_k (HᵀH)⁻¹),   m_k = (θ0_k + θ0_{k+1}) 1 + (H⁻¹ - I) block_{k+1}
//! block_{p-1}  ~ N(θ0_{p-1} 1, W_{p-1} (HᵀH)⁻¹)
//! ```
//!
//! so each block has a tridiagonal full-conditional precision. Block indices
//! in this module are zero-based; block 0 is the observed level.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::banded::{
    apply_bth, apply_htb, build_btb, build_hth, sample_gaussian_precision, BandedCholesky,
    BandedSpd,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalPrior {
    pub mean: f64,
    pub var: f64,
}

/// Shape–rate gamma prior on a precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPrior {
    pub shape: f64,
    pub rate: f64,
}

impl GammaPrior {
    /// Mean 1, variance 100 on the precision scale.
    pub const VAGUE: GammaPrior = GammaPrior {
        shape: 0.01,
        rate: 0.01,
    };

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    pub fn variance(&self) -> f64 {
        self.shape / (self.rate * self.rate)
    }

    fn validate(&self, what: &str) -> Result<()> {
        if self.shape > 0.0 && self.rate > 0.0 && self.shape.is_finite() && self.rate.is_finite() {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "{what}: gamma hyperparameters must be positive and finite"
            )))
        }
    }

    pub(crate) fn sample_posterior<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        extra_shape: f64,
        extra_rate: f64,
        conditional: &'static str,
    ) -> Result<f64> {
        let shape = self.shape + extra_shape;
        let rate = self.rate + extra_rate;
        if !(rate.is_finite() && shape.is_finite()) {
            return Err(Error::numeric(conditional, format!("rate {rate}")));
        }
        let precision = Gamma::new(shape, 1.0 / rate)
            .map_err(|e| Error::numeric(conditional, e.to_string()))?
            .sample(rng);
        if !(precision > 0.0 && precision.is_finite()) {
            return Err(Error::numeric(
                conditional,
                format!("precision draw {precision}"),
            ));
        }
        Ok(precision)
    }
}

/// Independent priors for the dynamic model's initial values and variances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DlmPriors {
    pub theta0: Vec<NormalPrior>,
    pub w_precision: Vec<GammaPrior>,
    pub v_precision: GammaPrior,
}

impl DlmPriors {
    /// `θ0_k ~ N(0, 1)`, `1/W_k ~ Γ(0.01, 0.01)`, `1/V ~ Γ(0.01, 0.01)`.
    pub fn standard(order: usize) -> Self {
        Self {
            theta0: vec![
                NormalPrior {
                    mean: 0.0,
                    var: 1.0
                };
                order
            ],
            w_precision: vec![GammaPrior::VAGUE; order],
            v_precision: GammaPrior::VAGUE,
        }
    }

    pub fn order(&self) -> usize {
        self.theta0.len()
    }

    pub fn validate(&self, order: usize) -> Result<()> {
        if self.theta0.len() != order || self.w_precision.len() != order {
            return Err(Error::Config(format!(
                "priors cover {} blocks, model order is {order}",
                self.theta0.len()
            )));
        }
        for (k, p) in self.theta0.iter().enumerate() {
            if !(p.var > 0.0 && p.var.is_finite() && p.mean.is_finite()) {
                return Err(Error::Config(format!(
                    "theta0 prior {}: variance must be positive",
                    k + 1
                )));
            }
        }
        for (k, g) in self.w_precision.iter().enumerate() {
            g.validate(&format!("W_{} prior", k + 1))?;
        }
        self.v_precision.validate("V prior")
    }
}

/// Block-ordered states, initial values and variances of one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyDlmState {
    /// `theta[k][t]`, `k < p`, `t < T`.
    pub theta: Vec<Vec<f64>>,
    pub theta0: Vec<f64>,
    pub w: Vec<f64>,
    pub v: f64,
}

impl PolyDlmState {
    /// All states and initial values zero, unit variances.
    pub fn zeros(order: usize, len: usize) -> Result<Self> {
        if order == 0 || len == 0 {
            return Err(Error::Config(
                "model order and series length must be positive".into(),
            ));
        }
        Ok(Self {
            theta: vec![vec![0.0; len]; order],
            theta0: vec![0.0; order],
            w: vec![1.0; order],
            v: 1.0,
        })
    }

    /// Starting point for a chain: zero states, unit variances and initial
    /// values drawn from their priors.
    pub fn initial<R: Rng + ?Sized>(
        rng: &mut R,
        order: usize,
        len: usize,
        priors: &DlmPriors,
    ) -> Result<Self> {
        priors.validate(order)?;
        let mut s = Self::zeros(order, len)?;
        for (t0, p) in s.theta0.iter_mut().zip(&priors.theta0) {
            *t0 = p.mean + p.var.sqrt() * rng.sample::<f64, _>(StandardNormal);
        }
        Ok(s)
    }

    pub fn order(&self) -> usize {
        self.theta.len()
    }

    pub fn len(&self) -> usize {
        self.theta[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty() || self.theta[0].is_empty()
    }

    /// Initial value of block `k`, zero past the last block.
    fn theta0_or_zero(&self, k: usize) -> f64 {
        self.theta0.get(k).copied().unwrap_or(0.0)
    }

    fn check_block(&self, k: usize) -> Result<()> {
        if k < self.order() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: k,
                limit: self.order(),
            })
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.order();
        if p == 0 || self.theta0.len() != p || self.w.len() != p {
            return Err(Error::Config("inconsistent state dimensions".into()));
        }
        let t = self.len();
        if self.theta.iter().any(|b| b.len() != t) {
            return Err(Error::Config("state blocks differ in length".into()));
        }
        if !self.w.iter().all(|w| *w > 0.0 && w.is_finite()) || self.v.is_nan() || self.v <= 0.0 {
            return Err(Error::Config("variances must be positive".into()));
        }
        if !self.theta.iter().flatten().all(|x| x.is_finite()) {
            return Err(Error::Config("non-finite state".into()));
        }
        Ok(())
    }
}

/// `(H⁻¹ - I)·x`: entry `t` is the sum of the entries strictly before `t`.
pub fn shifted_prefix_sum(x: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    x.iter()
        .map(|v| {
            let out = acc;
            acc += v;
            out
        })
        .collect()
}

/// Conditional prior mean of block `k` given block `k+1`.
pub fn prior_mean(state: &PolyDlmState, k: usize) -> Result<Vec<f64>> {
    state.check_block(k)?;
    let level = state.theta0[k] + state.theta0_or_zero(k + 1);
    let mut mean = match state.theta.get(k + 1) {
        Some(next) => shifted_prefix_sum(next),
        None => vec![0.0; state.len()],
    };
    mean.iter_mut().for_each(|m| *m += level);
    Ok(mean)
}

/// A Gaussian full conditional `N(P⁻¹·rhs, P⁻¹)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianConditional {
    pub precision: BandedSpd,
    pub rhs: Vec<f64>,
}

impl GaussianConditional {
    pub fn factor(&self) -> Result<BandedCholesky> {
        Ok(self.precision.cholesky()?)
    }

    pub fn mean(&self) -> Result<Vec<f64>> {
        Ok(self.factor()?.solve(&self.rhs)?)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        let f = self.factor()?;
        Ok(sample_gaussian_precision(rng, &f, &self.rhs)?)
    }
}

/// Full conditional of block `k ≥ 1` given its neighbours.
pub fn block_conditional(state: &PolyDlmState, k: usize) -> Result<GaussianConditional> {
    state.check_block(k)?;
    if k == 0 {
        return Err(Error::IndexOutOfRange { index: 0, limit: 1 });
    }
    let t = state.len();
    let (w_prev, w_k) = (state.w[k - 1], state.w[k]);

    let mut precision = build_hth(t, 1.0 / w_k)?;
    precision.add_scaled(&build_btb(t, 1.0)?, 1.0 / w_prev)?;

    let mut rhs: Vec<f64> = apply_bth(&state.theta[k - 1])
        .into_iter()
        .map(|v| v / w_prev)
        .collect();
    rhs[0] += (state.theta0[k] + state.theta0_or_zero(k + 1)) / w_k;
    if let Some(next) = state.theta.get(k + 1) {
        for (r, v) in rhs.iter_mut().zip(apply_htb(next)) {
            *r += v / w_k;
        }
    }
    Ok(GaussianConditional { precision, rhs })
}

/// Full conditional of block 0 when it is observed with Gaussian noise of
/// precision `data_precision`: `P = data_precision·I + HᵀH / W_1`.
///
/// With `data = v` and unit precision this is the probit-augmented update.
pub fn level_conditional(
    state: &PolyDlmState,
    data: &[f64],
    data_precision: f64,
) -> Result<GaussianConditional> {
    let t = state.len();
    if data.len() != t {
        return Err(Error::Data(format!(
            "expected {t} observations, found {}",
            data.len()
        )));
    }
    let w1 = state.w[0];
    let mut precision = build_hth(t, 1.0 / w1)?;
    precision.add_diagonal(data_precision);

    let mut rhs: Vec<f64> = data.iter().map(|y| y * data_precision).collect();
    rhs[0] += (state.theta0[0] + state.theta0_or_zero(1)) / w1;
    if let Some(next) = state.theta.get(1) {
        for (r, v) in rhs.iter_mut().zip(apply_htb(next)) {
            *r += v / w1;
        }
    }
    Ok(GaussianConditional { precision, rhs })
}

/// Draws block `k ≥ 1` from its full conditional.
pub fn sample_theta_block<R: Rng + ?Sized>(
    rng: &mut R,
    state: &mut PolyDlmState,
    k: usize,
) -> Result<()> {
    let draw = block_conditional(state, k)?.sample(rng)?;
    state.theta[k] = draw;
    Ok(())
}

/// Draws block 0 under the identity link with observation variance `V`.
pub fn sample_theta_block_gaussian<R: Rng + ?Sized>(
    rng: &mut R,
    state: &mut PolyDlmState,
    y: &[f64],
) -> Result<()> {
    let draw = level_conditional(state, y, 1.0 / state.v)?.sample(rng)?;
    state.theta[0] = draw;
    Ok(())
}

/// `(mean, variance)` of the full conditional of the initial value `θ0_k`.
///
/// `θ0_k` enters the first state equation of blocks `k-1` and `k`; the
/// latter term is absent for `k = 0` and `θ0_{p}` is taken as zero.
pub fn theta0_conditional(
    state: &PolyDlmState,
    priors: &DlmPriors,
    k: usize,
) -> Result<(f64, f64)> {
    state.check_block(k)?;
    let prior = priors.theta0.get(k).ok_or(Error::IndexOutOfRange {
        index: k,
        limit: priors.theta0.len(),
    })?;
    let mut precision = 1.0 / prior.var + 1.0 / state.w[k];
    let mut linear =
        prior.mean / prior.var + (state.theta[k][0] - state.theta0_or_zero(k + 1)) / state.w[k];
    if k > 0 {
        precision += 1.0 / state.w[k - 1];
        linear += (state.theta[k - 1][0] - state.theta0[k - 1]) / state.w[k - 1];
    }
    let var = 1.0 / precision;
    Ok((var * linear, var))
}

pub fn sample_theta0<R: Rng + ?Sized>(
    rng: &mut R,
    state: &mut PolyDlmState,
    priors: &DlmPriors,
    k: usize,
) -> Result<()> {
    let (mean, var) = theta0_conditional(state, priors, k)?;
    let draw = Normal::new(mean, var.sqrt())
        .map_err(|e| Error::numeric("theta0", e.to_string()))?
        .sample(rng);
    state.theta0[k] = draw;
    Ok(())
}

/// `(block_k - m_k)ᵀ HᵀH (block_k - m_k)`, the sum of squared innovations.
pub fn innovation_quadratic(state: &PolyDlmState, k: usize) -> Result<f64> {
    let mean = prior_mean(state, k)?;
    let mut prev = 0.0;
    let mut q = 0.0;
    for (x, m) in state.theta[k].iter().zip(&mean) {
        let d = x - m;
        let h = d - prev;
        q += h * h;
        prev = d;
    }
    if q.is_finite() {
        Ok(q)
    } else {
        Err(Error::numeric(
            "W",
            format!("non-finite quadratic form in block {}", k + 1),
        ))
    }
}

/// Draws `1/W_k ~ Γ(ν_k + T/2, η_k + q/2)` and stores `W_k`.
pub fn sample_w<R: Rng + ?Sized>(
    rng: &mut R,
    state: &mut PolyDlmState,
    priors: &DlmPriors,
    k: usize,
) -> Result<()> {
    let q = innovation_quadratic(state, k)?;
    let prior = priors.w_precision[k];
    let precision = prior.sample_posterior(rng, state.len() as f64 / 2.0, q / 2.0, "W")?;
    state.w[k] = 1.0 / precision;
    Ok(())
}

/// Posterior shape and rate of `1/V`.
pub fn v_posterior(state: &PolyDlmState, priors: &DlmPriors, y: &[f64]) -> Result<GammaPrior> {
    if y.len() != state.len() {
        return Err(Error::Data(format!(
            "expected {} observations, found {}",
            state.len(),
            y.len()
        )));
    }
    let ss: f64 = y
        .iter()
        .zip(&state.theta[0])
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    if !ss.is_finite() {
        return Err(Error::numeric("V", "non-finite residual sum of squares"));
    }
    Ok(GammaPrior {
        shape: priors.v_precision.shape + y.len() as f64 / 2.0,
        rate: priors.v_precision.rate + ss / 2.0,
    })
}

/// Draws `1/V` from its gamma full conditional and stores `V`.
pub fn sample_v<R: Rng + ?Sized>(
    rng: &mut R,
    state: &mut PolyDlmState,
    priors: &DlmPriors,
    y: &[f64],
) -> Result<()> {
    let post = v_posterior(state, priors, y)?;
    let precision = GammaPrior {
        shape: post.shape,
        rate: post.rate,
    }
    .sample_posterior(rng, 0.0, 0.0, "V")?;
    state.v = 1.0 / precision;
    Ok(())
}

/// Replaces every block by a draw from the state prior given the current
/// initial values and variances, working down from the last block.
pub fn sample_prior_states<R: Rng + ?Sized>(rng: &mut R, state: &mut PolyDlmState) -> Result<()> {
    for k in (0..state.order()).rev() {
        let mean = prior_mean(state, k)?;
        let sd = state.w[k].sqrt();
        // H⁻¹·ω is a cumulative sum of the innovations.
        let mut walk = 0.0;
        for (x, m) in state.theta[k].iter_mut().zip(&mean) {
            walk += sd * rng.sample::<f64, _>(StandardNormal);
            *x = m + walk;
        }
    }
    Ok(())
}
