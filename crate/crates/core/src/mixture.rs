//! Two-component Gaussian mixture: component parameters, allocations and the
//! `μ₁ < μ₂` labelling constraint.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link_samplers::normal_log_pdf;
use crate::poly_dlm::{GammaPrior, NormalPrior};

pub const COMPONENTS: usize = 2;

/// Component means and precisions plus allocations; `z[t]` is true when
/// observation `t` belongs to the second component.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureParams {
    pub mu: [f64; COMPONENTS],
    pub phi: [f64; COMPONENTS],
    pub z: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixturePriors {
    pub mean: [NormalPrior; COMPONENTS],
    pub precision: [GammaPrior; COMPONENTS],
}

impl MixturePriors {
    /// `μ₁ ~ N(q₁, 10 s²)`, `μ₂ ~ N(q₃, 10 s²)`, `φ_k ~ Γ(0.01, 0.01)` from the
    /// sample quartiles and variance of `y`.
    pub fn from_data(y: &[f64]) -> Result<Self> {
        if y.len() < 2 {
            return Err(Error::Data(
                "at least two observations are needed for data-driven priors".into(),
            ));
        }
        let mut sorted = y.to_vec();
        sorted.sort_by(f64::total_cmp);
        let var = sample_variance(y);
        if var.is_nan() || var <= 0.0 {
            return Err(Error::Data("observations have zero variance".into()));
        }
        Ok(Self {
            mean: [
                NormalPrior {
                    mean: quantile_sorted(&sorted, 0.25),
                    var: 10.0 * var,
                },
                NormalPrior {
                    mean: quantile_sorted(&sorted, 0.75),
                    var: 10.0 * var,
                },
            ],
            precision: [GammaPrior::VAGUE; COMPONENTS],
        })
    }

    pub fn validate(&self) -> Result<()> {
        for k in 0..COMPONENTS {
            let m = self.mean[k];
            let g = self.precision[k];
            if !(m.var > 0.0 && m.var.is_finite() && m.mean.is_finite()) {
                return Err(Error::Config(format!(
                    "mu{} prior variance must be positive",
                    k + 1
                )));
            }
            if !(g.shape > 0.0 && g.rate > 0.0 && g.shape.is_finite() && g.rate.is_finite()) {
                return Err(Error::Config(format!(
                    "phi{} prior hyperparameters must be positive",
                    k + 1
                )));
            }
        }
        Ok(())
    }
}

/// Unbiased sample variance.
pub fn sample_variance(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
}

/// Linearly interpolated quantile of sorted data (the `(n-1)p` rule).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Per-component counts and sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SufficientStats {
    pub count: [usize; COMPONENTS],
    pub sum: [f64; COMPONENTS],
}

pub fn sufficient_stats(y: &[f64], z: &[bool]) -> SufficientStats {
    let mut s = SufficientStats {
        count: [0; COMPONENTS],
        sum: [0.0; COMPONENTS],
    };
    for (&v, &zt) in y.iter().zip(z) {
        let k = zt as usize;
        s.count[k] += 1;
        s.sum[k] += v;
    }
    s
}

impl MixtureParams {
    /// `z_t = 1{y_t > median(y)}`; each component starts at its group mean
    /// and inverse group variance.
    pub fn initial(y: &[f64]) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::Data("no observations".into()));
        }
        let mut sorted = y.to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = crate::diagnostics::median_sorted(&sorted);
        let z: Vec<bool> = y.iter().map(|v| *v > median).collect();
        let overall = if y.len() > 1 { sample_variance(y) } else { 1.0 };
        let mut mu = [0.0; COMPONENTS];
        let mut phi = [1.0; COMPONENTS];
        for k in 0..COMPONENTS {
            let group: Vec<f64> = y
                .iter()
                .zip(&z)
                .filter(|(_, &zt)| zt as usize == k)
                .map(|(v, _)| *v)
                .collect();
            mu[k] = if group.is_empty() {
                sorted[(sorted.len() - 1) * k]
            } else {
                group.iter().sum::<f64>() / group.len() as f64
            };
            let var = if group.len() > 1 {
                sample_variance(&group)
            } else {
                overall
            };
            phi[k] = if var > 0.0 && var.is_finite() {
                1.0 / var
            } else {
                1.0
            };
        }
        let mut params = Self { mu, phi, z };
        params.enforce_order();
        Ok(params)
    }

    /// Swaps the component labels when `μ₁ > μ₂`, flipping every allocation.
    pub fn enforce_order(&mut self) {
        if self.mu[0] > self.mu[1] {
            self.mu.swap(0, 1);
            self.phi.swap(0, 1);
            self.z.iter_mut().for_each(|z| *z = !*z);
        }
    }

    /// Complete-data log-likelihood of `y` under the current allocations.
    pub fn log_likelihood(&self, y: &[f64]) -> f64 {
        y.iter()
            .zip(&self.z)
            .map(|(&v, &zt)| {
                let k = zt as usize;
                normal_log_pdf(v, self.mu[k], 1.0 / self.phi[k])
            })
            .sum()
    }
}

/// Draws `μ_k` then `φ_k` for each component given the allocations, then
/// restores the labelling constraint.
///
/// `φ_k | · ~ Γ(ν_k + T_k/2, η_k + v_k/2)` with `v_k = Σ (y_t - μ_k)²` taken
/// at the freshly drawn mean.
pub fn sample_components<R: Rng + ?Sized>(
    rng: &mut R,
    params: &mut MixtureParams,
    priors: &MixturePriors,
    y: &[f64],
) -> Result<()> {
    if y.len() != params.z.len() {
        return Err(Error::Data(format!(
            "expected {} observations, found {}",
            params.z.len(),
            y.len()
        )));
    }
    let stats = sufficient_stats(y, &params.z);
    for k in 0..COMPONENTS {
        let (mean, var) = mean_conditional(&stats, params.phi[k], &priors.mean[k], k);
        let mu = Normal::new(mean, var.sqrt())
            .map_err(|e| Error::numeric("mu", e.to_string()))?
            .sample(rng);
        params.mu[k] = mu;
        let ss: f64 = y
            .iter()
            .zip(&params.z)
            .filter(|(_, &zt)| zt as usize == k)
            .map(|(v, _)| (v - mu) * (v - mu))
            .sum();
        params.phi[k] = priors.precision[k].sample_posterior(
            rng,
            stats.count[k] as f64 / 2.0,
            ss / 2.0,
            "phi",
        )?;
    }
    params.enforce_order();
    Ok(())
}

/// `(mean, variance)` of `μ_k` given the allocations and `φ_k`.
pub fn mean_conditional(
    stats: &SufficientStats,
    phi: f64,
    prior: &NormalPrior,
    k: usize,
) -> (f64, f64) {
    let var = 1.0 / (stats.count[k] as f64 * phi + 1.0 / prior.var);
    (var * (stats.sum[k] * phi + prior.mean / prior.var), var)
}

/// Posterior probability that observation `y` belongs to the second
/// component given prior weight `alpha`, evaluated in log space.
pub fn allocation_probability(mu: &[f64; 2], phi: &[f64; 2], alpha: f64, y: f64) -> f64 {
    if alpha <= 0.0 {
        return 0.0;
    }
    if alpha >= 1.0 {
        return 1.0;
    }
    let second = alpha.ln() + normal_log_pdf(y, mu[1], 1.0 / phi[1]);
    let first = (-alpha).ln_1p() + normal_log_pdf(y, mu[0], 1.0 / phi[0]);
    let d = first - second;
    if d.is_nan() {
        return 0.5;
    }
    1.0 / (1.0 + d.exp())
}

/// Draws every allocation independently given the current weights.
pub fn sample_allocations<R: Rng + ?Sized>(
    rng: &mut R,
    params: &mut MixtureParams,
    alpha: &[f64],
    y: &[f64],
) -> Result<()> {
    if alpha.len() != y.len() || y.len() != params.z.len() {
        return Err(Error::Data(
            "weights, observations and allocations differ in length".into(),
        ));
    }
    let (mu, phi) = (params.mu, params.phi);
    for ((z, &a), &v) in params.z.iter_mut().zip(alpha).zip(y) {
        let p = allocation_probability(&mu, &phi, a, v);
        *z = rng.random::<f64>() < p;
    }
    Ok(())
}
