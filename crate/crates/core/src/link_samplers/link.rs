use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};

use crate::error::Error;

/// Probabilities passed to a likelihood are kept inside `[ε, 1-ε]`.
pub const PROBABILITY_CLAMP: f64 = 1e-12;

/// Bijection between the weight space and the real line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    Logit,
    Probit,
    Identity,
}

impl Link {
    /// Maps a weight to the state scale.
    pub fn forward(self, a: f64) -> f64 {
        match self {
            Link::Logit => a.ln() - (-a).ln_1p(),
            Link::Probit => normal_quantile(a),
            Link::Identity => a,
        }
    }

    /// Maps a state back to the weight scale.
    pub fn inverse(self, theta: f64) -> f64 {
        match self {
            Link::Logit => {
                if theta >= 0.0 {
                    1.0 / (1.0 + (-theta).exp())
                } else {
                    let e = theta.exp();
                    e / (1.0 + e)
                }
            }
            Link::Probit => normal_cdf(theta),
            Link::Identity => theta,
        }
    }

    /// [`Link::inverse`] clamped away from 0 and 1 for the probability links.
    pub fn inverse_clamped(self, theta: f64) -> f64 {
        match self {
            Link::Identity => theta,
            _ => self
                .inverse(theta)
                .clamp(PROBABILITY_CLAMP, 1.0 - PROBABILITY_CLAMP),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Link::Logit => "logit",
            Link::Probit => "probit",
            Link::Identity => "identity",
        }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Link {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "logit" => Ok(Link::Logit),
            "probit" => Ok(Link::Probit),
            "identity" => Ok(Link::Identity),
            other => Err(Error::Config(format!("unknown link '{other}'"))),
        }
    }
}

/// Standard normal CDF, accurate in both tails.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

pub fn normal_log_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let d = x - mean;
    -0.5 * ((2.0 * PI * var).ln() + d * d / var)
}

/// Standard normal quantile with one Newton correction step.
pub fn normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let mut x = -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p);
    // Newton on the tail that is represented more precisely.
    let density = (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
    if density > 0.0 {
        let err = if x < 0.0 {
            normal_cdf(x) - p
        } else {
            (1.0 - p) - normal_cdf(-x)
        };
        x -= err / density;
    }
    x
}
