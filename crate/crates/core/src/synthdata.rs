//! Synthetic weight trajectories and the data designs built on them.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Binomial, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weight trajectories on the unit interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightCurve {
    /// `0.1 + 0.8t`
    Linear,
    /// `3(t - 0.5)² + 0.125`
    Parabolic,
    /// `cos(2π(t + π))/2.5 + 0.5`; the `+π` phase means the curve does not
    /// start at an extreme.
    Sinusoidal,
    /// 0.2 on `[0, 0.3)`, 0.8 on `[0.3, 0.7)`, 0.3 on `[0.7, 1)`.
    Steps,
}

impl WeightCurve {
    pub const ALL: [WeightCurve; 4] = [
        WeightCurve::Linear,
        WeightCurve::Parabolic,
        WeightCurve::Sinusoidal,
        WeightCurve::Steps,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            WeightCurve::Linear => "linear",
            WeightCurve::Parabolic => "parabolic",
            WeightCurve::Sinusoidal => "sinusoidal",
            WeightCurve::Steps => "steps",
        }
    }

    /// Weight at `t ∈ [0, 1)`.
    pub fn weight(self, t: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&t) {
            return Err(Error::Config(format!("time {t} outside [0, 1)")));
        }
        Ok(match self {
            WeightCurve::Linear => 0.1 + 0.8 * t,
            WeightCurve::Parabolic => 3.0 * (t - 0.5) * (t - 0.5) + 0.125,
            WeightCurve::Sinusoidal => {
                (2.0 * std::f64::consts::PI * (t + std::f64::consts::PI)).cos() / 2.5 + 0.5
            }
            WeightCurve::Steps => {
                if t < 0.3 {
                    0.2
                } else if t < 0.7 {
                    0.8
                } else {
                    0.3
                }
            }
        })
    }

    /// Weights on the grid `t_i = (i - 1)/T`, `i = 1..T`.
    pub fn curve(self, len: usize) -> Result<Vec<f64>> {
        (0..len)
            .map(|i| self.weight(i as f64 / len as f64))
            .collect()
    }
}

impl fmt::Display for WeightCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightCurve {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        WeightCurve::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown weight curve '{s}'")))
    }
}

/// Observation designs driven by a weight curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Design {
    Bernoulli,
    Binomial {
        trials: u32,
    },
    /// `y_t ~ N(α_t, sd²)`
    Gaussian {
        sd: f64,
    },
    /// `y_t ~ (1 - α_t) N(μ₁, 1/φ₁) + α_t N(μ₂, 1/φ₂)`
    Mixture {
        mu: [f64; 2],
        phi: [f64; 2],
    },
}

impl Design {
    pub const GAUSSIAN: Design = Design::Gaussian { sd: 0.1 };
    pub const MIXTURE: Design = Design::Mixture {
        mu: [0.0, 2.0],
        phi: [4.0, 4.0],
    };

    fn validate(&self) -> Result<()> {
        match *self {
            Design::Bernoulli => Ok(()),
            Design::Binomial { trials } if trials >= 1 => Ok(()),
            Design::Binomial { .. } => {
                Err(Error::Config("binomial trials must be positive".into()))
            }
            Design::Gaussian { sd } if sd > 0.0 && sd.is_finite() => Ok(()),
            Design::Gaussian { .. } => Err(Error::Config("noise sd must be positive".into())),
            Design::Mixture { mu, phi } => {
                if mu.iter().all(|m| m.is_finite()) && phi.iter().all(|p| *p > 0.0 && p.is_finite())
                {
                    Ok(())
                } else {
                    Err(Error::Config(
                        "mixture means must be finite and precisions positive".into(),
                    ))
                }
            }
        }
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Design::Bernoulli => f.write_str("bernoulli"),
            Design::Binomial { trials } => write!(f, "binomial:{trials}"),
            Design::Gaussian { .. } => f.write_str("gaussian"),
            Design::Mixture { .. } => f.write_str("mixture"),
        }
    }
}

impl FromStr for Design {
    type Err = Error;

    /// `bernoulli`, `binomial:<n>`, `gaussian` or `mixture`, the latter two
    /// with their standard parameters.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let design = match s.as_str() {
            "bernoulli" => Design::Bernoulli,
            "gaussian" => Design::GAUSSIAN,
            "mixture" => Design::MIXTURE,
            other => match other.strip_prefix("binomial:") {
                Some(n) => Design::Binomial {
                    trials: n
                        .parse()
                        .map_err(|_| Error::Config(format!("invalid trial count '{n}'")))?,
                },
                None => return Err(Error::Config(format!("unknown design '{other}'"))),
            },
        };
        design.validate()?;
        Ok(design)
    }
}

/// Observations together with the truth that generated them.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub y: Vec<f64>,
    pub alpha: Vec<f64>,
    /// Second-component indicators (mixture design only).
    pub z: Option<Vec<bool>>,
}

/// Simulates `len` observations of `design` along `curve`.
pub fn generate<R: Rng + ?Sized>(
    rng: &mut R,
    design: Design,
    curve: WeightCurve,
    len: usize,
) -> Result<SyntheticData> {
    if len == 0 {
        return Err(Error::Config("series length must be positive".into()));
    }
    generate_with_weights(rng, design, curve.curve(len)?)
}

/// Simulates one observation per entry of `alpha`.
pub fn generate_with_weights<R: Rng + ?Sized>(
    rng: &mut R,
    design: Design,
    alpha: Vec<f64>,
) -> Result<SyntheticData> {
    design.validate()?;
    if let Some(a) = alpha.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::Config(format!("weight {a} outside [0, 1]")));
    }
    let mut z = None;
    let y = match design {
        Design::Bernoulli => alpha
            .iter()
            .map(|&a| f64::from(u8::from(rng.random::<f64>() < a)))
            .collect(),
        Design::Binomial { trials } => alpha
            .iter()
            .map(|&a| {
                Binomial::new(u64::from(trials), a)
                    .map(|b| b.sample(rng) as f64)
                    .map_err(|e| Error::Config(e.to_string()))
            })
            .collect::<Result<_>>()?,
        Design::Gaussian { sd } => alpha
            .iter()
            .map(|&a| a + sd * rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect(),
        Design::Mixture { mu, phi } => {
            let comps = [
                Normal::new(mu[0], phi[0].recip().sqrt()),
                Normal::new(mu[1], phi[1].recip().sqrt()),
            ];
            let comps = [
                comps[0].map_err(|e| Error::Config(e.to_string()))?,
                comps[1].map_err(|e| Error::Config(e.to_string()))?,
            ];
            let alloc: Vec<bool> = alpha.iter().map(|&a| rng.random::<f64>() < a).collect();
            let y = alloc
                .iter()
                .map(|&second| comps[usize::from(second)].sample(rng))
                .collect();
            z = Some(alloc);
            y
        }
    };
    Ok(SyntheticData { y, alpha, z })
}
