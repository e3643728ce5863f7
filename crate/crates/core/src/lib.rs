//! Bayesian dynamic mixtures: two-component Gaussian mixtures whose weight
//! evolves in time through a link-transformed polynomial dynamic linear
//! model, fitted by Gibbs sampling with banded precision-based state updates.
//!
//! ```no_run
//! use dynmix::gibbs::{run_fit, DataMode, FitConfig};
//! use dynmix::synthdata::{generate, Design, WeightCurve};
//! use rand::SeedableRng;
//!
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
//! let data = generate(&mut rng, Design::MIXTURE, WeightCurve::Steps, 400).unwrap();
//! let config = FitConfig { iterations: 40_000, burn_in: 4_000, thin: 40, ..FitConfig::for_mode(DataMode::Mixture) };
//! let store = run_fit(&config, &data.y).unwrap();
//! let curve = dynmix::diagnostics::summarize_curve(&store, 0.9).unwrap();
//! # let _ = curve;
//! ```

pub mod banded;
pub mod diagnostics;
pub mod error;
pub mod gibbs;
pub mod io;
pub mod link_samplers;
pub mod mixture;
pub mod poly_dlm;
pub mod synthdata;

pub use error::{Error, LinalgError, Result};
pub use gibbs::{run_binomial_fit, run_fit, run_gaussian_fit, ChainStore, DataMode, FitConfig};
pub use link_samplers::Link;
