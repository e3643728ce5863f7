//! The full Gibbs sampler and its chain storage.
//!
//! One iteration visits, in order: the mixture components and allocations
//! (mixture mode only), then blocks `p, …, 2` of the dynamic model (initial
//! value, variance, states), then the level block's initial value and
//! variance, then the level block itself through the link-specific sampler,
//! and finally recomputes the weights `α_t = link⁻¹(θ_{t1})`.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::link_samplers::{
    cwmh_sweep, probit_augment, probit_theta1, AdaptiveScales, BinomialObs, Link,
};
use crate::mixture::{sample_allocations, sample_components, MixtureParams, MixturePriors};
use crate::poly_dlm::{
    sample_theta0, sample_theta_block, sample_theta_block_gaussian, sample_v, sample_w, DlmPriors,
    PolyDlmState,
};

/// Iterations between progress callbacks.
pub const PROGRESS_INTERVAL: usize = 1000;

/// What the observations are and how they enter the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DataMode {
    /// Real observations from a two-component mixture with dynamic weights.
    Mixture,
    /// Binary observations with success probability `α_t`.
    Bernoulli,
    /// Counts out of a fixed number of trials.
    Binomial(u32),
    /// Real observations of the level with Gaussian noise (identity link).
    Gaussian,
}

impl DataMode {
    /// Trials per observation for the count modes.
    pub fn trials(self) -> Option<u32> {
        match self {
            DataMode::Bernoulli => Some(1),
            DataMode::Binomial(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for DataMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataMode::Mixture => f.write_str("mixture"),
            DataMode::Bernoulli => f.write_str("bernoulli"),
            DataMode::Binomial(n) => write!(f, "binomial:{n}"),
            DataMode::Gaussian => f.write_str("gaussian"),
        }
    }
}

impl FromStr for DataMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "mixture" => Ok(DataMode::Mixture),
            "bernoulli" => Ok(DataMode::Bernoulli),
            "gaussian" => Ok(DataMode::Gaussian),
            other => match other.strip_prefix("binomial:") {
                Some(n) => match n.parse::<u32>() {
                    Ok(n) if n >= 1 => Ok(DataMode::Binomial(n)),
                    _ => Err(Error::Config(format!("invalid trial count '{n}'"))),
                },
                None => Err(Error::Config(format!("unknown data mode '{other}'"))),
            },
        }
    }
}

impl Serialize for DataMode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DataMode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Everything that determines a chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub link: Link,
    /// Polynomial order `p` of the dynamic model.
    pub order: usize,
    pub seed: u64,
    pub mode: DataMode,
    pub priors: DlmPriors,
    /// Component priors; derived from the data quartiles when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixture_priors: Option<MixturePriors>,
    /// Resample the initial values `θ0_k` each iteration.
    pub update_theta0: bool,
    /// Resample `W_k` (and `V` in gaussian mode) each iteration.
    pub update_variances: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_theta0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_w: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_v: Option<f64>,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            iterations: 220_000,
            burn_in: 20_000,
            thin: 200,
            link: Link::Logit,
            order: 2,
            seed: 0,
            mode: DataMode::Mixture,
            priors: DlmPriors::standard(2),
            mixture_priors: None,
            update_theta0: true,
            update_variances: true,
            initial_theta0: None,
            initial_w: None,
            initial_v: None,
        }
    }
}

impl FitConfig {
    /// Default settings for `mode`, with the identity link in gaussian mode.
    pub fn for_mode(mode: DataMode) -> Self {
        Self {
            mode,
            link: if mode == DataMode::Gaussian {
                Link::Identity
            } else {
                Link::Logit
            },
            ..Self::default()
        }
    }

    /// Sets the model order together with standard priors of that order.
    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self.priors = DlmPriors::standard(order);
        self
    }

    pub fn kept_draws(&self) -> usize {
        self.iterations.saturating_sub(self.burn_in) / self.thin.max(1)
    }

    /// Whether iteration `i` (1-based) is stored.
    pub fn keeps(&self, i: usize) -> bool {
        i > self.burn_in && (i - self.burn_in).is_multiple_of(self.thin)
    }

    /// Checks the mode/link combination alone.
    pub fn check_link(&self) -> Result<()> {
        match (self.mode, self.link) {
            (DataMode::Gaussian, Link::Identity) => Ok(()),
            (DataMode::Gaussian, link) => Err(Error::Incompatible(format!(
                "gaussian mode uses the identity link, not {link}"
            ))),
            (mode, Link::Identity) => Err(Error::Incompatible(format!(
                "the identity link is only available in gaussian mode, not {mode}"
            ))),
            (DataMode::Binomial(n), Link::Probit) if n > 1 => Err(Error::Incompatible(format!(
                "the probit link needs binary data, not {n} trials"
            ))),
            _ => Ok(()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.thin == 0 {
            return Err(Error::Config("thinning lag must be at least 1".into()));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::Config(format!(
                "burn-in {} must be below the iteration count {}",
                self.burn_in, self.iterations
            )));
        }
        if self.kept_draws() == 0 {
            return Err(Error::Config("settings keep no draws".into()));
        }
        if self.order == 0 {
            return Err(Error::Config("model order must be at least 1".into()));
        }
        if self.mode == DataMode::Binomial(0) {
            return Err(Error::Config("binomial trials must be positive".into()));
        }
        self.check_link()?;
        self.priors.validate(self.order)?;
        if let Some(m) = &self.mixture_priors {
            m.validate()?;
        }
        let check_len = |what: &str, v: &Option<Vec<f64>>| match v {
            Some(v) if v.len() != self.order => Err(Error::Config(format!(
                "{what} has {} entries, model order is {}",
                v.len(),
                self.order
            ))),
            _ => Ok(()),
        };
        check_len("initial theta0", &self.initial_theta0)?;
        check_len("initial W", &self.initial_w)?;
        if let Some(w) = &self.initial_w {
            if !w.iter().all(|w| *w > 0.0 && w.is_finite()) {
                return Err(Error::Config("initial W must be positive".into()));
            }
        }
        if let Some(t) = &self.initial_theta0 {
            if !t.iter().all(|t| t.is_finite()) {
                return Err(Error::Config("initial theta0 must be finite".into()));
            }
        }
        if let Some(v) = self.initial_v {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config("initial V must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Named scalar draws, one row per kept iteration.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParameterTable {
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ParameterTable {
    pub fn new(names: Vec<String>) -> Self {
        Self {
            names,
            rows: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_at(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.names.iter().position(|n| n == name)?;
        Some(self.column_at(j))
    }
}

/// Thinned post-burn-in output of one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainStore {
    pub parameters: ParameterTable,
    /// `curve[d][t]`: weight (or level, in gaussian mode) at time `t` in kept
    /// draw `d`.
    pub curve: Vec<Vec<f64>>,
    /// Post-burn-in CWMH acceptance rate per site (logit and count paths).
    pub acceptance: Option<Vec<f64>>,
    /// CWMH proposals rejected for a non-finite acceptance ratio.
    pub nonfinite_proposals: u64,
}

impl ChainStore {
    pub fn parameters(&self) -> &ParameterTable {
        &self.parameters
    }

    pub fn curve_draws(&self) -> &[Vec<f64>] {
        &self.curve
    }

    pub fn len(&self) -> usize {
        self.curve.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curve.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        self.parameters.column(name)
    }
}

/// Stream identifiers; each conditional draws from its own substream.
mod stream {
    pub const INIT: u64 = 0;
    pub const COMPONENTS: u64 = 1;
    pub const ALLOCATIONS: u64 = 2;
    pub const THETA0: u64 = 3;
    pub const W: u64 = 4;
    pub const BLOCKS: u64 = 5;
    pub const LEVEL: u64 = 6;
    pub const V: u64 = 7;
}

fn substream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

#[derive(Debug, Clone)]
struct Streams {
    components: ChaCha8Rng,
    allocations: ChaCha8Rng,
    theta0: ChaCha8Rng,
    w: ChaCha8Rng,
    blocks: ChaCha8Rng,
    level: ChaCha8Rng,
    v: ChaCha8Rng,
}

impl Streams {
    fn new(seed: u64) -> Self {
        Self {
            components: substream(seed, stream::COMPONENTS),
            allocations: substream(seed, stream::ALLOCATIONS),
            theta0: substream(seed, stream::THETA0),
            w: substream(seed, stream::W),
            blocks: substream(seed, stream::BLOCKS),
            level: substream(seed, stream::LEVEL),
            v: substream(seed, stream::V),
        }
    }
}

/// Checks `y` against the mode and returns the counts for the count modes.
fn validate_data(mode: DataMode, y: &[f64]) -> Result<Vec<u32>> {
    if y.is_empty() {
        return Err(Error::Data("no observations".into()));
    }
    if let Some((t, v)) = y.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::Data(format!("observation {} is {v}", t + 1)));
    }
    match mode.trials() {
        None => {
            if mode == DataMode::Mixture && y.len() < 2 {
                return Err(Error::Data(
                    "mixture mode needs at least two observations".into(),
                ));
            }
            Ok(Vec::new())
        }
        Some(n) => y
            .iter()
            .enumerate()
            .map(|(t, &v)| {
                if v.fract() == 0.0 && (0.0..=f64::from(n)).contains(&v) {
                    Ok(v as u32)
                } else {
                    Err(Error::Data(format!(
                        "observation {} is {v}, expected an integer in 0..={n}",
                        t + 1
                    )))
                }
            })
            .collect(),
    }
}

/// Sampler state of a single chain, advanced one iteration at a time.
#[derive(Debug, Clone)]
pub struct Chain {
    config: FitConfig,
    y: Vec<f64>,
    counts: Vec<u32>,
    responses: Vec<u32>,
    state: PolyDlmState,
    mixture: Option<MixtureParams>,
    mixture_priors: Option<MixturePriors>,
    alpha: Vec<f64>,
    scales: AdaptiveScales,
    streams: Streams,
    iteration: usize,
}

impl Chain {
    pub fn new(config: &FitConfig, y: &[f64]) -> Result<Self> {
        config.validate()?;
        let counts = validate_data(config.mode, y)?;
        let len = y.len();
        let mut init = substream(config.seed, stream::INIT);
        let mut state = PolyDlmState::initial(&mut init, config.order, len, &config.priors)?;
        if let Some(t) = &config.initial_theta0 {
            state.theta0.clone_from(t);
        }
        if let Some(w) = &config.initial_w {
            state.w.clone_from(w);
        }
        if let Some(v) = config.initial_v {
            state.v = v;
        }
        let (mixture, mixture_priors) = if config.mode == DataMode::Mixture {
            let priors = match &config.mixture_priors {
                Some(p) => *p,
                None => MixturePriors::from_data(y)?,
            };
            (Some(MixtureParams::initial(y)?), Some(priors))
        } else {
            (None, None)
        };
        let alpha = state.theta[0]
            .iter()
            .map(|&th| config.link.inverse(th))
            .collect();
        Ok(Self {
            config: config.clone(),
            y: y.to_vec(),
            counts,
            responses: vec![0; len],
            state,
            mixture,
            mixture_priors,
            alpha,
            scales: AdaptiveScales::new(len),
            streams: Streams::new(config.seed),
            iteration: 0,
        })
    }

    pub fn config(&self) -> &FitConfig {
        &self.config
    }

    /// Completed iterations.
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn state(&self) -> &PolyDlmState {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut PolyDlmState {
        &mut self.state
    }

    pub fn mixture(&self) -> Option<&MixtureParams> {
        self.mixture.as_ref()
    }

    pub fn mixture_priors(&self) -> Option<&MixturePriors> {
        self.mixture_priors.as_ref()
    }

    /// Current weights (the level curve in gaussian mode).
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn scales(&self) -> &AdaptiveScales {
        &self.scales
    }

    pub fn scales_mut(&mut self) -> &mut AdaptiveScales {
        &mut self.scales
    }

    pub fn observations(&self) -> &[f64] {
        &self.y
    }

    /// Replaces the observations, keeping every other part of the state.
    pub fn set_observations(&mut self, y: &[f64]) -> Result<()> {
        if y.len() != self.y.len() {
            return Err(Error::Data(format!(
                "expected {} observations, found {}",
                self.y.len(),
                y.len()
            )));
        }
        self.counts = validate_data(self.config.mode, y)?;
        self.y.copy_from_slice(y);
        Ok(())
    }

    /// Names of the scalar quantities reported by [`parameter_values`](Self::parameter_values).
    pub fn parameter_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        if self.mixture.is_some() {
            names.extend(["mu1", "phi1", "mu2", "phi2"].map(String::from));
        }
        names.extend((1..=self.config.order).map(|k| format!("theta0_{k}")));
        names.extend((1..=self.config.order).map(|k| format!("W_{k}")));
        if self.config.mode == DataMode::Gaussian {
            names.push("V".into());
        }
        names
    }

    pub fn parameter_values(&self) -> Vec<f64> {
        let mut values = Vec::new();
        if let Some(m) = &self.mixture {
            values.extend([m.mu[0], m.phi[0], m.mu[1], m.phi[1]]);
        }
        values.extend(&self.state.theta0);
        values.extend(&self.state.w);
        if self.config.mode == DataMode::Gaussian {
            values.push(self.state.v);
        }
        values
    }

    /// Runs one full iteration; failures carry the iteration number.
    pub fn step(&mut self) -> Result<()> {
        let iteration = self.iteration + 1;
        self.sweep().map_err(|e| Error::AtIteration {
            iteration,
            source: Box::new(e),
        })?;
        self.iteration = iteration;
        Ok(())
    }

    fn sweep(&mut self) -> Result<()> {
        let Self {
            config,
            y,
            counts,
            responses,
            state,
            mixture,
            mixture_priors,
            alpha,
            scales,
            streams,
            ..
        } = self;
        let priors = &config.priors;

        if let (Some(mix), Some(mix_priors)) = (mixture.as_mut(), mixture_priors.as_ref()) {
            sample_components(&mut streams.components, mix, mix_priors, y)?;
            sample_allocations(&mut streams.allocations, mix, alpha, y)?;
        }

        for k in (1..config.order).rev() {
            if config.update_theta0 {
                sample_theta0(&mut streams.theta0, state, priors, k)?;
            }
            if config.update_variances {
                sample_w(&mut streams.w, state, priors, k)?;
            }
            sample_theta_block(&mut streams.blocks, state, k)?;
        }
        if config.update_theta0 {
            sample_theta0(&mut streams.theta0, state, priors, 0)?;
        }
        if config.update_variances {
            sample_w(&mut streams.w, state, priors, 0)?;
        }

        match (config.mode, config.link) {
            (DataMode::Gaussian, _) => {
                sample_theta_block_gaussian(&mut streams.level, state, y)?;
                if config.update_variances {
                    sample_v(&mut streams.v, state, priors, y)?;
                }
            }
            (_, Link::Probit) => {
                let z: Vec<bool> = match mixture.as_ref() {
                    Some(m) => m.z.clone(),
                    None => counts.iter().map(|&c| c > 0).collect(),
                };
                let latent = probit_augment(&mut streams.level, state, &z)?;
                probit_theta1(&mut streams.level, state, &latent)?;
            }
            (mode, link) => {
                let obs = match mixture.as_ref() {
                    Some(m) => {
                        for (r, &z) in responses.iter_mut().zip(&m.z) {
                            *r = u32::from(z);
                        }
                        BinomialObs {
                            successes: responses,
                            trials: 1,
                        }
                    }
                    None => BinomialObs {
                        successes: counts,
                        trials: mode.trials().unwrap_or(1),
                    },
                };
                cwmh_sweep(&mut streams.level, state, &obs, link, scales)?;
            }
        }

        for (a, &th) in alpha.iter_mut().zip(&state.theta[0]) {
            *a = config.link.inverse(th);
        }
        if let Some(t) = alpha.iter().position(|a| !a.is_finite()) {
            return Err(Error::numeric(
                "alpha",
                format!("weight at time {} is not finite", t + 1),
            ));
        }
        Ok(())
    }

    fn uses_cwmh(&self) -> bool {
        matches!(self.config.link, Link::Logit)
    }
}

/// Runs a chain, calling `progress` with the iteration count every
/// [`PROGRESS_INTERVAL`] iterations.
pub fn run_fit_with_progress(
    config: &FitConfig,
    y: &[f64],
    mut progress: impl FnMut(usize),
) -> Result<ChainStore> {
    let mut chain = Chain::new(config, y)?;
    let kept = config.kept_draws();
    let mut parameters = ParameterTable::new(chain.parameter_names());
    parameters.rows.reserve(kept);
    let mut curve = Vec::with_capacity(kept);
    for i in 1..=config.iterations {
        chain.step()?;
        if i == config.burn_in {
            chain.scales.reset_totals();
        }
        if config.keeps(i) {
            parameters.rows.push(chain.parameter_values());
            curve.push(chain.alpha.clone());
        }
        if i % PROGRESS_INTERVAL == 0 {
            progress(i);
        }
    }
    let acceptance = chain.uses_cwmh().then(|| chain.scales.acceptance_rates());
    Ok(ChainStore {
        parameters,
        curve,
        acceptance,
        nonfinite_proposals: chain.scales.nonfinite_proposals(),
    })
}

/// Runs the full sampler for `config.mode` on `y`.
pub fn run_fit(config: &FitConfig, y: &[f64]) -> Result<ChainStore> {
    run_fit_with_progress(config, y, |_| {})
}

/// Count data out of `trials`: only the dynamic-model and level updates run.
pub fn run_binomial_fit(config: &FitConfig, counts: &[u32], trials: u32) -> Result<ChainStore> {
    let mut config = config.clone();
    config.mode = if trials == 1 {
        DataMode::Bernoulli
    } else {
        DataMode::Binomial(trials)
    };
    let y: Vec<f64> = counts.iter().map(|&c| f64::from(c)).collect();
    run_fit(&config, &y)
}

/// Identity-link fit of a noisy level; the stored curve is `θ_{t1}`.
pub fn run_gaussian_fit(config: &FitConfig, y: &[f64]) -> Result<ChainStore> {
    let mut config = config.clone();
    config.mode = DataMode::Gaussian;
    config.link = Link::Identity;
    run_fit(&config, y)
}

/// Seed of chain `c` in a multi-chain run.
pub fn chain_seed(seed: u64, c: usize) -> u64 {
    seed.wrapping_add(c as u64)
}

/// Runs `chains` independent chains in parallel, chain `c` seeded with
/// [`chain_seed`]`(config.seed, c)`.
pub fn run_chains(config: &FitConfig, y: &[f64], chains: usize) -> Vec<Result<ChainStore>> {
    run_chains_with_progress(config, y, chains, |_, _| {})
}

/// As [`run_chains`], reporting `(chain, iteration)` every
/// [`PROGRESS_INTERVAL`] iterations.
pub fn run_chains_with_progress<F>(
    config: &FitConfig,
    y: &[f64],
    chains: usize,
    progress: F,
) -> Vec<Result<ChainStore>>
where
    F: Fn(usize, usize) + Sync,
{
    let progress = &progress;
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..chains)
            .map(|c| {
                let mut cfg = config.clone();
                cfg.seed = chain_seed(config.seed, c);
                scope.spawn(move || run_fit_with_progress(&cfg, y, |i| progress(c, i)))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("chain thread panicked"))
            .collect()
    })
}
