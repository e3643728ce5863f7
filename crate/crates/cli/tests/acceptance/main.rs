//! End-to-end acceptance checks. Prints one PASS/FAIL/SKIP line per
//! criterion and exits non-zero when any criterion fails.

mod oracle;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use dynmix::banded::build_hth;
use dynmix::diagnostics::{
    curve_rmse, hpd, ks_two_sample, mean_abs_difference, median, summarize_curve,
};
use dynmix::gibbs::{run_binomial_fit, run_fit, Chain, DataMode, FitConfig};
use dynmix::link_samplers::{cwmh_conditional, BATCH_LEN};
use dynmix::poly_dlm::{
    block_conditional, innovation_quadratic, level_conditional, prior_mean, sample_prior_states,
    theta0_conditional, v_posterior, DlmPriors, GammaPrior, NormalPrior, PolyDlmState,
};
use dynmix::synthdata::{generate, Design, WeightCurve};
use dynmix::Link;

use oracle::{max_abs_diff, JointModel};

type Outcome = Result<String, String>;

enum Status {
    Pass,
    Fail,
    Skip,
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn selected(id: u32) -> bool {
    match std::env::var("DYNMIX_ACCEPTANCE_ONLY") {
        Ok(list) => list.split(',').any(|s| s.trim().parse() == Ok(id)),
        Err(_) => true,
    }
}

fn run_criterion(
    id: u32,
    name: &str,
    limit_secs: f64,
    f: impl FnOnce() -> Option<Outcome>,
) -> Status {
    if !selected(id) {
        println!("SKIP criterion {id:>2} {name}: not selected");
        return Status::Skip;
    }
    let start = Instant::now();
    let outcome = f();
    let secs = start.elapsed().as_secs_f64();
    let outcome = match outcome {
        Some(Ok(d)) if secs > limit_secs => Some(Err(format!(
            "{d}; exceeded the {limit_secs:.0}s runtime limit"
        ))),
        other => other,
    };
    let (label, status, detail) = match outcome {
        Some(Ok(d)) => ("PASS", Status::Pass, d),
        Some(Err(d)) => ("FAIL", Status::Fail, d),
        None => ("SKIP", Status::Skip, "data file not supplied".to_string()),
    };
    println!("{label} criterion {id:>2} [{secs:7.1}s] {name}: {detail}");
    status
}

fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync) -> Vec<U> {
    std::thread::scope(|s| {
        let handles: Vec<_> = items.iter().map(|it| s.spawn(|| f(it))).collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    })
}

fn random_state(rng: &mut ChaCha8Rng, order: usize, len: usize) -> (PolyDlmState, DlmPriors) {
    let mut state = PolyDlmState::zeros(order, len).unwrap();
    for v in state.theta.iter_mut().flatten() {
        *v = rng.sample(StandardNormal);
    }
    for t in &mut state.theta0 {
        *t = rng.sample(StandardNormal);
    }
    for w in &mut state.w {
        *w = rng.random_range(0.2..2.0);
    }
    state.v = rng.random_range(0.2..2.0);
    let mut priors = DlmPriors::standard(order);
    for p in &mut priors.theta0 {
        *p = NormalPrior {
            mean: rng.random_range(-1.0..1.0),
            var: rng.random_range(0.5..3.0),
        };
    }
    (state, priors)
}

fn linear_algebra_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut worst: f64 = 0.0;
    let mut checks = 0usize;
    for _ in 0..200 {
        let order = rng.random_range(2..=3);
        let len = rng.random_range(3..=12);
        let (state, priors) = random_state(&mut rng, order, len);
        let y: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
        let latent: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();

        let prior_only = JointModel::build(&state, &priors, None);
        let z = prior_only.values(&state);
        let mut record = |err: f64| {
            worst = worst.max(err);
            checks += 1;
        };

        for k in 1..order {
            let c = block_conditional(&state, k).unwrap();
            let (q, mean) = prior_only.conditional(&prior_only.block(k), &z);
            record(max_abs_diff(
                c.precision.to_dense(),
                q.transpose().iter().copied(),
            ));
            record(max_abs_diff(c.mean().unwrap(), mean.iter().copied()));
        }
        for (data, precision) in [(&y, 1.0 / state.v), (&latent, 1.0)] {
            let joint = JointModel::build(&state, &priors, Some((data, precision)));
            let c = level_conditional(&state, data, precision).unwrap();
            let (q, mean) = joint.conditional(&joint.block(0), &z);
            record(max_abs_diff(
                c.precision.to_dense(),
                q.transpose().iter().copied(),
            ));
            record(max_abs_diff(c.mean().unwrap(), mean.iter().copied()));
        }
        for k in 0..order {
            let (m, v) = theta0_conditional(&state, &priors, k).unwrap();
            let (q, mean) = prior_only.conditional(&[prior_only.theta0_index(k)], &z);
            record((m - mean[0]).abs().max((v - 1.0 / q[(0, 0)]).abs()));
            let q_sum = innovation_quadratic(&state, k).unwrap();
            record((q_sum - prior_only.innovation_sum(&state, k)).abs());
        }
        for t in 0..len {
            let (m, v) = cwmh_conditional(&state, t).unwrap();
            let (q, mean) = prior_only.conditional(&[prior_only.state_index(0, t)], &z);
            record((m - mean[0]).abs().max((v - 1.0 / q[(0, 0)]).abs()));
        }
        let post = v_posterior(&state, &priors, &y).unwrap();
        let ss: f64 = y
            .iter()
            .zip(&state.theta[0])
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        record((post.rate - (priors.v_precision.rate + ss / 2.0)).abs());
    }
    check(
        worst <= 1e-9,
        format!("{checks} comparisons over 200 instances, max abs error {worst:.2e}"),
    )
}

fn random_walk_n5() -> Outcome {
    let n = 5;
    let hth = build_hth(n, 1.0).unwrap();
    let printed = [
        [2.0, -1.0, 0.0, 0.0, 0.0],
        [-1.0, 2.0, -1.0, 0.0, 0.0],
        [0.0, -1.0, 2.0, -1.0, 0.0],
        [0.0, 0.0, -1.0, 2.0, -1.0],
        [0.0, 0.0, 0.0, -1.0, 1.0],
    ];
    let dense = hth.to_dense();
    let hth_exact = (0..n).all(|i| (0..n).all(|j| dense[i * n + j] == printed[i][j]));

    let factor = hth.cholesky().unwrap();
    let mut inv_err: f64 = 0.0;
    let mut inv_rounds = true;
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = factor.solve(&e).unwrap();
        for (i, v) in col.iter().enumerate() {
            let expected = (i.min(j) + 1) as f64;
            inv_err = inv_err.max((v - expected).abs());
            inv_rounds &= v.round() == expected;
        }
    }

    // β ~ N(μ, W (HᵀH)⁻¹): condition β₁ on β₂..β₅ through the covariance.
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let mut plus_err: f64 = 0.0;
    let mut minus_err: f64 = 0.0;
    let mut impl_err: f64 = 0.0;
    for _ in 0..50 {
        let w: f64 = rng.random_range(0.1..3.0);
        let cov = DMatrix::from_fn(n, n, |i, j| w * (i.min(j) + 1) as f64);
        let mut state = PolyDlmState::zeros(2, n).unwrap();
        state.w = vec![w, rng.random_range(0.1..3.0)];
        state.theta0 = vec![rng.sample(StandardNormal), rng.sample(StandardNormal)];
        state.theta[1] = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        state.theta[0] = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let mu = prior_mean(&state, 0).unwrap();
        let beta = &state.theta[0];

        let s12 = cov.view((0, 1), (1, n - 1)).clone_owned();
        let s22 = cov.view((1, 1), (n - 1, n - 1)).clone_owned();
        let s22_inv = s22.try_inverse().unwrap();
        let dev = nalgebra::DVector::from_fn(n - 1, |i, _| beta[i + 1] - mu[i + 1]);
        let dense_mean = mu[0] + (&s12 * &s22_inv * dev)[0];
        let dense_var = cov[(0, 0)] - (&s12 * &s22_inv * s12.transpose())[0];

        let plus = mu[0] + 0.5 * (beta[1] - mu[1]);
        let minus = mu[0] - 0.5 * (beta[1] - mu[1]);
        plus_err = plus_err
            .max((plus - dense_mean).abs())
            .max((dense_var - w / 2.0).abs());
        minus_err = minus_err.max((minus - dense_mean).abs());
        let (m, v) = cwmh_conditional(&state, 0).unwrap();
        impl_err = impl_err
            .max((m - dense_mean).abs())
            .max((v - dense_var).abs());
    }
    check(
        hth_exact && inv_rounds && inv_err <= 1e-12 && plus_err <= 1e-9 && impl_err <= 1e-9
            && minus_err > 1e-3,
        format!(
            "HᵀH exact: {hth_exact}; inverse max error {inv_err:.1e}; \
             '+' form error {plus_err:.1e}; '−' form error {minus_err:.2}; sampler conditional error {impl_err:.1e}"
        ),
    )
}

fn micro_posterior() -> Outcome {
    let y = [1.0, 1.0, 0.0];
    let theta0 = vec![0.2, -0.1];
    let w = vec![1.0, 0.1];
    let thin = 25;
    let draws = 100_000;
    let burn = 5_000;
    let config = FitConfig {
        iterations: burn + draws * thin,
        burn_in: burn,
        thin,
        seed: 1003,
        update_theta0: false,
        update_variances: false,
        initial_theta0: Some(theta0.clone()),
        initial_w: Some(w.clone()),
        ..FitConfig::for_mode(DataMode::Bernoulli)
    };
    let mut chain = Chain::new(&config, &y).unwrap();
    let mut gibbs: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(draws)).collect();
    for i in 1..=config.iterations {
        chain.step().map_err(|e| e.to_string())?;
        if config.keeps(i) {
            for (t, g) in gibbs.iter_mut().enumerate() {
                g.push(chain.state().theta[0][t]);
            }
        }
    }

    let mut state = PolyDlmState::zeros(2, 3).unwrap();
    state.theta0 = theta0;
    state.w = w;
    let exact = quadrature::logit_level_posterior(&state, &y, 160);
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let reference = exact.sample(&mut rng, draws);
    let mut worst: f64 = 1.0;
    let mut parts = Vec::new();
    for t in 0..3 {
        let ks = ks_two_sample(&gibbs[t], &reference[t]);
        worst = worst.min(ks.p_value);
        parts.push(format!("θ{}₁ p={:.3}", t + 1, ks.p_value));
    }
    check(worst > 0.01, format!("{draws} draws; {}", parts.join(", ")))
}

/// Joint-distribution test of the gaussian sampler. Marginal-conditional
/// draws come straight from the prior. Each successive-conditional draw
/// starts from an exact joint draw and applies the kernel repeatedly,
/// regenerating the data after each sweep.
fn geweke() -> Outcome {
    let len = 20;
    let samples = 20_000;
    let sweeps = 40;
    let mut priors = DlmPriors::standard(2);
    priors.w_precision = vec![
        GammaPrior {
            shape: 4.0,
            rate: 0.6
        };
        2
    ];
    priors.v_precision = GammaPrior {
        shape: 4.0,
        rate: 0.4,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(1005);
    let forward_draw = |rng: &mut ChaCha8Rng| -> (PolyDlmState, Vec<f64>) {
        let mut s = PolyDlmState::zeros(2, len).unwrap();
        for (k, t0) in s.theta0.iter_mut().enumerate() {
            let p = priors.theta0[k];
            *t0 = p.mean + p.var.sqrt() * rng.sample::<f64, _>(StandardNormal);
        }
        for (k, w) in s.w.iter_mut().enumerate() {
            let g = priors.w_precision[k];
            *w = 1.0 / Gamma::new(g.shape, 1.0 / g.rate).unwrap().sample(rng);
        }
        let g = priors.v_precision;
        s.v = 1.0 / Gamma::new(g.shape, 1.0 / g.rate).unwrap().sample(rng);
        sample_prior_states(rng, &mut s).unwrap();
        let y = simulate_level_obs(rng, &s);
        (s, y)
    };
    let summary = |s: &PolyDlmState| {
        vec![
            s.theta0[0],
            s.theta0[1],
            s.w[0],
            s.w[1],
            s.v,
            s.theta[0][len - 1],
            s.theta[1][len - 1],
        ]
    };

    let forward: Vec<Vec<f64>> = (0..samples)
        .map(|_| summary(&forward_draw(&mut rng).0))
        .collect();

    let (_, y0) = forward_draw(&mut rng);
    let config = FitConfig {
        iterations: 2,
        burn_in: 0,
        thin: 1,
        seed: 1006,
        priors: priors.clone(),
        ..FitConfig::for_mode(DataMode::Gaussian)
    };
    let mut chain = Chain::new(&config, &y0).unwrap();
    let mut successive = Vec::with_capacity(samples);
    for _ in 0..samples {
        let (s, y) = forward_draw(&mut rng);
        *chain.state_mut() = s;
        chain.set_observations(&y).unwrap();
        for _ in 0..sweeps {
            chain.step().map_err(|e| e.to_string())?;
            let y = simulate_level_obs(&mut rng, chain.state());
            chain.set_observations(&y).unwrap();
        }
        successive.push(summary(chain.state()));
    }
    let tests = dynmix::diagnostics::geweke_compare(&forward, &successive).unwrap();
    let names = ["θ0₁", "θ0₂", "W₁", "W₂", "V", "θ₁,T", "θ₂,T"];
    let worst = tests.iter().map(|t| t.p_value).fold(1.0, f64::min);
    let parts: Vec<String> = names
        .iter()
        .zip(&tests)
        .map(|(n, t)| format!("{n} p={:.3}", t.p_value))
        .collect();
    check(
        worst > 0.01,
        format!(
            "{samples} samples each, {sweeps} sweeps per chain; {}",
            parts.join(", ")
        ),
    )
}

fn simulate_level_obs(rng: &mut ChaCha8Rng, s: &PolyDlmState) -> Vec<f64> {
    let sd = s.v.sqrt();
    s.theta[0]
        .iter()
        .map(|m| m + sd * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

fn scaled(mode: DataMode, iterations: usize, burn_in: usize, thin: usize, seed: u64) -> FitConfig {
    FitConfig {
        iterations,
        burn_in,
        thin,
        seed,
        ..FitConfig::for_mode(mode)
    }
}

fn median_curve(store: &dynmix::ChainStore) -> Vec<f64> {
    summarize_curve(store, 0.9)
        .unwrap()
        .iter()
        .map(|s| s.point)
        .collect()
}

fn binomial_recovery() -> Outcome {
    let results = par_map(&WeightCurve::ALL, |&curve| {
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + curve as u64);
        let data = generate(&mut rng, Design::Binomial { trials: 30 }, curve, 400).unwrap();
        let counts: Vec<u32> = data.y.iter().map(|&v| v as u32).collect();
        let config = scaled(
            DataMode::Binomial(30),
            20_000,
            2_000,
            20,
            2100 + curve as u64,
        );
        let store = run_binomial_fit(&config, &counts, 30).unwrap();
        let rmse = curve_rmse(&median_curve(&store), &data.alpha).unwrap();
        let limit = if curve == WeightCurve::Steps {
            0.15
        } else {
            0.10
        };
        (curve, rmse, limit)
    });
    let ok = results.iter().all(|(_, r, l)| r <= l);
    let parts: Vec<String> = results
        .iter()
        .map(|(c, r, l)| format!("{c} {r:.3} (≤{l})"))
        .collect();
    check(ok, format!("RMSE {}", parts.join(", ")))
}

fn logit_probit_agreement() -> Outcome {
    let results = par_map(&WeightCurve::ALL, |&curve| {
        let mut rng = ChaCha8Rng::seed_from_u64(3000 + curve as u64);
        let data = generate(&mut rng, Design::Bernoulli, curve, 400).unwrap();
        let fits: Vec<Vec<f64>> = [Link::Logit, Link::Probit]
            .iter()
            .map(|&link| {
                let config = FitConfig {
                    link,
                    ..scaled(DataMode::Bernoulli, 20_000, 2_000, 20, 3100 + curve as u64)
                };
                median_curve(&run_fit(&config, &data.y).unwrap())
            })
            .collect();
        (curve, mean_abs_difference(&fits[0], &fits[1]).unwrap())
    });
    let ok = results.iter().all(|(_, d)| *d <= 0.10);
    let parts: Vec<String> = results.iter().map(|(c, d)| format!("{c} {d:.3}")).collect();
    check(
        ok,
        format!("mean |logit − probit| {} (≤0.10)", parts.join(", ")),
    )
}

fn mixture_recovery() -> Outcome {
    let runs: Vec<(WeightCurve, Link)> = WeightCurve::ALL
        .iter()
        .flat_map(|&c| [(c, Link::Logit), (c, Link::Probit)])
        .collect();
    let results = par_map(&runs, |&(curve, link)| {
        let mut rng = ChaCha8Rng::seed_from_u64(4000 + curve as u64);
        let data = generate(&mut rng, Design::MIXTURE, curve, 400).unwrap();
        let config = FitConfig {
            link,
            ..scaled(DataMode::Mixture, 40_000, 4_000, 40, 4100 + curve as u64)
        };
        let store = run_fit(&config, &data.y).unwrap();
        let mut covered = true;
        let mut close = true;
        let mut text = String::new();
        for (name, truth) in [("mu1", 0.0), ("mu2", 2.0)] {
            let draws = store.column(name).unwrap();
            let h = hpd(&draws, 0.95).unwrap();
            let m = median(&draws).unwrap();
            covered &= h.contains(truth);
            close &= (m - truth).abs() <= 0.15;
            text.push_str(&format!(" {name} {m:.3} [{:.3}, {:.3}]", h.lower, h.upper));
        }
        (format!("{curve}/{link}:{text}"), covered, close)
    });
    let covered = results.iter().filter(|r| r.1).count();
    let close = results.iter().all(|r| r.2);
    let lines: Vec<&str> = results.iter().map(|r| r.0.as_str()).collect();
    check(
        covered >= 7 && close,
        format!(
            "truth in 95% HPD in {covered}/8 runs, all medians within 0.15: {close}; {}",
            lines.join("; ")
        ),
    )
}

fn adaptation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5000);
    let data = generate(&mut rng, Design::MIXTURE, WeightCurve::Steps, 400).unwrap();
    let config = scaled(DataMode::Mixture, 2, 0, 1, 5001);
    let mut chain = Chain::new(&config, &data.y).unwrap();
    let batches = 400;
    let sweeps = batches * BATCH_LEN as usize;
    for _ in 0..sweeps {
        chain.step().map_err(|e| e.to_string())?;
    }
    chain.scales_mut().reset_totals();
    for _ in 0..sweeps {
        chain.step().map_err(|e| e.to_string())?;
    }
    let rates = chain.scales().acceptance_rates();
    let lo = rates.iter().copied().fold(1.0, f64::min);
    let hi = rates.iter().copied().fold(0.0, f64::max);
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    check(
        lo >= 0.34 && hi <= 0.54,
        format!(
            "after {} batches, per-site rates over the next {batches} batches: min {lo:.3}, mean {mean:.3}, max {hi:.3}",
            chain.scales().batch_index() - 1 - batches as u64
        ),
    )
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .ancestors()
        .nth(2)
        .unwrap()
        .to_path_buf()
}

fn acgh_path() -> Option<PathBuf> {
    let path = std::env::var_os("DYNMIX_ACGH_DATA")
        .map(PathBuf::from)
        .unwrap_or_else(|| workspace_root().join("data").join("acgh.csv"));
    path.exists().then_some(path)
}

/// Maximal runs of consecutive times with median weight above one half.
fn high_regions(curve: &[f64]) -> usize {
    let mut regions = 0;
    let mut inside = false;
    for &a in curve {
        if a > 0.5 && !inside {
            regions += 1;
        }
        inside = a > 0.5;
    }
    regions
}

fn acgh() -> Option<Outcome> {
    let path = acgh_path()?;
    Some((|| {
        let bytes = std::fs::read(&path).map_err(|e| e.to_string())?;
        let y = dynmix::io::read_series(bytes.as_slice()).map_err(|e| e.to_string())?;
        let config = FitConfig {
            seed: 6000,
            ..FitConfig::for_mode(DataMode::Mixture)
        };
        let store = run_fit(&config, &y).map_err(|e| e.to_string())?;
        let table = [
            ("mu1", 0.176, 0.306),
            ("phi1", 2.903, 4.143),
            ("mu2", 4.331, 4.834),
            ("phi2", 1.046, 4.773),
        ];
        let mut ok = y.len() == 193;
        let mut parts = vec![format!("n={}", y.len())];
        for (name, lo, hi) in table {
            let draws = store.column(name).unwrap();
            let h = hpd(&draws, 0.9).unwrap();
            let overlaps = h.lower <= hi && lo <= h.upper;
            ok &= overlaps;
            parts.push(format!(
                "{name} {:.3} [{:.3}, {:.3}] overlaps [{lo}, {hi}]: {overlaps}",
                median(&draws).unwrap(),
                h.lower,
                h.upper
            ));
        }
        let regions = high_regions(&median_curve(&store));
        ok &= regions == 4;
        parts.push(format!("{regions} high-weight regions"));
        check(ok, parts.join("; "))
    })())
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_dynmix");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |args: &[&str]| -> Result<(), String> {
        let out = Command::new(bin)
            .args(args)
            .output()
            .map_err(|e| e.to_string())?;
        if out.status.success() {
            Ok(())
        } else {
            Err(String::from_utf8_lossy(&out.stderr).into_owned())
        }
    };
    let d = |p: &str| dir.path().join(p).to_string_lossy().into_owned();
    run(&[
        "simulate",
        "--design",
        "mixture",
        "--curve",
        "sinusoidal",
        "--length",
        "200",
        "--seed",
        "7",
        "--out",
        &d("sim"),
    ])?;
    let data = d("sim/data.csv");
    let mut compared = 0;
    for link in ["logit", "probit"] {
        for rep in ["a", "b"] {
            run(&[
                "fit",
                "--data",
                &data,
                "--link",
                link,
                "--iters",
                "6000",
                "--burn",
                "1000",
                "--thin",
                "10",
                "--seed",
                "99",
                "--full-draws",
                "--quiet",
                "--out",
                &d(&format!("{link}-{rep}")),
            ])?;
        }
        for file in ["chain.csv", "alpha.csv", "summary.csv"] {
            let a = std::fs::read(dir.path().join(format!("{link}-a")).join(file)).unwrap();
            let b = std::fs::read(dir.path().join(format!("{link}-b")).join(file)).unwrap();
            if a != b {
                return Err(format!("{link}: {file} differs between repeated runs"));
            }
            compared += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7000);
    let data = generate(
        &mut rng,
        Design::Binomial { trials: 15 },
        WeightCurve::Linear,
        100,
    )
    .unwrap();
    let config = scaled(DataMode::Binomial(15), 3000, 500, 5, 7001);
    let same = run_fit(&config, &data.y).unwrap() == run_fit(&config, &data.y).unwrap();
    check(
        same,
        format!("{compared} output files byte-identical across repeated CLI fits; library stores equal: {same}"),
    )
}

fn main() {
    // Honour `cargo test -- <filter>` style invocations that target other tests.
    let args: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    println!("acceptance criteria");
    let statuses = [
        run_criterion(
            1,
            "conditional means and precisions vs dense oracle",
            10.0,
            || Some(linear_algebra_oracle()),
        ),
        run_criterion(
            2,
            "n=5 random-walk precision, inverse and first-site conditional",
            10.0,
            || Some(random_walk_n5()),
        ),
        run_criterion(3, "T=3 logit posterior vs grid quadrature", 120.0, || {
            Some(micro_posterior())
        }),
        run_criterion(
            4,
            "Geweke joint-distribution test, gaussian path",
            300.0,
            || Some(geweke()),
        ),
        run_criterion(5, "bin(30) weight recovery at T=400", 2400.0, || {
            Some(binomial_recovery())
        }),
        run_criterion(
            6,
            "logit and probit agreement on Bernoulli data",
            600.0,
            || Some(logit_probit_agreement()),
        ),
        run_criterion(7, "mixture component recovery at T=400", 1800.0, || {
            Some(mixture_recovery())
        }),
        run_criterion(8, "CWMH acceptance-rate adaptation", 300.0, || {
            Some(adaptation())
        }),
        run_criterion(9, "aCGH component summaries and weight peaks", 1800.0, acgh),
        run_criterion(10, "bit-identical repeated fits", 300.0, || {
            Some(determinism())
        }),
    ];
    let failed = statuses
        .iter()
        .filter(|s| matches!(s, Status::Fail))
        .count();
    let skipped = statuses
        .iter()
        .filter(|s| matches!(s, Status::Skip))
        .count();
    println!(
        "{} passed, {failed} failed, {skipped} skipped",
        statuses.len() - failed - skipped
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
