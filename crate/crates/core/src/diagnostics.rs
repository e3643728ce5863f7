//! Posterior summaries and distributional checks.
//!
//! Point estimates are medians; intervals are highest-posterior-density
//! windows over the order statistics, which assumes unimodal marginals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gibbs::{ChainStore, ParameterTable};

/// Fewest draws accepted by [`hpd`].
pub const MIN_HPD_DRAWS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HpdInterval {
    pub lower: f64,
    pub upper: f64,
    pub mass: f64,
}

impl HpdInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Median with an interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
}

fn sorted_finite(draws: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = draws.iter().find(|d| !d.is_finite()) {
        return Err(Error::Data(format!("non-finite draw {bad}")));
    }
    let mut s = draws.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

/// Median of already-sorted values; the mean of the two central values for
/// even lengths.
pub fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

pub fn median(draws: &[f64]) -> Result<f64> {
    if draws.is_empty() {
        return Err(Error::Data("median of an empty sample".into()));
    }
    Ok(median_sorted(&sorted_finite(draws)?))
}

fn window_len(n: usize, mass: f64) -> Result<usize> {
    if !(mass > 0.0 && mass < 1.0) {
        return Err(Error::Config(format!(
            "interval mass {mass} outside (0, 1)"
        )));
    }
    // The small offset keeps e.g. 0.9 * 100 from rounding up to 91.
    Ok(((mass * n as f64 - 1e-9).ceil() as usize).clamp(1, n))
}

fn hpd_sorted(sorted: &[f64], mass: f64) -> Result<HpdInterval> {
    let n = sorted.len();
    let m = window_len(n, mass)?;
    let mut best = 0;
    let mut best_width = f64::INFINITY;
    for i in 0..=(n - m) {
        let w = sorted[i + m - 1] - sorted[i];
        if w < best_width {
            best_width = w;
            best = i;
        }
    }
    Ok(HpdInterval {
        lower: sorted[best],
        upper: sorted[best + m - 1],
        mass,
    })
}

/// Shortest window holding `⌈mass·n⌉` order statistics; ties go to the
/// window with the smallest lower end.
pub fn hpd(draws: &[f64], mass: f64) -> Result<HpdInterval> {
    if draws.len() < MIN_HPD_DRAWS {
        return Err(Error::Data(format!(
            "HPD needs at least {MIN_HPD_DRAWS} draws, got {}",
            draws.len()
        )));
    }
    hpd_sorted(&sorted_finite(draws)?, mass)
}

/// Central interval with `(1 - mass)/2` of the interpolated mass in each tail.
pub fn equal_tail(draws: &[f64], mass: f64) -> Result<(f64, f64)> {
    if draws.is_empty() {
        return Err(Error::Data("empty sample".into()));
    }
    let s = sorted_finite(draws)?;
    let tail = (1.0 - mass) / 2.0;
    Ok((
        crate::mixture::quantile_sorted(&s, tail),
        crate::mixture::quantile_sorted(&s, 1.0 - tail),
    ))
}

/// Median and HPD interval of one marginal.
pub fn summarize(draws: &[f64], mass: f64) -> Result<Summary> {
    if draws.len() < MIN_HPD_DRAWS {
        return Err(Error::Data(format!(
            "summaries need at least {MIN_HPD_DRAWS} draws, got {}",
            draws.len()
        )));
    }
    let s = sorted_finite(draws)?;
    let h = hpd_sorted(&s, mass)?;
    Ok(Summary {
        point: median_sorted(&s),
        lower: h.lower,
        upper: h.upper,
    })
}

/// Per-time median and HPD bounds of the stored weight curve.
pub fn summarize_curve(store: &ChainStore, mass: f64) -> Result<Vec<Summary>> {
    summarize_draw_matrix(store.curve_draws(), mass)
}

/// Column-wise summaries of a `draws × T` matrix.
pub fn summarize_draw_matrix(rows: &[Vec<f64>], mass: f64) -> Result<Vec<Summary>> {
    let first = rows
        .first()
        .ok_or_else(|| Error::Data("no stored curve draws".into()))?;
    let len = first.len();
    let mut column = Vec::with_capacity(rows.len());
    (0..len)
        .map(|t| {
            column.clear();
            column.extend(rows.iter().map(|r| r[t]));
            summarize(&column, mass)
        })
        .collect()
}

/// `(name, summary)` for every column of a parameter table.
pub fn summarize_parameters(table: &ParameterTable, mass: f64) -> Result<Vec<(String, Summary)>> {
    if table.is_empty() {
        return Err(Error::Data("no stored parameter draws".into()));
    }
    table
        .names
        .iter()
        .enumerate()
        .map(|(j, name)| Ok((name.clone(), summarize(&table.column_at(j), mass)?)))
        .collect()
}

pub fn curve_rmse(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    if estimate.len() != truth.len() || estimate.is_empty() {
        return Err(Error::Data(format!(
            "curve lengths differ ({} vs {})",
            estimate.len(),
            truth.len()
        )));
    }
    let ss: f64 = estimate
        .iter()
        .zip(truth)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((ss / estimate.len() as f64).sqrt())
}

pub fn mean_abs_difference(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Data("curve lengths differ".into()));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64)
}

/// Kolmogorov–Smirnov statistic and asymptotic p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
}

/// Survival function of the Kolmogorov distribution.
fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn ks_p_value(statistic: f64, effective_n: f64) -> f64 {
    let root = effective_n.sqrt();
    kolmogorov_survival((root + 0.12 + 0.11 / root) * statistic)
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsTest {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    KsTest {
        statistic: d,
        p_value: ks_p_value(d, ne),
    }
}

pub fn ks_one_sample(draws: &[f64], cdf: impl Fn(f64) -> f64) -> KsTest {
    let mut s = draws.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in s.iter().enumerate() {
        let f = cdf(*x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    KsTest {
        statistic: d,
        p_value: ks_p_value(d, n),
    }
}

/// Marginal-by-marginal comparison of forward (prior-predictive) samples with
/// successive-substitution samples of the same quantities.
pub fn geweke_compare(forward: &[Vec<f64>], successive: &[Vec<f64>]) -> Result<Vec<KsTest>> {
    let width = forward
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::Data("no forward samples".into()))?;
    if successive.iter().chain(forward).any(|r| r.len() != width) {
        return Err(Error::Data("sample rows differ in width".into()));
    }
    Ok((0..width)
        .map(|j| {
            let a: Vec<f64> = forward.iter().map(|r| r[j]).collect();
            let b: Vec<f64> = successive.iter().map(|r| r[j]).collect();
            ks_two_sample(&a, &b)
        })
        .collect())
}
