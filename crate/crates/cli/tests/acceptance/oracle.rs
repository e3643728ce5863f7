//! Dense reference computations for the dynamic model.
//!
//! The joint density is written directly from the state recursion
//! `θ_t = G θ_{t-1} + ω_t` with `G` the upper Jordan block, one residual row
//! per `(t, k)`, and conditionals are obtained by dense conditioning.

use nalgebra::{DMatrix, DVector};

use dynmix::poly_dlm::{DlmPriors, PolyDlmState};

/// Canonical-form Gaussian over `(states, θ0)`: density ∝ exp(-½ zᵀQz + bᵀz).
pub struct JointModel {
    pub order: usize,
    pub len: usize,
    pub q: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl JointModel {
    pub fn state_index(&self, k: usize, t: usize) -> usize {
        k * self.len + t
    }

    pub fn theta0_index(&self, k: usize) -> usize {
        self.order * self.len + k
    }

    pub fn dim(&self) -> usize {
        self.order * (self.len + 1)
    }

    /// Joint of states and initial values given `W`, with an optional
    /// Gaussian observation of the level (`y`, precision).
    pub fn build(state: &PolyDlmState, priors: &DlmPriors, data: Option<(&[f64], f64)>) -> Self {
        let (p, len) = (state.order(), state.len());
        let mut m = JointModel {
            order: p,
            len,
            q: DMatrix::zeros(p * (len + 1), p * (len + 1)),
            b: DVector::zeros(p * (len + 1)),
        };
        for t in 0..len {
            for k in 0..p {
                let mut row = DVector::zeros(m.dim());
                row[m.state_index(k, t)] = 1.0;
                for j in [k, k + 1] {
                    if j >= p {
                        continue;
                    }
                    let prev = if t == 0 {
                        m.theta0_index(j)
                    } else {
                        m.state_index(j, t - 1)
                    };
                    row[prev] -= 1.0;
                }
                m.q += &row * row.transpose() / state.w[k];
            }
        }
        for (k, prior) in priors.theta0.iter().enumerate() {
            let i = m.theta0_index(k);
            m.q[(i, i)] += 1.0 / prior.var;
            m.b[i] += prior.mean / prior.var;
        }
        if let Some((y, precision)) = data {
            for (t, yt) in y.iter().enumerate() {
                let i = m.state_index(0, t);
                m.q[(i, i)] += precision;
                m.b[i] += yt * precision;
            }
        }
        m
    }

    pub fn values(&self, state: &PolyDlmState) -> DVector<f64> {
        let mut z = DVector::zeros(self.dim());
        for k in 0..self.order {
            for t in 0..self.len {
                z[self.state_index(k, t)] = state.theta[k][t];
            }
            z[self.theta0_index(k)] = state.theta0[k];
        }
        z
    }

    /// Precision and mean of `z_S` given every other coordinate at `z`.
    pub fn conditional(&self, subset: &[usize], z: &DVector<f64>) -> (DMatrix<f64>, DVector<f64>) {
        let rest: Vec<usize> = (0..self.dim()).filter(|i| !subset.contains(i)).collect();
        let n = subset.len();
        let q_ss = DMatrix::from_fn(n, n, |i, j| self.q[(subset[i], subset[j])]);
        let mut rhs = DVector::from_fn(n, |i, _| self.b[subset[i]]);
        for (i, &s) in subset.iter().enumerate() {
            for &r in &rest {
                rhs[i] -= self.q[(s, r)] * z[r];
            }
        }
        let mean = q_ss
            .clone()
            .cholesky()
            .expect("conditional precision is positive definite")
            .solve(&rhs);
        (q_ss, mean)
    }

    pub fn block(&self, k: usize) -> Vec<usize> {
        (0..self.len).map(|t| self.state_index(k, t)).collect()
    }

    /// Sum over `t` of squared residuals of component `k`.
    pub fn innovation_sum(&self, state: &PolyDlmState, k: usize) -> f64 {
        let p = self.order;
        (0..self.len)
            .map(|t| {
                let prev = |j: usize| {
                    if j >= p {
                        0.0
                    } else if t == 0 {
                        state.theta0[j]
                    } else {
                        state.theta[j][t - 1]
                    }
                };
                let r = state.theta[k][t] - prev(k) - prev(k + 1);
                r * r
            })
            .sum()
    }
}

pub fn max_abs_diff(a: impl IntoIterator<Item = f64>, b: impl IntoIterator<Item = f64>) -> f64 {
    a.into_iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
