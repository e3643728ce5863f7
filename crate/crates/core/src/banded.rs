//! Symmetric banded matrices, their Cholesky factors, and Gaussian sampling
//! from a mean/precision parameterisation.
//!
//! Storage is lower-band, column-major: entry `A[j + d, j]` for
//! `d = 0..=bandwidth` lives at `bands[j * (bandwidth + 1) + d]`. Slots that
//! fall below the last row are kept as zeros and never read.
//!
//! Every precision matrix the dynamic model needs is tridiagonal: the
//! random-walk precision `HᵀH`, the diagonal `BᵀB`, identity terms and their
//! sums. `H` is the `T×T` first-difference matrix (ones on the diagonal, minus
//! ones on the sub-diagonal) and `B = I − H` is the unit sub-diagonal shift.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::LinalgError;

type LinalgResult<T> = Result<T, LinalgError>;

/// Symmetric positive (semi-)definite matrix in lower-band storage.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSpd {
    dim: usize,
    bandwidth: usize,
    bands: Vec<f64>,
}

impl BandedSpd {
    pub fn zeros(dim: usize, bandwidth: usize) -> LinalgResult<Self> {
        if dim == 0 {
            return Err(LinalgError::InvalidDimension);
        }
        Ok(Self {
            dim,
            bandwidth,
            bands: vec![0.0; dim * (bandwidth + 1)],
        })
    }

    pub fn identity(dim: usize) -> LinalgResult<Self> {
        let mut m = Self::zeros(dim, 0)?;
        m.bands.fill(1.0);
        Ok(m)
    }

    /// Wraps raw lower-band storage. Entries in the unused corner of the last
    /// columns are zeroed.
    pub fn from_bands(dim: usize, bandwidth: usize, mut bands: Vec<f64>) -> LinalgResult<Self> {
        if dim == 0 {
            return Err(LinalgError::InvalidDimension);
        }
        let expected = dim * (bandwidth + 1);
        if bands.len() != expected {
            return Err(LinalgError::DimensionMismatch {
                expected,
                found: bands.len(),
            });
        }
        for j in 0..dim {
            for d in (dim - j)..=bandwidth {
                bands[j * (bandwidth + 1) + d] = 0.0;
            }
        }
        Ok(Self {
            dim,
            bandwidth,
            bands,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn bands(&self) -> &[f64] {
        &self.bands
    }

    #[inline]
    fn slot(&self, row: usize, col: usize) -> usize {
        col * (self.bandwidth + 1) + (row - col)
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        assert!(r < self.dim, "index ({i}, {j}) out of bounds");
        if r - c > self.bandwidth {
            0.0
        } else {
            self.bands[self.slot(r, c)]
        }
    }

    /// Sets entries `(i, j)` and `(j, i)`.
    ///
    /// Panics when the position lies outside the stored band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        assert!(r < self.dim, "index ({i}, {j}) out of bounds");
        assert!(
            r - c <= self.bandwidth,
            "({i}, {j}) lies outside bandwidth {}",
            self.bandwidth
        );
        let s = self.slot(r, c);
        self.bands[s] = value;
    }

    pub fn scale(&mut self, factor: f64) {
        self.bands.iter_mut().for_each(|v| *v *= factor);
    }

    pub fn add_diagonal(&mut self, value: f64) {
        let stride = self.bandwidth + 1;
        for j in 0..self.dim {
            self.bands[j * stride] += value;
        }
    }

    /// `self += factor * other`. `other` must not be wider than `self`.
    pub fn add_scaled(&mut self, other: &BandedSpd, factor: f64) -> LinalgResult<()> {
        if other.dim != self.dim {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if other.bandwidth > self.bandwidth {
            return Err(LinalgError::DimensionMismatch {
                expected: self.bandwidth,
                found: other.bandwidth,
            });
        }
        let (s, o) = (self.bandwidth + 1, other.bandwidth + 1);
        for j in 0..self.dim {
            for d in 0..o {
                self.bands[j * s + d] += factor * other.bands[j * o + d];
            }
        }
        Ok(())
    }

    pub fn matvec(&self, x: &[f64]) -> LinalgResult<Vec<f64>> {
        if x.len() != self.dim {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        let n = self.dim;
        let stride = self.bandwidth + 1;
        let mut out = vec![0.0; n];
        for j in 0..n {
            let col = &self.bands[j * stride..(j + 1) * stride];
            out[j] += col[0] * x[j];
            for d in 1..stride.min(n - j) {
                out[j + d] += col[d] * x[j];
                out[j] += col[d] * x[j + d];
            }
        }
        Ok(out)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.get(i, j);
            }
        }
        out
    }

    pub fn cholesky(&self) -> LinalgResult<BandedCholesky> {
        self.cholesky_with_jitter(0.0)
    }

    /// Factorizes `self + jitter·I` without pivoting, in `O(T·b²)`.
    pub fn cholesky_with_jitter(&self, jitter: f64) -> LinalgResult<BandedCholesky> {
        let n = self.dim;
        let b = self.bandwidth;
        let stride = b + 1;
        let mut l = self.bands.clone();
        if jitter != 0.0 {
            for j in 0..n {
                l[j * stride] += jitter;
            }
        }
        for j in 0..n {
            // Columns k < j have already been finalized; l[(i, k)] for i ≥ j
            // is read from column k at offset i - k.
            let k0 = j.saturating_sub(b);
            let mut pivot = l[j * stride];
            for k in k0..j {
                let ljk = l[k * stride + (j - k)];
                pivot -= ljk * ljk;
            }
            if pivot.is_nan() || pivot <= 0.0 || !pivot.is_finite() {
                return Err(LinalgError::NotPositiveDefinite {
                    pivot: j + 1,
                    value: pivot,
                });
            }
            let diag = pivot.sqrt();
            l[j * stride] = diag;
            let last = (j + b).min(n - 1);
            for i in (j + 1)..=last {
                let mut v = l[j * stride + (i - j)];
                for k in i.saturating_sub(b)..j {
                    v -= l[k * stride + (i - k)] * l[k * stride + (j - k)];
                }
                l[j * stride + (i - j)] = v / diag;
            }
        }
        Ok(BandedCholesky {
            dim: n,
            bandwidth: b,
            bands: l,
        })
    }
}

/// Lower-triangular banded factor `L` with `A = L·Lᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedCholesky {
    dim: usize,
    bandwidth: usize,
    bands: Vec<f64>,
}

impl BandedCholesky {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Entry `L[i, j]`.
    pub fn factor(&self, i: usize, j: usize) -> f64 {
        if i < j || i - j > self.bandwidth {
            0.0
        } else {
            self.bands[j * (self.bandwidth + 1) + (i - j)]
        }
    }

    fn check_len(&self, len: usize) -> LinalgResult<()> {
        if len != self.dim {
            Err(LinalgError::DimensionMismatch {
                expected: self.dim,
                found: len,
            })
        } else {
            Ok(())
        }
    }

    /// In-place forward substitution `L·x = rhs`.
    pub fn solve_lower_in_place(&self, rhs: &mut [f64]) -> LinalgResult<()> {
        self.check_len(rhs.len())?;
        let stride = self.bandwidth + 1;
        let n = self.dim;
        for j in 0..n {
            let xj = rhs[j] / self.bands[j * stride];
            rhs[j] = xj;
            for d in 1..stride.min(n - j) {
                rhs[j + d] -= self.bands[j * stride + d] * xj;
            }
        }
        Ok(())
    }

    /// In-place back substitution `Lᵀ·x = rhs`.
    pub fn solve_upper_in_place(&self, rhs: &mut [f64]) -> LinalgResult<()> {
        self.check_len(rhs.len())?;
        let stride = self.bandwidth + 1;
        let n = self.dim;
        for j in (0..n).rev() {
            let mut v = rhs[j];
            for d in 1..stride.min(n - j) {
                v -= self.bands[j * stride + d] * rhs[j + d];
            }
            rhs[j] = v / self.bands[j * stride];
        }
        Ok(())
    }

    /// Solves `A·x = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> LinalgResult<Vec<f64>> {
        let mut x = rhs.to_vec();
        self.solve_lower_in_place(&mut x)?;
        self.solve_upper_in_place(&mut x)?;
        Ok(x)
    }

    /// `L·Lᵀ` in banded form.
    pub fn reconstruct(&self) -> BandedSpd {
        let n = self.dim;
        let b = self.bandwidth;
        let mut out = BandedSpd::zeros(n, b).expect("factor has positive dimension");
        for j in 0..n {
            for i in j..(j + b + 1).min(n) {
                let mut v = 0.0;
                for k in i.saturating_sub(b)..=j {
                    v += self.factor(i, k) * self.factor(j, k);
                }
                out.set(i, j, v);
            }
        }
        out
    }

    /// `log |A| = 2 Σ log L_jj`.
    pub fn log_det(&self) -> f64 {
        let stride = self.bandwidth + 1;
        2.0 * (0..self.dim)
            .map(|j| self.bands[j * stride].ln())
            .sum::<f64>()
    }
}

/// `scale · HᵀH`: tridiagonal with diagonal `(2, …, 2, 1)` and off-diagonal `-1`.
pub fn build_hth(len: usize, scale: f64) -> LinalgResult<BandedSpd> {
    let mut m = BandedSpd::zeros(len, 1)?;
    for j in 0..len {
        let diag = if j + 1 < len { 2.0 } else { 1.0 };
        m.bands[2 * j] = scale * diag;
        if j + 1 < len {
            m.bands[2 * j + 1] = -scale;
        }
    }
    Ok(m)
}

/// `scale · BᵀB = scale · diag(1, …, 1, 0)`.
pub fn build_btb(len: usize, scale: f64) -> LinalgResult<BandedSpd> {
    let mut m = BandedSpd::zeros(len, 0)?;
    for j in 0..len - 1 {
        m.bands[j] = scale;
    }
    Ok(m)
}

/// `(HᵀB)·x`: `x_{i-1} - x_i` for rows before the last, `x_{T-1}` in the last
/// row (with `x_0 = 0`).
pub fn apply_htb(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    if n <= 1 {
        return out;
    }
    for i in 0..n - 1 {
        let prev = if i == 0 { 0.0 } else { x[i - 1] };
        out[i] = prev - x[i];
    }
    out[n - 1] = x[n - 2];
    out
}

/// `(BᵀH)·x`: forward differences `x_{i+1} - x_i`, zero in the last row.
pub fn apply_bth(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        out[i] = x[i + 1] - x[i];
    }
    out
}

/// Mean `P⁻¹·b` and draw `mean + L⁻ᵀ·ζ` for a caller-supplied standard-normal
/// vector `ζ`.
pub fn gaussian_from_noise(
    factor: &BandedCholesky,
    b_vec: &[f64],
    noise: &[f64],
) -> LinalgResult<Vec<f64>> {
    factor.check_len(noise.len())?;
    let mut draw = factor.solve(b_vec)?;
    let mut u = noise.to_vec();
    factor.solve_upper_in_place(&mut u)?;
    draw.iter_mut().zip(&u).for_each(|(m, e)| *m += e);
    Ok(draw)
}

/// Draws from `N(P⁻¹·b, P⁻¹)` given the Cholesky factor of `P`.
pub fn sample_gaussian_precision<R: Rng + ?Sized>(
    rng: &mut R,
    factor: &BandedCholesky,
    b_vec: &[f64],
) -> LinalgResult<Vec<f64>> {
    factor.check_len(b_vec.len())?;
    let noise: Vec<f64> = (0..factor.dim)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    gaussian_from_noise(factor, b_vec, &noise)
}
