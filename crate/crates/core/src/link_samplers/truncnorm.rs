//! One-sided truncated normal draws for probit augmentation.

use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use super::link::{normal_cdf, normal_quantile};

/// Truncation points beyond this many standard deviations switch from the
/// inverse-CDF method to a rejection sampler.
const INVERSE_CDF_LIMIT: f64 = 5.0;

fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// `Z ~ N(0, 1)` conditioned on `Z > lower`.
pub fn standard_normal_above<R: Rng + ?Sized>(rng: &mut R, lower: f64) -> f64 {
    if lower > INVERSE_CDF_LIMIT {
        // Exponential proposal with the optimal rate (Robert, 1995).
        let rate = 0.5 * (lower + (lower * lower + 4.0).sqrt());
        let exp = Exp::new(rate).expect("rate is positive");
        loop {
            let z = lower + exp.sample(rng);
            let u: f64 = rng.random();
            if u.ln() <= -0.5 * (z - rate) * (z - rate) && z > lower {
                return z;
            }
        }
    } else if lower < -INVERSE_CDF_LIMIT {
        // The constraint removes less than 3e-7 of the mass.
        loop {
            let z: f64 = rng.sample(StandardNormal);
            if z > lower {
                return z;
            }
        }
    } else {
        // -Z is N(0,1) truncated above at -lower; invert in its lower tail.
        let upper_mass = normal_cdf(-lower);
        loop {
            let z = -normal_quantile(open_unit(rng) * upper_mass);
            if z > lower && z.is_finite() {
                return z;
            }
        }
    }
}

/// `N(mean, 1)` truncated to `(0, ∞)` when `positive`, else to `(-∞, 0)`.
pub fn sample_signed<R: Rng + ?Sized>(rng: &mut R, mean: f64, positive: bool) -> f64 {
    loop {
        let v = if positive {
            mean + standard_normal_above(rng, -mean)
        } else {
            mean - standard_normal_above(rng, mean)
        };
        // Guards against cancellation landing exactly on the boundary.
        if (positive && v > 0.0) || (!positive && v < 0.0) {
            return v;
        }
    }
}
