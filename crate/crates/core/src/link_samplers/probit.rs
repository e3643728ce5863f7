//! Probit data augmentation for binary responses.

use rand::Rng;

use super::truncnorm::sample_signed;
use crate::error::{Error, Result};
use crate::poly_dlm::{level_conditional, PolyDlmState};

/// Latent `v_t ~ N(θ_{t,1}, 1)` restricted to the side of zero given by `z_t`.
pub fn probit_augment<R: Rng + ?Sized>(
    rng: &mut R,
    state: &PolyDlmState,
    z: &[bool],
) -> Result<Vec<f64>> {
    if z.len() != state.len() {
        return Err(Error::Data(format!(
            "expected {} binary responses, found {}",
            state.len(),
            z.len()
        )));
    }
    Ok(state.theta[0]
        .iter()
        .zip(z)
        .map(|(&mean, &positive)| sample_signed(rng, mean, positive))
        .collect())
}

/// Draws the level block given the latent vector: `P = I + HᵀH / W_1`.
pub fn probit_theta1<R: Rng + ?Sized>(
    rng: &mut R,
    state: &mut PolyDlmState,
    latent: &[f64],
) -> Result<()> {
    let draw = level_conditional(state, latent, 1.0)?.sample(rng)?;
    state.theta[0] = draw;
    Ok(())
}
