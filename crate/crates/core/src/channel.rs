//! Small-scale fading: the shadowed-Rician channel is handled through its
//! gamma approximation, whose shape/scale pair feeds every downstream
//! transform, and which the simulator samples directly.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use statrs::function::gamma::gamma;

use crate::{Error, Result};

/// Channel and noise description shared by all tiers.
///
/// The gamma shape/scale pair is always derived from `(m, b0, omega)` on
/// access so it can never go stale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Nakagami fading coefficient.
    pub m: f64,
    /// Average power of the scattered component.
    pub b0: f64,
    /// Average power of the line-of-sight component.
    pub omega: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Noise power (W).
    pub noise_w: f64,
}

impl ChannelParams {
    pub fn new(m: f64, b0: f64, omega: f64, alpha: f64, noise_w: f64) -> Result<Self> {
        if !(m > 0.0 && b0 > 0.0 && omega >= 0.0) {
            return Err(Error::domain(
                "ChannelParams",
                format!("need m > 0, b0 > 0, omega >= 0; got m={m}, b0={b0}, omega={omega}"),
            ));
        }
        if !(alpha >= 2.0) {
            return Err(Error::domain("ChannelParams", format!("path-loss exponent must be >= 2, got {alpha}")));
        }
        if !(noise_w > 0.0) {
            return Err(Error::domain("ChannelParams", format!("noise power must be > 0, got {noise_w}")));
        }
        Ok(ChannelParams { m, b0, omega, alpha, noise_w })
    }

    /// Gamma shape parameter of the fading approximation.
    pub fn chi(&self) -> f64 {
        derive_gamma_params(self.m, self.b0, self.omega).0
    }

    /// Gamma scale parameter of the fading approximation.
    pub fn beta(&self) -> f64 {
        derive_gamma_params(self.m, self.b0, self.omega).1
    }
}

/// Shape and scale of the gamma distribution matching the shadowed-Rician
/// channel's first two moments:
///
/// `χ = m(2b0+Ω)² / (4mb0² + 4mb0Ω + Ω²)`, `β = (2b0+Ω)/χ`.
pub fn derive_gamma_params(m: f64, b0: f64, omega: f64) -> (f64, f64) {
    let total = 2.0 * b0 + omega;
    let chi = m * total * total / (4.0 * m * b0 * b0 + 4.0 * m * b0 * omega + omega * omega);
    (chi, total / chi)
}

/// One channel power-gain draw `H ~ Gamma(shape=χ, scale=β)`.
pub fn sample_gain<R: Rng + ?Sized>(rng: &mut R, chi: f64, beta: f64) -> f64 {
    Gamma::new(chi, beta).expect("validated shape/scale").sample(rng)
}

/// Reusable sampler for hot loops; avoids re-validating shape/scale per draw.
#[derive(Debug, Clone, Copy)]
pub struct GainSampler {
    dist: Gamma<f64>,
}

impl GainSampler {
    pub fn new(chi: f64, beta: f64) -> Result<Self> {
        let dist = Gamma::new(chi, beta)
            .map_err(|e| Error::domain("GainSampler", format!("invalid gamma parameters: {e}")))?;
        Ok(GainSampler { dist })
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.dist.sample(rng)
    }
}

/// Density of the gamma-approximated channel gain at `h`.
pub fn gain_pdf(h: f64, chi: f64, beta: f64) -> f64 {
    if h < 0.0 {
        return 0.0;
    }
    if h == 0.0 {
        // chi < 1 diverges at the origin, chi == 1 is the exponential density.
        return if chi > 1.0 {
            0.0
        } else if chi == 1.0 {
            1.0 / beta
        } else {
            f64::INFINITY
        };
    }
    h.powf(chi - 1.0) * (-h / beta).exp() / (beta.powf(chi) * gamma(chi))
}
