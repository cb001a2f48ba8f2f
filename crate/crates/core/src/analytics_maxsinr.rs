//! Semi-analytic evaluation of the max-SINR association policy: tier
//! association probabilities (fading-neglected), main/side serving-region
//! probabilities, the Fourier-inversion coverage probability, and the
//! non-handover and delay-outage probabilities built on the shared
//! conditional brackets.

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::analytics_nearest::{
    assoc_probs_nearest, delay_factor, main_lobe_presence_prob, nhp_tier_bracket, TierBreakdown,
};
use crate::numerics::{
    adaptive_quad, auto_truncation, fourier_inversion_cp, gl16_geometric, lower_incomplete_gamma,
    lower_incomplete_gamma_diff_real, QuadratureSpec,
};
use crate::scenario::Scenario;
use crate::{Result, EARTH_RADIUS_M};

use std::f64::consts::PI;

/// Cross-tier displacement exponent `ψ_i^MAX(r)`: the void exponent of every
/// other tier's region able to beat tier `i`'s mean power at distance `r`.
/// Each tier's cap is limited to its visible band so the term remains a true
/// survival exponent past that tier's horizon.
pub fn psi_max(scenario: &Scenario, tier: usize, r: f64) -> f64 {
    let ti = &scenario.tiers[tier];
    let alpha = scenario.channel.alpha;
    let own = ti.power_w * ti.gain_main;
    scenario
        .tiers
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != tier)
        .map(|(_, tk)| {
            let g = &tk.geometry;
            let z = (tk.power_w * tk.gain_main / own).powf(1.0 / alpha) * r;
            if z <= g.altitude {
                0.0
            } else {
                let zc = z.min(g.r_max);
                tk.density * PI * (g.orbit_radius / EARTH_RADIUS_M) * (zc * zc - g.altitude * g.altitude)
            }
        })
        .sum()
}

/// Probability of the typical user accessing tier `i` under the max-SINR
/// policy (small-scale fading neglected, as in the mean-power rule).
pub fn assoc_prob_maxsinr(scenario: &Scenario, tier: usize) -> Result<f64> {
    let t = &scenario.tiers[tier];
    let g = &t.geometry;
    let coeff = 2.0 * t.density * PI * (g.orbit_radius / EARTH_RADIUS_M);
    let r = adaptive_quad(
        |r| {
            let own = t.density * PI * (g.orbit_radius / EARTH_RADIUS_M) * (r * r - g.altitude * g.altitude);
            coeff * r * (-(psi_max(scenario, tier, r) + own)).exp()
        },
        g.altitude,
        g.r_max,
        &scenario.quad,
    )?;
    Ok(r.value)
}

/// All-tier max-SINR association probabilities.
pub fn assoc_probs_maxsinr(scenario: &Scenario) -> Result<Vec<f64>> {
    (0..scenario.tiers.len()).map(|i| assoc_prob_maxsinr(scenario, i)).collect()
}

/// Probabilities of the serving satellite residing in the union of the
/// main-lobe reception caps, and its complement. The pair sums to one
/// exactly.
pub fn lobe_region_probs_maxsinr(scenario: &Scenario) -> (f64, f64) {
    let p_side: f64 = scenario.tiers.iter().map(|t| 1.0 - main_lobe_presence_prob(t)).product();
    (1.0 - p_side, p_side)
}

/// Which reception region conditions the branch of the coverage integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    MainLobe,
    SideLobe,
}

/// Tier parameters pre-scaled so that the transform variable `y` is O(1).
struct ScaledTier {
    lambda_2pi_ratio: f64, // λ 2π R_S / R_E
    h: f64,
    r_m: f64,
    r_max: f64,
    power: f64, // normalized
    g_main: f64,
    g_side: f64,
    delta: f64,
}

struct KernelContext {
    tiers: Vec<ScaledTier>,
    chi: f64,
    beta: f64,
    alpha: f64,
    noise: f64, // normalized
}

/// Geometric GL16 panels per interferer band; the integrands are smooth in
/// `r`, so two panels already resolve them far below the inversion's own
/// tolerance (validated against adaptive quadrature in the tests).
const BAND_PANELS: usize = 2;

impl KernelContext {
    fn new(scenario: &Scenario, power_scale: f64) -> Self {
        let tiers = scenario
            .tiers
            .iter()
            .map(|t| ScaledTier {
                lambda_2pi_ratio: t.density * 2.0 * PI * t.geometry.orbit_radius / EARTH_RADIUS_M,
                h: t.geometry.altitude,
                r_m: t.geometry.r_m,
                r_max: t.geometry.r_max,
                power: t.power_w / power_scale,
                g_main: t.gain_main,
                g_side: t.gain_side,
                delta: (1.0 + t.gamma_th) / t.gamma_th,
            })
            .collect();
        KernelContext {
            tiers,
            chi: scenario.channel.chi(),
            beta: scenario.channel.beta(),
            alpha: scenario.channel.alpha,
            noise: scenario.channel.noise_w / power_scale,
        }
    }

    /// Ungated interferer band: `∫ (1 − (jωβ p G r^(−α) + 1)^(−χ)) r dr`.
    fn plain_band(&self, omega: f64, eirp: f64, lo: f64, hi: f64) -> Complex64 {
        if hi <= lo || omega == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let chi = self.chi;
        let beta = self.beta;
        let alpha = self.alpha;
        gl16_geometric(
            &|r: f64| {
                let w = Complex64::new(1.0, omega * beta * eirp * r.powf(-alpha));
                (Complex64::new(1.0, 0.0) - (-chi * w.ln()).exp()) * r
            },
            lo,
            hi,
            BAND_PANELS,
        )
    }

    /// Band of candidate serving satellites, gated by the running maximum:
    /// `∫ (1 − (jω p G r^(−α) + β^(−1))^(−χ) γ(χ, jωy/δ + y r^α/(βδpG)) / (β^χ Γ(χ))) r dr`.
    fn gated_band(&self, omega: f64, y: f64, eirp: f64, delta: f64, lo: f64, hi: f64) -> Complex64 {
        if hi <= lo {
            return Complex64::new(0.0, 0.0);
        }
        let chi = self.chi;
        let beta = self.beta;
        let alpha = self.alpha;
        let norm = beta.powf(chi) * gamma(chi);
        gl16_geometric(
            &|r: f64| {
                let ra = r.powf(alpha);
                let w = Complex64::new(1.0 / beta, omega * eirp / ra);
                let z = Complex64::new(y * ra / (beta * delta * eirp), omega * y / delta);
                let inc = match lower_incomplete_gamma(chi, z) {
                    Ok(v) => v,
                    Err(_) => return Complex64::new(f64::NAN, f64::NAN),
                };
                (Complex64::new(1.0, 0.0) - (-chi * w.ln()).exp() * inc / norm) * r
            },
            lo,
            hi,
            BAND_PANELS,
        )
    }

    /// Transform of interference-plus-noise restricted to "no candidate has
    /// beaten the level y yet" for the given branch.
    fn theta(&self, branch: Branch, omega: f64, y: f64) -> Complex64 {
        let mut exponent = Complex64::new(0.0, 0.0);
        for t in &self.tiers {
            let (gated, plain) = match branch {
                Branch::MainLobe => (
                    self.gated_band(omega, y, t.power * t.g_main, t.delta, t.h, t.r_m),
                    self.plain_band(omega, t.power * t.g_side, t.r_m, t.r_max),
                ),
                Branch::SideLobe => (
                    self.gated_band(omega, y, t.power * t.g_side, t.delta, t.r_m, t.r_max),
                    self.plain_band(omega, t.power * t.g_main, t.h, t.r_m),
                ),
            };
            exponent -= (gated + plain) * t.lambda_2pi_ratio;
        }
        let noise_phase = Complex64::new(0.0, -omega * self.noise).exp();
        noise_phase * exponent.exp()
    }

    /// Total void exponent: mean number of visible satellites across every
    /// band of every tier. `exp(−·)` is the probability of an empty sky,
    /// which is exactly the non-decaying component of `theta` at large ω.
    fn void_exponent(&self) -> f64 {
        self.tiers
            .iter()
            .map(|t| t.lambda_2pi_ratio * 0.5 * (t.r_max * t.r_max - t.h * t.h))
            .sum()
    }

    /// Mean number of candidate satellites in the branch's serving bands.
    fn candidate_band_mean(&self, branch: Branch) -> f64 {
        self.tiers
            .iter()
            .map(|t| {
                let (lo, hi) = match branch {
                    Branch::MainLobe => (t.h, t.r_m),
                    Branch::SideLobe => (t.r_m, t.r_max),
                };
                t.lambda_2pi_ratio * 0.5 * (hi * hi - lo * lo)
            })
            .sum()
    }

    /// Density factor of the branch's running maximum in `y`.
    fn upsilon(&self, branch: Branch, omega: f64, y: f64) -> Complex64 {
        if y <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let chi = self.chi;
        let beta = self.beta;
        let alpha = self.alpha;
        let shape = (alpha * chi + 2.0) / alpha;
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.tiers {
            let (eirp, lo, hi) = match branch {
                Branch::MainLobe => (t.power * t.g_main, t.h, t.r_m),
                Branch::SideLobe => (t.power * t.g_side, t.r_m, t.r_max),
            };
            let scale = beta * t.delta * eirp;
            let x_lo = y * lo.powf(alpha) / scale;
            let x_hi = y * hi.powf(alpha) / scale;
            let diff = match lower_incomplete_gamma_diff_real(shape, x_lo, x_hi) {
                Ok(v) => v,
                Err(_) => return Complex64::new(f64::NAN, f64::NAN),
            };
            let amplitude = t.lambda_2pi_ratio / (gamma(chi) * alpha)
                * y.powf(-2.0 / alpha - 1.0)
                * scale.powf(2.0 / alpha)
                * diff;
            acc += Complex64::new(0.0, -omega * y / t.delta).exp() * amplitude;
        }
        acc
    }
}

/// Result of the Theorem-4 style coverage evaluation.
#[derive(Debug, Clone, Copy)]
pub struct MaxSinrCoverage {
    /// Final coverage probability in [0, 1].
    pub total: f64,
    /// Inversion value of the main-lobe serving branch (before weighting).
    pub main_branch: f64,
    /// Inversion value of the side-lobe serving branch (before weighting).
    pub side_branch: f64,
    pub p_main: f64,
    pub p_side: f64,
    /// Set when the transform product still exceeds 1e-6 of its peak at the
    /// chosen frequency cutoff.
    pub decay_warning: bool,
    /// (Ω_max, Y_max) actually used per branch, in normalized power units.
    pub truncation_main: (f64, f64),
    pub truncation_side: (f64, f64),
}

/// Coverage probability under the max-SINR policy via the two-branch
/// Fourier inversion.
pub fn coverage_prob_maxsinr(scenario: &Scenario) -> Result<MaxSinrCoverage> {
    let (p_main, p_side) = lobe_region_probs_maxsinr(scenario);
    let alpha = scenario.channel.alpha;
    let chi = scenario.channel.chi();
    let beta = scenario.channel.beta();
    let delta_max = scenario.delta_max();

    // Normalize powers so the dominant side-branch signal scale is O(1).
    let power_scale = scenario
        .tiers
        .iter()
        .map(|t| {
            let delta = (1.0 + t.gamma_th) / t.gamma_th;
            delta * t.power_w * t.gain_side * t.geometry.altitude.powf(-alpha) * chi * beta
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let ctx = KernelContext::new(scenario, power_scale);

    let run_branch = |branch: Branch, hint: f64| -> Result<(f64, (f64, f64), bool)> {
        // The lone-candidate event ("no other satellite anywhere") puts a
        // conditional atom into the interference transform whose kernel
        // integral never decays in omega. Its full-axis value is closed-form
        // (the sole satellite always beats noise at these scales), so it is
        // added exactly and removed from the numerical integrand, which then
        // decays to zero.
        let atom = (-ctx.void_exponent()).exp();
        let atom_term = atom * ctx.candidate_band_mean(branch);
        let theta = |omega: f64, y: f64| {
            ctx.theta(branch, omega, y) - Complex64::new(0.0, -omega * ctx.noise).exp() * atom
        };
        let upsilon = |omega: f64, y: f64| ctx.upsilon(branch, omega, y);
        let (omega_max, y_max, decay_ok) = match scenario.inversion_truncation {
            Some((om, ym)) => (om, ym, true),
            None => {
                let t = auto_truncation(&theta, &upsilon, hint);
                (t.omega_max, t.y_max, t.decay_ok)
            }
        };
        let spec = QuadratureSpec {
            abs_tol: scenario.quad.abs_tol.max(1e-7),
            rel_tol: scenario.quad.rel_tol.max(1e-6),
            max_subdivisions: scenario.quad.max_subdivisions.max(400),
            omega_truncation: omega_max,
            y_truncation: y_max,
        };
        let r = fourier_inversion_cp(&theta, &upsilon, delta_max, &spec)?;
        Ok(((r.raw + atom_term).clamp(0.0, 1.0), (omega_max, y_max), !decay_ok))
    };

    // The dominant side-branch signals are O(1) after normalization; the
    // main branch sits a gain ratio higher.
    let gain_ratio = scenario
        .tiers
        .iter()
        .map(|t| t.gain_main / t.gain_side)
        .fold(f64::NEG_INFINITY, f64::max);
    let (side_branch, truncation_side, warn_side) = run_branch(Branch::SideLobe, 1.0)?;
    let (main_branch, truncation_main, warn_main) = if p_main > 1e-12 {
        run_branch(Branch::MainLobe, gain_ratio)?
    } else {
        (0.0, (0.0, 0.0), false)
    };

    let total = (p_main * main_branch + p_side * side_branch).clamp(0.0, 1.0);
    Ok(MaxSinrCoverage {
        total,
        main_branch,
        side_branch,
        p_main,
        p_side,
        decay_warning: warn_side || warn_main,
        truncation_main,
        truncation_side,
    })
}

/// Non-handover probability under the max-SINR policy: the same per-tier
/// conditional brackets as the nearest policy, weighted by the max-SINR
/// association probabilities.
pub fn nhp_maxsinr(scenario: &Scenario) -> Result<TierBreakdown> {
    let assoc_nearest = assoc_probs_nearest(scenario)?;
    let assoc_max = assoc_probs_maxsinr(scenario)?;
    let mut per_tier = Vec::with_capacity(scenario.tiers.len());
    for i in 0..scenario.tiers.len() {
        let bracket = nhp_tier_bracket(scenario, i, scenario.tiers[i].t_th_s, assoc_nearest[i])?;
        per_tier.push(bracket * assoc_max[i]);
    }
    Ok(TierBreakdown { total: per_tier.iter().sum(), per_tier })
}

/// Delay-outage probability under the max-SINR policy.
pub fn dop_maxsinr(scenario: &Scenario) -> Result<TierBreakdown> {
    let assoc = assoc_probs_maxsinr(scenario)?;
    let per_tier: Vec<f64> = scenario
        .tiers
        .iter()
        .zip(&assoc)
        .map(|(t, &a)| delay_factor(t, EARTH_RADIUS_M) * a)
        .collect();
    Ok(TierBreakdown { total: per_tier.iter().sum(), per_tier })
}

/// Per-tier conditional NHP brackets (shared with the nearest policy);
/// exposed so both policies' weightings can be compared directly.
pub fn nhp_brackets(scenario: &Scenario) -> Result<Vec<f64>> {
    let assoc_nearest = assoc_probs_nearest(scenario)?;
    (0..scenario.tiers.len())
        .map(|i| nhp_tier_bracket(scenario, i, scenario.tiers[i].t_th_s, assoc_nearest[i]))
        .collect()
}

/// Exposes the branch kernels for verification (symmetry tests and envelope
/// inspection); `main_lobe` selects the branch.
pub fn kernel_probe(
    scenario: &Scenario,
    main_lobe: bool,
    omega: f64,
    y: f64,
) -> (Complex64, Complex64) {
    let alpha = scenario.channel.alpha;
    let chi = scenario.channel.chi();
    let beta = scenario.channel.beta();
    let power_scale = scenario
        .tiers
        .iter()
        .map(|t| {
            let delta = (1.0 + t.gamma_th) / t.gamma_th;
            delta * t.power_w * t.gain_side * t.geometry.altitude.powf(-alpha) * chi * beta
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let ctx = KernelContext::new(scenario, power_scale);
    let branch = if main_lobe { Branch::MainLobe } else { Branch::SideLobe };
    (ctx.theta(branch, omega, y), ctx.upsilon(branch, omega, y))
}
