//! Semi-analytic evaluation of the nearest-satellite association policy:
//! tier association probabilities, conditional serving-distance densities,
//! the aggregated-interference Laplace transform, and the coverage,
//! non-handover and delay-outage probabilities built from them.

use rayon::prelude::*;

use crate::constellation::TierConfig;
use crate::numerics::{adaptive_quad, gl16_geometric, QuadratureSpec};
use crate::scenario::Scenario;
use crate::{Error, Result, EARTH_RADIUS_M, SPEED_OF_LIGHT_M_S};

use std::f64::consts::PI;

/// Which reception region the serving satellite occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServingLobe {
    Main,
    Side,
}

/// A probability together with its per-tier contributions.
#[derive(Debug, Clone)]
pub struct TierBreakdown {
    pub total: f64,
    pub per_tier: Vec<f64>,
}

/// Void-probability exponent for "no satellite of any tier strictly closer
/// than `r`", with each tier's cap limited to its visible band so the term
/// stays a true survival exponent beyond a tier's horizon.
pub(crate) fn all_tier_void_exponent(scenario: &Scenario, r: f64) -> f64 {
    scenario
        .tiers
        .iter()
        .map(|t| {
            let g = &t.geometry;
            let rc = r.clamp(g.altitude, g.r_max);
            t.density * PI * (g.orbit_radius / EARTH_RADIUS_M) * (rc * rc - g.altitude * g.altitude)
        })
        .sum()
}

/// Joint density (in `r`) of the event "tier `i`'s nearest satellite sits at
/// distance `r` and is the global nearest" — the integrand of every
/// nearest-policy quantity.
pub(crate) fn serving_distance_density(scenario: &Scenario, tier: usize, r: f64) -> f64 {
    let t = &scenario.tiers[tier];
    let g = &t.geometry;
    2.0 * t.density * PI * (g.orbit_radius / EARTH_RADIUS_M) * r * (-all_tier_void_exponent(scenario, r)).exp()
}

/// Probability that at least one tier-`i` satellite lies in the main-lobe
/// reception cap: `1 − exp(−λ 2π R_S² (1 − cos φ_m))`.
pub fn main_lobe_presence_prob(tier: &TierConfig) -> f64 {
    let g = &tier.geometry;
    1.0 - (-tier.density * 2.0 * PI * g.orbit_radius * g.orbit_radius * (1.0 - g.phi_m_contact.cos())).exp()
}

/// Probability of the typical user being served by tier `i` under the
/// nearest-satellite policy.
pub fn assoc_prob_nearest(scenario: &Scenario, tier: usize) -> Result<f64> {
    let g = &scenario.tiers[tier].geometry;
    let r = adaptive_quad(
        |r| serving_distance_density(scenario, tier, r),
        g.altitude,
        g.r_max,
        &scenario.quad,
    )?;
    Ok(r.value)
}

/// All-tier association probabilities in one pass.
pub fn assoc_probs_nearest(scenario: &Scenario) -> Result<Vec<f64>> {
    (0..scenario.tiers.len()).map(|i| assoc_prob_nearest(scenario, i)).collect()
}

/// Joint probability of "served by tier `i` with the serving satellite in
/// the given lobe band" — the exact normalizer of the conditional density.
pub fn lobe_assoc_prob(scenario: &Scenario, tier: usize, lobe: ServingLobe) -> Result<f64> {
    let g = &scenario.tiers[tier].geometry;
    let (lo, hi) = match lobe {
        ServingLobe::Main => (g.altitude, g.r_m),
        ServingLobe::Side => (g.r_m, g.r_max),
    };
    let r = adaptive_quad(|r| serving_distance_density(scenario, tier, r), lo, hi, &scenario.quad)?;
    Ok(r.value)
}

/// Conditional serving-distance density given association with tier `i` and
/// the stated lobe. Integrates to one over the lobe's support.
pub fn conditional_distance_pdf(scenario: &Scenario, tier: usize, r: f64, lobe: ServingLobe) -> Result<f64> {
    let g = &scenario.tiers[tier].geometry;
    let (lo, hi) = match lobe {
        ServingLobe::Main => (g.altitude, g.r_m),
        ServingLobe::Side => (g.r_m, g.r_max),
    };
    if r < lo * (1.0 - 1e-12) || r > hi * (1.0 + 1e-12) {
        return Err(Error::domain(
            "conditional_distance_pdf",
            format!("distance {r} outside the {lobe:?} support [{lo}, {hi}]"),
        ));
    }
    let normalizer = lobe_assoc_prob(scenario, tier, lobe)?;
    Ok(serving_distance_density(scenario, tier, r) / normalizer)
}

/// Laplace transform of the aggregated interference power seen when the
/// serving satellite is in tier `serving_tier` at distance `serving_r`, in
/// the given lobe. Returns a value in (0, 1]; exactly 1 at `s = 0`.
pub fn interference_lt_nearest(
    scenario: &Scenario,
    s: f64,
    serving_tier: usize,
    serving_r: f64,
    serving_lobe: ServingLobe,
) -> Result<f64> {
    if s < 0.0 {
        return Err(Error::domain("interference_lt_nearest", format!("transform argument must be >= 0, got {s}")));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    let chi = scenario.channel.chi();
    let beta = scenario.channel.beta();
    let alpha = scenario.channel.alpha;
    let _ = serving_tier; // the gating below depends only on the serving distance

    let mut exponent = 0.0;
    for t in &scenario.tiers {
        let g = &t.geometry;
        let band = |gain: f64, lo: f64, hi: f64| -> f64 {
            if hi <= lo {
                return 0.0;
            }
            gl16_geometric(
                &|ri: f64| (1.0 - (1.0 + s * t.power_w * gain * ri.powf(-alpha) * beta).powf(-chi)) * ri,
                lo,
                hi,
                3,
            )
        };
        let (main_integral, side_integral) = match serving_lobe {
            ServingLobe::Main => (
                band(t.gain_main, g.altitude.max(serving_r), g.r_m.max(serving_r)),
                band(t.gain_side, g.r_m, g.r_max),
            ),
            ServingLobe::Side => (
                band(t.gain_main, g.altitude.max(serving_r), g.r_m.max(serving_r)),
                band(t.gain_side, g.r_m.max(serving_r), g.r_max.max(serving_r)),
            ),
        };
        exponent += t.density * (g.orbit_radius / EARTH_RADIUS_M) * (main_integral + side_integral);
    }
    Ok((-2.0 * PI * exponent).exp())
}

/// Alternating-sum parameters of the integer-shape tail bound: the rounded
/// shape and the constant `A = χ(χ!)^(−1/χ)/β` evaluated at the rounded χ.
#[derive(Debug, Clone, Copy)]
pub struct AlzerKernelParams {
    pub chi_int: u32,
    pub a: f64,
}

impl AlzerKernelParams {
    pub fn from_channel(chi: f64, beta: f64) -> Self {
        let chi_int = (chi.round() as u32).max(1);
        let factorial: f64 = (1..=chi_int).map(|k| k as f64).product();
        let a = chi_int as f64 * factorial.powf(-1.0 / chi_int as f64) / beta;
        AlzerKernelParams { chi_int, a }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).map(|j| (n - j) as f64 / (j + 1) as f64).product()
}

/// Conditional coverage kernel at serving distance `r` in the given lobe:
/// the fading tail bound expanded into transform evaluations,
/// `Σ_{q=1}^{χ} C(χ,q) (−1)^{q+1} e^{−s_q σ²} L_I(s_q)` with
/// `s_q = qAγ_th (p G)^{−1} r^α`.
pub fn coverage_kernel(scenario: &Scenario, tier: usize, r: f64, lobe: ServingLobe) -> Result<f64> {
    let t = &scenario.tiers[tier];
    let alzer = AlzerKernelParams::from_channel(scenario.channel.chi(), scenario.channel.beta());
    let gain = match lobe {
        ServingLobe::Main => t.gain_main,
        ServingLobe::Side => t.gain_side,
    };
    let base = alzer.a * t.gamma_th * r.powf(scenario.channel.alpha) / (t.power_w * gain);
    let mut acc = 0.0;
    for q in 1..=alzer.chi_int {
        let s = q as f64 * base;
        let sign = if q % 2 == 1 { 1.0 } else { -1.0 };
        let lt = interference_lt_nearest(scenario, s, tier, r, lobe)?;
        acc += sign * binomial(alzer.chi_int, q) * (-s * scenario.channel.noise_w).exp() * lt;
    }
    Ok(acc.clamp(0.0, 1.0))
}

/// Coverage probability of the nearest-satellite policy, with the per-tier
/// contributions (already weighted by association).
pub fn coverage_prob_nearest(scenario: &Scenario) -> Result<TierBreakdown> {
    let per_tier: Vec<f64> = (0..scenario.tiers.len())
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let g = &scenario.tiers[i].geometry;
            let main = adaptive_quad(
                |r| {
                    coverage_kernel(scenario, i, r, ServingLobe::Main).unwrap_or(f64::NAN)
                        * serving_distance_density(scenario, i, r)
                },
                g.altitude,
                g.r_m,
                &outer_spec(&scenario.quad),
            )?;
            let side = adaptive_quad(
                |r| {
                    coverage_kernel(scenario, i, r, ServingLobe::Side).unwrap_or(f64::NAN)
                        * serving_distance_density(scenario, i, r)
                },
                g.r_m,
                g.r_max,
                &outer_spec(&scenario.quad),
            )?;
            let v = main.value + side.value;
            if v.is_nan() {
                return Err(Error::ToleranceNotMet { estimate: f64::NAN, error_bound: f64::INFINITY });
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TierBreakdown { total: per_tier.iter().sum(), per_tier })
}

fn outer_spec(base: &QuadratureSpec) -> QuadratureSpec {
    // Outer integrands are probabilities-in-progress; absolute accuracy well
    // below the Monte Carlo comparison floor is enough.
    QuadratureSpec { abs_tol: base.abs_tol.max(1e-9), rel_tol: base.rel_tol.max(1e-7), ..*base }
}

/// Distance-domain admissible region for the exit-time condition at one
/// departure longitude: the set of serving distances whose boundary arc
/// takes at least `t_th` to traverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaRegion {
    All,
    None,
    /// Keep `[h, below)` and `(above, r_max]`.
    Split { below: f64, above: f64 },
}

/// Geometry of the exit-time gate for one tier and departure longitude.
#[derive(Debug, Clone, Copy)]
pub struct NhpGeometry {
    pub kappa: f64,
    pub p: f64,
    pub region: ThetaRegion,
}

impl NhpGeometry {
    pub fn new(tier: &TierConfig, t_th: f64, theta: f64, earth_radius: f64) -> Self {
        let g = &tier.geometry;
        let travel = tier.velocity_m_s * t_th / g.orbit_radius;
        let kappa = (g.phi_d.tan() * theta.cos()).atan();
        if travel > PI {
            // beyond the greatest possible boundary arc; the cosine inversion
            // below would alias, so the gate is simply closed
            return NhpGeometry { kappa, p: f64::NEG_INFINITY, region: ThetaRegion::None };
        }
        let p = travel.cos() / (1.0 - g.phi_d.sin().powi(2) * theta.sin().powi(2)).sqrt();
        let region = if p > 1.0 {
            ThetaRegion::All
        } else if p < -1.0 {
            ThetaRegion::None
        } else {
            let spread = p.clamp(-1.0, 1.0).acos();
            let a_plus = kappa + spread;
            let a_minus = kappa - spread;
            if a_plus <= 0.0 {
                ThetaRegion::All
            } else {
                let above = g.slant_distance(a_plus, earth_radius);
                let below = if a_minus <= 0.0 {
                    0.0
                } else {
                    g.slant_distance(a_minus, earth_radius)
                };
                ThetaRegion::Split { below, above }
            }
        };
        NhpGeometry { kappa, p, region }
    }
}

/// Integrates `kernel * serving density` over the part of `[lo, hi]` that the
/// region admits.
fn gated_lobe_integral(
    scenario: &Scenario,
    tier: usize,
    lobe: ServingLobe,
    lo: f64,
    hi: f64,
    region: ThetaRegion,
) -> Result<f64> {
    let pieces: Vec<(f64, f64)> = match region {
        ThetaRegion::All => vec![(lo, hi)],
        ThetaRegion::None => vec![],
        ThetaRegion::Split { below, above } => {
            let mut v = Vec::new();
            if below > lo {
                v.push((lo, below.min(hi)));
            }
            if above < hi {
                v.push((above.max(lo), hi));
            }
            v
        }
    };
    let mut acc = 0.0;
    for (a, b) in pieces {
        if b <= a {
            continue;
        }
        let r = adaptive_quad(
            |r| {
                coverage_kernel(scenario, tier, r, lobe).unwrap_or(f64::NAN)
                    * serving_distance_density(scenario, tier, r)
            },
            a,
            b,
            &outer_spec(&scenario.quad),
        )?;
        acc += r.value;
    }
    if acc.is_nan() {
        return Err(Error::ToleranceNotMet { estimate: f64::NAN, error_bound: f64::INFINITY });
    }
    Ok(acc)
}

/// Conditional non-handover bracket of one tier: the probability of coverage
/// and an exit time of at least `t_th`, given association with the tier and
/// averaged over the departure longitude. Shared verbatim between the two
/// association policies.
pub fn nhp_tier_bracket(scenario: &Scenario, tier: usize, t_th: f64, assoc: f64) -> Result<f64> {
    let g = scenario.tiers[tier].geometry;
    let mut n_theta = 64usize;
    let mut last: Option<f64> = None;
    loop {
        let thetas: Vec<f64> = (0..n_theta).map(|j| PI * (j as f64 + 0.5) / n_theta as f64).collect();
        let contributions: Vec<Result<f64>> = thetas
            .par_iter()
            .map(|&theta| {
                let geom = NhpGeometry::new(&scenario.tiers[tier], t_th, theta, EARTH_RADIUS_M);
                let main = gated_lobe_integral(scenario, tier, ServingLobe::Main, g.altitude, g.r_m, geom.region)?;
                let side = gated_lobe_integral(scenario, tier, ServingLobe::Side, g.r_m, g.r_max, geom.region)?;
                Ok(main + side)
            })
            .collect();
        let mut sum = 0.0;
        for c in contributions {
            sum += c?;
        }
        let bracket = sum / n_theta as f64 / assoc;
        if let Some(prev) = last {
            if (bracket - prev).abs() < 1e-4 {
                return Ok(bracket);
            }
        }
        if n_theta >= 512 {
            return Ok(bracket);
        }
        last = Some(bracket);
        n_theta *= 2;
    }
}

/// Non-handover probability under the nearest-satellite policy: per-tier
/// conditional brackets weighted by the nearest association probabilities.
pub fn nhp_nearest(scenario: &Scenario) -> Result<TierBreakdown> {
    let assoc = assoc_probs_nearest(scenario)?;
    let mut per_tier = Vec::with_capacity(scenario.tiers.len());
    for i in 0..scenario.tiers.len() {
        let bracket = nhp_tier_bracket(scenario, i, scenario.tiers[i].t_th_s, assoc[i])?;
        per_tier.push(bracket * assoc[i]);
    }
    Ok(TierBreakdown { total: per_tier.iter().sum(), per_tier })
}

/// Per-tier delay factor `P{R_i ≤ c T_D}` with the unconditional
/// nearest-distance law, clamped to the visible band.
pub fn delay_factor(tier: &TierConfig, earth_radius: f64) -> f64 {
    let g = &tier.geometry;
    let reach = SPEED_OF_LIGHT_M_S * tier.delay_bound_s;
    if reach <= g.altitude {
        return 0.0;
    }
    let rc = reach.min(g.r_max);
    1.0 - (-tier.density * PI * (g.orbit_radius / earth_radius) * (rc * rc - g.altitude * g.altitude)).exp()
}

/// Delay-outage probability under the nearest-satellite policy.
pub fn dop_nearest(scenario: &Scenario) -> Result<TierBreakdown> {
    let assoc = assoc_probs_nearest(scenario)?;
    let per_tier: Vec<f64> = scenario
        .tiers
        .iter()
        .zip(&assoc)
        .map(|(t, &a)| delay_factor(t, EARTH_RADIUS_M) * a)
        .collect();
    Ok(TierBreakdown { total: per_tier.iter().sum(), per_tier })
}

/// Reference single-tier visibility probability (used by tests and the
/// association sanity checks): `1 − exp(−λπ(R_S/R_E)(r_max² − h²))`.
pub fn visibility_prob(tier: &TierConfig) -> f64 {
    let g = &tier.geometry;
    1.0 - (-tier.density * PI * (g.orbit_radius / EARTH_RADIUS_M) * (g.r_max * g.r_max - g.altitude * g.altitude))
        .exp()
}
