//! The simulation oracle: estimates association, coverage, non-handover and
//! delay-outage probabilities for both association policies by repeated
//! constellation realization, with deterministic per-trial random streams so
//! results are bit-identical regardless of worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::GainSampler;
use crate::constellation::{
    dome_boundary_arc_angle, sample_tier, walker_delta, LobeClass, SatRecord, SatelliteRealization,
    TierConfig, TierSize,
};
use crate::scenario::Scenario;
use crate::{Result, EARTH_RADIUS_M, SPEED_OF_LIGHT_M_S};

/// Which association policies a run evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyChoice {
    Nearest,
    MaxSinr,
    Both,
}

/// Which metrics to aggregate.
#[derive(Debug, Clone, Copy)]
pub struct MetricSelect {
    pub assoc: bool,
    pub cp: bool,
    pub nhp: bool,
    pub dop: bool,
}

impl Default for MetricSelect {
    fn default() -> Self {
        MetricSelect { assoc: true, cp: true, nhp: true, dop: true }
    }
}

/// Simulation configuration.
#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub trials: usize,
    pub seed: u64,
    pub policy: PolicyChoice,
    pub metrics: MetricSelect,
    /// Number of departure-longitude draws per trial for the exit-time
    /// average.
    pub theta_samples: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            trials: 100_000,
            seed: 42,
            policy: PolicyChoice::Both,
            metrics: MetricSelect::default(),
            theta_samples: 16,
        }
    }
}

/// A mean with its standard error.
#[derive(Debug, Clone, Copy, Default)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials_used: usize,
}

impl McEstimate {
    fn bernoulli(successes: f64, trials: usize) -> Self {
        if trials == 0 {
            return McEstimate::default();
        }
        let mean = successes / trials as f64;
        McEstimate {
            mean,
            stderr: (mean * (1.0 - mean) / trials as f64).max(0.0).sqrt(),
            trials_used: trials,
        }
    }

    fn from_moments(sum: f64, sum_sq: f64, trials: usize) -> Self {
        if trials == 0 {
            return McEstimate::default();
        }
        let n = trials as f64;
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(0.0);
        McEstimate { mean, stderr: (var / n).sqrt(), trials_used: trials }
    }
}

/// Outcome of one realization under one policy.
#[derive(Debug, Clone, Copy, Default)]
pub struct PolicyOutcome {
    /// Tier selected by the policy's association rule, if any satellite is
    /// visible.
    pub assoc_tier: Option<usize>,
    /// Covered at the tier's SINR threshold.
    pub covered: bool,
    /// Tier and slant distance of the satellite that actually serves
    /// (carries the exit-time and delay geometry).
    pub serving_tier: Option<usize>,
    pub serving_distance: f64,
    pub serving_earth_angle: f64,
    /// Fraction of sampled departure longitudes whose boundary arc takes at
    /// least the tier's `t_th` to traverse; zero when uncovered.
    pub nhp_fraction: f64,
    /// Serving distance within the associated tier's delay bound.
    pub delay_ok: bool,
}

/// Outcome of one realization under both policies.
#[derive(Debug, Clone, Copy, Default)]
pub struct TrialOutcome {
    pub nearest: PolicyOutcome,
    pub maxsinr: PolicyOutcome,
}

/// Samples a full constellation snapshot across all tiers.
pub fn sample_realization<R: Rng + ?Sized>(
    rng: &mut R,
    scenario: &Scenario,
    gain: &GainSampler,
) -> SatelliteRealization {
    let mut real = SatelliteRealization::default();
    for (i, tier) in scenario.tiers.iter().enumerate() {
        let sats = sample_tier(rng, i, tier, gain, EARTH_RADIUS_M);
        real.visible_counts.push(sats.iter().filter(|s| s.lobe != LobeClass::Invisible).count());
        real.sats.extend(sats);
    }
    real
}

fn lobe_gain(tier: &TierConfig, lobe: LobeClass) -> f64 {
    match lobe {
        LobeClass::Main => tier.gain_main,
        LobeClass::Side => tier.gain_side,
        LobeClass::Invisible => 0.0,
    }
}

fn exit_fraction(
    scenario: &Scenario,
    tier: usize,
    earth_angle: f64,
    thetas: &[f64],
) -> f64 {
    let t = &scenario.tiers[tier];
    if t.t_th_s == 0.0 {
        return 1.0;
    }
    let ok = thetas
        .iter()
        .filter(|&&theta| {
            let arc = dome_boundary_arc_angle(earth_angle, t.geometry.phi_d, theta);
            t.geometry.orbit_radius * arc / t.velocity_m_s >= t.t_th_s
        })
        .count();
    ok as f64 / thetas.len() as f64
}

/// Evaluates every per-trial metric on an existing realization; `thetas` are
/// the departure-longitude draws shared by both policies.
pub fn evaluate_realization(
    real: &SatelliteRealization,
    scenario: &Scenario,
    thetas: &[f64],
) -> TrialOutcome {
    let alpha = scenario.channel.alpha;
    let noise = scenario.channel.noise_w;

    // Received power of every visible satellite and the interference total.
    let mut total_power = 0.0;
    let mut nearest: Option<(usize, &SatRecord, f64)> = None; // (index into powers, record, power)
    let mut strongest: Option<(&SatRecord, f64)> = None;
    let mut tier_nearest: Vec<Option<&SatRecord>> = vec![None; scenario.tiers.len()];
    let mut powers: Vec<(usize, f64)> = Vec::with_capacity(real.sats.len()); // (sat index, power)

    for (idx, sat) in real.sats.iter().enumerate() {
        if sat.lobe == LobeClass::Invisible {
            continue;
        }
        let tier = &scenario.tiers[sat.tier];
        let w = tier.power_w
            * lobe_gain(tier, sat.lobe)
            * sat.fading.expect("visible satellites carry fading")
            * sat.distance.powf(-alpha);
        total_power += w;
        powers.push((idx, w));
        if nearest.map_or(true, |(_, n, _)| sat.distance < n.distance) {
            nearest = Some((idx, sat, w));
        }
        if strongest.map_or(true, |(_, sw)| w > sw) {
            strongest = Some((sat, w));
        }
        if tier_nearest[sat.tier].map_or(true, |n| sat.distance < n.distance) {
            tier_nearest[sat.tier] = Some(sat);
        }
    }

    let mut out = TrialOutcome::default();

    if let Some((_, sat, w)) = nearest {
        let tier = sat.tier;
        let sinr = w / (total_power - w + noise);
        let covered = sinr > scenario.tiers[tier].gamma_th;
        out.nearest = PolicyOutcome {
            assoc_tier: Some(tier),
            covered,
            serving_tier: Some(tier),
            serving_distance: sat.distance,
            serving_earth_angle: sat.earth_angle,
            nhp_fraction: if covered { exit_fraction(scenario, tier, sat.earth_angle, thetas) } else { 0.0 },
            delay_ok: sat.distance <= SPEED_OF_LIGHT_M_S * scenario.tiers[tier].delay_bound_s,
        };
    }

    if let Some((sat, _)) = strongest {
        // Coverage: any visible satellite beating its own tier threshold.
        // SINR is monotone in received power, so scanning powers suffices.
        let covered = powers.iter().any(|&(idx, wx)| {
            let tier = real.sats[idx].tier;
            wx / (total_power - wx + noise) > scenario.tiers[tier].gamma_th
        });
        // Association neglects fading: strongest mean power among the
        // per-tier nearest satellites, through the main-lobe gain.
        let assoc_tier = tier_nearest
            .iter()
            .enumerate()
            .filter_map(|(i, s)| {
                s.map(|s| {
                    let t = &scenario.tiers[i];
                    (i, t.power_w * t.gain_main * s.distance.powf(-alpha))
                })
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i);
        let serving_tier = sat.tier;
        let delay_tier = assoc_tier.unwrap_or(serving_tier);
        let delay_distance = tier_nearest[delay_tier].map_or(f64::INFINITY, |s| s.distance);
        out.maxsinr = PolicyOutcome {
            assoc_tier,
            covered,
            serving_tier: Some(serving_tier),
            serving_distance: sat.distance,
            serving_earth_angle: sat.earth_angle,
            nhp_fraction: if covered {
                exit_fraction(scenario, serving_tier, sat.earth_angle, thetas)
            } else {
                0.0
            },
            delay_ok: delay_distance <= SPEED_OF_LIGHT_M_S * scenario.tiers[delay_tier].delay_bound_s,
        };
    }

    out
}

/// Runs one full trial on a fresh per-trial random stream.
pub fn run_trial<R: Rng + ?Sized>(
    rng: &mut R,
    scenario: &Scenario,
    theta_samples: usize,
) -> TrialOutcome {
    let gain = GainSampler::new(scenario.channel.chi(), scenario.channel.beta())
        .expect("validated channel parameters");
    let real = sample_realization(rng, scenario, &gain);
    let thetas: Vec<f64> =
        (0..theta_samples.max(1)).map(|_| rng.random::<f64>() * std::f64::consts::PI).collect();
    evaluate_realization(&real, scenario, &thetas)
}

/// Per-policy aggregated estimates.
#[derive(Debug, Clone, Default)]
pub struct PolicyEstimates {
    /// Association frequency per tier.
    pub assoc: Vec<McEstimate>,
    pub cp: McEstimate,
    /// Joint frequency of "covered and associated with tier i".
    pub cp_per_tier: Vec<McEstimate>,
    pub nhp: McEstimate,
    /// NHP conditioned on serving tier i (the per-tier bracket estimate).
    pub nhp_conditional: Vec<McEstimate>,
    pub dop: McEstimate,
}

/// Full simulation report.
#[derive(Debug, Clone, Default)]
pub struct McReport {
    pub nearest: Option<PolicyEstimates>,
    pub maxsinr: Option<PolicyEstimates>,
    pub trials: usize,
}

fn aggregate(outcomes: &[PolicyOutcome], tiers: usize) -> PolicyEstimates {
    let n = outcomes.len();
    let mut assoc = vec![0.0; tiers];
    let mut cp_joint = vec![0.0; tiers];
    let mut covered = 0.0;
    let mut nhp_sum = 0.0;
    let mut nhp_sq = 0.0;
    let mut nhp_cond_sum = vec![0.0; tiers];
    let mut nhp_cond_sq = vec![0.0; tiers];
    let mut nhp_cond_n = vec![0usize; tiers];
    let mut delay = 0.0;

    for o in outcomes {
        if let Some(t) = o.assoc_tier {
            assoc[t] += 1.0;
            if o.covered {
                cp_joint[t] += 1.0;
            }
            if o.delay_ok {
                delay += 1.0;
            }
        }
        if o.covered {
            covered += 1.0;
        }
        nhp_sum += o.nhp_fraction;
        nhp_sq += o.nhp_fraction * o.nhp_fraction;
        if let Some(t) = o.serving_tier {
            nhp_cond_sum[t] += o.nhp_fraction;
            nhp_cond_sq[t] += o.nhp_fraction * o.nhp_fraction;
            nhp_cond_n[t] += 1;
        }
    }

    PolicyEstimates {
        assoc: assoc.iter().map(|&a| McEstimate::bernoulli(a, n)).collect(),
        cp: McEstimate::bernoulli(covered, n),
        cp_per_tier: cp_joint.iter().map(|&c| McEstimate::bernoulli(c, n)).collect(),
        nhp: McEstimate::from_moments(nhp_sum, nhp_sq, n),
        nhp_conditional: (0..tiers)
            .map(|t| McEstimate::from_moments(nhp_cond_sum[t], nhp_cond_sq[t], nhp_cond_n[t]))
            .collect(),
        dop: McEstimate::bernoulli(delay, n),
    }
}

/// Runs `config.trials` independent trials. Trial `k` draws from stream `k`
/// of a counter-based generator seeded with `config.seed`, and outcomes are
/// reduced in trial order, so the report is bit-identical for any number of
/// worker threads.
pub fn estimate(config: &McConfig, scenario: &Scenario) -> Result<McReport> {
    scenario.validate()?;
    let outcomes: Vec<TrialOutcome> = (0..config.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(trial);
            run_trial(&mut rng, scenario, config.theta_samples)
        })
        .collect();

    let tiers = scenario.tiers.len();
    let mut report = McReport { trials: config.trials, ..Default::default() };
    if matches!(config.policy, PolicyChoice::Nearest | PolicyChoice::Both) {
        let v: Vec<PolicyOutcome> = outcomes.iter().map(|o| o.nearest).collect();
        report.nearest = Some(aggregate(&v, tiers));
    }
    if matches!(config.policy, PolicyChoice::MaxSinr | PolicyChoice::Both) {
        let v: Vec<PolicyOutcome> = outcomes.iter().map(|o| o.maxsinr).collect();
        report.maxsinr = Some(aggregate(&v, tiers));
    }
    Ok(report)
}

/// Deterministic Walker-delta snapshot parameters for calibration runs.
#[derive(Debug, Clone, Copy)]
pub struct WalkerConfig {
    pub planes: usize,
    pub sats_per_plane: usize,
    pub inclination_rad: f64,
    pub altitude_m: f64,
    pub phasing: usize,
}

impl Default for WalkerConfig {
    fn default() -> Self {
        WalkerConfig {
            planes: 22,
            sats_per_plane: 72,
            inclination_rad: 53f64.to_radians(),
            altitude_m: 550_000.0,
            phasing: 1,
        }
    }
}

/// Calibration variant: replaces Poisson sampling with the deterministic
/// Walker snapshot viewed from a uniformly random direction each trial
/// (equivalently, a uniform random rotation of the constellation), using the
/// first tier's radio parameters at the Walker altitude.
pub fn estimate_walker(
    config: &McConfig,
    scenario: &Scenario,
    walker: &WalkerConfig,
) -> Result<McReport> {
    scenario.validate()?;
    let base = &scenario.tiers[0];
    let geometry = crate::geometry::TierGeometry::new(
        walker.altitude_m,
        base.geometry.phi_m_beam,
        base.geometry.phi_d,
        EARTH_RADIUS_M,
    )?;
    let total = (walker.planes * walker.sats_per_plane) as f64;
    let tier = TierConfig::new(
        geometry,
        TierSize::Count(total),
        base.power_w,
        base.gain_main,
        base.gain_side,
        base.velocity_m_s,
        base.gamma_th,
        base.t_th_s,
        base.delay_bound_s,
    )?;
    let mut walker_scenario = scenario.clone();
    walker_scenario.tiers = vec![tier];

    let positions = walker_delta(
        walker.planes,
        walker.sats_per_plane,
        walker.inclination_rad,
        walker.altitude_m,
        walker.phasing,
        EARTH_RADIUS_M,
    );
    let r_s = geometry.orbit_radius;

    let gain = GainSampler::new(scenario.channel.chi(), scenario.channel.beta())?;
    let outcomes: Vec<TrialOutcome> = (0..config.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(trial);
            // random user direction: cos(polar) uniform, azimuth uniform
            let cos_u: f64 = rng.random::<f64>() * 2.0 - 1.0;
            let sin_u = (1.0 - cos_u * cos_u).sqrt();
            let az: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            let dir = [sin_u * az.cos(), sin_u * az.sin(), cos_u];

            let mut real = SatelliteRealization::default();
            let mut visible = 0usize;
            for p in &positions {
                let cos_polar = (p[0] * dir[0] + p[1] * dir[1] + p[2] * dir[2]) / r_s;
                let distance = (r_s * r_s + EARTH_RADIUS_M * EARTH_RADIUS_M
                    - 2.0 * r_s * EARTH_RADIUS_M * cos_polar)
                    .sqrt();
                let lobe = crate::constellation::classify_lobe(distance, &geometry);
                let fading = match lobe {
                    LobeClass::Invisible => None,
                    _ => {
                        visible += 1;
                        Some(gain.sample(&mut rng))
                    }
                };
                real.sats.push(SatRecord {
                    tier: 0,
                    distance,
                    earth_angle: cos_polar.clamp(-1.0, 1.0).acos(),
                    lobe,
                    fading,
                });
            }
            real.visible_counts.push(visible);
            let thetas: Vec<f64> = (0..config.theta_samples.max(1))
                .map(|_| rng.random::<f64>() * std::f64::consts::PI)
                .collect();
            evaluate_realization(&real, &walker_scenario, &thetas)
        })
        .collect();

    let mut report = McReport { trials: config.trials, ..Default::default() };
    let near: Vec<PolicyOutcome> = outcomes.iter().map(|o| o.nearest).collect();
    let max: Vec<PolicyOutcome> = outcomes.iter().map(|o| o.maxsinr).collect();
    report.nearest = Some(aggregate(&near, 1));
    report.maxsinr = Some(aggregate(&max, 1));
    Ok(report)
}
