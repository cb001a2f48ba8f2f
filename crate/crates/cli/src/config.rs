//! Declarative scenario files: parse, validate, and lower into the core
//! types. Decibel and kilometer units live only here.

use serde::Deserialize;

use hetsat::channel::ChannelParams;
use hetsat::constellation::TierSize;
use hetsat::montecarlo::{McConfig, MetricSelect, PolicyChoice, WalkerConfig};
use hetsat::numerics::QuadratureSpec;
use hetsat::scenario::{Scenario, TierSpec};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub channel: ChannelSection,
    pub tiers: Vec<TierSection>,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub mc: McSection,
    #[serde(default)]
    pub weights: WeightsSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub weight_scan: Option<WeightScanSection>,
    #[serde(default)]
    pub walker: Option<WalkerSection>,
    #[serde(default)]
    pub output: Option<OutputSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub m: f64,
    pub b0: f64,
    pub omega: f64,
    pub alpha: f64,
    pub noise_w: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TierSection {
    pub altitude_km: f64,
    #[serde(default)]
    pub count: Option<f64>,
    #[serde(default)]
    pub density_per_m2: Option<f64>,
    pub power_dbw: f64,
    pub gain_main_dbi: f64,
    pub gain_side_dbi: f64,
    pub velocity_m_s: f64,
    pub gamma_th_db: f64,
    pub t_th_s: f64,
    pub delay_bound_s: f64,
    pub dome_angle_rad: f64,
    pub beam_angle_rad: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_max_subdivisions")]
    pub max_subdivisions: usize,
    /// Explicit inversion truncation override (normalized units); both must
    /// be given together.
    #[serde(default)]
    pub omega_truncation: Option<f64>,
    #[serde(default)]
    pub y_truncation: Option<f64>,
}

fn default_abs_tol() -> f64 {
    1e-10
}
fn default_rel_tol() -> f64 {
    1e-8
}
fn default_max_subdivisions() -> usize {
    200
}

impl Default for NumericsSection {
    fn default() -> Self {
        NumericsSection {
            abs_tol: default_abs_tol(),
            rel_tol: default_rel_tol(),
            max_subdivisions: default_max_subdivisions(),
            omega_truncation: None,
            y_truncation: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_theta_samples")]
    pub theta_samples: usize,
}

fn default_trials() -> usize {
    100_000
}
fn default_seed() -> u64 {
    42
}
fn default_theta_samples() -> usize {
    16
}

impl Default for McSection {
    fn default() -> Self {
        McSection { trials: default_trials(), seed: default_seed(), theta_samples: default_theta_samples() }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSection {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
}

impl Default for WeightsSection {
    fn default() -> Self {
        WeightsSection { w1: 1.0 / 3.0, w2: 1.0 / 3.0, w3: 1.0 / 3.0 }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    #[serde(default)]
    pub log_scale: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightScanSection {
    #[serde(default = "default_grid_step")]
    pub grid_step: f64,
}

fn default_grid_step() -> f64 {
    0.05
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkerSection {
    pub planes: usize,
    pub sats_per_plane: usize,
    pub inclination_rad: f64,
    pub altitude_km: f64,
    #[serde(default)]
    pub phasing: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: String,
}

/// A parsed, validated scenario file lowered into core types.
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub mc: McConfig,
    pub weights: hetsat::metrics::WeightVector,
    pub sweep: Option<SweepSection>,
    pub grid_step: f64,
    pub walker: WalkerConfig,
    pub output_path: Option<String>,
    pub warnings: Vec<String>,
}

pub fn parse_scenario(text: &str) -> Result<ScenarioFile, String> {
    toml::from_str(text).map_err(|e| format!("scenario parse error: {e}"))
}

pub fn load_scenario(text: &str) -> Result<LoadedScenario, String> {
    let file = parse_scenario(text)?;

    let channel = ChannelParams::new(
        file.channel.m,
        file.channel.b0,
        file.channel.omega,
        file.channel.alpha,
        file.channel.noise_w,
    )
    .map_err(|e| format!("[channel]: {e}"))?;

    let mut specs = Vec::new();
    for (i, t) in file.tiers.iter().enumerate() {
        let size = match (t.count, t.density_per_m2) {
            (Some(n), None) => TierSize::Count(n),
            (None, Some(d)) => TierSize::Density(d),
            (Some(_), Some(_)) => {
                return Err(format!("[[tiers]] #{}: give either count or density_per_m2, not both", i + 1));
            }
            (None, None) => {
                return Err(format!("[[tiers]] #{}: one of count or density_per_m2 is required", i + 1));
            }
        };
        specs.push(TierSpec {
            altitude_km: t.altitude_km,
            size,
            power_dbw: t.power_dbw,
            gain_main_dbi: t.gain_main_dbi,
            gain_side_dbi: t.gain_side_dbi,
            velocity_m_s: t.velocity_m_s,
            gamma_th_db: t.gamma_th_db,
            t_th_s: t.t_th_s,
            delay_bound_s: t.delay_bound_s,
            dome_angle_rad: t.dome_angle_rad,
            beam_angle_rad: t.beam_angle_rad,
        });
    }

    let quad = QuadratureSpec {
        abs_tol: file.numerics.abs_tol,
        rel_tol: file.numerics.rel_tol,
        max_subdivisions: file.numerics.max_subdivisions,
        ..QuadratureSpec::default()
    };
    let mut scenario =
        Scenario::from_tier_specs(&specs, channel, quad).map_err(|e| format!("[[tiers]]: {e}"))?;
    scenario.inversion_truncation = match (file.numerics.omega_truncation, file.numerics.y_truncation) {
        (Some(o), Some(y)) if o > 0.0 && y > 0.0 => Some((o, y)),
        (None, None) => None,
        _ => {
            return Err("[numerics]: omega_truncation and y_truncation must be given together and positive".into());
        }
    };
    let warnings = scenario.validate().map_err(|e| format!("scenario validation: {e}"))?;

    let weights = hetsat::metrics::WeightVector::new(file.weights.w1, file.weights.w2, file.weights.w3)
        .map_err(|e| format!("[weights]: {e}"))?;

    if let Some(sweep) = &file.sweep {
        if sweep.steps < 1 {
            return Err("[sweep]: steps must be at least 1".into());
        }
        if sweep.log_scale && (sweep.start <= 0.0 || sweep.stop <= 0.0) {
            return Err("[sweep]: log_scale requires positive bounds".into());
        }
        validate_sweep_variable(&sweep.variable, scenario.tiers.len())?;
    }
    if let Some(ws) = &file.weight_scan {
        if !(ws.grid_step > 0.0 && ws.grid_step <= 1.0) {
            return Err("[weight_scan]: grid_step must lie in (0, 1]".into());
        }
    }

    let walker = match &file.walker {
        Some(w) => WalkerConfig {
            planes: w.planes,
            sats_per_plane: w.sats_per_plane,
            inclination_rad: w.inclination_rad,
            altitude_m: w.altitude_km * 1000.0,
            phasing: w.phasing,
        },
        None => WalkerConfig::default(),
    };

    Ok(LoadedScenario {
        scenario,
        mc: McConfig {
            trials: file.mc.trials.max(1),
            seed: file.mc.seed,
            policy: PolicyChoice::Both,
            metrics: MetricSelect::default(),
            theta_samples: file.mc.theta_samples.max(1),
        },
        weights,
        sweep: file.sweep,
        grid_step: file.weight_scan.map(|w| w.grid_step).unwrap_or_else(default_grid_step),
        walker,
        output_path: file.output.map(|o| o.path),
        warnings,
    })
}

/// The grid of sweep-variable values.
pub fn sweep_values(sweep: &SweepSection) -> Vec<f64> {
    if sweep.steps == 1 {
        return vec![sweep.start];
    }
    (0..sweep.steps)
        .map(|k| {
            let f = k as f64 / (sweep.steps - 1) as f64;
            if sweep.log_scale {
                sweep.start * (sweep.stop / sweep.start).powf(f)
            } else {
                sweep.start + (sweep.stop - sweep.start) * f
            }
        })
        .collect()
}

fn validate_sweep_variable(variable: &str, tiers: usize) -> Result<(), String> {
    match variable {
        "gamma_th_db" | "t_th_s" | "dome_angle_rad" | "delay_bound_s" => Ok(()),
        v => {
            if let Some(rest) = v.strip_prefix("tier") {
                let (idx, field) = rest
                    .split_once('.')
                    .ok_or_else(|| format!("[sweep]: malformed tier variable '{v}'"))?;
                let k: usize = idx.parse().map_err(|_| format!("[sweep]: bad tier index in '{v}'"))?;
                if k == 0 || k > tiers {
                    return Err(format!("[sweep]: tier index {k} out of range 1..={tiers}"));
                }
                match field {
                    "density_per_m2" | "power_dbw" => Ok(()),
                    other => Err(format!("[sweep]: unknown tier field '{other}' (density_per_m2 | power_dbw)")),
                }
            } else {
                Err(format!(
                    "[sweep]: unknown variable '{v}' (gamma_th_db | t_th_s | dome_angle_rad | delay_bound_s | tier<k>.density_per_m2 | tier<k>.power_dbw)"
                ))
            }
        }
    }
}

/// Applies a sweep-variable value to a fresh copy of the scenario.
pub fn apply_sweep_value(base: &Scenario, variable: &str, value: f64) -> Scenario {
    let mut s = base.clone();
    match variable {
        "gamma_th_db" => {
            return s.with_gamma_db(value);
        }
        "t_th_s" => return s.with_t_th(value),
        "dome_angle_rad" => return s.with_dome_angle(value),
        "delay_bound_s" => return s.with_delay_bound(value),
        v => {
            if let Some(rest) = v.strip_prefix("tier") {
                if let Some((idx, field)) = rest.split_once('.') {
                    let k: usize = idx.parse().expect("validated tier index");
                    let tier = &mut s.tiers[k - 1];
                    match field {
                        "density_per_m2" => {
                            let area =
                                4.0 * std::f64::consts::PI * tier.geometry.orbit_radius * tier.geometry.orbit_radius;
                            tier.density = value;
                            tier.expected_count = value * area;
                        }
                        "power_dbw" => {
                            tier.power_w = hetsat::scenario::db_to_linear(value);
                        }
                        _ => unreachable!("validated at load"),
                    }
                }
            }
        }
    }
    s
}
