//! Full system description: tiers plus channel, noise and numerics settings,
//! with decibel/kilometer conversions kept at this boundary so that all
//! internal arithmetic stays linear and SI.

use crate::channel::ChannelParams;
use crate::constellation::{TierConfig, TierSize};
use crate::geometry::TierGeometry;
use crate::numerics::QuadratureSpec;
use crate::{Error, Result, EARTH_RADIUS_M};

/// Standard gravitational parameter of the Earth (m³/s²), used only to
/// sanity-check configured orbital speeds.
const EARTH_MU: f64 = 3.986_004_418e14;

/// Converts a decibel quantity (dB, dBW, dBi) to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear quantity to decibels.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// A complete scenario: what to analyze and how hard to integrate.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub tiers: Vec<TierConfig>,
    pub channel: ChannelParams,
    pub quad: QuadratureSpec,
    /// Explicit (Ω_max, Y_max) override for the max-SINR inversion; when
    /// absent the limits are chosen by scanning the integrand envelope.
    pub inversion_truncation: Option<(f64, f64)>,
}

/// Everything needed to declare one tier, in config-file units.
#[derive(Debug, Clone, Copy)]
pub struct TierSpec {
    pub altitude_km: f64,
    pub size: TierSize,
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

impl Scenario {
    pub fn from_tier_specs(
        tiers: &[TierSpec],
        channel: ChannelParams,
        quad: QuadratureSpec,
    ) -> Result<Self> {
        if tiers.is_empty() {
            return Err(Error::InvalidScenario("a scenario needs at least one tier".into()));
        }
        let tiers = tiers
            .iter()
            .map(|t| {
                let geometry = TierGeometry::new(
                    t.altitude_km * 1000.0,
                    t.beam_angle_rad,
                    t.dome_angle_rad,
                    EARTH_RADIUS_M,
                )?;
                TierConfig::new(
                    geometry,
                    t.size,
                    db_to_linear(t.power_dbw),
                    db_to_linear(t.gain_main_dbi),
                    db_to_linear(t.gain_side_dbi),
                    t.velocity_m_s,
                    db_to_linear(t.gamma_th_db),
                    t.t_th_s,
                    t.delay_bound_s,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Scenario { tiers, channel, quad, inversion_truncation: None })
    }

    /// Validates cross-tier consistency and returns human-readable warnings
    /// for configurations that are legal but suspicious.
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.tiers.is_empty() {
            return Err(Error::InvalidScenario("a scenario needs at least one tier".into()));
        }
        self.quad.validate()?;
        let mut warnings = Vec::new();
        for (i, tier) in self.tiers.iter().enumerate() {
            let kepler = (EARTH_MU / tier.geometry.orbit_radius).sqrt();
            let rel = (tier.velocity_m_s - kepler).abs() / kepler;
            if rel > 0.01 {
                let msg = format!(
                    "tier {}: configured speed {:.1} m/s differs from the Keplerian {:.1} m/s by {:.1}%",
                    i + 1,
                    tier.velocity_m_s,
                    kepler,
                    rel * 100.0
                );
                log::warn!("{msg}");
                warnings.push(msg);
            }
        }
        let first = self.tiers[0].gamma_th;
        if self.tiers.iter().any(|t| (t.gamma_th - first).abs() > 1e-12 * first.abs()) {
            let msg = "heterogeneous SINR thresholds: the max-SINR inversion kernel uses max(delta_th) \
                       while per-tier factors keep their own delta_th"
                .to_string();
            log::warn!("{msg}");
            warnings.push(msg);
        }
        Ok(warnings)
    }

    /// Largest `δ_th = (1+γ_th)/γ_th` across the tiers.
    pub fn delta_max(&self) -> f64 {
        self.tiers
            .iter()
            .map(|t| (1.0 + t.gamma_th) / t.gamma_th)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Replaces every tier's SINR threshold (dB).
    pub fn with_gamma_db(mut self, gamma_db: f64) -> Self {
        for t in &mut self.tiers {
            t.gamma_th = db_to_linear(gamma_db);
        }
        self
    }

    /// Replaces every tier's handover time threshold (s).
    pub fn with_t_th(mut self, t_th_s: f64) -> Self {
        for t in &mut self.tiers {
            t.t_th_s = t_th_s;
        }
        self
    }

    /// Replaces every tier's dome contact angle (rad), recomputing geometry.
    pub fn with_dome_angle(mut self, phi_d: f64) -> Self {
        for t in &mut self.tiers {
            t.geometry.phi_d = phi_d;
        }
        self
    }

    /// Replaces every tier's delay bound (s).
    pub fn with_delay_bound(mut self, t_d_s: f64) -> Self {
        for t in &mut self.tiers {
            t.delay_bound_s = t_d_s;
        }
        self
    }

    /// The default three-tier benchmark configuration.
    pub fn table2() -> Self {
        Self::table2_tiers(3)
    }

    /// The first `k` tiers of the benchmark configuration (1 ≤ k ≤ 3).
    pub fn table2_tiers(k: usize) -> Self {
        assert!((1..=3).contains(&k), "benchmark scenario has tiers 1..=3");
        let specs = [
            TierSpec {
                altitude_km: 600.0,
                size: TierSize::Count(100.0),
                power_dbw: 10.0,
                gain_main_dbi: 47.0,
                gain_side_dbi: 20.0,
                velocity_m_s: 7599.7,
                gamma_th_db: -5.0,
                t_th_s: 30.0,
                delay_bound_s: 0.010,
                dome_angle_rad: 0.1,
                beam_angle_rad: 0.01,
            },
            TierSpec {
                altitude_km: 900.0,
                size: TierSize::Count(100.0),
                power_dbw: 15.0,
                gain_main_dbi: 47.0,
                gain_side_dbi: 20.0,
                velocity_m_s: 7588.7,
                gamma_th_db: -5.0,
                t_th_s: 30.0,
                delay_bound_s: 0.010,
                dome_angle_rad: 0.1,
                beam_angle_rad: 0.01,
            },
            TierSpec {
                altitude_km: 1200.0,
                size: TierSize::Count(100.0),
                power_dbw: 30.0,
                gain_main_dbi: 47.0,
                gain_side_dbi: 20.0,
                velocity_m_s: 7572.3,
                gamma_th_db: -5.0,
                t_th_s: 30.0,
                delay_bound_s: 0.010,
                dome_angle_rad: 0.1,
                beam_angle_rad: 0.01,
            },
        ];
        let channel = ChannelParams::new(2.0, 1.0, 1.0, 2.0, 1e-12).expect("valid benchmark channel");
        Self::from_tier_specs(&specs[..k], channel, QuadratureSpec::default())
            .expect("benchmark scenario is valid")
    }
}
