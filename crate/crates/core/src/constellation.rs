//! Constellation sampling and motion geometry: homogeneous spherical Poisson
//! point processes per tier, main/side-lobe classification relative to the
//! typical user, a deterministic Walker-delta snapshot for calibration runs,
//! and the dome exit-time model.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::channel::GainSampler;
use crate::geometry::TierGeometry;
use crate::{Error, Result};

/// Per-tier constellation and radio parameters (all linear units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierConfig {
    pub geometry: TierGeometry,
    /// Satellite density (satellites per m² of the orbital sphere).
    pub density: f64,
    /// Mean satellite count over the whole sphere, `λ·4π R_S²`.
    pub expected_count: f64,
    /// Transmit power (W).
    pub power_w: f64,
    /// Main-lobe antenna gain (linear).
    pub gain_main: f64,
    /// Side-lobe antenna gain (linear).
    pub gain_side: f64,
    /// Orbital speed (m/s).
    pub velocity_m_s: f64,
    /// SINR threshold (linear).
    pub gamma_th: f64,
    /// Handover time threshold (s).
    pub t_th_s: f64,
    /// Propagation-delay threshold (s).
    pub delay_bound_s: f64,
}

/// Exactly one of the two ways to size a tier.
#[derive(Debug, Clone, Copy)]
pub enum TierSize {
    Density(f64),
    Count(f64),
}

impl TierConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        geometry: TierGeometry,
        size: TierSize,
        power_w: f64,
        gain_main: f64,
        gain_side: f64,
        velocity_m_s: f64,
        gamma_th: f64,
        t_th_s: f64,
        delay_bound_s: f64,
    ) -> Result<Self> {
        let sphere_area = 4.0 * std::f64::consts::PI * geometry.orbit_radius * geometry.orbit_radius;
        let (density, expected_count) = match size {
            TierSize::Density(lambda) if lambda > 0.0 => (lambda, lambda * sphere_area),
            TierSize::Count(n) if n > 0.0 => (n / sphere_area, n),
            _ => {
                return Err(Error::domain("TierConfig", "tier size must be a positive density or count"));
            }
        };
        if !(gain_main >= gain_side && gain_side > 0.0) {
            return Err(Error::domain(
                "TierConfig",
                format!("need G_ml >= G_sl > 0 (linear); got {gain_main}, {gain_side}"),
            ));
        }
        if !(power_w > 0.0 && velocity_m_s > 0.0) {
            return Err(Error::domain("TierConfig", "power and velocity must be positive"));
        }
        if !(gamma_th > 0.0) {
            return Err(Error::domain("TierConfig", format!("SINR threshold must be positive (linear); got {gamma_th}")));
        }
        if !(t_th_s >= 0.0 && delay_bound_s > 0.0) {
            return Err(Error::domain("TierConfig", "time thresholds must be nonnegative (t_th) / positive (T_D)"));
        }
        Ok(TierConfig {
            geometry,
            density,
            expected_count,
            power_w,
            gain_main,
            gain_side,
            velocity_m_s,
            gamma_th,
            t_th_s,
            delay_bound_s,
        })
    }
}

/// Which antenna lobe of a satellite points at the typical user.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LobeClass {
    Main,
    Side,
    Invisible,
}

/// One sampled satellite relative to the typical user.
#[derive(Debug, Clone, Copy)]
pub struct SatRecord {
    pub tier: usize,
    /// Slant distance to the user (m).
    pub distance: f64,
    /// Earth-centered angle of the satellite (rad).
    pub earth_angle: f64,
    pub lobe: LobeClass,
    /// Channel power gain; drawn only for visible satellites.
    pub fading: Option<f64>,
}

/// One constellation snapshot across all tiers.
#[derive(Debug, Clone, Default)]
pub struct SatelliteRealization {
    pub sats: Vec<SatRecord>,
    /// Number of visible satellites per tier.
    pub visible_counts: Vec<usize>,
}

/// Classifies a slant distance into the tier's lobe bands.
pub fn classify_lobe(distance: f64, geometry: &TierGeometry) -> LobeClass {
    if distance > geometry.r_max {
        LobeClass::Invisible
    } else if distance <= geometry.r_m {
        LobeClass::Main
    } else {
        LobeClass::Side
    }
}

/// Samples one tier of the constellation: a Poisson number of satellites
/// placed uniformly on the orbital sphere, with distances, Earth-centered
/// angles and lobe classes taken relative to the typical user at the pole.
/// Fading is drawn per visible satellite.
pub fn sample_tier<R: Rng + ?Sized>(
    rng: &mut R,
    tier_index: usize,
    tier: &TierConfig,
    gain: &GainSampler,
    earth_radius: f64,
) -> Vec<SatRecord> {
    let poisson = Poisson::new(tier.expected_count).expect("positive mean");
    let count = poisson.sample(rng) as usize;
    let r_s = tier.geometry.orbit_radius;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let cos_polar: f64 = rng.random::<f64>() * 2.0 - 1.0;
        let distance = (r_s * r_s + earth_radius * earth_radius - 2.0 * r_s * earth_radius * cos_polar).sqrt();
        let lobe = classify_lobe(distance, &tier.geometry);
        let fading = match lobe {
            LobeClass::Invisible => None,
            _ => Some(gain.sample(rng)),
        };
        out.push(SatRecord {
            tier: tier_index,
            distance,
            earth_angle: cos_polar.clamp(-1.0, 1.0).acos(),
            lobe,
            fading,
        });
    }
    out
}

/// Void-probability exponent of the spherical cap of satellites closer than
/// `r`: `λ π (R_S/R_E)(r² − h²)`.
pub fn visible_fraction_cap_area(r: f64, tier: &TierConfig, earth_radius: f64) -> Result<f64> {
    let g = &tier.geometry;
    if r < g.altitude * (1.0 - 1e-12) || r > g.r_max * (1.0 + 1e-12) {
        return Err(Error::domain(
            "visible_fraction_cap_area",
            format!("distance {r} outside [{}, {}]", g.altitude, g.r_max),
        ));
    }
    Ok(tier.density * std::f64::consts::PI * (g.orbit_radius / earth_radius) * (r * r - g.altitude * g.altitude))
}

/// Deterministic Walker-delta constellation snapshot: `planes` circular
/// orbits with RAAN spread over 2π, `sats_per_plane` satellites per plane,
/// and the usual inter-plane phasing offset. Returns Cartesian positions (m).
pub fn walker_delta(
    planes: usize,
    sats_per_plane: usize,
    inclination: f64,
    altitude: f64,
    phasing: usize,
    earth_radius: f64,
) -> Vec<[f64; 3]> {
    use std::f64::consts::TAU;
    let total = planes * sats_per_plane;
    let radius = earth_radius + altitude;
    let (sin_i, cos_i) = inclination.sin_cos();
    let mut out = Vec::with_capacity(total);
    for p in 0..planes {
        let raan = TAU * p as f64 / planes as f64;
        let (sin_raan, cos_raan) = raan.sin_cos();
        let phase = TAU * phasing as f64 * p as f64 / total as f64;
        for s in 0..sats_per_plane {
            let u = TAU * s as f64 / sats_per_plane as f64 + phase;
            let (sin_u, cos_u) = u.sin_cos();
            // position in the orbital plane, then rotate by inclination (x-axis)
            // and RAAN (z-axis)
            let x_orb = radius * cos_u;
            let y_orb = radius * sin_u;
            let x1 = x_orb;
            let y1 = y_orb * cos_i;
            let z1 = y_orb * sin_i;
            out.push([
                x1 * cos_raan - y1 * sin_raan,
                x1 * sin_raan + y1 * cos_raan,
                z1,
            ]);
        }
    }
    out
}

/// Great-circle angle from a satellite at Earth-centered angle `phi_e` to the
/// dome-boundary point whose longitude relative to the satellite's meridian
/// is `theta`. Defined for any `phi_e`, inside or outside the dome.
pub fn dome_boundary_arc_angle(phi_e: f64, phi_d: f64, theta: f64) -> f64 {
    let c = phi_e.sin() * phi_d.sin() * theta.abs().cos() + phi_e.cos() * phi_d.cos();
    c.clamp(-1.0, 1.0).acos()
}

/// Time for a satellite inside the dome (`φ_E ≤ φ_D`) at slant distance `r`
/// to reach the dome boundary along departure longitude `theta`.
pub fn exit_time(r: f64, theta: f64, tier: &TierConfig, earth_radius: f64) -> Result<f64> {
    let g = &tier.geometry;
    let phi_e = g.earth_angle(r, earth_radius)?;
    if phi_e > g.phi_d * (1.0 + 1e-12) {
        return Err(Error::domain(
            "exit_time",
            format!("satellite at earth angle {phi_e} already outside the dome (phi_d = {})", g.phi_d),
        ));
    }
    let arc = dome_boundary_arc_angle(phi_e, g.phi_d, theta);
    Ok(g.orbit_radius * arc / tier.velocity_m_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::derive_gamma_params;
    use crate::geometry::slant_distance;
    use crate::EARTH_RADIUS_M;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const KM: f64 = 1_000.0;

    fn tier1() -> TierConfig {
        let g = TierGeometry::new(600.0 * KM, 0.01, 0.1, EARTH_RADIUS_M).unwrap();
        TierConfig::new(
            g,
            TierSize::Count(100.0),
            10.0,
            10f64.powf(4.7),
            10f64.powf(2.0),
            7599.7,
            10f64.powf(-0.5),
            30.0,
            0.010,
        )
        .unwrap()
    }

    fn sampler() -> GainSampler {
        let (chi, beta) = derive_gamma_params(2.0, 1.0, 1.0);
        GainSampler::new(chi, beta).unwrap()
    }

    #[test]
    fn density_count_conversion_is_consistent() {
        let t = tier1();
        let area = 4.0 * std::f64::consts::PI * t.geometry.orbit_radius.powi(2);
        assert_relative_eq!(t.density * area, 100.0, max_relative = 1e-12);
        let by_density = TierConfig::new(
            t.geometry,
            TierSize::Density(t.density),
            10.0,
            t.gain_main,
            t.gain_side,
            t.velocity_m_s,
            t.gamma_th,
            30.0,
            0.010,
        )
        .unwrap();
        assert_relative_eq!(by_density.expected_count, 100.0, max_relative = 1e-12);
    }

    #[test]
    fn poisson_count_mean() {
        let t = tier1();
        let g = sampler();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let n = 10_000usize;
        let mean = (0..n)
            .map(|_| sample_tier(&mut rng, 0, &t, &g, EARTH_RADIUS_M).len())
            .sum::<usize>() as f64
            / n as f64;
        assert!((mean - 100.0).abs() < 1.0, "mean count {mean}");
    }

    #[test]
    fn visibility_probability_matches_cap_area_identity() {
        let t = tier1();
        let g = sampler();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000usize;
        let with_visible = (0..n)
            .filter(|_| {
                sample_tier(&mut rng, 0, &t, &g, EARTH_RADIUS_M)
                    .iter()
                    .any(|s| s.lobe != LobeClass::Invisible)
            })
            .count();
        let frac = with_visible as f64 / n as f64;
        let exponent = visible_fraction_cap_area(t.geometry.r_max, &t, EARTH_RADIUS_M).unwrap();
        let analytic = 1.0 - (-exponent).exp();
        assert!((frac - analytic).abs() < 0.005, "mc {frac} vs analytic {analytic}");
    }

    #[test]
    fn void_probability_within_1000km_matches_monte_carlo() {
        let t = tier1();
        let g = sampler();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 100_000usize;
        let r_probe = 1000.0 * KM;
        let empty = (0..n)
            .filter(|_| {
                !sample_tier(&mut rng, 0, &t, &g, EARTH_RADIUS_M)
                    .iter()
                    .any(|s| s.distance <= r_probe)
            })
            .count();
        let frac = empty as f64 / n as f64;
        let analytic = (-visible_fraction_cap_area(r_probe, &t, EARTH_RADIUS_M).unwrap()).exp();
        assert!((frac - analytic).abs() < 0.005, "mc {frac} vs analytic {analytic}");
    }

    #[test]
    fn cap_area_domain_and_endpoints() {
        let t = tier1();
        assert_relative_eq!(
            visible_fraction_cap_area(t.geometry.altitude, &t, EARTH_RADIUS_M).unwrap(),
            0.0,
            epsilon = 1e-9
        );
        assert!(visible_fraction_cap_area(100.0 * KM, &t, EARTH_RADIUS_M).is_err());
        assert!(visible_fraction_cap_area(5000.0 * KM, &t, EARTH_RADIUS_M).is_err());
    }

    #[test]
    fn cos_polar_angle_is_uniform() {
        let t = tier1();
        let g = sampler();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut cosines: Vec<f64> = Vec::with_capacity(110_000);
        while cosines.len() < 100_000 {
            for s in sample_tier(&mut rng, 0, &t, &g, EARTH_RADIUS_M) {
                cosines.push(s.earth_angle.cos());
            }
        }
        cosines.truncate(100_000);
        cosines.sort_by(f64::total_cmp);
        let n = cosines.len() as f64;
        let mut ks: f64 = 0.0;
        for (i, &c) in cosines.iter().enumerate() {
            let u = (c + 1.0) / 2.0;
            ks = ks.max((u - (i as f64 + 1.0) / n).abs()).max((u - i as f64 / n).abs());
        }
        assert!(ks < 0.005, "KS distance {ks}");
    }

    #[test]
    fn lobe_partition_is_exhaustive_and_exclusive() {
        let t = tier1();
        let g = sampler();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..200 {
            for s in sample_tier(&mut rng, 0, &t, &g, EARTH_RADIUS_M) {
                let expected = if s.distance > t.geometry.r_max {
                    LobeClass::Invisible
                } else if s.distance <= t.geometry.r_m {
                    LobeClass::Main
                } else {
                    LobeClass::Side
                };
                assert_eq!(s.lobe, expected);
                // distance and angle stay consistent through the law of cosines
                let back = slant_distance(s.earth_angle, t.geometry.orbit_radius, EARTH_RADIUS_M);
                assert_relative_eq!(back, s.distance, max_relative = 1e-6);
                assert_eq!(s.fading.is_some(), s.lobe != LobeClass::Invisible);
            }
        }
    }

    #[test]
    fn walker_single_equatorial_satellite() {
        let pos = walker_delta(1, 1, 0.0, 550.0 * KM, 0, EARTH_RADIUS_M);
        assert_eq!(pos.len(), 1);
        let r = EARTH_RADIUS_M + 550.0 * KM;
        assert_relative_eq!(pos[0][0], r, max_relative = 1e-12);
        assert!(pos[0][1].abs() < 1e-6 && pos[0][2].abs() < 1e-6);
    }

    #[test]
    fn walker_starlink_like_shell() {
        let pos = walker_delta(22, 72, 53f64.to_radians(), 550.0 * KM, 1, EARTH_RADIUS_M);
        assert_eq!(pos.len(), 1584);
        let r = EARTH_RADIUS_M + 550.0 * KM;
        for p in &pos {
            let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            assert_relative_eq!(norm, r, max_relative = 1e-9);
        }
    }

    #[test]
    fn walker_polar_rotation_preserves_distances_to_pole() {
        let pos = walker_delta(6, 8, 1.1, 700.0 * KM, 2, EARTH_RADIUS_M);
        let user = [0.0, 0.0, EARTH_RADIUS_M];
        let dist = |p: &[f64; 3]| {
            ((p[0] - user[0]).powi(2) + (p[1] - user[1]).powi(2) + (p[2] - user[2]).powi(2)).sqrt()
        };
        let mut original: Vec<f64> = pos.iter().map(dist).collect();
        let psi = 0.7342f64;
        let (s, c) = psi.sin_cos();
        let mut rotated: Vec<f64> = pos
            .iter()
            .map(|p| dist(&[p[0] * c - p[1] * s, p[0] * s + p[1] * c, p[2]]))
            .collect();
        original.sort_by(f64::total_cmp);
        rotated.sort_by(f64::total_cmp);
        for (a, b) in original.iter().zip(&rotated) {
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
    }

    #[test]
    fn exit_time_from_dome_center() {
        let t = tier1();
        let r_center = t.geometry.altitude;
        for theta in [0.0, 0.4, 1.2, 3.0] {
            let got = exit_time(r_center, theta, &t, EARTH_RADIUS_M).unwrap();
            let expected = t.geometry.orbit_radius * t.geometry.phi_d / t.velocity_m_s;
            assert_relative_eq!(got, expected, max_relative = 1e-6);
        }
    }

    #[test]
    fn exit_time_zero_at_boundary_heading_out() {
        let t = tier1();
        let r_boundary = slant_distance(t.geometry.phi_d, t.geometry.orbit_radius, EARTH_RADIUS_M);
        let got = exit_time(r_boundary, 0.0, &t, EARTH_RADIUS_M).unwrap();
        assert!(got.abs() < 1e-3, "got {got}");
    }

    #[test]
    fn exit_time_rejects_satellite_outside_dome() {
        let t = tier1();
        let r_out = slant_distance(0.2, t.geometry.orbit_radius, EARTH_RADIUS_M);
        assert!(exit_time(r_out, 0.3, &t, EARTH_RADIUS_M).is_err());
    }

    /// Numerically propagate the satellite along the great circle toward the
    /// boundary point and accumulate arc length until it crosses the dome
    /// edge; this must agree with the closed-form arc.
    #[test]
    fn exit_time_matches_trajectory_propagation() {
        let t = tier1();
        let phi_e = 0.05f64;
        let theta = std::f64::consts::FRAC_PI_2;
        let phi_d = t.geometry.phi_d;
        let r = slant_distance(phi_e, t.geometry.orbit_radius, EARTH_RADIUS_M);

        let start = [phi_e.sin(), 0.0, phi_e.cos()];
        let target = [phi_d.sin() * theta.cos(), phi_d.sin() * theta.sin(), phi_d.cos()];
        let total = (start[0] * target[0] + start[1] * target[1] + start[2] * target[2])
            .clamp(-1.0, 1.0)
            .acos();
        // slerp along the great circle until colatitude reaches phi_d
        let n = 2_000_000usize;
        let mut crossing = total;
        for k in 0..=n {
            let f = k as f64 / n as f64;
            let a = ((1.0 - f) * total).sin() / total.sin();
            let b = (f * total).sin() / total.sin();
            let z = a * start[2] + b * target[2];
            if z.clamp(-1.0, 1.0).acos() >= phi_d - 1e-12 {
                crossing = f * total;
                break;
            }
        }
        let oracle = t.geometry.orbit_radius * crossing / t.velocity_m_s;
        let got = exit_time(r, theta, &t, EARTH_RADIUS_M).unwrap();
        assert_relative_eq!(got, oracle, max_relative = 1e-5);
    }

    #[test]
    fn exit_time_monotone_in_earth_angle_heading_out() {
        let t = tier1();
        let mut last = f64::INFINITY;
        for k in 0..30 {
            let phi_e = t.geometry.phi_d * k as f64 / 30.0;
            let r = slant_distance(phi_e, t.geometry.orbit_radius, EARTH_RADIUS_M);
            let e = exit_time(r, 0.0, &t, EARTH_RADIUS_M).unwrap();
            assert!(e <= last + 1e-12, "not monotone at phi_e {phi_e}");
            last = e;
        }
    }

    #[test]
    fn tier_config_validation() {
        let g = TierGeometry::new(600.0 * KM, 0.01, 0.1, EARTH_RADIUS_M).unwrap();
        assert!(TierConfig::new(g, TierSize::Count(0.0), 10.0, 2.0, 1.0, 7.5e3, 0.3, 1.0, 0.01).is_err());
        assert!(TierConfig::new(g, TierSize::Count(10.0), 10.0, 1.0, 2.0, 7.5e3, 0.3, 1.0, 0.01).is_err());
        assert!(TierConfig::new(g, TierSize::Count(10.0), -1.0, 2.0, 1.0, 7.5e3, 0.3, 1.0, 0.01).is_err());
    }
}
