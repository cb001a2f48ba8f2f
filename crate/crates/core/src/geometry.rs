//! Spherical geometry of a tiered constellation as seen from a ground user:
//! visibility limits, main-lobe contact angle and reach, dome-region arcs,
//! and distance/angle conversions.
//!
//! All lengths are meters and all angles radians. The typical user sits at
//! `(0, 0, R_E)`; satellites of a tier live on a sphere of radius
//! `R_S = R_E + h`.

use crate::{Error, Result};

/// Geometry of one orbital tier, with every derived length precomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierGeometry {
    /// Altitude above the Earth surface, `h` (m).
    pub altitude: f64,
    /// Orbital sphere radius `R_S = R_E + h` (m).
    pub orbit_radius: f64,
    /// Maximum slant distance at which a satellite is visible (m).
    pub r_max: f64,
    /// Antenna main-lobe beam angle (rad).
    pub phi_m_beam: f64,
    /// Earth-centered main-lobe contact angle (rad).
    pub phi_m_contact: f64,
    /// Maximum slant distance reachable by the main lobe (m).
    pub r_m: f64,
    /// Earth-centered contact angle of the dome region (rad).
    pub phi_d: f64,
}

impl TierGeometry {
    /// Builds the tier geometry from altitude, beam angle and dome angle.
    pub fn new(altitude: f64, phi_m_beam: f64, phi_d: f64, earth_radius: f64) -> Result<Self> {
        if !(altitude > 0.0) {
            return Err(Error::domain("TierGeometry", format!("altitude must be > 0, got {altitude}")));
        }
        if !(0.0..std::f64::consts::PI).contains(&phi_m_beam) {
            return Err(Error::domain("TierGeometry", format!("beam angle must lie in [0, pi), got {phi_m_beam}")));
        }
        if !(phi_d > 0.0) {
            return Err(Error::domain("TierGeometry", format!("dome angle must be > 0, got {phi_d}")));
        }
        let orbit_radius = earth_radius + altitude;
        let phi_m_contact = main_lobe_contact_angle(phi_m_beam, orbit_radius, earth_radius)?;
        Self::from_contact_angle(altitude, phi_m_beam, phi_m_contact, phi_d, earth_radius)
    }

    /// Builds the tier geometry from an already-known main-lobe contact angle.
    pub fn from_contact_angle(
        altitude: f64,
        phi_m_beam: f64,
        phi_m_contact: f64,
        phi_d: f64,
        earth_radius: f64,
    ) -> Result<Self> {
        let orbit_radius = earth_radius + altitude;
        let r_max = max_visible_distance(orbit_radius, earth_radius)?;
        let r_m = main_lobe_reach(phi_m_contact, orbit_radius, earth_radius);
        Ok(TierGeometry {
            altitude,
            orbit_radius,
            r_max,
            phi_m_beam,
            phi_m_contact,
            r_m,
            phi_d,
        })
    }

    /// Earth-centered angle of a satellite at slant distance `r` from the user.
    pub fn earth_angle(&self, r: f64, earth_radius: f64) -> Result<f64> {
        distance_to_earth_angle(r, self.orbit_radius, earth_radius)
    }

    /// Slant distance of a satellite at Earth-centered angle `phi` (law of cosines).
    pub fn slant_distance(&self, phi: f64, earth_radius: f64) -> f64 {
        slant_distance(phi, self.orbit_radius, earth_radius)
    }
}

/// Maximum slant distance at which a satellite on the sphere of radius `r_s`
/// is above the horizon of a user on the sphere of radius `r_e`.
pub fn max_visible_distance(r_s: f64, r_e: f64) -> Result<f64> {
    if !(r_s > r_e && r_e > 0.0) {
        return Err(Error::domain(
            "max_visible_distance",
            format!("requires R_S > R_E > 0, got R_S={r_s}, R_E={r_e}"),
        ));
    }
    Ok((r_s * r_s - r_e * r_e).sqrt())
}

/// Earth-centered contact angle subtended by a satellite main lobe of beam
/// angle `phi_m_beam`.
pub fn main_lobe_contact_angle(phi_m_beam: f64, r_s: f64, r_e: f64) -> Result<f64> {
    if !(0.0..std::f64::consts::PI).contains(&phi_m_beam) {
        return Err(Error::domain(
            "main_lobe_contact_angle",
            format!("beam angle must lie in [0, pi), got {phi_m_beam}"),
        ));
    }
    let arg = (r_s / r_e) * (phi_m_beam / 2.0).sin();
    if arg > 1.0 {
        return Err(Error::domain(
            "main_lobe_contact_angle",
            format!("beam wider than the visible horizon (arcsin argument {arg} > 1)"),
        ));
    }
    Ok(arg.asin() - phi_m_beam / 2.0)
}

/// Maximum slant distance reachable by a main lobe of Earth-centered contact
/// angle `phi_m_contact`. The result is clamped into `[h, r_max]` to absorb
/// round-off at the endpoints.
pub fn main_lobe_reach(phi_m_contact: f64, r_s: f64, r_e: f64) -> f64 {
    let h = r_s - r_e;
    let r_max = (r_s * r_s - r_e * r_e).sqrt();
    slant_distance(phi_m_contact, r_s, r_e).clamp(h, r_max)
}

/// Slant distance between the user and a satellite at Earth-centered angle `phi`.
pub fn slant_distance(phi: f64, r_s: f64, r_e: f64) -> f64 {
    (r_s * r_s + r_e * r_e - 2.0 * r_s * r_e * phi.cos()).sqrt()
}

/// Earth-centered angle of a satellite at slant distance `r` from the user.
pub fn distance_to_earth_angle(r: f64, r_s: f64, r_e: f64) -> Result<f64> {
    let h = r_s - r_e;
    let r_max = (r_s * r_s - r_e * r_e).sqrt();
    // Allow a whisker of round-off at both ends of the visibility window.
    if r < h * (1.0 - 1e-12) || r > r_max * (1.0 + 1e-12) {
        return Err(Error::domain(
            "distance_to_earth_angle",
            format!("slant distance {r} outside the visible window [{h}, {r_max}]"),
        ));
    }
    let cos_phi = ((r_s * r_s + r_e * r_e - r * r) / (2.0 * r_e * r_s)).clamp(-1.0, 1.0);
    Ok(cos_phi.acos())
}
