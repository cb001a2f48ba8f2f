//! Analysis engine and Monte Carlo simulator for K-tier heterogeneous LEO
//! satellite downlink networks.
//!
//! The library evaluates, for a typical ground user served under either a
//! nearest-satellite or a max-SINR association policy:
//!
//! - coverage probability (CP),
//! - non-handover probability (NHP),
//! - delay-outage probability (DOP),
//! - a weighted metric (WM) combining the three,
//!
//! both in closed/semi-analytic form ([`analytics_nearest`], [`analytics_maxsinr`])
//! and by repeated constellation simulation ([`montecarlo`]), so that every
//! analytical expression can be validated against an independent oracle.

pub mod analytics_maxsinr;
pub mod analytics_nearest;
pub mod channel;
pub mod constellation;
pub mod geometry;
pub mod metrics;
pub mod montecarlo;
pub mod numerics;
pub mod scenario;

mod error;

pub use error::Error;

/// Mean Earth radius in meters, used for every altitude-derived quantity.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Speed of light in m/s (propagation-delay conversions).
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
