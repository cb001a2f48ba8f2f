//! Shared numerical machinery: special functions, adaptive quadrature and
//! the two-variable Fourier inversion used by the max-SINR coverage
//! computation.

mod inc_gamma;
mod inversion;
mod quad;

pub use inc_gamma::{lower_incomplete_gamma, lower_incomplete_gamma_diff_real, lower_incomplete_gamma_real};
pub use inversion::{auto_truncation, fourier_inversion_cp, InversionResult, TruncationChoice};
pub use quad::{
    adaptive_quad, adaptive_quad_complex, gauss_legendre_16, gl16_geometric, QuadResult,
    QuadratureSpec,
};
