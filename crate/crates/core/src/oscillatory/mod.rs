//! Bessel kernels, smooth weights, and oscillatory integrals.

mod bessel;
mod integral;
mod quadrature;
mod window;

pub use bessel::{bessel_j, MAX_BESSEL_ORDER};
pub use integral::{
    decay_case, decay_scan, integral_i, integral_i_on, modulus_for_multiplier, poisson_length,
    transition_cutoff, trivial_bound_ratio, Cutoff, CutoffMode, DyadicScale, IntegralParams,
    INTEGRAL_TOLERANCE, NEGLIGIBLE, NEGLIGIBLE_FROM, TRIVIAL_BOUND_CEILING,
};
pub use quadrature::{gauss_legendre, integrate, QuadratureResult, GAUSS_ORDER};
pub use window::WindowFunction;
