//! Special functions used by the kernels: Bessel functions of real order,
//! Gamma, the normal distribution and the generalized exponential integral.

mod bessel;
mod expint;
mod gamma;
mod logspace;
mod normal;

pub use bessel::{
    bessel_i, bessel_i_scaled, bessel_j, bessel_k, bessel_k_scaled, bessel_y, ln_bessel_i,
    ln_bessel_k,
};
pub use expint::expint_complex;
pub use gamma::{gamma_fn, ln_gamma};
pub use logspace::{ln_add_exp, ln_sub_exp};
pub use normal::{
    ln_normal_interval, ln_normal_sf, normal_cdf, normal_interval, normal_inv_cdf, normal_pdf,
};

pub(crate) use bessel::ik_scaled;
