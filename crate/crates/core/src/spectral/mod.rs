//! Periodic grid, transforms, spectral calculus and multiplier-defined norms.

pub(crate) mod fft;
mod field;
mod grid;
mod norms;

pub use field::{
    apply_multiplier, dealiased_product, forward_samples, forward_transform, inverse_transform,
    spectral_derivative, RealField, SpectralField,
};
pub(crate) use field::{
    analyze_onto, analyze_pair, check_grids, padded_dims, synthesize_on, synthesize_pair,
};
pub use grid::{Axis, Grid, Wavevector};
pub(crate) use norms::lp_norm_samples;
pub use norms::{
    alpha, aniso_weight_sq, horizontal_axis_fraction, htheta_r_norm, iso_weight_sq, lp_norm,
    sobolev_aniso_norm, sobolev_iso_norm, sobolev_iso_norm_vec, validate_htheta_r, AlphaR,
};

/// `(2π)^{3/2}`: ratio between the grid `L²` norm and the coefficient
/// `ℓ²` norm of a field.
pub const L2_COEFF_FACTOR: f64 = 15.749_609_945_722_419;

#[cfg(test)]
mod tests {
    #[test]
    fn parseval_factor() {
        let want = (2.0 * std::f64::consts::PI).powf(1.5);
        assert!((super::L2_COEFF_FACTOR - want).abs() < 1e-14 * want);
    }
}
