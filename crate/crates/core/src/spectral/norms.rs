use super::field::{RealField, SpectralField};
use super::grid::Wavevector;
use crate::error::{check_open, Error, Result};

/// The exponent `r` of vorticity integrability together with
/// `alpha(r) = 1/r - 1/2`, which ties `L^r` to `Ḣ^{-3 alpha(r)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaR {
    r: f64,
    alpha: f64,
}

impl AlphaR {
    /// Accepts `r ∈ [3/2, 2]`.
    pub fn new(r: f64) -> Result<Self> {
        if (1.5..=2.0).contains(&r) {
            Ok(Self { r, alpha: alpha(r) })
        } else {
            Err(Error::OutOfRange { name: "r", value: r, interval: "[3/2, 2]".into() })
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// `alpha(r) = 1/r - 1/2`.
pub fn alpha(r: f64) -> f64 {
    1.0 / r - 0.5
}

/// Grid `L^p` norm `(Σ_x |f(x)|^p · cellvol)^{1/p}`; `p = ∞` gives `max |f|`.
pub fn lp_norm(f: &RealField, p: f64) -> Result<f64> {
    lp_norm_samples(f.samples(), f.grid().cell_volume(), p)
}

pub(crate) fn lp_norm_samples(samples: &[f64], cell_volume: f64, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::OutOfRange { name: "p", value: p, interval: "[1, +inf]".into() });
    }
    if p.is_infinite() {
        return Ok(samples.iter().fold(0.0, |m, x| m.max(x.abs())));
    }
    let sum: f64 = if p == 2.0 {
        samples.iter().map(|x| x * x).sum()
    } else if p == 1.0 {
        samples.iter().map(|x| x.abs()).sum()
    } else {
        samples.iter().map(|x| x.abs().powf(p)).sum()
    };
    Ok((sum * cell_volume).powf(1.0 / p))
}

/// `|t|^{2e}` with the homogeneous conventions: `None` when `t = 0` and
/// `e < 0` (the mode is excluded), `1` when `e = 0`.
#[inline]
fn power_weight(t: f64, e: f64) -> Option<f64> {
    if e == 0.0 {
        Some(1.0)
    } else if t == 0.0 {
        if e < 0.0 { None } else { Some(0.0) }
    } else {
        Some(t.powf(2.0 * e))
    }
}

/// Squared weight `|k_h|^{2s} |k3|^{2s'}`, or `None` for excluded modes.
#[inline]
pub fn aniso_weight_sq(k: Wavevector, s: f64, s_prime: f64) -> Option<f64> {
    Some(power_weight(k.horizontal_norm(), s)? * power_weight(k.vertical_norm(), s_prime)?)
}

/// Squared weight `|k|^{2s}`, or `None` for the excluded mean mode.
#[inline]
pub fn iso_weight_sq(k: Wavevector, s: f64) -> Option<f64> {
    power_weight(k.norm(), s)
}

fn check_mean(a: &SpectralField) -> Result<()> {
    let mean = a.mean().norm();
    let scale = a.energy().sqrt();
    if mean > 1e-12 * scale {
        Err(Error::NonzeroMean { mean })
    } else {
        Ok(())
    }
}

/// `‖a‖_{Ḣ^{s,s'}} = (Σ_k |k_h|^{2s} |k3|^{2s'} |c(k)|²)^{1/2}`.
///
/// Modes with `k_h = 0` are skipped when `s < 0` and modes with `k3 = 0` when
/// `s' < 0`. A negative exponent on a field with nonzero mean is an error.
pub fn sobolev_aniso_norm(a: &SpectralField, s: f64, s_prime: f64) -> Result<f64> {
    if s < 0.0 || s_prime < 0.0 {
        check_mean(a)?;
    }
    let grid = a.grid();
    let sum: f64 = a
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| aniso_weight_sq(grid.wavevector(i), s, s_prime).map(|w| w * c.norm_sqr()))
        .sum();
    Ok(sum.sqrt())
}

/// `‖a‖_{Ḣ^s} = (Σ_k |k|^{2s} |c(k)|²)^{1/2}`.
pub fn sobolev_iso_norm(a: &SpectralField, s: f64) -> Result<f64> {
    if s < 0.0 {
        check_mean(a)?;
    }
    let grid = a.grid();
    let sum: f64 = a
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| iso_weight_sq(grid.wavevector(i), s).map(|w| w * c.norm_sqr()))
        .sum();
    Ok(sum.sqrt())
}

/// Vector version: `(Σ_i ‖a_i‖²_{Ḣ^s})^{1/2}`.
pub fn sobolev_iso_norm_vec(components: &[SpectralField], s: f64) -> Result<f64> {
    let mut sum = 0.0;
    for c in components {
        sum += sobolev_iso_norm(c, s)?.powi(2);
    }
    Ok(sum.sqrt())
}

/// Checks `r ∈ [3/2, 2[` and `θ ∈ ]0, alpha(r)[`.
pub fn validate_htheta_r(theta: f64, r: f64) -> Result<AlphaR> {
    if !(1.5..2.0).contains(&r) {
        return Err(Error::OutOfRange { name: "r", value: r, interval: "[3/2, 2[".into() });
    }
    let ar = AlphaR::new(r)?;
    check_open("theta", theta, 0.0, ar.alpha())?;
    Ok(ar)
}

/// `‖a‖_{H^{θ,r}} = ‖a‖_{Ḣ^{-3 alpha(r) + θ, -θ}}`.
pub fn htheta_r_norm(a: &SpectralField, theta: f64, r: f64) -> Result<f64> {
    let ar = validate_htheta_r(theta, r)?;
    sobolev_aniso_norm(a, -3.0 * ar.alpha() + theta, -theta)
}

/// Fraction of the nonzero-mode energy of `a` on modes with `k_h = 0`.
pub fn horizontal_axis_fraction(a: &SpectralField) -> f64 {
    let grid = a.grid();
    let (mut axis, mut total) = (0.0, 0.0);
    for (i, c) in a.coeffs().iter().enumerate().skip(1) {
        let e = c.norm_sqr();
        total += e;
        if grid.wavevector(i).horizontal_norm_sq() == 0.0 {
            axis += e;
        }
    }
    if total == 0.0 { 0.0 } else { axis / total }
}
