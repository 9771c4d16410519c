//! Both sides of every catalogued inequality for one ensemble member.

use crate::error::{Error, Result};
use crate::flow::{signed_pow, signed_power_norms, vertical_vorticity};
use crate::littlewood_paley::{
    aniso_besov_norm, besov_norm, mixed_lp_norm, vertical_besov_lp_h, AnisoBesovSpec, BesovSpec,
};
use crate::spectral::{
    alpha, dealiased_product, forward_transform, htheta_r_norm, inverse_transform, lp_norm, lp_norm_samples,
    sobolev_aniso_norm, sobolev_iso_norm, sobolev_iso_norm_vec, spectral_derivative, Axis, SpectralField,
};

use super::ensemble::Member;
use super::{CaseId, CaseParams};

fn hypothesis(id: CaseId, detail: String) -> Error {
    Error::Hypothesis { lemma: id.lemma(), detail }
}

fn require(id: CaseId, ok: bool, detail: impl FnOnce() -> String) -> Result<()> {
    if ok { Ok(()) } else { Err(hypothesis(id, detail())) }
}

fn require_open(id: CaseId, name: &str, x: f64, lo: f64, hi: f64) -> Result<()> {
    require(id, x > lo && x < hi, || format!("{name} = {x} outside ]{lo}, {hi}["))
}

fn require_exponent(id: CaseId, name: &str, x: f64) -> Result<()> {
    require(id, x >= 1.0, || format!("{name} = {x} outside [1, +inf]"))
}

/// Checks the hypotheses of `id` on `params`. Returns whether the parameters
/// sit on a boundary the statement only admits for `q = 1`.
pub(super) fn validate(id: CaseId, params: &CaseParams) -> Result<bool> {
    let g = |k: &str| params.get(k);
    match id {
        CaseId::A | CaseId::K => require_open(id, "r", g("r"), 1.5, 2.0)?,
        CaseId::B => {
            let r = g("r");
            require_open(id, "r", r, 1.5, 2.0)?;
            let a = alpha(r);
            let s = g("s");
            require(id, s >= -3.0 * a && s <= 1.0 - a, || {
                format!("s = {s} outside [-3α(r), 1-α(r)] = [{}, {}]", -3.0 * a, 1.0 - a)
            })?;
        }
        CaseId::C => {
            require_open(id, "r", g("r"), 1.5, 2.0)?;
            require_open(id, "s", g("s"), 0.0, 1.0)?;
            require_exponent(id, "p", g("p"))?;
            require_exponent(id, "q", g("q"))?;
        }
        CaseId::D => {
            require(id, g("s") > 0.0, || format!("s = {} must be positive", g("s")))?;
            require_exponent(id, "q", g("q"))?;
            require(id, g("p") >= g("q"), || format!("p = {} must be at least q = {}", g("p"), g("q")))?;
        }
        CaseId::E => {
            let s = g("s");
            require(id, s > 0.0, || format!("s = {s} must be positive"))?;
            require_open(id, "theta", g("theta"), 0.0, s)?;
            require_exponent(id, "p", g("p"))?;
            require_exponent(id, "q", g("q"))?;
        }
        CaseId::F | CaseId::G => {
            let r = g("r");
            require_open(id, "r", r, 1.5, 2.0)?;
            require_open(id, "theta", g("theta"), 0.0, 3.0 * alpha(r))?;
            require_open(id, "beta", g("beta"), 0.0, 0.5)?;
        }
        CaseId::H => {
            let (p1, p2, q) = (g("p1"), g("p2"), g("q"));
            require_exponent(id, "q", q)?;
            require_exponent(id, "p2", p2)?;
            require(id, p1 >= p2, || format!("p1 = {p1} must be at least p2 = {p2}"))?;
            require(id, 1.0 / p1 + 1.0 / p2 <= 1.0, || format!("1/p1 + 1/p2 = {} exceeds 1", 1.0 / p1 + 1.0 / p2))?;
            let (s1, s2, t1, t2) = (g("s1"), g("s2"), g("sigma1"), g("sigma2"));
            let mut boundary = false;
            for (name, x, cap) in [("s1", s1, 2.0 / p1), ("s2", s2, 2.0 / p2), ("sigma1", t1, 1.0 / p1), ("sigma2", t2, 1.0 / p2)] {
                if x == cap && q == 1.0 {
                    boundary = true;
                } else {
                    require(id, x < cap, || format!("{name} = {x} must be below {cap} (or equal when q = 1)"))?;
                }
            }
            require(id, s1 + s2 > 0.0, || format!("s1 + s2 = {} must be positive", s1 + s2))?;
            require(id, t1 + t2 > 0.0, || format!("sigma1 + sigma2 = {} must be positive", t1 + t2))?;
            return Ok(boundary);
        }
        CaseId::I => {
            htheta_r_norm(&SpectralField::zeros(crate::spectral::Grid::cubic(8)?), g("theta"), g("r"))
                .map_err(|e| hypothesis(id, e.to_string()))?;
        }
        CaseId::J => {
            let v = g("variant");
            require(id, [1.0, 2.0, 3.0, 4.0].contains(&v), || format!("variant = {v} outside {{1, 2, 3, 4}}"))?;
            let (p1, p2, q1, q2) = (g("p1"), g("p2"), g("q1"), g("q2"));
            require_exponent(id, "p2", p2)?;
            require_exponent(id, "q2", q2)?;
            require(id, p1 >= p2, || format!("p1 = {p1} must be at least p2 = {p2}"))?;
            require(id, q1 >= q2, || format!("q1 = {q1} must be at least q2 = {q2}"))?;
        }
    }
    Ok(false)
}

fn grad(a: &SpectralField) -> [SpectralField; 3] {
    Axis::ALL.map(|ax| spectral_derivative(a, ax))
}

/// `‖a‖_{H^{θ,r}}` for `θ ∈ ]0, 3α(r)[`.
fn htheta(a: &SpectralField, theta: f64, r: f64) -> Result<f64> {
    sobolev_aniso_norm(a, -3.0 * alpha(r) + theta, -theta)
}

fn htheta_grad(a: &SpectralField, theta: f64, r: f64) -> Result<f64> {
    let mut sum = 0.0;
    for d in grad(a) {
        sum += htheta(&d, theta, r)?.powi(2);
    }
    Ok(sum.sqrt())
}

/// Samples with `|a| < 1e-6 max|a|` on more than 1% of the grid make the
/// Hölder composition case ill-conditioned.
pub(super) fn too_flat(a: &SpectralField) -> bool {
    let s = inverse_transform(a);
    let m = s.max_abs();
    let flat = s.samples().iter().filter(|x| x.abs() < 1e-6 * m).count();
    m == 0.0 || flat as f64 > 0.01 * s.samples().len() as f64
}

/// Dyadic exponent `k` with `2^k = N/8` used for the Bernstein supports.
fn bernstein_scale(n: usize) -> f64 {
    (n as f64 / 8.0).log2()
}

/// `(lhs, rhs)` of case `id` for one member (and `partner` for products).
pub(super) fn sides(id: CaseId, params: &CaseParams, member: &Member, partner: &Member) -> Result<(f64, f64)> {
    let g = |k: &str| params.get(k);
    let a = member.scalar();
    let grid = a.grid();
    match id {
        CaseId::A => {
            let r = g("r");
            let d = grad(a).map(|c| inverse_transform(&c));
            let mag: Vec<f64> = (0..grid.len())
                .map(|i| d.iter().map(|c| c.samples()[i].powi(2)).sum::<f64>().sqrt())
                .collect();
            let lhs = lp_norm_samples(&mag, grid.cell_volume(), r)?;
            let sp = signed_power_norms(a, r / 2.0)?;
            Ok((lhs, sp.grad_l2 * sp.value_l2.powf(2.0 / r - 1.0)))
        }
        CaseId::B => {
            let (r, s) = (g("r"), g("s"));
            let a0 = a.without_mean();
            let al = alpha(r);
            let sp = signed_power_norms(&a0, r / 2.0)?;
            Ok((sobolev_iso_norm(&a0, s)?, sp.value_l2.powf(1.0 - al - s) * sp.grad_l2.powf(3.0 * al + s)))
        }
        CaseId::C => {
            let (s, p, q) = (g("s"), g("p"), g("q"));
            let h = 1.0 - 2.0 * alpha(g("r"));
            let ga = forward_transform(&inverse_transform(a).map(|x| signed_pow(x, h)));
            let lhs = besov_norm(&ga, BesovSpec::new(h * s, p / h, q / h)?)?;
            // Hölder seminorm of z ↦ sign(z)|z|^h, attained at z' = -z
            let c_h = (1.0 - h).exp2();
            Ok((lhs, c_h * besov_norm(a, BesovSpec::new(s, p, q)?)?.powf(h)))
        }
        CaseId::D => {
            let (s, p, q) = (g("s"), g("p"), g("q"));
            Ok((vertical_besov_lp_h(a, s, p, q)?, besov_norm(a, BesovSpec::new(s, p, q)?)?))
        }
        CaseId::E => {
            let (s, th, p, q) = (g("s"), g("theta"), g("p"), g("q"));
            let lhs = aniso_besov_norm(a, AnisoBesovSpec::new(s - th, q, th, 1.0, p)?)?;
            Ok((lhs, besov_norm(a, BesovSpec::new(s, p, q)?)?))
        }
        CaseId::F => {
            let (r, th, b) = (g("r"), g("theta"), g("beta"));
            let a0 = a.without_mean();
            let lhs = aniso_besov_norm(&a0, AnisoBesovSpec::new(0.0, 1.0, 1.0 - 3.0 * alpha(r) - b, 1.0, 2.0)?)?;
            Ok((lhs, htheta(&a0, th, r)?.powf(b) * htheta_grad(&a0, th, r)?.powf(1.0 - b)))
        }
        CaseId::G => {
            let v = member.velocity().ok_or_else(|| needs_velocity(id))?;
            let (r, th, b) = (g("r"), g("theta"), g("beta"));
            let al = alpha(r);
            let spec = AnisoBesovSpec::new(1.0, 1.0, 1.0 - 3.0 * al - b, 1.0, 2.0)?;
            let lhs = (aniso_besov_norm(v.component(Axis::X1), spec)?.powi(2)
                + aniso_besov_norm(v.component(Axis::X2), spec)?.powi(2))
            .sqrt();
            let sp = signed_power_norms(&vertical_vorticity(v), r / 2.0)?;
            let d3v3 = spectral_derivative(v.component(Axis::X3), Axis::X3);
            let rhs = sp.value_l2.powf(2.0 * al + b) * sp.grad_l2.powf(1.0 - b)
                + htheta(&d3v3, th, r)?.powf(b) * htheta_grad(&d3v3, th, r)?.powf(1.0 - b);
            Ok((lhs, rhs))
        }
        CaseId::H => {
            let b = partner.scalar();
            let (p1, p2, q) = (g("p1"), g("p2"), g("q"));
            let (s1, s2, t1, t2) = (g("s1"), g("s2"), g("sigma1"), g("sigma2"));
            let ab = chop(dealiased_product(a, b)?);
            let lhs = aniso_besov_norm(&ab, AnisoBesovSpec::new(s1 + s2 - 2.0 / p2, q, t1 + t2 - 1.0 / p2, q, p1)?)?;
            let na = aniso_besov_norm(a, AnisoBesovSpec::new(s1, q, t1, q, p1)?)?;
            let nb = aniso_besov_norm(b, AnisoBesovSpec::new(s2, q, t2, q, p2)?)?;
            Ok((lhs, na * nb))
        }
        CaseId::I => {
            let v = member.velocity().ok_or_else(|| needs_velocity(id))?;
            let (r, th) = (g("r"), g("theta"));
            let d3v3 = spectral_derivative(v.component(Axis::X3), Axis::X3);
            Ok((htheta_r_norm(&d3v3, th, r)?, sobolev_iso_norm_vec(v.components(), 1.0 - 3.0 * alpha(r))?))
        }
        CaseId::J => bernstein(params, a),
        CaseId::K => {
            let r = g("r");
            let a0 = a.without_mean();
            Ok((sobolev_iso_norm(&a0, -3.0 * alpha(r))?, lp_norm(&inverse_transform(&a0), r)?))
        }
    }
}

/// Zeroes coefficients at roundoff level relative to the largest one, so that
/// products of constants stay exactly constant.
fn chop(mut a: SpectralField) -> SpectralField {
    let cut = 1e-14 * a.max_abs();
    a.coeffs_mut().iter_mut().filter(|c| c.norm() < cut).for_each(|c| *c = 0.0.into());
    a
}

fn needs_velocity(id: CaseId) -> Error {
    Error::Ensemble(format!("case ({}) needs divergence-free velocity fields (class divfree_random)", id.label()))
}

fn mixed(a: &SpectralField, p_h: f64, q_v: f64) -> Result<f64> {
    mixed_lp_norm(&inverse_transform(a), p_h, q_v)
}

/// The four anisotropic Bernstein estimates on a ball or ring of radius
/// `2^k = N/8` in the horizontal or vertical frequencies.
fn bernstein(params: &CaseParams, a: &SpectralField) -> Result<(f64, f64)> {
    let g = |k: &str| params.get(k);
    let (p1, p2, q1, q2) = (g("p1"), g("p2"), g("q1"), g("q2"));
    let k = bernstein_scale(a.grid().dims()[0]);
    let rad = k.exp2();
    let ring = |t: f64| t >= 0.75 * rad && t <= 8.0 / 3.0 * rad;
    match g("variant") as u8 {
        1 => {
            let b = a.filter(|w| w.horizontal_norm() <= rad);
            let lhs = mixed(&spectral_derivative(&b, Axis::X1), p1, q1)?;
            Ok((lhs, (k * (1.0 + 2.0 * (1.0 / p2 - 1.0 / p1))).exp2() * mixed(&b, p2, q1)?))
        }
        2 => {
            let b = a.filter(|w| w.vertical_norm() <= rad);
            let lhs = mixed(&spectral_derivative(&b, Axis::X3), p1, q1)?;
            Ok((lhs, (k * (1.0 + 1.0 / q2 - 1.0 / q1)).exp2() * mixed(&b, p1, q2)?))
        }
        3 => {
            let b = a.filter(|w| ring(w.horizontal_norm()));
            let d = mixed(&spectral_derivative(&b, Axis::X1), p1, q1)?.max(mixed(&spectral_derivative(&b, Axis::X2), p1, q1)?);
            Ok((mixed(&b, p1, q1)?, (-k).exp2() * d))
        }
        _ => {
            let b = a.filter(|w| ring(w.vertical_norm()));
            Ok((mixed(&b, p1, q1)?, (-k).exp2() * mixed(&spectral_derivative(&b, Axis::X3), p1, q1)?))
        }
    }
}
