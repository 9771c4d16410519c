//! Divergence-free velocity fields and the quantities derived from them:
//! vertical vorticity, `∂3 v3`, the horizontal Biot-Savart splitting, the
//! pressure, and signed fractional powers.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{
    analyze_onto, apply_multiplier, check_grids, forward_transform, padded_dims,
    spectral_derivative, synthesize_on, Axis, Grid, RealField, SpectralField, Wavevector,
    L2_COEFF_FACTOR,
};

/// Relative divergence residual accepted by the [`VelocityField`] gate.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-10;

/// Three spectral components on a shared grid, divergence free and with
/// zero mean.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityField {
    components: [SpectralField; 3],
}

impl VelocityField {
    /// Validates the divergence-free and zero-mean invariants.
    pub fn new(components: [SpectralField; 3]) -> Result<Self> {
        let grid = components[0].grid();
        for c in &components[1..] {
            check_grids(grid, c.grid())?;
        }
        let scale = components.iter().map(|c| c.max_abs()).fold(0.0, f64::max);
        for (component, c) in components.iter().enumerate() {
            let mean = c.mean().norm();
            if mean > 1e-12 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::VelocityMean { component, mean });
            }
        }
        let residual = divergence_residual(&components);
        if residual >= DIVERGENCE_TOLERANCE {
            return Err(Error::NotDivergenceFree { residual });
        }
        Ok(Self { components })
    }

    /// Builds from physical samples of the three components.
    pub fn from_real(v: [&RealField; 3]) -> Result<Self> {
        Self::new(v.map(forward_transform))
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { components: std::array::from_fn(|_| SpectralField::zeros(grid)) }
    }

    pub(crate) fn from_parts_unchecked(components: [SpectralField; 3]) -> Self {
        Self { components }
    }

    pub fn grid(&self) -> Grid {
        self.components[0].grid()
    }

    pub fn components(&self) -> &[SpectralField; 3] {
        &self.components
    }

    pub fn component(&self, axis: Axis) -> &SpectralField {
        &self.components[axis.index()]
    }

    pub fn into_components(self) -> [SpectralField; 3] {
        self.components
    }

    pub fn divergence_residual(&self) -> f64 {
        divergence_residual(&self.components)
    }

    /// `(e|v)` for a (unit) vector `e`.
    pub fn project_onto(&self, e: [f64; 3]) -> SpectralField {
        let [a, b, c] = &self.components;
        let mut out = a.scale(e[0]);
        out.add_assign(&b.scale(e[1])).expect("components share a grid");
        out.add_assign(&c.scale(e[2])).expect("components share a grid");
        out
    }

    /// Grid `L²` norm `(Σ_i ‖v_i‖²_{L²})^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        L2_COEFF_FACTOR * self.components.iter().map(SpectralField::energy).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { components: self.components.clone().map(|c| c.scale(s)) }
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(SpectralField::is_finite)
    }

    /// Vector vorticity `∇ × v`.
    pub fn curl(&self) -> [SpectralField; 3] {
        let d = |c: usize, axis: Axis| spectral_derivative(&self.components[c], axis);
        [
            d(2, Axis::X2).sub(&d(1, Axis::X3)).expect("same grid"),
            d(0, Axis::X3).sub(&d(2, Axis::X1)).expect("same grid"),
            d(1, Axis::X1).sub(&d(0, Axis::X2)).expect("same grid"),
        ]
    }
}

/// `max_k |k·v̂(k)| / max_k |v̂(k)|`, with `0/0 = 0`.
pub fn divergence_residual(v: &[SpectralField; 3]) -> f64 {
    let grid = v[0].grid();
    let (mut div, mut amp) = (0.0f64, 0.0f64);
    for i in 0..grid.len() {
        let k = grid.wavevector(i).as_f64();
        let mut kv = Complex64::new(0.0, 0.0);
        for a in 0..3 {
            let c = v[a].coeffs()[i];
            amp = amp.max(c.norm());
            // the Nyquist plane is dropped by every derivative
            if !grid.on_nyquist(i, a) {
                kv += c * k[a];
            }
        }
        div = div.max(kv.norm());
    }
    if amp == 0.0 { 0.0 } else { div / amp }
}

/// Leray projector `û - k (k·û)/|k|²`; the mean mode is removed.
pub fn leray_project(u: [SpectralField; 3]) -> Result<VelocityField> {
    let grid = u[0].grid();
    for c in &u[1..] {
        check_grids(grid, c.grid())?;
    }
    Ok(VelocityField::from_parts_unchecked(project_components(u)))
}

pub(crate) fn project_components(mut u: [SpectralField; 3]) -> [SpectralField; 3] {
    let grid = u[0].grid();
    for i in 0..grid.len() {
        let kv = grid.wavevector(i);
        if kv.is_zero() {
            u.iter_mut().for_each(|c| c.coeffs_mut()[0] = Complex64::new(0.0, 0.0));
            continue;
        }
        // derivative convention: Nyquist components of k are zero
        let k: [f64; 3] =
            std::array::from_fn(|a| if grid.on_nyquist(i, a) { 0.0 } else { kv.as_f64()[a] });
        let k2: f64 = k.iter().map(|x| x * x).sum();
        if k2 == 0.0 {
            continue;
        }
        let dot = (0..3).map(|a| u[a].coeffs()[i] * k[a]).sum::<Complex64>() / k2;
        for a in 0..3 {
            u[a].coeffs_mut()[i] -= dot * k[a];
        }
    }
    u
}

/// Vertical vorticity `ω = ∂1 v2 - ∂2 v1`.
pub fn vertical_vorticity(v: &VelocityField) -> SpectralField {
    let [v1, v2, _] = v.components();
    spectral_derivative(v2, Axis::X1).sub(&spectral_derivative(v1, Axis::X2)).expect("same grid")
}

/// `∂3 v3`, which equals `-div_h v^h` for divergence-free `v`.
pub fn d3v3(v: &VelocityField) -> SpectralField {
    spectral_derivative(&v.components()[2], Axis::X3)
}

/// `-(∂1 v1 + ∂2 v2)`.
pub fn minus_horizontal_divergence(v: &VelocityField) -> SpectralField {
    let [v1, v2, _] = v.components();
    spectral_derivative(v1, Axis::X1)
        .add(&spectral_derivative(v2, Axis::X2))
        .expect("same grid")
        .scale(-1.0)
}

/// The two scalar unknowns `(ω, ∂3 v3)` of the reformulated system.
#[derive(Clone, Debug, PartialEq)]
pub struct VorticityState {
    pub omega: SpectralField,
    pub d3v3: SpectralField,
}

impl VorticityState {
    pub fn from_velocity(v: &VelocityField) -> Self {
        Self { omega: vertical_vorticity(v), d3v3: d3v3(v) }
    }
}

/// Horizontal Biot-Savart splitting `v^h = v_curl + v_div`.
#[derive(Clone, Debug)]
pub struct HorizontalSplit {
    /// `∇_h^⊥ Δ_h^{-1} ω`, horizontally divergence free.
    pub curl: [SpectralField; 2],
    /// `-∇_h Δ_h^{-1} ∂3 v3`, horizontally curl free.
    pub div: [SpectralField; 2],
}

/// `Δ_h^{-1}` with the convention that modes with `k_h = 0` map to zero.
pub fn inverse_horizontal_laplacian(a: &SpectralField) -> SpectralField {
    apply_multiplier(a, |k: Wavevector| {
        let kh2 = k.horizontal_norm_sq();
        if kh2 == 0.0 { 0.0 } else { -1.0 / kh2 }
    })
    .expect("multiplier is finite everywhere")
}

/// `Δ^{-1}`, dropping the mean.
pub fn inverse_laplacian(a: &SpectralField) -> SpectralField {
    apply_multiplier(a, |k: Wavevector| if k.is_zero() { 0.0 } else { -1.0 / k.norm_sq() })
        .expect("multiplier is finite everywhere")
}

pub fn horizontal_biot_savart(state: &VorticityState) -> HorizontalSplit {
    let psi = inverse_horizontal_laplacian(&state.omega);
    let phi = inverse_horizontal_laplacian(&state.d3v3);
    HorizontalSplit {
        curl: [spectral_derivative(&psi, Axis::X2).scale(-1.0), spectral_derivative(&psi, Axis::X1)],
        div: [spectral_derivative(&phi, Axis::X1).scale(-1.0), spectral_derivative(&phi, Axis::X2).scale(-1.0)],
    }
}

/// Fraction of the horizontal kinetic energy carried by modes with
/// `k_h = 0`, which the horizontal splitting cannot represent.
pub fn excluded_horizontal_energy(v: &VelocityField) -> f64 {
    let grid = v.grid();
    let (mut axis, mut total) = (0.0, 0.0);
    for c in &v.components()[..2] {
        for (i, x) in c.coeffs().iter().enumerate() {
            let e = x.norm_sqr();
            total += e;
            if grid.wavevector(i).horizontal_norm_sq() == 0.0 {
                axis += e;
            }
        }
    }
    if total == 0.0 { 0.0 } else { axis / total }
}

/// Pressure `Π = -Δ^{-1} Σ_{ℓ,m} ∂_ℓ v^m ∂_m v^ℓ`, with alias-free products.
pub fn pressure_from_velocity(v: &VelocityField) -> SpectralField {
    let grid = v.grid();
    let dims = padded_dims(grid);
    let grads: Vec<Vec<Vec<Complex64>>> = (0..3)
        .map(|m| {
            Axis::ALL
                .iter()
                .map(|&l| synthesize_on(&spectral_derivative(&v.components()[m], l), dims))
                .collect()
        })
        .collect();
    // grads[m][l] = ∂_l v^m
    let len = dims.iter().product();
    let mut src = vec![Complex64::new(0.0, 0.0); len];
    for l in 0..3 {
        for m in 0..3 {
            for (s, (x, y)) in src.iter_mut().zip(grads[m][l].iter().zip(&grads[l][m])) {
                *s += x * y;
            }
        }
    }
    let source = analyze_onto(src, dims, grid);
    inverse_laplacian(&source).scale(-1.0)
}

/// Pointwise `sign(a)|a|^α` for `α ∈ ]0, 1]`; zeros stay zeros.
pub fn signed_power(a: &RealField, alpha: f64) -> Result<RealField> {
    validate_signed_exponent(alpha)?;
    Ok(a.map(|x| signed_pow(x, alpha)))
}

pub(crate) fn validate_signed_exponent(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange { name: "alpha", value: alpha, interval: "]0, 1]".into() })
    }
}

#[inline]
pub(crate) fn signed_pow(x: f64, alpha: f64) -> f64 {
    if alpha == 1.0 { x } else { x.signum() * x.abs().powf(alpha) * (x != 0.0) as u8 as f64 }
}

/// `L²` norms of `a_α` and of its gradient, where `a_α` is formed from the
/// samples of `a` on the 3/2-padded grid and differentiated spectrally there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedPowerNorms {
    pub value_l2: f64,
    pub grad_l2: f64,
}

pub fn signed_power_norms(a: &SpectralField, alpha: f64) -> Result<SignedPowerNorms> {
    validate_signed_exponent(alpha)?;
    let dims = padded_dims(a.grid());
    let n: usize = dims.iter().product();
    let samples = synthesize_on(a, dims);
    let powered: Vec<Complex64> =
        samples.iter().map(|c| Complex64::new(signed_pow(c.re, alpha), 0.0)).collect();
    let cell = (2.0 * std::f64::consts::PI).powi(3) / n as f64;
    let value_sq: f64 = powered.iter().map(|c| c.re * c.re).sum::<f64>() * cell;
    let mut spec = powered;
    crate::spectral::fft::fft3(&mut spec, dims, rustfft::FftDirection::Forward);
    let inv = 1.0 / n as f64;
    let mut grad_sq = 0.0;
    for (i, c) in spec.iter().enumerate() {
        let i3 = i % dims[2];
        let i2 = (i / dims[2]) % dims[1];
        let i1 = i / (dims[1] * dims[2]);
        let k = |idx: usize, len: usize| {
            let kk = crate::spectral::fft::signed_wavenumber(idx, len);
            // Nyquist wavenumber carries no derivative
            if len % 2 == 0 && kk == -(len as i64) / 2 { 0.0 } else { kk as f64 }
        };
        let k2 = k(i1, dims[0]).powi(2) + k(i2, dims[1]).powi(2) + k(i3, dims[2]).powi(2);
        grad_sq += k2 * (c * inv).norm_sqr();
    }
    Ok(SignedPowerNorms {
        value_l2: value_sq.sqrt(),
        grad_l2: L2_COEFF_FACTOR * grad_sq.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{inverse_transform, lp_norm};

    fn tg(g: Grid) -> VelocityField {
        let v1 = RealField::from_fn(g, |x| x[0].cos() * x[1].sin());
        let v2 = RealField::from_fn(g, |x| -x[0].sin() * x[1].cos());
        VelocityField::from_real([&v1, &v2, &RealField::zeros(g)]).unwrap()
    }

    fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
        a.sub(b).unwrap().max_abs()
    }

    #[test]
    fn gate_rejects_compressive_vertical_field() {
        let g = Grid::cubic(8).unwrap();
        let v3 = RealField::from_fn(g, |x| x[2].sin());
        let z = RealField::zeros(g);
        assert!(matches!(
            VelocityField::from_real([&z, &z, &v3]),
            Err(Error::NotDivergenceFree { .. })
        ));
        let shear = RealField::from_fn(g, |x| x[0].sin());
        let v = VelocityField::from_real([&z, &z, &shear]).unwrap();
        assert!(vertical_vorticity(&v).max_abs() < 1e-15);
        assert!(d3v3(&v).max_abs() < 1e-15);
        let one = RealField::constant(g, 1.0);
        assert!(matches!(VelocityField::from_real([&one, &z, &z]), Err(Error::VelocityMean { .. })));
    }

    #[test]
    fn taylor_green_vorticity_and_pressure() {
        let g = Grid::cubic(16).unwrap();
        let v = tg(g);
        let omega = inverse_transform(&vertical_vorticity(&v));
        let expect = RealField::from_fn(g, |x| -2.0 * x[0].cos() * x[1].cos());
        for (a, b) in omega.samples().iter().zip(expect.samples()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(d3v3(&v).max_abs() < 1e-15);
        let p = inverse_transform(&pressure_from_velocity(&v));
        let expect = RealField::from_fn(g, |x| -((2.0 * x[0]).cos() + (2.0 * x[1]).cos()) / 4.0);
        for (a, b) in p.samples().iter().zip(expect.samples()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(pressure_from_velocity(&VelocityField::zeros(g)).max_abs() == 0.0);
    }

    #[test]
    fn projection_fixed_point_and_kernel() {
        let g = Grid::cubic(16).unwrap();
        let v = tg(g);
        let p = leray_project(v.components().clone()).unwrap();
        for (a, b) in p.components().iter().zip(v.components()) {
            assert!(max_diff(a, b) < 1e-14);
        }
        let phi = forward_transform(&RealField::from_fn(g, |x| (x[0] + 2.0 * x[2]).sin() * x[1].cos()));
        let grad = Axis::ALL.map(|ax| spectral_derivative(&phi, ax));
        let p = leray_project(grad).unwrap();
        assert!(p.components().iter().all(|c| c.max_abs() < 1e-15));
    }

    #[test]
    fn taylor_green_is_purely_rotational() {
        let g = Grid::cubic(16).unwrap();
        let v = tg(g);
        let split = horizontal_biot_savart(&VorticityState::from_velocity(&v));
        assert!(split.div.iter().all(|c| c.max_abs() < 1e-15));
        for a in 0..2 {
            assert!(max_diff(&split.curl[a], &v.components()[a]) < 1e-15);
        }
        assert!(excluded_horizontal_energy(&v) < 1e-30);
    }

    #[test]
    fn signed_power_examples() {
        let g = Grid::cubic(8).unwrap();
        let a = RealField::from_fn(g, |x| x[0].sin() + 0.3 * x[2].cos());
        assert_eq!(signed_power(&a, 1.0).unwrap(), a);
        let m4 = RealField::constant(g, -4.0);
        assert!(signed_power(&m4, 0.5).unwrap().samples().iter().all(|&x| x == -2.0));
        assert!(signed_power(&a, 0.0).is_err());
        assert!(signed_power(&a, 1.5).is_err());
        let z = signed_power(&RealField::zeros(g), 0.3).unwrap();
        assert!(z.samples().iter().all(|&x| x == 0.0));
        // ‖a_{r/2}‖²_{L²} = ‖a‖^r_{L^r}
        let r = 1.8;
        let lhs = lp_norm(&signed_power(&a, r / 2.0).unwrap(), 2.0).unwrap().powi(2);
        let rhs = lp_norm(&a, r).unwrap().powf(r);
        assert!((lhs - rhs).abs() < 1e-10 * rhs);
    }
}
