use num_complex::Complex64;
use rustfft::FftDirection;

use super::fft::{fft3, padded, resample_spectrum};
use super::grid::{Axis, Grid, Wavevector};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Physical-space samples of a real scalar on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct RealField {
    grid: Grid,
    samples: Vec<f64>,
}

impl RealField {
    pub fn new(grid: Grid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), actual: samples.len() });
        }
        if let Some(index) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, samples: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self { grid, samples: vec![value; grid.len()] }
    }

    /// Samples `f(x1, x2, x3)` at every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> f64) -> Self {
        let samples = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self { grid, samples }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, samples: self.samples.iter().map(|&x| f(x)).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Fourier coefficients of a scalar on a [`Grid`], indexed like the samples.
///
/// Coefficients are true Fourier coefficients: the forward transform divides
/// by `n1 n2 n3`, so `f(x) = Σ_k c(k) e^{i k·x}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), actual: coeffs.len() });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, coeffs: vec![ZERO; grid.len()] }
    }

    /// Single Fourier mode `amplitude · e^{i k·x}`.
    pub fn mode(grid: Grid, k: Wavevector, amplitude: Complex64) -> Result<Self> {
        let mut field = Self::zeros(grid);
        let idx = grid.index_of(k).ok_or_else(|| Error::OutOfRange {
            name: "wavevector",
            value: k.norm(),
            interval: format!("grid {grid}"),
        })?;
        field.coeffs[idx] = amplitude;
        Ok(field)
    }

    pub fn from_fn(grid: Grid, f: impl Fn(Wavevector) -> Complex64) -> Self {
        let coeffs = (0..grid.len()).map(|i| f(grid.wavevector(i))).collect();
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn coeff(&self, k: Wavevector) -> Option<Complex64> {
        self.grid.index_of(k).map(|i| self.coeffs[i])
    }

    /// The `k = 0` coefficient (the spatial mean).
    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn without_mean(&self) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = ZERO;
        out
    }

    /// `Σ_k |c(k)|²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { grid: self.grid, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        check_grids(self.grid, other.grid)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        Ok(())
    }

    pub fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        check_grids(self.grid, other.grid)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { grid: self.grid, coeffs })
    }

    /// Keeps the coefficients where `keep(k)` holds, zeroing the rest.
    pub fn filter(&self, keep: impl Fn(Wavevector) -> bool) -> Self {
        let grid = self.grid;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| if keep(grid.wavevector(i)) { c } else { ZERO })
            .collect();
        Self { grid, coeffs }
    }

    /// Largest Hermitian-symmetry defect `max_k |c(-k) - conj c(k)|`.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.coeffs.len())
            .map(|i| (self.coeffs[self.grid.conjugate_index(i)] - self.coeffs[i].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Forces exact Hermitian symmetry `c(-k) = conj c(k)`.
    ///
    /// The canonical member of each conjugate pair is the one with the
    /// smaller flat index; self-conjugate modes get their imaginary part
    /// dropped. Afterwards the half-spectrum `i3 ≤ n3/2` determines the field
    /// bit-exactly.
    pub fn enforce_hermitian(&mut self) {
        for i in 0..self.coeffs.len() {
            let j = self.grid.conjugate_index(i);
            if i < j {
                self.coeffs[j] = self.coeffs[i].conj();
            } else if i == j {
                self.coeffs[i].im = 0.0;
            }
        }
    }

    /// Sets every mode on a Nyquist plane to zero.
    pub fn zero_nyquist(&mut self) {
        let grid = self.grid;
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            if grid.touches_nyquist(i) {
                *c = ZERO;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

pub(crate) fn check_grids(a: Grid, b: Grid) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch { left: a.to_string(), right: b.to_string() })
    }
}

/// Forward transform with `1/(n1 n2 n3)` normalization.
pub fn forward_transform(f: &RealField) -> SpectralField {
    let mut data: Vec<Complex64> = f.samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft3(&mut data, f.grid.dims(), FftDirection::Forward);
    let inv = 1.0 / f.grid.len() as f64;
    data.iter_mut().for_each(|c| *c *= inv);
    SpectralField { grid: f.grid, coeffs: data }
}

/// Inverse transform; returns the real part of the synthesized samples.
pub fn inverse_transform(a: &SpectralField) -> RealField {
    let mut data = a.coeffs.clone();
    fft3(&mut data, a.grid.dims(), FftDirection::Inverse);
    RealField { grid: a.grid, samples: data.into_iter().map(|c| c.re).collect() }
}

/// Forward transform of explicit samples, checked against the grid.
pub fn forward_samples(grid: Grid, samples: Vec<f64>) -> Result<SpectralField> {
    Ok(forward_transform(&RealField::new(grid, samples)?))
}

/// Multiplies every coefficient by `i k_axis`.
///
/// On an axis of even length the Nyquist wavenumber `-n/2` has no partner
/// `+n/2`, so its derivative is set to zero to keep real fields real.
pub fn spectral_derivative(a: &SpectralField, axis: Axis) -> SpectralField {
    let grid = a.grid;
    let ax = axis.index();
    let coeffs = a
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            if grid.on_nyquist(i, ax) {
                ZERO
            } else {
                let k = grid.wavevector(i).component(axis) as f64;
                Complex64::new(-k * c.im, k * c.re)
            }
        })
        .collect();
    SpectralField { grid, coeffs }
}

/// Applies the Fourier multiplier `m`.
///
/// `m` must be finite at every nonzero wavevector. At `k = 0` a non-finite
/// value is read as a homogeneous (singular) multiplier and the mean is
/// dropped; a finite value is applied as usual.
pub fn apply_multiplier<T, F>(a: &SpectralField, m: F) -> Result<SpectralField>
where
    F: Fn(Wavevector) -> T,
    T: Into<Complex64>,
{
    let grid = a.grid;
    let mut coeffs = Vec::with_capacity(a.coeffs.len());
    for (i, &c) in a.coeffs.iter().enumerate() {
        let k = grid.wavevector(i);
        let w: Complex64 = m(k).into();
        let finite = w.re.is_finite() && w.im.is_finite();
        if !finite {
            if k.is_zero() {
                coeffs.push(ZERO);
                continue;
            }
            return Err(Error::SingularMultiplier { k });
        }
        coeffs.push(w * c);
    }
    Ok(SpectralField { grid, coeffs })
}

/// Samples of `a` synthesized on an arbitrary grid shape (complex values).
pub(crate) fn synthesize_on(a: &SpectralField, dims: [usize; 3]) -> Vec<Complex64> {
    let mut data = resample_spectrum(&a.coeffs, a.grid.dims(), dims);
    fft3(&mut data, dims, FftDirection::Inverse);
    data
}

/// Analyzes samples on `dims` and truncates the spectrum back onto `grid`.
pub(crate) fn analyze_onto(mut data: Vec<Complex64>, dims: [usize; 3], grid: Grid) -> SpectralField {
    fft3(&mut data, dims, FftDirection::Forward);
    let inv = 1.0 / (dims[0] * dims[1] * dims[2]) as f64;
    data.iter_mut().for_each(|c| *c *= inv);
    let coeffs = resample_spectrum(&data, dims, grid.dims());
    SpectralField { grid, coeffs }
}

pub(crate) fn padded_dims(grid: Grid) -> [usize; 3] {
    grid.dims().map(padded)
}

/// Alias-free product: both factors are synthesized on the 3/2-padded grid,
/// multiplied pointwise and truncated back. The result equals the exact
/// convolution of the two spectra restricted to the grid's wavevectors.
pub fn dealiased_product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    check_grids(a.grid, b.grid)?;
    let dims = padded_dims(a.grid);
    let pa = synthesize_on(a, dims);
    let pb = synthesize_on(b, dims);
    let prod = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
    Ok(analyze_onto(prod, dims, a.grid))
}

/// Real samples of two Nyquist-free Hermitian spectra on `dims`, obtained
/// from a single complex transform of `a + i b`.
pub(crate) fn synthesize_pair(
    a: &SpectralField,
    b: Option<&SpectralField>,
    dims: [usize; 3],
) -> (Vec<f64>, Vec<f64>) {
    let combined: Vec<Complex64> = match b {
        Some(b) => a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + Complex64::i() * y).collect(),
        None => a.coeffs.clone(),
    };
    let mut data = resample_spectrum(&combined, a.grid.dims(), dims);
    fft3(&mut data, dims, FftDirection::Inverse);
    (data.iter().map(|c| c.re).collect(), data.iter().map(|c| c.im).collect())
}

/// Spectra on `grid` of two real sample arrays on `dims`, from a single
/// complex transform of `x + i y`. Nyquist-plane modes are set to zero.
pub(crate) fn analyze_pair(
    x: &[f64],
    y: Option<&[f64]>,
    dims: [usize; 3],
    grid: Grid,
) -> (SpectralField, SpectralField) {
    let data: Vec<Complex64> = match y {
        Some(y) => x.iter().zip(y).map(|(&a, &b)| Complex64::new(a, b)).collect(),
        None => x.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
    };
    let z = analyze_onto(data, dims, grid);
    let mut cx = vec![ZERO; grid.len()];
    let mut cy = vec![ZERO; grid.len()];
    for i in 0..grid.len() {
        if grid.touches_nyquist(i) {
            continue;
        }
        let zi = z.coeffs[i];
        let zj = z.coeffs[grid.conjugate_index(i)].conj();
        cx[i] = (zi + zj) * 0.5;
        cy[i] = Complex64::new(0.0, -0.5) * (zi - zj);
    }
    (SpectralField { grid, coeffs: cx }, SpectralField { grid, coeffs: cy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(8, 10, 12).unwrap()
    }

    fn random_real(grid: Grid, seed: u64) -> RealField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        RealField::new(grid, (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
    }

    #[test]
    fn constant_field_has_only_the_mean() {
        let g = grid();
        let a = forward_transform(&RealField::constant(g, 2.5));
        assert!((a.mean() - Complex64::new(2.5, 0.0)).norm() < 1e-15);
        assert!(a.coeffs()[1..].iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn sine_has_two_imaginary_coefficients() {
        let g = grid();
        let a = forward_transform(&RealField::from_fn(g, |x| x[0].sin()));
        let plus = a.coeff(Wavevector::new(1, 0, 0)).unwrap();
        let minus = a.coeff(Wavevector::new(-1, 0, 0)).unwrap();
        assert!((plus - Complex64::new(0.0, -0.5)).norm() < 1e-15);
        assert!((minus - Complex64::new(0.0, 0.5)).norm() < 1e-15);
        let rest: f64 = a.energy() - plus.norm_sqr() - minus.norm_sqr();
        assert!(rest.abs() < 1e-28);
    }

    #[test]
    fn round_trip_and_parseval() {
        let g = grid();
        let f = random_real(g, 3);
        let a = forward_transform(&f);
        let back = inverse_transform(&a);
        let err = f.samples().iter().zip(back.samples()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12 * f.max_abs());
        let lhs = a.energy();
        let rhs: f64 = f.samples().iter().map(|x| x * x).sum::<f64>() / g.len() as f64;
        assert!((lhs - rhs).abs() < 1e-12 * rhs);
    }

    #[test]
    fn rejects_wrong_length_and_nan() {
        let g = grid();
        assert!(matches!(RealField::new(g, vec![0.0; 5]), Err(Error::DimensionMismatch { .. })));
        let mut s = vec![0.0; g.len()];
        s[7] = f64::NAN;
        assert!(matches!(RealField::new(g, s), Err(Error::NonFiniteSample { index: 7 })));
    }

    #[test]
    fn derivative_examples() {
        let g = grid();
        let s = forward_transform(&RealField::from_fn(g, |x| x[0].sin()));
        let d1 = inverse_transform(&spectral_derivative(&s, Axis::X1));
        let expect = RealField::from_fn(g, |x| x[0].cos());
        for (a, b) in d1.samples().iter().zip(expect.samples()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(spectral_derivative(&s, Axis::X3).max_abs() < 1e-15);

        let k = Wavevector::new(2, 0, 3);
        let m = SpectralField::mode(g, k, Complex64::new(1.0, 0.0)).unwrap();
        let d3 = spectral_derivative(&m, Axis::X3);
        assert_eq!(d3.coeff(k).unwrap(), Complex64::new(0.0, 3.0));
        let c = forward_transform(&RealField::constant(g, 4.0));
        assert!(spectral_derivative(&c, Axis::X2).max_abs() < 1e-15);
    }

    #[test]
    fn multiplier_examples() {
        let g = grid();
        let e1 = SpectralField::mode(g, Wavevector::new(1, 0, 0), Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(apply_multiplier(&e1, |_| 1.0).unwrap(), e1);
        let inv_lap = apply_multiplier(&e1, |k: Wavevector| -1.0 / k.norm_sq()).unwrap();
        assert_eq!(inv_lap.coeff(Wavevector::new(1, 0, 0)).unwrap(), Complex64::new(-1.0, 0.0));

        // only k_h = 0 content: every coefficient sits where the multiplier is singular
        let col = SpectralField::mode(g, Wavevector::new(0, 0, 2), Complex64::new(1.0, 0.0)).unwrap();
        let r = apply_multiplier(&col, |k: Wavevector| {
            if k.horizontal_norm_sq() == 0.0 { 0.0 } else { -1.0 / k.horizontal_norm_sq() }
        })
        .unwrap();
        assert_eq!(r.max_abs(), 0.0);

        let err = apply_multiplier(&col, |k: Wavevector| -1.0 / k.horizontal_norm_sq()).unwrap_err();
        assert!(matches!(err, Error::SingularMultiplier { k } if k.k1 == 0 && k.k2 == 0 && k.k3 != 0));
    }

    #[test]
    fn dealiased_product_matches_pointwise_product_of_low_modes() {
        let g = Grid::cubic(8).unwrap();
        let a = forward_transform(&RealField::from_fn(g, |x| (x[0] + 2.0 * x[2]).cos()));
        let b = forward_transform(&RealField::from_fn(g, |x| (3.0 * x[1]).sin()));
        let p = dealiased_product(&a, &b).unwrap();
        // cos(x1+2x3) sin(3x2) has wavenumbers |k2| = 3 < 4: exactly representable
        let direct = forward_transform(&RealField::from_fn(g, |x| (x[0] + 2.0 * x[2]).cos() * (3.0 * x[1]).sin()));
        for (x, y) in p.coeffs().iter().zip(direct.coeffs()) {
            assert!((x - y).norm() < 1e-15);
        }
        // 3 + 3 = 6 would alias onto -2 without padding; padded product drops it
        let c = forward_transform(&RealField::from_fn(g, |x| (3.0 * x[0]).cos()));
        let sq = dealiased_product(&c, &c).unwrap();
        assert!((sq.mean() - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!(sq.coeff(Wavevector::new(-2, 0, 0)).unwrap().norm() < 1e-15);
        let _ = PI;
    }

    #[test]
    fn enforce_hermitian_is_a_no_op_on_real_transforms() {
        let g = grid();
        let a = forward_transform(&random_real(g, 9));
        assert!(a.hermitian_defect() < 1e-15);
        let mut b = a.clone();
        b.enforce_hermitian();
        assert!(b.hermitian_defect() == 0.0);
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn packed_pair_matches_separate_products() {
        let g = grid();
        let mut a = forward_transform(&random_real(g, 11));
        let mut b = forward_transform(&random_real(g, 12));
        a.zero_nyquist();
        b.zero_nyquist();
        let dims = padded_dims(g);
        let (sa, sb) = synthesize_pair(&a, Some(&b), dims);
        let ra = synthesize_on(&a, dims);
        assert!(sa.iter().zip(&ra).all(|(x, y)| (x - y.re).abs() < 1e-13 && y.im.abs() < 1e-13));
        let aa: Vec<f64> = sa.iter().map(|x| x * x).collect();
        let ab: Vec<f64> = sa.iter().zip(&sb).map(|(x, y)| x * y).collect();
        let (paa, pab) = analyze_pair(&aa, Some(&ab), dims, g);
        let mut daa = dealiased_product(&a, &a).unwrap();
        let mut dab = dealiased_product(&a, &b).unwrap();
        daa.zero_nyquist();
        dab.zero_nyquist();
        assert!(paa.sub(&daa).unwrap().max_abs() < 1e-14);
        assert!(pab.sub(&dab).unwrap().max_abs() < 1e-14);
    }
}
