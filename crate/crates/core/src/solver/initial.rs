use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::flow::{leray_project, VelocityField};
use crate::spectral::{forward_transform, Grid, RealField, SpectralField};

fn from_samples(grid: Grid, f: [fn([f64; 3], [f64; 3]) -> f64; 3], p: [f64; 3]) -> Result<VelocityField> {
    let comps = f.map(|fi| {
        let mut c = forward_transform(&RealField::from_fn(grid, |x| fi(x, p)));
        c.enforce_hermitian();
        c
    });
    VelocityField::new(comps)
}

/// `v = (cos x1 sin x2, -sin x1 cos x2, 0)`.
pub fn initial_taylor_green(grid: Grid) -> Result<VelocityField> {
    from_samples(
        grid,
        [|x, _| x[0].cos() * x[1].sin(), |x, _| -x[0].sin() * x[1].cos(), |_, _| 0.0],
        [0.0; 3],
    )
}

/// Arnold-Beltrami-Childress flow
/// `v = (A sin x3 + C cos x2, B sin x1 + A cos x3, C sin x2 + B cos x1)`,
/// an eigenfield of the curl with eigenvalue 1.
pub fn initial_abc(grid: Grid, a: f64, b: f64, c: f64) -> Result<VelocityField> {
    from_samples(
        grid,
        [
            |x, p| p[0] * x[2].sin() + p[2] * x[1].cos(),
            |x, p| p[1] * x[0].sin() + p[0] * x[2].cos(),
            |x, p| p[2] * x[1].sin() + p[1] * x[0].cos(),
        ],
        [a, b, c],
    )
}

/// Shell index of a mode: `|k|` rounded to the nearest integer.
fn shell(k: [f64; 3]) -> usize {
    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt().round() as usize
}

/// `E(k) = Σ_{shell k} Σ_i |v̂_i|²` for every shell `k = 0, 1, ...`.
pub fn shell_spectrum(v: &VelocityField) -> Vec<f64> {
    let grid = v.grid();
    let mut e = Vec::new();
    for i in 0..grid.len() {
        let s = shell(grid.wavevector(i).as_f64());
        if e.len() <= s {
            e.resize(s + 1, 0.0);
        }
        e[s] += v.components().iter().map(|c| c.coeffs()[i].norm_sqr()).sum::<f64>();
    }
    e
}

/// Seeded random divergence-free field with energy confined to the shells
/// `band.0 ..= band.1` and shell spectrum exactly proportional to
/// `k^slope`. `amplitude` is the root-mean-square speed
/// `(Σ_k Σ_i |v̂_i(k)|²)^{1/2}`.
pub fn initial_random_bandlimited(
    grid: Grid,
    seed: u64,
    band: (usize, usize),
    slope: f64,
    amplitude: f64,
) -> Result<VelocityField> {
    let limit = grid.dims().iter().min().copied().unwrap_or(0) / 2 - 1;
    if band.0 < 1 || band.0 > band.1 || band.1 > limit {
        return Err(Error::OutOfRange {
            name: "band",
            value: band.1 as f64,
            interval: format!("1 <= kmin <= kmax <= {limit}"),
        });
    }
    if !(slope.is_finite() && amplitude.is_finite() && amplitude >= 0.0) {
        return Err(Error::OutOfRange { name: "amplitude", value: amplitude, interval: "[0, +inf[".into() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut comps: [SpectralField; 3] = std::array::from_fn(|_| SpectralField::zeros(grid));
    for i in 0..grid.len() {
        let s = shell(grid.wavevector(i).as_f64());
        for c in comps.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            if (band.0..=band.1).contains(&s) {
                c.coeffs_mut()[i] = Complex64::new(re, im);
            }
        }
    }
    comps.iter_mut().for_each(SpectralField::enforce_hermitian);
    let mut comps = leray_project(comps)?.into_components();

    let raw = shell_spectrum(&VelocityField::from_parts_unchecked(comps.clone()));
    let target: Vec<f64> = (0..raw.len())
        .map(|k| if (band.0..=band.1).contains(&k) { (k as f64).powf(slope) } else { 0.0 })
        .collect();
    let total: f64 = target.iter().sum();
    for i in 0..grid.len() {
        let s = shell(grid.wavevector(i).as_f64());
        let w = if raw[s] > 0.0 { (target[s] / total / raw[s]).sqrt() * amplitude } else { 0.0 };
        comps.iter_mut().for_each(|c| c.coeffs_mut()[i] *= w);
    }
    VelocityField::new(comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{inverse_transform, Axis};

    #[test]
    fn abc_is_a_curl_eigenfield() {
        let g = Grid::cubic(8).unwrap();
        let v = initial_abc(g, 1.0, 1.0, 1.0).unwrap();
        let w = v.curl();
        for (a, b) in w.iter().zip(v.components()) {
            assert!(a.sub(b).unwrap().max_abs() < 1e-15);
        }
    }

    #[test]
    fn taylor_green_samples() {
        let g = Grid::cubic(8).unwrap();
        let v = initial_taylor_green(g).unwrap();
        let v1 = inverse_transform(v.component(Axis::X1));
        let p = g.point(37);
        assert!((v1.samples()[37] - p[0].cos() * p[1].sin()).abs() < 1e-15);
        assert!(v.divergence_residual() < 1e-15);
    }

    #[test]
    fn random_field_is_reproducible_with_exact_slope() {
        let g = Grid::cubic(16).unwrap();
        let a = initial_random_bandlimited(g, 5, (2, 6), -5.0 / 3.0, 0.3).unwrap();
        let b = initial_random_bandlimited(g, 5, (2, 6), -5.0 / 3.0, 0.3).unwrap();
        assert_eq!(a, b);
        let e = shell_spectrum(&a);
        for k in 3..=6 {
            let slope = (e[k] / e[2]).ln() / (k as f64 / 2.0).ln();
            assert!((slope + 5.0 / 3.0).abs() < 1e-10);
        }
        assert!(e[1] == 0.0 && e.get(7).map_or(true, |&x| x == 0.0));
        assert!((e.iter().sum::<f64>().sqrt() - 0.3).abs() < 1e-14);
        assert!(initial_random_bandlimited(g, 5, (2, 8), 0.0, 1.0).is_err());
        assert!(initial_random_bandlimited(g, 5, (0, 3), 0.0, 1.0).is_err());
    }
}
