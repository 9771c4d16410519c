//! Exponential integrators for `u' = -κ|k|² u + N(u)` with a diagonal
//! linear part. Coefficients depend only on `|k|²` and are tabulated once.

use num_complex::Complex64;

use crate::error::Result;
use crate::spectral::{Grid, SpectralField};

/// Time integrator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Integrator {
    /// Cox-Matthews exponential time differencing, fourth order.
    #[default]
    Etdrk4,
    /// Classical RK4 on the integrating-factor variable.
    Ifrk4,
}

impl std::str::FromStr for Integrator {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "etdrk4" => Ok(Self::Etdrk4),
            "ifrk4" => Ok(Self::Ifrk4),
            _ => Err(format!("unknown integrator `{s}` (expected ETDRK4 or IFRK4)")),
        }
    }
}

impl std::fmt::Display for Integrator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Etdrk4 => "ETDRK4",
            Self::Ifrk4 => "IFRK4",
        })
    }
}

/// Number of contour points for the φ-function quadrature.
const CONTOUR_POINTS: usize = 32;

#[derive(Clone, Copy, Debug)]
struct Coeffs {
    h: f64,
    e: f64,
    e2: f64,
    q: f64,
    f1: f64,
    f2: f64,
    f3: f64,
}

fn coeffs(l: f64, h: f64) -> Coeffs {
    let hl = h * l;
    let (mut q, mut f1, mut f2, mut f3) = (0.0, 0.0, 0.0, 0.0);
    for j in 0..CONTOUR_POINTS {
        let angle = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / CONTOUR_POINTS as f64;
        let z = Complex64::new(hl, 0.0) + Complex64::from_polar(1.0, angle);
        let ez = z.exp();
        let z3 = z * z * z;
        q += (((z * 0.5).exp() - 1.0) / z).re;
        f1 += ((-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3).re;
        f2 += ((2.0 + z + ez * (z - 2.0)) / z3).re;
        f3 += ((-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3).re;
    }
    let m = CONTOUR_POINTS as f64;
    Coeffs {
        h,
        e: hl.exp(),
        e2: (hl / 2.0).exp(),
        q: h * q / m,
        f1: h * f1 / m,
        f2: h * f2 / m,
        f3: h * f3 / m,
    }
}

/// One-step map for a fixed grid, diffusivity and time step.
#[derive(Clone, Debug)]
pub struct Stepper {
    integrator: Integrator,
    dt: f64,
    table: Vec<Coeffs>,
    shell: Vec<u32>,
}

impl Stepper {
    pub fn new(grid: Grid, diffusivity: f64, dt: f64, integrator: Integrator) -> Self {
        let shell: Vec<u32> = (0..grid.len())
            .map(|i| {
                let k = grid.wavevector(i);
                (k.k1 * k.k1 + k.k2 * k.k2 + k.k3 * k.k3) as u32
            })
            .collect();
        let qmax = shell.iter().copied().max().unwrap_or(0) as usize;
        let table = (0..=qmax).map(|q| coeffs(-diffusivity * q as f64, dt)).collect();
        Self { integrator, dt, table, shell }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `u` by one step; `nonlinear` evaluates `N` on a full state.
    pub fn advance<F>(&self, u: &[SpectralField], mut nonlinear: F) -> Result<Vec<SpectralField>>
    where
        F: FnMut(&[SpectralField]) -> Result<Vec<SpectralField>>,
    {
        match self.integrator {
            Integrator::Etdrk4 => {
                let nu = nonlinear(u)?;
                let a = self.combine(&[(u, |c| c.e2), (&nu[..], |c| c.q)]);
                let na = nonlinear(&a)?;
                let b = self.combine(&[(u, |c| c.e2), (&na[..], |c| c.q)]);
                let nb = nonlinear(&b)?;
                let c = self.combine(&[(&a[..], |c| c.e2), (&nb[..], |c| 2.0 * c.q), (&nu[..], |c| -c.q)]);
                let nc = nonlinear(&c)?;
                Ok(self.combine(&[
                    (u, |c| c.e),
                    (&nu[..], |c| c.f1),
                    (&na[..], |c| 2.0 * c.f2),
                    (&nb[..], |c| 2.0 * c.f2),
                    (&nc[..], |c| c.f3),
                ]))
            }
            Integrator::Ifrk4 => {
                let k1 = nonlinear(u)?;
                let u2 = self.combine(&[(u, |c| c.e2), (&k1[..], |c| 0.5 * c.h * c.e2)]);
                let k2 = nonlinear(&u2)?;
                let u3 = self.combine(&[(u, |c| c.e2), (&k2[..], |c| 0.5 * c.h)]);
                let k3 = nonlinear(&u3)?;
                let u4 = self.combine(&[(u, |c| c.e), (&k3[..], |c| c.h * c.e2)]);
                let k4 = nonlinear(&u4)?;
                Ok(self.combine(&[
                    (u, |c| c.e),
                    (&k1[..], |c| c.h / 6.0 * c.e),
                    (&k2[..], |c| c.h / 3.0 * c.e2),
                    (&k3[..], |c| c.h / 3.0 * c.e2),
                    (&k4[..], |c| c.h / 6.0),
                ]))
            }
        }
    }

    /// Exact solution of the linear part over one step.
    pub fn decay(&self, u: &[SpectralField]) -> Vec<SpectralField> {
        self.combine(&[(u, |c| c.e)])
    }

    /// `Σ_t w_t(k) · terms_t`, componentwise.
    fn combine(&self, terms: &[(&[SpectralField], fn(&Coeffs) -> f64)]) -> Vec<SpectralField> {
        let ncomp = terms[0].0.len();
        let grid = terms[0].0[0].grid();
        (0..ncomp)
            .map(|c| {
                let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
                for (fields, weight) in terms {
                    let src = fields[c].coeffs();
                    for (i, o) in out.iter_mut().enumerate() {
                        *o += weight(&self.table[self.shell[i] as usize]) * src[i];
                    }
                }
                SpectralField::new(grid, out).expect("length matches grid")
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `φ_k(z) = Σ_j z^j / (j+k)!`.
    fn phi(k: u32, z: f64) -> f64 {
        let mut fact: f64 = (1..=k).map(f64::from).product();
        let (mut sum, mut zp) = (0.0, 1.0);
        for j in 0..60 {
            sum += zp / fact;
            zp *= z;
            fact *= f64::from(j + k + 1);
        }
        sum
    }

    #[test]
    fn contour_coefficients_match_reference_values() {
        for &(l, h) in &[(-1.0, 0.1), (-50.0, 0.01), (-3.0, 1e-3), (-500.0, 0.01), (-8.0, 0.1)] {
            let c = coeffs(l, h);
            let z: f64 = h * l;
            let (q, f1, f2, f3) = if z.abs() <= 1.0 {
                let (p1, p2, p3) = (phi(1, z), phi(2, z), phi(3, z));
                (0.5 * phi(1, z / 2.0), p1 - 3.0 * p2 + 4.0 * p3, p2 - 2.0 * p3, 4.0 * p3 - p2)
            } else {
                let ez = z.exp();
                (
                    ((z / 2.0).exp() - 1.0) / z,
                    (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z.powi(3),
                    (2.0 + z + ez * (z - 2.0)) / z.powi(3),
                    (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z.powi(3),
                )
            };
            for (got, want) in [(c.q, q), (c.f1, f1), (c.f2, f2), (c.f3, f3)] {
                assert!((got - h * want).abs() < 1e-14 * h, "{l} {h}: {got} vs {}", h * want);
            }
            assert_eq!(c.e, z.exp());
        }
        // z = 0 limits: φ1(0)/2, 1/6, 1/6, 1/6
        let c = coeffs(0.0, 0.2);
        assert!((c.q - 0.1).abs() < 1e-15);
        for f in [c.f1, c.f2, c.f3] {
            assert!((f - 0.2 / 6.0).abs() < 1e-15);
        }
    }
}
