//! Seeded random field collections with verified class constraints.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flow::VelocityField;
use crate::solver::initial_random_bandlimited;
use crate::spectral::{inverse_transform, Axis, Grid, SpectralField, Wavevector};

/// Kinds of random field an ensemble can hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldClass {
    /// Mean-zero scalar with Gaussian coefficients on `1 ≤ |k| ≤ N/4`.
    BandlimitedRandom,
    /// Divergence-free velocity with shell spectrum `k^{-5/3}` on `1 ≤ |k| ≤ N/4`.
    DivfreeRandom,
    /// `1 + b/(2 max|b|)` for a band-limited `b`: smooth, bounded below by 1/2.
    PositiveSmooth,
    /// One Fourier mode (with its conjugate) of unit amplitude and random phase.
    SingleCell,
    /// Energy on `|k3| ≤ |k_h|/4`: thin in the vertical direction.
    AnisotropicPancake,
    /// Energy on `|k_h| ≤ |k3|/4`: elongated along the vertical.
    AnisotropicTube,
}

impl FieldClass {
    pub const ALL: [FieldClass; 6] = [
        Self::BandlimitedRandom,
        Self::DivfreeRandom,
        Self::PositiveSmooth,
        Self::SingleCell,
        Self::AnisotropicPancake,
        Self::AnisotropicTube,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::BandlimitedRandom => "bandlimited_random",
            Self::DivfreeRandom => "divfree_random",
            Self::PositiveSmooth => "positive_smooth",
            Self::SingleCell => "single_cell",
            Self::AnisotropicPancake => "anisotropic_pancake",
            Self::AnisotropicTube => "anisotropic_tube",
        }
    }
}

impl std::str::FromStr for FieldClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|c| c.name()).collect();
                format!("unknown field class `{s}` (expected one of {})", names.join(", "))
            })
    }
}

impl std::fmt::Display for FieldClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub seed: u64,
    pub count: usize,
    pub resolution: usize,
    pub class: FieldClass,
}

impl EnsembleSpec {
    pub fn new(seed: u64, count: usize, resolution: usize, class: FieldClass) -> Self {
        Self { seed, count, resolution, class }
    }

    /// Same ensemble definition at another resolution.
    pub fn at_resolution(&self, resolution: usize) -> Self {
        Self { resolution, ..*self }
    }
}

/// One ensemble field.
#[derive(Clone, Debug, PartialEq)]
pub enum Member {
    Scalar(SpectralField),
    Vector(VelocityField),
}

impl Member {
    /// The scalar itself, or the vertical component of a velocity.
    pub fn scalar(&self) -> &SpectralField {
        match self {
            Member::Scalar(a) => a,
            Member::Vector(v) => v.component(Axis::X3),
        }
    }

    pub fn velocity(&self) -> Option<&VelocityField> {
        match self {
            Member::Vector(v) => Some(v),
            Member::Scalar(_) => None,
        }
    }
}

/// Post-generation check of the class constraint, one value per member.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassCensus {
    pub quantity: &'static str,
    pub worst: f64,
    pub bound: f64,
}

#[derive(Clone, Debug)]
pub struct Ensemble {
    pub spec: EnsembleSpec,
    pub members: Vec<Member>,
    pub census: ClassCensus,
}

/// Upper edge of the generation band at resolution `n`.
fn band_top(n: usize) -> usize {
    (n / 4).max(1)
}

fn member_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Hermitian, Nyquist-free, unit-`ℓ²` Gaussian field on the modes selected
/// by `keep`, with amplitudes `|k|^{-3/2}`.
fn gaussian_scalar(grid: Grid, rng: &mut ChaCha8Rng, keep: impl Fn(Wavevector) -> bool) -> SpectralField {
    let mut a = SpectralField::zeros(grid);
    for i in 0..grid.len() {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        let k = grid.wavevector(i);
        if !k.is_zero() && !grid.touches_nyquist(i) && keep(k) {
            a.coeffs_mut()[i] = Complex64::new(re, im) * k.norm().powf(-1.5);
        }
    }
    a.enforce_hermitian();
    let e = a.energy().sqrt();
    if e > 0.0 { a.scale(1.0 / e) } else { a }
}

fn generate(spec: &EnsembleSpec, grid: Grid, index: usize) -> Result<Member> {
    let n = spec.resolution;
    let top = band_top(n) as f64;
    let mut rng = member_rng(spec.seed, index);
    let in_band = |k: Wavevector| k.norm() <= top;
    Ok(match spec.class {
        FieldClass::BandlimitedRandom => Member::Scalar(gaussian_scalar(grid, &mut rng, in_band)),
        FieldClass::DivfreeRandom => {
            let seed = rng.random::<u64>();
            Member::Vector(initial_random_bandlimited(grid, seed, (1, band_top(n)), -5.0 / 3.0, 1.0)?)
        }
        FieldClass::PositiveSmooth => {
            let half = (top / 2.0).max(1.0);
            let b = gaussian_scalar(grid, &mut rng, |k| k.norm() <= half);
            let m = inverse_transform(&b).max_abs();
            let mut a = if m > 0.0 { b.scale(0.5 / m) } else { b };
            a.coeffs_mut()[0] = Complex64::new(1.0, 0.0);
            Member::Scalar(a)
        }
        FieldClass::SingleCell => {
            let t = top as i64;
            let k = loop {
                let k = Wavevector::new(
                    rng.random_range(-t..=t),
                    rng.random_range(-t..=t),
                    rng.random_range(-t..=t),
                );
                if !k.is_zero() && k.norm() <= top {
                    break k;
                }
            };
            let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let mut a = SpectralField::mode(grid, k, Complex64::from_polar(1.0, phase))?;
            a.enforce_hermitian();
            Member::Scalar(a)
        }
        FieldClass::AnisotropicPancake => Member::Scalar(gaussian_scalar(grid, &mut rng, |k| {
            in_band(k) && 4.0 * k.vertical_norm() <= k.horizontal_norm()
        })),
        FieldClass::AnisotropicTube => Member::Scalar(gaussian_scalar(grid, &mut rng, |k| {
            in_band(k) && 4.0 * k.horizontal_norm() <= k.vertical_norm()
        })),
    })
}

/// Energy fraction of `a` on modes where `cone` holds.
fn cone_fraction(a: &SpectralField, cone: impl Fn(Wavevector) -> bool) -> f64 {
    let grid = a.grid();
    let (mut inside, mut total) = (0.0, 0.0);
    for (i, c) in a.coeffs().iter().enumerate() {
        let e = c.norm_sqr();
        total += e;
        if cone(grid.wavevector(i)) {
            inside += e;
        }
    }
    if total > 0.0 { inside / total } else { 1.0 }
}

fn census(class: FieldClass, members: &[Member]) -> Result<ClassCensus> {
    let fold_min = |f: &dyn Fn(&Member) -> f64| members.iter().map(f).fold(f64::INFINITY, f64::min);
    let c = match class {
        FieldClass::DivfreeRandom => ClassCensus {
            quantity: "divergence residual",
            worst: members
                .iter()
                .map(|m| m.velocity().map_or(f64::INFINITY, VelocityField::divergence_residual))
                .fold(0.0, f64::max),
            bound: crate::flow::DIVERGENCE_TOLERANCE,
        },
        FieldClass::PositiveSmooth => ClassCensus {
            quantity: "minimum sample",
            worst: fold_min(&|m| inverse_transform(m.scalar()).samples().iter().copied().fold(f64::INFINITY, f64::min)),
            bound: 0.0,
        },
        FieldClass::AnisotropicPancake => ClassCensus {
            quantity: "energy fraction with |k3| <= |k_h|/4",
            worst: fold_min(&|m| cone_fraction(m.scalar(), |k| 4.0 * k.vertical_norm() <= k.horizontal_norm())),
            bound: 0.99,
        },
        FieldClass::AnisotropicTube => ClassCensus {
            quantity: "energy fraction with |k_h| <= |k3|/4",
            worst: fold_min(&|m| cone_fraction(m.scalar(), |k| 4.0 * k.horizontal_norm() <= k.vertical_norm())),
            bound: 0.99,
        },
        FieldClass::BandlimitedRandom | FieldClass::SingleCell => ClassCensus {
            quantity: "relative mean",
            worst: members
                .iter()
                .map(|m| m.scalar().mean().norm() / m.scalar().energy().sqrt().max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max),
            bound: 1e-12,
        },
    };
    let ok = match class {
        FieldClass::PositiveSmooth => c.worst > c.bound,
        FieldClass::AnisotropicPancake | FieldClass::AnisotropicTube => c.worst >= c.bound,
        _ => c.worst <= c.bound,
    };
    if !ok {
        return Err(Error::Ensemble(format!(
            "{class}: {} = {:e} violates bound {:e}",
            c.quantity, c.worst, c.bound
        )));
    }
    Ok(c)
}

/// Builds the ensemble and verifies its class constraint.
pub fn make_ensemble(spec: &EnsembleSpec) -> Result<Ensemble> {
    let grid = Grid::cubic(spec.resolution)?;
    if spec.count == 0 {
        return Err(Error::Ensemble("count must be positive".into()));
    }
    let members = (0..spec.count)
        .into_par_iter()
        .map(|i| generate(spec, grid, i))
        .collect::<Result<Vec<_>>>()?;
    let census = census(spec.class, &members)?;
    Ok(Ensemble { spec: *spec, members, census })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divfree_members_pass_the_gate() {
        let e = make_ensemble(&EnsembleSpec::new(7, 10, 16, FieldClass::DivfreeRandom)).unwrap();
        assert_eq!(e.members.len(), 10);
        for m in &e.members {
            let v = m.velocity().unwrap();
            assert!(VelocityField::new(v.components().clone()).is_ok());
        }
    }

    #[test]
    fn same_seed_same_collection() {
        for class in FieldClass::ALL {
            let spec = EnsembleSpec::new(3, 4, 16, class);
            let a = make_ensemble(&spec).unwrap();
            let b = make_ensemble(&spec).unwrap();
            assert_eq!(a.members, b.members, "{class}");
            let c = make_ensemble(&EnsembleSpec { seed: 4, ..spec }).unwrap();
            assert_ne!(a.members, c.members, "{class}");
        }
    }

    #[test]
    fn pancake_support_census() {
        let e = make_ensemble(&EnsembleSpec::new(1, 5, 32, FieldClass::AnisotropicPancake)).unwrap();
        assert!(e.census.worst >= 0.99);
        for m in &e.members {
            assert!(m.scalar().energy() > 0.0);
        }
    }

    #[test]
    fn positive_class_is_positive() {
        let e = make_ensemble(&EnsembleSpec::new(2, 5, 16, FieldClass::PositiveSmooth)).unwrap();
        assert!(e.census.worst >= 0.5 - 1e-12);
    }

    #[test]
    fn class_names_round_trip() {
        for class in FieldClass::ALL {
            assert_eq!(class.name().parse::<FieldClass>().unwrap(), class);
        }
        assert!("pancake".parse::<FieldClass>().is_err());
    }
}
