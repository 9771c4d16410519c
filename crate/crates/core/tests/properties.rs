use num_complex::Complex64;
use proptest::prelude::*;

use anisoflow::flow::{d3v3, leray_project, VelocityField};
use anisoflow::io::FieldFile;
use anisoflow::lab::{make_ensemble, EnsembleSpec, FieldClass};
use anisoflow::monitor::{directional_critical_norm, prop41_sides, prop51_sides, Monitor, MonitorConfig};
use anisoflow::solver::{initial_random_bandlimited, Solver, SolverConfig};
use anisoflow::spectral::{alpha, htheta_r_norm, sobolev_iso_norm_vec, Grid, SpectralField, Wavevector};

fn divfree(seed: u64, n: usize) -> VelocityField {
    let ens = make_ensemble(&EnsembleSpec::new(seed, 1, n, FieldClass::DivfreeRandom)).unwrap();
    ens.members[0].velocity().unwrap().clone()
}

/// `w(x) = R v(Rᵀx)` for the quarter turn `R(x1, x2, x3) = (-x2, x1, x3)`.
fn quarter_turn(v: &VelocityField) -> VelocityField {
    let g = v.grid();
    let [a, b, c] = v.components();
    let at = |f: &SpectralField, k: Wavevector| {
        let Wavevector { k1, k2, k3 } = k;
        f.coeff(Wavevector::new(k2, -k1, k3)).unwrap_or(Complex64::new(0.0, 0.0))
    };
    VelocityField::new([
        SpectralField::from_fn(g, |k| -at(b, k)),
        SpectralField::from_fn(g, |k| at(a, k)),
        SpectralField::from_fn(g, |k| at(c, k)),
    ])
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn directional_norm_is_rotation_invariant(seed in 0u64..1000, th in 0.0f64..3.14, ph in 0.0f64..6.28, p in 4.1f64..12.0) {
        let v = divfree(seed, 16);
        let e = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
        let re = [-e[1], e[0], e[2]];
        let a = directional_critical_norm(&v, e, p).unwrap();
        let b = directional_critical_norm(&quarter_turn(&v), re, p).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300), "{} vs {}", a, b);
    }

    #[test]
    fn directional_norm_follows_axis_permutation(seed in 0u64..1000, p in 4.1f64..12.0) {
        let v = divfree(seed, 16);
        let [a, b, c] = v.components().clone();
        let g = v.grid();
        let perm = |f: &SpectralField| SpectralField::from_fn(g, |k| {
            let Wavevector { k1, k2, k3 } = k;
            f.coeff(Wavevector::new(k2, k3, k1)).unwrap_or(Complex64::new(0.0, 0.0))
        });
        // w(x1, x2, x3) = (v3, v1, v2)(x2, x3, x1), so (w|e1) is (v|e3) relabelled
        let w = VelocityField::new([perm(&c), perm(&a), perm(&b)]).unwrap();
        let x = directional_critical_norm(&v, [0.0, 0.0, 1.0], p).unwrap();
        let y = directional_critical_norm(&w, [1.0, 0.0, 0.0], p).unwrap();
        prop_assert!((x - y).abs() <= 1e-12 * x, "{} vs {}", x, y);
    }

    #[test]
    fn d3v3_bound_has_constant_one(seed in 0u64..10_000, r in 1.5f64..1.99, t in 0.01f64..0.99) {
        let v = divfree(seed, 16);
        let theta = t * alpha(r);
        let lhs = htheta_r_norm(&d3v3(&v), theta, r).unwrap();
        let rhs = sobolev_iso_norm_vec(v.components(), 1.0 - 3.0 * alpha(r)).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-8), "{} > {}", lhs, rhs);
    }

    #[test]
    fn leray_projection_is_idempotent(seed in 0u64..1000) {
        let v = divfree(seed, 8);
        let again = leray_project(v.components().clone()).unwrap();
        for (x, y) in again.components().iter().zip(v.components()) {
            prop_assert!(x.sub(y).unwrap().max_abs() <= 1e-14 * y.max_abs());
        }
    }

    #[test]
    fn field_files_round_trip(seed in 0u64..1000, n in prop::sample::select(vec![8usize, 10, 12])) {
        let v = initial_random_bandlimited(Grid::new(n, 8, n).unwrap(), seed, (1, 3), -1.0, 1.0).unwrap();
        let file = FieldFile::Spectral(v.components().to_vec());
        let back = FieldFile::decode(&file.encode().unwrap()).unwrap().to_spectral();
        for (x, y) in back.iter().zip(v.components()) {
            prop_assert_eq!(x.coeffs(), y.coeffs());
        }
        let real = FieldFile::Real(file.to_real());
        let back = FieldFile::decode(&real.encode().unwrap()).unwrap();
        prop_assert_eq!(back.to_real(), real.to_real());
    }
}

#[test]
fn fitted_constants_never_shrink_with_longer_histories() {
    let g = Grid::cubic(16).unwrap();
    let cfg = MonitorConfig::new(5.0, 1.8, 0.03, [0.0, 0.0, 1.0], 1).unwrap();
    let mut monitor = Monitor::new(cfg.clone()).unwrap();
    let v0 = initial_random_bandlimited(g, 5, (1, 3), -5.0 / 3.0, 1.0).unwrap();
    let mut solver = Solver::new(g, SolverConfig::new(0.1, 0.01, 0.2).unwrap()).unwrap();
    solver.run(v0, |s| monitor.observe(s).map(|_| ())).unwrap();
    let hist = monitor.history();
    assert_eq!(hist.len(), 21);
    let (mut c41, mut c51) = (0.0, 0.0);
    for k in 1..=hist.len() {
        let a = prop41_sides(&hist[..k], &cfg).unwrap().c_star;
        let b = prop51_sides(&hist[..k], &cfg).unwrap().c_star;
        assert!(a >= c41 && b >= c51, "prefix {k}: {a} < {c41} or {b} < {c51}");
        (c41, c51) = (a, b);
    }
    for w in hist.windows(2) {
        let (x, y) = (&w[0], &w[1]);
        assert!(y.blowup_int >= x.blowup_int && y.grad_om_int >= x.grad_om_int && y.d33v3_int >= x.d33v3_int);
    }
}
