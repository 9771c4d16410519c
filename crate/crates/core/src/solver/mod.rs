//! Pseudospectral time integration of the incompressible Navier-Stokes
//! equations and of the transport-diffusion equation `∂t a - κΔa + v·∇a = f`.
//!
//! States are kept free of Nyquist-plane modes, so every product is formed
//! from real samples and two real fields share one complex transform.

mod initial;
mod integrator;

pub use initial::{initial_abc, initial_random_bandlimited, initial_taylor_green, shell_spectrum};
pub use integrator::{Integrator, Stepper};

use num_complex::Complex64;

use crate::error::{check_open, Error, Result};
use crate::flow::VelocityField;
use crate::spectral::{analyze_pair, check_grids, padded_dims, synthesize_pair, Grid, SpectralField};

/// Dealiasing of quadratic terms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Dealias {
    /// Products on the 3/2-padded grid.
    #[default]
    ThreeHalvesPad,
    /// Products on the native grid, keeping only `3|k_i| < n_i`.
    TwoThirds,
}

impl std::str::FromStr for Dealias {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "three_halves_pad" => Ok(Self::ThreeHalvesPad),
            "two_thirds" => Ok(Self::TwoThirds),
            _ => Err(format!("unknown dealias rule `{s}` (expected three_halves_pad or two_thirds)")),
        }
    }
}

impl std::fmt::Display for Dealias {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::ThreeHalvesPad => "three_halves_pad",
            Self::TwoThirds => "two_thirds",
        })
    }
}

/// Form of the quadratic term before projection.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NonlinearForm {
    /// `-P div(v ⊗ v)`.
    #[default]
    Divergence,
    /// `P(v × curl v)`.
    Rotational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub integrator: Integrator,
    pub dealias: Dealias,
    pub form: NonlinearForm,
    pub monitor_every: u64,
    /// Test hook: drop the quadratic term and integrate the heat equation.
    pub disable_nonlinearity: bool,
}

impl SolverConfig {
    pub fn new(nu: f64, dt: f64, t_end: f64) -> Result<Self> {
        let cfg = Self {
            nu,
            dt,
            t_end,
            integrator: Integrator::default(),
            dealias: Dealias::default(),
            form: NonlinearForm::default(),
            monitor_every: 1,
            disable_nonlinearity: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_open("nu", self.nu, 0.0, f64::INFINITY)?;
        check_open("dt", self.dt, 0.0, f64::INFINITY)?;
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::OutOfRange { name: "t_end", value: self.t_end, interval: "[0, +inf[".into() });
        }
        if self.monitor_every == 0 {
            return Err(Error::OutOfRange { name: "monitor_every", value: 0.0, interval: "[1, +inf[".into() });
        }
        Ok(())
    }

    /// Number of steps reaching `t_end`; the last step lands on or just past it.
    pub fn step_count(&self) -> u64 {
        let x = self.t_end / self.dt;
        let r = x.round();
        if (x - r).abs() <= 1e-9 * r.max(1.0) { r as u64 } else { x.ceil() as u64 }
    }
}

/// Velocity at one time level.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSnapshot {
    pub time: f64,
    pub velocity: VelocityField,
    pub step_index: u64,
}

impl StateSnapshot {
    pub fn initial(velocity: VelocityField) -> Self {
        Self { time: 0.0, velocity, step_index: 0 }
    }
}

/// Non-fatal events raised while stepping.
#[derive(Clone, Debug, PartialEq)]
pub enum SolverEvent {
    /// `dt · max|v| · k_max ≥ 1` at the start of a step.
    CflWarning { step: u64, time: f64, cfl: f64 },
}

/// Per-mode data shared by the quadratic terms.
#[derive(Clone, Debug)]
struct ModeData {
    grid: Grid,
    dims: [usize; 3],
    /// Wavevector with Nyquist components set to zero.
    k: Vec<[f64; 3]>,
    keep: Option<Vec<bool>>,
}

impl ModeData {
    fn new(grid: Grid, dealias: Dealias) -> Self {
        let n = grid.dims();
        let k = (0..grid.len())
            .map(|i| {
                let kv = grid.wavevector(i).as_f64();
                std::array::from_fn(|a| if grid.on_nyquist(i, a) { 0.0 } else { kv[a] })
            })
            .collect();
        let (dims, keep) = match dealias {
            Dealias::ThreeHalvesPad => (padded_dims(grid), None),
            Dealias::TwoThirds => {
                let keep = grid
                    .wavevectors()
                    .map(|kv| {
                        [kv.k1, kv.k2, kv.k3].iter().zip(n).all(|(&ki, ni)| 3 * ki.unsigned_abs() < ni as u64)
                    })
                    .collect();
                (n, Some(keep))
            }
        };
        Self { grid, dims, k, keep }
    }

    /// Removes Nyquist modes and, under the 2/3 rule, the truncated band.
    fn restrict(&self, f: &mut SpectralField) {
        f.zero_nyquist();
        if let Some(keep) = &self.keep {
            for (c, &k) in f.coeffs_mut().iter_mut().zip(keep) {
                if !k {
                    *c = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    /// `-i Σ_b k_b t[a][b]` for each `a`, Leray-projected when `project`.
    fn divergence(&self, t: &[[&SpectralField; 3]; 3], project: bool) -> [SpectralField; 3] {
        let len = self.grid.len();
        let mut out: [Vec<Complex64>; 3] = std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); len]);
        for i in 0..len {
            let k = self.k[i];
            let mut n = [Complex64::new(0.0, 0.0); 3];
            for a in 0..3 {
                let s: Complex64 = (0..3).map(|b| t[a][b].coeffs()[i] * k[b]).sum();
                n[a] = Complex64::new(s.im, -s.re);
            }
            if project {
                n = project_mode(n, k);
            }
            for a in 0..3 {
                out[a][i] = n[a];
            }
        }
        self.finish(out)
    }

    fn finish(&self, out: [Vec<Complex64>; 3]) -> [SpectralField; 3] {
        out.map(|c| {
            let mut f = SpectralField::new(self.grid, c).expect("length matches grid");
            self.restrict(&mut f);
            f
        })
    }

    /// Quadratic tendency of the NS equations and the largest sampled speed.
    fn ns_tendency(&self, v: &[SpectralField], form: NonlinearForm) -> ([SpectralField; 3], f64) {
        let (u1, u2) = synthesize_pair(&v[0], Some(&v[1]), self.dims);
        let (u3, _) = synthesize_pair(&v[2], None, self.dims);
        let speed = u1
            .iter()
            .zip(&u2)
            .zip(&u3)
            .map(|((a, b), c)| a * a + b * b + c * c)
            .fold(0.0, f64::max)
            .sqrt();
        let u = [&u1, &u2, &u3];
        let prod = |a: usize, b: usize| -> Vec<f64> { u[a].iter().zip(u[b]).map(|(x, y)| x * y).collect() };
        let out = match form {
            NonlinearForm::Divergence => {
                // products carrying v3 share transforms only with each other
                // (t33 meets t12 only through k3 t33), so v3 ≡ 0 stays exactly zero
                let (t11, t22) = analyze_pair(&prod(0, 0), Some(&prod(1, 1)), self.dims, self.grid);
                let (t13, t23) = analyze_pair(&prod(0, 2), Some(&prod(1, 2)), self.dims, self.grid);
                let (t12, t33) = analyze_pair(&prod(0, 1), Some(&prod(2, 2)), self.dims, self.grid);
                self.divergence(&[[&t11, &t12, &t13], [&t12, &t22, &t23], [&t13, &t23, &t33]], true)
            }
            NonlinearForm::Rotational => {
                let w = self.curl(v);
                let (w1, w2) = synthesize_pair(&w[0], Some(&w[1]), self.dims);
                let (w3, _) = synthesize_pair(&w[2], None, self.dims);
                let cross = |a: &[f64], b: &[f64], c: &[f64], d: &[f64]| -> Vec<f64> {
                    (0..a.len()).map(|i| a[i] * b[i] - c[i] * d[i]).collect()
                };
                let c1 = cross(&u2, &w3, &u3, &w2);
                let c2 = cross(&u3, &w1, &u1, &w3);
                let c3 = cross(&u1, &w2, &u2, &w1);
                let (p1, p2) = analyze_pair(&c1, Some(&c2), self.dims, self.grid);
                let (p3, _) = analyze_pair(&c3, None, self.dims, self.grid);
                self.project(&[p1, p2, p3])
            }
        };
        (out, speed)
    }

    fn curl(&self, v: &[SpectralField]) -> [SpectralField; 3] {
        let len = self.grid.len();
        let mut out: [Vec<Complex64>; 3] = std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); len]);
        let i_ = Complex64::i();
        for i in 0..len {
            let k = self.k[i];
            let c = [v[0].coeffs()[i], v[1].coeffs()[i], v[2].coeffs()[i]];
            out[0][i] = i_ * (c[2] * k[1] - c[1] * k[2]);
            out[1][i] = i_ * (c[0] * k[2] - c[2] * k[0]);
            out[2][i] = i_ * (c[1] * k[0] - c[0] * k[1]);
        }
        self.finish(out)
    }

    fn project(&self, u: &[SpectralField; 3]) -> [SpectralField; 3] {
        let len = self.grid.len();
        let mut out: [Vec<Complex64>; 3] = std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); len]);
        for i in 0..len {
            let n = project_mode([u[0].coeffs()[i], u[1].coeffs()[i], u[2].coeffs()[i]], self.k[i]);
            for a in 0..3 {
                out[a][i] = n[a];
            }
        }
        self.finish(out)
    }
}

fn project_mode(n: [Complex64; 3], k: [f64; 3]) -> [Complex64; 3] {
    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if k2 == 0.0 {
        return [Complex64::new(0.0, 0.0); 3];
    }
    let dot = (n[0] * k[0] + n[1] * k[1] + n[2] * k[2]) / k2;
    [n[0] - dot * k[0], n[1] - dot * k[1], n[2] - dot * k[2]]
}

/// `-P[div(v ⊗ v)]` with 3/2-padded products. The viscous term is left to
/// the integrator. Nyquist-plane modes of the tendency are zero.
pub fn ns_rhs(v: &VelocityField) -> [SpectralField; 3] {
    let modes = ModeData::new(v.grid(), Dealias::ThreeHalvesPad);
    let mut u = v.components().clone();
    u.iter_mut().for_each(|c| modes.restrict(c));
    modes.ns_tendency(&u, NonlinearForm::Divergence).0
}

/// Navier-Stokes integrator bound to one grid and configuration.
#[derive(Debug)]
pub struct Solver {
    cfg: SolverConfig,
    modes: ModeData,
    stepper: Stepper,
    kmax: f64,
    events: Vec<SolverEvent>,
}

impl Solver {
    pub fn new(grid: Grid, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let modes = ModeData::new(grid, cfg.dealias);
        let stepper = Stepper::new(grid, cfg.nu, cfg.dt, cfg.integrator);
        let kmax = grid.nyquist().iter().copied().max().unwrap_or(0) as f64;
        Ok(Self { cfg, modes, stepper, kmax, events: Vec::new() })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn grid(&self) -> Grid {
        self.modes.grid
    }

    pub fn events(&self) -> &[SolverEvent] {
        &self.events
    }

    /// The initial velocity restricted to the modes the solver evolves
    /// (Nyquist planes removed; 2/3 band under that rule).
    pub fn prepare(&self, v: VelocityField) -> Result<VelocityField> {
        check_grids(self.grid(), v.grid())?;
        let mut c = v.into_components();
        c.iter_mut().for_each(|f| {
            self.modes.restrict(f);
            f.enforce_hermitian();
        });
        VelocityField::new(c)
    }

    /// Advances one step.
    pub fn step(&mut self, s: &StateSnapshot) -> Result<StateSnapshot> {
        check_grids(self.grid(), s.velocity.grid())?;
        let u: Vec<SpectralField> = s.velocity.components().to_vec();
        let next = if self.cfg.disable_nonlinearity {
            self.stepper.decay(&u)
        } else {
            let mut first_speed = None;
            let (modes, form) = (&self.modes, self.cfg.form);
            let out = self.stepper.advance(&u, |x| {
                let (n, speed) = modes.ns_tendency(x, form);
                first_speed.get_or_insert(speed);
                Ok(n.to_vec())
            })?;
            let cfl = self.cfg.dt * first_speed.unwrap_or(0.0) * self.kmax;
            if cfl >= 1.0 {
                log::warn!("CFL number {cfl:.3} at step {} (t = {})", s.step_index, s.time);
                self.events.push(SolverEvent::CflWarning { step: s.step_index, time: s.time, cfl });
            }
            out
        };
        let step_index = s.step_index + 1;
        let time = step_index as f64 * self.cfg.dt;
        let mut c: [SpectralField; 3] = next.try_into().expect("three components");
        if !c.iter().all(SpectralField::is_finite) {
            return Err(Error::NonFiniteState { step: step_index, time, last_valid_step: s.step_index });
        }
        c.iter_mut().for_each(|f| {
            self.modes.restrict(f);
            f.enforce_hermitian();
        });
        Ok(StateSnapshot { time, velocity: VelocityField::from_parts_unchecked(c), step_index })
    }

    /// Integrates from `v0` to `t_end`, handing every `monitor_every`-th
    /// snapshot (and the initial one) to `emit`. Returns the final state.
    pub fn run<F>(&mut self, v0: VelocityField, mut emit: F) -> Result<StateSnapshot>
    where
        F: FnMut(&StateSnapshot) -> Result<()>,
    {
        let mut s = StateSnapshot::initial(self.prepare(v0)?);
        emit(&s)?;
        let n = self.cfg.step_count();
        for _ in 0..n {
            s = self.step(&s)?;
            if s.step_index % self.cfg.monitor_every == 0 || s.step_index == n {
                emit(&s)?;
            }
        }
        Ok(s)
    }
}

/// One step of the NS system with a freshly built [`Solver`].
pub fn step(s: &StateSnapshot, cfg: &SolverConfig) -> Result<StateSnapshot> {
    Solver::new(s.velocity.grid(), cfg.clone())?.step(s)
}

/// Integrator for `∂t a - κΔa + v·∇a = f` with `v` and `f` frozen in time.
#[derive(Debug)]
pub struct TransportSolver {
    modes: ModeData,
    stepper: Stepper,
    velocity: [Vec<f64>; 3],
    forcing: SpectralField,
}

impl TransportSolver {
    pub fn new(
        v: &VelocityField,
        f: &SpectralField,
        diffusivity: f64,
        dt: f64,
        integrator: Integrator,
        dealias: Dealias,
    ) -> Result<Self> {
        check_open("diffusivity", diffusivity, 0.0, f64::INFINITY)?;
        check_open("dt", dt, 0.0, f64::INFINITY)?;
        let grid = v.grid();
        check_grids(grid, f.grid())?;
        let modes = ModeData::new(grid, dealias);
        let mut vc = v.components().clone();
        vc.iter_mut().for_each(|c| modes.restrict(c));
        let (v1, v2) = synthesize_pair(&vc[0], Some(&vc[1]), modes.dims);
        let (v3, _) = synthesize_pair(&vc[2], None, modes.dims);
        let mut forcing = f.clone();
        modes.restrict(&mut forcing);
        let stepper = Stepper::new(grid, diffusivity, dt, integrator);
        Ok(Self { modes, stepper, velocity: [v1, v2, v3], forcing })
    }

    /// Restricts `a` to the evolved modes.
    pub fn prepare(&self, a: &SpectralField) -> SpectralField {
        let mut a = a.clone();
        self.modes.restrict(&mut a);
        a.enforce_hermitian();
        a
    }

    /// `f - div(v a)`, which equals `f - v·∇a` for divergence-free `v`.
    pub fn tendency(&self, a: &SpectralField) -> SpectralField {
        let (sa, _) = synthesize_pair(a, None, self.modes.dims);
        let prod = |c: usize| -> Vec<f64> { self.velocity[c].iter().zip(&sa).map(|(x, y)| x * y).collect() };
        let (p1, p2) = analyze_pair(&prod(0), Some(&prod(1)), self.modes.dims, self.modes.grid);
        let (p3, _) = analyze_pair(&prod(2), None, self.modes.dims, self.modes.grid);
        let z = SpectralField::zeros(self.modes.grid);
        let [mut d, _, _] = self.modes.divergence(&[[&p1, &p2, &p3], [&z, &z, &z], [&z, &z, &z]], false);
        d.add_assign(&self.forcing).expect("same grid");
        d
    }

    pub fn step(&self, a: &SpectralField) -> Result<SpectralField> {
        check_grids(self.modes.grid, a.grid())?;
        let out = self.stepper.advance(std::slice::from_ref(a), |x| Ok(vec![self.tendency(&x[0])]))?;
        let mut next = out.into_iter().next().expect("one component");
        if !next.is_finite() {
            return Err(Error::NonFiniteState { step: 1, time: self.stepper.dt(), last_valid_step: 0 });
        }
        self.modes.restrict(&mut next);
        next.enforce_hermitian();
        Ok(next)
    }
}

/// One step of `∂t a - Δa + v·∇a = f` (unit diffusivity, default integrator
/// and dealiasing).
pub fn transport_diffusion_step(
    a: &SpectralField,
    v: &VelocityField,
    f: &SpectralField,
    dt: f64,
) -> Result<SpectralField> {
    let solver = TransportSolver::new(v, f, 1.0, dt, Integrator::default(), Dealias::default())?;
    solver.step(&solver.prepare(a))
}
