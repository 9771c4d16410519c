//! Time series of the scale-critical quantities that control regularity:
//! the directional blow-up functional `∫ ‖(v|e)‖^p_{Ḣ^{1/2+2/p}}`, the
//! vorticity quantities `‖ω‖_{L^r}`, `∫ ‖∇ω_{r/2}‖²`, the `H^{θ,r}` norms of
//! `∂3 v3`, and both sides of the two a priori estimates that combine them.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::flow::{excluded_horizontal_energy, signed_power_norms, vertical_vorticity, VelocityField};
use crate::littlewood_paley::{besov_norm, BesovSpec};
use crate::solver::StateSnapshot;
use crate::spectral::{
    alpha, htheta_r_norm, inverse_transform, lp_norm_samples, sobolev_iso_norm, spectral_derivative,
    Axis, SpectralField,
};

/// Exponents, direction and cadence of the monitor.
#[derive(Clone, Debug, PartialEq)]
pub struct MonitorConfig {
    pub p: f64,
    pub r: f64,
    pub theta: f64,
    pub e: [f64; 3],
    pub cadence: u64,
}

impl MonitorConfig {
    pub fn new(p: f64, r: f64, theta: f64, e: [f64; 3], cadence: u64) -> Result<Self> {
        let cfg = Self { p, r, theta, e, cadence };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks `r ∈ [3/2, 2[`, `p ∈ ]4, 2r/(2-r)[`,
    /// `θ ∈ ]max(0, 3α(r) - 2/p), α(r)[`, `|e| = 1` and `cadence ≥ 1`.
    pub fn validate(&self) -> Result<()> {
        let (p, r, theta) = (self.p, self.r, self.theta);
        if !(1.5..2.0).contains(&r) {
            return Err(Error::OutOfRange { name: "r", value: r, interval: "[3/2, 2[".into() });
        }
        let p_hi = 2.0 * r / (2.0 - r);
        // 2r/(2-r) is rounded up for decimal r (r = 1.8 gives 18.000000000000004),
        // so the endpoint typed as a decimal must still be rejected
        if !(p > 4.0 && p < p_hi * (1.0 - 1e-12)) {
            return Err(Error::OutOfRange {
                name: "p",
                value: p,
                interval: format!("]4, 2r/(2-r)[ = ]4, {p_hi}[ for r = {r}"),
            });
        }
        let a = alpha(r);
        let lo = 3.0 * a - 2.0 / p;
        if !(theta > 0.0 && theta < a) {
            return Err(Error::OutOfRange {
                name: "theta",
                value: theta,
                interval: format!("]0, α(r)[ = ]0, {a}[ for r = {r}"),
            });
        }
        if theta <= lo {
            return Err(Error::OutOfRange {
                name: "theta",
                value: theta,
                interval: format!("]3α(r) - 2/p, α(r)[ = ]{lo}, {a}[ for r = {r}, p = {p}"),
            });
        }
        check_unit(self.e)?;
        if self.cadence == 0 {
            return Err(Error::OutOfRange { name: "cadence", value: 0.0, interval: "[1, +inf[".into() });
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        alpha(self.r)
    }

    /// Exponent `1/2 + 2/p` of the critical norm.
    pub fn critical_exponent(&self) -> f64 {
        0.5 + 2.0 / self.p
    }
}

fn check_unit(e: [f64; 3]) -> Result<()> {
    let n = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
    if (n - 1.0).abs() > 1e-12 {
        return Err(Error::OutOfRange { name: "|e|", value: n, interval: "{1} (to 1e-12)".into() });
    }
    Ok(())
}

/// `‖(v|e)‖_{Ḣ^{1/2+2/p}}`.
pub fn directional_critical_norm(v: &VelocityField, e: [f64; 3], p: f64) -> Result<f64> {
    check_unit(e)?;
    if !(p > 4.0 && p.is_finite()) {
        return Err(Error::OutOfRange { name: "p", value: p, interval: "]4, +inf[".into() });
    }
    sobolev_iso_norm(&v.project_onto(e), 0.5 + 2.0 / p)
}

/// `‖a‖_{𝓑_p}` with `𝓑_p = Ḃ^{-2+2/p}_{∞,∞}`: `sup_j 2^{j(-2+2/p)} ‖Δ_j a‖_{L^∞}`.
pub fn bp_norm(a: &SpectralField, p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::OutOfRange { name: "p", value: p, interval: "]1, +inf[".into() });
    }
    besov_norm(a, BesovSpec::new(-2.0 + 2.0 / p, f64::INFINITY, f64::INFINITY)?)
}

/// One row of the monitor time series. Fields ending in `_int` are
/// trapezoidal running integrals from the first record.
#[derive(Clone, Debug, PartialEq)]
pub struct MonitorRecord {
    pub time: f64,
    pub step_index: u64,
    /// `‖(v|e)‖_{Ḣ^{1/2+2/p}}`
    pub v3_crit: f64,
    /// `∫ v3_crit^p`
    pub blowup_int: f64,
    /// `‖v3‖_{Ḣ^{1/2+2/p}}` (vertical direction, used by both estimates)
    pub vert_crit: f64,
    /// `∫ vert_crit^p`
    pub vert_int: f64,
    /// `‖ω‖_{L^r}`
    pub omega_lr: f64,
    /// `‖ω_{r/2}‖_{L²}`
    pub omega_half_l2: f64,
    /// `‖∇ω_{r/2}‖²_{L²}`
    pub grad_om_sq: f64,
    pub grad_om_int: f64,
    /// `‖∂3² v3‖²_{H^{θ,r}}`
    pub d33v3_sq: f64,
    pub d33v3_int: f64,
    /// `‖∂3 v3‖²_{H^{θ,r}}`
    pub d3v3_sq: f64,
    /// `‖∇∂3 v3‖²_{H^{θ,r}}`
    pub grad_d3v3_sq: f64,
    pub grad_d3v3_int: f64,
    /// Integrand of the right side of the `∂3 v3` estimate.
    pub d3v3_forcing: f64,
    pub d3v3_forcing_int: f64,
    /// `max_{k,ℓ} ‖∂_ℓ v^k‖_{𝓑_p}`
    pub bp_max: f64,
    /// Fraction of horizontal kinetic energy on `k_h = 0` modes.
    pub excluded_energy: f64,
    /// `(1/r)‖ω_{r/2}(0)‖²_{L²}`
    pub omega0_term: f64,
    /// `‖Ω(0)‖²_{L^r}` with `Ω = curl v`
    pub vorticity0_term: f64,
    /// `(1/r)‖ω_{r/2}‖² + ((r-1)/r²) grad_om_int`
    pub prop41_lhs: f64,
    /// `omega0_term + d33v3_int^{r/2}`, the bracket multiplying `exp(C vert_int)`.
    pub prop41_rhs: f64,
    /// `d3v3_sq + grad_d3v3_int`
    pub prop51_lhs: f64,
    /// `vorticity0_term + d3v3_forcing_int`, the bracket multiplying `C exp(C vert_int)`.
    pub prop51_rhs: f64,
    pub finite: bool,
}

/// Column names of the CSV time series, in output order.
pub const CSV_COLUMNS: [&str; 27] = [
    "time",
    "step_index",
    "v3_crit",
    "blowup_int",
    "vert_crit",
    "vert_int",
    "omega_lr",
    "omega_half_l2",
    "grad_om_sq",
    "grad_om_int",
    "d33v3_sq",
    "d33v3_int",
    "d3v3_sq",
    "grad_d3v3_sq",
    "grad_d3v3_int",
    "d3v3_forcing",
    "d3v3_forcing_int",
    "bp_max",
    "excluded_energy",
    "omega0_term",
    "vorticity0_term",
    "prop41_lhs",
    "prop41_rhs",
    "prop51_lhs",
    "prop51_rhs",
    "finite",
    "csv_version",
];

/// Version of the CSV column layout.
pub const CSV_VERSION: u32 = 1;

impl MonitorRecord {
    fn values(&self) -> [f64; 23] {
        [
            self.v3_crit,
            self.blowup_int,
            self.vert_crit,
            self.vert_int,
            self.omega_lr,
            self.omega_half_l2,
            self.grad_om_sq,
            self.grad_om_int,
            self.d33v3_sq,
            self.d33v3_int,
            self.d3v3_sq,
            self.grad_d3v3_sq,
            self.grad_d3v3_int,
            self.d3v3_forcing,
            self.d3v3_forcing_int,
            self.bp_max,
            self.excluded_energy,
            self.omega0_term,
            self.vorticity0_term,
            self.prop41_lhs,
            self.prop41_rhs,
            self.prop51_lhs,
            self.prop51_rhs,
        ]
    }

    pub fn csv_header() -> String {
        CSV_COLUMNS.join(",")
    }

    /// One CSV row, reals with 17 significant digits.
    pub fn csv_row(&self) -> String {
        let mut s = format!("{:.16e},{}", self.time, self.step_index);
        for x in self.values() {
            write!(s, ",{x:.16e}").expect("write to string");
        }
        write!(s, ",{},{}", self.finite as u8, CSV_VERSION).expect("write to string");
        s
    }
}

/// Instantaneous quantities of one snapshot.
struct Instant {
    v3_crit: f64,
    vert_crit: f64,
    omega_lr: f64,
    omega_half_l2: f64,
    grad_om_sq: f64,
    d33v3_sq: f64,
    d3v3_sq: f64,
    grad_d3v3_sq: f64,
    bp_max: f64,
    excluded_energy: f64,
}

fn instant(v: &VelocityField, cfg: &MonitorConfig) -> Result<Instant> {
    let (p, r, theta) = (cfg.p, cfg.r, cfg.theta);
    let s = cfg.critical_exponent();
    let omega = vertical_vorticity(v);
    let sp = signed_power_norms(&omega, r / 2.0)?;
    let v3 = v.component(Axis::X3);
    let d3v3 = spectral_derivative(v3, Axis::X3);
    let d33v3 = spectral_derivative(&d3v3, Axis::X3);
    let mut grad_d3v3_sq = 0.0;
    for ax in Axis::ALL {
        grad_d3v3_sq += htheta_r_norm(&spectral_derivative(&d3v3, ax), theta, r)?.powi(2);
    }
    let mut bp_max = 0.0f64;
    for c in v.components() {
        for ax in Axis::ALL {
            bp_max = bp_max.max(bp_norm(&spectral_derivative(c, ax), p)?);
        }
    }
    Ok(Instant {
        v3_crit: sobolev_iso_norm(&v.project_onto(cfg.e), s)?,
        vert_crit: sobolev_iso_norm(v3, s)?,
        omega_lr: sp.value_l2.powf(2.0 / r),
        omega_half_l2: sp.value_l2,
        grad_om_sq: sp.grad_l2.powi(2),
        d33v3_sq: htheta_r_norm(&d33v3, theta, r)?.powi(2),
        d3v3_sq: htheta_r_norm(&d3v3, theta, r)?.powi(2),
        grad_d3v3_sq,
        bp_max,
        excluded_energy: excluded_horizontal_energy(v),
    })
}

/// `‖ |curl v| ‖_{L^r}` on the grid.
fn vorticity_lr(v: &VelocityField, r: f64) -> Result<f64> {
    let w = v.curl().map(|c| inverse_transform(&c));
    let grid = v.grid();
    let mag: Vec<f64> = (0..grid.len())
        .map(|i| w.iter().map(|c| c.samples()[i].powi(2)).sum::<f64>().sqrt())
        .collect();
    lp_norm_samples(&mag, grid.cell_volume(), r)
}

/// `v3_crit ‖ω_{r/2}‖^{2(2α+1/p)} ‖∇ω_{r/2}‖^{2/p'} + v3_crit² ‖ω_{r/2}‖^{4(α+1/p)} ‖∇ω_{r/2}‖^{2(1-2/p)}`.
fn d3v3_forcing(q: &Instant, cfg: &MonitorConfig) -> f64 {
    let (p, a) = (cfg.p, cfg.alpha());
    let w = q.omega_half_l2;
    let g = q.grad_om_sq.sqrt();
    let p_conj = p / (p - 1.0);
    q.vert_crit * w.powf(2.0 * (2.0 * a + 1.0 / p)) * g.powf(2.0 / p_conj)
        + q.vert_crit.powi(2) * w.powf(4.0 * (a + 1.0 / p)) * g.powf(2.0 * (1.0 - 2.0 / p))
}

/// Builds the record of `snapshot`, accumulating time integrals from `prev`
/// by the trapezoidal rule. `prev = None` starts a new series.
pub fn accumulate(
    prev: Option<&MonitorRecord>,
    snapshot: &StateSnapshot,
    cfg: &MonitorConfig,
) -> Result<MonitorRecord> {
    cfg.validate()?;
    let v = &snapshot.velocity;
    let q = instant(v, cfg)?;
    let forcing = d3v3_forcing(&q, cfg);
    let r = cfg.r;
    let (omega0_term, vorticity0_term) = match prev {
        Some(p) => (p.omega0_term, p.vorticity0_term),
        None => (q.omega_half_l2.powi(2) / r, vorticity_lr(v, r)?.powi(2)),
    };
    let trap = |prev_val: f64, prev_int: f64, now: f64| -> f64 {
        match prev {
            Some(p) => prev_int + 0.5 * (snapshot.time - p.time) * (prev_val + now),
            None => 0.0,
        }
    };
    if let Some(p) = prev {
        if !(snapshot.time > p.time) {
            return Err(Error::NonMonotoneTime { time: snapshot.time, previous: p.time });
        }
    }
    let (pb, pv) = (q.v3_crit.powf(cfg.p), q.vert_crit.powf(cfg.p));
    let prev_or = |f: fn(&MonitorRecord) -> (f64, f64)| prev.map(f).unwrap_or((0.0, 0.0));
    let blowup_int = trap_pow(prev, |p| (p.v3_crit, p.blowup_int), snapshot.time, pb, cfg.p);
    let vert_int = trap_pow(prev, |p| (p.vert_crit, p.vert_int), snapshot.time, pv, cfg.p);
    let (g0, gi) = prev_or(|p| (p.grad_om_sq, p.grad_om_int));
    let grad_om_int = trap(g0, gi, q.grad_om_sq);
    let (d0, di) = prev_or(|p| (p.d33v3_sq, p.d33v3_int));
    let d33v3_int = trap(d0, di, q.d33v3_sq);
    let (e0, ei) = prev_or(|p| (p.grad_d3v3_sq, p.grad_d3v3_int));
    let grad_d3v3_int = trap(e0, ei, q.grad_d3v3_sq);
    let (f0, fi) = prev_or(|p| (p.d3v3_forcing, p.d3v3_forcing_int));
    let d3v3_forcing_int = trap(f0, fi, forcing);

    let mut rec = MonitorRecord {
        time: snapshot.time,
        step_index: snapshot.step_index,
        v3_crit: q.v3_crit,
        blowup_int,
        vert_crit: q.vert_crit,
        vert_int,
        omega_lr: q.omega_lr,
        omega_half_l2: q.omega_half_l2,
        grad_om_sq: q.grad_om_sq,
        grad_om_int,
        d33v3_sq: q.d33v3_sq,
        d33v3_int,
        d3v3_sq: q.d3v3_sq,
        grad_d3v3_sq: q.grad_d3v3_sq,
        grad_d3v3_int,
        d3v3_forcing: forcing,
        d3v3_forcing_int,
        bp_max: q.bp_max,
        excluded_energy: q.excluded_energy,
        omega0_term,
        vorticity0_term,
        prop41_lhs: q.omega_half_l2.powi(2) / r + (r - 1.0) / (r * r) * grad_om_int,
        prop41_rhs: omega0_term + d33v3_int.powf(r / 2.0),
        prop51_lhs: q.d3v3_sq + grad_d3v3_int,
        prop51_rhs: vorticity0_term + d3v3_forcing_int,
        finite: true,
    };
    rec.finite = rec.values().iter().all(|x| x.is_finite()) && rec.time.is_finite();
    Ok(rec)
}

fn trap_pow(
    prev: Option<&MonitorRecord>,
    get: fn(&MonitorRecord) -> (f64, f64),
    time: f64,
    now_pow: f64,
    p: f64,
) -> f64 {
    match prev {
        Some(rec) => {
            let (val, int) = get(rec);
            int + 0.5 * (time - rec.time) * (val.powf(p) + now_pow)
        }
        None => 0.0,
    }
}

/// Accumulates records over a snapshot sequence; a record with a
/// non-finite entry ends the series.
#[derive(Clone, Debug)]
pub struct Monitor {
    cfg: MonitorConfig,
    history: Vec<MonitorRecord>,
}

impl Monitor {
    pub fn new(cfg: MonitorConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg, history: Vec::new() })
    }

    pub fn config(&self) -> &MonitorConfig {
        &self.cfg
    }

    pub fn history(&self) -> &[MonitorRecord] {
        &self.history
    }

    pub fn into_history(self) -> Vec<MonitorRecord> {
        self.history
    }

    /// Records `snapshot`. Fails once a non-finite record has been stored.
    pub fn observe(&mut self, snapshot: &StateSnapshot) -> Result<&MonitorRecord> {
        if let Some(last) = self.history.last() {
            if !last.finite {
                return Err(Error::NonFiniteState {
                    step: snapshot.step_index,
                    time: snapshot.time,
                    last_valid_step: last.step_index.saturating_sub(1),
                });
            }
        }
        let rec = accumulate(self.history.last(), snapshot, &self.cfg)?;
        self.history.push(rec);
        Ok(self.history.last().expect("just pushed"))
    }
}

/// Both sides of one estimate along a history, with the fitted constant.
#[derive(Clone, Debug, PartialEq)]
pub struct SidesReport {
    pub time: Vec<f64>,
    pub lhs: Vec<f64>,
    /// Right side evaluated with `c_star`.
    pub rhs: Vec<f64>,
    /// Smallest `C ≥ 0` with `lhs ≤ rhs` at every time (`+inf` if none).
    pub c_star: f64,
    /// `lhs / rhs` (0 when both vanish).
    pub ratio: Vec<f64>,
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 { 0.0 } else { lhs / rhs }
}

/// `lhs ≤ core · exp(C ∫ ‖v3‖^p)`; the fitted `C*` is
/// `max(0, max_t ln(lhs/core) / ∫ ‖v3‖^p)`.
pub fn prop41_sides(history: &[MonitorRecord], cfg: &MonitorConfig) -> Result<SidesReport> {
    cfg.validate()?;
    if history.is_empty() {
        return Err(Error::EmptyHistory);
    }
    let mut c_star = 0.0f64;
    for rec in history {
        let (lhs, core, int) = (rec.prop41_lhs, rec.prop41_rhs, rec.vert_int);
        if lhs > core {
            c_star = c_star.max(if int > 0.0 { (lhs / core).ln() / int } else { f64::INFINITY });
        }
    }
    let rhs: Vec<f64> = history.iter().map(|r| r.prop41_rhs * (c_star * r.vert_int).exp()).collect();
    Ok(report(history, |r| r.prop41_lhs, rhs, c_star))
}

/// `lhs ≤ C exp(C ∫ ‖v3‖^p) · core`; `C*` solves `C e^{C I} = lhs/core`
/// through the Lambert W function at the worst time.
pub fn prop51_sides(history: &[MonitorRecord], cfg: &MonitorConfig) -> Result<SidesReport> {
    cfg.validate()?;
    if history.is_empty() {
        return Err(Error::EmptyHistory);
    }
    let mut c_star = 0.0f64;
    for rec in history {
        let (lhs, core, int) = (rec.prop51_lhs, rec.prop51_rhs, rec.vert_int);
        let c = if lhs == 0.0 {
            0.0
        } else if core == 0.0 {
            f64::INFINITY
        } else if int == 0.0 {
            lhs / core
        } else {
            lambert_w0(lhs / core * int) / int
        };
        c_star = c_star.max(c);
    }
    let rhs: Vec<f64> =
        history.iter().map(|r| c_star * (c_star * r.vert_int).exp() * r.prop51_rhs).collect();
    Ok(report(history, |r| r.prop51_lhs, rhs, c_star))
}

fn report(history: &[MonitorRecord], lhs: fn(&MonitorRecord) -> f64, rhs: Vec<f64>, c_star: f64) -> SidesReport {
    let lhs: Vec<f64> = history.iter().map(lhs).collect();
    SidesReport {
        time: history.iter().map(|r| r.time).collect(),
        ratio: lhs.iter().zip(&rhs).map(|(&l, &r)| ratio(l, r)).collect(),
        lhs,
        rhs,
        c_star,
    }
}

/// Principal branch of the Lambert W function for `x ≥ 0`.
pub fn lambert_w0(x: f64) -> f64 {
    if x == 0.0 || x.is_nan() {
        return x;
    }
    if x.is_infinite() {
        return f64::INFINITY;
    }
    let mut w = if x < 1.0 { x } else { x.ln() - x.ln().ln().max(0.0) };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        // Halley step
        let step = f / (ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0));
        w -= step;
        if step.abs() <= 1e-15 * w.abs().max(1e-300) {
            break;
        }
    }
    w
}
