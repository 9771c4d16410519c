//! Empirical audit of the functional inequalities behind the regularity
//! criteria: both sides are evaluated over seeded random ensembles and the
//! worst ratio `lhs/rhs` is tracked across a resolution doubling.
//!
//! On the torus the whole-space constants are unknown, so most cases are
//! `Fitted`: the worst ratio must be finite and grow by at most a factor 2
//! from `N` to `2N`. The vertical-derivative bound (case `i`) holds with
//! constant 1 mode by mode and is checked as `ExactOne`.

mod cases;
mod ensemble;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
pub use ensemble::{make_ensemble, ClassCensus, Ensemble, EnsembleSpec, FieldClass, Member};

/// Tolerance of `ExactOne` cases: `max_ratio ≤ 1 + EXACT_TOLERANCE`.
pub const EXACT_TOLERANCE: f64 = 1e-8;
/// Largest admissible growth of a fitted worst ratio under resolution doubling.
pub const MAX_GROWTH: f64 = 2.0;

/// The inequality catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
    K,
}

impl CaseId {
    pub const ALL: [CaseId; 11] = [
        Self::A,
        Self::B,
        Self::C,
        Self::D,
        Self::E,
        Self::F,
        Self::G,
        Self::H,
        Self::I,
        Self::J,
        Self::K,
    ];

    pub fn label(self) -> char {
        (b'a' + self as u8) as char
    }

    /// Short name of the estimate, used in hypothesis errors.
    pub fn lemma(self) -> &'static str {
        match self {
            Self::A => "signed-power gradient bound",
            Self::B => "signed-power Sobolev interpolation",
            Self::C => "Hölder composition in Besov spaces",
            Self::D => "isotropic to mixed Besov embedding",
            Self::E => "isotropic to anisotropic Besov embedding",
            Self::F => "H^{θ,r} interpolation",
            Self::G => "horizontal velocity bound",
            Self::H => "anisotropic product law",
            Self::I => "vertical derivative bound",
            Self::J => "anisotropic Bernstein inequalities",
            Self::K => "dual Sobolev embedding",
        }
    }

    pub fn lhs_spec(self) -> &'static str {
        match self {
            Self::A => "‖∇a‖_{L^r}",
            Self::B => "‖a‖_{Ḣ^s}",
            Self::C => "‖G(a)‖_{Ḃ^{hs}_{p/h,q/h}}, G(z) = z|z|^{-2α(r)}, h = 1-2α(r)",
            Self::D => "‖a‖_{L^p_h((Ḃ^s_{p,q})_v)}",
            Self::E => "‖a‖_{(Ḃ^{s-θ}_{p,q})_h(Ḃ^θ_{p,1})_v}",
            Self::F => "‖a‖_{(Ḃ^0_{2,1})_h(Ḃ^{1-3α(r)-β}_{2,1})_v}",
            Self::G => "‖v^h‖_{(Ḃ^1_{2,1})_h(Ḃ^{1-3α(r)-β}_{2,1})_v}",
            Self::H => "‖ab‖_{(Ḃ^{s1+s2-2/p2}_{p1,q})_h(Ḃ^{σ1+σ2-1/p2}_{p1,q})_v}",
            Self::I => "‖∂3 v3‖_{H^{θ,r}}",
            Self::J => "Bernstein left side (variant 1-4)",
            Self::K => "‖a‖_{Ḣ^{-3α(r)}}",
        }
    }

    pub fn rhs_spec(self) -> &'static str {
        match self {
            Self::A => "‖∇a_{r/2}‖_{L²} ‖a_{r/2}‖_{L²}^{2/r-1}",
            Self::B => "‖a_{r/2}‖_{L²}^{1-α(r)-s} ‖∇a_{r/2}‖_{L²}^{3α(r)+s}",
            Self::C => "‖G‖_{C^h} ‖a‖_{Ḃ^s_{p,q}}^h",
            Self::D | Self::E => "‖a‖_{Ḃ^s_{p,q}}",
            Self::F => "‖a‖_{H^{θ,r}}^β ‖∇a‖_{H^{θ,r}}^{1-β}",
            Self::G => {
                "‖ω_{r/2}‖_{L²}^{2α(r)+β} ‖∇ω_{r/2}‖_{L²}^{1-β} + ‖∂3v3‖_{H^{θ,r}}^β ‖∇∂3v3‖_{H^{θ,r}}^{1-β}"
            }
            Self::H => "‖a‖_{(Ḃ^{s1}_{p1,q})_h(Ḃ^{σ1}_{p1,q})_v} ‖b‖_{(Ḃ^{s2}_{p2,q})_h(Ḃ^{σ2}_{p2,q})_v}",
            Self::I => "‖v‖_{Ḣ^{1-3α(r)}}",
            Self::J => "Bernstein right side with 2^k = N/8",
            Self::K => "‖a‖_{L^r}",
        }
    }

    /// Parameter names and default values.
    pub fn default_params(self) -> &'static [(&'static str, f64)] {
        const INF: f64 = f64::INFINITY;
        match self {
            Self::A | Self::K => &[("r", 1.8)],
            Self::B => &[("r", 1.8), ("s", 0.0)],
            Self::C => &[("r", 1.8), ("s", 0.5), ("p", 2.0), ("q", 2.0)],
            Self::D => &[("s", 0.5), ("p", 2.0), ("q", 2.0)],
            Self::E => &[("s", 0.5), ("theta", 0.25), ("p", 2.0), ("q", 2.0)],
            Self::F | Self::G => &[("r", 1.8), ("theta", 0.1), ("beta", 0.25)],
            Self::H => &[
                ("p1", 2.0),
                ("p2", 2.0),
                ("q", 2.0),
                ("s1", 0.5),
                ("s2", 0.5),
                ("sigma1", 0.25),
                ("sigma2", 0.25),
            ],
            Self::I => &[("r", 1.8), ("theta", 0.03)],
            Self::J => &[("variant", 1.0), ("p1", INF), ("p2", 2.0), ("q1", INF), ("q2", 2.0)],
        }
    }

    pub fn default_class(self) -> FieldClass {
        match self {
            Self::G | Self::I => FieldClass::DivfreeRandom,
            Self::C => FieldClass::PositiveSmooth,
            _ => FieldClass::BandlimitedRandom,
        }
    }

    pub fn constant_mode(self) -> ConstantMode {
        if self == Self::I { ConstantMode::ExactOne } else { ConstantMode::Fitted }
    }
}

impl std::str::FromStr for CaseId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        Self::ALL
            .into_iter()
            .find(|c| t.len() == 1 && t.starts_with(c.label()))
            .ok_or_else(|| format!("unknown case `{s}` (expected a letter a-k)"))
    }
}

impl std::fmt::Display for CaseId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})", self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstantMode {
    /// The inequality holds with constant 1: `max_ratio ≤ 1 + 1e-8`.
    ExactOne,
    /// Only boundedness is audited: finite ratio, growth ≤ 2 under doubling.
    Fitted,
}

/// Named real parameters of a case.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseParams(BTreeMap<&'static str, f64>);

impl CaseParams {
    pub fn defaults(id: CaseId) -> Self {
        Self(id.default_params().iter().copied().collect())
    }

    pub fn get(&self, key: &str) -> f64 {
        self.0.get(key).copied().unwrap_or(f64::NAN)
    }

    /// Overrides a parameter; names the case does not use are rejected.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        match self.0.iter_mut().find(|(k, _)| **k == key) {
            Some((_, v)) => {
                *v = value;
                Ok(())
            }
            None => Err(Error::Hypothesis {
                lemma: "case parameters",
                detail: format!(
                    "unknown parameter `{key}` (expected one of {})",
                    self.0.keys().copied().collect::<Vec<_>>().join(", ")
                ),
            }),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }
}

impl std::fmt::Display for CaseParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InequalityCase {
    pub id: CaseId,
    pub params: CaseParams,
    pub constant_mode: ConstantMode,
}

impl InequalityCase {
    /// The case with default parameters, validated.
    pub fn new(id: CaseId) -> Result<Self> {
        Self::with_params(id, CaseParams::defaults(id))
    }

    pub fn with_params(id: CaseId, params: CaseParams) -> Result<Self> {
        let case = Self { id, params, constant_mode: id.constant_mode() };
        case.validate()?;
        Ok(case)
    }

    /// Checks the hypotheses of the estimate; `Ok(true)` flags a boundary
    /// configuration, which is audited in fitted mode only.
    pub fn validate(&self) -> Result<bool> {
        cases::validate(self.id, &self.params)
    }
}

/// Ratios of one case over one ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolutionResult {
    pub resolution: usize,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// `lhs/rhs`, 0 for `0/0`; `None` for members excluded by the class filter.
    pub ratios: Vec<Option<f64>>,
    pub max_ratio: f64,
    pub argmax: Option<usize>,
    pub census: ClassCensus,
}

impl ResolutionResult {
    pub fn excluded(&self) -> usize {
        self.ratios.iter().filter(|r| r.is_none()).count()
    }
}

/// Outcome of [`run_case`].
#[derive(Clone, Debug, PartialEq)]
pub struct CaseReport {
    pub case: InequalityCase,
    pub ensemble: EnsembleSpec,
    pub boundary: bool,
    pub results: Vec<ResolutionResult>,
    /// `max_ratio(2N) / max_ratio(N)` (1 when both vanish).
    pub growth: f64,
    pub passed: bool,
    pub failures: Vec<String>,
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 && rhs == 0.0 { 0.0 } else { lhs / rhs }
}

/// Evaluates `case` on one ensemble.
pub fn evaluate(case: &InequalityCase, ensemble: &Ensemble) -> Result<ResolutionResult> {
    case.validate()?;
    let m = &ensemble.members;
    let sides: Vec<Option<(f64, f64)>> = (0..m.len())
        .into_par_iter()
        .map(|i| {
            if case.id == CaseId::C && cases::too_flat(m[i].scalar()) {
                return Ok(None);
            }
            cases::sides(case.id, &case.params, &m[i], &m[(i + 1) % m.len()]).map(Some)
        })
        .collect::<Result<_>>()?;
    let ratios: Vec<Option<f64>> = sides.iter().map(|s| s.map(|(l, r)| ratio(l, r))).collect();
    let (mut max_ratio, mut argmax) = (0.0f64, None);
    for (i, r) in ratios.iter().enumerate() {
        if let Some(r) = *r {
            if argmax.is_none() || r > max_ratio || r.is_nan() {
                max_ratio = r;
                argmax = Some(i);
            }
        }
    }
    Ok(ResolutionResult {
        resolution: ensemble.spec.resolution,
        lhs: sides.iter().map(|s| s.map_or(f64::NAN, |x| x.0)).collect(),
        rhs: sides.iter().map(|s| s.map_or(f64::NAN, |x| x.1)).collect(),
        ratios,
        max_ratio,
        argmax,
        census: ensemble.census.clone(),
    })
}

/// Runs `case` on the ensemble at `ens.resolution` and at twice that
/// resolution, and applies the pass rule of its constant mode.
pub fn run_case(case: &InequalityCase, ens: &EnsembleSpec) -> Result<CaseReport> {
    let boundary = case.validate()?;
    let mut results = Vec::new();
    for n in [ens.resolution, 2 * ens.resolution] {
        results.push(evaluate(case, &make_ensemble(&ens.at_resolution(n))?)?);
    }
    let (m0, m1) = (results[0].max_ratio, results[1].max_ratio);
    let growth = if m0 == 0.0 && m1 == 0.0 { 1.0 } else { m1 / m0 };
    let mut failures = Vec::new();
    for r in &results {
        if !r.max_ratio.is_finite() {
            failures.push(format!("N = {}: max ratio {} is not finite", r.resolution, r.max_ratio));
        }
        if r.argmax.is_none() {
            failures.push(format!("N = {}: every member was excluded", r.resolution));
        }
    }
    match case.constant_mode {
        ConstantMode::ExactOne => {
            for r in &results {
                if r.max_ratio > 1.0 + EXACT_TOLERANCE {
                    failures.push(format!(
                        "N = {}: max ratio {:.17e} exceeds 1 + {EXACT_TOLERANCE:e}",
                        r.resolution, r.max_ratio
                    ));
                }
            }
        }
        ConstantMode::Fitted => {
            if !(growth <= MAX_GROWTH) {
                failures.push(format!("growth factor {growth:.6} from N = {} to N = {} exceeds {MAX_GROWTH}", ens.resolution, 2 * ens.resolution));
            }
        }
    }
    Ok(CaseReport {
        case: case.clone(),
        ensemble: *ens,
        boundary,
        results,
        growth,
        passed: failures.is_empty(),
        failures,
    })
}

impl CaseReport {
    pub const CSV_HEADER: &'static str = "case,resolution,member,lhs,rhs,ratio,excluded";

    /// One row per member and resolution, reals with 17 significant digits.
    pub fn csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.results {
            for (i, ratio) in r.ratios.iter().enumerate() {
                let (ratio, excluded) = match ratio {
                    Some(x) => (*x, 0),
                    None => (f64::NAN, 1),
                };
                writeln!(
                    s,
                    "{},{},{},{:.16e},{:.16e},{:.16e},{}",
                    self.case.id.label(),
                    r.resolution,
                    i,
                    r.lhs[i],
                    r.rhs[i],
                    ratio,
                    excluded
                )
                .expect("write to string");
            }
        }
        s
    }

    pub fn summary(&self) -> String {
        let c = &self.case;
        let mut s = String::new();
        let mode = match c.constant_mode {
            ConstantMode::ExactOne => "exact constant 1",
            ConstantMode::Fitted => "fitted constant",
        };
        writeln!(s, "case {} {}: {} <= C {}", c.id, c.id.lemma(), c.id.lhs_spec(), c.id.rhs_spec()).unwrap();
        writeln!(s, "  params {}; {mode}; ensemble {} x{} seed {}", c.params, self.ensemble.class, self.ensemble.count, self.ensemble.seed).unwrap();
        if self.boundary {
            writeln!(s, "  boundary parameters: audited as fitted only").unwrap();
        }
        for r in &self.results {
            let arg = r.argmax.map_or("-".to_string(), |i| i.to_string());
            writeln!(
                s,
                "  N = {:>3}: max ratio {:.6e} (member {arg}), excluded {}, {} = {:.3e}",
                r.resolution,
                r.max_ratio,
                r.excluded(),
                r.census.quantity,
                r.census.worst
            )
            .unwrap();
        }
        writeln!(s, "  growth {:.4}", self.growth).unwrap();
        for f in &self.failures {
            writeln!(s, "  FAIL: {f}").unwrap();
        }
        writeln!(s, "  {}", if self.passed { "PASS" } else { "FAIL" }).unwrap();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, SpectralField};

    #[test]
    fn ids_parse_and_print() {
        for id in CaseId::ALL {
            assert_eq!(id.label().to_string().parse::<CaseId>().unwrap(), id);
            assert_eq!(id.to_string().parse::<CaseId>().unwrap(), id);
        }
        assert!("l".parse::<CaseId>().is_err());
    }

    #[test]
    fn defaults_satisfy_hypotheses() {
        for id in CaseId::ALL {
            InequalityCase::new(id).unwrap();
        }
    }

    #[test]
    fn violated_hypothesis_names_the_estimate() {
        let mut p = CaseParams::defaults(CaseId::F);
        p.set("beta", 0.5).unwrap();
        let err = InequalityCase::with_params(CaseId::F, p).unwrap_err().to_string();
        assert!(err.contains("interpolation") && err.contains("beta"), "{err}");
        let mut p = CaseParams::defaults(CaseId::H);
        p.set("s1", 1.0).unwrap();
        p.set("q", 1.0).unwrap();
        assert!(InequalityCase::with_params(CaseId::H, p).unwrap().validate().unwrap());
        assert!(CaseParams::defaults(CaseId::A).set("beta", 0.1).is_err());
    }

    #[test]
    fn degenerate_fields_give_ratio_zero() {
        let g = Grid::cubic(8).unwrap();
        let mut constant = SpectralField::zeros(g);
        constant.coeffs_mut()[0] = 2.0.into();
        let zero = Member::Scalar(SpectralField::zeros(g));
        let constant = Member::Scalar(constant);
        for id in [CaseId::A, CaseId::B, CaseId::D, CaseId::E, CaseId::F, CaseId::H, CaseId::J, CaseId::K] {
            let case = InequalityCase::new(id).unwrap();
            for m in [&zero, &constant] {
                let (l, r) = cases::sides(id, &case.params, m, m).unwrap();
                assert_eq!(ratio(l, r), 0.0, "{id}");
            }
        }
    }

    #[test]
    fn exact_case_passes_on_small_ensemble() {
        let case = InequalityCase::new(CaseId::I).unwrap();
        let rep = run_case(&case, &EnsembleSpec::new(11, 8, 8, FieldClass::DivfreeRandom)).unwrap();
        assert!(rep.passed, "{}", rep.summary());
        assert!(rep.results.iter().all(|r| r.max_ratio > 0.0 && r.max_ratio <= 1.0));
        assert!(rep.csv().lines().count() == 1 + 16);
    }

    #[test]
    fn scalar_ensemble_rejected_for_vector_cases() {
        let case = InequalityCase::new(CaseId::G).unwrap();
        assert!(run_case(&case, &EnsembleSpec::new(1, 2, 8, FieldClass::BandlimitedRandom)).is_err());
    }
}
