//! Textual norm descriptors for the `norms` command.
//!
//! Grammar: a name, optionally followed by a parenthesized comma list of
//! reals (`inf` accepted).
//!
//! | spec                      | norm                                   |
//! |---------------------------|----------------------------------------|
//! | `L2`, `Linf`, `L(p)`      | grid `L^p`                             |
//! | `H(s)`                    | `Ḣ^s`                                  |
//! | `Haniso(s,s')`            | `Ḣ^{s,s'}`                             |
//! | `Htheta(theta,r)`         | `H^{θ,r}`                              |
//! | `B(s,p,q)`                | `Ḃ^s_{p,q}`                            |
//! | `Baniso(s1,q1,s2,q2,p)`   | `(Ḃ^{s1}_{p,q1})_h (Ḃ^{s2}_{p,q2})_v`  |
//! | `Bp(p)`                   | `Ḃ^{-2+2/p}_{∞,∞}`                     |
//!
//! Multi-component files combine component norms in `ℓ²`, except `L^p`,
//! which is taken of the pointwise Euclidean magnitude.

use crate::error::{Error, Result};
use crate::littlewood_paley::{aniso_besov_norm, besov_norm, AnisoBesovSpec, BesovSpec};
use crate::monitor::bp_norm;
use crate::spectral::{htheta_r_norm, lp_norm, sobolev_aniso_norm, sobolev_iso_norm, RealField, SpectralField};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormSpec {
    Lp(f64),
    Sobolev(f64),
    SobolevAniso(f64, f64),
    HThetaR { theta: f64, r: f64 },
    Besov(BesovSpec),
    BesovAniso(AnisoBesovSpec),
    Bp(f64),
}

fn spec_err(spec: &str, reason: impl Into<String>) -> Error {
    Error::NormSpec { spec: spec.to_string(), reason: reason.into() }
}

impl std::str::FromStr for NormSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        let (name, args) = match t.find('(') {
            Some(i) => {
                let inner = t[i + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| spec_err(text, "missing closing parenthesis"))?;
                let args = inner
                    .split(',')
                    .map(|a| {
                        let a = a.trim();
                        match a {
                            "inf" | "+inf" => Ok(f64::INFINITY),
                            _ => a.parse::<f64>().map_err(|_| spec_err(text, format!("`{a}` is not a real"))),
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                (&t[..i], args)
            }
            None => (t, Vec::new()),
        };
        let want = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(spec_err(text, format!("`{name}` takes {n} argument(s), found {}", args.len())))
            }
        };
        let wrap = |r: Result<NormSpec>| r.map_err(|e| spec_err(text, e.to_string()));
        match name {
            "L2" => want(0).map(|_| NormSpec::Lp(2.0)),
            "Linf" => want(0).map(|_| NormSpec::Lp(f64::INFINITY)),
            "L" => {
                want(1)?;
                if args[0] >= 1.0 { Ok(NormSpec::Lp(args[0])) } else { Err(spec_err(text, "p must be at least 1")) }
            }
            "H" => want(1).map(|_| NormSpec::Sobolev(args[0])),
            "Haniso" => want(2).map(|_| NormSpec::SobolevAniso(args[0], args[1])),
            "Htheta" => {
                want(2)?;
                wrap(crate::spectral::validate_htheta_r(args[0], args[1]).map(|_| NormSpec::HThetaR { theta: args[0], r: args[1] }))
            }
            "B" => {
                want(3)?;
                wrap(BesovSpec::new(args[0], args[1], args[2]).map(NormSpec::Besov))
            }
            "Baniso" => {
                want(5)?;
                wrap(AnisoBesovSpec::new(args[0], args[1], args[2], args[3], args[4]).map(NormSpec::BesovAniso))
            }
            "Bp" => {
                want(1)?;
                if args[0] > 1.0 && args[0].is_finite() {
                    Ok(NormSpec::Bp(args[0]))
                } else {
                    Err(spec_err(text, "p must lie in ]1, +inf["))
                }
            }
            _ => Err(spec_err(text, format!("unknown norm `{name}`"))),
        }
    }
}

impl NormSpec {
    /// Norm of a single spectral field.
    pub fn eval_scalar(&self, a: &SpectralField) -> Result<f64> {
        match *self {
            NormSpec::Lp(p) => crate::littlewood_paley::spectral_lp_norm(a, p),
            NormSpec::Sobolev(s) => sobolev_iso_norm(a, s),
            NormSpec::SobolevAniso(s, sp) => sobolev_aniso_norm(a, s, sp),
            NormSpec::HThetaR { theta, r } => htheta_r_norm(a, theta, r),
            NormSpec::Besov(b) => besov_norm(a, b),
            NormSpec::BesovAniso(b) => aniso_besov_norm(a, b),
            NormSpec::Bp(p) => bp_norm(a, p),
        }
    }

    /// Norm of a field with one or more components.
    pub fn eval(&self, components: &[SpectralField], samples: impl FnOnce() -> Vec<RealField>) -> Result<f64> {
        if let (NormSpec::Lp(p), true) = (self, components.len() > 1) {
            let s = samples();
            let grid = s[0].grid();
            let mag: Vec<f64> = (0..grid.len())
                .map(|i| s.iter().map(|c| c.samples()[i].powi(2)).sum::<f64>().sqrt())
                .collect();
            return lp_norm(&RealField::new(grid, mag)?, *p);
        }
        let mut sum = 0.0;
        for c in components {
            sum += self.eval_scalar(c)?.powi(2);
        }
        Ok(sum.sqrt())
    }
}
