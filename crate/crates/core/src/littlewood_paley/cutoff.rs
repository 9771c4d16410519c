/// The smooth cutoff pair `(χ, φ)` generating every dyadic block.
///
/// `χ` is a `C^∞` step equal to 1 on `[0, inner]` and 0 on `[outer, ∞)`,
/// built from the bump `ψ(t) = exp(-1/t)`; `φ(τ) = χ(τ/2) - χ(τ)`. With
/// `inner = 3/4`, `outer = 4/3` this gives `supp φ ⊂ [3/4, 8/3]`, and both
/// `Σ_{j∈ℤ} φ(2^{-j}τ) = 1` (`τ > 0`) and `χ(τ) + Σ_{j≥0} φ(2^{-j}τ) = 1`
/// telescope exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DyadicCutoff {
    inner: f64,
    outer: f64,
}

impl Default for DyadicCutoff {
    fn default() -> Self {
        Self::STANDARD
    }
}

impl DyadicCutoff {
    pub const STANDARD: Self = Self { inner: 0.75, outer: 4.0 / 3.0 };

    /// Support of `φ` as a closed interval.
    pub fn phi_support(&self) -> (f64, f64) {
        (self.inner, 2.0 * self.outer)
    }

    pub fn chi(&self, tau: f64) -> f64 {
        let t = tau.abs();
        if t <= self.inner {
            1.0
        } else if t >= self.outer {
            0.0
        } else {
            smooth_step((self.outer - t) / (self.outer - self.inner))
        }
    }

    pub fn phi(&self, tau: f64) -> f64 {
        self.chi(0.5 * tau) - self.chi(tau)
    }
}

fn bump(t: f64) -> f64 {
    if t > 0.0 { (-1.0 / t).exp() } else { 0.0 }
}

/// `C^∞` transition from 0 at `x ≤ 0` to 1 at `x ≥ 1`.
fn smooth_step(x: f64) -> f64 {
    let a = bump(x);
    a / (a + bump(1.0 - x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn supports() {
        let c = DyadicCutoff::STANDARD;
        for i in 0..=4000 {
            let t = i as f64 * 1e-3;
            if t < 0.75 || t > 8.0 / 3.0 {
                assert_eq!(c.phi(t), 0.0, "phi({t})");
            }
            if t >= 4.0 / 3.0 {
                assert_eq!(c.chi(t), 0.0);
            }
            assert!((0.0..=1.0).contains(&c.chi(t)));
            assert!(c.phi(t) >= 0.0);
        }
        assert_eq!(c.chi(0.0), 1.0);
        assert_eq!(c.phi(1.4), 1.0);
    }

    #[test]
    fn chi_is_monotone() {
        let c = DyadicCutoff::STANDARD;
        let mut prev = 1.0;
        for i in 0..=10_000 {
            let v = c.chi(0.7 + 0.7 * i as f64 / 10_000.0);
            assert!(v <= prev);
            prev = v;
        }
    }
}
