use std::ops::RangeInclusive;

use super::cutoff::DyadicCutoff;
use crate::spectral::{Grid, SpectralField, Wavevector};

/// Which frequency magnitude a block localizes: `|ξ|`, `|ξ_h|` or `|ξ3|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Iso,
    Horizontal,
    Vertical,
}

impl Direction {
    #[inline]
    pub fn magnitude(self, k: Wavevector) -> f64 {
        match self {
            Direction::Iso => k.norm(),
            Direction::Horizontal => k.horizontal_norm(),
            Direction::Vertical => k.vertical_norm(),
        }
    }

    /// Largest magnitude reachable on `grid`.
    pub fn max_magnitude(self, grid: Grid) -> f64 {
        let [a, b, c] = grid.nyquist().map(|n| n as f64);
        match self {
            Direction::Iso => (a * a + b * b + c * c).sqrt(),
            Direction::Horizontal => (a * a + b * b).sqrt(),
            Direction::Vertical => c,
        }
    }

    /// Dyadic indices whose block can be nonzero on `grid`.
    ///
    /// Nonzero integer magnitudes lie in `[1, kmax]`, and `Δ_j` sees
    /// `τ ∈ ]3/4·2^j, 8/3·2^j[`; indices outside the returned range give
    /// identically zero blocks.
    pub fn block_range(self, grid: Grid) -> RangeInclusive<i32> {
        let kmax = self.max_magnitude(grid);
        let lo = (3.0f64 / 8.0).log2().floor() as i32;
        let hi = (4.0 / 3.0 * kmax).log2().ceil() as i32;
        lo..=hi
    }
}

/// One Littlewood-Paley operator: `Δ_j` (`Iso`), `Δ_k^h`, `Δ_ℓ^v`, or the
/// low-frequency cut-offs `S_j`, `S_k^h`, `S_ℓ^v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockIndex {
    Iso(i32),
    Horizontal(i32),
    Vertical(i32),
    LowIso(i32),
    LowH(i32),
    LowV(i32),
}

impl BlockIndex {
    pub fn direction(self) -> Direction {
        match self {
            BlockIndex::Iso(_) | BlockIndex::LowIso(_) => Direction::Iso,
            BlockIndex::Horizontal(_) | BlockIndex::LowH(_) => Direction::Horizontal,
            BlockIndex::Vertical(_) | BlockIndex::LowV(_) => Direction::Vertical,
        }
    }

    pub fn index(self) -> i32 {
        match self {
            BlockIndex::Iso(j)
            | BlockIndex::Horizontal(j)
            | BlockIndex::Vertical(j)
            | BlockIndex::LowIso(j)
            | BlockIndex::LowH(j)
            | BlockIndex::LowV(j) => j,
        }
    }

    fn is_low(self) -> bool {
        matches!(self, BlockIndex::LowIso(_) | BlockIndex::LowH(_) | BlockIndex::LowV(_))
    }

    /// Multiplier value at `k`. Low cut-offs vanish where the localized
    /// magnitude is zero, so `S_j = Σ_{j' < j} Δ_{j'}` holds exactly.
    #[inline]
    pub fn weight(self, k: Wavevector) -> f64 {
        let c = DyadicCutoff::STANDARD;
        let tau = self.direction().magnitude(k);
        let scale = (-self.index() as f64).exp2();
        if self.is_low() {
            if tau == 0.0 { 0.0 } else { c.chi(scale * tau) }
        } else {
            c.phi(scale * tau)
        }
    }
}

/// Applies one block operator.
pub fn block(a: &SpectralField, b: BlockIndex) -> SpectralField {
    let grid = a.grid();
    let mut out = a.clone();
    for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
        let w = b.weight(grid.wavevector(i));
        *c *= w;
    }
    out
}

/// Applies `Δ_k^h Δ_ℓ^v`.
pub fn aniso_block(a: &SpectralField, k: i32, l: i32) -> SpectralField {
    let grid = a.grid();
    let mut out = a.clone();
    for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
        let kv = grid.wavevector(i);
        *c *= BlockIndex::Horizontal(k).weight(kv) * BlockIndex::Vertical(l).weight(kv);
    }
    out
}

/// The part of `a` that the blocks of `direction` can see: `a` minus its
/// modes with zero localized magnitude.
pub fn covered_part(a: &SpectralField, direction: Direction) -> SpectralField {
    a.filter(|k| direction.magnitude(k) > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn unit_mode_is_reconstructed_by_a_few_blocks() {
        let g = Grid::cubic(16).unwrap();
        let k = Wavevector::new(1, 0, 0);
        let m = SpectralField::mode(g, k, Complex64::new(1.0, 0.0)).unwrap();
        let mut sum = SpectralField::zeros(g);
        for j in -2..=2 {
            sum.add_assign(&block(&m, BlockIndex::Iso(j))).unwrap();
        }
        assert!((sum.coeff(k).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn horizontal_blocks_kill_vertical_columns() {
        let g = Grid::cubic(16).unwrap();
        let m = SpectralField::mode(g, Wavevector::new(0, 0, 3), Complex64::new(1.0, 0.0)).unwrap();
        for j in -4..8 {
            assert_eq!(block(&m, BlockIndex::Horizontal(j)).max_abs(), 0.0);
            assert_eq!(block(&m, BlockIndex::LowH(j)).max_abs(), 0.0);
        }
    }

    #[test]
    fn ranges_cover_every_nonzero_block() {
        let g = Grid::new(8, 12, 16).unwrap();
        for dir in [Direction::Iso, Direction::Horizontal, Direction::Vertical] {
            let range = dir.block_range(g);
            for k in g.wavevectors() {
                let tau = dir.magnitude(k);
                if tau == 0.0 {
                    continue;
                }
                let total: f64 = range
                    .clone()
                    .map(|j| DyadicCutoff::STANDARD.phi((-j as f64).exp2() * tau))
                    .sum();
                assert!((total - 1.0).abs() < 1e-14, "{dir:?} {k}");
            }
        }
    }

    #[test]
    fn low_cutoff_equals_sum_of_lower_blocks() {
        let g = Grid::cubic(16).unwrap();
        for k in g.wavevectors().filter(|k| !k.is_zero()) {
            for j in -1..6 {
                let low = BlockIndex::LowIso(j).weight(k);
                let sum: f64 = (-3..j).map(|jj| BlockIndex::Iso(jj).weight(k)).sum();
                assert!((low - sum).abs() < 1e-14);
            }
        }
        assert_eq!(BlockIndex::LowIso(3).weight(Wavevector::ZERO), 0.0);
    }
}
