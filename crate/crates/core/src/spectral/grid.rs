use std::fmt;

use crate::error::{Error, Result};

/// Uniform periodic grid on the box `[0, 2π)³`.
///
/// Samples are stored row-major with `x3` varying fastest: the flat index of
/// `(i1, i2, i3)` is `(i1 * n2 + i2) * n3 + i3`. The same ordering is used
/// for Fourier coefficients, where index `i` along an axis of length `n`
/// carries the integer wavenumber `i` for `i < n/2` and `i - n` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Grid {
    n1: usize,
    n2: usize,
    n3: usize,
}

impl Grid {
    pub fn new(n1: usize, n2: usize, n3: usize) -> Result<Self> {
        let ok = |n: usize| n >= 8 && n % 2 == 0;
        if ok(n1) && ok(n2) && ok(n3) {
            Ok(Self { n1, n2, n3 })
        } else {
            Err(Error::InvalidGrid { n1, n2, n3 })
        }
    }

    pub fn cubic(n: usize) -> Result<Self> {
        Self::new(n, n, n)
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.n1, self.n2, self.n3]
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2 * self.n3
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume of one grid cell, `(2π)³ / (n1 n2 n3)`.
    pub fn cell_volume(&self) -> f64 {
        (2.0 * std::f64::consts::PI).powi(3) / self.len() as f64
    }

    /// Largest representable wavenumber magnitude along each axis (`n/2`).
    pub fn nyquist(&self) -> [i64; 3] {
        [self.n1 as i64 / 2, self.n2 as i64 / 2, self.n3 as i64 / 2]
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize, i3: usize) -> usize {
        (i1 * self.n2 + i2) * self.n3 + i3
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let i3 = idx % self.n3;
        let rest = idx / self.n3;
        [rest / self.n2, rest % self.n2, i3]
    }

    #[inline]
    pub fn wavevector(&self, idx: usize) -> Wavevector {
        let [i1, i2, i3] = self.unravel(idx);
        Wavevector::new(
            wavenumber(i1, self.n1),
            wavenumber(i2, self.n2),
            wavenumber(i3, self.n3),
        )
    }

    /// Flat index of wavevector `k`, or `None` if it is not representable.
    pub fn index_of(&self, k: Wavevector) -> Option<usize> {
        let slot = |k: i64, n: usize| {
            let half = n as i64 / 2;
            (-half..half).contains(&k).then(|| k.rem_euclid(n as i64) as usize)
        };
        Some(self.index(slot(k.k1, self.n1)?, slot(k.k2, self.n2)?, slot(k.k3, self.n3)?))
    }

    /// Flat index of `-k` (modulo the grid).
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let [i1, i2, i3] = self.unravel(idx);
        let neg = |i: usize, n: usize| (n - i) % n;
        self.index(neg(i1, self.n1), neg(i2, self.n2), neg(i3, self.n3))
    }

    /// Coordinates of grid point `idx` in `[0, 2π)³`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let [i1, i2, i3] = self.unravel(idx);
        let h = |n: usize| 2.0 * std::f64::consts::PI / n as f64;
        [i1 as f64 * h(self.n1), i2 as f64 * h(self.n2), i3 as f64 * h(self.n3)]
    }

    pub fn wavevectors(&self) -> impl Iterator<Item = Wavevector> + '_ {
        (0..self.len()).map(move |i| self.wavevector(i))
    }

    /// True when `idx` sits on a Nyquist plane (`k_i = -n_i/2`) of the given
    /// axis (0-based).
    pub fn on_nyquist(&self, idx: usize, axis: usize) -> bool {
        let dims = self.dims();
        self.unravel(idx)[axis] == dims[axis] / 2
    }

    /// True when `idx` sits on the Nyquist plane of any axis.
    pub fn touches_nyquist(&self, idx: usize) -> bool {
        let [i1, i2, i3] = self.unravel(idx);
        i1 == self.n1 / 2 || i2 == self.n2 / 2 || i3 == self.n3 / 2
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.n1, self.n2, self.n3)
    }
}

#[inline]
pub(crate) fn wavenumber(i: usize, n: usize) -> i64 {
    if i < n / 2 { i as i64 } else { i as i64 - n as i64 }
}

/// Integer wavevector `k = (k_h, k3)` with `k_h = (k1, k2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Wavevector {
    pub k1: i64,
    pub k2: i64,
    pub k3: i64,
}

impl Wavevector {
    pub const ZERO: Self = Self { k1: 0, k2: 0, k3: 0 };

    pub const fn new(k1: i64, k2: i64, k3: i64) -> Self {
        Self { k1, k2, k3 }
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    pub fn component(&self, axis: Axis) -> i64 {
        match axis {
            Axis::X1 => self.k1,
            Axis::X2 => self.k2,
            Axis::X3 => self.k3,
        }
    }

    pub fn norm_sq(&self) -> f64 {
        (self.k1 * self.k1 + self.k2 * self.k2 + self.k3 * self.k3) as f64
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn horizontal_norm_sq(&self) -> f64 {
        (self.k1 * self.k1 + self.k2 * self.k2) as f64
    }

    pub fn horizontal_norm(&self) -> f64 {
        self.horizontal_norm_sq().sqrt()
    }

    pub fn vertical_norm(&self) -> f64 {
        self.k3.abs() as f64
    }

    pub fn as_f64(&self) -> [f64; 3] {
        [self.k1 as f64, self.k2 as f64, self.k3 as f64]
    }
}

impl fmt::Display for Wavevector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.k1, self.k2, self.k3)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X1,
    X2,
    X3,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X1, Axis::X2, Axis::X3];

    pub fn index(self) -> usize {
        match self {
            Axis::X1 => 0,
            Axis::X2 => 1,
            Axis::X3 => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_small_axes() {
        assert!(Grid::new(8, 8, 8).is_ok());
        assert!(Grid::new(6, 8, 8).is_err());
        assert!(Grid::new(8, 9, 8).is_err());
        assert!(Grid::cubic(0).is_err());
    }

    #[test]
    fn wavenumbers_cover_the_symmetric_range() {
        let g = Grid::new(8, 10, 12).unwrap();
        let ks: Vec<i64> = (0..8).map(|i| wavenumber(i, 8)).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        for idx in 0..g.len() {
            let k = g.wavevector(idx);
            assert_eq!(g.index_of(k), Some(idx));
            let c = g.conjugate_index(idx);
            let kc = g.wavevector(c);
            // -k wraps at the Nyquist plane
            let wrap = |a: i64, b: i64, n: i64| (a + b).rem_euclid(n) == 0;
            assert!(wrap(k.k1, kc.k1, 8) && wrap(k.k2, kc.k2, 10) && wrap(k.k3, kc.k3, 12));
        }
        assert_eq!(g.index_of(Wavevector::new(4, 0, 0)), None);
    }
}
