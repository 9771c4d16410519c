use std::collections::VecDeque;

use num_complex::Complex64;

use super::blocks::{BlockIndex, Direction};
use crate::error::Result;
use crate::spectral::{analyze_onto, check_grids, padded_dims, synthesize_on, SpectralField};

/// The three pieces of Bony's decomposition along one direction:
/// `low_high = T(a,b) = Σ_j S_{j-1}a Δ_j b`, `high_low = T(b,a)` and
/// `remainder = R(a,b) = Σ_j Δ_j a (Δ_{j-1} + Δ_j + Δ_{j+1}) b`.
///
/// Their sum is the alias-free product of the parts of `a` and `b` that the
/// direction's blocks see (everything but the zero-magnitude modes).
#[derive(Clone, Debug)]
pub struct BonyPieces {
    pub low_high: SpectralField,
    pub high_low: SpectralField,
    pub remainder: SpectralField,
}

impl BonyPieces {
    pub fn sum(&self) -> SpectralField {
        let mut s = self.low_high.clone();
        s.add_assign(&self.high_low).expect("pieces share a grid");
        s.add_assign(&self.remainder).expect("pieces share a grid");
        s
    }
}

/// Isotropic decomposition.
pub fn bony_decomposition(a: &SpectralField, b: &SpectralField) -> Result<BonyPieces> {
    decompose(a, b, Direction::Iso)
}

/// `T(a, b) = Σ_j S_{j-1}a Δ_j b`.
pub fn paraproduct_t(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    Ok(decompose(a, b, Direction::Iso)?.low_high)
}

/// `R(a, b) = Σ_j Δ_j a Δ̃_j b`.
pub fn remainder_r(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    Ok(decompose(a, b, Direction::Iso)?.remainder)
}

/// `(T^v, T̄^v, R^v)` built from vertical blocks `Δ_ℓ^v`.
pub fn vertical_bony_split(a: &SpectralField, b: &SpectralField) -> Result<BonyPieces> {
    decompose(a, b, Direction::Vertical)
}

/// `(T^h, T̄^h, R^h)` built from horizontal blocks `Δ_k^h`.
pub fn horizontal_bony_split(a: &SpectralField, b: &SpectralField) -> Result<BonyPieces> {
    decompose(a, b, Direction::Horizontal)
}

fn dyadic(direction: Direction, j: i32) -> BlockIndex {
    match direction {
        Direction::Iso => BlockIndex::Iso(j),
        Direction::Horizontal => BlockIndex::Horizontal(j),
        Direction::Vertical => BlockIndex::Vertical(j),
    }
}

/// Streams over the dyadic index keeping a three-block window of each
/// factor on the padded grid. Low cut-offs are running sums of the blocks
/// already passed (`S_{j-1} = Σ_{j' ≤ j-2} Δ_{j'}`), and the three products
/// accumulate in physical space before a single transform each.
fn decompose(a: &SpectralField, b: &SpectralField, direction: Direction) -> Result<BonyPieces> {
    check_grids(a.grid(), b.grid())?;
    let grid = a.grid();
    let dims = padded_dims(grid);
    let len = dims[0] * dims[1] * dims[2];
    let zero = || vec![Complex64::new(0.0, 0.0); len];

    let range: Vec<i32> = direction.block_range(grid).collect();
    let synth = |f: &SpectralField, j: i32| -> Option<Vec<Complex64>> {
        let blk = super::blocks::block(f, dyadic(direction, j));
        (blk.max_abs() > 0.0).then(|| synthesize_on(&blk, dims))
    };

    let mut wa: VecDeque<Option<Vec<Complex64>>> = VecDeque::new();
    let mut wb: VecDeque<Option<Vec<Complex64>>> = VecDeque::new();
    // window holds blocks j-1, j, j+1 (None = zero block)
    wa.push_back(None);
    wb.push_back(None);
    for &j in range.iter().take(2) {
        wa.push_back(synth(a, j));
        wb.push_back(synth(b, j));
    }
    while wa.len() < 3 {
        wa.push_back(None);
        wb.push_back(None);
    }

    let (mut low_a, mut low_b) = (zero(), zero());
    let (mut t_ab, mut t_ba, mut rem) = (zero(), zero(), zero());
    let mut pending_a: Option<Vec<Complex64>> = None;
    let mut pending_b: Option<Vec<Complex64>> = None;

    for (pos, _) in range.iter().enumerate() {
        // S_{j-1} gains Δ_{j-2}, which left the window last iteration
        if let Some(x) = pending_a.take() {
            add_into(&mut low_a, &x);
        }
        if let Some(x) = pending_b.take() {
            add_into(&mut low_b, &x);
        }
        {
            let (prev_b, cur_a, cur_b, next_b) = (&wb[0], &wa[1], &wb[1], &wb[2]);
            if let Some(cb) = cur_b {
                mul_add(&mut t_ab, &low_a, cb);
            }
            if let Some(ca) = cur_a {
                mul_add(&mut t_ba, &low_b, ca);
                for nb in [prev_b, cur_b, next_b].into_iter().flatten() {
                    mul_add(&mut rem, ca, nb);
                }
            }
        }
        pending_a = wa.pop_front().flatten();
        pending_b = wb.pop_front().flatten();
        let next = range.get(pos + 2).copied();
        wa.push_back(next.and_then(|j| synth(a, j)));
        wb.push_back(next.and_then(|j| synth(b, j)));
    }

    Ok(BonyPieces {
        low_high: analyze_onto(t_ab, dims, grid),
        high_low: analyze_onto(t_ba, dims, grid),
        remainder: analyze_onto(rem, dims, grid),
    })
}

fn add_into(acc: &mut [Complex64], x: &[Complex64]) {
    acc.iter_mut().zip(x).for_each(|(a, b)| *a += b);
}

fn mul_add(acc: &mut [Complex64], x: &[Complex64], y: &[Complex64]) {
    for ((a, b), c) in acc.iter_mut().zip(x).zip(y) {
        *a += b * c;
    }
}
