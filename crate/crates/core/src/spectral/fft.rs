//! Unnormalized complex 3D FFT over row-major arrays of arbitrary shape.
//!
//! Lines along each axis are transformed in parallel; every output element
//! is produced by exactly one sequential 1D transform, so results are
//! bit-identical across runs and thread counts.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

static PLANS: LazyLock<Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)>> =
    LazyLock::new(|| Mutex::new((FftPlanner::new(), HashMap::new())));

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    let forward = direction == FftDirection::Forward;
    let mut guard = PLANS.lock().expect("fft plan cache poisoned");
    let (planner, cache) = &mut *guard;
    cache
        .entry((n, forward))
        .or_insert_with(|| planner.plan_fft(n, direction))
        .clone()
}

/// In-place unnormalized transform of `data` with shape `dims`.
pub(crate) fn fft3(data: &mut [Complex64], dims: [usize; 3], direction: FftDirection) {
    let [n1, n2, n3] = dims;
    assert_eq!(data.len(), n1 * n2 * n3, "fft3 buffer does not match shape");

    // x3: contiguous lines
    let f3 = plan(n3, direction);
    data.par_chunks_mut(n2 * n3).for_each(|slab| {
        let mut scratch = vec![ZERO; f3.get_inplace_scratch_len()];
        f3.process_with_scratch(slab, &mut scratch);
    });

    // x2: strided lines inside each slab
    let f2 = plan(n2, direction);
    data.par_chunks_mut(n2 * n3).for_each(|slab| strided_pass(slab, n2, n3, &*f2));

    // x1: columns of the (n1, n2*n3) matrix, gathered in parallel groups
    let f1 = plan(n1, direction);
    let m = n2 * n3;
    let groups: Vec<usize> = (0..m).step_by(GROUP).collect();
    let done: Vec<Vec<Complex64>> = groups
        .par_iter()
        .map(|&c0| {
            let w = GROUP.min(m - c0);
            let mut buf = gather(data, n1, m, c0, w);
            let mut scratch = vec![ZERO; f1.get_inplace_scratch_len()];
            f1.process_with_scratch(&mut buf, &mut scratch);
            buf
        })
        .collect();
    for (&c0, buf) in groups.iter().zip(&done) {
        scatter(buf, data, n1, m, c0, GROUP.min(m - c0));
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const GROUP: usize = 16;

/// Transforms the `cols` strided lines of length `n` in a row-major
/// `(n, cols)` block, `GROUP` columns at a time.
fn strided_pass(block: &mut [Complex64], n: usize, cols: usize, fft: &dyn Fft<f64>) {
    let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
    for c0 in (0..cols).step_by(GROUP) {
        let w = GROUP.min(cols - c0);
        let mut buf = gather(block, n, cols, c0, w);
        fft.process_with_scratch(&mut buf, &mut scratch);
        scatter(&buf, block, n, cols, c0, w);
    }
}

/// Columns `c0..c0+w` of a row-major `(n, cols)` block as `w` contiguous lines.
fn gather(block: &[Complex64], n: usize, cols: usize, c0: usize, w: usize) -> Vec<Complex64> {
    let mut buf = vec![ZERO; n * w];
    for r in 0..n {
        let row = &block[r * cols + c0..r * cols + c0 + w];
        for (b, &x) in row.iter().enumerate() {
            buf[b * n + r] = x;
        }
    }
    buf
}

fn scatter(buf: &[Complex64], block: &mut [Complex64], n: usize, cols: usize, c0: usize, w: usize) {
    for r in 0..n {
        let row = &mut block[r * cols + c0..r * cols + c0 + w];
        for (b, x) in row.iter_mut().enumerate() {
            *x = buf[b * n + r];
        }
    }
}

/// Copies the spectrum on grid `from` into grid `to`, matching integer
/// wavevectors. Modes of `from` not representable on `to` are dropped and
/// new modes of `to` are zero. This is zero padding when `to` is larger and
/// sharp truncation when it is smaller.
pub(crate) fn resample_spectrum(
    src: &[Complex64],
    from: [usize; 3],
    to: [usize; 3],
) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); to[0] * to[1] * to[2]];
    let axis_map = |nf: usize, nt: usize| -> Vec<Option<usize>> {
        (0..nf)
            .map(|i| {
                let k = signed_wavenumber(i, nf);
                let (lo, hi) = wavenumber_bounds(nt);
                (k >= lo && k <= hi).then(|| k.rem_euclid(nt as i64) as usize)
            })
            .collect()
    };
    let m1 = axis_map(from[0], to[0]);
    let m2 = axis_map(from[1], to[1]);
    let m3 = axis_map(from[2], to[2]);
    for (i1, j1) in m1.iter().enumerate() {
        let Some(j1) = j1 else { continue };
        for (i2, j2) in m2.iter().enumerate() {
            let Some(j2) = j2 else { continue };
            let src_row = (i1 * from[1] + i2) * from[2];
            let dst_row = (j1 * to[1] + j2) * to[2];
            for (i3, j3) in m3.iter().enumerate() {
                if let Some(j3) = j3 {
                    out[dst_row + j3] = src[src_row + i3];
                }
            }
        }
    }
    out
}

/// Wavenumber of index `i` on an axis of length `n` (odd lengths allowed).
#[inline]
pub(crate) fn signed_wavenumber(i: usize, n: usize) -> i64 {
    let (_, hi) = wavenumber_bounds(n);
    if i as i64 <= hi { i as i64 } else { i as i64 - n as i64 }
}

/// Inclusive wavenumber range on an axis of length `n`: `[-n/2, n/2-1]` for
/// even `n`, `[-(n-1)/2, (n-1)/2]` for odd `n`.
#[inline]
pub(crate) fn wavenumber_bounds(n: usize) -> (i64, i64) {
    let n = n as i64;
    if n % 2 == 0 { (-n / 2, n / 2 - 1) } else { (-(n - 1) / 2, (n - 1) / 2) }
}

/// Size of the 3/2-rule padded axis.
pub(crate) fn padded(n: usize) -> usize {
    3 * n / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(data: &[Complex64], dims: [usize; 3]) -> Vec<Complex64> {
        let [n1, n2, n3] = dims;
        let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
        for a in 0..n1 {
            for b in 0..n2 {
                for c in 0..n3 {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for x in 0..n1 {
                        for y in 0..n2 {
                            for z in 0..n3 {
                                let ph = -2.0
                                    * std::f64::consts::PI
                                    * ((a * x) as f64 / n1 as f64
                                        + (b * y) as f64 / n2 as f64
                                        + (c * z) as f64 / n3 as f64);
                                acc += data[(x * n2 + y) * n3 + z] * Complex64::from_polar(1.0, ph);
                            }
                        }
                    }
                    out[(a * n2 + b) * n3 + c] = acc;
                }
            }
        }
        out
    }

    #[test]
    fn matches_naive_dft_on_odd_mixed_shape() {
        let dims = [3, 4, 5];
        let data: Vec<Complex64> = (0..60)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let expected = naive_dft(&data, dims);
        let mut got = data.clone();
        fft3(&mut got, dims, FftDirection::Forward);
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).norm() < 1e-12, "{g} vs {e}");
        }
        fft3(&mut got, dims, FftDirection::Inverse);
        for (g, d) in got.iter().zip(&data) {
            assert!((g / 60.0 - d).norm() < 1e-14);
        }
    }

    #[test]
    fn pad_then_truncate_is_identity() {
        let from = [8, 8, 10];
        let to = [12, 12, 15];
        let src: Vec<Complex64> = (0..640).map(|i| Complex64::new(i as f64, -(i as f64))).collect();
        let up = resample_spectrum(&src, from, to);
        let back = resample_spectrum(&up, to, from);
        assert_eq!(src, back);
    }
}
