//! Dense kernels over row-major score matrices.
//!
//! With the `parallel` feature the work is split across the rayon pool;
//! without it the same code runs on the calling thread. Every output element
//! is produced by a single task that sums in a fixed order, and partial sums
//! are combined in chunk order, so results are bit-identical for any thread
//! count and with or without the feature.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::matrix::Mat;
use crate::scalar::Scalar;

/// Column panel width for the Gram kernel. An `n x GRAM_PANEL` slab of
/// doubles stays cache resident for the sample counts we target.
const GRAM_PANEL: usize = 256;
const MR: usize = 4;
const NR: usize = 4;
const LANES: usize = 4;

/// Column block width for `S^H y`.
const COL_BLOCK: usize = 2048;
/// Row block height for reductions over many rows.
const ROW_BLOCK: usize = 4096;

fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Send + Sync,
{
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

/// Ordered map over `0..count`.
fn map_indices<R, F>(count: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

/// Dot product `sum_k a[k] * op(b[k])`, with `op` conjugation when `CONJ`.
/// Four interleaved partial sums, combined left to right.
#[inline]
pub(crate) fn dot<T: Scalar, const CONJ: bool>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [T::zero(); LANES];
    let mut ac = a.chunks_exact(LANES);
    let mut bc = b.chunks_exact(LANES);
    for (x, y) in (&mut ac).zip(&mut bc) {
        for l in 0..LANES {
            let yl = if CONJ { y[l].conj_val() } else { y[l] };
            acc[l] += x[l] * yl;
        }
    }
    for (x, y) in ac.remainder().iter().zip(bc.remainder()) {
        let y = if CONJ { y.conj_val() } else { *y };
        acc[0] += *x * y;
    }
    ((acc[0] + acc[1]) + acc[2]) + acc[3]
}

/// `S S^H` (`S S^T` for real scalars), returned with both triangles filled.
///
/// Only tiles on or above the diagonal are computed; the strict lower
/// triangle is mirrored afterwards. Each `MR`-row stripe of the result is one
/// task, and the column axis of `S` is walked in panels so a stripe's rows
/// and the rows it is paired with stay in cache.
pub fn gram<T: Scalar>(s: &Mat<T>) -> Mat<T> {
    let n = s.rows();
    let m = s.cols();
    let mut w = Mat::<T>::zeros(n, n);
    let mut k0 = 0;
    while k0 < m {
        let k1 = (k0 + GRAM_PANEL).min(m);
        for_each_chunk_mut(w.as_mut_slice(), MR * n, |stripe, wrows| {
            gram_stripe(s, stripe * MR, k0, k1, wrows);
        });
        k0 = k1;
    }
    for i in 0..n {
        for j in 0..i {
            w[(i, j)] = w[(j, i)].conj_val();
        }
    }
    w
}

fn gram_stripe<T: Scalar>(s: &Mat<T>, i0: usize, k0: usize, k1: usize, wrows: &mut [T]) {
    let n = s.rows();
    let rows_here = wrows.len() / n;
    let mut j0 = i0;
    while j0 < n {
        if rows_here == MR && j0 + NR <= n {
            let a: [&[T]; MR] = std::array::from_fn(|r| &s.row(i0 + r)[k0..k1]);
            let b: [&[T]; NR] = std::array::from_fn(|c| &s.row(j0 + c)[k0..k1]);
            let block = micro_tile(&a, &b);
            for r in 0..MR {
                for c in 0..NR {
                    wrows[r * n + j0 + c] += block[r][c];
                }
            }
        } else {
            for r in 0..rows_here {
                let a = &s.row(i0 + r)[k0..k1];
                for j in j0..(j0 + NR).min(n) {
                    wrows[r * n + j] += dot::<T, true>(a, &s.row(j)[k0..k1]);
                }
            }
        }
        j0 += NR;
    }
}

/// `MR x NR` block of `a_r . conj(b_c)` with lane-split accumulators so the
/// inner loop vectorizes without reassociating any single sum.
#[inline]
fn micro_tile<T: Scalar>(a: &[&[T]; MR], b: &[&[T]; NR]) -> [[T; NR]; MR] {
    let len = a[0].len();
    let full = len - len % LANES;
    let mut acc = [[[T::zero(); LANES]; NR]; MR];
    let mut k = 0;
    while k < full {
        let av: [[T; LANES]; MR] = std::array::from_fn(|r| {
            let row = &a[r][k..k + LANES];
            std::array::from_fn(|l| row[l])
        });
        let bv: [[T; LANES]; NR] = std::array::from_fn(|c| {
            let row = &b[c][k..k + LANES];
            std::array::from_fn(|l| row[l].conj_val())
        });
        for r in 0..MR {
            for c in 0..NR {
                for l in 0..LANES {
                    acc[r][c][l] += av[r][l] * bv[c][l];
                }
            }
        }
        k += LANES;
    }
    for k in full..len {
        for r in 0..MR {
            for c in 0..NR {
                acc[r][c][0] += a[r][k] * b[c][k].conj_val();
            }
        }
    }
    std::array::from_fn(|r| {
        std::array::from_fn(|c| {
            let p = &acc[r][c];
            ((p[0] + p[1]) + p[2]) + p[3]
        })
    })
}

/// `A x` for a row-major `A`.
pub fn matvec<T: Scalar>(a: &Mat<T>, x: &[T]) -> Vec<T> {
    assert_eq!(a.cols(), x.len());
    let mut out = vec![T::zero(); a.rows()];
    if a.cols() == 0 {
        return out;
    }
    // Rows per task: keep tasks around ROW_BLOCK scalars of work.
    let per_task = (ROW_BLOCK / a.cols()).max(1);
    for_each_chunk_mut(&mut out, per_task, |t, chunk| {
        let r0 = t * per_task;
        for (off, o) in chunk.iter_mut().enumerate() {
            *o = dot::<T, false>(a.row(r0 + off), x);
        }
    });
    out
}

/// `A^H y` (conjugated) or `A^T y` (plain), selected by `CONJ`.
fn transposed_matvec<T: Scalar, const CONJ: bool>(a: &Mat<T>, y: &[T]) -> Vec<T> {
    assert_eq!(a.rows(), y.len());
    let rows = a.rows();
    let cols = a.cols();
    if cols >= COL_BLOCK || rows <= ROW_BLOCK {
        // Wide: each task owns a block of output entries and walks all rows.
        let mut out = vec![T::zero(); cols];
        for_each_chunk_mut(&mut out, COL_BLOCK, |t, chunk| {
            let c0 = t * COL_BLOCK;
            let c1 = c0 + chunk.len();
            for (i, yi) in y.iter().enumerate() {
                let yi = *yi;
                let row = &a.row(i)[c0..c1];
                for (o, aij) in chunk.iter_mut().zip(row) {
                    let aij = if CONJ { aij.conj_val() } else { *aij };
                    *o += aij * yi;
                }
            }
        });
        out
    } else {
        // Tall and narrow: partial sums over fixed row blocks, added in order.
        let blocks = rows.div_ceil(ROW_BLOCK);
        let partials = map_indices(blocks, |b| {
            let r0 = b * ROW_BLOCK;
            let r1 = (r0 + ROW_BLOCK).min(rows);
            let mut part = vec![T::zero(); cols];
            for i in r0..r1 {
                let yi = y[i];
                for (o, aij) in part.iter_mut().zip(a.row(i)) {
                    let aij = if CONJ { aij.conj_val() } else { *aij };
                    *o += aij * yi;
                }
            }
            part
        });
        let mut out = vec![T::zero(); cols];
        for part in partials {
            for (o, p) in out.iter_mut().zip(part) {
                *o += p;
            }
        }
        out
    }
}

/// `A^H y`.
pub fn adjoint_matvec<T: Scalar>(a: &Mat<T>, y: &[T]) -> Vec<T> {
    transposed_matvec::<T, true>(a, y)
}

/// `A^T y` without conjugation.
pub fn transpose_matvec<T: Scalar>(a: &Mat<T>, y: &[T]) -> Vec<T> {
    transposed_matvec::<T, false>(a, y)
}

/// `S^H U` for `S` of shape `n x m` and `U` of shape `n x r`; the result is
/// `m x r`. Output rows are produced in contiguous panels, one task each.
pub fn adjoint_times<T: Scalar>(s: &Mat<T>, u: &Mat<T>) -> Mat<T> {
    assert_eq!(s.rows(), u.rows());
    let m = s.cols();
    let r = u.cols();
    let mut out = Mat::<T>::zeros(m, r);
    if r == 0 {
        return out;
    }
    const PANEL: usize = 32;
    for_each_chunk_mut(out.as_mut_slice(), PANEL * r, |t, panel| {
        let k0 = t * PANEL;
        let rows_here = panel.len() / r;
        for i in 0..s.rows() {
            let srow = &s.row(i)[k0..k0 + rows_here];
            let urow = u.row(i);
            for (kk, sik) in srow.iter().enumerate() {
                let c = sik.conj_val();
                for (o, uia) in panel[kk * r..(kk + 1) * r].iter_mut().zip(urow) {
                    *o += c * *uia;
                }
            }
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_real(n: usize, m: usize, seed: u64) -> Mat<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Mat::from_vec(n, m, (0..n * m).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
    }

    fn rand_complex(n: usize, m: usize, seed: u64) -> Mat<C> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..n * m)
            .map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        Mat::from_vec(n, m, data).unwrap()
    }

    #[test]
    fn gram_matches_naive_product_over_odd_shapes() {
        // Shapes straddle the tile, lane and panel boundaries.
        for &(n, m) in &[(1, 1), (3, 7), (4, 4), (5, 257), (9, 513), (13, 1000)] {
            let s = rand_real(n, m, (n * 1000 + m) as u64);
            let want = s.matmul(&s.adjoint()).unwrap();
            let got = gram(&s);
            assert!(got.max_abs_diff(&want) <= 1e-12 * m as f64, "{n}x{m}");
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(got[(i, j)], got[(j, i)]);
                }
            }
        }
    }

    #[test]
    fn complex_gram_is_hermitian_product() {
        let s = rand_complex(6, 301, 5);
        let want = s.matmul(&s.adjoint()).unwrap();
        let got = gram(&s);
        assert!(got.max_abs_diff(&want) <= 1e-12 * 301.0);
        for i in 0..6 {
            assert_eq!(got[(i, i)].im, 0.0);
        }
    }

    #[test]
    fn matvec_variants_match_dense() {
        for &(n, m) in &[(1, 3), (7, 5000), (5000, 3)] {
            let a = rand_complex(n, m, 11);
            let x: Vec<C> = rand_complex(1, m, 12).into_vec();
            let y: Vec<C> = rand_complex(1, n, 13).into_vec();
            let ax = matvec(&a, &x);
            let ahy = adjoint_matvec(&a, &y);
            let aty = transpose_matvec(&a, &y);
            for i in 0..n {
                let want: C = (0..m).map(|k| a[(i, k)] * x[k]).sum();
                assert!((ax[i] - want).norm() < 1e-11);
            }
            for k in 0..m {
                let want_h: C = (0..n).map(|i| a[(i, k)].conj() * y[i]).sum();
                let want_t: C = (0..n).map(|i| a[(i, k)] * y[i]).sum();
                assert!((ahy[k] - want_h).norm() < 1e-11);
                assert!((aty[k] - want_t).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn adjoint_times_matches_dense() {
        let s = rand_complex(5, 77, 21);
        let u = rand_complex(5, 3, 22);
        let want = s.adjoint().matmul(&u).unwrap();
        assert!(adjoint_times(&s, &u).max_abs_diff(&want) < 1e-12);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn thread_count_does_not_change_bits() {
        let s = rand_real(37, 3001, 99);
        let y: Vec<f64> = rand_real(1, 37, 100).into_vec();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let (g1, h1) = pool.install(|| (gram(&s), adjoint_matvec(&s, &y)));
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let (g4, h4) = pool4.install(|| (gram(&s), adjoint_matvec(&s, &y)));
        assert_eq!(g1, g4);
        assert_eq!(h1, h4);
    }
}
