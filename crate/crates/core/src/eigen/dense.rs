//! Dense symmetric eigensolver: Householder reduction to tridiagonal form
//! followed by the implicit-shift QL iteration, with eigenvector
//! accumulation. Textbook algorithms, written out because the tridiagonal
//! stage is also what digests the Lanczos recurrence, and the dense stage
//! doubles as the small-problem fallback path.

use crate::error::{Error, Result};
use crate::scalar::Real;

fn sign_of<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

fn hypot2<T: Real>(a: T, b: T) -> T {
    let (a, b) = (a.abs(), b.abs());
    let (big, small) = if a > b { (a, b) } else { (b, a) };
    if big == T::zero() {
        return T::zero();
    }
    let r = small / big;
    big * (T::one() + r * r).sqrt()
}

/// Householder reduction of the symmetric matrix `a` (n x n, row major) to
/// tridiagonal form. On return `d` holds the diagonal, `e` the subdiagonal
/// in `e[1..]`, and `a` the accumulated orthogonal transform (columns).
pub fn tridiagonalize<T: Real>(a: &mut [T], n: usize, d: &mut [T], e: &mut [T]) {
    let at = |i: usize, j: usize| i * n + j;
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = T::zero();
        if l > 0 {
            let mut scale = T::zero();
            for k in 0..=l {
                scale += a[at(i, k)].abs();
            }
            if scale == T::zero() {
                e[i] = a[at(i, l)];
            } else {
                for k in 0..=l {
                    a[at(i, k)] /= scale;
                    h += a[at(i, k)] * a[at(i, k)];
                }
                let f = a[at(i, l)];
                let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[at(i, l)] = f - g;
                let mut f_acc = T::zero();
                for j in 0..=l {
                    a[at(j, i)] = a[at(i, j)] / h;
                    let mut g = T::zero();
                    for k in 0..=j {
                        g += a[at(j, k)] * a[at(i, k)];
                    }
                    for k in (j + 1)..=l {
                        g += a[at(k, j)] * a[at(i, k)];
                    }
                    e[j] = g / h;
                    f_acc += e[j] * a[at(i, j)];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = a[at(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let delta = f * e[k] + g * a[at(i, k)];
                        a[at(j, k)] -= delta;
                    }
                }
            }
        } else {
            e[i] = a[at(i, l)];
        }
        d[i] = h;
    }
    d[0] = T::zero();
    e[0] = T::zero();
    for i in 0..n {
        if d[i] != T::zero() {
            for j in 0..i {
                let mut g = T::zero();
                for k in 0..i {
                    g += a[at(i, k)] * a[at(k, j)];
                }
                for k in 0..i {
                    let delta = g * a[at(k, i)];
                    a[at(k, j)] -= delta;
                }
            }
        }
        d[i] = a[at(i, i)];
        a[at(i, i)] = T::one();
        for j in 0..i {
            a[at(j, i)] = T::zero();
            a[at(i, j)] = T::zero();
        }
    }
}

/// Implicit-shift QL on a tridiagonal matrix. `d` is the diagonal, `e[1..]`
/// the subdiagonal; `z` (n x n row major) accumulates rotations, so passing
/// the identity yields eigenvectors of the tridiagonal matrix in columns,
/// and passing the output of [`tridiagonalize`] yields those of the original.
/// Eigenvalues return in `d`, unsorted.
pub fn ql_implicit<T: Real>(d: &mut [T], e: &mut [T], z: &mut [T], n: usize) -> Result<()> {
    let at = |i: usize, j: usize| i * n + j;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::NoConvergence(iter));
            }
            let mut g = (d[l + 1] - d[l]) / (T::of(2.0) * e[l]);
            let mut r = hypot2(g, T::one());
            g = d[m] - d[l] + e[l] / (g + sign_of(r, g));
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            // The sweep may hit an exact zero rotation radius mid-block; in
            // that case the block is restarted, and the trailing fix-up below
            // must not run with the half-applied correction.
            let mut underflow_restart = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = hypot2(f, g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow_restart = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + T::of(2.0) * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[at(k, i + 1)];
                    z[at(k, i + 1)] = s * z[at(k, i)] + c * f;
                    z[at(k, i)] = c * z[at(k, i)] - s * f;
                }
            }
            if underflow_restart {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// Eigenvalues (ascending) and eigenvectors (columns of the returned matrix)
/// of a symmetric matrix given in row-major order. Destroys `a`.
pub fn sym_eig<T: Real>(a: &mut Vec<T>, n: usize) -> Result<(Vec<T>, Vec<T>)> {
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    if n == 1 {
        return Ok((vec![a[0]], vec![T::one()]));
    }
    tridiagonalize(a, n, &mut d, &mut e);
    ql_implicit(&mut d, &mut e, a, n)?;
    // Sort ascending, permuting eigenvector columns along.
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&p, &q| d[p].partial_cmp(&d[q]).unwrap());
    let values: Vec<T> = idx.iter().map(|&p| d[p]).collect();
    let mut vectors = vec![T::zero(); n * n];
    for (new_col, &old_col) in idx.iter().enumerate() {
        for row in 0..n {
            vectors[row * n + new_col] = a[row * n + old_col];
        }
    }
    Ok((values, vectors))
}

/// Eigenvalues and eigenvectors of a symmetric tridiagonal matrix given by
/// its diagonal and subdiagonal (`sub.len() == diag.len() - 1`).
pub fn tridiag_eig<T: Real>(diag: &[T], sub: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    let n = diag.len();
    assert_eq!(sub.len() + 1, n);
    let mut d = diag.to_vec();
    if n == 1 {
        return Ok((d, vec![T::one()]));
    }
    let mut e = vec![T::zero(); n];
    e[1..].copy_from_slice(sub);
    let mut z = vec![T::zero(); n * n];
    for i in 0..n {
        z[i * n + i] = T::one();
    }
    ql_implicit(&mut d, &mut e, &mut z, n)?;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&p, &q| d[p].partial_cmp(&d[q]).unwrap());
    let values: Vec<T> = idx.iter().map(|&p| d[p]).collect();
    let mut vectors = vec![T::zero(); n * n];
    for (new_col, &old_col) in idx.iter().enumerate() {
        for row in 0..n {
            vectors[row * n + new_col] = z[row * n + old_col];
        }
    }
    Ok((values, vectors))
}

/// Dense Cholesky `M = L L^T` (lower triangle, row major). `None` when not
/// positive definite.
pub fn cholesky<T: Real>(m: &[T], n: usize) -> Option<Vec<T>> {
    let at = |i: usize, j: usize| i * n + j;
    let mut l = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = m[at(i, j)];
            for k in 0..j {
                sum -= l[at(i, k)] * l[at(j, k)];
            }
            if i == j {
                if !(sum > T::zero()) || !sum.is_finite() {
                    return None;
                }
                l[at(i, i)] = sum.sqrt();
            } else {
                l[at(i, j)] = sum / l[at(j, j)];
            }
        }
    }
    Some(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual_ok(a: &[T64], n: usize, vals: &[f64], vecs: &[f64]) {
        for col in 0..n {
            for row in 0..n {
                let mut av = 0.0;
                for k in 0..n {
                    av += a[row * n + k] * vecs[k * n + col];
                }
                let diff = av - vals[col] * vecs[row * n + col];
                assert!(diff.abs() < 1e-10, "residual {diff:e} at ({row}, {col})");
            }
        }
    }
    type T64 = f64;

    #[test]
    fn two_by_two_closed_form() {
        let a0: Vec<f64> = vec![2.0, 1.0, 1.0, 2.0];
        let mut a = a0.clone();
        let (vals, vecs) = sym_eig(&mut a, 2).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] - 3.0).abs() < 1e-14);
        residual_ok(&a0, 2, &vals, &vecs);
    }

    #[test]
    fn random_symmetric_matrix_checks_out() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let n = 24;
        let mut a0 = vec![0.0f64; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = rng.gen_range(-1.0..1.0);
                a0[i * n + j] = v;
                a0[j * n + i] = v;
            }
        }
        let mut a = a0.clone();
        let (vals, vecs) = sym_eig(&mut a, n).unwrap();
        for w in vals.windows(2) {
            assert!(w[0] <= w[1]);
        }
        let trace: f64 = (0..n).map(|i| a0[i * n + i]).sum();
        let val_sum: f64 = vals.iter().sum();
        assert!((trace - val_sum).abs() < 1e-10);
        residual_ok(&a0, n, &vals, &vecs);
        // Columns orthonormal.
        for p in 0..n {
            for q in 0..=p {
                let dot: f64 = (0..n).map(|r| vecs[r * n + p] * vecs[r * n + q]).sum();
                let want = if p == q { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn tridiagonal_toeplitz_has_known_spectrum() {
        // diag 2, off -1, size n: eigenvalues 2 - 2 cos(pi k / (n+1)).
        let n = 12;
        let diag = vec![2.0f64; n];
        let sub = vec![-1.0f64; n - 1];
        let (vals, _) = tridiag_eig(&diag, &sub).unwrap();
        for k in 1..=n {
            let want = 2.0 - 2.0 * (std::f64::consts::PI * k as f64 / (n as f64 + 1.0)).cos();
            assert!((vals[k - 1] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_round_trip_and_indefinite_rejection() {
        let m: Vec<f64> = vec![4.0, 2.0, 2.0, 3.0];
        let l = cholesky(&m, 2).unwrap();
        let rebuilt = [
            l[0] * l[0],
            l[0] * l[2],
            l[2] * l[0],
            l[2] * l[2] + l[3] * l[3],
        ];
        for (x, y) in rebuilt.iter().zip(&m) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!(cholesky(&[1.0f64, 2.0, 2.0, 1.0], 2).is_none());
    }
}
