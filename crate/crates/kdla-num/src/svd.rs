//! Singular value decomposition, implemented in-repo.
//!
//! The core is the classical Golub-Reinsch algorithm: Householder
//! bidiagonalization followed by implicit-shift QR sweeps on the bidiagonal,
//! with rotations accumulated into thin `U` and `V`. Strongly rectangular
//! inputs (rows >= 2*cols after orientation) are first reduced by a
//! Householder QR working on contiguous columns, and the Golub-Reinsch core
//! then runs on the small triangular factor; this keeps the snapshot-matrix
//! shapes of the training loops (a few hundred observables by thousands of
//! snapshots) cache-friendly.

use rayon::prelude::*;

use crate::error::NumError;
use crate::matrix::Matrix;
use crate::scalar::Real;

const MAX_SWEEPS: usize = 75;

/// Thin SVD `A = U diag(sigma) Vᵀ` with `U: p x k`, `V: q x k`,
/// `k = min(p, q)` and `sigma` sorted in descending order.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: Matrix<T>,
    pub sigma: Vec<T>,
    pub v: Matrix<T>,
}

pub fn svd<T: Real>(a: &Matrix<T>) -> Result<Svd<T>, NumError> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(Svd {
            u: Matrix::zeros(a.rows(), 0),
            sigma: Vec::new(),
            v: Matrix::zeros(a.cols(), 0),
        });
    }
    if !a.is_finite() {
        return Err(NumError::non_finite("svd", "input contains NaN or Inf"));
    }
    if a.rows() < a.cols() {
        let s = svd_tall(&a.transpose())?;
        return Ok(Svd {
            u: s.v,
            sigma: s.sigma,
            v: s.u,
        });
    }
    svd_tall(a)
}

fn svd_tall<T: Real>(a: &Matrix<T>) -> Result<Svd<T>, NumError> {
    let (m, n) = (a.rows(), a.cols());
    debug_assert!(m >= n);
    let mut out = if m >= 2 * n {
        qr_then_svd(a)?
    } else {
        let mut u = a.clone();
        let mut w = vec![T::zero(); n];
        let mut v = Matrix::zeros(n, n);
        golub_reinsch(&mut u, &mut w, &mut v)?;
        Svd { u, sigma: w, v }
    };
    sort_descending(&mut out);
    Ok(out)
}

/// QR first, then SVD of the small triangular factor.
fn qr_then_svd<T: Real>(a: &Matrix<T>) -> Result<Svd<T>, NumError> {
    let (m, n) = (a.rows(), a.cols());
    // Column-major working copy: reflections read and write whole columns.
    let mut cols: Vec<Vec<T>> = (0..n).map(|j| a.col(j)).collect();
    let mut tau = vec![T::zero(); n];

    for j in 0..n {
        let (left, rest) = cols.split_at_mut(j + 1);
        let vj = &mut left[j];
        tau[j] = make_householder(vj, j);
        if tau[j] != T::zero() {
            let t = tau[j];
            let v = &*vj;
            let apply = |c: &mut Vec<T>| {
                let mut wsum = c[j];
                for i in j + 1..m {
                    wsum += v[i] * c[i];
                }
                let wv = t * wsum;
                c[j] -= wv;
                for i in j + 1..m {
                    c[i] -= wv * v[i];
                }
            };
            if (m - j) * (n - j) > 1 << 15 {
                rest.par_iter_mut().for_each(apply);
            } else {
                rest.iter_mut().for_each(apply);
            }
        }
    }

    // Upper triangle (the diagonal entry was written by make_householder).
    let mut r = Matrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            r[(i, j)] = cols[j][i];
        }
    }

    let mut ur = r;
    let mut w = vec![T::zero(); n];
    let mut v = Matrix::zeros(n, n);
    golub_reinsch(&mut ur, &mut w, &mut v)?;

    // U = Q * U_r: pad with zero rows, then apply the stored reflections
    // in reverse order.
    let mut b: Vec<Vec<T>> = (0..n)
        .map(|j| {
            let mut c = vec![T::zero(); m];
            for i in 0..n {
                c[i] = ur[(i, j)];
            }
            c
        })
        .collect();
    for j in (0..n).rev() {
        if tau[j] == T::zero() {
            continue;
        }
        let t = tau[j];
        let v_house = &cols[j];
        let apply = |c: &mut Vec<T>| {
            let mut wsum = c[j];
            for i in j + 1..m {
                wsum += v_house[i] * c[i];
            }
            let wv = t * wsum;
            c[j] -= wv;
            for i in j + 1..m {
                c[i] -= wv * v_house[i];
            }
        };
        if (m - j) * n > 1 << 15 {
            b.par_iter_mut().for_each(apply);
        } else {
            b.iter_mut().for_each(apply);
        }
    }
    let mut u = Matrix::zeros(m, n);
    for (j, c) in b.iter().enumerate() {
        for i in 0..m {
            u[(i, j)] = c[i];
        }
    }
    Ok(Svd { u, sigma: w, v })
}

/// Householder reflector for `col[j..]`: afterwards `col[j]` holds the new
/// leading entry beta and `col[j+1..]` the reflector tail (head = 1
/// implied). Returns tau; tau = 0 means the reflection is the identity.
fn make_householder<T: Real>(col: &mut [T], j: usize) -> T {
    let x0 = col[j];
    let mut sigma = T::zero();
    for &x in &col[j + 1..] {
        sigma += x * x;
    }
    if sigma == T::zero() {
        return T::zero();
    }
    let mu = (x0 * x0 + sigma).sqrt();
    let beta = if x0 <= T::zero() { mu } else { -mu };
    let v0 = x0 - beta;
    for x in &mut col[j + 1..] {
        *x /= v0;
    }
    col[j] = beta;
    (beta - x0) / beta
}

#[inline]
fn same_sign<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Golub-Reinsch SVD of a tall matrix held in `u` (m x n, m >= n).
/// On return `u` is the thin U, `w` the unsorted singular values and `v`
/// the right singular vectors (n x n).
fn golub_reinsch<T: Real>(
    u: &mut Matrix<T>,
    w: &mut [T],
    v: &mut Matrix<T>,
) -> Result<(), NumError> {
    let (m, n) = (u.rows(), u.cols());
    debug_assert!(m >= n && w.len() == n && v.rows() == n && v.cols() == n);
    let eps = T::epsilon();
    let mut rv1 = vec![T::zero(); n];
    let (mut g, mut scale, mut anorm) = (T::zero(), T::zero(), T::zero());
    let mut l = 0usize;

    // Householder reduction to bidiagonal form.
    for i in 0..n {
        l = i + 1;
        rv1[i] = scale * g;
        g = T::zero();
        let mut s = T::zero();
        scale = T::zero();
        for k in i..m {
            scale += u[(k, i)].abs();
        }
        if scale != T::zero() {
            for k in i..m {
                u[(k, i)] /= scale;
                s += u[(k, i)] * u[(k, i)];
            }
            let f = u[(i, i)];
            g = -same_sign(s.sqrt(), f);
            let h = f * g - s;
            u[(i, i)] = f - g;
            for j in l..n {
                let mut s2 = T::zero();
                for k in i..m {
                    s2 += u[(k, i)] * u[(k, j)];
                }
                let f2 = s2 / h;
                for k in i..m {
                    let add = f2 * u[(k, i)];
                    u[(k, j)] += add;
                }
            }
            for k in i..m {
                u[(k, i)] *= scale;
            }
        }
        w[i] = scale * g;
        g = T::zero();
        s = T::zero();
        scale = T::zero();
        if i + 1 != n {
            for k in l..n {
                scale += u[(i, k)].abs();
            }
            if scale != T::zero() {
                for k in l..n {
                    u[(i, k)] /= scale;
                    s += u[(i, k)] * u[(i, k)];
                }
                let f = u[(i, l)];
                g = -same_sign(s.sqrt(), f);
                let h = f * g - s;
                u[(i, l)] = f - g;
                for k in l..n {
                    rv1[k] = u[(i, k)] / h;
                }
                for j in l..m {
                    let mut s2 = T::zero();
                    for k in l..n {
                        s2 += u[(j, k)] * u[(i, k)];
                    }
                    for k in l..n {
                        let add = s2 * rv1[k];
                        u[(j, k)] += add;
                    }
                }
                for k in l..n {
                    u[(i, k)] *= scale;
                }
            }
        }
        anorm = anorm.max(w[i].abs() + rv1[i].abs());
    }

    // Accumulate right-hand transformations.
    for i in (0..n).rev() {
        if i < n - 1 {
            if g != T::zero() {
                for j in l..n {
                    // Double division avoids possible overflow.
                    v[(j, i)] = (u[(i, j)] / u[(i, l)]) / g;
                }
                for j in l..n {
                    let mut s = T::zero();
                    for k in l..n {
                        s += u[(i, k)] * v[(k, j)];
                    }
                    for k in l..n {
                        let add = s * v[(k, i)];
                        v[(k, j)] += add;
                    }
                }
            }
            for j in l..n {
                v[(i, j)] = T::zero();
                v[(j, i)] = T::zero();
            }
        }
        v[(i, i)] = T::one();
        g = rv1[i];
        l = i;
    }

    // Accumulate left-hand transformations (thin U).
    for i in (0..n).rev() {
        let l = i + 1;
        let mut g = w[i];
        for j in l..n {
            u[(i, j)] = T::zero();
        }
        if g != T::zero() {
            g = T::one() / g;
            for j in l..n {
                let mut s = T::zero();
                for k in l..m {
                    s += u[(k, i)] * u[(k, j)];
                }
                let f = (s / u[(i, i)]) * g;
                for k in i..m {
                    let add = f * u[(k, i)];
                    u[(k, j)] += add;
                }
            }
            for j in i..m {
                u[(j, i)] *= g;
            }
        } else {
            for j in i..m {
                u[(j, i)] = T::zero();
            }
        }
        u[(i, i)] += T::one();
    }

    // Diagonalize the bidiagonal form: implicit-shift QR with deflation.
    for k in (0..n).rev() {
        for its in 0..MAX_SWEEPS {
            let mut flag = true;
            let mut ll = 0usize;
            for cand in (0..=k).rev() {
                ll = cand;
                if rv1[cand].abs() <= eps * anorm {
                    flag = false;
                    break;
                }
                // cand >= 1 here: rv1[0] is always zero, so the branch
                // above fires before cand reaches 0.
                if w[cand - 1].abs() <= eps * anorm {
                    break;
                }
            }
            let l = ll;
            if flag {
                // Cancel rv1[l]: w[l-1] is negligible.
                let nm = l - 1;
                let mut c = T::zero();
                let mut s = T::one();
                for i in l..=k {
                    let f = s * rv1[i];
                    rv1[i] = c * rv1[i];
                    if f.abs() <= eps * anorm {
                        break;
                    }
                    let g2 = w[i];
                    let h = f.hypot(g2);
                    w[i] = h;
                    let hinv = T::one() / h;
                    c = g2 * hinv;
                    s = -f * hinv;
                    for j in 0..m {
                        let y = u[(j, nm)];
                        let z = u[(j, i)];
                        u[(j, nm)] = y * c + z * s;
                        u[(j, i)] = z * c - y * s;
                    }
                }
            }
            let z = w[k];
            if l == k {
                if z < T::zero() {
                    w[k] = -z;
                    for j in 0..n {
                        v[(j, k)] = -v[(j, k)];
                    }
                }
                break;
            }
            if its + 1 == MAX_SWEEPS {
                return Err(NumError::NonConvergence {
                    op: "svd",
                    iterations: MAX_SWEEPS,
                    index: k,
                });
            }
            // Wilkinson-style shift from the trailing 2x2.
            let mut x = w[l];
            let nm = k - 1;
            let mut y = w[nm];
            let mut g2 = rv1[nm];
            let mut h = rv1[k];
            let two = T::from_f64(2.0);
            let mut f = ((y - z) * (y + z) + (g2 - h) * (g2 + h)) / (two * h * y);
            g2 = f.hypot(T::one());
            f = ((x - z) * (x + z) + h * (y / (f + same_sign(g2, f)) - h)) / x;
            let mut c = T::one();
            let mut s = T::one();
            for j in l..=nm {
                let i = j + 1;
                g2 = rv1[i];
                y = w[i];
                h = s * g2;
                g2 = c * g2;
                let mut zz = f.hypot(h);
                rv1[j] = zz;
                c = f / zz;
                s = h / zz;
                f = x * c + g2 * s;
                g2 = g2 * c - x * s;
                h = y * s;
                y *= c;
                for jj in 0..n {
                    let xv = v[(jj, j)];
                    let zv = v[(jj, i)];
                    v[(jj, j)] = xv * c + zv * s;
                    v[(jj, i)] = zv * c - xv * s;
                }
                zz = f.hypot(h);
                w[j] = zz;
                if zz != T::zero() {
                    let zi = T::one() / zz;
                    c = f * zi;
                    s = h * zi;
                }
                f = c * g2 + s * y;
                x = c * y - s * g2;
                for jj in 0..m {
                    let yu = u[(jj, j)];
                    let zu = u[(jj, i)];
                    u[(jj, j)] = yu * c + zu * s;
                    u[(jj, i)] = zu * c - yu * s;
                }
            }
            rv1[l] = T::zero();
            rv1[k] = f;
            w[k] = x;
        }
    }
    Ok(())
}

fn sort_descending<T: Real>(s: &mut Svd<T>) {
    let k = s.sigma.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s.sigma[b].partial_cmp(&s.sigma[a]).unwrap());
    if order.iter().enumerate().all(|(i, &o)| i == o) {
        return;
    }
    s.sigma = order.iter().map(|&o| s.sigma[o]).collect();
    s.u = s.u.select_cols(&order);
    s.v = s.v.select_cols(&order);
}
