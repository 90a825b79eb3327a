//! Eigenvalues of a real square matrix via the shifted QR algorithm.
//!
//! Pipeline: radix-2 balancing, Householder reduction to upper Hessenberg
//! form, then Francis double-shift QR iteration with deflation (the classic
//! EISPACK `hqr` scheme). Eigenvalues of 1x1 blocks are real; 2x2 blocks
//! yield real or complex-conjugate pairs. Eigenvectors, when requested, come
//! from shifted complex inverse iteration on the original matrix.
//!
//! Intended for the moderate orders of Koopman matrices (n <= a few
//! hundred); cost is O(n^3).

use num_complex::Complex;

use crate::error::NumError;
use crate::matrix::Matrix;
use crate::scalar::Real;

const MAX_ITERATIONS: usize = 30;

#[inline]
fn same_sign<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// All eigenvalues of a square matrix, in deflation order.
pub fn eigenvalues<T: Real>(a: &Matrix<T>) -> Result<Vec<Complex<T>>, NumError> {
    if a.rows() != a.cols() {
        return Err(a.shape_err("eigenvalues", (a.rows(), a.rows())));
    }
    if !a.is_finite() {
        return Err(NumError::non_finite("eigenvalues", "matrix has NaN or Inf"));
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    hqr(&mut h)
}

/// Eigenvalues plus unit-norm eigenvectors (columns of the returned list).
pub fn eigenvalues_and_vectors<T: Real>(
    a: &Matrix<T>,
) -> Result<(Vec<Complex<T>>, Vec<Vec<Complex<T>>>), NumError> {
    let eigs = eigenvalues(a)?;
    let n = a.rows();
    let mut scale = T::zero();
    for i in 0..n {
        scale = scale.max(a.row(i).iter().fold(T::zero(), |s, &x| s + x.abs()));
    }
    let shift_off = T::from_f64(1e-12) * (T::one() + scale);
    let mut vectors = Vec::with_capacity(n);
    for (idx, &lam) in eigs.iter().enumerate() {
        let shift = lam + Complex::new(shift_off, shift_off);
        let mut c: Vec<Complex<T>> = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut v = Complex::new(a[(i, j)], T::zero());
                if i == j {
                    v -= shift;
                }
                c.push(v);
            }
        }
        let mut piv = vec![0usize; n];
        clu_factor(&mut c, n, &mut piv);
        // Deterministic start vector depending on the eigenvalue index.
        let mut b: Vec<Complex<T>> = (0..n)
            .map(|i| {
                let t = T::from_f64(((i + 1) * (idx + 3)) as f64);
                Complex::new((t.sin() + T::one()) * T::from_f64(0.5), t.cos())
            })
            .collect();
        normalize(&mut b);
        for _ in 0..3 {
            clu_solve(&c, n, &piv, &mut b);
            normalize(&mut b);
        }
        vectors.push(b);
    }
    Ok((eigs, vectors))
}

fn normalize<T: Real>(v: &mut [Complex<T>]) {
    let n = v
        .iter()
        .map(|z| z.norm_sqr())
        .fold(T::zero(), |a, x| a + x)
        .sqrt();
    if n > T::zero() {
        for z in v.iter_mut() {
            *z = *z / n;
        }
    }
}

/// In-place complex LU with partial pivoting. Zero pivots are replaced by a
/// tiny value: the factorization backs inverse iteration, where a nearly
/// singular solve is the intent.
fn clu_factor<T: Real>(m: &mut [Complex<T>], n: usize, piv: &mut [usize]) {
    let tiny = T::from_f64(1e-290);
    for k in 0..n {
        let mut p = k;
        let mut best = m[k * n + k].norm_sqr();
        for i in k + 1..n {
            let mag = m[i * n + k].norm_sqr();
            if mag > best {
                best = mag;
                p = i;
            }
        }
        piv[k] = p;
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
        }
        if m[k * n + k].norm_sqr() == T::zero() {
            m[k * n + k] = Complex::new(tiny, T::zero());
        }
        let inv = Complex::new(T::one(), T::zero()) / m[k * n + k];
        for i in k + 1..n {
            let factor = m[i * n + k] * inv;
            m[i * n + k] = factor;
            for j in k + 1..n {
                let sub = factor * m[k * n + j];
                m[i * n + j] = m[i * n + j] - sub;
            }
        }
    }
}

fn clu_solve<T: Real>(m: &[Complex<T>], n: usize, piv: &[usize], b: &mut [Complex<T>]) {
    for k in 0..n {
        b.swap(k, piv[k]);
        for i in k + 1..n {
            let sub = m[i * n + k] * b[k];
            b[i] = b[i] - sub;
        }
    }
    for k in (0..n).rev() {
        for j in k + 1..n {
            let sub = m[k * n + j] * b[j];
            b[k] = b[k] - sub;
        }
        b[k] = b[k] / m[k * n + k];
    }
}

/// Radix-2 balancing (diagonal similarity, exact in floating point).
fn balance<T: Real>(a: &mut Matrix<T>) {
    let n = a.rows();
    let radix = T::from_f64(2.0);
    let sq = radix * radix;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = T::zero();
            let mut r = T::zero();
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c != T::zero() && r != T::zero() {
                let mut g = r / radix;
                let mut f = T::one();
                let s = c + r;
                let mut c2 = c;
                while c2 < g {
                    f *= radix;
                    c2 *= sq;
                }
                g = r * radix;
                while c2 > g {
                    f /= radix;
                    c2 /= sq;
                }
                if (c2 + r) / f < T::from_f64(0.95) * s {
                    done = false;
                    let ginv = T::one() / f;
                    for j in 0..n {
                        a[(i, j)] *= ginv;
                    }
                    for j in 0..n {
                        a[(j, i)] *= f;
                    }
                }
            }
        }
        if done {
            return;
        }
    }
}

/// Householder reduction to upper Hessenberg form (similarity transform;
/// the orthogonal factor is not accumulated).
fn hessenberg<T: Real>(a: &mut Matrix<T>) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let x0 = a[(k + 1, k)];
        let mut sigma = T::zero();
        for i in k + 2..n {
            let v = a[(i, k)];
            sigma += v * v;
        }
        if sigma == T::zero() {
            continue;
        }
        let mu = (x0 * x0 + sigma).sqrt();
        let beta = if x0 <= T::zero() { mu } else { -mu };
        let v0 = x0 - beta;
        let tau = (beta - x0) / beta;
        // v has head 1 at row k+1 and tail a[(i,k)]/v0 below.
        let mut v = vec![T::one(); n - k - 1];
        for i in k + 2..n {
            v[i - k - 1] = a[(i, k)] / v0;
        }
        // Left: rows k+1.., all columns.
        for j in k..n {
            let mut w = T::zero();
            for i in k + 1..n {
                w += v[i - k - 1] * a[(i, j)];
            }
            w *= tau;
            for i in k + 1..n {
                let sub = w * v[i - k - 1];
                a[(i, j)] -= sub;
            }
        }
        // Right: columns k+1.., all rows.
        for i in 0..n {
            let mut w = T::zero();
            for j in k + 1..n {
                w += v[j - k - 1] * a[(i, j)];
            }
            w *= tau;
            for j in k + 1..n {
                let sub = w * v[j - k - 1];
                a[(i, j)] -= sub;
            }
        }
        a[(k + 1, k)] = beta;
        for i in k + 2..n {
            a[(i, k)] = T::zero();
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix; destroys `a`.
fn hqr<T: Real>(a: &mut Matrix<T>) -> Result<Vec<Complex<T>>, NumError> {
    let n = a.rows();
    let zero = Complex::new(T::zero(), T::zero());
    let mut eig = vec![zero; n];
    if n == 0 {
        return Ok(eig);
    }
    let eps = T::epsilon();
    let mut anorm = T::zero();
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    if anorm == T::zero() {
        return Ok(eig);
    }

    let mut nn = n - 1;
    let mut t = T::zero();
    let half = T::from_f64(0.5);
    'deflate: loop {
        let mut its = 0usize;
        loop {
            // Find the start l of the active block: first negligible
            // subdiagonal from the bottom.
            let mut l = 0usize;
            let mut ll = nn;
            while ll >= 1 {
                let mut s = a[(ll - 1, ll - 1)].abs() + a[(ll, ll)].abs();
                if s == T::zero() {
                    s = anorm;
                }
                if a[(ll, ll - 1)].abs() <= eps * s {
                    a[(ll, ll - 1)] = T::zero();
                    l = ll;
                    break;
                }
                ll -= 1;
            }

            let mut x = a[(nn, nn)];
            if l == nn {
                // Single real eigenvalue.
                eig[nn] = Complex::new(x + t, T::zero());
                if nn == 0 {
                    break 'deflate;
                }
                nn -= 1;
                break;
            }
            let mut y = a[(nn - 1, nn - 1)];
            let mut w = a[(nn, nn - 1)] * a[(nn - 1, nn)];
            if l + 1 == nn {
                // Two eigenvalues from the trailing 2x2 block.
                let p = (y - x) * half;
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                let xt = x + t;
                if q >= T::zero() {
                    z = p + same_sign(z, p);
                    let r1 = xt + z;
                    let r2 = if z != T::zero() { xt - w / z } else { r1 };
                    eig[nn - 1] = Complex::new(r1, T::zero());
                    eig[nn] = Complex::new(r2, T::zero());
                } else {
                    eig[nn - 1] = Complex::new(xt + p, z);
                    eig[nn] = Complex::new(xt + p, -z);
                }
                if nn == 1 {
                    break 'deflate;
                }
                nn -= 2;
                break;
            }

            if its == MAX_ITERATIONS {
                return Err(NumError::NonConvergence {
                    op: "qr_eigenvalues",
                    iterations: MAX_ITERATIONS,
                    index: nn,
                });
            }
            if its == 10 || its == 20 {
                // Exceptional shift.
                t += x;
                for i in 0..=nn {
                    a[(i, i)] -= x;
                }
                let s = a[(nn, nn - 1)].abs() + a[(nn - 1, nn - 2)].abs();
                y = T::from_f64(0.75) * s;
                x = y;
                w = T::from_f64(-0.4375) * s * s;
            }
            its += 1;

            // Look for two consecutive small subdiagonals.
            let mut m = nn - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - rr - ss;
                r = a[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                a[(i, i - 2)] = T::zero();
                if i != m + 2 {
                    a[(i, i - 3)] = T::zero();
                }
            }

            // Double QR step (bulge chase) on rows/cols m..=nn.
            for k in m..nn {
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = if k != nn - 1 {
                        a[(k + 2, k - 1)]
                    } else {
                        T::zero()
                    };
                    x = p.abs() + q.abs() + r.abs();
                    if x != T::zero() {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = same_sign((p * p + q * q + r * r).sqrt(), p);
                if s != T::zero() {
                    if k == m {
                        if l != m {
                            a[(k, k - 1)] = -a[(k, k - 1)];
                        }
                    } else {
                        a[(k, k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                        if k != nn - 1 {
                            pp += r * a[(k + 2, j)];
                            let sub = pp * z;
                            a[(k + 2, j)] -= sub;
                        }
                        let sub1 = pp * y;
                        a[(k + 1, j)] -= sub1;
                        let sub2 = pp * x;
                        a[(k, j)] -= sub2;
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = x * a[(i, k)] + y * a[(i, k + 1)];
                        if k != nn - 1 {
                            pp += z * a[(i, k + 2)];
                            let sub = pp * r;
                            a[(i, k + 2)] -= sub;
                        }
                        let sub1 = pp * q;
                        a[(i, k + 1)] -= sub1;
                        a[(i, k)] -= pp;
                    }
                }
            }
        }
    }
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    type M = Matrix<f64>;
    type C = Complex<f64>;

    fn sorted_by_modulus(mut eigs: Vec<C>) -> Vec<C> {
        eigs.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap());
        eigs
    }

    #[test]
    fn identity_all_ones() {
        let eigs = eigenvalues(&M::identity(5)).unwrap();
        for e in eigs {
            assert!((e.re - 1.0).abs() < 1e-14);
            assert!(e.im.abs() < 1e-14);
        }
    }

    #[test]
    fn diagonal_matrix() {
        let mut a = M::zeros(2, 2);
        a[(0, 0)] = 0.9;
        a[(1, 1)] = 0.5;
        let eigs = sorted_by_modulus(eigenvalues(&a).unwrap());
        assert!((eigs[0].re - 0.9).abs() < 1e-14);
        assert!((eigs[1].re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn rotation_quarter_pi() {
        let th = std::f64::consts::FRAC_PI_4;
        let a = M::from_rows(&[vec![th.cos(), -th.sin()], vec![th.sin(), th.cos()]]);
        let eigs = eigenvalues(&a).unwrap();
        for e in &eigs {
            assert!((e.norm() - 1.0).abs() < 1e-14);
            assert!((e.re - th.cos()).abs() < 1e-14);
            assert!((e.im.abs() - th.sin()).abs() < 1e-14);
        }
        assert!((eigs[0].im + eigs[1].im).abs() < 1e-14, "conjugate pair");
    }

    #[test]
    fn companion_matrix_known_roots() {
        // p(x) = (x-1)(x-2)(x-3)(x+0.5)
        //      = x^4 - 5.5 x^3 + 8 x^2 - 0.5 x - 3
        let c = [5.5, -8.0, 0.5, 3.0]; // coefficients for companion top row
        let mut a = M::zeros(4, 4);
        for (j, v) in c.iter().enumerate() {
            a[(0, j)] = *v;
        }
        for i in 1..4 {
            a[(i, i - 1)] = 1.0;
        }
        let mut roots: Vec<f64> = eigenvalues(&a).unwrap().iter().map(|e| e.re).collect();
        roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let expect = [-0.5, 1.0, 2.0, 3.0];
        for (r, e) in roots.iter().zip(expect) {
            assert!((r - e).abs() < 1e-10, "root {r} vs {e}");
        }
    }

    #[test]
    fn defective_jordan_block() {
        let a = M::from_rows(&[vec![2.0, 1.0], vec![0.0, 2.0]]);
        let eigs = eigenvalues(&a).unwrap();
        for e in eigs {
            // Defective eigenvalues are only accurate to ~sqrt(eps).
            assert!((e - C::new(2.0, 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn trace_invariants_random() {
        let mut r = SplitMix64::new(77);
        for n in [8usize, 30, 60] {
            let a = M::from_fn(n, n, |_, _| r.uniform_in(-1.0, 1.0));
            let eigs = eigenvalues(&a).unwrap();
            let tr1: f64 = (0..n).map(|i| a[(i, i)]).sum();
            let a2 = a.mul(&a);
            let tr2: f64 = (0..n).map(|i| a2[(i, i)]).sum();
            let a3 = a2.mul(&a);
            let tr3: f64 = (0..n).map(|i| a3[(i, i)]).sum();
            let s1: C = eigs.iter().sum();
            let s2: C = eigs.iter().map(|e| e * e).sum();
            let s3: C = eigs.iter().map(|e| e * e * e).sum();
            let scale = tr2.abs().max(1.0);
            assert!((s1.re - tr1).abs() / scale < 1e-10, "n={n}");
            assert!(s1.im.abs() / scale < 1e-10);
            assert!((s2.re - tr2).abs() / scale < 1e-9);
            assert!((s3.re - tr3).abs() / tr3.abs().max(1.0) < 1e-9);
        }
    }

    #[test]
    fn eigenvectors_have_small_residual() {
        let mut r = SplitMix64::new(5150);
        for n in [2usize, 6, 20] {
            let a = M::from_fn(n, n, |_, _| r.uniform_in(-1.0, 1.0));
            let (eigs, vecs) = eigenvalues_and_vectors(&a).unwrap();
            for (lam, v) in eigs.iter().zip(&vecs) {
                // ||Av - lambda v|| / ||v||
                let mut res = 0.0f64;
                for i in 0..n {
                    let mut av = C::new(0.0, 0.0);
                    for j in 0..n {
                        av += C::new(a[(i, j)], 0.0) * v[j];
                    }
                    res += (av - lam * v[i]).norm_sqr();
                }
                assert!(res.sqrt() < 1e-8, "residual {} at n={n}", res.sqrt());
            }
        }
    }
}
