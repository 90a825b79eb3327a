//! Moore-Penrose pseudoinverse and its closed-form reverse-mode derivative.
//!
//! The derivative follows the Golub / Decell expression for the differential
//! of the pseudoinverse of a real matrix,
//!
//! ```text
//! dA⁺ = -A⁺ dA A⁺ + (I - A⁺A) dAᵀ A⁺ᵀA⁺ + A⁺A⁺ᵀ dAᵀ (I - AA⁺),
//! ```
//!
//! so the backward pass never differentiates through the SVD itself. All
//! three terms are evaluated even though the third vanishes when A has full
//! row rank (the common tall-data layout here); the operation then stays
//! correct for arbitrary rank. Products are associated so that no
//! intermediate larger than `max(p, q) * min(p, q)` is formed.

use crate::error::NumError;
use crate::matrix::Matrix;
use crate::scalar::Real;
use crate::svd::svd;

/// Default relative cutoff: singular values below `RCOND_DEFAULT * sigma_max`
/// are treated as zero.
pub const RCOND_DEFAULT: f64 = 1e-12;

/// Pseudoinverse of `a` via SVD with relative truncation `rcond`.
pub fn pinv<T: Real>(a: &Matrix<T>, rcond: T) -> Result<Matrix<T>, NumError> {
    if rcond < T::zero() {
        return Err(NumError::dim("pinv", "rcond must be nonnegative"));
    }
    let s = svd(a)?;
    let k = s.sigma.len();
    if k == 0 {
        return Ok(Matrix::zeros(a.cols(), a.rows()));
    }
    let cutoff = rcond * s.sigma[0];
    // A⁺ = V Σ⁺ Uᵀ.
    let mut vs = s.v.clone();
    for j in 0..k {
        let sj = s.sigma[j];
        let inv = if sj > T::zero() && sj >= cutoff {
            T::one() / sj
        } else {
            T::zero()
        };
        for i in 0..vs.rows() {
            vs[(i, j)] *= inv;
        }
    }
    Ok(vs.mul_transpose_b(&s.u))
}

/// Vector-Jacobian product of [`pinv`]: given `upstream = dL/dA⁺`, returns
/// `dL/dA`. `a_pinv` must be the pseudoinverse of `a` (same truncation).
pub fn pinv_vjp<T: Real>(
    a: &Matrix<T>,
    a_pinv: &Matrix<T>,
    upstream: &Matrix<T>,
) -> Result<Matrix<T>, NumError> {
    let (p, q) = (a.rows(), a.cols());
    if a_pinv.rows() != q || a_pinv.cols() != p {
        return Err(a_pinv.shape_err("pinv_vjp", (q, p)));
    }
    if upstream.rows() != q || upstream.cols() != p {
        return Err(upstream.shape_err("pinv_vjp", (q, p)));
    }

    // Adjoint of dA⁺ applied to W (all terms p x q):
    //   term1 = -A⁺ᵀ W A⁺ᵀ
    //   term2 = (A⁺ᵀ A⁺ Wᵀ)(I - A⁺A)
    //   term3 = (I - AA⁺) Wᵀ (A⁺ A⁺ᵀ)
    let w_apt = upstream.mul_transpose_b(a_pinv); // q x q
    let mut out = a_pinv.tr_mul(&w_apt); // p x q
    out.scale_mut(-T::one());

    let ap_wt = a_pinv.mul_transpose_b(upstream); // q x q
    let t2a = a_pinv.tr_mul(&ap_wt); // p x q
    let t2a_ap = t2a.mul(a_pinv); // p x p
    out.add_assign(&t2a);
    out.axpy(-T::one(), &t2a_ap.mul(a));

    let ap_apt = a_pinv.mul_transpose_b(a_pinv); // q x q
    let t3a = upstream.tr_mul(&ap_apt); // p x q
    let ap_t3a = a_pinv.mul(&t3a); // q x q
    out.add_assign(&t3a);
    out.axpy(-T::one(), &a.mul(&ap_t3a));

    Ok(out)
}
