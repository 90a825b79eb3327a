//! Least-squares Koopman matrix fits on lifted snapshot pairs.

use kdla_num::{pinv, Mat, NumError};

use crate::error::KoopmanError;

/// Time-aligned lifted snapshot matrices (D x M each).
#[derive(Debug, Clone)]
pub struct ObservablePair {
    pub psi_t: Mat,
    pub psi_tdt: Mat,
    pub dt: f64,
}

impl ObservablePair {
    pub fn new(psi_t: Mat, psi_tdt: Mat, dt: f64) -> Result<Self, KoopmanError> {
        if psi_t.rows() != psi_tdt.rows() || psi_t.cols() != psi_tdt.cols() {
            return Err(NumError::dim(
                "observable_pair",
                format!(
                    "{}x{} vs {}x{}",
                    psi_t.rows(),
                    psi_t.cols(),
                    psi_tdt.rows(),
                    psi_tdt.cols()
                ),
            )
            .into());
        }
        if psi_t.cols() == 0 {
            return Err(KoopmanError::Config("observable pair has no snapshots".into()));
        }
        Ok(ObservablePair { psi_t, psi_tdt, dt })
    }

    pub fn lifted_dim(&self) -> usize {
        self.psi_t.rows()
    }

    pub fn len(&self) -> usize {
        self.psi_t.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Best linear one-step predictor K of ψ(t+δt) from ψ(t).
///
/// With `tikhonov = 0` this is the pseudoinverse solution
/// `K = ψ(t+δt) ψ(t)⁺` (relative truncation `rcond`). With γ > 0 the ridge
/// acts on the unnormalized snapshot Gram: `K = A (G + γI)⁻¹` with
/// `G = ψ(t)ψ(t)ᵀ`, `A = ψ(t+δt)ψ(t)ᵀ`. Scaling the Gram by 1/M instead
/// would turn the standard γ = 0.1 into a per-step contraction of every
/// mode, which sends alternating-trained rollouts to the origin.
pub fn edmd_fit(pair: &ObservablePair, tikhonov: f64, rcond: f64) -> Result<Mat, KoopmanError> {
    if !pair.psi_t.is_finite() || !pair.psi_tdt.is_finite() {
        return Err(NumError::non_finite("edmd_fit", "lifted snapshots contain NaN/Inf").into());
    }
    if tikhonov < 0.0 {
        return Err(KoopmanError::Config("tikhonov must be nonnegative".into()));
    }
    if tikhonov == 0.0 {
        let p = pinv(&pair.psi_t, rcond)?;
        return Ok(pair.psi_tdt.mul(&p));
    }
    let mut g = pair.psi_t.mul_transpose_b(&pair.psi_t);
    for i in 0..g.rows() {
        g[(i, i)] += tikhonov;
    }
    let a = pair.psi_tdt.mul_transpose_b(&pair.psi_t);
    // K = A G⁻¹, via Cholesky: solve G Y = Aᵀ, K = Yᵀ.
    let chol = cholesky(&g)?;
    let at = a.transpose();
    let mut y = Mat::zeros(g.rows(), at.cols());
    let mut col = vec![0.0; g.rows()];
    for j in 0..at.cols() {
        for i in 0..g.rows() {
            col[i] = at[(i, j)];
        }
        cholesky_solve(&chol, &mut col);
        for i in 0..g.rows() {
            y[(i, j)] = col[i];
        }
    }
    Ok(y.transpose())
}

/// Lower-triangular Cholesky factor of an SPD matrix.
fn cholesky(g: &Mat) -> Result<Mat, KoopmanError> {
    let n = g.rows();
    let mut l = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = g[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(KoopmanError::Config(format!(
                        "Gram matrix not positive definite at pivot {i} (value {s}); \
                         increase the Tikhonov regularizer"
                    )));
                }
                l[(i, j)] = s.sqrt();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    Ok(l)
}

fn cholesky_solve(l: &Mat, b: &mut [f64]) {
    let n = l.rows();
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * b[k];
        }
        b[i] = s / l[(i, i)];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[(k, i)] * b[k];
        }
        b[i] = s / l[(i, i)];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kdla_num::{eigenvalues, SplitMix64, RCOND_DEFAULT};

    fn random(rows: usize, cols: usize, seed: u64) -> Mat {
        let mut r = SplitMix64::new(seed);
        Mat::from_fn(rows, cols, |_, _| r.uniform_in(-1.0, 1.0))
    }

    #[test]
    fn scalar_least_squares() {
        // ψt = [1 2 3], ψ(t+δt) = [2 4 6]: K = 28/14 = 2.
        let pair = ObservablePair::new(
            Mat::from_rows(&[vec![1.0, 2.0, 3.0]]),
            Mat::from_rows(&[vec![2.0, 4.0, 6.0]]),
            0.1,
        )
        .unwrap();
        let k = edmd_fit(&pair, 0.0, RCOND_DEFAULT).unwrap();
        assert!((k[(0, 0)] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn identity_dynamics() {
        let psi = random(6, 40, 1);
        let pair = ObservablePair::new(psi.clone(), psi, 0.1).unwrap();
        let k = edmd_fit(&pair, 0.0, RCOND_DEFAULT).unwrap();
        assert!(k.sub(&Mat::identity(6)).fro_norm() < 1e-12);
    }

    #[test]
    fn recovers_generating_matrix() {
        // ψ(t+δt) = Λ ψ(t) on full-rank data with M = 5D.
        let d = 12;
        let lam = random(d, d, 2);
        let psi_t = random(d, 5 * d, 3);
        let psi_tdt = lam.mul(&psi_t);
        let pair = ObservablePair::new(psi_t, psi_tdt, 0.1).unwrap();
        let k = edmd_fit(&pair, 0.0, RCOND_DEFAULT).unwrap();
        assert!(k.sub(&lam).fro_norm() < 1e-8, "err {}", k.sub(&lam).fro_norm());

        // Eigenvalues carried over too.
        let mut ek: Vec<f64> = eigenvalues(&k).unwrap().iter().map(|z| z.norm()).collect();
        let mut el: Vec<f64> = eigenvalues(&lam).unwrap().iter().map(|z| z.norm()).collect();
        ek.sort_by(|a, b| a.partial_cmp(b).unwrap());
        el.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in ek.iter().zip(&el) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_tikhonov_is_the_frobenius_minimizer() {
        // Any perturbation of K strictly increases the residual.
        let d = 5;
        let psi_t = random(d, 30, 4);
        let psi_tdt = random(d, 30, 5);
        let pair = ObservablePair::new(psi_t.clone(), psi_tdt.clone(), 0.1).unwrap();
        let k = edmd_fit(&pair, 0.0, RCOND_DEFAULT).unwrap();
        let base = psi_tdt.sub(&k.mul(&psi_t)).fro_norm();
        let mut rng = SplitMix64::new(9);
        for _ in 0..10 {
            let mut kp = k.clone();
            for v in kp.data_mut() {
                *v += 1e-3 * rng.uniform_in(-1.0, 1.0);
            }
            let perturbed = psi_tdt.sub(&kp.mul(&psi_t)).fro_norm();
            assert!(perturbed > base, "{perturbed} vs {base}");
        }
    }

    #[test]
    fn tikhonov_matches_direct_inverse() {
        let d = 6;
        let psi_t = random(d, 50, 6);
        let psi_tdt = random(d, 50, 7);
        let pair = ObservablePair::new(psi_t.clone(), psi_tdt.clone(), 0.1).unwrap();
        let gamma = 0.1;
        let k = edmd_fit(&pair, gamma, RCOND_DEFAULT).unwrap();
        // Reference through the pseudoinverse of the regularized Gram.
        let mut g = psi_t.mul_transpose_b(&psi_t);
        for i in 0..d {
            g[(i, i)] += gamma;
        }
        let a = psi_tdt.mul_transpose_b(&psi_t);
        let k_ref = a.mul(&pinv(&g, 0.0).unwrap());
        assert!(k.sub(&k_ref).fro_norm() < 1e-10);
    }

    #[test]
    fn tikhonov_limits_to_least_squares() {
        // As gamma -> 0 the ridge fit approaches the pseudoinverse
        // solution on full-rank data.
        let d = 5;
        let psi_t = random(d, 60, 9);
        let psi_tdt = random(d, 60, 10);
        let pair = ObservablePair::new(psi_t, psi_tdt, 0.1).unwrap();
        let k0 = edmd_fit(&pair, 0.0, RCOND_DEFAULT).unwrap();
        let k_small = edmd_fit(&pair, 1e-10, RCOND_DEFAULT).unwrap();
        assert!(k0.sub(&k_small).fro_norm() < 1e-8);
    }

    #[test]
    fn non_finite_rejected() {
        let mut psi = random(3, 10, 8);
        psi[(1, 4)] = f64::INFINITY;
        let pair = ObservablePair::new(psi.clone(), psi, 0.1);
        // constructor allows it; the fit rejects
        let pair = pair.unwrap();
        assert!(edmd_fit(&pair, 0.0, RCOND_DEFAULT).is_err());
    }
}
