//! Koopman spectra: eigenvalues (optionally eigenvectors) of K, sorted by
//! descending modulus.

use num_complex::Complex64;

use kdla_num::{eigenvalues, eigenvalues_and_vectors};

use crate::error::KoopmanError;
use crate::model::KoopmanModel;

#[derive(Debug, Clone)]
pub struct KoopmanSpectrum {
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: Option<Vec<Vec<Complex64>>>,
}

impl KoopmanSpectrum {
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// How many eigenvalues sit outside the unit circle beyond `tol`.
    pub fn count_outside_unit_circle(&self, tol: f64) -> usize {
        self.eigenvalues
            .iter()
            .filter(|z| z.norm() > 1.0 + tol)
            .count()
    }
}

pub fn spectrum(model: &KoopmanModel) -> Result<KoopmanSpectrum, KoopmanError> {
    let mut eigs = eigenvalues(&model.k)?;
    eigs.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap());
    Ok(KoopmanSpectrum {
        eigenvalues: eigs,
        eigenvectors: None,
    })
}

pub fn spectrum_with_vectors(model: &KoopmanModel) -> Result<KoopmanSpectrum, KoopmanError> {
    let (eigs, vecs) = eigenvalues_and_vectors(&model.k)?;
    let mut order: Vec<usize> = (0..eigs.len()).collect();
    order.sort_by(|&a, &b| eigs[b].norm().partial_cmp(&eigs[a].norm()).unwrap());
    Ok(KoopmanSpectrum {
        eigenvalues: order.iter().map(|&i| eigs[i]).collect(),
        eigenvectors: Some(order.iter().map(|&i| vecs[i].clone()).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::{DictionaryArch, DictionaryNet};
    use crate::model::TrainMetadata;
    use kdla_num::{Activation, Mat};

    fn model_with_k(k: Mat) -> KoopmanModel {
        let n = k.rows();
        let arch = DictionaryArch {
            hidden: vec![],
            trainable_dim: 0,
            activations: vec![Activation::Linear],
            include_constant: false,
        };
        let dict = DictionaryNet::new(n, &arch, 0).unwrap();
        KoopmanModel::new(k, dict, 0.1, TrainMetadata::default()).unwrap()
    }

    #[test]
    fn identity_spectrum() {
        let s = spectrum(&model_with_k(Mat::identity(4))).unwrap();
        assert_eq!(s.eigenvalues.len(), 4);
        for z in &s.eigenvalues {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-13);
        }
        assert!((s.spectral_radius() - 1.0).abs() < 1e-13);
        assert_eq!(s.count_outside_unit_circle(1e-9), 0);
    }

    #[test]
    fn rotation_eigenvalues_on_unit_circle() {
        let th = std::f64::consts::FRAC_PI_4;
        let k = Mat::from_rows(&[vec![th.cos(), -th.sin()], vec![th.sin(), th.cos()]]);
        let s = spectrum(&model_with_k(k)).unwrap();
        for z in &s.eigenvalues {
            assert!((z.norm() - 1.0).abs() < 1e-13);
            assert!((z.re - th.cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn diagonal_sorted_by_modulus() {
        let mut k = Mat::zeros(2, 2);
        k[(0, 0)] = 0.5;
        k[(1, 1)] = 0.9;
        let s = spectrum(&model_with_k(k)).unwrap();
        assert!((s.eigenvalues[0].re - 0.9).abs() < 1e-14);
        assert!((s.eigenvalues[1].re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn vectors_satisfy_eigen_residual() {
        let mut r = kdla_num::SplitMix64::new(3);
        let k = Mat::from_fn(8, 8, |_, _| r.uniform_in(-0.5, 0.5));
        let model = model_with_k(k.clone());
        let s = spectrum_with_vectors(&model).unwrap();
        let vecs = s.eigenvectors.as_ref().unwrap();
        for (lam, v) in s.eigenvalues.iter().zip(vecs) {
            let mut res = 0.0f64;
            let mut norm = 0.0f64;
            for i in 0..8 {
                let mut av = Complex64::new(0.0, 0.0);
                for j in 0..8 {
                    av += Complex64::new(k[(i, j)], 0.0) * v[j];
                }
                res += (av - lam * v[i]).norm_sqr();
                norm += v[i].norm_sqr();
            }
            assert!(res.sqrt() / norm.sqrt() < 1e-8);
        }
    }
}
