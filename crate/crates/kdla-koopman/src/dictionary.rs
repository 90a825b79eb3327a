//! Trainable observable dictionaries.
//!
//! The lifted vector Ψ(x) stacks, in order: the raw state (n rows), an
//! optional constant row of ones, and the d trainable MLP outputs. The
//! first n observables being the state itself makes the map back to state
//! space a plain projection, exact on every lifted point.

use kdla_num::{Activation, Mat, MlpCache, NumError};

use crate::error::KoopmanError;

/// Architecture of a dictionary network.
#[derive(Debug, Clone, PartialEq)]
pub struct DictionaryArch {
    pub hidden: Vec<usize>,
    pub trainable_dim: usize,
    pub activations: Vec<Activation>,
    pub include_constant: bool,
}

impl DictionaryArch {
    /// Hidden layers plus output layer must each carry an activation tag.
    pub fn validate(&self) -> Result<(), KoopmanError> {
        if self.activations.len() != self.hidden.len() + 1 {
            return Err(KoopmanError::Config(format!(
                "architecture needs {} activation tags (hidden layers + output), got {}",
                self.hidden.len() + 1,
                self.activations.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DictionaryNet {
    state_dim: usize,
    include_constant: bool,
    net: kdla_num::Mlp,
}

impl DictionaryNet {
    pub fn new(state_dim: usize, arch: &DictionaryArch, seed: u64) -> Result<Self, KoopmanError> {
        arch.validate()?;
        if state_dim == 0 {
            return Err(KoopmanError::Config("state dimension must be > 0".into()));
        }
        let mut sizes = Vec::with_capacity(arch.hidden.len() + 2);
        sizes.push(state_dim);
        sizes.extend_from_slice(&arch.hidden);
        sizes.push(arch.trainable_dim);
        let net = kdla_num::Mlp::new_seeded(&sizes, &arch.activations, seed);
        Ok(DictionaryNet {
            state_dim,
            include_constant: arch.include_constant,
            net,
        })
    }

    pub fn from_parts(
        state_dim: usize,
        include_constant: bool,
        net: kdla_num::Mlp,
    ) -> Result<Self, KoopmanError> {
        if net.input_dim() != state_dim {
            return Err(KoopmanError::Config(format!(
                "network input width {} does not match state dimension {state_dim}",
                net.input_dim()
            )));
        }
        Ok(DictionaryNet {
            state_dim,
            include_constant,
            net,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn trainable_dim(&self) -> usize {
        self.net.output_dim()
    }

    pub fn include_constant(&self) -> bool {
        self.include_constant
    }

    /// Lifted dimension D = n + d (+1 with the constant).
    pub fn lifted_dim(&self) -> usize {
        self.state_dim + usize::from(self.include_constant) + self.trainable_dim()
    }

    /// Row range of the trainable block inside a lifted matrix.
    pub fn trainable_rows(&self) -> std::ops::Range<usize> {
        let start = self.state_dim + usize::from(self.include_constant);
        start..self.lifted_dim()
    }

    pub fn net(&self) -> &kdla_num::Mlp {
        &self.net
    }

    pub fn net_mut(&mut self) -> &mut kdla_num::Mlp {
        &mut self.net
    }

    /// Ψ(X): lift a column batch of states.
    pub fn lift(&self, x: &Mat) -> Result<Mat, KoopmanError> {
        Ok(self.lift_with_cache(x)?.0)
    }

    /// Lift plus the MLP cache needed to backpropagate through the lift.
    pub fn lift_with_cache(&self, x: &Mat) -> Result<(Mat, MlpCache<f64>), KoopmanError> {
        if x.rows() != self.state_dim {
            return Err(NumError::dim(
                "lift",
                format!("state rows {}, expected {}", x.rows(), self.state_dim),
            )
            .into());
        }
        let (y, cache) = self.net.forward(x)?;
        let psi = if self.include_constant {
            let ones = Mat::from_fn(1, x.cols(), |_, _| 1.0);
            Mat::vstack(&[x, &ones, &y])
        } else {
            Mat::vstack(&[x, &y])
        };
        Ok((psi, cache))
    }

    /// χ̃(Ψ): project a lifted batch back onto the state block.
    pub fn readback(&self, psi: &Mat) -> Result<Mat, KoopmanError> {
        if psi.rows() != self.lifted_dim() {
            return Err(NumError::dim(
                "readback",
                format!("lifted rows {}, expected {}", psi.rows(), self.lifted_dim()),
            )
            .into());
        }
        Ok(psi.row_block(0, self.state_dim))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kdla_num::SplitMix64;

    fn random_states(n: usize, m: usize, seed: u64) -> Mat {
        let mut r = SplitMix64::new(seed);
        Mat::from_fn(n, m, |_, _| r.uniform_in(-2.0, 2.0))
    }

    fn elu_arch(hidden: &[usize], d: usize, constant: bool) -> DictionaryArch {
        DictionaryArch {
            hidden: hidden.to_vec(),
            trainable_dim: d,
            activations: vec![Activation::Elu; hidden.len() + 1],
            include_constant: constant,
        }
    }

    #[test]
    fn zero_net_lift_is_state_over_zeros() {
        let mut dict = DictionaryNet::new(2, &elu_arch(&[4], 3, false), 1).unwrap();
        for w in dict.net_mut().weights_mut() {
            w.scale_mut(0.0);
        }
        let x = random_states(2, 5, 2);
        let psi = dict.lift(&x).unwrap();
        assert_eq!(psi.rows(), 5);
        assert_eq!(psi.row_block(0, 2), x);
        assert_eq!(psi.row_block(2, 5).fro_norm(), 0.0);
    }

    #[test]
    fn constant_row_is_ones() {
        let dict = DictionaryNet::new(2, &elu_arch(&[4], 3, true), 1).unwrap();
        let x = random_states(2, 6, 3);
        let psi = dict.lift(&x).unwrap();
        assert_eq!(psi.rows(), 6);
        for j in 0..6 {
            assert_eq!(psi[(2, j)], 1.0);
        }
        assert_eq!(dict.trainable_rows(), 3..6);
    }

    #[test]
    fn duffing_table_shape() {
        // 2/100/100/100 net with 100 trainable elements: D = 102.
        let dict = DictionaryNet::new(2, &elu_arch(&[100, 100, 100], 100, false), 7).unwrap();
        assert_eq!(dict.lifted_dim(), 102);
        let x = random_states(2, 11, 4);
        let psi = dict.lift(&x).unwrap();
        assert_eq!((psi.rows(), psi.cols()), (102, 11));
    }

    #[test]
    fn readback_inverts_lift_exactly() {
        for constant in [false, true] {
            let dict = DictionaryNet::new(3, &elu_arch(&[8, 8], 5, constant), 9).unwrap();
            let x = random_states(3, 7, 5);
            let psi = dict.lift(&x).unwrap();
            assert_eq!(dict.readback(&psi).unwrap(), x);
        }
    }

    #[test]
    fn empty_dictionary_is_identity() {
        let dict = DictionaryNet::new(3, &elu_arch(&[], 0, false), 1).unwrap();
        assert_eq!(dict.lifted_dim(), 3);
        let x = random_states(3, 4, 6);
        let psi = dict.lift(&x).unwrap();
        assert_eq!(psi, x);
        assert_eq!(dict.readback(&psi).unwrap(), x);
    }

    #[test]
    fn beating_wave_table_shape() {
        // 64/100/100/100 with 50 trainable elements: D = 114, readback 64.
        let dict = DictionaryNet::new(64, &elu_arch(&[100, 100, 100], 50, false), 7).unwrap();
        assert_eq!(dict.lifted_dim(), 114);
        let x = random_states(64, 3, 8);
        let psi = dict.lift(&x).unwrap();
        assert_eq!(psi.rows(), 114);
        assert_eq!(dict.readback(&psi).unwrap().rows(), 64);
    }

    #[test]
    fn shape_errors() {
        let dict = DictionaryNet::new(2, &elu_arch(&[4], 3, false), 1).unwrap();
        assert!(dict.lift(&random_states(3, 5, 1)).is_err());
        assert!(dict.readback(&random_states(4, 5, 1)).is_err());
        let bad_arch = DictionaryArch {
            hidden: vec![4],
            trainable_dim: 3,
            activations: vec![Activation::Elu],
            include_constant: false,
        };
        assert!(DictionaryNet::new(2, &bad_arch, 1).is_err());
    }
}
