//! Named low-rank models and the embeddings that turn them into
//! characteristic symbols.
//!
//! Every model comes as a parameter struct with an `rhs` method on the
//! dynamic variables, plus the free function named after the model acting
//! on a state that carries both.

use nalgebra::{DMatrix, DVector};

use crate::error::{shape_err, Result};
use crate::symbol::fuse_freq;
use crate::tensor::{DenseTensor, FrequencyTensor, SizeVector, C64};

pub mod generate;
pub mod kuramoto;
pub mod kuramoto_sphere;
pub mod matrix;
pub mod pauli;
pub mod sphere;
pub mod sphere_so;

pub use generate::{generate_initial, Constraint, GenerationSpec, InitialData, InitialKind};
pub use kuramoto::{kuramoto_rhs, Kuramoto, KuramotoState};
pub use kuramoto_sphere::{kuramoto_sphere_rhs, KuramotoSphere, KuramotoSphereState};
pub use matrix::{double_matrix_rhs, lohe_matrix_rhs, DoubleMatrix, GeneralizedLoheMatrix, LoheMatrix, MatrixState};
pub use pauli::{omega_matrix, pauli_decode, pauli_encode, pauli_hamiltonian, PauliCoordinates};
pub use sphere::{double_sphere_rhs, swarm_sphere_rhs, DoubleSphere, HermitianSphere, SphereState, SwarmSphere};
pub use sphere_so::{sphere_so_rhs, SphereSo, SphereSoState};

pub fn vector_tensor(x: &DVector<f64>) -> DenseTensor {
    DenseTensor::from_real(SizeVector::new(vec![x.len()]).expect("non-empty vector"), x.as_slice())
        .expect("length matches")
}

pub fn complex_vector_tensor(z: &DVector<C64>) -> DenseTensor {
    DenseTensor::new(SizeVector::new(vec![z.len()]).expect("non-empty vector"), z.as_slice().to_vec())
        .expect("length matches")
}

/// Real parts of a rank-1 tensor.
pub fn tensor_vector(t: &DenseTensor) -> DVector<f64> {
    DVector::from_iterator(t.data().len(), t.data().iter().map(|z| z.re))
}

pub fn tensor_complex_vector(t: &DenseTensor) -> DVector<C64> {
    DVector::from_column_slice(t.data())
}

pub fn real_matrix_tensor(m: &DMatrix<f64>) -> DenseTensor {
    DenseTensor::from_matrix(&complexify(m))
}

/// Real parts of a rank-2 tensor.
pub fn tensor_real_matrix(t: &DenseTensor) -> Result<DMatrix<f64>> {
    Ok(t.to_matrix()?.map(|z| z.re))
}

pub fn complexify(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|x| C64::new(x, 0.0))
}

/// Frequency tensor acting on n x m matrices by T -> B T.
pub fn left_multiplication_freq(b: &DMatrix<C64>, cols: usize) -> Result<FrequencyTensor> {
    if !b.is_square() {
        return shape_err("left multiplier must be square");
    }
    let size = SizeVector::new(vec![b.nrows(), cols])?;
    FrequencyTensor::new(size, b.kronecker(&DMatrix::identity(cols, cols)))
}

/// Frequency tensor of T -> Omega T + T Lambda^T on d1 x d2 matrices.
pub fn build_rank2_freq(omega: &DMatrix<f64>, lambda: &DMatrix<f64>) -> Result<FrequencyTensor> {
    if !omega.is_square() || !lambda.is_square() {
        return shape_err("frequency blocks must be square");
    }
    let a = FrequencyTensor::from_real_matrix(omega)?;
    let b = FrequencyTensor::from_real_matrix(lambda)?;
    Ok(fuse_freq(&a, &b))
}

pub(crate) fn check_count(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(crate::Error::EnsembleSize { left: a, right: b });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::apply_freq;

    #[test]
    fn rank2_frequency_is_two_sided_product() {
        let omega = DMatrix::from_row_slice(2, 2, &[0.0, -0.3, 0.3, 0.0]);
        let lambda = DMatrix::from_row_slice(2, 2, &[0.0, 1.1, -1.1, 0.0]);
        let a = build_rank2_freq(&omega, &lambda).unwrap();
        let t = DMatrix::from_row_slice(2, 2, &[0.2, -0.7, 0.5, 0.1]);
        let got = apply_freq(&a, &real_matrix_tensor(&t)).unwrap();
        let want = real_matrix_tensor(&(&omega * &t + &t * lambda.transpose()));
        assert!(got.sub(&want).unwrap().norm() < 1e-15);

        let zero = build_rank2_freq(&DMatrix::zeros(2, 2), &DMatrix::zeros(3, 3)).unwrap();
        assert!(zero.matrix().iter().all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn left_multiplication() {
        let b = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 1.0), C64::new(2.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.5)]);
        let t = DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.5, 0.0), C64::new(0.0, -2.0)]);
        let a = left_multiplication_freq(&b, 2).unwrap();
        let got = apply_freq(&a, &DenseTensor::from_matrix(&t)).unwrap();
        assert!(got.sub(&DenseTensor::from_matrix(&(&b * &t))).unwrap().norm() < 1e-15);
    }
}
