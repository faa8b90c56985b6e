//! U(2) in Pauli coordinates: U = e^{-i theta} (i sum_k x^k sigma_k + x^4 I)
//! with x on the unit sphere of R^4.

use nalgebra::DMatrix;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::tensor::C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliCoordinates {
    pub theta: f64,
    pub x: [f64; 4],
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli_encode(p: &PauliCoordinates) -> DMatrix<C64> {
    let [x1, x2, x3, x4] = p.x;
    let q = DMatrix::from_row_slice(2, 2, &[c(x4, x3), c(x2, x1), c(-x2, x1), c(x4, -x3)]);
    q * C64::from_polar(1.0, -p.theta)
}

/// Inverse of [`pauli_encode`] on the canonical branch: theta is first
/// taken in (-pi/2, pi/2] from det U = e^{-2 i theta}; then, if the largest
/// coordinate of x in magnitude (x^4 winning ties) is negative, (theta, x)
/// becomes (theta + pi, -x).
pub fn pauli_decode(u: &DMatrix<C64>) -> Result<PauliCoordinates> {
    if u.nrows() != 2 || u.ncols() != 2 {
        return Err(Error::Validation(format!("{}x{} matrix is not in U(2)", u.nrows(), u.ncols())));
    }
    let defect = (u.adjoint() * u - DMatrix::identity(2, 2)).norm();
    if defect > 1e-8 {
        return Err(Error::Validation(format!("matrix is not unitary (defect {defect:.3e})")));
    }
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let mut theta = -det.arg() / 2.0;
    if theta <= -FRAC_PI_2 {
        theta += std::f64::consts::PI;
    }
    let q = u * C64::from_polar(1.0, theta);
    let mut x = [
        (q[(0, 1)] + q[(1, 0)]).im / 2.0,
        (q[(0, 1)] - q[(1, 0)]).re / 2.0,
        (q[(0, 0)] - q[(1, 1)]).im / 2.0,
        (q[(0, 0)] + q[(1, 1)]).re / 2.0,
    ];
    let mut lead = 3;
    for k in 0..3 {
        if x[k].abs() > x[lead].abs() {
            lead = k;
        }
    }
    if x[lead] < 0.0 {
        theta += std::f64::consts::PI;
        x.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(PauliCoordinates { theta, x })
}

/// The real 4x4 skew-symmetric generator of the x-rotation induced by
/// H = sum_k omega^k sigma_k + nu I.
pub fn omega_matrix(w: [f64; 3]) -> DMatrix<f64> {
    let [w1, w2, w3] = w;
    DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, -w3, w2, -w1, //
            w3, 0.0, -w1, -w2, //
            -w2, w1, 0.0, -w3, //
            w1, w2, w3, 0.0,
        ],
    )
}

pub fn pauli_hamiltonian(w: [f64; 3], nu: f64) -> DMatrix<C64> {
    let [w1, w2, w3] = w;
    DMatrix::from_row_slice(2, 2, &[c(w3 + nu, 0.0), c(w1, -w2), c(w1, w2), c(nu - w3, 0.0)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn definition_values() {
        let id = pauli_encode(&PauliCoordinates {
            theta: 0.0,
            x: [0.0, 0.0, 0.0, 1.0],
        });
        assert_eq!(id, DMatrix::identity(2, 2));
        let s1 = pauli_encode(&PauliCoordinates {
            theta: 0.0,
            x: [1.0, 0.0, 0.0, 0.0],
        });
        assert_eq!(s1, DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, 0.0)]));
    }

    #[test]
    fn determinant_phase() {
        let p = PauliCoordinates {
            theta: 0.37,
            x: [0.5, -0.5, 0.5, 0.5],
        };
        let u = pauli_encode(&p);
        let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
        assert!((det - C64::from_polar(1.0, -2.0 * 0.37)).norm() < 1e-15);
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let h = pauli_hamiltonian([0.3, -1.2, 0.7], 0.4);
        assert!((h.adjoint() - &h).norm() < 1e-15);
        let om = omega_matrix([0.3, -1.2, 0.7]);
        assert!((om.transpose() + om).norm() == 0.0);
    }

    #[test]
    fn decode_rejects_non_unitary() {
        let m = DMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(pauli_decode(&m).is_err());
    }
}
