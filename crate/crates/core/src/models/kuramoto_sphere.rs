//! The phase-sphere system obtained from the Lohe matrix model on U(2):
//!
//! theta_j' = nu_j + (k1/N) sum_k <x_j,x_k> sin(theta_k - theta_j)
//! x_j'     = Omega_j x_j + (k2/N) sum_k cos(theta_k - theta_j) (x_k - <x_j,x_k> x_j)
//!
//! With k1 = k2 = kappa and d = 4 this is the Pauli reduction of the Lohe
//! matrix model with coupling kappa/(2N).

use nalgebra::{DMatrix, DVector};

use super::sphere::sphere_pull;
use super::{check_count, vector_tensor};
use crate::error::Result;
use crate::symbol::{CharacteristicSymbol, CouplingTensor};
use crate::tensor::{FrequencyTensor, SizeVector};

#[derive(Clone, Debug, PartialEq)]
pub struct KuramotoSphere {
    pub nu: Vec<f64>,
    pub omegas: Vec<DMatrix<f64>>,
    pub kappa_phase: f64,
    pub kappa_sphere: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KuramotoSphereState {
    pub theta: Vec<f64>,
    pub x: Vec<DVector<f64>>,
    pub model: KuramotoSphere,
}

/// J = [[0, -1], [1, 0]].
pub fn rotation_generator() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])
}

pub fn phase_vector(theta: f64) -> DVector<f64> {
    DVector::from_column_slice(&[theta.cos(), theta.sin()])
}

impl KuramotoSphere {
    pub fn rhs(&self, state: &(Vec<f64>, Vec<DVector<f64>>)) -> (Vec<f64>, Vec<DVector<f64>>) {
        let (theta, x) = state;
        let n = theta.len() as f64;
        let dtheta = (0..theta.len())
            .map(|j| {
                let pull: f64 = (0..theta.len())
                    .map(|k| x[j].dot(&x[k]) * (theta[k] - theta[j]).sin())
                    .sum();
                self.nu[j] + self.kappa_phase / n * pull
            })
            .collect();
        let dx = (0..x.len())
            .map(|j| &self.omegas[j] * &x[j] + sphere_pull(x, j, |k| (theta[k] - theta[j]).cos(), self.kappa_sphere))
            .collect();
        (dtheta, dx)
    }

    /// Velocities of y_j = (cos theta_j, sin theta_j) and x_j, by the chain rule.
    pub fn y_form_rhs(&self, state: &(Vec<f64>, Vec<DVector<f64>>)) -> (Vec<DVector<f64>>, Vec<DVector<f64>>) {
        let (dtheta, dx) = self.rhs(state);
        let j = rotation_generator();
        let dy = state
            .0
            .iter()
            .zip(&dtheta)
            .map(|(&t, &dt)| &j * phase_vector(t) * dt)
            .collect();
        (dy, dx)
    }

    /// Component symbols (2, (k1, 0), nu_j J, y_j) and (d, (k2, 0), Omega_j, x_j).
    pub fn symbols(&self, theta: &[f64], x: &[DVector<f64>]) -> Result<[CharacteristicSymbol; 2]> {
        check_count(theta.len(), x.len())?;
        let jgen = rotation_generator();
        let phase = CharacteristicSymbol::new(
            SizeVector::new(vec![2])?,
            CouplingTensor::new(1, vec![self.kappa_phase, 0.0])?,
            self.nu
                .iter()
                .map(|&nu| FrequencyTensor::from_real_matrix(&(&jgen * nu)))
                .collect::<Result<_>>()?,
            theta.iter().map(|&t| vector_tensor(&phase_vector(t))).collect(),
        )?;
        let sphere = CharacteristicSymbol::new(
            SizeVector::new(vec![x[0].len()])?,
            CouplingTensor::new(1, vec![self.kappa_sphere, 0.0])?,
            self.omegas.iter().map(FrequencyTensor::from_real_matrix).collect::<Result<_>>()?,
            x.iter().map(vector_tensor).collect(),
        )?;
        Ok([phase, sphere])
    }
}

pub fn kuramoto_sphere_rhs(s: &KuramotoSphereState) -> (Vec<f64>, Vec<DVector<f64>>) {
    s.model.rhs(&(s.theta.clone(), s.x.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synchronized_state_rotates_freely() {
        let om = DMatrix::from_row_slice(3, 3, &[0.0, 0.2, 0.0, -0.2, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let x = DVector::from_column_slice(&[0.0, 0.6, 0.8]);
        let s = KuramotoSphereState {
            theta: vec![0.4; 3],
            x: vec![x.clone(); 3],
            model: KuramotoSphere {
                nu: vec![1.0, 2.0, 3.0],
                omegas: vec![om.clone(); 3],
                kappa_phase: 1.5,
                kappa_sphere: 0.5,
            },
        };
        let (dt, dx) = kuramoto_sphere_rhs(&s);
        assert_eq!(dt, vec![1.0, 2.0, 3.0]);
        for v in dx {
            assert!((v - &om * &x).norm() < 1e-15);
        }
    }
}
