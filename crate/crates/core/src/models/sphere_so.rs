//! Sphere x SO(n) model:
//!
//! x_j' = Omega_j x_j + (kappa/N) sum_k <U_j,U_k>_F (x_k - <x_k,x_j> x_j)
//! U_j' = A_j U_j + (kappa/2N) sum_k <x_j,x_k> (U_k - U_j U_k^T U_j)

use nalgebra::{DMatrix, DVector};

use super::sphere::sphere_pull;
use super::{check_count, complexify, left_multiplication_freq, real_matrix_tensor, vector_tensor};
use crate::error::{Error, Result};
use crate::symbol::{CharacteristicSymbol, CouplingTensor};
use crate::tensor::{FrequencyTensor, SizeVector};

pub type SphereSoVars = (Vec<DVector<f64>>, Vec<DMatrix<f64>>);

#[derive(Clone, Debug, PartialEq)]
pub struct SphereSo {
    pub omegas: Vec<DMatrix<f64>>,
    pub amats: Vec<DMatrix<f64>>,
    pub coupling: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphereSoState {
    pub x: Vec<DVector<f64>>,
    pub u: Vec<DMatrix<f64>>,
    pub model: SphereSo,
}

/// Pairwise overlaps h_ij = <x_i,x_j>, g_ij = <U_i,U_j>_F and G_ij = U_i U_j^T.
#[derive(Clone, Debug)]
pub struct Overlaps {
    pub h: DMatrix<f64>,
    pub g: DMatrix<f64>,
    pub big_g: Vec<Vec<DMatrix<f64>>>,
}

impl Overlaps {
    pub fn of(state: &SphereSoVars) -> Self {
        let (x, u) = state;
        let n = x.len();
        Overlaps {
            h: DMatrix::from_fn(n, n, |i, j| x[i].dot(&x[j])),
            g: DMatrix::from_fn(n, n, |i, j| u[i].dot(&u[j])),
            big_g: (0..n)
                .map(|i| (0..n).map(|j| &u[i] * u[j].transpose()).collect())
                .collect(),
        }
    }
}

impl SphereSo {
    pub fn rhs(&self, state: &SphereSoVars) -> SphereSoVars {
        let (x, u) = state;
        let n = x.len() as f64;
        let dx = (0..x.len())
            .map(|j| &self.omegas[j] * &x[j] + sphere_pull(x, j, |k| u[j].dot(&u[k]), self.coupling))
            .collect();
        let du = (0..u.len())
            .map(|j| {
                let uj = &u[j];
                let mut acc = DMatrix::zeros(uj.nrows(), uj.ncols());
                for (k, uk) in u.iter().enumerate() {
                    acc += (uk - uj * uk.transpose() * uj) * x[j].dot(&x[k]);
                }
                &self.amats[j] * uj + acc * (self.coupling / (2.0 * n))
            })
            .collect();
        (dx, du)
    }

    /// Time derivatives of h_ij and G_ij implied by the flow:
    ///
    /// h_ij' = <x_i,(Omega_j - Omega_i) x_j> + (kappa/N) sum_k (g_ik (h_kj - h_ik h_ij) + g_jk (h_ik - h_kj h_ij))
    /// G_ij' = A_i G_ij - G_ij A_j + (kappa/2N) sum_k (h_ik (G_kj - G_ik G_ij) + h_jk (G_ik - G_ij G_kj))
    pub fn overlap_rates(&self, state: &SphereSoVars) -> (DMatrix<f64>, Vec<Vec<DMatrix<f64>>>) {
        let (x, _) = state;
        let o = Overlaps::of(state);
        let n = x.len();
        let nf = n as f64;
        let hdot = DMatrix::from_fn(n, n, |i, j| {
            let free = x[i].dot(&((&self.omegas[j] - &self.omegas[i]) * &x[j]));
            let pull: f64 = (0..n)
                .map(|k| o.g[(i, k)] * (o.h[(k, j)] - o.h[(i, k)] * o.h[(i, j)]) + o.g[(j, k)] * (o.h[(i, k)] - o.h[(k, j)] * o.h[(i, j)]))
                .sum();
            free + self.coupling / nf * pull
        });
        let gdot = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let gij = &o.big_g[i][j];
                        let mut acc = DMatrix::zeros(gij.nrows(), gij.ncols());
                        for k in 0..n {
                            acc += (&o.big_g[k][j] - &o.big_g[i][k] * gij) * o.h[(i, k)];
                            acc += (&o.big_g[i][k] - gij * &o.big_g[k][j]) * o.h[(j, k)];
                        }
                        &self.amats[i] * gij - gij * &self.amats[j] + acc * (self.coupling / (2.0 * nf))
                    })
                    .collect()
            })
            .collect();
        (hdot, gdot)
    }

    /// Component symbols (d, (kappa, 0), Omega_j, x_j) and
    /// ((n, n), kappa_01 = kappa/2, A_j acting by left multiplication, U_j).
    pub fn symbols(&self, x: &[DVector<f64>], u: &[DMatrix<f64>]) -> Result<[CharacteristicSymbol; 2]> {
        check_count(x.len(), u.len())?;
        let n = u[0].nrows();
        let sphere = CharacteristicSymbol::new(
            SizeVector::new(vec![x[0].len()])?,
            CouplingTensor::new(1, vec![self.coupling, 0.0])?,
            self.omegas.iter().map(FrequencyTensor::from_real_matrix).collect::<Result<_>>()?,
            x.iter().map(vector_tensor).collect(),
        )?;
        let matrix = CharacteristicSymbol::new(
            SizeVector::new(vec![n, n])?,
            CouplingTensor::new(2, vec![0.0, self.coupling / 2.0, 0.0, 0.0])?,
            self.amats
                .iter()
                .map(|a| left_multiplication_freq(&complexify(a), n))
                .collect::<Result<_>>()?,
            u.iter().map(real_matrix_tensor).collect(),
        )?;
        Ok([sphere, matrix])
    }
}

pub fn sphere_so_rhs(s: &SphereSoState) -> Result<SphereSoVars> {
    check_count(s.x.len(), s.u.len())?;
    if s.u.iter().any(|m| !m.is_square()) {
        return Err(Error::Shape("SO(n) states must be square".into()));
    }
    Ok(s.model.rhs(&(s.x.clone(), s.u.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot(a: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[a.cos(), -a.sin(), a.sin(), a.cos()])
    }

    #[test]
    fn pair_by_hand() {
        // N = 2, d = 2, n = 2, Omega = A = 0, kappa = 1.
        let x = vec![DVector::from_column_slice(&[1.0, 0.0]), DVector::from_column_slice(&[0.0, 1.0])];
        let a = std::f64::consts::FRAC_PI_2;
        let u = vec![DMatrix::identity(2, 2), rot(a)];
        let model = SphereSo {
            omegas: vec![DMatrix::zeros(2, 2); 2],
            amats: vec![DMatrix::zeros(2, 2); 2],
            coupling: 1.0,
        };
        let (dx, du) = model.rhs(&(x, u.clone()));
        // <U_1,U_2>_F = tr(R(pi/2)) = 0, so the sphere part is frozen.
        assert!(dx.iter().all(|v| v.norm() < 1e-15));
        // <x_1,x_2> = 0, so only k = j contributes, and U_j - U_j U_j^T U_j = 0.
        assert!(du.iter().all(|m| m.norm() < 1e-15));

        let x = vec![DVector::from_column_slice(&[1.0, 0.0]), DVector::from_column_slice(&[0.6, 0.8])];
        let u = vec![DMatrix::identity(2, 2), rot(0.3)];
        let (dx, du) = model.rhs(&(x, u.clone()));
        let g = 2.0 * 0.3f64.cos();
        // x_1' = (1/2) g (x_2 - 0.6 x_1) = (g/2) (0, 0.8).
        assert!((&dx[0] - DVector::from_column_slice(&[0.0, 0.4 * g])).norm() < 1e-15);
        // U_1' = (1/4) * 0.6 * (R - R^T) = 0.3 * sin(0.3) * [[0,-2],[2,0]] / 2... written out:
        let want = (rot(0.3) - rot(0.3).transpose()) * (0.6 / 4.0);
        assert!((&du[0] - want).norm() < 1e-15);
    }
}
