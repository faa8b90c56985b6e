use nalgebra::{DMatrix, DVector};

use super::{check_count, complex_vector_tensor, vector_tensor};
use crate::error::Result;
use crate::symbol::{CharacteristicSymbol, CouplingTensor};
use crate::tensor::{FrequencyTensor, SizeVector, C64};

/// Swarm sphere model x_j' = Omega_j x_j + (kappa/N) sum_k (x_k - <x_k,x_j> x_j).
#[derive(Clone, Debug, PartialEq)]
pub struct SwarmSphere {
    pub omegas: Vec<DMatrix<f64>>,
    pub coupling: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphereState {
    pub x: Vec<DVector<f64>>,
    pub omegas: Vec<DMatrix<f64>>,
    pub coupling: f64,
}

impl SphereState {
    pub fn model(&self) -> SwarmSphere {
        SwarmSphere {
            omegas: self.omegas.clone(),
            coupling: self.coupling,
        }
    }
}

/// Weighted sphere coupling (kappa/N) sum_k w_k (x_k - <x_k,x_j> x_j).
pub(crate) fn sphere_pull(x: &[DVector<f64>], j: usize, weights: impl Fn(usize) -> f64, kappa: f64) -> DVector<f64> {
    let n = x.len() as f64;
    let mut acc = DVector::zeros(x[j].len());
    for (k, xk) in x.iter().enumerate() {
        let w = weights(k);
        acc += (xk - &x[j] * xk.dot(&x[j])) * w;
    }
    acc * (kappa / n)
}

impl SwarmSphere {
    pub fn rhs(&self, x: &[DVector<f64>]) -> Vec<DVector<f64>> {
        (0..x.len())
            .map(|j| &self.omegas[j] * &x[j] + sphere_pull(x, j, |_| 1.0, self.coupling))
            .collect()
    }

    /// Rank-1 real symbol (d, (kappa, 0), Omega_j, x_j).
    pub fn symbol(&self, x: &[DVector<f64>]) -> Result<CharacteristicSymbol> {
        check_count(x.len(), self.omegas.len())?;
        let d = x[0].len();
        CharacteristicSymbol::new(
            SizeVector::new(vec![d])?,
            CouplingTensor::new(1, vec![self.coupling, 0.0])?,
            self.omegas.iter().map(FrequencyTensor::from_real_matrix).collect::<Result<_>>()?,
            x.iter().map(vector_tensor).collect(),
        )
    }
}

pub fn swarm_sphere_rhs(s: &SphereState) -> Vec<DVector<f64>> {
    s.model().rhs(&s.x)
}

/// Lohe Hermitian sphere model on C^d:
/// z_j' = Omega_j z_j + (k0/N) sum_k (z_k - <z_k,z_j> z_j) + (k1/N) sum_k (<z_j,z_k> - <z_k,z_j>) z_j.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianSphere {
    pub omegas: Vec<DMatrix<C64>>,
    pub kappa0: f64,
    pub kappa1: f64,
}

impl HermitianSphere {
    pub fn rhs(&self, z: &[DVector<C64>]) -> Vec<DVector<C64>> {
        let n = z.len() as f64;
        (0..z.len())
            .map(|j| {
                let mut acc = &self.omegas[j] * &z[j];
                for zk in z {
                    // <z_k, z_j> and <z_j, z_k>, conjugate-linear in the first slot.
                    let kj = zk.dotc(&z[j]);
                    let jk = z[j].dotc(zk);
                    acc += (zk - &z[j] * kj) * C64::new(self.kappa0 / n, 0.0);
                    acc += &z[j] * ((jk - kj) * (self.kappa1 / n));
                }
                acc
            })
            .collect()
    }

    pub fn symbol(&self, z: &[DVector<C64>]) -> Result<CharacteristicSymbol> {
        check_count(z.len(), self.omegas.len())?;
        let size = SizeVector::new(vec![z[0].len()])?;
        CharacteristicSymbol::new(
            size.clone(),
            CouplingTensor::new(1, vec![self.kappa0, self.kappa1])?,
            self.omegas
                .iter()
                .map(|m| FrequencyTensor::new(size.clone(), m.clone()))
                .collect::<Result<_>>()?,
            z.iter().map(complex_vector_tensor).collect(),
        )
    }
}

/// Double sphere model on S^{d1-1} x S^{d2-1}: each ensemble's coupling is
/// weighted by the inner products of the other.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubleSphere {
    pub omegas: Vec<DMatrix<f64>>,
    pub lambdas: Vec<DMatrix<f64>>,
    pub coupling: f64,
}

impl DoubleSphere {
    pub fn rhs(&self, state: &(Vec<DVector<f64>>, Vec<DVector<f64>>)) -> (Vec<DVector<f64>>, Vec<DVector<f64>>) {
        let (u, v) = state;
        let du = (0..u.len())
            .map(|j| &self.omegas[j] * &u[j] + sphere_pull(u, j, |k| v[j].dot(&v[k]), self.coupling))
            .collect();
        let dv = (0..v.len())
            .map(|j| &self.lambdas[j] * &v[j] + sphere_pull(v, j, |k| u[j].dot(&u[k]), self.coupling))
            .collect();
        (du, dv)
    }

    /// The two rank-1 real component symbols.
    pub fn symbols(&self, u: &[DVector<f64>], v: &[DVector<f64>]) -> Result<[CharacteristicSymbol; 2]> {
        let a = SwarmSphere {
            omegas: self.omegas.clone(),
            coupling: self.coupling,
        };
        let b = SwarmSphere {
            omegas: self.lambdas.clone(),
            coupling: self.coupling,
        };
        Ok([a.symbol(u)?, b.symbol(v)?])
    }
}

/// Velocities of the double sphere model. The coupling strength of `u`
/// is used for both ensembles.
pub fn double_sphere_rhs(u: &SphereState, v: &SphereState) -> Result<(Vec<DVector<f64>>, Vec<DVector<f64>>)> {
    check_count(u.x.len(), v.x.len())?;
    let model = DoubleSphere {
        omegas: u.omegas.clone(),
        lambdas: v.omegas.clone(),
        coupling: u.coupling,
    };
    Ok(model.rhs(&(u.x.clone(), v.x.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    #[test]
    fn identical_states_rotate_freely() {
        let om = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let s = SphereState {
            x: vec![v(&[0.6, 0.8]); 3],
            omegas: vec![om.clone(); 3],
            coupling: 2.0,
        };
        for dx in swarm_sphere_rhs(&s) {
            assert!((dx - &om * v(&[0.6, 0.8])).norm() < 1e-15);
        }
    }

    #[test]
    fn double_sphere_pair_by_hand() {
        // N = 2, d1 = d2 = 2, no free flow, kappa = 1.
        let u = SphereState {
            x: vec![v(&[1.0, 0.0]), v(&[0.0, 1.0])],
            omegas: vec![DMatrix::zeros(2, 2); 2],
            coupling: 1.0,
        };
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let w = SphereState {
            x: vec![v(&[1.0, 0.0]), v(&[s, s])],
            omegas: vec![DMatrix::zeros(2, 2); 2],
            coupling: 1.0,
        };
        let (du, dv) = double_sphere_rhs(&u, &w).unwrap();
        // u_1' = (1/2) <v_1,v_2> (u_2 - <u_2,u_1> u_1) = (s/2) e_2.
        assert!((&du[0] - v(&[0.0, s / 2.0])).norm() < 1e-15);
        assert!((&du[1] - v(&[s / 2.0, 0.0])).norm() < 1e-15);
        // v_j' carries weight <u_j,u_k> = 0 for k != j, so it vanishes.
        assert!(dv.iter().all(|x| x.norm() < 1e-15));
    }

    #[test]
    fn tangent_to_the_sphere() {
        let s = 0.6f64;
        let c = 0.8f64;
        let st = SphereState {
            x: vec![v(&[1.0, 0.0, 0.0]), v(&[0.0, c, s]), v(&[s, 0.0, c])],
            omegas: vec![DMatrix::from_row_slice(3, 3, &[0.0, 0.4, 0.0, -0.4, 0.0, 0.1, 0.0, -0.1, 0.0]); 3],
            coupling: 1.3,
        };
        for (x, dx) in st.x.iter().zip(swarm_sphere_rhs(&st)) {
            assert!(x.dot(&dx).abs() < 1e-15);
        }
    }
}
