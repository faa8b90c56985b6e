use nalgebra::DMatrix;

use super::{check_count, left_multiplication_freq};
use crate::error::Result;
use crate::symbol::{CharacteristicSymbol, CouplingTensor};
use crate::tensor::{DenseTensor, FrequencyTensor, SizeVector, C64};

fn frob(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    a.dotc(b)
}

fn mean(ms: &[DMatrix<C64>]) -> DMatrix<C64> {
    let mut acc = DMatrix::zeros(ms[0].nrows(), ms[0].ncols());
    for m in ms {
        acc += m;
    }
    acc / C64::new(ms.len() as f64, 0.0)
}

/// Lohe matrix model U_j' = -i H_j U_j + (kappa/2N) sum_k (U_k U_j^† U_j - U_j U_k^† U_j).
#[derive(Clone, Debug, PartialEq)]
pub struct LoheMatrix {
    pub hamiltonians: Vec<DMatrix<C64>>,
    pub coupling: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixState {
    pub u: Vec<DMatrix<C64>>,
    pub hamiltonians: Vec<DMatrix<C64>>,
    pub coupling: f64,
}

impl MatrixState {
    pub fn model(&self) -> LoheMatrix {
        LoheMatrix {
            hamiltonians: self.hamiltonians.clone(),
            coupling: self.coupling,
        }
    }
}

impl LoheMatrix {
    pub fn rhs(&self, u: &[DMatrix<C64>]) -> Vec<DMatrix<C64>> {
        let n = u.len() as f64;
        let minus_i = C64::new(0.0, -1.0);
        (0..u.len())
            .map(|j| {
                let uj = &u[j];
                let mut acc = DMatrix::zeros(uj.nrows(), uj.ncols());
                for uk in u {
                    acc += uk * uj.adjoint() * uj - uj * uk.adjoint() * uj;
                }
                &self.hamiltonians[j] * uj * minus_i + acc * C64::new(self.coupling / (2.0 * n), 0.0)
            })
            .collect()
    }

    /// Rank-2 symbol with kappa_01 = kappa_10 = kappa/4 and the unitary data
    /// as initial tensors (Frobenius norm sqrt(n), which the flow conserves).
    pub fn symbol(&self, u: &[DMatrix<C64>]) -> Result<CharacteristicSymbol> {
        check_count(u.len(), self.hamiltonians.len())?;
        let n = u[0].nrows();
        let q = self.coupling / 4.0;
        CharacteristicSymbol::new(
            SizeVector::new(vec![n, n])?,
            CouplingTensor::new(2, vec![0.0, q, q, 0.0])?,
            self.hamiltonians
                .iter()
                .map(|h| left_multiplication_freq(&(h * C64::new(0.0, -1.0)), n))
                .collect::<Result<_>>()?,
            u.iter().map(DenseTensor::from_matrix).collect(),
        )
    }
}

pub fn lohe_matrix_rhs(s: &MatrixState) -> Vec<DMatrix<C64>> {
    s.model().rhs(&s.u)
}

/// Generalized Lohe matrix model on d1 x d2 complex matrices:
/// T_j' = A_j T_j + (k01/N) sum_k (T_k T_j^† T_j - T_j T_k^† T_j) + (k10/N) sum_k (T_j T_j^† T_k - T_j T_k^† T_j).
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedLoheMatrix {
    pub freqs: Vec<FrequencyTensor>,
    pub kappa01: f64,
    pub kappa10: f64,
}

impl GeneralizedLoheMatrix {
    pub fn rhs(&self, t: &[DMatrix<C64>]) -> Result<Vec<DMatrix<C64>>> {
        let tc = mean(t);
        (0..t.len())
            .map(|j| {
                let tj = &t[j];
                let free = crate::tensor::apply_freq(&self.freqs[j], &DenseTensor::from_matrix(tj))?.to_matrix()?;
                let loss = tj * tc.adjoint() * tj;
                let a = (&tc * tj.adjoint() * tj - &loss) * C64::new(self.kappa01, 0.0);
                let b = (tj * tj.adjoint() * &tc - &loss) * C64::new(self.kappa10, 0.0);
                Ok(free + a + b)
            })
            .collect()
    }

    pub fn symbol(&self, t: &[DMatrix<C64>]) -> Result<CharacteristicSymbol> {
        check_count(t.len(), self.freqs.len())?;
        CharacteristicSymbol::new(
            SizeVector::new(vec![t[0].nrows(), t[0].ncols()])?,
            CouplingTensor::new(2, vec![0.0, self.kappa01, self.kappa10, 0.0])?,
            self.freqs.clone(),
            t.iter().map(DenseTensor::from_matrix).collect(),
        )
    }
}

/// Double matrix model: two Lohe-type ensembles whose couplings are weighted
/// by the Frobenius inner products of the other ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubleMatrix {
    pub h: Vec<DMatrix<C64>>,
    pub g: Vec<DMatrix<C64>>,
    pub coupling: f64,
}

fn weighted_lohe(u: &[DMatrix<C64>], w: &[DMatrix<C64>], h: &[DMatrix<C64>], kappa: f64) -> Vec<DMatrix<C64>> {
    let n = u.len() as f64;
    (0..u.len())
        .map(|j| {
            let uj = &u[j];
            let mut acc = DMatrix::zeros(uj.nrows(), uj.ncols());
            for k in 0..u.len() {
                let gain = frob(&w[j], &w[k]);
                let loss = frob(&w[k], &w[j]);
                acc += &u[k] * uj.adjoint() * uj * gain - uj * u[k].adjoint() * uj * loss;
            }
            &h[j] * uj * C64::new(0.0, -1.0) + acc * C64::new(kappa / n, 0.0)
        })
        .collect()
}

impl DoubleMatrix {
    pub fn rhs(&self, state: &(Vec<DMatrix<C64>>, Vec<DMatrix<C64>>)) -> (Vec<DMatrix<C64>>, Vec<DMatrix<C64>>) {
        let (u, v) = state;
        (
            weighted_lohe(u, v, &self.h, self.coupling),
            weighted_lohe(v, u, &self.g, self.coupling),
        )
    }

    /// Component symbols with the coupling pattern (0, kappa/2; kappa/2, 0).
    pub fn symbols(&self, u: &[DMatrix<C64>], v: &[DMatrix<C64>]) -> Result<[CharacteristicSymbol; 2]> {
        let half = |hs: &[DMatrix<C64>], data: &[DMatrix<C64>]| {
            LoheMatrix {
                hamiltonians: hs.to_vec(),
                coupling: 2.0 * self.coupling,
            }
            .symbol(data)
        };
        Ok([half(&self.h, u)?, half(&self.g, v)?])
    }
}

pub fn double_matrix_rhs(u: &MatrixState, v: &MatrixState) -> Result<(Vec<DMatrix<C64>>, Vec<DMatrix<C64>>)> {
    check_count(u.u.len(), v.u.len())?;
    let model = DoubleMatrix {
        h: u.hamiltonians.clone(),
        g: v.hamiltonians.clone(),
        coupling: u.coupling,
    };
    Ok(model.rhs(&(u.u.clone(), v.u.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn double_matrix_pair_by_hand() {
        // N = 2, n = 2, H = G = 0, kappa = 1; U = (I, i sigma_3), V = (I, I).
        let id = DMatrix::<C64>::identity(2, 2);
        let s3 = DMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]);
        let u = MatrixState {
            u: vec![id.clone(), s3.clone()],
            hamiltonians: vec![DMatrix::zeros(2, 2); 2],
            coupling: 1.0,
        };
        let v = MatrixState {
            u: vec![id.clone(), id.clone()],
            ..u.clone()
        };
        let (du, dv) = double_matrix_rhs(&u, &v).unwrap();
        // U_1' = (1/2) * <V,V> * (U_2 - U_1 U_2^† U_1) = (1/2) * 2 * (s3 - s3^†) = 2 s3.
        assert!((&du[0] - &s3 * c(2.0, 0.0)).norm() < 1e-14);
        // U_2' = (1/2) * 2 * (U_1 U_2^† U_2 - U_2 U_1^† U_2) = I - s3 s3 = 2 I.
        assert!((&du[1] - &id * c(2.0, 0.0)).norm() < 1e-14);
        // V is synchronized, so only the (zero) free flow remains.
        assert!(dv.iter().all(|m| m.norm() < 1e-14));
    }

    #[test]
    fn synchronized_ensemble_is_free() {
        let h = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.5, -0.2), c(0.5, 0.2), c(-0.3, 0.0)]);
        let s = MatrixState {
            u: vec![DMatrix::identity(2, 2); 3],
            hamiltonians: vec![h.clone(); 3],
            coupling: 5.0,
        };
        for du in lohe_matrix_rhs(&s) {
            assert!((du - &h * c(0.0, -1.0)).norm() < 1e-15);
        }
    }
}
