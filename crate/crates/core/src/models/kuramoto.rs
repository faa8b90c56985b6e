use crate::symbol::{CharacteristicSymbol, CouplingTensor};
use crate::tensor::{DenseTensor, FrequencyTensor, SizeVector, C64};

/// theta_j' = nu_j + (kappa/N) sum_k sin(theta_k - theta_j).
#[derive(Clone, Debug, PartialEq)]
pub struct Kuramoto {
    pub freqs: Vec<f64>,
    pub coupling: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KuramotoState {
    pub phases: Vec<f64>,
    pub freqs: Vec<f64>,
    pub coupling: f64,
}

impl Kuramoto {
    pub fn rhs(&self, phases: &[f64]) -> Vec<f64> {
        let n = phases.len() as f64;
        phases
            .iter()
            .zip(&self.freqs)
            .map(|(&tj, &nu)| {
                let pull: f64 = phases.iter().map(|&tk| (tk - tj).sin()).sum();
                nu + self.coupling / n * pull
            })
            .collect()
    }

    /// Rank-0 symbol with z_j = e^{i theta_j}, A_j = i nu_j and kappa/2.
    pub fn symbol(&self, phases: &[f64]) -> CharacteristicSymbol {
        CharacteristicSymbol::new(
            SizeVector::scalar(),
            CouplingTensor::scalar(self.coupling / 2.0),
            self.freqs.iter().map(|&nu| FrequencyTensor::scalar(C64::new(0.0, nu))).collect(),
            phases.iter().map(|&t| DenseTensor::scalar(C64::from_polar(1.0, t))).collect(),
        )
        .expect("rank-0 shapes are consistent")
    }
}

impl KuramotoState {
    pub fn model(&self) -> Kuramoto {
        Kuramoto {
            freqs: self.freqs.clone(),
            coupling: self.coupling,
        }
    }

    pub fn symbol(&self) -> CharacteristicSymbol {
        self.model().symbol(&self.phases)
    }
}

pub fn kuramoto_rhs(s: &KuramotoState) -> Vec<f64> {
    s.model().rhs(&s.phases)
}

/// Phase velocities theta' = Im(z' conj(z)) for unit scalars z.
pub fn phase_velocities(z: &[DenseTensor], dz: &[DenseTensor]) -> Vec<f64> {
    z.iter()
        .zip(dz)
        .map(|(a, b)| (b.data()[0] * a.data()[0].conj()).im)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{lt_rhs, EnsembleState};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn hand_evaluated_pair() {
        let s = KuramotoState {
            phases: vec![0.0, FRAC_PI_2],
            freqs: vec![0.0, 0.0],
            coupling: 1.0,
        };
        let v = kuramoto_rhs(&s);
        assert!((v[0] - 0.5).abs() < 1e-15 && (v[1] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn synchronized_phases_rotate_freely() {
        let s = KuramotoState {
            phases: vec![0.3; 3],
            freqs: vec![1.0, -2.0, 0.5],
            coupling: 4.0,
        };
        assert_eq!(kuramoto_rhs(&s), vec![1.0, -2.0, 0.5]);
    }

    #[test]
    fn matches_rank0_lt() {
        let s = KuramotoState {
            phases: vec![0.1, 2.0, -1.3, 0.7],
            freqs: vec![0.2, -0.4, 1.0, 0.0],
            coupling: 1.7,
        };
        let c = s.symbol();
        let dz = lt_rhs(&c, &EnsembleState::initial(&c)).unwrap();
        let got = phase_velocities(c.initial(), &dz);
        for (a, b) in got.iter().zip(kuramoto_rhs(&s)) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
