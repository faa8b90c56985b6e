//! Characteristic symbols and the fusion monoid acting on them.

use nalgebra::DMatrix;

use crate::error::{shape_err, Error, Result};
use crate::tensor::{
    shuffle, tensor_product, Bitstring, DenseTensor, FrequencyTensor, Permutation, SizeVector,
    C64, ONE, ZERO,
};

/// Coupling strengths kappa_{i*}, one per bitstring of length `rank`, stored
/// with i_1 as the most significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingTensor {
    rank: usize,
    values: Vec<f64>,
}

impl CouplingTensor {
    pub fn new(rank: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != 1 << rank {
            return shape_err(format!(
                "{} coupling values for rank {rank} (expected {})",
                values.len(),
                1usize << rank
            ));
        }
        Ok(CouplingTensor { rank, values })
    }

    pub fn zeros(rank: usize) -> Self {
        CouplingTensor {
            rank,
            values: vec![0.0; 1 << rank],
        }
    }

    pub fn scalar(kappa: f64) -> Self {
        CouplingTensor {
            rank: 0,
            values: vec![kappa],
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, pattern: &Bitstring) -> Result<f64> {
        if pattern.len() != self.rank {
            return shape_err(format!(
                "bitstring of length {} for coupling rank {}",
                pattern.len(),
                self.rank
            ));
        }
        Ok(self.values[pattern.index()])
    }

    /// Patterns with a non-zero coupling strength, in storage order.
    pub fn active(&self) -> impl Iterator<Item = (Bitstring, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &k)| k != 0.0)
            .map(move |(i, &k)| (Bitstring::from_index(i, self.rank), k))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharacteristicSymbol {
    size: SizeVector,
    coupling: CouplingTensor,
    freqs: Vec<FrequencyTensor>,
    initial: Vec<DenseTensor>,
}

impl CharacteristicSymbol {
    /// Checks shapes only. Skew-Hermiticity and unit norms are reported by
    /// [`validate_symbol`] so that deliberately broken symbols can be built.
    pub fn new(
        size: SizeVector,
        coupling: CouplingTensor,
        freqs: Vec<FrequencyTensor>,
        initial: Vec<DenseTensor>,
    ) -> Result<Self> {
        if coupling.rank() != size.rank() {
            return shape_err(format!(
                "coupling rank {} for size rank {}",
                coupling.rank(),
                size.rank()
            ));
        }
        if freqs.len() != initial.len() {
            return Err(Error::EnsembleSize {
                left: freqs.len(),
                right: initial.len(),
            });
        }
        if freqs.is_empty() {
            return shape_err("a symbol needs at least one oscillator");
        }
        for (j, (a, t)) in freqs.iter().zip(&initial).enumerate() {
            if a.size() != &size || t.size() != &size {
                return shape_err(format!("oscillator {j} does not match size {:?}", size.dims()));
            }
        }
        Ok(CharacteristicSymbol {
            size,
            coupling,
            freqs,
            initial,
        })
    }

    pub fn size(&self) -> &SizeVector {
        &self.size
    }

    pub fn rank(&self) -> usize {
        self.size.rank()
    }

    pub fn coupling(&self) -> &CouplingTensor {
        &self.coupling
    }

    pub fn freqs(&self) -> &[FrequencyTensor] {
        &self.freqs
    }

    pub fn initial(&self) -> &[DenseTensor] {
        &self.initial
    }

    /// Number of oscillators N.
    pub fn count(&self) -> usize {
        self.initial.len()
    }

    pub fn with_initial(&self, initial: Vec<DenseTensor>) -> Result<Self> {
        CharacteristicSymbol::new(
            self.size.clone(),
            self.coupling.clone(),
            self.freqs.clone(),
            initial,
        )
    }

    pub fn is_real(&self) -> bool {
        self.freqs.iter().all(|a| a.max_imag() <= 1e-12)
            && self.initial.iter().all(|t| t.max_imag() <= 1e-12)
    }

    /// Componentwise comparison with an absolute tolerance on every entry.
    pub fn approx_eq(&self, other: &CharacteristicSymbol, tol: f64) -> bool {
        fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
        }
        self.size == other.size
            && self.count() == other.count()
            && self
                .coupling
                .values
                .iter()
                .zip(&other.coupling.values)
                .all(|(a, b)| (a - b).abs() <= tol)
            && self
                .freqs
                .iter()
                .zip(&other.freqs)
                .all(|(a, b)| close(a.matrix().as_slice(), b.matrix().as_slice(), tol))
            && self
                .initial
                .iter()
                .zip(&other.initial)
                .all(|(a, b)| close(a.data(), b.data(), tol))
    }
}

pub fn fuse_size(d1: &SizeVector, d2: &SizeVector) -> SizeVector {
    d1.concat(d2)
}

pub fn fuse_coupling(k1: &CouplingTensor, k2: &CouplingTensor) -> CouplingTensor {
    let (m1, m2) = (k1.rank, k2.rank);
    let (ones1, ones2) = ((1usize << m1) - 1, (1usize << m2) - 1);
    let mut values = Vec::with_capacity(1 << (m1 + m2));
    for j in 0..=ones1 {
        for k in 0..=ones2 {
            let v = match (j == ones1, k == ones2) {
                (true, true) => k1.values[j] + k2.values[k],
                (false, true) => k1.values[j],
                (true, false) => k2.values[k],
                (false, false) => 0.0,
            };
            values.push(v);
        }
    }
    CouplingTensor {
        rank: m1 + m2,
        values,
    }
}

/// Kronecker sum M1 ⊗ I + I ⊗ M2 of the flattened frequencies.
pub fn fuse_freq(a1: &FrequencyTensor, a2: &FrequencyTensor) -> FrequencyTensor {
    let (m1, m2) = (a1.matrix(), a2.matrix());
    let (d1, d2) = (m1.nrows(), m2.nrows());
    let m = DMatrix::from_fn(d1 * d2, d1 * d2, |r, c| {
        let (b0, g0) = (r / d2, r % d2);
        let (b1, g1) = (c / d2, c % d2);
        match (b0 == b1, g0 == g1) {
            (true, true) => m1[(b0, b1)] + m2[(g0, g1)],
            (false, true) => m1[(b0, b1)],
            (true, false) => m2[(g0, g1)],
            (false, false) => ZERO,
        }
    });
    FrequencyTensor::new(fuse_size(a1.size(), a2.size()), m)
        .expect("Kronecker sum has matching dimensions")
}

pub fn fuse_symbols(c1: &CharacteristicSymbol, c2: &CharacteristicSymbol) -> Result<CharacteristicSymbol> {
    if c1.count() != c2.count() {
        return Err(Error::EnsembleSize {
            left: c1.count(),
            right: c2.count(),
        });
    }
    Ok(CharacteristicSymbol {
        size: fuse_size(&c1.size, &c2.size),
        coupling: fuse_coupling(&c1.coupling, &c2.coupling),
        freqs: c1
            .freqs
            .iter()
            .zip(&c2.freqs)
            .map(|(a, b)| fuse_freq(a, b))
            .collect(),
        initial: c1
            .initial
            .iter()
            .zip(&c2.initial)
            .map(|(s, t)| tensor_product(s, t))
            .collect(),
    })
}

/// Left fold of [`fuse_symbols`] over a non-empty list.
pub fn fuse_all(symbols: &[CharacteristicSymbol]) -> Result<CharacteristicSymbol> {
    let (first, rest) = symbols
        .split_first()
        .ok_or_else(|| Error::Shape("nothing to fuse".into()))?;
    rest.iter().try_fold(first.clone(), |acc, c| fuse_symbols(&acc, c))
}

/// The unit of fusion: rank 0, zero coupling, zero frequencies, initial data 1.
pub fn identity_symbol(n: usize) -> CharacteristicSymbol {
    CharacteristicSymbol {
        size: SizeVector::scalar(),
        coupling: CouplingTensor::scalar(0.0),
        freqs: vec![FrequencyTensor::scalar(ZERO); n],
        initial: vec![DenseTensor::scalar(ONE); n],
    }
}

pub fn shuffle_coupling(k: &CouplingTensor, sigma: &Permutation) -> Result<CouplingTensor> {
    let binary = SizeVector::new(vec![2; k.rank])?;
    let map = binary.shuffle_map(sigma)?;
    let mut values = vec![0.0; k.values.len()];
    for (flat, &target) in map.iter().enumerate() {
        values[target] = k.values[flat];
    }
    Ok(CouplingTensor {
        rank: k.rank,
        values,
    })
}

pub fn shuffle_freq(a: &FrequencyTensor, sigma: &Permutation) -> Result<FrequencyTensor> {
    let map = a.size().shuffle_map(sigma)?;
    let d = map.len();
    let src = a.matrix();
    let mut m = DMatrix::from_element(d, d, ZERO);
    for r in 0..d {
        for c in 0..d {
            m[(map[r], map[c])] = src[(r, c)];
        }
    }
    FrequencyTensor::new(a.size().shuffled(sigma)?, m)
}

pub fn shuffle_symbol(c: &CharacteristicSymbol, sigma: &Permutation) -> Result<CharacteristicSymbol> {
    sigma.check_len(c.rank())?;
    Ok(CharacteristicSymbol {
        size: c.size.shuffled(sigma)?,
        coupling: shuffle_coupling(&c.coupling, sigma)?,
        freqs: c
            .freqs
            .iter()
            .map(|a| shuffle_freq(a, sigma))
            .collect::<Result<_>>()?,
        initial: c
            .initial
            .iter()
            .map(|t| shuffle(t, sigma))
            .collect::<Result<_>>()?,
    })
}

/// Searches all rank! index shuffles for one that maps `a` onto `b` exactly.
pub fn equivalent_up_to_shuffle(a: &CharacteristicSymbol, b: &CharacteristicSymbol) -> Option<Permutation> {
    if a.rank() != b.rank() || a.count() != b.count() {
        return None;
    }
    Permutation::all(a.rank())
        .into_iter()
        .find(|sigma| shuffle_symbol(a, sigma).is_ok_and(|s| &s == b))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    /// max |M + M^dagger| per oscillator.
    pub skew_residuals: Vec<f64>,
    /// | ||T_j|| - 1 | per oscillator.
    pub norm_residuals: Vec<f64>,
    pub rank_consistent: bool,
    pub real: bool,
}

impl ValidationReport {
    pub fn max_skew_residual(&self) -> f64 {
        self.skew_residuals.iter().fold(0.0, |a, &b| a.max(b))
    }

    pub fn max_norm_residual(&self) -> f64 {
        self.norm_residuals.iter().fold(0.0, |a, &b| a.max(b))
    }

    pub fn is_valid(&self) -> bool {
        self.rank_consistent && self.max_skew_residual() <= 1e-12 && self.max_norm_residual() <= 1e-10
    }

    /// Oscillators whose frequency fails the skew-Hermitian check.
    pub fn skew_violations(&self) -> Vec<usize> {
        self.skew_residuals
            .iter()
            .enumerate()
            .filter(|(_, &r)| r > 1e-12)
            .map(|(j, _)| j)
            .collect()
    }
}

pub fn validate_symbol(c: &CharacteristicSymbol) -> ValidationReport {
    ValidationReport {
        skew_residuals: c.freqs.iter().map(|a| a.skew_residual()).collect(),
        norm_residuals: c.initial.iter().map(|t| (t.norm() - 1.0).abs()).collect(),
        rank_consistent: c.coupling.rank() == c.size.rank()
            && c.freqs.iter().all(|a| a.size() == &c.size)
            && c.initial.iter().all(|t| t.size() == &c.size),
        real: c.is_real(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostReport {
    /// #(d) = product of the component totals.
    pub fused_total: usize,
    /// Sum of the component totals.
    pub component_sum: usize,
    /// 2(n - 1) + #(d) / 2^(n-1).
    pub bound: f64,
    /// Whether every component has at least two entries.
    pub applicable: bool,
    pub holds: bool,
}

pub fn cost_report(sizes: &[SizeVector]) -> CostReport {
    let n = sizes.len().max(1);
    let totals: Vec<usize> = sizes.iter().map(|s| s.total()).collect();
    let fused_total: usize = totals.iter().product();
    let component_sum: usize = totals.iter().sum();
    let bound = 2.0 * (n as f64 - 1.0) + fused_total as f64 / 2f64.powi(n as i32 - 1);
    CostReport {
        fused_total,
        component_sum,
        bound,
        applicable: totals.iter().all(|&t| t >= 2),
        holds: component_sum as f64 <= bound,
    }
}
