//! Seeded generation of initial data, frequencies and whole symbols.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::diagnostics::{matrix_diameter, real_matrix_diameter, tensor_min_inner, vector_min_inner};
use crate::error::{Error, Result};
use crate::symbol::{CharacteristicSymbol, CouplingTensor};
use crate::tensor::{DenseTensor, FrequencyTensor, SizeVector, C64};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gauss<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn cgauss<R: Rng>(rng: &mut R) -> C64 {
    C64::new(gauss(rng), gauss(rng))
}

pub fn random_unit_vector<R: Rng>(rng: &mut R, d: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(d, |_, _| gauss(rng));
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Complex-Gaussian tensor scaled to unit Frobenius norm.
pub fn random_unit_tensor<R: Rng>(rng: &mut R, size: &SizeVector) -> DenseTensor {
    loop {
        let data: Vec<C64> = (0..size.total()).map(|_| cgauss(rng)).collect();
        let n = data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-12 {
            return DenseTensor::new(size.clone(), data.into_iter().map(|z| z / n).collect())
                .expect("length matches size");
        }
    }
}

pub fn random_real_unit_tensor<R: Rng>(rng: &mut R, size: &SizeVector) -> DenseTensor {
    let v = random_unit_vector(rng, size.total());
    DenseTensor::from_real(size.clone(), v.as_slice()).expect("length matches size")
}

/// Modified Gram-Schmidt on the columns.
fn orthonormalize_c(m: &DMatrix<C64>) -> DMatrix<C64> {
    let mut q = m.clone();
    for c in 0..q.ncols() {
        for p in 0..c {
            let proj = q.column(p).dotc(&q.column(c));
            let col_p = q.column(p).clone_owned();
            q.column_mut(c).axpy(-proj, &col_p, C64::new(1.0, 0.0));
        }
        let n = q.column(c).norm();
        q.column_mut(c).scale_mut(1.0 / n);
    }
    q
}

fn orthonormalize_r(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut q = m.clone();
    for c in 0..q.ncols() {
        for p in 0..c {
            let proj = q.column(p).dot(&q.column(c));
            let col_p = q.column(p).clone_owned();
            q.column_mut(c).axpy(-proj, &col_p, 1.0);
        }
        let n = q.column(c).norm();
        q.column_mut(c).scale_mut(1.0 / n);
    }
    q
}

/// Haar-distributed unitary matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> DMatrix<C64> {
    orthonormalize_c(&DMatrix::from_fn(n, n, |_, _| cgauss(rng)))
}

/// Orthonormalized real Gaussian matrix with the first column flipped if
/// needed so that det = +1.
pub fn random_special_orthogonal<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    fix_det(orthonormalize_r(&DMatrix::from_fn(n, n, |_, _| gauss(rng))))
}

fn fix_det(mut q: DMatrix<f64>) -> DMatrix<f64> {
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

pub fn random_skew<R: Rng>(rng: &mut R, n: usize, scale: f64) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| gauss(rng));
    (&g - g.transpose()) * (scale / 2.0)
}

pub fn random_skew_hermitian<R: Rng>(rng: &mut R, d: usize, scale: f64) -> DMatrix<C64> {
    let g = DMatrix::from_fn(d, d, |_, _| cgauss(rng));
    (&g - g.adjoint()) * C64::new(scale / 2.0, 0.0)
}

pub fn random_hermitian<R: Rng>(rng: &mut R, d: usize, scale: f64) -> DMatrix<C64> {
    let g = DMatrix::from_fn(d, d, |_, _| cgauss(rng));
    (&g + g.adjoint()) * C64::new(scale / 2.0, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialKind {
    Sphere,
    Unitary,
    SpecialOrthogonal,
    UnitTensor,
    Phase,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Constraint {
    /// A(X) > c, with A the minimal pairwise real inner product.
    MinInner(f64),
    /// D(X) < c, with D the maximal pairwise Frobenius distance.
    MaxDiameter(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenerationSpec {
    pub kind: InitialKind,
    /// Vector length d for spheres, matrix order n for groups, the full size
    /// vector for tensors; ignored for phases.
    pub size: Vec<usize>,
    pub count: usize,
    pub seed: u64,
    /// When set, draws perturbations of one common random point with this
    /// Gaussian scale instead of independent samples.
    pub spread: Option<f64>,
    pub constraints: Vec<Constraint>,
    pub max_attempts: usize,
}

impl GenerationSpec {
    pub fn new(kind: InitialKind, size: Vec<usize>, count: usize, seed: u64) -> Self {
        GenerationSpec {
            kind,
            size,
            count,
            seed,
            spread: None,
            constraints: Vec::new(),
            max_attempts: 100_000,
        }
    }

    pub fn spread(mut self, s: f64) -> Self {
        self.spread = Some(s);
        self
    }

    pub fn constraint(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialData {
    Vectors(Vec<DVector<f64>>),
    Unitary(Vec<DMatrix<C64>>),
    Orthogonal(Vec<DMatrix<f64>>),
    Tensors(Vec<DenseTensor>),
    Phases(Vec<f64>),
}

impl InitialData {
    fn satisfies(&self, c: &Constraint) -> bool {
        let (a, d) = match self {
            InitialData::Vectors(x) => (vector_min_inner(x), crate::diagnostics::vector_diameter(x)),
            InitialData::Unitary(u) => (crate::diagnostics::matrix_min_inner(u), matrix_diameter(u)),
            InitialData::Orthogonal(u) => (crate::diagnostics::real_matrix_min_inner(u), real_matrix_diameter(u)),
            InitialData::Tensors(t) => (tensor_min_inner(t), crate::diagnostics::tensor_diameter(t)),
            InitialData::Phases(p) => {
                let z: Vec<DVector<f64>> = p
                    .iter()
                    .map(|t| DVector::from_column_slice(&[t.cos(), t.sin()]))
                    .collect();
                (vector_min_inner(&z), crate::diagnostics::vector_diameter(&z))
            }
        };
        match *c {
            Constraint::MinInner(c) => a > c,
            Constraint::MaxDiameter(c) => d < c,
        }
    }
}

fn one_size(spec: &GenerationSpec) -> Result<usize> {
    match spec.size.as_slice() {
        [n] if *n >= 1 => Ok(*n),
        other => Err(Error::Generation(format!("{:?} needs a single size, got {other:?}", spec.kind))),
    }
}

fn draw<R: Rng>(rng: &mut R, spec: &GenerationSpec) -> Result<InitialData> {
    let n = spec.count;
    let s = spec.spread;
    Ok(match spec.kind {
        InitialKind::Sphere => {
            let d = one_size(spec)?;
            match s {
                None => InitialData::Vectors((0..n).map(|_| random_unit_vector(rng, d)).collect()),
                Some(s) => {
                    let c = random_unit_vector(rng, d);
                    InitialData::Vectors(
                        (0..n)
                            .map(|_| {
                                let v = &c + DVector::from_fn(d, |_, _| s * gauss(rng));
                                v.normalize()
                            })
                            .collect(),
                    )
                }
            }
        }
        InitialKind::Unitary => {
            let d = one_size(spec)?;
            match s {
                None => InitialData::Unitary((0..n).map(|_| random_unitary(rng, d)).collect()),
                Some(s) => {
                    let base = random_unitary(rng, d);
                    InitialData::Unitary(
                        (0..n)
                            .map(|_| {
                                let p = DMatrix::from_fn(d, d, |_, _| cgauss(rng) * s);
                                orthonormalize_c(&(&base + p))
                            })
                            .collect(),
                    )
                }
            }
        }
        InitialKind::SpecialOrthogonal => {
            let d = one_size(spec)?;
            match s {
                None => InitialData::Orthogonal((0..n).map(|_| random_special_orthogonal(rng, d)).collect()),
                Some(s) => {
                    let base = random_special_orthogonal(rng, d);
                    InitialData::Orthogonal(
                        (0..n)
                            .map(|_| {
                                let p = DMatrix::from_fn(d, d, |_, _| s * gauss(rng));
                                fix_det(orthonormalize_r(&(&base + p)))
                            })
                            .collect(),
                    )
                }
            }
        }
        InitialKind::UnitTensor => {
            let size = SizeVector::new(spec.size.clone()).map_err(|e| Error::Generation(e.to_string()))?;
            match s {
                None => InitialData::Tensors((0..n).map(|_| random_unit_tensor(rng, &size)).collect()),
                Some(s) => {
                    let base = random_unit_tensor(rng, &size);
                    InitialData::Tensors(
                        (0..n)
                            .map(|_| {
                                let data: Vec<C64> = base.data().iter().map(|z| z + cgauss(rng) * s).collect();
                                let norm = data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                                DenseTensor::new(size.clone(), data.into_iter().map(|z| z / norm).collect())
                                    .expect("length matches size")
                            })
                            .collect(),
                    )
                }
            }
        }
        InitialKind::Phase => {
            let tau = std::f64::consts::TAU;
            match s {
                None => InitialData::Phases((0..n).map(|_| rng.random::<f64>() * tau).collect()),
                Some(s) => {
                    let c = rng.random::<f64>() * tau;
                    InitialData::Phases((0..n).map(|_| c + s * gauss(rng)).collect())
                }
            }
        }
    })
}

/// Draws initial data; with constraints, whole ensembles are redrawn until
/// all constraints hold or the attempt budget runs out.
pub fn generate_initial(spec: &GenerationSpec) -> Result<InitialData> {
    if spec.count == 0 {
        return Err(Error::Generation("ensemble size must be at least 1".into()));
    }
    let mut rng = rng_from_seed(spec.seed);
    for _ in 0..spec.max_attempts.max(1) {
        let data = draw(&mut rng, spec)?;
        if spec.constraints.iter().all(|c| data.satisfies(c)) {
            return Ok(data);
        }
    }
    Err(Error::Generation(format!(
        "constraints {:?} not met within {} attempts",
        spec.constraints, spec.max_attempts
    )))
}

/// A random valid symbol with Gaussian data: skew-Hermitian frequencies of
/// the given scale, couplings uniform in [-kappa_scale, kappa_scale].
pub fn random_symbol<R: Rng>(rng: &mut R, dims: &[usize], count: usize, freq_scale: f64, kappa_scale: f64) -> Result<CharacteristicSymbol> {
    let size = SizeVector::new(dims.to_vec())?;
    let m = size.rank();
    let d = size.total();
    CharacteristicSymbol::new(
        size.clone(),
        CouplingTensor::new(m, (0..1 << m).map(|_| kappa_scale * (2.0 * rng.random::<f64>() - 1.0)).collect())?,
        (0..count)
            .map(|_| FrequencyTensor::new(size.clone(), random_skew_hermitian(rng, d, freq_scale)))
            .collect::<Result<_>>()?,
        (0..count).map(|_| random_unit_tensor(rng, &size)).collect(),
    )
}

/// A random real symbol (real skew-symmetric frequencies, real unit data).
pub fn random_real_symbol<R: Rng>(rng: &mut R, dims: &[usize], count: usize, freq_scale: f64, couplings: &[f64]) -> Result<CharacteristicSymbol> {
    let size = SizeVector::new(dims.to_vec())?;
    let d = size.total();
    CharacteristicSymbol::new(
        size.clone(),
        CouplingTensor::new(size.rank(), couplings.to_vec())?,
        (0..count)
            .map(|_| FrequencyTensor::new(size.clone(), random_skew(rng, d, freq_scale).map(|x| C64::new(x, 0.0))))
            .collect::<Result<_>>()?,
        (0..count).map(|_| random_real_unit_tensor(rng, &size)).collect(),
    )
}

fn dyadic<R: Rng>(rng: &mut R, max_eighths: i32) -> f64 {
    rng.random_range(-max_eighths..=max_eighths) as f64 / 8.0
}

/// Unit tensor whose entries lie in {0, ±1/2, ±i/2, (±1±i)/2, ±1, ±i}, so that
/// sums and products of a few of them are exact in floating point.
fn dyadic_unit_tensor<R: Rng>(rng: &mut R, size: &SizeVector) -> DenseTensor {
    // Squared norm 1 split into quarters: one entry of weight 4, two of
    // weight 2, a 2 + 1 + 1 split, or four entries of weight 1.
    let d = size.total();
    let splits: &[&[u8]] = &[&[4], &[2, 2], &[2, 1, 1], &[1, 1, 1, 1]];
    let usable: Vec<&[u8]> = splits.iter().copied().filter(|s| s.len() <= d).collect();
    let split = usable[rng.random_range(0..usable.len())];
    let mut slots: Vec<usize> = (0..d).collect();
    let mut data = vec![C64::new(0.0, 0.0); d];
    for &w in split {
        let pick = slots.swap_remove(rng.random_range(0..slots.len()));
        let sign = |rng: &mut R| if rng.random::<bool>() { 1.0 } else { -1.0 };
        data[pick] = match w {
            4 => {
                if rng.random::<bool>() {
                    C64::new(sign(rng), 0.0)
                } else {
                    C64::new(0.0, sign(rng))
                }
            }
            2 => C64::new(0.5 * sign(rng), 0.5 * sign(rng)),
            _ => {
                if rng.random::<bool>() {
                    C64::new(0.5 * sign(rng), 0.0)
                } else {
                    C64::new(0.0, 0.5 * sign(rng))
                }
            }
        };
    }
    DenseTensor::new(size.clone(), data).expect("length matches size")
}

fn dyadic_skew_hermitian<R: Rng>(rng: &mut R, d: usize) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    for r in 0..d {
        m[(r, r)] = C64::new(0.0, dyadic(rng, 8));
        for c in r + 1..d {
            let z = C64::new(dyadic(rng, 8), dyadic(rng, 8));
            m[(r, c)] = z;
            m[(c, r)] = -z.conj();
        }
    }
    m
}

/// A valid symbol whose entries are small dyadic rationals. Fusing a few of
/// these only adds and multiplies exactly representable numbers, so algebraic
/// laws can be checked with exact equality.
pub fn lattice_symbol<R: Rng>(rng: &mut R, dims: &[usize], count: usize) -> Result<CharacteristicSymbol> {
    let size = SizeVector::new(dims.to_vec())?;
    let m = size.rank();
    let d = size.total();
    CharacteristicSymbol::new(
        size.clone(),
        CouplingTensor::new(m, (0..1 << m).map(|_| dyadic(rng, 16)).collect())?,
        (0..count)
            .map(|_| FrequencyTensor::new(size.clone(), dyadic_skew_hermitian(rng, d)))
            .collect::<Result<_>>()?,
        (0..count).map(|_| dyadic_unit_tensor(rng, &size)).collect(),
    )
}

/// Random size vector of rank at most `max_rank` with entries in 1..=max_dim.
pub fn random_dims<R: Rng>(rng: &mut R, max_rank: usize, max_dim: usize) -> Vec<usize> {
    let m = rng.random_range(0..=max_rank);
    (0..m).map(|_| rng.random_range(1..=max_dim)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::validate_symbol;

    #[test]
    fn seeded_generation_is_deterministic() {
        let spec = GenerationSpec::new(InitialKind::UnitTensor, vec![2, 3], 4, 17);
        assert_eq!(generate_initial(&spec).unwrap(), generate_initial(&spec).unwrap());
    }

    #[test]
    fn manifold_invariants() {
        match generate_initial(&GenerationSpec::new(InitialKind::Sphere, vec![5], 6, 1)).unwrap() {
            InitialData::Vectors(x) => assert!(x.iter().all(|v| (v.norm() - 1.0).abs() < 1e-12)),
            other => panic!("{other:?}"),
        }
        match generate_initial(&GenerationSpec::new(InitialKind::SpecialOrthogonal, vec![3], 6, 2).spread(0.3)).unwrap() {
            InitialData::Orthogonal(u) => {
                for m in u {
                    assert!((m.transpose() * &m - DMatrix::identity(3, 3)).norm() < 1e-12);
                    assert!((m.determinant() - 1.0).abs() < 1e-12);
                }
            }
            other => panic!("{other:?}"),
        }
        match generate_initial(&GenerationSpec::new(InitialKind::Unitary, vec![2], 3, 3)).unwrap() {
            InitialData::Unitary(u) => {
                for m in u {
                    assert!((m.adjoint() * &m - DMatrix::identity(2, 2)).norm() < 1e-12);
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn inner_product_constraint_is_honored() {
        let spec = GenerationSpec::new(InitialKind::Sphere, vec![3], 4, 9)
            .spread(0.6)
            .constraint(Constraint::MinInner(0.5));
        match generate_initial(&spec).unwrap() {
            InitialData::Vectors(x) => assert!(vector_min_inner(&x) > 0.5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn impossible_constraint_exhausts_budget() {
        let mut spec = GenerationSpec::new(InitialKind::Sphere, vec![3], 4, 9).constraint(Constraint::MinInner(1.5));
        spec.max_attempts = 10;
        assert!(matches!(generate_initial(&spec), Err(Error::Generation(_))));
    }

    #[test]
    fn generated_symbols_validate() {
        let mut rng = rng_from_seed(5);
        for dims in [vec![], vec![3], vec![2, 3]] {
            assert!(validate_symbol(&random_symbol(&mut rng, &dims, 3, 1.0, 1.0).unwrap()).is_valid());
            let lat = lattice_symbol(&mut rng, &dims, 3).unwrap();
            let report = validate_symbol(&lat);
            assert_eq!(report.max_skew_residual(), 0.0);
            assert_eq!(report.max_norm_residual(), 0.0);
        }
    }
}
