//! Dense complex tensors, multi-indices, index shuffles and the LT contraction.
//!
//! Flattening is row-major: the first axis varies slowest. A frequency tensor
//! of rank 2m is stored as a D x D matrix with rows indexed by the free
//! multi-index and columns by the summed one.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{shape_err, Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SizeVector {
    dims: Vec<usize>,
}

impl SizeVector {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidSize(dims));
        }
        Ok(SizeVector { dims })
    }

    /// The empty size vector of a rank-0 (scalar) tensor.
    pub fn scalar() -> Self {
        SizeVector { dims: Vec::new() }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    /// Total number of entries D (1 for rank 0).
    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn concat(&self, other: &SizeVector) -> SizeVector {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        SizeVector { dims }
    }

    /// Row-major strides, last axis contiguous.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.rank()];
        for p in (0..self.rank().saturating_sub(1)).rev() {
            strides[p] = strides[p + 1] * self.dims[p + 1];
        }
        strides
    }

    /// Flat position of a zero-based multi-index.
    pub fn flatten(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.rank() {
            return shape_err(format!(
                "multi-index of length {} for rank {}",
                index.len(),
                self.rank()
            ));
        }
        let mut flat = 0;
        for (p, (&a, &d)) in index.iter().zip(&self.dims).enumerate() {
            if a >= d {
                return shape_err(format!("index {a} out of range {d} on axis {p}"));
            }
            flat = flat * d + a;
        }
        Ok(flat)
    }

    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut index = vec![0; self.rank()];
        for p in (0..self.rank()).rev() {
            index[p] = flat % self.dims[p];
            flat /= self.dims[p];
        }
        index
    }

    /// Size vector after the index shuffle: axis p of the result is axis
    /// sigma(p) of the original.
    pub fn shuffled(&self, sigma: &Permutation) -> Result<SizeVector> {
        sigma.check_len(self.rank())?;
        Ok(SizeVector {
            dims: sigma.image().iter().map(|&q| self.dims[q]).collect(),
        })
    }

    /// For every flat index of the shuffled tensor's source, the flat index
    /// it lands on after the shuffle.
    pub(crate) fn shuffle_map(&self, sigma: &Permutation) -> Result<Vec<usize>> {
        let target = self.shuffled(sigma)?;
        let tstrides = target.strides();
        let mut map = Vec::with_capacity(self.total());
        for flat in 0..self.total() {
            let alpha = self.unflatten(flat);
            let f: usize = (0..self.rank())
                .map(|p| alpha[sigma.image()[p]] * tstrides[p])
                .sum();
            map.push(f);
        }
        Ok(map)
    }
}

/// A bitstring i* in {0,1}^m. Position 0 holds i_1, which is the most
/// significant bit of [`Bitstring::index`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bitstring {
    bits: Vec<bool>,
}

impl Bitstring {
    pub fn new(bits: Vec<bool>) -> Self {
        Bitstring { bits }
    }

    pub fn from_index(index: usize, len: usize) -> Self {
        let bits = (0..len).map(|p| (index >> (len - 1 - p)) & 1 == 1).collect();
        Bitstring { bits }
    }

    pub fn empty() -> Self {
        Bitstring { bits: Vec::new() }
    }

    pub fn ones(len: usize) -> Self {
        Bitstring { bits: vec![true; len] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn index(&self) -> usize {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    /// All bitstrings of the given length in storage order.
    pub fn all(len: usize) -> impl Iterator<Item = Bitstring> {
        (0..1usize << len).map(move |i| Bitstring::from_index(i, len))
    }
}

/// A permutation of axes stored by its zero-based image sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; image.len()];
        for &q in &image {
            if q >= image.len() || seen[q] {
                return Err(Error::InvalidPermutation(image));
            }
            seen[q] = true;
        }
        Ok(Permutation { image })
    }

    /// Build from the one-based image (sigma(1), ..., sigma(m)).
    pub fn from_one_based(image: &[usize]) -> Result<Self> {
        if image.contains(&0) {
            return Err(Error::InvalidPermutation(image.to_vec()));
        }
        Permutation::new(image.iter().map(|&q| q - 1).collect())
    }

    pub fn identity(m: usize) -> Self {
        Permutation { image: (0..m).collect() }
    }

    /// The block swap sending the layout (first m1 axes, last m2 axes) to
    /// (last m2 axes, first m1 axes).
    pub fn block_swap(m1: usize, m2: usize) -> Self {
        Permutation {
            image: (m1..m1 + m2).chain(0..m1).collect(),
        }
    }

    /// Acts as `first` on the leading axes and `second` on the trailing ones.
    pub fn block_sum(first: &Permutation, second: &Permutation) -> Self {
        let m1 = first.len();
        Permutation {
            image: first
                .image
                .iter()
                .copied()
                .chain(second.image.iter().map(|&q| q + m1))
                .collect(),
        }
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.image.iter().map(|&q| q + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (p, &q) in self.image.iter().enumerate() {
            inv[q] = p;
        }
        Permutation { image: inv }
    }

    /// The composition `self ∘ other`, oriented so that shuffling by it equals
    /// shuffling by `other` first and then by `self`. Under the index shuffle
    /// axis p of the result is axis sigma(p) of the source, which makes the
    /// image sequence of the composite `other[self[p]]`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        other.check_len(self.len())?;
        Ok(Permutation {
            image: self.image.iter().map(|&q| other.image[q]).collect(),
        })
    }

    /// Every permutation of `m` axes, in lexicographic order.
    pub fn all(m: usize) -> Vec<Permutation> {
        fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if prefix.len() == used.len() {
                out.push(Permutation { image: prefix.clone() });
                return;
            }
            for q in 0..used.len() {
                if !used[q] {
                    used[q] = true;
                    prefix.push(q);
                    rec(prefix, used, out);
                    prefix.pop();
                    used[q] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::with_capacity(m), &mut vec![false; m], &mut out);
        out
    }

    pub(crate) fn check_len(&self, m: usize) -> Result<()> {
        if self.len() != m {
            return shape_err(format!("permutation of length {} for rank {m}", self.len()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    size: SizeVector,
    data: Vec<C64>,
}

impl DenseTensor {
    pub fn new(size: SizeVector, data: Vec<C64>) -> Result<Self> {
        if data.len() != size.total() {
            return shape_err(format!(
                "{} entries for size {:?} (expected {})",
                data.len(),
                size.dims(),
                size.total()
            ));
        }
        Ok(DenseTensor { size, data })
    }

    pub fn zeros(size: SizeVector) -> Self {
        let data = vec![ZERO; size.total()];
        DenseTensor { size, data }
    }

    pub fn scalar(value: C64) -> Self {
        DenseTensor {
            size: SizeVector::scalar(),
            data: vec![value],
        }
    }

    pub fn from_real(size: SizeVector, values: &[f64]) -> Result<Self> {
        DenseTensor::new(size, values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Rank-2 tensor from a matrix, row index first.
    pub fn from_matrix(m: &DMatrix<C64>) -> Self {
        let size = SizeVector {
            dims: vec![m.nrows(), m.ncols()],
        };
        let mut data = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                data.push(m[(r, c)]);
            }
        }
        DenseTensor { size, data }
    }

    /// Inverse of [`DenseTensor::from_matrix`] for rank-2 tensors.
    pub fn to_matrix(&self) -> Result<DMatrix<C64>> {
        if self.size.rank() != 2 {
            return shape_err(format!("rank {} tensor is not a matrix", self.size.rank()));
        }
        let (r, c) = (self.size.dims()[0], self.size.dims()[1]);
        Ok(DMatrix::from_row_slice(r, c, &self.data))
    }

    pub fn size(&self) -> &SizeVector {
        &self.size
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn get(&self, index: &[usize]) -> Result<C64> {
        Ok(self.data[self.size.flatten(index)?])
    }

    pub fn conj(&self) -> DenseTensor {
        DenseTensor {
            size: self.size.clone(),
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, a: C64) -> DenseTensor {
        DenseTensor {
            size: self.size.clone(),
            data: self.data.iter().map(|z| z * a).collect(),
        }
    }

    /// self + h * other, entrywise.
    pub fn add_scaled(&self, h: f64, other: &DenseTensor) -> DenseTensor {
        debug_assert_eq!(self.size, other.size);
        DenseTensor {
            size: self.size.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b * h)
                .collect(),
        }
    }

    pub fn sub(&self, other: &DenseTensor) -> Result<DenseTensor> {
        same_size(self, other)?;
        Ok(DenseTensor {
            size: self.size.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// Largest imaginary magnitude over all entries.
    pub fn max_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

fn same_size(a: &DenseTensor, b: &DenseTensor) -> Result<()> {
    if a.size != b.size {
        return shape_err(format!(
            "sizes {:?} and {:?} differ",
            a.size.dims(),
            b.size.dims()
        ));
    }
    Ok(())
}

/// Frobenius inner product, conjugate-linear in the first argument.
pub fn frobenius_inner(s: &DenseTensor, t: &DenseTensor) -> Result<C64> {
    same_size(s, t)?;
    Ok(inner_unchecked(s.data(), t.data()))
}

pub(crate) fn inner_unchecked(s: &[C64], t: &[C64]) -> C64 {
    s.iter().zip(t).fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
}

pub fn frobenius_norm(t: &DenseTensor) -> f64 {
    t.norm()
}

pub fn tensor_product(s: &DenseTensor, t: &DenseTensor) -> DenseTensor {
    let mut data = Vec::with_capacity(s.data.len() * t.data.len());
    for a in &s.data {
        for b in &t.data {
            data.push(a * b);
        }
    }
    DenseTensor {
        size: s.size.concat(&t.size),
        data,
    }
}

pub fn shuffle(t: &DenseTensor, sigma: &Permutation) -> Result<DenseTensor> {
    let map = t.size.shuffle_map(sigma)?;
    let mut data = vec![ZERO; t.data.len()];
    for (flat, &target) in map.iter().enumerate() {
        data[target] = t.data[flat];
    }
    Ok(DenseTensor {
        size: t.size.shuffled(sigma)?,
        data,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyTensor {
    size: SizeVector,
    matrix: DMatrix<C64>,
}

impl FrequencyTensor {
    pub fn new(size: SizeVector, matrix: DMatrix<C64>) -> Result<Self> {
        let d = size.total();
        if matrix.nrows() != d || matrix.ncols() != d {
            return shape_err(format!(
                "{}x{} frequency matrix for size {:?} (expected {d}x{d})",
                matrix.nrows(),
                matrix.ncols(),
                size.dims()
            ));
        }
        Ok(FrequencyTensor { size, matrix })
    }

    pub fn zeros(size: SizeVector) -> Self {
        let d = size.total();
        FrequencyTensor {
            size,
            matrix: DMatrix::zeros(d, d),
        }
    }

    /// Rank-0 frequency i*nu.
    pub fn scalar(value: C64) -> Self {
        FrequencyTensor {
            size: SizeVector::scalar(),
            matrix: DMatrix::from_element(1, 1, value),
        }
    }

    /// Rank-1 frequency from a real skew-symmetric matrix.
    pub fn from_real_matrix(m: &DMatrix<f64>) -> Result<Self> {
        let size = SizeVector::new(vec![m.nrows()])?;
        FrequencyTensor::new(size, m.map(|x| C64::new(x, 0.0)))
    }

    pub fn size(&self) -> &SizeVector {
        &self.size
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// max |M + M^dagger| over all entries.
    pub fn skew_residual(&self) -> f64 {
        let d = self.matrix.nrows();
        let mut worst: f64 = 0.0;
        for r in 0..d {
            for c in 0..d {
                worst = worst.max((self.matrix[(r, c)] + self.matrix[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_skew_hermitian(&self, tol: f64) -> bool {
        self.skew_residual() <= tol
    }

    pub fn max_imag(&self) -> f64 {
        self.matrix.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }
}

/// Matrix-vector product of the flattened frequency with the flattened state.
pub fn apply_freq(a: &FrequencyTensor, t: &DenseTensor) -> Result<DenseTensor> {
    if a.size != t.size {
        return shape_err(format!(
            "frequency size {:?} vs state size {:?}",
            a.size.dims(),
            t.size.dims()
        ));
    }
    Ok(DenseTensor {
        size: t.size.clone(),
        data: apply_freq_unchecked(&a.matrix, &t.data),
    })
}

pub(crate) fn apply_freq_unchecked(m: &DMatrix<C64>, t: &[C64]) -> Vec<C64> {
    let d = t.len();
    (0..d)
        .map(|r| (0..d).fold(ZERO, |acc, c| acc + m[(r, c)] * t[c]))
        .collect()
}

/// Index bookkeeping for one bitstring pattern on one size vector.
///
/// For a flat index f, `zero_part[f]` keeps only the axes where the pattern
/// bit is 0 (and `one_part[f]` those where it is 1), each already multiplied
/// by its stride. Mixed multi-indices then flatten as a sum of two parts.
#[derive(Clone, Debug)]
pub struct PatternPlan {
    pattern: Bitstring,
    zero_part: Vec<usize>,
    one_part: Vec<usize>,
}

impl PatternPlan {
    pub fn new(size: &SizeVector, pattern: &Bitstring) -> Result<Self> {
        if pattern.len() != size.rank() {
            return shape_err(format!(
                "bitstring of length {} for rank {}",
                pattern.len(),
                size.rank()
            ));
        }
        let strides = size.strides();
        let total = size.total();
        let mut zero_part = Vec::with_capacity(total);
        let mut one_part = Vec::with_capacity(total);
        for flat in 0..total {
            let alpha = size.unflatten(flat);
            let (mut z, mut o) = (0, 0);
            for p in 0..size.rank() {
                if pattern.bits()[p] {
                    o += alpha[p] * strides[p];
                } else {
                    z += alpha[p] * strides[p];
                }
            }
            zero_part.push(z);
            one_part.push(o);
        }
        Ok(PatternPlan {
            pattern: pattern.clone(),
            zero_part,
            one_part,
        })
    }

    pub fn pattern(&self) -> &Bitstring {
        &self.pattern
    }

    /// kappa * sum over a1 of (X[a_i] conj(Y[a1]) - Y[a_i] conj(X[a1])) Y[a_(1-i)],
    /// with X the gain source and Y the oscillator itself, accumulated into `out`.
    pub(crate) fn accumulate(&self, gain: &[C64], own: &[C64], kappa: f64, out: &mut [C64]) {
        let d = own.len();
        for a0 in 0..d {
            let (z0, o0) = (self.zero_part[a0], self.one_part[a0]);
            let mut acc = ZERO;
            for a1 in 0..d {
                let first = z0 + self.one_part[a1];
                let last = o0 + self.zero_part[a1];
                let pair = gain[first] * own[a1].conj() - own[first] * gain[a1].conj();
                acc += pair * own[last];
            }
            out[a0] += acc * kappa;
        }
    }

    /// The partially contracted aggregate X[a_i] conj(Y[a1]) - Y[a_i] conj(X[a1]),
    /// summed over the axes where the pattern bit is 1. Returns its Frobenius norm.
    pub(crate) fn aggregate_norm(&self, gain: &[C64], own: &[C64]) -> f64 {
        let d = own.len();
        let mut agg = vec![ZERO; d * d];
        for a0 in 0..d {
            if self.one_part[a0] != 0 {
                continue;
            }
            let z0 = self.zero_part[a0];
            for a1 in 0..d {
                let first = z0 + self.one_part[a1];
                let pair = gain[first] * own[a1].conj() - own[first] * gain[a1].conj();
                agg[z0 * d + self.zero_part[a1]] += pair;
            }
        }
        agg.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// One coupling term of the LT model in mean-field form:
/// kappa * (gain - loss) with `t_mean` in the role of the partner tensor.
pub fn coupling_increment(
    t_mean: &DenseTensor,
    t_j: &DenseTensor,
    pattern: &Bitstring,
    kappa: f64,
) -> Result<DenseTensor> {
    same_size(t_mean, t_j)?;
    let plan = PatternPlan::new(t_j.size(), pattern)?;
    let mut out = vec![ZERO; t_j.data.len()];
    plan.accumulate(&t_mean.data, &t_j.data, kappa, &mut out);
    Ok(DenseTensor {
        size: t_j.size.clone(),
        data: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn vec1(vals: &[C64]) -> DenseTensor {
        DenseTensor::new(SizeVector::new(vec![vals.len()]).unwrap(), vals.to_vec()).unwrap()
    }

    #[test]
    fn flatten_round_trip() {
        let s = SizeVector::new(vec![2, 3, 4]).unwrap();
        assert_eq!(s.total(), 24);
        for f in 0..24 {
            assert_eq!(s.flatten(&s.unflatten(f)).unwrap(), f);
        }
        assert_eq!(s.flatten(&[1, 0, 0]).unwrap(), 12);
        assert_eq!(s.flatten(&[0, 0, 1]).unwrap(), 1);
        assert!(SizeVector::new(vec![2, 0]).is_err());
        assert_eq!(SizeVector::scalar().total(), 1);
    }

    #[test]
    fn inner_examples() {
        let e = vec1(&[ONE, ZERO]);
        assert_eq!(frobenius_inner(&e, &e).unwrap(), ONE);
        let a = vec1(&[ONE, c(0.0, 1.0)]);
        let b = vec1(&[c(0.0, 1.0), ONE]);
        assert_eq!(frobenius_inner(&a, &b).unwrap(), ZERO);
        let id = DenseTensor::from_matrix(&DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ONE]));
        let s1 = DenseTensor::from_matrix(&DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]));
        assert_eq!(frobenius_inner(&id, &s1).unwrap(), ZERO);
        assert!(frobenius_inner(&e, &id).is_err());
    }

    #[test]
    fn product_of_basis_vectors() {
        let p = tensor_product(&vec1(&[ONE, ZERO]), &vec1(&[ZERO, ONE]));
        assert_eq!(p.size().dims(), &[2, 2]);
        assert_eq!(p.data(), &[ZERO, ONE, ZERO, ZERO]);
        let t = vec1(&[c(0.5, 0.5), c(-0.5, 0.5)]);
        assert_eq!(tensor_product(&DenseTensor::scalar(ONE), &t), t);
    }

    #[test]
    fn transpose_by_shuffle() {
        let t = DenseTensor::from_matrix(&DMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)],
        ));
        let s = shuffle(&t, &Permutation::from_one_based(&[2, 1]).unwrap()).unwrap();
        assert_eq!(
            s.data(),
            &[c(1.0, 0.0), c(3.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]
        );
        assert_eq!(shuffle(&t, &Permutation::identity(2)).unwrap(), t);
    }

    #[test]
    fn shuffle_size_follows_image() {
        let s = SizeVector::new(vec![2, 3, 4]).unwrap();
        let sigma = Permutation::from_one_based(&[3, 1, 2]).unwrap();
        assert_eq!(s.shuffled(&sigma).unwrap().dims(), &[4, 2, 3]);
        assert!(Permutation::from_one_based(&[1, 1]).is_err());
    }

    #[test]
    fn block_swap_image() {
        assert_eq!(Permutation::block_swap(1, 2).one_based(), vec![2, 3, 1]);
        assert_eq!(Permutation::block_swap(2, 1).one_based(), vec![3, 1, 2]);
        assert_eq!(Permutation::all(3).len(), 6);
    }

    #[test]
    fn rank0_frequency() {
        let a = FrequencyTensor::scalar(c(0.0, 0.7));
        let out = apply_freq(&a, &DenseTensor::scalar(ONE)).unwrap();
        assert_eq!(out.data(), &[c(0.0, 0.7)]);
        let z = FrequencyTensor::zeros(SizeVector::scalar());
        assert_eq!(apply_freq(&z, &DenseTensor::scalar(ONE)).unwrap().data(), &[ZERO]);
    }

    #[test]
    fn kuramoto_increment() {
        let t_j = DenseTensor::scalar(ONE);
        let mean = DenseTensor::scalar(c(0.5, 0.5));
        let inc = coupling_increment(&mean, &t_j, &Bitstring::empty(), 0.5).unwrap();
        assert!((inc.data()[0] - c(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn identical_partner_gives_zero() {
        let t = vec1(&[c(0.6, 0.0), c(0.0, 0.8)]);
        for p in Bitstring::all(1) {
            let inc = coupling_increment(&t, &t, &p, 1.3).unwrap();
            assert!(inc.norm() < 1e-15);
        }
    }

    #[test]
    fn bitstring_order() {
        let b = Bitstring::new(vec![false, true]);
        assert_eq!(b.index(), 1);
        assert_eq!(Bitstring::from_index(2, 2).bits(), &[true, false]);
        assert_eq!(Bitstring::all(0).count(), 1);
        assert_eq!(Bitstring::empty().index(), 0);
    }
}
