//! Scalar functionals of ensembles: diameters, minimal overlaps, the
//! potential, the coupling residual and exponential-rate fits.

use nalgebra::{DMatrix, DVector};

use crate::dynamics::WeakFlow;
use crate::error::{shape_err, Error, Result};
use crate::symbol::CharacteristicSymbol;
use crate::tensor::{inner_unchecked, DenseTensor, PatternPlan, C64};

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (0..n).map(move |j| (i, j)))
}

/// D(X) = max_{i,j} |x_i - x_j|.
pub fn vector_diameter(x: &[DVector<f64>]) -> f64 {
    pairs(x.len()).fold(0.0, |m, (i, j)| m.max((&x[i] - &x[j]).norm()))
}

/// A(X) = min_{i != j} <x_i, x_j>; 1 for a single particle.
pub fn vector_min_inner(x: &[DVector<f64>]) -> f64 {
    pairs(x.len())
        .filter(|(i, j)| i != j)
        .fold(1.0, |m: f64, (i, j)| m.min(x[i].dot(&x[j])))
}

/// D(U) = max_{i,j} ||U_i - U_j||_F.
pub fn matrix_diameter(u: &[DMatrix<C64>]) -> f64 {
    pairs(u.len()).fold(0.0, |m, (i, j)| m.max((&u[i] - &u[j]).norm()))
}

/// S(U) = max_{i,j} |n - <U_i, U_j>_F| with the complex modulus.
pub fn matrix_spread(u: &[DMatrix<C64>]) -> f64 {
    pairs(u.len()).fold(0.0, |m, (i, j)| {
        let n = u[i].nrows() as f64;
        m.max((C64::new(n, 0.0) - u[i].dotc(&u[j])).norm())
    })
}

/// A(U) = min_{i != j} Re <U_i, U_j>_F; n for a single particle.
pub fn matrix_min_inner(u: &[DMatrix<C64>]) -> f64 {
    let start = u.first().map_or(0.0, |m| m.nrows() as f64);
    pairs(u.len())
        .filter(|(i, j)| i != j)
        .fold(start, |m: f64, (i, j)| m.min(u[i].dotc(&u[j]).re))
}

pub fn real_matrix_diameter(u: &[DMatrix<f64>]) -> f64 {
    pairs(u.len()).fold(0.0, |m, (i, j)| m.max((&u[i] - &u[j]).norm()))
}

pub fn real_matrix_min_inner(u: &[DMatrix<f64>]) -> f64 {
    let start = u.first().map_or(0.0, |m| m.nrows() as f64);
    pairs(u.len())
        .filter(|(i, j)| i != j)
        .fold(start, |m: f64, (i, j)| m.min(u[i].dot(&u[j])))
}

pub fn real_matrix_spread(u: &[DMatrix<f64>]) -> f64 {
    pairs(u.len()).fold(0.0, |m, (i, j)| m.max((u[i].nrows() as f64 - u[i].dot(&u[j])).abs()))
}

/// Frequency diameter max_{i,j} ||M_i - M_j||_F (used for D(Omega) and D(A)).
pub fn frequency_diameter(m: &[DMatrix<f64>]) -> f64 {
    real_matrix_diameter(m)
}

/// L(U, V) = D(U) + D(V) + S(U) + S(V).
pub fn l_functional(u: &[DMatrix<C64>], v: &[DMatrix<C64>]) -> f64 {
    matrix_diameter(u) + matrix_diameter(v) + matrix_spread(u) + matrix_spread(v)
}

/// max_{i,j} ||T_i - T_j||_F.
pub fn tensor_diameter(t: &[DenseTensor]) -> f64 {
    pairs(t.len()).fold(0.0, |m, (i, j)| {
        let d: f64 = t[i]
            .data()
            .iter()
            .zip(t[j].data())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        m.max(d.sqrt())
    })
}

/// min_{i != j} Re <T_i, T_j>_F; 1 for a single particle.
pub fn tensor_min_inner(t: &[DenseTensor]) -> f64 {
    pairs(t.len())
        .filter(|(i, j)| i != j)
        .fold(1.0, |m: f64, (i, j)| m.min(inner_unchecked(t[i].data(), t[j].data()).re))
}

/// V = (kappa / 2N) sum_{i,j} Re <T_i, T_j>_F.
pub fn potential(states: &[DenseTensor], kappa: f64) -> f64 {
    let n = states.len() as f64;
    let s: f64 = pairs(states.len())
        .map(|(i, j)| inner_unchecked(states[i].data(), states[j].data()).re)
        .sum();
    kappa / (2.0 * n) * s
}

/// The potential of the product state written through the components:
/// (kappa / 2N) sum_{i,j} Re prod_l <T_i^l, T_j^l>_F.
pub fn potential_separable(components: &[Vec<DenseTensor>], kappa: f64) -> f64 {
    let n = components[0].len();
    let s: f64 = pairs(n)
        .map(|(i, j)| {
            components
                .iter()
                .fold(C64::new(1.0, 0.0), |acc, ens| acc * inner_unchecked(ens[i].data(), ens[j].data()))
                .re
        })
        .sum();
    kappa / (2.0 * n as f64) * s
}

/// Largest Frobenius norm, over components, positively coupled patterns and
/// oscillators, of the partially contracted gain-minus-loss aggregate
/// M_i[a_{i*}] conj(T_i)[a_1] - T_i[a_{i*}] conj(M_i)[a_1], where M_i is the
/// weighted partner mean of oscillator i.
pub fn coupling_residual(symbols: &[CharacteristicSymbol], comps: &[Vec<DenseTensor>]) -> Result<f64> {
    if symbols.len() != comps.len() {
        return shape_err(format!("{} states for {} symbols", comps.len(), symbols.len()));
    }
    let flow = WeakFlow::new(symbols)?;
    // Validates shapes.
    flow.rhs(comps)?;
    let partners = flow.partners(comps);
    let mut worst: f64 = 0.0;
    for ((c, ens), m) in symbols.iter().zip(comps).zip(&partners) {
        for (pattern, kappa) in c.coupling().active() {
            if kappa <= 0.0 {
                continue;
            }
            let plan = PatternPlan::new(c.size(), &pattern)?;
            for (i, t) in ens.iter().enumerate() {
                let partner = if m.len() == 1 { &m[0] } else { &m[i] };
                worst = worst.max(plan.aggregate_norm(partner, t.data()));
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpFit {
    /// Slope of log(value) against t.
    pub rate: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub samples: usize,
}

/// Least-squares fit of log(value) = intercept + rate * t over the second
/// half of the samples.
pub fn exp_rate_fit(times: &[f64], values: &[f64]) -> Result<ExpFit> {
    if times.len() != values.len() {
        return shape_err(format!("{} times for {} values", times.len(), values.len()));
    }
    if times.len() < 10 {
        return Err(Error::Validation(format!("need at least 10 samples, got {}", times.len())));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::Validation(format!("non-positive value {v} in series")));
    }
    let start = times.len() / 2;
    let t = &times[start..];
    let y: Vec<f64> = values[start..].iter().map(|v| v.ln()).collect();
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sxy: f64 = t.iter().zip(&y).map(|(a, b)| (a - tm) * (b - ym)).sum();
    let sxx: f64 = t.iter().map(|a| (a - tm).powi(2)).sum();
    let rate = sxy / sxx;
    let intercept = ym - rate * tm;
    let ss_tot: f64 = y.iter().map(|b| (b - ym).powi(2)).sum();
    let ss_res: f64 = t.iter().zip(&y).map(|(a, b)| (b - intercept - rate * a).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(ExpFit {
        rate,
        intercept,
        r_squared,
        samples: t.len(),
    })
}

/// One row of diagnostics. Fields that do not apply to the state are `None`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub d_x: Option<f64>,
    pub a_x: Option<f64>,
    pub d_y: Option<f64>,
    pub a_y: Option<f64>,
    pub d_u: Option<f64>,
    pub s_u: Option<f64>,
    pub a_u: Option<f64>,
    pub d_v: Option<f64>,
    pub s_v: Option<f64>,
    pub a_v: Option<f64>,
    pub l: Option<f64>,
    pub potential: Option<f64>,
    pub residual: Option<f64>,
    pub norm_drift: Option<f64>,
}

impl DiagnosticsRecord {
    /// Populated fields in a fixed order, `t` first.
    pub fn columns(&self) -> Vec<(&'static str, f64)> {
        let fields = [
            ("D_X", self.d_x),
            ("A_X", self.a_x),
            ("D_Y", self.d_y),
            ("A_Y", self.a_y),
            ("D_U", self.d_u),
            ("S_U", self.s_u),
            ("A_U", self.a_u),
            ("D_V", self.d_v),
            ("S_V", self.s_v),
            ("A_V", self.a_v),
            ("L", self.l),
            ("V", self.potential),
            ("R", self.residual),
            ("norm_drift", self.norm_drift),
        ];
        std::iter::once(("t", self.t))
            .chain(fields.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))))
            .collect()
    }
}

/// An ensemble whose kind selects which functionals apply. Vector-like
/// ensembles (sphere points, tensors) fill the X then Y slots; matrix
/// ensembles fill U then V.
#[derive(Clone, Copy, Debug)]
pub enum Ensemble<'a> {
    Vectors(&'a [DVector<f64>]),
    Tensors(&'a [DenseTensor]),
    Orthogonal(&'a [DMatrix<f64>]),
    Unitary(&'a [DMatrix<C64>]),
}

pub fn functionals(t: f64, ensembles: &[Ensemble<'_>]) -> DiagnosticsRecord {
    let mut r = DiagnosticsRecord {
        t,
        ..Default::default()
    };
    let mut vec_slot = 0;
    let mut mat_slot = 0;
    let mut mats: Vec<Vec<DMatrix<C64>>> = Vec::new();
    for e in ensembles {
        let (d, a) = match e {
            Ensemble::Vectors(x) => (Some(vector_diameter(x)), Some(vector_min_inner(x))),
            Ensemble::Tensors(x) => (Some(tensor_diameter(x)), Some(tensor_min_inner(x))),
            Ensemble::Orthogonal(u) => {
                mats.push(u.iter().map(|m| m.map(|x| C64::new(x, 0.0))).collect());
                (None, None)
            }
            Ensemble::Unitary(u) => {
                mats.push(u.to_vec());
                (None, None)
            }
        };
        if d.is_some() {
            match vec_slot {
                0 => (r.d_x, r.a_x) = (d, a),
                1 => (r.d_y, r.a_y) = (d, a),
                _ => {}
            }
            vec_slot += 1;
        } else {
            let u = mats.last().expect("pushed above");
            let vals = (Some(matrix_diameter(u)), Some(matrix_spread(u)), Some(matrix_min_inner(u)));
            match mat_slot {
                0 => (r.d_u, r.s_u, r.a_u) = vals,
                1 => (r.d_v, r.s_v, r.a_v) = vals,
                _ => {}
            }
            mat_slot += 1;
        }
    }
    if mats.len() == 2 {
        r.l = Some(l_functional(&mats[0], &mats[1]));
    }
    r
}
