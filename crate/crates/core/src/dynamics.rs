//! Right-hand sides of the LT model and of weakly coupled LT systems, and a
//! fixed-step RK4 integrator.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{shape_err, Error, Result};
use crate::symbol::{fuse_all, CharacteristicSymbol};
use crate::tensor::{
    apply_freq_unchecked, inner_unchecked, tensor_product, DenseTensor, PatternPlan, C64, ZERO,
};

/// Per-particle work (N * D^2 * active patterns) above which the derivative
/// is evaluated on the rayon pool. Each particle is computed independently
/// from the same snapshot, so the result does not depend on the pool size.
const PARALLEL_WORK: usize = 1 << 14;

/// State types the integrator can advance.
pub trait OdeState: Clone {
    /// `self + h * rate`.
    fn add_scaled(&self, h: f64, rate: &Self) -> Self;

    fn all_finite(&self) -> bool;

    /// Largest deviation from the manifold the exact flow preserves.
    fn norm_drift(&self) -> f64 {
        0.0
    }

    /// Projects back to unit norm where that is meaningful.
    fn renormalize(&mut self) {}
}

impl OdeState for f64 {
    fn add_scaled(&self, h: f64, rate: &Self) -> Self {
        self + h * rate
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl OdeState for C64 {
    fn add_scaled(&self, h: f64, rate: &Self) -> Self {
        self + rate * h
    }
    fn all_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl OdeState for DenseTensor {
    fn add_scaled(&self, h: f64, rate: &Self) -> Self {
        DenseTensor::add_scaled(self, h, rate)
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
    fn norm_drift(&self) -> f64 {
        (self.norm() - 1.0).abs()
    }
    fn renormalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.data_mut().iter_mut().for_each(|z| *z /= n);
        }
    }
}

/// Unit vectors on a sphere.
impl OdeState for DVector<f64> {
    fn add_scaled(&self, h: f64, rate: &Self) -> Self {
        self + rate * h
    }
    fn all_finite(&self) -> bool {
        self.iter().all(|x| x.is_finite())
    }
    fn norm_drift(&self) -> f64 {
        (self.norm() - 1.0).abs()
    }
    fn renormalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            *self /= n;
        }
    }
}

/// Orthogonal matrices; drift is ||U^T U - I||_F.
impl OdeState for DMatrix<f64> {
    fn add_scaled(&self, h: f64, rate: &Self) -> Self {
        self + rate * h
    }
    fn all_finite(&self) -> bool {
        self.iter().all(|x| x.is_finite())
    }
    fn norm_drift(&self) -> f64 {
        (self.transpose() * self - DMatrix::identity(self.ncols(), self.ncols())).norm()
    }
}

/// Unitary matrices; drift is ||U^dagger U - I||_F.
impl OdeState for DMatrix<C64> {
    fn add_scaled(&self, h: f64, rate: &Self) -> Self {
        self + rate * C64::new(h, 0.0)
    }
    fn all_finite(&self) -> bool {
        self.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
    fn norm_drift(&self) -> f64 {
        (self.adjoint() * self - DMatrix::identity(self.ncols(), self.ncols())).norm()
    }
}

impl<T: OdeState> OdeState for Vec<T> {
    fn add_scaled(&self, h: f64, rate: &Self) -> Self {
        self.iter().zip(rate).map(|(a, b)| a.add_scaled(h, b)).collect()
    }
    fn all_finite(&self) -> bool {
        self.iter().all(OdeState::all_finite)
    }
    fn norm_drift(&self) -> f64 {
        self.iter().fold(0.0, |m, x| m.max(x.norm_drift()))
    }
    fn renormalize(&mut self) {
        self.iter_mut().for_each(OdeState::renormalize);
    }
}

impl<A: OdeState, B: OdeState> OdeState for (A, B) {
    fn add_scaled(&self, h: f64, rate: &Self) -> Self {
        (self.0.add_scaled(h, &rate.0), self.1.add_scaled(h, &rate.1))
    }
    fn all_finite(&self) -> bool {
        self.0.all_finite() && self.1.all_finite()
    }
    fn norm_drift(&self) -> f64 {
        self.0.norm_drift().max(self.1.norm_drift())
    }
    fn renormalize(&mut self) {
        self.0.renormalize();
        self.1.renormalize();
    }
}

/// N oscillator tensors of a single LT model at time t.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleState {
    pub t: f64,
    pub tensors: Vec<DenseTensor>,
}

impl EnsembleState {
    pub fn initial(symbol: &CharacteristicSymbol) -> Self {
        EnsembleState {
            t: 0.0,
            tensors: symbol.initial().to_vec(),
        }
    }
}

/// One ensemble per component of a weakly coupled system, sharing N and t.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentStates {
    pub t: f64,
    pub components: Vec<Vec<DenseTensor>>,
}

impl ComponentStates {
    pub fn initial(symbols: &[CharacteristicSymbol]) -> Self {
        ComponentStates {
            t: 0.0,
            components: symbols.iter().map(|c| c.initial().to_vec()).collect(),
        }
    }

    /// Tensor product over components, oscillator by oscillator.
    pub fn product_state(&self) -> Vec<DenseTensor> {
        let n = self.components.first().map_or(0, Vec::len);
        (0..n)
            .map(|j| {
                let mut acc = self.components[0][j].clone();
                for comp in &self.components[1..] {
                    acc = tensor_product(&acc, &comp[j]);
                }
                acc
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct IntegratorOptions {
    pub step: f64,
    pub t_end: f64,
    pub renormalize: bool,
    /// Record every this many steps (the initial and final states are
    /// always recorded).
    pub sample_every: usize,
}

impl IntegratorOptions {
    pub fn new(step: f64, t_end: f64) -> Self {
        IntegratorOptions {
            step,
            t_end,
            renormalize: false,
            sample_every: 1,
        }
    }

    pub fn sample_every(mut self, every: usize) -> Self {
        self.sample_every = every;
        self
    }

    pub fn renormalize(mut self, on: bool) -> Self {
        self.renormalize = on;
        self
    }

    /// Number of steps; a final partial step covers any remainder.
    pub fn steps(&self) -> usize {
        let n = self.t_end / self.step;
        let rounded = n.round();
        if (n - rounded).abs() < 1e-9 * n.max(1.0) {
            rounded as usize
        } else {
            n.ceil() as usize
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Integrator(format!("step must be positive, got {}", self.step)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Integrator(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.sample_every == 0 {
            return Err(Error::Integrator("sample_every must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    /// Norm drift of each recorded state.
    pub norm_drift: Vec<f64>,
}

impl<S> Trajectory<S> {
    pub fn max_norm_drift(&self) -> f64 {
        self.norm_drift.iter().fold(0.0, |a, &b| a.max(b))
    }

    pub fn last(&self) -> &S {
        self.states.last().expect("trajectory holds the initial state")
    }
}

/// One classical RK4 step.
pub fn rk4_step<S, F>(rhs: &mut F, t: f64, y: &S, h: f64) -> Result<S>
where
    S: OdeState,
    F: FnMut(f64, &S) -> Result<S>,
{
    let k1 = rhs(t, y)?;
    let k2 = rhs(t + 0.5 * h, &y.add_scaled(0.5 * h, &k1))?;
    let k3 = rhs(t + 0.5 * h, &y.add_scaled(0.5 * h, &k2))?;
    let k4 = rhs(t + h, &y.add_scaled(h, &k3))?;
    Ok(y
        .add_scaled(h / 6.0, &k1)
        .add_scaled(h / 3.0, &k2)
        .add_scaled(h / 3.0, &k3)
        .add_scaled(h / 6.0, &k4))
}

/// Integrates and hands every recorded sample to `observe` instead of
/// storing it.
pub fn integrate_with<S, F, O>(mut rhs: F, initial: S, opts: &IntegratorOptions, mut observe: O) -> Result<S>
where
    S: OdeState,
    F: FnMut(f64, &S) -> Result<S>,
    O: FnMut(f64, &S),
{
    opts.check()?;
    let steps = opts.steps();
    let mut y = initial;
    let mut t = 0.0;
    observe(t, &y);
    for step in 1..=steps {
        let h = if step == steps {
            opts.t_end - opts.step * (steps - 1) as f64
        } else {
            opts.step
        };
        y = rk4_step(&mut rhs, t, &y, h)?;
        t = if step == steps { opts.t_end } else { opts.step * step as f64 };
        if !y.all_finite() {
            return Err(Error::Divergence { step, t });
        }
        if opts.renormalize {
            y.renormalize();
        }
        if step % opts.sample_every == 0 || step == steps {
            observe(t, &y);
        }
    }
    Ok(y)
}

pub fn integrate<S, F>(rhs: F, initial: S, opts: &IntegratorOptions) -> Result<Trajectory<S>>
where
    S: OdeState,
    F: FnMut(f64, &S) -> Result<S>,
{
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        norm_drift: Vec::new(),
    };
    integrate_with(rhs, initial, opts, |t, y| {
        traj.times.push(t);
        traj.norm_drift.push(y.norm_drift());
        traj.states.push(y.clone());
    })?;
    Ok(traj)
}

/// Mean of `tensors`, optionally weighted, accumulated in ascending order and
/// divided by N at the end.
fn weighted_mean(tensors: &[DenseTensor], weights: Option<&[C64]>) -> Vec<C64> {
    let d = tensors[0].data().len();
    let mut acc = vec![ZERO; d];
    for (k, t) in tensors.iter().enumerate() {
        match weights {
            Some(w) => acc.iter_mut().zip(t.data()).for_each(|(a, x)| *a += w[k] * x),
            None => acc.iter_mut().zip(t.data()).for_each(|(a, x)| *a += x),
        }
    }
    let n = tensors.len() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    acc
}

/// A characteristic symbol with its contraction plans prepared.
#[derive(Clone, Debug)]
pub struct LtFlow {
    symbol: CharacteristicSymbol,
    plans: Vec<(PatternPlan, f64)>,
}

impl LtFlow {
    pub fn new(symbol: &CharacteristicSymbol) -> Self {
        let plans = symbol
            .coupling()
            .active()
            .map(|(p, k)| (PatternPlan::new(symbol.size(), &p).expect("rank checked by symbol"), k))
            .collect();
        LtFlow {
            symbol: symbol.clone(),
            plans,
        }
    }

    pub fn symbol(&self) -> &CharacteristicSymbol {
        &self.symbol
    }

    fn check(&self, tensors: &[DenseTensor]) -> Result<()> {
        if tensors.len() != self.symbol.count() {
            return Err(Error::EnsembleSize {
                left: tensors.len(),
                right: self.symbol.count(),
            });
        }
        if let Some(t) = tensors.iter().find(|t| t.size() != self.symbol.size()) {
            return shape_err(format!(
                "state size {:?} vs symbol size {:?}",
                t.size().dims(),
                self.symbol.size().dims()
            ));
        }
        Ok(())
    }

    /// Derivative of every oscillator given the per-oscillator partner
    /// tensors (the plain mean for a single LT model).
    fn derivative(&self, tensors: &[DenseTensor], partners: &[Vec<C64>]) -> Vec<DenseTensor> {
        let d = self.symbol.size().total();
        let one = |j: usize| {
            let own = tensors[j].data();
            let mut out = apply_freq_unchecked(self.symbol.freqs()[j].matrix(), own);
            let partner = if partners.len() == 1 { &partners[0] } else { &partners[j] };
            for (plan, kappa) in &self.plans {
                plan.accumulate(partner, own, *kappa, &mut out);
            }
            DenseTensor::new(self.symbol.size().clone(), out).expect("size preserved")
        };
        let work = tensors.len() * d * d * self.plans.len().max(1);
        if work >= PARALLEL_WORK {
            (0..tensors.len()).into_par_iter().map(one).collect()
        } else {
            (0..tensors.len()).map(one).collect()
        }
    }

    pub fn rhs(&self, tensors: &[DenseTensor]) -> Result<Vec<DenseTensor>> {
        self.check(tensors)?;
        let mean = weighted_mean(tensors, None);
        Ok(self.derivative(tensors, std::slice::from_ref(&mean)))
    }
}

/// dT_j = A_j T_j + sum over patterns of the coupling increment against the
/// ensemble mean.
pub fn lt_rhs(symbol: &CharacteristicSymbol, state: &EnsembleState) -> Result<Vec<DenseTensor>> {
    LtFlow::new(symbol).rhs(&state.tensors)
}

/// The pairwise double sum exactly as written, without the mean-field
/// rewrite. Quadratic in N; used to cross-check [`lt_rhs`].
pub fn lt_rhs_pairwise(symbol: &CharacteristicSymbol, state: &EnsembleState) -> Result<Vec<DenseTensor>> {
    let flow = LtFlow::new(symbol);
    flow.check(&state.tensors)?;
    let n = state.tensors.len();
    let d = symbol.size().total();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let own = state.tensors[j].data();
        let mut acc = apply_freq_unchecked(symbol.freqs()[j].matrix(), own);
        for (plan, kappa) in &flow.plans {
            for k in 0..n {
                let mut term = vec![ZERO; d];
                plan.accumulate(state.tensors[k].data(), own, *kappa, &mut term);
                acc.iter_mut().zip(&term).for_each(|(a, x)| *a += x / n as f64);
            }
        }
        out.push(DenseTensor::new(symbol.size().clone(), acc)?);
    }
    Ok(out)
}

/// n component symbols coupled through cross-component inner products.
#[derive(Clone, Debug)]
pub struct WeakFlow {
    flows: Vec<LtFlow>,
}

impl WeakFlow {
    pub fn new(symbols: &[CharacteristicSymbol]) -> Result<Self> {
        let n = symbols
            .first()
            .ok_or_else(|| Error::Shape("no components".into()))?
            .count();
        if let Some(c) = symbols.iter().find(|c| c.count() != n) {
            return Err(Error::EnsembleSize {
                left: n,
                right: c.count(),
            });
        }
        Ok(WeakFlow {
            flows: symbols.iter().map(LtFlow::new).collect(),
        })
    }

    pub fn components(&self) -> usize {
        self.flows.len()
    }

    /// Weighted partner tensors M_j^l = (1/N) sum_k w_jk T_k^l with
    /// w_jk = prod_{p != l} <T_j^p, T_k^p>. The gain term uses w_jk T_k and
    /// the loss term its conjugate, so both collapse onto M_j^l.
    pub(crate) fn partners(&self, comps: &[Vec<DenseTensor>]) -> Vec<Vec<Vec<C64>>> {
        let n = comps[0].len();
        let grams: Vec<Vec<C64>> = comps
            .iter()
            .map(|ens| {
                let mut g = vec![ZERO; n * n];
                for j in 0..n {
                    for k in 0..n {
                        g[j * n + k] = inner_unchecked(ens[j].data(), ens[k].data());
                    }
                }
                g
            })
            .collect();
        (0..comps.len())
            .map(|l| {
                if comps.len() == 1 {
                    return vec![weighted_mean(&comps[l], None)];
                }
                (0..n)
                    .map(|j| {
                        let w: Vec<C64> = (0..n)
                            .map(|k| {
                                let mut prod = C64::new(1.0, 0.0);
                                for (p, g) in grams.iter().enumerate() {
                                    if p != l {
                                        prod *= g[j * n + k];
                                    }
                                }
                                prod
                            })
                            .collect();
                        weighted_mean(&comps[l], Some(&w))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn rhs(&self, comps: &[Vec<DenseTensor>]) -> Result<Vec<Vec<DenseTensor>>> {
        if comps.len() != self.flows.len() {
            return shape_err(format!(
                "{} component states for {} symbols",
                comps.len(),
                self.flows.len()
            ));
        }
        for (flow, ens) in self.flows.iter().zip(comps) {
            flow.check(ens)?;
        }
        let partners = self.partners(comps);
        Ok(self
            .flows
            .iter()
            .zip(comps)
            .zip(&partners)
            .map(|((flow, ens), m)| flow.derivative(ens, m))
            .collect())
    }
}

pub fn weakly_coupled_rhs(
    symbols: &[CharacteristicSymbol],
    state: &ComponentStates,
) -> Result<Vec<Vec<DenseTensor>>> {
    WeakFlow::new(symbols)?.rhs(&state.components)
}

/// Integrates a single LT model from its initial data.
pub fn integrate_symbol(symbol: &CharacteristicSymbol, opts: &IntegratorOptions) -> Result<Trajectory<Vec<DenseTensor>>> {
    let flow = LtFlow::new(symbol);
    integrate(|_, y: &Vec<DenseTensor>| flow.rhs(y), symbol.initial().to_vec(), opts)
}

/// Integrates a weakly coupled system from the components' initial data.
pub fn integrate_components(
    symbols: &[CharacteristicSymbol],
    opts: &IntegratorOptions,
) -> Result<Trajectory<Vec<Vec<DenseTensor>>>> {
    let flow = WeakFlow::new(symbols)?;
    let init = ComponentStates::initial(symbols).components;
    integrate(|_, y: &Vec<Vec<DenseTensor>>| flow.rhs(y), init, opts)
}

#[derive(Clone, Debug)]
pub struct DecompositionReport {
    /// max over samples and oscillators of ||T_j(t) - ⊗_l T_j^l(t)||_F.
    pub max_deviation: f64,
    pub samples: usize,
}

/// Integrates the fused symbol and the component system side by side and
/// compares the fused state with the product of the component states.
pub fn decomposition_check(symbols: &[CharacteristicSymbol], step: f64, t_end: f64) -> Result<DecompositionReport> {
    let fused = fuse_all(symbols)?;
    let fused_flow = LtFlow::new(&fused);
    let weak = WeakFlow::new(symbols)?;
    let opts = IntegratorOptions::new(step, t_end);
    opts.check()?;
    let steps = opts.steps();
    let mut t = 0.0;
    let mut whole = fused.initial().to_vec();
    let mut parts = ComponentStates::initial(symbols);
    let mut worst: f64 = 0.0;
    let mut compare = |whole: &[DenseTensor], parts: &ComponentStates| -> Result<()> {
        for (a, b) in whole.iter().zip(parts.product_state()) {
            worst = worst.max(a.sub(&b)?.norm());
        }
        Ok(())
    };
    compare(&whole, &parts)?;
    for step_no in 1..=steps {
        let h = if step_no == steps {
            t_end - step * (steps - 1) as f64
        } else {
            step
        };
        whole = rk4_step(&mut |_, y: &Vec<DenseTensor>| fused_flow.rhs(y), t, &whole, h)?;
        parts.components = rk4_step(&mut |_, y: &Vec<Vec<DenseTensor>>| weak.rhs(y), t, &parts.components, h)?;
        t += h;
        parts.t = t;
        if !whole.all_finite() || !parts.components.all_finite() {
            return Err(Error::Divergence { step: step_no, t });
        }
        compare(&whole, &parts)?;
    }
    Ok(DecompositionReport {
        max_deviation: worst,
        samples: steps + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{identity_symbol, CouplingTensor};
    use crate::tensor::{FrequencyTensor, SizeVector, ONE};

    fn kuramoto(theta: &[f64], nu: &[f64], kappa: f64) -> CharacteristicSymbol {
        CharacteristicSymbol::new(
            SizeVector::scalar(),
            CouplingTensor::scalar(kappa / 2.0),
            nu.iter().map(|&v| FrequencyTensor::scalar(C64::new(0.0, v))).collect(),
            theta.iter().map(|&t| DenseTensor::scalar(C64::from_polar(1.0, t))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn kuramoto_phase_velocity() {
        let c = kuramoto(&[0.0, std::f64::consts::FRAC_PI_2], &[0.0, 0.0], 1.0);
        let d = lt_rhs(&c, &EnsembleState::initial(&c)).unwrap();
        let theta_dot: Vec<f64> = d
            .iter()
            .zip(c.initial())
            .map(|(dz, z)| (dz.data()[0] / (C64::i() * z.data()[0])).re)
            .collect();
        assert!((theta_dot[0] - 0.5).abs() < 1e-15);
        assert!((theta_dot[1] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn free_rotation_reaches_minus_one() {
        let c = CharacteristicSymbol::new(
            SizeVector::scalar(),
            CouplingTensor::scalar(0.0),
            vec![FrequencyTensor::scalar(C64::i())],
            vec![DenseTensor::scalar(ONE)],
        )
        .unwrap();
        let traj = integrate_symbol(&c, &IntegratorOptions::new(1e-3, std::f64::consts::PI)).unwrap();
        let z = traj.last()[0].data()[0];
        assert!((z + ONE).norm() < 1e-10);
        assert_eq!(*traj.times.last().unwrap(), std::f64::consts::PI);
    }

    #[test]
    fn identity_trajectory_is_constant() {
        let traj = integrate_symbol(&identity_symbol(3), &IntegratorOptions::new(1e-2, 1.0)).unwrap();
        for s in &traj.states {
            assert!(s.iter().all(|t| t.data()[0] == ONE));
        }
        assert_eq!(traj.times[0], 0.0);
    }

    #[test]
    fn divergence_names_the_step() {
        let err = integrate(
            |_, y: &f64| Ok(y * y),
            1.0,
            &IntegratorOptions::new(0.1, 5.0),
        )
        .unwrap_err();
        match err {
            Error::Divergence { step, .. } => assert!(step > 1 && step <= 50),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_options_are_rejected() {
        assert!(integrate(|_, y: &f64| Ok(*y), 1.0, &IntegratorOptions::new(0.0, 1.0)).is_err());
        assert!(integrate(|_, y: &f64| Ok(*y), 1.0, &IntegratorOptions::new(0.1, -1.0)).is_err());
    }

    #[test]
    fn partial_final_step_lands_on_t_end() {
        let opts = IntegratorOptions::new(0.3, 1.0);
        assert_eq!(opts.steps(), 4);
        let traj = integrate(|_, y: &f64| Ok(*y), 1.0, &opts).unwrap();
        assert_eq!(*traj.times.last().unwrap(), 1.0);
        assert!((traj.last() - 1f64.exp()).abs() < 1e-3);
    }
}
