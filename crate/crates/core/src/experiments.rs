//! Numerical experiments behind the check suites. Each experiment returns a
//! [`CheckResult`] listing the measured quantities and the bounds they were
//! held to.

use std::f64::consts::{SQRT_2, TAU};
use std::fmt;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::diagnostics::{
    exp_rate_fit, frequency_diameter, potential, potential_separable, real_matrix_diameter, real_matrix_min_inner,
    vector_diameter, vector_min_inner, coupling_residual,
};
use crate::dynamics::{
    decomposition_check, integrate, integrate_with, lt_rhs, EnsembleState, IntegratorOptions, LtFlow, OdeState, WeakFlow,
};
use crate::error::{Error, Result};
use crate::models::generate::{
    lattice_symbol, random_dims, random_hermitian, random_skew, random_skew_hermitian, random_symbol, random_unit_tensor,
    random_unit_vector, random_unitary, random_special_orthogonal, rng_from_seed,
};
use crate::models::{
    complex_vector_tensor, generate_initial, omega_matrix, pauli_encode, pauli_hamiltonian, real_matrix_tensor,
    tensor_complex_vector, vector_tensor, Constraint, DoubleMatrix, DoubleSphere, GeneralizedLoheMatrix, GenerationSpec,
    HermitianSphere, InitialData, InitialKind, Kuramoto, KuramotoSphere, LoheMatrix, PauliCoordinates, SphereSo,
    SwarmSphere,
};
use crate::symbol::{fuse_symbols, identity_symbol, shuffle_symbol, CharacteristicSymbol, CouplingTensor};
use crate::tensor::{shuffle, tensor_product, DenseTensor, FrequencyTensor, Permutation, SizeVector, C64};

/// Seed and optional integrator overrides shared by all experiments. Each
/// experiment has its own default step and horizon.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    pub seed: u64,
    pub step: Option<f64>,
    pub t_end: Option<f64>,
}

impl Settings {
    pub fn seeded(seed: u64) -> Self {
        Settings {
            seed,
            ..Settings::default()
        }
    }

    fn step_or(&self, default: f64) -> f64 {
        self.step.unwrap_or(default)
    }

    fn t_end_or(&self, default: f64) -> f64 {
        self.t_end.unwrap_or(default)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    Below,
    AtLeast,
    Above,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::AtMost => "<=",
            Relation::Below => "<",
            Relation::AtLeast => ">=",
            Relation::Above => ">",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Assertion {
    pub label: String,
    pub value: f64,
    pub relation: Relation,
    pub bound: f64,
    pub passed: bool,
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {} = {:.6e} {} {:.6e}",
            if self.passed { "ok" } else { "FAIL" },
            self.label,
            self.value,
            self.relation,
            self.bound
        )
    }
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub assertions: Vec<Assertion>,
    /// Reported quantities that are not held to a bound.
    pub notes: Vec<String>,
    pub seconds: f64,
}

impl CheckResult {
    fn new(name: &'static str) -> Self {
        CheckResult {
            name,
            assertions: Vec::new(),
            notes: Vec::new(),
            seconds: 0.0,
        }
    }

    fn check(&mut self, label: impl Into<String>, value: f64, relation: Relation, bound: f64) -> &mut Self {
        let passed = match relation {
            Relation::AtMost => value <= bound,
            Relation::Below => value < bound,
            Relation::AtLeast => value >= bound,
            Relation::Above => value > bound,
        };
        self.assertions.push(Assertion {
            label: label.into(),
            value,
            relation,
            bound,
            passed,
        });
        self
    }

    fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    fn finish(mut self, start: Instant) -> Self {
        self.seconds = start.elapsed().as_secs_f64();
        self
    }

    pub fn passed(&self) -> bool {
        !self.assertions.is_empty() && self.assertions.iter().all(|a| a.passed)
    }

    /// One line: status, name, wall time and every assertion.
    pub fn summary_line(&self) -> String {
        let parts: Vec<String> = self.assertions.iter().map(|a| a.to_string()).collect();
        format!(
            "{} {} ({:.2}s): {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.seconds,
            parts.join("; ")
        )
    }

    /// A failed run reported as a result, so suites keep going.
    pub fn from_error(name: &'static str, err: &Error) -> Self {
        let mut r = CheckResult::new(name);
        r.note(format!("error: {err}"));
        r
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.summary_line())?;
        for n in &self.notes {
            writeln!(f, "    {n}")?;
        }
        Ok(())
    }
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn max_diff(a: &[DenseTensor], b: &[DenseTensor]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::EnsembleSize {
            left: a.len(),
            right: b.len(),
        });
    }
    a.iter().zip(b).try_fold(0.0f64, |m, (x, y)| Ok(m.max(x.sub(y)?.norm())))
}

fn initial_components(symbols: &[CharacteristicSymbol]) -> Vec<Vec<DenseTensor>> {
    symbols.iter().map(|c| c.initial().to_vec()).collect()
}

/// Compares the weakly coupled right-hand side with the model velocities in
/// `expected`, and the fused symbol's right-hand side with the product rule
/// applied to the same velocities. Returns both deviations.
fn weak_and_fused(symbols: &[CharacteristicSymbol], expected: &[Vec<DenseTensor>]) -> Result<(f64, f64)> {
    let comps = initial_components(symbols);
    let weak = WeakFlow::new(symbols)?.rhs(&comps)?;
    let mut weak_dev: f64 = 0.0;
    for (w, e) in weak.iter().zip(expected) {
        weak_dev = weak_dev.max(max_diff(w, e)?);
    }
    let mut fused = symbols[0].clone();
    for c in &symbols[1..] {
        fused = fuse_symbols(&fused, c)?;
    }
    let got = lt_rhs(&fused, &EnsembleState::initial(&fused))?;
    let n = comps[0].len();
    let want: Vec<DenseTensor> = (0..n)
        .map(|j| {
            // d(a_1 x ... x a_n) = sum_l a_1 x ... x da_l x ... x a_n
            let mut total: Option<DenseTensor> = None;
            for l in 0..comps.len() {
                let mut term = if l == 0 { expected[0][j].clone() } else { comps[0][j].clone() };
                for p in 1..comps.len() {
                    let factor = if p == l { &expected[p][j] } else { &comps[p][j] };
                    term = tensor_product(&term, factor);
                }
                total = Some(match total {
                    None => term,
                    Some(t) => t.add_scaled(1.0, &term),
                });
            }
            total.expect("at least one component")
        })
        .collect();
    Ok((weak_dev, max_diff(&got, &want)?))
}

fn sphere_data(spec: GenerationSpec) -> Result<Vec<DVector<f64>>> {
    match generate_initial(&spec)? {
        InitialData::Vectors(x) => Ok(x),
        _ => unreachable!("sphere kind yields vectors"),
    }
}

fn orthogonal_data(spec: GenerationSpec) -> Result<Vec<DMatrix<f64>>> {
    match generate_initial(&spec)? {
        InitialData::Orthogonal(u) => Ok(u),
        _ => unreachable!("special orthogonal kind yields matrices"),
    }
}

fn tensor_data(spec: GenerationSpec) -> Result<Vec<DenseTensor>> {
    match generate_initial(&spec)? {
        InitialData::Tensors(t) => Ok(t),
        _ => unreachable!("unit tensor kind yields tensors"),
    }
}

/// Exponential fit on the part of a decaying series that is still above the
/// floating-point floor.
fn decay_fit(times: &[f64], values: &[f64]) -> Result<crate::diagnostics::ExpFit> {
    const FLOOR: f64 = 1e-12;
    let keep = values.iter().position(|&v| v < FLOOR).unwrap_or(values.len());
    exp_rate_fit(&times[..keep], &values[..keep])
}

/// Skew matrices base + s p_j with s chosen so that the Frobenius diameter is
/// exactly `diameter`.
fn spread_skews(rng: &mut ChaCha8Rng, base: &DMatrix<f64>, count: usize, diameter: f64) -> Vec<DMatrix<f64>> {
    let n = base.nrows();
    let p: Vec<DMatrix<f64>> = (0..count).map(|_| random_skew(rng, n, 1.0)).collect();
    let s = diameter / frequency_diameter(&p);
    p.iter().map(|m| base + m * s).collect()
}

/// Associativity and both identity laws, checked with exact equality on
/// symbols with dyadic entries.
pub fn monoid_laws(s: &Settings) -> Result<CheckResult> {
    let start = Instant::now();
    let mut rng = rng_from_seed(s.seed);
    let cases = 1000;
    let (mut assoc, mut left, mut right) = (0usize, 0usize, 0usize);
    for _ in 0..cases {
        let n = rng.random_range(1..=4);
        let draw = |rng: &mut ChaCha8Rng| {
            let dims = random_dims(rng, 2, 3);
            lattice_symbol(rng, &dims, n)
        };
        let (a, b, c) = (draw(&mut rng)?, draw(&mut rng)?, draw(&mut rng)?);
        if fuse_symbols(&fuse_symbols(&a, &b)?, &c)? != fuse_symbols(&a, &fuse_symbols(&b, &c)?)? {
            assoc += 1;
        }
        let e = identity_symbol(n);
        left += usize::from(fuse_symbols(&e, &a)? != a);
        right += usize::from(fuse_symbols(&a, &e)? != a);
    }
    let mut r = CheckResult::new("monoid-laws");
    r.check("associativity failures", assoc as f64, Relation::AtMost, 0.0)
        .check("left identity failures", left as f64, Relation::AtMost, 0.0)
        .check("right identity failures", right as f64, Relation::AtMost, 0.0)
        .check("runtime [s]", start.elapsed().as_secs_f64(), Relation::Below, 5.0)
        .note(format!("{cases} random triples, ranks <= 2, dims <= 3, N <= 4"));
    Ok(r.finish(start))
}

/// shuffle(C1 * C2, block swap) = C2 * C1 with exact equality.
pub fn commutativity(s: &Settings) -> Result<CheckResult> {
    let start = Instant::now();
    let mut rng = rng_from_seed(s.seed);
    let cases = 200;
    let mut failures = 0usize;
    for _ in 0..cases {
        let n = rng.random_range(1..=4);
        let d1 = random_dims(&mut rng, 2, 3);
        let d2 = random_dims(&mut rng, 2, 3);
        let a = random_symbol(&mut rng, &d1, n, 1.0, 1.0)?;
        let b = random_symbol(&mut rng, &d2, n, 1.0, 1.0)?;
        let swap = Permutation::block_swap(d1.len(), d2.len());
        if shuffle_symbol(&fuse_symbols(&a, &b)?, &swap)? != fuse_symbols(&b, &a)? {
            failures += 1;
        }
    }
    let mut r = CheckResult::new("commutativity");
    r.check("commutation failures", failures as f64, Relation::AtMost, 0.0)
        .note(format!("{cases} random pairs with Gaussian entries"));
    Ok(r.finish(start))
}

/// Unit Frobenius norm is conserved without renormalization.
pub fn conservation(s: &Settings) -> Result<CheckResult> {
    let start = Instant::now();
    let mut rng = rng_from_seed(s.seed);
    let opts = IntegratorOptions::new(s.step_or(1e-3), s.t_end_or(10.0));
    let mut r = CheckResult::new("norm-conservation");
    for dims in [vec![], vec![3], vec![2, 2], vec![2, 3], vec![3, 3]] {
        let sym = random_symbol(&mut rng, &dims, 4, 1.0, 1.0)?;
        let flow = LtFlow::new(&sym);
        let mut worst: f64 = 0.0;
        integrate_with(
            |_, y: &Vec<DenseTensor>| flow.rhs(y),
            sym.initial().to_vec(),
            &opts,
            |_, y| worst = worst.max(y.norm_drift()),
        )?;
        r.check(format!("max norm drift {dims:?}"), worst, Relation::AtMost, 1e-8);
    }
    Ok(r.finish(start))
}

/// Fused integration matches the product of the component integrations.
pub fn decomposition(s: &Settings) -> Result<CheckResult> {
    let start = Instant::now();
    let mut rng = rng_from_seed(s.seed);
    let (h, t_end) = (s.step_or(1e-3), s.t_end_or(5.0));
    let cases: [&[&[usize]]; 4] = [&[&[], &[]], &[&[2], &[3]], &[&[2], &[2, 2]], &[&[2], &[], &[3]]];
    let mut r = CheckResult::new("decomposition");
    for dims in cases {
        let symbols = dims
            .iter()
            .map(|d| random_symbol(&mut rng, d, 3, 1.0, 1.0))
            .collect::<Result<Vec<_>>>()?;
        let report = decomposition_check(&symbols, h, t_end)?;
        r.check(format!("max deviation {dims:?}"), report.max_deviation, Relation::AtMost, 1e-6);
    }
    r.check("runtime [s]", start.elapsed().as_secs_f64(), Relation::Below, 60.0);
    Ok(r.finish(start))
}

/// Trajectories of a symbol and of its shuffle are related by the shuffle.
pub fn permutation_equivariance(s: &Settings) -> Result<CheckResult> {
    let start = Instant::now();
    let mut rng = rng_from_seed(s.seed);
    let sym = random_symbol(&mut rng, &[2, 2, 3], 4, 1.0, 1.0)?;
    let sigma = Permutation::from_one_based(&[3, 1, 2])?;
    let moved = shuffle_symbol(&sym, &sigma)?;
    let opts = IntegratorOptions::new(s.step_or(1e-3), s.t_end_or(5.0)).sample_every(10);
    let a = crate::dynamics::integrate_symbol(&sym, &opts)?;
    let b = crate::dynamics::integrate_symbol(&moved, &opts)?;
    let mut worst: f64 = 0.0;
    for (x, y) in a.states.iter().zip(&b.states) {
        let shuffled = x.iter().map(|t| shuffle(t, &sigma)).collect::<Result<Vec<_>>>()?;
        worst = worst.max(max_diff(&shuffled, y)?);
    }
    let mut r = CheckResult::new("permutation-equivariance");
    r.check("max deviation", worst, Relation::AtMost, 1e-8)
        .note(format!("size (2,2,3), sigma = (3,1,2), {} samples", a.states.len()));
    Ok(r.finish(start))
}

/// Every named model's velocity field equals that of its symbol.
pub fn reductions(s: &Settings) -> Result<CheckResult> {
    let start = Instant::now();
    let mut rng = rng_from_seed(s.seed);
    let states = 100;
    let tol = 1e-10;
    let mut worst = [0.0f64; 14];
    let names = [
        "kuramoto",
        "swarm sphere",
        "hermitian sphere",
        "lohe matrix",
        "generalized lohe matrix",
        "double sphere (weak)",
        "double sphere (fused)",
        "double matrix (weak)",
        "double matrix (fused)",
        "kuramoto-sphere (weak)",
        "kuramoto-sphere (fused)",
        "sphere-SO(n) (weak)",
        "sphere-SO(n) (fused)",
        "pauli parametrization",
    ];
    let mut bump = |k: usize, v: f64| worst[k] = worst[k].max(v);
    for _ in 0..states {
        let n = rng.random_range(2..=6);

        let theta: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * TAU).collect();
        let km = Kuramoto {
            freqs: (0..n).map(|_| gauss(&mut rng)).collect(),
            coupling: 3.0 * rng.random::<f64>(),
        };
        let sym = km.symbol(&theta);
        let dz: Vec<DenseTensor> = km
            .rhs(&theta)
            .iter()
            .zip(sym.initial())
            .map(|(&w, z)| z.scale(C64::new(0.0, w)))
            .collect();
        bump(0, max_diff(&lt_rhs(&sym, &EnsembleState::initial(&sym))?, &dz)?);

        let d = rng.random_range(2..=5);
        let x: Vec<DVector<f64>> = (0..n).map(|_| random_unit_vector(&mut rng, d)).collect();
        let sw = SwarmSphere {
            omegas: (0..n).map(|_| random_skew(&mut rng, d, 1.0)).collect(),
            coupling: 3.0 * rng.random::<f64>(),
        };
        let sym = sw.symbol(&x)?;
        let want: Vec<DenseTensor> = sw.rhs(&x).iter().map(vector_tensor).collect();
        bump(1, max_diff(&lt_rhs(&sym, &EnsembleState::initial(&sym))?, &want)?);

        let size = SizeVector::new(vec![d])?;
        let z: Vec<DVector<C64>> = (0..n)
            .map(|_| tensor_complex_vector(&random_unit_tensor(&mut rng, &size)))
            .collect();
        let hs = HermitianSphere {
            omegas: (0..n).map(|_| random_skew_hermitian(&mut rng, d, 1.0)).collect(),
            kappa0: 2.0 * rng.random::<f64>() - 1.0,
            kappa1: 2.0 * rng.random::<f64>() - 1.0,
        };
        let sym = hs.symbol(&z)?;
        let want: Vec<DenseTensor> = hs.rhs(&z).iter().map(complex_vector_tensor).collect();
        bump(2, max_diff(&lt_rhs(&sym, &EnsembleState::initial(&sym))?, &want)?);

        let m = rng.random_range(2..=3);
        let u: Vec<DMatrix<C64>> = (0..n).map(|_| random_unitary(&mut rng, m)).collect();
        let lm = LoheMatrix {
            hamiltonians: (0..n).map(|_| random_hermitian(&mut rng, m, 1.0)).collect(),
            coupling: 3.0 * rng.random::<f64>(),
        };
        let sym = lm.symbol(&u)?;
        let want: Vec<DenseTensor> = lm.rhs(&u).iter().map(DenseTensor::from_matrix).collect();
        bump(3, max_diff(&lt_rhs(&sym, &EnsembleState::initial(&sym))?, &want)?);

        let size = SizeVector::new(vec![rng.random_range(1..=3), rng.random_range(1..=3)])?;
        let t: Vec<DMatrix<C64>> = (0..n)
            .map(|_| random_unit_tensor(&mut rng, &size).to_matrix())
            .collect::<Result<_>>()?;
        let gl = GeneralizedLoheMatrix {
            freqs: (0..n)
                .map(|_| FrequencyTensor::new(size.clone(), random_skew_hermitian(&mut rng, size.total(), 1.0)))
                .collect::<Result<_>>()?,
            kappa01: 2.0 * rng.random::<f64>() - 1.0,
            kappa10: 2.0 * rng.random::<f64>() - 1.0,
        };
        let sym = gl.symbol(&t)?;
        let want: Vec<DenseTensor> = gl.rhs(&t)?.iter().map(DenseTensor::from_matrix).collect();
        bump(4, max_diff(&lt_rhs(&sym, &EnsembleState::initial(&sym))?, &want)?);

        let (d1, d2) = (rng.random_range(2..=4), rng.random_range(2..=4));
        let xu: Vec<DVector<f64>> = (0..n).map(|_| random_unit_vector(&mut rng, d1)).collect();
        let xv: Vec<DVector<f64>> = (0..n).map(|_| random_unit_vector(&mut rng, d2)).collect();
        let ds = DoubleSphere {
            omegas: (0..n).map(|_| random_skew(&mut rng, d1, 1.0)).collect(),
            lambdas: (0..n).map(|_| random_skew(&mut rng, d2, 1.0)).collect(),
            coupling: 3.0 * rng.random::<f64>(),
        };
        let (du, dv) = ds.rhs(&(xu.clone(), xv.clone()));
        let (weak, fused) = weak_and_fused(
            &ds.symbols(&xu, &xv)?,
            &[du.iter().map(vector_tensor).collect(), dv.iter().map(vector_tensor).collect()],
        )?;
        bump(5, weak);
        bump(6, fused);

        let m = rng.random_range(2..=3);
        let u: Vec<DMatrix<C64>> = (0..n).map(|_| random_unitary(&mut rng, m)).collect();
        let v: Vec<DMatrix<C64>> = (0..n).map(|_| random_unitary(&mut rng, m)).collect();
        let dm = DoubleMatrix {
            h: (0..n).map(|_| random_hermitian(&mut rng, m, 1.0)).collect(),
            g: (0..n).map(|_| random_hermitian(&mut rng, m, 1.0)).collect(),
            coupling: 3.0 * rng.random::<f64>(),
        };
        let (du, dv) = dm.rhs(&(u.clone(), v.clone()));
        let (weak, fused) = weak_and_fused(
            &dm.symbols(&u, &v)?,
            &[
                du.iter().map(DenseTensor::from_matrix).collect(),
                dv.iter().map(DenseTensor::from_matrix).collect(),
            ],
        )?;
        bump(7, weak);
        bump(8, fused);

        let d = rng.random_range(2..=4);
        let theta: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * TAU).collect();
        let x: Vec<DVector<f64>> = (0..n).map(|_| random_unit_vector(&mut rng, d)).collect();
        let ks = KuramotoSphere {
            nu: (0..n).map(|_| gauss(&mut rng)).collect(),
            omegas: (0..n).map(|_| random_skew(&mut rng, d, 1.0)).collect(),
            kappa_phase: 3.0 * rng.random::<f64>(),
            kappa_sphere: 3.0 * rng.random::<f64>(),
        };
        let (dy, dx) = ks.y_form_rhs(&(theta.clone(), x.clone()));
        let (weak, fused) = weak_and_fused(
            &ks.symbols(&theta, &x)?,
            &[dy.iter().map(vector_tensor).collect(), dx.iter().map(vector_tensor).collect()],
        )?;
        bump(9, weak);
        bump(10, fused);

        let (d, m) = (rng.random_range(2..=4), rng.random_range(2..=3));
        let x: Vec<DVector<f64>> = (0..n).map(|_| random_unit_vector(&mut rng, d)).collect();
        let u: Vec<DMatrix<f64>> = (0..n).map(|_| random_special_orthogonal(&mut rng, m)).collect();
        let so = SphereSo {
            omegas: (0..n).map(|_| random_skew(&mut rng, d, 1.0)).collect(),
            amats: (0..n).map(|_| random_skew(&mut rng, m, 1.0)).collect(),
            coupling: 3.0 * rng.random::<f64>(),
        };
        let (dx, du) = so.rhs(&(x.clone(), u.clone()));
        let (weak, fused) = weak_and_fused(
            &so.symbols(&x, &u)?,
            &[dx.iter().map(vector_tensor).collect(), du.iter().map(real_matrix_tensor).collect()],
        )?;
        bump(11, weak);
        bump(12, fused);

        // d/dt e^{-i theta} Q(x) = -i theta' U + e^{-i theta} Q(x'), Q linear.
        let coords: Vec<PauliCoordinates> = (0..n)
            .map(|_| {
                let x = random_unit_vector(&mut rng, 4);
                PauliCoordinates {
                    theta: rng.random::<f64>() * TAU,
                    x: [x[0], x[1], x[2], x[3]],
                }
            })
            .collect();
        let w: Vec<[f64; 3]> = (0..n).map(|_| [gauss(&mut rng), gauss(&mut rng), gauss(&mut rng)]).collect();
        let nu: Vec<f64> = (0..n).map(|_| gauss(&mut rng)).collect();
        let kappa = 3.0 * rng.random::<f64>();
        let lm = LoheMatrix {
            hamiltonians: w.iter().zip(&nu).map(|(&w, &nu)| pauli_hamiltonian(w, nu)).collect(),
            coupling: kappa,
        };
        let ks = KuramotoSphere {
            nu: nu.clone(),
            omegas: w.iter().map(|&w| omega_matrix(w)).collect(),
            kappa_phase: kappa,
            kappa_sphere: kappa,
        };
        let u: Vec<DMatrix<C64>> = coords.iter().map(pauli_encode).collect();
        let (dtheta, dx) = ks.rhs(&(
            coords.iter().map(|p| p.theta).collect(),
            coords.iter().map(|p| DVector::from_column_slice(&p.x)).collect(),
        ));
        let du = lm.rhs(&u);
        for j in 0..n {
            let chain = &u[j] * C64::new(0.0, -dtheta[j])
                + pauli_encode(&PauliCoordinates {
                    theta: coords[j].theta,
                    x: [dx[j][0], dx[j][1], dx[j][2], dx[j][3]],
                });
            bump(13, (&du[j] - chain).norm());
        }
    }
    let mut r = CheckResult::new("reductions");
    for (name, w) in names.iter().zip(worst) {
        r.check(format!("{name} max deviation"), w, Relation::AtMost, tol);
    }
    r.note(format!("{states} random states per model"));
    Ok(r.finish(start))
}

type PauliVars = (Vec<f64>, Vec<DVector<f64>>);

/// Lohe matrix flow on U(2) against the phase-sphere flow, compared through
/// the Pauli encoding.
pub fn pauli_equivalence(s: &Settings) -> Result<CheckResult> {
    let start = Instant::now();
    let mut rng = rng_from_seed(s.seed);
    let n = 3;
    let coords: Vec<PauliCoordinates> = (0..n)
        .map(|_| {
            let x = random_unit_vector(&mut rng, 4);
            PauliCoordinates {
                theta: rng.random::<f64>() * TAU,
                x: [x[0], x[1], x[2], x[3]],
            }
        })
        .collect();
    let w: Vec<[f64; 3]> = (0..n).map(|_| [gauss(&mut rng), gauss(&mut rng), gauss(&mut rng)]).collect();
    let nu: Vec<f64> = (0..n).map(|_| gauss(&mut rng)).collect();
    let kappa = 1.0 + rng.random::<f64>();
    let lm = LoheMatrix {
        hamiltonians: w.iter().zip(&nu).map(|(&w, &nu)| pauli_hamiltonian(w, nu)).collect(),
        coupling: kappa,
    };
    let ks = KuramotoSphere {
        nu,
        omegas: w.iter().map(|&w| omega_matrix(w)).collect(),
        kappa_phase: kappa,
        kappa_sphere: kappa,
    };
    let opts = IntegratorOptions::new(s.step_or(1e-4), s.t_end_or(2.0)).sample_every(100);
    let u0: Vec<DMatrix<C64>> = coords.iter().map(pauli_encode).collect();
    let y0: PauliVars = (
        coords.iter().map(|p| p.theta).collect(),
        coords.iter().map(|p| DVector::from_column_slice(&p.x)).collect(),
    );
    let mt = integrate(|_, u: &Vec<DMatrix<C64>>| Ok(lm.rhs(u)), u0, &opts)?;
    let pt = integrate(|_, y: &PauliVars| Ok(ks.rhs(y)), y0, &opts)?;
    let mut worst: f64 = 0.0;
    let mut roundtrip: f64 = 0.0;
    for (u, (theta, x)) in mt.states.iter().zip(&pt.states) {
        for j in 0..n {
            let p = PauliCoordinates {
                theta: theta[j],
                x: [x[j][0], x[j][1], x[j][2], x[j][3]],
            };
            worst = worst.max((&u[j] - pauli_encode(&p)).norm());
            let back = crate::models::pauli_decode(&u[j])?;
            roundtrip = roundtrip.max((pauli_encode(&back) - &u[j]).norm());
        }
    }
    let mut r = CheckResult::new("pauli-equivalence");
    r.check("max ||U - encode(theta, x)||_F", worst, Relation::AtMost, 1e-6)
        .note(format!("encode(decode(U)) round trip max deviation {roundtrip:.3e}"))
        .note(format!("N = {n}, kappa = {kappa:.4}, {} samples", mt.states.len()));
    Ok(r.finish(start))
}

/// Zero free flows on the sphere x SO(n) model: complete aggregation at an
/// exponential rate.
pub fn aggregation_homogeneous(s: &Settings) -> Result<CheckResult> {
    let start = Instant::now();
    let (n, d, m) = (4, 3, 3);
    let x0 = sphere_data(
        GenerationSpec::new(InitialKind::Sphere, vec![d], n, s.seed).constraint(Constraint::MinInner(0.0)),
    )?;
    let u0 = orthogonal_data(
        GenerationSpec::new(InitialKind::SpecialOrthogonal, vec![m], n, s.seed.wrapping_add(1))
            .spread(0.3)
            .constraint(Constraint::MaxDiameter(SQRT_2)),
    )?;
    let model = SphereSo {
        omegas: vec![DMatrix::zeros(d, d); n],
        amats: vec![DMatrix::zeros(m, m); n],
        coupling: 1.0,
    };
    let mut r = CheckResult::new("aggregation-homogeneous");
    r.note(format!(
        "A(X0) = {:.4}, D(U0) = {:.4}",
        vector_min_inner(&x0),
        real_matrix_diameter(&u0)
    ));
    let opts = IntegratorOptions::new(s.step_or(1e-3), s.t_end_or(50.0)).sample_every(100);
    let (mut times, mut values) = (Vec::new(), Vec::new());
    let last = integrate_with(
        |_, y: &(Vec<DVector<f64>>, Vec<DMatrix<f64>>)| Ok(model.rhs(y)),
        (x0, u0),
        &opts,
        |t, (x, u)| {
            times.push(t);
            values.push(vector_diameter(x) + real_matrix_diameter(u));
        },
    )?;
    let fin = vector_diameter(&last.0) + real_matrix_diameter(&last.1);
    let fit = decay_fit(&times, &values)?;
    r.check("D(X) + D(U) at t_end", fin, Relation::AtMost, 1e-4)
        .check("tail rate", fit.rate, Relation::Below, -0.05)
        .check("tail r^2", fit.r_squared, Relation::Above, 0.99)
        .check("runtime [s]", start.elapsed().as_secs_f64(), Relation::Below, 30.0)
        .note(format!("fit over {} samples", fit.samples));
    Ok(r.finish(start))
}

/// Double sphere model with common rotations: both ensembles aggregate.
pub fn double_sphere_aggregation(s: &Settings) -> Result<CheckResult> {
    let start = Instant::now();
    let (n, d) = (4, 3);
    let mut rng = rng_from_seed(s.seed);
    let u0 = sphere_data(
        GenerationSpec::new(InitialKind::Sphere, vec![d], n, s.seed.wrapping_add(1)).constraint(Constraint::MinInner(0.0)),
    )?;
    let v0 = sphere_data(
        GenerationSpec::new(InitialKind::Sphere, vec![d], n, s.seed.wrapping_add(2)).constraint(Constraint::MinInner(0.0)),
    )?;
    let omega = random_skew(&mut rng, d, 1.0);
    let lambda = random_skew(&mut rng, d, 1.0);
    let model = DoubleSphere {
        omegas: vec![omega; n],
        lambdas: vec![lambda; n],
        coupling: 1.0,
    };
    let opts = IntegratorOptions::new(s.step_or(1e-3), s.t_end_or(50.0)).sample_every(100);
    let (mut times, mut du, mut dv) = (Vec::new(), Vec::new(), Vec::new());
    integrate_with(
        |_, y: &(Vec<DVector<f64>>, Vec<DVector<f64>>)| Ok(model.rhs(y)),
        (u0, v0),
        &opts,
        |t, (u, v)| {
            times.push(t);
            du.push(vector_diameter(u));
            dv.push(vector_diameter(v));
        },
    )?;
    let mut r = CheckResult::new("double-sphere-aggregation");
    for (name, series) in [("D(U)", &du), ("D(V)", &dv)] {
        let fit = decay_fit(&times, series)?;
        r.check(format!("{name} at t_end"), *series.last().expect("samples"), Relation::AtMost, 1e-4)
            .check(format!("{name} tail rate"), fit.rate, Relation::Below, -0.05)
            .check(format!("{name} tail r^2"), fit.r_squared, Relation::Above, 0.99);
    }
    Ok(r.finish(start))
}

/// Practical aggregation: asymptotic diameters under heterogeneous free
/// flows stay below the bounds and shrink as the coupling grows.
pub fn aggregation_practical(s: &Settings) -> Result<CheckResult> {
    let start = Instant::now();
    let (n, d, m) = (4, 3, 3);
    let mut rng = rng_from_seed(s.seed);
    let base_omega = random_skew(&mut rng, d, 1.0);
    let base_a = random_skew(&mut rng, m, 1.0);
    let omegas = spread_skews(&mut rng, &base_omega, n, 0.1);
    let amats = spread_skews(&mut rng, &base_a, n, 0.1);
    let (d_omega, d_a) = (frequency_diameter(&omegas), frequency_diameter(&amats));
    let x0 = sphere_data(
        GenerationSpec::new(InitialKind::Sphere, vec![d], n, s.seed.wrapping_add(1))
            .spread(0.3)
            .constraint(Constraint::MinInner(0.5)),
    )?;
    let u0 = orthogonal_data(
        GenerationSpec::new(InitialKind::SpecialOrthogonal, vec![m], n, s.seed.wrapping_add(2))
            .spread(0.2)
            .constraint(Constraint::MinInner(0.5))
            .constraint(Constraint::MaxDiameter(1.0)),
    )?;
    let (a_x0, a_u0, d_u0) = (vector_min_inner(&x0), real_matrix_min_inner(&u0), real_matrix_diameter(&u0));
    let mut r = CheckResult::new("aggregation-practical");
    r.note(format!(
        "D(Omega) = {d_omega:.4}, D(A) = {d_a:.4}, A(X0) = {a_x0:.4}, A(U0) = {a_u0:.4}, D(U0) = {d_u0:.4} (Frobenius frequency diameters)"
    ));
    r.check("A(X0)", a_x0, Relation::Above, 0.5);
    let opts = IntegratorOptions::new(s.step_or(1e-3), s.t_end_or(50.0)).sample_every(10);
    let window = opts.t_end - 10.0;
    let mut means = Vec::new();
    for kappa in [10.0, 100.0] {
        let bound_x = 1.0 - (1.0 - 8.0 * d_omega / (kappa * a_u0)).sqrt();
        let bound_u = 1.0 - (1.0 - 4.0 * d_a / (kappa * a_x0)).sqrt();
        r.check(format!("kappa={kappa}: D(U0)^2"), d_u0 * d_u0, Relation::Below, 1.0 + (1.0 - bound_u));
        r.check(
            format!("kappa={kappa}: kappa - min(4D(A)/A(X0), 8D(Omega)/A(U0))"),
            kappa - (4.0 * d_a / a_x0).min(8.0 * d_omega / a_u0),
            Relation::Above,
            0.0,
        );
        let model = SphereSo {
            omegas: omegas.clone(),
            amats: amats.clone(),
            coupling: kappa,
        };
        let (mut sum_x, mut sum_u, mut sum_u2, mut count) = (0.0, 0.0, 0.0, 0usize);
        integrate_with(
            |_, y: &(Vec<DVector<f64>>, Vec<DMatrix<f64>>)| Ok(model.rhs(y)),
            (x0.clone(), u0.clone()),
            &opts,
            |t, (x, u)| {
                if t >= window - 1e-9 {
                    let du = real_matrix_diameter(u);
                    sum_x += vector_diameter(x);
                    sum_u += du;
                    sum_u2 += du * du;
                    count += 1;
                }
            },
        )?;
        let c = count as f64;
        let (mx, mu, mu2) = (sum_x / c, sum_u / c, sum_u2 / c);
        r.check(format!("kappa={kappa}: mean D(X)"), mx, Relation::AtMost, bound_x)
            .check(format!("kappa={kappa}: mean D(U)^2"), mu2, Relation::AtMost, bound_u)
            .note(format!(
                "kappa={kappa}: mean D(U) = {mu:.4e} against the same bound {bound_u:.4e} ({})",
                if mu <= bound_u { "holds" } else { "exceeds" }
            ));
        means.push((mx, mu2));
    }
    r.check("D(X) ratio kappa 10 / kappa 100", means[0].0 / means[1].0, Relation::AtLeast, 2.0)
        .check("D(U)^2 ratio kappa 10 / kappa 100", means[0].1 / means[1].1, Relation::AtLeast, 2.0);
    Ok(r.finish(start))
}

/// Common sphere rotation, heterogeneous matrix generators: positions
/// aggregate and the relative matrices U_i U_j^T settle.
pub fn partial_locking(s: &Settings) -> Result<CheckResult> {
    let start = Instant::now();
    let (n, d, m) = (4, 3, 3);
    let kappa = 2.0;
    let mut rng = rng_from_seed(s.seed);
    let omega = random_skew(&mut rng, d, 1.0);
    let base_a = random_skew(&mut rng, m, 1.0);
    let amats = spread_skews(&mut rng, &base_a, n, 0.1);
    let d_a = frequency_diameter(&amats);
    let x0 = sphere_data(
        GenerationSpec::new(InitialKind::Sphere, vec![d], n, s.seed.wrapping_add(1))
            .spread(0.3)
            .constraint(Constraint::MinInner(0.5)),
    )?;
    let u0 = orthogonal_data(
        GenerationSpec::new(InitialKind::SpecialOrthogonal, vec![m], n, s.seed.wrapping_add(2))
            .spread(0.2)
            .constraint(Constraint::MaxDiameter(1.0)),
    )?;
    let (a_x0, d_u0) = (vector_min_inner(&x0), real_matrix_diameter(&u0));
    let mut r = CheckResult::new("partial-locking");
    r.check("A(X0)", a_x0, Relation::Above, 0.0)
        .check("kappa - 4D(A)/A(X0)", kappa - 4.0 * d_a / a_x0, Relation::Above, 0.0)
        .check(
            "D(U0)^2",
            d_u0 * d_u0,
            Relation::Below,
            1.0 + (1.0 - 4.0 * d_a / (kappa * a_x0)).sqrt(),
        );
    let model = SphereSo {
        omegas: vec![omega; n],
        amats,
        coupling: kappa,
    };
    let h = s.step_or(1e-3);
    let t_end = s.t_end_or(50.0);
    let per_unit = (1.0 / h).round().max(1.0) as usize;
    let opts = IntegratorOptions::new(h, t_end).sample_every(per_unit);
    let mut snaps: Vec<(f64, Vec<DMatrix<f64>>)> = Vec::new();
    let last = integrate_with(
        |_, y: &(Vec<DVector<f64>>, Vec<DMatrix<f64>>)| Ok(model.rhs(y)),
        (x0, u0),
        &opts,
        |t, (_, u)| {
            if t >= t_end - 6.0 - 1e-9 {
                snaps.push((t, u.clone()));
            }
        },
    )?;
    let rel = |u: &[DMatrix<f64>], i: usize, j: usize| &u[i] * u[j].transpose();
    let mut cauchy: f64 = 0.0;
    for w in snaps.windows(2) {
        let (prev, cur) = (&w[0].1, &w[1].1);
        for i in 0..n {
            for j in 0..n {
                cauchy = cauchy.max((rel(cur, i, j) - rel(prev, i, j)).norm());
            }
        }
    }
    r.check("D(X) at t_end", vector_diameter(&last.0), Relation::AtMost, 1e-4)
        .check("max ||G_ij(t) - G_ij(t-1)||_F, last 5 time units", cauchy, Relation::AtMost, 1e-5)
        .note(format!("D(A) = {d_a:.4}, A(X0) = {a_x0:.4}, D(U0) = {d_u0:.4}, kappa = {kappa}"));
    Ok(r.finish(start))
}

/// Zero free flows and positive couplings: the coupling residual of a
/// two-component system decays.
pub fn residual_decay(s: &Settings) -> Result<CheckResult> {
    let start = Instant::now();
    let n = 4;
    let build = |dims: Vec<usize>, coupling: Vec<f64>, seed: u64| -> Result<CharacteristicSymbol> {
        let size = SizeVector::new(dims.clone())?;
        let data = tensor_data(GenerationSpec::new(InitialKind::UnitTensor, dims, n, seed).spread(0.3))?;
        CharacteristicSymbol::new(
            size.clone(),
            CouplingTensor::new(size.rank(), coupling)?,
            vec![FrequencyTensor::zeros(size); n],
            data,
        )
    };
    let symbols = [
        build(vec![3], vec![1.0, 0.0], s.seed)?,
        build(vec![2, 2], vec![1.0, 0.0, 0.0, 0.0], s.seed.wrapping_add(1))?,
    ];
    let r0 = coupling_residual(&symbols, &initial_components(&symbols))?;
    let flow = WeakFlow::new(&symbols)?;
    let opts = IntegratorOptions::new(s.step_or(1e-3), s.t_end_or(50.0)).sample_every(1000);
    let mut series = Vec::new();
    let last = integrate_with(
        |_, y: &Vec<Vec<DenseTensor>>| flow.rhs(y),
        initial_components(&symbols),
        &opts,
        |t, y| series.push((t, coupling_residual(&symbols, y).unwrap_or(f64::NAN))),
    )?;
    let r1 = coupling_residual(&symbols, &last)?;
    let mut r = CheckResult::new("residual-decay");
    r.check("R(t_end) / R(0)", r1 / r0, Relation::AtMost, 1e-3)
        .note(format!("R(0) = {r0:.4e}, R(t_end) = {r1:.4e}"))
        .note(format!(
            "R at integer times: {}",
            series
                .iter()
                .step_by(10)
                .map(|(t, v)| format!("t={t:.0}: {v:.2e}"))
                .collect::<Vec<_>>()
                .join(", ")
        ));
    Ok(r.finish(start))
}

/// The potential is non-decreasing along the swarm sphere and Lohe matrix
/// flows without free flow, and equals its product form on separable states.
pub fn gradient_potential(s: &Settings) -> Result<CheckResult> {
    let start = Instant::now();
    let mut rng = rng_from_seed(s.seed);
    let kappa = 1.0;
    let opts = IntegratorOptions::new(s.step_or(1e-3), s.t_end_or(10.0));
    let slack = 1e-12;

    let n = 5;
    let x0: Vec<DVector<f64>> = (0..n).map(|_| random_unit_vector(&mut rng, 3)).collect();
    let sphere = SwarmSphere {
        omegas: vec![DMatrix::zeros(3, 3); n],
        coupling: kappa,
    };
    let (mut prev, mut worst_drop, mut first) = (f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NAN);
    let mut last_v = f64::NAN;
    integrate_with(
        |_, x: &Vec<DVector<f64>>| Ok(sphere.rhs(x)),
        x0,
        &opts,
        |_, x| {
            let v = potential(&x.iter().map(vector_tensor).collect::<Vec<_>>(), kappa);
            if prev.is_finite() {
                worst_drop = worst_drop.max(prev - v);
            } else {
                first = v;
            }
            prev = v;
            last_v = v;
        },
    )?;
    let mut r = CheckResult::new("gradient-potential");
    r.check("swarm sphere: max V decrease per step", worst_drop, Relation::AtMost, slack)
        .note(format!("swarm sphere: V from {first:.6} to {last_v:.6}"));

    let n = 4;
    let u0: Vec<DMatrix<C64>> = (0..n).map(|_| random_unitary(&mut rng, 2)).collect();
    let lohe = LoheMatrix {
        hamiltonians: vec![DMatrix::zeros(2, 2); n],
        coupling: kappa,
    };
    let (mut prev, mut worst_drop, mut first) = (f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NAN);
    integrate_with(
        |_, u: &Vec<DMatrix<C64>>| Ok(lohe.rhs(u)),
        u0,
        &opts,
        |_, u| {
            let v = potential(&u.iter().map(DenseTensor::from_matrix).collect::<Vec<_>>(), kappa);
            if prev.is_finite() {
                worst_drop = worst_drop.max(prev - v);
            } else {
                first = v;
            }
            prev = v;
            last_v = v;
        },
    )?;
    r.check("lohe matrix: max V decrease per step", worst_drop, Relation::AtMost, slack)
        .note(format!("lohe matrix: V from {first:.6} to {last_v:.6}"));

    let mut sep: f64 = 0.0;
    for _ in 0..20 {
        let sizes = [SizeVector::new(vec![2])?, SizeVector::new(vec![2, 3])?];
        let comps: Vec<Vec<DenseTensor>> = sizes
            .iter()
            .map(|size| (0..n).map(|_| random_unit_tensor(&mut rng, size)).collect())
            .collect();
        let product: Vec<DenseTensor> = (0..n).map(|j| tensor_product(&comps[0][j], &comps[1][j])).collect();
        sep = sep.max((potential(&product, kappa) - potential_separable(&comps, kappa)).abs());
    }
    r.check("separable product-form deviation", sep, Relation::AtMost, 1e-12);
    Ok(r.finish(start))
}

/// Error ratio of RK4 when halving the step on the Kuramoto model.
pub fn integrator_order(s: &Settings) -> Result<CheckResult> {
    let start = Instant::now();
    let mut rng = rng_from_seed(s.seed);
    let n = 8;
    let model = Kuramoto {
        freqs: (0..n).map(|_| gauss(&mut rng)).collect(),
        coupling: 2.0,
    };
    let theta0: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * TAU).collect();
    let t_end = s.t_end_or(10.0);
    let run = |h: f64| -> Result<Vec<f64>> {
        integrate_with(|_, y: &Vec<f64>| Ok(model.rhs(y)), theta0.clone(), &IntegratorOptions::new(h, t_end), |_, _| {})
    };
    let reference = run(1e-5)?;
    let err = |y: &[f64]| y.iter().zip(&reference).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let h = s.step_or(0.05);
    let (e1, e2) = (err(&run(h)?), err(&run(h / 2.0)?));
    let ratio = e1 / e2;
    let mut r = CheckResult::new("integrator-order");
    r.check("error ratio", ratio, Relation::AtLeast, 12.0)
        .check("error ratio", ratio, Relation::AtMost, 20.0)
        .note(format!("h = {h}: error {e1:.3e}; h = {}: error {e2:.3e}", h / 2.0));
    Ok(r.finish(start))
}

pub type Experiment = fn(&Settings) -> Result<CheckResult>;

/// Named check suites.
pub const SUITES: &[&str] = &[
    "monoid",
    "decomposition",
    "conservation",
    "aggregation-homogeneous",
    "aggregation-practical",
    "partial-locking",
    "pauli-equivalence",
    "residual-decay",
    "permutation-equivariance",
    "gradient-potential",
    "reductions",
    "integrator-order",
    "all",
];

pub fn suite(name: &str) -> Option<Vec<(&'static str, Experiment)>> {
    let list: Vec<(&'static str, Experiment)> = match name {
        "monoid" => vec![("monoid-laws", monoid_laws), ("commutativity", commutativity)],
        "decomposition" => vec![("decomposition", decomposition)],
        "conservation" => vec![("norm-conservation", conservation)],
        "aggregation-homogeneous" => vec![
            ("aggregation-homogeneous", aggregation_homogeneous),
            ("double-sphere-aggregation", double_sphere_aggregation),
        ],
        "aggregation-practical" => vec![("aggregation-practical", aggregation_practical)],
        "partial-locking" => vec![("partial-locking", partial_locking)],
        "pauli-equivalence" => vec![("pauli-equivalence", pauli_equivalence)],
        "residual-decay" => vec![("residual-decay", residual_decay)],
        "permutation-equivariance" => vec![("permutation-equivariance", permutation_equivariance)],
        "gradient-potential" => vec![("gradient-potential", gradient_potential)],
        "reductions" => vec![("reductions", reductions)],
        "integrator-order" => vec![("integrator-order", integrator_order)],
        "all" => SUITES[..SUITES.len() - 1]
            .iter()
            .flat_map(|s| suite(s).expect("listed suite exists"))
            .collect(),
        _ => return None,
    };
    Some(list)
}

/// Runs every experiment of a suite; errors become failed results.
pub fn run_suite(name: &str, settings: &Settings) -> Option<Vec<CheckResult>> {
    suite(name).map(|list| {
        list.into_iter()
            .map(|(label, f)| f(settings).unwrap_or_else(|e| CheckResult::from_error(label, &e)))
            .collect()
    })
}
