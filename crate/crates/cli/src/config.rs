//! Experiment configuration files and their translation into symbols.

use std::path::{Path, PathBuf};

use lohe_core::models::generate::{random_skew, random_skew_hermitian, rng_from_seed};
use lohe_core::models::{
    generate_initial, DoubleMatrix, DoubleSphere, GenerationSpec, InitialData, InitialKind, Kuramoto, KuramotoSphere,
    LoheMatrix, SphereSo, SwarmSphere,
};
use lohe_core::symbol::{CharacteristicSymbol, CouplingTensor};
use lohe_core::tensor::{DenseTensor, FrequencyTensor, SizeVector, C64};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::format::{parse_json, read_symbol, Complex, SymbolFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Simulate,
    Fuse,
    Check,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
    #[serde(default)]
    pub renormalize: bool,
}

fn default_h() -> f64 {
    1e-3
}

fn default_t_end() -> f64 {
    10.0
}

fn default_sample_every() -> usize {
    10
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            h: default_h(),
            t_end: default_t_end(),
            sample_every: default_sample_every(),
            renormalize: false,
        }
    }
}

/// Where a symbol comes from.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolSource {
    /// Path to a symbol file, relative to the config file.
    File(PathBuf),
    Inline(SymbolFile),
    Generate(GeneratorConfig),
}

/// A random symbol: unit initial tensors, random skew frequencies of the
/// given scale (zero by default) and the listed couplings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub size: Vec<usize>,
    pub count: usize,
    pub coupling: Vec<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub spread: Option<f64>,
    #[serde(default)]
    pub frequency_scale: f64,
    /// Real initial data and real skew-symmetric frequencies.
    #[serde(default)]
    pub real: bool,
}

pub type RealMatrix = Vec<Vec<f64>>;
pub type ComplexMatrix = Vec<Vec<Complex>>;

/// Named models with explicit parameters. Omitted initial data is drawn
/// from the config seed.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Kuramoto {
        freqs: Vec<f64>,
        coupling: f64,
        #[serde(default)]
        phases: Option<Vec<f64>>,
    },
    SwarmSphere {
        omegas: Vec<RealMatrix>,
        coupling: f64,
        #[serde(default)]
        x: Option<Vec<Vec<f64>>>,
    },
    LoheMatrix {
        hamiltonians: Vec<ComplexMatrix>,
        coupling: f64,
        #[serde(default)]
        u: Option<Vec<ComplexMatrix>>,
    },
    DoubleSphere {
        omegas: Vec<RealMatrix>,
        lambdas: Vec<RealMatrix>,
        coupling: f64,
        #[serde(default)]
        u: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        v: Option<Vec<Vec<f64>>>,
    },
    DoubleMatrix {
        h: Vec<ComplexMatrix>,
        g: Vec<ComplexMatrix>,
        coupling: f64,
        #[serde(default)]
        u: Option<Vec<ComplexMatrix>>,
        #[serde(default)]
        v: Option<Vec<ComplexMatrix>>,
    },
    KuramotoSphere {
        nu: Vec<f64>,
        omegas: Vec<RealMatrix>,
        kappa_phase: f64,
        kappa_sphere: f64,
        #[serde(default)]
        theta: Option<Vec<f64>>,
        #[serde(default)]
        x: Option<Vec<Vec<f64>>>,
    },
    SphereSo {
        omegas: Vec<RealMatrix>,
        amats: Vec<RealMatrix>,
        coupling: f64,
        #[serde(default)]
        x: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        u: Option<Vec<RealMatrix>>,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduce {
    #[default]
    Final,
    Max,
    Min,
}

/// A bound on one diagnostics column, checked after a simulation.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssertionConfig {
    pub column: String,
    #[serde(default)]
    pub at: Reduce,
    #[serde(default)]
    pub max: Option<f64>,
    #[serde(default)]
    pub min: Option<f64>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub symbols: Vec<SymbolSource>,
    #[serde(default)]
    pub model: Option<ModelConfig>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    /// Output directory for simulate and check, output file for fuse.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub suite: Option<String>,
    /// Write a state snapshot every this many samples (0 disables).
    #[serde(default)]
    pub snapshot_every: usize,
    /// Coupling strength used when reporting the potential V.
    #[serde(default = "default_potential_kappa")]
    pub potential_kappa: f64,
    #[serde(default)]
    pub assertions: Vec<AssertionConfig>,
    /// Directory that relative symbol paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_potential_kappa() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: ExperimentConfig = parse_json(&text, &path.display().to_string())?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn validate_integrator(&self) -> CliResult<()> {
        let i = &self.integrator;
        if !(i.h > 0.0 && i.h.is_finite()) {
            return Err(CliError::Config(format!("integrator.h must be positive, got {}", i.h)));
        }
        if !(i.t_end > 0.0 && i.t_end.is_finite()) {
            return Err(CliError::Config(format!("integrator.t_end must be positive, got {}", i.t_end)));
        }
        if i.sample_every == 0 {
            return Err(CliError::Config("integrator.sample_every must be at least 1".into()));
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

/// How a component is summarized in the diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum View {
    Tensor,
    Vector,
    Matrix,
}

pub struct Prepared {
    pub symbols: Vec<CharacteristicSymbol>,
    pub views: Vec<View>,
    pub origin: String,
}

fn field_err(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

fn real_matrix(m: &RealMatrix, field: &str) -> CliResult<DMatrix<f64>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(field_err(field, "matrix rows must be non-empty and of equal length"));
    }
    Ok(DMatrix::from_fn(rows, cols, |r, c| m[r][c]))
}

fn complex_matrix(m: &ComplexMatrix, field: &str) -> CliResult<DMatrix<C64>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(field_err(field, "matrix rows must be non-empty and of equal length"));
    }
    Ok(DMatrix::from_fn(rows, cols, |r, c| C64::new(m[r][c][0], m[r][c][1])))
}

fn real_matrices(ms: &[RealMatrix], field: &str) -> CliResult<Vec<DMatrix<f64>>> {
    ms.iter()
        .enumerate()
        .map(|(j, m)| real_matrix(m, &format!("{field}[{j}]")))
        .collect()
}

fn complex_matrices(ms: &[ComplexMatrix], field: &str) -> CliResult<Vec<DMatrix<C64>>> {
    ms.iter()
        .enumerate()
        .map(|(j, m)| complex_matrix(m, &format!("{field}[{j}]")))
        .collect()
}

fn check_len(field: &str, got: usize, want: usize) -> CliResult<()> {
    if got != want {
        return Err(field_err(field, format!("expected {want} entries, got {got}")));
    }
    Ok(())
}

fn vectors_or_generate(x: &Option<Vec<Vec<f64>>>, field: &str, n: usize, d: usize, seed: u64) -> CliResult<Vec<DVector<f64>>> {
    match x {
        Some(x) => {
            check_len(field, x.len(), n)?;
            x.iter()
                .enumerate()
                .map(|(j, v)| {
                    check_len(&format!("{field}[{j}]"), v.len(), d)?;
                    Ok(DVector::from_column_slice(v))
                })
                .collect()
        }
        None => match generate_initial(&GenerationSpec::new(InitialKind::Sphere, vec![d], n, seed))? {
            InitialData::Vectors(x) => Ok(x),
            _ => unreachable!("sphere kind yields vectors"),
        },
    }
}

fn unitaries_or_generate(u: &Option<Vec<ComplexMatrix>>, field: &str, n: usize, dim: usize, seed: u64) -> CliResult<Vec<DMatrix<C64>>> {
    match u {
        Some(u) => {
            check_len(field, u.len(), n)?;
            complex_matrices(u, field)
        }
        None => match generate_initial(&GenerationSpec::new(InitialKind::Unitary, vec![dim], n, seed))? {
            InitialData::Unitary(u) => Ok(u),
            _ => unreachable!("unitary kind yields matrices"),
        },
    }
}

fn orthogonals_or_generate(u: &Option<Vec<RealMatrix>>, field: &str, n: usize, dim: usize, seed: u64) -> CliResult<Vec<DMatrix<f64>>> {
    match u {
        Some(u) => {
            check_len(field, u.len(), n)?;
            real_matrices(u, field)
        }
        None => match generate_initial(&GenerationSpec::new(InitialKind::SpecialOrthogonal, vec![dim], n, seed))? {
            InitialData::Orthogonal(u) => Ok(u),
            _ => unreachable!("special orthogonal kind yields matrices"),
        },
    }
}

impl ModelConfig {
    pub fn prepare(&self, seed: u64) -> CliResult<Prepared> {
        let s2 = seed.wrapping_add(1);
        let (symbols, views, name): (Vec<CharacteristicSymbol>, Vec<View>, &str) = match self {
            ModelConfig::Kuramoto { freqs, coupling, phases } => {
                let n = freqs.len();
                let phases = match phases {
                    Some(p) => {
                        check_len("phases", p.len(), n)?;
                        p.clone()
                    }
                    None => match generate_initial(&GenerationSpec::new(InitialKind::Phase, vec![], n, seed))? {
                        InitialData::Phases(p) => p,
                        _ => unreachable!("phase kind yields phases"),
                    },
                };
                let m = Kuramoto {
                    freqs: freqs.clone(),
                    coupling: *coupling,
                };
                (vec![m.symbol(&phases)], vec![View::Tensor], "kuramoto")
            }
            ModelConfig::SwarmSphere { omegas, coupling, x } => {
                let om = real_matrices(omegas, "omegas")?;
                let d = om.first().ok_or_else(|| field_err("omegas", "empty"))?.nrows();
                let x = vectors_or_generate(x, "x", om.len(), d, seed)?;
                let m = SwarmSphere {
                    omegas: om,
                    coupling: *coupling,
                };
                (vec![m.symbol(&x)?], vec![View::Vector], "swarm_sphere")
            }
            ModelConfig::LoheMatrix { hamiltonians, coupling, u } => {
                let hs = complex_matrices(hamiltonians, "hamiltonians")?;
                let dim = hs.first().ok_or_else(|| field_err("hamiltonians", "empty"))?.nrows();
                let u = unitaries_or_generate(u, "u", hs.len(), dim, seed)?;
                let m = LoheMatrix {
                    hamiltonians: hs,
                    coupling: *coupling,
                };
                (vec![m.symbol(&u)?], vec![View::Matrix], "lohe_matrix")
            }
            ModelConfig::DoubleSphere { omegas, lambdas, coupling, u, v } => {
                let om = real_matrices(omegas, "omegas")?;
                let la = real_matrices(lambdas, "lambdas")?;
                check_len("lambdas", la.len(), om.len())?;
                let d1 = om.first().ok_or_else(|| field_err("omegas", "empty"))?.nrows();
                let d2 = la[0].nrows();
                let u = vectors_or_generate(u, "u", om.len(), d1, seed)?;
                let v = vectors_or_generate(v, "v", om.len(), d2, s2)?;
                let m = DoubleSphere {
                    omegas: om,
                    lambdas: la,
                    coupling: *coupling,
                };
                (m.symbols(&u, &v)?.to_vec(), vec![View::Vector, View::Vector], "double_sphere")
            }
            ModelConfig::DoubleMatrix { h, g, coupling, u, v } => {
                let hs = complex_matrices(h, "h")?;
                let gs = complex_matrices(g, "g")?;
                check_len("g", gs.len(), hs.len())?;
                let n1 = hs.first().ok_or_else(|| field_err("h", "empty"))?.nrows();
                let n2 = gs[0].nrows();
                let u = unitaries_or_generate(u, "u", hs.len(), n1, seed)?;
                let v = unitaries_or_generate(v, "v", hs.len(), n2, s2)?;
                let m = DoubleMatrix {
                    h: hs,
                    g: gs,
                    coupling: *coupling,
                };
                (m.symbols(&u, &v)?.to_vec(), vec![View::Matrix, View::Matrix], "double_matrix")
            }
            ModelConfig::KuramotoSphere {
                nu,
                omegas,
                kappa_phase,
                kappa_sphere,
                theta,
                x,
            } => {
                let om = real_matrices(omegas, "omegas")?;
                check_len("omegas", om.len(), nu.len())?;
                let d = om.first().ok_or_else(|| field_err("omegas", "empty"))?.nrows();
                let theta = match theta {
                    Some(t) => {
                        check_len("theta", t.len(), nu.len())?;
                        t.clone()
                    }
                    None => match generate_initial(&GenerationSpec::new(InitialKind::Phase, vec![], nu.len(), seed))? {
                        InitialData::Phases(p) => p,
                        _ => unreachable!("phase kind yields phases"),
                    },
                };
                let x = vectors_or_generate(x, "x", nu.len(), d, s2)?;
                let m = KuramotoSphere {
                    nu: nu.clone(),
                    omegas: om,
                    kappa_phase: *kappa_phase,
                    kappa_sphere: *kappa_sphere,
                };
                (m.symbols(&theta, &x)?.to_vec(), vec![View::Vector, View::Vector], "kuramoto_sphere")
            }
            ModelConfig::SphereSo {
                omegas,
                amats,
                coupling,
                x,
                u,
            } => {
                let om = real_matrices(omegas, "omegas")?;
                let am = real_matrices(amats, "amats")?;
                check_len("amats", am.len(), om.len())?;
                let d = om.first().ok_or_else(|| field_err("omegas", "empty"))?.nrows();
                let x = vectors_or_generate(x, "x", om.len(), d, seed)?;
                let u = orthogonals_or_generate(u, "u", om.len(), am[0].nrows(), s2)?;
                let m = SphereSo {
                    omegas: om,
                    amats: am,
                    coupling: *coupling,
                };
                (m.symbols(&x, &u)?.to_vec(), vec![View::Vector, View::Matrix], "sphere_so")
            }
        };
        Ok(Prepared {
            symbols,
            views,
            origin: format!("model {name}"),
        })
    }
}

impl GeneratorConfig {
    pub fn build(&self, seed: u64) -> CliResult<CharacteristicSymbol> {
        let seed = self.seed.unwrap_or(seed);
        let size = SizeVector::new(self.size.clone())?;
        let d = size.total();
        let mut spec = if self.real {
            GenerationSpec::new(InitialKind::Sphere, vec![d], self.count, seed)
        } else {
            GenerationSpec::new(InitialKind::UnitTensor, self.size.clone(), self.count, seed)
        };
        spec.spread = self.spread;
        let initial = match generate_initial(&spec)? {
            InitialData::Tensors(t) => t,
            InitialData::Vectors(x) => x
                .iter()
                .map(|v| DenseTensor::from_real(size.clone(), v.as_slice()))
                .collect::<lohe_core::Result<_>>()?,
            _ => unreachable!("requested kinds"),
        };
        let mut rng = rng_from_seed(seed.wrapping_add(0x5eed));
        let freqs = (0..self.count)
            .map(|_| {
                let m = if self.frequency_scale == 0.0 {
                    DMatrix::zeros(d, d)
                } else if self.real {
                    random_skew(&mut rng, d, self.frequency_scale).map(|x| C64::new(x, 0.0))
                } else {
                    random_skew_hermitian(&mut rng, d, self.frequency_scale)
                };
                FrequencyTensor::new(size.clone(), m)
            })
            .collect::<lohe_core::Result<Vec<_>>>()?;
        Ok(CharacteristicSymbol::new(
            size.clone(),
            CouplingTensor::new(size.rank(), self.coupling.clone())?,
            freqs,
            initial,
        )?)
    }
}

impl SymbolSource {
    pub fn load(&self, base: &Path, seed: u64) -> CliResult<CharacteristicSymbol> {
        match self {
            SymbolSource::File(p) => {
                let path = if p.is_absolute() { p.clone() } else { base.join(p) };
                read_symbol(&path)
            }
            SymbolSource::Inline(f) => f.to_symbol(),
            SymbolSource::Generate(g) => g.build(seed),
        }
    }
}

/// The symbols of a config: the named model if given, otherwise the listed
/// symbols (generator seeds default to the config seed plus the position).
pub fn prepare(cfg: &ExperimentConfig) -> CliResult<Prepared> {
    match (&cfg.model, cfg.symbols.is_empty()) {
        (Some(_), false) => Err(CliError::Config("give either `model` or `symbols`, not both".into())),
        (Some(m), true) => m.prepare(cfg.seed()),
        (None, true) => Err(CliError::Config("no `model` or `symbols` given".into())),
        (None, false) => {
            let symbols = cfg
                .symbols
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    s.load(&cfg.base_dir, cfg.seed().wrapping_add(i as u64))
                        .map_err(|e| match e {
                            CliError::Config(m) => CliError::Config(format!("symbols[{i}]: {m}")),
                            other => other,
                        })
                })
                .collect::<CliResult<Vec<_>>>()?;
            let n = symbols[0].count();
            if let Some((i, s)) = symbols.iter().enumerate().find(|(_, s)| s.count() != n) {
                return Err(CliError::Config(format!(
                    "symbols[{i}] has {} oscillators, symbols[0] has {n}",
                    s.count()
                )));
            }
            Ok(Prepared {
                views: vec![View::Tensor; symbols.len()],
                origin: format!("{} symbol(s)", symbols.len()),
                symbols,
            })
        }
    }
}
