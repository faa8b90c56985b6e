//! JSON symbol files. Complex numbers are `[re, im]` pairs, frequency
//! tensors are D x D nested arrays and couplings a flat array of 2^m values
//! with the first pattern bit most significant.

use std::path::Path;

use lohe_core::symbol::{CharacteristicSymbol, CouplingTensor};
use lohe_core::tensor::{DenseTensor, FrequencyTensor, SizeVector, C64};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{io_err, CliError, CliResult};

pub type Complex = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolFile {
    pub size: Vec<usize>,
    pub coupling: Vec<f64>,
    pub frequencies: Vec<Vec<Vec<Complex>>>,
    pub initial: Vec<Vec<Complex>>,
}

fn c(z: &Complex) -> C64 {
    C64::new(z[0], z[1])
}

fn pair(z: &C64) -> Complex {
    [z.re, z.im]
}

impl SymbolFile {
    pub fn from_symbol(s: &CharacteristicSymbol) -> Self {
        SymbolFile {
            size: s.size().dims().to_vec(),
            coupling: s.coupling().values().to_vec(),
            frequencies: s
                .freqs()
                .iter()
                .map(|a| {
                    let m = a.matrix();
                    (0..m.nrows()).map(|r| (0..m.ncols()).map(|col| pair(&m[(r, col)])).collect()).collect()
                })
                .collect(),
            initial: s.initial().iter().map(|t| t.data().iter().map(pair).collect()).collect(),
        }
    }

    pub fn to_symbol(&self) -> CliResult<CharacteristicSymbol> {
        let size = SizeVector::new(self.size.clone())?;
        let d = size.total();
        let freqs = self
            .frequencies
            .iter()
            .enumerate()
            .map(|(j, rows)| {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(CliError::Config(format!("frequencies[{j}] must be {d} x {d}")));
                }
                let m = DMatrix::from_fn(d, d, |r, col| c(&rows[r][col]));
                Ok(FrequencyTensor::new(size.clone(), m)?)
            })
            .collect::<CliResult<Vec<_>>>()?;
        let initial = self
            .initial
            .iter()
            .enumerate()
            .map(|(j, v)| {
                if v.len() != d {
                    return Err(CliError::Config(format!("initial[{j}] has {} entries, expected {d}", v.len())));
                }
                Ok(DenseTensor::new(size.clone(), v.iter().map(c).collect())?)
            })
            .collect::<CliResult<Vec<_>>>()?;
        Ok(CharacteristicSymbol::new(
            size.clone(),
            CouplingTensor::new(size.rank(), self.coupling.clone())?,
            freqs,
            initial,
        )?)
    }
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> CliResult<T> {
    serde_json::from_str(text)
        .map_err(|e| CliError::Config(format!("{origin}: line {} column {}: {e}", e.line(), e.column())))
}

pub fn read_symbol(path: &Path) -> CliResult<CharacteristicSymbol> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_json::<SymbolFile>(&text, &path.display().to_string())?
        .to_symbol()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn symbol_to_json(s: &CharacteristicSymbol) -> String {
    serde_json::to_string_pretty(&SymbolFile::from_symbol(s)).expect("plain data serializes")
}

pub fn write_symbol(path: &Path, s: &CharacteristicSymbol) -> CliResult<()> {
    std::fs::write(path, symbol_to_json(s) + "\n").map_err(|e| io_err(path, e))
}
