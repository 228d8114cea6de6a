//! JSON documents read and written by the commands. Complex numbers are
//! `[re, im]` pairs and matrices are row-major, either flat or as rows.

use qcap::linalg::Factorization;
use qcap::quantum::{DensityMatrix, KrausChannel, PureEnsemble, PureState};
use qcap::{CMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub type Pair = [f64; 2];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixJson {
    Flat(Vec<Pair>),
    Rows(Vec<Vec<Pair>>),
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        MatrixJson::Flat(m.data().iter().map(|z| [z.re, z.im]).collect())
    }

    pub fn to_matrix(&self, rows: usize, cols: usize) -> Result<CMatrix, CliError> {
        let flat: Vec<Pair> = match self {
            MatrixJson::Flat(v) => v.clone(),
            MatrixJson::Rows(r) => {
                if r.len() != rows || r.iter().any(|row| row.len() != cols) {
                    return Err(CliError::input(format!("expected a {rows}x{cols} matrix")));
                }
                r.concat()
            }
        };
        if flat.len() != rows * cols {
            return Err(CliError::input(format!(
                "expected {} entries for a {rows}x{cols} matrix, found {}",
                rows * cols,
                flat.len()
            )));
        }
        check_finite(&flat)?;
        Ok(CMatrix::from_vec(
            rows,
            cols,
            flat.iter().map(|p| C64::new(p[0], p[1])).collect(),
        )?)
    }
}

fn check_finite(v: &[Pair]) -> Result<(), CliError> {
    if v.iter().flatten().any(|x| !x.is_finite()) {
        return Err(CliError::input("non-finite matrix entry"));
    }
    Ok(())
}

pub fn vector_json(v: &[C64]) -> Vec<Pair> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFile {
    pub in_dim: usize,
    pub out_dim: usize,
    pub kraus: Vec<MatrixJson>,
}

impl ChannelFile {
    pub fn from_channel(t: &KrausChannel) -> Self {
        Self {
            in_dim: t.in_dim(),
            out_dim: t.out_dim(),
            kraus: t.kraus_ops().iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn to_channel(&self) -> Result<KrausChannel, CliError> {
        if self.in_dim == 0 || self.out_dim == 0 {
            return Err(CliError::input("channel dimensions must be positive"));
        }
        let ops = self
            .kraus
            .iter()
            .map(|m| m.to_matrix(self.out_dim, self.in_dim))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(KrausChannel::new(ops)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<Pair>>,
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        Self {
            dims: rho.fact().dims().to_vec(),
            matrix: Some(MatrixJson::from_matrix(rho.op())),
            vector: None,
        }
    }

    pub fn to_density(&self) -> Result<DensityMatrix, CliError> {
        let fact = Factorization::new(self.dims.clone())?;
        let n = fact.total();
        match (&self.matrix, &self.vector) {
            (Some(m), None) => Ok(DensityMatrix::new(m.to_matrix(n, n)?, fact)?),
            (None, Some(v)) => {
                check_finite(v)?;
                let amps = v.iter().map(|p| C64::new(p[0], p[1])).collect();
                Ok(DensityMatrix::from_pure(&PureState::new(amps, fact)?))
            }
            _ => Err(CliError::input(
                "state file needs exactly one of `matrix` or `vector`",
            )),
        }
    }
}

/// Cost operator for the constrained capacity: a Hermitian `dim × dim` matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CostFile {
    pub dim: usize,
    pub matrix: MatrixJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct MemberJson {
    pub probability: f64,
    pub state: Vec<Pair>,
}

pub fn ensemble_json(e: &PureEnsemble) -> Vec<MemberJson> {
    e.members()
        .iter()
        .map(|(p, s)| MemberJson {
            probability: *p,
            state: vector_json(s.amplitudes()),
        })
        .collect()
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("cannot parse {}: {e}", path.display())))
}
