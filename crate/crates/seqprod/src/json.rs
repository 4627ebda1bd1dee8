//! JSON wire formats for matrices, effects, and processes.
//!
//! A matrix travels as `{"dim": n, "entries": [[re, im], ...]}` row-major;
//! rectangular matrices (Kraus operators between blocks of different size,
//! superoperator blocks) carry `"rows"`/`"cols"` instead of `"dim"`. An
//! effect is its algebra shape plus one matrix per block. A map between
//! algebras comes in two forms: `"kraus"` lists operators per route
//! `"i->j"` and always describes a completely positive map, while
//! `"superop"` gives one matrix per route acting on row-major vectorized
//! blocks and can carry anything linear (a transpose map, say). Values are
//! not required to round-trip bit-exactly, only within 1e−15; the emitter
//! uses shortest-representation floats, which in practice is exact.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::effects::{Algebra, Effect, EffectError};
use crate::linalg::{CMatrix, LinalgError};
use crate::process::{BlockLinearMap, Process, ProcessError};
use crate::tol::Tolerances;
use num_complex::Complex64;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error(transparent)]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Effect(#[from] EffectError),
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error("matrix JSON needs \"dim\" or both \"rows\" and \"cols\"")]
    MissingShape,
    #[error("matrix has {got} entries, expected {rows}×{cols}")]
    EntryCount { got: usize, rows: usize, cols: usize },
    #[error("route key `{key}` is not of the form \"i->j\"")]
    BadRouteKey { key: String },
    #[error("map JSON needs exactly one of \"kraus\" or \"superop\"")]
    AmbiguousForm,
}

type Result<T, E = JsonError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cols: Option<usize>,
    pub entries: Vec<(f64, f64)>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> MatrixJson {
        let entries = (0..m.rows())
            .flat_map(|r| (0..m.cols()).map(move |c| (r, c)))
            .map(|(r, c)| (m[(r, c)].re, m[(r, c)].im))
            .collect();
        if m.rows() == m.cols() {
            MatrixJson { dim: Some(m.rows()), rows: None, cols: None, entries }
        } else {
            MatrixJson { dim: None, rows: Some(m.rows()), cols: Some(m.cols()), entries }
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let (rows, cols) = match (self.dim, self.rows, self.cols) {
            (Some(n), _, _) => (n, n),
            (None, Some(r), Some(c)) => (r, c),
            _ => return Err(JsonError::MissingShape),
        };
        if self.entries.len() != rows * cols {
            return Err(JsonError::EntryCount { got: self.entries.len(), rows, cols });
        }
        Ok(CMatrix::from_fn(rows, cols, |r, c| {
            let (re, im) = self.entries[r * cols + c];
            Complex64::new(re, im)
        }))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EffectJson {
    pub algebra: Vec<usize>,
    pub blocks: Vec<MatrixJson>,
}

impl EffectJson {
    pub fn from_effect(e: &Effect) -> EffectJson {
        EffectJson {
            algebra: e.algebra().block_dims().to_vec(),
            blocks: e.blocks().iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    /// Rebuild the effect, re-running the hermiticity and spectrum gates.
    pub fn to_effect(&self, tols: &Tolerances) -> Result<Effect> {
        let algebra = Algebra::new(self.algebra.clone())?;
        let blocks = self.blocks.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>>>()?;
        Ok(Effect::new(algebra, blocks, tols)?)
    }
}

/// A map in either presentation. Kraus files parse to [`Process`] (with the
/// contraction gate deferred to the caller — certification wants to report
/// a violation, not choke on it); superoperator files parse to
/// [`BlockLinearMap`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProcessJson {
    pub source: Vec<usize>,
    pub target: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kraus: Option<BTreeMap<String, Vec<MatrixJson>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub superop: Option<BTreeMap<String, MatrixJson>>,
}

pub enum AnyMap {
    Kraus(Process),
    Linear(BlockLinearMap),
}

impl AnyMap {
    pub fn linearized(&self) -> BlockLinearMap {
        match self {
            AnyMap::Kraus(p) => p.linearized(),
            AnyMap::Linear(l) => l.clone(),
        }
    }
}

fn route_key(route: (usize, usize)) -> String {
    format!("{}->{}", route.0, route.1)
}

fn parse_route_key(key: &str) -> Result<(usize, usize)> {
    let bad = || JsonError::BadRouteKey { key: key.to_string() };
    let (i, j) = key.split_once("->").ok_or_else(bad)?;
    Ok((i.trim().parse().map_err(|_| bad())?, j.trim().parse().map_err(|_| bad())?))
}

impl ProcessJson {
    pub fn from_process(p: &Process) -> ProcessJson {
        let kraus = p
            .routes()
            .map(|route| {
                let ops = p.kraus_route(route).expect("route exists");
                (route_key(route), ops.iter().map(MatrixJson::from_matrix).collect())
            })
            .collect();
        ProcessJson {
            source: p.source().block_dims().to_vec(),
            target: p.target().block_dims().to_vec(),
            kraus: Some(kraus),
            superop: None,
        }
    }

    pub fn from_linear(l: &BlockLinearMap) -> ProcessJson {
        let mut superop = BTreeMap::new();
        for i in 0..l.source().block_dims().len() {
            for j in 0..l.target().block_dims().len() {
                if let Some(s) = l.route((i, j)) {
                    superop.insert(route_key((i, j)), MatrixJson::from_matrix(s));
                }
            }
        }
        ProcessJson {
            source: l.source().block_dims().to_vec(),
            target: l.target().block_dims().to_vec(),
            kraus: None,
            superop: Some(superop),
        }
    }

    pub fn to_map(&self) -> Result<AnyMap> {
        let source = Algebra::new(self.source.clone())?;
        let target = Algebra::new(self.target.clone())?;
        match (&self.kraus, &self.superop) {
            (Some(kraus), None) => {
                let mut routes = Vec::new();
                for (key, ops) in kraus {
                    let route = parse_route_key(key)?;
                    let ops = ops.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>>>()?;
                    routes.push((route, ops));
                }
                Ok(AnyMap::Kraus(Process::from_kraus_raw(source, target, routes)?))
            }
            (None, Some(superop)) => {
                let mut routes = BTreeMap::new();
                for (key, m) in superop {
                    routes.insert(parse_route_key(key)?, m.to_matrix()?);
                }
                Ok(AnyMap::Linear(BlockLinearMap::from_routes(source, target, routes)?))
            }
            _ => Err(JsonError::AmbiguousForm),
        }
    }
}

pub fn effect_to_string(e: &Effect) -> String {
    serde_json::to_string_pretty(&EffectJson::from_effect(e)).expect("effect serializes")
}

pub fn effect_from_str(text: &str, tols: &Tolerances) -> Result<Effect> {
    serde_json::from_str::<EffectJson>(text)?.to_effect(tols)
}

pub fn process_to_string(p: &Process) -> String {
    serde_json::to_string_pretty(&ProcessJson::from_process(p)).expect("process serializes")
}

pub fn map_from_str(text: &str) -> Result<AnyMap> {
    serde_json::from_str::<ProcessJson>(text)?.to_map()
}
