//! JSON file formats for ensembles, channels and reports.
//!
//! Ensemble files hold `{"states": [{"q": …, "bloch": [x, y, z]}, …]}`.
//! Channel files hold either `{"D": [[…], […], […]], "t": [x, y, z]}`,
//! `{"kind": "depolarizing", "eta": …}` or
//! `{"kind": "unitary", "axis": [x, y, z], "angle": …}`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bloch::{Tolerances, Vec3};
use crate::channel::{Matrix3f, QubitChannel};
use crate::ensemble::{Ensemble, WeightedState};
use crate::error::{OmpError, Result};
use crate::linalg::{RealMatrix, RealVector};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateEntry {
    pub q: f64,
    pub bloch: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    pub states: Vec<StateEntry>,
}

impl EnsembleFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| OmpError::Parse(e.to_string()))
    }

    pub fn to_ensemble(&self, tol: &Tolerances) -> Result<Ensemble> {
        Ensemble::validate(
            self.states
                .iter()
                .map(|s| WeightedState {
                    q: s.q,
                    bloch: Vec3::from(s.bloch),
                })
                .collect(),
            tol,
        )
    }

    pub fn from_ensemble(e: &Ensemble) -> Self {
        Self {
            states: e
                .states()
                .iter()
                .map(|s| StateEntry {
                    q: s.q,
                    bloch: s.bloch.into(),
                })
                .collect(),
        }
    }
}

pub fn parse_ensemble(text: &str, tol: &Tolerances) -> Result<Ensemble> {
    EnsembleFile::parse(text)?.to_ensemble(tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ChannelKind {
    Depolarizing { eta: f64 },
    Unitary { axis: [f64; 3], angle: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineChannel {
    #[serde(rename = "D")]
    pub d: [[f64; 3]; 3],
    pub t: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelFile {
    Kind(ChannelKind),
    Affine(AffineChannel),
}

impl ChannelFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            OmpError::Parse(format!(
                "{e}: expected {{\"D\", \"t\"}}, a depolarizing or a unitary channel"
            ))
        })
    }

    pub fn to_channel(&self) -> Result<QubitChannel> {
        match self {
            ChannelFile::Kind(ChannelKind::Depolarizing { eta }) => QubitChannel::depolarizing(*eta),
            ChannelFile::Kind(ChannelKind::Unitary { axis, angle }) => {
                QubitChannel::unitary(&Vec3::from(*axis), *angle)
            }
            ChannelFile::Affine(a) => Ok(QubitChannel::new(
                Matrix3f::from_fn(|r, c| a.d[r][c]),
                Vec3::from(a.t),
            )),
        }
    }
}

pub fn parse_channel(text: &str) -> Result<QubitChannel> {
    ChannelFile::parse(text)?.to_channel()
}

pub fn vec3_json(v: &Vec3) -> Value {
    json!([v.x, v.y, v.z])
}

pub fn matrix3_json(m: &Matrix3f) -> Value {
    Value::Array((0..3).map(|r| json!([m[(r, 0)], m[(r, 1)], m[(r, 2)]])).collect())
}

pub fn matrix_json(m: &RealMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| Value::Array((0..m.ncols()).map(|c| json!(m[(r, c)])).collect()))
            .collect(),
    )
}

pub fn vector_json(v: &RealVector) -> Value {
    json!(v.iter().copied().collect::<Vec<f64>>())
}

pub fn channel_json(c: &QubitChannel) -> Value {
    json!({ "D": matrix3_json(&c.d), "t": vec3_json(&c.t) })
}

/// 0-based indices to the 1-based ones used in files and on the command line.
pub fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|i| i + 1).collect()
}

/// Envelope shared by all reports.
pub fn report(command: &str, tol: &Tolerances, timestamp: bool, result: Value) -> Value {
    let mut r = json!({
        "tool": "ompkit",
        "version": VERSION,
        "command": command,
        "tolerances": tol,
        "result": result,
    });
    if timestamp {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        r["timestamp_unix"] = json!(secs);
    }
    r
}
