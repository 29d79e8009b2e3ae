//! JSON formation and report documents, CSV traces.
//!
//! A formation document looks like
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "vertices": [
//!     { "id": 1, "position": [0.0, 0.0] },
//!     { "id": 2, "position": [1.0, 0.0] },
//!     { "id": 3, "position": [0.0, 1.0] }
//!   ],
//!   "edges": [[2, 1], [3, 1], [3, 2]],
//!   "target": { "bearings": [[-1.0, 0.0], [0.0, -1.0], [0.7071067811865476, -0.7071067811865476]] }
//! }
//! ```
//!
//! `target` is optional and holds either `positions` (same shape as
//! `vertices`) or one unit `bearings` entry per edge. Vertex `k` of the
//! library formation is the `k`-th entry of `vertices`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{ConditionFlags, EquivalenceReport, Tolerances};
use crate::dynamics::{SimulationTrace, TargetSpec};
use crate::error::{Error, Result};
use crate::geometry::{Configuration, DirectedFormation};
use crate::graph::{DirectedGraph, Edge};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub id: usize,
    pub position: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetEntry {
    Positions(Vec<VertexEntry>),
    Bearings(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormationDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub dimension: usize,
    pub vertices: Vec<VertexEntry>,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetEntry>,
}

fn deserialize_json<'de, T: Deserialize<'de>>(text: &'de str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        match inner.classify() {
            serde_json::error::Category::Data => Error::Schema {
                path,
                message: inner.to_string(),
            },
            _ => Error::Parse(inner.to_string()),
        }
    })?;
    de.end().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(value)
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn positions(entries: &[VertexEntry], dim: usize, field: &str) -> Result<Vec<Vec<f64>>> {
    entries
        .iter()
        .enumerate()
        .map(|(k, v)| {
            if v.position.len() != dim {
                Err(schema(
                    format!("{field}[{k}].position"),
                    format!("expected {dim} coordinates, found {}", v.position.len()),
                ))
            } else {
                Ok(v.position.clone())
            }
        })
        .collect()
}

impl FormationDocument {
    /// Validates the document and builds the formation plus its optional
    /// control target.
    pub fn to_formation(&self) -> Result<(DirectedFormation, Option<TargetSpec>)> {
        let d = self.dimension;
        let mut index: HashMap<usize, usize> = HashMap::new();
        for (k, v) in self.vertices.iter().enumerate() {
            if index.insert(v.id, k).is_some() {
                return Err(schema(
                    format!("vertices[{k}].id"),
                    format!("duplicate id {}", v.id),
                ));
            }
        }
        let n = self.vertices.len();
        let mut edges = Vec::with_capacity(self.edges.len());
        for (k, [s, t]) in self.edges.iter().enumerate() {
            let lookup = |id: &usize| {
                index.get(id).copied().ok_or(Error::VertexIdOutOfRange {
                    edge: k,
                    vertex: *id,
                    n,
                })
            };
            edges.push(Edge::new(lookup(s)?, lookup(t)?));
        }
        let graph = DirectedGraph::new(n, edges)?;
        let config = Configuration::new(d, &positions(&self.vertices, d, "vertices")?)?;
        let formation = DirectedFormation::new(graph.clone(), config)?;

        let target = match &self.target {
            None => None,
            Some(TargetEntry::Bearings(b)) => {
                let bearings = b.iter().map(|g| DVector::from_column_slice(g)).collect();
                Some(TargetSpec::from_bearings(graph, d, bearings)?)
            }
            Some(TargetEntry::Positions(entries)) => {
                if entries.len() != n {
                    return Err(schema(
                        "target.positions",
                        format!("expected {n} vertices, found {}", entries.len()),
                    ));
                }
                let mut points = vec![Vec::new(); n];
                let coords = positions(entries, d, "target.positions")?;
                for (k, (entry, p)) in entries.iter().zip(coords).enumerate() {
                    let Some(&i) = index.get(&entry.id) else {
                        return Err(schema(
                            format!("target.positions[{k}].id"),
                            format!("unknown vertex id {}", entry.id),
                        ));
                    };
                    points[i] = p;
                }
                if let Some(i) = points.iter().position(|p| p.is_empty()) {
                    return Err(schema(
                        "target.positions",
                        format!("no position for vertex id {}", self.vertices[i].id),
                    ));
                }
                let target = DirectedFormation::new(graph, Configuration::new(d, &points)?)?;
                Some(TargetSpec::from_formation(&target))
            }
        };
        Ok((formation, target))
    }

    /// Document for `f` with ids `1..=n`, optionally carrying target
    /// bearings.
    pub fn from_formation(f: &DirectedFormation, target: Option<&TargetSpec>) -> Self {
        FormationDocument {
            description: None,
            dimension: f.dim(),
            vertices: f
                .config()
                .points()
                .into_iter()
                .enumerate()
                .map(|(k, position)| VertexEntry {
                    id: k + 1,
                    position,
                })
                .collect(),
            edges: f
                .graph()
                .edges()
                .iter()
                .map(|e| [e.source + 1, e.target + 1])
                .collect(),
            target: target.map(|t| {
                TargetEntry::Bearings(t.bearings().iter().map(|g| g.as_slice().to_vec()).collect())
            }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }
}

/// Parses and validates a formation document.
pub fn parse_formation(text: &str) -> Result<(DirectedFormation, Option<TargetSpec>)> {
    let doc: FormationDocument = deserialize_json(text)?;
    doc.to_formation()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

/// Serialized form of an [`EquivalenceReport`]. Null-space bases are
/// stored as lists of columns; eigenvalues as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: ToolInfo,
    pub input_digest: String,
    pub tolerances: Tolerances,
    pub dimension: usize,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub rank_rb: usize,
    pub rank_lb: usize,
    pub dim_null_rb: usize,
    pub dim_null_lb: usize,
    pub null_basis_rb: Vec<Vec<f64>>,
    pub null_basis_lb: Vec<Vec<f64>>,
    pub trivial_dim: usize,
    pub is_ibr: bool,
    pub kernel_equal: bool,
    pub is_bearing_equivalent: bool,
    pub decomposition_consistent: bool,
    pub spectrum: Vec<[f64; 2]>,
    pub min_real_part: f64,
    pub zero_multiplicity_algebraic: usize,
    pub zero_multiplicity_geometric: usize,
    pub all_real_nonneg: bool,
    pub has_negative_real_part: bool,
    pub defective_zero: bool,
    pub condition_flags: ConditionFlags,
}

fn columns(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.column_iter()
        .map(|c| c.iter().copied().collect())
        .collect()
}

/// Hex SHA-256 of the input document.
pub fn digest(text: &str) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(text.as_bytes())))
}

impl ReportDocument {
    pub fn new(r: &EquivalenceReport, input_digest: String) -> Self {
        ReportDocument {
            tool: ToolInfo {
                name: env!("CARGO_PKG_NAME").to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            input_digest,
            tolerances: r.tolerances,
            dimension: r.dim,
            vertex_count: r.vertex_count,
            edge_count: r.edge_count,
            rank_rb: r.rank_rb,
            rank_lb: r.rank_lb,
            dim_null_rb: r.dim_null_rb,
            dim_null_lb: r.dim_null_lb,
            null_basis_rb: columns(&r.null_basis_rb),
            null_basis_lb: columns(&r.null_basis_lb),
            trivial_dim: r.trivial_dim,
            is_ibr: r.is_ibr,
            kernel_equal: r.kernel_equal,
            is_bearing_equivalent: r.is_bearing_equivalent,
            decomposition_consistent: r.decomposition_consistent,
            spectrum: spectrum_pairs(&r.spectrum),
            min_real_part: r.min_real_part,
            zero_multiplicity_algebraic: r.zero_multiplicity_algebraic,
            zero_multiplicity_geometric: r.zero_multiplicity_geometric,
            all_real_nonneg: r.spectral.all_real_nonneg,
            has_negative_real_part: r.spectral.has_negative_real_part,
            defective_zero: r.spectral.defective_zero,
            condition_flags: r.conditions,
        }
    }
}

pub fn spectrum_pairs(spectrum: &[Complex64]) -> Vec<[f64; 2]> {
    spectrum.iter().map(|z| [z.re, z.im]).collect()
}

/// Pretty JSON with keys sorted at every level. Floats use the shortest
/// representation that parses back to the same value.
pub fn to_sorted_json<T: Serialize>(value: &T) -> String {
    // serde_json's Map is a BTreeMap, so going through Value sorts keys
    let value = serde_json::to_value(value).expect("value serializes");
    let sorted: BTreeMap<String, serde_json::Value> = match value {
        serde_json::Value::Object(map) => map.into_iter().collect(),
        other => return serde_json::to_string_pretty(&other).expect("value serializes"),
    };
    serde_json::to_string_pretty(&sorted).expect("value serializes")
}

pub fn serialize_report(doc: &ReportDocument) -> String {
    to_sorted_json(doc)
}

pub fn parse_report(text: &str) -> Result<ReportDocument> {
    deserialize_json(text)
}

/// CSV with header `t,p_1_1,...,p_n_d,bearing_error`, one row per sample.
pub fn export_trace(trace: &SimulationTrace) -> String {
    let d = trace.dim;
    let n = trace.states.first().map_or(0, |s| s.len() / d);
    let mut out = String::from("t");
    for i in 1..=n {
        for a in 1..=d {
            write!(out, ",p_{i}_{a}").unwrap();
        }
    }
    out.push_str(",bearing_error\n");
    for ((t, p), e) in trace
        .times
        .iter()
        .zip(&trace.states)
        .zip(&trace.bearing_errors)
    {
        write!(out, "{t}").unwrap();
        for x in p.iter() {
            write!(out, ",{x}").unwrap();
        }
        writeln!(out, ",{e}").unwrap();
    }
    out
}
