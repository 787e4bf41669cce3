//! On-disk formats: graph JSON, spectrum CSV, fidelity CSV, route JSON.
//!
//! JSON payloads use 0-based node indices. Floats in CSV files are written
//! fixed-point with 12 decimals so outputs are byte-stable.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::cayley::{build_cayley_graph, build_generating_set, CayleyGraph, CoordPerm};
use crate::dynamics::FidelitySeries;
use crate::error::{Error, Result};
use crate::routing::{RoutePlan, RouteStep};
use crate::spectral::SpectralTable;

/// Fixed 12-decimal rendering; scientific with lowercase `e` once the
/// magnitude reaches 1e12.
pub fn format_real(x: f64) -> String {
    if x.is_finite() && x.abs() >= 1e12 {
        format!("{x:.11e}")
    } else {
        let s = format!("{x:.12}");
        // avoid "-0.000000000000"
        if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
            s[1..].to_string()
        } else {
            s
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub d: usize,
    pub l: usize,
    pub coord_perm: Vec<usize>,
    pub translation: String,
    pub nodes: usize,
    pub edges: Vec<[usize; 2]>,
}

impl GraphDocument {
    pub fn from_graph(graph: &CayleyGraph) -> Self {
        Self {
            d: graph.dim(),
            l: graph.level(),
            coord_perm: graph.coord_perm().images().to_vec(),
            translation: graph.translation().to_string(),
            nodes: graph.node_count(),
            edges: graph.edges().into_iter().map(|(i, j)| [i, j]).collect(),
        }
    }

    /// Rebuilds the graph from its parameters and checks that the stored
    /// edge list matches it.
    pub fn to_graph(&self) -> Result<CayleyGraph> {
        let gen = build_generating_set(self.d, self.l)?;
        let perm = CoordPerm::new(self.coord_perm.clone())?;
        let translation: BitVector = self.translation.parse()?;
        let graph = build_cayley_graph(&gen, &perm, translation)?;
        if self.nodes != graph.node_count() {
            return Err(Error::Invalid(format!(
                "document lists {} nodes, graph has {}",
                self.nodes,
                graph.node_count()
            )));
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&[i, j]| (i.min(j), i.max(j)))
            .collect();
        edges.sort_unstable();
        if edges != graph.edges() {
            return Err(Error::Invalid("edge list does not match the generating set".into()));
        }
        Ok(graph)
    }
}

pub fn graph_json(graph: &CayleyGraph) -> String {
    let mut s = serde_json::to_string(&GraphDocument::from_graph(graph)).expect("graph serializes");
    s.push('\n');
    s
}

pub fn parse_graph_json(text: &str) -> Result<CayleyGraph> {
    let doc: GraphDocument =
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("graph JSON: {e}")))?;
    doc.to_graph()
}

pub fn spectrum_csv(table: &SpectralTable) -> String {
    let mut out = String::from("sign_vector,eigenvalue,parity\n");
    for e in table.sorted_entries() {
        writeln!(out, "{},{},{}", e.sign, e.eigenvalue, e.parity).expect("write to string");
    }
    out
}

#[derive(Serialize)]
struct SpectrumRow {
    sign_vector: String,
    eigenvalue: i64,
    parity: String,
}

#[derive(Serialize)]
struct SpectrumDocument {
    d: usize,
    l: usize,
    coord_perm: Vec<usize>,
    k: i64,
    entries: Vec<SpectrumRow>,
}

pub fn spectrum_json(table: &SpectralTable) -> String {
    let doc = SpectrumDocument {
        d: table.dim(),
        l: table.level(),
        coord_perm: table.coord_perm().images().to_vec(),
        k: table.phase_offset(),
        entries: table
            .sorted_entries()
            .into_iter()
            .map(|e| SpectrumRow {
                sign_vector: e.sign.to_string(),
                eigenvalue: e.eigenvalue,
                parity: e.parity.to_string(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string(&doc).expect("spectrum serializes");
    s.push('\n');
    s
}

pub fn fidelity_csv(series: &FidelitySeries) -> String {
    let mut out = String::from("tau,p_return,p_target\n");
    for ((t, r), p) in series.taus.iter().zip(&series.p_return).zip(&series.p_target) {
        writeln!(out, "{},{},{}", format_real(*t), format_real(*r), format_real(*p))
            .expect("write to string");
    }
    out
}

/// Parses a fidelity CSV back into `(tau, p_return, p_target)` rows.
pub fn parse_fidelity_csv(text: &str) -> Result<Vec<(f64, f64, f64)>> {
    let mut lines = text.lines();
    if lines.next() != Some("tau,p_return,p_target") {
        return Err(Error::Invalid("missing fidelity CSV header".into()));
    }
    lines
        .map(|line| {
            let cols = line
                .split(',')
                .map(|c| c.parse::<f64>().map_err(|_| Error::Invalid(format!("bad number '{c}'"))))
                .collect::<Result<Vec<f64>>>()?;
            match cols[..] {
                [t, r, p] => Ok((t, r, p)),
                _ => Err(Error::Invalid(format!("expected 3 columns in '{line}'"))),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteDocument {
    pub d: usize,
    pub source: usize,
    pub target: usize,
    pub steps: Vec<RouteStep>,
    pub duration: f64,
    pub fidelity: f64,
}

impl RouteDocument {
    pub fn new(plan: &RoutePlan, fidelity: f64) -> Self {
        Self {
            d: plan.d,
            source: plan.source,
            target: plan.target,
            steps: plan.steps.clone(),
            duration: plan.total_duration(),
            fidelity,
        }
    }
}

pub fn route_json(plan: &RoutePlan, fidelity: f64) -> String {
    let mut s = serde_json::to_string(&RouteDocument::new(plan, fidelity)).expect("route serializes");
    s.push('\n');
    s
}

/// Writes through a temporary file in the destination directory, then
/// renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
