//! Serialization of complexes, packings, and series tables, plus atomic
//! file writes (write to a sibling temp file, then rename) so partial
//! output never lands under the target name.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::affine::DilatationReport;
use crate::complex::TileComplex;
use crate::error::{Error, Result};
use crate::packing::{PackMode, Packing, PackingComplex};
use crate::series::SeriesRow;

pub fn atomic_write(path: &Path, contents: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp_path = Path::new(&tmp);
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(tmp_path, contents)?;
    fs::rename(tmp_path, path)?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub rule: String,
    pub weld_eps: f64,
    pub vertices: Vec<VertexDoc>,
    pub tiles: Vec<TileDoc>,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct VertexDoc {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TileDoc {
    pub id: usize,
    pub prototile: usize,
    pub vertices: Vec<usize>,
    pub lineage: Vec<usize>,
}

pub fn complex_doc(complex: &TileComplex) -> ComplexDoc {
    ComplexDoc {
        rule: complex.rule_name.clone(),
        weld_eps: complex.weld_eps,
        vertices: complex
            .vertices
            .iter()
            .enumerate()
            .map(|(id, v)| VertexDoc { id, x: v.re, y: v.im })
            .collect(),
        tiles: complex
            .tiles
            .iter()
            .enumerate()
            .map(|(id, t)| TileDoc {
                id,
                prototile: t.prototile,
                vertices: t.corners.clone(),
                lineage: t.lineage.clone(),
            })
            .collect(),
        edges: complex.edges.iter().map(|e| [e.a, e.b]).collect(),
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PackingDoc {
    pub geometry: String,
    pub residual: f64,
    pub provenance: ProvenanceDoc,
    pub vertices: Vec<PackedVertexDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProvenanceDoc {
    pub rule: String,
    pub depth: usize,
    pub buffer: usize,
    pub hex_depth: usize,
    pub mode: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PackedVertexDoc {
    pub id: usize,
    pub tag: String,
    pub radius: f64,
    pub x: f64,
    pub y: f64,
    /// Hyperbolic radius where it differs from the drawn radius; absent
    /// for euclidean packings, null on horocycles.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_radius: Option<Option<f64>>,
}

pub fn packing_doc(
    pc: &PackingComplex,
    packing: &Packing,
    rule: &str,
    depth: usize,
    buffer: usize,
    mode: PackMode,
) -> Result<PackingDoc> {
    let circles = packing
        .circles
        .as_ref()
        .ok_or_else(|| Error::Layout("serialization needs a laid-out packing".into()))?;
    let hyperbolic = matches!(packing.geometry, crate::packing::Geometry::Hyperbolic);
    let vertices = (0..pc.vertex_count())
        .map(|id| PackedVertexDoc {
            id,
            tag: pc.tags[id].word().to_string(),
            radius: circles[id].radius,
            x: circles[id].center.re,
            y: circles[id].center.im,
            model_radius: if hyperbolic {
                Some(packing.radii[id].is_finite().then_some(packing.radii[id]))
            } else {
                None
            },
        })
        .collect();
    Ok(PackingDoc {
        geometry: packing.geometry.word().to_string(),
        residual: packing.residual,
        provenance: ProvenanceDoc {
            rule: rule.to_string(),
            depth,
            buffer,
            hex_depth: pc.hex_depth,
            mode: mode.word().to_string(),
        },
        vertices,
    })
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ShapeDoc {
    pub rule: String,
    pub n: usize,
    pub buffer: usize,
    pub hex_depth: usize,
    pub mode: String,
    pub residual: f64,
    pub d: f64,
    pub c: f64,
    /// Normalized aggregate boundary polyline.
    pub aggregate: Vec<[f64; 2]>,
    /// Normalized euclidean prototile corner polygon.
    pub target: Vec<[f64; 2]>,
    /// Corner indices into `aggregate`.
    pub corners: Vec<usize>,
    /// Ranks of normalization corners a and b within `corners`.
    pub base: [usize; 2],
}

impl ShapeDoc {
    pub fn new(
        rule: &str,
        n: usize,
        params: &crate::series::SeriesParams,
        pa: &crate::series::PackedAggregate,
    ) -> ShapeDoc {
        ShapeDoc {
            rule: rule.to_string(),
            n,
            buffer: params.buffer,
            hex_depth: params.hex_depth,
            mode: params.mode.word().to_string(),
            residual: pa.packing.residual,
            d: pa.d,
            c: pa.c,
            aggregate: pa.normalized.points.iter().map(|z| [z.re, z.im]).collect(),
            target: pa.target.points.iter().map(|z| [z.re, z.im]).collect(),
            corners: pa.normalized.corners.clone(),
            base: [pa.normalized.base.0, pa.normalized.base.1],
        }
    }
}

/// One row per subdivision level, floats in scientific notation so the
/// file is compact and byte-stable.
pub fn series_csv(rows: &[SeriesRow]) -> String {
    let mut out = String::from("rule,n,tiles,hex_depth,buffer,mode,packing_residual,d_n,c_n\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{:e},{:e},{:e}\n",
            r.rule, r.n, r.tiles, r.hex_depth, r.buffer, r.mode, r.packing_residual, r.d_n, r.c_n
        ));
    }
    out
}

/// Per-triangle dilatations with a closing summary row.
pub fn kappa_csv(report: &DilatationReport) -> String {
    let mut out = String::from("prototile,label,triangle,kappa\n");
    for p in &report.per_prototile {
        for (i, k) in p.kappas.iter().enumerate() {
            out.push_str(&format!("{},{},{},{:e}\n", p.prototile, p.label, i, k));
        }
    }
    out.push_str(&format!("overall,,,{:e}\n", report.kappa));
    out
}
