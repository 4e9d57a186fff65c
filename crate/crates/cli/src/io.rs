//! Input files, number formatting and output sinks.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use sbrw_core::{Cell, OrientedCell, OrientedIndex, SimplicialComplex, VertexId};

/// `{"maximal_faces": [[ids...], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub maximal_faces: Vec<Vec<VertexId>>,
}

impl ComplexFile {
    /// Sorted vertex arrays of the maximal faces in sorted order.
    pub fn canonical(x: &SimplicialComplex) -> Self {
        let mut maximal_faces: Vec<Vec<VertexId>> = x.maximal_faces().iter().map(|c| c.vertices().to_vec()).collect();
        maximal_faces.sort();
        ComplexFile { maximal_faces }
    }

    pub fn build(&self) -> Result<SimplicialComplex> {
        Ok(sbrw_core::build_complex(&self.maximal_faces)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("vertex lists serialize")
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryValue {
    pub cell: Vec<VertexId>,
    #[serde(default = "positive")]
    pub sign: i8,
    pub value: f64,
}

fn positive() -> i8 {
    1
}

/// `{"A": [[cell]...], "f": [{"cell": [...], "sign": 1, "value": v}...]}`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryFile {
    #[serde(rename = "A")]
    pub a: Vec<Vec<VertexId>>,
    #[serde(default)]
    pub f: Vec<BoundaryValue>,
}

/// Canonical indices of `A` and the oriented boundary values.
pub type ResolvedBoundary = (Vec<usize>, Vec<(OrientedIndex, f64)>);

impl BoundaryFile {
    pub fn resolve(&self, x: &SimplicialComplex) -> Result<ResolvedBoundary> {
        let j = top_dim(x)?;
        let a = self
            .a
            .iter()
            .map(|c| cell_index(x, j, c))
            .collect::<Result<Vec<_>>>()?;
        let f = self
            .f
            .iter()
            .map(|v| {
                if v.sign != 1 && v.sign != -1 {
                    bail!("boundary sign must be 1 or -1, got {}", v.sign);
                }
                let i = cell_index(x, j, &v.cell)?;
                Ok((OrientedIndex::new(i, v.sign), v.value))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((a, f))
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn read_complex(path: &Path) -> Result<SimplicialComplex> {
    let text = read_text(path)?;
    let file: ComplexFile =
        serde_json::from_str(&text).with_context(|| format!("malformed complex JSON in {}", path.display()))?;
    file.build().with_context(|| format!("invalid complex in {}", path.display()))
}

pub fn read_boundary(path: &Path) -> Result<BoundaryFile> {
    let text = read_text(path)?;
    serde_json::from_str(&text).with_context(|| format!("malformed boundary JSON in {}", path.display()))
}

/// Dimension `d − 1` of the cells the walks move on.
pub fn top_dim(x: &SimplicialComplex) -> Result<i32> {
    if x.dim() == 0 {
        bail!("the complex must have dimension at least 1");
    }
    Ok(x.dim() as i32 - 1)
}

pub fn cell_index(x: &SimplicialComplex, j: i32, vertices: &[VertexId]) -> Result<usize> {
    let cell = Cell::new(vertices.to_vec())?;
    if cell.dim() != j {
        bail!("cell {vertices:?} has dimension {}, expected {j}", cell.dim());
    }
    Ok(x.require_index(&cell)?)
}

/// Parses `"0,1,2"` as a vertex ordering.
pub fn parse_vertices(s: &str) -> Result<Vec<VertexId>> {
    s.split(',')
        .map(|t| t.trim().parse::<VertexId>().with_context(|| format!("bad vertex id {t:?} in {s:?}")))
        .collect()
}

/// Oriented index of a `j`-cell given as a vertex ordering.
pub fn parse_oriented(x: &SimplicialComplex, j: i32, s: &str) -> Result<OrientedIndex> {
    let vertices = parse_vertices(s)?;
    let oc = OrientedCell::from_ordering(&vertices)?;
    if oc.dim() != j {
        bail!("cell {s:?} has dimension {}, expected {j}", oc.dim());
    }
    Ok(x.oriented_index(&oc)?)
}

/// `x` with 12 significant digits, trailing zeros removed.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// `x` rounded to 12 significant digits, for JSON emission.
pub fn round12(x: f64) -> f64 {
    if x.is_finite() {
        fmt_num(x).parse().expect("formatted number parses")
    } else {
        x
    }
}

pub fn json_num(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(round12(x)).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

pub fn json_nums(xs: &[f64]) -> serde_json::Value {
    serde_json::Value::Array(xs.iter().map(|&x| json_num(x)).collect())
}

/// CSV accumulated in memory.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Result<Self> {
        let mut writer = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        writer.write_record(header)?;
        Ok(Table { writer })
    }

    pub fn row<I, T>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        Ok(self.writer.write_record(fields)?)
    }

    pub fn finish(self) -> Result<Vec<u8>> {
        Ok(self.writer.into_inner().map_err(|e| e.into_error())?)
    }
}

pub fn json_bytes(v: &serde_json::Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("JSON values serialize");
    out.push(b'\n');
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub fn emit(out: Option<&PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            Ok(stdout.flush()?)
        }
    }
}
