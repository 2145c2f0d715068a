//! Shear and vertex-map files: JSON with one record per line, integers as
//! JSON numbers of any size, real values as decimal strings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::value::RawValue;
use serde_json::Number;

use super::CliError;
use crate::farey::{Edge, FareyVertex};
use crate::geom::BoundaryPoint;
use crate::num::Scalar;
use crate::shear::{DevelopedMap, ShearFunction};

pub const SHEAR_FORMAT: &str = "farey-shear/shears";
pub const MAP_FORMAT: &str = "farey-shear/vertex-map";
pub const VERSION: u32 = 1;

fn line_of(input: &str, raw: &RawValue) -> usize {
    let offset = raw.get().as_ptr() as usize - input.as_ptr() as usize;
    input[..offset].matches('\n').count() + 1
}

fn int(n: &Number) -> Option<BigInt> {
    n.to_string().parse().ok()
}

pub fn vertex_json(v: &FareyVertex) -> String {
    format!("[{}, {}]", v.p(), v.q())
}

pub fn edge_json(e: &Edge) -> String {
    format!("[{}, {}]", vertex_json(e.a()), vertex_json(e.b()))
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("string serializes")
}

fn parse_vertex(pair: &[Number; 2]) -> Option<FareyVertex> {
    FareyVertex::new(int(&pair[0])?, int(&pair[1])?).ok()
}

#[derive(Deserialize)]
struct ShearHeader<'a> {
    format: String,
    version: u32,
    default: String,
    model: String,
    precision: usize,
    #[serde(borrow)]
    records: Vec<&'a RawValue>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ShearRecord {
    edge: [[Number; 2]; 2],
    s: String,
}

/// Parses a shear file, rounding decimals to `precision` bits (the header's
/// precision when `None`).
pub fn read_shears(input: &str, precision: Option<usize>) -> Result<ShearFunction, CliError> {
    let header: ShearHeader =
        serde_json::from_str(input).map_err(|e| CliError::Validation(format!("malformed shear file: {e}")))?;
    if header.format != SHEAR_FORMAT || header.version != VERSION {
        return Err(CliError::Validation(format!(
            "expected format {SHEAR_FORMAT} version {VERSION}, found {} version {}",
            header.format, header.version
        )));
    }
    if header.model != "halfplane" {
        return Err(CliError::Validation(format!("unsupported model {:?}", header.model)));
    }
    let prec = precision.unwrap_or(header.precision);
    let default = Scalar::parse(&header.default, prec)
        .map_err(|e| CliError::Validation(format!("default value: {e}")))?;
    let mut table = BTreeMap::new();
    for raw in &header.records {
        let line = line_of(input, raw);
        let rec: ShearRecord =
            serde_json::from_str(raw.get()).map_err(|e| CliError::Validation(format!("line {line}: {e}")))?;
        let bad_edge = || CliError::Validation(format!("line {line}: non-unimodular/unreduced edge {}", raw.get()));
        let a = parse_vertex(&rec.edge[0]).ok_or_else(bad_edge)?;
        let b = parse_vertex(&rec.edge[1]).ok_or_else(bad_edge)?;
        let e = Edge::new(a, b).map_err(|_| bad_edge())?;
        let s = Scalar::parse(&rec.s, prec).map_err(|err| CliError::Validation(format!("line {line}: {err}")))?;
        if table.insert(e.clone(), s).is_some() {
            return Err(CliError::Validation(format!("line {line}: duplicate edge {e}")));
        }
    }
    Ok(ShearFunction::from_table(table).with_default(default).with_precision(prec))
}

/// Serializes the table and default of `s` (rules are not representable).
pub fn write_shears(s: &ShearFunction) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"format\": {},", quote(SHEAR_FORMAT));
    let _ = writeln!(out, "  \"version\": {VERSION},");
    let _ = writeln!(out, "  \"default\": {},", quote(&s.default_value().to_string()));
    out.push_str("  \"model\": \"halfplane\",\n");
    let _ = writeln!(out, "  \"precision\": {},", s.precision());
    write_records(
        &mut out,
        s.table()
            .iter()
            .map(|(e, v)| format!("{{\"edge\": {}, \"s\": {}}}", edge_json(e), quote(&v.to_string()))),
    );
    out.push_str("}\n");
    out
}

fn write_records(out: &mut String, records: impl Iterator<Item = String>) {
    let records: Vec<String> = records.collect();
    if records.is_empty() {
        out.push_str("  \"records\": []\n");
        return;
    }
    out.push_str("  \"records\": [\n");
    let n = records.len();
    for (i, r) in records.into_iter().enumerate() {
        out.push_str("    ");
        out.push_str(&r);
        out.push_str(if i + 1 < n { ",\n" } else { "\n" });
    }
    out.push_str("  ]\n");
}

#[derive(Deserialize)]
struct MapHeader<'a> {
    format: String,
    version: u32,
    depth: u32,
    precision: usize,
    fixed: Vec<[Number; 2]>,
    #[serde(borrow)]
    records: Vec<&'a RawValue>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapRecord {
    vertex: [Number; 2],
    image: String,
}

pub fn read_vertex_map(input: &str) -> Result<DevelopedMap, CliError> {
    let header: MapHeader =
        serde_json::from_str(input).map_err(|e| CliError::Validation(format!("malformed vertex map: {e}")))?;
    if header.format != MAP_FORMAT || header.version != VERSION {
        return Err(CliError::Validation(format!(
            "expected format {MAP_FORMAT} version {VERSION}, found {} version {}",
            header.format, header.version
        )));
    }
    let fixed: Option<Vec<FareyVertex>> = header.fixed.iter().map(parse_vertex).collect();
    if fixed.as_deref() != Some(&DevelopedMap::fixed_points()[..]) {
        return Err(CliError::Validation("fixed points must be [[0,1],[1,1],[1,0]]".into()));
    }
    let prec = header.precision;
    let mut images = Vec::with_capacity(header.records.len());
    let mut seen = std::collections::HashSet::new();
    for raw in &header.records {
        let line = line_of(input, raw);
        let rec: MapRecord =
            serde_json::from_str(raw.get()).map_err(|e| CliError::Validation(format!("line {line}: {e}")))?;
        let v = parse_vertex(&rec.vertex)
            .ok_or_else(|| CliError::Validation(format!("line {line}: unreduced vertex {}", raw.get())))?;
        let x = if rec.image == "inf" {
            BoundaryPoint::Infinity
        } else {
            BoundaryPoint::Finite(
                Scalar::parse(&rec.image, prec).map_err(|e| CliError::Validation(format!("line {line}: {e}")))?,
            )
        };
        if !seen.insert(v.clone()) {
            return Err(CliError::Validation(format!("line {line}: duplicate vertex {v}")));
        }
        images.push((v, x));
    }
    for f in DevelopedMap::fixed_points() {
        let ok = images
            .iter()
            .any(|(v, x)| v == &f && x.line_cmp(&f.to_boundary_point()).is_eq());
        if !ok {
            return Err(CliError::Validation(format!("vertex {f} must map to itself")));
        }
    }
    Ok(DevelopedMap::from_images(header.depth, prec, images))
}

pub fn write_vertex_map(dm: &DevelopedMap) -> String {
    let mut recs: Vec<(&FareyVertex, &BoundaryPoint)> = dm.sorted();
    recs.sort_by(|a, b| a.0.file_cmp(b.0));
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"format\": {},", quote(MAP_FORMAT));
    let _ = writeln!(out, "  \"version\": {VERSION},");
    let _ = writeln!(out, "  \"depth\": {},", dm.depth());
    let _ = writeln!(out, "  \"precision\": {},", dm.precision());
    out.push_str("  \"fixed\": [[0, 1], [1, 1], [1, 0]],\n");
    write_records(
        &mut out,
        recs.into_iter()
            .map(|(v, x)| format!("{{\"vertex\": {}, \"image\": {}}}", vertex_json(v), quote(&x.to_string()))),
    );
    out.push_str("}\n");
    out
}
