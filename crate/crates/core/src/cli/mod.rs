//! The `farey-shear` command line.

pub mod format;
pub mod render;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::farey::tessellation_to_depth;
use crate::geom::BoundaryPoint;
use crate::num::DEFAULT_PRECISION;
use crate::qsdiag::{degeneration_scan, estimate_qs_constant, SampleMethod, SamplerConfig, Thresholds};
use crate::shear::{check_condition, develop, shear_from_map, DevelopedMap, ShearFunction};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "farey-shear", version, about = "Shear coordinates on the Farey tessellation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TessFormat {
    Json,
    Svg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Model {
    Disk,
    Halfplane,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Method {
    SymmetricTriples,
    MobiusQuadruples,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the tessellation to a given depth.
    Tessellate {
        #[arg(long)]
        depth: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: TessFormat,
        #[arg(long)]
        out: PathBuf,
    },
    /// Develop a shear file into a vertex map.
    Develop {
        #[arg(long)]
        shears: PathBuf,
        #[arg(long)]
        depth: u32,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract the shears of a vertex map on every edge within depth - 1.
    ShearOf {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        depth: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the fan-sum condition.
    Check {
        #[arg(long)]
        shears: PathBuf,
        #[arg(long)]
        depth: u32,
        #[arg(long)]
        window: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample the cross-ratio distortion of the developed map.
    EstimateM {
        #[arg(long)]
        shears: PathBuf,
        #[arg(long)]
        depth: u32,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value = "mobius-quadruples")]
        method: Method,
        #[arg(long)]
        out: PathBuf,
    },
    /// Scan for arc summability and shear blow-up.
    Scan {
        #[arg(long)]
        shears: PathBuf,
        #[arg(long)]
        depth: u32,
        #[arg(long)]
        window: u32,
        #[arg(long, default_value_t = 10.0)]
        blowup: f64,
        #[arg(long, default_value_t = 1e3)]
        head_tail: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw the image tessellation of a vertex map.
    Render {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, value_enum, default_value = "disk")]
        model: Model,
        /// Must equal the depth recorded in the map file when given.
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn q(s: &str) -> String {
    serde_json::to_string(s).expect("string serializes")
}

/// Image geodesics of all tessellation edges within the map's depth.
fn image_edges(dm: &DevelopedMap) -> Result<Vec<(BoundaryPoint, BoundaryPoint)>, CliError> {
    let tess = tessellation_to_depth(dm.depth())?;
    tess.edges()
        .iter()
        .map(|e| {
            let get = |v| {
                dm.get(v)
                    .cloned()
                    .ok_or_else(|| CliError::Validation(format!("vertex map has no image for {v}")))
            };
            Ok((get(e.a())?, get(e.b())?))
        })
        .collect()
}

fn tessellate(depth: u32, fmt: TessFormat) -> Result<String, CliError> {
    let tess = tessellation_to_depth(depth)?;
    let edges = tess.edges();
    Ok(match fmt {
        TessFormat::Svg => {
            let pairs: Vec<_> = edges
                .iter()
                .map(|e| (e.a().to_boundary_point(), e.b().to_boundary_point()))
                .collect();
            render::render_disk(&pairs)
        }
        TessFormat::Json => {
            let mut out = String::from("{\n");
            out.push_str("  \"format\": \"farey-shear/tessellation\",\n");
            out.push_str("  \"version\": 1,\n");
            let _ = writeln!(out, "  \"depth\": {depth},");
            let _ = writeln!(out, "  \"triangles\": {},", tess.len());
            out.push_str("  \"edges\": [\n");
            for (i, e) in edges.iter().enumerate() {
                let sep = if i + 1 < edges.len() { "," } else { "" };
                let _ = writeln!(out, "    {}{sep}", format::edge_json(e));
            }
            out.push_str("  ]\n}\n");
            out
        }
    })
}

fn shear_of(dm: &DevelopedMap, depth: u32) -> Result<ShearFunction, CliError> {
    if depth == 0 {
        return Err(CliError::Validation("depth must be at least 1".into()));
    }
    if depth > dm.depth() {
        return Err(CliError::Validation(format!(
            "depth {depth} exceeds the map depth {}",
            dm.depth()
        )));
    }
    let tess = tessellation_to_depth(depth - 1)?;
    let mut s = ShearFunction::zero().with_precision(dm.precision());
    for e in tess.edges() {
        let v = shear_from_map(dm, &e, dm.precision())?;
        s.insert(e, v);
    }
    Ok(s)
}

fn check(s: &ShearFunction, depth: u32, window: u32) -> Result<String, CliError> {
    let r = check_condition(s, depth, window)?;
    let w = r.witness_fan();
    let mut out = String::from("{\n");
    out.push_str("  \"format\": \"farey-shear/condition\",\n");
    out.push_str("  \"version\": 1,\n");
    let _ = writeln!(out, "  \"depth\": {},", r.depth);
    let _ = writeln!(out, "  \"window\": {},", r.window);
    let _ = writeln!(out, "  \"span\": {},", r.span);
    let _ = writeln!(out, "  \"fans\": {},", r.fans.len());
    let _ = writeln!(out, "  \"pairs\": {},", r.pairs);
    let _ = writeln!(out, "  \"M\": {},", q(&r.m.to_string()));
    let _ = writeln!(
        out,
        "  \"witness\": {{\"tip\": {}, \"m\": {}, \"k\": {}, \"ratio\": {}}},",
        format::vertex_json(&w.tip),
        w.m,
        w.k,
        q(&w.ratio.to_string())
    );
    out.push_str("  \"truncated\": true,\n");
    out.push_str(
        "  \"disclaimer\": \"M is a lower bound taken over the examined fans and windows only; larger depth or window can only increase it\"\n",
    );
    out.push_str("}\n");
    Ok(out)
}

fn estimate(s: &ShearFunction, depth: u32, samples: usize, seed: u64, method: Method) -> Result<String, CliError> {
    let dm = develop(s, depth)?;
    let method = match method {
        Method::SymmetricTriples => SampleMethod::SymmetricTriples,
        Method::MobiusQuadruples => SampleMethod::MobiusQuadruples,
    };
    let est = estimate_qs_constant(&dm, &SamplerConfig { seed, samples, method })?;
    let quad: Vec<String> = est.witness.iter().map(format::vertex_json).collect();
    let mut out = String::from("{\n");
    out.push_str("  \"format\": \"farey-shear/qs-estimate\",\n");
    out.push_str("  \"version\": 1,\n");
    let _ = writeln!(out, "  \"depth\": {depth},");
    let _ = writeln!(out, "  \"samples\": {},", est.samples);
    let _ = writeln!(out, "  \"seed\": {seed},");
    let _ = writeln!(out, "  \"method\": {},", q(&est.method.to_string()));
    let _ = writeln!(out, "  \"M_observed\": {},", q(&est.m_observed.to_string()));
    let _ = writeln!(
        out,
        "  \"witness\": {{\"quadruple\": [{}], \"cross_ratio\": {}}}",
        quad.join(", "),
        q(&est.witness_cross_ratio.to_string())
    );
    out.push_str("}\n");
    Ok(out)
}

fn scan(s: &ShearFunction, depth: u32, window: u32, th: Thresholds) -> Result<String, CliError> {
    let r = degeneration_scan(s, depth, window, &th)?;
    let mut out = String::from("{\n");
    out.push_str("  \"format\": \"farey-shear/degeneration\",\n");
    out.push_str("  \"version\": 1,\n");
    let _ = writeln!(out, "  \"depth\": {},", r.depth);
    let _ = writeln!(out, "  \"window\": {},", r.window);
    let _ = writeln!(out, "  \"mode\": {},", q(&r.mode.to_string()));
    let _ = writeln!(
        out,
        "  \"arc_summability\": {{\"statistic\": {}, \"tip\": {}, \"m\": {}, \"k\": {}, \"head\": {}, \"tail\": {}}},",
        q(&r.head_tail.to_string()),
        format::vertex_json(&r.head_tail_tip),
        r.head_tail_split.0,
        r.head_tail_split.1,
        q(&r.head_sum.to_string()),
        q(&r.tail_sum.to_string())
    );
    let edge = r
        .max_shear_edge
        .as_ref()
        .map_or_else(|| "null".to_string(), format::edge_json);
    let _ = writeln!(
        out,
        "  \"shear_blowup\": {{\"max_abs_shear\": {}, \"edge\": {edge}, \"flagged\": {}}},",
        q(&r.max_abs_shear.to_string()),
        r.blowup_flagged
    );
    let _ = writeln!(out, "  \"thresholds\": {{\"blowup\": {}, \"head_tail\": {}}}", th.blowup, th.head_tail);
    out.push_str("}\n");
    Ok(out)
}

/// Runs one command, writing its artifact.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Tessellate { depth, format, out } => write(&out, &tessellate(depth, format)?),
        Command::Develop {
            shears,
            depth,
            precision,
            out,
        } => {
            if precision < 2 {
                return Err(CliError::Validation("precision must be at least 2 bits".into()));
            }
            let s = format::read_shears(&read(&shears)?, Some(precision))?;
            let dm = develop(&s, depth)?;
            write(&out, &format::write_vertex_map(&dm))
        }
        Command::ShearOf { map, depth, out } => {
            let dm = format::read_vertex_map(&read(&map)?)?;
            let s = shear_of(&dm, depth)?;
            write(&out, &format::write_shears(&s))
        }
        Command::Check {
            shears,
            depth,
            window,
            out,
        } => {
            let s = format::read_shears(&read(&shears)?, None)?;
            write(&out, &check(&s, depth, window)?)
        }
        Command::EstimateM {
            shears,
            depth,
            samples,
            seed,
            method,
            out,
        } => {
            let s = format::read_shears(&read(&shears)?, None)?;
            write(&out, &estimate(&s, depth, samples, seed, method)?)
        }
        Command::Scan {
            shears,
            depth,
            window,
            blowup,
            head_tail,
            out,
        } => {
            let s = format::read_shears(&read(&shears)?, None)?;
            write(&out, &scan(&s, depth, window, Thresholds { blowup, head_tail })?)
        }
        Command::Render { map, model, depth, out } => {
            let dm = format::read_vertex_map(&read(&map)?)?;
            if let Some(d) = depth {
                if d != dm.depth() {
                    return Err(CliError::Validation(format!(
                        "--depth {d} does not match the map depth {}",
                        dm.depth()
                    )));
                }
            }
            dm.check_order()?;
            let edges = image_edges(&dm)?;
            let svg = match model {
                Model::Disk => render::render_disk(&edges),
                Model::Halfplane => render::render_halfplane(&edges),
            };
            write(&out, &svg)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_zero_tessellation_json() {
        let j = tessellate(0, TessFormat::Json).unwrap();
        assert!(j.contains("[[0, 1], [1, 1]],\n    [[0, 1], [1, 0]],\n    [[1, 1], [1, 0]]\n"));
    }

    #[test]
    fn svg_arc_count() {
        let svg = tessellate(3, TessFormat::Svg).unwrap();
        let edges = tessellation_to_depth(3).unwrap().edges().len();
        assert_eq!(svg.matches("<path").count(), edges);
    }
}
