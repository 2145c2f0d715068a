#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use farey_shear::farey::{tessellation_to_depth, Edge, FareyVertex};
use farey_shear::shear::ShearFunction;
use farey_shear::Scalar;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const PREC: usize = 128;

/// Up to `max_edges` distinct edges of the depth-`d` tessellation with
/// values uniform in `[-amp, amp]`.
pub fn random_table(rng: &mut ChaCha8Rng, d: u32, max_edges: usize, amp: f64) -> ShearFunction {
    let edges = tessellation_to_depth(d).unwrap().edges();
    let n = rng.gen_range(1..=max_edges);
    let chosen: Vec<&Edge> = edges.choose_multiple(rng, n).collect();
    ShearFunction::from_table(
        chosen
            .into_iter()
            .map(|e| (e.clone(), Scalar::approx(rng.gen_range(-amp..=amp), PREC))),
    )
}

/// A shear function supported on the verticals `(n, ∞)`, `|n| ≤ support`.
pub fn random_fan(rng: &mut ChaCha8Rng, support: i64, amp: f64) -> ShearFunction {
    let mut s = ShearFunction::zero();
    for n in -support..=support {
        if rng.gen_bool(0.5) {
            s.insert(Edge::vertical(n), Scalar::approx(rng.gen_range(-amp..=amp), PREC));
        }
    }
    if s.table().is_empty() {
        s.insert(Edge::vertical(0), Scalar::approx(rng.gen_range(-amp..=amp), PREC));
    }
    s
}

pub fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn vertex(p: i64, q: i64) -> FareyVertex {
    FareyVertex::new(p, q).unwrap()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_farey-shear")
}

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn data(name: &str) -> PathBuf {
    manifest_dir().join("tests").join("data").join(name)
}

pub fn golden_dir() -> PathBuf {
    manifest_dir().join("tests").join("golden")
}

pub fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

pub fn run_ok(args: &[&str]) {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Commands whose outputs are pinned by files in `tests/golden`; `{out}` is
/// replaced by the output path and `@name` by a file in `tests/data`.
pub const GOLDEN_CASES: &[(&str, &[&str])] = &[
    ("tessellate_d2.json", &["tessellate", "--depth", "2", "--format", "json", "--out", "{out}"]),
    ("tessellate_d3.svg", &["tessellate", "--depth", "3", "--format", "svg", "--out", "{out}"]),
    ("develop_sample.json", &["develop", "--shears", "@sample_shears.json", "--depth", "4", "--out", "{out}"]),
    ("develop_single_fan.json", &["develop", "--shears", "@single_fan.json", "--depth", "3", "--precision", "192", "--out", "{out}"]),
    ("shear_of_sample.json", &["shear-of", "--map", "@sample_map.json", "--depth", "4", "--out", "{out}"]),
    ("check_sample.json", &["check", "--shears", "@sample_shears.json", "--depth", "4", "--window", "8", "--out", "{out}"]),
    ("estimate_single_fan.json", &["estimate-m", "--shears", "@single_fan.json", "--depth", "5", "--samples", "500", "--seed", "42", "--out", "{out}"]),
    ("scan_decay.json", &["scan", "--shears", "@decay_fan.json", "--depth", "3", "--window", "32", "--out", "{out}"]),
    ("render_disk.svg", &["render", "--map", "@sample_map.json", "--model", "disk", "--out", "{out}"]),
    ("render_halfplane.svg", &["render", "--map", "@sample_map.json", "--model", "halfplane", "--depth", "4", "--out", "{out}"]),
];

/// Runs one golden case, writing into `dir`, and returns the output bytes.
pub fn produce(name: &str, args: &[&str], dir: &Path) -> Vec<u8> {
    let out = dir.join(name);
    let args: Vec<String> = args
        .iter()
        .map(|a| {
            if *a == "{out}" {
                path_str(&out).to_string()
            } else if let Some(file) = a.strip_prefix('@') {
                path_str(&data(file)).to_string()
            } else {
                a.to_string()
            }
        })
        .collect();
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    run_ok(&refs);
    std::fs::read(&out).expect("output written")
}
