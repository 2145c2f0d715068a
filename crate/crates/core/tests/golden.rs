//! Command-line behaviour: examples per command, exit codes, determinism and
//! an independent recomputation of the committed `check` golden.

mod common;

use std::collections::HashMap;
use std::path::Path;
use std::process::Command;

use common::*;
use farey_shear::farey::{tessellation_to_depth, Fan};
use farey_shear::num::Real;
use farey_shear::Scalar;
use serde_json::Value;

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

/// `(p₁, q₁), (p₂, q₂), s`
type Record<'a> = ((i64, i64), (i64, i64), &'a str);

fn shear_file(records: &[Record]) -> String {
    let body: Vec<String> = records
        .iter()
        .map(|((p1, q1), (p2, q2), s)| format!("    {{\"edge\": [[{p1}, {q1}], [{p2}, {q2}]], \"s\": \"{s}\"}}"))
        .collect();
    format!(
        "{{\n  \"format\": \"farey-shear/shears\",\n  \"version\": 1,\n  \"default\": \"0\",\n  \"model\": \"halfplane\",\n  \"precision\": 128,\n  \"records\": [\n{}\n  ]\n}}\n",
        body.join(",\n")
    )
}

fn number(v: &Value) -> f64 {
    let s = v.as_str().expect("decimal string");
    Scalar::parse(s, 128).unwrap().to_f64()
}

#[test]
fn tessellate_depth_zero_lists_the_base_edges() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    run_ok(&["tessellate", "--depth", "0", "--out", path_str(&out)]);
    let v = read_json(&out);
    let edges = v["edges"].as_array().unwrap();
    assert_eq!(edges.len(), 3);
    let text: Vec<String> = edges.iter().map(|e| e.to_string()).collect();
    assert_eq!(text, ["[[0,1],[1,1]]", "[[0,1],[1,0]]", "[[1,1],[1,0]]"]);
}

#[test]
fn tessellate_counts() {
    let v = read_json(&golden_dir().join("tessellate_d2.json"));
    assert_eq!(v["triangles"], 1 + 3 * 3);
    // each triangle after the first adds two edges
    assert_eq!(v["edges"].as_array().unwrap().len(), 3 + 2 * 9);
    let svg = std::fs::read_to_string(golden_dir().join("tessellate_d3.svg")).unwrap();
    let tess = tessellation_to_depth(3).unwrap();
    assert_eq!(svg.matches("<path").count(), tess.edges().len());
    assert_eq!(svg.matches("<path").count(), 3 + 2 * 21);
}

#[test]
fn develop_zero_file_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let shears = dir.path().join("zero.json");
    std::fs::write(&shears, shear_file(&[])).unwrap();
    let out = dir.path().join("map.json");
    run_ok(&["develop", "--shears", path_str(&shears), "--depth", "3", "--out", path_str(&out)]);
    let v = read_json(&out);
    for r in v["records"].as_array().unwrap() {
        let (p, q) = (r["vertex"][0].as_i64().unwrap(), r["vertex"][1].as_i64().unwrap());
        let want = if q == 0 { "inf".to_string() } else if q == 1 { p.to_string() } else { format!("{p}/{q}") };
        assert_eq!(r["image"].as_str().unwrap(), want);
    }
}

#[test]
fn develop_single_entry_gives_e_plus_one() {
    // e + 1 to 70 significant digits
    let e_plus_one = "3.718281828459045235360287471352662497757247093699959574966967627724077";
    let v = read_json(&golden_dir().join("develop_single_fan.json"));
    assert_eq!(v["precision"], 192);
    let rec = v["records"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["vertex"] == serde_json::json!([2, 1]))
        .unwrap();
    let got = Real::parse(rec["image"].as_str().unwrap(), 256).unwrap();
    let want = Real::parse(e_plus_one, 256).unwrap();
    let err = got.sub(&want).abs().to_f64();
    assert!(err < 1e-55, "image of 2 off by {err:e}");
}

#[test]
fn malformed_edge_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("map.json");
    let res = run(&["develop", "--shears", path_str(&data("bad_edge.json")), "--depth", "2", "--out", path_str(&out)]);
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("non-unimodular/unreduced edge") && err.contains("line 9"), "{err}");
    assert!(!out.exists());
}

#[test]
fn shear_of_identity_is_all_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (shears, map, back) = (dir.path().join("z.json"), dir.path().join("m.json"), dir.path().join("b.json"));
    std::fs::write(&shears, shear_file(&[])).unwrap();
    run_ok(&["develop", "--shears", path_str(&shears), "--depth", "3", "--out", path_str(&map)]);
    run_ok(&["shear-of", "--map", path_str(&map), "--depth", "3", "--out", path_str(&back)]);
    let v = read_json(&back);
    let recs = v["records"].as_array().unwrap();
    let edges_d2 = tessellation_to_depth(2).unwrap().edges().len();
    assert_eq!(recs.len(), edges_d2);
    assert!(recs.iter().all(|r| r["s"] == "0"));
}

#[test]
fn develop_shear_of_develop_is_a_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    let sample = data("sample_shears.json");
    run_ok(&["develop", "--shears", path_str(&sample), "--depth", "5", "--out", path_str(&p("m1.json"))]);
    run_ok(&["shear-of", "--map", path_str(&p("m1.json")), "--depth", "5", "--out", path_str(&p("s1.json"))]);
    run_ok(&["develop", "--shears", path_str(&p("s1.json")), "--depth", "5", "--out", path_str(&p("m2.json"))]);

    let input = read_json(&sample);
    let recovered = read_json(&p("s1.json"));
    let table: HashMap<String, f64> = recovered["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["edge"].to_string(), number(&r["s"])))
        .collect();
    let mut nonzero = 0;
    for r in input["records"].as_array().unwrap() {
        let got = table[&r["edge"].to_string()];
        assert!((got - number(&r["s"])).abs() < 1e-9);
    }
    for v in table.values() {
        if v.abs() > 1e-9 {
            nonzero += 1;
        }
    }
    assert_eq!(nonzero, input["records"].as_array().unwrap().len());

    let (a, b) = (read_json(&p("m1.json")), read_json(&p("m2.json")));
    let (ra, rb) = (a["records"].as_array().unwrap(), b["records"].as_array().unwrap());
    assert_eq!(ra.len(), rb.len());
    for (x, y) in ra.iter().zip(rb) {
        assert_eq!(x["vertex"], y["vertex"]);
        if x["image"] == "inf" {
            assert_eq!(y["image"], "inf");
            continue;
        }
        let (u, w) = (number(&x["image"]), number(&y["image"]));
        assert!((u - w).abs() <= 1e-9 * u.abs().max(1.0), "{} {u} {w}", x["vertex"]);
    }
}

#[test]
fn non_monotone_map_is_rejected() {
    let text = std::fs::read_to_string(data("sample_map.json")).unwrap();
    let map: Value = serde_json::from_str(&text).unwrap();
    let image_of = |p: i64| {
        map["records"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["vertex"] == serde_json::json!([p, 1]))
            .unwrap()["image"]
            .as_str()
            .unwrap()
            .to_string()
    };
    // swap the images of 2 and 3
    let (two, three) = (image_of(2), image_of(3));
    let swapped = text
        .replace(&format!("\"image\": \"{two}\""), "\"image\": \"@\"")
        .replace(&format!("\"image\": \"{three}\""), &format!("\"image\": \"{two}\""))
        .replace("\"image\": \"@\"", &format!("\"image\": \"{three}\""));
    let dir = tempfile::tempdir().unwrap();
    let (map_path, out) = (dir.path().join("bad.json"), dir.path().join("s.json"));
    std::fs::write(&map_path, swapped).unwrap();
    let res = run(&["shear-of", "--map", path_str(&map_path), "--depth", "4", "--out", path_str(&out)]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("order"));
}

#[test]
fn check_zero_and_constant_fan() {
    let dir = tempfile::tempdir().unwrap();
    let (zero, out) = (dir.path().join("z.json"), dir.path().join("c.json"));
    std::fs::write(&zero, shear_file(&[])).unwrap();
    run_ok(&["check", "--shears", path_str(&zero), "--depth", "3", "--window", "4", "--out", path_str(&out)]);
    assert_eq!(read_json(&out)["M"], "1");

    // c = 1/2 on every fan edge at ∞ that the window reaches
    let (d, k) = (2i64, 8i64);
    let span = d + k + 1;
    let records: Vec<Record> = (-span..=span).map(|n| ((n, 1), (1, 0), "1/2")).collect();
    let constant = dir.path().join("half.json");
    std::fs::write(&constant, shear_file(&records)).unwrap();
    run_ok(&["check", "--shears", path_str(&constant), "--depth", "2", "--window", "8", "--out", path_str(&out)]);
    let v = read_json(&out);
    assert!(number(&v["M"]) >= (4.5f64).exp() * (1.0 - 1e-12));
    assert_eq!(v["truncated"], true);
}

fn parse_value(s: &str) -> f64 {
    match s.split_once('/') {
        Some((n, d)) => n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap(),
        None => s.parse().unwrap(),
    }
}

/// Direct summation of every fan ratio over the same fans and windows.
fn direct_summation_m(shears: &Value, d: u32, k_max: i64) -> f64 {
    let table: HashMap<[[i64; 2]; 2], f64> = shears["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            let e: [[i64; 2]; 2] = serde_json::from_value(r["edge"].clone()).unwrap();
            (e, parse_value(r["s"].as_str().unwrap()))
        })
        .collect();
    let lookup = |e: [[i64; 2]; 2]| table.get(&e).or_else(|| table.get(&[e[1], e[0]])).copied().unwrap_or(0.0);
    let span = d as i64 + k_max + 1;
    let mut m_best = 1.0f64;
    for tip in tessellation_to_depth(d).unwrap().vertices() {
        let fan = Fan::at(&tip);
        let key = |n: i64| {
            let e = fan.edge(n);
            let v = |x: &farey_shear::FareyVertex| [x.p().try_into().unwrap(), x.q().try_into().unwrap()];
            [v(e.a()), v(e.b())]
        };
        let delta = |n: i64| -> f64 { (-span + 1..=n).map(|j| lookup(key(j))).sum::<f64>().exp() };
        for m in -span + 1..=span {
            for k in 0..=k_max {
                if m + k > span || m - 1 - k < -span {
                    break;
                }
                let num: f64 = (0..=k).map(|j| delta(m + j)).sum();
                let den: f64 = (0..=k).map(|j| delta(m - 1 - j)).sum();
                let r = num / den;
                m_best = m_best.max(r.max(1.0 / r));
            }
        }
    }
    m_best
}

#[test]
fn check_golden_matches_direct_summation() {
    let golden = read_json(&golden_dir().join("check_sample.json"));
    let oracle = direct_summation_m(&read_json(&data("sample_shears.json")), 4, 8);
    let got = number(&golden["M"]);
    assert!((got - oracle).abs() <= 1e-9 * oracle, "golden {got} vs oracle {oracle}");
}

#[test]
fn estimate_examples() {
    let dir = tempfile::tempdir().unwrap();
    let (zero, out) = (dir.path().join("z.json"), dir.path().join("e.json"));
    std::fs::write(&zero, shear_file(&[])).unwrap();
    run_ok(&["estimate-m", "--shears", path_str(&zero), "--depth", "4", "--samples", "300", "--seed", "9", "--out", path_str(&out)]);
    assert_eq!(read_json(&out)["M_observed"], "1");
    let v = read_json(&golden_dir().join("estimate_single_fan.json"));
    assert!(number(&v["M_observed"]) >= std::f64::consts::E * (1.0 - 1e-15));
    assert_eq!(v["witness"]["quadruple"].as_array().unwrap().len(), 4);
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("e{threads}.json"));
        let status = Command::new(bin())
            .env("RAYON_NUM_THREADS", threads)
            .args(["estimate-m", "--shears", path_str(&data("sample_shears.json")), "--depth", "5"])
            .args(["--samples", "400", "--seed", "11", "--out", path_str(&out)])
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn render_examples() {
    let dir = tempfile::tempdir().unwrap();
    let (zero, map, svg) = (dir.path().join("z.json"), dir.path().join("m.json"), dir.path().join("r.svg"));
    std::fs::write(&zero, shear_file(&[])).unwrap();
    run_ok(&["develop", "--shears", path_str(&zero), "--depth", "3", "--out", path_str(&map)]);
    run_ok(&["render", "--map", path_str(&map), "--model", "disk", "--out", path_str(&svg)]);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<path").count(), tessellation_to_depth(3).unwrap().edges().len());
    let tess = std::fs::read_to_string(golden_dir().join("tessellate_d3.svg")).unwrap();
    assert_eq!(text, tess);

    let missing = dir.path().join("never.svg");
    let res = run(&["render", "--map", path_str(&map), "--depth", "5", "--out", path_str(&missing)]);
    assert_eq!(res.status.code(), Some(2));
    assert!(!missing.exists());
}

#[test]
fn scan_flags_the_decay_fan() {
    let v = read_json(&golden_dir().join("scan_decay.json"));
    assert_eq!(v["mode"], "arc-summability");
    assert!(number(&v["arc_summability"]["statistic"]) >= (16.0f64).exp());
    assert_eq!(v["shear_blowup"]["flagged"], false);
}
