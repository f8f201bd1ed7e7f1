//! Drives the binary end to end: exit codes, file formats, and the
//! benchmark-instance export counts.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use uc_core::formulation::{Bus, GeneratorUnit, InitialState, UcInstance};
use uc_core::instances;

fn uc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("uc-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_instance(inst: &UcInstance, dir: &Path, name: &str) -> PathBuf {
    let path = dir.join(name);
    instances::write_instance(inst, &path).unwrap();
    path
}

fn toy_instance() -> UcInstance {
    let (p6, c6) = instances::generator_type(6).unwrap();
    let (p8, c8) = instances::generator_type(8).unwrap();
    UcInstance {
        horizon: 6,
        reserve: vec![0.03; 6],
        buses: vec![Bus {
            id: "b1".into(),
            load: vec![60.0, 70.0, 80.0, 75.0, 65.0, 60.0],
        }],
        lines: Vec::new(),
        generators: vec![
            GeneratorUnit {
                bus: "b1".into(),
                params: p6,
                costs: c6,
                initial: InitialState::on(&p6, 45.0),
            },
            GeneratorUnit {
                bus: "b1".into(),
                params: p8,
                costs: c8,
                initial: InitialState::on(&p8, 25.0),
            },
        ],
    }
}

#[test]
fn validate_exit_codes() {
    let dir = workdir("validate");
    let good = write_instance(&toy_instance(), &dir, "good.json");
    let out = uc(&["validate", good.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let mut bad_inst = toy_instance();
    bad_inst.generators[0].params.start_ramp = bad_inst.generators[0].params.cap_min - 1.0;
    bad_inst.generators[0].initial = InitialState::off(&bad_inst.generators[0].params);
    let bad = write_instance(&bad_inst, &dir, "bad.json");
    let out = uc(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("generator 1"), "stdout: {text}");

    let out = uc(&["validate", dir.join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn separate_reports_the_crafted_cut() {
    let dir = workdir("separate");
    let mut inst = toy_instance();
    inst.horizon = 3;
    inst.reserve = vec![0.0; 3];
    inst.buses[0].load = vec![0.0; 3];
    inst.generators.truncate(1);
    inst.generators[0].params = uc_core::types::GeneratorParams {
        cap_max: 80.0,
        cap_min: 8.0,
        min_up: 2,
        min_down: 2,
        ramp: 10.0,
        start_ramp: 15.0,
    };
    inst.generators[0].initial = InitialState::off(&inst.generators[0].params);
    let inst_path = write_instance(&inst, &dir, "inst.json");
    let points = dir.join("points.json");
    std::fs::write(
        &points,
        r#"[{"x": [0.0, 80.0, 80.0], "y": [0.0, 1.0, 1.0]}]"#,
    )
    .unwrap();
    let out = uc(&[
        "separate",
        inst_path.to_str().unwrap(),
        points.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cuts: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let arr = cuts.as_array().unwrap();
    assert!(!arr.is_empty());
    let best = arr
        .iter()
        .max_by(|a, b| {
            a["violation"]
                .as_f64()
                .unwrap()
                .partial_cmp(&b["violation"].as_f64().unwrap())
                .unwrap()
        })
        .unwrap();
    assert!((best["violation"].as_f64().unwrap() - 65.0).abs() < 1e-9);
    assert_eq!(best["t"].as_u64().unwrap(), 2);

    // An integer feasible point yields an empty listing.
    std::fs::write(
        &points,
        r#"[{"x": [0.0, 15.0, 25.0], "y": [0.0, 1.0, 1.0]}]"#,
    )
    .unwrap();
    let out = uc(&[
        "separate",
        inst_path.to_str().unwrap(),
        points.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let cuts: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(cuts.as_array().unwrap().is_empty());

    // A tolerance above the largest violation silences the listing too.
    std::fs::write(
        &points,
        r#"[{"x": [0.0, 80.0, 80.0], "y": [0.0, 1.0, 1.0]}]"#,
    )
    .unwrap();
    let out = uc(&[
        "separate",
        inst_path.to_str().unwrap(),
        points.to_str().unwrap(),
        "--tol",
        "1000",
    ]);
    assert!(out.status.success());
    let cuts: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(cuts.as_array().unwrap().is_empty());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn solve_matches_the_exact_oracle_and_orders_gaps() {
    let dir = workdir("solve");
    let inst = toy_instance();
    let path = write_instance(&inst, &dir, "toy.json");
    let report = dir.join("report.csv");
    let out = uc(&[
        "solve",
        path.to_str().unwrap(),
        "--segments",
        "2",
        "--rel-gap",
        "1e-9",
        "--report",
        report.to_str().unwrap(),
        "--name",
        "toy",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let z: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("best objective: "))
        .unwrap()
        .parse()
        .unwrap();
    let exact = uc_core::oracle::solve_tiny_exact(&inst, 2).unwrap();
    let z_exact = uc_core::oracle::rat_to_f64(&exact.objective);
    assert!((z - z_exact).abs() <= 1e-6 * z_exact.max(1.0), "{z} vs {z_exact}");

    // The CSV row recomputes its own reduction column.
    let csv = std::fs::read_to_string(&report).unwrap();
    let data = csv.lines().nth(1).unwrap();
    let cols: Vec<&str> = data.split(',').collect();
    assert_eq!(cols[0], "toy");
    let igap_without: f64 = cols[1].parse().unwrap();
    let igap_with: f64 = cols[2].parse().unwrap();
    assert!(igap_with <= igap_without + 1e-12);
    if !cols[3].is_empty() {
        let pct: f64 = cols[3].parse().unwrap();
        let recomputed = (igap_without - igap_with) / igap_without * 100.0;
        assert_eq!(pct, recomputed);
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn zero_demand_solves_to_zero() {
    let dir = workdir("zero");
    let mut inst = toy_instance();
    inst.buses[0].load = vec![0.0; 6];
    for g in &mut inst.generators {
        g.initial = InitialState::off(&g.params);
    }
    let path = write_instance(&inst, &dir, "zero.json");
    let out = uc(&["solve", path.to_str().unwrap(), "--segments", "2", "--cuts", "off"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("best objective: 0"), "stdout: {text}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn oracle_checks_pass_and_the_corrupted_control_fails() {
    let out = uc(&["oracle", "hull2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.matches("PASS").count(), 8);

    let out = Command::new(env!("CARGO_BIN_EXE_uc"))
        .args(["oracle", "hull2"])
        .env("UC_ORACLE_CORRUPT", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = uc(&["oracle", "validity", "--horizon", "4", "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = Command::new(env!("CARGO_BIN_EXE_uc"))
        .args(["oracle", "validity", "--horizon", "4", "--seed", "3"])
        .env("UC_ORACLE_CORRUPT", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = uc(&["oracle", "facets", "--horizon", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = uc(&["oracle", "separation", "--horizon", "5", "--seed", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

/// Minimal independent MPS reader: section walk with name collection.
struct ParsedMps {
    rows: usize,
    columns: usize,
    integers: usize,
    ranges: usize,
}

fn parse_mps(text: &str) -> ParsedMps {
    let mut section = String::new();
    let mut rows = 0usize;
    let mut columns: HashSet<String> = HashSet::new();
    let mut integers: HashSet<String> = HashSet::new();
    let mut ranges = 0usize;
    let mut in_integer = false;
    for line in text.lines() {
        let trimmed = line.trim_end();
        if trimmed.is_empty() {
            continue;
        }
        if !trimmed.starts_with(' ') {
            section = trimmed.split_whitespace().next().unwrap().to_string();
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match section.as_str() {
            "ROWS" => {
                if fields[0] != "N" {
                    rows += 1;
                }
            }
            "COLUMNS" => {
                if fields.len() >= 3 && fields[1] == "'MARKER'" {
                    in_integer = fields[2] == "'INTORG'";
                    continue;
                }
                columns.insert(fields[0].to_string());
                if in_integer {
                    integers.insert(fields[0].to_string());
                }
            }
            "RANGES" => ranges += 1,
            _ => {}
        }
    }
    ParsedMps {
        rows,
        columns: columns.len(),
        integers: integers.len(),
        ranges,
    }
}

#[test]
fn benchmark_export_counts_anchor_to_the_published_sizes() {
    let dir = workdir("mps");
    let inst = instances::experiment1_instance(1).unwrap();
    let path = write_instance(&inst, &dir, "bench1.json");
    let plain = dir.join("plain.mps");
    let out = uc(&[
        "export-mps",
        path.to_str().unwrap(),
        "--out",
        plain.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed = parse_mps(&std::fs::read_to_string(&plain).unwrap());
    assert_eq!(parsed.columns, 3360);
    assert_eq!(parsed.integers, 672);

    let strong = dir.join("strong.mps");
    let out = uc(&[
        "export-mps",
        path.to_str().unwrap(),
        "--strengthen",
        "--out",
        strong.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let parsed_strong = parse_mps(&std::fs::read_to_string(&strong).unwrap());
    assert_eq!(parsed_strong.rows - parsed.rows, 3864);
    assert_eq!(parsed_strong.columns, 3360);

    // Two-sided rows appear exactly once in RANGES; this model has none
    // (no lines), so the strengthened export must not add any either.
    assert_eq!(parsed.ranges, 0);
    assert_eq!(parsed_strong.ranges, 0);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn line_flow_rows_round_trip_through_ranges() {
    let dir = workdir("ranges");
    let inst = instances::random_instance(5, 4, 3, 2, 6, &[0.6, 0.7, 0.8, 0.75, 0.7, 0.6]).unwrap();
    let path = write_instance(&inst, &dir, "net.json");
    let out_path = dir.join("net.mps");
    let out = uc(&[
        "export-mps",
        path.to_str().unwrap(),
        "--segments",
        "2",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed = parse_mps(&std::fs::read_to_string(&out_path).unwrap());
    // One RANGES entry per two-sided line row that survived assembly
    // (rows implied by the variable bounds are dropped at build time).
    let model = uc_core::formulation::build_uc_model(&inst, 2).unwrap();
    let flow_rows = model
        .rows
        .iter()
        .filter(|r| matches!(r.tag, uc_core::formulation::RowTag::LineFlow))
        .count();
    assert!(flow_rows > 0);
    assert_eq!(parsed.ranges, flow_rows);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn usage_errors_exit_with_two() {
    let out = uc(&["warble"]);
    assert_eq!(out.status.code(), Some(2));
    let out = uc(&[]);
    assert_eq!(out.status.code(), Some(2));
    let out = uc(&["solve"]);
    assert_eq!(out.status.code(), Some(2));
}
