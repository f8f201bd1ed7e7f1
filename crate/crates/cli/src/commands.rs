//! Subcommand implementations and argument handling.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use uc_core::cuts::{admissible_params, build_cut, FamilyKind, ParamPolicy};
use uc_core::formulation::{build_uc_model, strengthen_two_period, MilpModel, UcInstance};
use uc_core::instances;
use uc_core::oracle::{self, Polytope, ValidityOracle};
use uc_core::separation::separate;
use uc_core::solver::{self, CutPolicy, SolveConfig, Termination};
use uc_core::types::{validate_generator, Direction, FractionalPoint, GeneratorParams};

use crate::mps::write_mps;
use crate::report::{RunRow, CSV_HEADER};

pub const USAGE: &str = "\
usage:
  uc validate <instance.json>
  uc separate <instance.json> <points.json> [--tol T] [--families LIST]
  uc solve <instance.json> [--cuts on|off] [--segments N] [--rel-gap G]
           [--node-limit N] [--time-limit SECS] [--seed-pool]
           [--families LIST] [--report out.csv] [--name NAME]
  uc oracle <hull2|validity|facets|separation> [--horizon T] [--seed S]
            [--instance path.json]
  uc export-mps <instance.json> [--strengthen] [--segments N] [--out path.mps]

families: comma list of
  single, single-split, eta, eta-split, shift, shift-split,
  two-var, two-var-start (default: all)";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Verification(String),
}

impl From<instances::InstanceError> for CliError {
    fn from(e: instances::InstanceError) -> Self {
        CliError::Io(e.to_string())
    }
}

struct Args {
    positional: Vec<String>,
    flags: BTreeMap<String, String>,
    switches: Vec<String>,
}

fn parse_args(args: &[String]) -> Result<Args, CliError> {
    let mut positional = Vec::new();
    let mut flags = BTreeMap::new();
    let mut switches = Vec::new();
    let mut i = 0;
    while i < args.len() {
        let a = &args[i];
        if let Some(name) = a.strip_prefix("--") {
            match name {
                "strengthen" | "seed-pool" => switches.push(name.to_string()),
                _ => {
                    let value = args
                        .get(i + 1)
                        .ok_or_else(|| CliError::Usage(format!("--{name} needs a value")))?;
                    flags.insert(name.to_string(), value.clone());
                    i += 1;
                }
            }
        } else {
            positional.push(a.clone());
        }
        i += 1;
    }
    Ok(Args {
        positional,
        flags,
        switches,
    })
}

impl Args {
    fn f64_flag(&self, name: &str, default: f64) -> Result<f64, CliError> {
        match self.flags.get(name) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::Usage(format!("--{name} expects a number, got {v}"))),
        }
    }

    fn usize_flag(&self, name: &str, default: usize) -> Result<usize, CliError> {
        match self.flags.get(name) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::Usage(format!("--{name} expects an integer, got {v}"))),
        }
    }
}

pub fn dispatch(args: &[String]) -> Result<(), CliError> {
    let Some(cmd) = args.first() else {
        return Err(CliError::Usage("missing subcommand".into()));
    };
    let rest = parse_args(&args[1..])?;
    match cmd.as_str() {
        "validate" => cmd_validate(&rest),
        "separate" => cmd_separate(&rest),
        "solve" => cmd_solve(&rest),
        "oracle" => cmd_oracle(&rest),
        "export-mps" => cmd_export_mps(&rest),
        other => Err(CliError::Usage(format!("unknown subcommand {other}"))),
    }
}

fn load_instance(path: &str) -> Result<UcInstance, CliError> {
    instances::read_instance(Path::new(path)).map_err(|e| CliError::Io(e.to_string()))
}

fn family_list(spec: Option<&String>) -> Result<Vec<FamilyKind>, CliError> {
    let Some(spec) = spec else {
        return Ok(FamilyKind::ALL.to_vec());
    };
    let mut kinds = Vec::new();
    for token in spec.split(',') {
        let kind = match token.trim() {
            "single" => FamilyKind::SingleVar,
            "single-split" => FamilyKind::SingleVarSplit,
            "eta" => FamilyKind::SingleVarEta,
            "eta-split" => FamilyKind::SingleVarEtaSplit,
            "shift" => FamilyKind::SingleVarEtaShift,
            "shift-split" => FamilyKind::SingleVarEtaShiftSplit,
            "two-var" => FamilyKind::TwoVar,
            "two-var-start" => FamilyKind::TwoVarStart,
            other => {
                return Err(CliError::Usage(format!("unknown family token {other}")));
            }
        };
        kinds.push(kind);
    }
    Ok(kinds)
}

fn cut_policy(kinds: &[FamilyKind]) -> CutPolicy {
    let mut separators = Vec::new();
    for &kind in kinds {
        for dir in [Direction::Backward, Direction::Forward] {
            separators.push((kind, dir));
        }
    }
    CutPolicy { separators }
}

fn cmd_validate(args: &Args) -> Result<(), CliError> {
    let [path] = &args.positional[..] else {
        return Err(CliError::Usage("validate needs an instance path".into()));
    };
    let inst = load_instance(path)?;
    let mut bad = 0;
    for (g, unit) in inst.generators.iter().enumerate() {
        let report = validate_generator(&unit.params);
        if report.is_valid() {
            continue;
        }
        bad += 1;
        for v in &report.violations {
            println!("generator {}: violates {}", g + 1, v);
        }
    }
    if bad == 0 {
        println!(
            "ok: {} generators, {} buses, {} lines, horizon {}",
            inst.generators.len(),
            inst.buses.len(),
            inst.lines.len(),
            inst.horizon
        );
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "{bad} generators violate the model assumptions"
        )))
    }
}

/// One generator's point in a point file.
#[derive(Debug, Serialize, Deserialize)]
struct PointEntry {
    x: Vec<f64>,
    y: Vec<f64>,
}

fn cmd_separate(args: &Args) -> Result<(), CliError> {
    let [inst_path, point_path] = &args.positional[..] else {
        return Err(CliError::Usage(
            "separate needs an instance path and a point path".into(),
        ));
    };
    let inst = load_instance(inst_path)?;
    let text = fs::read_to_string(point_path).map_err(|e| CliError::Io(e.to_string()))?;
    let entries: Vec<PointEntry> =
        serde_json::from_str(&text).map_err(|e| CliError::Io(format!("point file: {e}")))?;
    if entries.len() != inst.generators.len() {
        return Err(CliError::Usage(format!(
            "point file has {} generators, instance has {}",
            entries.len(),
            inst.generators.len()
        )));
    }
    let tol = args.f64_flag("tol", 1e-6)?;
    let kinds = family_list(args.flags.get("families"))?;
    let mut listed = 0;
    let mut out = Vec::new();
    for (g, (entry, unit)) in entries.iter().zip(&inst.generators).enumerate() {
        if entry.x.len() != inst.horizon || entry.y.len() != inst.horizon {
            return Err(CliError::Usage(format!(
                "generator {} point has horizon {} but the instance has {}",
                g + 1,
                entry.x.len(),
                inst.horizon
            )));
        }
        let pt = FractionalPoint::new(entry.x.clone(), entry.y.clone())
            .map_err(|e| CliError::Usage(e.to_string()))?;
        for &kind in &kinds {
            for dir in [Direction::Backward, Direction::Forward] {
                let Some(cand) = separate(kind, dir, &pt, &unit.params, tol) else {
                    continue;
                };
                listed += 1;
                out.push(serde_json::json!({
                    "generator": g + 1,
                    "family": format!("{:?}", cand.inequality.family),
                    "direction": format!("{:?}", cand.params.direction),
                    "t": cand.params.t,
                    "lags": cand.params.lags,
                    "eta": cand.params.eta,
                    "k": cand.params.k,
                    "m": cand.params.m,
                    "violation": cand.violation,
                    "x_coeffs": cand.inequality.x_coeffs,
                    "y_coeffs": cand.inequality.y_coeffs,
                    "rhs": cand.inequality.rhs,
                }));
            }
        }
    }
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    eprintln!("{listed} violated cuts");
    Ok(())
}

fn seed_pool(model: &mut MilpModel, inst: &UcInstance) -> usize {
    let mut added = 0;
    for (g, unit) in inst.generators.iter().enumerate() {
        for kind in FamilyKind::ALL {
            for dir in [Direction::Backward, Direction::Forward] {
                let Ok(params) =
                    admissible_params(kind, dir, &unit.params, inst.horizon, ParamPolicy::Seed)
                else {
                    continue;
                };
                for cp in params {
                    if let Ok(q) = build_cut(kind, &unit.params, inst.horizon, &cp) {
                        model.add_cut_row(g, &q);
                        added += 1;
                    }
                }
            }
        }
    }
    added
}

fn cmd_solve(args: &Args) -> Result<(), CliError> {
    let [path] = &args.positional[..] else {
        return Err(CliError::Usage("solve needs an instance path".into()));
    };
    let inst = load_instance(path)?;
    let cuts_on = match args.flags.get("cuts").map(String::as_str) {
        None | Some("on") => true,
        Some("off") => false,
        Some(other) => {
            return Err(CliError::Usage(format!("--cuts expects on|off, got {other}")));
        }
    };
    let segments = args.usize_flag("segments", 9)?;
    let kinds = family_list(args.flags.get("families"))?;
    let mut cfg = SolveConfig {
        rel_gap: args.f64_flag("rel-gap", 1e-4)?,
        violation_tol: args.f64_flag("tol", 1e-6)?,
        node_limit: args.usize_flag("node-limit", 100_000)?,
        ..SolveConfig::default()
    };
    if let Some(secs) = args.flags.get("time-limit") {
        let secs: f64 = secs
            .parse()
            .map_err(|_| CliError::Usage("--time-limit expects seconds".into()))?;
        cfg.time_limit = Some(Duration::from_secs_f64(secs));
    }
    let gens: Vec<GeneratorParams> = inst.generators.iter().map(|u| u.params).collect();
    let base = build_uc_model(&inst, segments).map_err(|e| CliError::Io(e.to_string()))?;
    let started = Instant::now();

    // Plain run: no strengthening, no separation.
    let plain_cfg = SolveConfig {
        cut_policy: CutPolicy::none(),
        ..cfg.clone()
    };
    let plain = solver::branch_and_cut(&base, &gens, &plain_cfg)
        .map_err(|e| CliError::Io(e.to_string()))?;
    if plain.termination == Termination::Infeasible {
        println!("instance is infeasible");
        return Err(CliError::Verification("infeasible instance".into()));
    }

    let mut row = RunRow {
        name: args
            .flags
            .get("name")
            .cloned()
            .unwrap_or_else(|| path.clone()),
        nodes_without: Some(plain.nodes),
        ..RunRow::default()
    };

    let mut best = plain.incumbent;
    let mut strong_report = None;
    if cuts_on {
        let mut strong = base.clone();
        let hull_rows =
            strengthen_two_period(&mut strong, &inst).map_err(|e| CliError::Io(e.to_string()))?;
        let mut seeded = 0;
        if args.switches.iter().any(|s| s == "seed-pool") {
            seeded = seed_pool(&mut strong, &inst);
        }
        let strong_cfg = SolveConfig {
            cut_policy: cut_policy(&kinds),
            ..cfg.clone()
        };
        let report = solver::branch_and_cut(&strong, &gens, &strong_cfg)
            .map_err(|e| CliError::Io(e.to_string()))?;
        eprintln!(
            "strengthened run: {hull_rows} hull rows, {seeded} seeded cuts, {} separated",
            report.cut_rows.len()
        );
        if let Some(z) = report.incumbent {
            if best.is_none_or(|b| z < b) {
                best = Some(z);
            }
        }
        strong_report = Some(report);
    }

    let z_star = best.ok_or_else(|| {
        CliError::Verification("no incumbent found within the limits".into())
    })?;
    if z_star != 0.0 {
        row.igap_without = plain
            .root_objective
            .map(|z_lp| solver::igap(z_star, z_lp).unwrap());
    }
    if let Some(report) = &strong_report {
        if z_star != 0.0 {
            row.igap_with = report
                .root_objective
                .map(|z_lp| solver::igap(z_star, z_lp).unwrap());
        }
        row.nodes_with = Some(report.nodes);
        row.cuts_added = Some(report.cut_rows.len());
        if let (Some(w), Some(with)) = (row.igap_without, row.igap_with) {
            if w > 0.0 {
                row.pct_reduction = Some(solver::pct_reduction(w, with).unwrap());
            }
        }
    }
    row.wall_time = started.elapsed().as_secs_f64();

    println!("best objective: {z_star}");
    if let Some(g) = row.igap_without {
        println!("igap without cuts: {g:.6}%");
    }
    if let Some(g) = row.igap_with {
        println!("igap with cuts: {g:.6}%");
    }
    if let Some(r) = row.pct_reduction {
        println!("gap reduction: {r:.2}%");
    }
    println!(
        "nodes: without {:?}, with {:?}",
        row.nodes_without, row.nodes_with
    );
    if let Some(report_path) = args.flags.get("report") {
        append_report(Path::new(report_path), &row)?;
    }
    println!("{}", CSV_HEADER);
    println!("{}", row.to_csv());
    Ok(())
}

fn append_report(path: &Path, row: &RunRow) -> Result<(), CliError> {
    let mut text = if path.exists() {
        fs::read_to_string(path).map_err(|e| CliError::Io(e.to_string()))?
    } else {
        format!("{CSV_HEADER}\n")
    };
    text.push_str(&row.to_csv());
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Io(e.to_string()))
}

fn corrupt_requested() -> bool {
    std::env::var("UC_ORACLE_CORRUPT").is_ok_and(|v| v == "1")
}

fn oracle_generators(args: &Args) -> Result<Vec<GeneratorParams>, CliError> {
    if let Some(path) = args.flags.get("instance") {
        let inst = load_instance(path)?;
        Ok(inst.generators.iter().map(|u| u.params).collect())
    } else {
        (1..=8)
            .map(|i| instances::generator_type(i).map(|(p, _)| p))
            .collect::<Result<_, _>>()
            .map_err(|e: instances::InstanceError| CliError::Io(e.to_string()))
    }
}

fn cmd_oracle(args: &Args) -> Result<(), CliError> {
    let [check] = &args.positional[..] else {
        return Err(CliError::Usage(
            "oracle needs a check: hull2 | validity | facets | separation".into(),
        ));
    };
    let seed = args.usize_flag("seed", 0)? as u64;
    let corrupt = corrupt_requested();
    let mut failures = 0usize;
    match check.as_str() {
        "hull2" => {
            for (i, p) in oracle_generators(args)?.iter().enumerate() {
                let mut rows = oracle::two_period_hull_rows(p);
                if corrupt {
                    rows[8].0[3] = &rows[8].0[3] - &oracle::rat(p.cap_max);
                }
                let report = oracle::check_hull_t2_system(p, &rows)
                    .map_err(|e| CliError::Io(e.to_string()))?;
                let ok = report.holds();
                println!(
                    "hull2 generator {}: {} ({} vertices)",
                    i + 1,
                    if ok { "PASS" } else { "FAIL" },
                    report.vertex_count
                );
                if !ok {
                    failures += 1;
                }
            }
        }
        "validity" => {
            let horizon = args.usize_flag("horizon", 5)?;
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            for case in 0..3 {
                let p = oracle::random_generator(&mut rng);
                let spec = Polytope::new(p, horizon).map_err(|e| CliError::Io(e.to_string()))?;
                let checker =
                    ValidityOracle::new(spec).map_err(|e| CliError::Io(e.to_string()))?;
                let mut checked = 0usize;
                let mut bad = 0usize;
                for kind in FamilyKind::ALL {
                    for dir in [Direction::Backward, Direction::Forward] {
                        let Ok(params) =
                            admissible_params(kind, dir, &p, horizon, ParamPolicy::Exhaustive {
                                max_params: 4000,
                            })
                        else {
                            continue;
                        };
                        for cp in params {
                            let Ok(mut q) = build_cut(kind, &p, horizon, &cp) else {
                                continue;
                            };
                            if corrupt && checked == 0 {
                                q.add_y(cp.t.min(horizon), p.cap_max);
                            }
                            checked += 1;
                            let report =
                                checker.check(&q).map_err(|e| CliError::Io(e.to_string()))?;
                            if !report.is_valid() {
                                bad += 1;
                            }
                        }
                    }
                }
                println!(
                    "validity case {case}: {} ({checked} cuts, {bad} invalid)",
                    if bad == 0 { "PASS" } else { "FAIL" }
                );
                failures += usize::from(bad > 0);
            }
        }
        "facets" => {
            let horizon = args.usize_flag("horizon", 4)?;
            let p = GeneratorParams {
                cap_max: 80.0,
                cap_min: 8.0,
                min_up: 2,
                min_down: 2,
                ramp: 10.0,
                start_ramp: 15.0,
            };
            let spec = Polytope::new(p, horizon).map_err(|e| CliError::Io(e.to_string()))?;
            let want = 2 * horizon as i64 - 1;
            let mut checked = 0usize;
            for kind in [FamilyKind::SingleVar, FamilyKind::TwoVar, FamilyKind::TwoVarStart] {
                let Ok(params) = admissible_params(
                    kind,
                    Direction::Backward,
                    &p,
                    horizon,
                    ParamPolicy::Seed,
                ) else {
                    continue;
                };
                for cp in params.iter().take(12) {
                    let Ok(mut q) = build_cut(kind, &p, horizon, cp) else {
                        continue;
                    };
                    if corrupt && checked == 0 {
                        let t = cp.t;
                        q.add_y(t, 1.0);
                    }
                    checked += 1;
                    match oracle::face_dimension(&q, &spec) {
                        Ok(dim) if dim == want => {}
                        other => {
                            println!("facet check {kind:?} {:?}: FAIL ({other:?})", cp);
                            failures += 1;
                        }
                    }
                }
            }
            println!(
                "facets: {} ({checked} configurations at dimension {want})",
                if failures == 0 { "PASS" } else { "FAIL" }
            );
        }
        "separation" => {
            let horizon = args.usize_flag("horizon", 5)?;
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let p = oracle::random_generator(&mut rng);
            let mut compared = 0usize;
            for _ in 0..40 {
                use rand::Rng;
                let x: Vec<f64> = (0..horizon).map(|_| rng.gen_range(0.0..p.cap_max)).collect();
                let y: Vec<f64> = (0..horizon).map(|_| rng.gen_range(0.0..=1.0)).collect();
                let pt = FractionalPoint::new(x, y).unwrap();
                for kind in FamilyKind::ALL {
                    for dir in [Direction::Backward, Direction::Forward] {
                        let fast = separate(kind, dir, &pt, &p, 1e-6);
                        let brute = oracle::brute_separate(&pt, kind, dir, &p, 1e-6, 2_000_000)
                            .map_err(|e| CliError::Io(e.to_string()))?;
                        compared += 1;
                        let mut fast_v = fast.map(|c| c.violation).unwrap_or(0.0);
                        if corrupt && compared == 1 {
                            fast_v += 1.0;
                        }
                        let brute_v = brute.map(|c| c.violation).unwrap_or(0.0);
                        if (fast_v - brute_v).abs() > 1e-9 {
                            failures += 1;
                        }
                    }
                }
            }
            println!(
                "separation: {} ({compared} paired searches)",
                if failures == 0 { "PASS" } else { "FAIL" }
            );
        }
        other => {
            return Err(CliError::Usage(format!("unknown oracle check {other}")));
        }
    }
    if failures > 0 {
        Err(CliError::Verification(format!("{failures} checks failed")))
    } else {
        Ok(())
    }
}

fn cmd_export_mps(args: &Args) -> Result<(), CliError> {
    let [path] = &args.positional[..] else {
        return Err(CliError::Usage("export-mps needs an instance path".into()));
    };
    let inst = load_instance(path)?;
    let segments = args.usize_flag("segments", 9)?;
    let mut model = build_uc_model(&inst, segments).map_err(|e| CliError::Io(e.to_string()))?;
    if args.switches.iter().any(|s| s == "strengthen") {
        let added =
            strengthen_two_period(&mut model, &inst).map_err(|e| CliError::Io(e.to_string()))?;
        eprintln!("strengthened with {added} rows");
    }
    let stem = Path::new(path)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "model".into());
    let text = write_mps(&model, &stem);
    let out: PathBuf = args
        .flags
        .get("out")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(path).with_extension("mps"));
    fs::write(&out, text).map_err(|e| CliError::Io(e.to_string()))?;
    println!(
        "wrote {} ({} columns, {} binaries, {} rows)",
        out.display(),
        model.num_vars(),
        model.num_binary(),
        model.num_rows()
    );
    Ok(())
}
