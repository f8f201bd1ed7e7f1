//! End-to-end checks of the LP front end, the cut loop, and branch-and-cut
//! against the exact enumeration oracle.

mod common;

use uc_core::formulation::{build_uc_model, RowTag, VarKind};
use uc_core::oracle::{self, rat_to_f64, Polytope};
use uc_core::simplex::LpStatus;
use uc_core::solver::{self, CutPolicy, SolveConfig, Termination};
use uc_core::types::{Direction, Family};

use common::{generator_params, random_pair_instance, warm_instance};

#[test]
fn solve_lp_rejects_integer_models_and_solves_relaxations() {
    let inst = warm_instance(1, &[8, 8], 3);
    let model = build_uc_model(&inst, 2).unwrap();
    assert!(solver::solve_lp(&model).is_err());
    let relaxed = model.lp_relaxation();
    let sol = solver::solve_lp(&relaxed).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    // The relaxation never exceeds the integer optimum.
    let exact = oracle::solve_tiny_exact(&inst, 2).unwrap();
    assert!(sol.objective <= rat_to_f64(&exact.objective) + 1e-6);
}

#[test]
fn max_generation_on_the_physical_rows() {
    // Maximize the second-period output of the worked-example generator
    // with both periods forced online and only its physical rows kept.
    let inst = warm_instance(2, &[8], 2);
    let mut model = build_uc_model(&inst, 2).unwrap().lp_relaxation();
    model.rows.retain(|r| r.gen.is_some());
    // Reshape the single generator into the worked-example one.
    let p = uc_core::types::GeneratorParams {
        cap_max: 80.0,
        cap_min: 8.0,
        min_up: 2,
        min_down: 2,
        ramp: 10.0,
        start_ramp: 15.0,
    };
    let inst2 = {
        let mut i = inst.clone();
        i.generators[0].params = p;
        i.generators[0].costs.quad = 0.0;
        i.generators[0].initial = uc_core::formulation::InitialState::on(&p, 80.0);
        i.buses[0].load = vec![0.0, 0.0];
        i
    };
    let mut model = build_uc_model(&inst2, 1).unwrap().lp_relaxation();
    model.rows.retain(|r| r.gen.is_some());
    for v in &mut model.vars {
        v.obj = 0.0;
        if v.kind == VarKind::Status {
            v.lb = 1.0;
        }
        if v.kind == VarKind::Power && v.period == 2 {
            v.obj = -1.0;
        }
    }
    let sol = solver::solve_lp(&model).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    assert!((sol.objective + 80.0).abs() < 1e-9);
    // Cross-check against the exact dispatch maximum.
    let spec = Polytope::new(p, 2).unwrap();
    let exact = oracle::max_linear(&spec, &[0.0, 1.0], &[0.0, 0.0]).unwrap();
    assert_eq!(rat_to_f64(&exact), 80.0);
}

#[test]
fn cut_loop_finds_the_crafted_violation_first() {
    // A relaxation whose optimum is exactly the crafted fractional point:
    // statuses pinned to (0, 1, 1), outputs pushed to the capacity rows.
    let p = uc_core::types::GeneratorParams {
        cap_max: 80.0,
        cap_min: 8.0,
        min_up: 2,
        min_down: 2,
        ramp: 10.0,
        start_ramp: 15.0,
    };
    let mut inst = warm_instance(3, &[8], 3);
    inst.generators[0].params = p;
    inst.generators[0].costs.quad = 0.0;
    inst.generators[0].initial = uc_core::formulation::InitialState::off(&p);
    inst.buses[0].load = vec![0.0; 3];
    let mut model = build_uc_model(&inst, 1).unwrap().lp_relaxation();
    model.rows.retain(|r| matches!(r.tag, RowTag::CapUpper | RowTag::CapLower));
    for v in &mut model.vars {
        v.obj = 0.0;
        match v.kind {
            VarKind::Status => {
                let fixed = if v.period == 1 { 0.0 } else { 1.0 };
                v.lb = fixed;
                v.ub = fixed;
            }
            VarKind::Power => v.obj = -1.0,
            _ => {}
        }
    }
    let cfg = SolveConfig::default();
    let before = solver::solve_lp(&model).unwrap().objective;
    let result = solver::cut_loop(&mut model, &[p], &cfg).unwrap();
    assert!(!result.cuts_added.is_empty());
    let (gen, first) = &result.cuts_added[0];
    assert_eq!(*gen, 0);
    assert_eq!(first.params.t, 2);
    assert_eq!(first.params.lags, vec![0]);
    assert_eq!(first.params.direction, Direction::Backward);
    // Added rows only tighten a minimization.
    assert!(result.solution.objective >= before - 1e-9);
    // The loop saturates: nothing violated at the final point.
    let last = solver::cut_loop(&mut model, &[p], &cfg).unwrap();
    assert!(last.cuts_added.is_empty());
}

#[test]
fn integral_relaxations_take_one_round_and_no_cuts() {
    let inst = warm_instance(4, &[1, 1], 4);
    // Constant demand at the warm point keeps the relaxation integral.
    let mut inst = inst;
    let d = inst.buses[0].load[0];
    inst.buses[0].load = vec![d; 4];
    let mut model = build_uc_model(&inst, 2).unwrap().lp_relaxation();
    let gens = generator_params(&inst);
    let cfg = SolveConfig::default();
    let result = solver::cut_loop(&mut model, &gens, &cfg).unwrap();
    let integral = result
        .solution
        .values
        .iter()
        .zip(&model.vars)
        .filter(|(_, v)| v.kind == VarKind::Status)
        .all(|(val, _)| (val - val.round()).abs() < 1e-7);
    if integral {
        assert_eq!(result.cuts_added.len(), 0);
        assert_eq!(result.rounds, 1);
    }
}

#[test]
fn branch_and_cut_matches_the_exact_oracle() {
    let mut agreements = 0;
    for seed in 0..4u64 {
        let inst = random_pair_instance(seed, 6);
        let model = build_uc_model(&inst, 2).unwrap();
        let gens = generator_params(&inst);
        let cfg = SolveConfig {
            rel_gap: 1e-9,
            ..SolveConfig::default()
        };
        let report = solver::branch_and_cut(&model, &gens, &cfg).unwrap();
        let exact = oracle::solve_tiny_exact(&inst, 2);
        match (&report.termination, exact) {
            (Termination::Infeasible, Err(oracle::OracleError::Infeasible)) => {}
            (_, Ok(exact)) => {
                let z = report.incumbent.expect("incumbent on feasible instance");
                let z_exact = rat_to_f64(&exact.objective);
                assert!(
                    (z - z_exact).abs() <= 1e-6 * z_exact.abs().max(1.0),
                    "seed {seed}: {z} vs exact {z_exact}"
                );
                agreements += 1;
            }
            (t, e) => panic!("seed {seed}: solver {t:?} vs oracle {e:?}"),
        }
    }
    assert!(agreements >= 3, "only {agreements} solved instances");
}

#[test]
fn zero_demand_costs_nothing() {
    let mut inst = warm_instance(5, &[6, 8], 4);
    inst.buses[0].load = vec![0.0; 4];
    for g in &mut inst.generators {
        g.initial = uc_core::formulation::InitialState::off(&g.params);
    }
    let model = build_uc_model(&inst, 2).unwrap();
    let gens = generator_params(&inst);
    let report = solver::branch_and_cut(&model, &gens, &SolveConfig::default()).unwrap();
    assert!(report.incumbent.unwrap().abs() < 1e-9);
    let exact = oracle::solve_tiny_exact(&inst, 2).unwrap();
    assert!(rat_to_f64(&exact.objective).abs() < 1e-12);
    assert!(exact.schedules.iter().all(|s| s.iter().all(|&on| !on)));
}

#[test]
fn cuts_never_hurt_the_root_bound_and_are_globally_valid() {
    let inst = warm_instance(6, &[6, 7, 8], 6);
    let model = build_uc_model(&inst, 2).unwrap();
    let gens = generator_params(&inst);
    let with = solver::branch_and_cut(&model, &gens, &SolveConfig::default()).unwrap();
    let without = solver::branch_and_cut(
        &model,
        &gens,
        &SolveConfig {
            cut_policy: CutPolicy::none(),
            ..SolveConfig::default()
        },
    )
    .unwrap();
    assert!(with.root_objective.unwrap() >= without.root_objective.unwrap() - 1e-7);
    // Incumbents agree within the gap.
    let (a, b) = (with.incumbent.unwrap(), without.incumbent.unwrap());
    assert!((a - b).abs() <= 1e-4 * a.abs().max(1.0) + 1e-6);
    // Replay every added cut through the exact validity oracle.
    for (gen, q) in &with.cut_rows {
        let spec = Polytope::new(gens[*gen], inst.horizon).unwrap();
        let report = oracle::check_valid(q, &spec).unwrap();
        assert!(
            report.is_valid(),
            "cut {:?} on generator {gen} cuts a feasible point by {}",
            q.params,
            report.max_violation
        );
    }
    assert!(with.cuts_per_family.contains_key(&Family::SingleVar) || !with.cut_rows.is_empty());
}

#[test]
fn reports_are_deterministic() {
    let inst = random_pair_instance(9, 6);
    let model = build_uc_model(&inst, 2).unwrap();
    let gens = generator_params(&inst);
    let cfg = SolveConfig::default();
    let a = solver::branch_and_cut(&model, &gens, &cfg).unwrap();
    let b = solver::branch_and_cut(&model, &gens, &cfg).unwrap();
    assert_eq!(a.nodes, b.nodes);
    assert_eq!(a.incumbent, b.incumbent);
    assert_eq!(a.bound, b.bound);
    assert_eq!(a.cuts_per_family, b.cuts_per_family);
    assert_eq!(a.cut_rows.len(), b.cut_rows.len());
}

#[test]
fn bound_is_consistent_at_termination() {
    let inst = random_pair_instance(11, 6);
    let model = build_uc_model(&inst, 2).unwrap();
    let gens = generator_params(&inst);
    let report = solver::branch_and_cut(&model, &gens, &SolveConfig::default()).unwrap();
    if let Some(inc) = report.incumbent {
        assert!(report.bound <= inc + 1e-9);
        assert!(report.root_objective.unwrap() <= inc + 1e-7);
        if report.termination == Termination::Gap {
            assert!((inc - report.bound) <= 1e-4 * inc.abs().max(1.0) + 1e-9);
        }
    }
}

#[test]
fn gap_metrics_follow_their_formulas() {
    assert!((solver::igap(100.0, 99.55).unwrap() - 0.45).abs() < 1e-12);
    assert_eq!(solver::igap(100.0, 100.0).unwrap(), 0.0);
    assert!((solver::igap(200.0, 199.0).unwrap() - 0.5).abs() < 1e-12);
    assert!(solver::igap(0.0, 1.0).is_err());
    let r = solver::pct_reduction(0.45, 0.20).unwrap();
    assert!((r - 55.55555555555556).abs() < 1e-9);
    assert_eq!(solver::pct_reduction(0.3, 0.3).unwrap(), 0.0);
    assert_eq!(solver::pct_reduction(0.3, 0.0).unwrap(), 100.0);
    assert!(solver::pct_reduction(0.0, 0.0).is_err());
}

#[test]
fn default_config_mirrors_the_reference_settings() {
    let cfg = SolveConfig::default();
    assert_eq!(cfg.rel_gap, 1e-4);
    assert_eq!(cfg.violation_tol, 1e-6);
    assert_eq!(cfg.max_cut_rounds_root, 50);
    assert_eq!(cfg.cut_depth_limit, 5);
}

#[test]
fn epigraph_and_cost_carriers_are_tight_at_optima() {
    let inst = random_pair_instance(13, 5);
    let model = build_uc_model(&inst, 3).unwrap();
    let gens = generator_params(&inst);
    let cfg = SolveConfig {
        rel_gap: 1e-9,
        ..SolveConfig::default()
    };
    let report = solver::branch_and_cut(&model, &gens, &cfg).unwrap();
    let Some(values) = report.incumbent_values else {
        return;
    };
    for (g, unit) in inst.generators.iter().enumerate() {
        let pw = uc_core::types::linearize_cost(&unit.costs, &unit.params, 3).unwrap();
        let mut prev = if *unit.initial.history.last().unwrap() { 1.0 } else { 0.0 };
        for t in 1..=inst.horizon {
            let y = values[model.var_index(g, VarKind::Status, t)];
            let x = values[model.var_index(g, VarKind::Power, t)];
            let f = values[model.var_index(g, VarKind::CostEpi, t)];
            let u = values[model.var_index(g, VarKind::StartCost, t)];
            let v = values[model.var_index(g, VarKind::ShutCost, t)];
            if y > 0.5 {
                assert!((f - pw.value(x)).abs() < 1e-7, "epigraph slack at t={t}");
            } else {
                assert!(f.abs() < 1e-7);
            }
            let expect_u = unit.costs.startup * (y - prev).max(0.0);
            let expect_v = unit.costs.shutdown * (prev - y).max(0.0);
            assert!((u - expect_u).abs() < 1e-6, "start carrier at t={t}");
            assert!((v - expect_v).abs() < 1e-6, "stop carrier at t={t}");
            prev = y;
        }
    }
}
