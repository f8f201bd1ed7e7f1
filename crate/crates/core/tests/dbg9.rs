mod common;
use rand::{Rng, SeedableRng};
use uc_core::formulation::{build_uc_model, strengthen_two_period, Bus, GeneratorUnit, InitialState, UcInstance};
use uc_core::instances;
use uc_core::solver::{self, CutPolicy, SolveConfig};

fn reduction_instance(seed: u64) -> UcInstance {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let types = [1usize, 3, 8];
    let picked: Vec<_> = types.iter().map(|&i| instances::generator_type(i).unwrap()).collect();
    let total_cap: f64 = picked.iter().map(|(p, _)| p.cap_max).sum();
    let scale = rng.gen_range(0.88..0.99);
    let load: Vec<f64> = instances::LOAD_PROFILE[..12].iter().map(|f| common::snap(f * total_cap * scale)).collect();
    let generators = picked.into_iter().map(|(p, c)| {
        let x0 = common::snap(load[0] * p.cap_max / total_cap).clamp(p.cap_min, p.cap_max);
        GeneratorUnit { bus: "b1".into(), params: p, costs: c, initial: InitialState::on(&p, x0) }
    }).collect();
    UcInstance { horizon: 12, reserve: vec![0.03; 12], buses: vec![Bus { id: "b1".into(), load }], lines: Vec::new(), generators }
}

#[test]
fn debug_nine() {
    for seed in 0..10u64 {
        let inst = reduction_instance(seed);
        let gens: Vec<_> = inst.generators.iter().map(|g| g.params).collect();
        let base = build_uc_model(&inst, 3).unwrap();
        let cfg = SolveConfig { node_limit: 60, time_limit: Some(std::time::Duration::from_secs(30)), ..SolveConfig::default() };
        let plain_cfg = SolveConfig { cut_policy: CutPolicy::none(), ..cfg.clone() };
        let without = solver::branch_and_cut(&base, &gens, &plain_cfg);
        println!("seed {seed} without: {:?}", without.as_ref().map(|r| (r.termination, r.nodes, r.incumbent)));
        let mut strong = base.clone();
        strengthen_two_period(&mut strong, &inst).unwrap();
        let with = solver::branch_and_cut(&strong, &gens, &cfg);
        println!("seed {seed} with:    {:?}", with.as_ref().map(|r| (r.termination, r.nodes, r.incumbent)));
    }
}

#[test]
fn debug_root_only() {
    let inst = reduction_instance(0);
    let base = build_uc_model(&inst, 3).unwrap();
    let relaxed = base.lp_relaxation();
    let sol = solver::solve_lp(&relaxed).unwrap();
    println!("root: {:?} obj {} iters {}", sol.status, sol.objective, sol.iterations);
    // Fix the most fractional binary to each side and re-solve.
    let lp = relaxed.to_lp();
    let mut frac_var = None;
    for (j, v) in relaxed.vars.iter().enumerate() {
        if v.integer || !matches!(v.kind, uc_core::formulation::VarKind::Status) { continue; }
    }
    for (j, v) in base.vars.iter().enumerate() {
        if v.integer {
            let val = sol.values[j];
            if (val - val.round()).abs() > 1e-6 { frac_var = Some(j); break; }
        }
    }
    let j = frac_var.expect("some fractional");
    for fix in [0.0, 1.0] {
        let mut lp2 = lp.clone();
        lp2.lb[j] = fix;
        lp2.ub[j] = fix;
        let out = uc_core::simplex::solve(&lp2);
        println!("fix y[{j}]={fix}: {:?} obj {} iters {}", out.status, out.objective, out.iterations);
    }
}

#[test]
fn debug_find_failing_node() {
    let inst = reduction_instance(0);
    let base = build_uc_model(&inst, 3).unwrap();
    let relaxed = base.lp_relaxation();
    let lp = relaxed.to_lp();
    let binaries: Vec<usize> = (0..base.num_vars()).filter(|&j| base.vars[j].integer).collect();
    // Depth-first dive fixing the most fractional binary to its floor side.
    let mut fixes: Vec<(usize, f64)> = Vec::new();
    for depth in 0..40 {
        let mut lp2 = lp.clone();
        for &(j, v) in &fixes {
            lp2.lb[j] = v;
            lp2.ub[j] = v;
        }
        let out = uc_core::simplex::solve(&lp2);
        println!("depth {depth}: {:?} iters {}", out.status, out.iterations);
        if out.status != uc_core::simplex::LpStatus::Optimal {
            println!("fixes: {fixes:?}");
            break;
        }
        let mut branch = None;
        for &j in &binaries {
            let frac = (out.values[j] - out.values[j].round()).abs();
            if frac > 1e-6 && branch.is_none_or(|(_, b)| frac > b + 1e-12) {
                branch = Some((j, frac));
            }
        }
        let Some((j, _)) = branch else { println!("integral at depth {depth}"); break };
        fixes.push((j, 1.0));
    }
}

#[test]
fn debug_seed0_with() {
    let inst = reduction_instance(0);
    let gens: Vec<_> = inst.generators.iter().map(|g| g.params).collect();
    let base = build_uc_model(&inst, 3).unwrap();
    let mut strong = base.clone();
    strengthen_two_period(&mut strong, &inst).unwrap();
    // Saturate the root manually to find the failing LP.
    let mut relaxed = strong.lp_relaxation();
    let cfg = SolveConfig::default();
    let loop_result = solver::cut_loop(&mut relaxed, &gens, &cfg);
    match &loop_result {
        Ok(r) => println!("root loop ok: rounds {} cuts {} obj {}", r.rounds, r.cuts_added.len(), r.solution.objective),
        Err(e) => println!("root loop failed: {e:?}"),
    }
}
