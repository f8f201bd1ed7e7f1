//! Exact ground-truth solver for tiny instances: enumerate every joint
//! commitment honoring the initial conditions, price each one with an
//! exact dispatch LP, and keep the cheapest.
//!
//! The dispatch LP is assembled here from the physical constraints
//! directly rather than through the model builder, so this path stays an
//! independent check on the branch-and-cut stack. The float simplex is
//! consulted only as a warm-start hint; every accepted optimum is certified
//! by the rational simplex.

use num_traits::Zero;

use super::ratlp::{solve_exact, ExactStatus};
use super::{rat, OracleError, Rat};
use crate::formulation::UcInstance;
use crate::simplex::{self, LpProblem, LpStatus};
use crate::types::{linearize_cost, GeneratorParams};

const JOINT_BUDGET: u128 = 1_000_000;
const PIVOT_BUDGET: usize = 400_000;

/// Exact optimum with the attaining joint schedule and dispatch.
#[derive(Debug, Clone)]
pub struct ExactSolve {
    pub objective: Rat,
    pub schedules: Vec<Vec<bool>>,
    pub dispatch: Vec<Vec<Rat>>,
}

/// Per-generator schedules feasible against the recorded history.
pub fn schedules_with_history(
    p: &GeneratorParams,
    history: &[bool],
    t_len: usize,
) -> Result<Vec<Vec<bool>>, OracleError> {
    if t_len > 20 {
        return Err(OracleError::Budget(format!(
            "schedule enumeration needs 2^{t_len} candidates"
        )));
    }
    let h = history.len() as i64;
    let val = |y: &[bool], i: i64| -> bool {
        if i >= 1 {
            y[(i - 1) as usize]
        } else {
            let pos = h - 1 + i;
            pos >= 0 && history[pos as usize]
        }
    };
    let mut out = Vec::new();
    'next: for mask in 0u32..(1u32 << t_len) {
        let y: Vec<bool> = (0..t_len).map(|i| mask & (1 << i) != 0).collect();
        for t in (2 - p.min_up as i64)..=(t_len as i64) {
            let k_hi = (t_len as i64).min(t + p.min_up as i64 - 1);
            for k in t.max(1)..=k_hi {
                if !val(&y, t - 1) && val(&y, t) && !val(&y, k) {
                    continue 'next;
                }
            }
        }
        for t in (2 - p.min_down as i64)..=(t_len as i64) {
            let k_hi = (t_len as i64).min(t + p.min_down as i64 - 1);
            for k in t.max(1)..=k_hi {
                if val(&y, t - 1) && !val(&y, t) && val(&y, k) {
                    continue 'next;
                }
            }
        }
        out.push(y);
    }
    Ok(out)
}

struct DispatchLp {
    lp: LpProblem,
    /// `x` variable of generator `g` in period `t`, if online.
    x_var: Vec<Vec<Option<usize>>>,
}

/// Builds the dispatch LP of one joint schedule: generation bounds with
/// start/stop caps, ramp links, cost epigraphs, load balance, and line
/// limits. Returns `None` when the schedule is structurally infeasible
/// (an initial output too high to shut down from).
fn dispatch_lp(inst: &UcInstance, joint: &[&Vec<bool>], segments: usize) -> Option<DispatchLp> {
    let t_len = inst.horizon;
    let n_gens = inst.generators.len();
    let mut lp = LpProblem::default();
    let mut x_var = vec![vec![None; t_len]; n_gens];
    let mut f_var = vec![vec![None; t_len]; n_gens];
    for (g, unit) in inst.generators.iter().enumerate() {
        let p = &unit.params;
        let on0 = *unit.initial.history.last().unwrap_or(&false);
        let x0 = unit.initial.x0;
        if on0 && !joint[g][0] && x0 > p.start_ramp {
            return None;
        }
        let pw = linearize_cost(&unit.costs, p, segments).ok()?;
        for t in 1..=t_len {
            if !joint[g][t - 1] {
                continue;
            }
            let mut lb = p.cap_min;
            let mut ub = p.cap_max;
            let starts_here = if t == 1 { !on0 } else { !joint[g][t - 2] };
            let stops_next = if t == t_len {
                false
            } else {
                !joint[g][t]
            };
            if starts_here {
                ub = ub.min(p.start_ramp);
            }
            if stops_next {
                ub = ub.min(p.start_ramp);
            }
            if t == 1 && on0 {
                lb = lb.max(x0 - p.ramp);
                ub = ub.min(x0 + p.ramp);
            }
            if lb > ub {
                return None;
            }
            let j = lp.obj.len();
            lp.obj.push(0.0);
            lp.lb.push(lb);
            lp.ub.push(ub);
            lp.cols.push(Vec::new());
            x_var[g][t - 1] = Some(j);
            let jf = lp.obj.len();
            lp.obj.push(1.0);
            lp.lb.push(0.0);
            lp.ub.push(f64::INFINITY);
            lp.cols.push(Vec::new());
            f_var[g][t - 1] = Some(jf);
            // Epigraph rows: slope*x - f <= -intercept while online.
            for (slope, intercept) in pw.slopes.iter().zip(&pw.intercepts) {
                let row = lp.row_lb.len();
                lp.row_lb.push(f64::NEG_INFINITY);
                lp.row_ub.push(-intercept);
                lp.cols[j].push((row, *slope));
                lp.cols[jf].push((row, -1.0));
            }
            // Ramp link to the previous online period.
            if t >= 2 && joint[g][t - 2] {
                let jp = x_var[g][t - 2].unwrap();
                let row = lp.row_lb.len();
                lp.row_lb.push(-p.ramp);
                lp.row_ub.push(p.ramp);
                lp.cols[j].push((row, 1.0));
                lp.cols[jp].push((row, -1.0));
            }
        }
    }
    // Load balance per period.
    for t in 1..=t_len {
        let demand = inst.system_load(t);
        let row = lp.row_lb.len();
        lp.row_lb.push(demand);
        lp.row_ub.push(demand);
        for g in 0..n_gens {
            if let Some(j) = x_var[g][t - 1] {
                lp.cols[j].push((row, 1.0));
            }
        }
    }
    // Line limits on net injections.
    for line in &inst.lines {
        for t in 1..=t_len {
            let mut offset = 0.0;
            let row = lp.row_lb.len();
            let mut touched = false;
            for bus in &inst.buses {
                let Some(&factor) = line.factors.get(&bus.id) else {
                    continue;
                };
                if factor == 0.0 {
                    continue;
                }
                offset += factor * bus.load[t - 1];
                for (g, unit) in inst.generators.iter().enumerate() {
                    if unit.bus == bus.id {
                        if let Some(j) = x_var[g][t - 1] {
                            lp.cols[j].push((row, factor));
                            touched = true;
                        }
                    }
                }
            }
            if touched || offset.abs() > line.capacity {
                lp.row_lb.push(offset - line.capacity);
                lp.row_ub.push(offset + line.capacity);
            }
        }
    }
    Some(DispatchLp { lp, x_var })
}

/// Enumerates joint schedules and returns the exact cheapest total cost.
pub fn solve_tiny_exact(inst: &UcInstance, segments: usize) -> Result<ExactSolve, OracleError> {
    let t_len = inst.horizon;
    let n_gens = inst.generators.len();
    if n_gens == 0 {
        return Err(OracleError::InvalidArgument("no generators".into()));
    }
    let per_gen: Vec<Vec<Vec<bool>>> = inst
        .generators
        .iter()
        .map(|u| schedules_with_history(&u.params, &u.initial.history, t_len))
        .collect::<Result<_, _>>()?;
    let mut budget: u128 = 1;
    for s in &per_gen {
        if s.is_empty() {
            return Err(OracleError::Infeasible);
        }
        budget = budget.saturating_mul(s.len() as u128);
    }
    if budget > JOINT_BUDGET {
        return Err(OracleError::Budget(format!(
            "{budget} joint schedules exceed the enumeration budget"
        )));
    }

    // Exact per-period demand and reserve requirements.
    let demand: Vec<Rat> = (1..=t_len)
        .map(|t| inst.buses.iter().map(|b| rat(b.load[t - 1])).sum())
        .collect();
    let reserve_need: Vec<Rat> = (1..=t_len)
        .map(|t| (rat(1.0) + rat(inst.reserve[t - 1])) * &demand[t - 1])
        .collect();
    let cap_max: Vec<Rat> = inst.generators.iter().map(|u| rat(u.params.cap_max)).collect();
    let cap_min: Vec<Rat> = inst.generators.iter().map(|u| rat(u.params.cap_min)).collect();

    let mut best: Option<ExactSolve> = None;
    let mut odo = vec![0usize; n_gens];
    'joint: loop {
        let joint: Vec<&Vec<bool>> = (0..n_gens).map(|g| &per_gen[g][odo[g]]).collect();
        // Cheap exact prunes: committed capacity must cover demand plus
        // reserve, and committed minimum output must not exceed demand.
        let mut ok = true;
        for t in 0..t_len {
            let mut hi = Rat::zero();
            let mut lo = Rat::zero();
            for g in 0..n_gens {
                if joint[g][t] {
                    hi = &hi + &cap_max[g];
                    lo = &lo + &cap_min[g];
                }
            }
            if hi < reserve_need[t] || hi < demand[t] || lo > demand[t] {
                ok = false;
                break;
            }
        }
        if ok {
            if let Some(d) = dispatch_lp(inst, &joint, segments) {
                let hint = match simplex::solve(&d.lp) {
                    out if out.status == LpStatus::Optimal => Some(out.statuses),
                    _ => None,
                };
                let exact = solve_exact(&d.lp, hint.as_deref(), PIVOT_BUDGET)?;
                if exact.status == ExactStatus::Optimal {
                    let mut total = exact.objective.clone();
                    for (g, unit) in inst.generators.iter().enumerate() {
                        let on0 = *unit.initial.history.last().unwrap_or(&false);
                        let mut prev = on0;
                        for t in 0..t_len {
                            let on = joint[g][t];
                            if on {
                                total = &total + &rat(unit.costs.fixed_on);
                            }
                            if on && !prev {
                                total = &total + &rat(unit.costs.startup);
                            }
                            if !on && prev {
                                total = &total + &rat(unit.costs.shutdown);
                            }
                            prev = on;
                        }
                    }
                    if best.as_ref().is_none_or(|b| total < b.objective) {
                        let mut dispatch = vec![vec![Rat::zero(); t_len]; n_gens];
                        for g in 0..n_gens {
                            for t in 0..t_len {
                                if let Some(j) = d.x_var[g][t] {
                                    dispatch[g][t] = exact.values[j].clone();
                                }
                            }
                        }
                        best = Some(ExactSolve {
                            objective: total,
                            schedules: joint.iter().map(|s| (*s).clone()).collect(),
                            dispatch,
                        });
                    }
                }
            }
        }
        // Advance the odometer.
        for g in 0..n_gens {
            odo[g] += 1;
            if odo[g] < per_gen[g].len() {
                continue 'joint;
            }
            odo[g] = 0;
        }
        break;
    }
    best.ok_or(OracleError::Infeasible)
}
