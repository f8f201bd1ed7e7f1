//! Branch-and-cut over the commitment MILP.
//!
//! The search is deliberately plain so runs are reproducible: most
//! fractional status variable for branching with lowest index on ties,
//! best-bound node selection with first-in tie-breaking, cuts separated to
//! saturation at the root and once per node down to a depth limit. Cuts
//! are permanent rows once added; all of them are globally valid for the
//! owning generator's polytope, so no pool management is needed.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashSet};
use std::fmt;
use std::time::{Duration, Instant};

use crate::cuts::FamilyKind;
use crate::formulation::{MilpModel, VarKind};
use crate::separation::separate;
use crate::simplex::{self, LpProblem, LpStatus, VarStatus};
use crate::types::{Direction, Family, FractionalPoint, LinearInequality};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverError {
    InvalidArgument(String),
    /// The LP engine failed (infeasible root, iteration limit, ...).
    Lp(LpStatus),
    /// A ratio metric was requested at an undefined point.
    UndefinedMetric(String),
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            SolverError::Lp(status) => write!(f, "lp solve failed: {status}"),
            SolverError::UndefinedMetric(msg) => write!(f, "undefined metric: {msg}"),
        }
    }
}

impl std::error::Error for SolverError {}

/// Basic solution of a continuous model.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    /// Basis descriptor: status of every variable, structurals then row
    /// logicals.
    pub basis: Vec<VarStatus>,
    pub iterations: usize,
}

/// Which family separators run during the cut loop and search.
#[derive(Debug, Clone, PartialEq)]
pub struct CutPolicy {
    pub separators: Vec<(FamilyKind, Direction)>,
}

impl CutPolicy {
    /// Every family in both directions.
    pub fn all() -> Self {
        let mut separators = Vec::new();
        for kind in FamilyKind::ALL {
            for dir in [Direction::Backward, Direction::Forward] {
                separators.push((kind, dir));
            }
        }
        CutPolicy { separators }
    }

    pub fn none() -> Self {
        CutPolicy {
            separators: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.separators.is_empty()
    }
}

/// Branching rule; only most-fractional is implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchRule {
    #[default]
    MostFractional,
}

/// Node selection; only best-bound is implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NodeOrder {
    #[default]
    BestBound,
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub rel_gap: f64,
    pub violation_tol: f64,
    pub max_cut_rounds_root: usize,
    pub cut_depth_limit: usize,
    pub node_limit: usize,
    pub time_limit: Option<Duration>,
    pub branch_rule: BranchRule,
    pub node_order: NodeOrder,
    pub cut_policy: CutPolicy,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            rel_gap: 1e-4,
            violation_tol: 1e-6,
            max_cut_rounds_root: 50,
            cut_depth_limit: 5,
            node_limit: 100_000,
            time_limit: None,
            branch_rule: BranchRule::MostFractional,
            node_order: NodeOrder::BestBound,
            cut_policy: CutPolicy::all(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Incumbent proven within the relative gap (possibly exactly).
    Gap,
    NodeLimit,
    TimeLimit,
    Infeasible,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Termination::Gap => "gap closed",
            Termination::NodeLimit => "node limit",
            Termination::TimeLimit => "time limit",
            Termination::Infeasible => "infeasible",
        };
        write!(f, "{s}")
    }
}

/// Search outcome with counters and the cuts that were added.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub termination: Termination,
    pub incumbent: Option<f64>,
    pub incumbent_values: Option<Vec<f64>>,
    pub bound: f64,
    pub nodes: usize,
    pub cuts_per_family: BTreeMap<Family, usize>,
    /// Every dynamically separated cut with its owning generator.
    pub cut_rows: Vec<(usize, LinearInequality)>,
    /// Root relaxation value after the root cut loop.
    pub root_objective: Option<f64>,
    /// Integrality gap against the own incumbent, when defined.
    pub igap: Option<f64>,
    pub wall: Duration,
}

/// Root-node integrality gap in percent.
pub fn igap(z_star: f64, z_lp: f64) -> Result<f64, SolverError> {
    if z_star == 0.0 {
        return Err(SolverError::UndefinedMetric(
            "integrality gap needs a nonzero incumbent".into(),
        ));
    }
    Ok((z_star - z_lp).abs() / z_star * 100.0)
}

/// Relative shrink of the integrality gap, in percent.
pub fn pct_reduction(igap_without: f64, igap_with: f64) -> Result<f64, SolverError> {
    if igap_without == 0.0 {
        return Err(SolverError::UndefinedMetric(
            "percentage reduction needs a positive baseline gap".into(),
        ));
    }
    Ok((igap_without - igap_with) / igap_without * 100.0)
}

/// Solves a continuous model; integrality marks are rejected so callers
/// relax explicitly.
pub fn solve_lp(model: &MilpModel) -> Result<LpSolution, SolverError> {
    if model.has_integers() {
        return Err(SolverError::InvalidArgument(
            "model still has integrality marks; relax it first".into(),
        ));
    }
    let out = simplex::solve(&model.to_lp());
    Ok(LpSolution {
        status: out.status,
        objective: out.objective,
        values: out.values,
        basis: out.statuses,
        iterations: out.iterations,
    })
}

/// The status/generation point of one generator inside an LP solution.
fn generator_point(model: &MilpModel, values: &[f64], gen: usize) -> FractionalPoint {
    let x: Vec<f64> = (1..=model.horizon)
        .map(|t| values[model.var_index(gen, VarKind::Power, t)])
        .collect();
    let y: Vec<f64> = (1..=model.horizon)
        .map(|t| values[model.var_index(gen, VarKind::Status, t)])
        .collect();
    FractionalPoint::clamped(x, y)
}

/// Fingerprint for duplicate-cut suppression.
fn cut_key(gen: usize, q: &LinearInequality) -> (usize, Family, usize, Vec<usize>, u64, usize, usize, u8) {
    (
        gen,
        q.family,
        q.params.t,
        q.params.lags.clone(),
        q.params.eta.to_bits(),
        q.params.k,
        q.params.m,
        matches!(q.params.direction, Direction::Forward) as u8,
    )
}

struct CutState {
    seen: HashSet<(usize, Family, usize, Vec<usize>, u64, usize, usize, u8)>,
    per_family: BTreeMap<Family, usize>,
    rows: Vec<(usize, LinearInequality)>,
}

impl CutState {
    fn new() -> Self {
        CutState {
            seen: HashSet::new(),
            per_family: BTreeMap::new(),
            rows: Vec::new(),
        }
    }

    /// One separation round. At the root every family contributes its
    /// most violated cut per generator; below the root only the single
    /// deepest cut per generator goes in, keeping node bases small.
    fn round(
        &mut self,
        model: &mut MilpModel,
        instance_gens: &[crate::types::GeneratorParams],
        values: &[f64],
        policy: &CutPolicy,
        tol: f64,
        best_only: bool,
    ) -> usize {
        let mut added = 0;
        for (gen, params) in instance_gens.iter().enumerate() {
            let pt = generator_point(model, values, gen);
            let mut best: Option<crate::separation::CutCandidate> = None;
            for &(kind, dir) in &policy.separators {
                let Some(cand) = separate(kind, dir, &pt, params, tol) else {
                    continue;
                };
                if best_only {
                    if best
                        .as_ref()
                        .is_none_or(|b| cand.violation > b.violation)
                    {
                        best = Some(cand);
                    }
                    continue;
                }
                let key = cut_key(gen, &cand.inequality);
                if !self.seen.insert(key) {
                    continue;
                }
                model.add_cut_row(gen, &cand.inequality);
                *self.per_family.entry(cand.inequality.family).or_insert(0) += 1;
                self.rows.push((gen, cand.inequality));
                added += 1;
            }
            if let Some(cand) = best {
                let key = cut_key(gen, &cand.inequality);
                if self.seen.insert(key) {
                    model.add_cut_row(gen, &cand.inequality);
                    *self.per_family.entry(cand.inequality.family).or_insert(0) += 1;
                    self.rows.push((gen, cand.inequality));
                    added += 1;
                }
            }
        }
        added
    }
}

/// Result of saturating the separators at the root relaxation.
#[derive(Debug, Clone)]
pub struct CutLoopResult {
    pub solution: LpSolution,
    pub cuts_added: Vec<(usize, LinearInequality)>,
    pub rounds: usize,
}

/// Repeatedly solves the relaxation and adds most-violated cuts until no
/// separator fires or the round limit is hit. The model is augmented in
/// place; LP failures propagate.
pub fn cut_loop(
    model: &mut MilpModel,
    gens: &[crate::types::GeneratorParams],
    cfg: &SolveConfig,
) -> Result<CutLoopResult, SolverError> {
    if model.has_integers() {
        return Err(SolverError::InvalidArgument(
            "cut loop runs on a relaxation; relax the model first".into(),
        ));
    }
    let mut state = CutState::new();
    let mut rounds = 0;
    let mut warm: Option<Vec<VarStatus>> = None;
    loop {
        let lp = model.to_lp();
        let out = match &warm {
            Some(statuses) => simplex::solve_warm(&lp, statuses),
            None => simplex::solve(&lp),
        };
        if out.status != LpStatus::Optimal {
            return Err(SolverError::Lp(out.status));
        }
        warm = Some(out.statuses.clone());
        let solution = LpSolution {
            status: out.status,
            objective: out.objective,
            values: out.values,
            basis: out.statuses,
            iterations: out.iterations,
        };
        if rounds >= cfg.max_cut_rounds_root {
            return Ok(CutLoopResult {
                solution,
                cuts_added: state.rows,
                rounds,
            });
        }
        let added = state.round(
            model,
            gens,
            &solution.values,
            &cfg.cut_policy,
            cfg.violation_tol,
            false,
        );
        rounds += 1;
        if added == 0 {
            return Ok(CutLoopResult {
                solution,
                cuts_added: state.rows,
                rounds,
            });
        }
    }
}

const INT_TOL: f64 = 1e-6;

/// Fast feasibility screen for a rounded commitment pattern: rows whose
/// coefficients touch only integer variables must hold as stated.
fn rounded_passes_binary_rows(model: &MilpModel, rounded: &[(usize, f64)]) -> bool {
    let value: std::collections::HashMap<usize, f64> = rounded.iter().copied().collect();
    for row in &model.rows {
        let mut activity = 0.0;
        let mut pure_binary = true;
        for &(j, c) in &row.coeffs {
            match value.get(&j) {
                Some(v) => activity += c * v,
                None => {
                    pure_binary = false;
                    break;
                }
            }
        }
        if pure_binary && (activity < row.lb - 1e-9 || activity > row.ub + 1e-9) {
            return false;
        }
    }
    true
}

#[derive(Debug)]
struct Node {
    id: usize,
    bound: f64,
    depth: usize,
    fixes: Vec<(usize, f64)>,
    warm: std::rc::Rc<Vec<VarStatus>>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.id == other.id
    }
}
impl Eq for Node {}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap: invert so the smallest bound pops
        // first, oldest node on ties.
        other
            .bound
            .partial_cmp(&self.bound)
            .unwrap_or(Ordering::Equal)
            .then(other.id.cmp(&self.id))
    }
}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn solve_node(
    base: &LpProblem,
    fixes: &[(usize, f64)],
    warm: Option<&[VarStatus]>,
) -> simplex::LpOutcome {
    let fixed;
    let lp = if fixes.is_empty() {
        base
    } else {
        let mut lp = base.clone();
        for &(j, v) in fixes {
            lp.lb[j] = v;
            lp.ub[j] = v;
        }
        fixed = lp;
        &fixed
    };
    match warm {
        Some(statuses) => simplex::solve_warm(lp, statuses),
        None => simplex::solve(lp),
    }
}

/// Branch-and-cut search. The input model keeps its rows; separated cuts
/// live on an internal copy and are reported back.
pub fn branch_and_cut(
    model: &MilpModel,
    gens: &[crate::types::GeneratorParams],
    cfg: &SolveConfig,
) -> Result<SolveReport, SolverError> {
    if !model.has_integers() {
        return Err(SolverError::InvalidArgument(
            "branch-and-cut needs integrality marks".into(),
        ));
    }
    if gens.len() != model.num_gens {
        return Err(SolverError::InvalidArgument(
            "generator parameter list does not match the model".into(),
        ));
    }
    let started = Instant::now();
    let binaries: Vec<usize> = (0..model.num_vars())
        .filter(|&j| model.vars[j].integer)
        .collect();
    let mut work = model.lp_relaxation();

    // Root: saturate the separators.
    let root = cut_loop(&mut work, gens, cfg);
    let root = match root {
        Ok(r) => r,
        Err(SolverError::Lp(LpStatus::Infeasible)) => {
            return Ok(SolveReport {
                termination: Termination::Infeasible,
                incumbent: None,
                incumbent_values: None,
                bound: f64::INFINITY,
                nodes: 0,
                cuts_per_family: BTreeMap::new(),
                cut_rows: Vec::new(),
                root_objective: None,
                igap: None,
                wall: started.elapsed(),
            })
        }
        Err(e) => return Err(e),
    };
    let root_objective = root.solution.objective;
    let mut cut_state = CutState::new();
    for (gen, q) in root.cuts_added {
        cut_state.seen.insert(cut_key(gen, &q));
        *cut_state.per_family.entry(q.family).or_insert(0) += 1;
        cut_state.rows.push((gen, q));
    }

    let root_basis = std::rc::Rc::new(root.solution.basis.clone());
    let mut incumbent: Option<f64> = None;
    let mut incumbent_values: Option<Vec<f64>> = None;
    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    let mut next_id = 0usize;
    heap.push(Node {
        id: next_id,
        bound: root_objective,
        depth: 0,
        fixes: Vec::new(),
        warm: root_basis.clone(),
    });
    next_id += 1;
    let mut nodes = 0usize;
    let mut termination = Termination::Gap;
    let mut base_lp = work.to_lp();
    let mut best_bound = root_objective;
    // Seed the incumbent with the everything-committed pattern when it
    // passes the binary rows; dispatch then prices the rest.
    {
        let all_on: Vec<(usize, f64)> = binaries.iter().map(|&j| (j, 1.0)).collect();
        if rounded_passes_binary_rows(&work, &all_on) {
            let mut lp = base_lp.clone();
            for &(j, v) in &all_on {
                lp.lb[j] = v;
                lp.ub[j] = v;
            }
            let probe = simplex::solve_warm_with_limit(&lp, &root_basis, 4_000);
            if probe.status == LpStatus::Optimal {
                incumbent = Some(probe.objective);
                incumbent_values = Some(probe.values);
            }
        }
    }

    while let Some(node) = heap.pop() {
        best_bound = node.bound;
        let gap_ok = |inc: f64, bound: f64| (inc - bound) <= cfg.rel_gap * inc.abs().max(1.0);
        if let Some(inc) = incumbent {
            if gap_ok(inc, node.bound) {
                termination = Termination::Gap;
                break;
            }
        }
        if nodes >= cfg.node_limit {
            termination = Termination::NodeLimit;
            break;
        }
        if let Some(limit) = cfg.time_limit {
            if started.elapsed() > limit {
                termination = Termination::TimeLimit;
                break;
            }
        }
        nodes += 1;
        let mut out = solve_node(&base_lp, &node.fixes, Some(&node.warm));
        if out.status == LpStatus::Infeasible {
            continue;
        }
        if out.status != LpStatus::Optimal {
            return Err(SolverError::Lp(out.status));
        }
        // One separation round below the root, within the depth limit.
        if node.depth > 0 && node.depth <= cfg.cut_depth_limit && !cfg.cut_policy.is_empty() {
            let added = cut_state.round(
                &mut work,
                gens,
                &out.values,
                &cfg.cut_policy,
                cfg.violation_tol,
                true,
            );
            if added > 0 {
                base_lp = work.to_lp();
                out = solve_node(&base_lp, &node.fixes, Some(&out.statuses));
                if out.status == LpStatus::Infeasible {
                    continue;
                }
                if out.status != LpStatus::Optimal {
                    return Err(SolverError::Lp(out.status));
                }
            }
        }
        if let Some(inc) = incumbent {
            if out.objective >= inc - cfg.rel_gap * inc.abs().max(1.0) {
                continue;
            }
        }
        // Most fractional binary, lowest index on ties.
        let mut branch: Option<(usize, f64)> = None;
        for &j in &binaries {
            let frac = (out.values[j] - out.values[j].round()).abs();
            if frac > INT_TOL && branch.is_none_or(|(_, best)| frac > best + 1e-12) {
                branch = Some((j, frac));
            }
        }
        // Rounding probe: fix every binary at its nearest value and price
        // the remaining continuous problem. Keeps the search supplied with
        // incumbents long before the tree closes. Candidates violating the
        // pure-binary rows are skipped, and the priced LP gets a short
        // leash so hopeless probes stay cheap.
        if branch.is_some() && (incumbent.is_none() || nodes % 8 == 1) {
            let rounded: Vec<(usize, f64)> = binaries
                .iter()
                .map(|&j| (j, out.values[j].round()))
                .collect();
            if rounded_passes_binary_rows(&work, &rounded) {
                let mut lp = base_lp.clone();
                for &(j, v) in &rounded {
                    lp.lb[j] = v;
                    lp.ub[j] = v;
                }
                let probe = simplex::solve_warm_with_limit(&lp, &out.statuses, 2_000);
                if probe.status == LpStatus::Optimal
                    && incumbent.is_none_or(|inc| probe.objective < inc)
                {
                    incumbent = Some(probe.objective);
                    incumbent_values = Some(probe.values);
                }
            }
        }
        match branch {
            None => {
                // Integral: a new incumbent if it improves.
                if incumbent.is_none_or(|inc| out.objective < inc) {
                    incumbent = Some(out.objective);
                    incumbent_values = Some(out.values.clone());
                }
            }
            Some((j, _)) => {
                let warm = std::rc::Rc::new(out.statuses);
                for value in [0.0, 1.0] {
                    let mut fixes = node.fixes.clone();
                    fixes.push((j, value));
                    heap.push(Node {
                        id: next_id,
                        bound: out.objective,
                        depth: node.depth + 1,
                        fixes,
                        warm: warm.clone(),
                    });
                    next_id += 1;
                }
            }
        }
    }
    if heap.is_empty() && !matches!(termination, Termination::NodeLimit | Termination::TimeLimit) {
        best_bound = incumbent.unwrap_or(f64::INFINITY);
        termination = if incumbent.is_some() {
            Termination::Gap
        } else {
            Termination::Infeasible
        };
    }
    let igap_value = incumbent
        .filter(|z| *z != 0.0)
        .map(|z| igap(z, root_objective).expect("nonzero incumbent"));
    Ok(SolveReport {
        termination,
        incumbent,
        incumbent_values,
        bound: best_bound,
        nodes,
        cuts_per_family: cut_state.per_family,
        cut_rows: cut_state.rows,
        root_objective: Some(root_objective),
        igap: igap_value,
        wall: started.elapsed(),
    })
}
