//! Brute-force ground truth in exact rational arithmetic.
//!
//! Everything here trades speed for certainty: schedules are enumerated,
//! dispatch polytopes are optimized exactly, hull claims are checked by
//! vertex enumeration, and separation is replayed by exhaustive parameter
//! sweeps. Horizons are guarded so nothing here is accidentally run at
//! experiment scale.

mod linalg;
pub mod ratlp;
mod tiny;

pub use tiny::{schedules_with_history, solve_tiny_exact, ExactSolve};

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_traits::{Signed, Zero};

use crate::cuts::{admissible_params, build_cut, CutError, FamilyKind, ParamPolicy};
use crate::separation::{candidate_better, CutCandidate};
use crate::types::{
    evaluate_inequality, validate_generator, Direction, FractionalPoint, GeneratorParams,
    LinearInequality,
};

/// Arbitrary-precision rational scalar used throughout the oracle.
pub type Rat = num_rational::BigRational;

/// Exact conversion of a finite float.
pub fn rat(v: f64) -> Rat {
    Rat::from_float(v).expect("finite float")
}

pub fn rat_to_f64(v: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// The requested computation exceeds the guarded enumeration budget.
    Budget(String),
    /// The instance admits no feasible joint schedule.
    Infeasible,
    /// Face dimensions are undefined for invalid inequalities.
    InvalidInequality(String),
    InvalidArgument(String),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::Budget(msg) => write!(f, "budget exceeded: {msg}"),
            OracleError::Infeasible => write!(f, "instance is infeasible"),
            OracleError::InvalidInequality(msg) => write!(f, "invalid inequality: {msg}"),
            OracleError::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
        }
    }
}

impl std::error::Error for OracleError {}

/// The single-generator feasible set over a horizon, without initial
/// conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polytope {
    pub gen: GeneratorParams,
    pub horizon: usize,
}

impl Polytope {
    pub fn new(gen: GeneratorParams, horizon: usize) -> Result<Self, OracleError> {
        if horizon == 0 {
            return Err(OracleError::InvalidArgument(
                "horizon must be positive".into(),
            ));
        }
        if !validate_generator(&gen).is_valid() {
            return Err(OracleError::InvalidArgument(
                "generator parameters violate the model assumptions".into(),
            ));
        }
        Ok(Polytope { gen, horizon })
    }
}

/// All binary schedules satisfying the minimum up/down rows.
///
/// Runs touching the horizon boundary are unconstrained on the outside,
/// matching a polytope with no initial conditions.
pub fn feasible_schedules(spec: &Polytope) -> Result<Vec<Vec<bool>>, OracleError> {
    let t_len = spec.horizon;
    if t_len > 20 {
        return Err(OracleError::Budget(format!(
            "schedule enumeration needs 2^{t_len} candidates"
        )));
    }
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << t_len) {
        let y: Vec<bool> = (0..t_len).map(|i| mask & (1 << i) != 0).collect();
        if schedule_feasible(&y, spec.gen.min_up, spec.gen.min_down) {
            out.push(y);
        }
    }
    Ok(out)
}

pub(crate) fn schedule_feasible(y: &[bool], min_up: usize, min_down: usize) -> bool {
    let t_len = y.len();
    for t in 2..=t_len {
        if y[t - 1] && !y[t - 2] {
            // Run starts at t: must stay on through min(T, t + L - 1).
            let end = t_len.min(t + min_up - 1);
            if (t..=end).any(|k| !y[k - 1]) {
                return false;
            }
        }
        if !y[t - 1] && y[t - 2] {
            let end = t_len.min(t + min_down - 1);
            if (t..=end).any(|k| y[k - 1]) {
                return false;
            }
        }
    }
    true
}

/// Number of feasible schedules via a run-length recursion, used to
/// cross-check the enumeration.
pub fn count_schedules_dp(min_up: usize, min_down: usize, t_len: usize) -> u64 {
    // State: (value, capped run length, run started at period 1).
    let mut states: HashMap<(bool, usize, bool), u64> = HashMap::new();
    states.insert((true, 1, true), 1);
    states.insert((false, 1, true), 1);
    for _ in 2..=t_len {
        let mut next: HashMap<(bool, usize, bool), u64> = HashMap::new();
        for ((val, len, boundary), count) in states {
            let cap = if val { min_up } else { min_down };
            // Extend the current run.
            *next.entry((val, (len + 1).min(cap), boundary)).or_insert(0) += count;
            // Switch value; interior runs must have reached their minimum.
            if boundary || len >= cap {
                *next.entry((!val, 1, false)).or_insert(0) += count;
            }
        }
        states = next;
    }
    states.values().sum()
}

/// On-runs of a schedule as inclusive 1-based `(start, end)` pairs.
pub(crate) fn on_runs(y: &[bool]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, &on) in y.iter().enumerate() {
        match (on, start) {
            (true, None) => start = Some(i + 1),
            (false, Some(s)) => {
                runs.push((s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, y.len()));
    }
    runs
}

/// Exact maximum of a linear objective over the dispatch polytope of a
/// fixed schedule, with a maximizing witness.
///
/// The polytope decomposes into independent on-runs: inside a run the
/// output sits in the capacity box, moves by at most `ramp` per step, and
/// is capped at `start_ramp` in an in-horizon start or stop period. Every
/// vertex coordinate is an anchor value shifted by whole ramp steps, so a
/// dynamic program over that finite grid is an exact linear optimizer.
pub fn max_over_schedule(spec: &Polytope, y: &[bool], x_obj: &[Rat]) -> (Rat, Vec<Rat>) {
    let p = &spec.gen;
    let t_len = spec.horizon;
    assert_eq!(y.len(), t_len);
    assert_eq!(x_obj.len(), t_len);
    let mut witness = vec![Rat::zero(); t_len];
    let mut total = Rat::zero();
    let cap_min = rat(p.cap_min);
    let cap_max = rat(p.cap_max);
    let start_ramp = rat(p.start_ramp);
    let ramp = rat(p.ramp);
    for (a, b) in on_runs(y) {
        let len = b - a + 1;
        let entry_cap = a >= 2;
        let exit_cap = b + 1 <= t_len;
        let mut grid: BTreeSet<Rat> = BTreeSet::new();
        let mut anchors = vec![cap_min.clone(), cap_max.clone()];
        if entry_cap || exit_cap {
            anchors.push(start_ramp.clone());
        }
        for anchor in &anchors {
            for j in -(len as i64 - 1)..=(len as i64 - 1) {
                let v = anchor + &ramp * Rat::from_integer(j.into());
                if v >= cap_min && v <= cap_max {
                    grid.insert(v);
                }
            }
        }
        let grid: Vec<Rat> = grid.into_iter().collect();
        let allowed = |pos: usize, v: &Rat| -> bool {
            !(pos == a && entry_cap && v > &start_ramp)
                && !(pos == b && exit_cap && v > &start_ramp)
        };
        // Forward DP over the grid with backtracking pointers.
        let mut value: Vec<Option<Rat>> = grid
            .iter()
            .map(|v| allowed(a, v).then(|| &x_obj[a - 1] * v))
            .collect();
        let mut parents: Vec<Vec<usize>> = Vec::new();
        for pos in (a + 1)..=b {
            let mut next: Vec<Option<Rat>> = vec![None; grid.len()];
            let mut parent = vec![usize::MAX; grid.len()];
            for (i, v) in grid.iter().enumerate() {
                if !allowed(pos, v) {
                    continue;
                }
                for (j, w) in grid.iter().enumerate() {
                    let Some(prev) = &value[j] else { continue };
                    if (v - w).abs() > ramp {
                        continue;
                    }
                    let cand = prev + &(&x_obj[pos - 1] * v);
                    if next[i].as_ref().is_none_or(|cur| cand > *cur) {
                        next[i] = Some(cand);
                        parent[i] = j;
                    }
                }
            }
            parents.push(parent);
            value = next;
        }
        let (mut best_idx, mut best) = (usize::MAX, None::<Rat>);
        for (i, v) in value.iter().enumerate() {
            let Some(v) = v else { continue };
            if best.as_ref().is_none_or(|cur| v > cur) {
                best = Some(v.clone());
                best_idx = i;
            }
        }
        let best = best.expect("on-run dispatch polytope is never empty");
        total = &total + &best;
        // Recover the witness back to front.
        let mut idx = best_idx;
        for pos in (a..=b).rev() {
            witness[pos - 1] = grid[idx].clone();
            if pos > a {
                idx = parents[pos - a - 1][idx];
            }
        }
    }
    (total, witness)
}

/// Exact maximum of `y_obj . y + x_obj . x` over the feasible set.
pub fn max_linear(spec: &Polytope, x_obj: &[f64], y_obj: &[f64]) -> Result<Rat, OracleError> {
    if spec.horizon > 12 {
        return Err(OracleError::Budget(format!(
            "max_linear guarded at horizon 12, got {}",
            spec.horizon
        )));
    }
    let x_obj: Vec<Rat> = x_obj.iter().map(|&v| rat(v)).collect();
    let y_obj: Vec<Rat> = y_obj.iter().map(|&v| rat(v)).collect();
    let mut best: Option<Rat> = None;
    for y in feasible_schedules(spec)? {
        let (xval, _) = max_over_schedule(spec, &y, &x_obj);
        let mut val = xval;
        for (t, &on) in y.iter().enumerate() {
            if on {
                val = &val + &y_obj[t];
            }
        }
        if best.as_ref().is_none_or(|cur| val > *cur) {
            best = Some(val);
        }
    }
    best.ok_or(OracleError::Infeasible)
}

/// Exact worst-case violation of an inequality over the feasible set,
/// with the schedule and dispatch attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub max_violation: Rat,
    pub witness_y: Vec<bool>,
    pub witness_x: Vec<Rat>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        !self.max_violation.is_positive()
    }
}

/// Reusable validity checker that caches the per-schedule dispatch optima
/// of each distinct x-objective, so sweeping thousands of cuts over one
/// polytope stays cheap.
pub struct ValidityOracle {
    spec: Polytope,
    schedules: Vec<Vec<bool>>,
    #[allow(clippy::type_complexity)]
    cache: RefCell<HashMap<Vec<(usize, Rat)>, Vec<(Rat, Vec<Rat>)>>>,
}

impl ValidityOracle {
    pub fn new(spec: Polytope) -> Result<Self, OracleError> {
        if spec.horizon > 10 {
            return Err(OracleError::Budget(format!(
                "validity checks guarded at horizon 10, got {}",
                spec.horizon
            )));
        }
        let schedules = feasible_schedules(&spec)?;
        Ok(ValidityOracle {
            spec,
            schedules,
            cache: RefCell::new(HashMap::new()),
        })
    }

    pub fn spec(&self) -> &Polytope {
        &self.spec
    }

    pub fn schedules(&self) -> &[Vec<bool>] {
        &self.schedules
    }

    pub fn check(&self, q: &LinearInequality) -> Result<ValidityReport, OracleError> {
        let t_len = self.spec.horizon;
        if q.max_period() > t_len {
            return Err(OracleError::InvalidArgument(format!(
                "inequality references period {} beyond horizon {t_len}",
                q.max_period()
            )));
        }
        let key: Vec<(usize, Rat)> = q.x_coeffs.iter().map(|(&t, &c)| (t, rat(c))).collect();
        {
            let mut cache = self.cache.borrow_mut();
            if !cache.contains_key(&key) {
                let mut dense = vec![Rat::zero(); t_len];
                for (t, c) in &key {
                    dense[t - 1] = c.clone();
                }
                let per_schedule: Vec<(Rat, Vec<Rat>)> = self
                    .schedules
                    .iter()
                    .map(|y| max_over_schedule(&self.spec, y, &dense))
                    .collect();
                cache.insert(key.clone(), per_schedule);
            }
        }
        let cache = self.cache.borrow();
        let per_schedule = &cache[&key];
        let rhs = rat(q.rhs);
        let y_terms: Vec<(usize, Rat)> = q.y_coeffs.iter().map(|(&t, &c)| (t, rat(c))).collect();
        let mut best: Option<(Rat, usize)> = None;
        for (si, y) in self.schedules.iter().enumerate() {
            let mut val = per_schedule[si].0.clone();
            for (t, c) in &y_terms {
                if y[t - 1] {
                    val = &val + c;
                }
            }
            val = &val - &rhs;
            if best.as_ref().is_none_or(|(cur, _)| val > *cur) {
                best = Some((val, si));
            }
        }
        let (max_violation, si) = best.ok_or(OracleError::Infeasible)?;
        Ok(ValidityReport {
            max_violation,
            witness_y: self.schedules[si].clone(),
            witness_x: per_schedule[si].1.clone(),
        })
    }
}

/// One-shot validity check; see [`ValidityOracle`] for sweeps.
pub fn check_valid(q: &LinearInequality, spec: &Polytope) -> Result<ValidityReport, OracleError> {
    ValidityOracle::new(*spec)?.check(q)
}

/// A point of the feasible set with exact dispatch values.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexPoint {
    pub x: Vec<Rat>,
    pub y: Vec<bool>,
}

/// All basic feasible dispatch points per schedule, deduplicated exactly.
///
/// The union spans the full feasible set: its convex hull is the hull of
/// the whole polytope, which is what the face-rank checks need.
pub fn vertices(spec: &Polytope) -> Result<Vec<VertexPoint>, OracleError> {
    if spec.horizon > 5 {
        return Err(OracleError::Budget(format!(
            "vertex enumeration guarded at horizon 5, got {}",
            spec.horizon
        )));
    }
    let p = &spec.gen;
    let t_len = spec.horizon;
    let mut out = Vec::new();
    for y in feasible_schedules(spec)? {
        let free: Vec<usize> = (1..=t_len).filter(|&t| y[t - 1]).collect();
        let n = free.len();
        if n == 0 {
            out.push(VertexPoint {
                x: vec![Rat::zero(); t_len],
                y,
            });
            continue;
        }
        let col_of: HashMap<usize, usize> =
            free.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        // Rows a.x <= b over the free coordinates.
        let mut rows: Vec<(Vec<Rat>, Rat)> = Vec::new();
        let push_row = |coeffs: &[(usize, i64)], b: Rat, rows: &mut Vec<(Vec<Rat>, Rat)>| {
            let mut a = vec![Rat::zero(); n];
            for &(t, c) in coeffs {
                a[col_of[&t]] = Rat::from_integer(c.into());
            }
            rows.push((a, b));
        };
        for (a, b) in on_runs(&y) {
            for t in a..=b {
                push_row(&[(t, 1)], rat(p.cap_max), &mut rows);
                push_row(&[(t, -1)], -rat(p.cap_min), &mut rows);
            }
            if a >= 2 {
                push_row(&[(a, 1)], rat(p.start_ramp), &mut rows);
            }
            if b + 1 <= t_len {
                push_row(&[(b, 1)], rat(p.start_ramp), &mut rows);
            }
            for t in (a + 1)..=b {
                push_row(&[(t, 1), (t - 1, -1)], rat(p.ramp), &mut rows);
                push_row(&[(t, -1), (t - 1, 1)], rat(p.ramp), &mut rows);
            }
        }
        let mut seen: BTreeSet<Vec<Rat>> = BTreeSet::new();
        for choice in combinations(rows.len(), n) {
            let mat: Vec<Vec<Rat>> = choice.iter().map(|&r| rows[r].0.clone()).collect();
            let rhs: Vec<Rat> = choice.iter().map(|&r| rows[r].1.clone()).collect();
            let Some(x) = linalg::solve_square(mat, rhs) else {
                continue;
            };
            let feasible = rows.iter().all(|(a, b)| {
                let mut lhs = Rat::zero();
                for (c, v) in a.iter().zip(&x) {
                    if !c.is_zero() {
                        lhs = &lhs + &(c * v);
                    }
                }
                lhs <= *b
            });
            if feasible && seen.insert(x.clone()) {
                let mut full = vec![Rat::zero(); t_len];
                for (i, &t) in free.iter().enumerate() {
                    full[t - 1] = x[i].clone();
                }
                out.push(VertexPoint {
                    x: full,
                    y: y.clone(),
                });
            }
        }
    }
    Ok(out)
}

/// All `k`-element index combinations of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut choice: Vec<usize> = (0..k).collect();
    loop {
        out.push(choice.clone());
        let mut i = k;
        let mut moved = false;
        while i > 0 {
            i -= 1;
            if choice[i] != i + n - k {
                choice[i] += 1;
                for j in (i + 1)..k {
                    choice[j] = choice[j - 1] + 1;
                }
                moved = true;
                break;
            }
        }
        if !moved {
            break;
        }
    }
    out
}

/// Exact value of an inequality's left side minus its right side at a point.
pub fn exact_violation(q: &LinearInequality, x: &[Rat], y: &[bool]) -> Rat {
    let mut lhs = Rat::zero();
    for (&t, &c) in &q.x_coeffs {
        lhs = &lhs + &(rat(c) * &x[t - 1]);
    }
    for (&t, &c) in &q.y_coeffs {
        if y[t - 1] {
            lhs = &lhs + &rat(c);
        }
    }
    &lhs - &rat(q.rhs)
}

/// Affine dimension of the face of the feasible hull cut out by a valid
/// inequality: the rank of its tight points minus one. A facet has
/// dimension `2T - 1`; an empty tight set reports `-1`.
pub fn face_dimension(q: &LinearInequality, spec: &Polytope) -> Result<i64, OracleError> {
    FaceOracle::new(*spec)?.dimension(q)
}

/// Face-rank checker that enumerates the polytope's points once and
/// reuses them across many inequalities.
pub struct FaceOracle {
    validity: ValidityOracle,
    points: Vec<VertexPoint>,
}

impl FaceOracle {
    pub fn new(spec: Polytope) -> Result<Self, OracleError> {
        let points = vertices(&spec)?;
        Ok(FaceOracle {
            validity: ValidityOracle::new(spec)?,
            points,
        })
    }

    /// Affine dimension of the face cut out by a valid inequality; facets
    /// sit at one below the space dimension.
    pub fn dimension(&self, q: &LinearInequality) -> Result<i64, OracleError> {
        let report = self.validity.check(q)?;
        if !report.is_valid() {
            return Err(OracleError::InvalidInequality(format!(
                "max violation {} is positive, face undefined",
                report.max_violation
            )));
        }
        let tight: Vec<&VertexPoint> = self
            .points
            .iter()
            .filter(|pt| exact_violation(q, &pt.x, &pt.y).is_zero())
            .collect();
        if tight.is_empty() {
            return Ok(-1);
        }
        let embed = |pt: &VertexPoint| -> Vec<Rat> {
            let mut v: Vec<Rat> = pt.x.clone();
            v.extend(pt.y.iter().map(|&b| bool_rat(b)));
            v
        };
        let base = embed(tight[0]);
        let rows: Vec<Vec<Rat>> = tight[1..]
            .iter()
            .map(|pt| {
                embed(pt)
                    .into_iter()
                    .zip(&base)
                    .map(|(a, b)| &a - b)
                    .collect()
            })
            .collect();
        Ok(linalg::rank(rows) as i64)
    }
}

/// A row `a . (x1, x2, y1, y2) <= b` of the two-period hull description.
pub type HullRow = ([Rat; 4], Rat);

/// The two-period hull description, expanded to twelve scalar rows.
pub fn two_period_hull_rows(p: &GeneratorParams) -> Vec<HullRow> {
    let one = || Rat::from_integer(1.into());
    let z = Rat::zero;
    let cmin = || rat(p.cap_min);
    let cmax = || rat(p.cap_max);
    let vbar = || rat(p.start_ramp);
    let v = || rat(p.ramp);
    vec![
        // Status bounds.
        ([z(), z(), one(), z()], one()),
        ([z(), z(), z(), one()], one()),
        // Capacity boxes.
        ([-one(), z(), cmin(), z()], z()),
        ([one(), z(), -cmax(), z()], z()),
        ([z(), -one(), z(), cmin()], z()),
        ([z(), one(), z(), -cmax()], z()),
        // Start/stop capacity rows.
        ([one(), z(), -vbar(), -(cmax() - vbar())], z()),
        ([z(), one(), -(cmax() - vbar()), -vbar()], z()),
        // Strengthened ramp rows.
        ([-one(), one(), cmin(), -(cmin() + v())], z()),
        ([-one(), one(), vbar() - v(), -vbar()], z()),
        ([one(), -one(), -(cmin() + v()), cmin()], z()),
        ([one(), -one(), -vbar(), vbar() - v()], z()),
    ]
}

/// Outcome of the two-period hull verification.
#[derive(Debug, Clone)]
pub struct HullReport {
    /// Worst exact violation of any hull row over the enumerated feasible
    /// points; nonpositive means every row is valid.
    pub max_row_violation: Rat,
    /// Vertices of the hull system that are not binary feasible points.
    pub bad_vertices: Vec<[Rat; 4]>,
    pub vertex_count: usize,
}

impl HullReport {
    pub fn holds(&self) -> bool {
        !self.max_row_violation.is_positive() && self.bad_vertices.is_empty()
    }
}

/// Verifies both hull inclusions for the two-period feasible set: every
/// row is valid over the enumerated points, and every vertex of the row
/// system is a binary feasible point.
pub fn check_hull_t2(p: &GeneratorParams) -> Result<HullReport, OracleError> {
    check_hull_t2_system(p, &two_period_hull_rows(p))
}

/// Same check against a caller-supplied row system (used to confirm the
/// check rejects perturbed descriptions).
pub fn check_hull_t2_system(
    p: &GeneratorParams,
    rows: &[HullRow],
) -> Result<HullReport, OracleError> {
    let spec = Polytope::new(*p, 2)?;
    let points = vertices(&spec)?;
    let mut max_row_violation: Option<Rat> = None;
    for pt in &points {
        let coords = [
            pt.x[0].clone(),
            pt.x[1].clone(),
            bool_rat(pt.y[0]),
            bool_rat(pt.y[1]),
        ];
        for (a, b) in rows {
            let mut lhs = Rat::zero();
            for (c, v) in a.iter().zip(&coords) {
                if !c.is_zero() {
                    lhs = &lhs + &(c * v);
                }
            }
            let viol = &lhs - b;
            if max_row_violation.as_ref().is_none_or(|m| viol > *m) {
                max_row_violation = Some(viol);
            }
        }
    }

    // Vertex enumeration of the row system in 4 dimensions.
    let mut seen: BTreeSet<Vec<Rat>> = BTreeSet::new();
    let mut bad_vertices = Vec::new();
    let mut count = 0usize;
    for choice in combinations(rows.len(), 4) {
        let mat: Vec<Vec<Rat>> = choice.iter().map(|&r| rows[r].0.to_vec()).collect();
        let rhs: Vec<Rat> = choice.iter().map(|&r| rows[r].1.clone()).collect();
        let Some(x) = linalg::solve_square(mat, rhs) else {
            continue;
        };
        let feasible = rows.iter().all(|(a, b)| {
            let mut lhs = Rat::zero();
            for (c, v) in a.iter().zip(&x) {
                if !c.is_zero() {
                    lhs = &lhs + &(c * v);
                }
            }
            lhs <= *b
        });
        if !feasible || !seen.insert(x.clone()) {
            continue;
        }
        count += 1;
        let point = [x[0].clone(), x[1].clone(), x[2].clone(), x[3].clone()];
        if !vertex_in_p2(p, &point) {
            bad_vertices.push(point);
        }
    }
    Ok(HullReport {
        max_row_violation: max_row_violation.unwrap_or_else(Rat::zero),
        bad_vertices,
        vertex_count: count,
    })
}

fn bool_rat(b: bool) -> Rat {
    if b {
        Rat::from_integer(1.into())
    } else {
        Rat::zero()
    }
}

/// Membership of a binary-status point in the two-period feasible set.
fn vertex_in_p2(p: &GeneratorParams, point: &[Rat; 4]) -> bool {
    let (x1, x2, y1, y2) = (&point[0], &point[1], &point[2], &point[3]);
    let is_binary = |v: &Rat| v.is_zero() || *v == Rat::from_integer(1.into());
    if !is_binary(y1) || !is_binary(y2) {
        return false;
    }
    let on1 = !y1.is_zero();
    let on2 = !y2.is_zero();
    let cap = |x: &Rat, on: bool| -> bool {
        if on {
            *x >= rat(p.cap_min) && *x <= rat(p.cap_max)
        } else {
            x.is_zero()
        }
    };
    if !cap(x1, on1) || !cap(x2, on2) {
        return false;
    }
    let up_lim = if on1 { rat(p.ramp) } else { rat(p.start_ramp) };
    if x2 - x1 > up_lim {
        return false;
    }
    let down_lim = if on2 { rat(p.ramp) } else { rat(p.start_ramp) };
    x1 - x2 <= down_lim
}

/// Exhaustive most-violated search over one family and direction, the
/// comparison target for the fast separators.
pub fn brute_separate(
    pt: &FractionalPoint,
    kind: FamilyKind,
    direction: Direction,
    p: &GeneratorParams,
    tol: f64,
    max_params: usize,
) -> Result<Option<CutCandidate>, OracleError> {
    let horizon = pt.horizon();
    if horizon > 8 {
        return Err(OracleError::Budget(format!(
            "brute separation guarded at horizon 8, got {horizon}"
        )));
    }
    let params = admissible_params(
        kind,
        direction,
        p,
        horizon,
        ParamPolicy::Exhaustive { max_params },
    )
    .map_err(|e| match e {
        CutError::InvalidArgument(msg) => OracleError::Budget(msg),
        CutError::Hypothesis(name) => OracleError::InvalidArgument(name.to_string()),
    })?;
    let mut best: Option<CutCandidate> = None;
    for cp in params {
        let q = build_cut(kind, p, horizon, &cp).expect("admissible params build");
        let violation = evaluate_inequality(&q, pt).expect("horizon checked");
        let cand = CutCandidate {
            params: q.params.clone(),
            inequality: q,
            violation,
        };
        if best.as_ref().is_none_or(|b| candidate_better(&cand, b)) {
            best = Some(cand);
        }
    }
    Ok(best.filter(|c| c.violation > tol * 1f64.max(c.inequality.rhs.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuts::{single_var_cut, two_var_cut};
    use crate::types::{CutParams, Family};

    fn example_generator() -> GeneratorParams {
        GeneratorParams {
            cap_max: 80.0,
            cap_min: 8.0,
            min_up: 5,
            min_down: 5,
            ramp: 10.0,
            start_ramp: 15.0,
        }
    }

    fn small_generator() -> GeneratorParams {
        GeneratorParams {
            cap_max: 80.0,
            cap_min: 8.0,
            min_up: 2,
            min_down: 2,
            ramp: 10.0,
            start_ramp: 15.0,
        }
    }

    #[test]
    fn schedules_match_the_hand_enumeration() {
        let spec = Polytope::new(small_generator(), 3).unwrap();
        let got = feasible_schedules(&spec).unwrap();
        let expect: Vec<Vec<bool>> = [
            [false, false, false],
            [true, false, false],
            [false, true, true],
            [true, true, false],
            [false, false, true],
            [true, true, true],
        ]
        .iter()
        .map(|a| a.to_vec())
        .collect();
        assert_eq!(got.len(), 6);
        for e in &expect {
            assert!(got.contains(e), "missing {e:?}");
        }
    }

    #[test]
    fn unit_min_times_leave_all_schedules() {
        let mut p = small_generator();
        p.min_up = 1;
        p.min_down = 1;
        let spec = Polytope::new(p, 5).unwrap();
        assert_eq!(feasible_schedules(&spec).unwrap().len(), 32);
    }

    #[test]
    fn recursion_count_matches_enumeration() {
        for (l, d, t) in [(2, 2, 3), (3, 2, 6), (1, 4, 5), (5, 5, 8), (2, 3, 9)] {
            let p = GeneratorParams {
                min_up: l,
                min_down: d,
                ..small_generator()
            };
            let spec = Polytope::new(p, t).unwrap();
            let count = feasible_schedules(&spec).unwrap().len() as u64;
            assert_eq!(count, count_schedules_dp(l, d, t), "L={l} D={d} T={t}");
        }
    }

    #[test]
    fn at_most_one_recent_startup_per_online_period() {
        let spec = Polytope::new(small_generator(), 7).unwrap();
        for y in feasible_schedules(&spec).unwrap() {
            for t in 2..=7usize {
                if !y[t - 1] {
                    continue;
                }
                let window = (t - 2).min(spec.gen.min_up);
                let starts = (0..=window)
                    .filter(|&j| y[t - j - 1] && !y[t - j - 2])
                    .count();
                assert!(starts <= 1, "schedule {y:?} has {starts} starts near {t}");
            }
        }
    }

    #[test]
    fn dispatch_maximum_examples() {
        let spec = Polytope::new(example_generator(), 2).unwrap();
        let e2 = [Rat::zero(), rat(1.0)];
        let (max_on, _) = max_over_schedule(&spec, &[true, true], &e2);
        assert_eq!(max_on, rat(80.0));
        let (max_start, witness) = max_over_schedule(&spec, &[false, true], &e2);
        assert_eq!(max_start, rat(15.0));
        assert_eq!(witness[0], Rat::zero());
        assert_eq!(max_linear(&spec, &[0.0, 1.0], &[0.0, 0.0]).unwrap(), rat(80.0));
        assert_eq!(max_linear(&spec, &[0.0, 0.0], &[0.0, 0.0]).unwrap(), Rat::zero());
    }

    #[test]
    fn dispatch_maximum_agrees_with_the_exact_lp() {
        use crate::simplex::LpProblem;
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(21);
        let p = small_generator();
        for t_len in 2..=5usize {
            let spec = Polytope::new(p, t_len).unwrap();
            for y in feasible_schedules(&spec).unwrap() {
                for _ in 0..3 {
                    let obj: Vec<f64> = (0..t_len)
                        .map(|_| rng.gen_range(-8i32..8) as f64 / 2.0)
                        .collect();
                    let obj_rat: Vec<Rat> = obj.iter().map(|&v| rat(v)).collect();
                    let (dp_val, dp_wit) = max_over_schedule(&spec, &y, &obj_rat);
                    // Independent route: maximize with the exact simplex
                    // over the same substituted rows.
                    let mut lp = LpProblem::default();
                    let mut var_of = vec![None; t_len];
                    for t in 1..=t_len {
                        if !y[t - 1] {
                            continue;
                        }
                        let j = lp.obj.len();
                        lp.obj.push(-obj[t - 1]);
                        lp.lb.push(p.cap_min);
                        lp.ub.push(p.cap_max);
                        lp.cols.push(Vec::new());
                        var_of[t - 1] = Some(j);
                    }
                    for (a, b) in on_runs(&y) {
                        if a >= 2 {
                            let row = lp.row_lb.len();
                            lp.row_lb.push(f64::NEG_INFINITY);
                            lp.row_ub.push(p.start_ramp);
                            lp.cols[var_of[a - 1].unwrap()].push((row, 1.0));
                        }
                        if b < t_len {
                            let row = lp.row_lb.len();
                            lp.row_lb.push(f64::NEG_INFINITY);
                            lp.row_ub.push(p.start_ramp);
                            lp.cols[var_of[b - 1].unwrap()].push((row, 1.0));
                        }
                        for t in (a + 1)..=b {
                            let row = lp.row_lb.len();
                            lp.row_lb.push(-p.ramp);
                            lp.row_ub.push(p.ramp);
                            lp.cols[var_of[t - 1].unwrap()].push((row, 1.0));
                            lp.cols[var_of[t - 2].unwrap()].push((row, -1.0));
                        }
                    }
                    let exact = ratlp::solve_exact(&lp, None, 100_000).unwrap();
                    assert_eq!(exact.status, ratlp::ExactStatus::Optimal);
                    assert_eq!(-exact.objective, dp_val, "objective {obj:?} schedule {y:?}");
                    // The witness itself must attain the value.
                    let mut val = Rat::zero();
                    for t in 0..t_len {
                        val = &val + &(&obj_rat[t] * &dp_wit[t]);
                    }
                    assert_eq!(val, dp_val);
                }
            }
        }
    }

    #[test]
    fn worked_example_inequality_is_valid_at_horizon_nine() {
        let p = example_generator();
        let spec = Polytope::new(p, 9).unwrap();
        let cp = CutParams::new(8, crate::types::Direction::Backward).with_lags(vec![0, 2, 4]);
        let q = single_var_cut(&p, 9, &cp).unwrap();
        let report = check_valid(&q, &spec).unwrap();
        assert!(report.is_valid(), "violation {}", report.max_violation);
    }

    #[test]
    fn wrong_bound_is_caught_with_a_witness() {
        let p = small_generator();
        let spec = Polytope::new(p, 3).unwrap();
        let mut q = LinearInequality::new(
            Family::SingleVar,
            CutParams::new(2, crate::types::Direction::Backward),
            0.0,
        );
        q.add_x(2, 1.0);
        q.add_y(2, -p.cap_min);
        let report = check_valid(&q, &spec).unwrap();
        assert_eq!(report.max_violation, rat(p.cap_max - p.cap_min));
        assert_eq!(report.witness_x[1], rat(p.cap_max));
    }

    #[test]
    fn single_period_vertices() {
        let p = small_generator();
        let spec = Polytope::new(p, 1).unwrap();
        let verts = vertices(&spec).unwrap();
        assert_eq!(verts.len(), 3);
        let xs: Vec<Rat> = verts.iter().map(|v| v.x[0].clone()).collect();
        assert!(xs.contains(&Rat::zero()));
        assert!(xs.contains(&rat(8.0)));
        assert!(xs.contains(&rat(80.0)));
    }

    #[test]
    fn every_vertex_is_feasible_and_spans_sampled_points() {
        use rand::{Rng, SeedableRng};
        let p = small_generator();
        let spec = Polytope::new(p, 4).unwrap();
        let verts = vertices(&spec).unwrap();
        // Feasibility of each vertex.
        for v in &verts {
            assert!(schedule_feasible(&v.y, p.min_up, p.min_down));
            for (t, &on) in v.y.iter().enumerate() {
                if on {
                    assert!(v.x[t] >= rat(p.cap_min) && v.x[t] <= rat(p.cap_max));
                } else {
                    assert!(v.x[t].is_zero());
                }
            }
        }
        // Random feasible dispatches lie in the convex hull of the vertex
        // set: solve an exact feasibility LP in the combination weights.
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let schedules = feasible_schedules(&spec).unwrap();
        for _ in 0..100 {
            let y = &schedules[rng.gen_range(0..schedules.len())];
            // Random point of the dispatch polytope via a random convex
            // combination of its own vertices.
            let own: Vec<&VertexPoint> = verts.iter().filter(|v| &v.y == y).collect();
            let w: Vec<f64> = (0..own.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
            let total: f64 = w.iter().sum();
            let mut point = vec![Rat::zero(); 4];
            for (wi, v) in w.iter().zip(&own) {
                let scale = rat(*wi) / rat(total);
                for t in 0..4 {
                    point[t] = &point[t] + &(&scale * &v.x[t]);
                }
            }
            // Membership LP: weights over all vertices with matching status
            // pattern must reproduce the point exactly.
            let mut lp = crate::simplex::LpProblem::default();
            for _ in 0..own.len() {
                lp.obj.push(0.0);
                lp.lb.push(0.0);
                lp.ub.push(1.0);
                lp.cols.push(Vec::new());
            }
            for t in 0..4 {
                let row = lp.row_lb.len();
                let target = rat_to_f64(&point[t]);
                lp.row_lb.push(target);
                lp.row_ub.push(target);
                for (j, v) in own.iter().enumerate() {
                    lp.cols[j].push((row, rat_to_f64(&v.x[t])));
                }
            }
            let row = lp.row_lb.len();
            lp.row_lb.push(1.0);
            lp.row_ub.push(1.0);
            for j in 0..own.len() {
                lp.cols[j].push((row, 1.0));
            }
            let out = crate::simplex::solve(&lp);
            assert_eq!(out.status, crate::simplex::LpStatus::Optimal);
        }
    }

    #[test]
    fn face_dimensions_of_known_facets() {
        let p = small_generator();
        let spec = Polytope::new(p, 4).unwrap();
        // Startup-lag cut at t = 3 with both lags: a facet.
        let cp = CutParams::new(3, crate::types::Direction::Backward).with_lags(vec![0, 1]);
        let q = single_var_cut(&p, 4, &cp).unwrap();
        assert_eq!(face_dimension(&q, &spec).unwrap(), 7);
        // Two-variable cut at k = 2, t = 3: also a facet.
        let cp = CutParams::new(3, crate::types::Direction::Backward).with_gap(2, 0);
        let q = two_var_cut(&p, 4, &cp).unwrap();
        assert_eq!(face_dimension(&q, &spec).unwrap(), 7);
        // A slack inequality touches nothing.
        let mut q = LinearInequality::new(
            Family::SingleVar,
            CutParams::new(2, crate::types::Direction::Backward),
            1.0,
        );
        q.add_x(2, 1.0);
        q.add_y(2, -p.cap_max);
        assert_eq!(face_dimension(&q, &spec).unwrap(), -1);
        // An invalid inequality has no face.
        let mut bad = LinearInequality::new(
            Family::SingleVar,
            CutParams::new(2, crate::types::Direction::Backward),
            0.0,
        );
        bad.add_x(2, 1.0);
        bad.add_y(2, -p.cap_min);
        assert!(matches!(
            face_dimension(&bad, &spec),
            Err(OracleError::InvalidInequality(_))
        ));
    }

    #[test]
    fn hull_holds_for_the_example_generator() {
        let report = check_hull_t2(&example_generator()).unwrap();
        assert!(report.holds(), "bad vertices: {:?}", report.bad_vertices);
        assert!(report.vertex_count >= 8);
    }

    #[test]
    fn perturbed_hull_description_gains_a_fractional_vertex() {
        let p = example_generator();
        let mut rows = two_period_hull_rows(&p);
        // Inflate the ramp coefficient on the strengthened ramp-up row.
        rows[8].0[3] = -(rat(p.cap_min) + rat(p.ramp) + rat(p.cap_max));
        let report = check_hull_t2_system(&p, &rows).unwrap();
        assert!(!report.holds());
        assert!(!report.bad_vertices.is_empty());
    }
}

/// Draws generator parameters satisfying all model assumptions, for
/// randomized verification sweeps.
pub fn random_generator(rng: &mut impl rand::Rng) -> GeneratorParams {
    loop {
        let cap_min = rng.gen_range(2..40) as f64;
        let ramp = rng.gen_range(4..40) as f64;
        // Start ramp strictly inside (cap_min, cap_min + ramp).
        let start_ramp = cap_min + (rng.gen_range(1..8) as f64 / 8.0) * ramp;
        let cap_max = start_ramp + ramp + rng.gen_range(0..60) as f64;
        let p = GeneratorParams {
            cap_max,
            cap_min,
            min_up: rng.gen_range(1..5),
            min_down: rng.gen_range(1..5),
            ramp,
            start_ramp,
        };
        if validate_generator(&p).is_valid() {
            return p;
        }
    }
}
