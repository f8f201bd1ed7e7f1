//! Dense bounded-variable revised simplex.
//!
//! Minimizes over `lb <= v <= ub` subject to row activities staying inside
//! their ranges. Rows are handled through logical activity variables, so
//! every constraint sense (including two-sided rows) is a bound pair. The
//! basis inverse is kept explicitly and refreshed periodically; pricing is
//! most-negative-reduced-cost with a switch to lowest-index selection after
//! a run of degenerate pivots.

use std::fmt;

const FEAS_TOL: f64 = 1e-7;
const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DEGEN_TOL: f64 = 1e-10;
const REFACTOR_EVERY: usize = 100;
const DEGEN_BEFORE_BLAND: usize = 1000;

/// A linear program in minimize form: structural variables with bounds and
/// sparse columns, and per-row activity bounds (`-inf`/`inf` for one-sided
/// rows, equal bounds for equalities).
#[derive(Debug, Clone, Default)]
pub struct LpProblem {
    pub obj: Vec<f64>,
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
    /// Structural columns as `(row, coefficient)` lists.
    pub cols: Vec<Vec<(usize, f64)>>,
    pub row_lb: Vec<f64>,
    pub row_ub: Vec<f64>,
}

impl LpProblem {
    pub fn num_vars(&self) -> usize {
        self.obj.len()
    }

    pub fn num_rows(&self) -> usize {
        self.row_lb.len()
    }

    /// Activity of every row at the given structural values.
    pub fn activities(&self, values: &[f64]) -> Vec<f64> {
        let mut act = vec![0.0; self.num_rows()];
        for (j, col) in self.cols.iter().enumerate() {
            if values[j] == 0.0 {
                continue;
            }
            for &(row, coef) in col {
                act[row] += coef * values[j];
            }
        }
        act
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
            LpStatus::IterationLimit => "iteration limit",
        };
        write!(f, "{s}")
    }
}

/// Position of a variable relative to the basis, part of the solution's
/// basis descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable pinned at zero.
    FreeZero,
}

/// Simplex outcome: structural values are populated for optimal bases only.
#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub objective: f64,
    pub values: Vec<f64>,
    /// Status of every variable, structurals first then row logicals.
    pub statuses: Vec<VarStatus>,
    pub iterations: usize,
}

struct Tableau<'a> {
    lp: &'a LpProblem,
    n: usize,
    m: usize,
    lb: Vec<f64>,
    ub: Vec<f64>,
    status: Vec<VarStatus>,
    values: Vec<f64>,
    basis: Vec<usize>,
    pos_of: Vec<Option<usize>>,
    binv: Vec<f64>,
    iterations: usize,
    degenerate: usize,
    bland: bool,
}

impl<'a> Tableau<'a> {
    fn new(lp: &'a LpProblem) -> Self {
        let n = lp.num_vars();
        let m = lp.num_rows();
        let mut lb = lp.lb.clone();
        let mut ub = lp.ub.clone();
        lb.extend_from_slice(&lp.row_lb);
        ub.extend_from_slice(&lp.row_ub);
        let mut status = Vec::with_capacity(n + m);
        let mut values = vec![0.0; n + m];
        for j in 0..n {
            let s = if lb[j].is_finite() {
                values[j] = lb[j];
                VarStatus::AtLower
            } else if ub[j].is_finite() {
                values[j] = ub[j];
                VarStatus::AtUpper
            } else {
                VarStatus::FreeZero
            };
            status.push(s);
        }
        let mut basis = Vec::with_capacity(m);
        let mut pos_of = vec![None; n + m];
        for i in 0..m {
            status.push(VarStatus::Basic);
            basis.push(n + i);
            pos_of[n + i] = Some(i);
        }
        // Basis of logicals: each column is -e_i, so the inverse is -I.
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = -1.0;
        }
        let mut t = Tableau {
            lp,
            n,
            m,
            lb,
            ub,
            status,
            values,
            basis,
            pos_of,
            binv,
            iterations: 0,
            degenerate: 0,
            bland: false,
        };
        t.recompute_basics();
        t
    }

    /// Adopts a prior status vector as the starting basis. Entries beyond
    /// the vector's length are logicals of rows appended since it was
    /// captured; they stay basic. Returns false when the shape is wrong.
    fn install_statuses(&mut self, statuses: &[VarStatus]) -> bool {
        let total = self.n + self.m;
        if statuses.len() > total {
            return false;
        }
        let mut basis = Vec::with_capacity(self.m);
        for (j, s) in statuses.iter().enumerate() {
            if matches!(s, VarStatus::Basic) {
                basis.push(j);
            }
        }
        basis.extend(statuses.len()..total);
        if basis.len() != self.m {
            return false;
        }
        self.basis = basis;
        self.pos_of = vec![None; total];
        for (pos, &j) in self.basis.iter().enumerate() {
            self.pos_of[j] = Some(pos);
        }
        for j in 0..total {
            if self.pos_of[j].is_some() {
                self.status[j] = VarStatus::Basic;
                continue;
            }
            let wanted = statuses.get(j).copied().unwrap_or(VarStatus::AtLower);
            self.status[j] = match wanted {
                VarStatus::AtLower | VarStatus::Basic if self.lb[j].is_finite() => {
                    self.values[j] = self.lb[j];
                    VarStatus::AtLower
                }
                VarStatus::AtUpper if self.ub[j].is_finite() => {
                    self.values[j] = self.ub[j];
                    VarStatus::AtUpper
                }
                _ if self.lb[j].is_finite() => {
                    self.values[j] = self.lb[j];
                    VarStatus::AtLower
                }
                _ if self.ub[j].is_finite() => {
                    self.values[j] = self.ub[j];
                    VarStatus::AtUpper
                }
                _ => {
                    self.values[j] = 0.0;
                    VarStatus::FreeZero
                }
            };
        }
        // Factorize, repairing a dependent basis if the handoff was stale.
        self.refactor();
        true
    }

    fn column(&self, j: usize) -> Vec<(usize, f64)> {
        if j < self.n {
            self.lp.cols[j].clone()
        } else {
            vec![(j - self.n, -1.0)]
        }
    }

    /// Sets every basic value from the nonbasic values: `B x_B = -N x_N`.
    fn recompute_basics(&mut self) {
        let m = self.m;
        let mut rhs = vec![0.0; m];
        for j in 0..self.n + m {
            if self.pos_of[j].is_some() || self.values[j] == 0.0 {
                continue;
            }
            for (row, coef) in self.column(j) {
                rhs[row] += coef * self.values[j];
            }
        }
        for i in 0..m {
            let mut v = 0.0;
            for r in 0..m {
                v -= self.binv[i * m + r] * rhs[r];
            }
            self.values[self.basis[i]] = v;
        }
    }

    /// Rebuilds the inverse from the basis columns. A numerically
    /// dependent basis is repaired by ejecting the dependent columns and
    /// seating the logicals of the uncovered rows instead; the ejected
    /// variables move to their nearest bound and phase 1 restores
    /// feasibility on the next iterations.
    fn refactor(&mut self) {
        if self.try_invert() {
            self.recompute_basics();
            return;
        }
        let m = self.m;
        // Row-echelon pass over the basis columns to find an independent
        // subset and the rows it covers.
        let mut mat = vec![0.0; m * m];
        for (pos, &j) in self.basis.iter().enumerate() {
            for (row, coef) in self.column(j) {
                mat[row * m + pos] = coef;
            }
        }
        let mut row_used = vec![false; m];
        let mut col_ok = vec![false; m];
        for col in 0..m {
            let mut pivot = None;
            let mut best = 1e-9;
            for (r, used) in row_used.iter().enumerate() {
                if !used && mat[r * m + col].abs() > best {
                    best = mat[r * m + col].abs();
                    pivot = Some(r);
                }
            }
            let Some(pr) = pivot else { continue };
            col_ok[col] = true;
            row_used[pr] = true;
            let scale = mat[pr * m + col];
            for r in 0..m {
                if r == pr {
                    continue;
                }
                let f = mat[r * m + col] / scale;
                if f == 0.0 {
                    continue;
                }
                for c in col..m {
                    mat[r * m + c] -= f * mat[pr * m + c];
                }
            }
        }
        let free_rows: Vec<usize> = (0..m).filter(|&r| !row_used[r]).collect();
        let mut free_iter = free_rows.into_iter();
        for pos in 0..m {
            if col_ok[pos] {
                continue;
            }
            let row = free_iter.next().expect("one free row per dependent column");
            let j_out = self.basis[pos];
            let j_in = self.n + row;
            // Eject to the nearest finite bound.
            let v = self.values[j_out];
            self.status[j_out] = if self.lb[j_out].is_finite()
                && (!self.ub[j_out].is_finite() || (v - self.lb[j_out]).abs() <= (v - self.ub[j_out]).abs())
            {
                self.values[j_out] = self.lb[j_out];
                VarStatus::AtLower
            } else if self.ub[j_out].is_finite() {
                self.values[j_out] = self.ub[j_out];
                VarStatus::AtUpper
            } else {
                self.values[j_out] = 0.0;
                VarStatus::FreeZero
            };
            self.pos_of[j_out] = None;
            if let Some(old_pos) = self.pos_of[j_in] {
                // The logical was already basic elsewhere; swap positions.
                self.basis.swap(pos, old_pos);
                self.pos_of[self.basis[old_pos]] = Some(old_pos);
            } else {
                self.basis[pos] = j_in;
                self.status[j_in] = VarStatus::Basic;
            }
            self.pos_of[self.basis[pos]] = Some(pos);
        }
        let ok = self.try_invert();
        debug_assert!(ok, "repaired basis stays invertible");
        self.recompute_basics();
    }

    fn try_invert(&mut self) -> bool {
        let m = self.m;
        let mut mat = vec![0.0; m * m];
        for (pos, &j) in self.basis.iter().enumerate() {
            for (row, coef) in self.column(j) {
                mat[row * m + pos] = coef;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let mut pivot = col;
            let mut best = mat[col * m + col].abs();
            for r in (col + 1)..m {
                let v = mat[r * m + col].abs();
                if v > best {
                    best = v;
                    pivot = r;
                }
            }
            if best < 1e-11 {
                return false;
            }
            if pivot != col {
                for c in 0..m {
                    mat.swap(pivot * m + c, col * m + c);
                    inv.swap(pivot * m + c, col * m + c);
                }
            }
            let scale = mat[col * m + col];
            for c in 0..m {
                mat[col * m + c] /= scale;
                inv[col * m + c] /= scale;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = mat[r * m + col];
                if f == 0.0 {
                    continue;
                }
                for c in 0..m {
                    mat[r * m + c] -= f * mat[col * m + c];
                    inv[r * m + c] -= f * inv[col * m + c];
                }
            }
        }
        self.binv = inv;
        true
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut out = vec![0.0; m];
        for (row, coef) in self.column(j) {
            if coef == 0.0 {
                continue;
            }
            for i in 0..m {
                out[i] += self.binv[i * m + row] * coef;
            }
        }
        out
    }

    fn worst_infeasibility(&self) -> f64 {
        self.basis
            .iter()
            .map(|&j| {
                let v = self.values[j];
                (v - self.ub[j]).max(0.0).max((self.lb[j] - v).max(0.0))
            })
            .fold(0.0, f64::max)
    }

    /// Row vector `w = sigma^T B^{-1}` for the given basic cost vector.
    fn duals(&self, sigma: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut w = vec![0.0; m];
        for (pos, &s) in sigma.iter().enumerate() {
            if s == 0.0 {
                continue;
            }
            for r in 0..m {
                w[r] += s * self.binv[pos * m + r];
            }
        }
        w
    }

    fn reduced_cost(&self, j: usize, w: &[f64], own_cost: f64) -> f64 {
        let mut d = own_cost;
        for (row, coef) in self.column(j) {
            d -= w[row] * coef;
        }
        d
    }

    fn objective(&self) -> f64 {
        (0..self.n).map(|j| self.lp.obj[j] * self.values[j]).sum()
    }

    fn solve(&mut self, iteration_limit: usize) -> LpStatus {
        loop {
            if self.iterations >= iteration_limit {
                return LpStatus::IterationLimit;
            }
            if self.iterations > 0 && self.iterations % REFACTOR_EVERY == 0 {
                self.refactor();
            }
            let phase1 = self.worst_infeasibility() > FEAS_TOL;
            // Basic-position costs for the current phase.
            let sigma: Vec<f64> = if phase1 {
                self.basis
                    .iter()
                    .map(|&j| {
                        let v = self.values[j];
                        if v > self.ub[j] + 0.5 * FEAS_TOL {
                            1.0
                        } else if v < self.lb[j] - 0.5 * FEAS_TOL {
                            -1.0
                        } else {
                            0.0
                        }
                    })
                    .collect()
            } else {
                self.basis
                    .iter()
                    .map(|&j| if j < self.n { self.lp.obj[j] } else { 0.0 })
                    .collect()
            };
            let w = self.duals(&sigma);
            // Entering variable.
            let mut entering: Option<(usize, f64, f64)> = None; // (var, d, score)
            for j in 0..self.n + self.m {
                if self.pos_of[j].is_some() {
                    continue;
                }
                let own_cost = if phase1 {
                    0.0
                } else if j < self.n {
                    self.lp.obj[j]
                } else {
                    0.0
                };
                let d = self.reduced_cost(j, &w, own_cost);
                let eligible = match self.status[j] {
                    VarStatus::AtLower => d < -DUAL_TOL,
                    VarStatus::AtUpper => d > DUAL_TOL,
                    VarStatus::FreeZero => d.abs() > DUAL_TOL,
                    VarStatus::Basic => false,
                };
                if !eligible {
                    continue;
                }
                if self.bland {
                    entering = Some((j, d, 0.0));
                    break;
                }
                let score = d.abs();
                if entering.is_none_or(|(_, _, best)| score > best) {
                    entering = Some((j, d, score));
                }
            }
            let Some((j_in, d_in, _)) = entering else {
                return if phase1 {
                    LpStatus::Infeasible
                } else {
                    LpStatus::Optimal
                };
            };
            let dir: f64 = match self.status[j_in] {
                VarStatus::AtLower => 1.0,
                VarStatus::AtUpper => -1.0,
                VarStatus::FreeZero => {
                    if d_in < 0.0 {
                        1.0
                    } else {
                        -1.0
                    }
                }
                VarStatus::Basic => unreachable!(),
            };
            let col = self.ftran(j_in);
            // Two-pass ratio test. Pass 1 finds the largest step keeping
            // every blocker within a small absolute bound slack; pass 2
            // picks the best-conditioned blocker whose exact ratio fits
            // under it, so any overshoot stays below the slack regardless
            // of pivot magnitudes.
            const RATIO_SLACK: f64 = 1e-9;
            // Blocking slack of a basic toward the bound it would hit.
            let blocker = |jb: usize, rate: f64, v: f64| -> Option<f64> {
                let (lb, ub) = (self.lb[jb], self.ub[jb]);
                if phase1 {
                    if v < lb - FEAS_TOL {
                        // Infeasible below blocks only while moving up.
                        return (rate > 0.0).then(|| lb - v);
                    }
                    if v > ub + FEAS_TOL {
                        return (rate < 0.0).then(|| ub - v);
                    }
                }
                if rate > 0.0 && ub.is_finite() {
                    Some(ub - v)
                } else if rate < 0.0 && lb.is_finite() {
                    Some(lb - v)
                } else {
                    None
                }
            };
            let own_range = self.ub[j_in] - self.lb[j_in];
            let mut theta_max = if own_range.is_finite() {
                own_range
            } else {
                f64::INFINITY
            };
            for (pos, &jb) in self.basis.iter().enumerate() {
                let rate = -dir * col[pos];
                if rate.abs() < PIVOT_TOL {
                    continue;
                }
                let Some(slack) = blocker(jb, rate, self.values[jb]) else {
                    continue;
                };
                theta_max = theta_max.min(((slack / rate) + RATIO_SLACK / rate.abs()).max(0.0));
            }
            if theta_max.is_infinite() {
                // No block in sight: unbounded in phase 2, impossible in
                // phase 1 where the objective is bounded below by zero.
                return if phase1 {
                    LpStatus::IterationLimit
                } else {
                    LpStatus::Unbounded
                };
            }
            let mut leave: Option<(usize, f64, f64)> = None; // (pos, ratio, |rate|)
            for (pos, &jb) in self.basis.iter().enumerate() {
                let rate = -dir * col[pos];
                if rate.abs() < PIVOT_TOL {
                    continue;
                }
                let Some(slack) = blocker(jb, rate, self.values[jb]) else {
                    continue;
                };
                let ratio = (slack / rate).max(0.0);
                if ratio > theta_max {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some((best_pos, _, best_rate)) => {
                        if self.bland {
                            jb < self.basis[best_pos]
                        } else {
                            rate.abs() > best_rate
                        }
                    }
                };
                if better {
                    leave = Some((pos, ratio, rate.abs()));
                }
            }
            let (step, leave_pos) = match leave {
                Some((pos, ratio, _)) => (ratio, pos),
                // Only the entering variable's own range binds.
                None => (own_range, usize::MAX),
            };
            self.iterations += 1;
            if step < DEGEN_TOL {
                self.degenerate += 1;
                if self.degenerate > DEGEN_BEFORE_BLAND {
                    self.bland = true;
                }
            }
            // Apply the move to basic values and the entering variable.
            for (pos, &jb) in self.basis.iter().enumerate() {
                self.values[jb] -= dir * step * col[pos];
            }
            if leave_pos == usize::MAX {
                // Bound flip: the entering variable crosses its own range.
                self.values[j_in] += dir * step;
                self.status[j_in] = match self.status[j_in] {
                    VarStatus::AtLower => VarStatus::AtUpper,
                    VarStatus::AtUpper => VarStatus::AtLower,
                    other => other,
                };
                continue;
            }
            let j_out = self.basis[leave_pos];
            self.values[j_in] += dir * step;
            // Classify the leaving variable by the bound it reached.
            let v_out = self.values[j_out];
            let to_lower = (v_out - self.lb[j_out]).abs() <= (v_out - self.ub[j_out]).abs();
            self.status[j_out] = if to_lower {
                self.values[j_out] = if self.lb[j_out].is_finite() {
                    self.lb[j_out]
                } else {
                    v_out
                };
                if self.lb[j_out].is_finite() {
                    VarStatus::AtLower
                } else {
                    VarStatus::FreeZero
                }
            } else {
                self.values[j_out] = if self.ub[j_out].is_finite() {
                    self.ub[j_out]
                } else {
                    v_out
                };
                if self.ub[j_out].is_finite() {
                    VarStatus::AtUpper
                } else {
                    VarStatus::FreeZero
                }
            };
            self.status[j_in] = VarStatus::Basic;
            self.pos_of[j_out] = None;
            self.pos_of[j_in] = Some(leave_pos);
            self.basis[leave_pos] = j_in;
            // Product-form update of the inverse.
            let m = self.m;
            let pivot = col[leave_pos];
            for c in 0..m {
                self.binv[leave_pos * m + c] /= pivot;
            }
            for r in 0..m {
                if r == leave_pos {
                    continue;
                }
                let f = col[r];
                if f == 0.0 {
                    continue;
                }
                for c in 0..m {
                    self.binv[r * m + c] -= f * self.binv[leave_pos * m + c];
                }
            }
        }
    }
}

/// Solves the LP with a default iteration budget scaled to its size.
pub fn solve(lp: &LpProblem) -> LpOutcome {
    solve_with_limit(lp, 20_000 + 60 * lp.num_rows())
}

/// Solves starting from a prior basis (a parent node's statuses); rows
/// appended since the statuses were captured keep their logicals basic.
pub fn solve_warm(lp: &LpProblem, warm: &[VarStatus]) -> LpOutcome {
    solve_warm_with_limit(lp, warm, 20_000 + 60 * lp.num_rows())
}

pub fn solve_warm_with_limit(
    lp: &LpProblem,
    warm: &[VarStatus],
    iteration_limit: usize,
) -> LpOutcome {
    let mut t = Tableau::new(lp);
    if !t.install_statuses(warm) {
        return solve_with_limit(lp, iteration_limit);
    }
    let status = t.solve(iteration_limit);
    let values: Vec<f64> = t.values[..t.n].to_vec();
    LpOutcome {
        status,
        objective: if status == LpStatus::Optimal {
            t.objective()
        } else {
            f64::NAN
        },
        values,
        statuses: t.status.clone(),
        iterations: t.iterations,
    }
}

pub fn solve_with_limit(lp: &LpProblem, iteration_limit: usize) -> LpOutcome {
    debug_assert_eq!(lp.obj.len(), lp.cols.len());
    debug_assert_eq!(lp.lb.len(), lp.obj.len());
    debug_assert_eq!(lp.row_lb.len(), lp.row_ub.len());
    let mut t = Tableau::new(lp);
    let status = t.solve(iteration_limit);
    let values: Vec<f64> = t.values[..t.n].to_vec();
    LpOutcome {
        status,
        objective: if status == LpStatus::Optimal {
            t.objective()
        } else {
            f64::NAN
        },
        values,
        statuses: t.status.clone(),
        iterations: t.iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    fn lp(
        obj: Vec<f64>,
        bounds: Vec<(f64, f64)>,
        rows: Vec<(Vec<(usize, f64)>, f64, f64)>,
    ) -> LpProblem {
        let n = obj.len();
        let mut cols = vec![Vec::new(); n];
        let mut row_lb = Vec::new();
        let mut row_ub = Vec::new();
        for (i, (coeffs, lo, hi)) in rows.into_iter().enumerate() {
            for (j, c) in coeffs {
                cols[j].push((i, c));
            }
            row_lb.push(lo);
            row_ub.push(hi);
        }
        LpProblem {
            obj,
            lb: bounds.iter().map(|b| b.0).collect(),
            ub: bounds.iter().map(|b| b.1).collect(),
            cols,
            row_lb,
            row_ub,
        }
    }

    #[test]
    fn solves_a_textbook_lp() {
        // max x + 2y s.t. x + y <= 4, x <= 2, y <= 3, x,y >= 0.
        let p = lp(
            vec![-1.0, -2.0],
            vec![(0.0, 2.0), (0.0, 3.0)],
            vec![(vec![(0, 1.0), (1, 1.0)], -INF, 4.0)],
        );
        let out = solve(&p);
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.objective + 7.0).abs() < 1e-9);
        assert!((out.values[0] - 1.0).abs() < 1e-9);
        assert!((out.values[1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn ramp_chain_maximum_matches_hand_solution() {
        // max x2 over the two-period dispatch box of the worked-example
        // generator with both periods online.
        let p = lp(
            vec![0.0, -1.0],
            vec![(8.0, 80.0), (8.0, 80.0)],
            vec![
                (vec![(0, -1.0), (1, 1.0)], -INF, 10.0),
                (vec![(0, 1.0), (1, -1.0)], -INF, 10.0),
            ],
        );
        let out = solve(&p);
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.objective + 80.0).abs() < 1e-9);
    }

    #[test]
    fn reports_infeasible_for_an_empty_row() {
        // A row with no coefficients and a negative upper bound.
        let p = lp(
            vec![1.0],
            vec![(0.0, 1.0)],
            vec![(vec![], -INF, -1.0)],
        );
        assert_eq!(solve(&p).status, LpStatus::Infeasible);
    }

    #[test]
    fn reports_infeasible_bounds_conflict() {
        let p = lp(
            vec![0.0, 0.0],
            vec![(0.0, 1.0), (0.0, 1.0)],
            vec![(vec![(0, 1.0), (1, 1.0)], 3.0, INF)],
        );
        assert_eq!(solve(&p).status, LpStatus::Infeasible);
    }

    #[test]
    fn reports_unbounded() {
        let p = lp(
            vec![-1.0],
            vec![(0.0, INF)],
            vec![(vec![(0, -1.0)], -INF, 0.0)],
        );
        assert_eq!(solve(&p).status, LpStatus::Unbounded);
    }

    #[test]
    fn empty_objective_returns_a_feasible_vertex() {
        let p = lp(
            vec![0.0, 0.0],
            vec![(0.0, 5.0), (1.0, 4.0)],
            vec![(vec![(0, 1.0), (1, 1.0)], 2.0, 6.0)],
        );
        let out = solve(&p);
        assert_eq!(out.status, LpStatus::Optimal);
        assert_eq!(out.objective, 0.0);
        let act = p.activities(&out.values);
        assert!(act[0] >= 2.0 - 1e-9 && act[0] <= 6.0 + 1e-9);
    }

    #[test]
    fn handles_equality_rows_and_free_variables() {
        // min x + y s.t. x + y = 2, x - y = 0, y free.
        let p = lp(
            vec![1.0, 1.0],
            vec![(0.0, INF), (-INF, INF)],
            vec![
                (vec![(0, 1.0), (1, 1.0)], 2.0, 2.0),
                (vec![(0, 1.0), (1, -1.0)], 0.0, 0.0),
            ],
        );
        let out = solve(&p);
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.values[0] - 1.0).abs() < 1e-8);
        assert!((out.values[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn random_lps_satisfy_feasibility_at_optimum() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(99);
        for _ in 0..60 {
            let n = rng.gen_range(2..6);
            let m = rng.gen_range(1..6);
            let obj: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let bounds: Vec<(f64, f64)> = (0..n)
                .map(|_| {
                    let lo = rng.gen_range(-3.0..1.0);
                    (lo, lo + rng.gen_range(0.5..4.0))
                })
                .collect();
            let rows: Vec<(Vec<(usize, f64)>, f64, f64)> = (0..m)
                .map(|_| {
                    let mut coeffs: Vec<(usize, f64)> = Vec::new();
                    for j in 0..n {
                        if rng.gen_bool(0.7) {
                            coeffs.push((j, rng.gen_range(-2.0..2.0)));
                        }
                    }
                    let hi = rng.gen_range(-1.0..6.0);
                    (coeffs, -INF, hi)
                })
                .collect();
            let p = lp(obj, bounds, rows);
            let out = solve(&p);
            if out.status == LpStatus::Optimal {
                let act = p.activities(&out.values);
                for (i, a) in act.iter().enumerate() {
                    assert!(*a <= p.row_ub[i] + 1e-6, "row {i} violated: {a}");
                }
                for j in 0..p.num_vars() {
                    assert!(out.values[j] >= p.lb[j] - 1e-6);
                    assert!(out.values[j] <= p.ub[j] + 1e-6);
                }
            }
        }
    }
}
