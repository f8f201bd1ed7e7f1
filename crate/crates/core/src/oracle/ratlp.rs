//! Exact rational bounded-variable simplex.
//!
//! Mirrors the float simplex's standard form (structural columns plus one
//! logical activity variable per row) but works entirely in arbitrary
//! precision: every comparison is exact and pivoting uses lowest-index
//! selection, so the walk terminates without any tolerance tuning. A basis
//! from the float solver can be supplied as a warm start; correctness
//! never depends on it.

use num_traits::{Signed, Zero};

use super::{rat, OracleError, Rat};
use crate::simplex::{LpProblem, VarStatus};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct ExactOutcome {
    pub status: ExactStatus,
    pub objective: Rat,
    pub values: Vec<Rat>,
}

/// Bound that may be absent (infinite).
type Bound = Option<Rat>;

fn to_bound(v: f64) -> Bound {
    if v.is_finite() {
        Some(rat(v))
    } else {
        None
    }
}

struct Exact {
    n: usize,
    m: usize,
    obj: Vec<Rat>,
    cols: Vec<Vec<(usize, Rat)>>,
    lb: Vec<Bound>,
    ub: Vec<Bound>,
    status: Vec<VarStatus>,
    values: Vec<Rat>,
    basis: Vec<usize>,
    pos_of: Vec<Option<usize>>,
    binv: Vec<Vec<Rat>>,
}

impl Exact {
    fn from_problem(lp: &LpProblem) -> Self {
        let n = lp.num_vars();
        let m = lp.num_rows();
        let mut obj: Vec<Rat> = lp.obj.iter().map(|&c| rat(c)).collect();
        obj.extend(std::iter::repeat_with(Rat::zero).take(m));
        let cols: Vec<Vec<(usize, Rat)>> = lp
            .cols
            .iter()
            .map(|col| col.iter().map(|&(r, c)| (r, rat(c))).collect())
            .collect();
        let mut lb: Vec<Bound> = lp.lb.iter().map(|&v| to_bound(v)).collect();
        let mut ub: Vec<Bound> = lp.ub.iter().map(|&v| to_bound(v)).collect();
        lb.extend(lp.row_lb.iter().map(|&v| to_bound(v)));
        ub.extend(lp.row_ub.iter().map(|&v| to_bound(v)));
        Exact {
            n,
            m,
            obj,
            cols,
            lb,
            ub,
            status: Vec::new(),
            values: Vec::new(),
            basis: Vec::new(),
            pos_of: Vec::new(),
            binv: Vec::new(),
        }
    }

    fn column(&self, j: usize) -> Vec<(usize, Rat)> {
        if j < self.n {
            self.cols[j].clone()
        } else {
            vec![(j - self.n, -Rat::from_integer(1.into()))]
        }
    }

    /// Installs a basis and nonbasic statuses; fails on a singular basis.
    fn install(&mut self, basis: Vec<usize>, statuses: Vec<VarStatus>) -> bool {
        let m = self.m;
        let mut mat = vec![vec![Rat::zero(); m]; m];
        for (pos, &j) in basis.iter().enumerate() {
            for (row, coef) in self.column(j) {
                mat[row][pos] = coef;
            }
        }
        let Some(inv) = super::linalg::invert(&mat) else {
            return false;
        };
        self.binv = inv;
        self.basis = basis;
        self.pos_of = vec![None; self.n + m];
        for (pos, &j) in self.basis.iter().enumerate() {
            self.pos_of[j] = Some(pos);
        }
        self.status = statuses;
        self.values = vec![Rat::zero(); self.n + m];
        for j in 0..self.n + m {
            if self.pos_of[j].is_some() {
                self.status[j] = VarStatus::Basic;
                continue;
            }
            self.values[j] = match self.status[j] {
                VarStatus::AtLower => self.lb[j].clone().unwrap_or_else(Rat::zero),
                VarStatus::AtUpper => self.ub[j].clone().unwrap_or_else(Rat::zero),
                _ => {
                    self.status[j] = VarStatus::FreeZero;
                    Rat::zero()
                }
            };
        }
        self.recompute_basics();
        true
    }

    fn logical_basis(&mut self) {
        let n = self.n;
        let m = self.m;
        let basis: Vec<usize> = (n..n + m).collect();
        let mut statuses = Vec::with_capacity(n + m);
        for j in 0..n {
            statuses.push(if self.lb[j].is_some() {
                VarStatus::AtLower
            } else if self.ub[j].is_some() {
                VarStatus::AtUpper
            } else {
                VarStatus::FreeZero
            });
        }
        statuses.extend(std::iter::repeat(VarStatus::Basic).take(m));
        let ok = self.install(basis, statuses);
        debug_assert!(ok, "logical basis is always invertible");
    }

    fn recompute_basics(&mut self) {
        let m = self.m;
        let mut rhs = vec![Rat::zero(); m];
        for j in 0..self.n + m {
            if self.pos_of[j].is_some() || self.values[j].is_zero() {
                continue;
            }
            for (row, coef) in self.column(j) {
                rhs[row] = &rhs[row] + &(&coef * &self.values[j]);
            }
        }
        for i in 0..m {
            let mut v = Rat::zero();
            for r in 0..m {
                if !self.binv[i][r].is_zero() && !rhs[r].is_zero() {
                    v = &v - &(&self.binv[i][r] * &rhs[r]);
                }
            }
            self.values[self.basis[i]] = v;
        }
    }

    fn infeasibility(&self) -> Rat {
        let mut total = Rat::zero();
        for &j in &self.basis {
            let v = &self.values[j];
            if let Some(lb) = &self.lb[j] {
                if v < lb {
                    total = &total + &(lb - v);
                }
            }
            if let Some(ub) = &self.ub[j] {
                if v > ub {
                    total = &total + &(v - ub);
                }
            }
        }
        total
    }

    fn duals(&self, sigma: &[Rat]) -> Vec<Rat> {
        let m = self.m;
        let mut w = vec![Rat::zero(); m];
        for (pos, s) in sigma.iter().enumerate() {
            if s.is_zero() {
                continue;
            }
            for r in 0..m {
                if !self.binv[pos][r].is_zero() {
                    w[r] = &w[r] + &(s * &self.binv[pos][r]);
                }
            }
        }
        w
    }

    fn ftran(&self, j: usize) -> Vec<Rat> {
        let m = self.m;
        let mut out = vec![Rat::zero(); m];
        for (row, coef) in self.column(j) {
            if coef.is_zero() {
                continue;
            }
            for i in 0..m {
                if !self.binv[i][row].is_zero() {
                    out[i] = &out[i] + &(&self.binv[i][row] * &coef);
                }
            }
        }
        out
    }

    fn solve(&mut self, pivot_budget: usize) -> Result<ExactStatus, OracleError> {
        let mut pivots = 0usize;
        loop {
            if pivots > pivot_budget {
                return Err(OracleError::Budget(format!(
                    "exact simplex exceeded {pivot_budget} pivots"
                )));
            }
            let infeas = self.infeasibility();
            let phase1 = infeas.is_positive();
            let sigma: Vec<Rat> = self
                .basis
                .iter()
                .map(|&j| {
                    let v = &self.values[j];
                    if phase1 {
                        if self.ub[j].as_ref().is_some_and(|ub| v > ub) {
                            Rat::from_integer(1.into())
                        } else if self.lb[j].as_ref().is_some_and(|lb| v < lb) {
                            -Rat::from_integer(1.into())
                        } else {
                            Rat::zero()
                        }
                    } else {
                        self.obj[j].clone()
                    }
                })
                .collect();
            let w = self.duals(&sigma);
            // Lowest-index eligible entering variable.
            let mut entering: Option<(usize, Rat)> = None;
            for j in 0..self.n + self.m {
                if self.pos_of[j].is_some() {
                    continue;
                }
                let own = if phase1 { Rat::zero() } else { self.obj[j].clone() };
                let mut d = own;
                for (row, coef) in self.column(j) {
                    if !w[row].is_zero() {
                        d = &d - &(&w[row] * &coef);
                    }
                }
                let eligible = match self.status[j] {
                    VarStatus::AtLower => d.is_negative(),
                    VarStatus::AtUpper => d.is_positive(),
                    VarStatus::FreeZero => !d.is_zero(),
                    VarStatus::Basic => false,
                };
                if eligible {
                    entering = Some((j, d));
                    break;
                }
            }
            let Some((j_in, d_in)) = entering else {
                return Ok(if phase1 {
                    ExactStatus::Infeasible
                } else {
                    ExactStatus::Optimal
                });
            };
            let increase = match self.status[j_in] {
                VarStatus::AtLower => true,
                VarStatus::AtUpper => false,
                VarStatus::FreeZero => d_in.is_negative(),
                VarStatus::Basic => unreachable!(),
            };
            let col = self.ftran(j_in);
            // Ratio test; in phase 1 an out-of-bound basic blocks when it
            // reaches the bound it violates.
            let own_range = match (&self.lb[j_in], &self.ub[j_in]) {
                (Some(lo), Some(hi)) => Some(hi - lo),
                _ => None,
            };
            let mut limit: Option<(Rat, usize, usize)> = own_range.map(|r| (r, usize::MAX, usize::MAX));
            for (pos, &jb) in self.basis.iter().enumerate() {
                if col[pos].is_zero() {
                    continue;
                }
                // Rate of change of this basic per unit of entering move.
                let rate = if increase {
                    -col[pos].clone()
                } else {
                    col[pos].clone()
                };
                let v = &self.values[jb];
                let below = self.lb[jb].as_ref().is_some_and(|lb| v < lb);
                let above = self.ub[jb].as_ref().is_some_and(|ub| v > ub);
                let step = if phase1 && below {
                    if rate.is_positive() {
                        Some((self.lb[jb].as_ref().unwrap() - v) / &rate)
                    } else {
                        None
                    }
                } else if phase1 && above {
                    if rate.is_negative() {
                        Some((self.ub[jb].as_ref().unwrap() - v) / &rate)
                    } else {
                        None
                    }
                } else if rate.is_positive() {
                    self.ub[jb].as_ref().map(|ub| (ub - v) / &rate)
                } else {
                    self.lb[jb].as_ref().map(|lb| (lb - v) / &rate)
                };
                let Some(step) = step else { continue };
                let step = if step.is_negative() { Rat::zero() } else { step };
                let better = match &limit {
                    None => true,
                    Some((best, _, best_var)) => {
                        step < *best || (step == *best && jb < *best_var)
                    }
                };
                if better {
                    limit = Some((step, pos, jb));
                }
            }
            let Some((step, leave_pos, _)) = limit else {
                return Ok(if phase1 {
                    // Phase-1 objective is bounded below; no block means a
                    // broken invariant rather than a real ray.
                    ExactStatus::Infeasible
                } else {
                    ExactStatus::Unbounded
                });
            };
            pivots += 1;
            let signed_step = if increase { step.clone() } else { -step.clone() };
            for (pos, &jb) in self.basis.iter().enumerate() {
                if !col[pos].is_zero() {
                    let delta = &col[pos] * &signed_step;
                    self.values[jb] = &self.values[jb] - &delta;
                }
            }
            self.values[j_in] = &self.values[j_in] + &signed_step;
            if leave_pos == usize::MAX {
                self.status[j_in] = match self.status[j_in] {
                    VarStatus::AtLower => VarStatus::AtUpper,
                    VarStatus::AtUpper => VarStatus::AtLower,
                    other => other,
                };
                continue;
            }
            let j_out = self.basis[leave_pos];
            let v_out = self.values[j_out].clone();
            self.status[j_out] = if self.lb[j_out].as_ref() == Some(&v_out) {
                VarStatus::AtLower
            } else if self.ub[j_out].as_ref() == Some(&v_out) {
                VarStatus::AtUpper
            } else if self.lb[j_out].is_none() && self.ub[j_out].is_none() && v_out.is_zero() {
                VarStatus::FreeZero
            } else if self.lb[j_out].as_ref().is_some_and(|lb| v_out == *lb) {
                VarStatus::AtLower
            } else {
                // Out-of-bound leaving values only arise in phase 1 when the
                // blocking bound was the violated one; snap to it.
                if self.lb[j_out].as_ref().is_some_and(|lb| &v_out < lb) {
                    self.values[j_out] = self.lb[j_out].clone().unwrap();
                    VarStatus::AtLower
                } else {
                    self.values[j_out] = self.ub[j_out].clone().unwrap();
                    VarStatus::AtUpper
                }
            };
            self.status[j_in] = VarStatus::Basic;
            self.pos_of[j_out] = None;
            self.pos_of[j_in] = Some(leave_pos);
            self.basis[leave_pos] = j_in;
            // Product-form inverse update.
            let pivot = col[leave_pos].clone();
            let m = self.m;
            for c in 0..m {
                self.binv[leave_pos][c] = &self.binv[leave_pos][c] / &pivot;
            }
            for r in 0..m {
                if r == leave_pos || col[r].is_zero() {
                    continue;
                }
                for c in 0..m {
                    if !self.binv[leave_pos][c].is_zero() {
                        let delta = &col[r] * &self.binv[leave_pos][c];
                        self.binv[r][c] = &self.binv[r][c] - &delta;
                    }
                }
            }
        }
    }

    fn objective(&self) -> Rat {
        let mut total = Rat::zero();
        for j in 0..self.n {
            if !self.obj[j].is_zero() && !self.values[j].is_zero() {
                total = &total + &(&self.obj[j] * &self.values[j]);
            }
        }
        total
    }
}

/// Solves the rational counterpart of `lp` exactly. `warm` may carry the
/// float solver's variable statuses to start from its basis.
pub fn solve_exact(
    lp: &LpProblem,
    warm: Option<&[VarStatus]>,
    pivot_budget: usize,
) -> Result<ExactOutcome, OracleError> {
    let mut ex = Exact::from_problem(lp);
    let mut installed = false;
    if let Some(statuses) = warm {
        if statuses.len() == ex.n + ex.m {
            let basis: Vec<usize> = statuses
                .iter()
                .enumerate()
                .filter(|(_, s)| matches!(s, VarStatus::Basic))
                .map(|(j, _)| j)
                .collect();
            if basis.len() == ex.m {
                installed = ex.install(basis, statuses.to_vec());
            }
        }
    }
    if !installed {
        ex.logical_basis();
    }
    let status = ex.solve(pivot_budget)?;
    let objective = if status == ExactStatus::Optimal {
        ex.objective()
    } else {
        Rat::zero()
    };
    Ok(ExactOutcome {
        status,
        objective,
        values: ex.values[..ex.n].to_vec(),
    })
}
