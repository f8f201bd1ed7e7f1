//! Assembles the commitment problem as a sparse MILP.
//!
//! Variables per generator and period: generation amount, on/off status
//! (the only binaries), start-up and shut-down cost carriers, and the
//! epigraph value of the piecewise generation cost. Rows cover minimum
//! up/down windows, capacity, ramping (coupled to the initial state),
//! cost triggers, load balance, reserve, and line flows. Rows that fold to
//! tautologies under the variable bounds are dropped at build time.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cuts::two_period_cuts;
use crate::simplex::LpProblem;
use crate::types::{
    linearize_cost, validate_generator, CostParams, Family, GeneratorParams, LinearInequality,
};

/// Per-bus demand profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: String,
    pub load: Vec<f64>,
}

/// A transmission line with capacity and per-bus flow distribution factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub id: String,
    pub capacity: f64,
    pub factors: BTreeMap<String, f64>,
}

/// Commitment history leading into period 1 (chronological, last entry is
/// period 0) plus the period-0 generation amount.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    pub history: Vec<bool>,
    pub x0: f64,
}

impl InitialState {
    /// Offline for the whole lookback window with zero output.
    pub fn off(p: &GeneratorParams) -> Self {
        InitialState {
            history: vec![false; p.min_up.max(p.min_down)],
            x0: 0.0,
        }
    }

    /// Online for the whole lookback window at the given output.
    pub fn on(p: &GeneratorParams, x0: f64) -> Self {
        InitialState {
            history: vec![true; p.min_up.max(p.min_down)],
            x0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorUnit {
    pub bus: String,
    pub params: GeneratorParams,
    pub costs: CostParams,
    pub initial: InitialState,
}

/// A multi-generator instance: buses with loads, optional lines, reserve
/// factors, and generators with initial states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UcInstance {
    pub horizon: usize,
    pub reserve: Vec<f64>,
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    pub generators: Vec<GeneratorUnit>,
}

impl UcInstance {
    pub fn system_load(&self, t: usize) -> f64 {
        self.buses.iter().map(|b| b.load[t - 1]).sum()
    }

    pub fn total_capacity(&self) -> f64 {
        self.generators.iter().map(|g| g.params.cap_max).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    Invalid(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Invalid(msg) => write!(f, "invalid model input: {msg}"),
        }
    }
}

impl std::error::Error for ModelError {}

/// Variable kinds per generator and period, in column-layout order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Power,
    Status,
    StartCost,
    ShutCost,
    CostEpi,
}

impl VarKind {
    pub const ALL: [VarKind; 5] = [
        VarKind::Power,
        VarKind::Status,
        VarKind::StartCost,
        VarKind::ShutCost,
        VarKind::CostEpi,
    ];

    fn offset(self) -> usize {
        match self {
            VarKind::Power => 0,
            VarKind::Status => 1,
            VarKind::StartCost => 2,
            VarKind::ShutCost => 3,
            VarKind::CostEpi => 4,
        }
    }

    pub fn prefix(self) -> &'static str {
        match self {
            VarKind::Power => "x",
            VarKind::Status => "y",
            VarKind::StartCost => "u",
            VarKind::ShutCost => "v",
            VarKind::CostEpi => "f",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarDef {
    pub kind: VarKind,
    pub gen: usize,
    pub period: usize,
    pub lb: f64,
    pub ub: f64,
    pub integer: bool,
    pub obj: f64,
}

/// Constraint classes; cut rows remember the family they came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowTag {
    MinUp,
    MinDown,
    CapLower,
    CapUpper,
    RampUp,
    RampDown,
    StartCost,
    ShutCost,
    LoadBalance,
    Reserve,
    LineFlow,
    CostEpi,
    Cut(Family),
}

impl RowTag {
    pub fn label(&self) -> String {
        match self {
            RowTag::MinUp => "minup".into(),
            RowTag::MinDown => "mindown".into(),
            RowTag::CapLower => "caplo".into(),
            RowTag::CapUpper => "caphi".into(),
            RowTag::RampUp => "rampup".into(),
            RowTag::RampDown => "rampdn".into(),
            RowTag::StartCost => "ucost".into(),
            RowTag::ShutCost => "vcost".into(),
            RowTag::LoadBalance => "load".into(),
            RowTag::Reserve => "reserve".into(),
            RowTag::LineFlow => "flow".into(),
            RowTag::CostEpi => "epi".into(),
            RowTag::Cut(_) => "cut".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowDef {
    pub tag: RowTag,
    /// Owning generator for single-generator rows.
    pub gen: Option<usize>,
    pub coeffs: Vec<(usize, f64)>,
    pub lb: f64,
    pub ub: f64,
}

/// Sparse mixed-integer model, always minimizing.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpModel {
    pub horizon: usize,
    pub num_gens: usize,
    pub vars: Vec<VarDef>,
    pub rows: Vec<RowDef>,
    strengthened: bool,
}

impl MilpModel {
    pub fn var_index(&self, gen: usize, kind: VarKind, period: usize) -> usize {
        debug_assert!(period >= 1 && period <= self.horizon);
        gen * 5 * self.horizon + kind.offset() * self.horizon + (period - 1)
    }

    pub fn var_name(&self, j: usize) -> String {
        let v = &self.vars[j];
        format!("{}_{}_{}", v.kind.prefix(), v.gen + 1, v.period)
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_binary(&self) -> usize {
        self.vars.iter().filter(|v| v.integer).count()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn is_strengthened(&self) -> bool {
        self.strengthened
    }

    /// Same model with integrality dropped; binary bounds stay `[0, 1]`.
    pub fn lp_relaxation(&self) -> MilpModel {
        let mut relaxed = self.clone();
        for v in &mut relaxed.vars {
            v.integer = false;
        }
        relaxed
    }

    pub fn has_integers(&self) -> bool {
        self.vars.iter().any(|v| v.integer)
    }

    /// Appends a single-generator inequality as a permanent row.
    pub fn add_cut_row(&mut self, gen: usize, q: &LinearInequality) {
        let mut coeffs = Vec::with_capacity(q.x_coeffs.len() + q.y_coeffs.len());
        for (&t, &c) in &q.x_coeffs {
            coeffs.push((self.var_index(gen, VarKind::Power, t), c));
        }
        for (&t, &c) in &q.y_coeffs {
            coeffs.push((self.var_index(gen, VarKind::Status, t), c));
        }
        self.rows.push(RowDef {
            tag: RowTag::Cut(q.family),
            gen: Some(gen),
            coeffs,
            lb: f64::NEG_INFINITY,
            ub: q.rhs,
        });
    }

    /// Continuous view of the model for the simplex.
    pub fn to_lp(&self) -> LpProblem {
        let mut cols = vec![Vec::new(); self.vars.len()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, c) in &row.coeffs {
                cols[j].push((i, c));
            }
        }
        LpProblem {
            obj: self.vars.iter().map(|v| v.obj).collect(),
            lb: self.vars.iter().map(|v| v.lb).collect(),
            ub: self.vars.iter().map(|v| v.ub).collect(),
            cols,
            row_lb: self.rows.iter().map(|r| r.lb).collect(),
            row_ub: self.rows.iter().map(|r| r.ub).collect(),
        }
    }

    /// Objective value of an assignment.
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.vars
            .iter()
            .zip(values)
            .map(|(v, val)| v.obj * val)
            .sum()
    }
}

/// Checks the recorded history itself for minimum up/down violations;
/// boundary runs may extend outside the window and are not judged.
fn check_history(g: usize, unit: &GeneratorUnit) -> Result<(), ModelError> {
    let p = &unit.params;
    let h = &unit.initial.history;
    let need = p.min_up.max(p.min_down);
    if h.len() < need {
        return Err(ModelError::Invalid(format!(
            "generator {} history has {} entries, needs at least {}",
            g + 1,
            h.len(),
            need
        )));
    }
    let mut run_start = 0usize;
    for i in 1..=h.len() {
        if i == h.len() || h[i] != h[i - 1] {
            let len = i - run_start;
            let interior = run_start > 0 && i < h.len();
            if interior {
                let min_len = if h[run_start] { p.min_up } else { p.min_down };
                if len < min_len {
                    return Err(ModelError::Invalid(format!(
                        "generator {} history violates its minimum {} time",
                        g + 1,
                        if h[run_start] { "up" } else { "down" }
                    )));
                }
            }
            run_start = i;
        }
    }
    let on0 = *h.last().unwrap();
    let x0 = unit.initial.x0;
    if on0 && !(x0 >= p.cap_min - 1e-9 && x0 <= p.cap_max + 1e-9) {
        return Err(ModelError::Invalid(format!(
            "generator {} starts online with output {} outside its capacity range",
            g + 1,
            x0
        )));
    }
    if !on0 && x0.abs() > 1e-9 {
        return Err(ModelError::Invalid(format!(
            "generator {} starts offline with nonzero output {}",
            g + 1,
            x0
        )));
    }
    Ok(())
}

struct RowBuilder<'a> {
    vars: &'a [VarDef],
    rows: Vec<RowDef>,
}

impl<'a> RowBuilder<'a> {
    /// Appends a row unless the variable bounds already force it.
    fn push(&mut self, tag: RowTag, gen: Option<usize>, coeffs: Vec<(usize, f64)>, lb: f64, ub: f64) {
        let mut hi = 0.0;
        let mut lo = 0.0;
        for &(j, c) in &coeffs {
            let (vlb, vub) = (self.vars[j].lb, self.vars[j].ub);
            hi += if c >= 0.0 { c * vub } else { c * vlb };
            lo += if c >= 0.0 { c * vlb } else { c * vub };
        }
        if lo >= lb - 1e-12 && hi <= ub + 1e-12 {
            return;
        }
        self.rows.push(RowDef {
            tag,
            gen,
            coeffs,
            lb,
            ub,
        });
    }
}

/// Builds the full commitment MILP with a `segments`-piece generation cost.
pub fn build_uc_model(inst: &UcInstance, segments: usize) -> Result<MilpModel, ModelError> {
    let t_len = inst.horizon;
    if t_len == 0 {
        return Err(ModelError::Invalid("horizon must be positive".into()));
    }
    if inst.reserve.len() != t_len {
        return Err(ModelError::Invalid(format!(
            "reserve has {} entries for horizon {}",
            inst.reserve.len(),
            t_len
        )));
    }
    for b in &inst.buses {
        if b.load.len() != t_len {
            return Err(ModelError::Invalid(format!(
                "bus {} load has {} entries for horizon {}",
                b.id,
                b.load.len(),
                t_len
            )));
        }
    }
    for (g, unit) in inst.generators.iter().enumerate() {
        let report = validate_generator(&unit.params);
        if !report.is_valid() {
            return Err(ModelError::Invalid(format!(
                "generator {} violates: {}",
                g + 1,
                report
                    .violations
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )));
        }
        if !inst.buses.iter().any(|b| b.id == unit.bus) {
            return Err(ModelError::Invalid(format!(
                "generator {} references unknown bus {}",
                g + 1,
                unit.bus
            )));
        }
        check_history(g, unit)?;
    }

    // Variables, generator-major then kind-major then period.
    let mut vars = Vec::with_capacity(inst.generators.len() * 5 * t_len);
    for (g, unit) in inst.generators.iter().enumerate() {
        for kind in VarKind::ALL {
            for t in 1..=t_len {
                let (lb, ub, integer, obj) = match kind {
                    VarKind::Power => (0.0, unit.params.cap_max, false, 0.0),
                    VarKind::Status => (0.0, 1.0, true, unit.costs.fixed_on),
                    VarKind::StartCost => (0.0, f64::INFINITY, false, 1.0),
                    VarKind::ShutCost => (0.0, f64::INFINITY, false, 1.0),
                    VarKind::CostEpi => (0.0, f64::INFINITY, false, 1.0),
                };
                vars.push(VarDef {
                    kind,
                    gen: g,
                    period: t,
                    lb,
                    ub,
                    integer,
                    obj,
                });
            }
        }
    }

    let model_stub = MilpModel {
        horizon: t_len,
        num_gens: inst.generators.len(),
        vars,
        rows: Vec::new(),
        strengthened: false,
    };
    let idx = |gen: usize, kind: VarKind, t: usize| model_stub.var_index(gen, kind, t);
    let mut builder = RowBuilder {
        vars: &model_stub.vars,
        rows: Vec::new(),
    };

    for (g, unit) in inst.generators.iter().enumerate() {
        let p = &unit.params;
        let c = &unit.costs;
        let hist = &unit.initial.history;
        // Status at period i <= 0, read off the recorded history.
        let hval = |i: i64| -> f64 {
            let pos = hist.len() as i64 - 1 + i;
            if pos >= 0 && (pos as usize) < hist.len() && hist[pos as usize] {
                1.0
            } else {
                0.0
            }
        };
        // Minimum up/down windows, with history folded into constants.
        let window = |min_time: usize, up: bool, builder: &mut RowBuilder| {
            for t in (2 - min_time as i64)..=(t_len as i64) {
                let k_hi = (t_len as i64).min(t + min_time as i64 - 1);
                for k in t..=k_hi {
                    if k < 1 {
                        continue;
                    }
                    // up:   -y_{t-1} + y_t - y_k <= 0
                    // down:  y_{t-1} - y_t + y_k <= 1
                    let sign = if up { 1.0 } else { -1.0 };
                    let mut coeffs: Vec<(usize, f64)> = Vec::new();
                    let mut rhs = if up { 0.0 } else { 1.0 };
                    let add = |i: i64, coef: f64, coeffs: &mut Vec<(usize, f64)>, rhs: &mut f64| {
                        if i >= 1 {
                            coeffs.push((idx(g, VarKind::Status, i as usize), coef));
                        } else {
                            *rhs -= coef * hval(i);
                        }
                    };
                    add(t - 1, -sign, &mut coeffs, &mut rhs);
                    add(t, sign, &mut coeffs, &mut rhs);
                    add(k, -sign, &mut coeffs, &mut rhs);
                    // Merge duplicate indices (k == t gives canceling terms).
                    coeffs.sort_by_key(|&(j, _)| j);
                    coeffs.dedup_by(|a, b| {
                        if a.0 == b.0 {
                            b.1 += a.1;
                            true
                        } else {
                            false
                        }
                    });
                    coeffs.retain(|&(_, c)| c != 0.0);
                    let tag = if up { RowTag::MinUp } else { RowTag::MinDown };
                    builder.push(tag, Some(g), coeffs, f64::NEG_INFINITY, rhs);
                }
            }
        };
        window(p.min_up, true, &mut builder);
        window(p.min_down, false, &mut builder);

        for t in 1..=t_len {
            let x_t = idx(g, VarKind::Power, t);
            let y_t = idx(g, VarKind::Status, t);
            // Capacity range tied to the status.
            builder.push(
                RowTag::CapLower,
                Some(g),
                vec![(x_t, -1.0), (y_t, p.cap_min)],
                f64::NEG_INFINITY,
                0.0,
            );
            builder.push(
                RowTag::CapUpper,
                Some(g),
                vec![(x_t, 1.0), (y_t, -p.cap_max)],
                f64::NEG_INFINITY,
                0.0,
            );
            // Ramping in both directions; period 1 couples to the initial
            // state constants.
            let coupled = p.start_ramp - p.ramp;
            if t >= 2 {
                let x_p = idx(g, VarKind::Power, t - 1);
                let y_p = idx(g, VarKind::Status, t - 1);
                builder.push(
                    RowTag::RampUp,
                    Some(g),
                    vec![(x_t, 1.0), (x_p, -1.0), (y_p, coupled)],
                    f64::NEG_INFINITY,
                    p.start_ramp,
                );
                builder.push(
                    RowTag::RampDown,
                    Some(g),
                    vec![(x_p, 1.0), (x_t, -1.0), (y_t, coupled)],
                    f64::NEG_INFINITY,
                    p.start_ramp,
                );
            } else {
                let y0 = hval(0);
                let x0 = unit.initial.x0;
                builder.push(
                    RowTag::RampUp,
                    Some(g),
                    vec![(x_t, 1.0)],
                    f64::NEG_INFINITY,
                    p.start_ramp + x0 - coupled * y0,
                );
                builder.push(
                    RowTag::RampDown,
                    Some(g),
                    vec![(x_t, -1.0), (y_t, coupled)],
                    f64::NEG_INFINITY,
                    p.start_ramp - x0,
                );
            }
            // Start-up and shut-down cost triggers.
            let u_t = idx(g, VarKind::StartCost, t);
            let v_t = idx(g, VarKind::ShutCost, t);
            if t >= 2 {
                let y_p = idx(g, VarKind::Status, t - 1);
                builder.push(
                    RowTag::StartCost,
                    Some(g),
                    vec![(y_t, c.startup), (y_p, -c.startup), (u_t, -1.0)],
                    f64::NEG_INFINITY,
                    0.0,
                );
                builder.push(
                    RowTag::ShutCost,
                    Some(g),
                    vec![(y_p, c.shutdown), (y_t, -c.shutdown), (v_t, -1.0)],
                    f64::NEG_INFINITY,
                    0.0,
                );
            } else {
                let y0 = hval(0);
                builder.push(
                    RowTag::StartCost,
                    Some(g),
                    vec![(y_t, c.startup), (u_t, -1.0)],
                    f64::NEG_INFINITY,
                    c.startup * y0,
                );
                builder.push(
                    RowTag::ShutCost,
                    Some(g),
                    vec![(y_t, -c.shutdown), (v_t, -1.0)],
                    f64::NEG_INFINITY,
                    -c.shutdown * y0,
                );
            }
        }
        // Epigraph of the piecewise generation cost; the intercept rides on
        // the status so offline periods force a zero cost.
        let pw = linearize_cost(c, p, segments)
            .map_err(|e| ModelError::Invalid(format!("generator {}: {e}", g + 1)))?;
        for t in 1..=t_len {
            let x_t = idx(g, VarKind::Power, t);
            let y_t = idx(g, VarKind::Status, t);
            let f_t = idx(g, VarKind::CostEpi, t);
            for (slope, intercept) in pw.slopes.iter().zip(&pw.intercepts) {
                builder.push(
                    RowTag::CostEpi,
                    Some(g),
                    vec![(x_t, *slope), (y_t, *intercept), (f_t, -1.0)],
                    f64::NEG_INFINITY,
                    0.0,
                );
            }
        }
    }

    // System coupling rows.
    for t in 1..=t_len {
        let demand = inst.system_load(t);
        let coeffs: Vec<(usize, f64)> = (0..inst.generators.len())
            .map(|g| (idx(g, VarKind::Power, t), 1.0))
            .collect();
        builder.rows.push(RowDef {
            tag: RowTag::LoadBalance,
            gen: None,
            coeffs,
            lb: demand,
            ub: demand,
        });
        let coeffs: Vec<(usize, f64)> = inst
            .generators
            .iter()
            .enumerate()
            .map(|(g, unit)| (idx(g, VarKind::Status, t), unit.params.cap_max))
            .collect();
        builder.push(
            RowTag::Reserve,
            None,
            coeffs,
            (1.0 + inst.reserve[t - 1]) * demand,
            f64::INFINITY,
        );
    }
    for line in &inst.lines {
        for t in 1..=t_len {
            let mut coeffs: Vec<(usize, f64)> = Vec::new();
            let mut offset = 0.0;
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
                        coeffs.push((idx(g, VarKind::Power, t), factor));
                    }
                }
            }
            builder.push(
                RowTag::LineFlow,
                None,
                coeffs,
                offset - line.capacity,
                offset + line.capacity,
            );
        }
    }

    let rows = builder.rows;
    Ok(MilpModel { rows, ..model_stub })
}

/// Adds the six two-period hull families of every generator as permanent
/// rows; returns the number added. Applying it twice is rejected.
pub fn strengthen_two_period(model: &mut MilpModel, inst: &UcInstance) -> Result<usize, ModelError> {
    if model.is_strengthened() {
        return Err(ModelError::Invalid(
            "model already carries the two-period rows".into(),
        ));
    }
    if inst.generators.len() != model.num_gens || inst.horizon != model.horizon {
        return Err(ModelError::Invalid(
            "instance does not match the model shape".into(),
        ));
    }
    let mut added = 0;
    for (g, unit) in inst.generators.iter().enumerate() {
        let cuts = two_period_cuts(&unit.params, model.horizon)
            .map_err(|e| ModelError::Invalid(e.to_string()))?;
        for q in &cuts {
            model.add_cut_row(g, q);
            added += 1;
        }
    }
    model.strengthened = true;
    Ok(added)
}

/// Closed-form row count of the default assembly for one generator with an
/// all-off history (used by tests to pin the builder's shape).
pub fn expected_generator_rows(p: &GeneratorParams, phi: f64, psi: f64, t_len: usize, segments: usize) -> usize {
    let window = |min_time: usize| -> usize {
        // Period-1 rows survive for k in [2, min(T, min_time)].
        let first = t_len.min(min_time).saturating_sub(1);
        let rest: usize = (2..=t_len)
            .map(|t| (min_time - 1).min(t_len - t))
            .sum();
        first + rest
    };
    let min_up_rows = window(p.min_up);
    // All-off history keeps no minimum-down rows at the boundary.
    let min_down_rows: usize = (2..=t_len)
        .map(|t| (p.min_down - 1).min(t_len - t))
        .sum();
    let capacity = 2 * t_len;
    let ramp = 2 * t_len - 1;
    let start = if phi > 0.0 { t_len } else { 0 };
    let shut = if psi > 0.0 { t_len - 1 } else { 0 };
    min_up_rows + min_down_rows + capacity + ramp + start + shut + segments * t_len
}

/// `Family` tags of the two-period strengthening rows.
pub fn hull_families() -> [Family; 6] {
    [
        Family::HullCapForward,
        Family::HullCapBackward,
        Family::HullRampUpMin,
        Family::HullRampUpStart,
        Family::HullRampDownMin,
        Family::HullRampDownShut,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{self, Polytope};
    use crate::types::GeneratorParams;

    pub(crate) fn unit(
        params: GeneratorParams,
        costs: CostParams,
        initial: InitialState,
    ) -> GeneratorUnit {
        GeneratorUnit {
            bus: "b1".into(),
            params,
            costs,
            initial,
        }
    }

    pub(crate) fn single_bus_instance(
        units: Vec<GeneratorUnit>,
        load: Vec<f64>,
        reserve_factor: f64,
    ) -> UcInstance {
        let horizon = load.len();
        UcInstance {
            horizon,
            reserve: vec![reserve_factor; horizon],
            buses: vec![Bus {
                id: "b1".into(),
                load,
            }],
            lines: Vec::new(),
            generators: units,
        }
    }

    fn small_gen() -> GeneratorParams {
        GeneratorParams {
            cap_max: 80.0,
            cap_min: 8.0,
            min_up: 2,
            min_down: 2,
            ramp: 10.0,
            start_ramp: 15.0,
        }
    }

    fn small_costs() -> CostParams {
        CostParams {
            quad: 0.004,
            lin: 20.0,
            fixed_on: 100.0,
            startup: 50.0,
            shutdown: 30.0,
        }
    }

    #[test]
    fn tiny_model_tags_and_counts() {
        // With unit minimum times the window rows all fold away.
        let p = GeneratorParams {
            min_up: 1,
            min_down: 1,
            ..small_gen()
        };
        let inst = single_bus_instance(
            vec![unit(p, small_costs(), InitialState::off(&p))],
            vec![10.0, 12.0],
            0.0,
        );
        let model = build_uc_model(&inst, 3).unwrap();
        assert_eq!(model.num_vars(), 10);
        assert_eq!(model.num_binary(), 2);
        let mut tags: Vec<RowTag> = model.rows.iter().map(|r| r.tag).collect();
        tags.dedup();
        for tag in &tags {
            assert!(
                matches!(
                    tag,
                    RowTag::CapLower
                        | RowTag::CapUpper
                        | RowTag::RampUp
                        | RowTag::RampDown
                        | RowTag::StartCost
                        | RowTag::ShutCost
                        | RowTag::CostEpi
                        | RowTag::LoadBalance
                        | RowTag::Reserve
                ),
                "unexpected tag {tag:?}"
            );
        }
        let expected =
            expected_generator_rows(&p, small_costs().startup, small_costs().shutdown, 2, 3);
        let gen_rows = model
            .rows
            .iter()
            .filter(|r| r.gen.is_some())
            .count();
        assert_eq!(gen_rows, expected);
    }

    #[test]
    fn generator_row_counts_follow_the_closed_form() {
        for (l, d, t_len, segments) in [(2usize, 2usize, 6usize, 3usize), (3, 2, 8, 9), (1, 1, 5, 1)] {
            let p = GeneratorParams {
                min_up: l,
                min_down: d,
                ..small_gen()
            };
            let inst = single_bus_instance(
                vec![unit(p, small_costs(), InitialState::off(&p))],
                vec![10.0; t_len],
                0.0,
            );
            let model = build_uc_model(&inst, segments).unwrap();
            let gen_rows = model.rows.iter().filter(|r| r.gen.is_some()).count();
            let expected = expected_generator_rows(
                &p,
                small_costs().startup,
                small_costs().shutdown,
                t_len,
                segments,
            );
            assert_eq!(gen_rows, expected, "L={l} D={d} T={t_len}");
            assert_eq!(model.num_vars(), 5 * t_len);
        }
    }

    #[test]
    fn inconsistent_history_is_rejected_by_name() {
        let p = small_gen();
        let mut init = InitialState::off(&p);
        // An interior one-period run inside a window needing two.
        init.history = vec![false, true, false, false];
        let inst = single_bus_instance(
            vec![unit(p, small_costs(), init)],
            vec![10.0, 10.0],
            0.0,
        );
        let err = build_uc_model(&inst, 3).unwrap_err();
        let ModelError::Invalid(msg) = err;
        assert!(msg.contains("generator 1"), "message was: {msg}");
    }

    #[test]
    fn strengthening_adds_six_rows_per_transition_once() {
        let p = small_gen();
        let inst = single_bus_instance(
            vec![unit(p, small_costs(), InitialState::off(&p))],
            vec![10.0; 24],
            0.0,
        );
        let mut model = build_uc_model(&inst, 3).unwrap();
        let before = model.num_rows();
        let added = strengthen_two_period(&mut model, &inst).unwrap();
        assert_eq!(added, 6 * 23);
        assert_eq!(model.num_rows(), before + added);
        assert!(strengthen_two_period(&mut model, &inst).is_err());
    }

    #[test]
    fn relaxation_is_idempotent_and_binary_free() {
        let p = small_gen();
        let inst = single_bus_instance(
            vec![unit(p, small_costs(), InitialState::off(&p))],
            vec![10.0, 10.0, 10.0],
            0.0,
        );
        let model = build_uc_model(&inst, 3).unwrap();
        let relaxed = model.lp_relaxation();
        assert_eq!(relaxed.num_binary(), 0);
        assert_eq!(relaxed.lp_relaxation(), relaxed);
        assert!(model.has_integers());
        assert!(!relaxed.has_integers());
    }

    #[test]
    fn feasible_dispatches_satisfy_every_row() {
        // Take exact polytope points, extend them with the forced cost
        // variables, and check the whole row system.
        let p = small_gen();
        let c = small_costs();
        let spec = Polytope::new(p, 4).unwrap();
        let pts = oracle::vertices(&spec).unwrap();
        let cold = InitialState::off(&p);
        let reachable = oracle::schedules_with_history(&p, &cold.history, 4).unwrap();
        for vp in pts.iter().step_by(5) {
            let total: f64 = vp.x.iter().map(oracle::rat_to_f64).sum::<f64>();
            let load: Vec<f64> = vp.x.iter().map(oracle::rat_to_f64).collect();
            // Only schedules reachable from the cold start fit the model's
            // initial-condition rows.
            if total == 0.0 || !reachable.contains(&vp.y) {
                continue;
            }
            let inst = single_bus_instance(
                vec![unit(p, c, InitialState::off(&p))],
                load,
                0.0,
            );
            let model = match build_uc_model(&inst, 3) {
                Ok(m) => m,
                // Points starting mid-run can clash with the cold start.
                Err(_) => continue,
            };
            let pw = linearize_cost(&c, &p, 3).unwrap();
            let mut values = vec![0.0; model.num_vars()];
            let mut prev_on = false;
            let mut feasible_from_cold = true;
            for t in 1..=4usize {
                let on = vp.y[t - 1];
                let x = oracle::rat_to_f64(&vp.x[t - 1]);
                if t == 1 && on && x > p.start_ramp {
                    feasible_from_cold = false;
                }
                values[model.var_index(0, VarKind::Power, t)] = x;
                values[model.var_index(0, VarKind::Status, t)] = if on { 1.0 } else { 0.0 };
                values[model.var_index(0, VarKind::StartCost, t)] =
                    if on && !prev_on { c.startup } else { 0.0 };
                values[model.var_index(0, VarKind::ShutCost, t)] =
                    if !on && prev_on { c.shutdown } else { 0.0 };
                values[model.var_index(0, VarKind::CostEpi, t)] =
                    if on { pw.value(x) } else { 0.0 };
                prev_on = on;
            }
            if !feasible_from_cold {
                continue;
            }
            let lp = model.to_lp();
            let act = lp.activities(&values);
            for (i, row) in model.rows.iter().enumerate() {
                assert!(
                    act[i] >= row.lb - 1e-9 && act[i] <= row.ub + 1e-9,
                    "row {i} {:?} violated: {} not in [{}, {}]",
                    row.tag,
                    act[i],
                    row.lb,
                    row.ub
                );
            }
        }
    }
}
