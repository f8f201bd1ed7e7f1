//! Domain types shared by every module: generator data, piecewise costs,
//! linear inequalities on the `(x, y)` variables of one generator, and
//! fractional points to be separated.
//!
//! Periods are 1-based throughout the public API; vectors are stored
//! 0-based internally.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Physical constants of a single generator.
///
/// `cap_max`/`cap_min` are the generation upper/lower bounds, `min_up` and
/// `min_down` the minimum up/down times in periods, `ramp` the maximum
/// output change between consecutive online periods, and `start_ramp` the
/// output cap in a start-up period (equal to the cap in the period before
/// a shutdown).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub cap_max: f64,
    pub cap_min: f64,
    pub min_up: usize,
    pub min_down: usize,
    pub ramp: f64,
    pub start_ramp: f64,
}

impl GeneratorParams {
    /// Largest lag `s` with `cap_max - start_ramp - s * ramp >= 0`.
    ///
    /// Coefficients of the single-variable cut families stay nonnegative
    /// exactly for lags up to this value.
    pub fn max_lag(&self) -> usize {
        let r = (self.cap_max - self.start_ramp) / self.ramp;
        if r < 0.0 {
            0
        } else {
            r.floor() as usize
        }
    }

    /// Largest gap `k >= 1` with `cap_max - cap_min - k * ramp > 0`, if any.
    pub fn max_gap(&self, horizon: usize) -> Option<usize> {
        let mut k = None;
        for cand in 1..horizon {
            if self.cap_max - self.cap_min - cand as f64 * self.ramp > 0.0 {
                k = Some(cand);
            } else {
                break;
            }
        }
        k
    }
}

/// Cost data of a single generator: quadratic generation cost
/// `quad * x^2 + lin * x`, a fixed per-period cost while online, and fixed
/// start-up/shut-down costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    pub quad: f64,
    pub lin: f64,
    pub fixed_on: f64,
    pub startup: f64,
    pub shutdown: f64,
}

/// Named violation of a generator-parameter invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamViolation {
    /// `cap_max > cap_min` fails.
    CapOrder,
    /// `cap_min > 0` fails.
    CapMinPositive,
    /// `ramp > 0` fails.
    RampPositive,
    /// `min_up >= 1` fails.
    MinUpPositive,
    /// `min_down >= 1` fails.
    MinDownPositive,
    /// `start_ramp + ramp <= cap_max` fails.
    StartRampHeadroom,
    /// `cap_min < start_ramp < cap_min + ramp` fails.
    StartRampWindow,
}

impl fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            ParamViolation::CapOrder => "cap_max > cap_min",
            ParamViolation::CapMinPositive => "cap_min > 0",
            ParamViolation::RampPositive => "ramp > 0",
            ParamViolation::MinUpPositive => "min_up >= 1",
            ParamViolation::MinDownPositive => "min_down >= 1",
            ParamViolation::StartRampHeadroom => "start_ramp + ramp <= cap_max",
            ParamViolation::StartRampWindow => "cap_min < start_ramp < cap_min + ramp",
        };
        write!(f, "{msg}")
    }
}

/// Outcome of [`validate_generator`]: empty iff all invariants hold.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<ParamViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every parameter invariant and reports all violations at once.
pub fn validate_generator(p: &GeneratorParams) -> ValidationReport {
    let mut violations = Vec::new();
    if !(p.cap_max > p.cap_min) {
        violations.push(ParamViolation::CapOrder);
    }
    if !(p.cap_min > 0.0) {
        violations.push(ParamViolation::CapMinPositive);
    }
    if !(p.ramp > 0.0) {
        violations.push(ParamViolation::RampPositive);
    }
    if p.min_up < 1 {
        violations.push(ParamViolation::MinUpPositive);
    }
    if p.min_down < 1 {
        violations.push(ParamViolation::MinDownPositive);
    }
    if !(p.start_ramp + p.ramp <= p.cap_max) {
        violations.push(ParamViolation::StartRampHeadroom);
    }
    if !(p.cap_min < p.start_ramp && p.start_ramp < p.cap_min + p.ramp) {
        violations.push(ParamViolation::StartRampWindow);
    }
    ValidationReport { violations }
}

/// Convex piecewise-linear over-approximation of the quadratic generation
/// cost on `[cap_min, cap_max]`.
///
/// Segment `i` is the secant of the quadratic between `breakpoints[i]` and
/// `breakpoints[i + 1]`; it interpolates the quadratic exactly at both
/// endpoints and lies above it in between.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseCost {
    pub breakpoints: Vec<f64>,
    pub slopes: Vec<f64>,
    pub intercepts: Vec<f64>,
}

impl PiecewiseCost {
    pub fn segments(&self) -> usize {
        self.slopes.len()
    }

    /// Value of the approximation at `x`: the maximum over all segment lines.
    pub fn value(&self, x: f64) -> f64 {
        self.slopes
            .iter()
            .zip(&self.intercepts)
            .map(|(s, c)| s * x + c)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoreError {
    InvalidArgument(String),
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
        }
    }
}

impl std::error::Error for CoreError {}

/// Builds the secant approximation of `quad * x^2 + lin * x` with evenly
/// spaced breakpoints on `[cap_min, cap_max]`.
pub fn linearize_cost(
    c: &CostParams,
    p: &GeneratorParams,
    segments: usize,
) -> Result<PiecewiseCost, CoreError> {
    if segments == 0 {
        return Err(CoreError::InvalidArgument("segments must be >= 1".into()));
    }
    let report = validate_generator(p);
    if !report.is_valid() {
        return Err(CoreError::InvalidArgument(format!(
            "generator parameters invalid: {}",
            report
                .violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        )));
    }
    let n = segments;
    let width = (p.cap_max - p.cap_min) / n as f64;
    let breakpoints: Vec<f64> = (0..=n).map(|i| p.cap_min + i as f64 * width).collect();
    let mut slopes = Vec::with_capacity(n);
    let mut intercepts = Vec::with_capacity(n);
    for i in 0..n {
        let (b0, b1) = (breakpoints[i], breakpoints[i + 1]);
        // Secant of a*x^2 + b*x between b0 and b1: slope a*(b0+b1)+b,
        // intercept -a*b0*b1 (so both endpoints interpolate exactly).
        slopes.push(c.quad * (b0 + b1) + c.lin);
        intercepts.push(-c.quad * b0 * b1);
    }
    Ok(PiecewiseCost {
        breakpoints,
        slopes,
        intercepts,
    })
}

/// Which inequality family a [`LinearInequality`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `x_t <= start_ramp*y_t + (cap_max - start_ramp)*y_{t+1}`
    HullCapForward,
    /// `x_t <= (cap_max - start_ramp)*y_{t-1} + start_ramp*y_t`
    HullCapBackward,
    /// `x_t - x_{t-1} <= (cap_min + ramp)*y_t - cap_min*y_{t-1}`
    HullRampUpMin,
    /// `x_t - x_{t-1} <= start_ramp*y_t - (start_ramp - ramp)*y_{t-1}`
    HullRampUpStart,
    /// `x_t - x_{t+1} <= (cap_min + ramp)*y_t - cap_min*y_{t+1}`
    HullRampDownMin,
    /// `x_t - x_{t+1} <= start_ramp*y_t - (start_ramp - ramp)*y_{t+1}`
    HullRampDownShut,
    /// `x_t - x_{t±k} <= (cap_min + k*ramp)*y_t - cap_min*y_{t±k}`
    RampWindow,
    /// Single continuous variable bounded through start-up lags.
    SingleVar,
    /// Single variable with a fractional blend toward the neighbor period.
    SingleVarEta,
    /// Single variable anchored on the start-up ramp cap.
    SingleVarEtaShift,
    /// Two continuous variables `k` periods apart with a look-ahead window.
    TwoVar,
    /// Two-variable form anchored on the start-up ramp cap.
    TwoVarStart,
}

/// Orientation of a cut: `Backward` references lags `t - s`, `Forward`
/// references leads `t + s` (the index-reversed twin).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    Backward,
    Forward,
}

/// Parameter tuple that produced a cut; unused parts stay at their
/// defaults and `lags` is always sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutParams {
    pub t: usize,
    pub lags: Vec<usize>,
    pub eta: f64,
    pub k: usize,
    pub m: usize,
    pub direction: Direction,
}

impl CutParams {
    pub fn new(t: usize, direction: Direction) -> Self {
        CutParams {
            t,
            lags: Vec::new(),
            eta: 0.0,
            k: 0,
            m: 0,
            direction,
        }
    }

    pub fn with_lags(mut self, lags: Vec<usize>) -> Self {
        self.lags = lags;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_gap(mut self, k: usize, m: usize) -> Self {
        self.k = k;
        self.m = m;
        self
    }
}

/// A sparse inequality `sum_t a_t*x_t + sum_t b_t*y_t <= rhs` over the
/// variables of one generator. Coefficient maps never store explicit zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearInequality {
    pub x_coeffs: BTreeMap<usize, f64>,
    pub y_coeffs: BTreeMap<usize, f64>,
    pub rhs: f64,
    pub family: Family,
    pub params: CutParams,
}

impl LinearInequality {
    pub fn new(family: Family, params: CutParams, rhs: f64) -> Self {
        LinearInequality {
            x_coeffs: BTreeMap::new(),
            y_coeffs: BTreeMap::new(),
            rhs,
            family,
            params,
        }
    }

    /// Adds `coeff` to the x-coefficient of period `t`, dropping the entry
    /// if it cancels to zero.
    pub fn add_x(&mut self, t: usize, coeff: f64) {
        add_coeff(&mut self.x_coeffs, t, coeff);
    }

    /// Adds `coeff` to the y-coefficient of period `t`.
    pub fn add_y(&mut self, t: usize, coeff: f64) {
        add_coeff(&mut self.y_coeffs, t, coeff);
    }

    /// Largest period referenced by any coefficient (0 if none).
    pub fn max_period(&self) -> usize {
        let mx = self.x_coeffs.keys().next_back().copied().unwrap_or(0);
        let my = self.y_coeffs.keys().next_back().copied().unwrap_or(0);
        mx.max(my)
    }

    /// Reflects every period index `i` to `horizon - i + 1` in both
    /// coefficient maps, keeping values bit-identical.
    pub fn mirror(&self, horizon: usize) -> LinearInequality {
        let flip = |m: &BTreeMap<usize, f64>| {
            m.iter()
                .map(|(&t, &c)| (horizon - t + 1, c))
                .collect::<BTreeMap<_, _>>()
        };
        let mut params = self.params.clone();
        params.t = horizon - self.params.t + 1;
        params.direction = match self.params.direction {
            Direction::Backward => Direction::Forward,
            Direction::Forward => Direction::Backward,
        };
        LinearInequality {
            x_coeffs: flip(&self.x_coeffs),
            y_coeffs: flip(&self.y_coeffs),
            rhs: self.rhs,
            family: self.family,
            params,
        }
    }
}

fn add_coeff(map: &mut BTreeMap<usize, f64>, t: usize, coeff: f64) {
    if coeff == 0.0 {
        return;
    }
    let entry = map.entry(t).or_insert(0.0);
    *entry += coeff;
    if *entry == 0.0 {
        map.remove(&t);
    }
}

/// A point `(x, y)` with `x >= 0` and `y` in the unit box, typically a
/// fractional LP solution restricted to one generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalPoint {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl FractionalPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, CoreError> {
        if x.len() != y.len() {
            return Err(CoreError::InvalidArgument(format!(
                "x has length {} but y has length {}",
                x.len(),
                y.len()
            )));
        }
        if let Some(v) = x.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(CoreError::InvalidArgument(format!("x value {v} not in [0, inf)")));
        }
        if let Some(v) = y.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(CoreError::InvalidArgument(format!("y value {v} not in [0, 1]")));
        }
        Ok(FractionalPoint { x, y })
    }

    /// Builds a point from possibly noisy LP values, clamping `x` below at
    /// zero and `y` into `[0, 1]`.
    pub fn clamped(x: Vec<f64>, y: Vec<f64>) -> Self {
        let x = x.into_iter().map(|v| v.max(0.0)).collect();
        let y = y.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
        FractionalPoint { x, y }
    }

    pub fn horizon(&self) -> usize {
        self.x.len()
    }

    /// Generation amount in period `t` (1-based).
    pub fn x(&self, t: usize) -> f64 {
        self.x[t - 1]
    }

    /// Commitment value in period `t` (1-based).
    pub fn y(&self, t: usize) -> f64 {
        self.y[t - 1]
    }

    pub fn x_slice(&self) -> &[f64] {
        &self.x
    }

    pub fn y_slice(&self) -> &[f64] {
        &self.y
    }
}

/// Evaluates `LHS - rhs` of `q` at `pt`; a positive result is the amount of
/// violation.
pub fn evaluate_inequality(q: &LinearInequality, pt: &FractionalPoint) -> Result<f64, CoreError> {
    let horizon = pt.horizon();
    let max = q.max_period();
    if max > horizon {
        return Err(CoreError::InvalidArgument(format!(
            "inequality references period {max} beyond horizon {horizon}"
        )));
    }
    let min_x = q.x_coeffs.keys().next().copied().unwrap_or(1);
    let min_y = q.y_coeffs.keys().next().copied().unwrap_or(1);
    if min_x == 0 || min_y == 0 {
        return Err(CoreError::InvalidArgument(
            "inequality references period 0".into(),
        ));
    }
    let mut lhs = 0.0;
    for (&t, &c) in &q.x_coeffs {
        lhs += c * pt.x(t);
    }
    for (&t, &c) in &q.y_coeffs {
        lhs += c * pt.y(t);
    }
    Ok(lhs - q.rhs)
}
