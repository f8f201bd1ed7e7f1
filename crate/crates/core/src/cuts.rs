//! Constructors for every strong valid inequality family of the
//! single-generator commitment polytope.
//!
//! Each family comes in a backward form (referencing lags `t - s`) and a
//! forward form (leads `t + s`). Only the backward form is assembled
//! directly; the forward twin is obtained by reflecting the anchor period
//! and mirroring all indices, which the polytope's time-reversal symmetry
//! makes exact. Precondition failures name the first violated hypothesis
//! so callers can distinguish bad parameters from bad inequalities.
//!
//! Coefficients whose validity proof sits on an exact identity (blend
//! endpoints, lag weights, anchor sums) are computed through rational
//! arithmetic and rounded toward the safe side, so every emitted cut is
//! exactly valid for the polytope defined by the parameters as given —
//! never invalid by a stray unit in the last place.

use std::fmt;

use num_rational::BigRational;

use crate::types::{
    validate_generator, CutParams, Direction, Family, GeneratorParams, LinearInequality,
};

fn rational(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite parameter")
}

fn nearest_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().expect("in-range rational")
}

/// Largest float not exceeding the rational value.
fn f64_below(r: &BigRational) -> f64 {
    let x = nearest_f64(r);
    if rational(x) > *r {
        x.next_down()
    } else {
        x
    }
}

/// Smallest float not below the rational value.
fn f64_above(r: &BigRational) -> f64 {
    let x = nearest_f64(r);
    if rational(x) < *r {
        x.next_up()
    } else {
        x
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CutError {
    /// A parameter set that matches none of the admissible shapes; carries
    /// the name of the first failed hypothesis.
    Hypothesis(&'static str),
    InvalidArgument(String),
}

impl fmt::Display for CutError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutError::Hypothesis(name) => write!(f, "failed hypothesis: {name}"),
            CutError::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
        }
    }
}

impl std::error::Error for CutError {}

/// Identifier of a separable inequality family.
///
/// The `...Split` kinds are the variants whose lag set is a union of two
/// intervals reaching past the minimum up time; the others accept any lag
/// subset inside their low range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilyKind {
    SingleVar,
    SingleVarSplit,
    SingleVarEta,
    SingleVarEtaSplit,
    SingleVarEtaShift,
    SingleVarEtaShiftSplit,
    TwoVar,
    TwoVarStart,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 8] = [
        FamilyKind::SingleVar,
        FamilyKind::SingleVarSplit,
        FamilyKind::SingleVarEta,
        FamilyKind::SingleVarEtaSplit,
        FamilyKind::SingleVarEtaShift,
        FamilyKind::SingleVarEtaShiftSplit,
        FamilyKind::TwoVar,
        FamilyKind::TwoVarStart,
    ];

    /// The tag recorded on inequalities built from this kind.
    pub fn family(self) -> Family {
        match self {
            FamilyKind::SingleVar | FamilyKind::SingleVarSplit => Family::SingleVar,
            FamilyKind::SingleVarEta | FamilyKind::SingleVarEtaSplit => Family::SingleVarEta,
            FamilyKind::SingleVarEtaShift | FamilyKind::SingleVarEtaShiftSplit => {
                Family::SingleVarEtaShift
            }
            FamilyKind::TwoVar => Family::TwoVar,
            FamilyKind::TwoVarStart => Family::TwoVarStart,
        }
    }
}

/// Enumeration policy for [`admissible_params`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamPolicy {
    /// The static pool policy: lag sets restricted to the empty set and the
    /// full range, remaining parameters swept with facet conditions enforced.
    Seed,
    /// Every admissible parameter tuple, failing if more than `max_params`
    /// would be produced.
    Exhaustive { max_params: usize },
}

/// Emits the six two-period hull families for every admissible period:
/// capacity rows tied to the neighboring status and strengthened ramp rows.
/// Exactly `6 * (T - 1)` inequalities.
pub fn two_period_cuts(
    p: &GeneratorParams,
    horizon: usize,
) -> Result<Vec<LinearInequality>, CutError> {
    if horizon < 2 {
        return Err(CutError::InvalidArgument(
            "two-period families need a horizon of at least 2".into(),
        ));
    }
    let (cmin, v, vbar) = (p.cap_min, p.ramp, p.start_ramp);
    // Complements and sums rounded toward validity.
    let cap_gap = f64_above(&(rational(p.cap_max) - rational(vbar)));
    let min_step = f64_above(&(rational(cmin) + rational(v)));
    let shut_step = f64_below(&(rational(vbar) - rational(v)));
    let mut cuts = Vec::with_capacity(6 * (horizon - 1));
    for t in 1..horizon {
        // x_t <= vbar*y_t + (cap_max - vbar)*y_{t+1}
        let mut q = LinearInequality::new(
            Family::HullCapForward,
            CutParams::new(t, Direction::Forward),
            0.0,
        );
        q.add_x(t, 1.0);
        q.add_y(t, -vbar);
        q.add_y(t + 1, -cap_gap);
        cuts.push(q);
    }
    for t in 2..=horizon {
        // x_t <= (cap_max - vbar)*y_{t-1} + vbar*y_t
        let mut q = LinearInequality::new(
            Family::HullCapBackward,
            CutParams::new(t, Direction::Backward),
            0.0,
        );
        q.add_x(t, 1.0);
        q.add_y(t - 1, -cap_gap);
        q.add_y(t, -vbar);
        cuts.push(q);
    }
    for t in 2..=horizon {
        // x_t - x_{t-1} <= (cmin + v)*y_t - cmin*y_{t-1}
        let mut q = LinearInequality::new(
            Family::HullRampUpMin,
            CutParams::new(t, Direction::Backward),
            0.0,
        );
        q.add_x(t, 1.0);
        q.add_x(t - 1, -1.0);
        q.add_y(t, -min_step);
        q.add_y(t - 1, cmin);
        cuts.push(q);
    }
    for t in 2..=horizon {
        // x_t - x_{t-1} <= vbar*y_t - (vbar - v)*y_{t-1}
        let mut q = LinearInequality::new(
            Family::HullRampUpStart,
            CutParams::new(t, Direction::Backward),
            0.0,
        );
        q.add_x(t, 1.0);
        q.add_x(t - 1, -1.0);
        q.add_y(t, -vbar);
        q.add_y(t - 1, shut_step);
        cuts.push(q);
    }
    for t in 1..horizon {
        // x_t - x_{t+1} <= (cmin + v)*y_t - cmin*y_{t+1}
        let mut q = LinearInequality::new(
            Family::HullRampDownMin,
            CutParams::new(t, Direction::Forward),
            0.0,
        );
        q.add_x(t, 1.0);
        q.add_x(t + 1, -1.0);
        q.add_y(t, -min_step);
        q.add_y(t + 1, cmin);
        cuts.push(q);
    }
    for t in 1..horizon {
        // x_t - x_{t+1} <= vbar*y_t - (vbar - v)*y_{t+1}
        let mut q = LinearInequality::new(
            Family::HullRampDownShut,
            CutParams::new(t, Direction::Forward),
            0.0,
        );
        q.add_x(t, 1.0);
        q.add_x(t + 1, -1.0);
        q.add_y(t, -vbar);
        q.add_y(t + 1, shut_step);
        cuts.push(q);
    }
    Ok(cuts)
}

/// `x_t - x_{t-k} <= (cap_min + k*ramp)*y_t - cap_min*y_{t-k}` and its
/// forward twin; the windowless special case of the two-variable family.
pub fn ramp_k_cut(
    p: &GeneratorParams,
    horizon: usize,
    t: usize,
    k: usize,
    direction: Direction,
) -> Result<LinearInequality, CutError> {
    if k < 1 || k >= horizon {
        return Err(CutError::InvalidArgument(format!(
            "k = {k} not in [1, {}]",
            horizon.saturating_sub(1)
        )));
    }
    let t_back = match direction {
        Direction::Backward => t,
        Direction::Forward => reflect(t, horizon)?,
    };
    if t_back < k + 1 || t_back > horizon {
        return Err(CutError::InvalidArgument(format!(
            "t = {t} out of range for k = {k}"
        )));
    }
    let mut q = LinearInequality::new(
        Family::RampWindow,
        CutParams::new(t_back, Direction::Backward).with_gap(k, 0),
        0.0,
    );
    q.add_x(t_back, 1.0);
    q.add_x(t_back - k, -1.0);
    let anchor = f64_above(&(rational(p.cap_min) + rational(k as f64) * rational(p.ramp)));
    q.add_y(t_back, -anchor);
    q.add_y(t_back - k, p.cap_min);
    Ok(match direction {
        Direction::Backward => q,
        Direction::Forward => q.mirror(horizon),
    })
}

fn reflect(t: usize, horizon: usize) -> Result<usize, CutError> {
    if t < 1 || t > horizon {
        return Err(CutError::InvalidArgument(format!(
            "t = {t} not in [1, {horizon}]"
        )));
    }
    Ok(horizon - t + 1)
}

fn check_generator(p: &GeneratorParams) -> Result<(), CutError> {
    if !validate_generator(p).is_valid() {
        return Err(CutError::InvalidArgument(
            "generator parameters violate the model assumptions".into(),
        ));
    }
    Ok(())
}

/// Validates a lag set against a single-variable family's admissible shapes
/// and returns the effective largest lag (`None` for the empty set).
///
/// `s_lo` is the family's smallest admissible lag, `up_cap` the largest lag
/// the arbitrary-subset shape allows from the minimum up time, and
/// `horizon_cap` the cap imposed by the anchor's own period range.
fn check_lag_set(
    p: &GeneratorParams,
    lags: &[usize],
    s_lo: usize,
    up_cap: usize,
    horizon_cap: i64,
) -> Result<Option<usize>, CutError> {
    if lags.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CutError::Hypothesis("lags_sorted_strictly_ascending"));
    }
    let Some(&s_max) = lags.last() else {
        return Ok(None);
    };
    if lags[0] < s_lo {
        return Err(CutError::Hypothesis("lags_at_least_family_minimum"));
    }
    let outer_cap = horizon_cap.min(p.max_lag() as i64);
    if (s_max as i64) > outer_cap {
        return Err(CutError::Hypothesis("s_max_within_horizon_and_ramp_range"));
    }
    if s_max <= up_cap {
        // Arbitrary subsets are admissible inside the low range.
        return Ok(Some(s_max));
    }
    // Past the minimum up time the set must be a union [s_lo, alpha] and
    // [beta, s_max] of at most two intervals starting at the family minimum.
    if lags[0] != s_lo {
        return Err(CutError::Hypothesis("split_starts_at_family_minimum"));
    }
    let mut gap_alpha = None;
    for w in lags.windows(2) {
        if w[1] > w[0] + 1 {
            if gap_alpha.is_some() {
                return Err(CutError::Hypothesis("split_has_single_gap"));
            }
            gap_alpha = Some(w[0]);
        }
    }
    if let Some(alpha) = gap_alpha {
        if s_max > p.min_up + alpha {
            return Err(CutError::Hypothesis("split_gap_within_min_up_of_s_max"));
        }
    }
    Ok(Some(s_max))
}

/// Assembles the backward single-variable skeleton
/// `x_t <= c_prev*y_{t-1} + c_cur*y_t + c_next*y_{t+1}
///        - sum_s (cap_max - start_ramp - s*ramp)*(y_{t-s} - y_{t-s-1})`
/// and mirrors it when the forward form was requested.
#[allow(clippy::too_many_arguments)]
fn build_single_var(
    family: Family,
    p: &GeneratorParams,
    horizon: usize,
    cp: &CutParams,
    c_prev: f64,
    c_cur: f64,
    c_next: f64,
    t_lo: usize,
    t_hi: usize,
) -> Result<LinearInequality, CutError> {
    let t_back = match cp.direction {
        Direction::Backward => cp.t,
        Direction::Forward => reflect(cp.t, horizon)?,
    };
    let s_max = cp.lags.last().copied();
    let lo = match s_max {
        Some(s) => t_lo.max(s + 2),
        None => t_lo,
    };
    if t_back < lo || t_back > t_hi {
        return Err(CutError::Hypothesis("t_in_admissible_range"));
    }
    let mut params = cp.clone();
    params.t = t_back;
    params.direction = Direction::Backward;
    let mut q = LinearInequality::new(family, params, 0.0);
    q.add_x(t_back, 1.0);
    q.add_y(t_back, -c_cur);
    if c_prev != 0.0 {
        q.add_y(t_back - 1, -c_prev);
    }
    if c_next != 0.0 {
        q.add_y(t_back + 1, -c_next);
    }
    for &s in &cp.lags {
        let coeff = f64_below(
            &(rational(p.cap_max)
                - rational(p.start_ramp)
                - rational(s as f64) * rational(p.ramp)),
        );
        q.add_y(t_back - s, coeff);
        q.add_y(t_back - s - 1, -coeff);
    }
    Ok(match cp.direction {
        Direction::Backward => q,
        Direction::Forward => q.mirror(horizon),
    })
}

/// `x_t <= cap_max*y_t - sum_s (cap_max - start_ramp - s*ramp)(y_{t-s} - y_{t-s-1})`
/// (backward) or the index-reversed forward twin. Lags may be any subset of
/// the low range or a two-interval split reaching past the minimum up time.
pub fn single_var_cut(
    p: &GeneratorParams,
    horizon: usize,
    cp: &CutParams,
) -> Result<LinearInequality, CutError> {
    check_generator(p)?;
    check_lag_set(p, &cp.lags, 0, p.min_up - 1, horizon as i64 - 2)?;
    build_single_var(
        Family::SingleVar,
        p,
        horizon,
        cp,
        0.0,
        p.cap_max,
        0.0,
        1,
        horizon,
    )
}

/// Largest admissible blend weight for [`single_var_eta_cut`].
pub fn eta_max(p: &GeneratorParams) -> f64 {
    ((p.min_up - 1) as f64).min((p.cap_max - p.start_ramp) / p.ramp)
}

/// Largest admissible blend weight for [`single_var_eta_shift_cut`].
pub fn eta_shift_max(p: &GeneratorParams) -> f64 {
    (p.min_up as f64).min((p.cap_max - p.start_ramp) / p.ramp)
}

/// Blended form
/// `x_t <= (cap_max - eta*ramp)*y_t + eta*ramp*y_{t+1} - sum_s ...` which
/// tilts part of the capacity bound onto the next period's status.
pub fn single_var_eta_cut(
    p: &GeneratorParams,
    horizon: usize,
    cp: &CutParams,
) -> Result<LinearInequality, CutError> {
    check_generator(p)?;
    if !(0.0..=eta_max(p) + 1e-12).contains(&cp.eta) {
        return Err(CutError::Hypothesis("eta_in_admissible_interval"));
    }
    check_lag_set(p, &cp.lags, 0, p.min_up - 1, horizon as i64 - 3)?;
    let gap = rational(p.cap_max) - rational(p.start_ramp);
    let ev = (rational(cp.eta) * rational(p.ramp)).min(gap);
    let c_next = f64_below(&ev).max(0.0);
    let c_cur = f64_above(&(rational(p.cap_max) - rational(c_next)));
    build_single_var(
        Family::SingleVarEta,
        p,
        horizon,
        cp,
        0.0,
        c_cur,
        c_next,
        1,
        horizon.saturating_sub(1),
    )
}

/// Start-ramp anchored form
/// `x_t <= (start_ramp + eta*ramp)*y_t + (cap_max - start_ramp - eta*ramp)*y_{t-1} - sum_s ...`
/// whose lag set starts at 1.
pub fn single_var_eta_shift_cut(
    p: &GeneratorParams,
    horizon: usize,
    cp: &CutParams,
) -> Result<LinearInequality, CutError> {
    check_generator(p)?;
    if !(0.0..=eta_shift_max(p) + 1e-12).contains(&cp.eta) {
        return Err(CutError::Hypothesis("eta_in_admissible_interval"));
    }
    check_lag_set(p, &cp.lags, 1, p.min_up, horizon as i64 - 2)?;
    let gap = rational(p.cap_max) - rational(p.start_ramp);
    let ev = (rational(cp.eta) * rational(p.ramp)).min(gap.clone());
    let c_prev = f64_below(&(gap - ev)).max(0.0);
    let c_cur = f64_above(&(rational(p.cap_max) - rational(c_prev)));
    build_single_var(
        Family::SingleVarEtaShift,
        p,
        horizon,
        cp,
        c_prev,
        c_cur,
        0.0,
        2,
        horizon,
    )
}

fn check_two_var_common(
    p: &GeneratorParams,
    horizon: usize,
    cp: &CutParams,
    lag_up_slack: usize,
) -> Result<(), CutError> {
    if cp.k < 1 || cp.k >= horizon {
        return Err(CutError::Hypothesis("k_in_horizon_range"));
    }
    if !(p.cap_max - p.cap_min - cp.k as f64 * p.ramp > 0.0) {
        return Err(CutError::Hypothesis("cap_gap_exceeds_k_ramp"));
    }
    if cp.m >= cp.k {
        return Err(CutError::Hypothesis("m_below_k"));
    }
    if cp.lags.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CutError::Hypothesis("lags_sorted_strictly_ascending"));
    }
    if let Some(&s_max) = cp.lags.last() {
        let cap = (cp.k as i64 - 1).min(p.min_up as i64 - cp.m as i64 - lag_up_slack as i64);
        if (s_max as i64) > cap {
            return Err(CutError::Hypothesis("lags_within_gap_and_min_up_range"));
        }
    }
    Ok(())
}

/// Two-variable bound
/// `x_t - x_{t-k} <= (cap_min + (k-m)*ramp)*y_t + ramp*sum_{i=1..m} y_{t+i}
///                  - cap_min*y_{t-k}
///                  - sum_s (cap_min + (k-s)*ramp - start_ramp)(y_{t-s} - y_{t-s-1})`
/// (backward) or the forward twin bounding `x_t - x_{t+k}`.
pub fn two_var_cut(
    p: &GeneratorParams,
    horizon: usize,
    cp: &CutParams,
) -> Result<LinearInequality, CutError> {
    check_generator(p)?;
    check_two_var_common(p, horizon, cp, 1)?;
    let t_back = match cp.direction {
        Direction::Backward => cp.t,
        Direction::Forward => reflect(cp.t, horizon)?,
    };
    if t_back < cp.k + 1 || t_back + cp.m > horizon {
        return Err(CutError::Hypothesis("t_in_admissible_range"));
    }
    let mut params = cp.clone();
    params.t = t_back;
    params.direction = Direction::Backward;
    let mut q = LinearInequality::new(Family::TwoVar, params, 0.0);
    q.add_x(t_back, 1.0);
    q.add_x(t_back - cp.k, -1.0);
    let anchor = f64_above(
        &(rational(p.cap_min) + rational((cp.k - cp.m) as f64) * rational(p.ramp)),
    );
    q.add_y(t_back, -anchor);
    for i in 1..=cp.m {
        q.add_y(t_back + i, -p.ramp);
    }
    q.add_y(t_back - cp.k, p.cap_min);
    for &s in &cp.lags {
        let coeff = f64_below(
            &(rational(p.cap_min) + rational((cp.k - s) as f64) * rational(p.ramp)
                - rational(p.start_ramp)),
        );
        q.add_y(t_back - s, coeff);
        q.add_y(t_back - s - 1, -coeff);
    }
    Ok(match cp.direction {
        Direction::Backward => q,
        Direction::Forward => q.mirror(horizon),
    })
}

/// Start-ramp anchored two-variable bound
/// `x_t - x_{t-k} <= (cap_min + (k-m)*ramp - start_ramp)*y_{t+m+1}
///                  + ramp*sum_{i=1..m} y_{t+i} + start_ramp*y_t
///                  - cap_min*y_{t-k} - sum_s ...`
/// (backward) or the forward twin.
pub fn two_var_start_cut(
    p: &GeneratorParams,
    horizon: usize,
    cp: &CutParams,
) -> Result<LinearInequality, CutError> {
    check_generator(p)?;
    check_two_var_common(p, horizon, cp, 2)?;
    let t_back = match cp.direction {
        Direction::Backward => cp.t,
        Direction::Forward => reflect(cp.t, horizon)?,
    };
    if t_back < cp.k + 1 || t_back + cp.m + 1 > horizon {
        return Err(CutError::Hypothesis("t_in_admissible_range"));
    }
    let mut params = cp.clone();
    params.t = t_back;
    params.direction = Direction::Backward;
    let mut q = LinearInequality::new(Family::TwoVarStart, params, 0.0);
    q.add_x(t_back, 1.0);
    q.add_x(t_back - cp.k, -1.0);
    let head = f64_above(
        &(rational(p.cap_min) + rational((cp.k - cp.m) as f64) * rational(p.ramp)
            - rational(p.start_ramp)),
    );
    q.add_y(t_back + cp.m + 1, -head);
    for i in 1..=cp.m {
        q.add_y(t_back + i, -p.ramp);
    }
    q.add_y(t_back, -p.start_ramp);
    q.add_y(t_back - cp.k, p.cap_min);
    for &s in &cp.lags {
        let coeff = f64_below(
            &(rational(p.cap_min) + rational((cp.k - s) as f64) * rational(p.ramp)
                - rational(p.start_ramp)),
        );
        q.add_y(t_back - s, coeff);
        q.add_y(t_back - s - 1, -coeff);
    }
    Ok(match cp.direction {
        Direction::Backward => q,
        Direction::Forward => q.mirror(horizon),
    })
}

/// Builds a cut for `kind` from a parameter tuple.
pub fn build_cut(
    kind: FamilyKind,
    p: &GeneratorParams,
    horizon: usize,
    cp: &CutParams,
) -> Result<LinearInequality, CutError> {
    match kind {
        FamilyKind::SingleVar | FamilyKind::SingleVarSplit => single_var_cut(p, horizon, cp),
        FamilyKind::SingleVarEta | FamilyKind::SingleVarEtaSplit => {
            single_var_eta_cut(p, horizon, cp)
        }
        FamilyKind::SingleVarEtaShift | FamilyKind::SingleVarEtaShiftSplit => {
            single_var_eta_shift_cut(p, horizon, cp)
        }
        FamilyKind::TwoVar => two_var_cut(p, horizon, cp),
        FamilyKind::TwoVarStart => two_var_start_cut(p, horizon, cp),
    }
}

struct SingleVarRanges {
    s_lo: usize,
    /// Largest lag for the arbitrary-subset shape.
    low_cap: i64,
    /// Largest lag overall (split shapes included).
    outer_cap: i64,
    /// Smallest largest-lag of a split shape.
    split_lo: i64,
    t_lo: usize,
    t_hi: usize,
    etas: Vec<f64>,
}

fn single_var_ranges(kind: FamilyKind, p: &GeneratorParams, horizon: usize) -> SingleVarRanges {
    let max_lag = p.max_lag() as i64;
    let l = p.min_up as i64;
    let t = horizon as i64;
    match kind {
        FamilyKind::SingleVar | FamilyKind::SingleVarSplit => SingleVarRanges {
            s_lo: 0,
            low_cap: (l - 1).min(t - 2).min(max_lag),
            outer_cap: (t - 2).min(max_lag),
            split_lo: l,
            t_lo: 1,
            t_hi: horizon,
            etas: vec![0.0],
        },
        FamilyKind::SingleVarEta | FamilyKind::SingleVarEtaSplit => SingleVarRanges {
            s_lo: 0,
            low_cap: (l - 1).min(t - 3).min(max_lag),
            outer_cap: (t - 3).min(max_lag),
            split_lo: l,
            t_lo: 1,
            t_hi: horizon.saturating_sub(1),
            etas: eta_grid(eta_max(p)),
        },
        FamilyKind::SingleVarEtaShift | FamilyKind::SingleVarEtaShiftSplit => SingleVarRanges {
            s_lo: 1,
            low_cap: l.min(t - 2).min(max_lag),
            outer_cap: (t - 2).min(max_lag),
            split_lo: l + 1,
            t_lo: 2,
            t_hi: horizon,
            etas: eta_grid(eta_shift_max(p)),
        },
        _ => unreachable!("two-variable kinds have their own ranges"),
    }
}

// The most violated member is always at an eta endpoint, so enumeration
// keeps {0, max} plus a midpoint for validity sweeps.
fn eta_grid(eta_max: f64) -> Vec<f64> {
    if eta_max <= 0.0 {
        vec![0.0]
    } else {
        vec![0.0, eta_max / 2.0, eta_max]
    }
}

/// Enumerates parameter tuples accepted by `kind`'s precondition for the
/// given direction, under the seed policy or exhaustively.
pub fn admissible_params(
    kind: FamilyKind,
    direction: Direction,
    p: &GeneratorParams,
    horizon: usize,
    policy: ParamPolicy,
) -> Result<Vec<CutParams>, CutError> {
    check_generator(p)?;
    let mut out = Vec::new();
    let budget = match policy {
        ParamPolicy::Exhaustive { max_params } => max_params,
        ParamPolicy::Seed => usize::MAX,
    };
    let push = |cp: CutParams, out: &mut Vec<CutParams>| -> Result<(), CutError> {
        if out.len() >= budget {
            return Err(CutError::InvalidArgument(
                "parameter enumeration exceeds budget".into(),
            ));
        }
        out.push(cp);
        Ok(())
    };

    match kind {
        FamilyKind::SingleVar
        | FamilyKind::SingleVarEta
        | FamilyKind::SingleVarEtaShift
        | FamilyKind::SingleVarSplit
        | FamilyKind::SingleVarEtaSplit
        | FamilyKind::SingleVarEtaShiftSplit => {
            let r = single_var_ranges(kind, p, horizon);
            let split = matches!(
                kind,
                FamilyKind::SingleVarSplit
                    | FamilyKind::SingleVarEtaSplit
                    | FamilyKind::SingleVarEtaShiftSplit
            );
            let lag_sets: Vec<Vec<usize>> = if split {
                match policy {
                    // Seeding keeps only the gapless intervals; gapped shapes
                    // are left to dynamic separation.
                    ParamPolicy::Seed => full_split_intervals(&r),
                    ParamPolicy::Exhaustive { .. } => split_lag_sets(p, &r),
                }
            } else {
                match policy {
                    ParamPolicy::Seed => {
                        let mut sets = vec![Vec::new()];
                        if r.low_cap >= r.s_lo as i64 {
                            sets.push((r.s_lo..=r.low_cap as usize).collect());
                        }
                        sets
                    }
                    ParamPolicy::Exhaustive { .. } => {
                        if r.low_cap < r.s_lo as i64 {
                            vec![Vec::new()]
                        } else {
                            subsets_of(r.s_lo, r.low_cap as usize)?
                        }
                    }
                }
            };
            if split && horizon < 2 {
                return Ok(out);
            }
            for lags in &lag_sets {
                let etas = match policy {
                    ParamPolicy::Seed => seed_etas(kind, p, lags),
                    ParamPolicy::Exhaustive { .. } => r.etas.clone(),
                };
                let t_lo = r.t_lo.max(lags.last().map_or(0, |s| s + 2));
                for t_back in t_lo..=r.t_hi {
                    let t = match direction {
                        Direction::Backward => t_back,
                        Direction::Forward => horizon - t_back + 1,
                    };
                    for &eta in &etas {
                        let cp = CutParams::new(t, direction)
                            .with_lags(lags.clone())
                            .with_eta(eta);
                        push(cp, &mut out)?;
                    }
                }
            }
        }
        FamilyKind::TwoVar | FamilyKind::TwoVarStart => {
            let slack: i64 = if kind == FamilyKind::TwoVar { 1 } else { 2 };
            let tail: usize = if kind == FamilyKind::TwoVar { 0 } else { 1 };
            let Some(k_hat) = p.max_gap(horizon) else {
                return Ok(out);
            };
            for k in 1..=k_hat {
                let m_range: Vec<usize> = match policy {
                    ParamPolicy::Seed if kind == FamilyKind::TwoVar => vec![0],
                    _ => (0..k).collect(),
                };
                for m in m_range {
                    let s_cap = (k as i64 - 1).min(p.min_up as i64 - m as i64 - slack);
                    let lag_sets: Vec<Vec<usize>> = match policy {
                        ParamPolicy::Seed => {
                            let mut sets = vec![Vec::new()];
                            if s_cap >= 0 {
                                let full: Vec<usize> = (0..=s_cap as usize).collect();
                                let facet_min = if kind == FamilyKind::TwoVar {
                                    (k - 1).min(1)
                                } else {
                                    0
                                };
                                if full.iter().all(|&s| s >= facet_min) {
                                    sets.push(full);
                                }
                            }
                            sets
                        }
                        ParamPolicy::Exhaustive { .. } => {
                            if s_cap < 0 {
                                vec![Vec::new()]
                            } else {
                                subsets_of(0, s_cap as usize)?
                            }
                        }
                    };
                    for lags in lag_sets {
                        for t_back in (k + 1)..=(horizon.saturating_sub(m + tail)) {
                            let t = match direction {
                                Direction::Backward => t_back,
                                Direction::Forward => horizon - t_back + 1,
                            };
                            let cp = CutParams::new(t, direction)
                                .with_lags(lags.clone())
                                .with_gap(k, m);
                            push(cp, &mut out)?;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// All subsets of `[lo, hi]` in bitmask order (empty set first).
fn subsets_of(lo: usize, hi: usize) -> Result<Vec<Vec<usize>>, CutError> {
    let n = hi + 1 - lo;
    if n > 20 {
        return Err(CutError::InvalidArgument(
            "lag range too wide for exhaustive subset enumeration".into(),
        ));
    }
    let mut sets = Vec::with_capacity(1 << n);
    for mask in 0u64..(1 << n) {
        let mut s = Vec::new();
        for (bit, lag) in (lo..=hi).enumerate() {
            if mask & (1 << bit) != 0 {
                s.push(lag);
            }
        }
        sets.push(s);
    }
    Ok(sets)
}

/// The gapless split intervals `[s_lo, s_max]` for each admissible `s_max`.
fn full_split_intervals(r: &SingleVarRanges) -> Vec<Vec<usize>> {
    let mut sets = Vec::new();
    if r.split_lo > r.outer_cap {
        return sets;
    }
    for s_max in r.split_lo..=r.outer_cap {
        sets.push((r.s_lo..=s_max as usize).collect());
    }
    sets
}

/// Two-interval lag sets `[s_lo, alpha] ∪ [beta, s_max]` with the largest
/// lag past the minimum up time; the gapless interval is emitted once.
fn split_lag_sets(p: &GeneratorParams, r: &SingleVarRanges) -> Vec<Vec<usize>> {
    let mut sets = Vec::new();
    if r.split_lo > r.outer_cap {
        return sets;
    }
    for s_max in r.split_lo..=r.outer_cap {
        let s_max = s_max as usize;
        sets.push((r.s_lo..=s_max).collect());
        let alpha_lo = r.s_lo.max(s_max.saturating_sub(p.min_up));
        for alpha in alpha_lo..=s_max.saturating_sub(2) {
            for beta in (alpha + 2)..=s_max {
                let mut s: Vec<usize> = (r.s_lo..=alpha).collect();
                s.extend(beta..=s_max);
                sets.push(s);
            }
        }
    }
    sets
}

/// Seed-policy eta values satisfying the facet conditions for the given set.
fn seed_etas(kind: FamilyKind, p: &GeneratorParams, lags: &[usize]) -> Vec<f64> {
    let ratio = (p.cap_max - p.start_ramp) / p.ramp;
    match kind {
        FamilyKind::SingleVar | FamilyKind::SingleVarSplit => vec![0.0],
        FamilyKind::SingleVarEta | FamilyKind::SingleVarEtaSplit => {
            let mut etas = vec![0.0];
            let cap = eta_max(p);
            if ratio <= cap + 1e-12 && ratio > 0.0 {
                etas.push(ratio);
            }
            let l1 = (p.min_up - 1) as f64;
            if lags.contains(&(p.min_up - 1)) && l1 <= cap + 1e-12 && !etas.contains(&l1) {
                etas.push(l1);
            }
            etas
        }
        FamilyKind::SingleVarEtaShift | FamilyKind::SingleVarEtaShiftSplit => {
            let mut etas = vec![0.0];
            let cap = eta_shift_max(p);
            if ratio <= cap + 1e-12 && ratio > 0.0 {
                etas.push(ratio);
            }
            let l = p.min_up as f64;
            if lags.contains(&p.min_up) && l <= cap + 1e-12 && !etas.contains(&l) {
                etas.push(l);
            }
            etas
        }
        _ => vec![0.0],
    }
}
