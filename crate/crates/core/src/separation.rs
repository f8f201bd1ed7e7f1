//! Fast most-violated-cut routines.
//!
//! The single-variable families are separated in `O(T)` per family by a
//! running recursion over the anchor period: the optimal lag set at a given
//! anchor is simply every lag with a positive status jump, and the optimal
//! blend weight sits at an interval endpoint because violations are linear
//! in it. The split-set and two-variable families need `O(T^3)` table
//! sweeps. Forward families are always separated by reversing the point
//! and un-reversing the winner, so each recursion exists exactly once.

use crate::cuts::{build_cut, FamilyKind};
use crate::types::{
    evaluate_inequality, CutParams, Direction, FractionalPoint, GeneratorParams, LinearInequality,
};

/// A separated inequality together with its violation at the separated
/// point (the violation always equals re-evaluating the inequality there).
#[derive(Debug, Clone, PartialEq)]
pub struct CutCandidate {
    pub inequality: LinearInequality,
    pub violation: f64,
    pub params: CutParams,
}

/// Deterministic preference order between candidates: larger violation,
/// then smaller anchor period, smaller blend weight, smaller gap and
/// window, lexicographically smaller lag set, backward before forward.
pub(crate) fn candidate_better(a: &CutCandidate, b: &CutCandidate) -> bool {
    if a.violation != b.violation {
        return a.violation > b.violation;
    }
    if a.params.t != b.params.t {
        return a.params.t < b.params.t;
    }
    if a.params.eta != b.params.eta {
        return a.params.eta < b.params.eta;
    }
    let rank = |c: &CutParams| {
        (
            c.k,
            c.m,
            c.lags.clone(),
            matches!(c.direction, Direction::Forward) as u8,
        )
    };
    rank(&a.params) < rank(&b.params)
}

/// Prefix sums of positive status jumps: entry `t - 1` holds
/// `sum over tau in [2, t] of max(y_tau - y_{tau-1}, 0)`.
pub fn theta_prefix(y: &[f64]) -> Vec<f64> {
    let mut theta = vec![0.0; y.len()];
    for t in 1..y.len() {
        theta[t] = theta[t - 1] + (y[t] - y[t - 1]).max(0.0);
    }
    theta
}

/// The generic single-variable family: anchor coefficients
/// `(a1 + a2*eta, a3 + a4*eta, a5 + a6*eta)` on the statuses of periods
/// `t-1, t, t+1`, minus the standard lag terms over `[s_lo, s_hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericSingleVarFamily {
    pub kind: FamilyKind,
    pub direction: Direction,
    pub a: [f64; 6],
    pub eta_max: f64,
    pub s_lo: usize,
    /// Largest admissible lag; negative when only the empty set remains.
    pub s_hi: i64,
}

impl GenericSingleVarFamily {
    /// Smallest admissible anchor: 1 unless the previous period carries a
    /// coefficient.
    pub fn t_lo(&self) -> usize {
        if self.a[0] == 0.0 && self.a[1] == 0.0 {
            1
        } else {
            2
        }
    }

    /// Largest admissible anchor: `T` unless the next period carries one.
    pub fn t_hi(&self, horizon: usize) -> usize {
        if self.a[4] == 0.0 && self.a[5] == 0.0 {
            horizon
        } else {
            horizon.saturating_sub(1)
        }
    }
}

/// The split-set variant: lag sets are two intervals `[s_lo, alpha]` and
/// `[beta, s_max]` with `s_max` ranging over `[s_max_lo, s_max_hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitFamily {
    pub kind: FamilyKind,
    pub direction: Direction,
    pub a: [f64; 6],
    pub eta_max: f64,
    pub s_lo: usize,
    pub s_max_lo: i64,
    pub s_max_hi: i64,
}

impl SplitFamily {
    pub fn t_lo(&self) -> usize {
        if self.a[0] == 0.0 && self.a[1] == 0.0 {
            1
        } else {
            2
        }
    }

    pub fn t_hi(&self, horizon: usize) -> usize {
        if self.a[4] == 0.0 && self.a[5] == 0.0 {
            horizon
        } else {
            horizon.saturating_sub(1)
        }
    }
}

/// Coefficient encoding of a single-variable family kind.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    Contiguous(GenericSingleVarFamily),
    Split(SplitFamily),
}

/// Builds the separation encoding of a single-variable family. Two-variable
/// kinds have dedicated separators and return `None` here.
pub fn family_spec(
    kind: FamilyKind,
    direction: Direction,
    p: &GeneratorParams,
    horizon: usize,
) -> Option<FamilySpec> {
    let cmax = p.cap_max;
    let v = p.ramp;
    let vbar = p.start_ramp;
    let l = p.min_up as i64;
    let t = horizon as i64;
    let max_lag = p.max_lag() as i64;
    let ratio = (cmax - vbar) / v;
    match kind {
        FamilyKind::SingleVar => Some(FamilySpec::Contiguous(GenericSingleVarFamily {
            kind,
            direction,
            a: [0.0, 0.0, cmax, 0.0, 0.0, 0.0],
            eta_max: 0.0,
            s_lo: 0,
            s_hi: (l - 1).min(t - 2).min(max_lag),
        })),
        FamilyKind::SingleVarEta => Some(FamilySpec::Contiguous(GenericSingleVarFamily {
            kind,
            direction,
            a: [0.0, 0.0, cmax, -v, 0.0, v],
            eta_max: ((l - 1) as f64).min(ratio),
            s_lo: 0,
            s_hi: (l - 1).min(t - 3).min(max_lag),
        })),
        FamilyKind::SingleVarEtaShift => Some(FamilySpec::Contiguous(GenericSingleVarFamily {
            kind,
            direction,
            a: [cmax - vbar, -v, vbar, v, 0.0, 0.0],
            eta_max: (l as f64).min(ratio),
            s_lo: 1,
            s_hi: l.min(t - 2).min(max_lag),
        })),
        FamilyKind::SingleVarSplit => Some(FamilySpec::Split(SplitFamily {
            kind,
            direction,
            a: [0.0, 0.0, cmax, 0.0, 0.0, 0.0],
            eta_max: 0.0,
            s_lo: 0,
            s_max_lo: l,
            s_max_hi: (t - 2).min(max_lag),
        })),
        FamilyKind::SingleVarEtaSplit => Some(FamilySpec::Split(SplitFamily {
            kind,
            direction,
            a: [0.0, 0.0, cmax, -v, 0.0, v],
            eta_max: ((l - 1) as f64).min(ratio),
            s_lo: 0,
            s_max_lo: l,
            s_max_hi: (t - 3).min(max_lag),
        })),
        FamilyKind::SingleVarEtaShiftSplit => Some(FamilySpec::Split(SplitFamily {
            kind,
            direction,
            a: [cmax - vbar, -v, vbar, v, 0.0, 0.0],
            eta_max: (l as f64).min(ratio),
            s_lo: 1,
            s_max_lo: l + 1,
            s_max_hi: (t - 2).min(max_lag),
        })),
        FamilyKind::TwoVar | FamilyKind::TwoVarStart => None,
    }
}

/// Reverses a point in time: period `t` maps to `T - t + 1`.
pub fn reverse_point(pt: &FractionalPoint) -> FractionalPoint {
    let mut x = pt.x_slice().to_vec();
    let mut y = pt.y_slice().to_vec();
    x.reverse();
    y.reverse();
    FractionalPoint::clamped(x, y)
}

struct Series<'a> {
    x: &'a [f64],
    y: &'a [f64],
    theta: Vec<f64>,
}

impl<'a> Series<'a> {
    fn new(pt: &'a FractionalPoint) -> Self {
        Series {
            x: pt.x_slice(),
            y: pt.y_slice(),
            theta: theta_prefix(pt.y_slice()),
        }
    }

    fn x(&self, t: i64) -> f64 {
        if t >= 1 && t <= self.x.len() as i64 {
            self.x[(t - 1) as usize]
        } else {
            0.0
        }
    }

    fn y(&self, t: i64) -> f64 {
        if t >= 1 && t <= self.y.len() as i64 {
            self.y[(t - 1) as usize]
        } else {
            0.0
        }
    }

    fn theta(&self, t: i64) -> f64 {
        if t <= 1 {
            0.0
        } else {
            self.theta[(t.min(self.y.len() as i64) - 1) as usize]
        }
    }

    fn jump(&self, t: i64) -> f64 {
        (self.y(t) - self.y(t - 1)).max(0.0)
    }
}

fn finish_candidate(
    kind: FamilyKind,
    p: &GeneratorParams,
    pt: &FractionalPoint,
    cp: CutParams,
    tol: f64,
) -> Option<CutCandidate> {
    let q = build_cut(kind, p, pt.horizon(), &cp)
        .expect("separated parameters satisfy the family precondition");
    let violation = evaluate_inequality(&q, pt).expect("separated cut fits the horizon");
    if violation > tol * 1f64.max(q.rhs.abs()) {
        Some(CutCandidate {
            params: q.params.clone(),
            inequality: q,
            violation,
        })
    } else {
        None
    }
}

/// Most violated member of a contiguous single-variable family, if any
/// violation exceeds `tol`. Runs one linear pass per blend endpoint.
pub fn separate_contiguous(
    pt: &FractionalPoint,
    fam: &GenericSingleVarFamily,
    p: &GeneratorParams,
    tol: f64,
) -> Option<CutCandidate> {
    let horizon = pt.horizon();
    let reversed;
    let work = match fam.direction {
        Direction::Backward => pt,
        Direction::Forward => {
            reversed = reverse_point(pt);
            &reversed
        }
    };
    let series = Series::new(work);
    let t_lo = fam.t_lo();
    let t_hi = fam.t_hi(horizon);
    if t_lo > t_hi {
        return None;
    }
    let etas: &[f64] = if fam.eta_max > 0.0 {
        &[0.0, fam.eta_max]
    } else {
        &[0.0]
    };
    let cap = p.cap_max - p.start_ramp;
    let v = p.ramp;
    let s_lo = fam.s_lo as i64;
    let s_hi = fam.s_hi;
    let mut tracks: Vec<Vec<f64>> = Vec::with_capacity(etas.len());
    for &eta in etas {
        let c1 = fam.a[0] + fam.a[1] * eta;
        let c3 = fam.a[2] + fam.a[3] * eta;
        let c5 = fam.a[4] + fam.a[5] * eta;
        let mut vals = Vec::with_capacity(t_hi - t_lo + 1);
        let t0 = t_lo as i64;
        let mut val =
            series.x(t0) - c1 * series.y(t0 - 1) - c3 * series.y(t0) - c5 * series.y(t0 + 1);
        if t0 == 2 && s_lo == 0 && s_hi >= 0 {
            val += cap * series.jump(2);
        }
        vals.push(val);
        for t in (t0 + 1)..=(t_hi as i64) {
            val += series.x(t) - series.x(t - 1);
            val += -c1 * (series.y(t - 1) - series.y(t - 2))
                - c3 * (series.y(t) - series.y(t - 1))
                - c5 * (series.y(t + 1) - series.y(t));
            val += cap
                * (series.theta(t - s_lo) - series.theta(t - s_hi - 1)
                    - series.theta(t - s_lo - 1)
                    + series.theta(t - s_hi - 2));
            val -= v
                * (s_lo as f64 * series.theta(t - s_lo)
                    - (s_lo - 1) as f64 * series.theta(t - s_lo - 1)
                    - (s_hi + 1) as f64 * series.theta(t - s_hi - 1)
                    + s_hi as f64 * series.theta(t - s_hi - 2));
            vals.push(val);
        }
        tracks.push(vals);
    }
    // Smallest anchor wins ties, then the smaller eta.
    let mut best: Option<(f64, usize, f64)> = None;
    for (offset, t) in (t_lo..=t_hi).enumerate() {
        for (ei, &eta) in etas.iter().enumerate() {
            let val = tracks[ei][offset];
            if best.is_none_or(|(bv, _, _)| val > bv) {
                best = Some((val, t, eta));
            }
        }
    }
    let (value, t, eta) = best?;
    if value <= tol {
        return None;
    }
    let mut lags = Vec::new();
    if s_hi >= s_lo {
        for lag in s_lo..=s_hi.min(t as i64 - 2) {
            if series.y(t as i64 - lag) - series.y(t as i64 - lag - 1) > 0.0 {
                lags.push(lag as usize);
            }
        }
    }
    let t_out = match fam.direction {
        Direction::Backward => t,
        Direction::Forward => horizon - t + 1,
    };
    let cp = CutParams::new(t_out, fam.direction)
        .with_lags(lags)
        .with_eta(eta);
    finish_candidate(fam.kind, p, pt, cp, tol)
}

/// Most violated member of a split-set family: a cubic sweep over the
/// largest lag and the anchor, with suffix maxima choosing the second
/// interval for every first-interval endpoint.
pub fn separate_split(
    pt: &FractionalPoint,
    fam: &SplitFamily,
    p: &GeneratorParams,
    tol: f64,
) -> Option<CutCandidate> {
    let horizon = pt.horizon();
    if fam.s_max_lo > fam.s_max_hi || fam.s_max_lo < 0 {
        return None;
    }
    let reversed;
    let work = match fam.direction {
        Direction::Backward => pt,
        Direction::Forward => {
            reversed = reverse_point(pt);
            &reversed
        }
    };
    let series = Series::new(work);
    let t_hi = fam.t_hi(horizon) as i64;
    let cap = p.cap_max - p.start_ramp;
    let v = p.ramp;
    let s_lo = fam.s_lo as i64;
    let coeff = |lag: i64| cap - lag as f64 * v;
    struct Best {
        value: f64,
        t: i64,
        eta: f64,
        lags: Vec<usize>,
    }
    let mut best: Option<Best> = None;
    for s_max in fam.s_max_lo..=fam.s_max_hi {
        for t in (s_max + 2).max(fam.t_lo() as i64)..=t_hi {
            let sign = fam.a[1] * series.y(t - 1)
                + fam.a[3] * series.y(t)
                + fam.a[5] * series.y(t + 1);
            let eta = if sign >= 0.0 { 0.0 } else { fam.eta_max };
            let c1 = fam.a[0] + fam.a[1] * eta;
            let c3 = fam.a[2] + fam.a[3] * eta;
            let c5 = fam.a[4] + fam.a[5] * eta;
            let base =
                series.x(t) - c1 * series.y(t - 1) - c3 * series.y(t) - c5 * series.y(t + 1);
            // Violations of the full intervals [s_lo, s_lo + i].
            let n = (s_max - s_lo + 1) as usize;
            let mut v1 = Vec::with_capacity(n);
            let mut acc = base;
            for lag in s_lo..=s_max {
                acc += coeff(lag) * (series.y(t - lag) - series.y(t - lag - 1));
                v1.push(acc);
            }
            // Suffix tails and their maxima, preferring the smallest start
            // of the second interval on ties.
            let mut v2 = vec![0.0; n];
            let mut acc2 = 0.0;
            for idx in (0..n).rev() {
                let lag = s_lo + idx as i64;
                acc2 += coeff(lag) * (series.y(t - lag) - series.y(t - lag - 1));
                v2[idx] = acc2;
            }
            let mut best_beta = vec![0usize; n];
            let mut best_v2 = vec![0.0; n];
            for idx in (0..n).rev() {
                if idx + 1 < n && best_v2[idx + 1] > v2[idx] {
                    best_v2[idx] = best_v2[idx + 1];
                    best_beta[idx] = best_beta[idx + 1];
                } else {
                    best_v2[idx] = v2[idx];
                    best_beta[idx] = idx;
                }
            }
            let consider = |value: f64, lags: Vec<usize>, best: &mut Option<Best>| {
                let better = match best.as_ref() {
                    None => true,
                    Some(b) => {
                        value > b.value
                            || (value == b.value && (t, eta, &lags) < (b.t, b.eta, &b.lags))
                    }
                };
                if better {
                    *best = Some(Best { value, t, eta, lags });
                }
            };
            let full: Vec<usize> = (s_lo as usize..=s_max as usize).collect();
            consider(v1[n - 1], full, &mut best);
            // Gapped shapes stay admissible while the largest lag is within
            // the minimum up time of the first interval's endpoint.
            let alpha_lo = s_lo.max(s_max - p.min_up as i64);
            for alpha in alpha_lo..=(s_max - 1) {
                let ai = (alpha - s_lo) as usize;
                let value = v1[ai] + best_v2[ai + 1];
                let beta = best_beta[ai + 1] as i64 + s_lo;
                let mut lags: Vec<usize> = (s_lo as usize..=alpha as usize).collect();
                lags.extend(beta as usize..=s_max as usize);
                consider(value, lags, &mut best);
            }
        }
    }
    let b = best?;
    if b.value <= tol {
        return None;
    }
    let t_out = match fam.direction {
        Direction::Backward => b.t as usize,
        Direction::Forward => horizon - b.t as usize + 1,
    };
    let cp = CutParams::new(t_out, fam.direction)
        .with_lags(b.lags)
        .with_eta(b.eta);
    finish_candidate(fam.kind, p, pt, cp, tol)
}

/// Most violated two-variable cut for one direction: a cubic sweep over the
/// gap, the look-ahead window, and the anchor, each with a linear running
/// recursion.
pub fn separate_two_var_directed(
    kind: FamilyKind,
    direction: Direction,
    pt: &FractionalPoint,
    p: &GeneratorParams,
    tol: f64,
) -> Option<CutCandidate> {
    assert!(
        matches!(kind, FamilyKind::TwoVar | FamilyKind::TwoVarStart),
        "directed two-variable separation needs a two-variable kind"
    );
    let horizon = pt.horizon();
    let reversed;
    let work = match direction {
        Direction::Backward => pt,
        Direction::Forward => {
            reversed = reverse_point(pt);
            &reversed
        }
    };
    let series = Series::new(work);
    let k_hat = p.max_gap(horizon)?;
    let start_anchored = kind == FamilyKind::TwoVarStart;
    let tail = usize::from(start_anchored);
    let up_slack: i64 = if start_anchored { 2 } else { 1 };
    let cmin = p.cap_min;
    let v = p.ramp;
    let vbar = p.start_ramp;
    let mut best: Option<(f64, usize, usize, i64)> = None;
    for k in 1..=k_hat {
        for m in 0..k {
            let t_end = horizon as i64 - m as i64 - tail as i64;
            let t0 = k as i64 + 1;
            if t0 > t_end {
                continue;
            }
            let s_hat = (k as i64 - 1).min(p.min_up as i64 - m as i64 - up_slack);
            let pos_coeff = |lag: i64| cmin + (k as i64 - lag) as f64 * v - vbar;
            let mut val = series.x(t0) - series.x(t0 - k as i64);
            if start_anchored {
                val -= pos_coeff(m as i64) * series.y(t0 + m as i64 + 1) + vbar * series.y(t0);
            } else {
                val -= (cmin + (k - m) as f64 * v) * series.y(t0);
            }
            for i in 1..=m as i64 {
                val -= v * series.y(t0 + i);
            }
            val += cmin * series.y(t0 - k as i64);
            for lag in 0..=s_hat {
                val += pos_coeff(lag) * series.jump(t0 - lag);
            }
            if best.is_none_or(|(bv, _, _, _)| val > bv) {
                best = Some((val, k, m, t0));
            }
            let jump_coeff = cmin + k as f64 * v - vbar;
            for t in (t0 + 1)..=t_end {
                val += (series.x(t) - series.x(t - 1))
                    - (series.x(t - k as i64) - series.x(t - k as i64 - 1));
                if start_anchored {
                    val -= pos_coeff(m as i64) * (series.y(t + m as i64 + 1) - series.y(t + m as i64));
                    val -= vbar * (series.y(t) - series.y(t - 1));
                } else {
                    val -= (cmin + (k - m) as f64 * v) * (series.y(t) - series.y(t - 1));
                }
                val -= v * (series.y(t + m as i64) - series.y(t));
                val += cmin * (series.y(t - k as i64) - series.y(t - k as i64 - 1));
                val += jump_coeff * (series.jump(t) - series.jump(t - s_hat - 1));
                val -= v
                    * (series.theta(t - 1) - series.theta(t - s_hat - 1)
                        - s_hat as f64 * series.jump(t - s_hat - 1));
                if best.is_none_or(|(bv, _, _, _)| val > bv) {
                    best = Some((val, k, m, t));
                }
            }
        }
    }
    let (value, k, m, t) = best?;
    if value <= tol {
        return None;
    }
    let s_hat = (k as i64 - 1).min(p.min_up as i64 - m as i64 - up_slack);
    let mut lags = Vec::new();
    for lag in 0..=s_hat.max(-1) {
        if series.y(t - lag) - series.y(t - lag - 1) > 0.0 {
            lags.push(lag as usize);
        }
    }
    let t_out = match direction {
        Direction::Backward => t as usize,
        Direction::Forward => horizon - t as usize + 1,
    };
    let cp = CutParams::new(t_out, direction)
        .with_lags(lags)
        .with_gap(k, m);
    finish_candidate(kind, p, pt, cp, tol)
}

/// Most violated two-variable window cut across both directions.
pub fn separate_two_var(
    pt: &FractionalPoint,
    p: &GeneratorParams,
    tol: f64,
) -> Option<CutCandidate> {
    best_of_directions(FamilyKind::TwoVar, pt, p, tol)
}

/// Most violated start-ramp anchored two-variable cut across both
/// directions.
pub fn separate_two_var_start(
    pt: &FractionalPoint,
    p: &GeneratorParams,
    tol: f64,
) -> Option<CutCandidate> {
    best_of_directions(FamilyKind::TwoVarStart, pt, p, tol)
}

fn best_of_directions(
    kind: FamilyKind,
    pt: &FractionalPoint,
    p: &GeneratorParams,
    tol: f64,
) -> Option<CutCandidate> {
    let back = separate_two_var_directed(kind, Direction::Backward, pt, p, tol);
    let fwd = separate_two_var_directed(kind, Direction::Forward, pt, p, tol);
    match (back, fwd) {
        (Some(b), Some(f)) => Some(if candidate_better(&f, &b) { f } else { b }),
        (b, f) => b.or(f),
    }
}

/// Runs the separator for any family kind and direction.
pub fn separate(
    kind: FamilyKind,
    direction: Direction,
    pt: &FractionalPoint,
    p: &GeneratorParams,
    tol: f64,
) -> Option<CutCandidate> {
    match family_spec(kind, direction, p, pt.horizon()) {
        Some(FamilySpec::Contiguous(fam)) => separate_contiguous(pt, &fam, p, tol),
        Some(FamilySpec::Split(fam)) => separate_split(pt, &fam, p, tol),
        None => separate_two_var_directed(kind, direction, pt, p, tol),
    }
}
