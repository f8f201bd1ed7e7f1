//! Built-in benchmark data and instance I/O.
//!
//! Embeds the eight standard generator types, the twenty fleet
//! compositions built from them, and the hourly system-load profile (as a
//! fraction of total capacity). Also provides a seeded random
//! network-instance generator and JSON (de)serialization of instances.

use std::fmt;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};

use crate::formulation::{Bus, GeneratorUnit, InitialState, Line, UcInstance};
use crate::types::{CostParams, GeneratorParams};

#[derive(Debug)]
pub enum InstanceError {
    OutOfRange(String),
    Io(std::io::Error),
    Parse(String),
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceError::OutOfRange(msg) => write!(f, "out of range: {msg}"),
            InstanceError::Io(e) => write!(f, "io error: {e}"),
            InstanceError::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl std::error::Error for InstanceError {}

impl From<std::io::Error> for InstanceError {
    fn from(e: std::io::Error) -> Self {
        InstanceError::Io(e)
    }
}

/// Physical and cost data of the eight standard generator types:
/// `(cap_min, cap_max, min_up, min_down, ramp, start_ramp,
///   startup, shutdown, quad, lin, fixed_on)`.
#[rustfmt::skip]
const GENERATOR_TYPES: [(f64, f64, usize, usize, f64, f64, f64, f64, f64, f64, f64); 8] = [
    (150.0, 455.0, 8, 8, 91.0,  180.0, 2000.0, 2000.0, 0.00048, 16.19, 1000.0),
    (150.0, 455.0, 8, 8, 91.0,  180.0, 2000.0, 2000.0, 0.00031, 17.26,  970.0),
    ( 20.0, 130.0, 5, 5, 26.0,   35.0,  500.0,  500.0, 0.00200, 16.6,   700.0),
    ( 20.0, 130.0, 5, 5, 26.0,   35.0,  500.0,  500.0, 0.00211, 16.5,   680.0),
    ( 25.0, 162.0, 6, 6, 32.4,   40.0,  700.0,  700.0, 0.00398, 19.7,   450.0),
    ( 20.0,  80.0, 3, 3, 16.0,   28.0,  150.0,  150.0, 0.00712, 22.26,  370.0),
    ( 25.0,  85.0, 3, 3, 17.0,   33.0,  200.0,  200.0, 0.00079, 27.74,  480.0),
    ( 10.0,  55.0, 1, 1, 11.0,   15.0,   60.0,   60.0, 0.00413, 25.92,  660.0),
];

/// Fleet composition of the twenty benchmark instances: generator count
/// per type.
#[rustfmt::skip]
const COMPOSITIONS: [[usize; 8]; 20] = [
    [12, 11,  0,  0,  1,  4,  0,  0],
    [13, 15,  2,  0,  4,  0,  0,  1],
    [15, 13,  2,  6,  3,  1,  1,  3],
    [15, 11,  0,  1,  4,  5,  6,  3],
    [15, 13,  3,  7,  5,  3,  2,  1],
    [10, 10,  2,  5,  7,  5,  6,  5],
    [17, 16,  1,  3,  1,  7,  2,  4],
    [17, 10,  6,  5,  2,  1,  3,  7],
    [12, 17,  4,  7,  5,  2,  0,  5],
    [13, 12,  5,  7,  2,  5,  4,  6],
    [46, 45,  8,  0,  5,  0, 12, 16],
    [40, 54, 14,  8,  3, 15,  9, 13],
    [50, 41, 19, 11,  4,  4, 12, 15],
    [51, 58, 17, 19, 16,  1,  2,  1],
    [43, 46, 17, 15, 13, 15,  6, 12],
    [50, 59,  8, 15,  1, 18,  4, 17],
    [53, 50, 17, 15, 16,  5, 14, 12],
    [45, 57, 19,  7, 19, 19,  5, 11],
    [58, 50, 15,  7, 16, 18,  7, 12],
    [55, 48, 18,  5, 18, 17, 15, 11],
];

/// Hourly system load as a fraction of total capacity.
pub const LOAD_PROFILE: [f64; 24] = [
    0.71, 0.65, 0.62, 0.60, 0.58, 0.58, 0.60, 0.64, 0.73, 0.80, 0.82, 0.83, 0.82, 0.80, 0.79,
    0.79, 0.83, 0.91, 0.90, 0.88, 0.85, 0.84, 0.79, 0.74,
];

const RESERVE_FACTOR: f64 = 0.03;

/// Data of generator type `i` (1-based, eight types).
pub fn generator_type(i: usize) -> Result<(GeneratorParams, CostParams), InstanceError> {
    if !(1..=8).contains(&i) {
        return Err(InstanceError::OutOfRange(format!(
            "generator type {i} not in [1, 8]"
        )));
    }
    let (cap_min, cap_max, min_up, min_down, ramp, start_ramp, startup, shutdown, quad, lin, fixed_on) =
        GENERATOR_TYPES[i - 1];
    Ok((
        GeneratorParams {
            cap_max,
            cap_min,
            min_up,
            min_down,
            ramp,
            start_ramp,
        },
        CostParams {
            quad,
            lin,
            fixed_on,
            startup,
            shutdown,
        },
    ))
}

/// Generator count per type for benchmark instance `i` (1-based, twenty).
pub fn composition(i: usize) -> Result<[usize; 8], InstanceError> {
    if !(1..=20).contains(&i) {
        return Err(InstanceError::OutOfRange(format!(
            "instance {i} not in [1, 20]"
        )));
    }
    Ok(COMPOSITIONS[i - 1])
}

/// Benchmark instance `i`: one bus, no lines, 24 periods, 3% reserve,
/// loads from the built-in profile scaled by total capacity. Generators
/// start online at their proportional share of the first-period load so
/// the instance is dispatchable from period 1.
pub fn experiment1_instance(i: usize) -> Result<UcInstance, InstanceError> {
    let counts = composition(i)?;
    let mut generators = Vec::new();
    for (type_idx, &count) in counts.iter().enumerate() {
        let (params, costs) = generator_type(type_idx + 1)?;
        for _ in 0..count {
            generators.push(GeneratorUnit {
                bus: "b1".into(),
                params,
                costs,
                initial: InitialState::on(&params, LOAD_PROFILE[0] * params.cap_max),
            });
        }
    }
    let total_cap: f64 = generators.iter().map(|g| g.params.cap_max).sum();
    let load: Vec<f64> = LOAD_PROFILE.iter().map(|f| f * total_cap).collect();
    Ok(UcInstance {
        horizon: 24,
        reserve: vec![RESERVE_FACTOR; 24],
        buses: vec![Bus {
            id: "b1".into(),
            load,
        }],
        lines: Vec::new(),
        generators,
    })
}

/// Seeded random network instance: generator types drawn uniformly and
/// spread over the buses, the system peak drawn uniformly between half and
/// full capacity, bus loads allocated proportionally to random base
/// weights and shaped by the daily profile so the peak hour matches the
/// drawn peak. Line flow factors are nonnegative and normalized per line.
pub fn random_instance(
    seed: u64,
    num_gens: usize,
    num_buses: usize,
    num_lines: usize,
    horizon: usize,
    profile: &[f64],
) -> Result<UcInstance, InstanceError> {
    if num_gens == 0 || num_buses == 0 || horizon == 0 {
        return Err(InstanceError::OutOfRange(
            "instance sizes must be positive".into(),
        ));
    }
    if profile.len() != horizon {
        return Err(InstanceError::OutOfRange(format!(
            "profile has {} entries for horizon {horizon}",
            profile.len()
        )));
    }
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let bus_ids: Vec<String> = (1..=num_buses).map(|b| format!("b{b}")).collect();
    let mut generators = Vec::new();
    for _ in 0..num_gens {
        let (params, costs) = generator_type(rng.gen_range(1..=8))?;
        let bus = bus_ids[rng.gen_range(0..num_buses)].clone();
        generators.push(GeneratorUnit {
            bus,
            params,
            costs,
            initial: InitialState::off(&params),
        });
    }
    let total_cap: f64 = generators.iter().map(|g| g.params.cap_max).sum();
    let peak = rng.gen_range(0.5 * total_cap..total_cap);
    let weights: Vec<f64> = (0..num_buses).map(|_| rng.gen_range(0.5..1.5)).collect();
    let weight_sum: f64 = weights.iter().sum();
    let profile_max = profile.iter().cloned().fold(f64::MIN, f64::max);
    let buses: Vec<Bus> = bus_ids
        .iter()
        .zip(&weights)
        .map(|(id, w)| {
            let bus_peak = peak * w / weight_sum;
            Bus {
                id: id.clone(),
                load: profile.iter().map(|f| bus_peak * f / profile_max).collect(),
            }
        })
        .collect();
    // Warm initial dispatch proportional to capacity, clamped to range.
    let d1: f64 = buses.iter().map(|b| b.load[0]).sum();
    for g in &mut generators {
        let share = d1 * g.params.cap_max / total_cap;
        let x0 = share.clamp(g.params.cap_min, g.params.cap_max);
        g.initial = InitialState::on(&g.params, x0);
    }
    let lines: Vec<Line> = (1..=num_lines)
        .map(|l| {
            let raw: Vec<f64> = (0..num_buses).map(|_| rng.gen_range(0.0..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            let factors = bus_ids
                .iter()
                .zip(&raw)
                .map(|(id, r)| (id.clone(), if sum > 0.0 { r / sum } else { 0.0 }))
                .collect();
            Line {
                id: format!("l{l}"),
                capacity: rng.gen_range(0.15..0.40) * peak,
                factors,
            }
        })
        .collect();
    Ok(UcInstance {
        horizon,
        reserve: vec![RESERVE_FACTOR; horizon],
        buses,
        lines,
        generators,
    })
}

pub fn read_instance(path: &Path) -> Result<UcInstance, InstanceError> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| InstanceError::Parse(e.to_string()))
}

pub fn write_instance(inst: &UcInstance, path: &Path) -> Result<(), InstanceError> {
    let text =
        serde_json::to_string_pretty(inst).map_err(|e| InstanceError::Parse(e.to_string()))?;
    fs::write(path, text)?;
    Ok(())
}
