//! Shared instance builders for the integration and acceptance suites.

use rand::{Rng, SeedableRng};

use uc_core::formulation::{Bus, GeneratorUnit, InitialState, UcInstance};
use uc_core::instances;
use uc_core::types::GeneratorParams;

/// Snaps a value to quarters so exact-rational cross-checks stay cheap.
pub fn snap(v: f64) -> f64 {
    (v * 4.0).round() / 4.0
}

/// A demand profile the warm-started fleet can follow: stays inside the
/// proportional-dispatch envelope and moves less than the aggregate ramp.
pub fn feasible_demand(
    rng: &mut impl Rng,
    gens: &[GeneratorParams],
    horizon: usize,
) -> Vec<f64> {
    let total_cap: f64 = gens.iter().map(|p| p.cap_max).sum();
    let total_ramp: f64 = gens.iter().map(|p| p.ramp).sum();
    // Proportional dispatch needs d * cap_max_g / total >= cap_min_g.
    let d_lo = gens
        .iter()
        .map(|p| p.cap_min * total_cap / p.cap_max)
        .fold(f64::MIN, f64::max)
        * 1.05;
    let d_hi = 0.8 * total_cap;
    let mut d = rng.gen_range(d_lo..d_hi);
    let mut out = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        out.push(snap(d.clamp(d_lo, d_hi)));
        d += rng.gen_range(-0.6..0.6) * total_ramp;
    }
    out
}

/// A warm-started single-bus instance over the given generator types.
pub fn warm_instance(seed: u64, type_ids: &[usize], horizon: usize) -> UcInstance {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let picked: Vec<_> = type_ids
        .iter()
        .map(|&i| instances::generator_type(i).unwrap())
        .collect();
    let params: Vec<GeneratorParams> = picked.iter().map(|(p, _)| *p).collect();
    let load = feasible_demand(&mut rng, &params, horizon);
    let total_cap: f64 = params.iter().map(|p| p.cap_max).sum();
    let generators = picked
        .into_iter()
        .map(|(p, c)| {
            let x0 = snap(load[0] * p.cap_max / total_cap).clamp(p.cap_min, p.cap_max);
            GeneratorUnit {
                bus: "b1".into(),
                params: p,
                costs: c,
                initial: InitialState::on(&p, x0),
            }
        })
        .collect();
    UcInstance {
        horizon,
        reserve: vec![0.03; horizon],
        buses: vec![Bus {
            id: "b1".into(),
            load,
        }],
        lines: Vec::new(),
        generators,
    }
}

/// A warm-started two-generator instance with random types.
pub fn random_pair_instance(seed: u64, horizon: usize) -> UcInstance {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9));
    let a = rng.gen_range(1..=8usize);
    let b = rng.gen_range(1..=8usize);
    warm_instance(seed, &[a, b], horizon)
}

pub fn generator_params(inst: &UcInstance) -> Vec<GeneratorParams> {
    inst.generators.iter().map(|g| g.params).collect()
}
