#![allow(dead_code)]

use bbeq_core::{Complex64, CtVolterraModel, DtSignal, ModulationParams, VolterraTerm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_signal(rng: &mut impl Rng, n: usize) -> DtSignal {
    DtSignal::from_samples((0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
        .unwrap()
}

/// Up to three terms of degree at most three, on-grid delays in `[0, 2T)`.
pub fn random_model(rng: &mut impl Rng, p: &ModulationParams) -> CtVolterraModel {
    let dt = p.sample_period();
    let span = 2 * p.oversample();
    let terms = (0..rng.random_range(1..=3))
        .map(|_| VolterraTerm {
            coeff: rng.random_range(-0.2..=0.2),
            delays: (0..rng.random_range(1..=3)).map(|_| rng.random_range(0..span) as f64 * dt).collect(),
        })
        .collect();
    CtVolterraModel::new(rng.random_range(-0.2..=0.2), terms).unwrap()
}

pub fn rel_err(a: &DtSignal, b: &DtSignal) -> f64 {
    use bbeq_core::Signal;
    a.sub(b).unwrap().norm() / b.norm()
}
