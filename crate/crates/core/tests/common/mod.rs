#![allow(dead_code)]

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use nashlq::equilibrium::{default_sweep_upper, generate_sdd_matrix, generate_symmetric_matrix};
use nashlq::rng::substream;
use nashlq::{ActionProfile, GameSpec, MatrixEnsembleConfig};

pub fn rng(seed: u64, tag: u64) -> ChaCha8Rng {
    substream(seed, &[tag])
}

/// Random SDD game with `n` in `[n_min, n_max]`, `rho` uniform on
/// `[0, 1)` and the default sweep box.
pub fn random_sdd_game<R: Rng>(rng: &mut R, n_min: usize, n_max: usize) -> GameSpec {
    let n = rng.random_range(n_min..=n_max);
    let cfg = MatrixEnsembleConfig {
        n,
        ..MatrixEnsembleConfig::default()
    };
    let a = generate_sdd_matrix(&cfg, rng);
    let rho = DVector::from_fn(n, |_, _| rng.random_range(0.0..1.0));
    let upper = default_sweep_upper(&a);
    GameSpec::new(a, rho, upper).unwrap()
}

/// Random symmetric game whose `A` need not be negative definite; the
/// action box is lifted by the Gershgorin bound where necessary.
pub fn random_symmetric_game<R: Rng>(rng: &mut R, n_min: usize, n_max: usize) -> GameSpec {
    let n = rng.random_range(n_min..=n_max);
    let cfg = MatrixEnsembleConfig {
        n,
        ..MatrixEnsembleConfig::default()
    };
    let a = generate_symmetric_matrix(&cfg, rng);
    let rho = DVector::from_fn(n, |_, _| rng.random_range(0.0..1.0));
    let probe = GameSpec::new(a.clone(), rho.clone(), DVector::repeat(n, 1e6)).unwrap();
    let upper = DVector::from_fn(n, |i, _| probe.k_lower()[i] + 10.0);
    GameSpec::new(a, rho, upper).unwrap()
}

pub fn random_profile<R: Rng>(spec: &GameSpec, rng: &mut R) -> ActionProfile {
    DVector::from_fn(spec.n(), |i, _| {
        rng.random_range(spec.k_lower()[i]..=spec.k_upper()[i])
    })
    .into()
}

/// Profile biased toward the lower corner of the box, where the game is
/// most strongly coupled.
pub fn random_low_profile<R: Rng>(spec: &GameSpec, rng: &mut R) -> ActionProfile {
    DVector::from_fn(spec.n(), |i, _| {
        let w = spec.k_upper()[i] - spec.k_lower()[i];
        spec.k_lower()[i] + rng.random_range(0.0..0.1) * w
    })
    .into()
}

pub fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "[{}] criterion {id}: {name} -- {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}
