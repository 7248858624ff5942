//! Built-in games, including the 5-player benchmark system.

use nalgebra::{DMatrix, DVector};

use crate::game::GameSpec;

/// State matrix of the 5-player benchmark, row-major.
pub const BENCHMARK_A: [[f64; 5]; 5] = [
    [-0.0342, -0.0111, 0.0095, -0.0012, 0.0118],
    [-0.0111, -0.0627, 0.0098, 0.0155, 0.0254],
    [0.0095, 0.0098, -0.0341, -0.0065, -0.0081],
    [-0.0012, 0.0155, -0.0065, -0.0323, -0.0081],
    [0.0118, 0.0254, -0.0081, -0.0081, -0.1086],
];

pub const BENCHMARK_RHO: [f64; 5] = [0.5542, 0.2642, 0.4526, 0.0664, 0.7990];

/// Action upper bound for the benchmark; large enough never to bind at the
/// equilibrium.
pub const BENCHMARK_K_UPPER: f64 = 10.0;

pub const BENCHMARK_ROUND1_K0: [f64; 5] = [0.69, 4.41, 3.69, 2.39, 4.24];
pub const BENCHMARK_ROUND2_K0: [f64; 5] = [1.15, 0.53, 2.82, 1.59, 0.54];

/// Reported stage-250 actions of the two model-free rounds.
pub const BENCHMARK_ROUND1_K250: [f64; 5] = [1.31, 1.89, 1.46, 3.85, 1.03];
pub const BENCHMARK_ROUND2_K250: [f64; 5] = [1.29, 1.88, 1.49, 3.85, 1.03];

pub const BENCHMARK_STAGES: usize = 250;
pub const BENCHMARK_BATCH: usize = 500;
pub const BENCHMARK_HORIZON: f64 = 200.0;

pub fn benchmark_game() -> GameSpec {
    let rows: Vec<Vec<f64>> = BENCHMARK_A.iter().map(|r| r.to_vec()).collect();
    GameSpec::from_rows(&rows, &BENCHMARK_RHO, &[BENCHMARK_K_UPPER; 5]).expect("benchmark game is valid")
}

/// Single player, `a = -1`, `rho = 1`; equilibrium `sqrt(2) - 1`.
pub fn scalar_game() -> GameSpec {
    GameSpec::from_rows(&[vec![-1.0]], &[1.0], &[10.0]).expect("scalar game is valid")
}

/// Three decoupled players.
pub fn diagonal_game() -> GameSpec {
    GameSpec::new(
        DMatrix::from_diagonal(&DVector::from_vec(vec![-0.5, -1.0, -2.0])),
        DVector::from_vec(vec![0.3, 0.6, 0.9]),
        DVector::repeat(3, 20.0),
    )
    .expect("diagonal game is valid")
}

/// Two players with `a11 = a22 = -2`, `a12 = -0.5`, `rho = 0`.
pub fn two_player_game() -> GameSpec {
    GameSpec::from_rows(
        &[vec![-2.0, -0.5], vec![-0.5, -2.0]],
        &[0.0, 0.0],
        &[20.0, 20.0],
    )
    .expect("two-player game is valid")
}

pub fn by_name(name: &str) -> Option<GameSpec> {
    match name {
        "paper" => Some(benchmark_game()),
        "scalar" => Some(scalar_game()),
        "diagonal" => Some(diagonal_game()),
        "two-player" => Some(two_player_game()),
        _ => None,
    }
}

pub const PRESET_NAMES: [&str; 4] = ["paper", "scalar", "diagonal", "two-player"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benchmark_constants_match_literals() {
        let a = benchmark_game();
        let literal = [
            -0.0342, -0.0111, 0.0095, -0.0012, 0.0118, //
            -0.0111, -0.0627, 0.0098, 0.0155, 0.0254, //
            0.0095, 0.0098, -0.0341, -0.0065, -0.0081, //
            -0.0012, 0.0155, -0.0065, -0.0323, -0.0081, //
            0.0118, 0.0254, -0.0081, -0.0081, -0.1086,
        ];
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(a.a()[(i, j)], literal[5 * i + j]);
            }
        }
        assert_eq!(a.rho().as_slice(), &[0.5542, 0.2642, 0.4526, 0.0664, 0.7990]);
        assert_eq!(a.k_lower().as_slice(), &[0.0; 5]);
    }

    #[test]
    fn benchmark_matrix_is_sdd_with_negative_diagonal() {
        assert!(crate::equilibrium::is_sdd_negative_diag(benchmark_game().a()));
    }

    #[test]
    fn all_presets_resolve() {
        for name in PRESET_NAMES {
            assert!(by_name(name).is_some());
        }
        assert!(by_name("nope").is_none());
    }
}
