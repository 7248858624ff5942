//! Decentralized learning of Nash equilibria in scalar-gain LQ games.
//!
//! `n` players share the symmetric linear system `x' = A x + u`, each
//! applying its own feedback `u_i = -k_i x_i` and paying
//! `E int (x_i^2 + rho_i u_i^2) dt` over random initial states with identity
//! covariance. The crate provides
//!
//! * [`game`]: closed-form costs, pseudogradient, curvatures and the
//!   pseudogradient Jacobian, all from one Cholesky factor of `K - A`;
//! * [`sim`]: closed-loop rollouts and batch Monte Carlo cost estimates;
//! * [`learning`]: projected gradient play, exact or model-free;
//! * [`equilibrium`]: Rosen-condition sweeps and the two-player `mu` test;
//! * [`presets`] and [`history`]: built-in games and history files.

pub mod equilibrium;
pub mod error;
pub mod game;
pub mod history;
pub mod learning;
pub mod presets;
pub mod rng;
pub mod sim;

pub use equilibrium::{
    conjecture_sweep, generate_sdd_matrix, is_sdd_negative_diag, random_sdd_game, rosen_check, rosen_sweep,
    two_player_mu, MatrixEnsembleConfig, MatrixKind, RosenReport, SweepConfig, SweepReport, Witness,
};
pub use error::{GameError, Result};
pub use game::{
    cost, exact_gradient, marginal_cost_from_cost, pseudogradient_jacobian, resolvent,
    second_derivative, stability_margin, ActionProfile, CostGradientReport, GameSpec, Resolvent,
};
pub use history::HistoryFormat;
pub use nalgebra::{DMatrix, DVector};
pub use learning::{
    gradient_play_step, project, run_gradient_play, LearnConfig, LearnRun, Mode, StageRecord,
};
pub use sim::{
    monte_carlo_cost, sample_initial_state, simulate_batch, simulate_state, trajectory_cost,
    Integrator, SimConfig, TrajectoryBatch,
};
