//! Projected gradient play.
//!
//! All players update simultaneously from the same profile:
//! `k_i <- clip(k_i - eta * g_i, k_lower_i, k_upper_i)`. In exact mode `g`
//! is the closed-form pseudogradient; in model-free mode each player
//! estimates its own cost from sampled rollouts and converts it into a
//! marginal cost with [`marginal_cost_from_cost`].

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::game::{marginal_cost_from_cost, ActionProfile, GameSpec, Resolvent};
use crate::sim::{monte_carlo_cost_at_stage, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Exact,
    ModelFree,
}

impl std::str::FromStr for Mode {
    type Err = GameError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "model-free" => Ok(Mode::ModelFree),
            other => Err(GameError::InvalidConfig(format!(
                "unknown mode '{other}', expected exact or model-free"
            ))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::ModelFree => "model-free",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnConfig {
    pub stages: usize,
    pub step_size: f64,
    pub mode: Mode,
    pub sim: SimConfig,
    /// Early exit when `||g||_inf` drops below this (exact mode only);
    /// zero disables it.
    pub grad_tolerance: f64,
    pub record_history: bool,
}

impl Default for LearnConfig {
    fn default() -> Self {
        Self {
            stages: 250,
            step_size: 1.0,
            mode: Mode::Exact,
            sim: SimConfig::default(),
            grad_tolerance: 0.0,
            record_history: true,
        }
    }
}

impl LearnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.stages == 0 {
            return Err(GameError::InvalidConfig("stages must be at least 1".into()));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(GameError::InvalidConfig(format!(
                "step_size must be positive, got {}",
                self.step_size
            )));
        }
        if self.grad_tolerance.is_nan() || self.grad_tolerance < 0.0 {
            return Err(GameError::InvalidConfig(format!(
                "grad_tolerance must be nonnegative, got {}",
                self.grad_tolerance
            )));
        }
        if self.mode == Mode::ModelFree {
            self.sim.validate()?;
        }
        Ok(())
    }
}

/// One row of the learning history: the profile entering stage `stage`
/// together with the costs and gradient used to leave it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: usize,
    pub k: ActionProfile,
    pub cost: Vec<f64>,
    pub gradient: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnRun {
    pub history: Vec<StageRecord>,
    pub final_profile: ActionProfile,
    pub converged: bool,
    pub stages_used: usize,
}

/// `min(max(value, lower), upper)`.
pub fn project(value: f64, lower: f64, upper: f64) -> f64 {
    value.max(lower).min(upper)
}

/// Costs and gradient as seen by the players at `k`. Model-free estimates
/// draw from substream `(sim.seed, stage)`.
pub fn stage_estimate(
    spec: &GameSpec,
    k: &ActionProfile,
    config: &LearnConfig,
    stage: usize,
) -> Result<(DVector<f64>, DVector<f64>)> {
    match config.mode {
        Mode::Exact => {
            let r = Resolvent::new(spec, k)?;
            Ok((r.costs(), r.gradient()))
        }
        Mode::ModelFree => {
            let j = monte_carlo_cost_at_stage(spec, k, &config.sim, stage as u64)?;
            let g = DVector::from_fn(spec.n(), |i, _| {
                marginal_cost_from_cost(j[i], k[i], spec.rho()[i])
            });
            Ok((j, g))
        }
    }
}

fn apply_step(spec: &GameSpec, k: &ActionProfile, g: &DVector<f64>, eta: f64) -> ActionProfile {
    DVector::from_fn(spec.n(), |i, _| {
        project(k[i] - eta * g[i], spec.k_lower()[i], spec.k_upper()[i])
    })
    .into()
}

/// One simultaneous projected-gradient update from `k`.
pub fn gradient_play_step(
    spec: &GameSpec,
    k: &ActionProfile,
    config: &LearnConfig,
    stage: usize,
) -> Result<ActionProfile> {
    let (_, g) = stage_estimate(spec, k, config, stage)?;
    Ok(apply_step(spec, k, &g, config.step_size))
}

/// Iterate gradient play from `k0` for up to `config.stages` updates.
///
/// The history holds one record per visited profile, starting with `k0` at
/// stage 0; the record at stage `l` carries the estimate taken at `k^(l)`.
pub fn run_gradient_play(spec: &GameSpec, k0: &ActionProfile, config: &LearnConfig) -> Result<LearnRun> {
    config.validate()?;
    spec.check_dimension(k0)?;
    if !spec.contains(k0) {
        let i = (0..spec.n())
            .find(|&i| !(spec.k_lower()[i] <= k0[i] && k0[i] <= spec.k_upper()[i]))
            .unwrap_or(0);
        return Err(GameError::OutOfBox {
            player: i,
            value: k0[i],
            lower: spec.k_lower()[i],
            upper: spec.k_upper()[i],
        });
    }

    let early_exit = config.mode == Mode::Exact && config.grad_tolerance > 0.0;
    let mut history = Vec::new();
    let mut k = k0.clone();
    let mut converged = false;
    let mut stages_used = config.stages;

    for stage in 0..=config.stages {
        let (j, g) = stage_estimate(spec, &k, config, stage)?;
        if config.record_history || stage == config.stages {
            history.push(StageRecord {
                stage,
                k: k.clone(),
                cost: j.as_slice().to_vec(),
                gradient: g.as_slice().to_vec(),
            });
        }
        if early_exit && g.amax() < config.grad_tolerance {
            converged = true;
            stages_used = stage;
            if !config.record_history {
                history.clear();
                history.push(StageRecord {
                    stage,
                    k: k.clone(),
                    cost: j.as_slice().to_vec(),
                    gradient: g.as_slice().to_vec(),
                });
            }
            break;
        }
        if stage == config.stages {
            break;
        }
        k = apply_step(spec, &k, &g, config.step_size);
    }

    Ok(LearnRun {
        history,
        final_profile: k,
        converged,
        stages_used,
    })
}
