//! Experiment configuration: a TOML file plus command-line overrides.
//! Flags win over file values.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use nashlq::equilibrium::SweepConfig;
use nashlq::learning::{LearnConfig, Mode};
use nashlq::sim::SimConfig;
use nashlq::{presets, random_sdd_game, DVector, GameError, GameSpec, HistoryFormat, MatrixEnsembleConfig};

use crate::Overrides;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub game: GameConfig,
    pub learn: LearnSection,
    pub sim: SimConfig,
    pub rosen: RosenSection,
    pub matrix: MatrixEnsembleConfig,
    pub output_dir: Option<PathBuf>,
    pub format: HistoryFormat,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GameConfig {
    pub preset: Option<String>,
    pub a: Option<Vec<Vec<f64>>>,
    pub rho: Option<Vec<f64>>,
    pub k_lower: Option<Vec<f64>>,
    pub k_upper: Option<Vec<f64>>,
    pub generate: Option<GeneratedGame>,
}

/// A random SDD game drawn from the matrix generator.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratedGame {
    pub n: usize,
    pub offdiag_scale: f64,
    pub dominance_margin: f64,
    pub seed: u64,
    pub rho_min: f64,
    pub rho_max: f64,
}

impl Default for GeneratedGame {
    fn default() -> Self {
        let m = MatrixEnsembleConfig::default();
        Self {
            n: m.n,
            offdiag_scale: m.offdiag_scale,
            dominance_margin: m.dominance_margin,
            seed: m.seed,
            rho_min: 0.0,
            rho_max: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnSection {
    /// Unset means "command default".
    pub stages: Option<usize>,
    pub step_size: f64,
    pub mode: Option<Mode>,
    pub grad_tolerance: Option<f64>,
    pub record_history: bool,
    pub k0: Option<Vec<f64>>,
}

impl Default for LearnSection {
    fn default() -> Self {
        let d = LearnConfig::default();
        Self {
            stages: None,
            step_size: d.step_size,
            mode: None,
            grad_tolerance: None,
            record_history: d.record_history,
            k0: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RosenSection {
    pub samples: usize,
    pub seed: u64,
    /// When present, sweep a random matrix ensemble instead of the game.
    pub ensemble: Option<SweepConfig>,
}

impl Default for RosenSection {
    fn default() -> Self {
        Self {
            samples: 1000,
            seed: 0,
            ensemble: None,
        }
    }
}

pub fn invalid(msg: impl Into<String>) -> GameError {
    GameError::InvalidConfig(msg.into())
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, GameError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, GameError> {
        toml::from_str(text).map_err(|e| invalid(format!("config: {e}")))
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), GameError> {
        if let Some(seed) = o.seed {
            self.sim.seed = seed;
            self.rosen.seed = seed;
            self.matrix.seed = seed;
            if let Some(e) = self.rosen.ensemble.as_mut() {
                e.seed = seed;
            }
            if let Some(g) = self.game.generate.as_mut() {
                g.seed = seed;
            }
        }
        if let Some(mode) = &o.mode {
            self.learn.mode = Some(mode.parse()?);
        }
        if let Some(v) = o.stages {
            self.learn.stages = Some(v);
        }
        if let Some(v) = o.step_size {
            self.learn.step_size = v;
        }
        if let Some(v) = o.grad_tol {
            self.learn.grad_tolerance = Some(v);
        }
        if let Some(v) = o.batch {
            self.sim.batch_size = v;
        }
        if let Some(v) = o.horizon {
            self.sim.horizon = v;
        }
        if let Some(v) = o.dt {
            self.sim.dt = v;
        }
        if let Some(v) = &o.out {
            self.output_dir = Some(v.clone());
        }
        if let Some(p) = &o.preset {
            self.game = GameConfig {
                preset: Some(p.clone()),
                ..GameConfig::default()
            };
        }
        if let Some(k0) = &o.k0 {
            self.learn.k0 = Some(k0.clone());
        }
        if let Some(f) = &o.format {
            self.format = match f.as_str() {
                "csv" => HistoryFormat::Csv,
                "json-lines" => HistoryFormat::JsonLines,
                other => return Err(invalid(format!("unknown format '{other}'"))),
            };
        }
        if let Some(n) = o.samples {
            self.rosen.samples = n;
        }
        if let Some(n) = o.n {
            self.matrix.n = n;
        }
        Ok(())
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn learn_config(&self) -> Result<LearnConfig, GameError> {
        self.learn_config_with(LearnConfig::default())
    }

    /// Learning settings, falling back to `defaults` for unset fields.
    pub fn learn_config_with(&self, defaults: LearnConfig) -> Result<LearnConfig, GameError> {
        let cfg = LearnConfig {
            stages: self.learn.stages.unwrap_or(defaults.stages),
            step_size: self.learn.step_size,
            mode: self.learn.mode.unwrap_or(defaults.mode),
            sim: self.sim.clone(),
            grad_tolerance: self.learn.grad_tolerance.unwrap_or(defaults.grad_tolerance),
            record_history: self.learn.record_history,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Resolve the game; defaults to the 5-player benchmark.
    pub fn game(&self) -> Result<GameSpec, GameError> {
        let g = &self.game;
        let sources = [g.preset.is_some(), g.a.is_some(), g.generate.is_some()];
        if sources.iter().filter(|&&b| b).count() > 1 {
            return Err(invalid("[game] takes exactly one of preset, a, or generate"));
        }
        if let Some(name) = &g.preset {
            return presets::by_name(name).ok_or_else(|| {
                invalid(format!(
                    "unknown preset '{name}', expected one of {:?}",
                    presets::PRESET_NAMES
                ))
            });
        }
        if let Some(rows) = &g.a {
            let a = nashlq::game::matrix_from_rows(rows)?;
            let n = a.nrows();
            let rho = g.rho.clone().ok_or_else(|| invalid("[game] a requires rho"))?;
            let upper = g.k_upper.clone().ok_or_else(|| invalid("[game] a requires k_upper"))?;
            let lower = g.k_lower.clone().unwrap_or_else(|| vec![0.0; n]);
            return GameSpec::with_bounds(
                a,
                DVector::from_vec(rho),
                DVector::from_vec(lower),
                DVector::from_vec(upper),
            );
        }
        if let Some(gen) = &g.generate {
            let m = MatrixEnsembleConfig {
                n: gen.n,
                count: 1,
                offdiag_scale: gen.offdiag_scale,
                dominance_margin: gen.dominance_margin,
                seed: gen.seed,
            };
            return random_sdd_game(&m, gen.rho_min, gen.rho_max, 0);
        }
        Ok(presets::benchmark_game())
    }

    /// Initial profile: explicit `k0`, else a preset-specific default.
    pub fn initial_profile(&self, spec: &GameSpec) -> Result<nashlq::ActionProfile, GameError> {
        if let Some(k0) = &self.learn.k0 {
            return spec.profile(k0.clone());
        }
        let default = match self.game.preset.as_deref() {
            None if self.game.a.is_none() && self.game.generate.is_none() => {
                presets::BENCHMARK_ROUND1_K0.to_vec()
            }
            Some("paper") => presets::BENCHMARK_ROUND1_K0.to_vec(),
            Some("scalar") => vec![1.0],
            _ => (0..spec.n())
                .map(|i| {
                    let (lo, hi) = (spec.k_lower()[i], spec.k_upper()[i]);
                    lo + (0.5 * (hi - lo)).min(1.0)
                })
                .collect(),
        };
        spec.profile(default)
    }
}
