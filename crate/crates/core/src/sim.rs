//! Closed-loop trajectory simulation and Monte Carlo cost estimation.
//!
//! Trajectories of `x' = (A - K) x` are evaluated through the symmetric
//! eigendecomposition `A - K = Q diag(lambda) Q^T`, computed once per profile
//! and shared by the whole batch. Each trajectory `b` of stage `s` draws its
//! initial state from the substream `(seed, [s, b])`, so a batch is
//! bit-identical regardless of how rayon schedules it.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::distr::Open01;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::game::{factor_spd, ActionProfile, GameSpec};
use crate::rng::substream;

/// Half-width of the uniform initial-state distribution; gives unit variance.
pub const INITIAL_HALF_WIDTH: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// Analytic integral of the squared modal expansion.
    #[default]
    Exact,
    /// Composite trapezoid rule with step `dt`.
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub batch_size: usize,
    /// Sampling horizon in seconds.
    pub horizon: f64,
    /// Quadrature step in seconds.
    pub dt: f64,
    pub seed: u64,
    pub integrator: Integrator,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            batch_size: 500,
            horizon: 200.0,
            dt: 0.1,
            seed: 0,
            integrator: Integrator::Exact,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(GameError::InvalidConfig("batch_size must be at least 1".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(GameError::InvalidConfig(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if !(self.dt > 0.0 && self.dt <= self.horizon) {
            return Err(GameError::InvalidConfig(format!(
                "dt must lie in (0, horizon], got {}",
                self.dt
            )));
        }
        Ok(())
    }
}

/// Initial states and per-player sampled costs of one batch.
#[derive(Debug, Clone)]
pub struct TrajectoryBatch {
    pub x0: Vec<DVector<f64>>,
    /// `|B| x n`, row `b` holds trajectory `b`'s finite-horizon costs.
    pub per_player_cost: DMatrix<f64>,
}

impl TrajectoryBatch {
    /// Column means, reduced in trajectory order.
    pub fn mean_cost(&self) -> DVector<f64> {
        let (rows, n) = self.per_player_cost.shape();
        let mut acc = DVector::zeros(n);
        for b in 0..rows {
            for i in 0..n {
                acc[i] += self.per_player_cost[(b, i)];
            }
        }
        acc / rows as f64
    }
}

/// Draw `x0` with i.i.d. components uniform on `(-sqrt 3, sqrt 3)`.
pub fn sample_initial_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| {
        let u: f64 = rng.sample(Open01);
        INITIAL_HALF_WIDTH * (2.0 * u - 1.0)
    })
}

/// Spectral form of the closed loop at one profile.
#[derive(Debug, Clone)]
pub struct ClosedLoop {
    /// Eigenvalues of `A - K`.
    lambda: DVector<f64>,
    q: DMatrix<f64>,
    /// `1 + rho_i k_i^2`.
    weight: DVector<f64>,
}

impl ClosedLoop {
    pub fn new(spec: &GameSpec, k: &ActionProfile) -> Result<Self> {
        spec.check_dimension(k)?;
        let eig = SymmetricEigen::new(-spec.closed_loop_gap(k));
        let weight = DVector::from_fn(spec.n(), |i, _| 1.0 + spec.rho()[i] * k[i] * k[i]);
        Ok(Self {
            lambda: eig.eigenvalues,
            q: eig.eigenvectors,
            weight,
        })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.lambda
    }

    /// `e^{(A - K) t}`.
    pub fn transition(&self, t: f64) -> DMatrix<f64> {
        let d = self.lambda.map(|l| (l * t).exp());
        &self.q * DMatrix::from_diagonal(&d) * self.q.transpose()
    }

    pub fn state_at(&self, x0: &DVector<f64>, t: f64) -> DVector<f64> {
        let c = self.q.tr_mul(x0);
        let modal = c.component_mul(&self.lambda.map(|l| (l * t).exp()));
        &self.q * modal
    }

    fn kernel(&self, horizon: f64) -> DMatrix<f64> {
        let n = self.lambda.len();
        DMatrix::from_fn(n, n, |m, p| {
            let s = self.lambda[m] + self.lambda[p];
            if (s * horizon).abs() < 1e-300 {
                horizon
            } else {
                (s * horizon).exp_m1() / s
            }
        })
    }

    /// `int_0^T x_i(t)^2 dt` for every `i`, exactly: with `c = Q^T x0`,
    /// `x_i(t) = sum_m Q_im c_m e^{lambda_m t}`.
    fn exact_state_energy(&self, x0: &DVector<f64>, kernel: &DMatrix<f64>) -> DVector<f64> {
        let c = self.q.tr_mul(x0);
        let n = c.len();
        DVector::from_fn(n, |i, _| {
            let v = DVector::from_fn(n, |m, _| self.q[(i, m)] * c[m]);
            v.dot(&(kernel * &v)).max(0.0)
        })
    }

    /// Composite trapezoid rule for `int_0^T x_i(t)^2 dt` on a uniform grid
    /// with step at most `dt`.
    fn quadrature_state_energy(&self, x0: &DVector<f64>, step: &DMatrix<f64>, h: f64, steps: usize) -> DVector<f64> {
        let mut x = x0.clone();
        let mut acc = x.map(|v| 0.5 * v * v);
        for j in 1..=steps {
            x = step * &x;
            let w = if j == steps { 0.5 } else { 1.0 };
            for i in 0..x.len() {
                acc[i] += w * x[i] * x[i];
            }
        }
        acc * h
    }

    fn evaluator(&self, config: &SimConfig) -> CostEvaluator<'_> {
        match config.integrator {
            Integrator::Exact => CostEvaluator::Exact {
                lp: self,
                kernel: self.kernel(config.horizon),
            },
            Integrator::Quadrature => {
                let steps = (config.horizon / config.dt - 1e-9).ceil().max(1.0) as usize;
                let h = config.horizon / steps as f64;
                CostEvaluator::Quadrature {
                    lp: self,
                    step: self.transition(h),
                    h,
                    steps,
                }
            }
        }
    }
}

enum CostEvaluator<'a> {
    Exact {
        lp: &'a ClosedLoop,
        kernel: DMatrix<f64>,
    },
    Quadrature {
        lp: &'a ClosedLoop,
        step: DMatrix<f64>,
        h: f64,
        steps: usize,
    },
}

impl CostEvaluator<'_> {
    fn cost(&self, x0: &DVector<f64>) -> DVector<f64> {
        let (lp, energy) = match self {
            CostEvaluator::Exact { lp, kernel } => (*lp, lp.exact_state_energy(x0, kernel)),
            CostEvaluator::Quadrature { lp, step, h, steps } => {
                (*lp, lp.quadrature_state_energy(x0, step, *h, *steps))
            }
        };
        energy.component_mul(&lp.weight)
    }
}

/// `x(t) = e^{(A - K) t} x0`.
pub fn simulate_state(spec: &GameSpec, k: &ActionProfile, x0: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
    check_state(spec, x0)?;
    Ok(ClosedLoop::new(spec, k)?.state_at(x0, t))
}

/// Finite-horizon cost `int_0^T (x_i^2 + rho_i u_i^2) dt` of one rollout,
/// with `u_i = -k_i x_i`.
pub fn trajectory_cost(
    spec: &GameSpec,
    k: &ActionProfile,
    x0: &DVector<f64>,
    config: &SimConfig,
) -> Result<DVector<f64>> {
    config.validate()?;
    check_state(spec, x0)?;
    let lp = ClosedLoop::new(spec, k)?;
    Ok(lp.evaluator(config).cost(x0))
}

/// Simulate the batch for `stage`; trajectory `b` uses substream
/// `(config.seed, [stage, b])`.
pub fn simulate_batch(
    spec: &GameSpec,
    k: &ActionProfile,
    config: &SimConfig,
    stage: u64,
) -> Result<TrajectoryBatch> {
    config.validate()?;
    spec.check_dimension(k)?;
    factor_spd(&spec.closed_loop_gap(k))?;
    let lp = ClosedLoop::new(spec, k)?;
    let eval = lp.evaluator(config);
    let n = spec.n();

    let rows: Vec<(DVector<f64>, DVector<f64>)> = (0..config.batch_size as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = substream(config.seed, &[stage, b]);
            let x0 = sample_initial_state(&mut rng, n);
            let c = eval.cost(&x0);
            (x0, c)
        })
        .collect();

    let mut per_player_cost = DMatrix::zeros(rows.len(), n);
    let mut x0s = Vec::with_capacity(rows.len());
    for (b, (x0, c)) in rows.into_iter().enumerate() {
        per_player_cost.row_mut(b).copy_from(&c.transpose());
        x0s.push(x0);
    }
    Ok(TrajectoryBatch {
        x0: x0s,
        per_player_cost,
    })
}

/// Batch-averaged finite-horizon cost estimate at stage 0.
pub fn monte_carlo_cost(spec: &GameSpec, k: &ActionProfile, config: &SimConfig) -> Result<DVector<f64>> {
    monte_carlo_cost_at_stage(spec, k, config, 0)
}

pub fn monte_carlo_cost_at_stage(
    spec: &GameSpec,
    k: &ActionProfile,
    config: &SimConfig,
    stage: u64,
) -> Result<DVector<f64>> {
    Ok(simulate_batch(spec, k, config, stage)?.mean_cost())
}

/// Trapezoid approximation of `int_0^T e^{2 (A - K) t} dt`, stepping the
/// integrand by repeated multiplication with `e^{2 (A - K) h}`.
pub fn gramian_quadrature(spec: &GameSpec, k: &ActionProfile, horizon: f64, dt: f64) -> Result<DMatrix<f64>> {
    if !(dt > 0.0 && dt <= horizon) {
        return Err(GameError::InvalidConfig(format!(
            "dt must lie in (0, horizon], got {dt}"
        )));
    }
    let lp = ClosedLoop::new(spec, k)?;
    let steps = (horizon / dt - 1e-9).ceil().max(1.0) as usize;
    let h = horizon / steps as f64;
    let step = lp.transition(2.0 * h);
    let n = spec.n();
    let mut e = DMatrix::identity(n, n);
    let mut acc = &e * 0.5;
    for j in 1..=steps {
        e = &e * &step;
        let w = if j == steps { 0.5 } else { 1.0 };
        acc += &e * w;
    }
    Ok(acc * h)
}

fn check_state(spec: &GameSpec, x0: &DVector<f64>) -> Result<()> {
    if x0.len() != spec.n() {
        return Err(GameError::DimensionMismatch {
            expected: spec.n(),
            got: x0.len(),
        });
    }
    Ok(())
}
