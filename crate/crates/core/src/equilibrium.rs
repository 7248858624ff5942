//! Uniqueness diagnostics: the Rosen condition `G(k) + G(k)^T > 0` over the
//! action box, the closed-form two-player determinant `mu`, and ensemble
//! sweeps over random strictly diagonally dominant systems.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::game::{exact_gradient, min_eigenvalue, ActionProfile, GameSpec, Resolvent};
use crate::rng::substream;

/// Smallest eigenvalue of `G + G^T` found over a sampled region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RosenReport {
    pub min_eig: f64,
    pub witness: ActionProfile,
    pub samples: usize,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatrixEnsembleConfig {
    pub n: usize,
    pub count: usize,
    pub offdiag_scale: f64,
    pub dominance_margin: f64,
    pub seed: u64,
}

impl Default for MatrixEnsembleConfig {
    fn default() -> Self {
        Self {
            n: 5,
            count: 1,
            offdiag_scale: 1.0,
            dominance_margin: 1e-3,
            seed: 0,
        }
    }
}

impl MatrixEnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.count == 0 {
            return Err(GameError::InvalidConfig("n and count must be at least 1".into()));
        }
        if !(self.offdiag_scale > 0.0 && self.dominance_margin > 0.0) {
            return Err(GameError::InvalidConfig(
                "offdiag_scale and dominance_margin must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Smallest eigenvalue of `G(k) + G(k)^T`; positive certifies the Rosen
/// condition at `k`.
pub fn rosen_check(spec: &GameSpec, k: &ActionProfile) -> Result<f64> {
    let g = Resolvent::new(spec, k)?.jacobian();
    Ok(min_eigenvalue(&(&g + g.transpose())))
}

/// `mu = 4 p^3 q^3 - a12^4 (p + q)^2` with `p = k1 - a11`, `q = k2 - a22`.
///
/// Positive `mu` is equivalent to `G + G^T > 0` for a two-player game with
/// `rho = 0`.
pub fn two_player_mu(a11: f64, a12: f64, a22: f64, k1: f64, k2: f64) -> Result<f64> {
    if !(a11 < -a12.abs() && a22 < -a12.abs()) {
        return Err(GameError::PreconditionViolated(format!(
            "need a11, a22 < -|a12|, got a11 = {a11}, a22 = {a22}, a12 = {a12}"
        )));
    }
    if !(k1 >= 0.0 && k2 >= 0.0) {
        return Err(GameError::PreconditionViolated(format!(
            "gains must be nonnegative, got ({k1}, {k2})"
        )));
    }
    let p = k1 - a11;
    let q = k2 - a22;
    let a4 = a12.powi(4);
    Ok(4.0 * p.powi(3) * q.powi(3) - a4 * (p + q).powi(2))
}

/// Strict diagonal dominance with a negative diagonal.
pub fn is_sdd_negative_diag(a: &DMatrix<f64>) -> bool {
    dominance_margins(a).iter().enumerate().all(|(i, &m)| a[(i, i)] < 0.0 && m > 0.0)
}

/// Per-row Gershgorin margin `|a_ii| - sum_{j != i} |a_ij|`.
pub fn dominance_margins(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    (0..n)
        .map(|i| {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
            a[(i, i)].abs() - off
        })
        .collect()
}

/// Random symmetric strictly diagonally dominant matrix with negative
/// diagonal: off-diagonals uniform on `[-s, s]`, and
/// `a_ii = -(sum_j |a_ij| + margin + U(0, s))`.
pub fn generate_sdd_matrix<R: Rng + ?Sized>(config: &MatrixEnsembleConfig, rng: &mut R) -> DMatrix<f64> {
    let n = config.n;
    let s = config.offdiag_scale;
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.random_range(-s..=s);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
        a[(i, i)] = -(off + config.dominance_margin + rng.random_range(0.0..s));
    }
    a
}

/// Random SDD game: `A` from [`generate_sdd_matrix`], `rho` uniform on
/// `[rho_min, rho_max)` and the default sweep box, all drawn from substream
/// `(config.seed, [index])`.
pub fn random_sdd_game(config: &MatrixEnsembleConfig, rho_min: f64, rho_max: f64, index: u64) -> Result<GameSpec> {
    config.validate()?;
    if !(0.0 <= rho_min && rho_min < rho_max && rho_max.is_finite()) {
        return Err(GameError::InvalidConfig(format!(
            "need 0 <= rho_min < rho_max, got [{rho_min}, {rho_max}]"
        )));
    }
    let mut rng = substream(config.seed, &[index]);
    let a = generate_sdd_matrix(config, &mut rng);
    let rho = DVector::from_fn(config.n, |_, _| rng.random_range(rho_min..rho_max));
    let upper = default_sweep_upper(&a);
    GameSpec::new(a, rho, upper)
}

/// Symmetric matrix with negative diagonal that is generally not
/// diagonally dominant (nor negative definite); used to hunt for
/// counterexamples outside the conjecture's hypothesis.
pub fn generate_symmetric_matrix<R: Rng + ?Sized>(config: &MatrixEnsembleConfig, rng: &mut R) -> DMatrix<f64> {
    let n = config.n;
    let s = config.offdiag_scale;
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = -rng.random_range(config.dominance_margin..=s.max(2.0 * config.dominance_margin));
        for j in (i + 1)..n {
            let v = rng.random_range(-s..=s);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    a
}

/// Stratified (Latin hypercube) samples over `[lower, upper]`.
pub fn latin_hypercube<R: Rng + ?Sized>(
    lower: &DVector<f64>,
    upper: &DVector<f64>,
    samples: usize,
    rng: &mut R,
) -> Vec<ActionProfile> {
    let n = lower.len();
    let strata: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            let mut p: Vec<usize> = (0..samples).collect();
            p.shuffle(rng);
            p
        })
        .collect();
    (0..samples)
        .map(|s| {
            DVector::from_fn(n, |i, _| {
                let u: f64 = rng.random();
                let t = (strata[i][s] as f64 + u) / samples as f64;
                (lower[i] + t * (upper[i] - lower[i])).clamp(lower[i], upper[i])
            })
            .into()
        })
        .collect()
}

/// Default sweep box upper bound `10 max(1, |a_ii|)`.
pub fn default_sweep_upper(a: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_fn(a.nrows(), |i, _| 10.0 * a[(i, i)].abs().max(1.0))
}

/// Rosen check at `samples` stratified points of the game's action box.
pub fn rosen_sweep(spec: &GameSpec, samples: usize, seed: u64) -> Result<RosenReport> {
    if samples == 0 {
        return Err(GameError::InvalidConfig("samples must be at least 1".into()));
    }
    let mut rng = substream(seed, &[]);
    let points = latin_hypercube(spec.k_lower(), spec.k_upper(), samples, &mut rng);
    let eigs: Vec<f64> = points
        .par_iter()
        .map(|k| rosen_check(spec, k))
        .collect::<Result<_>>()?;
    Ok(summarize(&points, &eigs))
}

fn summarize(points: &[ActionProfile], eigs: &[f64]) -> RosenReport {
    let (idx, &min_eig) = eigs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least one sample");
    RosenReport {
        min_eig,
        witness: points[idx].clone(),
        samples: eigs.len(),
        violated: min_eig <= 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    /// Symmetric strictly diagonally dominant, negative diagonal.
    #[default]
    Sdd,
    Diagonal,
    /// Symmetric with negative diagonal, no dominance imposed.
    Symmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub count: usize,
    pub offdiag_scale: f64,
    pub dominance_margin: f64,
    pub seed: u64,
    pub samples_per_matrix: usize,
    pub rho_min: f64,
    pub rho_max: f64,
    pub kind: MatrixKind,
    /// Finite-difference spot check of `G` at every `fd_check_every`-th
    /// sample; zero disables it.
    pub fd_check_every: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n_min: 2,
            n_max: 6,
            count: 100,
            offdiag_scale: 1.0,
            dominance_margin: 1e-3,
            seed: 0,
            samples_per_matrix: 200,
            rho_min: 0.0,
            rho_max: 1.0,
            kind: MatrixKind::Sdd,
            fd_check_every: 100,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(GameError::InvalidConfig(format!(
                "need 1 <= n_min <= n_max, got {}..={}",
                self.n_min, self.n_max
            )));
        }
        if self.count == 0 || self.samples_per_matrix == 0 {
            return Err(GameError::InvalidConfig(
                "count and samples_per_matrix must be at least 1".into(),
            ));
        }
        if !(0.0 <= self.rho_min && self.rho_min < self.rho_max) {
            return Err(GameError::InvalidConfig(format!(
                "need 0 <= rho_min < rho_max, got [{}, {}]",
                self.rho_min, self.rho_max
            )));
        }
        MatrixEnsembleConfig {
            n: self.n_min,
            count: self.count,
            offdiag_scale: self.offdiag_scale,
            dominance_margin: self.dominance_margin,
            seed: self.seed,
        }
        .validate()
    }
}

/// Everything needed to reproduce one sampled point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub matrix_index: usize,
    pub seed: u64,
    pub a: Vec<Vec<f64>>,
    pub rho: Vec<f64>,
    pub k: Vec<f64>,
    pub min_eig: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSweep {
    pub index: usize,
    pub n: usize,
    pub a: Vec<Vec<f64>>,
    pub rho: Vec<f64>,
    pub report: RosenReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub matrices: Vec<MatrixSweep>,
    pub total_samples: usize,
    pub global_min_eig: f64,
    pub global_witness: Witness,
    pub violations: Vec<Witness>,
    pub fd_checks: usize,
    pub fd_max_rel_err: f64,
}

impl SweepReport {
    pub fn violated(&self) -> bool {
        !self.violations.is_empty()
    }
}

/// Central-difference check of the Jacobian columns at `k`; returns the
/// worst column error relative to the column's magnitude, or `None` when a
/// stencil point leaves the stable region.
pub fn jacobian_fd_error(spec: &GameSpec, k: &ActionProfile, h: f64) -> Option<f64> {
    let g = Resolvent::new(spec, k).ok()?.jacobian();
    let n = spec.n();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let mut plus = k.vector().clone();
        let mut minus = k.vector().clone();
        plus[j] += h;
        minus[j] -= h;
        let gp = exact_gradient(spec, &plus.into()).ok()?;
        let gm = exact_gradient(spec, &minus.into()).ok()?;
        let fd = (gp - gm) / (2.0 * h);
        let col = g.column(j);
        let scale = col.amax().max(f64::MIN_POSITIVE);
        worst = worst.max((col - fd).amax() / scale);
    }
    Some(worst)
}

struct MatrixOutcome {
    sweep: MatrixSweep,
    seed: u64,
    violations: Vec<Witness>,
    fd_checks: usize,
    fd_max: f64,
}

fn sweep_one(config: &SweepConfig, index: usize) -> Result<MatrixOutcome> {
    let mut rng = substream(config.seed, &[index as u64]);
    let n = rng.random_range(config.n_min..=config.n_max);
    let ens = MatrixEnsembleConfig {
        n,
        count: 1,
        offdiag_scale: config.offdiag_scale,
        dominance_margin: config.dominance_margin,
        seed: config.seed,
    };
    let a = match config.kind {
        MatrixKind::Sdd => generate_sdd_matrix(&ens, &mut rng),
        MatrixKind::Diagonal => {
            let mut d = generate_sdd_matrix(&ens, &mut rng);
            d.fill_lower_triangle(0.0, 1);
            d.fill_upper_triangle(0.0, 1);
            d
        }
        MatrixKind::Symmetric => generate_symmetric_matrix(&ens, &mut rng),
    };
    let rho = DVector::from_fn(n, |_, _| rng.random_range(config.rho_min..config.rho_max));
    let mut upper = default_sweep_upper(&a);

    // Lifted lower bounds (non-negative-definite A) must stay below the
    // sweep's upper bound.
    let probe = GameSpec::new(a.clone(), rho.clone(), DVector::repeat(n, f64::MAX / 4.0))?;
    for i in 0..n {
        upper[i] = upper[i].max(probe.k_lower()[i] + 1.0);
    }
    let spec = GameSpec::new(a, rho, upper)?;

    let points = latin_hypercube(spec.k_lower(), spec.k_upper(), config.samples_per_matrix, &mut rng);
    let mut eigs = Vec::with_capacity(points.len());
    let mut violations = Vec::new();
    let mut fd_checks = 0;
    let mut fd_max: f64 = 0.0;
    let a_rows = spec.a_rows();
    let rho_vec = spec.rho().as_slice().to_vec();
    for (s, k) in points.iter().enumerate() {
        let e = rosen_check(&spec, k)?;
        if e <= 0.0 {
            violations.push(Witness {
                matrix_index: index,
                seed: config.seed,
                a: a_rows.clone(),
                rho: rho_vec.clone(),
                k: k.as_slice().to_vec(),
                min_eig: e,
            });
        }
        if config.fd_check_every > 0 && s % config.fd_check_every == 0 {
            if let Some(err) = jacobian_fd_error(&spec, k, 1e-5) {
                fd_checks += 1;
                fd_max = fd_max.max(err);
            }
        }
        eigs.push(e);
    }
    Ok(MatrixOutcome {
        sweep: MatrixSweep {
            index,
            n,
            a: a_rows,
            rho: rho_vec,
            report: summarize(&points, &eigs),
        },
        seed: config.seed,
        violations,
        fd_checks,
        fd_max,
    })
}

/// Rosen sweep over a random matrix ensemble. Matrix `m` is generated from
/// substream `(seed, [m])`; results are reduced in index order.
pub fn conjecture_sweep(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let outcomes: Vec<MatrixOutcome> = (0..config.count)
        .into_par_iter()
        .map(|m| sweep_one(config, m))
        .collect::<Result<_>>()?;

    let mut matrices = Vec::with_capacity(outcomes.len());
    let mut violations = Vec::new();
    let mut fd_checks = 0;
    let mut fd_max_rel_err: f64 = 0.0;
    let mut total_samples = 0;
    let mut best: Option<Witness> = None;
    for o in outcomes {
        total_samples += o.sweep.report.samples;
        fd_checks += o.fd_checks;
        fd_max_rel_err = fd_max_rel_err.max(o.fd_max);
        violations.extend(o.violations);
        if best.as_ref().is_none_or(|w| o.sweep.report.min_eig < w.min_eig) {
            best = Some(Witness {
                matrix_index: o.sweep.index,
                seed: o.seed,
                a: o.sweep.a.clone(),
                rho: o.sweep.rho.clone(),
                k: o.sweep.report.witness.as_slice().to_vec(),
                min_eig: o.sweep.report.min_eig,
            });
        }
        matrices.push(o.sweep);
    }
    let global_witness = best.expect("count >= 1");
    Ok(SweepReport {
        matrices,
        total_samples,
        global_min_eig: global_witness.min_eig,
        global_witness,
        violations,
        fd_checks,
        fd_max_rel_err,
    })
}
