//! Subcommand bodies. Each returns `Ok(true)` on success and `Ok(false)`
//! when a check ran but failed.

use std::io::Write;

use anyhow::Result;
use serde::Serialize;

use nashlq::equilibrium::{dominance_margins, rosen_sweep, SweepConfig};
use nashlq::game::min_eigenvalue;
use nashlq::history::write_history;
use nashlq::learning::{run_gradient_play, LearnConfig, LearnRun, Mode};
use nashlq::rng::substream;
use nashlq::{
    conjecture_sweep, cost, generate_sdd_matrix, is_sdd_negative_diag, presets, rosen_check,
    simulate_batch, two_player_mu, ActionProfile, GameSpec, HistoryFormat,
};

use crate::config::{invalid, ExperimentConfig};
use crate::output::{self, csv_rows, fixed, join};

/// Exact-mode benchmark runs iterate to this gradient norm instead of
/// stopping after the reference stage count.
const EXACT_REPRO_GRAD_TOL: f64 = 1e-12;
const EXACT_REPRO_MAX_STAGES: usize = 100_000;
const EXACT_REPRO_TOL: f64 = 1e-6;
const MODEL_FREE_REPRO_TOL: f64 = 0.1;

fn history_name(stem: &str, format: HistoryFormat) -> String {
    format!("{stem}.{}", format.extension())
}

fn save_history(cfg: &ExperimentConfig, stem: &str, run: &LearnRun) -> Result<std::path::PathBuf> {
    let dir = cfg.output_dir();
    output::ensure_dir(&dir)?;
    let path = output::path(&dir, &history_name(stem, cfg.format));
    let mut w = output::create(&path)?;
    write_history(&mut w, &run.history, cfg.format)?;
    w.flush()?;
    Ok(path)
}

pub fn learn(cfg: &ExperimentConfig) -> Result<bool> {
    let spec = cfg.game()?;
    let lc = cfg.learn_config()?;
    let k0 = cfg.initial_profile(&spec)?;
    let run = run_gradient_play(&spec, &k0, &lc)?;
    let path = save_history(cfg, "history", &run)?;
    let last = run.history.last().expect("history has a final record");
    println!("mode: {}  stages: {}  converged: {}", lc.mode, run.stages_used, run.converged);
    println!("k_final: {}", join(run.final_profile.as_slice()));
    println!("J_final: {}", join(&last.cost));
    println!("g_final: {}", join(&last.gradient));
    println!("history: {}", path.display());
    Ok(true)
}

#[derive(Serialize)]
struct RoundSummary {
    k0: Vec<f64>,
    k_final: Vec<f64>,
    reference: Vec<f64>,
    stages_used: usize,
    max_dev_from_reference: f64,
}

#[derive(Serialize)]
struct ReproSummary {
    mode: String,
    seed: u64,
    step_size: f64,
    batch_size: usize,
    horizon: f64,
    criterion: String,
    tolerance: f64,
    cross_round_gap: f64,
    rounds: Vec<RoundSummary>,
    pass: bool,
}

pub fn reproduce_paper(cfg: &ExperimentConfig) -> Result<bool> {
    if cfg.game.a.is_some() || cfg.game.preset.as_deref().is_some_and(|p| p != "paper") {
        return Err(invalid("reproduce-paper always uses the 5-player benchmark game").into());
    }
    let spec = presets::benchmark_game();
    let mode = cfg.learn.mode.unwrap_or(Mode::ModelFree);
    let defaults = match mode {
        Mode::ModelFree => LearnConfig {
            stages: presets::BENCHMARK_STAGES,
            mode,
            ..LearnConfig::default()
        },
        Mode::Exact => LearnConfig {
            stages: EXACT_REPRO_MAX_STAGES,
            mode,
            grad_tolerance: EXACT_REPRO_GRAD_TOL,
            ..LearnConfig::default()
        },
    };
    let mut lc = cfg.learn_config_with(defaults)?;
    lc.mode = mode;
    lc.record_history = true;

    let rounds = [
        (presets::BENCHMARK_ROUND1_K0, presets::BENCHMARK_ROUND1_K250),
        (presets::BENCHMARK_ROUND2_K0, presets::BENCHMARK_ROUND2_K250),
    ];
    let mut runs = Vec::new();
    for (r, (k0, _)) in rounds.iter().enumerate() {
        let run = run_gradient_play(&spec, &ActionProfile::new(k0.to_vec()), &lc)?;
        save_history(cfg, &format!("round{}", r + 1), &run)?;
        runs.push(run);
    }

    let gap = runs[0].final_profile.max_abs_diff(&runs[1].final_profile);
    let summaries: Vec<RoundSummary> = runs
        .iter()
        .zip(rounds.iter())
        .map(|(run, (_, reference))| {
            let reference = ActionProfile::new(reference.to_vec());
            RoundSummary {
                k0: run.history[0].k.as_slice().to_vec(),
                k_final: run.final_profile.as_slice().to_vec(),
                max_dev_from_reference: run.final_profile.max_abs_diff(&reference),
                reference: reference.as_slice().to_vec(),
                stages_used: run.stages_used,
            }
        })
        .collect();
    let (criterion, tolerance, pass) = match mode {
        Mode::Exact => ("cross-round gap", EXACT_REPRO_TOL, gap <= EXACT_REPRO_TOL),
        Mode::ModelFree => (
            "max deviation from reference rows",
            MODEL_FREE_REPRO_TOL,
            summaries.iter().all(|s| s.max_dev_from_reference <= MODEL_FREE_REPRO_TOL),
        ),
    };

    // Table layout: one row per (round, stage), players across.
    let n = spec.n();
    let mut header = vec!["row".to_string()];
    header.extend((1..=n).map(|i| format!("k_{i}")));
    let mut table = header.join(",") + "\n";
    let names: Vec<String> = (1..=n).map(|i| format!("{:>8}", format!("k_{i}"))).collect();
    let mut pretty = format!("{:<22}{}\n", "", names.join(" "));
    for (r, s) in summaries.iter().enumerate() {
        let labelled = [
            (format!("round{}_k0", r + 1), &s.k0),
            (format!("round{}_k_final", r + 1), &s.k_final),
            (format!("round{}_reference", r + 1), &s.reference),
        ];
        for (label, row) in labelled {
            table.push_str(&format!("{label},{}\n", join(row)));
            pretty.push_str(&format!("{label:<22}{}\n", fixed(row, 2)));
        }
    }
    let dir = cfg.output_dir();
    output::write_text(&output::path(&dir, "table.csv"), &table)?;

    let summary = ReproSummary {
        mode: mode.to_string(),
        seed: lc.sim.seed,
        step_size: lc.step_size,
        batch_size: lc.sim.batch_size,
        horizon: lc.sim.horizon,
        criterion: criterion.into(),
        tolerance,
        cross_round_gap: gap,
        rounds: summaries,
        pass,
    };
    output::write_json(&output::path(&dir, "summary.json"), &summary)?;

    print!("{pretty}");
    for (r, s) in summary.rounds.iter().enumerate() {
        println!(
            "round {}: stages {}  max |k - reference| = {:.3e}",
            r + 1,
            s.stages_used,
            s.max_dev_from_reference
        );
    }
    println!("cross-round gap: {gap:.3e}");
    println!(
        "{}: {criterion} within {tolerance:e}",
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(pass)
}

#[derive(Serialize)]
struct MuPoint {
    k: Vec<f64>,
    mu: f64,
    min_eig: f64,
}

#[derive(Serialize)]
struct RosenOutput {
    a: Vec<Vec<f64>>,
    rho: Vec<f64>,
    k_lower: Vec<f64>,
    k_upper: Vec<f64>,
    seed: u64,
    samples: usize,
    min_eig: f64,
    witness: Vec<f64>,
    violated: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    two_player_mu: Vec<MuPoint>,
}

/// `mu` next to the symmetric-part eigenvalue at the witness and the box
/// corners; only defined for two players with zero control weights.
fn mu_points(spec: &GameSpec, witness: &ActionProfile) -> Vec<MuPoint> {
    if spec.n() != 2 || spec.rho().iter().any(|&r| r != 0.0) {
        return Vec::new();
    }
    let (lo, hi) = (spec.k_lower(), spec.k_upper());
    let a = spec.a();
    let mut pts = vec![witness.as_slice().to_vec()];
    for k1 in [lo[0], hi[0]] {
        for k2 in [lo[1], hi[1]] {
            pts.push(vec![k1, k2]);
        }
    }
    pts.into_iter()
        .filter_map(|k| {
            let mu = two_player_mu(a[(0, 0)], a[(0, 1)], a[(1, 1)], k[0], k[1]).ok()?;
            let min_eig = rosen_check(spec, &ActionProfile::new(k.clone())).ok()?;
            Some(MuPoint { k, mu, min_eig })
        })
        .collect()
}

pub fn check_rosen(cfg: &ExperimentConfig, ensemble: bool) -> Result<bool> {
    let dir = cfg.output_dir();
    output::ensure_dir(&dir)?;
    if ensemble || cfg.rosen.ensemble.is_some() {
        let sweep = cfg.rosen.ensemble.clone().unwrap_or_else(|| SweepConfig {
            seed: cfg.rosen.seed,
            ..SweepConfig::default()
        });
        let report = conjecture_sweep(&sweep)?;
        output::write_json(&output::path(&dir, "rosen_sweep.json"), &report)?;
        println!(
            "matrices: {}  samples: {}  min eig: {:.6e} (matrix {})",
            report.matrices.len(),
            report.total_samples,
            report.global_min_eig,
            report.global_witness.matrix_index
        );
        println!(
            "jacobian spot checks: {}  max rel err: {:.3e}",
            report.fd_checks, report.fd_max_rel_err
        );
        println!("violations: {}", report.violations.len());
        return Ok(!report.violated());
    }

    let spec = cfg.game()?;
    let report = rosen_sweep(&spec, cfg.rosen.samples, cfg.rosen.seed)?;
    let mu = mu_points(&spec, &report.witness);
    let out = RosenOutput {
        a: spec.a_rows(),
        rho: spec.rho().as_slice().to_vec(),
        k_lower: spec.k_lower().as_slice().to_vec(),
        k_upper: spec.k_upper().as_slice().to_vec(),
        seed: cfg.rosen.seed,
        samples: report.samples,
        min_eig: report.min_eig,
        witness: report.witness.as_slice().to_vec(),
        violated: report.violated,
        two_player_mu: mu,
    };
    output::write_json(&output::path(&dir, "rosen_report.json"), &out)?;
    println!("samples: {}  min eig of G + G^T: {:.6e}", out.samples, out.min_eig);
    println!("at k = {}", join(&out.witness));
    for p in &out.two_player_mu {
        println!("k = ({}, {})  mu = {:.6e}  min eig = {:.6e}", p.k[0], p.k[1], p.mu, p.min_eig);
    }
    println!("{}", if out.violated { "VIOLATED" } else { "OK" });
    Ok(!out.violated)
}

#[derive(Serialize)]
struct MatrixCheck {
    index: usize,
    file: String,
    n: usize,
    seed: u64,
    sdd_negative_diagonal: bool,
    dominance_margins: Vec<f64>,
    min_dominance_margin: f64,
    min_eigenvalue: f64,
    max_eigenvalue: f64,
}

pub fn gen_matrix(cfg: &ExperimentConfig) -> Result<bool> {
    let m = &cfg.matrix;
    m.validate()?;
    let dir = cfg.output_dir();
    output::ensure_dir(&dir)?;
    let mut checks = Vec::with_capacity(m.count);
    for idx in 0..m.count {
        let mut rng = substream(m.seed, &[idx as u64]);
        let a = generate_sdd_matrix(m, &mut rng);
        let file = if m.count == 1 {
            "matrix.csv".to_string()
        } else {
            format!("matrix_{idx:04}.csv")
        };
        let rows: Vec<Vec<f64>> = a.row_iter().map(|r| r.iter().copied().collect()).collect();
        output::write_text(&output::path(&dir, &file), &csv_rows(None, rows.iter().map(Vec::as_slice)))?;
        let margins = dominance_margins(&a);
        checks.push(MatrixCheck {
            index: idx,
            file,
            n: m.n,
            seed: m.seed,
            sdd_negative_diagonal: is_sdd_negative_diag(&a),
            min_dominance_margin: margins.iter().copied().fold(f64::INFINITY, f64::min),
            dominance_margins: margins,
            min_eigenvalue: min_eigenvalue(&a),
            max_eigenvalue: -min_eigenvalue(&(-&a)),
        });
    }
    output::write_json(&output::path(&dir, "matrix_report.json"), &checks)?;
    let ok = checks.iter().all(|c| c.sdd_negative_diagonal && c.max_eigenvalue < 0.0);
    for c in &checks {
        println!(
            "{}: min margin {:.4e}  eigenvalues in [{:.4e}, {:.4e}]",
            c.file, c.min_dominance_margin, c.min_eigenvalue, c.max_eigenvalue
        );
    }
    Ok(ok)
}

pub fn simulate(cfg: &ExperimentConfig) -> Result<bool> {
    let spec = cfg.game()?;
    let k = cfg.initial_profile(&spec)?;
    let closed = cost(&spec, &k)?;
    let batch = simulate_batch(&spec, &k, &cfg.sim, 0)?;
    let mc = batch.mean_cost();
    let n = spec.n();

    let dir = cfg.output_dir();
    output::ensure_dir(&dir)?;
    let mut summary = String::from("player,J_closed_form,J_monte_carlo,rel_err\n");
    println!("{:>6} {:>14} {:>14} {:>10}", "player", "J", "J_mc", "rel err");
    for i in 0..n {
        let rel = (mc[i] - closed[i]).abs() / closed[i];
        summary.push_str(&format!("{},{},{},{}\n", i + 1, closed[i], mc[i], rel));
        println!("{:>6} {:>14.8} {:>14.8} {:>10.3e}", i + 1, closed[i], mc[i], rel);
    }
    output::write_text(&output::path(&dir, "simulate.csv"), &summary)?;

    let mut header = vec!["b".to_string()];
    header.extend((1..=n).map(|i| format!("x0_{i}")));
    header.extend((1..=n).map(|i| format!("c_{i}")));
    let mut traj = header.join(",") + "\n";
    for (b, x0) in batch.x0.iter().enumerate() {
        let c: Vec<f64> = batch.per_player_cost.row(b).iter().copied().collect();
        traj.push_str(&format!("{b},{},{}\n", join(x0.as_slice()), join(&c)));
    }
    output::write_text(&output::path(&dir, "trajectories.csv"), &traj)?;
    Ok(true)
}
