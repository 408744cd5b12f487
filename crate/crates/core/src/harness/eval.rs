use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::report::{fmt3, success_table, EvalReport, Table};
use crate::executor::PolicyParams;
use crate::planner::{MemoryPool, PlannerBackend};
use crate::seed::derive_seed;
use crate::trainer::{
    rollout_greedy, Channel, EpisodeOptions, LossMode, NoiseSpec, TaskInstance, Trainer, TrainerConfig, TrialReport,
};

pub const SWEEP_RATES: [f64; 6] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];

/// Greedy evaluation of a fixed policy.
pub fn evaluate(
    label: &str,
    tasks: &[TaskInstance],
    theta: &PolicyParams,
    backend: &PlannerBackend,
    memories: Option<&BTreeMap<String, MemoryPool>>,
    opts: &EpisodeOptions,
) -> EvalReport {
    EvalReport::from_trajectories(label, &rollout_greedy(tasks, theta, backend, memories, opts, 0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub rate: f64,
    pub per_seed: Vec<f64>,
    pub mean: f64,
}

/// Success against noise rate, averaged over `seeds` noise seeds.
pub fn sweep(
    tasks: &[TaskInstance],
    theta: &PolicyParams,
    backend: &PlannerBackend,
    base: &EpisodeOptions,
    channel: Channel,
    rates: &[f64],
    seeds: &[u64],
) -> Vec<SweepPoint> {
    rates
        .iter()
        .map(|&rate| {
            let per_seed: Vec<f64> = seeds
                .iter()
                .map(|&s| {
                    let mut o = *base;
                    o.noise = NoiseSpec { rate, channel, seed: derive_seed(&[s, rate.to_bits()]) };
                    evaluate("sweep", tasks, theta, backend, None, &o).avg_success
                })
                .collect();
            let mean = per_seed.iter().sum::<f64>() / per_seed.len().max(1) as f64;
            SweepPoint { rate, per_seed, mean }
        })
        .collect()
}

pub fn sweep_table(channel: Channel, points: &[SweepPoint]) -> Table {
    let mut t = Table::new(&format!("Success under {channel:?} noise"), &["Noise", "Success", "Min", "Max"]);
    for p in points {
        let min = p.per_seed.iter().copied().fold(f64::INFINITY, f64::min);
        let max = p.per_seed.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        t.push(vec![format!("{:.1}", p.rate), fmt3(p.mean), fmt3(min), fmt3(max)]);
    }
    t
}

/// Replanning on against off for one policy on one suite.
pub fn ablate_replanning(
    tasks: &[TaskInstance],
    theta: &PolicyParams,
    backend: &PlannerBackend,
    horizon: u32,
) -> (EvalReport, EvalReport) {
    let mut opts = EpisodeOptions { horizon, replanning: true, noise: NoiseSpec::none() };
    let on = evaluate("replanning on", tasks, theta, backend, None, &opts);
    opts.replanning = false;
    let off = evaluate("replanning off", tasks, theta, backend, None, &opts);
    (on, off)
}

pub fn ablation_table(on: &EvalReport, off: &EvalReport) -> Table {
    success_table("Replanning ablation", &[on.clone(), off.clone()])
}

/// Per-trial training loss and held-out success for one loss mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossComparison {
    pub mode: LossMode,
    pub reports: Vec<TrialReport>,
    pub seen: EvalReport,
    pub heldout: EvalReport,
}

/// Trains once per loss mode with otherwise identical settings and
/// evaluates both on the seen and held-out suites.
pub fn compare_losses(
    config: &TrainerConfig,
    seen: &[TaskInstance],
    heldout: &[TaskInstance],
    backend: &PlannerBackend,
) -> Vec<LossComparison> {
    [LossMode::Dpo, LossMode::Ce]
        .into_iter()
        .map(|mode| {
            let cfg = TrainerConfig { loss_mode: mode, ..config.clone() };
            let opts = EpisodeOptions { horizon: cfg.horizon, replanning: cfg.replanning, noise: NoiseSpec::none() };
            let state = Trainer::new(cfg, seen, backend.clone()).run();
            let label = format!("{mode:?}").to_uppercase();
            LossComparison {
                mode,
                seen: evaluate(&label, seen, &state.theta, backend, Some(&state.memories), &opts),
                heldout: evaluate(&label, heldout, &state.theta, backend, None, &opts),
                reports: state.reports,
            }
        })
        .collect()
}

pub fn loss_table(results: &[LossComparison]) -> Table {
    let mut t = Table::new(
        "Preference vs imitation objective",
        &["Objective", "Trials", "First loss", "Final loss", "Seen success", "Held-out success"],
    );
    for r in results {
        let first = r.reports.first().map_or(0.0, |x| x.train_loss);
        let last = r.reports.last().map_or(0.0, |x| x.train_loss);
        t.push(vec![
            format!("{:?}", r.mode).to_uppercase(),
            r.reports.len().to_string(),
            format!("{first:.4}"),
            format!("{last:.4}"),
            fmt3(r.seen.avg_success),
            fmt3(r.heldout.avg_success),
        ]);
    }
    t
}

/// Planner errors per trial, split into training and held-out rollouts.
pub fn errors_table(reports: &[TrialReport]) -> Table {
    let mut t = Table::new("Planner errors per trial", &["Number of Trials", "Errors (seen)", "Errors (held-out)"]);
    for r in reports {
        t.push(vec![(r.trial + 1).to_string(), r.planner_errors_seen.to_string(), r.planner_errors_ood.to_string()]);
    }
    t
}

/// Greedy success per trial.
pub fn trial_table(reports: &[TrialReport]) -> Table {
    let mut t = Table::new(
        "Training progress",
        &["Trial", "Sampled", "Greedy", "Held-out", "Steps", "Pairs", "Loss", "Plan NLL"],
    );
    for r in reports {
        t.push(vec![
            (r.trial + 1).to_string(),
            fmt3(r.sampled_rate),
            fmt3(r.greedy_rate),
            r.heldout_rate.map_or("-".into(), fmt3),
            format!("{:.2}", r.avg_steps),
            r.dataset_size.to_string(),
            format!("{:.4}", r.train_loss),
            r.plan_nll.map_or("-".into(), |x| format!("{x:.3}")),
        ]);
    }
    t
}
