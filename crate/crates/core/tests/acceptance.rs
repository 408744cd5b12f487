//! One pass/fail line per acceptance criterion. Runs under `cargo test`
//! with its own `main` so the expensive training runs are shared.

mod common;

use std::time::{Duration, Instant};

use common::*;
use emac::executor::{dpo_loss, PolicyCheckpoint};
use emac::harness::{
    ablate_replanning, ablation_table, bathroom_transcript, compare_losses, default_suite, loss_table, sweep,
    sweep_table, trial_table, SuiteKind, SWEEP_RATES,
};
use emac::planner::{oracle_search, push_memory, FeedbackRecord, MemoryPool, PlannerBackend};
use emac::trainer::{run_training, Channel, EpisodeOptions, NoiseSpec, RunState, TaskInstance, TrainerConfig};
use emac::world::{check_success, generate_task, step_skill, TaskType, DEFAULT_HORIZON};
use rand::Rng;

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    limit: Option<Duration>,
}

fn check(id: &'static str, limit: Option<u64>, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = f();
    let elapsed = start.elapsed();
    let limit = limit.map(Duration::from_secs);
    let in_time = limit.is_none_or(|l| elapsed < l);
    let o = Outcome { id, pass: pass && in_time, detail, elapsed, limit };
    report(&o);
    o
}

fn report(o: &Outcome) {
    let limit = o.limit.map_or(String::new(), |l| format!(" < {}s", l.as_secs()));
    println!(
        "{} {} ({:.1}s{limit}) {}",
        o.id,
        if o.pass { "PASS" } else { "FAIL" },
        o.elapsed.as_secs_f64(),
        o.detail
    );
}

fn c1() -> (bool, String) {
    let mut rng = emac::seed::rng(101);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let pair = random_pair(&mut rng);
        let theta = random_params(&mut rng, &pair.input);
        worst = worst.max((dpo_loss(&theta, &theta, &pair, 0.1) - std::f64::consts::LN_2).abs());
    }
    (worst <= 1e-12, format!("max |loss - ln 2| = {worst:e} over 100 pairs"))
}

fn c2() -> (bool, String) {
    let (d, c, p) = (dpo_fd_worst(102, 100), ce_fd_worst(103, 100), plan_fd_worst(104, 100));
    (d < FD_TOL && c < FD_TOL && p < FD_TOL, format!("worst rel. error dpo {d:.1e}, ce {c:.1e}, plan model {p:.1e}"))
}

fn c3() -> (bool, String) {
    let mut bad = Vec::new();
    let mut longest = 0;
    for t in TaskType::ALL {
        for seed in 0..100 {
            let ok = (|| {
                let (world, task) = generate_task(seed, t, false).ok()?;
                let plan = oracle_search(&world, &task).ok()?;
                longest = longest.max(plan.steps.len());
                if plan.steps.len() > DEFAULT_HORIZON as usize {
                    return None;
                }
                let mut s = world;
                for a in &plan.steps {
                    s = step_skill(&s, a).ok()?.0;
                }
                check_success(&s, &task).then_some(())
            })();
            if ok.is_none() {
                bad.push(format!("{t}/{seed}"));
            }
        }
    }
    (bad.is_empty(), format!("600 tasks, {} failures, longest plan {longest}", bad.len()))
}

fn c4(runs: &[RunState]) -> (bool, String) {
    let mut good = 0;
    let mut parts = Vec::new();
    for r in runs {
        let first = r.reports.first().map_or(0.0, |x| x.greedy_rate);
        let last = r.reports.last().map_or(0.0, |x| x.greedy_rate);
        if last >= 0.90 && last >= first {
            good += 1;
        }
        parts.push(format!("{first:.2}->{last:.2}"));
    }
    (good >= 8, format!("{good}/10 seeds meet the bar [{}]", parts.join(" ")))
}

fn c5(stuck: &[TaskInstance], run: &RunState) -> (bool, String) {
    let (on, off) = ablate_replanning(stuck, &run.theta, &PlannerBackend::Oracle, run.config.horizon);
    print!("{}", ablation_table(&on, &off).to_text());
    let gap = on.avg_success - off.avg_success;
    (gap >= 0.20, format!("on {:.3}, off {:.3}, gap {gap:.3}", on.avg_success, off.avg_success))
}

fn c6(seen: &[TaskInstance], run: &RunState) -> (bool, String) {
    let opts = EpisodeOptions { horizon: run.config.horizon, replanning: true, noise: NoiseSpec::none() };
    let seeds: Vec<u64> = (0..10).collect();
    let points = sweep(seen, &run.theta, &PlannerBackend::Oracle, &opts, Channel::Visual, &SWEEP_RATES, &seeds);
    print!("{}", sweep_table(Channel::Visual, &points).to_text());
    let means: Vec<f64> = points.iter().map(|p| p.mean).collect();
    let monotone = means.windows(2).all(|w| w[1] <= w[0]);
    let drop = means[0] - means[means.len() - 1];
    (monotone && drop > 0.0, format!("non-increasing {monotone}, drop {drop:.3}"))
}

fn c7(seen: &[TaskInstance], ood: &[TaskInstance]) -> (bool, String) {
    let results = compare_losses(&TrainerConfig::default(), seen, ood, &PlannerBackend::Oracle);
    print!("{}", loss_table(&results).to_text());
    let falling = |r: &emac::harness::LossComparison| r.reports.windows(2).all(|w| w[1].train_loss < w[0].train_loss);
    let (dpo, ce) = (&results[0], &results[1]);
    let close = dpo.heldout.avg_success >= ce.heldout.avg_success - 0.05;
    (
        falling(dpo) && falling(ce) && close,
        format!(
            "losses falling dpo {} ce {}, held-out dpo {:.3} ce {:.3}",
            falling(dpo),
            falling(ce),
            dpo.heldout.avg_success,
            ce.heldout.avg_success
        ),
    )
}

fn c8() -> (bool, String) {
    let t = bathroom_transcript();
    let lines: Vec<&str> = t.lines().collect();
    let env = "Environment: You are in the middle of a room. Looking quickly around you, you see a cabinet 4, a cabinet 3, \
a cabinet 2, a cabinet 1, a countertop 1, a garbagecan 1, a handtowelholder 2, a handtowelholder 1, a sinkbasin 2, \
a sinkbasin 1, a toilet 1, a toiletpaperhanger 1, and a towelholder 1.";
    let replanned: Vec<&str> = lines.iter().skip_while(|l| **l != "Replanned Action Sequence:").skip(1).copied().collect();
    let checks = [
        ("environment", lines.contains(&env)),
        ("instruction", lines.contains(&"task instruction: Your task is to: put some spraybottle on toilet.")),
        ("failure", lines.contains(&"Env. feedback: [Action failed] cabinet 2.")),
        ("diagnosis", lines.contains(&"> think: step 3 is failed to execute. cabinet 2 is closed.")),
        ("replan", replanned.len() == 6 && replanned[2] == "> step 3: open cabinet 2"),
    ];
    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    (failed.is_empty(), if failed.is_empty() { "transcript matches".into() } else { format!("mismatched: {failed:?}") })
}

fn c9(seen: &[TaskInstance], first: &RunState) -> (bool, String) {
    let again = run_training(first.config.clone(), seen, PlannerBackend::Oracle);
    let same_ckpt = PolicyCheckpoint::new(again.theta.clone()).to_json() == PolicyCheckpoint::new(first.theta.clone()).to_json();
    let same_reports = serde_json::to_string(&again.reports).unwrap() == serde_json::to_string(&first.reports).unwrap();
    (same_ckpt && same_reports, format!("checkpoint identical {same_ckpt}, reports identical {same_reports}"))
}

fn c10() -> (bool, String) {
    let mut rng = emac::seed::rng(110);
    let mut pool = MemoryPool::new(3);
    let mut pushed: Vec<u32> = Vec::new();
    let mut violations = 0;
    for i in 0..10_000u32 {
        if rng.random_bool(0.8) {
            let rec = FeedbackRecord {
                task_id: format!("task-{}", rng.random_range(0..5)),
                trial_index: i,
                failed_step: None,
                diagnosis: String::new(),
                corrective_hint: String::new(),
                final_success: rng.random_bool(0.5),
            };
            pool = push_memory(pool, rec);
            pushed.push(i);
        } else {
            let _ = pool.texts();
        }
        let kept: Vec<u32> = pool.records().map(|r| r.trial_index).collect();
        let expect = &pushed[pushed.len().saturating_sub(3)..];
        if pool.len() > 3 || kept != expect {
            violations += 1;
        }
    }
    (violations == 0, format!("10000 ops, {violations} violations"))
}

fn main() {
    let mut outcomes = vec![check("C1", Some(1), c1), check("C2", Some(10), c2), check("C3", Some(30), c3)];

    let seen = default_suite(SuiteKind::Seen).unwrap().instantiate().unwrap();
    let ood = default_suite(SuiteKind::Ood).unwrap().instantiate().unwrap();
    let stuck = default_suite(SuiteKind::Stuck).unwrap().instantiate().unwrap();

    let mut runs = Vec::new();
    outcomes.push(check("C4", Some(600), || {
        for seed in 0..10 {
            let cfg = TrainerConfig { master_seed: seed, ..TrainerConfig::default() };
            runs.push(run_training(cfg, &seen, PlannerBackend::Oracle));
        }
        print!("{}", trial_table(&runs[0].reports).to_text());
        c4(&runs)
    }));
    outcomes.push(check("C5", Some(300), || c5(&stuck, &runs[0])));
    outcomes.push(check("C6", Some(300), || c6(&seen, &runs[0])));
    outcomes.push(check("C7", Some(600), || c7(&seen, &ood)));
    outcomes.push(check("C8", Some(1), c8));
    outcomes.push(check("C9", None, || c9(&seen, &runs[0])));
    outcomes.push(check("C10", None, c10));

    println!("\nacceptance summary");
    for o in &outcomes {
        report(o);
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all {} criteria passed", outcomes.len());
}
