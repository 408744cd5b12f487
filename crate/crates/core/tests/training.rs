use emac::executor::{PolicyCheckpoint, ExecutorError};
use emac::harness::{gen_suite, SuiteKind};
use emac::planner::{
    push_memory, FeedbackRecord, MemoryPool, PlannerBackend, ReplayTransport, WireClient, WireConfig,
};
use emac::trainer::{
    aggregate, run_episode, run_training, Behavior, EpisodeOptions, NoiseSpec, RunState, TaskInstance, Trainer,
    TrainerConfig,
};
use proptest::prelude::*;

fn small_suite() -> Vec<TaskInstance> {
    gen_suite(SuiteKind::Seen, [2; 6]).unwrap().instantiate().unwrap()
}

fn small_config() -> TrainerConfig {
    TrainerConfig { max_trials: 3, bc_tasks: 12, ..TrainerConfig::default() }
}

fn record(i: u32) -> FeedbackRecord {
    FeedbackRecord {
        task_id: "t".into(),
        trial_index: i,
        failed_step: None,
        diagnosis: String::new(),
        corrective_hint: String::new(),
        final_success: i.is_multiple_of(2),
    }
}

proptest! {
    #[test]
    fn memory_keeps_the_newest_records(cap in 1usize..6, n in 0u32..40) {
        let mut pool = MemoryPool::new(cap);
        for i in 0..n {
            pool = push_memory(pool, record(i));
            prop_assert!(pool.len() <= cap);
        }
        let kept: Vec<u32> = pool.records().map(|r| r.trial_index).collect();
        let expect: Vec<u32> = (n.saturating_sub(cap as u32)..n).collect();
        prop_assert_eq!(kept, expect);
    }
}

#[test]
fn zero_trials_give_no_reports() {
    let tasks = small_suite();
    let state = run_training(TrainerConfig { max_trials: 0, ..small_config() }, &tasks, PlannerBackend::Oracle);
    assert!(state.reports.is_empty());
    assert_eq!(state.theta, state.reference);
}

#[test]
fn training_is_deterministic_and_aggregates_monotonically() {
    let tasks = small_suite();
    let a = run_training(small_config(), &tasks, PlannerBackend::Oracle);
    let b = run_training(small_config(), &tasks, PlannerBackend::Oracle);
    assert_eq!(a.reports.len(), 3);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let sizes: Vec<usize> = a.reports.iter().map(|r| r.dataset_size).collect();
    assert!(sizes.windows(2).all(|w| w[0] <= w[1]), "{sizes:?}");
    assert!(a.theta.is_finite());
    let other = run_training(TrainerConfig { master_seed: 9, ..small_config() }, &tasks, PlannerBackend::Oracle);
    assert_ne!(serde_json::to_string(&a.reports).unwrap(), serde_json::to_string(&other.reports).unwrap());
}

#[test]
fn resuming_from_saved_state_matches_an_uninterrupted_run() {
    let tasks = small_suite();
    let full = run_training(small_config(), &tasks, PlannerBackend::Oracle);
    let mut first = Trainer::new(small_config(), &tasks, PlannerBackend::Oracle);
    first.step_trial();
    let saved = serde_json::to_string(&first.state).unwrap();
    let restored: RunState = serde_json::from_str(&saved).unwrap();
    let resumed = Trainer::resume(restored, &tasks, PlannerBackend::Oracle).run();
    assert_eq!(resumed.theta, full.theta);
    assert_eq!(resumed.reports, full.reports);
}

#[test]
fn checkpoints_round_trip_and_reject_other_schemas() {
    let tasks = small_suite();
    let state = run_training(TrainerConfig { max_trials: 1, ..small_config() }, &tasks, PlannerBackend::Oracle);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/ckpt.json");
    PolicyCheckpoint::new(state.theta.clone()).save(&path).unwrap();
    assert_eq!(PolicyCheckpoint::load(&path).unwrap().params, state.theta);
    let mut tampered: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    tampered["schema_hash"] = "0000".into();
    let err = PolicyCheckpoint::from_json(&tampered.to_string()).unwrap_err();
    assert!(matches!(err, ExecutorError::SchemaMismatch { .. }));
}

#[test]
fn expert_relabelling_covers_every_step() {
    let tasks = small_suite();
    let cfg = small_config();
    let state = RunState::new(cfg.clone());
    let opts = EpisodeOptions { horizon: cfg.horizon, replanning: true, noise: NoiseSpec::none() };
    for (i, t) in tasks.iter().enumerate() {
        let behavior = Behavior::Sample { seed: i as u64, temperature: 1.0 };
        let traj = run_episode(t, &state.theta, &PlannerBackend::Oracle, &MemoryPool::default(), 0, behavior, &opts);
        let agg = aggregate(&traj, &PlannerBackend::Oracle, &MemoryPool::default());
        assert_eq!(agg.experts.len(), traj.len());
        assert_eq!(agg.pairs.len(), agg.experts.iter().filter(|e| e.is_some()).count());
        for p in &agg.pairs {
            assert!(p.expert < p.input.candidates.len() && p.executed < p.input.candidates.len());
        }
        assert_eq!(agg.memory.len(), 1);
        assert_eq!(agg.record.final_success, traj.success);
    }
}

#[test]
fn replanning_recovers_from_stuck_receptacles() {
    let tasks = gen_suite(SuiteKind::Stuck, [2; 6]).unwrap().instantiate().unwrap();
    let cfg = small_config();
    let theta = emac::trainer::pretrain_reference(&cfg);
    let run = |replanning| {
        let opts = EpisodeOptions { horizon: 30, replanning, noise: NoiseSpec::none() };
        tasks
            .iter()
            .filter(|t| run_episode(t, &theta, &PlannerBackend::Oracle, &MemoryPool::default(), 0, Behavior::Greedy, &opts).success)
            .count()
    };
    assert!(run(true) > run(false));
}

#[test]
fn malformed_completions_are_counted_as_planner_errors() {
    let tasks = small_suite();
    let cfg = small_config();
    let replies = vec!["no plan here".to_string(); 16];
    let client = WireClient::new(Box::new(ReplayTransport::new(replies)), WireConfig::default());
    let backend = PlannerBackend::Wire(std::sync::Arc::new(client));
    let opts = EpisodeOptions { horizon: cfg.horizon, replanning: false, noise: NoiseSpec::none() };
    let theta = emac::trainer::pretrain_reference(&cfg);
    let traj = run_episode(&tasks[0], &theta, &backend, &MemoryPool::default(), 0, Behavior::Greedy, &opts);
    assert!(traj.is_empty());
    assert!(!traj.success);
    assert_eq!(traj.errors.parse_failures, 4);
}
