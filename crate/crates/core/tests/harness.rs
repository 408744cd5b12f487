use std::collections::BTreeSet;

use emac::harness::{default_suite, load_config, success_table, EvalReport, SuiteKind, Table};
use emac::trainer::{LossMode, TrainerConfig};
use emac::world::TaskType;

#[test]
fn default_suites_have_the_documented_sizes_and_disjoint_seeds() {
    let seen = default_suite(SuiteKind::Seen).unwrap();
    let ood = default_suite(SuiteKind::Ood).unwrap();
    let stuck = default_suite(SuiteKind::Stuck).unwrap();
    assert_eq!((seen.len(), ood.len(), stuck.len()), (120, 134, 60));
    for t in TaskType::ALL {
        assert_eq!(seen.entries.iter().filter(|e| e.task_type == t).count(), 20);
        assert_eq!(stuck.entries.iter().filter(|e| e.task_type == t).count(), 10);
    }
    let keys = |s: &emac::harness::SuiteSpec| s.entries.iter().map(|e| (e.task_type, e.seed)).collect::<BTreeSet<_>>();
    assert!(keys(&seen).is_disjoint(&keys(&ood)));
    assert!(keys(&seen).is_disjoint(&keys(&stuck)));
    assert!(ood.entries.iter().all(|e| e.ood) && !seen.entries.iter().any(|e| e.ood));
    let ids: BTreeSet<&String> = seen.entries.iter().chain(&ood.entries).chain(&stuck.entries).map(|e| &e.id).collect();
    assert_eq!(ids.len(), 314);
}

#[test]
fn config_files_fill_in_defaults_and_reject_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    std::fs::write(&good, "max_trials = 4\nloss_mode = \"ce\"\n[wire]\ntimeout_secs = 5\n").unwrap();
    let cfg = load_config(&good).unwrap();
    assert_eq!(cfg.max_trials, 4);
    assert_eq!(cfg.loss_mode, LossMode::Ce);
    assert_eq!(cfg.wire.timeout_secs, 5);
    assert_eq!(cfg.beta, TrainerConfig::default().beta);
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "max_trails = 4\n").unwrap();
    assert!(load_config(&bad).is_err());
    let negative = dir.path().join("negative.toml");
    std::fs::write(&negative, "beta = -1.0\n").unwrap();
    assert!(load_config(&negative).is_err());
}

#[test]
fn tables_render_as_csv_and_text() {
    let mut t = Table::new("demo", &["a", "b"]);
    t.push(vec!["1".into(), "x,y".into()]);
    assert_eq!(t.to_csv(), "a,b\n1,\"x,y\"\n");
    assert!(t.to_text().starts_with("demo\na"));
    let empty = EvalReport::from_trajectories("none", &[]);
    let table = success_table("s", &[empty]);
    assert_eq!(table.headers.len(), 10);
    assert_eq!(table.rows[0][1], "-");
}
