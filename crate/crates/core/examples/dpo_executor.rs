//! Behaviour-clones a reference executor, collects one round of sampled
//! rollouts, relabels them with the expert and takes DPO steps. Prints how
//! the preference loss and the probability of the expert move change.

use emac::executor::{dpo_loss, log_probs};
use emac::harness::{gen_suite, SuiteKind};
use emac::planner::{MemoryPool, PlannerBackend};
use emac::trainer::{
    aggregate, pretrain_reference, run_episode, train_policy, Behavior, EpisodeOptions, NoiseSpec, TrainerConfig,
};

fn main() -> emac::Result<()> {
    let tasks = gen_suite(SuiteKind::Seen, [4; 6])?.instantiate()?;
    let cfg = TrainerConfig { epochs_per_trial: 20, ..TrainerConfig::default() };
    let reference = pretrain_reference(&cfg);
    let opts = EpisodeOptions { horizon: cfg.horizon, replanning: true, noise: NoiseSpec::none() };
    let mut pairs = Vec::new();
    for (i, t) in tasks.iter().enumerate() {
        let behavior = Behavior::Sample { seed: i as u64, temperature: 1.0 };
        let traj = run_episode(t, &reference, &PlannerBackend::Oracle, &MemoryPool::default(), 0, behavior, &opts);
        pairs.extend(aggregate(&traj, &PlannerBackend::Oracle, &MemoryPool::default()).pairs);
    }
    let disagreements: Vec<_> = pairs.iter().filter(|p| !p.degenerate()).cloned().collect();
    println!("{} decisions, {} where the executor left the expert", pairs.len(), disagreements.len());

    let (theta, losses, _) = train_policy(&pairs, &reference, &reference, &cfg, 0);
    println!("epoch losses: {}", losses.iter().map(|l| format!("{l:.4}")).collect::<Vec<_>>().join(" "));
    for p in disagreements.iter().take(5) {
        let before = log_probs(&reference, &p.input)[p.expert].exp();
        let after = log_probs(&theta, &p.input)[p.expert].exp();
        println!(
            "expert {:<36} executed {:<36} p(expert) {before:.3} -> {after:.3}, loss {:.4}",
            p.expert_action().surface_form,
            p.executed_action().surface_form,
            dpo_loss(&theta, &reference, p, cfg.beta)
        );
    }
    Ok(())
}
