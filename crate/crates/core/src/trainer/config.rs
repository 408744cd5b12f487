use serde::{Deserialize, Serialize};

use crate::planner::WireConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossMode {
    Dpo,
    Ce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Oracle,
    Wire,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Visual,
    Textual,
    Both,
}

impl Channel {
    pub fn visual(self) -> bool {
        matches!(self, Channel::Visual | Channel::Both)
    }

    pub fn textual(self) -> bool {
        matches!(self, Channel::Textual | Channel::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub rate: f64,
    pub channel: Channel,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        NoiseSpec { rate: 0.0, channel: Channel::Visual, seed: 0 }
    }
}

/// Every knob of a training run. Missing keys in a config file take the
/// defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainerConfig {
    pub max_trials: usize,
    pub epochs_per_trial: usize,
    pub horizon: u32,
    pub beta: f64,
    pub memory_cap: usize,
    pub lr: f64,
    pub plan_lr: f64,
    pub plan_epochs: usize,
    pub batch_size: usize,
    pub master_seed: u64,
    pub loss_mode: LossMode,
    pub replanning: bool,
    pub temperature: f64,
    pub bc_tasks: usize,
    pub bc_epochs: usize,
    pub bc_lr: f64,
    /// Visual noise applied during training rollouts (zero by default).
    pub train_noise: f64,
    pub backend: BackendKind,
    pub wire: WireConfig,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            max_trials: 12,
            epochs_per_trial: 5,
            horizon: 30,
            beta: 0.1,
            memory_cap: 3,
            lr: 0.5,
            plan_lr: 0.5,
            plan_epochs: 40,
            batch_size: 16,
            master_seed: 0,
            loss_mode: LossMode::Dpo,
            replanning: true,
            temperature: 1.0,
            bc_tasks: 50,
            bc_epochs: 8,
            bc_lr: 0.5,
            train_noise: 0.0,
            backend: BackendKind::Oracle,
            wire: WireConfig::default(),
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.beta <= 0.0 || self.lr <= 0.0 || self.plan_lr <= 0.0 || self.temperature <= 0.0 {
            return Err("beta, learning rates and temperature must be positive".into());
        }
        if self.batch_size == 0 || self.memory_cap == 0 {
            return Err("batch size and memory cap must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.train_noise) {
            return Err("train_noise must lie in [0, 1]".into());
        }
        Ok(())
    }

    /// Short digest identifying the configuration in reports.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        crate::seed::sha256_hex(json.as_bytes())[..16].to_string()
    }
}
