//! The executor policy: binary raster features, a linear-softmax scorer
//! over candidate actions, and its preference and imitation objectives.

mod checkpoint;
mod features;
mod objective;
mod policy;
mod pretrain;

use thiserror::Error;

pub use checkpoint::{schema_hash, PolicyCheckpoint, CHECKPOINT_VERSION};
pub use features::{
    candidate_set, describe, featurize, match_features, Candidate, CandidateFeatures, ExecContext, Features,
    PolicyInput, FEATURE_DIM, KIND_SLOTS, MATCH_DIM, RASTER_DIM, TEMPLATES, WINDOW,
};
pub use objective::{
    accumulate_ce_grad, accumulate_dpo_grad, ce_grad, ce_loss, dpo_grad, dpo_loss, dpo_margin, sigmoid, softplus,
    PreferencePair, DEFAULT_BETA,
};
pub use policy::{
    add_log_prob_grad, add_logit_grad, log_probs, log_softmax, logits, policy_dist, sample_index, ActionDistribution,
    PolicyParams,
};
pub use pretrain::{bc_pretrain, demo_accuracy, demo_loss, Demo};

#[derive(Debug, Error)]
pub enum ExecutorError {
    #[error("checkpoint schema {found} does not match the current schema {expected}")]
    SchemaMismatch { expected: String, found: String },
    #[error("checkpoint parameter shapes do not match the schema")]
    Shape,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
