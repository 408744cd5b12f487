use std::path::Path;

use serde::{Deserialize, Serialize};

use super::features::{BASE_SLOTS, FEATURE_DIM, MATCH_DIM, OVERLAY_SLOTS, TEMPLATES, WINDOW};
use super::policy::PolicyParams;
use super::ExecutorError;
use crate::world::{GRID_COLS, GRID_ROWS};

pub const CHECKPOINT_VERSION: u32 = 1;

/// Digest of everything that fixes the meaning of a parameter index.
pub fn schema_hash() -> String {
    let schema = format!(
        "grid={GRID_ROWS}x{GRID_COLS};window={WINDOW};base={BASE_SLOTS};overlay={OVERLAY_SLOTS};\
         features={FEATURE_DIM};templates={TEMPLATES};match={MATCH_DIM}"
    );
    crate::seed::sha256_hex(schema.as_bytes())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyCheckpoint {
    pub version: u32,
    pub schema_hash: String,
    pub params: PolicyParams,
}

impl PolicyCheckpoint {
    pub fn new(params: PolicyParams) -> Self {
        PolicyCheckpoint { version: CHECKPOINT_VERSION, schema_hash: schema_hash(), params }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("checkpoint serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ExecutorError> {
        let ckpt: PolicyCheckpoint = serde_json::from_str(text)?;
        let expected = schema_hash();
        if ckpt.schema_hash != expected {
            return Err(ExecutorError::SchemaMismatch { expected, found: ckpt.schema_hash });
        }
        if ckpt.params.weights.len() != FEATURE_DIM * TEMPLATES || ckpt.params.bias.len() != TEMPLATES {
            return Err(ExecutorError::Shape);
        }
        Ok(ckpt)
    }

    pub fn save(&self, path: &Path) -> Result<(), ExecutorError> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ExecutorError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
