//! Prompt templates and their content hash.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::TaskKind;

/// Placeholder replaced by the comma-separated choice list.
pub const CHOICES: &str = "{choices}";
/// Placeholder replaced by the reference point's text (correspondence only).
pub const REFERENCE: &str = "{reference}";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PromptTemplate {
    pub task_kind: TaskKind,
    pub system: String,
    pub user: String,
    /// Human-readable description of the reply format the parser expects.
    pub answer_grammar: String,
}

/// A fully substituted prompt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedPrompt {
    pub system: String,
    pub user: String,
    pub hash: String,
}

const GRAMMAR: &str = "Finish your reply with: The answer is (<choice>).";

impl PromptTemplate {
    pub fn default_for(kind: TaskKind) -> Self {
        let system = "You answer multiple-choice questions about points marked on images. \
                      Reply with exactly one of the listed choices."
            .to_string();
        let user = match kind {
            TaskKind::RelativeDepth => format!(
                "Points are marked on the image. Which marked point is closer to the camera? Choices: {CHOICES}. {GRAMMAR}"
            ),
            TaskKind::SemanticCorrespondence => format!(
                "The first image marks a reference point labelled {REFERENCE}. The second image marks candidate points. \
                 Which candidate in the second image shows the same semantic part as the reference point? Choices: {CHOICES}. {GRAMMAR}"
            ),
        };
        PromptTemplate {
            task_kind: kind,
            system,
            user,
            answer_grammar: GRAMMAR.into(),
        }
    }

    /// Substitutes the displayed choice labels and optional reference text.
    pub fn render(&self, labels: &[String], reference: Option<&str>) -> RenderedPrompt {
        let choices = labels.iter().map(|l| format!("({l})")).collect::<Vec<_>>().join(", ");
        let user = self
            .user
            .replace(REFERENCE, reference.unwrap_or(""))
            .replace(CHOICES, &choices);
        let hash = prompt_hash(&self.system, &user);
        RenderedPrompt {
            system: self.system.clone(),
            user,
            hash,
        }
    }
}

/// First 16 hex digits of SHA-256 over the system and user text.
pub fn prompt_hash(system: &str, user: &str) -> String {
    let mut h = Sha256::new();
    h.update(system.as_bytes());
    h.update([0u8]);
    h.update(user.as_bytes());
    hex::encode(h.finalize())[..16].to_string()
}
