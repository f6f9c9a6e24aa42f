//! Labels for augmented examples: keep the parent's label, or ask a teacher
//! trained on the original data for a hard or soft label.

use std::sync::Arc;

use crate::corpus::{argmax_of, LabelValue, TokenId, Vocabulary};
use crate::error::{Error, Result};
use crate::models::Classifier;

/// A fitted classifier plus an optional translation from the data's token
/// ids to the teacher's own vocabulary.
#[derive(Clone)]
pub struct Teacher {
    model: Arc<dyn Classifier>,
    remap: Option<Vec<TokenId>>,
}

impl std::fmt::Debug for Teacher {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Teacher")
            .field("classes", &self.model.classes())
            .field("remapped", &self.remap.is_some())
            .finish()
    }
}

impl Teacher {
    /// Teacher sharing the data's vocabulary.
    pub fn new(model: Arc<dyn Classifier>) -> Self {
        Teacher { model, remap: None }
    }

    /// Teacher with its own vocabulary; data tokens are mapped by surface.
    pub fn with_vocabularies(model: Arc<dyn Classifier>, teacher_vocab: &Vocabulary, data_vocab: &Vocabulary) -> Self {
        let remap = data_vocab.surfaces().iter().map(|s| teacher_vocab.encode(s)).collect();
        Teacher {
            model,
            remap: Some(remap),
        }
    }

    pub fn classes(&self) -> &[String] {
        self.model.classes()
    }

    pub fn predict_proba(&self, tokens: &[TokenId]) -> Vec<f64> {
        match &self.remap {
            None => self.model.predict_proba(tokens),
            Some(map) => {
                let mapped: Vec<TokenId> = tokens
                    .iter()
                    .map(|&t| map.get(t as usize).copied().unwrap_or(Vocabulary::UNK_ID))
                    .collect();
                self.model.predict_proba(&mapped)
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub enum LabelPolicy {
    #[default]
    Preserve,
    Hard(Teacher),
    Soft(Teacher),
}

impl LabelPolicy {
    pub fn teacher(&self) -> Option<&Teacher> {
        match self {
            LabelPolicy::Preserve => None,
            LabelPolicy::Hard(t) | LabelPolicy::Soft(t) => Some(t),
        }
    }

    /// The teacher must predict exactly the dataset's classes, in order.
    pub fn check_classes(&self, classes: &[String]) -> Result<()> {
        match self.teacher() {
            Some(t) if t.classes() != classes => Err(Error::ClassMismatch(format!(
                "teacher classes {:?} differ from dataset classes {classes:?}",
                t.classes()
            ))),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LabelPolicy::Preserve => "preserve",
            LabelPolicy::Hard(_) => "hard",
            LabelPolicy::Soft(_) => "soft",
        }
    }
}

pub fn assign_label(tokens: &[TokenId], original: &LabelValue, policy: &LabelPolicy) -> Result<LabelValue> {
    if tokens.is_empty() {
        return Err(Error::Invalid("cannot label an empty example".into()));
    }
    match policy {
        LabelPolicy::Preserve => Ok(original.clone()),
        LabelPolicy::Hard(teacher) => Ok(LabelValue::Hard(argmax_of(&teacher.predict_proba(tokens)))),
        LabelPolicy::Soft(teacher) => Ok(LabelValue::Soft(teacher.predict_proba(tokens))),
    }
}
