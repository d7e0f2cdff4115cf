//! Classifiers, cross-validation, metrics and feature importance.
//!
//! TRUE (dissatisfied) is the positive class throughout.

mod cv;
mod dataset;
mod forest;
mod logistic;
mod metrics;
mod report;

use serde::{Deserialize, Serialize};

pub use cv::{cross_validate, cross_validate_with, fold_assignment, folds, CvAggregation, CvOptions};
pub use dataset::Dataset;
pub use forest::{
    entropy, feature_importance, ranked_importance, train_forest, DecisionTree, ForestConfig, ForestModel,
    MaxFeatures, Node,
};
pub use logistic::{loss_and_gradient, sigmoid, train_logistic, LogisticConfig, LogisticModel, Standardizer};
pub use metrics::{evaluate, Confusion, Metrics};
pub use report::{write_importance_csv, write_metrics_csv};

use crate::error::Result;

/// Bumped when the model dump layout changes.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Constant predictor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorityModel {
    pub label: bool,
}

/// Predicts the more common label; a tie predicts FALSE.
pub fn train_majority(y: &[bool]) -> MajorityModel {
    let pos = y.iter().filter(|&&v| v).count();
    MajorityModel {
        label: pos > y.len() - pos,
    }
}

/// What to train. Hyperparameters travel with the spec.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ClassifierSpec {
    Majority,
    Logistic(LogisticConfig),
    Forest(ForestConfig),
}

impl ClassifierSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ClassifierSpec::Majority => "majority",
            ClassifierSpec::Logistic(_) => "logistic",
            ClassifierSpec::Forest(_) => "forest",
        }
    }

    /// Default hyperparameters for a model name.
    pub fn from_name(name: &str) -> Option<ClassifierSpec> {
        match name {
            "majority" => Some(ClassifierSpec::Majority),
            "logistic" => Some(ClassifierSpec::Logistic(LogisticConfig::default())),
            "forest" => Some(ClassifierSpec::Forest(ForestConfig::default())),
            _ => None,
        }
    }

    pub fn with_seed(self, seed: u64) -> ClassifierSpec {
        match self {
            ClassifierSpec::Majority => self,
            ClassifierSpec::Logistic(c) => ClassifierSpec::Logistic(LogisticConfig { seed, ..c }),
            ClassifierSpec::Forest(c) => ClassifierSpec::Forest(ForestConfig { seed, ..c }),
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ClassifierSpec::Majority => 0,
            ClassifierSpec::Logistic(c) => c.seed,
            ClassifierSpec::Forest(c) => c.seed,
        }
    }

    pub fn fit(&self, d: &Dataset) -> Result<TrainedModel> {
        Ok(match self {
            ClassifierSpec::Majority => TrainedModel::Majority(train_majority(&d.y)),
            ClassifierSpec::Logistic(c) => TrainedModel::Logistic(train_logistic(d, c)?),
            ClassifierSpec::Forest(c) => TrainedModel::Forest(train_forest(d, c)),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum TrainedModel {
    Majority(MajorityModel),
    Logistic(LogisticModel),
    Forest(ForestModel),
}

impl TrainedModel {
    pub fn predict_row(&self, row: &[f64]) -> bool {
        match self {
            TrainedModel::Majority(m) => m.label,
            TrainedModel::Logistic(m) => m.predict_row(row),
            TrainedModel::Forest(m) => m.predict_row(row),
        }
    }

    pub fn predict(&self, d: &Dataset) -> Vec<bool> {
        d.rows().map(|r| self.predict_row(r)).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct ModelDump {
    format_version: u32,
    feature_names: Vec<String>,
    #[serde(flatten)]
    model: TrainedModel,
}

/// Pretty JSON with a format version and the feature names the model expects.
pub fn model_to_json(m: &TrainedModel, feature_names: &[String]) -> Result<String> {
    let dump = ModelDump {
        format_version: MODEL_FORMAT_VERSION,
        feature_names: feature_names.to_vec(),
        model: m.clone(),
    };
    Ok(serde_json::to_string_pretty(&dump)?)
}

pub fn model_from_json(text: &str) -> Result<(TrainedModel, Vec<String>)> {
    let dump: ModelDump = serde_json::from_str(text)?;
    if dump.format_version != MODEL_FORMAT_VERSION {
        return Err(crate::error::Error::config(format!(
            "model format version {} is not supported",
            dump.format_version
        )));
    }
    Ok((dump.model, dump.feature_names))
}
