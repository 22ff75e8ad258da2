use super::{AccuracyCurve, DensityFit, FeasibilityRecord, OovTable};
use crate::model::EvalRecord;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleReport {
    pub id: String,
    pub outcomes: Vec<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oov_required: Option<bool>,
    pub resolved_at: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub grid: Vec<f64>,
    pub weights: Vec<f64>,
    pub mass_near_zero: f64,
    pub mass_near_one: f64,
}

/// Everything needed to reproduce and plot one evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub run_config: serde_json::Value,
    pub per_example: Vec<ExampleReport>,
    /// Accuracy at k = 1..=K.
    pub curve: Vec<f64>,
    /// Numerators of `curve`; the shared denominator is `total`.
    pub solved: Vec<usize>,
    pub total: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oov_table: Option<OovTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<DensityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss: Option<f64>,
}

impl RunReport {
    /// `feasibility`, when given, is matched to records by example id.
    pub fn new(
        run_config: serde_json::Value,
        records: &[EvalRecord],
        curve: &AccuracyCurve,
        feasibility: Option<&[FeasibilityRecord]>,
        fit: Option<&DensityFit>,
    ) -> Self {
        let oov_of = |id: &str| {
            feasibility.and_then(|f| f.iter().find(|r| r.example_id == id).map(|r| r.oov_required))
        };
        Self {
            run_config,
            per_example: records
                .iter()
                .map(|r| ExampleReport {
                    id: r.example_id.clone(),
                    outcomes: r.trial_outcomes.clone(),
                    oov_required: oov_of(&r.example_id),
                    resolved_at: r.resolved_at(),
                })
                .collect(),
            curve: curve.acc(),
            solved: curve.solved.clone(),
            total: curve.total,
            oov_table: feasibility.map(|f| f.iter().collect()),
            density: fit.map(|f| DensityReport {
                grid: f.model.grid.clone(),
                weights: f.model.weights.clone(),
                mass_near_zero: f.mass_near_zero,
                mass_near_one: f.mass_near_one,
            }),
            loss: fit.map(|f| f.loss),
        }
    }
}

/// `k,solved,total,accuracy` rows for plotting.
pub fn curve_csv(curve: &AccuracyCurve) -> String {
    let mut out = String::from("k,solved,total,accuracy\n");
    for k in 1..=curve.max_k() {
        writeln!(out, "{k},{},{},{:.6}", curve.solved[k - 1], curve.total, curve.at(k)).unwrap();
    }
    out
}
