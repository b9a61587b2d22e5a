//! JSON run reports.
//!
//! All indices are 0-based. `trace` and `repairs` are present only when the
//! run was asked for them; `medoid_labels` only when label files were given.

use serde::{Deserialize, Serialize};

use mwpam_core::pam::{Clustering, Repair, SwapStep};
use mwpam_core::report::EvalReport;

/// JSON Schema (draft 2020-12) every report validates against.
pub const RUN_REPORT_SCHEMA: &str = include_str!("../schema/run_report.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pam,
    Tbm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub block_labels: Vec<usize>,
    pub centroid_score: f64,
    pub medoid_score: f64,
    pub member_counts: Vec<usize>,
    /// Per mode, the label-file line of this block's medoid (null for modes
    /// without a label file).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub medoid_labels: Option<Vec<Option<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub pass: usize,
    pub mode: usize,
    pub swapped_out: usize,
    pub swapped_in: usize,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairRecord {
    pub pass: usize,
    pub mode: usize,
    pub index: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub method: Method,
    pub dims: Vec<usize>,
    pub c: Vec<usize>,
    pub medoids: Vec<Vec<usize>>,
    pub memberships: Vec<Vec<usize>>,
    pub objective: f64,
    pub rmse_m: f64,
    pub rmse_c: f64,
    pub blocks: Vec<BlockRecord>,
    pub cluster_order: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repairs: Option<Vec<RepairRecord>>,
    /// Per mode, the labels of the medoids in cluster order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub medoid_labels: Option<Vec<Option<Vec<String>>>>,
    pub seed: u64,
    pub wall_time_ms: u64,
    pub tool_version: String,
}

impl From<&SwapStep> for TraceRecord {
    fn from(s: &SwapStep) -> Self {
        Self {
            pass: s.pass,
            mode: s.mode,
            swapped_out: s.swapped_out,
            swapped_in: s.swapped_in,
            objective: s.objective,
        }
    }
}

impl From<&Repair> for RepairRecord {
    fn from(r: &Repair) -> Self {
        Self {
            pass: r.pass,
            mode: r.mode,
            index: r.index,
            from: r.from,
            to: r.to,
        }
    }
}

pub struct ReportInputs<'a> {
    pub method: Method,
    pub dims: &'a [usize],
    pub clustering: &'a Clustering,
    pub eval: &'a EvalReport,
    pub with_trace: bool,
    /// Optional label file contents per mode.
    pub labels: &'a [Option<Vec<String>>],
    pub seed: u64,
    pub wall_time_ms: u64,
}

impl RunReport {
    pub fn new(inp: ReportInputs<'_>) -> Self {
        let cl = inp.clustering;
        let has_labels = inp.labels.iter().any(Option::is_some);
        let label_of = |mode: usize, index: usize| -> Option<String> {
            inp.labels.get(mode)?.as_ref().map(|l| l[index].clone())
        };
        let blocks = inp
            .eval
            .blocks
            .iter()
            .map(|b| BlockRecord {
                block_labels: b.block_labels.clone(),
                centroid_score: b.centroid_score,
                medoid_score: b.medoid_score,
                member_counts: b.member_counts.clone(),
                medoid_labels: has_labels.then(|| {
                    b.block_labels
                        .iter()
                        .enumerate()
                        .map(|(m, &l)| label_of(m, cl.medoids[m][l]))
                        .collect()
                }),
            })
            .collect();
        let medoid_labels = has_labels.then(|| {
            cl.medoids
                .iter()
                .enumerate()
                .map(|(m, meds)| {
                    inp.labels
                        .get(m)?
                        .as_ref()
                        .map(|l| meds.iter().map(|&r| l[r].clone()).collect())
                })
                .collect()
        });
        let (trace, repairs) = match (inp.with_trace, inp.method) {
            (false, _) => (None, None),
            (true, Method::Pam) => (Some(cl.trace.iter().map(Into::into).collect()), None),
            (true, Method::Tbm) => (
                Some(cl.trace.iter().map(Into::into).collect()),
                Some(cl.repairs.iter().map(Into::into).collect()),
            ),
        };
        Self {
            method: inp.method,
            dims: inp.dims.to_vec(),
            c: cl.counts(),
            medoids: cl.medoids.clone(),
            memberships: cl.memberships.clone(),
            objective: cl.objective,
            rmse_m: inp.eval.rmse_m,
            rmse_c: inp.eval.rmse_c,
            blocks,
            cluster_order: inp.eval.cluster_order.clone(),
            trace,
            repairs,
            medoid_labels,
            seed: inp.seed,
            wall_time_ms: inp.wall_time_ms,
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
        }
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
