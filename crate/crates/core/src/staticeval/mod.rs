//! Static question answering: item format, answer normalization, scoring
//! and report assembly. Scene-derived question generation lives in
//! [`generate`].

mod generate;
mod normalize;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::metrics::{
    judge_score, score_accuracy, score_completeness, score_reldis, Judge, JudgeRequest, Rubric,
};
use crate::world::{Camera, ClockHour, Region, SceneSpec};

pub use generate::{
    fire_fixture, generate_for_scene, generate_qa, random_viewpoint, GenConfig, Generated, SkippedType,
};
pub use normalize::{normalize_answer, render_answer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QType {
    #[serde(rename = "Semantic_InfoDis")]
    InfoDis,
    #[serde(rename = "Semantic_InfoDes")]
    InfoDes,
    #[serde(rename = "Semantic_InfoDet")]
    InfoDet,
    #[serde(rename = "Spatial_PosRelDis")]
    PosRelDis,
    #[serde(rename = "Spatial_RelDisRelDis")]
    RelDisRelDis,
    Motion,
    Tool,
    Plan,
}

impl QType {
    pub const ALL: [QType; 8] = [
        QType::InfoDis,
        QType::InfoDes,
        QType::InfoDet,
        QType::PosRelDis,
        QType::RelDisRelDis,
        QType::Motion,
        QType::Tool,
        QType::Plan,
    ];

    pub fn metric(self) -> Metric {
        match self {
            QType::InfoDis | QType::RelDisRelDis | QType::Tool => Metric::Accuracy,
            QType::InfoDet => Metric::Completeness,
            QType::PosRelDis => Metric::Reldis,
            QType::InfoDes | QType::Motion | QType::Plan => Metric::Judge,
        }
    }

    /// Short code used in item ids.
    pub fn code(self) -> &'static str {
        match self {
            QType::InfoDis => "infodis",
            QType::InfoDes => "infodes",
            QType::InfoDet => "infodet",
            QType::PosRelDis => "posreldis",
            QType::RelDisRelDis => "reldisreldis",
            QType::Motion => "motion",
            QType::Tool => "tool",
            QType::Plan => "plan",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Accuracy,
    Completeness,
    Reldis,
    Judge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ImageRef {
    /// PPM raster relative to the dataset file.
    Raster { path: String },
    /// Re-renderable scene: the spec (with the UAV pose pinned) and camera.
    Scene { scene: SceneSpec, camera: Camera },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CanonicalAnswer {
    Class { label: String },
    Regions { ids: BTreeSet<u32> },
    Clock { hour: ClockHour },
    YesNo { yes: bool },
    Text {
        text: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rubric: Option<Rubric>,
    },
    /// A reply that could not be read in the form the question asks for.
    Unparseable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QAItem {
    pub id: String,
    pub qtype: QType,
    pub image_ref: ImageRef,
    pub regions: Vec<Region>,
    pub question: String,
    pub reference: CanonicalAnswer,
    pub metric: Metric,
}

impl QAItem {
    pub fn validate(&self) -> Result<(), String> {
        if self.metric != self.qtype.metric() {
            return Err(format!("{}: metric does not match question type", self.id));
        }
        let known: BTreeSet<u32> = self.regions.iter().map(|r| r.index as u32).collect();
        let ok = match (&self.reference, self.qtype.metric()) {
            (CanonicalAnswer::Clock { hour }, Metric::Reldis) => (1..=12).contains(hour),
            (CanonicalAnswer::Regions { ids }, Metric::Completeness | Metric::Accuracy) => {
                !ids.is_empty() && ids.is_subset(&known)
            }
            (CanonicalAnswer::Class { .. } | CanonicalAnswer::YesNo { .. }, Metric::Accuracy) => {
                true
            }
            (CanonicalAnswer::Text { text, .. }, Metric::Judge) => !text.trim().is_empty(),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(format!("{}: reference does not fit the question type", self.id))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("dataset line {line}: {message}")]
pub struct DatasetError {
    pub line: usize,
    pub message: String,
}

/// JSON Lines, one item per line, newline-terminated.
pub fn write_dataset(items: &[QAItem]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("items serialize"));
        out.push('\n');
    }
    out
}

pub fn read_dataset(text: &str) -> Result<Vec<QAItem>, DatasetError> {
    let mut items = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| DatasetError {
            line: i + 1,
            message,
        };
        let item: QAItem = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        item.validate().map_err(err)?;
        items.push(item);
    }
    Ok(items)
}

/// Answers static questions; errors are transport failures.
pub trait StaticAgent {
    fn answer(&mut self, item: &QAItem) -> Result<String, String>;
}

/// Replies with the rendered reference answer.
#[derive(Debug, Clone, Copy, Default)]
pub struct EchoAgent;

impl StaticAgent for EchoAgent {
    fn answer(&mut self, item: &QAItem) -> Result<String, String> {
        Ok(render_answer(&item.reference))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemResult {
    pub id: String,
    pub qtype: QType,
    pub metric: Metric,
    /// Native scale: 0..=1 for accuracy, completeness and reldis, 0..=10 for judge.
    pub score: f64,
    pub format_error: bool,
    /// Agent or judge failure; the item scores 0 and is not a format error.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl ItemResult {
    pub fn failed(item: &QAItem, why: String) -> Self {
        ItemResult {
            id: item.id.clone(),
            qtype: item.qtype,
            metric: item.metric,
            score: 0.0,
            format_error: false,
            failure: Some(why),
        }
    }
}

pub fn score_item(
    item: &QAItem,
    answer: &str,
    judge: &mut dyn Judge,
    judge_attempts: u32,
) -> ItemResult {
    let parsed = normalize_answer(answer, item.qtype);
    let mut result = ItemResult {
        id: item.id.clone(),
        qtype: item.qtype,
        metric: item.metric,
        score: 0.0,
        format_error: parsed == CanonicalAnswer::Unparseable,
        failure: None,
    };
    if result.format_error {
        return result;
    }
    result.score = match (&item.reference, &parsed, item.metric) {
        (CanonicalAnswer::Regions { ids: r }, CanonicalAnswer::Regions { ids: p }, Metric::Completeness) => {
            score_completeness(r, p).unwrap_or(0.0)
        }
        (CanonicalAnswer::Clock { hour: r }, CanonicalAnswer::Clock { hour: p }, Metric::Reldis) => {
            score_reldis(*r, *p).unwrap_or(0.0)
        }
        (CanonicalAnswer::Text { text, rubric }, _, Metric::Judge) => {
            let req = JudgeRequest {
                prompt: &item.question,
                image: None,
                reference: text,
                candidate: answer,
                rubric: rubric.as_ref(),
            };
            match judge_score(judge, &req, judge_attempts) {
                Ok(s) => s.score,
                Err(e) => return ItemResult::failed(item, e.to_string()),
            }
        }
        (r, p, Metric::Accuracy)
            if r == p => {
                1.0
            }
        _ => 0.0,
    };
    result
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeReport {
    pub metric: Metric,
    pub items: usize,
    pub failed: usize,
    /// Percent for accuracy, completeness and reldis; mean judge score (0..=10) otherwise.
    pub score: f64,
    /// Over answered (non-failed) items; absent when nothing was answered.
    pub format_error_rate: Option<f64>,
    pub parse_success_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticReport {
    pub per_type: BTreeMap<QType, TypeReport>,
    pub failures: usize,
    /// Sorted by item id.
    pub items: Vec<ItemResult>,
}

/// Aggregates item results; independent of input order.
pub fn assemble_report(mut results: Vec<ItemResult>) -> StaticReport {
    results.sort_by(|a, b| a.id.cmp(&b.id));
    let mut per_type = BTreeMap::new();
    for q in QType::ALL {
        let rs: Vec<&ItemResult> = results.iter().filter(|r| r.qtype == q).collect();
        if rs.is_empty() {
            continue;
        }
        let metric = q.metric();
        let scores: Vec<f64> = rs.iter().map(|r| r.score).collect();
        let mean = crate::metrics::mean(&scores).unwrap_or(0.0);
        let score = match metric {
            Metric::Accuracy => {
                let hits: Vec<bool> = rs.iter().map(|r| r.score == 1.0).collect();
                score_accuracy(&hits).unwrap_or(0.0)
            }
            Metric::Completeness | Metric::Reldis => 100.0 * mean,
            Metric::Judge => mean,
        };
        let failed = rs.iter().filter(|r| r.failure.is_some()).count();
        let answered = rs.len() - failed;
        let errors = rs.iter().filter(|r| r.format_error).count();
        let fer = (answered > 0).then(|| errors as f64 / answered as f64);
        per_type.insert(
            q,
            TypeReport {
                metric,
                items: rs.len(),
                failed,
                score,
                format_error_rate: fer,
                parse_success_rate: fer.map(|f| 1.0 - f),
            },
        );
    }
    StaticReport {
        per_type,
        failures: results.iter().filter(|r| r.failure.is_some()).count(),
        items: results,
    }
}

/// Sequential runner; the CLI adds bounded parallelism on top of [`score_item`].
pub fn run_static(
    items: &[QAItem],
    agent: &mut dyn StaticAgent,
    judge: &mut dyn Judge,
    judge_attempts: u32,
) -> StaticReport {
    let results = items
        .iter()
        .map(|item| match agent.answer(item) {
            Ok(text) => score_item(item, &text, judge, judge_attempts),
            Err(e) => ItemResult::failed(item, e),
        })
        .collect();
    assemble_report(results)
}
