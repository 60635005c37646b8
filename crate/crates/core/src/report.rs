//! Serializable summaries of fits, suitable for diffable JSON output.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::dist::BWeibull;
use crate::entropy::{self, EntropyValue};
use crate::error::Result;
use crate::estimate::{FitResult, QSelection};
use crate::gof::{gof, Convention, GofResult};
use crate::modality::{classify, ModalityReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub label: String,
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std_dev: f64,
}

impl DatasetSummary {
    pub fn of(data: &Dataset) -> Self {
        let x = data.values();
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        DatasetSummary {
            label: data.label().to_string(),
            n: x.len(),
            min: x.iter().copied().fold(f64::INFINITY, f64::min),
            max: x.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean,
            std_dev: var.sqrt(),
        }
    }
}

/// Entropies at a fitted θ. Missing entries carry a reason in `notes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropySummary {
    pub shannon: Option<EntropyValue>,
    pub quadratic: Option<EntropyValue>,
    pub tsallis_order: f64,
    pub tsallis: Option<EntropyValue>,
    pub notes: Vec<String>,
}

impl EntropySummary {
    /// Tsallis entropy is taken at `tsallis_order`, usually the fit's q (2 for plain MLE).
    pub fn of(d: &BWeibull, tsallis_order: f64) -> Self {
        let mut notes = Vec::new();
        let mut keep = |name: &str, r: Result<EntropyValue>| match r {
            Ok(v) if v.value.is_finite() => Some(v),
            Ok(_) => {
                notes.push(format!("{name}: not finite"));
                None
            }
            Err(e) => {
                notes.push(format!("{name}: {e}"));
                None
            }
        };
        let shannon = keep("shannon", entropy::shannon(d));
        let quadratic = keep("quadratic", entropy::quadratic(d));
        let tsallis = keep("tsallis", entropy::tsallis(d, tsallis_order));
        EntropySummary {
            shannon,
            quadratic,
            tsallis_order,
            tsallis,
            notes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub model: String,
    pub fit: FitResult,
    /// PaperCompat first, then Standard.
    pub gof: Vec<GofResult>,
    pub modality: ModalityReport,
    pub entropies: EntropySummary,
}

impl ModelReport {
    pub fn new(data: &Dataset, fit: FitResult) -> Result<Self> {
        let d = fit.distribution();
        let cdf = |x: f64| d.cdf(x).unwrap_or(if x > 0.0 { 1.0 } else { 0.0 });
        let gof = [Convention::PaperCompat, Convention::Standard]
            .into_iter()
            .map(|c| gof(data.values(), cdf, c))
            .collect::<Result<Vec<_>>>()?;
        let model = if fit.q == 1.0 {
            "BWeibull-MLE".to_string()
        } else {
            format!("BWeibull-MLqE(q={})", fit.q)
        };
        let order = if fit.q == 1.0 { 2.0 } else { fit.q };
        Ok(ModelReport {
            model,
            modality: classify(&fit.theta_hat),
            entropies: EntropySummary::of(&d, order),
            gof,
            fit,
        })
    }

    pub fn gof_for(&self, convention: Convention) -> Option<&GofResult> {
        self.gof.iter().find(|g| g.convention == convention)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub seed: u64,
    /// Convention used for q selection and tabular output.
    pub convention: Convention,
    /// The q grid scanned, empty for a single fit.
    pub q_grid: Vec<f64>,
    pub dataset: DatasetSummary,
    pub models: Vec<ModelReport>,
    /// Index into `models` of the reported fit.
    pub selected: usize,
    /// Left out unless asked for, so reports stay byte-reproducible.
    pub timing: Option<Timing>,
}

impl Report {
    pub fn single(data: &Dataset, fit: FitResult, seed: u64, convention: Convention) -> Result<Self> {
        Ok(Report {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            convention,
            q_grid: Vec::new(),
            dataset: DatasetSummary::of(data),
            models: vec![ModelReport::new(data, fit)?],
            selected: 0,
            timing: None,
        })
    }

    pub fn scan(data: &Dataset, selection: QSelection, seed: u64, convention: Convention) -> Result<Self> {
        let q_grid = selection.candidates.iter().map(|c| c.q).collect();
        let models = selection
            .candidates
            .into_iter()
            .map(|c| ModelReport::new(data, c.fit))
            .collect::<Result<Vec<_>>>()?;
        Ok(Report {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            convention,
            q_grid,
            dataset: DatasetSummary::of(data),
            models,
            selected: selection.selected,
            timing: None,
        })
    }

    pub fn selected_model(&self) -> &ModelReport {
        &self.models[self.selected]
    }
}
