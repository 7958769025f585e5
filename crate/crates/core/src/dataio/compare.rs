use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{fit_debye, fit_linear_law, DebyeOptions, FitReport, LinearLawOptions};
use super::fit::{CONDENSATE_LINEAR_ID, DEBYE_ID};
use super::series::HeatCapacitySeries;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelSpec {
    CondensateLinear(LinearLawOptions),
    Debye(DebyeOptions),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub model_id: String,
    pub model: ModelSpec,
}

impl Candidate {
    pub fn condensate_linear() -> Self {
        Self {
            model_id: CONDENSATE_LINEAR_ID.into(),
            model: ModelSpec::CondensateLinear(LinearLawOptions::default()),
        }
    }

    pub fn debye() -> Self {
        Self {
            model_id: DEBYE_ID.into(),
            model: ModelSpec::Debye(DebyeOptions::default()),
        }
    }

    /// The two standard candidates.
    pub fn defaults() -> Vec<Self> {
        vec![Self::condensate_linear(), Self::debye()]
    }

    pub fn fit(&self, series: &HeatCapacitySeries) -> Result<FitReport> {
        let mut report = match &self.model {
            ModelSpec::CondensateLinear(o) => fit_linear_law(series, o)?,
            ModelSpec::Debye(o) => fit_debye(series, o)?,
        };
        report.model_id.clone_from(&self.model_id);
        Ok(report)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateResult {
    pub model_id: String,
    pub report: Option<FitReport>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub provenance: String,
    pub results: Vec<CandidateResult>,
    /// Model ids of successful fits, best (lowest AICc) first.
    pub ranking: Vec<String>,
    /// Adjacent ranking entries whose AICc values coincide.
    pub ties: Vec<(String, String)>,
    /// At least one candidate failed to fit.
    pub partial: bool,
}

impl Comparison {
    pub fn best(&self) -> Option<&str> {
        self.ranking.first().map(String::as_str)
    }

    pub fn report(&self, model_id: &str) -> Option<&FitReport> {
        self.results
            .iter()
            .find(|r| r.model_id == model_id)
            .and_then(|r| r.report.as_ref())
    }
}

fn same_score(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Fits every candidate and ranks by AICc; equal scores fall back to model id order.
pub fn compare_models(series: &HeatCapacitySeries, candidates: &[Candidate]) -> Result<Comparison> {
    if candidates.is_empty() {
        return Err(Error::invalid("no candidate models given"));
    }
    let mut ids: Vec<&str> = candidates.iter().map(|c| c.model_id.as_str()).collect();
    ids.sort_unstable();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("candidate model ids must be unique"));
    }
    let results: Vec<CandidateResult> = candidates
        .iter()
        .map(|c| match c.fit(series) {
            Ok(report) => CandidateResult {
                model_id: c.model_id.clone(),
                report: Some(report),
                failure: None,
            },
            Err(e) => CandidateResult {
                model_id: c.model_id.clone(),
                report: None,
                failure: Some(e.to_string()),
            },
        })
        .collect();
    let mut scored: Vec<(&str, f64)> = results
        .iter()
        .filter_map(|r| {
            r.report
                .as_ref()
                .map(|rep| (r.model_id.as_str(), rep.aicc.unwrap_or(f64::INFINITY)))
        })
        .collect();
    scored.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(b.0)));
    // Runs of near-equal scores are ordered by id alone.
    let mut start = 0;
    while start < scored.len() {
        let mut end = start + 1;
        while end < scored.len() && same_score(scored[end - 1].1, scored[end].1) {
            end += 1;
        }
        scored[start..end].sort_by(|a, b| a.0.cmp(b.0));
        start = end;
    }
    let ties = scored
        .windows(2)
        .filter(|w| same_score(w[0].1, w[1].1))
        .map(|w| (w[0].0.to_string(), w[1].0.to_string()))
        .collect();
    Ok(Comparison {
        provenance: series.provenance.clone(),
        partial: results.iter().any(|r| r.failure.is_some()),
        ranking: scored.iter().map(|s| s.0.to_string()).collect(),
        ties,
        results,
    })
}

/// Compares each series independently, in parallel; output order follows input order.
pub fn compare_many(
    series: &[HeatCapacitySeries],
    candidates: &[Candidate],
) -> Vec<Result<Comparison>> {
    series
        .par_iter()
        .map(|s| compare_models(s, candidates))
        .collect()
}
