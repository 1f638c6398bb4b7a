//! Output formatting: 12-significant-digit table mode and JSON mode with
//! shortest-round-trip floats. Both are byte-deterministic functions of the
//! values printed.

use serde::{Deserialize, Serialize};

use preqnet::criteria::{CriterionKind, CriterionReport};
use preqnet::identifiability::RankReport;
use preqnet::softmax::SoftmaxModel;

pub const TABLE_SIG_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
}

/// Significant-digit formatting in the spirit of `%g`: plain decimal for
/// moderate exponents, scientific otherwise.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exponent.parse().expect("numeric exponent");
    if exp >= -4 && exp < sig as i32 {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        format!("{:.*}", decimals, x)
    } else {
        format!("{mantissa}e{exp}")
    }
}

pub fn sig(x: f64) -> String {
    fmt_sig(x, TABLE_SIG_DIGITS)
}

fn criterion_name(kind: CriterionKind) -> &'static str {
    match kind {
        CriterionKind::Cnm => "cnm",
        CriterionKind::CscExact => "csc",
        CriterionKind::CscMonteCarlo => "csc-mc",
        CriterionKind::LogMarginalLikelihood => "lml",
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ScoreReport {
    pub criterion: String,
    pub value: f64,
    pub per_case_terms: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_count: Option<u64>,
}

impl ScoreReport {
    pub fn from_criterion(report: &CriterionReport) -> Self {
        Self {
            criterion: criterion_name(report.kind).to_string(),
            value: report.value,
            per_case_terms: report.per_case_terms.clone(),
            std_error: report.std_error,
            sample_count: report.sample_count,
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => to_json(self),
            OutputFormat::Table => {
                let mut out = String::new();
                out.push_str(&format!("criterion {}\n", self.criterion));
                out.push_str(&format!("value {}\n", sig(self.value)));
                for (i, term) in self.per_case_terms.iter().enumerate() {
                    out.push_str(&format!("case {} {}\n", i + 1, sig(*term)));
                }
                if let Some(se) = self.std_error {
                    out.push_str(&format!("std-error {}\n", sig(se)));
                }
                if let Some(samples) = self.sample_count {
                    out.push_str(&format!("samples {samples}\n"));
                }
                out
            }
        }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SoftmaxFile {
    pub schema: u32,
    pub class_cardinality: usize,
    pub variables: Vec<SoftmaxVariable>,
    pub classes: Vec<SoftmaxClass>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SoftmaxVariable {
    pub name: String,
    pub cardinality: usize,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SoftmaxClass {
    pub class_state: usize,
    pub terms: Vec<SoftmaxTerm>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SoftmaxTerm {
    pub literals: Vec<SoftmaxLiteral>,
    pub coefficient: f64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SoftmaxLiteral {
    pub variable: String,
    pub state: usize,
}

impl SoftmaxFile {
    pub fn from_model(model: &SoftmaxModel) -> Self {
        let variables: Vec<SoftmaxVariable> = model
            .variable_catalog()
            .iter()
            .map(|(name, cardinality)| SoftmaxVariable {
                name: name.clone(),
                cardinality: *cardinality,
            })
            .collect();
        let classes = model
            .per_class_terms()
            .iter()
            .enumerate()
            .map(|(idx, terms)| SoftmaxClass {
                class_state: idx + 1,
                terms: terms
                    .iter()
                    .map(|m| SoftmaxTerm {
                        literals: m
                            .literals
                            .iter()
                            .map(|&(v, s)| SoftmaxLiteral {
                                variable: variables[v].name.clone(),
                                state: s,
                            })
                            .collect(),
                        coefficient: m.coefficient,
                    })
                    .collect(),
            })
            .collect();
        Self {
            schema: crate::model_file::SCHEMA_VERSION,
            class_cardinality: model.class_cardinality(),
            variables,
            classes,
        }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct IdentifiabilityReport {
    pub points_tested: usize,
    pub full_rank_count: usize,
    pub expected_full_rank: usize,
    pub per_point_ranks: Vec<usize>,
    pub rank_tolerance: f64,
    pub step: f64,
}

impl IdentifiabilityReport {
    pub fn from_rank_report(report: &RankReport) -> Self {
        Self {
            points_tested: report.points_tested,
            full_rank_count: report.full_rank_count,
            expected_full_rank: report.expected_full_rank,
            per_point_ranks: report.per_point_ranks.clone(),
            rank_tolerance: report.tolerance_used,
            step: report.step_used,
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => to_json(self),
            OutputFormat::Table => {
                let ranks: Vec<String> =
                    self.per_point_ranks.iter().map(|r| r.to_string()).collect();
                format!(
                    "points-tested {}\nexpected-full-rank {}\nfull-rank-count {}\nrank-tolerance {}\nstep {}\nranks {}\n",
                    self.points_tested,
                    self.expected_full_rank,
                    self.full_rank_count,
                    sig(self.rank_tolerance),
                    sig(self.step),
                    ranks.join(" ")
                )
            }
        }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct AverageReport {
    pub alpha: f64,
    pub structures: Vec<StructureRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ranking: Option<RankingReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predictive: Option<PredictiveReport>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct StructureRow {
    pub index: usize,
    pub edges: Vec<(String, String)>,
    pub log_marginal_likelihood: f64,
    pub log_posterior: f64,
    pub posterior: f64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct RankingReport {
    pub criterion: String,
    pub top: Vec<RankedRow>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct RankedRow {
    pub index: usize,
    pub edges: Vec<(String, String)>,
    pub score: f64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct PredictiveReport {
    pub class_variable: String,
    pub distribution: Vec<f64>,
}

pub fn edges_label(edges: &[(String, String)]) -> String {
    if edges.is_empty() {
        "(none)".to_string()
    } else {
        edges
            .iter()
            .map(|(a, b)| format!("{a}->{b}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl AverageReport {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => to_json(self),
            OutputFormat::Table => {
                let mut out = String::new();
                out.push_str(&format!("alpha {}\n", sig(self.alpha)));
                out.push_str(&format!("structures {}\n", self.structures.len()));
                for row in &self.structures {
                    out.push_str(&format!(
                        "structure {} lml {} posterior {} edges {}\n",
                        row.index,
                        sig(row.log_marginal_likelihood),
                        sig(row.posterior),
                        edges_label(&row.edges),
                    ));
                }
                if let Some(ranking) = &self.ranking {
                    out.push_str(&format!("ranking {}\n", ranking.criterion));
                    for (place, row) in ranking.top.iter().enumerate() {
                        out.push_str(&format!(
                            "rank {} structure {} score {} edges {}\n",
                            place + 1,
                            row.index,
                            sig(row.score),
                            edges_label(&row.edges),
                        ));
                    }
                }
                if let Some(predictive) = &self.predictive {
                    let cells: Vec<String> =
                        predictive.distribution.iter().map(|p| sig(*p)).collect();
                    out.push_str(&format!(
                        "predictive {} {}\n",
                        predictive.class_variable,
                        cells.join(" ")
                    ));
                }
                out
            }
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report serialization");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(sig((4.0f64 / 11.0).ln()), "-1.01160091168");
        assert_eq!(sig(2.0 * 4.0f64.ln()), "2.77258872224");
        assert_eq!(sig(0.0), "0");
        assert_eq!(sig(0.5), "0.500000000000");
        assert_eq!(fmt_sig(123.456, 4), "123.5");
        assert_eq!(fmt_sig(1.0e-7, 3), "1.00e-7");
        assert_eq!(fmt_sig(-2.5e15, 3), "-2.50e15");
        assert_eq!(fmt_sig(1e-5, 12), "1.00000000000e-5");
        assert_eq!(fmt_sig(1e-4, 3), "0.000100");
    }
}
