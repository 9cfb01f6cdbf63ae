//! Report documents: one structure serialised as TOML for people and diffs,
//! and as JSON for machines, field for field.

use bispec_core::diagnose::{CausalityAssessment, CausalityVerdict, ThirdOrderCheck};
use bispec_core::DiagnosticReport;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult, Location};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalitySection {
    pub verdict: CausalityVerdict,
    pub caveats: Vec<String>,
}

impl From<CausalityAssessment> for CausalitySection {
    fn from(a: CausalityAssessment) -> Self {
        CausalitySection {
            verdict: a.verdict,
            caveats: a.caveats,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThirdOrderSection {
    pub max_lag: usize,
    pub consistent: bool,
    pub defect: f64,
    pub skewness_nonzero: bool,
    pub caveats: Vec<String>,
}

impl ThirdOrderSection {
    pub fn new(max_lag: usize, check: &ThirdOrderCheck) -> Self {
        ThirdOrderSection {
            max_lag,
            consistent: check.is_consistent(),
            defect: check.defect,
            skewness_nonzero: check.skewness_nonzero,
            caveats: check.caveats.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceSection {
    pub max_lag: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSection {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub probe_max_lag: usize,
    pub reversibility_probe: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub diagnosis: DiagnosticReport,
    pub causality: CausalitySection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub third_order: Option<ThirdOrderSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correspondence: Option<CorrespondenceSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleSection>,
}

impl ReportDocument {
    pub fn to_toml(&self) -> CliResult<String> {
        toml::to_string(self).map_err(|e| CliError::Serialize(e.to_string()))
    }

    pub fn to_json(&self) -> CliResult<String> {
        let mut s =
            serde_json::to_string_pretty(self).map_err(|e| CliError::Serialize(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_toml(text: &str, origin: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Parse {
            origin: origin.to_string(),
            key: "<document>".to_string(),
            location: Location::of_offset(text, e.span().map_or(0, |s| s.start)),
            message: e.message().to_string(),
        })
    }

    pub fn from_json(text: &str, origin: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Parse {
            origin: origin.to_string(),
            key: "<document>".to_string(),
            location: Location {
                line: e.line(),
                column: e.column(),
            },
            message: e.to_string(),
        })
    }

    /// Short human-readable verdict lines.
    pub fn summary(&self) -> String {
        let d = &self.diagnosis;
        let mut s = format!(
            "subject: {}\nmode: {:?}\nreversible: {:?}\ncausal linear representation possible: {:?}\n",
            d.subject, d.mode, d.reversible, d.causal_linear_possible
        );
        s.push_str(&format!(
            "realness statistic: {:e} (threshold {:e})\n",
            d.realness.statistic, d.realness.threshold
        ));
        for c in &d.caveats {
            s.push_str(&format!("caveat: {c}\n"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bispec_core::diagnose::{causality_verdict, diagnose_model, third_order_reversibility_check};
    use bispec_core::{FilterCoefficients, InnovationSpec, LinearModel};

    fn document(c: &[f64], inn: InnovationSpec) -> ReportDocument {
        let m = LinearModel::new(FilterCoefficients::new(0, c.to_vec()).unwrap(), inn);
        let d = diagnose_model(&m, 64).unwrap();
        ReportDocument {
            causality: causality_verdict(&d).into(),
            third_order: Some(ThirdOrderSection::new(
                4,
                &third_order_reversibility_check(&m, 4).unwrap(),
            )),
            correspondence: Some(CorrespondenceSection {
                max_lag: 3,
                max_error: 1.25e-16,
                tolerance: 1e-9,
                passed: true,
            }),
            sample: Some(SampleSection {
                n: 10,
                seed: Some(3),
                mean: 0.1,
                variance: 2.0 / 3.0,
                skewness: -0.3,
                probe_max_lag: 1,
                reversibility_probe: 1e-300,
            }),
            diagnosis: d,
        }
    }

    #[test]
    fn toml_and_json_round_trip() {
        for doc in [
            document(&[1.0, 0.5], InnovationSpec::centered_exponential(1.0).unwrap()),
            document(&[1.0, 2.0, 1.0], InnovationSpec::centered_exponential(1.0).unwrap()),
            document(&[1.0, 0.0, -1.0], InnovationSpec::gaussian(0.3).unwrap()),
        ] {
            let t = doc.to_toml().unwrap();
            assert_eq!(ReportDocument::from_toml(&t, "t").unwrap(), doc, "{t}");
            let j = doc.to_json().unwrap();
            assert_eq!(ReportDocument::from_json(&j, "j").unwrap(), doc);
            // same tree in both encodings
            let from_toml: serde_json::Value =
                serde_json::to_value(toml::from_str::<toml::Value>(&t).unwrap()).unwrap();
            let from_json: serde_json::Value = serde_json::from_str(&j).unwrap();
            assert_eq!(from_toml, from_json);
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = ReportDocument::from_json("{\n  \"diagnosis\": 3\n}", "r.json").unwrap_err();
        assert!(matches!(err, CliError::Parse { location: Location { line: 2, .. }, .. }));
    }
}
