use std::collections::BTreeMap;

use serde::Serialize;

/// An error with the exit status it maps to.
pub struct Failure {
    pub error: anyhow::Error,
    pub hint: Option<String>,
    pub code: u8,
}

pub const EXIT_HOLDS: u8 = 0;
pub const EXIT_FAILS: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INCONCLUSIVE: u8 = 3;

impl Failure {
    pub fn usage(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            error: error.into(),
            hint: None,
            code: EXIT_USAGE,
        }
    }

    pub fn inconclusive(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            error: error.into(),
            hint: None,
            code: EXIT_INCONCLUSIVE,
        }
    }

    pub fn with_hint(mut self, hint: impl Into<String>) -> Self {
        self.hint = Some(hint.into());
        self
    }
}

pub type Outcome = Result<u8, Failure>;

#[derive(Serialize)]
pub struct CheckReport {
    pub formula: String,
    pub interval: Vec<String>,
    pub engine: &'static str,
    pub holds: bool,
    pub conclusive: bool,
    pub regime: String,
    pub bound: String,
    pub stats: BTreeMap<&'static str, u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
    pub exit_code: u8,
}

#[derive(Serialize)]
pub struct ErrorReport {
    pub error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hint: Option<String>,
    pub exit_code: u8,
}

#[derive(Serialize)]
pub struct VariableInfo {
    pub name: String,
    pub dfa_states: usize,
    pub shape: String,
}

#[derive(Serialize)]
pub struct ClassifyReport {
    pub point_based: bool,
    pub variables: Vec<VariableInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fragment: Option<String>,
}

#[derive(Serialize)]
pub struct FisReport {
    pub symbolic: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scientific: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

#[derive(Serialize)]
pub struct StatsReport {
    pub agents: usize,
    pub configurations: usize,
    pub reachable: usize,
    pub transitions: usize,
    pub variables: Vec<VariableInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fragment: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fis_literal: Option<FisReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fis_tight: Option<FisReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fis_note: Option<String>,
}

#[derive(Serialize)]
pub struct ReduceReport {
    pub system: String,
    pub formula: String,
    pub variables: Vec<String>,
}

pub fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    );
}
