use serde::{Deserialize, Serialize};

use super::lp::{FeasibilityResult, LinearProgram};
use super::marginal::MarginalResult;
use super::FeasibilityError;

/// A program together with its witness or Farkas certificate, with every
/// number written as a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub name: String,
    pub program: LinearProgram,
    pub result: FeasibilityResult,
}

impl CertificateFile {
    pub fn new(name: &str, r: &MarginalResult) -> Self {
        CertificateFile { name: name.into(), program: r.program.clone(), result: r.result.clone() }
    }

    /// Exact re-check against the embedded program.
    pub fn verify(&self) -> bool {
        match &self.result {
            FeasibilityResult::Feasible { witness } => self.program.check_witness(witness),
            FeasibilityResult::Infeasible { certificate } => self.program.check_certificate(certificate),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, FeasibilityError> {
        serde_json::from_str(text).map_err(|e| FeasibilityError::Parse(e.to_string()))
    }
}
