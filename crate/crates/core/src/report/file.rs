//! JSON structure files.
//!
//! Indices are 1-based, brackets list `[e_i, e_j] ∋ coeff·e_k` with `i < j`,
//! `J` and `g` are row-major and every scalar is a string (`"p/q"` in
//! rational mode, a decimal or `"p/q"` in float mode).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{BracketEntry, LieAlgebra};
use crate::hermitian::HermitianStructure;
use crate::linalg::Matrix;
use crate::scalar::{convert, Rational, Scalar, ScalarMode};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketSpec {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub coeff: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_class: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    pub name: String,
    pub dim: usize,
    pub mode: ScalarMode,
    pub brackets: Vec<BracketSpec>,
    #[serde(rename = "J")]
    pub j: Vec<Vec<String>>,
    pub g: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

fn parse_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        field: field.into(),
        message: message.into(),
    }
}

impl StructureFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: StructureFile = serde_json::from_str(text)
            .map_err(|e| parse_err("document", format!("line {} column {}: {e}", e.line(), e.column())))?;
        file.check_format()?;
        Ok(file)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("structure file serializes");
        s.push('\n');
        s
    }

    /// Index ranges, bracket order, duplicates and matrix shapes.
    pub fn check_format(&self) -> Result<()> {
        let dim = self.dim;
        if dim == 0 {
            return Err(parse_err("dim", "must be positive"));
        }
        let mut seen = BTreeSet::new();
        for (n, b) in self.brackets.iter().enumerate() {
            let field = format!("brackets[{n}]");
            for (name, idx) in [("i", b.i), ("j", b.j), ("k", b.k)] {
                if idx < 1 || idx > dim {
                    return Err(parse_err(
                        format!("{field}.{name}"),
                        format!("index {idx} outside 1..{dim}"),
                    ));
                }
            }
            if b.i >= b.j {
                return Err(parse_err(field, format!("needs i < j, got i = {}, j = {}", b.i, b.j)));
            }
            if !seen.insert((b.i, b.j, b.k)) {
                return Err(parse_err(field, format!("duplicate entry ({}, {}, {})", b.i, b.j, b.k)));
            }
        }
        for (name, m) in [("J", &self.j), ("g", &self.g)] {
            if m.len() != dim {
                return Err(parse_err(name, format!("expected {dim} rows, got {}", m.len())));
            }
            if let Some((r, row)) = m.iter().enumerate().find(|(_, row)| row.len() != dim) {
                return Err(parse_err(
                    format!("{name}[{r}]"),
                    format!("expected {dim} entries, got {}", row.len()),
                ));
            }
        }
        Ok(())
    }

    fn scalar<S: Scalar>(&self, field: &str, text: &str) -> Result<S> {
        let wrap = |e: Error| match e {
            Error::Parse { message, .. } => parse_err(field, format!("{message} in {} mode", self.mode)),
            other => other,
        };
        match self.mode {
            ScalarMode::Rational => Rational::parse_text(text)
                .map(|v| convert::<Rational, S>(&v))
                .map_err(wrap),
            ScalarMode::Float => f64::parse_text(text).map(|v| convert::<f64, S>(&v)).map_err(wrap),
        }
    }

    fn matrix<S: Scalar>(&self, name: &str, m: &[Vec<String>]) -> Result<Matrix<S>> {
        let rows = m
            .iter()
            .enumerate()
            .map(|(r, row)| {
                row.iter()
                    .enumerate()
                    .map(|(c, t)| self.scalar(&format!("{name}[{r}][{c}]"), t))
                    .collect::<Result<Vec<S>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(rows)
    }

    /// Parse the coefficients (in the declared mode, then converted to `S`)
    /// and validate the structure.
    pub fn build<S: Scalar>(&self) -> Result<HermitianStructure<S>> {
        self.check_format()?;
        let entries = self
            .brackets
            .iter()
            .enumerate()
            .map(|(n, b)| {
                let c = self.scalar(&format!("brackets[{n}].coeff"), &b.coeff)?;
                Ok(BracketEntry::new(b.i - 1, b.j - 1, b.k - 1, c))
            })
            .collect::<Result<Vec<_>>>()?;
        let alg = LieAlgebra::from_brackets(self.dim, &entries)?;
        let j = self.matrix("J", &self.j)?;
        let g = self.matrix("g", &self.g)?;
        HermitianStructure::new(alg, j, g)
    }

    /// Canonical file for a structure: brackets sorted by `(i, j, k)`,
    /// scalars in canonical text form.
    pub fn from_structure<S: Scalar>(name: &str, h: &HermitianStructure<S>, metadata: Option<Metadata>) -> Self {
        let text = |m: &Matrix<S>| -> Vec<Vec<String>> {
            m.to_rows()
                .iter()
                .map(|row| row.iter().map(Scalar::to_text).collect())
                .collect()
        };
        Self {
            name: name.to_string(),
            dim: h.dim(),
            mode: S::MODE,
            brackets: h
                .alg()
                .entries()
                .into_iter()
                .map(|e| BracketSpec {
                    i: e.i + 1,
                    j: e.j + 1,
                    k: e.k + 1,
                    coeff: e.coeff.to_text(),
                })
                .collect(),
            j: text(h.j().matrix()),
            g: text(h.metric().matrix()),
            metadata,
        }
    }
}

/// Parse and validate a structure file.
pub fn parse_structure_file<S: Scalar>(text: &str) -> Result<(StructureFile, HermitianStructure<S>)> {
    let file = StructureFile::from_json(text)?;
    let h = file.build()?;
    Ok((file, h))
}
