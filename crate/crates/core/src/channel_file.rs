//! JSON channel files.
//!
//! ```json
//! { "h_r": [[[0.1, 0.2], [0.3, -0.4]], ...], "h_e": [...], "rho_db": 5.0 }
//! ```
//!
//! Each matrix row holds exactly two `[re, im]` pairs. The power ratio is
//! given either in decibels (`rho_db`) or linearly (`rho_linear`), not both.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::channel::{db_to_linear, ChannelInstance, C64};
use crate::error::{Error, Result};

/// Raw, schema-checked contents of a channel file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub h_r: Vec<Vec<[f64; 2]>>,
    pub h_e: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_linear: Option<f64>,
}

impl ChannelFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: ChannelFile =
            serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    /// Serializes a channel so that [`ChannelFile::parse`] reproduces its
    /// matrices and `rho` bit for bit.
    pub fn from_instance(ch: &ChannelInstance) -> Self {
        let rows = |h: &DMatrix<C64>| -> Vec<Vec<[f64; 2]>> {
            h.row_iter()
                .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
                .collect()
        };
        Self {
            h_r: rows(ch.h_r()),
            h_e: rows(ch.h_e()),
            rho_db: None,
            rho_linear: Some(ch.rho()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("channel file serializes")
    }

    fn validate(&self) -> Result<()> {
        check_rows("h_r", &self.h_r)?;
        check_rows("h_e", &self.h_e)?;
        if self.rho_db.is_some() && self.rho_linear.is_some() {
            return Err(Error::Input(
                "rho_db and rho_linear are mutually exclusive".into(),
            ));
        }
        Ok(())
    }

    /// Linear `rho` from the file, if present.
    pub fn rho(&self) -> Option<f64> {
        self.rho_linear.or(self.rho_db.map(db_to_linear))
    }

    /// Builds the channel, with `rho_override` (linear) taking precedence
    /// over the value in the file.
    pub fn to_instance(&self, rho_override: Option<f64>) -> Result<ChannelInstance> {
        let rho = rho_override
            .or_else(|| self.rho())
            .ok_or_else(|| Error::Input("missing rho_db or rho_linear".into()))?;
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::Input(format!(
                "rho must be positive and finite, got {rho}"
            )));
        }
        ChannelInstance::new(to_matrix(&self.h_r), to_matrix(&self.h_e), rho)
    }
}

fn check_rows(name: &str, rows: &[Vec<[f64; 2]>]) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Input(format!("{name}: expected at least one row")));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != 2 {
            return Err(Error::Input(format!(
                "{name} row {i}: expected 2 entries, found {}",
                row.len()
            )));
        }
        if row.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Input(format!("{name} row {i}: entries must be finite")));
        }
    }
    Ok(())
}

fn to_matrix(rows: &[Vec<[f64; 2]>]) -> DMatrix<C64> {
    DMatrix::from_fn(rows.len(), 2, |i, j| C64::new(rows[i][j][0], rows[i][j][1]))
}
