//! Harness parameters: tolerances and scan densities.
//!
//! The defaults are stored in `config/harness.json`; a file passed at run
//! time may override any subset of keys. Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::equilibrium::JOptions;
use crate::ratio_extremal::RatioOptions;
use crate::{Error, Result};

/// The bundled defaults.
pub const DEFAULT_CONFIG_JSON: &str = include_str!("../config/harness.json");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessConfig {
    /// Relative error allowed for the ratio-route extrapolation.
    pub ratio_tolerance: f64,
    /// Relative error allowed for the monic-route extrapolation.
    pub monic_tolerance: f64,
    /// Allowed error of the empirical zero mass on `[r, 1]`.
    pub saturated_mass_tolerance: f64,
    /// Slack over `log 2` for `(1/n) log ratio`.
    pub log2_slack: f64,
    pub points_per_gap: usize,
    pub refine_gaps: usize,
    pub refine_tol: f64,
    /// Saturation detection threshold below `1/2`.
    pub support_threshold: f64,
    /// Samples per interval for the minima in `J`.
    pub j_samples: usize,
    /// Slack for monic-route value <= ratio-route value.
    pub ordering_slack: f64,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            ratio_tolerance: 0.05,
            monic_tolerance: 0.07,
            saturated_mass_tolerance: 0.02,
            log2_slack: 0.05,
            points_per_gap: 8,
            refine_gaps: 3,
            refine_tol: 1e-10,
            support_threshold: 1e-9,
            j_samples: 401,
            ordering_slack: 1e-12,
        }
    }
}

impl HarnessConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: HarnessConfig =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("ratio_tolerance", self.ratio_tolerance),
            ("monic_tolerance", self.monic_tolerance),
            ("saturated_mass_tolerance", self.saturated_mass_tolerance),
            ("refine_tol", self.refine_tol),
            ("support_threshold", self.support_threshold),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.log2_slack >= 0.0 && self.ordering_slack >= 0.0) {
            return Err(Error::invalid("slacks must be nonnegative"));
        }
        if self.points_per_gap == 0 || self.refine_gaps == 0 || self.j_samples < 3 {
            return Err(Error::invalid(
                "points_per_gap and refine_gaps must be >= 1, j_samples >= 3",
            ));
        }
        Ok(())
    }

    /// Sets a tolerance by its key name.
    pub fn set_tolerance(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match name {
            "ratio_tolerance" => &mut self.ratio_tolerance,
            "monic_tolerance" => &mut self.monic_tolerance,
            "saturated_mass_tolerance" => &mut self.saturated_mass_tolerance,
            "log2_slack" => &mut self.log2_slack,
            "refine_tol" => &mut self.refine_tol,
            "support_threshold" => &mut self.support_threshold,
            "ordering_slack" => &mut self.ordering_slack,
            _ => return Err(Error::invalid(format!("unknown tolerance `{name}`"))),
        };
        *slot = value;
        self.validate()
    }

    pub fn ratio_options(&self) -> RatioOptions {
        RatioOptions {
            points_per_gap: self.points_per_gap,
            refine_gaps: self.refine_gaps,
            refine_tol: self.refine_tol,
        }
    }

    pub fn j_options(&self) -> JOptions {
        JOptions {
            support_threshold: self.support_threshold,
            samples: self.j_samples,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_file_matches_default() {
        assert_eq!(HarnessConfig::from_json(DEFAULT_CONFIG_JSON).unwrap(), HarnessConfig::default());
    }

    #[test]
    fn partial_override() {
        let c = HarnessConfig::from_json(r#"{"points_per_gap": 12}"#).unwrap();
        assert_eq!(c.points_per_gap, 12);
        assert_eq!(c.ratio_tolerance, 0.05);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(HarnessConfig::from_json(r#"{"ratio_tol": 0.1}"#).is_err());
        assert!(HarnessConfig::from_json(r#"{"points_per_gap": 0}"#).is_err());
        let mut c = HarnessConfig::default();
        assert!(c.set_tolerance("bogus", 1.0).is_err());
        c.set_tolerance("monic_tolerance", 0.1).unwrap();
        assert_eq!(c.monic_tolerance, 0.1);
        assert!(c.set_tolerance("refine_tol", -1.0).is_err());
    }
}
