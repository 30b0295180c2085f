//! Run configuration: one JSON document, every field optional, flags
//! override fields one-to-one.

use std::path::PathBuf;

use dixmier_core::genlimits::{Ladder, LimitPlan};
use dixmier_core::quantum_limit::StructurePlan;
use dixmier_core::residue::ResiduePlan;
use dixmier_core::suites::DEFAULT_SEED;
use dixmier_core::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "N_min")]
    pub n_min: u64,
    #[serde(rename = "N_max")]
    pub n_max: u64,
    pub ratio: f64,
    /// Cesàro order for limits of raw sequences (diagonals).
    pub cesaro_order: u32,
    /// Relative convergence threshold.
    pub threshold: f64,
    /// Per-point residue-curve error target for closed-form spectra.
    pub point_tolerance: f64,
    /// Largest accepted per-point error for data-backed spectra.
    pub data_tolerance: f64,
    /// Absolute error target for `zeta` values.
    pub zeta_tolerance: f64,
    /// `|φ(A) − lim diag|` accepted by `structure`.
    pub agreement: f64,
    pub extrapolation_order: usize,
    pub output: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let plan = ResiduePlan::default();
        Self {
            n_min: plan.ladder.n_min,
            n_max: plan.ladder.n_max,
            ratio: plan.ladder.ratio,
            cesaro_order: LimitPlan::default().cesaro_order,
            threshold: plan.threshold,
            point_tolerance: plan.point_tolerance,
            data_tolerance: plan.data_tolerance,
            zeta_tolerance: 1e-10,
            agreement: StructurePlan::default().agreement,
            extrapolation_order: plan.extrapolation_order,
            output: None,
            seed: DEFAULT_SEED,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner().to_string();
            let field = if path == "." { field_of(&inner).unwrap_or_else(|| "config".into()) } else { path };
            Error::Spec { field, message: inner }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_min == 0 {
            return Err(Error::Spec { field: "N_min".into(), message: "must be at least 1".into() });
        }
        if self.n_min >= self.n_max {
            return Err(Error::Spec {
                field: "N_max".into(),
                message: format!("N_min = {} must be below N_max = {}", self.n_min, self.n_max),
            });
        }
        if !(self.ratio > 1.0 && self.ratio.is_finite()) {
            return Err(Error::Spec { field: "ratio".into(), message: format!("must exceed 1, got {}", self.ratio) });
        }
        for (field, v) in [
            ("threshold", self.threshold),
            ("point_tolerance", self.point_tolerance),
            ("data_tolerance", self.data_tolerance),
            ("zeta_tolerance", self.zeta_tolerance),
            ("agreement", self.agreement),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Spec { field: field.into(), message: format!("must be positive, got {v}") });
            }
        }
        Ok(())
    }

    pub fn ladder(&self) -> Result<Ladder> {
        Ladder::new(self.n_min, self.n_max, self.ratio)
    }

    pub fn residue_plan(&self) -> Result<ResiduePlan> {
        Ok(ResiduePlan {
            ladder: self.ladder()?,
            threshold: self.threshold,
            point_tolerance: self.point_tolerance,
            data_tolerance: self.data_tolerance,
            extrapolation_order: self.extrapolation_order,
        })
    }

    /// Diagonal limits run on the ladder capped at `2^22`.
    pub fn structure_plan(&self) -> Result<StructurePlan> {
        let n_max = self.n_max.min(1 << 22).max(self.n_min + 1);
        Ok(StructurePlan {
            diagonal: LimitPlan {
                ladder: Ladder::new(self.n_min, n_max, self.ratio)?,
                threshold: self.threshold,
                cesaro_order: self.cesaro_order,
                acceleration: None,
            },
            agreement: self.agreement,
        })
    }
}

fn field_of(msg: &str) -> Option<String> {
    for marker in ["unknown field `", "missing field `"] {
        if let Some(i) = msg.find(marker) {
            let rest = &msg[i + marker.len()..];
            return rest.find('`').map(|j| rest[..j].to_string());
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        let c = RunConfig::default();
        c.validate().unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"N_min\""));
        assert_eq!(RunConfig::from_json(&text).unwrap(), c);
        assert_eq!(RunConfig::from_json("{}").unwrap(), c);
    }

    #[test]
    fn invalid_fields_are_named() {
        let field = |text: &str| match RunConfig::from_json(text) {
            Err(Error::Spec { field, .. }) => field,
            other => panic!("{other:?}"),
        };
        assert_eq!(field(r#"{"N_min": 100, "N_max": 10}"#), "N_max");
        assert_eq!(field(r#"{"ratio": 1.0}"#), "ratio");
        assert_eq!(field(r#"{"threshold": 0}"#), "threshold");
        assert_eq!(field(r#"{"bogus": 1}"#), "bogus");
        assert_eq!(field(r#"{"seed": "x"}"#), "seed");
        assert_eq!(field("not json"), "config");
    }
}
