//! Concrete operators: closed-form laws, the flat torus, the rotation
//! algebra and the log-block counterexample, addressable by name.

pub mod nctorus;
pub mod torus;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::spectral::{BlockLayout, DiagonalObservable, EigenvalueSequence, Law, LogBlocks};
use crate::{Error, Result};

pub use nctorus::{
    cantor_enum, cantor_index, lambda_pow, nct_diag, nct_inv_laplacian, nct_involution,
    nct_matrix_element, nct_product, nct_tau0, FourierElement,
};
pub use torus::{torus_invsqrt_laplacian, torus_mode, torus_multiplier_diag, TorusFunction};

/// Default number of torus modes (`2^22`).
pub const TORUS_MODES: u64 = 1 << 22;
/// Default lattice radius for `Δ_θ^{-1}`; about 1.13·10⁶ eigenvalues.
pub const NCT_RADIUS: u64 = 600;

/// Block law used throughout: `0.5/n` on odd and `1.5/n` on even blocks with
/// boundaries `⌈2^{0.45·6^j}⌉`.
pub fn block_law() -> LogBlocks {
    LogBlocks::new(0.5, 1.5, 0.45, 6.0).expect("valid parameters")
}

pub fn block_operator() -> EigenvalueSequence {
    EigenvalueSequence::law(Law::LogBlocks(block_law())).expect("valid law")
}

/// Diagonal alternating between `even` and `odd` on the same block layout.
pub fn block_diagonal(even: f64, odd: f64) -> DiagonalObservable {
    DiagonalObservable::blocks(block_law().layout, even.into(), odd.into())
        .with_label(format!("blocks({even}, {odd})"))
}

/// Block layout with ratio 2: the `log₂ log₂ k` oscillation.
pub fn loglog_layout() -> BlockLayout {
    BlockLayout::new(1.0, 2.0).expect("valid layout")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// `μ_n = 1/n`.
    Harmonic,
    /// `μ_n = n^{-2}`, trace class.
    Separable,
    /// `Δ^{-1/2}` on the flat 1-torus.
    Torus,
    /// `Δ_θ^{-1}` on the rotation algebra.
    Nctorus,
    /// The log-block law.
    Blocks,
}

impl Model {
    pub const ALL: [Model; 5] = [Model::Harmonic, Model::Separable, Model::Torus, Model::Nctorus, Model::Blocks];

    pub fn name(self) -> &'static str {
        match self {
            Model::Harmonic => "harmonic",
            Model::Separable => "separable",
            Model::Torus => "torus",
            Model::Nctorus => "nctorus",
            Model::Blocks => "blocks",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Model::Harmonic => "mu_n = 1/n, Dixmier trace 1",
            Model::Separable => "mu_n = n^-2, trace class, Dixmier trace 0",
            Model::Torus => "inverse square root Laplacian on the 1-torus, Dixmier trace 2",
            Model::Nctorus => "inverse Laplacian on the noncommutative torus, Dixmier trace pi",
            Model::Blocks => "log-block law oscillating between 0.5/n and 1.5/n, not measurable",
        }
    }

    /// Default truncation size (modes or lattice radius) for data-backed models.
    pub fn default_size(self) -> Option<u64> {
        match self {
            Model::Torus => Some(TORUS_MODES),
            Model::Nctorus => Some(NCT_RADIUS),
            _ => None,
        }
    }

    /// Builds the operator; `size` overrides the default truncation.
    pub fn operator(self, size: Option<u64>) -> Result<EigenvalueSequence> {
        let size = size.or(self.default_size());
        match self {
            Model::Harmonic => Ok(EigenvalueSequence::harmonic()),
            Model::Separable => EigenvalueSequence::law(Law::Power { scale: 1.0, exponent: 2.0 }),
            Model::Torus => torus_invsqrt_laplacian(size.expect("default size")),
            Model::Nctorus => nct_inv_laplacian(size.expect("default size")),
            Model::Blocks => Ok(block_operator()),
        }
    }

    /// Expected Dixmier trace of the operator itself, where known.
    pub fn expected_trace(self) -> Option<f64> {
        match self {
            Model::Harmonic => Some(1.0),
            Model::Separable => Some(0.0),
            Model::Torus => Some(2.0),
            Model::Nctorus => Some(std::f64::consts::PI),
            Model::Blocks => None,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Model::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Unknown { what: "model", name: s.to_string() })
    }
}

/// Named diagonal observables accepted wherever an observable is expected.
pub fn named_observable(name: &str) -> Result<DiagonalObservable> {
    match name {
        "one" | "identity" => Ok(DiagonalObservable::identity()),
        "zero" => Ok(DiagonalObservable::zero()),
        "blocks" => Ok(block_diagonal(1.5, 0.5)),
        "convergent" => DiagonalObservable::convergent(0.7, 0.3, 0.5, 1.0, 0.0),
        _ => Err(Error::Unknown { what: "observable", name: name.to_string() }),
    }
}

pub const OBSERVABLES: [&str; 4] = ["one", "zero", "blocks", "convergent"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_round_trip() {
        for m in Model::ALL {
            assert_eq!(m.name().parse::<Model>().unwrap(), m);
        }
        assert!(matches!("sphere".parse::<Model>(), Err(Error::Unknown { .. })));
        assert!(named_observable("nope").is_err());
        for name in OBSERVABLES {
            named_observable(name).unwrap();
        }
    }

    #[test]
    fn block_operator_values() {
        let t = block_operator();
        assert_eq!(t.mu(1).unwrap(), 1.5);
        // block 0 is [2, 7): high; block 1 is [7, 75282): low
        assert_eq!(t.mu(3).unwrap(), 0.5);
        assert_eq!(t.mu(10).unwrap(), 0.05);
        let d = block_diagonal(1.5, 0.5);
        assert_eq!(d.value(3), num_complex::Complex64::new(1.5, 0.0));
        assert_eq!(d.value(10), num_complex::Complex64::new(0.5, 0.0));
    }
}
