//! The flat 1-torus: `Δ^{-1/2}` and multiplication operators `M_f`.
//!
//! Eigenfunctions are `f_m(θ) = e^{imθ}/√(2π)`, so `⟨f_m, M_f f_m⟩ = f̂(0)`,
//! the mean of `f`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spectral::{DiagonalObservable, EigenvalueSequence, TailDescriptor};
use crate::{Error, Result};

/// Finite Fourier series `f(θ) = Σ_k f̂(k) e^{ikθ}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TorusFunction {
    coeffs: BTreeMap<i64, Complex64>,
}

#[derive(Serialize, Deserialize)]
struct CoeffJson {
    k: i64,
    #[serde(default)]
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct TorusJson {
    coeffs: Vec<CoeffJson>,
}

impl TorusFunction {
    pub fn new(coeffs: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut map = BTreeMap::new();
        for (k, c) in coeffs {
            *map.entry(k).or_insert(Complex64::ZERO) += c;
        }
        Self { coeffs: map }
    }

    pub fn one() -> Self {
        Self::new([(0, Complex64::ONE)])
    }

    /// `{"coeffs": [{"k": …, "re": …, "im": …}, …]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: TorusJson =
            serde_json::from_str(text).map_err(|e| Error::spec("coeffs", e.to_string()))?;
        Ok(Self::new(parsed.coeffs.into_iter().map(|c| (c.k, Complex64::new(c.re, c.im)))))
    }

    pub fn to_json(&self) -> String {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&k, c)| CoeffJson { k, re: c.re, im: c.im })
            .collect();
        serde_json::to_string(&TorusJson { coeffs }).expect("serializable")
    }

    pub fn coefficient(&self, k: i64) -> Complex64 {
        self.coeffs.get(&k).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(&k, c)| c * Complex64::cis(k as f64 * theta))
            .sum()
    }

    /// `⟨f_m, M_f f_m⟩` computed as `(1/2π)∫ f` by the trapezoid rule, which
    /// is exact for trigonometric polynomials of degree below `points`.
    pub fn mean_by_quadrature(&self, points: usize) -> Complex64 {
        let h = std::f64::consts::TAU / points as f64;
        (0..points).map(|i| self.eval(-std::f64::consts::PI + i as f64 * h)).sum::<Complex64>()
            / points as f64
    }
}

/// Singular values of `Δ^{-1/2}` over the first `modes` nonzero modes,
/// enumerated `1, −1, 2, −2, …`, with the envelope `2/n` attached.
pub fn torus_invsqrt_laplacian(modes: u64) -> Result<EigenvalueSequence> {
    if modes == 0 {
        return Err(Error::InvalidArgument("need at least one mode".into()));
    }
    let values: Vec<f64> = (1..=modes).map(|i| 1.0 / i.div_ceil(2) as f64).collect();
    let labels: Vec<u64> = (1..=modes).collect();
    // n μ_n / 2 − 1 is 0 for even n and −1/(n+1) > −1/start for odd n
    let start = modes / 2 + 1;
    let tail = TailDescriptor::new(2.0, 1.0, start, 1.0 / start as f64)?;
    EigenvalueSequence::from_enumeration(values, labels)?.with_tail(tail)
}

/// Mode `m ∈ ℤ∖{0}` at enumeration position `i ≥ 1`.
pub fn torus_mode(i: u64) -> i64 {
    let k = i.div_ceil(2) as i64;
    if i % 2 == 1 {
        k
    } else {
        -k
    }
}

/// `m ↦ ⟨f_m, M_f f_m⟩ = f̂(0)`.
pub fn torus_multiplier_diag(f: &TorusFunction) -> DiagonalObservable {
    DiagonalObservable::constant(f.coefficient(0)).with_label("torus multiplier")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_pairs() {
        let t = torus_invsqrt_laplacian(1000).unwrap();
        assert_eq!(t.mu(1).unwrap(), 1.0);
        assert_eq!(t.mu(2).unwrap(), 1.0);
        assert_eq!(t.mu(3).unwrap(), 0.5);
        for k in 1..=500u64 {
            assert_eq!(t.mu(2 * k - 1).unwrap(), 1.0 / k as f64);
            assert_eq!(t.mu(2 * k).unwrap(), 1.0 / k as f64);
        }
        assert_eq!((torus_mode(1), torus_mode(2), torus_mode(5)), (1, -1, 3));
    }

    #[test]
    fn multiplier_diagonals() {
        assert_eq!(torus_multiplier_diag(&TorusFunction::one()).constant_value(), Some(Complex64::ONE));
        let e = TorusFunction::new([(1, Complex64::ONE)]);
        assert_eq!(torus_multiplier_diag(&e).constant_value(), Some(Complex64::ZERO));
        let f = TorusFunction::new([(0, Complex64::new(0.3, 0.0)), (2, Complex64::new(0.5, -0.1)), (-3, Complex64::ONE)]);
        let q = f.mean_by_quadrature(64);
        assert!((q - Complex64::new(0.3, 0.0)).norm() < 1e-15);
        assert_eq!(torus_multiplier_diag(&f).constant_value(), Some(Complex64::new(0.3, 0.0)));
    }

    #[test]
    fn json_round_trip() {
        let f = TorusFunction::from_json(r#"{"coeffs":[{"k":0,"re":0.3},{"k":-2,"re":1.0,"im":2.0}]}"#).unwrap();
        assert_eq!(f.coefficient(-2), Complex64::new(1.0, 2.0));
        assert_eq!(TorusFunction::from_json(&f.to_json()).unwrap(), f);
        assert!(matches!(TorusFunction::from_json("{}"), Err(Error::Spec { .. })));
    }
}
