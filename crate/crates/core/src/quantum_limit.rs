//! The normalized integral `φ(A) = Tr_ω(AT) / Tr_ω(T)` and its comparison
//! with a generalized limit of the eigenvector states `⟨h_m, A h_m⟩`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::genlimits::{limit_estimate, BoundedSequence, Estimate, Ladder, LimitEstimate, LimitPlan};
use crate::residue::{dixmier_residue, ResiduePlan};
use crate::spectral::{DiagonalObservable, DiagonalTail, EigenvalueSequence};
use crate::summation::SumPlan;
use crate::{Error, Result};

/// `θ(a) = Σ a_k P_k` as a diagonal. Finitely supported sequences get a
/// vanishing tail; anything else is `Unknown` unless given through
/// [`theta_with_tail`].
pub fn theta(a: &BoundedSequence) -> DiagonalObservable {
    let tail = match a.support() {
        Some(k) => DiagonalTail::Vanishing { from: k + 1 },
        None => DiagonalTail::Unknown,
    };
    diag_of(a, tail)
}

/// `θ(a)` with a declared tail behaviour, checked on samples.
pub fn theta_with_tail(a: &BoundedSequence, tail: DiagonalTail) -> Result<DiagonalObservable> {
    let d = diag_of(a, tail);
    d.validate(1 << 20)?;
    Ok(d)
}

fn diag_of(a: &BoundedSequence, tail: DiagonalTail) -> DiagonalObservable {
    let seq = a.clone();
    DiagonalObservable::new(move |m| Complex64::from(seq.get(m)), a.bound(), tail)
        .expect("bounded sequences have finite bounds")
        .with_label("theta")
}

/// `A ↦ Tr_ω(AT)/Tr_ω(T)` for a base operator with a converged, positive
/// Dixmier trace.
#[derive(Debug, Clone)]
pub struct NormalizedIntegral {
    operator: EigenvalueSequence,
    normalization: LimitEstimate,
    plan: ResiduePlan,
}

impl NormalizedIntegral {
    pub fn new(t: EigenvalueSequence, plan: ResiduePlan, sum: &SumPlan) -> Result<Self> {
        let normalization = dixmier_residue(&DiagonalObservable::identity(), &t, &plan, sum)?;
        Self::from_parts(t, normalization, plan)
    }

    pub fn from_parts(t: EigenvalueSequence, normalization: LimitEstimate, plan: ResiduePlan) -> Result<Self> {
        match normalization.estimate {
            Estimate::Converged { value, error } if value - error > 0.0 => Ok(Self {
                operator: t,
                normalization,
                plan,
            }),
            Estimate::Converged { value, error } => Err(Error::IllPosedNormalization(format!(
                "Tr(T) = {value} ± {error} is not bounded away from 0"
            ))),
            Estimate::Band { lo, hi } => Err(Error::IllPosedNormalization(format!(
                "Tr(T) did not converge (band [{lo}, {hi}])"
            ))),
        }
    }

    pub fn operator(&self) -> &EigenvalueSequence {
        &self.operator
    }

    pub fn normalization(&self) -> &LimitEstimate {
        &self.normalization
    }

    pub fn plan(&self) -> &ResiduePlan {
        &self.plan
    }
}

/// `φ(A)`: the residue route for `AT` divided by the normalization. Bands
/// are divided endpoint-wise by the normalization interval.
pub fn phi(a: &DiagonalObservable, integral: &NormalizedIntegral, sum: &SumPlan) -> Result<LimitEstimate> {
    let r = dixmier_residue(a, &integral.operator, &integral.plan, sum)?;
    Ok(divide(&r, &integral.normalization))
}

fn divide(r: &LimitEstimate, n: &LimitEstimate) -> LimitEstimate {
    let (n_val, n_err) = match n.estimate {
        Estimate::Converged { value, error } => (value, error),
        Estimate::Band { .. } => unreachable!("normalization is converged"),
    };
    let (d_lo, d_hi) = (n_val - n_err, n_val + n_err);
    let quotient_range = |lo: f64, hi: f64| {
        let c = [lo / d_lo, lo / d_hi, hi / d_lo, hi / d_hi];
        (
            c.iter().copied().fold(f64::INFINITY, f64::min),
            c.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )
    };
    let estimate = match r.estimate {
        Estimate::Converged { value, error } => {
            let v = value / n_val;
            let (lo, hi) = quotient_range(value - error, value + error);
            Estimate::Converged {
                value: v,
                error: (v - lo).max(hi - v),
            }
        }
        Estimate::Band { lo, hi } => {
            let (lo, hi) = quotient_range(lo, hi);
            Estimate::Band { lo, hi }
        }
    };
    LimitEstimate {
        estimate,
        method: r.method.clone(),
        observed: (r.observed.0 / n_val, r.observed.1 / n_val),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructurePlan {
    /// Plan for the limit surrogate applied to the raw diagonal.
    pub diagonal: LimitPlan,
    /// Largest accepted `|φ(A) − lim diag|` when both converge.
    pub agreement: f64,
}

impl Default for StructurePlan {
    fn default() -> Self {
        Self {
            diagonal: LimitPlan {
                ladder: Ladder::new(1 << 10, 1 << 22, 2.0).expect("valid ladder"),
                ..LimitPlan::default()
            },
            agreement: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Agreement {
    /// Both sides converged.
    pub converged: bool,
    pub difference: Option<f64>,
    /// Converged sides agree within the plan's tolerance, or bands overlap.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub phi: LimitEstimate,
    pub diagonal_limit: LimitEstimate,
    pub agreement: Agreement,
}

/// `φ(A)` against the limit surrogate of `m ↦ Re diag(m)`.
pub fn structure_check(
    a: &DiagonalObservable,
    integral: &NormalizedIntegral,
    plan: &StructurePlan,
    sum: &SumPlan,
) -> Result<StructureReport> {
    let phi = phi(a, integral, sum)?;
    let diagonal_limit = limit_estimate(&diagonal_sequence(a), &plan.diagonal, sum)?;
    let agreement = match (phi.value(), diagonal_limit.value()) {
        (Some(x), Some(y)) => Agreement {
            converged: true,
            difference: Some((x - y).abs()),
            consistent: (x - y).abs() <= plan.agreement,
        },
        _ => Agreement {
            converged: false,
            difference: None,
            consistent: phi.overlaps(&diagonal_limit),
        },
    };
    Ok(StructureReport { phi, diagonal_limit, agreement })
}

/// `m ↦ Re diag(m)` as a bounded sequence.
pub fn diagonal_sequence(a: &DiagonalObservable) -> BoundedSequence {
    let d = a.clone();
    let support = match a.tail() {
        DiagonalTail::Vanishing { from } => Some(from.saturating_sub(1)),
        _ => None,
    };
    match support {
        Some(k) => BoundedSequence::finite((1..=k).map(|m| d.value(m).re).collect()),
        None => BoundedSequence::new(move |m| d.value(m).re, a.bound()).expect("bounded diagonal"),
    }
}

/// `(m, Re diag(m))` at `count` log-spaced indices up to `upto`, for plotting.
pub fn diagonal_rows(a: &DiagonalObservable, upto: u64, count: usize) -> Vec<(u64, f64)> {
    crate::spectral::sequence::sample_points(1, upto, count)
        .into_iter()
        .map(|m| (m, a.value(m).re))
        .collect()
}
