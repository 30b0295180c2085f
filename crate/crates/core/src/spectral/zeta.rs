//! `ζ_{A,T}(s) = Tr(A T^s) = Σ_m diag(m) μ_m^s` with certified truncation.
//!
//! The head `Σ_{m≤N}` is summed term by term; the tail is bounded through the
//! diagonal's declared tail behaviour and the spectrum's exact law or tail
//! descriptor. For closed-form laws `N` doubles until the bound meets the
//! tolerance; data-backed spectra sum all their data.

use num_complex::Complex64;
use serde::Serialize;

use super::observable::{DiagonalObservable, DiagonalTail};
use super::sequence::EigenvalueSequence;
use crate::special::{Bounded, Index};
use crate::summation::SumPlan;
use crate::{Error, Result};

pub const MIN_TERMS: u64 = 1 << 10;
pub const MAX_TERMS: u64 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaValue {
    pub value: Complex64,
    pub error: f64,
    /// Number of explicitly summed terms.
    pub terms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaPoint {
    pub s: f64,
    pub value: Complex64,
    pub error: f64,
    pub terms: u64,
}

/// Zeta values on a grid of `s > 1`, sorted by `s` descending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZetaSamples {
    points: Vec<ZetaPoint>,
}

impl ZetaSamples {
    pub fn new(mut points: Vec<ZetaPoint>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !(p.s > 1.0) || !(p.error >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "zeta sample at s = {} with error {} (need s > 1, error ≥ 0)",
                p.s, p.error
            )));
        }
        points.sort_by(|a, b| b.s.total_cmp(&a.s));
        Ok(Self { points })
    }

    pub fn points(&self) -> &[ZetaPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn zeta(
    a: &DiagonalObservable,
    t: &EigenvalueSequence,
    s: f64,
    tol: f64,
    plan: &SumPlan,
) -> Result<ZetaValue> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(Error::InvalidArgument(format!("zeta needs real s > 1, got {s}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if t.is_finite_rank() {
        let len = t.available().expect("finite rank means data");
        let value = plan.sum_complex(1..len + 1, |m| a.value(m) * t.value(m).powf(s));
        return Ok(ZetaValue {
            value,
            error: 0.0,
            terms: len,
        });
    }
    if let Some(c) = a.constant_value() {
        if c == Complex64::ZERO {
            return Ok(ZetaValue {
                value: Complex64::ZERO,
                error: 0.0,
                terms: 0,
            });
        }
        let p = t.power_sum(s, Index::Exact(1), None, plan)?;
        let out = ZetaValue {
            value: c * p.value,
            error: c.norm() * p.error,
            terms: t.available().unwrap_or(0),
        };
        return certify(out, tol);
    }
    let data_len = t.available();
    let mut n = match data_len {
        Some(len) => len,
        None => {
            let from = match a.tail() {
                DiagonalTail::Vanishing { from } | DiagonalTail::Limit { from, .. } => *from,
                _ => 1,
            };
            from.saturating_sub(1).clamp(MIN_TERMS, MAX_TERMS)
        }
    };
    let term = |m: u64| a.value(m) * t.value(m).powf(s);
    let mut head = plan.sum_complex(1..n + 1, term);
    loop {
        let head_mass = t.power_sum(s, Index::Exact(1), Some(Index::Exact(n + 1)), plan)?;
        let head_err = 8.0 * f64::EPSILON * a.bound() * head_mass.upper();
        let tail = tail_part(a, t, s, n, tol, plan)?;
        let out = ZetaValue {
            value: head + tail.0,
            error: head_err + tail.1,
            terms: n,
        };
        if out.error <= tol || data_len.is_some() || n >= MAX_TERMS {
            return certify(out, tol);
        }
        let next = (2 * n).min(MAX_TERMS);
        head += plan.sum_complex(n + 1..next + 1, term);
        n = next;
    }
}

fn certify(z: ZetaValue, tol: f64) -> Result<ZetaValue> {
    if z.error <= tol {
        Ok(z)
    } else {
        Err(Error::UnachievableTolerance {
            requested: tol,
            achieved: z.error,
            terms: z.terms,
        })
    }
}

/// `Σ_{m>n} diag(m) μ_m^s` as (estimate, error bound).
fn tail_part(
    a: &DiagonalObservable,
    t: &EigenvalueSequence,
    s: f64,
    n: u64,
    tol: f64,
    plan: &SumPlan,
) -> Result<(Complex64, f64)> {
    let start = Index::Exact(n + 1);
    let mass = |from: Index, to: Option<Index>| t.power_sum(s, from, to, plan);
    Ok(match a.tail() {
        DiagonalTail::Unknown => (Complex64::ZERO, a.bound() * mass(start, None)?.upper()),
        DiagonalTail::Vanishing { from } => {
            if n + 1 >= *from {
                (Complex64::ZERO, 0.0)
            } else {
                let gap = mass(start, Some(Index::Exact(*from)))?;
                (Complex64::ZERO, a.bound() * gap.upper())
            }
        }
        DiagonalTail::Limit {
            value,
            amplitude,
            rate,
            from,
        } => {
            let mut err = 0.0;
            let lo = (n + 1).max(*from);
            if n + 1 < *from {
                err += a.bound() * mass(start, Some(Index::Exact(*from)))?.upper();
            }
            let p = mass(Index::Exact(lo), None)?;
            err += value.norm() * p.error + amplitude * (lo as f64).powf(-rate) * p.upper();
            (value * p.value, err)
        }
        DiagonalTail::Blocks { layout, even, odd } => {
            let mut value = Complex64::ZERO;
            let mut err = 0.0;
            for (j, lo, hi) in layout.segments(start, None) {
                let c = if j < 0 || j % 2 == 0 { *even } else { *odd };
                let p: Bounded = mass(lo, hi)?;
                value += c * p.value;
                err += c.norm() * p.error;
                let Some(hi) = hi else { break };
                let rest = a.bound() * mass(hi, None)?.upper();
                if rest <= 1e-3 * tol {
                    err += rest;
                    break;
                }
            }
            (value, err)
        }
    })
}

/// Zeta values at each `s` in `s_list`.
pub fn zeta_samples(
    a: &DiagonalObservable,
    t: &EigenvalueSequence,
    s_list: &[f64],
    tol: f64,
    plan: &SumPlan,
) -> Result<ZetaSamples> {
    let points = s_list
        .iter()
        .map(|&s| {
            zeta(a, t, s, tol, plan).map(|z| ZetaPoint {
                s,
                value: z.value,
                error: z.error,
                terms: z.terms,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ZetaSamples::new(points)
}
