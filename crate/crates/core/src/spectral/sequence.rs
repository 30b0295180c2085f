//! Singular-value sequences of positive compact operators.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::law::Law;
use crate::special::{power_sum, Bounded, Index};
use crate::summation::{CompensatedSum, SumPlan};
use crate::{Error, Result};

/// Two-sided power envelope for the part of a spectrum beyond its data:
/// `|μ_n / (c n^{-p}) − 1| ≤ D` for every `n ≥ start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailDescriptor {
    pub coefficient: f64,
    pub exponent: f64,
    pub start: u64,
    pub deviation: f64,
}

impl TailDescriptor {
    pub fn new(coefficient: f64, exponent: f64, start: u64, deviation: f64) -> Result<Self> {
        let ok = coefficient > 0.0
            && coefficient.is_finite()
            && exponent > 0.0
            && exponent.is_finite()
            && start >= 1
            && (0.0..1.0).contains(&deviation);
        if !ok {
            return Err(Error::InvalidSpectrum(format!(
                "bad tail descriptor: c = {coefficient}, p = {exponent}, start = {start}, D = {deviation}"
            )));
        }
        Ok(Self {
            coefficient,
            exponent,
            start,
            deviation,
        })
    }

    /// Fits `c` and `D` to `values[start-1..]` for a fixed exponent: the
    /// midpoint and half-spread of `n^p μ_n` over the window.
    pub fn fit(values: &[f64], exponent: f64, start: u64) -> Result<Self> {
        let start = start.max(1);
        if start as usize > values.len() {
            return Err(Error::InsufficientSpectralData {
                index: start,
                available: values.len() as u64,
            });
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (i, &v) in values.iter().enumerate().skip(start as usize - 1) {
            let r = v * ((i + 1) as f64).powf(exponent);
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let c = 0.5 * (hi + lo);
        let d = (hi - lo) / (hi + lo);
        // widen by a few ulps so the fitted window passes its own check
        Self::new(c, exponent, start, d * (1.0 + 1e-9) + 1e-14)
    }

    pub fn bound(&self, n: u64) -> f64 {
        self.coefficient * (1.0 + self.deviation) * (n as f64).powf(-self.exponent)
    }

    pub fn admits(&self, n: u64, mu: f64) -> bool {
        let model = self.coefficient * (n as f64).powf(-self.exponent);
        (mu / model - 1.0).abs() <= self.deviation
    }

    /// `Σ_{n ≥ from} μ_n^s` certified by the envelope (`from ≥ start`).
    pub fn tail_sum(&self, s: f64, from: Index) -> Result<Bounded> {
        self.range_sum(s, from, None)
    }

    /// `Σ_{from ≤ n < to} μ_n^s` certified by the envelope.
    pub fn range_sum(&self, s: f64, from: Index, to: Option<Index>) -> Result<Bounded> {
        let sigma = s * self.exponent;
        if to.is_none() && sigma <= 1.0 {
            return Err(Error::Domain(format!(
                "tail Σ μ_n^s diverges for s = {s} with exponent {}",
                self.exponent
            )));
        }
        let base = power_sum(sigma, from, to).scale(self.coefficient.powf(s));
        let spread = ((1.0 + self.deviation).powf(s) - 1.0)
            .max(1.0 - (1.0 - self.deviation).powf(s));
        Ok(Bounded {
            value: base.value,
            error: base.error + spread * base.upper(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Source {
    Law(Law),
    List(Arc<[f64]>),
    Enumerated { values: Arc<[f64]>, labels: Arc<[u64]> },
}

/// Nonincreasing singular values `μ_1 ≥ μ_2 ≥ …` given as a closed-form law,
/// an explicit list, or a labeled enumeration sorted into order.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueSequence {
    source: Source,
    tail: Option<TailDescriptor>,
}

impl EigenvalueSequence {
    pub fn law(law: Law) -> Result<Self> {
        law.validate()?;
        Ok(Self {
            source: Source::Law(law),
            tail: None,
        })
    }

    pub fn harmonic() -> Self {
        Self::law(Law::harmonic()).expect("harmonic law is valid")
    }

    /// Explicit nonincreasing list; trailing zeros pad a finite-rank operator.
    pub fn from_list(values: Vec<f64>) -> Result<Self> {
        check_list(&values)?;
        Ok(Self {
            source: Source::List(values.into()),
            tail: None,
        })
    }

    /// Positive values attached to enumeration labels, sorted by value
    /// descending with ties broken by label ascending.
    pub fn from_enumeration(values: Vec<f64>, labels: Vec<u64>) -> Result<Self> {
        if values.len() != labels.len() {
            return Err(Error::InvalidSpectrum(format!(
                "{} values but {} labels",
                values.len(),
                labels.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidSpectrum(format!(
                "enumerated value {} at position {} is not positive",
                values[i],
                i + 1
            )));
        }
        let mut pairs: Vec<(f64, u64)> = values.into_iter().zip(labels).collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let (values, labels): (Vec<f64>, Vec<u64>) = pairs.into_iter().unzip();
        Ok(Self {
            source: Source::Enumerated {
                values: values.into(),
                labels: labels.into(),
            },
            tail: None,
        })
    }

    /// Attaches a tail descriptor after checking it against the known values.
    pub fn with_tail(mut self, tail: TailDescriptor) -> Result<Self> {
        let check = |n: u64| -> Result<()> {
            let mu = self.value(n);
            if tail.admits(n, mu) {
                Ok(())
            } else {
                Err(Error::InvalidSpectrum(format!(
                    "μ_{n} = {mu} violates the tail descriptor (c = {}, p = {}, D = {})",
                    tail.coefficient, tail.exponent, tail.deviation
                )))
            }
        };
        match self.available() {
            Some(len) => {
                if self.data().is_some_and(|d| d.last() == Some(&0.0)) {
                    return Err(Error::InvalidSpectrum(
                        "zero-padded finite-rank data cannot carry a tail descriptor".into(),
                    ));
                }
                if tail.start > len + 1 {
                    return Err(Error::InvalidSpectrum(format!(
                        "tail descriptor starts at {} beyond the {len} stored values",
                        tail.start
                    )));
                }
                for n in tail.start..=len {
                    check(n)?;
                }
            }
            None => {
                for n in sample_points(tail.start, 1 << 40, 256) {
                    check(n)?;
                }
            }
        }
        self.tail = Some(tail);
        Ok(self)
    }

    pub fn tail(&self) -> Option<&TailDescriptor> {
        self.tail.as_ref()
    }

    pub fn as_law(&self) -> Option<&Law> {
        match &self.source {
            Source::Law(l) => Some(l),
            _ => None,
        }
    }

    fn data(&self) -> Option<&[f64]> {
        match &self.source {
            Source::Law(_) => None,
            Source::List(v) => Some(v),
            Source::Enumerated { values, .. } => Some(values),
        }
    }

    /// Enumeration label of `μ_n`, when the sequence came from one.
    pub fn label(&self, n: u64) -> Option<u64> {
        match &self.source {
            Source::Enumerated { labels, .. } => labels.get(n as usize - 1).copied(),
            _ => None,
        }
    }

    /// Number of stored values; `None` for closed-form laws.
    pub fn available(&self) -> Option<u64> {
        self.data().map(|d| d.len() as u64)
    }

    fn zero_padded(&self) -> bool {
        matches!(&self.source, Source::List(v) if v.last() == Some(&0.0))
    }

    /// Finite rank: explicit data with no tail descriptor.
    pub fn is_finite_rank(&self) -> bool {
        self.data().is_some() && self.tail.is_none()
    }

    /// Decay exponent known for the tail, if any.
    pub fn decay_exponent(&self) -> Option<f64> {
        match (&self.source, &self.tail) {
            (Source::Law(l), _) => Some(l.exponent()),
            (_, Some(t)) => Some(t.exponent),
            _ => None,
        }
    }

    /// Largest index for which [`mu`](Self::mu) succeeds.
    pub fn queryable(&self) -> Option<u64> {
        if self.zero_padded() {
            None
        } else {
            self.available()
        }
    }

    #[inline]
    pub(crate) fn value(&self, n: u64) -> f64 {
        match &self.source {
            Source::Law(l) => l.value(n),
            Source::List(v) => v.get(n as usize - 1).copied().unwrap_or(0.0),
            Source::Enumerated { values, .. } => values[n as usize - 1],
        }
    }

    pub fn mu(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidArgument("singular values are indexed from 1".into()));
        }
        self.check_range(n)?;
        Ok(self.value(n))
    }

    fn check_range(&self, n: u64) -> Result<()> {
        match self.queryable() {
            Some(len) if n > len => Err(Error::InsufficientSpectralData {
                index: n,
                available: len,
            }),
            _ => Ok(()),
        }
    }

    /// Multiplies every singular value by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {c}")));
        }
        let source = match &self.source {
            Source::Law(l) => Source::Law(l.scaled(c)),
            Source::List(v) => Source::List(v.iter().map(|x| x * c).collect()),
            Source::Enumerated { values, labels } => Source::Enumerated {
                values: values.iter().map(|x| x * c).collect(),
                labels: labels.clone(),
            },
        };
        let tail = self.tail.map(|t| TailDescriptor {
            coefficient: t.coefficient * c,
            ..t
        });
        Ok(Self { source, tail })
    }

    /// `Σ_{from ≤ n < to} μ_n^s`, `to = None` meaning the infinite tail.
    pub fn power_sum(&self, s: f64, from: Index, to: Option<Index>, plan: &SumPlan) -> Result<Bounded> {
        if let Source::Law(l) = &self.source {
            return l.power_sum(s, from, to);
        }
        let data = self.data().expect("non-law sources carry data");
        let len = data.len() as u64;
        let a = match from {
            Index::Exact(a) => a.max(1),
            Index::Huge(_) => len + 1,
        };
        let data_end = match to {
            Some(Index::Exact(b)) => b.min(len + 1),
            _ => len + 1,
        };
        let mut total = Bounded::ZERO;
        if a < data_end {
            let v = plan.sum(a..data_end, |n| data[n as usize - 1].powf(s));
            total.value += v;
            total.error += 4.0 * f64::EPSILON * v;
        }
        let beyond = from.max(Index::Exact(len + 1));
        if to.is_some_and(|t| t.le(beyond)) {
            return Ok(total);
        }
        match self.tail {
            Some(t) => Ok(total + t.range_sum(s, beyond, to)?),
            None if self.zero_padded() || to.is_none() && self.is_finite_rank() => Ok(total),
            None => Err(Error::InsufficientSpectralData {
                index: to.and_then(Index::exact).unwrap_or(u64::MAX),
                available: len,
            }),
        }
    }

    /// `γ_N = (1/ln(1+N)) Σ_{n≤N} μ_n`.
    pub fn log_average(&self, n: u64, plan: &SumPlan) -> Result<f64> {
        Ok(self.gamma_at(&[n], plan)?[0])
    }

    /// `γ_N` at each checkpoint (sorted ascending).
    pub fn gamma_at(&self, checkpoints: &[u64], plan: &SumPlan) -> Result<Vec<f64>> {
        if checkpoints.first() == Some(&0) {
            return Err(Error::InvalidArgument("log averages need N ≥ 1".into()));
        }
        if let Some(&last) = checkpoints.last() {
            self.check_range(last)?;
        }
        let sums = plan.prefix_sums_at(checkpoints, |n| self.value(n));
        Ok(checkpoints
            .iter()
            .zip(sums)
            .map(|(&n, s)| s / (n as f64).ln_1p())
            .collect())
    }

    /// `max_{N ≤ N_max} γ_N`, a lower estimate of `‖T‖_{1,∞}`.
    pub fn l1inf_norm_estimate(&self, n_max: u64) -> Result<f64> {
        if n_max == 0 {
            return Err(Error::InvalidArgument("N_max must be ≥ 1".into()));
        }
        self.check_range(n_max)?;
        let mut acc = CompensatedSum::new();
        let mut best = 0.0f64;
        for n in 1..=n_max {
            acc.push(self.value(n));
            best = best.max(acc.total() / (n as f64).ln_1p());
        }
        Ok(best)
    }

    /// Checks monotonicity and positivity on `[from, to]`.
    pub fn validate_window(&self, from: u64, to: u64) -> Result<()> {
        let from = from.max(1);
        let to = match self.queryable() {
            Some(len) => to.min(len),
            None => to,
        };
        let mut prev = if from > 1 { self.value(from - 1) } else { f64::INFINITY };
        for n in from..=to {
            let v = self.value(n);
            if !(v <= prev) || v < 0.0 || (v == 0.0 && !self.zero_padded()) {
                return Err(Error::InvalidSpectrum(format!(
                    "μ_{n} = {v} breaks positivity or monotonicity (μ_{} = {prev})",
                    n - 1
                )));
            }
            prev = v;
        }
        Ok(())
    }
}

fn check_list(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidSpectrum("empty singular-value list".into()));
    }
    if values[0] <= 0.0 {
        return Err(Error::InvalidSpectrum("μ_1 must be positive".into()));
    }
    let mut prev = f64::INFINITY;
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() || v < 0.0 || v > prev {
            return Err(Error::InvalidSpectrum(format!(
                "μ_{} = {v} is not finite, nonnegative and ≤ μ_{} = {prev}",
                i + 1,
                i
            )));
        }
        prev = v;
    }
    Ok(())
}

/// Up to `count` distinct, roughly log-spaced integers in `[from, to]`.
pub(crate) fn sample_points(from: u64, to: u64, count: usize) -> Vec<u64> {
    let from = from.max(1);
    if to < from {
        return Vec::new();
    }
    let (la, lb) = ((from as f64).ln(), (to as f64).ln());
    let mut out: Vec<u64> = (0..count)
        .map(|i| {
            let t = if count > 1 { i as f64 / (count - 1) as f64 } else { 0.0 };
            ((la + t * (lb - la)).exp().round() as u64).clamp(from, to)
        })
        .collect();
    out.dedup();
    out
}
