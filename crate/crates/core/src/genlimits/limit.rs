//! Generalized-limit surrogates: a value when the tail of a geometric ladder
//! of (Cesàro-averaged) samples settles, an observed `[lo, hi]` band when it
//! does not.

use serde::{Deserialize, Serialize};

use super::cesaro::cesaro_means_at;
use super::sequence::BoundedSequence;
use crate::fit::polyfit;
use crate::summation::SumPlan;
use crate::{Error, Result};

/// Geometric sample points `n_min · ratio^i ≤ n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ladder {
    pub n_min: u64,
    pub n_max: u64,
    pub ratio: f64,
}

impl Default for Ladder {
    fn default() -> Self {
        Self {
            n_min: 1 << 10,
            n_max: 1 << 26,
            ratio: 2.0,
        }
    }
}

impl Ladder {
    pub fn new(n_min: u64, n_max: u64, ratio: f64) -> Result<Self> {
        let l = Self { n_min, n_max, ratio };
        l.validate()?;
        Ok(l)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_min == 0 || self.n_min >= self.n_max || !(self.ratio > 1.0 && self.ratio.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "ladder needs 1 ≤ N_min < N_max and ratio > 1, got {} / {} / {}",
                self.n_min, self.n_max, self.ratio
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let mut x = self.n_min as f64;
        while x <= self.n_max as f64 * (1.0 + 1e-12) {
            let n = (x.round() as u64).min(self.n_max);
            if out.last() != Some(&n) {
                out.push(n);
            }
            x *= self.ratio;
        }
        out
    }

    /// The ladder restricted to points `≤ n`.
    pub fn capped(&self, n: u64) -> Vec<u64> {
        self.points().into_iter().filter(|&p| p <= n).collect()
    }
}

/// Extrapolation variable used to accelerate slowly settling samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Acceleration {
    /// Samples behave like `L + c/ln(1+N) + …`.
    InverseLog,
    /// Samples behave like `L + c/N + …`.
    Inverse,
}

impl Acceleration {
    fn variable(self, n: f64) -> f64 {
        match self {
            Acceleration::InverseLog => 1.0 / n.ln_1p(),
            Acceleration::Inverse => 1.0 / n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitPlan {
    pub ladder: Ladder,
    /// Relative convergence threshold (relative to `max(1, |value|)`).
    pub threshold: f64,
    pub cesaro_order: u32,
    pub acceleration: Option<Acceleration>,
}

impl Default for LimitPlan {
    fn default() -> Self {
        Self {
            ladder: Ladder::default(),
            threshold: 1e-3,
            cesaro_order: 1,
            acceleration: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Estimate {
    Converged { value: f64, error: f64 },
    Band { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Method {
    pub cesaro_order: u32,
    pub acceleration: Option<Acceleration>,
    /// First and last ladder index of the tail window.
    pub window: (u64, u64),
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    #[serde(flatten)]
    pub estimate: Estimate,
    pub method: Method,
    /// `[min, max]` of the tail samples.
    pub observed: (f64, f64),
}

impl LimitEstimate {
    pub fn converged(value: f64, error: f64, method: Method) -> Self {
        Self {
            estimate: Estimate::Converged { value, error },
            method,
            observed: (value, value),
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self.estimate, Estimate::Converged { .. })
    }

    pub fn value(&self) -> Option<f64> {
        match self.estimate {
            Estimate::Converged { value, .. } => Some(value),
            Estimate::Band { .. } => None,
        }
    }

    /// `[value − error, value + error]` or the band.
    pub fn interval(&self) -> (f64, f64) {
        match self.estimate {
            Estimate::Converged { value, error } => (value - error, value + error),
            Estimate::Band { lo, hi } => (lo, hi),
        }
    }

    pub fn width(&self) -> f64 {
        let (lo, hi) = self.interval();
        hi - lo
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.interval();
        lo <= x && x <= hi
    }

    pub fn overlaps(&self, other: &LimitEstimate) -> bool {
        let (a, b) = self.interval();
        let (c, d) = other.interval();
        a <= d && c <= b
    }

    /// Multiplies by a real constant, flipping bands for negative factors.
    pub fn scaled(&self, c: f64) -> Self {
        let estimate = match self.estimate {
            Estimate::Converged { value, error } => Estimate::Converged {
                value: c * value,
                error: c.abs() * error,
            },
            Estimate::Band { lo, hi } => {
                let (x, y) = (c * lo, c * hi);
                Estimate::Band { lo: x.min(y), hi: x.max(y) }
            }
        };
        let (x, y) = (c * self.observed.0, c * self.observed.1);
        Self {
            estimate,
            method: self.method.clone(),
            observed: (x.min(y), x.max(y)),
        }
    }
}

/// Limit estimate of `a` sampled on the plan's ladder after Cesàro averaging.
/// Ladder points past the sequence's data are dropped.
pub fn limit_estimate(a: &BoundedSequence, plan: &LimitPlan, sum: &SumPlan) -> Result<LimitEstimate> {
    plan.ladder.validate()?;
    let points = match a.available() {
        Some(n) => plan.ladder.capped(n),
        None => plan.ladder.points(),
    };
    if points.len() < 2 {
        return Err(Error::InsufficientSequenceData {
            index: plan.ladder.n_min.max(2),
            available: a.available().unwrap_or(0),
        });
    }
    // past a finite support the raw tail is identically zero, which every
    // generalized limit sees; Cesàro means would only approach it like 1/N
    let order = match a.support() {
        Some(k) if k < points[points.len() / 2] => 0,
        _ => plan.cesaro_order,
    };
    let values = cesaro_means_at(a, order, &points, sum)?;
    let samples: Vec<(u64, f64)> = points.into_iter().zip(values).collect();
    from_samples(
        &samples,
        &[],
        &LimitPlan {
            cesaro_order: order,
            ..*plan
        },
    )
}

/// The convergence decision on precomputed samples `(N, value)` sorted by
/// `N`, with optional per-sample error bounds.
pub fn from_samples(samples: &[(u64, f64)], errors: &[f64], plan: &LimitPlan) -> Result<LimitEstimate> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "a limit estimate needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let err_at = |i: usize| errors.get(i).copied().unwrap_or(0.0);
    let half = samples.len() / 2;
    let tail = &samples[half..];
    let lo = tail.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let hi = tail.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let point_err = (half..samples.len()).map(err_at).fold(0.0, f64::max);
    let last = samples[samples.len() - 1].1;
    let method = Method {
        cesaro_order: plan.cesaro_order,
        acceleration: None,
        window: (tail[0].0, tail[tail.len() - 1].0),
        samples: samples.len(),
    };
    let observed = (lo, hi);
    let tolerance = plan.threshold * last.abs().max(1.0);
    if hi - lo <= tolerance {
        return Ok(LimitEstimate {
            estimate: Estimate::Converged {
                value: last,
                error: hi - lo + point_err,
            },
            method,
            observed,
        });
    }
    if let Some(acc) = plan.acceleration {
        if let Some((value, error)) = accelerate(samples, errors, acc, plan.threshold) {
            return Ok(LimitEstimate {
                estimate: Estimate::Converged { value, error },
                method: Method {
                    acceleration: Some(acc),
                    ..method
                },
                observed,
            });
        }
    }
    Ok(LimitEstimate {
        estimate: Estimate::Band {
            lo: lo - point_err,
            hi: hi + point_err,
        },
        method,
        observed,
    })
}

/// Quadratic fits in the acceleration variable over the full ladder and
/// over its last half; accepted when the intercepts agree and both fits
/// leave small residuals.
fn accelerate(samples: &[(u64, f64)], errors: &[f64], acc: Acceleration, threshold: f64) -> Option<(f64, f64)> {
    if samples.len() < 6 {
        return None;
    }
    let xs: Vec<f64> = samples.iter().map(|s| acc.variable(s.0 as f64)).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let errs: Vec<f64> = (0..samples.len()).map(|i| errors.get(i).copied().unwrap_or(0.0)).collect();
    let half = samples.len() / 2;
    let full = polyfit(&xs, &ys, 2).ok()?;
    let tail = polyfit(&xs[half..], &ys[half..], 2).ok()?;
    let value = tail.intercept();
    let tolerance = threshold * value.abs().max(1.0);
    let disagreement = (full.intercept() - value).abs();
    let residual = full.max_residual.max(tail.max_residual);
    if disagreement > tolerance || residual > 0.1 * tolerance {
        return None;
    }
    Some((value, disagreement + residual + tail.propagate(&errs[half..])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::BlockLayout;

    fn small_plan() -> LimitPlan {
        LimitPlan {
            ladder: Ladder::new(1 << 10, 1 << 20, 2.0).unwrap(),
            ..LimitPlan::default()
        }
    }

    #[test]
    fn ladder_points() {
        assert_eq!(Ladder::new(4, 64, 2.0).unwrap().points(), vec![4, 8, 16, 32, 64]);
        assert_eq!(Ladder::default().points().len(), 17);
        assert!(Ladder::new(8, 8, 2.0).is_err());
        assert!(Ladder::new(1, 8, 1.0).is_err());
    }

    #[test]
    fn convergent_and_cesaro_summable() {
        let sum = SumPlan::default();
        let a = BoundedSequence::new(|k| 0.7 + 1.0 / k as f64, 1.7).unwrap();
        let e = limit_estimate(&a, &small_plan(), &sum).unwrap();
        assert!(e.is_converged());
        assert!((e.value().unwrap() - 0.7).abs() < 1e-3);
        let alt = BoundedSequence::new(|k| if k % 2 == 0 { 1.0 } else { -1.0 }, 1.0).unwrap();
        let e = limit_estimate(&alt, &small_plan(), &sum).unwrap();
        assert_eq!(e.value(), Some(0.0));
    }

    #[test]
    fn log_log_blocks_give_a_band() {
        // value 1.5 on even blocks of 2^{2^j}, 0.5 on odd ones
        let layout = BlockLayout::new(1.0, 2.0).unwrap();
        let a = BoundedSequence::new(
            move |k| {
                let j = layout.block_of(k);
                if j < 0 || j % 2 == 0 { 1.5 } else { 0.5 }
            },
            1.5,
        )
        .unwrap();
        let e = limit_estimate(&a, &LimitPlan::default(), &SumPlan::default()).unwrap();
        let (lo, hi) = e.interval();
        assert!(!e.is_converged());
        assert!(lo >= 0.5 && hi <= 1.5 && hi - lo >= 0.1, "[{lo}, {hi}]");
        // C¹ at 2^18 and 2^26 by exact block counting
        assert!((lo - 1.2509307861328125).abs() < 1e-12, "{lo}");
        assert!((hi - 1.4990270733833313).abs() < 1e-12, "{hi}");
    }

    #[test]
    fn finite_support_converges_to_zero() {
        let a = BoundedSequence::finite(vec![5.0; 100]);
        let e = limit_estimate(&a, &small_plan(), &SumPlan::default()).unwrap();
        assert!(e.is_converged());
        assert!(e.value().unwrap().abs() < 1e-3);
    }

    #[test]
    fn inverse_log_acceleration() {
        let samples: Vec<(u64, f64)> = Ladder::default()
            .points()
            .into_iter()
            .map(|n| (n, 1.0 + 0.5772 / (n as f64).ln_1p()))
            .collect();
        let plain = from_samples(&samples, &[], &LimitPlan::default()).unwrap();
        assert!(!plain.is_converged());
        let plan = LimitPlan {
            acceleration: Some(Acceleration::InverseLog),
            ..LimitPlan::default()
        };
        let acc = from_samples(&samples, &[], &plan).unwrap();
        assert!((acc.value().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn scaling_flips_bands() {
        let e = LimitEstimate {
            estimate: Estimate::Band { lo: 1.0, hi: 2.0 },
            method: Method {
                cesaro_order: 1,
                acceleration: None,
                window: (1, 2),
                samples: 2,
            },
            observed: (1.0, 2.0),
        };
        assert_eq!(e.scaled(-1.0).interval(), (-2.0, -1.0));
        let json = serde_json::to_value(&e).unwrap();
        assert_eq!(json["status"], "band");
        assert_eq!(json["lo"], 1.0);
    }
}
