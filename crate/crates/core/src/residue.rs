//! Two routes to the Dixmier trace of `AT` for diagonal `A`.
//!
//! The residue route samples `r_k = (1/k) ζ_{A,T}(1 + 1/k)` along a ladder
//! of `k`, i.e. `(s − 1) ζ_{A,T}(s)` at `s = 1 + 1/k`, and extrapolates to
//! `s → 1⁺`. The log-average route applies the limit surrogate to
//! `γ_N(AT)`; it needs the singular values of `AT`, which for a nonnegative
//! diagonal are the products `diag(m) μ_m` re-sorted.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exec::map_ordered;
use crate::fit::polyfit;
use crate::genlimits::{from_samples, Acceleration, Estimate, Ladder, LimitEstimate, LimitPlan, Method};
use crate::spectral::{zeta, DiagonalObservable, DiagonalTail, EigenvalueSequence, ZetaPoint, ZetaSamples};
use crate::summation::{CompensatedSum, SumPlan};
use crate::{Error, Result};

/// Largest number of products materialized by the log-average route for a
/// non-constant diagonal.
pub const MAX_MATERIALIZED: u64 = 1 << 24;

/// How far into a diagonal positivity is sampled before trusting it.
const SIGN_CHECK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResiduePlan {
    /// Ladder of `k` for the residue curve and of `N` for `γ_N`.
    pub ladder: Ladder,
    /// Relative threshold for convergence and extrapolation checks.
    pub threshold: f64,
    /// Absolute error target for curve points when `T` is a closed-form law.
    pub point_tolerance: f64,
    /// Largest acceptable curve-point error when `T` is data-backed.
    pub data_tolerance: f64,
    /// Degree of the polynomial in `h = s − 1` used for extrapolation.
    pub extrapolation_order: usize,
}

impl Default for ResiduePlan {
    fn default() -> Self {
        Self {
            ladder: Ladder::default(),
            threshold: 1e-3,
            point_tolerance: 1e-4,
            data_tolerance: 1e-2,
            extrapolation_order: 2,
        }
    }
}

impl ResiduePlan {
    pub fn validate(&self) -> Result<()> {
        self.ladder.validate()?;
        for (name, v) in [
            ("threshold", self.threshold),
            ("point_tolerance", self.point_tolerance),
            ("data_tolerance", self.data_tolerance),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if self.extrapolation_order == 0 {
            return Err(Error::InvalidArgument("extrapolation order must be ≥ 1".into()));
        }
        Ok(())
    }

    fn limit_plan(&self, acceleration: Option<Acceleration>) -> LimitPlan {
        LimitPlan {
            ladder: self.ladder,
            threshold: self.threshold,
            cesaro_order: 0,
            acceleration,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResiduePoint {
    pub k: u64,
    pub s: f64,
    /// `(1/k) ζ_{A,T}(1 + 1/k)`.
    pub value: Complex64,
    pub error: f64,
    pub terms: u64,
}

/// One CSV row `(k, s, value, error)`; `value` is the real part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub k: u64,
    pub s: f64,
    pub value: f64,
    pub error: f64,
}

/// Residue samples with `k` increasing, so `s` decreases toward 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidueCurve {
    points: Vec<ResiduePoint>,
}

impl ResidueCurve {
    pub fn new(mut points: Vec<ResiduePoint>) -> Result<Self> {
        points.sort_by_key(|p| p.k);
        if points.windows(2).any(|w| w[0].k == w[1].k) || points.iter().any(|p| p.k == 0 || !(p.error >= 0.0)) {
            return Err(Error::InvalidArgument(
                "residue curve needs distinct k ≥ 1 and nonnegative errors".into(),
            ));
        }
        Ok(Self { points })
    }

    /// Curve through given `(h, value, error)` triples, `k = round(1/h)`.
    pub fn from_h(samples: &[(f64, f64, f64)]) -> Result<Self> {
        let points = samples
            .iter()
            .map(|&(h, v, e)| ResiduePoint {
                k: (1.0 / h).round() as u64,
                s: 1.0 + h,
                value: v.into(),
                error: e,
                terms: 0,
            })
            .collect();
        Self::new(points)
    }

    pub fn points(&self) -> &[ResiduePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn rows(&self) -> Vec<CurveRow> {
        self.points
            .iter()
            .map(|p| CurveRow { k: p.k, s: p.s, value: p.value.re, error: p.error })
            .collect()
    }

    /// The underlying `ζ_{A,T}(s)` samples (values scaled back by `k`).
    pub fn zeta_samples(&self) -> Result<ZetaSamples> {
        ZetaSamples::new(
            self.points
                .iter()
                .map(|p| ZetaPoint {
                    s: p.s,
                    value: p.value * p.k as f64,
                    error: p.error * p.k as f64,
                    terms: p.terms,
                })
                .collect(),
        )
    }

    fn part(&self, imaginary: bool) -> Vec<(u64, f64)> {
        self.points
            .iter()
            .map(|p| (p.k, if imaginary { p.value.im } else { p.value.re }))
            .collect()
    }

    fn errors(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.error).collect()
    }
}

/// `γ_N(AT)` samples; CSV rows `(N, gamma_N)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaCurve {
    pub points: Vec<GammaRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaRow {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "gamma_N")]
    pub gamma_n: f64,
}

pub fn residue_curve(
    a: &DiagonalObservable,
    t: &EigenvalueSequence,
    plan: &ResiduePlan,
    sum: &SumPlan,
) -> Result<ResidueCurve> {
    plan.validate()?;
    let per_point = if t.available().is_some() { plan.data_tolerance } else { plan.point_tolerance };
    let inner = SumPlan { execution: crate::exec::Execution::Sequential, ..*sum };
    let points = map_ordered(sum.execution, plan.ladder.points(), |k| {
        let s = 1.0 + 1.0 / k as f64;
        let kf = k as f64;
        zeta(a, t, s, per_point * kf, &inner).map(|z| ResiduePoint {
            k,
            s,
            value: z.value / kf,
            error: z.error / kf,
            terms: z.terms,
        })
    });
    ResidueCurve::new(points.into_iter().collect::<Result<_>>()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub value: f64,
    pub error: f64,
}

/// Fits `value + Σ_{i≤order} c_i h^i` to the curve (real part) by least
/// squares and returns the intercept.
///
/// With more than `order + 2` points the fit is repeated on the half nearest
/// `h = 0`; the two intercepts must agree within `tolerance` and both fits
/// must leave residuals below `tolerance / 10`, otherwise the fit is
/// rejected with the raw `[min, max]` of the curve.
pub fn richardson_extrapolate(curve: &ResidueCurve, order: usize, tolerance: f64) -> Result<Extrapolation> {
    let pts = curve.points();
    if pts.len() < 3 || pts.len() < order + 1 {
        return Err(Error::InvalidArgument(format!(
            "extrapolation of order {order} needs at least {} points, got {}",
            (order + 1).max(3),
            pts.len()
        )));
    }
    let ys: Vec<f64> = pts.iter().map(|p| p.value.re).collect();
    let errs = curve.errors();
    let lo = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max_err = errs.iter().copied().fold(0.0, f64::max);
    if lo == hi {
        return Ok(Extrapolation { value: lo, error: max_err });
    }
    let unreliable = || Error::ExtrapolationUnreliable { lo: lo - max_err, hi: hi + max_err };
    let hs: Vec<f64> = pts.iter().map(|p| p.s - 1.0).collect();
    let tolerance = tolerance * hi.abs().max(lo.abs()).max(1.0);
    let full = polyfit(&hs, &ys, order).map_err(|_| unreliable())?;
    let value = full.intercept();
    let mut error = full.max_residual + full.propagate(&errs);
    if pts.len() >= order + 3 {
        // points are ordered by k, so the tail holds the smallest h
        let half = (pts.len() / 2).min(pts.len() - order - 1);
        let near = polyfit(&hs[half..], &ys[half..], order).map_err(|_| unreliable())?;
        let disagreement = (near.intercept() - value).abs();
        let residual = full.max_residual.max(near.max_residual);
        if disagreement > tolerance || residual > 0.1 * tolerance {
            return Err(unreliable());
        }
        error += disagreement;
    } else {
        // no room for a cross-check: size of the top term at the nearest point
        let h_min = hs.iter().copied().fold(f64::INFINITY, f64::min);
        error += full.coefficients[order].abs() * h_min.powi(order as i32);
    }
    if !error.is_finite() {
        return Err(unreliable());
    }
    Ok(Extrapolation { value, error })
}

/// Limit of the residue curve (real part). Extrapolation to `h = 0` is used
/// when it passes its reliability checks; otherwise the ladder surrogate.
pub fn dixmier_residue(
    a: &DiagonalObservable,
    t: &EigenvalueSequence,
    plan: &ResiduePlan,
    sum: &SumPlan,
) -> Result<LimitEstimate> {
    Ok(residue_route(a, t, plan, sum)?.1)
}

/// [`dixmier_residue`] together with the curve it was read from.
pub fn residue_route(
    a: &DiagonalObservable,
    t: &EigenvalueSequence,
    plan: &ResiduePlan,
    sum: &SumPlan,
) -> Result<(ResidueCurve, LimitEstimate)> {
    let curve = residue_curve(a, t, plan, sum)?;
    let est = residue_limit(&curve, false, plan)?;
    let est = if a.is_real_nonnegative(SIGN_CHECK) { clamp_nonnegative(est) } else { est };
    Ok((curve, est))
}

/// Real and imaginary parts of the residue-route limit.
pub fn dixmier_residue_complex(
    a: &DiagonalObservable,
    t: &EigenvalueSequence,
    plan: &ResiduePlan,
    sum: &SumPlan,
) -> Result<(LimitEstimate, LimitEstimate)> {
    let curve = residue_curve(a, t, plan, sum)?;
    Ok((residue_limit(&curve, false, plan)?, residue_limit(&curve, true, plan)?))
}

/// The limit decision on an already computed curve.
pub fn residue_limit(curve: &ResidueCurve, imaginary: bool, plan: &ResiduePlan) -> Result<LimitEstimate> {
    let samples = curve.part(imaginary);
    let errors = curve.errors();
    let raw = from_samples(&samples, &errors, &plan.limit_plan(None))?;
    let part = if imaginary {
        let flipped: Vec<ResiduePoint> = curve
            .points()
            .iter()
            .map(|p| ResiduePoint { value: p.value.im.into(), ..*p })
            .collect();
        ResidueCurve::new(flipped)?
    } else {
        curve.clone()
    };
    match richardson_extrapolate(&part, plan.extrapolation_order, plan.threshold) {
        Ok(x) => Ok(LimitEstimate {
            estimate: Estimate::Converged { value: x.value, error: x.error },
            method: Method {
                acceleration: Some(Acceleration::Inverse),
                ..raw.method.clone()
            },
            observed: raw.observed,
        }),
        Err(_) => Ok(raw),
    }
}

/// Log-average route for a real nonnegative diagonal.
///
/// A constant diagonal `c` gives `c · γ(T)`. Otherwise the products
/// `diag(m) μ_m`, `m ≤ M`, are sorted; the leading ones that exceed every
/// product beyond `M` (at most `bound · μ_{M+1}`) are certified to be the
/// top singular values of `AT`, and `γ_N` is evaluated on that prefix.
pub fn dixmier_log_average(
    a: &DiagonalObservable,
    t: &EigenvalueSequence,
    plan: &ResiduePlan,
    sum: &SumPlan,
) -> Result<LimitEstimate> {
    Ok(log_average_curve(a, t, plan, sum)?.1)
}

/// The log-average estimate together with the `γ_N` samples it used.
pub fn log_average_curve(
    a: &DiagonalObservable,
    t: &EigenvalueSequence,
    plan: &ResiduePlan,
    sum: &SumPlan,
) -> Result<(GammaCurve, LimitEstimate)> {
    plan.validate()?;
    if !a.is_real_nonnegative(SIGN_CHECK) {
        return Err(Error::LogAverageUnavailable(
            "the diagonal is signed or complex; use the residue route".into(),
        ));
    }
    let (points, gammas) = match a.constant_value() {
        Some(c) if t.is_finite_rank() => {
            // γ_N = (Σ_{n ≤ min(N, len)} μ_n) / ln(1+N) once the data runs out
            let len = t.available().expect("finite rank means data");
            let points = plan.ladder.points();
            let clipped: Vec<u64> = points.iter().map(|&n| n.min(len)).collect();
            let g = t.gamma_at(&clipped, sum)?;
            let g = g
                .into_iter()
                .zip(&points)
                .zip(&clipped)
                .map(|((x, &n), &m)| c.re * x * (m as f64).ln_1p() / (n as f64).ln_1p())
                .collect();
            (points, g)
        }
        Some(c) => {
            let points = capped_ladder(&plan.ladder, t.queryable());
            let g = t.gamma_at(&points, sum)?;
            (points, g.into_iter().map(|x| c.re * x).collect::<Vec<_>>())
        }
        None => sorted_products_gamma(a, t, &plan.ladder)?,
    };
    if points.len() < 2 {
        return Err(Error::LogAverageUnavailable(format!(
            "only {} ladder points fall inside the certified range of AT",
            points.len()
        )));
    }
    let samples: Vec<(u64, f64)> = points.iter().copied().zip(gammas.iter().copied()).collect();
    let est = from_samples(&samples, &[], &plan.limit_plan(Some(Acceleration::InverseLog)))?;
    let curve = GammaCurve {
        points: samples.iter().map(|&(n, g)| GammaRow { n, gamma_n: g }).collect(),
    };
    Ok((curve, clamp_nonnegative(est)))
}

fn capped_ladder(ladder: &Ladder, limit: Option<u64>) -> Vec<u64> {
    match limit {
        Some(n) => ladder.capped(n),
        None => ladder.points(),
    }
}

fn sorted_products_gamma(
    a: &DiagonalObservable,
    t: &EigenvalueSequence,
    ladder: &Ladder,
) -> Result<(Vec<u64>, Vec<f64>)> {
    let finite_support = match a.tail() {
        DiagonalTail::Vanishing { from } => Some(from.saturating_sub(1)),
        _ => None,
    };
    let mut m = (4 * ladder.n_max).min(MAX_MATERIALIZED);
    if let Some(len) = t.queryable() {
        m = m.min(len);
    }
    if let Some(f) = finite_support {
        m = m.min(f.max(1));
    }
    let beyond = if finite_support.is_some_and(|f| f <= m) {
        0.0
    } else {
        a.bound() * mu_beyond(t, m)?
    };
    let mut products: Vec<f64> = (1..=m).map(|n| a.value(n).re * t.mu(n).unwrap_or(0.0)).collect();
    products.sort_by(|x, y| y.total_cmp(x));
    let certified = if beyond == 0.0 {
        // nothing beyond M contributes: γ_N is known for every N
        u64::MAX
    } else {
        products.partition_point(|&v| v >= beyond) as u64
    };
    let points = capped_ladder(ladder, Some(certified));
    let mut out = Vec::with_capacity(points.len());
    let mut acc = CompensatedSum::new();
    let mut n = 0u64;
    for &p in &points {
        while n < p {
            acc.push(products.get(n as usize).copied().unwrap_or(0.0));
            n += 1;
        }
        out.push(acc.total() / (p as f64).ln_1p());
    }
    Ok((points, out))
}

/// An upper bound for `μ_n`, `n > m`.
fn mu_beyond(t: &EigenvalueSequence, m: u64) -> Result<f64> {
    match t.queryable() {
        Some(len) if m >= len => match t.tail() {
            Some(d) => Ok(d.bound(m + 1)),
            None => Ok(0.0),
        },
        _ => t.mu(m + 1),
    }
}

fn clamp_nonnegative(mut e: LimitEstimate) -> LimitEstimate {
    e.estimate = match e.estimate {
        Estimate::Converged { value, error } => Estimate::Converged { value: value.max(0.0), error },
        Estimate::Band { lo, hi } => Estimate::Band { lo: lo.max(0.0), hi: hi.max(0.0) },
    };
    e
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Measurable { value: f64, error: f64 },
    NonMeasurable { lo: f64, hi: f64 },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Routes {
    pub residue: LimitEstimate,
    pub log_average: Option<LimitEstimate>,
    /// Why the log-average route was skipped.
    pub log_average_note: Option<String>,
    /// `|residue − log-average|` when both converged.
    pub difference: Option<f64>,
    /// Combined error allowance the difference is compared with.
    pub allowance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurabilityReport {
    pub verdict: Verdict,
    pub routes: Routes,
    #[serde(skip)]
    pub residue_curve: ResidueCurve,
    #[serde(skip)]
    pub gamma_curve: Option<GammaCurve>,
}

/// Runs both routes (the log-average one when applicable) and classifies.
///
/// `measurable` needs a converged residue route that agrees with a
/// converged log-average route, if present. `non-measurable` needs bands on
/// every available route, each wider than three times its error budget, and
/// pairwise overlapping. Anything else is `inconclusive`.
pub fn measurability_diagnostic(
    a: &DiagonalObservable,
    t: &EigenvalueSequence,
    plan: &ResiduePlan,
    sum: &SumPlan,
) -> Result<MeasurabilityReport> {
    let curve = residue_curve(a, t, plan, sum)?;
    let mut residue = residue_limit(&curve, false, plan)?;
    if a.is_real_nonnegative(SIGN_CHECK) {
        residue = clamp_nonnegative(residue);
    }
    let residue_budget = budget(&residue, curve.errors().into_iter().fold(0.0, f64::max), plan.threshold);
    let (gamma_curve, log_average, note) = match log_average_curve(a, t, plan, sum) {
        Ok((g, e)) => (Some(g), Some(e), None),
        Err(e @ (Error::LogAverageUnavailable(_) | Error::InsufficientSpectralData { .. })) => {
            (None, None, Some(e.to_string()))
        }
        Err(e) => return Err(e),
    };
    let mut routes = Routes {
        residue: residue.clone(),
        log_average: log_average.clone(),
        log_average_note: note,
        difference: None,
        allowance: None,
    };
    let verdict = match (&residue.estimate, log_average.as_ref().map(|e| &e.estimate)) {
        (Estimate::Converged { value, error }, None) => Verdict::Measurable { value: *value, error: *error },
        (Estimate::Converged { value: r, error: er }, Some(Estimate::Converged { value: l, error: el })) => {
            let diff = (r - l).abs();
            let allowance = er + el + plan.threshold * r.abs().max(1.0);
            routes.difference = Some(diff);
            routes.allowance = Some(allowance);
            if diff <= allowance {
                Verdict::Measurable { value: *r, error: er.max(diff) }
            } else {
                Verdict::Inconclusive
            }
        }
        (Estimate::Band { lo, hi }, other) => {
            let wide_residue = hi - lo > 3.0 * residue_budget;
            match (other, &log_average) {
                (None, _) if wide_residue => Verdict::NonMeasurable { lo: *lo, hi: *hi },
                (Some(Estimate::Band { lo: l2, hi: h2 }), Some(la)) => {
                    let wide_log = h2 - l2 > 3.0 * budget(la, 0.0, plan.threshold);
                    if wide_residue && wide_log && residue.overlaps(la) {
                        Verdict::NonMeasurable { lo: lo.min(*l2), hi: hi.max(*h2) }
                    } else {
                        Verdict::Inconclusive
                    }
                }
                _ => Verdict::Inconclusive,
            }
        }
        _ => Verdict::Inconclusive,
    };
    Ok(MeasurabilityReport { verdict, routes, residue_curve: curve, gamma_curve })
}

/// Total error budget of a route: sample error plus the convergence threshold.
fn budget(e: &LimitEstimate, point_error: f64, threshold: f64) -> f64 {
    let (lo, hi) = e.observed;
    point_error + threshold * lo.abs().max(hi.abs()).max(1.0)
}

/// `0/1` diagonal `P = Σ_{m ∈ S} P_m` for spectral-measurability checks of
/// `PT`; the indicator must be eventually constant from `from` on.
pub fn diagonal_projection(
    indicator: impl Fn(u64) -> bool + Send + Sync + 'static,
    eventually: bool,
    from: u64,
) -> Result<DiagonalObservable> {
    let tail = if eventually {
        DiagonalTail::Limit { value: Complex64::ONE, amplitude: 0.0, rate: 1.0, from }
    } else {
        DiagonalTail::Vanishing { from }
    };
    let p = DiagonalObservable::new(move |m| if indicator(m) { Complex64::ONE } else { Complex64::ZERO }, 1.0, tail)?;
    p.validate(from.saturating_mul(2).max(1 << 12))?;
    Ok(p.with_label("projection"))
}
