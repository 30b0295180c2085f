//! Step functions on `[0, ∞)` and the maps `p` (floor lift), `L⁻¹`
//! (`g ↦ g ∘ exp`) and `E` (unit-interval averages).
//!
//! Integrals are exact: every step function can list its constant pieces on
//! a window, and `L⁻¹` maps a piece `[a, b)` to `[ln a, ln b)` with width
//! `ln(b/a)` computed as `ln_1p((b − a)/a)`.

use super::sequence::BoundedSequence;
use crate::{Error, Result};

/// A constant piece `[start, end)` with its width carried separately so that
/// log-transformed widths keep full precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub width: f64,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub enum StepFunction {
    /// `values[i]` on `[breakpoints[i], breakpoints[i+1])`, the last value
    /// continuing to infinity; zero left of the first breakpoint.
    Pieces { breakpoints: Vec<f64>, values: Vec<f64> },
    /// `p(a)(t) = a_k` on `[k, k+1)`, zero on `[0, 1)`.
    FloorLift(BoundedSequence),
    /// `t ↦ g(e^t)`.
    ExpSubstitute(Box<StepFunction>),
}

impl StepFunction {
    pub fn pieces(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "step function needs matching nonempty breakpoints and values ({} vs {})",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints[0] < 0.0 || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument(
                "breakpoints must be nonnegative and strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("step values must be finite".into()));
        }
        Ok(StepFunction::Pieces { breakpoints, values })
    }

    pub fn constant(c: f64) -> Self {
        StepFunction::Pieces {
            breakpoints: vec![0.0],
            values: vec![c],
        }
    }

    /// Smallest breakpoint.
    pub fn first_breakpoint(&self) -> f64 {
        match self {
            StepFunction::Pieces { breakpoints, .. } => breakpoints[0],
            StepFunction::FloorLift(_) => 1.0,
            StepFunction::ExpSubstitute(g) => g.first_breakpoint().ln(),
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("step functions live on [0, ∞), got t = {t}")));
        }
        match self {
            StepFunction::Pieces { breakpoints, values } => {
                let i = breakpoints.partition_point(|&b| b <= t);
                Ok(if i == 0 { 0.0 } else { values[i - 1] })
            }
            StepFunction::FloorLift(a) => {
                let k = t.floor() as u64;
                if k == 0 {
                    Ok(0.0)
                } else {
                    a.value(k)
                }
            }
            StepFunction::ExpSubstitute(g) => g.eval(t.exp()),
        }
    }

    /// Constant pieces covering `[lo, hi)`, clipped to it.
    pub fn pieces_in(&self, lo: f64, hi: f64) -> Result<Vec<Piece>> {
        let mut out = Vec::new();
        if !(hi > lo) {
            return Ok(out);
        }
        match self {
            StepFunction::Pieces { breakpoints, values } => {
                let first = breakpoints[0];
                if lo < first {
                    let end = hi.min(first);
                    out.push(Piece { start: lo, end, width: end - lo, value: 0.0 });
                }
                for (i, &b) in breakpoints.iter().enumerate() {
                    let next = breakpoints.get(i + 1).copied().unwrap_or(f64::INFINITY);
                    let (s, e) = (b.max(lo), next.min(hi));
                    if e > s {
                        out.push(Piece { start: s, end: e, width: e - s, value: values[i] });
                    }
                }
            }
            StepFunction::FloorLift(a) => {
                if lo < 1.0 {
                    let end = hi.min(1.0);
                    out.push(Piece { start: lo, end, width: end - lo, value: 0.0 });
                }
                let k0 = lo.max(1.0).floor() as u64;
                let k1 = (hi.ceil() as u64).max(k0);
                for k in k0..k1 {
                    let (s, e) = ((k as f64).max(lo), ((k + 1) as f64).min(hi));
                    if e > s {
                        out.push(Piece { start: s, end: e, width: e - s, value: a.value(k)? });
                    }
                }
            }
            StepFunction::ExpSubstitute(g) => {
                for p in g.pieces_in(lo.exp(), hi.exp())? {
                    // clip in t-space so the outer window is exact
                    let s = p.start.ln().max(lo);
                    let e = p.end.ln().min(hi);
                    let width = if s == lo || e == hi { e - s } else { (p.width / p.start).ln_1p() };
                    if width > 0.0 {
                        out.push(Piece { start: s, end: e, width, value: p.value });
                    }
                }
            }
        }
        Ok(out)
    }
}

/// `p(a)`.
pub fn floor_lift(a: &BoundedSequence) -> StepFunction {
    StepFunction::FloorLift(a.clone())
}

/// `L⁻¹(g)(t) = g(e^t)`; `g` must live on `[1, ∞)`.
pub fn exp_substitute(g: &StepFunction) -> Result<StepFunction> {
    let first = g.first_breakpoint();
    if first < 1.0 {
        return Err(Error::Domain(format!(
            "exp substitution needs breakpoints ≥ 1, found {first}"
        )));
    }
    Ok(match g {
        StepFunction::Pieces { breakpoints, values } => StepFunction::Pieces {
            breakpoints: breakpoints.iter().map(|b| b.ln()).collect(),
            values: values.clone(),
        },
        other => StepFunction::ExpSubstitute(Box::new(other.clone())),
    })
}

/// `E_k(f) = ∫_{k−1}^{k} f(t) dt`.
pub fn average_e(f: &StepFunction, k: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("E_k needs k ≥ 1".into()));
    }
    let lo = (k - 1) as f64;
    let hi = k as f64;
    let mut acc = crate::summation::CompensatedSum::new();
    for p in f.pieces_in(lo, hi)? {
        acc.push(p.width * p.value);
    }
    Ok(acc.total())
}

/// `E_k(L⁻¹(p(a))) = Σ_j a_j · |{t ∈ [k−1, k) : e^t ∈ [j, j+1)}|`.
pub fn cal_l_sequence(a: &BoundedSequence, k: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("𝓛 entries are indexed from 1".into()));
    }
    let last = (k as f64).exp().ceil() as u64;
    if let Some(n) = a.available() {
        if n < last.saturating_sub(1) {
            return Err(Error::InsufficientSequenceData { index: last - 1, available: n });
        }
    }
    average_e(&exp_substitute(&floor_lift(a))?, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn averages() {
        assert_eq!(average_e(&StepFunction::constant(2.5), 7).unwrap(), 2.5);
        let chi = StepFunction::pieces(vec![3.0, 3.5], vec![1.0, 0.0]).unwrap();
        assert_eq!(average_e(&chi, 4).unwrap(), 0.5);
        let nat = BoundedSequence::new(|k| k as f64, 1e9).unwrap();
        assert_eq!(average_e(&floor_lift(&nat), 3).unwrap(), 2.0);
        assert_eq!(average_e(&floor_lift(&nat), 1).unwrap(), 0.0);
    }

    #[test]
    fn floor_lift_pointwise() {
        let a = BoundedSequence::new(|k| ((k * 7919) % 13) as f64, 12.0).unwrap();
        let p = floor_lift(&a);
        for k in 1..=10_000u64 {
            assert_eq!(p.eval(k as f64 + 0.5).unwrap(), a.get(k));
        }
        let c = floor_lift(&BoundedSequence::constant(4.0));
        assert_eq!(c.eval(17.2).unwrap(), 4.0);
    }

    #[test]
    fn exp_substitution() {
        let c = exp_substitute(&StepFunction::pieces(vec![1.0], vec![3.0]).unwrap()).unwrap();
        assert_eq!(c.eval(5.0).unwrap(), 3.0);
        let g = StepFunction::pieces(vec![1.0, std::f64::consts::E], vec![1.0, 2.0]).unwrap();
        match exp_substitute(&g).unwrap() {
            StepFunction::Pieces { breakpoints, .. } => assert_eq!(breakpoints, vec![0.0, 1.0]),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            exp_substitute(&StepFunction::pieces(vec![0.5], vec![1.0]).unwrap()),
            Err(Error::Domain(_))
        ));
        // composite on a grid against direct evaluation
        let a = BoundedSequence::new(|k| (k as f64).sqrt().sin(), 1.0).unwrap();
        let l = exp_substitute(&floor_lift(&a)).unwrap();
        for i in 0..2000 {
            let t = i as f64 * 0.005;
            assert_eq!(l.eval(t).unwrap(), a.get(t.exp().floor() as u64));
        }
        assert!(exp_substitute(&l).is_err());
    }

    #[test]
    fn cal_l_examples() {
        let delta = BoundedSequence::finite(vec![1.0]);
        assert!((cal_l_sequence(&delta, 1).unwrap() - std::f64::consts::LN_2).abs() < 1e-16);
        assert_eq!(cal_l_sequence(&delta, 2).unwrap(), 0.0);
        let c = BoundedSequence::constant(0.3);
        for k in 1..15 {
            assert!((cal_l_sequence(&c, k).unwrap() - 0.3).abs() < 1e-14);
        }
        let finite = BoundedSequence::finite(vec![1.0; 30]);
        assert!(cal_l_sequence(&finite, 3).unwrap() > 0.0);
        for k in 5..12 {
            assert_eq!(cal_l_sequence(&finite, k).unwrap(), 0.0);
        }
        let short = BoundedSequence::from_values(vec![1.0; 10]);
        assert!(matches!(cal_l_sequence(&short, 3), Err(Error::InsufficientSequenceData { .. })));
    }

    #[test]
    fn cal_l_matches_log_length_weights() {
        // direct Σ_j a_j (ln min(j+1, e^k) − ln max(j, e^{k−1}))
        let a = BoundedSequence::new(|k| 1.0 / k as f64, 1.0).unwrap();
        for k in 1..10u64 {
            let (lo, hi) = (((k - 1) as f64).exp(), (k as f64).exp());
            let mut want = 0.0;
            for j in lo.floor() as u64..=hi.ceil() as u64 {
                let s = (j as f64).max(lo);
                let e = ((j + 1) as f64).min(hi);
                if e > s && j >= 1 {
                    want += a.get(j) * (e.ln() - s.ln());
                }
            }
            let got = cal_l_sequence(&a, k).unwrap();
            assert!((got - want).abs() < 1e-12, "k = {k}: {got} vs {want}");
        }
    }
}
