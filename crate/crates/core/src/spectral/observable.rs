//! Diagonal matrix elements `m ↦ ⟨h_m, A h_m⟩` of a bounded operator in the
//! eigenbasis of `T`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::blocks::BlockLayout;
use super::sequence::sample_points;
use crate::{Error, Result};

type Rule = Arc<dyn Fn(u64) -> Complex64 + Send + Sync>;

/// What is known about `diag(m)` for large `m`. Zeta tails beyond a finite
/// window can only be certified through this.
#[derive(Debug, Clone, PartialEq)]
pub enum DiagonalTail {
    Unknown,
    /// `diag(m) = 0` for `m ≥ from`.
    Vanishing { from: u64 },
    /// `|diag(m) − value| ≤ amplitude · m^{-rate}` for `m ≥ from`.
    Limit {
        value: Complex64,
        amplitude: f64,
        rate: f64,
        from: u64,
    },
    /// `diag(m)` equals `even` on even blocks (and below the first boundary)
    /// and `odd` on odd blocks of the layout.
    Blocks {
        layout: BlockLayout,
        even: Complex64,
        odd: Complex64,
    },
}

impl DiagonalTail {
    fn map_values(&self, f: impl Fn(Complex64) -> Complex64) -> DiagonalTail {
        match self.clone() {
            DiagonalTail::Limit {
                value,
                amplitude,
                rate,
                from,
            } => DiagonalTail::Limit {
                value: f(value),
                amplitude,
                rate,
                from,
            },
            DiagonalTail::Blocks { layout, even, odd } => DiagonalTail::Blocks {
                layout,
                even: f(even),
                odd: f(odd),
            },
            other => other,
        }
    }

    /// As a limit envelope, when it is one (vanishing tails have limit 0).
    fn as_limit(&self) -> Option<(Complex64, f64, f64, u64)> {
        match *self {
            DiagonalTail::Vanishing { from } => Some((Complex64::ZERO, 0.0, 1.0, from)),
            DiagonalTail::Limit {
                value,
                amplitude,
                rate,
                from,
            } => Some((value, amplitude, rate, from)),
            _ => None,
        }
    }
}

/// A bounded diagonal `m ↦ diag(m)` (`m ≥ 1`) with `|diag(m)| ≤ bound`.
#[derive(Clone)]
pub struct DiagonalObservable {
    rule: Rule,
    bound: f64,
    tail: DiagonalTail,
    label: String,
}

impl fmt::Debug for DiagonalObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiagonalObservable")
            .field("label", &self.label)
            .field("bound", &self.bound)
            .field("tail", &self.tail)
            .finish()
    }
}

impl DiagonalObservable {
    pub fn new(
        rule: impl Fn(u64) -> Complex64 + Send + Sync + 'static,
        bound: f64,
        tail: DiagonalTail,
    ) -> Result<Self> {
        if !(bound >= 0.0 && bound.is_finite()) {
            return Err(Error::InvalidObservable(format!("bound must be finite and ≥ 0, got {bound}")));
        }
        Ok(Self {
            rule: Arc::new(rule),
            bound,
            tail,
            label: "custom".into(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn constant(c: Complex64) -> Self {
        Self {
            rule: Arc::new(move |_| c),
            bound: c.norm(),
            tail: DiagonalTail::Limit {
                value: c,
                amplitude: 0.0,
                rate: 1.0,
                from: 1,
            },
            label: format!("constant({c})"),
        }
    }

    pub fn identity() -> Self {
        Self::constant(Complex64::ONE).with_label("identity")
    }

    pub fn zero() -> Self {
        Self::constant(Complex64::ZERO).with_label("zero")
    }

    /// Finitely supported diagonal `(a_1, …, a_K, 0, 0, …)`.
    pub fn finite(values: Vec<Complex64>) -> Self {
        let bound = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let len = values.len() as u64;
        let values: Arc<[Complex64]> = values.into();
        Self {
            rule: Arc::new(move |m| values.get(m as usize - 1).copied().unwrap_or(Complex64::ZERO)),
            bound,
            tail: DiagonalTail::Vanishing { from: len + 1 },
            label: format!("finite({len})"),
        }
    }

    /// `diag(m) = limit + amplitude · m^{-rate} · cos(frequency · m + phase)`.
    pub fn convergent(limit: f64, amplitude: f64, rate: f64, frequency: f64, phase: f64) -> Result<Self> {
        if !(rate > 0.0 && amplitude >= 0.0 && limit.is_finite() && amplitude.is_finite()) {
            return Err(Error::InvalidObservable(format!(
                "convergent diagonal needs rate > 0 and amplitude ≥ 0, got rate {rate}, amplitude {amplitude}"
            )));
        }
        let rule = move |m: u64| {
            let x = m as f64;
            Complex64::from(limit + amplitude * x.powf(-rate) * (frequency * x + phase).cos())
        };
        Ok(Self {
            rule: Arc::new(rule),
            bound: limit.abs() + amplitude,
            tail: DiagonalTail::Limit {
                value: limit.into(),
                amplitude,
                rate,
                from: 1,
            },
            label: format!("convergent({limit})"),
        })
    }

    /// Piecewise-constant diagonal following a log-block layout.
    pub fn blocks(layout: BlockLayout, even: Complex64, odd: Complex64) -> Self {
        let l = layout.clone();
        let rule = move |m: u64| {
            let j = l.block_of(m);
            if j < 0 || j % 2 == 0 {
                even
            } else {
                odd
            }
        };
        Self {
            rule: Arc::new(rule),
            bound: even.norm().max(odd.norm()),
            tail: DiagonalTail::Blocks { layout, even, odd },
            label: "blocks".into(),
        }
    }

    #[inline]
    pub fn value(&self, m: u64) -> Complex64 {
        (self.rule)(m)
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn tail(&self) -> &DiagonalTail {
        &self.tail
    }

    /// The constant value when the diagonal is constant.
    pub fn constant_value(&self) -> Option<Complex64> {
        match self.tail {
            DiagonalTail::Limit {
                value,
                amplitude,
                from: 1,
                ..
            } if amplitude == 0.0 => Some(value),
            DiagonalTail::Vanishing { from: 1 } => Some(Complex64::ZERO),
            _ => None,
        }
    }

    /// `Σ_i α_i A_i`.
    pub fn linear_combination(terms: &[(Complex64, &DiagonalObservable)]) -> Self {
        let parts: Vec<(Complex64, Rule)> = terms.iter().map(|(a, o)| (*a, o.rule.clone())).collect();
        let bound = terms.iter().map(|(a, o)| a.norm() * o.bound).sum();
        let tail = combine_tails(terms);
        let rule = move |m: u64| parts.iter().map(|(a, r)| a * r(m)).sum();
        Self {
            rule: Arc::new(rule),
            bound,
            tail,
            label: "combination".into(),
        }
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self::linear_combination(&[(alpha, self)]).with_label(format!("{alpha}·{}", self.label))
    }

    /// `m ↦ min(Re diag(m), t)` for a real diagonal.
    pub fn min_with(&self, t: f64) -> Self {
        let rule = self.rule.clone();
        let clip = move |z: Complex64| Complex64::from(z.re.min(t));
        let tail = match self.tail.clone() {
            DiagonalTail::Vanishing { from } if t < 0.0 => DiagonalTail::Limit {
                value: t.into(),
                amplitude: 0.0,
                rate: 1.0,
                from,
            },
            other => other.map_values(clip),
        };
        Self {
            rule: Arc::new(move |m| clip(rule(m))),
            bound: self.bound.max(-t),
            tail,
            label: format!("min({}, {t})", self.label),
        }
    }

    /// Samples `diag` on `[1, upto]` (dense near the start, log-spaced after)
    /// and checks the bound and the declared tail.
    pub fn validate(&self, upto: u64) -> Result<()> {
        let slack = 1e-12 * self.bound.max(1.0);
        for m in sample_grid(upto) {
            let d = self.value(m);
            if !(d.re.is_finite() && d.im.is_finite()) || d.norm() > self.bound + slack {
                return Err(Error::InvalidObservable(format!(
                    "|diag({m})| = {} exceeds the declared bound {}",
                    d.norm(),
                    self.bound
                )));
            }
            let ok = match &self.tail {
                DiagonalTail::Unknown => true,
                DiagonalTail::Vanishing { from } => m < *from || d == Complex64::ZERO,
                DiagonalTail::Limit {
                    value,
                    amplitude,
                    rate,
                    from,
                } => m < *from || (d - value).norm() <= amplitude * (m as f64).powf(-rate) + slack,
                DiagonalTail::Blocks { layout, even, odd } => {
                    let j = layout.block_of(m);
                    d == if j < 0 || j % 2 == 0 { *even } else { *odd }
                }
            };
            if !ok {
                return Err(Error::InvalidObservable(format!(
                    "diag({m}) = {d} contradicts the declared tail behaviour"
                )));
            }
        }
        Ok(())
    }

    /// Sampled check that the diagonal is real and nonnegative.
    pub fn is_real_nonnegative(&self, upto: u64) -> bool {
        let tail_ok = match &self.tail {
            DiagonalTail::Limit { value, .. } => value.im == 0.0 && value.re >= 0.0,
            DiagonalTail::Blocks { even, odd, .. } => {
                even.im == 0.0 && odd.im == 0.0 && even.re >= 0.0 && odd.re >= 0.0
            }
            _ => true,
        };
        tail_ok
            && sample_grid(upto).into_iter().all(|m| {
                let d = self.value(m);
                d.im == 0.0 && d.re >= 0.0
            })
    }
}

fn sample_grid(upto: u64) -> Vec<u64> {
    let dense = upto.min(4096);
    let mut grid: Vec<u64> = (1..=dense).collect();
    if upto > dense {
        grid.extend(sample_points(dense + 1, upto, 512));
    }
    grid
}

fn combine_tails(terms: &[(Complex64, &DiagonalObservable)]) -> DiagonalTail {
    let nonzero: Vec<_> = terms.iter().filter(|(a, _)| *a != Complex64::ZERO).collect();
    if nonzero.is_empty() {
        return DiagonalTail::Vanishing { from: 1 };
    }
    if nonzero
        .iter()
        .all(|(_, o)| matches!(o.tail, DiagonalTail::Vanishing { .. }))
    {
        let from = nonzero
            .iter()
            .map(|(_, o)| match o.tail {
                DiagonalTail::Vanishing { from } => from,
                _ => unreachable!(),
            })
            .max()
            .unwrap_or(1);
        return DiagonalTail::Vanishing { from };
    }
    if let Some(limits) = nonzero
        .iter()
        .map(|(a, o)| o.tail.as_limit().map(|l| (*a, l)))
        .collect::<Option<Vec<_>>>()
    {
        let mut value = Complex64::ZERO;
        let (mut amplitude, mut rate, mut from) = (0.0, f64::INFINITY, 1);
        for (a, (v, amp, q, f)) in limits {
            value += a * v;
            amplitude += a.norm() * amp;
            if amp > 0.0 {
                rate = f64::min(rate, q);
            }
            from = from.max(f);
        }
        return DiagonalTail::Limit {
            value,
            amplitude,
            rate: if rate.is_finite() { rate } else { 1.0 },
            from,
        };
    }
    // block patterns on a shared layout, possibly with constants mixed in
    let layout = nonzero.iter().find_map(|(_, o)| match &o.tail {
        DiagonalTail::Blocks { layout, .. } => Some(layout.clone()),
        _ => None,
    });
    if let Some(layout) = layout {
        let (mut even, mut odd) = (Complex64::ZERO, Complex64::ZERO);
        for (a, o) in &nonzero {
            match &o.tail {
                DiagonalTail::Blocks { layout: l, even: e, odd: d } if *l == layout => {
                    even += a * e;
                    odd += a * d;
                }
                _ => match o.constant_value() {
                    Some(c) => {
                        even += a * c;
                        odd += a * c;
                    }
                    None => return DiagonalTail::Unknown,
                },
            }
        }
        return DiagonalTail::Blocks { layout, even, odd };
    }
    DiagonalTail::Unknown
}
