//! Closed-form singular-value laws with exact power sums.

use serde::{Deserialize, Serialize};

use super::blocks::BlockLayout;
use crate::special::{power_sum, Bounded, Index};
use crate::{Error, Result};

/// Log-periodic block law oscillating between `low/n` and `high/n`.
///
/// Even blocks (and indices below the first boundary) follow `high/n`, odd
/// blocks `low/n`. A high block `j ≥ 2` opens with a flat stretch
/// `μ_n = low/B_j` until `high/n` drops below it, which keeps the sequence
/// nonincreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogBlocks {
    pub low: f64,
    pub high: f64,
    pub layout: BlockLayout,
}

impl LogBlocks {
    pub fn new(low: f64, high: f64, base: f64, ratio: f64) -> Result<Self> {
        if !(low > 0.0 && high >= low && high.is_finite()) {
            return Err(Error::InvalidSpectrum(format!(
                "block law needs 0 < low ≤ high, got low {low}, high {high}"
            )));
        }
        Ok(Self {
            low,
            high,
            layout: BlockLayout::new(base, ratio)?,
        })
    }

    fn is_high(j: i64) -> bool {
        j < 0 || j % 2 == 0
    }

    fn has_ramp(j: i64) -> bool {
        j >= 2 && j % 2 == 0
    }

    /// End of the flat stretch of block `j`, clipped to the block.
    fn ramp_end(&self, j: i64) -> Index {
        let b = self.layout.boundary(j);
        b.scaled_ceil(self.high / self.low).min(self.layout.boundary(j + 1))
    }

    fn value(&self, n: u64) -> f64 {
        let j = self.layout.block_of(n);
        if !Self::is_high(j) {
            return self.low / n as f64;
        }
        if Self::has_ramp(j) {
            if let Index::Exact(r) = self.ramp_end(j) {
                if n < r {
                    let b = self.layout.boundary(j).as_f64();
                    return self.low / b;
                }
            }
        }
        self.high / n as f64
    }

    fn power_sum(&self, s: f64, from: Index, to: Option<Index>) -> Bounded {
        let mut total = Bounded::ZERO;
        for (j, lo, hi) in self.layout.segments(from, to) {
            let c = if Self::is_high(j) { self.high } else { self.low };
            let mut start = lo;
            if Self::has_ramp(j) {
                let r = self.ramp_end(j);
                let ramp_hi = hi.map_or(r, |h| h.min(r));
                if !ramp_hi.le(lo) {
                    let b = self.layout.boundary(j);
                    total = total + flat_sum(s, self.low, b, lo, ramp_hi);
                    start = ramp_hi;
                }
            }
            if hi.is_none_or(|h| !h.le(start)) {
                total = total + power_sum(s, start, hi).scale(c.powf(s));
            }
            if hi.is_none() {
                break;
            }
            if to.is_none() {
                // stop once the rest cannot matter: μ_n ≤ high/n everywhere
                let rest = power_sum(s, hi.unwrap(), None).scale(self.high.powf(s));
                if rest.upper() <= 1e-17 * total.value.abs() {
                    total.error += rest.upper();
                    break;
                }
            }
        }
        total
    }
}

/// `Σ_{lo ≤ n < hi} (low/b)^s` for a flat stretch, evaluated in log space.
fn flat_sum(s: f64, low: f64, b: Index, lo: Index, hi: Index) -> Bounded {
    let value = match (lo, hi) {
        (Index::Exact(a), Index::Exact(c)) => (c - a) as f64 * (low / b.as_f64()).powf(s),
        _ => {
            let (la, lc) = (lo.ln(), hi.ln());
            let ln_count = lc + (-(la - lc).exp()).ln_1p();
            (ln_count + s * (low.ln() - b.ln())).exp()
        }
    };
    Bounded {
        value,
        error: 4.0 * f64::EPSILON * value,
    }
}

/// A closed-form law `n ↦ μ_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Law {
    /// `μ_n = scale · n^{-exponent}`.
    Power { scale: f64, exponent: f64 },
    /// `μ_n = scale · ⌈n/multiplicity⌉^{-exponent}`: each value repeated.
    Multiplicity {
        scale: f64,
        exponent: f64,
        multiplicity: u64,
    },
    LogBlocks(LogBlocks),
}

impl Law {
    pub fn harmonic() -> Self {
        Law::Power {
            scale: 1.0,
            exponent: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Law::Power { scale, exponent } | Law::Multiplicity { scale, exponent, .. } => {
                if !(*scale > 0.0 && scale.is_finite()) {
                    return Err(Error::InvalidSpectrum(format!(
                        "law scale must be positive, got {scale}"
                    )));
                }
                if !(*exponent > 0.0 && exponent.is_finite()) {
                    return Err(Error::InvalidSpectrum(format!(
                        "law exponent must be positive, got {exponent}"
                    )));
                }
                if let Law::Multiplicity { multiplicity, .. } = self {
                    if *multiplicity == 0 {
                        return Err(Error::InvalidSpectrum("multiplicity must be ≥ 1".into()));
                    }
                }
                Ok(())
            }
            Law::LogBlocks(b) => LogBlocks::new(b.low, b.high, b.layout.base(), b.layout.ratio())
                .map(|_| ()),
        }
    }

    pub fn value(&self, n: u64) -> f64 {
        match self {
            Law::Power { scale, exponent } => scale * (n as f64).powf(-exponent),
            Law::Multiplicity {
                scale,
                exponent,
                multiplicity,
            } => scale * (n.div_ceil(*multiplicity) as f64).powf(-exponent),
            Law::LogBlocks(b) => b.value(n),
        }
    }

    /// Decay exponent `p` with `μ_n ≍ n^{-p}`.
    pub fn exponent(&self) -> f64 {
        match self {
            Law::Power { exponent, .. } | Law::Multiplicity { exponent, .. } => *exponent,
            Law::LogBlocks(_) => 1.0,
        }
    }

    pub fn scaled(&self, c: f64) -> Law {
        match self.clone() {
            Law::Power { scale, exponent } => Law::Power {
                scale: scale * c,
                exponent,
            },
            Law::Multiplicity {
                scale,
                exponent,
                multiplicity,
            } => Law::Multiplicity {
                scale: scale * c,
                exponent,
                multiplicity,
            },
            Law::LogBlocks(mut b) => {
                b.low *= c;
                b.high *= c;
                Law::LogBlocks(b)
            }
        }
    }

    /// `Σ_{from ≤ n < to} μ_n^s`; `to = None` is the infinite tail.
    pub fn power_sum(&self, s: f64, from: Index, to: Option<Index>) -> Result<Bounded> {
        if to.is_none() && s * self.exponent() <= 1.0 {
            return Err(Error::Domain(format!(
                "Σ μ_n^s diverges for s = {s} with decay exponent {}",
                self.exponent()
            )));
        }
        Ok(match self {
            Law::Power { scale, exponent } => {
                power_sum(s * exponent, from, to).scale(scale.powf(s))
            }
            Law::Multiplicity {
                scale,
                exponent,
                multiplicity,
            } => multiplicity_sum(s * exponent, *multiplicity, from, to).scale(scale.powf(s)),
            Law::LogBlocks(b) => b.power_sum(s, from, to),
        })
    }
}

/// `Σ_{from ≤ n < to} ⌈n/m⌉^{-σ}`.
fn multiplicity_sum(sigma: f64, m: u64, from: Index, to: Option<Index>) -> Bounded {
    let (a, b) = match (from, to) {
        (Index::Exact(a), None) => (a.max(1), None),
        (Index::Exact(a), Some(Index::Exact(b))) => (a.max(1), Some(b)),
        _ => {
            // far out the groups are a continuum; one group of slack covers it
            let g_from = Index::Huge(from.ln() - (m as f64).ln());
            let g_to = to.map(|t| Index::Huge(t.ln() - (m as f64).ln()));
            let core = power_sum(sigma, g_from, g_to).scale(m as f64);
            let slack = 2.0 * m as f64 * (-sigma * g_from.ln()).exp();
            return Bounded {
                value: core.value,
                error: core.error + slack,
            };
        }
    };
    if b.is_some_and(|b| b <= a) {
        return Bounded::ZERO;
    }
    let g = |n: u64| n.div_ceil(m);
    let term = |g: u64| (g as f64).powf(-sigma);
    let ga = g(a);
    match b {
        None => {
            let head = (ga * m - a + 1) as f64 * term(ga);
            Bounded::exact(head) + power_sum(sigma, Index::Exact(ga + 1), None).scale(m as f64)
        }
        Some(b) => {
            let gl = g(b - 1);
            if ga == gl {
                return Bounded::exact((b - a) as f64 * term(ga));
            }
            let head = (ga * m - a + 1) as f64 * term(ga);
            let tail = (b - 1 - (gl - 1) * m) as f64 * term(gl);
            Bounded::exact(head + tail)
                + power_sum(sigma, Index::Exact(ga + 1), Some(Index::Exact(gl))).scale(m as f64)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(law: &Law, s: f64, a: u64, b: u64) -> f64 {
        (a..b).map(|n| law.value(n).powf(s)).sum()
    }

    #[test]
    fn multiplicity_law_pairs_values() {
        let law = Law::Multiplicity {
            scale: 1.0,
            exponent: 1.0,
            multiplicity: 2,
        };
        for k in 1..50u64 {
            assert_eq!(law.value(2 * k - 1), 1.0 / k as f64);
            assert_eq!(law.value(2 * k), 1.0 / k as f64);
        }
        for (a, b) in [(1, 2), (1, 3), (2, 3), (2, 9), (3, 1000), (4, 4001)] {
            let got = law.power_sum(1.3, Index::Exact(a), Some(Index::Exact(b))).unwrap();
            let want = direct(&law, 1.3, a, b);
            assert!((got.value - want).abs() < 1e-12, "{a}..{b}: {} vs {want}", got.value);
        }
        // Σ_n ⌈n/2⌉^{-2} = 2ζ(2)
        let full = law.power_sum(2.0, Index::Exact(1), None).unwrap();
        assert!((full.value - 2.0 * 1.6449340668482264).abs() < 1e-13);
    }

    #[test]
    fn block_law_is_nonincreasing_and_sums_exactly() {
        let b = LogBlocks::new(0.5, 1.5, 0.45, 6.0).unwrap();
        let law = Law::LogBlocks(b);
        let mut prev = f64::INFINITY;
        for n in 1..300_000u64 {
            let v = law.value(n);
            assert!(v <= prev && v > 0.0, "n = {n}");
            prev = v;
        }
        for (a, c) in [(1, 10), (5, 80_000), (70_000, 250_000), (1, 300_000)] {
            let got = law.power_sum(1.1, Index::Exact(a), Some(Index::Exact(c))).unwrap();
            let want = direct(&law, 1.1, a, c);
            assert!((got.value - want).abs() < 1e-11 * want, "{a}..{c}: {} vs {want}", got.value);
        }
    }

    #[test]
    fn block_law_residue_matches_reference() {
        // (1/k) Σ μ_n^{1+1/k}, reference from mpmath block sums
        let law = Law::LogBlocks(LogBlocks::new(0.5, 1.5, 0.45, 6.0).unwrap());
        for (k, want) in [
            (1024.0, 1.1348709591984308),
            (65536.0, 1.0684061874339887),
            (67108864.0, 1.1089227115733382),
        ] {
            let z = law.power_sum(1.0 + 1.0 / k, Index::Exact(1), None).unwrap();
            let got = z.value / k;
            assert!((got - want).abs() < 1e-9, "k = {k}: {got} vs {want}");
            assert!(z.error / k < 1e-9);
        }
    }

    #[test]
    fn divergent_tail_is_a_domain_error() {
        let law = Law::Power {
            scale: 1.0,
            exponent: 0.5,
        };
        assert!(law.power_sum(1.5, Index::Exact(1), None).is_err());
        assert!(law.power_sum(2.5, Index::Exact(1), None).is_ok());
    }
}
