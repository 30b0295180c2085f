//! Bounded real sequences `k ↦ a_k` (`k ≥ 1`) and the shift and dilation
//! operators acting on them.

use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

type Rule = Arc<dyn Fn(u64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct BoundedSequence {
    rule: Rule,
    bound: f64,
    /// Largest index with known data (`None`: defined everywhere).
    available: Option<u64>,
    /// `a_k = 0` for `k > support`.
    support: Option<u64>,
}

impl fmt::Debug for BoundedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundedSequence")
            .field("bound", &self.bound)
            .field("available", &self.available)
            .field("support", &self.support)
            .finish()
    }
}

impl BoundedSequence {
    /// A sequence given by a rule; the bound is checked on `k ≤ 4096`.
    pub fn new(rule: impl Fn(u64) -> f64 + Send + Sync + 'static, bound: f64) -> Result<Self> {
        if !(bound >= 0.0 && bound.is_finite()) {
            return Err(Error::InvalidArgument(format!("bound must be finite and ≥ 0, got {bound}")));
        }
        let s = Self {
            rule: Arc::new(rule),
            bound,
            available: None,
            support: None,
        };
        if let Some(k) = (1..=4096).find(|&k| !(s.get(k).abs() <= bound * (1.0 + 1e-12))) {
            return Err(Error::InvalidArgument(format!(
                "|a_{k}| = {} exceeds the declared bound {bound}",
                s.get(k).abs()
            )));
        }
        Ok(s)
    }

    pub fn constant(c: f64) -> Self {
        Self {
            rule: Arc::new(move |_| c),
            bound: c.abs(),
            available: None,
            support: None,
        }
    }

    /// Known prefix `a_1, …, a_K`; indices past `K` are an error.
    pub fn from_values(values: Vec<f64>) -> Self {
        let len = values.len() as u64;
        let mut s = Self::finite(values);
        s.available = Some(len);
        s.support = None;
        s
    }

    /// Finitely supported `(a_1, …, a_K, 0, 0, …)`.
    pub fn finite(values: Vec<f64>) -> Self {
        let len = values.len() as u64;
        let bound = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let values: Arc<[f64]> = values.into();
        Self {
            rule: Arc::new(move |k| values.get(k as usize - 1).copied().unwrap_or(0.0)),
            bound,
            available: None,
            support: Some(len),
        }
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn available(&self) -> Option<u64> {
        self.available
    }

    pub fn support(&self) -> Option<u64> {
        self.support
    }

    /// Unchecked evaluation.
    #[inline]
    pub fn get(&self, k: u64) -> f64 {
        (self.rule)(k)
    }

    pub fn value(&self, k: u64) -> Result<f64> {
        if k == 0 {
            return Err(Error::InvalidArgument("sequences are indexed from 1".into()));
        }
        self.check(k)?;
        Ok(self.get(k))
    }

    pub fn check(&self, k: u64) -> Result<()> {
        match self.available {
            Some(len) if k > len => Err(Error::InsufficientSequenceData {
                index: k,
                available: len,
            }),
            _ => Ok(()),
        }
    }

    /// `T_j(a)_k = a_{k+j}`.
    pub fn shift(&self, j: u64) -> Result<Self> {
        if j == 0 {
            return Err(Error::InvalidArgument("shift needs j ≥ 1".into()));
        }
        let rule = self.rule.clone();
        Ok(Self {
            rule: Arc::new(move |k| rule(k + j)),
            bound: self.bound,
            available: self.available.map(|n| n.saturating_sub(j)),
            support: self.support.map(|n| n.saturating_sub(j)),
        })
    }

    /// `D_j(a)_k = a_{⌈k/j⌉}`.
    pub fn dilate(&self, j: u64) -> Result<Self> {
        if j == 0 {
            return Err(Error::InvalidArgument("dilation needs j ≥ 1".into()));
        }
        let rule = self.rule.clone();
        Ok(Self {
            rule: Arc::new(move |k| rule(k.div_ceil(j))),
            bound: self.bound,
            available: self.available.map(|n| n.saturating_mul(j)),
            support: self.support.map(|n| n.saturating_mul(j)),
        })
    }

    /// `k ↦ f(a_k)` with a new bound.
    pub fn map(&self, bound: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        let rule = self.rule.clone();
        Self {
            rule: Arc::new(move |k| f(rule(k))),
            bound,
            available: self.available,
            support: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naturals() -> BoundedSequence {
        // bounded on every finite window; the declared bound covers k ≤ 10⁶
        BoundedSequence::new(|k| k as f64, 1e6).unwrap()
    }

    #[test]
    fn shift_and_dilate_examples() {
        let a = naturals();
        let s = a.shift(1).unwrap();
        assert_eq!((1..=3).map(|k| s.get(k)).collect::<Vec<_>>(), vec![2.0, 3.0, 4.0]);
        let d = a.dilate(2).unwrap();
        assert_eq!(
            (1..=6).map(|k| d.get(k)).collect::<Vec<_>>(),
            vec![1.0, 1.0, 2.0, 2.0, 3.0, 3.0]
        );
        let alt = BoundedSequence::new(|k| if k % 2 == 0 { 1.0 } else { -1.0 }, 1.0).unwrap();
        let alt2 = alt.shift(2).unwrap();
        assert!((1..100).all(|k| alt.get(k) == alt2.get(k)));
        let id = a.dilate(1).unwrap();
        assert!((1..100).all(|k| id.get(k) == a.get(k)));
    }

    #[test]
    fn data_limits_follow_the_operators() {
        let a = BoundedSequence::from_values(vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(a.value(5), Err(Error::InsufficientSequenceData { index: 5, available: 4 }));
        assert_eq!(a.shift(1).unwrap().available(), Some(3));
        assert_eq!(a.dilate(3).unwrap().available(), Some(12));
        let f = BoundedSequence::finite(vec![1.0, 2.0]);
        assert_eq!(f.value(100).unwrap(), 0.0);
        assert!(a.shift(0).is_err() && a.dilate(0).is_err());
    }

    #[test]
    fn declared_bound_is_checked() {
        assert!(BoundedSequence::new(|k| k as f64, 10.0).is_err());
    }
}
