//! Compensated (Neumaier) summation with a deterministic chunked reduction.
//!
//! Every long sum in the crate goes through [`SumPlan`]: the index range is
//! cut into fixed-size chunks, each chunk is summed with compensation, and the
//! chunk partials are merged left to right with compensation. The chunking
//! depends only on `chunk`, so sequential and parallel runs agree bit for bit.

use std::ops::Range;

use num_complex::Complex64;

use crate::exec::{map_ordered, Execution};

pub const DEFAULT_CHUNK: u64 = 1 << 14;

pub trait Accumulate: Default + Copy + Send {
    type Item: Copy;
    type Output;
    fn add(&mut self, x: Self::Item);
    fn merge(&mut self, other: &Self);
    fn value(&self) -> Self::Output;
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Accumulate for CompensatedSum {
    type Item = f64;
    type Output = f64;

    #[inline]
    fn add(&mut self, x: f64) {
        self.push(x);
    }

    fn merge(&mut self, other: &Self) {
        self.push(other.sum);
        self.push(other.comp);
    }

    fn value(&self) -> f64 {
        self.total()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl Accumulate for ComplexSum {
    type Item = Complex64;
    type Output = Complex64;

    #[inline]
    fn add(&mut self, x: Complex64) {
        self.re.push(x.re);
        self.im.push(x.im);
    }

    fn merge(&mut self, other: &Self) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.total(), self.im.total())
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

/// Chunk size and execution strategy for long reductions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SumPlan {
    pub chunk: u64,
    pub execution: Execution,
}

impl Default for SumPlan {
    fn default() -> Self {
        Self {
            chunk: DEFAULT_CHUNK,
            execution: Execution::default(),
        }
    }
}

impl SumPlan {
    pub fn sequential(chunk: u64) -> Self {
        Self {
            chunk,
            execution: Execution::Sequential,
        }
    }

    pub fn parallel(chunk: u64) -> Self {
        Self {
            chunk,
            execution: Execution::Parallel,
        }
    }

    fn chunks(&self, range: Range<u64>) -> Vec<Range<u64>> {
        let step = self.chunk.max(1);
        let mut out = Vec::new();
        let mut lo = range.start;
        while lo < range.end {
            let hi = range.end.min(lo.saturating_add(step));
            out.push(lo..hi);
            lo = hi;
        }
        out
    }

    /// Reduces `f(n)` over `range` with accumulator `A`.
    pub fn reduce<A, F>(&self, range: Range<u64>, f: F) -> A
    where
        A: Accumulate,
        F: Fn(u64) -> A::Item + Sync + Send,
    {
        let partials = map_ordered(self.execution, self.chunks(range), |r| {
            let mut acc = A::default();
            for n in r {
                acc.add(f(n));
            }
            acc
        });
        let mut total = A::default();
        for p in &partials {
            total.merge(p);
        }
        total
    }

    pub fn sum<F>(&self, range: Range<u64>, f: F) -> f64
    where
        F: Fn(u64) -> f64 + Sync + Send,
    {
        self.reduce::<CompensatedSum, _>(range, f).total()
    }

    pub fn sum_complex<F>(&self, range: Range<u64>, f: F) -> Complex64
    where
        F: Fn(u64) -> Complex64 + Sync + Send,
    {
        self.reduce::<ComplexSum, _>(range, f).value()
    }

    /// Partial sums `Σ_{n=1}^{c} f(n)` at each checkpoint `c` (sorted ascending).
    pub fn prefix_sums_at<F>(&self, checkpoints: &[u64], f: F) -> Vec<f64>
    where
        F: Fn(u64) -> f64 + Sync + Send,
    {
        debug_assert!(checkpoints.windows(2).all(|w| w[0] <= w[1]));
        let mut work = Vec::new();
        let mut lo = 1u64;
        for (seg, &c) in checkpoints.iter().enumerate() {
            let hi = c.saturating_add(1);
            if hi > lo {
                for r in self.chunks(lo..hi) {
                    work.push((seg, r));
                }
                lo = hi;
            }
        }
        let partials = map_ordered(self.execution, work, |(seg, r)| {
            let mut acc = CompensatedSum::new();
            for n in r {
                acc.push(f(n));
            }
            (seg, acc)
        });
        let mut out = Vec::with_capacity(checkpoints.len());
        let mut total = CompensatedSum::new();
        let mut it = partials.iter().peekable();
        for seg in 0..checkpoints.len() {
            while let Some((s, acc)) = it.peek() {
                if *s != seg {
                    break;
                }
                total.merge(acc);
                it.next();
            }
            out.push(total.total());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_recovers_small_terms() {
        let mut acc = CompensatedSum::new();
        acc.push(1e16);
        for _ in 0..1000 {
            acc.push(1.0);
        }
        acc.push(-1e16);
        assert_eq!(acc.total(), 1000.0);
    }

    #[test]
    fn harmonic_sum_matches_reference() {
        // H_1000 from mpmath
        let h = SumPlan::default().sum(1..1001, |n| 1.0 / n as f64);
        assert!((h - 7.485470860550345).abs() < 1e-14);
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let f = |n: u64| ((n as f64).sqrt().sin() + 1.1) / n as f64;
        for chunk in [1, 7, 1 << 10] {
            let a = SumPlan::sequential(chunk).sum(1..100_000, f);
            let b = SumPlan::parallel(chunk).sum(1..100_000, f);
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn prefix_sums_hit_checkpoints() {
        let plan = SumPlan::sequential(3);
        let got = plan.prefix_sums_at(&[1, 4, 4, 10], |n| n as f64);
        assert_eq!(got, vec![1.0, 10.0, 10.0, 55.0]);
    }

    #[test]
    fn empty_range_is_zero() {
        assert_eq!(SumPlan::default().sum(5..5, |_| 1.0), 0.0);
        let z = SumPlan::default().sum_complex(0..0, |_| Complex64::new(1.0, 1.0));
        assert_eq!(z, Complex64::new(0.0, 0.0));
    }
}
