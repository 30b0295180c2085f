//! Iterated Cesàro means `C^r_N(a)`, with `C^0_N = a_N` and
//! `C^r_N = (1/N) Σ_{n≤N} C^{r−1}_n`.
//!
//! Level `r` at index `n` depends on every earlier level-`(r−1)` value, so a
//! chunked evaluation needs one pass per level: pass `p` sums level `p−1`
//! over each chunk, a prefix scan turns those into chunk-start offsets, and a
//! final pass reads the requested level at the checkpoints. Each pass is
//! data-parallel over chunks; the offsets make it deterministic.

use super::sequence::BoundedSequence;
use crate::exec::map_ordered;
use crate::summation::{Accumulate, CompensatedSum, SumPlan};
use crate::{Error, Result};

pub const MAX_ORDER: u32 = 3;

/// `C^order_N(a)` for `order ∈ {1, 2, 3}`.
pub fn cesaro(a: &BoundedSequence, order: u32, n: u64) -> Result<f64> {
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(Error::InvalidArgument(format!("Cesàro order must be 1, 2 or 3, got {order}")));
    }
    Ok(cesaro_means_at(a, order, &[n], &SumPlan::default())?[0])
}

/// `C^order_N(a)` at each checkpoint (sorted ascending); order 0 samples `a`.
pub fn cesaro_means_at(
    a: &BoundedSequence,
    order: u32,
    checkpoints: &[u64],
    plan: &SumPlan,
) -> Result<Vec<f64>> {
    if order > MAX_ORDER {
        return Err(Error::InvalidArgument(format!("Cesàro order must be ≤ {MAX_ORDER}, got {order}")));
    }
    if checkpoints.contains(&0) {
        return Err(Error::InvalidArgument("Cesàro means need N ≥ 1".into()));
    }
    debug_assert!(checkpoints.windows(2).all(|w| w[0] <= w[1]));
    let Some(&n_max) = checkpoints.last() else {
        return Ok(Vec::new());
    };
    a.check(n_max)?;
    if order == 0 {
        return Ok(checkpoints.iter().map(|&k| a.get(k)).collect());
    }
    let levels = order as usize;
    let step = plan.chunk.max(1);
    let starts: Vec<u64> = (0..n_max.div_ceil(step)).map(|i| 1 + i * step).collect();
    // offsets[c][i]: Σ_{k < start_c} C^{i}_k for i < levels
    let mut offsets = vec![[CompensatedSum::new(); MAX_ORDER as usize]; starts.len()];
    for level in 0..levels {
        let sums = map_ordered(plan.execution, starts.clone(), |lo| {
            let c = ((lo - 1) / step) as usize;
            let hi = (lo + step).min(n_max + 1);
            let mut out = CompensatedSum::new();
            scan(a, lo, hi, &offsets[c], level + 1, |_, x| out.push(x[level]));
            out
        });
        let mut running = CompensatedSum::new();
        for (c, s) in sums.iter().enumerate() {
            offsets[c][level] = running;
            running.merge(s);
        }
    }
    let per_chunk = map_ordered(plan.execution, starts.clone(), |lo| {
        let c = ((lo - 1) / step) as usize;
        let hi = (lo + step).min(n_max + 1);
        let wanted: Vec<u64> = checkpoints.iter().copied().filter(|&k| k >= lo && k < hi).collect();
        let mut out = Vec::with_capacity(wanted.len());
        if !wanted.is_empty() {
            let last = *wanted.last().expect("nonempty");
            let mut next = 0;
            scan(a, lo, last + 1, &offsets[c], levels + 1, |k, x| {
                while next < wanted.len() && wanted[next] == k {
                    out.push(x[levels]);
                    next += 1;
                }
            });
        }
        out
    });
    Ok(per_chunk.into_iter().flatten().collect())
}

/// Walks `k ∈ [lo, hi)` computing levels `0..depth` from chunk-start offsets.
fn scan(
    a: &BoundedSequence,
    lo: u64,
    hi: u64,
    offsets: &[CompensatedSum],
    depth: usize,
    mut visit: impl FnMut(u64, &[f64]),
) {
    let mut running: Vec<CompensatedSum> = offsets.to_vec();
    let mut x = [0.0; MAX_ORDER as usize + 1];
    for k in lo..hi {
        x[0] = a.get(k);
        for i in 1..depth {
            running[i - 1].push(x[i - 1]);
            x[i] = running[i - 1].total() / k as f64;
        }
        visit(k, &x[..depth]);
    }
}
