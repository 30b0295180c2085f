//! Log-scale block layouts: boundaries `B_j = ⌈2^{base · ratio^j}⌉`.
//!
//! Block `j ≥ 0` is `[B_j, B_{j+1})`; indices below `B_0` form block `-1`.
//! Boundaries grow doubly exponentially, so only a handful fit in `u64` and
//! the rest are carried as [`Index::Huge`].

use serde::{Deserialize, Serialize};

use crate::special::Index;
use crate::{Error, Result};

// beyond this many blocks every boundary is astronomically large
const MAX_BLOCKS: i64 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LayoutParams", into = "LayoutParams")]
pub struct BlockLayout {
    base: f64,
    ratio: f64,
    exact: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct LayoutParams {
    base: f64,
    ratio: f64,
}

impl TryFrom<LayoutParams> for BlockLayout {
    type Error = Error;
    fn try_from(p: LayoutParams) -> Result<Self> {
        BlockLayout::new(p.base, p.ratio)
    }
}

impl From<BlockLayout> for LayoutParams {
    fn from(b: BlockLayout) -> Self {
        LayoutParams {
            base: b.base,
            ratio: b.ratio,
        }
    }
}

impl BlockLayout {
    pub fn new(base: f64, ratio: f64) -> Result<Self> {
        if !(base > 0.0 && base.is_finite()) || !(ratio > 1.0 && ratio.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "block layout needs base > 0 and ratio > 1, got base {base}, ratio {ratio}"
            )));
        }
        let mut exact = Vec::new();
        let mut j = 0;
        while let Index::Exact(b) = Index::ceil_pow2(base * ratio.powi(j)) {
            if exact.last().is_some_and(|&last| b <= last) {
                return Err(Error::InvalidArgument(
                    "block boundaries must be strictly increasing".into(),
                ));
            }
            exact.push(b);
            j += 1;
        }
        Ok(Self { base, ratio, exact })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// `B_j` for `j ≥ 0`; `B_{-1}` is 1.
    pub fn boundary(&self, j: i64) -> Index {
        if j < 0 {
            return Index::Exact(1);
        }
        match self.exact.get(j as usize) {
            Some(&b) => Index::Exact(b),
            None => Index::ceil_pow2(self.base * self.ratio.powi(j as i32)),
        }
    }

    /// Block containing `n ≥ 1`.
    pub fn block_of(&self, n: u64) -> i64 {
        self.exact.partition_point(|&b| b <= n) as i64 - 1
    }

    /// Block containing an arbitrary index.
    pub fn block_of_index(&self, n: Index) -> i64 {
        match n {
            Index::Exact(n) => self.block_of(n),
            Index::Huge(_) => {
                let mut j = self.exact.len() as i64 - 1;
                while j < MAX_BLOCKS && self.boundary(j + 1).le(n) {
                    j += 1;
                }
                j
            }
        }
    }

    /// Blocks meeting `[from, to)` (or `[from, ∞)`), clipped to the range,
    /// capped at [`MAX_BLOCKS`] blocks for open ranges.
    pub fn segments(&self, from: Index, to: Option<Index>) -> Vec<(i64, Index, Option<Index>)> {
        let mut out = Vec::new();
        let mut j = self.block_of_index(from);
        let mut lo = from;
        loop {
            let next = self.boundary(j + 1);
            let hi = match to {
                Some(t) if t.le(next) => {
                    if !t.le(lo) {
                        out.push((j, lo, Some(t)));
                    }
                    break;
                }
                _ => next,
            };
            if j >= MAX_BLOCKS {
                out.push((j, lo, to));
                break;
            }
            out.push((j, lo, Some(hi)));
            lo = hi;
            j += 1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundaries_and_lookup() {
        let l = BlockLayout::new(0.45, 6.0).unwrap();
        // 2^0.45, 2^2.7, 2^16.2, 2^97.2
        assert_eq!(l.boundary(0), Index::Exact(2));
        assert_eq!(l.boundary(1), Index::Exact(7));
        assert_eq!(l.boundary(2), Index::Exact(75282));
        assert!(matches!(l.boundary(3), Index::Huge(_)));
        assert_eq!(l.block_of(1), -1);
        assert_eq!(l.block_of(2), 0);
        assert_eq!(l.block_of(6), 0);
        assert_eq!(l.block_of(7), 1);
        assert_eq!(l.block_of(75282), 2);
        assert_eq!(l.block_of(u64::MAX / 2), 2);
    }

    #[test]
    fn segments_cover_range() {
        let l = BlockLayout::new(0.45, 6.0).unwrap();
        let segs = l.segments(Index::Exact(3), Some(Index::Exact(100_000)));
        let blocks: Vec<i64> = segs.iter().map(|s| s.0).collect();
        assert_eq!(blocks, vec![0, 1, 2]);
        assert_eq!(segs[0].1, Index::Exact(3));
        assert_eq!(segs[2].2, Some(Index::Exact(100_000)));
        let open = l.segments(Index::Exact(80_000), None);
        assert_eq!(open[0].0, 2);
        assert!(open.len() > 10);
    }

    #[test]
    fn rejects_degenerate_layouts() {
        assert!(BlockLayout::new(0.0, 2.0).is_err());
        assert!(BlockLayout::new(1.0, 1.0).is_err());
    }
}
