//! Power sums `Σ n^{-σ}` over integer ranges with certified error bounds.
//!
//! Short ranges are summed directly; long and infinite ranges use the
//! Euler–Maclaurin formula. For `f(x) = x^{-σ}` every derivative has constant
//! sign, so the remainder after `K` correction terms is bounded by the first
//! omitted term at each end.
//!
//! Indices beyond 2^52 are carried in log space ([`Index::Huge`]); at that
//! scale only the integral and the boundary half-terms matter and both are
//! evaluated through `exp(q · ln n)`.

use serde::Serialize;

/// A value together with a certified absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Bounded {
    pub value: f64,
    pub error: f64,
}

impl Bounded {
    pub const ZERO: Bounded = Bounded {
        value: 0.0,
        error: 0.0,
    };

    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }

    pub fn scale(self, c: f64) -> Self {
        Self {
            value: self.value * c,
            error: self.error * c.abs(),
        }
    }

    /// Upper bound on the true value.
    pub fn upper(self) -> f64 {
        self.value + self.error
    }
}

impl std::ops::Add for Bounded {
    type Output = Bounded;
    fn add(self, rhs: Bounded) -> Bounded {
        Bounded {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
        }
    }
}

impl std::ops::Sub for Bounded {
    type Output = Bounded;
    fn sub(self, rhs: Bounded) -> Bounded {
        Bounded {
            value: self.value - rhs.value,
            error: self.error + rhs.error,
        }
    }
}

impl std::iter::Sum for Bounded {
    fn sum<I: Iterator<Item = Bounded>>(iter: I) -> Bounded {
        iter.fold(Bounded::ZERO, |a, b| a + b)
    }
}

const EXACT_LIMIT_LN: f64 = 36.0; // e^36 ≈ 4.3e15 < 2^52

/// A positive integer index, exact when it fits in `u64` comfortably.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Index {
    Exact(u64),
    /// Natural logarithm of an index too large to represent exactly.
    Huge(f64),
}

impl Index {
    /// `⌈2^log2⌉`.
    pub fn ceil_pow2(log2: f64) -> Index {
        let ln = log2 * std::f64::consts::LN_2;
        if ln < EXACT_LIMIT_LN {
            Index::Exact(2f64.powf(log2).ceil().max(1.0) as u64)
        } else {
            Index::Huge(ln)
        }
    }

    /// `⌈factor · self⌉` for `factor ≥ 1`.
    pub fn scaled_ceil(self, factor: f64) -> Index {
        match self {
            Index::Exact(n) => {
                let v = factor * n as f64;
                if v.ln() < EXACT_LIMIT_LN {
                    Index::Exact(v.ceil() as u64)
                } else {
                    Index::Huge(v.ln())
                }
            }
            Index::Huge(ln) => Index::Huge(ln + factor.ln()),
        }
    }

    pub fn ln(self) -> f64 {
        match self {
            Index::Exact(n) => (n as f64).ln(),
            Index::Huge(ln) => ln,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Index::Exact(n) => n as f64,
            Index::Huge(ln) => ln.exp(),
        }
    }

    pub fn exact(self) -> Option<u64> {
        match self {
            Index::Exact(n) => Some(n),
            Index::Huge(_) => None,
        }
    }

    /// `self ≤ other`.
    pub fn le(self, other: Index) -> bool {
        match (self, other) {
            (Index::Exact(a), Index::Exact(b)) => a <= b,
            _ => self.ln() <= other.ln(),
        }
    }

    pub fn min(self, other: Index) -> Index {
        if self.le(other) {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Index) -> Index {
        if self.le(other) {
            other
        } else {
            self
        }
    }
}

// B_2, B_4, ..., B_16 divided by (2k)!
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
];
const EM_TERMS: usize = 7;
const DIRECT_LIMIT: u64 = 64;

/// `∫_a^b x^{-σ} dx` from logarithms of the endpoints (`ln_b = ∞` allowed).
fn power_integral(sigma: f64, ln_a: f64, ln_b: f64) -> f64 {
    let h = sigma - 1.0;
    let lead = (-h * ln_a).exp(); // a^{1-σ}
    if ln_b.is_infinite() {
        return lead / h;
    }
    let span = ln_b - ln_a;
    let t = h * span;
    if t == 0.0 {
        return lead * span;
    }
    lead * (-(-t).exp_m1()) / h
}

/// Euler–Maclaurin sum over `[a, b)` in log coordinates.
fn em_sum(sigma: f64, ln_a: f64, ln_b: f64, terms: usize) -> Bounded {
    let integral = power_integral(sigma, ln_a, ln_b);
    let pow = |ln_x: f64, q: f64| {
        if ln_x.is_infinite() {
            0.0
        } else {
            (q * ln_x).exp()
        }
    };
    let mut total = integral + 0.5 * (pow(ln_a, -sigma) - pow(ln_b, -sigma));
    let mut magnitude = integral.abs() + 0.5 * pow(ln_a, -sigma);
    // rising factorial (σ)_{2k-1}
    let mut rising = sigma;
    let mut last = 0.0;
    for (k, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate().take(terms + 1) {
        let e = -sigma - (2 * k + 1) as f64;
        let term = coeff * rising * (pow(ln_a, e) - pow(ln_b, e));
        let end_mag = (coeff * rising).abs() * (pow(ln_a, e) + pow(ln_b, e));
        if k == terms {
            last = end_mag;
            break;
        }
        total += term;
        magnitude += term.abs();
        let j = (2 * k + 1) as f64;
        rising *= (sigma + j) * (sigma + j + 1.0);
    }
    Bounded {
        value: total,
        error: last + 8.0 * f64::EPSILON * magnitude,
    }
}

fn direct_sum(sigma: f64, from: u64, to: u64) -> Bounded {
    let acc: crate::summation::CompensatedSum =
        (from..to).map(|n| (n as f64).powf(-sigma)).collect();
    let v = acc.total();
    Bounded {
        value: v,
        error: 4.0 * f64::EPSILON * v.abs(),
    }
}

/// `Σ_{from ≤ n < to} n^{-σ}`; `to = None` means the infinite tail (σ > 1).
pub fn power_sum(sigma: f64, from: Index, to: Option<Index>) -> Bounded {
    assert!(sigma > 0.0, "power_sum needs σ > 0");
    assert!(to.is_some() || sigma > 1.0, "infinite power sum needs σ > 1");
    if let Some(t) = to {
        if t.le(from) {
            return Bounded::ZERO;
        }
    }
    let ln_to = to.map_or(f64::INFINITY, Index::ln);
    match from {
        Index::Exact(a) => {
            let a = a.max(1);
            let switch = 16 + sigma.ceil() as u64;
            if let Some(Index::Exact(b)) = to {
                if b - a <= DIRECT_LIMIT || b <= switch {
                    return direct_sum(sigma, a, b);
                }
            }
            if a >= switch {
                return em_sum(sigma, (a as f64).ln(), ln_to, EM_TERMS);
            }
            direct_sum(sigma, a, switch) + em_sum(sigma, (switch as f64).ln(), ln_to, EM_TERMS)
        }
        Index::Huge(ln_a) => em_sum(sigma, ln_a, ln_to, EM_TERMS),
    }
}

/// Riemann zeta for real `s > 1`.
pub fn zeta(s: f64) -> Bounded {
    power_sum(s, Index::Exact(1), None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(got: Bounded, want: f64, tol: f64) {
        assert!(
            (got.value - want).abs() <= tol,
            "got {} want {} (diff {:e})",
            got.value,
            want,
            got.value - want
        );
        assert!(
            (got.value - want).abs() <= got.error.max(4.0 * f64::EPSILON * want.abs()),
            "error bound {:e} does not cover actual error {:e}",
            got.error,
            (got.value - want).abs()
        );
    }

    // reference values from mpmath at 30 digits
    #[test]
    fn riemann_values() {
        close(zeta(2.0), 1.6449340668482264, 1e-15);
        close(zeta(1.01), 100.57794333849678, 1e-11);
        close(zeta(1.0 + 2f64.powi(-26)), 67108864.577215674, 1e-6);
    }

    #[test]
    fn hurwitz_tails() {
        close(power_sum(2.0, Index::Exact(1001), None), 0.00099950016666663333, 1e-18);
        close(power_sum(1.001, Index::Exact(1_000_000), None), 986.27948612446042, 1e-10);
    }

    #[test]
    fn huge_index_tail() {
        // ζ_H(1 + 2^-26, 2^200)
        let a = Index::ceil_pow2(200.0);
        assert!(matches!(a, Index::Huge(_)));
        close(power_sum(1.0 + 2f64.powi(-26), a, None), 67108725.370707074, 1e-6);
    }

    #[test]
    fn finite_ranges_match_direct() {
        let direct: f64 = (10..5000u64).map(|n| (n as f64).powf(-1.3)).sum();
        let em = power_sum(1.3, Index::Exact(10), Some(Index::Exact(5000)));
        assert!((em.value - direct).abs() < 1e-12);
        let short = power_sum(1.3, Index::Exact(3), Some(Index::Exact(7)));
        let want: f64 = (3..7u64).map(|n| (n as f64).powf(-1.3)).sum();
        assert!((short.value - want).abs() < 1e-15);
        assert_eq!(power_sum(2.0, Index::Exact(9), Some(Index::Exact(9))), Bounded::ZERO);
    }

    #[test]
    fn index_ordering_crosses_representations() {
        let small = Index::Exact(1 << 40);
        let big = Index::ceil_pow2(80.0);
        assert!(small.le(big));
        assert!(!big.le(small));
        assert_eq!(Index::ceil_pow2(2.7), Index::Exact(7));
        assert_eq!(Index::Exact(7).scaled_ceil(3.0), Index::Exact(21));
    }
}
