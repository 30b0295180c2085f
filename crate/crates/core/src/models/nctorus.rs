//! The rotation algebra `F_θ(u, v)`: finitely supported Fourier elements
//! `a = Σ a_{m,n} u^m v^n` with `λ = e^{2πiθ}`.
//!
//! The product is the twisted convolution
//! `(ab)_{r,s} = Σ_{m,n} a_{r−m,n} λ^{mn} b_{m,s−n}`, i.e. on monomials
//! `u^p v^n · u^m v^q = λ^{nm} u^{p+m} v^{n+q}`. In particular `v u = λ u v`.
//! The involution is `(a*)_{r,s} = λ^{rs} conj(a_{−r,−s})` and the trace is
//! `τ₀(a) = a_{0,0}`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::spectral::{DiagonalObservable, EigenvalueSequence, TailDescriptor};
use crate::{Error, Result};

/// `λ^k` with the exponent reduced mod 1 before taking the phase.
pub fn lambda_pow(theta: f64, k: i64) -> Complex64 {
    let phase = (theta * k as f64).rem_euclid(1.0);
    Complex64::cis(std::f64::consts::TAU * phase)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierElement {
    theta: f64,
    coeffs: BTreeMap<(i64, i64), Complex64>,
}

#[derive(Serialize, Deserialize)]
struct CoeffJson {
    m: i64,
    n: i64,
    #[serde(default)]
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    theta: f64,
    coeffs: Vec<CoeffJson>,
}

impl FourierElement {
    pub fn new(theta: f64, coeffs: impl IntoIterator<Item = ((i64, i64), Complex64)>) -> Result<Self> {
        if !(0.0..1.0).contains(&theta) {
            return Err(Error::InvalidArgument(format!("θ must lie in [0, 1), got {theta}")));
        }
        let mut map = BTreeMap::new();
        for (k, c) in coeffs {
            *map.entry(k).or_insert(Complex64::ZERO) += c;
        }
        map.retain(|_, c| *c != Complex64::ZERO);
        Ok(Self { theta, coeffs: map })
    }

    pub fn zero(theta: f64) -> Result<Self> {
        Self::new(theta, [])
    }

    pub fn one(theta: f64) -> Result<Self> {
        Self::new(theta, [((0, 0), Complex64::ONE)])
    }

    pub fn u(theta: f64) -> Result<Self> {
        Self::new(theta, [((1, 0), Complex64::ONE)])
    }

    pub fn v(theta: f64) -> Result<Self> {
        Self::new(theta, [((0, 1), Complex64::ONE)])
    }

    /// The unitary `u^m v^n`.
    pub fn monomial(theta: f64, m: i64, n: i64) -> Result<Self> {
        Self::new(theta, [((m, n), Complex64::ONE)])
    }

    /// `{"theta": …, "coeffs": [{"m": …, "n": …, "re": …, "im": …}, …]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: ElementJson =
            serde_json::from_str(text).map_err(|e| Error::spec("element", e.to_string()))?;
        Self::new(
            parsed.theta,
            parsed.coeffs.into_iter().map(|c| ((c.m, c.n), Complex64::new(c.re, c.im))),
        )
        .map_err(|e| Error::spec("theta", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&(m, n), c)| CoeffJson { m, n, re: c.re, im: c.im })
            .collect();
        serde_json::to_string(&ElementJson { theta: self.theta, coeffs }).expect("serializable")
    }

    /// Random element with `terms` coefficients in `[−1, 1]²` on `|m|, |n| ≤ radius`.
    pub fn random(rng: &mut impl Rng, theta: f64, radius: i64, terms: usize) -> Result<Self> {
        let coeffs: Vec<_> = (0..terms)
            .map(|_| {
                let k = (rng.gen_range(-radius..=radius), rng.gen_range(-radius..=radius));
                (k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            })
            .collect();
        Self::new(theta, coeffs)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn coefficient(&self, m: i64, n: i64) -> Complex64 {
        self.coeffs.get(&(m, n)).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn support(&self) -> impl Iterator<Item = (&(i64, i64), &Complex64)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_theta(other)?;
        Self::new(self.theta, self.coeffs.iter().chain(&other.coeffs).map(|(k, c)| (*k, *c)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.theta, self.coeffs.iter().map(|(k, x)| (*k, c * x))).expect("same θ")
    }

    fn same_theta(&self, other: &Self) -> Result<()> {
        if self.theta != other.theta {
            return Err(Error::ThetaMismatch(self.theta, other.theta));
        }
        Ok(())
    }

    /// Largest coefficient difference.
    pub fn distance(&self, other: &Self) -> f64 {
        let keys = self.coeffs.keys().chain(other.coeffs.keys());
        keys.map(|&(m, n)| (self.coefficient(m, n) - other.coefficient(m, n)).norm())
            .fold(0.0, f64::max)
    }

    /// `Σ |a_{m,n}|`.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// `‖a‖₂ = τ₀(a*a)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        nct_tau0(&nct_product(&nct_involution(self), self).expect("same θ")).re.max(0.0).sqrt()
    }
}

pub fn nct_product(a: &FourierElement, b: &FourierElement) -> Result<FourierElement> {
    a.same_theta(b)?;
    let mut out: BTreeMap<(i64, i64), Complex64> = BTreeMap::new();
    for (&(p, n), x) in &a.coeffs {
        for (&(m, q), y) in &b.coeffs {
            *out.entry((p + m, n + q)).or_insert(Complex64::ZERO) += x * y * lambda_pow(a.theta, m * n);
        }
    }
    FourierElement::new(a.theta, out)
}

pub fn nct_involution(a: &FourierElement) -> FourierElement {
    let coeffs = a
        .coeffs
        .iter()
        .map(|(&(m, n), c)| ((-m, -n), lambda_pow(a.theta, m * n) * c.conj()));
    FourierElement::new(a.theta, coeffs).expect("same θ")
}

pub fn nct_tau0(a: &FourierElement) -> Complex64 {
    a.coefficient(0, 0)
}

/// `⟨h_{k,l}, π(a) h_{m,n}⟩ = τ₀(h_{k,l}^* a h_{m,n})` with `h_{m,n} = u^m v^n`.
pub fn nct_matrix_element(a: &FourierElement, row: (i64, i64), col: (i64, i64)) -> Complex64 {
    let t = a.theta;
    let h_row = FourierElement::monomial(t, row.0, row.1).expect("valid θ");
    let h_col = FourierElement::monomial(t, col.0, col.1).expect("valid θ");
    let left = nct_product(&nct_involution(&h_row), a).expect("same θ");
    nct_tau0(&nct_product(&left, &h_col).expect("same θ"))
}

/// Square-shell enumeration of `ℤ²`: `(0,0)` first, then shells
/// `max(|m|,|n|) = s` walked counterclockwise from `(s, 0)`.
pub fn cantor_enum(k: u64) -> (i64, i64) {
    assert!(k >= 1, "enumeration starts at 1");
    if k == 1 {
        return (0, 0);
    }
    // shell s holds 8s points after (2s−1)² earlier ones
    let mut s = (((k - 1) as f64).sqrt() as i64 + 1) / 2;
    while (2 * s + 1).pow(2) < k as i64 {
        s += 1;
    }
    while s > 1 && (2 * s - 1).pow(2) >= k as i64 {
        s -= 1;
    }
    let o = k as i64 - (2 * s - 1).pow(2) - 1;
    if o <= s {
        (s, o)
    } else if o <= 3 * s {
        (2 * s - o, s)
    } else if o <= 5 * s {
        (-s, 4 * s - o)
    } else if o <= 7 * s {
        (o - 6 * s, -s)
    } else {
        (s, o - 8 * s)
    }
}

/// Inverse of [`cantor_enum`].
pub fn cantor_index((m, n): (i64, i64)) -> u64 {
    let s = m.abs().max(n.abs());
    if s == 0 {
        return 1;
    }
    let o = if m == s && n >= 0 {
        n
    } else if n == s {
        2 * s - m
    } else if m == -s {
        4 * s - n
    } else if n == -s {
        m + 6 * s
    } else {
        n + 8 * s
    };
    ((2 * s - 1).pow(2) + 1 + o) as u64
}

/// Spectrum of `Δ_θ^{-1}`: `1/(m² + n²)` over `0 < m² + n² ≤ radius²`, ordered
/// by value with ties broken by enumeration index, plus a `c/n` envelope
/// fitted on the top quarter of the data.
pub fn nct_inv_laplacian(radius: u64) -> Result<EigenvalueSequence> {
    if radius == 0 {
        return Err(Error::InvalidArgument("need radius ≥ 1".into()));
    }
    let r = radius as i64;
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for m in -r..=r {
        for n in -r..=r {
            let q = m * m + n * n;
            if q > 0 && q <= r * r {
                values.push(1.0 / q as f64);
                labels.push(cantor_index((m, n)));
            }
        }
    }
    let t = EigenvalueSequence::from_enumeration(values, labels)?;
    let len = t.available().expect("data-backed");
    let start = (3 * len / 4).max(1);
    let data: Vec<f64> = (1..=len).map(|n| t.mu(n).expect("in range")).collect();
    let tail = TailDescriptor::fit(&data, 1.0, start)?;
    t.with_tail(tail)
}

/// `⟨h_{m,n}, π_θ(a) h_{m,n}⟩ = a_{0,0}` for every eigenvector.
pub fn nct_diag(a: &FourierElement) -> DiagonalObservable {
    DiagonalObservable::constant(nct_tau0(a)).with_label("nc torus element")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const THETA: f64 = 0.3;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn enumeration_walk() {
        assert_eq!(cantor_enum(1), (0, 0));
        assert_eq!(cantor_enum(2), (1, 0));
        let first: Vec<_> = (2..=9).map(cantor_enum).collect();
        assert_eq!(first, vec![(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]);
        assert_eq!(cantor_enum(10), (2, 0));
        let mut seen = std::collections::HashSet::new();
        for k in 1..=10_000u64 {
            let p = cantor_enum(k);
            assert!(seen.insert(p), "repeat at {k}");
            assert_eq!(cantor_index(p), k);
        }
        // shells 0..=49 are complete: 99² points
        assert!((-49..=49).all(|m| (-49..=49).all(|n| seen.contains(&(m, n)))));
    }

    #[test]
    fn product_examples() {
        let one = FourierElement::one(THETA).unwrap();
        let u = FourierElement::u(THETA).unwrap();
        let v = FourierElement::v(THETA).unwrap();
        let b = FourierElement::new(THETA, [((2, -1), c(0.5, 1.0)), ((0, 3), c(-2.0, 0.0))]).unwrap();
        assert_eq!(nct_product(&one, &b).unwrap(), b);
        assert_eq!(nct_product(&b, &one).unwrap(), b);
        let uu = nct_product(&u, &u).unwrap();
        assert_eq!(uu, FourierElement::monomial(THETA, 2, 0).unwrap());
        let uv = nct_product(&u, &v).unwrap();
        let vu = nct_product(&v, &u).unwrap();
        assert_eq!(uv.coefficient(1, 1), Complex64::ONE);
        assert!((vu.coefficient(1, 1) - lambda_pow(THETA, 1)).norm() < 1e-15);
        let other = FourierElement::one(0.1).unwrap();
        assert_eq!(nct_product(&u, &other), Err(Error::ThetaMismatch(THETA, 0.1)));
    }

    #[test]
    fn involution_and_trace() {
        let one = FourierElement::one(THETA).unwrap();
        assert_eq!(nct_involution(&one), one);
        let us = nct_involution(&FourierElement::u(THETA).unwrap());
        assert_eq!(us, FourierElement::monomial(THETA, -1, 0).unwrap());
        let a = FourierElement::new(THETA, [((0, 0), c(3.0, 0.0)), ((1, 1), c(2.0, 0.0))]).unwrap();
        assert_eq!(nct_tau0(&a), c(3.0, 0.0));
        assert_eq!(nct_tau0(&FourierElement::u(THETA).unwrap()), Complex64::ZERO);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let x = FourierElement::random(&mut rng, THETA, 3, 6).unwrap();
            let y = FourierElement::random(&mut rng, THETA, 3, 6).unwrap();
            assert!(nct_involution(&nct_involution(&x)).distance(&x) < 1e-14);
            let xy = nct_tau0(&nct_product(&x, &y).unwrap());
            let yx = nct_tau0(&nct_product(&y, &x).unwrap());
            assert!((xy - yx).norm() < 1e-13);
            let lhs = nct_involution(&nct_product(&x, &y).unwrap());
            let rhs = nct_product(&nct_involution(&y), &nct_involution(&x)).unwrap();
            assert!(lhs.distance(&rhs) < 1e-13);
        }
    }

    #[test]
    fn matrix_elements_reduce_to_the_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = FourierElement::random(&mut rng, THETA, 2, 8).unwrap();
        for k in 1..40 {
            let h = cantor_enum(k);
            assert!((nct_matrix_element(&a, h, h) - nct_tau0(&a)).norm() < 1e-14);
        }
        // off-diagonal: ⟨h_{0,0}, π(u) h_{-1,0}⟩ = 1
        let u = FourierElement::u(THETA).unwrap();
        assert!((nct_matrix_element(&u, (0, 0), (-1, 0)) - Complex64::ONE).norm() < 1e-15);
        assert_eq!(nct_diag(&a).constant_value(), Some(nct_tau0(&a)));
        assert_eq!(nct_diag(&FourierElement::zero(THETA).unwrap()).constant_value(), Some(Complex64::ZERO));
    }

    #[test]
    fn lattice_spectrum() {
        let t = nct_inv_laplacian(100).unwrap();
        for n in 1..=4 {
            assert_eq!(t.mu(n).unwrap(), 1.0);
        }
        assert_eq!(t.mu(5).unwrap(), 0.5);
        // ties at q = 1 ordered by enumeration index: (1,0), (0,1), (−1,0), (0,−1)
        let labels: Vec<u64> = (1..=4).map(|n| t.label(n).unwrap()).collect();
        assert_eq!(labels, vec![2, 4, 6, 8]);
        let tail = t.tail().unwrap();
        assert!((tail.coefficient - std::f64::consts::PI).abs() < 0.01);
        assert!(tail.deviation < 0.01);
    }

    #[test]
    fn lattice_sum_grows_like_two_pi_log() {
        // Σ_{0 < q ≤ R²} 1/q, brute force in exact integer arithmetic
        for (r, want) in [(50u64, 27.161336144908026), (200, 35.874423166753311)] {
            let t = nct_inv_laplacian(r).unwrap();
            let len = t.available().unwrap();
            let sum: f64 = (1..=len).map(|n| t.mu(n).unwrap()).sum();
            assert!((sum - want).abs() < 1e-9, "R = {r}: {sum}");
        }
    }

    #[test]
    fn json_round_trip() {
        let a = FourierElement::new(0.5, [((0, 0), c(1.0, 0.0)), ((-1, 2), c(0.25, -0.5))]).unwrap();
        assert_eq!(FourierElement::from_json(&a.to_json()).unwrap(), a);
        assert!(matches!(FourierElement::from_json(r#"{"theta": 1.5, "coeffs": []}"#), Err(Error::Spec { .. })));
    }
}
