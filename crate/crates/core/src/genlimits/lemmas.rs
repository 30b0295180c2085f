//! Quantities behind the sequence-transform lemmas, packaged so that the
//! property suites can check them on sampled inputs.

use crate::spectral::EigenvalueSequence;
use crate::summation::CompensatedSum;
use crate::Result;

/// For an increasing `g` sampled as `(t, g(t))` on `[a, b]` (sorted by `t`,
/// `a > 0`), returns `(g(b)/a − g(a)/b) − (sup f − inf f)` with `f = g/t`.
/// Nonnegative whenever the inequality holds on the grid.
pub fn trivial_fact_gap(samples: &[(f64, f64)]) -> f64 {
    let (a, ga) = samples[0];
    let (b, gb) = samples[samples.len() - 1];
    let f = samples.iter().map(|(t, g)| g / t);
    let sup = f.clone().fold(f64::NEG_INFINITY, f64::max);
    let inf = f.fold(f64::INFINITY, f64::min);
    (gb / a - ga / b) - (sup - inf)
}

/// `sup − inf` over `[n, n+1)` of `g(t) = ∫_1^t μ_⌊s⌋ ds / ln(1+t)`, for every
/// `n ∈ [from, to]`.
///
/// On `[n, n+1)` the numerator is `S + (t−n)μ_n` with `S = Σ_{j<n} μ_j`, and
/// `g'` changes sign at most once (from − to +), so the sup sits at an
/// endpoint and the inf at the endpoint or at the root of `g'`.
pub fn log_average_oscillations(t: &EigenvalueSequence, from: u64, to: u64) -> Result<Vec<f64>> {
    let from = from.max(1);
    t.mu(to)?;
    let mut prefix = CompensatedSum::new();
    for j in 1..from {
        prefix.push(t.mu(j)?);
    }
    let mut out = Vec::with_capacity((to - from + 1) as usize);
    for n in from..=to {
        let s = prefix.total();
        let mu = t.mu(n)?;
        let nf = n as f64;
        let g = |x: f64| (s + (x - nf) * mu) / x.ln_1p();
        // sign of g' is the sign of h(x) = μ(1+x)ln(1+x) − (S + (x−n)μ)
        let h = |x: f64| mu * (1.0 + x) * x.ln_1p() - (s + (x - nf) * mu);
        let (g0, g1) = (g(nf), g(nf + 1.0));
        let mut inf = g0.min(g1);
        if h(nf) < 0.0 && h(nf + 1.0) > 0.0 {
            let (mut lo, mut hi) = (nf, nf + 1.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if h(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            inf = inf.min(g(0.5 * (lo + hi)));
        }
        out.push(g0.max(g1) - inf);
        prefix.push(mu);
    }
    Ok(out)
}

/// `max_{n ∈ [N, 2N]}` of [`log_average_oscillations`].
pub fn max_oscillation(t: &EigenvalueSequence, n: u64) -> Result<f64> {
    Ok(log_average_oscillations(t, n, 2 * n)?
        .into_iter()
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_fact_on_a_concave_g() {
        let samples: Vec<(f64, f64)> = (0..=100)
            .map(|i| {
                let t = 2.0 + i as f64 * 0.03;
                (t, t.sqrt() + t.ln())
            })
            .collect();
        assert!(trivial_fact_gap(&samples) >= 0.0);
    }

    #[test]
    fn oscillation_matches_dense_sampling() {
        let t = EigenvalueSequence::harmonic();
        let osc = log_average_oscillations(&t, 5, 8).unwrap();
        let mut s = 0.0;
        for j in 1..5 {
            s += 1.0 / j as f64;
        }
        for (i, n) in (5..=8u64).enumerate() {
            let mu = 1.0 / n as f64;
            let vals: Vec<f64> = (0..=10_000)
                .map(|k| {
                    let x = n as f64 + k as f64 / 10_000.0;
                    (s + (x - n as f64) * mu) / x.ln_1p()
                })
                .collect();
            let dense = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - vals.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!((osc[i] - dense).abs() < 1e-9, "n = {n}: {} vs {dense}", osc[i]);
            s += mu;
        }
    }

    #[test]
    fn oscillation_decays_for_the_harmonic_law() {
        let t = EigenvalueSequence::harmonic();
        let m: Vec<f64> = [16, 128, 1024, 8192].iter().map(|&n| max_oscillation(&t, n).unwrap()).collect();
        assert!(m.windows(2).all(|w| w[1] < w[0]), "{m:?}");
    }
}
