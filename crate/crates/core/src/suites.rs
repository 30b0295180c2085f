//! Named randomized property suites, deterministic for a given seed.
//!
//! * `lemmas`: the sequence-transform lemmas on sampled inputs.
//! * `algebra`: rotation-algebra axioms on random finite elements.
//! * `routes`: consistency, scaling and linearity of the two trace routes.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::genlimits::lemmas::{max_oscillation, trivial_fact_gap};
use crate::genlimits::{
    cal_l_sequence, cesaro, from_samples, limit_estimate, BoundedSequence, Ladder, LimitEstimate, LimitPlan,
};
use crate::models::{
    block_operator, lambda_pow, nct_inv_laplacian, nct_involution, nct_product, nct_tau0, torus_invsqrt_laplacian,
    FourierElement,
};
use crate::residue::{dixmier_log_average, dixmier_residue, ResiduePlan};
use crate::spectral::{DiagonalObservable, EigenvalueSequence, Law};
use crate::summation::SumPlan;
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 1;
pub const SUITES: [&str; 3] = ["lemmas", "algebra", "routes"];

/// Deformation parameters exercised by the algebra suite.
pub fn thetas() -> [f64; 3] {
    [0.1, (5f64.sqrt() - 1.0) / 2.0, 0.5]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// First failing input, rendered.
    pub counterexample: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

/// Collects case outcomes for one named check.
struct Check {
    result: CheckResult,
}

impl Check {
    fn new(name: &str) -> Self {
        Self {
            result: CheckResult { name: name.into(), cases: 0, failures: 0, counterexample: None },
        }
    }

    fn case(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.result.cases += 1;
        if !ok {
            self.result.failures += 1;
            if self.result.counterexample.is_none() {
                self.result.counterexample = Some(describe());
            }
        }
    }

    fn done(self) -> CheckResult {
        self.result
    }
}

pub fn run_suite(name: &str, seed: u64, sum: &SumPlan) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = match name {
        "lemmas" => lemma_suite(&mut rng, sum)?,
        "algebra" => algebra_suite(&mut rng, 1000)?,
        "routes" => route_suite(&mut rng, sum)?,
        _ => return Err(Error::Unknown { what: "suite", name: name.into() }),
    };
    Ok(SuiteReport { suite: name.into(), seed, checks })
}

pub fn lemma_suite(rng: &mut ChaCha8Rng, sum: &SumPlan) -> Result<Vec<CheckResult>> {
    Ok(vec![
        trivial_fact(rng, 10_000),
        oscillation_decay()?,
        finite_sequences_vanish(rng, 200, sum)?,
        dilation_consistency(sum)?,
        shift_dilation_exactness(rng, 12, sum)?,
    ])
}

/// `sup f − inf f ≤ g(b)/a − g(a)/b` for `f = g/t`, `g ≥ 0` increasing.
pub fn trivial_fact(rng: &mut impl Rng, cases: usize) -> CheckResult {
    let mut check = Check::new("trivial fact");
    for _ in 0..cases {
        let a = rng.gen_range(0.5..10.0);
        let b = a + rng.gen_range(0.01..20.0);
        let mut ts: Vec<f64> = (0..22).map(|_| rng.gen_range(a..b)).collect();
        ts.push(a);
        ts.push(b);
        ts.sort_by(f64::total_cmp);
        let mut g = rng.gen_range(0.0..5.0);
        let samples: Vec<(f64, f64)> = ts
            .iter()
            .map(|&t| {
                g += rng.gen_range(0.0..3.0);
                (t, g)
            })
            .collect();
        let gap = trivial_fact_gap(&samples);
        let scale = samples.last().map_or(1.0, |s| s.1 / a).max(1.0);
        check.case(gap >= -1e-12 * scale, || format!("gap {gap} on {samples:?}"));
    }
    check.done()
}

fn lemma_operators(sizes: (u64, u64)) -> Result<Vec<(&'static str, EigenvalueSequence)>> {
    Ok(vec![
        ("harmonic", EigenvalueSequence::harmonic()),
        ("torus", torus_invsqrt_laplacian(sizes.0)?),
        ("nctorus", nct_inv_laplacian(sizes.1)?),
        ("blocks", block_operator()),
    ])
}

/// Oscillation of `g(t) = ∫_1^t μ_⌊s⌋ ds / ln(1+t)` on unit intervals,
/// maximized over `[N, 2N]`, decreases along `N = 2^6, 2^8, …, 2^12`.
pub fn oscillation_decay() -> Result<CheckResult> {
    let mut check = Check::new("log-average oscillation decay");
    for (name, t) in lemma_operators((1 << 16, 120))? {
        let osc: Vec<f64> = [6, 8, 10, 12]
            .iter()
            .map(|&e| max_oscillation(&t, 1 << e))
            .collect::<Result<_>>()?;
        let ok = osc.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)) && osc[3] < osc[0];
        check.case(ok, || format!("{name}: {osc:?}"));
    }
    Ok(check.done())
}

/// Finitely supported sequences: the limit surrogate is exactly 0 and the
/// 𝓛-sequence vanishes once `e^{k−1}` passes the support.
pub fn finite_sequences_vanish(rng: &mut impl Rng, cases: usize, sum: &SumPlan) -> Result<CheckResult> {
    let mut check = Check::new("finite sequences vanish");
    let plan = LimitPlan { ladder: Ladder::new(1 << 10, 1 << 16, 2.0)?, ..LimitPlan::default() };
    for _ in 0..cases {
        let len = rng.gen_range(1..500usize);
        let values: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = BoundedSequence::finite(values.clone());
        let est = limit_estimate(&a, &plan, sum)?;
        let k0 = ((len + 1) as f64).ln().ceil() as u64 + 1;
        let tail: Vec<f64> = (k0..k0 + 4).map(|k| cal_l_sequence(&a, k)).collect::<Result<_>>()?;
        let ok = est.value() == Some(0.0) && tail.iter().all(|&x| x == 0.0);
        check.case(ok, || format!("len {len}: estimate {est:?}, 𝓛 tail {tail:?}, values {values:?}"));
    }
    Ok(check.done())
}

/// For `γ = γ(T)` of each model, the 𝓛-sequences of `γ` and `D₂γ` have
/// agreeing limits or overlapping bands.
pub fn dilation_consistency(sum: &SumPlan) -> Result<CheckResult> {
    let mut check = Check::new("D2 consistency of the L-sequence");
    const LEN: u64 = 1 << 19;
    const K: u64 = 13; // e^13 < 2^19
    let plan = LimitPlan { cesaro_order: 0, ..LimitPlan::default() };
    for (name, t) in lemma_operators((1 << 20, 420))? {
        let points: Vec<u64> = (1..=LEN).collect();
        let gamma = BoundedSequence::from_values(t.gamma_at(&points, sum)?);
        let dilated = gamma.dilate(2)?;
        let l_est = |a: &BoundedSequence| -> Result<LimitEstimate> {
            let samples: Vec<(u64, f64)> = (1..=K).map(|k| cal_l_sequence(a, k).map(|v| (k, v))).collect::<Result<_>>()?;
            from_samples(&samples, &[], &plan)
        };
        let (x, y) = (l_est(&gamma)?, l_est(&dilated)?);
        let ok = match (x.value(), y.value()) {
            (Some(p), Some(q)) => (p - q).abs() <= plan.threshold * p.abs().max(1.0),
            _ => x.overlaps(&y),
        };
        check.case(ok, || format!("{name}: L(γ) {x:?} vs L(D2 γ) {y:?}"));
    }
    Ok(check.done())
}

/// Convergent `a_k = L + A k^{-r} cos(ω ln k + φ)`: the limit surrogate of
/// `a`, `T_j a`, `D_j a` and higher Cesàro means all return `L`.
pub fn shift_dilation_exactness(rng: &mut impl Rng, cases: usize, sum: &SumPlan) -> Result<CheckResult> {
    let mut check = Check::new("shift/dilation exactness");
    let plan = LimitPlan { ladder: Ladder::new(1 << 10, 1 << 18, 2.0)?, ..LimitPlan::default() };
    for _ in 0..cases {
        let l: f64 = rng.gen_range(-1.0..1.0);
        let amp = rng.gen_range(0.0..0.5);
        let r = rng.gen_range(1.0..2.0);
        let w = rng.gen_range(0.0..4.0);
        let ph = rng.gen_range(0.0..std::f64::consts::TAU);
        let a = BoundedSequence::new(move |k| l + amp * (k as f64).powf(-r) * (w * (k as f64).ln() + ph).cos(), l.abs() + amp)?;
        let j = rng.gen_range(1..100);
        let d = rng.gen_range(2..8);
        let tol = plan.threshold * l.abs().max(1.0);
        let mut got = Vec::new();
        for seq in [a.clone(), a.shift(j)?, a.dilate(d)?] {
            got.push(limit_estimate(&seq, &plan, sum)?.value());
        }
        for order in 2..=3 {
            got.push(Some(cesaro(&a, order, 1 << 18)?));
        }
        let ok = got.iter().all(|v| v.is_some_and(|v| (v - l).abs() <= tol));
        check.case(ok, || format!("L {l}, A {amp}, r {r}, ω {w}, φ {ph}, shift {j}, dilation {d}: {got:?}"));
    }
    Ok(check.done())
}

/// Associativity, `a** = a`, `(ab)* = b*a*`, `τ₀(ab) = τ₀(ba)`,
/// `τ₀(a*a) = Σ|a_{m,n}|² ≥ 0` and `vu = λuv`, per deformation parameter.
pub fn algebra_suite(rng: &mut impl Rng, cases: usize) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for theta in thetas() {
        let mut assoc = Check::new(&format!("associativity θ={theta}"));
        let mut invol = Check::new(&format!("involution θ={theta}"));
        let mut anti = Check::new(&format!("antimultiplicativity θ={theta}"));
        let mut trace = Check::new(&format!("trace property θ={theta}"));
        let mut positive = Check::new(&format!("faithful positivity θ={theta}"));
        for _ in 0..cases {
            let a = FourierElement::random(rng, theta, 3, 5)?;
            let b = FourierElement::random(rng, theta, 3, 5)?;
            let c = FourierElement::random(rng, theta, 3, 5)?;
            let scale = (a.l1_norm() * b.l1_norm() * c.l1_norm()).max(1.0);
            let ab = nct_product(&a, &b)?;
            let lhs = nct_product(&ab, &c)?;
            let rhs = nct_product(&a, &nct_product(&b, &c)?)?;
            let e = lhs.distance(&rhs);
            assoc.case(e <= 1e-12 * scale, || format!("|(ab)c − a(bc)| = {e} for a = {}, b = {}, c = {}", a.to_json(), b.to_json(), c.to_json()));
            let e = nct_involution(&nct_involution(&a)).distance(&a);
            invol.case(e <= 1e-12 * a.l1_norm().max(1.0), || format!("|a** − a| = {e} for {}", a.to_json()));
            let e = nct_involution(&ab).distance(&nct_product(&nct_involution(&b), &nct_involution(&a))?);
            anti.case(e <= 1e-12 * scale, || format!("|(ab)* − b*a*| = {e} for a = {}, b = {}", a.to_json(), b.to_json()));
            let ba = nct_product(&b, &a)?;
            let e = (nct_tau0(&ab) - nct_tau0(&ba)).norm();
            trace.case(e <= 1e-12 * scale, || format!("|τ(ab) − τ(ba)| = {e} for a = {}, b = {}", a.to_json(), b.to_json()));
            let t = nct_tau0(&nct_product(&nct_involution(&a), &a)?);
            let mass: f64 = a.support().map(|(_, c)| c.norm_sqr()).sum();
            let ok = t.re >= 0.0 && (t.re - mass).abs() <= 1e-12 * mass.max(1.0) && t.im.abs() <= 1e-12 * mass.max(1.0) && (mass > 0.0) == !a.is_zero();
            positive.case(ok, || format!("τ(a*a) = {t} vs Σ|a|² = {mass} for {}", a.to_json()));
        }
        let u = FourierElement::u(theta)?;
        let v = FourierElement::v(theta)?;
        let mut comm = Check::new(&format!("commutation vu = λuv θ={theta}"));
        let vu = nct_product(&v, &u)?;
        let luv = nct_product(&u, &v)?.scale(lambda_pow(theta, 1));
        comm.case(vu.distance(&luv) <= 1e-15, || format!("vu = {}, λuv = {}", vu.to_json(), luv.to_json()));
        out.extend([assoc.done(), invol.done(), anti.done(), trace.done(), positive.done(), comm.done()]);
    }
    Ok(out)
}

/// Random `μ_n = c/⌈n/m⌉` laws and random convergent diagonals.
pub fn route_suite(rng: &mut impl Rng, sum: &SumPlan) -> Result<Vec<CheckResult>> {
    let plan = ResiduePlan::default();
    let log_plan = ResiduePlan { ladder: Ladder::new(1 << 10, 1 << 22, 2.0)?, ..plan };
    let mut consistent = Check::new("route consistency");
    let mut scaling = Check::new("scale equivariance");
    let mut linear = Check::new("residue linearity");
    let mut positive = Check::new("positivity");
    for _ in 0..8 {
        let c = rng.gen_range(0.2..3.0);
        let m = rng.gen_range(1..4u64);
        let t = EigenvalueSequence::law(Law::Multiplicity { scale: c, exponent: 1.0, multiplicity: m })?;
        let one = DiagonalObservable::identity();
        let r = dixmier_residue(&one, &t, &plan, sum)?;
        let l = dixmier_log_average(&one, &t, &log_plan, sum)?;
        let expected = c * m as f64;
        let ok = match (r.value(), l.value()) {
            (Some(x), Some(y)) => {
                let allow = r.interval().1 - x + l.interval().1 - y + plan.threshold * x.abs().max(1.0);
                (x - y).abs() <= allow && (x - expected).abs() <= plan.threshold * expected
            }
            _ => false,
        };
        consistent.case(ok, || format!("c {c}, m {m}: residue {r:?}, log-average {l:?}"));

        let k = rng.gen_range(0.1..10.0);
        let scaled = dixmier_residue(&one, &t.scaled(k)?, &plan, sum)?;
        let ok = matches!((r.value(), scaled.value()), (Some(x), Some(y)) if (y - k * x).abs() <= plan.threshold * (k * x).abs().max(1.0));
        scaling.case(ok, || format!("c {c}, m {m}, factor {k}: {r:?} vs {scaled:?}"));

        let a = random_convergent(rng)?;
        let b = random_convergent(rng)?;
        let (alpha, beta) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let combo = DiagonalObservable::linear_combination(&[(alpha.into(), &a), (beta.into(), &b)]);
        let ra = dixmier_residue(&a, &t, &plan, sum)?;
        let rb = dixmier_residue(&b, &t, &plan, sum)?;
        let rc = dixmier_residue(&combo, &t, &plan, sum)?;
        let ok = match (ra.value(), rb.value(), rc.value()) {
            (Some(x), Some(y), Some(z)) => (z - alpha * x - beta * y).abs() <= 10.0 * plan.threshold * expected.max(1.0),
            _ => false,
        };
        linear.case(ok, || format!("α {alpha}, β {beta}: {ra:?}, {rb:?}, {rc:?}"));
        let (lo, _) = ra.interval();
        positive.case(lo >= 0.0, || format!("nonnegative diagonal gave {ra:?}"));
    }
    Ok(vec![consistent.done(), scaling.done(), linear.done(), positive.done()])
}

/// Nonnegative `L + A m^{-r} cos(ω m + φ)` with `A ≤ L`.
pub fn random_convergent(rng: &mut impl Rng) -> Result<DiagonalObservable> {
    let limit: f64 = rng.gen_range(0.1..2.0);
    let amplitude = rng.gen_range(0.0..limit.min(0.5));
    DiagonalObservable::convergent(
        limit,
        amplitude,
        rng.gen_range(1.0..2.0),
        rng.gen_range(0.0..3.0),
        rng.gen_range(0.0..std::f64::consts::TAU),
    )
}

/// `Σ` of two complex diagonals evaluated at `m`, exposed for tests.
pub fn diag_sum(a: &DiagonalObservable, b: &DiagonalObservable, m: u64) -> Complex64 {
    a.value(m) + b.value(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_suite("nope", 1, &SumPlan::default()), Err(Error::Unknown { .. })));
    }

    #[test]
    fn algebra_passes_and_is_reproducible() {
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        let a = algebra_suite(&mut r1, 50).unwrap();
        let b = algebra_suite(&mut r2, 50).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(CheckResult::passed), "{a:?}");
    }

    #[test]
    fn counterexample_is_reported() {
        let mut c = Check::new("demo");
        c.case(true, || unreachable!());
        c.case(false, || "first".into());
        c.case(false, || "second".into());
        let r = c.done();
        assert_eq!((r.cases, r.failures), (3, 2));
        assert_eq!(r.counterexample.as_deref(), Some("first"));
    }
}
