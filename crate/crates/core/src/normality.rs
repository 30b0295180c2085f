//! Domination of eigenvector profiles and monotone convergence of the
//! normalized integral along increasing chains.
//!
//! For a multiplication algebra, `‖P h_m‖ ≤ ‖P h‖` for every projection `P`
//! reduces to `|h_m|² ≤ |h|²` pointwise. For the rotation algebra acting on
//! `L²(τ₀)` by left multiplication the norms are `‖P h‖² = τ₀(h* P* P h)`,
//! evaluated exactly on finite Fourier support.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::genlimits::LimitEstimate;
use crate::models::nctorus::{nct_involution, nct_product, nct_tau0, FourierElement};
use crate::quantum_limit::{phi, NormalizedIntegral};
use crate::spectral::DiagonalObservable;
use crate::summation::SumPlan;
use crate::{Error, Result};

/// An eigenvector profile.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `|h|²` sampled on a shared grid.
    Grid(Vec<f64>),
    /// A vector of `L²(τ₀)` with finite Fourier support.
    Fourier(FourierElement),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominationWitness {
    /// Grid abscissae (ignored for Fourier profiles).
    pub grid: Vec<f64>,
    /// `(m, profile of h_m)`.
    pub profiles: Vec<(u64, Profile)>,
    pub dominator: Profile,
    /// Projections tested against Fourier profiles.
    pub projections: Vec<FourierElement>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Domination {
    Dominated {
        /// Largest `‖P h_m‖² − ‖P h‖²` (or `|h_m|² − |h|²`) seen.
        max_excess: f64,
        checks: usize,
    },
    Violated {
        m: u64,
        /// Grid abscissa, or index of the offending projection.
        location: f64,
        excess: f64,
    },
}

impl Domination {
    pub fn is_dominated(&self) -> bool {
        matches!(self, Domination::Dominated { .. })
    }
}

impl DominationWitness {
    fn validate(&self) -> Result<()> {
        if !(self.tolerance >= 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be ≥ 0, got {}", self.tolerance)));
        }
        let check_grid = |p: &[f64], what: &str| -> Result<()> {
            if p.len() != self.grid.len() {
                return Err(Error::IncomparableProfiles(format!(
                    "{what} has {} samples on a grid of {}",
                    p.len(),
                    self.grid.len()
                )));
            }
            if let Some(x) = p.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
                return Err(Error::InvalidArgument(format!("{what} has a negative or non-finite density {x}")));
            }
            Ok(())
        };
        match &self.dominator {
            Profile::Grid(d) => check_grid(d, "dominator")?,
            Profile::Fourier(_) => {}
        }
        for (m, p) in &self.profiles {
            match (p, &self.dominator) {
                (Profile::Grid(g), Profile::Grid(_)) => check_grid(g, &format!("profile {m}"))?,
                (Profile::Fourier(a), Profile::Fourier(h)) if a.theta() == h.theta() => {}
                _ => {
                    return Err(Error::IncomparableProfiles(format!(
                        "profile {m} and the dominator use different encodings"
                    )))
                }
            }
        }
        Ok(())
    }
}

/// `‖P x‖² = τ₀(x* P* P x)`.
pub fn projected_norm_sq(p: &FourierElement, x: &FourierElement) -> Result<f64> {
    let px = nct_product(p, x)?;
    Ok(nct_tau0(&nct_product(&nct_involution(&px), &px)?).re)
}

pub fn dominated_check(w: &DominationWitness) -> Result<Domination> {
    w.validate()?;
    let mut max_excess = f64::NEG_INFINITY;
    let mut checks = 0;
    match &w.dominator {
        Profile::Grid(h) => {
            for (m, p) in &w.profiles {
                let Profile::Grid(g) = p else { unreachable!("validated") };
                for (i, (a, b)) in g.iter().zip(h).enumerate() {
                    let excess = a - b;
                    checks += 1;
                    if excess > w.tolerance {
                        return Ok(Domination::Violated { m: *m, location: w.grid[i], excess });
                    }
                    max_excess = max_excess.max(excess);
                }
            }
        }
        Profile::Fourier(h) => {
            let dom: Vec<f64> = w
                .projections
                .iter()
                .map(|p| projected_norm_sq(p, h))
                .collect::<Result<_>>()?;
            for (m, p) in &w.profiles {
                let Profile::Fourier(x) = p else { unreachable!("validated") };
                for (i, (proj, d)) in w.projections.iter().zip(&dom).enumerate() {
                    let excess = projected_norm_sq(proj, x)? - d;
                    checks += 1;
                    if excess > w.tolerance * d.abs().max(1.0) {
                        return Ok(Domination::Violated { m: *m, location: i as f64, excess });
                    }
                    max_excess = max_excess.max(excess);
                }
            }
        }
    }
    Ok(Domination::Dominated { max_excess: max_excess.max(0.0), checks })
}

/// Torus witness: `|f_m(θ)|² = |e^{imθ}|²/(2π)` for the first `modes`
/// eigenfunctions against `h = f_0`, on `points` grid points of `[−π, π)`.
pub fn torus_witness(modes: u64, points: usize) -> DominationWitness {
    let grid: Vec<f64> = (0..points)
        .map(|i| -std::f64::consts::PI + std::f64::consts::TAU * i as f64 / points as f64)
        .collect();
    let density = |m: i64| -> Vec<f64> {
        grid.iter()
            .map(|&x| Complex64::cis(m as f64 * x).norm_sqr() / std::f64::consts::TAU)
            .collect()
    };
    let profiles = (1..=modes)
        .map(|i| (i, Profile::Grid(density(crate::models::torus_mode(i)))))
        .collect();
    DominationWitness {
        dominator: Profile::Grid(density(0)),
        grid,
        profiles,
        projections: Vec::new(),
        tolerance: 1e-12,
    }
}

/// Rotation-algebra witness: `h_{m,n} = u^m v^n` for the first `count`
/// enumeration indices against `h = h_{0,0}`.
pub fn nct_witness(theta: f64, count: u64, projections: Vec<FourierElement>) -> Result<DominationWitness> {
    let profiles = (1..=count)
        .map(|k| {
            let (m, n) = crate::models::cantor_enum(k);
            FourierElement::monomial(theta, m, n).map(|x| (k, Profile::Fourier(x)))
        })
        .collect::<Result<_>>()?;
    Ok(DominationWitness {
        grid: Vec::new(),
        profiles,
        dominator: Profile::Fourier(FourierElement::one(theta)?),
        projections,
        tolerance: 1e-12,
    })
}

/// A self-adjoint approximate projection together with `‖P² − P‖₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproximateProjection {
    pub element: FourierElement,
    pub defect: f64,
}

/// Random self-adjoint start with spectrum inside `(0, 1)` followed by
/// McWeeny steps `P ↦ 3P² − 2P³`, truncated to `|m|, |n| ≤ radius` after
/// each step. Returns the iterate with the smallest idempotency defect.
pub fn approximate_projection(
    rng: &mut impl Rng,
    theta: f64,
    radius: i64,
    steps: usize,
) -> Result<ApproximateProjection> {
    let x = FourierElement::random(rng, theta, radius.min(2), 4)?;
    let sa = x.add(&nct_involution(&x))?;
    let scale = 0.45 / sa.l1_norm().max(f64::MIN_POSITIVE);
    let half = FourierElement::new(theta, [((0, 0), Complex64::new(0.5, 0.0))])?;
    let mut p = half.add(&sa.scale(scale.into()))?;
    let mut best = ApproximateProjection { defect: idempotency_defect(&p)?, element: p.clone() };
    for _ in 0..steps {
        let p2 = nct_product(&p, &p)?;
        let p3 = nct_product(&p2, &p)?;
        let next = p2.scale(3.0.into()).add(&p3.scale((-2.0).into()))?;
        // symmetrize against rounding, then truncate
        let sym = next.add(&nct_involution(&next))?.scale(0.5.into());
        p = FourierElement::new(
            theta,
            sym.support()
                .filter(|((m, n), c)| m.abs() <= radius && n.abs() <= radius && c.norm() > 1e-15)
                .map(|(k, c)| (*k, *c)),
        )?;
        let defect = idempotency_defect(&p)?;
        if defect < best.defect {
            best = ApproximateProjection { element: p.clone(), defect };
        }
    }
    Ok(best)
}

pub fn idempotency_defect(p: &FourierElement) -> Result<f64> {
    let p2 = nct_product(p, p)?;
    Ok(p2.add(&p.scale((-1.0).into()))?.l2_norm())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneReport {
    pub chain: Vec<LimitEstimate>,
    pub supremum: LimitEstimate,
    /// `sup_j φ(A_j)` over converged chain values.
    pub chain_sup: Option<f64>,
    pub difference: Option<f64>,
    pub agrees: bool,
}

/// `φ(A_j)` along an increasing chain against `φ(A)` for its supremum.
/// Monotonicity is checked on sampled indices up to `check_upto`.
pub fn monotone_convergence_check(
    integral: &NormalizedIntegral,
    chain: &[DiagonalObservable],
    sup: &DiagonalObservable,
    tolerance: f64,
    check_upto: u64,
    sum: &SumPlan,
) -> Result<MonotoneReport> {
    let grid = crate::spectral::sequence::sample_points(1, check_upto, 2048);
    let slack = 1e-12;
    for (j, a) in chain.iter().enumerate() {
        let next = chain.get(j + 1).unwrap_or(sup);
        for &m in &grid {
            let (x, y) = (a.value(m), next.value(m));
            if x.im != 0.0 || x.re < -slack || x.re > y.re + slack {
                return Err(Error::NonMonotoneChain { index: j, m });
            }
        }
    }
    let values: Vec<LimitEstimate> = chain.iter().map(|a| phi(a, integral, sum)).collect::<Result<_>>()?;
    let supremum = phi(sup, integral, sum)?;
    let chain_sup = values
        .iter()
        .filter_map(LimitEstimate::value)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
    let difference = match (chain_sup, supremum.value()) {
        (Some(a), Some(b)) => Some((a - b).abs()),
        _ => None,
    };
    Ok(MonotoneReport {
        agrees: difference.is_some_and(|d| d <= tolerance),
        chain: values,
        supremum,
        chain_sup,
        difference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::ResiduePlan;
    use crate::spectral::EigenvalueSequence;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn torus_profiles_are_dominated() {
        let r = dominated_check(&torus_witness(64, 256)).unwrap();
        assert!(r.is_dominated(), "{r:?}");
    }

    #[test]
    fn spike_is_caught() {
        let mut w = torus_witness(2, 8);
        let flat = vec![1.0; 8];
        w.dominator = Profile::Grid(flat.clone());
        let mut spike = flat.clone();
        spike[5] = 1.5;
        w.profiles = vec![(1, Profile::Grid(flat)), (2, Profile::Grid(spike))];
        match dominated_check(&w).unwrap() {
            Domination::Violated { m, location, excess } => {
                assert_eq!(m, 2);
                assert_eq!(location, w.grid[5]);
                assert!((excess - 0.5).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        w.profiles.push((3, Profile::Fourier(FourierElement::one(0.2).unwrap())));
        assert!(matches!(dominated_check(&w), Err(Error::IncomparableProfiles(_))));
    }

    #[test]
    fn rotation_algebra_projections() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let theta = 0.3;
        let ps: Vec<FourierElement> = (0..4)
            .map(|_| approximate_projection(&mut rng, theta, 3, 4).unwrap())
            .inspect(|p| assert!(p.defect < 0.25, "defect {}", p.defect))
            .map(|p| p.element)
            .collect();
        let w = nct_witness(theta, 25, ps).unwrap();
        let r = dominated_check(&w).unwrap();
        assert!(r.is_dominated(), "{r:?}");
    }

    #[test]
    fn truncation_chain() {
        let i = NormalizedIntegral::new(EigenvalueSequence::harmonic(), ResiduePlan::default(), &SumPlan::default())
            .unwrap();
        let a = DiagonalObservable::convergent(0.8, 0.15, 1.0, 3.0, 0.0).unwrap();
        let chain: Vec<_> = [0.2, 0.5, 0.7, 0.9, 1.0].iter().map(|&t| a.min_with(t)).collect();
        let rep = monotone_convergence_check(&i, &chain, &a, 1e-2, 1 << 16, &SumPlan::default()).unwrap();
        assert!(rep.agrees, "{rep:?}");
        let backwards: Vec<_> = chain.iter().rev().cloned().collect();
        assert!(matches!(
            monotone_convergence_check(&i, &backwards, &a, 1e-2, 1 << 16, &SumPlan::default()),
            Err(Error::NonMonotoneChain { .. })
        ));
    }
}
