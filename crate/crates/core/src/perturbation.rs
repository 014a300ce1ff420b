//! Perturbations of roofs and flow observables that keep flow entropy or
//! flow pressure fixed, and witnesses of near-equilibrium ergodic measures.
//!
//! Each construction is run at a finite resolution and returns the
//! identities it is supposed to satisfy together with the residual actually
//! achieved. Every potential handled here is locally constant and therefore
//! has a unique equilibrium state; nothing in this module produces a
//! potential with several equilibrium states.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::potential::{LcPotential, Roof};
use crate::pressure::{entropy, equilibrium, integrate, pressure, MarkovMeasure};
use crate::rng;
use crate::suspension::{delta_transform, flow_entropy, flow_pressure, reparam_distance, FiberPotential};

/// Tolerance on `P(-phi) = 0` for inputs and outputs.
pub const ZERO_PRESSURE_TOL: f64 = 1e-10;
/// Tolerance on flow entropy and flow pressure preservation.
pub const PRESERVATION_TOL: f64 = 1e-8;
/// Strict margin required of almost-equilibrium witnesses.
pub const WITNESS_MARGIN: f64 = 1e-12;
/// Minimal transition-matrix distance between distinct witnesses.
pub const WITNESS_SEPARATION: f64 = 1e-6;
/// Fibre samples per word for grid-based sup estimates.
pub const GRID_SAMPLES: usize = 1001;
const IN_L_MARGIN: f64 = 1e-12;
const MAX_HALVINGS: usize = 60;
const CANDIDATES_PER_WITNESS: usize = 20;

/// One verified identity: `achieved` must not exceed `tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub name: &'static str,
    pub achieved: f64,
    pub tolerance: f64,
}

impl Residual {
    pub fn new(name: &'static str, achieved: f64, tolerance: f64) -> Self {
        Residual {
            name,
            achieved,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.achieved <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Perturbed {
    Roof(Roof),
    Fiber(FiberPotential),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preserved {
    pub name: &'static str,
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationReport {
    pub output: Perturbed,
    pub preserved: Preserved,
    /// Sup distance between output and input (on the fibre grid for observables).
    pub distance: f64,
    pub residuals: Vec<Residual>,
    /// Auxiliary named scalars of the construction.
    pub details: Vec<(&'static str, f64)>,
}

impl PerturbationReport {
    pub fn certified(&self) -> bool {
        self.residuals.iter().all(Residual::passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LCertificate {
    pub member: bool,
    pub sup: f64,
    pub pressure: f64,
    pub min: f64,
}

/// Membership in `{phi : sup phi < P(phi), phi > 0}`.
pub fn in_l(p: &LcPotential) -> Result<LCertificate> {
    let pressure = pressure(p)?.value;
    let (sup, min) = (p.max(), p.min());
    Ok(LCertificate {
        member: sup < pressure - IN_L_MARGIN && min > 0.0,
        sup,
        pressure,
        min,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroPressureRoof {
    pub roof: Roof,
    pub residuals: Vec<Residual>,
}

/// `roof = P(p) - p` for `p` in L; then `P(-roof) = 0` and the suspension
/// flow under `roof` has entropy 1.
pub fn zero_pressure_roof(p: &LcPotential) -> Result<ZeroPressureRoof> {
    let cert = in_l(p)?;
    if !cert.member {
        return Err(Error::NotInL {
            sup: cert.sup,
            pressure: cert.pressure,
            min: cert.min,
        });
    }
    let roof = Roof::new(p.scale(-1.0)?.add_constant(cert.pressure)?)?;
    let p_neg = pressure(&roof.scale(-1.0)?)?.value;
    let h = flow_entropy(&roof)?.t_star;
    Ok(ZeroPressureRoof {
        residuals: vec![
            Residual::new("pressure_of_negative_roof", p_neg.abs(), ZERO_PRESSURE_TOL),
            Residual::new("flow_entropy_minus_one", (h - 1.0).abs(), PRESERVATION_TOL),
        ],
        roof,
    })
}

/// `phi = P(f) - f`, so that `P(-phi) = 0`.
pub fn zero_pressure_normalize(f: &LcPotential) -> Result<LcPotential> {
    let p = pressure(f)?.value;
    f.scale(-1.0)?.add_constant(p)
}

fn check_zero_pressure(phi: &LcPotential) -> Result<f64> {
    let p = pressure(&phi.scale(-1.0)?)?.value;
    if p.abs() > ZERO_PRESSURE_TOL {
        return Err(Error::NotZeroPressure(p));
    }
    Ok(p)
}

/// `roof' = roof + (phi - h roof) / h` with `h` the flow entropy of `roof`.
///
/// When `P(-phi) = 0` the new roof satisfies `P(-h roof') = 0`, so the flow
/// keeps entropy `h`, and `|roof' - roof| = |phi - h roof| / h`.
pub fn perturb_roof(roof: &Roof, phi: &LcPotential) -> Result<PerturbationReport> {
    if roof.sft() != phi.sft() {
        return Err(Error::MismatchedSft);
    }
    check_zero_pressure(phi)?;
    if phi.min() <= 0.0 {
        return Err(Error::NotPositive(phi.min()));
    }
    let h = flow_entropy(roof)?.t_star;
    let depth = roof.depth().max(phi.depth());
    let (tau, phi) = (roof.refine(depth)?, phi.refine(depth)?);
    let gap: Vec<f64> = phi
        .values()
        .iter()
        .zip(tau.values())
        .map(|(f, t)| f - h * t)
        .collect();
    let new_values = tau
        .values()
        .iter()
        .zip(&gap)
        .map(|(t, g)| t + g / h)
        .collect();
    let new_roof = Roof::new(tau.with_values(new_values)?)?;

    let after = flow_entropy(&new_roof)?.t_star;
    let gap_norm = gap.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let (distance, ratio) = reparam_distance(&tau, &new_roof)?;
    // rounding of one division, one addition, one subtraction and one product
    let rounding = 4.0 * f64::EPSILON * (gap_norm + h * new_roof.sup_norm());
    let simplified = new_roof
        .values()
        .iter()
        .zip(phi.values())
        .fold(0.0f64, |m, (t, f)| m.max((t - f / h).abs()));
    let pressure_after = pressure(&new_roof.scale(-h)?)?.value;

    Ok(PerturbationReport {
        preserved: Preserved {
            name: "flow_entropy",
            before: h,
            after,
        },
        distance,
        residuals: vec![
            Residual::new("flow_entropy_preserved", (after - h).abs(), PRESERVATION_TOL),
            Residual::new("distance_times_h_vs_gap", (distance * h - gap_norm).abs(), rounding),
            Residual::new("equals_phi_over_h", simplified, rounding / h),
            Residual::new("pressure_of_scaled_roof", pressure_after.abs(), ZERO_PRESSURE_TOL),
        ],
        details: vec![
            ("h", h),
            ("gap_sup_norm", gap_norm),
            ("ratio_distance", ratio),
        ],
        output: Perturbed::Roof(new_roof),
    })
}

/// Rescales the observable fibrewise so that its fibre integral becomes
/// `F = P_flow(g0) roof - phi`, where `g0 = g + C >= 1` on the fibre grid.
///
/// With `P(-phi) = 0` the flow pressure of `g0` is unchanged. The returned
/// observable is the rescaled one shifted back by `-C`.
pub fn perturb_fiber(
    g: &FiberPotential,
    roof: &Roof,
    phi: &LcPotential,
    epsilon: f64,
) -> Result<PerturbationReport> {
    if g.sft() != roof.sft() || roof.sft() != phi.sft() {
        return Err(Error::MismatchedSft);
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    check_zero_pressure(phi)?;

    let (fiber_min, _) = g.grid_extrema(roof, GRID_SAMPLES)?;
    let shift = (1.0 - fiber_min).max(0.0);
    let depth = g.depth().max(roof.depth()).max(phi.depth());
    let g = g.refine(depth)?;
    let tau = roof.refine(depth)?;
    let phi = phi.refine(depth)?;
    let g0 = g.add_constant(shift)?;
    let p0 = flow_pressure(&g0, &tau)?.t_star;

    let delta0 = delta_transform(&g0, &tau)?;
    if delta0.min() <= 0.0 {
        return Err(Error::DegenerateDelta(delta0.min()));
    }
    // F - Delta0 = (P0 roof - Delta0) - phi; exact zero when phi is built the same way
    let gap: Vec<f64> = tau
        .values()
        .iter()
        .zip(delta0.values())
        .zip(phi.values())
        .map(|((t, d), f)| (p0 * t - d) - f)
        .collect();
    let target: Vec<f64> = tau
        .values()
        .iter()
        .zip(phi.values())
        .map(|(t, f)| p0 * t - f)
        .collect();
    let factors = delta0.with_values(
        gap.iter()
            .zip(delta0.values())
            .map(|(g, d)| g / d)
            .collect(),
    )?;
    let output = FiberPotential::combine(&g, &g0.scale_by(&factors)?, 1.0, 1.0)?;
    let rescaled = output.add_constant(shift)?;

    let delta_new = delta_transform(&rescaled, &tau)?;
    let identity_defect = delta_new
        .values()
        .iter()
        .zip(&target)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let scale = target.iter().chain(delta0.values()).fold(0.0f64, |m, v| m.max(v.abs()))
        + shift * tau.sup_norm();
    let identity_tol = 64.0 * f64::EPSILON * scale.max(1.0);

    let after = flow_pressure(&rescaled, &tau)?.t_star;
    let distance = output.grid_distance(&g, &tau, GRID_SAMPLES)?;
    let gap_norm = gap.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (_, sup_g0) = g0.grid_extrema(&tau, GRID_SAMPLES)?;
    let inf_delta0 = delta0.min();
    let bound = gap_norm * sup_g0 / inf_delta0;
    let threshold = epsilon * inf_delta0 / sup_g0;

    let mut residuals = vec![
        Residual::new("fiber_integral_equals_target", identity_defect, identity_tol),
        Residual::new("flow_pressure_preserved", (after - p0).abs(), PRESERVATION_TOL),
        Residual::new(
            "sup_distance_within_bound",
            (distance - bound).max(0.0),
            1e-12 * (1.0 + bound),
        ),
    ];
    if gap_norm < threshold {
        residuals.push(Residual::new(
            "sup_distance_below_epsilon",
            distance,
            epsilon * (1.0 - 1e-12),
        ));
    }

    Ok(PerturbationReport {
        preserved: Preserved {
            name: "flow_pressure_of_shifted",
            before: p0,
            after,
        },
        distance,
        residuals,
        details: vec![
            ("shift", shift),
            ("delta_gap_sup_norm", gap_norm),
            ("epsilon_threshold", threshold),
            ("distance_bound", bound),
            ("inf_delta_shifted", inf_delta0),
            ("sup_shifted", sup_g0),
        ],
        output: Perturbed::Fiber(output),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub measure: MarkovMeasure,
    /// `h(mu) + int p d(mu) - (P(p) - epsilon)`.
    pub margin: f64,
}

/// `count` distinct ergodic Markov measures `mu` with
/// `P(p) - epsilon < h(mu) + int p d(mu)`.
///
/// The first witness is the equilibrium state of `p`; the others are
/// equilibrium states of `p + delta q` for random depth-2 `q` with values in
/// `[-1, 1]`, halving `delta` from `epsilon / 4` until the inequality holds.
pub fn almost_equilibria(p: &LcPotential, epsilon: f64, count: usize, seed: u64) -> Result<Vec<Witness>> {
    if epsilon.is_nan() || epsilon <= 0.0 || count == 0 {
        return Err(Error::InvalidArgument(
            "epsilon must be positive and count at least 1".into(),
        ));
    }
    let depth = p.depth().max(2);
    let base = p.refine(depth)?;
    let target = pressure(&base)?.value - epsilon;
    let margin_of = |mu: &MarkovMeasure| -> Result<f64> { Ok(entropy(mu) + integrate(&base, mu)? - target) };

    let first = equilibrium(&base)?;
    let mut out = vec![Witness {
        margin: margin_of(&first)?,
        measure: first,
    }];
    let sft = Arc::clone(p.sft());
    let edges = sft.words(2).len();
    let mut candidate = 0u64;
    while out.len() < count && (candidate as usize) < CANDIDATES_PER_WITNESS * count {
        candidate += 1;
        let mut rng = rng::stream(seed, candidate);
        let values = (0..edges).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let q = LcPotential::from_values(Arc::clone(&sft), 2, values)?;
        let mut delta = epsilon / 4.0;
        for _ in 0..MAX_HALVINGS {
            let mu = match equilibrium(&LcPotential::combine(&base, &q, 1.0, delta)?) {
                Ok(mu) => mu,
                // weights spanning hundreds of nats underflow; shrink and retry
                Err(Error::NoConvergence(_)) => {
                    delta /= 2.0;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let margin = margin_of(&mu)?;
            if margin >= WITNESS_MARGIN {
                let separated = out.iter().try_fold(true, |ok, w| {
                    Ok::<_, Error>(ok && w.measure.transition_distance(&mu)? >= WITNESS_SEPARATION)
                })?;
                if separated && mu.has_full_support() {
                    out.push(Witness { measure: mu, margin });
                }
                break;
            }
            delta /= 2.0;
        }
    }
    if out.len() < count {
        return Err(Error::CannotSeparate {
            achieved: out.len(),
            requested: count,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sft::Sft;

    const GOLDEN: f64 = 1.618_033_988_749_895;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn full(n: usize) -> Arc<Sft> {
        Arc::new(Sft::full(n).unwrap())
    }

    #[test]
    fn membership_examples() {
        let c = in_l(&LcPotential::constant(full(2), 0.7).unwrap()).unwrap();
        assert!(c.member);
        close(c.pressure, 0.7 + 2f64.ln(), 1e-14);
        assert!(!in_l(&LcPotential::constant(full(2), -1.0).unwrap()).unwrap().member);

        // P = log(e^10 + e^0.1) < 10 + log 2, sup = 10 < P
        let p = LcPotential::from_values(full(2), 1, vec![10.0, 0.1]).unwrap();
        let c = in_l(&p).unwrap();
        close(c.pressure, (10f64.exp() + 0.1f64.exp()).ln(), 1e-12);
        assert!(c.pressure > 10.0 && c.member);
        // sup above pressure
        // 12 cannot repeat, so P is about half of 10
        let p = LcPotential::from_values(full(2), 2, vec![0.1, 10.0, 0.1, 0.1]).unwrap();
        let c = in_l(&p).unwrap();
        assert!(c.pressure < 10.0 && !c.member);
    }

    #[test]
    fn zero_pressure_roof_examples() {
        let cases = [
            (full(2), 2f64.ln()),
            (full(3), 3f64.ln()),
            (Arc::new(Sft::golden_mean()), GOLDEN.ln()),
        ];
        for (sft, expected) in cases {
            let z = zero_pressure_roof(&LcPotential::constant(sft, 1.3).unwrap()).unwrap();
            for v in z.roof.values() {
                close(*v, expected, 1e-14);
            }
            assert!(z.residuals.iter().all(Residual::passed), "{:?}", z.residuals);
        }
        let err = zero_pressure_roof(&LcPotential::constant(full(2), -1.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NotInL { .. }));
    }

    #[test]
    fn normalize_examples() {
        let phi = zero_pressure_normalize(&LcPotential::zero(full(2))).unwrap();
        for v in phi.values() {
            close(*v, 2f64.ln(), 1e-15);
        }
        let tau = zero_pressure_roof(&LcPotential::constant(full(2), 1.0).unwrap()).unwrap().roof;
        let back = zero_pressure_normalize(&tau.scale(-1.0).unwrap()).unwrap();
        assert!(back.sup_dist(&tau).unwrap() < 1e-14);

        let f = LcPotential::from_values(full(2), 2, vec![0.3, -1.0, 0.25, 2.0]).unwrap();
        let once = zero_pressure_normalize(&f).unwrap();
        let twice = zero_pressure_normalize(&once.scale(-1.0).unwrap()).unwrap();
        assert!(twice.sup_dist(&once).unwrap() < 1e-13);
        close(pressure(&once.scale(-1.0).unwrap()).unwrap().value, 0.0, 1e-13);
    }

    #[test]
    fn perturb_roof_identity() {
        let s = full(2);
        let roof = Roof::new(LcPotential::from_values(s, 1, vec![1.0, 2.0]).unwrap()).unwrap();
        let h = flow_entropy(&roof).unwrap().t_star;
        let phi = roof.scale(h).unwrap();
        let report = perturb_roof(&roof, &phi).unwrap();
        assert_eq!(report.distance, 0.0);
        match &report.output {
            Perturbed::Roof(r) => assert_eq!(r, &roof),
            _ => unreachable!(),
        }
        assert!(report.certified(), "{:?}", report.residuals);
    }

    #[test]
    fn perturb_roof_unit_roof() {
        let s = full(2);
        let roof = Roof::constant(s.clone(), 1.0).unwrap();
        let phi = LcPotential::constant(s, 2f64.ln()).unwrap();
        let report = perturb_roof(&roof, &phi).unwrap();
        match &report.output {
            Perturbed::Roof(r) => r.values().iter().for_each(|v| close(*v, 1.0, 1e-10)),
            _ => unreachable!(),
        }
        assert!(report.certified());
    }

    #[test]
    fn perturb_roof_small_perturbation() {
        let s = full(2);
        let roof = Roof::constant(s.clone(), 1.0).unwrap();
        let delta = 0.01;
        let ln2 = 2f64.ln();
        let f = LcPotential::from_values(s, 2, vec![-ln2, -ln2 + delta, -ln2, -ln2]).unwrap();
        let phi = zero_pressure_normalize(&f).unwrap();
        let report = perturb_roof(&roof, &phi).unwrap();
        assert!(report.certified(), "{:?}", report.residuals);
        assert!(report.distance <= 2.0 * delta / ln2);
        close(report.preserved.after, ln2, 1e-8);
    }

    #[test]
    fn perturb_roof_rejections() {
        let s = full(2);
        let roof = Roof::constant(s.clone(), 1.0).unwrap();
        let not_zero = LcPotential::constant(s.clone(), 1.0).unwrap();
        assert!(matches!(perturb_roof(&roof, &not_zero), Err(Error::NotZeroPressure(_))));
        // P(-phi) = 0 but phi changes sign
        let f = LcPotential::from_values(s, 2, vec![0.0, 10.0, 0.0, 0.0]).unwrap();
        let phi = zero_pressure_normalize(&f).unwrap();
        assert!(phi.min() < 0.0);
        assert!(matches!(perturb_roof(&roof, &phi), Err(Error::NotPositive(_))));
    }

    #[test]
    fn perturb_fiber_constant_case() {
        let s = full(2);
        let g = FiberPotential::zero(s.clone());
        let roof = Roof::constant(s.clone(), 1.0).unwrap();
        let phi = LcPotential::constant(s, 2f64.ln()).unwrap();
        let report = perturb_fiber(&g, &roof, &phi, 0.1).unwrap();
        assert!(report.certified(), "{:?}", report.residuals);
        close(report.preserved.before, 2f64.ln() + 1.0, 1e-10);
        assert_eq!(report.details[0], ("shift", 1.0));
        assert!(report.distance < 1e-9);
    }

    #[test]
    fn perturb_fiber_identity_case() {
        let s = full(2);
        let g = FiberPotential::new(s.clone(), 1, vec![vec![0.5, -1.0], vec![-2.0, 0.0, 1.0]]).unwrap();
        let roof = Roof::new(LcPotential::from_values(s, 1, vec![1.5, 0.75]).unwrap()).unwrap();
        let (lo, _) = g.grid_extrema(&roof, GRID_SAMPLES).unwrap();
        let g0 = g.add_constant((1.0 - lo).max(0.0)).unwrap();
        let p0 = flow_pressure(&g0, &roof).unwrap().t_star;
        let d0 = delta_transform(&g0, &roof).unwrap();
        let phi = LcPotential::combine(&roof, &d0, p0, -1.0).unwrap();
        let report = perturb_fiber(&g, &roof, &phi, 0.01).unwrap();
        assert_eq!(report.distance, 0.0);
        match &report.output {
            Perturbed::Fiber(out) => assert_eq!(out, &g),
            _ => unreachable!(),
        }
        assert!(report.certified(), "{:?}", report.residuals);
    }

    #[test]
    fn almost_equilibria_examples() {
        let s = full(2);
        let zero = LcPotential::zero(s);
        let one = almost_equilibria(&zero, 0.5, 1, 0).unwrap();
        assert_eq!(one.len(), 1);
        close(one[0].margin, 0.5, 1e-12);

        let five = almost_equilibria(&zero, 0.01, 5, 0).unwrap();
        assert_eq!(five.len(), 5);
        for (i, w) in five.iter().enumerate() {
            assert!(entropy(&w.measure) > 2f64.ln() - 0.01);
            assert!(w.margin >= WITNESS_MARGIN);
            for other in &five[..i] {
                assert!(w.measure.transition_distance(&other.measure).unwrap() >= WITNESS_SEPARATION);
            }
        }
        let many = almost_equilibria(&zero, 1e3, 6, 1).unwrap();
        assert_eq!(many.len(), 6);
        assert!(almost_equilibria(&zero, 0.0, 1, 0).is_err());
    }
}
