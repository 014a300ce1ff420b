//! Roots of `t -> P(delta - t * roof)`.
//!
//! The map is strictly decreasing with slope between `-max roof` and
//! `-min roof`, so the root is unique. It is located by bisection inside a
//! bracket derived from `h + min delta - t max roof <= P <= h + max delta -
//! t min roof`, with an optional safeguarded Newton polish that uses the
//! derivative `-int roof d(mu_t)` at the equilibrium state `mu_t`.

use std::sync::Arc;

use log::debug;

use crate::error::{Error, Result};
use crate::potential::{LcPotential, Roof};
use crate::pressure::{equilibrium, integrate, pressure, topological_entropy};

/// Residual bound `|P(delta - t* roof)|` a solution must meet.
pub const RESIDUAL_TOL: f64 = 1e-10;
const MAX_BISECTIONS: usize = 400;
const MAX_EXPANSIONS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct BowenProblem {
    delta: LcPotential,
    roof: Roof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootMethod {
    Bisection,
    /// Bisection to the residual bound, then Newton steps kept only while
    /// they stay in the bracket and shrink the residual.
    #[default]
    BisectionNewtonPolish,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BowenSolution {
    pub t_star: f64,
    pub bracket: (f64, f64),
    pub residual: f64,
    pub iterations: usize,
}

impl BowenProblem {
    pub fn new(delta: &LcPotential, roof: &Roof) -> Result<Self> {
        if delta.sft() != roof.sft() {
            return Err(Error::MismatchedSft);
        }
        let depth = delta.depth().max(roof.depth());
        Ok(BowenProblem {
            delta: delta.refine(depth)?,
            roof: roof.refine(depth)?,
        })
    }

    /// `P(-t roof) = 0`, whose root is the entropy of the suspension flow.
    pub fn entropy(roof: &Roof) -> Self {
        BowenProblem {
            delta: LcPotential::zero(Arc::clone(roof.sft()))
                .refine(roof.depth())
                .expect("refining upward"),
            roof: roof.clone(),
        }
    }

    pub fn delta(&self) -> &LcPotential {
        &self.delta
    }

    pub fn roof(&self) -> &Roof {
        &self.roof
    }

    fn shifted(&self, t: f64) -> Result<LcPotential> {
        LcPotential::combine(&self.delta, &self.roof, 1.0, -t)
    }

    pub fn pressure_at(&self, t: f64) -> Result<f64> {
        Ok(pressure(&self.shifted(t)?)?.value)
    }

    /// `d/dt P(delta - t roof) = -int roof d(mu_t)`.
    pub fn slope_at(&self, t: f64) -> Result<f64> {
        let mu = equilibrium(&self.shifted(t)?)?;
        Ok(-integrate(&self.roof, &mu)?)
    }

    pub fn solve(&self) -> Result<BowenSolution> {
        self.solve_with(RootMethod::default())
    }

    pub fn solve_with(&self, method: RootMethod) -> Result<BowenSolution> {
        let h = topological_entropy(self.delta.sft())?;
        let (min_roof, max_roof) = (self.roof.min(), self.roof.max());
        let a = (h + self.delta.min()) / max_roof;
        let b = (h + self.delta.max()) / min_roof;
        let slack = 0.5 + 1e-3 * (b - a).abs();
        let (mut lo, mut hi) = (a.min(b) - slack, a.max(b) + slack);
        let mut f_lo = self.pressure_at(lo)?;
        let mut f_hi = self.pressure_at(hi)?;
        let mut iterations = 2;

        let mut step = (hi - lo).max(1.0);
        let mut expansions = 0;
        while f_lo < 0.0 || f_hi > 0.0 {
            if expansions == MAX_EXPANSIONS || !f_lo.is_finite() || !f_hi.is_finite() {
                return Err(Error::BracketFailure { f_lo, f_hi });
            }
            if f_lo < 0.0 {
                lo -= step;
                f_lo = self.pressure_at(lo)?;
            }
            if f_hi > 0.0 {
                hi += step;
                f_hi = self.pressure_at(hi)?;
            }
            step *= 2.0;
            expansions += 1;
            iterations += 1;
        }

        let (mut t, mut f) = if f_lo.abs() <= f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
        let mut bisections = 0;
        while f.abs() > RESIDUAL_TOL {
            if bisections == MAX_BISECTIONS {
                return Err(Error::BracketFailure { f_lo, f_hi });
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                // bracket exhausted at machine resolution
                return Err(Error::BracketFailure { f_lo, f_hi });
            }
            let f_mid = self.pressure_at(mid)?;
            if f_mid > 0.0 {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
                f_hi = f_mid;
            }
            t = mid;
            f = f_mid;
            bisections += 1;
            iterations += 1;
        }

        if method == RootMethod::BisectionNewtonPolish {
            for _ in 0..4 {
                if f == 0.0 {
                    break;
                }
                let next = t - f / self.slope_at(t)?;
                iterations += 1;
                if !(lo..=hi).contains(&next) {
                    break;
                }
                let f_next = self.pressure_at(next)?;
                if f_next.abs() >= f.abs() {
                    break;
                }
                t = next;
                f = f_next;
            }
        }

        debug!("bowen root {t} (residual {f:e}) after {iterations} evaluations");
        Ok(BowenSolution {
            t_star: t,
            bracket: (lo, hi),
            residual: f.abs(),
            iterations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sft::Sft;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn full(n: usize) -> Arc<Sft> {
        Arc::new(Sft::full(n).unwrap())
    }

    #[test]
    fn constant_roof() {
        for c in [0.5, 1.0, 3.0] {
            let roof = Roof::constant(full(2), c).unwrap();
            let s = BowenProblem::entropy(&roof).solve().unwrap();
            close(s.t_star, 2f64.ln() / c, 1e-10 / c);
            assert!(s.residual <= RESIDUAL_TOL);
            assert!(s.bracket.0 <= s.t_star && s.t_star <= s.bracket.1);
        }
    }

    #[test]
    fn two_level_roof_is_golden_ratio_log() {
        // e^{-t} + e^{-2t} = 1
        let roof = Roof::new(LcPotential::from_values(full(2), 1, vec![1.0, 2.0]).unwrap()).unwrap();
        let expected = ((1.0 + 5f64.sqrt()) / 2.0).ln();
        let s = BowenProblem::entropy(&roof).solve().unwrap();
        close(s.t_star, expected, 1e-10);
        let polished = BowenProblem::entropy(&roof)
            .solve_with(RootMethod::BisectionNewtonPolish)
            .unwrap();
        assert!(polished.residual <= s.residual);
        close(polished.t_star, expected, 1e-13);
    }

    #[test]
    fn unit_roof_on_golden_mean() {
        let gm = Arc::new(Sft::golden_mean());
        let roof = Roof::constant(gm.clone(), 1.0).unwrap();
        let s = BowenProblem::entropy(&roof).solve().unwrap();
        close(s.t_star, topological_entropy(&gm).unwrap(), 1e-10);
    }

    #[test]
    fn pressure_at_examples() {
        let s = full(2);
        let delta = LcPotential::from_values(s.clone(), 1, vec![0.3, -0.2]).unwrap();
        let roof = Roof::constant(s.clone(), 2.0).unwrap();
        let problem = BowenProblem::new(&delta, &roof).unwrap();
        close(problem.pressure_at(0.0).unwrap(), pressure(&delta).unwrap().value, 1e-15);

        let entropy = BowenProblem::entropy(&roof);
        close(entropy.pressure_at(0.0).unwrap(), 2f64.ln(), 1e-15);
        close(entropy.pressure_at(0.7).unwrap(), 2f64.ln() - 1.4, 1e-14);
    }

    #[test]
    fn far_away_roots_are_bracketed() {
        let s = full(3);
        let delta = LcPotential::constant(s.clone(), -50.0).unwrap();
        let roof = Roof::constant(s, 0.01).unwrap();
        let sol = BowenProblem::new(&delta, &roof).unwrap().solve().unwrap();
        close(sol.t_star, (3f64.ln() - 50.0) / 0.01, 1e-7);
    }

    #[test]
    fn mismatched_shift() {
        let delta = LcPotential::zero(full(2));
        let roof = Roof::constant(full(3), 1.0).unwrap();
        assert_eq!(BowenProblem::new(&delta, &roof).unwrap_err(), Error::MismatchedSft);
    }
}
