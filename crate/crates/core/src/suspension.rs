//! Suspension semi-flows over a shift with a locally constant roof.
//!
//! Flow-invariant measures are represented through their base measure:
//! `nu = (mu x Leb) / int roof d(mu)` restricted to `{(x, t): t <= roof(x)}`.
//! Observables on the suspension space are polynomials in the fibre time `t`
//! on each base cylinder, so the fibre integral `Delta_g` is exact.

use std::sync::Arc;

use crate::bowen::{BowenProblem, BowenSolution};
use crate::error::{Error, Result};
use crate::potential::{LcPotential, Roof};
use crate::pressure::{entropy, equilibrium, integrate, MarkovMeasure};
use crate::sft::{Sft, Word};

/// Largest supported polynomial degree in the fibre variable.
pub const MAX_DEGREE: usize = 8;

/// `g(x, t) = sum_i c_w[i] t^i` where `w` is the depth-length prefix of `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberPotential {
    sft: Arc<Sft>,
    depth: usize,
    words: Arc<Vec<Word>>,
    coeffs: Vec<Vec<f64>>,
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

/// `int_0^x sum_i c[i] t^i dt`.
fn antiderivative_at(c: &[f64], x: f64) -> f64 {
    c.iter()
        .enumerate()
        .rev()
        .fold(0.0, |acc, (i, &a)| acc * x + a / (i + 1) as f64)
        * x
}

impl FiberPotential {
    pub fn new(sft: Arc<Sft>, depth: usize, coeffs: Vec<Vec<f64>>) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidArgument("depth must be at least 1".into()));
        }
        let words = Arc::new(sft.words(depth));
        if coeffs.len() != words.len() {
            return Err(Error::InvalidArgument(format!(
                "{} polynomials given for {} admissible words of length {}",
                coeffs.len(),
                words.len(),
                depth
            )));
        }
        for c in &coeffs {
            if c.is_empty() {
                return Err(Error::InvalidArgument("empty coefficient list".into()));
            }
            if c.len() > MAX_DEGREE + 1 {
                return Err(Error::DegreeTooHigh(c.len() - 1, MAX_DEGREE));
            }
            if let Some(&v) = c.iter().find(|v| !v.is_finite()) {
                return Err(Error::NonFinite(v));
            }
        }
        Ok(FiberPotential {
            sft,
            depth,
            words,
            coeffs,
        })
    }

    pub fn constant(sft: Arc<Sft>, c: f64) -> Result<Self> {
        let n = sft.n();
        Self::new(sft, 1, vec![vec![c]; n])
    }

    pub fn zero(sft: Arc<Sft>) -> Self {
        Self::constant(sft, 0.0).expect("zero is finite")
    }

    /// An observable that does not depend on the fibre time.
    pub fn from_potential(p: &LcPotential) -> Self {
        FiberPotential {
            sft: Arc::clone(p.sft()),
            depth: p.depth(),
            words: Arc::new(p.words().to_vec()),
            coeffs: p.values().iter().map(|&v| vec![v]).collect(),
        }
    }

    pub fn sft(&self) -> &Arc<Sft> {
        &self.sft
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    fn index_of(&self, symbols: &[usize]) -> Result<usize> {
        if symbols.len() < self.depth {
            return Err(Error::WordTooShort {
                len: symbols.len(),
                depth: self.depth,
            });
        }
        self.words
            .binary_search_by(|w| w.0.as_slice().cmp(&symbols[..self.depth]))
            .map_err(|_| Error::NotAdmissible(Word(symbols.to_vec()).to_string()))
    }

    pub fn eval(&self, symbols: &[usize], t: f64) -> Result<f64> {
        Ok(horner(&self.coeffs[self.index_of(symbols)?], t))
    }

    pub fn refine(&self, depth: usize) -> Result<Self> {
        if depth < self.depth {
            return Err(Error::InvalidArgument(format!(
                "cannot refine depth {} down to {}",
                self.depth, depth
            )));
        }
        if depth == self.depth {
            return Ok(self.clone());
        }
        let words = Arc::new(self.sft.words(depth));
        let coeffs = words
            .iter()
            .map(|w| self.coeffs[self.index_of(&w.0).expect("prefix")].clone())
            .collect();
        Ok(FiberPotential {
            sft: Arc::clone(&self.sft),
            depth,
            words,
            coeffs,
        })
    }

    /// `alpha * g + beta * h` at the common depth.
    pub fn combine(g: &Self, h: &Self, alpha: f64, beta: f64) -> Result<Self> {
        if g.sft != h.sft {
            return Err(Error::MismatchedSft);
        }
        let depth = g.depth.max(h.depth);
        let (g, h) = (g.refine(depth)?, h.refine(depth)?);
        let coeffs = g
            .coeffs
            .iter()
            .zip(&h.coeffs)
            .map(|(a, b)| {
                (0..a.len().max(b.len()))
                    .map(|i| {
                        alpha * a.get(i).copied().unwrap_or(0.0)
                            + beta * b.get(i).copied().unwrap_or(0.0)
                    })
                    .collect()
            })
            .collect();
        FiberPotential::new(g.sft, depth, coeffs)
    }

    pub fn add_constant(&self, c: f64) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|p| {
                let mut p = p.clone();
                p[0] += c;
                p
            })
            .collect();
        FiberPotential::new(Arc::clone(&self.sft), self.depth, coeffs)
    }

    /// Multiplies the polynomial on each word by the matching value of `factors`.
    pub fn scale_by(&self, factors: &LcPotential) -> Result<Self> {
        if factors.sft() != &self.sft {
            return Err(Error::MismatchedSft);
        }
        let depth = self.depth.max(factors.depth());
        let (g, f) = (self.refine(depth)?, factors.refine(depth)?);
        let coeffs = g
            .coeffs
            .iter()
            .zip(f.values())
            .map(|(p, s)| p.iter().map(|c| c * s).collect())
            .collect();
        FiberPotential::new(g.sft, depth, coeffs)
    }

    /// Minimum and maximum over an even grid of `samples >= 2` fibre times
    /// in `[0, roof(w)]` on every word.
    pub fn grid_extrema(&self, roof: &Roof, samples: usize) -> Result<(f64, f64)> {
        let samples = samples.max(2);
        let (g, r) = common(self, roof)?;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (c, &top) in g.coeffs.iter().zip(r.values()) {
            for k in 0..samples {
                let v = horner(c, top * k as f64 / (samples - 1) as f64);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        Ok((lo, hi))
    }

    /// `sup |g - h|` over the same grid as [`Self::grid_extrema`].
    pub fn grid_distance(&self, other: &Self, roof: &Roof, samples: usize) -> Result<f64> {
        let diff = FiberPotential::combine(self, other, 1.0, -1.0)?;
        let (lo, hi) = diff.grid_extrema(roof, samples)?;
        Ok(lo.abs().max(hi.abs()))
    }
}

fn common(g: &FiberPotential, roof: &Roof) -> Result<(FiberPotential, Roof)> {
    if g.sft() != roof.sft() {
        return Err(Error::MismatchedSft);
    }
    let depth = g.depth().max(roof.depth());
    Ok((g.refine(depth)?, roof.refine(depth)?))
}

/// `Delta_g(x) = int_0^{roof(x)} g(x, t) dt`, integrated exactly per word.
pub fn delta_transform(g: &FiberPotential, roof: &Roof) -> Result<LcPotential> {
    let (g, r) = common(g, roof)?;
    let values = g
        .coeffs
        .iter()
        .zip(r.values())
        .map(|(c, &top)| antiderivative_at(c, top))
        .collect();
    r.as_potential().with_values(values)
}

/// A flow-invariant probability measure, stored through its base measure.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMeasure {
    pub base: MarkovMeasure,
    pub roof: Roof,
    /// `int roof d(base)`.
    pub normalizer: f64,
}

/// Normalized product of a base measure with Lebesgue measure on fibres.
pub fn lift(mu: &MarkovMeasure, roof: &Roof) -> Result<FlowMeasure> {
    let normalizer = integrate(roof, mu)?;
    Ok(FlowMeasure {
        base: mu.clone(),
        roof: roof.clone(),
        normalizer,
    })
}

/// Flow entropy `h(mu) / int roof d(mu)`.
pub fn abramov_entropy(nu: &FlowMeasure) -> f64 {
    entropy(&nu.base) / nu.normalizer
}

/// `int g d(nu) = int Delta_g d(mu) / int roof d(mu)`.
pub fn kac_integral(g: &FiberPotential, nu: &FlowMeasure) -> Result<f64> {
    Ok(integrate(&delta_transform(g, &nu.roof)?, &nu.base)? / nu.normalizer)
}

/// Flow pressure: the root of `P(Delta_g - t roof) = 0`.
pub fn flow_pressure(g: &FiberPotential, roof: &Roof) -> Result<BowenSolution> {
    BowenProblem::new(&delta_transform(g, roof)?, roof)?.solve()
}

/// Topological entropy of the flow: the root of `P(-t roof) = 0`.
pub fn flow_entropy(roof: &Roof) -> Result<BowenSolution> {
    flow_pressure(&FiberPotential::zero(Arc::clone(roof.sft())), roof)
}

/// The measure of maximal entropy: the lift of the equilibrium state of
/// `-h roof`, `h` the flow entropy.
pub fn flow_mme(roof: &Roof) -> Result<FlowMeasure> {
    let h = flow_entropy(roof)?.t_star;
    let mu = equilibrium(&roof.scale(-h)?)?;
    lift(&mu, roof)
}

/// Size of a time change: `(sup |roof1 - roof2|, sup |roof2 / roof1 - 1|)`.
pub fn reparam_distance(roof1: &Roof, roof2: &Roof) -> Result<(f64, f64)> {
    if roof1.sft() != roof2.sft() {
        return Err(Error::MismatchedSft);
    }
    let depth = roof1.depth().max(roof2.depth());
    let (a, b) = (roof1.refine(depth)?, roof2.refine(depth)?);
    let sup = a.sup_dist(&b)?;
    let ratio = a
        .values()
        .iter()
        .zip(b.values())
        .fold(0.0f64, |m, (x, y)| m.max((y / x - 1.0).abs()));
    Ok((sup, ratio))
}
