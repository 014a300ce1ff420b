//! Topological pressure, entropy and equilibrium states of locally constant
//! potentials.
//!
//! A depth-`k` potential is recoded as an edge weighting of the
//! `(k-1)`-block presentation of the shift. Its pressure is the logarithm of
//! the Perron eigenvalue of `M[u][v] = exp(p(u v))` on admissible edges and
//! its unique equilibrium state is the Markov chain built from the Perron
//! eigenvectors.

use std::sync::Arc;

use log::debug;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::potential::LcPotential;
use crate::rng;
use crate::sft::{Sft, Word};

const POWER_TOL: f64 = 1e-14;
const RESIDUAL_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 1_000_000;
const PLAIN_STEPS: usize = 200;
const POLISH_STEPS: usize = 200;
const MAX_PERIODIC_POINTS: u128 = 10_000_000;

/// State space of a Markov measure: admissible words of a fixed length
/// (the chain's memory) over a base shift, linked when they overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    base: Arc<Sft>,
    graph: Arc<Sft>,
    states: Arc<Vec<Word>>,
}

impl StateSpace {
    /// States are the symbols themselves.
    pub fn one_step(base: Arc<Sft>) -> Self {
        let states = Arc::new(base.words(1));
        StateSpace {
            graph: Arc::clone(&base),
            base,
            states,
        }
    }

    /// States are the admissible words of length `memory`.
    pub fn with_memory(base: Arc<Sft>, memory: usize) -> Result<Self> {
        if memory <= 1 {
            return Ok(Self::one_step(base));
        }
        let states = base.words(memory);
        let rows: Vec<Vec<u8>> = states
            .iter()
            .map(|u| {
                states
                    .iter()
                    .map(|v| (u.0[1..] == v.0[..memory - 1]) as u8)
                    .collect()
            })
            .collect();
        // higher block presentations of primitive shifts are primitive
        let graph = Arc::new(Sft::validate(&rows)?);
        Ok(StateSpace {
            base,
            graph,
            states: Arc::new(states),
        })
    }

    /// The state space that carries equilibrium states of depth-`depth`
    /// potentials.
    pub fn for_depth(base: Arc<Sft>, depth: usize) -> Result<Self> {
        Self::with_memory(base, depth.saturating_sub(1).max(1))
    }

    pub fn base(&self) -> &Arc<Sft> {
        &self.base
    }

    /// Transition graph between states.
    pub fn graph(&self) -> &Arc<Sft> {
        &self.graph
    }

    pub fn states(&self) -> &[Word] {
        &self.states
    }

    pub fn memory(&self) -> usize {
        self.states[0].len()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// State labelled by the first `memory` symbols of `symbols`.
    pub fn index_of(&self, symbols: &[usize]) -> Option<usize> {
        let m = self.memory();
        if symbols.len() < m {
            return None;
        }
        self.states
            .binary_search_by(|w| w.0.as_slice().cmp(&symbols[..m]))
            .ok()
    }

    /// Symbols spelled by the edge `u -> v`.
    pub fn edge_word(&self, u: usize, v: usize) -> Vec<usize> {
        let mut w = self.states[u].0.clone();
        w.push(*self.states[v].0.last().expect("states are non-empty"));
        w
    }
}

/// A potential presented as a depth-2 edge weighting of a block recoding.
#[derive(Debug, Clone)]
pub struct Recoding {
    pub space: StateSpace,
    /// Depth-2 potential on `space.graph()`.
    pub potential: LcPotential,
}

/// Rewrites a depth-`k` potential as a depth-2 potential on the
/// `(k-1)`-block shift. Depths 1 and 2 keep the original alphabet.
pub fn recode_two_block(p: &LcPotential) -> Result<Recoding> {
    let space = StateSpace::for_depth(Arc::clone(p.sft()), p.depth())?;
    let potential = if space.memory() == 1 {
        p.refine(2)?
    } else {
        let graph = Arc::clone(space.graph());
        LcPotential::from_fn(graph, 2, |edge| {
            p.eval(&space.edge_word(edge.0[0], edge.0[1]))
                .expect("edge words have the potential's depth")
        })?
    };
    Ok(Recoding { space, potential })
}

#[derive(Debug, Clone)]
pub struct PressureResult {
    /// Pressure in nats.
    pub value: f64,
    /// Perron eigenvalue, `exp(value)`.
    pub lambda: f64,
    /// Left Perron vector, scaled so that `<left, right> = 1`.
    pub left: Vec<f64>,
    /// Right Perron vector, scaled to unit maximum.
    pub right: Vec<f64>,
    /// Word length of the recoded states.
    pub recoded_depth: usize,
    pub iterations: usize,
    /// `max |M r - lambda r| / lambda` at termination.
    pub residual: f64,
}

struct Weighted {
    n: usize,
    /// `(from, to, exp(value - shift))`
    edges: Vec<(usize, usize, f64)>,
    shift: f64,
}

impl Weighted {
    fn new(recoding: &Recoding) -> Self {
        let shift = recoding.potential.max();
        let edges = recoding
            .potential
            .iter()
            .map(|(w, v)| (w.0[0], w.0[1], (v - shift).exp()))
            .collect();
        Weighted {
            n: recoding.space.len(),
            edges,
            shift,
        }
    }

    fn apply(&self, x: &[f64], transpose: bool, out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for &(i, j, w) in &self.edges {
            if transpose {
                out[j] += w * x[i];
            } else {
                out[i] += w * x[j];
            }
        }
    }

    /// Normalized power iteration; returns `(lambda, vector, iterations, residual)`.
    ///
    /// After `PLAIN_STEPS` unshifted steps the iteration runs on `M + s I`
    /// with `s` the current eigenvalue estimate: same Perron vector, but
    /// separated from eigenvalues of modulus near `lambda` (nearly periodic
    /// weightings). Once converged it keeps stepping while the residual
    /// still halves.
    fn perron(&self, transpose: bool) -> Result<(f64, Vec<f64>, usize, f64)> {
        let mut x = vec![1.0; self.n];
        let mut y = vec![0.0; self.n];
        let mut previous = f64::NAN;
        let mut best: Option<(f64, Vec<f64>, f64)> = None;
        let mut polish = 0;
        for iteration in 1..=MAX_ITERATIONS {
            self.apply(&x, transpose, &mut y);
            let lambda = y.iter().sum::<f64>() / x.iter().sum::<f64>();
            let residual = x
                .iter()
                .zip(&y)
                .fold(0.0f64, |m, (xi, yi)| m.max((yi - lambda * xi).abs()));
            if let Some((l, v, r)) = &best {
                if residual > 0.5 * r || polish == POLISH_STEPS {
                    return Ok((*l, v.clone(), iteration, r / l));
                }
                polish += 1;
                best = Some((lambda, x.clone(), residual));
            } else if (lambda - previous).abs() < POWER_TOL * lambda
                && residual <= RESIDUAL_TOL * lambda
            {
                if residual == 0.0 {
                    return Ok((lambda, x, iteration, 0.0));
                }
                best = Some((lambda, x.clone(), residual));
            }
            previous = lambda;
            if iteration > PLAIN_STEPS {
                y.iter_mut().zip(&x).for_each(|(yi, xi)| *yi += lambda * xi);
            }
            let norm = y.iter().copied().fold(0.0, f64::max);
            x.iter_mut().zip(&y).for_each(|(xi, yi)| *xi = yi / norm);
        }
        Err(Error::NoConvergence(MAX_ITERATIONS))
    }
}

fn perron_data(recoding: &Recoding) -> Result<(Weighted, PressureResult)> {
    let weighted = Weighted::new(recoding);
    let (lambda, right, it_r, residual) = weighted.perron(false)?;
    let (_, mut left, it_l, _) = weighted.perron(true)?;
    let dot: f64 = left.iter().zip(&right).map(|(l, r)| l * r).sum();
    left.iter_mut().for_each(|l| *l /= dot);
    let value = weighted.shift + lambda.ln();
    debug!(
        "pressure {value} over {} states after {}+{} iterations",
        weighted.n, it_r, it_l
    );
    let result = PressureResult {
        value,
        lambda: value.exp(),
        left,
        right,
        recoded_depth: recoding.space.memory(),
        iterations: it_r + it_l,
        residual,
    };
    Ok((weighted, result))
}

pub fn pressure(p: &LcPotential) -> Result<PressureResult> {
    perron_data(&recode_two_block(p)?).map(|(_, r)| r)
}

/// `h(sigma) = P(0)`.
pub fn topological_entropy(sft: &Arc<Sft>) -> Result<f64> {
    Ok(pressure(&LcPotential::zero(Arc::clone(sft)))?.value)
}

/// A stationary Markov measure on a [`StateSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovMeasure {
    space: StateSpace,
    pi: Vec<f64>,
    /// Row-major transition matrix.
    trans: Vec<f64>,
}

const MEASURE_TOL: f64 = 1e-9;

impl MarkovMeasure {
    /// Checks stochasticity, stationarity and support against the state graph.
    pub fn new(space: StateSpace, pi: Vec<f64>, trans: Vec<Vec<f64>>) -> Result<Self> {
        let n = space.len();
        if pi.len() != n || trans.len() != n || trans.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "measure data does not match {n} states"
            )));
        }
        let trans: Vec<f64> = trans.into_iter().flatten().collect();
        let mu = MarkovMeasure { space, pi, trans };
        mu.check()?;
        Ok(mu)
    }

    /// Completes a transition matrix with its stationary vector.
    pub fn from_transitions(space: StateSpace, trans: Vec<Vec<f64>>) -> Result<Self> {
        let pi = stationary(&trans)?;
        Self::new(space, pi, trans)
    }

    fn check(&self) -> Result<()> {
        let n = self.space.len();
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.pi.iter().chain(&self.trans).any(|x| !x.is_finite() || *x < 0.0) {
            return bad("negative or non-finite probability".into());
        }
        if (self.pi.iter().sum::<f64>() - 1.0).abs() > MEASURE_TOL {
            return bad("stationary vector does not sum to 1".into());
        }
        for i in 0..n {
            let row = &self.trans[i * n..(i + 1) * n];
            if (row.iter().sum::<f64>() - 1.0).abs() > MEASURE_TOL {
                return bad(format!("row {} does not sum to 1", i + 1));
            }
            if let Some(j) = (0..n).find(|&j| row[j] > 0.0 && !self.space.graph().allows(i, j)) {
                return bad(format!("transition {} -> {} is forbidden", i + 1, j + 1));
            }
        }
        if self.stationarity_defect() > MEASURE_TOL {
            return bad("vector is not stationary".into());
        }
        Ok(())
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn transition(&self, i: usize, j: usize) -> f64 {
        self.trans[i * self.space.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.space.len();
        &self.trans[i * n..(i + 1) * n]
    }

    /// `max_j |(pi T)_j - pi_j|`.
    pub fn stationarity_defect(&self) -> f64 {
        let n = self.space.len();
        (0..n)
            .map(|j| {
                let flow: f64 = (0..n).map(|i| self.pi[i] * self.trans[i * n + j]).sum();
                (flow - self.pi[j]).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest row-sum defect.
    pub fn stochasticity_defect(&self) -> f64 {
        (0..self.space.len())
            .map(|i| (self.row(i).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise difference of transition matrices on equal spaces.
    pub fn transition_distance(&self, other: &Self) -> Result<f64> {
        if self.space != other.space {
            return Err(Error::MismatchedSft);
        }
        Ok(self
            .trans
            .iter()
            .zip(&other.trans)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Measure of the cylinder of an admissible word of any length.
    pub fn cylinder(&self, symbols: &[usize]) -> f64 {
        let m = self.space.memory();
        if !self.space.base().is_admissible(symbols) || symbols.is_empty() {
            return 0.0;
        }
        if symbols.len() < m {
            return self
                .space
                .states()
                .iter()
                .zip(&self.pi)
                .filter(|(w, _)| w.0.starts_with(symbols))
                .map(|(_, p)| p)
                .sum();
        }
        let mut state = self.space.index_of(symbols).expect("admissible state");
        let mut prob = self.pi[state];
        for s in 1..=symbols.len() - m {
            let next = self.space.index_of(&symbols[s..]).expect("admissible state");
            prob *= self.transition(state, next);
            state = next;
        }
        prob
    }

    /// Distribution of the first symbol.
    pub fn symbol_marginal(&self) -> Vec<f64> {
        (0..self.space.base().n()).map(|s| self.cylinder(&[s])).collect()
    }

    /// Whether every admissible transition has positive probability.
    pub fn has_full_support(&self) -> bool {
        let n = self.space.len();
        (0..n).all(|i| (0..n).all(|j| !self.space.graph().allows(i, j) || self.transition(i, j) > 0.0))
    }
}

/// Solves `pi T = pi`, `sum pi = 1` by LU decomposition.
fn stationary(trans: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = trans.len();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(j, i)] = trans[i][j] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::InvalidArgument("transition matrix is not irreducible".into()))?;
    let mut pi: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|v| *v /= total);
    Ok(pi)
}

/// The unique equilibrium state of `p`, as a Markov measure on the block
/// recoding that carries it.
pub fn equilibrium(p: &LcPotential) -> Result<MarkovMeasure> {
    let recoding = recode_two_block(p)?;
    let (weighted, result) = perron_data(&recoding)?;
    let n = weighted.n;
    let lambda_scaled = (result.value - weighted.shift).exp();
    let r = &result.right;
    let mut trans = vec![vec![0.0; n]; n];
    for &(i, j, w) in &weighted.edges {
        trans[i][j] = w * r[j] / (lambda_scaled * r[i]);
    }
    for row in trans.iter_mut() {
        let total: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x /= total);
    }
    let mut pi: Vec<f64> = result.left.iter().zip(r).map(|(l, r)| l * r).collect();
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= total);
    MarkovMeasure::new(recoding.space, pi, trans)
}

/// Entropy rate `-sum_i pi_i sum_j T_ij log T_ij` with `0 log 0 = 0`.
pub fn entropy(mu: &MarkovMeasure) -> f64 {
    let n = mu.space.len();
    -(0..n)
        .map(|i| {
            mu.pi[i]
                * mu.row(i)
                    .iter()
                    .filter(|&&t| t > 0.0)
                    .map(|&t| t * t.ln())
                    .sum::<f64>()
        })
        .sum::<f64>()
}

/// `int p d(mu)`, summing over cylinders of length `max(depth, memory)`.
pub fn integrate(p: &LcPotential, mu: &MarkovMeasure) -> Result<f64> {
    if p.sft() != mu.space.base() {
        return Err(Error::MismatchedSft);
    }
    let len = p.depth().max(mu.space.memory());
    let words = if len == p.depth() {
        p.words().to_vec()
    } else {
        p.sft().words(len)
    };
    Ok(words
        .iter()
        .map(|w| mu.cylinder(&w.0) * p.eval(&w.0).expect("word is long enough"))
        .sum())
}

/// A Markov measure with rows drawn from the flat distribution on the
/// simplex of admissible successors.
pub fn random_markov_measure(space: &StateSpace, rng: &mut impl Rng) -> Result<MarkovMeasure> {
    let n = space.len();
    let trans = (0..n)
        .map(|i| {
            let successors: Vec<usize> = (0..n).filter(|&j| space.graph().allows(i, j)).collect();
            let weights = rng::flat_simplex(rng, successors.len());
            let mut row = vec![0.0; n];
            for (j, w) in successors.into_iter().zip(weights) {
                row[j] = w;
            }
            row
        })
        .collect();
    MarkovMeasure::from_transitions(space.clone(), trans)
}

/// Periodic-orbit partition sums `(1/q) log sum_{sigma^q x = x} exp(S_q p(x))`
/// for `q = 1..=max_period`, by explicit enumeration of periodic points.
pub fn pressure_oracle_orbits(p: &LcPotential, max_period: usize) -> Result<Vec<(usize, f64)>> {
    let sft = p.sft();
    let mut total = 0u128;
    for q in 1..=max_period {
        total = total.saturating_add(sft.periodic_point_count(q).unwrap_or(u128::MAX));
        if total > MAX_PERIODIC_POINTS {
            return Err(Error::TooLarge(total));
        }
    }
    let mut out = Vec::with_capacity(max_period);
    for q in 1..=max_period {
        let mut sums = Vec::new();
        let mut word = Vec::with_capacity(q);
        periodic_sums(p, q, &mut word, &mut sums);
        let top = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = top + sums.iter().map(|s| (s - top).exp()).sum::<f64>().ln();
        out.push((q, lse / q as f64));
    }
    Ok(out)
}

fn periodic_sums(p: &LcPotential, q: usize, word: &mut Vec<usize>, sums: &mut Vec<f64>) {
    let sft = p.sft();
    if word.len() == q {
        if !sft.allows(word[q - 1], word[0]) {
            return;
        }
        let extended: Vec<usize> = (0..q + p.depth()).map(|i| word[i % q]).collect();
        let birkhoff = (0..q)
            .map(|i| p.eval(&extended[i..]).expect("periodic words are admissible"))
            .sum();
        sums.push(birkhoff);
        return;
    }
    for s in 0..sft.n() {
        if word.last().is_none_or(|&last| sft.allows(last, s)) {
            word.push(s);
            periodic_sums(p, q, word, sums);
            word.pop();
        }
    }
}

/// Best value of `h(mu) + int p d(mu)` over `trials` random Markov measures
/// on the recoding of `p`.
pub fn pressure_oracle_variational(p: &LcPotential, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let space = StateSpace::for_depth(Arc::clone(p.sft()), p.depth())?;
    let mut rng = rng::stream(seed, 0);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..trials {
        let mu = random_markov_measure(&space, &mut rng)?;
        best = best.max(entropy(&mu) + integrate(p, &mu)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: f64 = 1.618_033_988_749_895;

    fn full(n: usize) -> Arc<Sft> {
        Arc::new(Sft::full(n).unwrap())
    }

    fn gm() -> Arc<Sft> {
        Arc::new(Sft::golden_mean())
    }

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn recoding_small_depth_is_identity() {
        let p = LcPotential::from_values(full(2), 1, vec![0.1, 0.2]).unwrap();
        let r = recode_two_block(&p).unwrap();
        assert_eq!(r.space.graph().as_ref(), p.sft().as_ref());
        assert_eq!(r.potential, p.refine(2).unwrap());
    }

    #[test]
    fn recoding_golden_mean_depth_three() {
        let p = LcPotential::zero(gm()).refine(3).unwrap();
        let r = recode_two_block(&p).unwrap();
        let labels: Vec<String> = r.space.states().iter().map(|w| w.to_string()).collect();
        assert_eq!(labels, ["11", "12", "21"]);
        assert_eq!(r.space.graph().words(2).len(), 5);
    }

    #[test]
    fn recoding_full_shift_depth_three() {
        let p = LcPotential::zero(full(2)).refine(3).unwrap();
        let r = recode_two_block(&p).unwrap();
        assert_eq!(r.space.len(), 4);
        assert_eq!(r.potential.words().len(), 8);
    }

    #[test]
    fn pressure_examples() {
        for n in 2..=4 {
            close(pressure(&LcPotential::zero(full(n))).unwrap().value, (n as f64).ln(), 1e-14);
        }
        let c = LcPotential::constant(gm(), 2.5).unwrap();
        close(
            pressure(&c).unwrap().value,
            topological_entropy(&gm()).unwrap() + 2.5,
            1e-13,
        );
        let p = LcPotential::from_values(full(2), 1, vec![2f64.ln(), 0.0]).unwrap();
        let r = pressure(&p).unwrap();
        close(r.value, 3f64.ln(), 1e-14);
        close(r.lambda, 3.0, 1e-13);
        assert!(r.residual <= 1e-12);
        let dot: f64 = r.left.iter().zip(&r.right).map(|(a, b)| a * b).sum();
        close(dot, 1.0, 1e-14);
    }

    #[test]
    fn entropy_examples() {
        close(topological_entropy(&full(2)).unwrap(), 2f64.ln(), 1e-15);
        close(topological_entropy(&full(3)).unwrap(), 3f64.ln(), 1e-15);
        close(topological_entropy(&gm()).unwrap(), GOLDEN.ln(), 1e-14);
    }

    #[test]
    fn large_values_do_not_overflow() {
        let p = LcPotential::from_values(full(2), 1, vec![900.0, 899.0]).unwrap();
        let r = pressure(&p).unwrap();
        close(r.value, 900.0 + (1.0 + (-1f64).exp()).ln(), 1e-12);
    }

    #[test]
    fn equilibrium_examples() {
        let mu = equilibrium(&LcPotential::zero(full(2))).unwrap();
        for i in 0..2 {
            close(mu.pi()[i], 0.5, 1e-15);
            for j in 0..2 {
                close(mu.transition(i, j), 0.5, 1e-15);
            }
        }

        let parry = equilibrium(&LcPotential::zero(gm())).unwrap();
        close(parry.transition(0, 0), 1.0 / GOLDEN, 1e-14);
        close(parry.transition(0, 1), 1.0 / (GOLDEN * GOLDEN), 1e-14);
        close(parry.transition(1, 0), 1.0, 1e-15);
        assert_eq!(parry.transition(1, 1), 0.0);

        let q: f64 = 0.3;
        let p = LcPotential::from_values(full(2), 1, vec![q.ln(), (1.0 - q).ln()]).unwrap();
        let b = equilibrium(&p).unwrap();
        for i in 0..2 {
            close(b.transition(i, 0), q, 1e-14);
            close(b.transition(i, 1), 1.0 - q, 1e-14);
        }
        close(b.pi()[0], q, 1e-14);
    }

    #[test]
    fn entropy_of_measures() {
        let space = StateSpace::one_step(full(2));
        let bern = |q: f64| {
            MarkovMeasure::new(space.clone(), vec![q, 1.0 - q], vec![vec![q, 1.0 - q]; 2]).unwrap()
        };
        close(entropy(&bern(0.5)), 2f64.ln(), 1e-15);
        close(entropy(&bern(0.3)), -0.3 * 0.3f64.ln() - 0.7 * 0.7f64.ln(), 1e-15);

        // fixed point at symbol 1 of the full shift: all mass on 11...
        let cycle = MarkovMeasure::new(
            space.clone(),
            vec![1.0, 0.0],
            vec![vec![1.0, 0.0], vec![1.0, 0.0]],
        )
        .unwrap();
        assert_eq!(entropy(&cycle), 0.0);
    }

    #[test]
    fn integrate_examples() {
        let space = StateSpace::one_step(full(2));
        let q = 0.3;
        let mu = MarkovMeasure::new(space, vec![q, 1.0 - q], vec![vec![q, 1.0 - q]; 2]).unwrap();
        close(integrate(&LcPotential::constant(full(2), 4.0).unwrap(), &mu).unwrap(), 4.0, 1e-15);
        let p = LcPotential::from_values(full(2), 1, vec![2.0, -1.0]).unwrap();
        close(integrate(&p, &mu).unwrap(), 2.0 * q - (1.0 - q), 1e-15);

        let half = equilibrium(&LcPotential::zero(full(2))).unwrap();
        let ind = LcPotential::from_values(full(2), 2, vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        close(integrate(&ind, &half).unwrap(), 0.25, 1e-15);

        let other = LcPotential::zero(gm());
        assert_eq!(integrate(&other, &half).unwrap_err(), Error::MismatchedSft);
    }

    #[test]
    fn measure_validation() {
        let space = StateSpace::one_step(gm());
        assert!(MarkovMeasure::new(space.clone(), vec![0.5, 0.5], vec![vec![0.5, 0.5], vec![0.5, 0.5]]).is_err());
        assert!(MarkovMeasure::new(space.clone(), vec![0.9, 0.1], vec![vec![0.5, 0.5], vec![1.0, 0.0]]).is_err());
        let mu = MarkovMeasure::from_transitions(space, vec![vec![0.5, 0.5], vec![1.0, 0.0]]).unwrap();
        close(mu.pi()[0], 2.0 / 3.0, 1e-15);
    }

    #[test]
    fn orbit_oracle_examples() {
        let z = pressure_oracle_orbits(&LcPotential::zero(full(2)), 8).unwrap();
        for (q, v) in &z {
            close(*v, 2f64.ln(), 1e-14 * *q as f64);
        }
        let z = pressure_oracle_orbits(&LcPotential::zero(gm()), 10).unwrap();
        assert_eq!(z[9].0, 10);
        close(z[9].1, 123f64.ln() / 10.0, 1e-15);

        let c = pressure_oracle_orbits(&LcPotential::constant(gm(), 0.75).unwrap(), 10).unwrap();
        for (a, b) in c.iter().zip(&z) {
            close(a.1, b.1 + 0.75, 1e-14);
        }
        assert!(matches!(
            pressure_oracle_orbits(&LcPotential::zero(full(2)), 40),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn variational_oracle_examples() {
        let p = LcPotential::zero(full(2));
        let best = pressure_oracle_variational(&p, 2000, 3).unwrap();
        assert!(best <= 2f64.ln() + 1e-10);
        assert!(best > 2f64.ln() - 0.05);
        assert_eq!(
            pressure_oracle_variational(&p, 1, 9).unwrap(),
            pressure_oracle_variational(&p, 1, 9).unwrap()
        );
        assert!(pressure_oracle_variational(&p, 0, 9).is_err());
    }
}
