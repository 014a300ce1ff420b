//! Locally constant potentials: functions on the shift space that depend
//! only on the first `depth` coordinates.

use std::ops::Deref;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sft::{Sft, Word};

/// A potential stored as one value per admissible word of length `depth`,
/// in the lexicographic order of [`Sft::words`].
#[derive(Debug, Clone, PartialEq)]
pub struct LcPotential {
    sft: Arc<Sft>,
    depth: usize,
    words: Arc<Vec<Word>>,
    values: Vec<f64>,
}

impl LcPotential {
    pub fn from_values(sft: Arc<Sft>, depth: usize, values: Vec<f64>) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidArgument("depth must be at least 1".into()));
        }
        let words = Arc::new(sft.words(depth));
        if words.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values given for {} admissible words of length {}",
                values.len(),
                words.len(),
                depth
            )));
        }
        if let Some(&v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(v));
        }
        Ok(LcPotential {
            sft,
            depth,
            words,
            values,
        })
    }

    pub fn from_fn(sft: Arc<Sft>, depth: usize, f: impl Fn(&Word) -> f64) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidArgument("depth must be at least 1".into()));
        }
        let values = sft.words(depth).iter().map(f).collect();
        Self::from_values(sft, depth, values)
    }

    pub fn constant(sft: Arc<Sft>, c: f64) -> Result<Self> {
        let n = sft.n();
        Self::from_values(sft, 1, vec![c; n])
    }

    pub fn zero(sft: Arc<Sft>) -> Self {
        Self::constant(sft, 0.0).expect("zero is finite")
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

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, f64)> {
        self.words.iter().zip(self.values.iter().copied())
    }

    /// Position of the depth-length prefix of `symbols` in [`Self::words`].
    pub fn index_of(&self, symbols: &[usize]) -> Option<usize> {
        if symbols.len() < self.depth {
            return None;
        }
        let prefix = &symbols[..self.depth];
        self.words
            .binary_search_by(|w| w.0.as_slice().cmp(prefix))
            .ok()
    }

    /// Value on any word at least `depth` symbols long.
    pub fn eval(&self, symbols: &[usize]) -> Result<f64> {
        if symbols.len() < self.depth {
            return Err(Error::WordTooShort {
                len: symbols.len(),
                depth: self.depth,
            });
        }
        self.index_of(symbols)
            .map(|i| self.values[i])
            .ok_or_else(|| Error::NotAdmissible(Word(symbols.to_vec()).to_string()))
    }

    /// The same function represented on words of length `depth`.
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
        let values = words
            .iter()
            .map(|w| self.values[self.index_of(&w.0).expect("prefix of admissible word")])
            .collect();
        Ok(LcPotential {
            sft: Arc::clone(&self.sft),
            depth,
            words,
            values,
        })
    }

    /// `alpha * p + beta * q` at the common depth.
    pub fn combine(p: &Self, q: &Self, alpha: f64, beta: f64) -> Result<Self> {
        if p.sft != q.sft {
            return Err(Error::MismatchedSft);
        }
        let depth = p.depth.max(q.depth);
        let (p, q) = (p.refine(depth)?, q.refine(depth)?);
        let values = p
            .values
            .iter()
            .zip(&q.values)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        p.with_values(values)
    }

    pub fn add_constant(&self, c: f64) -> Result<Self> {
        self.with_values(self.values.iter().map(|v| v + c).collect())
    }

    pub fn scale(&self, alpha: f64) -> Result<Self> {
        self.with_values(self.values.iter().map(|v| alpha * v).collect())
    }

    pub(crate) fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        debug_assert_eq!(values.len(), self.values.len());
        if let Some(&v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(v));
        }
        Ok(LcPotential {
            sft: Arc::clone(&self.sft),
            depth: self.depth,
            words: Arc::clone(&self.words),
            values,
        })
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Uniform norm.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sup_dist(&self, other: &Self) -> Result<f64> {
        Ok(Self::combine(self, other, 1.0, -1.0)?.sup_norm())
    }

    /// Largest oscillation of the potential on a cylinder of length `j`.
    pub fn variation(&self, j: usize) -> f64 {
        if j >= self.depth {
            return 0.0;
        }
        let mut worst = 0.0f64;
        let mut start = 0;
        while start < self.words.len() {
            let prefix = &self.words[start].0[..j];
            let end = start
                + self.words[start..]
                    .iter()
                    .take_while(|w| &w.0[..j] == prefix)
                    .count();
            let group = &self.values[start..end];
            let hi = group.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = group.iter().copied().fold(f64::INFINITY, f64::min);
            worst = worst.max(hi - lo);
            start = end;
        }
        worst
    }
}

/// A strictly positive locally constant potential used as a roof function.
#[derive(Debug, Clone, PartialEq)]
pub struct Roof(LcPotential);

impl Roof {
    pub fn new(p: LcPotential) -> Result<Self> {
        let min = p.min();
        if min > 0.0 {
            Ok(Roof(p))
        } else {
            Err(Error::NotPositive(min))
        }
    }

    pub fn constant(sft: Arc<Sft>, c: f64) -> Result<Self> {
        Roof::new(LcPotential::constant(sft, c)?)
    }

    pub fn as_potential(&self) -> &LcPotential {
        &self.0
    }

    pub fn into_potential(self) -> LcPotential {
        self.0
    }

    pub fn refine(&self, depth: usize) -> Result<Self> {
        Ok(Roof(self.0.refine(depth)?))
    }
}

impl Deref for Roof {
    type Target = LcPotential;

    fn deref(&self) -> &LcPotential {
        &self.0
    }
}
