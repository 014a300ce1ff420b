//! One-sided sub-shifts of finite type.
//!
//! Symbols are `0..n` internally and `1..=n` in every textual form.

use std::fmt;

use crate::error::{Error, Result};

/// A finite admissible block of symbols (0-based).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_symbols(f, &self.0, self.0.iter().any(|&s| s >= 9))
    }
}

fn write_symbols(f: &mut impl fmt::Write, symbols: &[usize], dotted: bool) -> fmt::Result {
    for (i, s) in symbols.iter().enumerate() {
        if dotted && i > 0 {
            f.write_char('.')?;
        }
        write!(f, "{}", s + 1)?;
    }
    Ok(())
}

/// Square 0/1 matrix as rows of 64-bit blocks.
#[derive(Clone, PartialEq, Eq)]
struct BitMatrix {
    n: usize,
    blocks: usize,
    rows: Vec<u64>,
}

impl BitMatrix {
    fn from_fn(n: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let blocks = n.div_ceil(64);
        let mut rows = vec![0u64; n * blocks];
        for i in 0..n {
            for j in 0..n {
                if f(i, j) {
                    rows[i * blocks + j / 64] |= 1 << (j % 64);
                }
            }
        }
        BitMatrix { n, blocks, rows }
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.blocks..(i + 1) * self.blocks]
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.row(i)[j / 64] >> (j % 64) & 1 == 1
    }

    fn mul(&self, rhs: &BitMatrix) -> BitMatrix {
        let mut out = vec![0u64; self.rows.len()];
        for i in 0..self.n {
            let dst = &mut out[i * self.blocks..(i + 1) * self.blocks];
            for j in 0..self.n {
                if self.get(i, j) {
                    for (d, s) in dst.iter_mut().zip(rhs.row(j)) {
                        *d |= s;
                    }
                }
            }
        }
        BitMatrix {
            n: self.n,
            blocks: self.blocks,
            rows: out,
        }
    }

    fn is_full(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j)))
    }
}

/// A primitive one-sided sub-shift of finite type on `n >= 2` symbols.
#[derive(Clone, PartialEq, Eq)]
pub struct Sft {
    n: usize,
    allowed: Vec<bool>,
    exponent: usize,
}

impl fmt::Debug for Sft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| if self.allows(i, j) { '1' } else { '0' })
                    .collect()
            })
            .collect();
        f.debug_struct("Sft")
            .field("n", &self.n)
            .field("rows", &rows)
            .field("exponent", &self.exponent)
            .finish()
    }
}

impl Sft {
    /// Validates a raw 0/1 transition matrix.
    ///
    /// Primitivity is certified by boolean powers up to the Wielandt bound
    /// `n^2 - 2n + 2`; the smallest exponent with an all-positive power is
    /// stored.
    pub fn validate(rows: &[Vec<u8>]) -> Result<Sft> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Malformed(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    n
                )));
            }
            if let Some(&v) = row.iter().find(|&&v| v > 1) {
                return Err(Error::Malformed(format!("entry {v} is not a bit")));
            }
        }
        if n < 2 {
            return Err(Error::RejectAlphabetTooSmall(n));
        }
        let allowed: Vec<bool> = rows.iter().flatten().map(|&v| v == 1).collect();
        for s in 0..n {
            if !(0..n).any(|j| allowed[s * n + j]) {
                return Err(Error::RejectDeadSymbol {
                    symbol: s + 1,
                    side: "row",
                });
            }
            if !(0..n).any(|i| allowed[i * n + s]) {
                return Err(Error::RejectDeadSymbol {
                    symbol: s + 1,
                    side: "column",
                });
            }
        }
        let exponent = primitivity_exponent(n, &allowed)?;
        Ok(Sft {
            n,
            allowed,
            exponent,
        })
    }

    /// Full shift on `n` symbols.
    pub fn full(n: usize) -> Result<Sft> {
        Sft::validate(&vec![vec![1; n]; n])
    }

    /// Golden mean shift: the word `22` is forbidden.
    pub fn golden_mean() -> Sft {
        Sft::validate(&[vec![1, 1], vec![1, 0]]).expect("golden mean shift is primitive")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn allows(&self, i: usize, j: usize) -> bool {
        self.allowed[i * self.n + j]
    }

    /// Smallest `m` with `A^m` entrywise positive.
    pub fn primitivity_exponent(&self) -> usize {
        self.exponent
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.allows(i, j) as u8).collect())
            .collect()
    }

    pub fn is_admissible(&self, symbols: &[usize]) -> bool {
        symbols.iter().all(|&s| s < self.n) && symbols.windows(2).all(|w| self.allows(w[0], w[1]))
    }

    /// All admissible words of length `k` in lexicographic order.
    pub fn words(&self, k: usize) -> Vec<Word> {
        assert!(k >= 1, "word length must be at least 1");
        let mut out = Vec::new();
        let mut stack = Vec::with_capacity(k);
        self.extend_words(k, &mut stack, &mut out);
        out
    }

    fn extend_words(&self, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Word>) {
        if prefix.len() == k {
            out.push(Word(prefix.clone()));
            return;
        }
        for s in 0..self.n {
            if prefix.last().is_none_or(|&last| self.allows(last, s)) {
                prefix.push(s);
                self.extend_words(k, prefix, out);
                prefix.pop();
            }
        }
    }

    /// Number of admissible words of length `k`, `None` on `u128` overflow.
    pub fn word_count(&self, k: usize) -> Option<u128> {
        assert!(k >= 1, "word length must be at least 1");
        let power = self.int_power(k - 1)?;
        power.iter().try_fold(0u128, |acc, &v| acc.checked_add(v))
    }

    /// Number of points with `sigma^p x = x`, i.e. the trace of `A^p`.
    pub fn periodic_point_count(&self, p: usize) -> Option<u128> {
        assert!(p >= 1, "period must be at least 1");
        let power = self.int_power(p)?;
        (0..self.n).try_fold(0u128, |acc, i| acc.checked_add(power[i * self.n + i]))
    }

    fn int_power(&self, p: usize) -> Option<Vec<u128>> {
        let n = self.n;
        let mut acc: Vec<u128> = (0..n * n).map(|k| (k / n == k % n) as u128).collect();
        for _ in 0..p {
            let mut next = vec![0u128; n * n];
            for i in 0..n {
                for k in 0..n {
                    let v = acc[i * n + k];
                    if v == 0 {
                        continue;
                    }
                    for j in 0..n {
                        if self.allows(k, j) {
                            next[i * n + j] = next[i * n + j].checked_add(v)?;
                        }
                    }
                }
            }
            acc = next;
        }
        Some(acc)
    }

    /// Renders a word in the 1-based textual form used by model files.
    pub fn format_word(&self, symbols: &[usize]) -> String {
        let mut s = String::new();
        write_symbols(&mut s, symbols, self.n > 9).expect("writing to a String");
        s
    }

    /// Parses a 1-based word: digits for alphabets up to 9 symbols,
    /// dot-separated integers otherwise (dots are accepted for any size).
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let bad = || Error::InvalidArgument(format!("cannot parse word '{text}'"));
        let symbols: Vec<usize> = if text.contains('.') || self.n > 9 {
            text.split('.')
                .map(|t| t.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<_>>()?
        } else {
            text.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                .collect::<Result<_>>()?
        };
        if symbols.is_empty() || symbols.iter().any(|&s| s == 0 || s > self.n) {
            return Err(bad());
        }
        let symbols: Vec<usize> = symbols.into_iter().map(|s| s - 1).collect();
        if !self.is_admissible(&symbols) {
            return Err(Error::NotAdmissible(text.to_string()));
        }
        Ok(Word(symbols))
    }
}

fn primitivity_exponent(n: usize, allowed: &[bool]) -> Result<usize> {
    let bound = n * n - 2 * n + 2;
    let base = BitMatrix::from_fn(n, |i, j| allowed[i * n + j]);
    let mut power = base.clone();
    for m in 1..=bound {
        if power.is_full() {
            return Ok(m);
        }
        let next = power.mul(&base);
        if next == power {
            // powers are stationary without being full
            break;
        }
        power = next;
    }
    Err(Error::RejectNotPrimitive { bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words_str(sft: &Sft, k: usize) -> Vec<String> {
        sft.words(k).iter().map(|w| sft.format_word(&w.0)).collect()
    }

    #[test]
    fn full_shift_exponent_one() {
        let s = Sft::validate(&[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(s.primitivity_exponent(), 1);
    }

    #[test]
    fn golden_mean_exponent_two() {
        assert_eq!(Sft::golden_mean().primitivity_exponent(), 2);
    }

    #[test]
    fn permutation_is_rejected() {
        let err = Sft::validate(&[vec![0, 1], vec![1, 0]]).unwrap_err();
        assert_eq!(err, Error::RejectNotPrimitive { bound: 2 });
    }

    #[test]
    fn reducible_matrix_is_rejected() {
        // upper triangular: symbol 2 never returns to 1
        let err = Sft::validate(&[vec![1, 1], vec![0, 1]]).unwrap_err();
        assert!(matches!(err, Error::RejectNotPrimitive { .. }));
    }

    #[test]
    fn wielandt_extremal_matrix() {
        // n = 3 Wielandt matrix reaches the bound n^2 - 2n + 2 = 5
        let s = Sft::validate(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0]]).unwrap();
        assert_eq!(s.primitivity_exponent(), 5);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            Sft::validate(&[vec![1]]).unwrap_err(),
            Error::RejectAlphabetTooSmall(1)
        );
        assert_eq!(
            Sft::validate(&[vec![1, 1], vec![0, 0]]).unwrap_err(),
            Error::RejectDeadSymbol {
                symbol: 2,
                side: "row"
            }
        );
        assert_eq!(
            Sft::validate(&[vec![1, 0], vec![1, 0]]).unwrap_err(),
            Error::RejectDeadSymbol {
                symbol: 2,
                side: "column"
            }
        );
        assert!(matches!(
            Sft::validate(&[vec![1, 2], vec![1, 1]]).unwrap_err(),
            Error::Malformed(_)
        ));
        assert!(matches!(
            Sft::validate(&[vec![1, 1], vec![1]]).unwrap_err(),
            Error::Malformed(_)
        ));
    }

    #[test]
    fn word_listings() {
        let full = Sft::full(2).unwrap();
        assert_eq!(words_str(&full, 2), ["11", "12", "21", "22"]);
        let gm = Sft::golden_mean();
        assert_eq!(words_str(&gm, 2), ["11", "12", "21"]);
        // a^2 = [[2,1],[1,1]]
        assert_eq!(words_str(&gm, 3), ["111", "112", "121", "211", "212"]);
        assert_eq!(gm.word_count(3), Some(5));
        assert_eq!(gm.word_count(1), Some(2));
    }

    #[test]
    fn periodic_points() {
        let full = Sft::full(2).unwrap();
        assert_eq!(full.periodic_point_count(3), Some(8));
        let gm = Sft::golden_mean();
        assert_eq!(gm.periodic_point_count(3), Some(4));
        assert_eq!(gm.periodic_point_count(1), Some(1));
        // Lucas number L_10
        assert_eq!(gm.periodic_point_count(10), Some(123));
        assert_eq!(full.periodic_point_count(200), None);
    }

    #[test]
    fn word_text_forms() {
        let gm = Sft::golden_mean();
        assert_eq!(gm.parse_word("121").unwrap(), Word(vec![0, 1, 0]));
        assert_eq!(gm.parse_word("1.2.1").unwrap(), Word(vec![0, 1, 0]));
        assert!(matches!(gm.parse_word("122"), Err(Error::NotAdmissible(_))));
        assert!(gm.parse_word("13").is_err());
        assert!(gm.parse_word("").is_err());

        let big = Sft::full(11).unwrap();
        let w = big.parse_word("10.11.1").unwrap();
        assert_eq!(w, Word(vec![9, 10, 0]));
        assert_eq!(big.format_word(&w.0), "10.11.1");
        assert_eq!(Word(vec![0, 1]).to_string(), "12");
    }

    fn dfs_count(sft: &Sft, k: usize) -> u128 {
        fn go(sft: &Sft, last: usize, left: usize) -> u128 {
            if left == 0 {
                return 1;
            }
            (0..sft.n())
                .filter(|&s| sft.allows(last, s))
                .map(|s| go(sft, s, left - 1))
                .sum()
        }
        (0..sft.n()).map(|s| go(sft, s, k - 1)).sum()
    }

    #[test]
    fn word_counts_match_independent_enumeration() {
        let sfts = [
            Sft::full(2).unwrap(),
            Sft::golden_mean(),
            Sft::validate(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0]]).unwrap(),
            Sft::validate(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap(),
        ];
        for sft in &sfts {
            for k in 1..=7 {
                let words = sft.words(k);
                assert_eq!(words.len() as u128, dfs_count(sft, k));
                assert_eq!(Some(words.len() as u128), sft.word_count(k));
                assert!(words.windows(2).all(|p| p[0] < p[1]));
                assert!(words.iter().all(|w| sft.is_admissible(&w.0)));
            }
            for p in sft.primitivity_exponent()..sft.primitivity_exponent() + 6 {
                assert!(sft.periodic_point_count(p).unwrap() >= 1);
            }
        }
    }
}
