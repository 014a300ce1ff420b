//! Line-oriented model files.
//!
//! ```text
//! # golden mean shift with a two-level roof
//! sft n 2
//! row 1 1
//! row 1 0
//! potential phi depth 1
//! 1 0.5
//! 2 -0.25
//! roof tau depth 1
//! 1 1
//! 2 2
//! fiber g depth 1
//! 1 0 1
//! 2 3
//! ```
//!
//! `sft` comes first and is followed by exactly `n` rows. Each block lists
//! every admissible word of its depth once; words are 1-based digit strings
//! (dot-separated when the alphabet has more than nine symbols). Fibre lines
//! give polynomial coefficients in increasing degree. `#` starts a comment.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::potential::{LcPotential, Roof};
use crate::sft::Sft;
use crate::suspension::{FiberPotential, MAX_DEGREE};

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub sft: Arc<Sft>,
    pub potentials: Vec<(String, LcPotential)>,
    pub roofs: Vec<(String, Roof)>,
    pub fibers: Vec<(String, FiberPotential)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Potential,
    Roof,
    Fiber,
}

impl Kind {
    fn keyword(self) -> &'static str {
        match self {
            Kind::Potential => "potential",
            Kind::Roof => "roof",
            Kind::Fiber => "fiber",
        }
    }
}

struct Block {
    kind: Kind,
    name: String,
    depth: usize,
    line: usize,
    /// `(word index, coefficients)`; a single coefficient for potentials and roofs.
    entries: Vec<(usize, Vec<f64>)>,
    seen: HashSet<usize>,
}

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

fn parse_real(line: usize, token: &str) -> Result<f64> {
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(parse_err(line, format!("'{token}' is not a finite real"))),
    }
}

impl ModelFile {
    /// A model holding only a shift space.
    pub fn new(sft: Arc<Sft>) -> Self {
        ModelFile {
            sft,
            potentials: Vec::new(),
            roofs: Vec::new(),
            fibers: Vec::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (header_line, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty model: expected 'sft n <N>'"))?;
        let tokens: Vec<&str> = header.split_whitespace().collect();
        let n = match tokens.as_slice() {
            ["sft", "n", n] => n
                .parse::<usize>()
                .map_err(|_| parse_err(header_line, format!("'{n}' is not a symbol count")))?,
            _ => return Err(parse_err(header_line, "expected 'sft n <N>'")),
        };
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let (line, text) = lines
                .next()
                .ok_or_else(|| parse_err(header_line, format!("expected {n} 'row' lines")))?;
            let mut tokens = text.split_whitespace();
            if tokens.next() != Some("row") {
                return Err(parse_err(line, format!("expected 'row', found '{text}'")));
            }
            let row = tokens
                .map(|t| match t {
                    "0" => Ok(0u8),
                    "1" => Ok(1u8),
                    _ => Err(parse_err(line, format!("'{t}' is not a bit"))),
                })
                .collect::<Result<Vec<u8>>>()?;
            if row.len() != n {
                return Err(parse_err(line, format!("row has {} entries, expected {n}", row.len())));
            }
            rows.push(row);
        }
        let sft = Arc::new(Sft::validate(&rows).map_err(|e| Error::Validation {
            line: header_line,
            source: Box::new(e),
        })?);

        let mut model = ModelFile::new(Arc::clone(&sft));
        let mut current: Option<Block> = None;
        for (line, text) in lines {
            let tokens: Vec<&str> = text.split_whitespace().collect();
            let kind = match tokens[0] {
                "potential" => Some(Kind::Potential),
                "roof" => Some(Kind::Roof),
                "fiber" => Some(Kind::Fiber),
                _ => None,
            };
            if let Some(kind) = kind {
                if let Some(block) = current.take() {
                    model.finish(block)?;
                }
                let (name, depth) = match tokens.as_slice() {
                    [_, name, "depth", k] => (
                        name.to_string(),
                        k.parse::<usize>()
                            .ok()
                            .filter(|&k| k >= 1)
                            .ok_or_else(|| parse_err(line, format!("'{k}' is not a depth")))?,
                    ),
                    _ => {
                        return Err(parse_err(
                            line,
                            format!("expected '{} <name> depth <k>'", kind.keyword()),
                        ))
                    }
                };
                if model.has_name(kind, &name) {
                    return Err(parse_err(line, format!("duplicate {} '{name}'", kind.keyword())));
                }
                current = Some(Block {
                    kind,
                    name,
                    depth,
                    line,
                    entries: Vec::new(),
                    seen: HashSet::new(),
                });
                continue;
            }
            if tokens[0] == "sft" || tokens[0] == "row" {
                return Err(parse_err(line, format!("unexpected '{}'", tokens[0])));
            }
            let block = current
                .as_mut()
                .ok_or_else(|| parse_err(line, format!("unknown key '{}'", tokens[0])))?;
            let word = sft
                .parse_word(tokens[0])
                .map_err(|e| parse_err(line, e.to_string()))?;
            if word.len() != block.depth {
                return Err(parse_err(
                    line,
                    format!("word '{}' does not have length {}", tokens[0], block.depth),
                ));
            }
            let index = sft
                .words(block.depth)
                .binary_search(&word)
                .expect("admissible word is listed");
            if !block.seen.insert(index) {
                return Err(parse_err(line, format!("duplicate word '{}'", tokens[0])));
            }
            let values = tokens[1..]
                .iter()
                .map(|t| parse_real(line, t))
                .collect::<Result<Vec<f64>>>()?;
            match block.kind {
                Kind::Fiber if values.is_empty() || values.len() > MAX_DEGREE + 1 => {
                    return Err(parse_err(
                        line,
                        format!("expected 1 to {} coefficients", MAX_DEGREE + 1),
                    ))
                }
                Kind::Potential | Kind::Roof if values.len() != 1 => {
                    return Err(parse_err(line, "expected '<word> <value>'"))
                }
                _ => {}
            }
            block.entries.push((index, values));
        }
        if let Some(block) = current.take() {
            model.finish(block)?;
        }
        Ok(model)
    }

    fn has_name(&self, kind: Kind, name: &str) -> bool {
        match kind {
            Kind::Potential => self.potentials.iter().any(|(n, _)| n == name),
            Kind::Roof => self.roofs.iter().any(|(n, _)| n == name),
            Kind::Fiber => self.fibers.iter().any(|(n, _)| n == name),
        }
    }

    fn finish(&mut self, mut block: Block) -> Result<()> {
        let expected = self.sft.words(block.depth).len();
        if block.entries.len() != expected {
            return Err(parse_err(
                block.line,
                format!(
                    "{} '{}' lists {} of {} admissible words",
                    block.kind.keyword(),
                    block.name,
                    block.entries.len(),
                    expected
                ),
            ));
        }
        block.entries.sort_by_key(|(i, _)| *i);
        let validation = |e: Error| Error::Validation {
            line: block.line,
            source: Box::new(e),
        };
        let sft = Arc::clone(&self.sft);
        match block.kind {
            Kind::Potential | Kind::Roof => {
                let values = block.entries.into_iter().map(|(_, v)| v[0]).collect();
                let p = LcPotential::from_values(sft, block.depth, values).map_err(validation)?;
                if block.kind == Kind::Roof {
                    self.roofs.push((block.name, Roof::new(p).map_err(validation)?));
                } else {
                    self.potentials.push((block.name, p));
                }
            }
            Kind::Fiber => {
                let coeffs = block.entries.into_iter().map(|(_, v)| v).collect();
                let g = FiberPotential::new(sft, block.depth, coeffs).map_err(validation)?;
                self.fibers.push((block.name, g));
            }
        }
        Ok(())
    }

    /// Renders the model; `parse(print(m)) == m`.
    pub fn print(&self) -> String {
        let mut out = String::new();
        let n = self.sft.n();
        writeln!(out, "sft n {n}").unwrap();
        for row in self.sft.rows() {
            let bits: Vec<String> = row.iter().map(|b| b.to_string()).collect();
            writeln!(out, "row {}", bits.join(" ")).unwrap();
        }
        for (name, p) in &self.potentials {
            out.push_str(&print_potential("potential", name, p));
        }
        for (name, r) in &self.roofs {
            out.push_str(&print_potential("roof", name, r));
        }
        for (name, g) in &self.fibers {
            out.push_str(&print_fiber(name, g));
        }
        out
    }

    pub fn potential(&self, name: Option<&str>) -> Result<&LcPotential> {
        lookup(&self.potentials, name, "potential")
    }

    pub fn roof(&self, name: Option<&str>) -> Result<&Roof> {
        lookup(&self.roofs, name, "roof")
    }

    pub fn fiber(&self, name: Option<&str>) -> Result<&FiberPotential> {
        lookup(&self.fibers, name, "fiber")
    }
}

fn lookup<'a, T>(items: &'a [(String, T)], name: Option<&str>, kind: &str) -> Result<&'a T> {
    match name {
        Some(name) => items
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
            .ok_or_else(|| Error::InvalidArgument(format!("no {kind} named '{name}'"))),
        None => items
            .first()
            .map(|(_, v)| v)
            .ok_or_else(|| Error::InvalidArgument(format!("model has no {kind} block"))),
    }
}

/// One `potential` or `roof` block.
pub fn print_potential(keyword: &str, name: &str, p: &LcPotential) -> String {
    let mut out = format!("{keyword} {name} depth {}\n", p.depth());
    for (w, v) in p.iter() {
        writeln!(out, "{} {v}", p.sft().format_word(&w.0)).unwrap();
    }
    out
}

/// One `fiber` block.
pub fn print_fiber(name: &str, g: &FiberPotential) -> String {
    let mut out = format!("fiber {name} depth {}\n", g.depth());
    for (w, c) in g.words().iter().zip(g.coefficients()) {
        let coeffs: Vec<String> = c.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{} {}", g.sft().format_word(&w.0), coeffs.join(" ")).unwrap();
    }
    out
}
