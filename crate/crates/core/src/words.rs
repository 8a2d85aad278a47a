//! Free words over basis generators `z_i` and unknowns `x_i`.
//!
//! A [`Word`] is a list of syllables `(symbol, exponent)`. Every constructor
//! except [`Word::from_letters`] returns a freely reduced word, and commutator
//! brackets are expanded when text is parsed: `[u,v] = u v u^-1 v^-1`, with
//! longer brackets left-normed, `[u,v,w] = [[u,v],w]`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("generator z{index} exceeds rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },
    #[error("variable x{0} is unbound")]
    UnboundVariable(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Generator,
    Variable,
}

/// A basis generator `z_i` or an unknown `x_i`; indices start at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    pub kind: SymbolKind,
    pub index: usize,
}

impl Symbol {
    pub fn gen(index: usize) -> Self {
        assert!(index >= 1, "symbol indices start at 1");
        Symbol { kind: SymbolKind::Generator, index }
    }

    pub fn var(index: usize) -> Self {
        assert!(index >= 1, "symbol indices start at 1");
        Symbol { kind: SymbolKind::Variable, index }
    }

    pub fn is_generator(&self) -> bool {
        self.kind == SymbolKind::Generator
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SymbolKind::Generator => write!(f, "z{}", self.index),
            SymbolKind::Variable => write!(f, "x{}", self.index),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    letters: Vec<(Symbol, BigInt)>,
}

impl Word {
    pub fn identity() -> Self {
        Word { letters: Vec::new() }
    }

    /// Builds a word without reducing it.
    pub fn from_letters(letters: Vec<(Symbol, BigInt)>) -> Self {
        Word { letters }
    }

    pub fn letter(symbol: Symbol, exponent: impl Into<BigInt>) -> Self {
        free_reduce(&Word { letters: vec![(symbol, exponent.into())] })
    }

    pub fn gen(index: usize) -> Self {
        Word::letter(Symbol::gen(index), 1)
    }

    pub fn var(index: usize) -> Self {
        Word::letter(Symbol::var(index), 1)
    }

    pub fn letters(&self) -> &[(Symbol, BigInt)] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        free_reduce(self).letters.is_empty()
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        free_reduce(&Word { letters })
    }

    pub fn inverse(&self) -> Word {
        let letters = self.letters.iter().rev().map(|(s, e)| (*s, -e)).collect();
        free_reduce(&Word { letters })
    }

    pub fn pow(&self, n: &BigInt) -> Word {
        let base = if n.is_negative() { self.inverse() } else { free_reduce(self) };
        let mut count = n.abs();
        let mut out = Word::identity();
        // Square-and-multiply keeps huge exponents of short words cheap.
        let mut square = base;
        while !count.is_zero() {
            if (&count & BigInt::one()).is_one() {
                out = out.mul(&square);
            }
            count >>= 1;
            if !count.is_zero() {
                square = square.mul(&square);
            }
        }
        out
    }

    pub fn pow_i64(&self, n: i64) -> Word {
        self.pow(&BigInt::from(n))
    }

    /// `[self, other] = self other self^-1 other^-1`.
    pub fn commutator(&self, other: &Word) -> Word {
        self.mul(other).mul(&self.inverse()).mul(&other.inverse())
    }

    /// Left-normed commutator `[w1, w2, ..., wk]`.
    pub fn left_normed(parts: &[Word]) -> Word {
        let mut iter = parts.iter();
        let mut acc = iter.next().cloned().unwrap_or_default();
        for w in iter {
            acc = acc.commutator(w);
        }
        acc
    }

    /// Number of syllables after reduction.
    pub fn syllable_count(&self) -> usize {
        free_reduce(self).letters.len()
    }

    pub fn max_generator(&self) -> usize {
        self.letters
            .iter()
            .filter(|(s, _)| s.is_generator())
            .map(|(s, _)| s.index)
            .max()
            .unwrap_or(0)
    }

    pub fn max_variable(&self) -> usize {
        self.letters
            .iter()
            .filter(|(s, _)| !s.is_generator())
            .map(|(s, _)| s.index)
            .max()
            .unwrap_or(0)
    }

    pub fn has_variables(&self) -> bool {
        self.letters.iter().any(|(s, _)| !s.is_generator())
    }

    pub fn has_generators(&self) -> bool {
        self.letters.iter().any(|(s, _)| s.is_generator())
    }

    /// Renames every generator `z_i` to the unknown `x_i`.
    pub fn generators_to_variables(&self) -> Word {
        let letters = self
            .letters
            .iter()
            .map(|(s, e)| {
                let s = if s.is_generator() { Symbol::var(s.index) } else { *s };
                (s, e.clone())
            })
            .collect();
        Word { letters }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, (s, e)) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if e.is_one() {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

pub fn format_word(w: &Word) -> String {
    w.to_string()
}

/// Free reduction: merges adjacent equal symbols and drops zero exponents.
pub fn free_reduce(w: &Word) -> Word {
    let mut out: Vec<(Symbol, BigInt)> = Vec::with_capacity(w.letters.len());
    for (s, e) in &w.letters {
        if e.is_zero() {
            continue;
        }
        match out.last_mut() {
            Some((last, acc)) if last == s => {
                *acc += e;
                if acc.is_zero() {
                    out.pop();
                }
            }
            _ => out.push((*s, e.clone())),
        }
    }
    Word { letters: out }
}

/// Replaces each variable `x_i^e` by `assignment[x_i]^e`; generators stay.
pub fn substitute(w: &Word, assignment: &BTreeMap<usize, Word>) -> Result<Word, WordError> {
    let mut out = Word::identity();
    for (s, e) in &w.letters {
        let piece = if s.is_generator() {
            Word::letter(*s, e.clone())
        } else {
            let image = assignment.get(&s.index).ok_or(WordError::UnboundVariable(s.index))?;
            image.pow(e)
        };
        out = out.mul(&piece);
    }
    Ok(out)
}

/// Total signed exponent of `g` in `w`.
pub fn exponent_sum(w: &Word, g: Symbol) -> BigInt {
    w.letters.iter().filter(|(s, _)| *s == g).map(|(_, e)| e).sum()
}

/// Exponent sums of `z_1..z_rank`, the abelianized image of `w`.
pub fn abelianize(w: &Word, rank: usize) -> Vec<BigInt> {
    (1..=rank).map(|i| exponent_sum(w, Symbol::gen(i))).collect()
}

pub fn parse_word(text: &str, rank: Option<usize>) -> Result<Word, WordError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, rank };
    let w = p.word()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(w)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    rank: Option<usize>,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> WordError {
        WordError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), WordError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn word(&mut self) -> Result<Word, WordError> {
        if self.peek() == Some(b'1') {
            let save = self.pos;
            self.pos += 1;
            // "1" is the identity only when it is not the start of a longer number.
            if !matches!(self.src.get(self.pos), Some(c) if c.is_ascii_digit()) {
                return Ok(Word::identity());
            }
            self.pos = save;
            return Err(self.error("expected a generator, variable or bracket"));
        }
        let mut acc = self.term()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let t = self.term()?;
            acc = acc.mul(&t);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Word, WordError> {
        let atom = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.int()?;
            Ok(atom.pow(&e))
        } else {
            Ok(atom)
        }
    }

    fn atom(&mut self) -> Result<Word, WordError> {
        match self.peek() {
            Some(b'z') => {
                self.pos += 1;
                let start = self.pos;
                let index = self.posint()?;
                if let Some(rank) = self.rank {
                    if index > rank {
                        self.pos = start;
                        return Err(WordError::GeneratorOutOfRange { index, rank });
                    }
                }
                Ok(Word::gen(index))
            }
            Some(b'x') => {
                self.pos += 1;
                let index = self.posint()?;
                Ok(Word::var(index))
            }
            Some(b'(') => {
                self.pos += 1;
                let w = self.word()?;
                self.expect(b')')?;
                Ok(w)
            }
            Some(b'[') => {
                self.pos += 1;
                let mut parts = vec![self.word()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    parts.push(self.word()?);
                }
                if parts.len() < 2 {
                    return Err(self.error("a commutator needs at least two entries"));
                }
                self.expect(b']')?;
                Ok(Word::left_normed(&parts))
            }
            Some(_) => Err(self.error("expected a generator, variable or bracket")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn digits(&mut self) -> Result<&str, WordError> {
        // No whitespace between a symbol letter and its index.
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a positive integer"));
        }
        if self.src[start] == b'0' {
            self.pos = start;
            return Err(self.error("expected a positive integer"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits"))
    }

    fn posint(&mut self) -> Result<usize, WordError> {
        let start = self.pos;
        let s = self.digits()?.to_string();
        s.parse().map_err(|_| WordError::Syntax { pos: start, msg: "index too large".into() })
    }

    fn int(&mut self) -> Result<BigInt, WordError> {
        let negative = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        self.skip_ws();
        let s = self.digits()?;
        let v: BigInt = s.parse().expect("validated digits");
        Ok(if negative { -v } else { v })
    }
}
