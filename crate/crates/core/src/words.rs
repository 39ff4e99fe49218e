//! Words over the infinite generating set {x_0, x_1, x_2, ...}.
//!
//! The text grammar is whitespace-separated terms `x<index>[^<exponent>]`,
//! e.g. `x0 x1^-1 x2^3`. The empty string is the identity.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// A single signed generator letter x_index^{±1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub index: u32,
    pub sign: Sign,
}

impl Letter {
    pub fn positive(index: u32) -> Letter {
        Letter { index, sign: Sign::Plus }
    }

    pub fn negative(index: u32) -> Letter {
        Letter { index, sign: Sign::Minus }
    }

    pub fn inverse(self) -> Letter {
        Letter { index: self.index, sign: self.sign.flip() }
    }
}

/// A word in left-to-right group multiplication order. Immutable by
/// construction: all operations return fresh words.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("parse error at byte {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

fn err(position: usize, message: impl Into<String>) -> ParseError {
    ParseError { position, message: message.into() }
}

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Word {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Concatenation (group multiplication at the word level).
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// Parses the grammar `word := term (WS+ term)* | ε`,
    /// `term := "x" index ("^" exponent)?`.
    pub fn parse(text: &str) -> Result<Word, ParseError> {
        let mut letters = Vec::new();
        let bytes = text.as_bytes();
        let mut pos = 0;
        while pos < bytes.len() {
            if bytes[pos].is_ascii_whitespace() {
                pos += 1;
                continue;
            }
            if bytes[pos] != b'x' {
                return Err(err(pos, format!("expected 'x', found {:?}", bytes[pos] as char)));
            }
            pos += 1;
            let digits_start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if pos == digits_start {
                return Err(err(pos, "expected generator index after 'x'"));
            }
            let index: u32 = text[digits_start..pos]
                .parse::<u64>()
                .ok()
                .filter(|&v| v <= i32::MAX as u64)
                .ok_or_else(|| err(digits_start, "generator index exceeds 2^31-1"))?
                as u32;
            let mut exponent: i64 = 1;
            if pos < bytes.len() && bytes[pos] == b'^' {
                pos += 1;
                let exp_start = pos;
                if pos < bytes.len() && bytes[pos] == b'-' {
                    pos += 1;
                }
                let num_start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if pos == num_start {
                    return Err(err(pos, "expected exponent after '^'"));
                }
                exponent = text[exp_start..pos]
                    .parse::<i64>()
                    .map_err(|_| err(exp_start, "exponent out of range"))?;
                if exponent == 0 {
                    return Err(err(exp_start, "exponent must be nonzero"));
                }
            }
            if pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                return Err(err(pos, format!("unexpected character {:?}", bytes[pos] as char)));
            }
            let sign = if exponent > 0 { Sign::Plus } else { Sign::Minus };
            for _ in 0..exponent.unsigned_abs() {
                letters.push(Letter { index, sign });
            }
        }
        Ok(Word(letters))
    }

    /// Removes all adjacent x_i^{+1} x_i^{-1} / x_i^{-1} x_i^{+1} pairs.
    pub fn free_reduce(&self) -> Word {
        let mut stack: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &letter in &self.0 {
            match stack.last() {
                Some(&top) if top == letter.inverse() => {
                    stack.pop();
                }
                _ => stack.push(letter),
            }
        }
        Word(stack)
    }

    /// Reversed sequence with all signs flipped.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Net exponent sum: positive letters minus negative letters.
    pub fn signed_letter_count(&self) -> i64 {
        self.0.iter().map(|l| l.sign.as_i32() as i64).sum()
    }
}

impl fmt::Display for Word {
    /// Adjacent equal letters are re-collected into exponent notation.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut i = 0;
        let mut first = true;
        while i < self.0.len() {
            let letter = self.0[i];
            let mut run = 1usize;
            while i + run < self.0.len() && self.0[i + run] == letter {
                run += 1;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let exp = run as i64 * letter.sign.as_i32() as i64;
            if exp == 1 {
                write!(f, "x{}", letter.index)?;
            } else {
                write!(f, "x{}^{}", letter.index, exp)?;
            }
            i += run;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pos(i: u32) -> Letter {
        Letter::positive(i)
    }

    fn neg(i: u32) -> Letter {
        Letter::negative(i)
    }

    #[test]
    fn parse_basic() {
        assert_eq!(Word::parse("x0 x1^-1").unwrap(), Word(vec![pos(0), neg(1)]));
        assert_eq!(Word::parse("x2^3").unwrap(), Word(vec![pos(2), pos(2), pos(2)]));
        assert_eq!(Word::parse("").unwrap(), Word::empty());
        assert_eq!(Word::parse("  \t ").unwrap(), Word::empty());
        assert_eq!(Word::parse("x1^-2").unwrap(), Word(vec![neg(1), neg(1)]));
    }

    #[test]
    fn parse_errors() {
        assert!(Word::parse("y0").is_err());
        assert!(Word::parse("x").is_err());
        assert!(Word::parse("x-1").is_err());
        assert!(Word::parse("x0^0").is_err());
        assert!(Word::parse("x0^").is_err());
        assert!(Word::parse("x0^+2").is_err());
        assert!(Word::parse("x2147483648").is_err()); // > 2^31 - 1
        assert!(Word::parse("x2147483647").is_ok());
        let e = Word::parse("x0 x1^0").unwrap_err();
        assert_eq!(e.position, 6);
    }

    #[test]
    fn format_recollects_exponents() {
        assert_eq!(Word(vec![pos(0), neg(1)]).to_string(), "x0 x1^-1");
        assert_eq!(Word::empty().to_string(), "");
        assert_eq!(Word(vec![pos(2), pos(2), pos(2)]).to_string(), "x2^3");
        assert_eq!(Word(vec![neg(2), neg(2)]).to_string(), "x2^-2");
        // a cancelling pair is not an exponent run
        assert_eq!(Word(vec![pos(0), neg(0)]).to_string(), "x0 x0^-1");
    }

    #[test]
    fn free_reduce_examples() {
        assert_eq!(Word(vec![pos(0), neg(0)]).free_reduce(), Word::empty());
        assert_eq!(
            Word(vec![pos(1), pos(0), neg(0), neg(1)]).free_reduce(),
            Word::empty()
        );
        let reduced = Word(vec![pos(1), pos(0)]);
        assert_eq!(reduced.free_reduce(), reduced);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Word(vec![pos(0), neg(1)]).inverse(), Word(vec![pos(1), neg(0)]));
        assert_eq!(Word::empty().inverse(), Word::empty());
        assert_eq!(Word(vec![pos(2), pos(2)]).inverse(), Word(vec![neg(2), neg(2)]));
        let w = Word(vec![pos(3), neg(1), pos(0)]);
        assert_eq!(w.concat(&w.inverse()).free_reduce(), Word::empty());
    }
}
