//! The unique normal form x_{i_1}^{r_1}...x_{i_n}^{r_n} x_{j_m}^{-s_m}...x_{j_1}^{-s_1}
//! with strictly increasing index blocks, i_n != j_m when both blocks are
//! nonempty, and the successor condition: an index present in both blocks
//! must be followed by index+1 in at least one block.
//!
//! Rewriting works letter by letter. Right-multiplying a normal form by a
//! single generator pushes the new letter leftwards through the stored
//! blocks using the oriented relations (for i < j):
//!
//!   x_j x_i      -> x_i x_{j+1}
//!   x_i^-1 x_j   -> x_{j+1} x_i^-1
//!   x_j^-1 x_i   -> x_i x_{j+1}^-1
//!   x_i^-1 x_j^-1 -> x_{j+1}^-1 x_i^-1
//!
//! plus cancellation. Each rule moves a positive letter left or a negative
//! letter right and never increases the letter count.

use crate::words::{Letter, Sign, Word};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// One block entry: the generator index and its (strictly positive) exponent.
pub type Term = (u32, u32);

/// The negative block is stored in ascending index order and emitted
/// right-to-left, matching the display above.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawNormalForm")]
pub struct NormalForm {
    pos: Vec<Term>,
    neg: Vec<Term>,
}

/// D = sum of exponents + i_n + j_m, with a missing block contributing 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DStat(pub u64);

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InvalidNormalForm {
    #[error("exponent must be strictly positive at index {0}")]
    ZeroExponent(u32),
    #[error("block indices must be strictly increasing (saw {0} then {1})")]
    UnsortedBlock(u32, u32),
    #[error("highest positive and negative indices coincide ({0})")]
    EqualBlockEnds(u32),
    #[error("index {0} appears in both blocks but index {1} appears in neither")]
    MissingSuccessor(u32, u32),
}

#[derive(Deserialize)]
struct RawNormalForm {
    pos: Vec<Term>,
    neg: Vec<Term>,
}

impl TryFrom<RawNormalForm> for NormalForm {
    type Error = InvalidNormalForm;
    fn try_from(raw: RawNormalForm) -> Result<Self, Self::Error> {
        NormalForm::from_parts(raw.pos, raw.neg)
    }
}

fn check_block(block: &[Term]) -> Result<(), InvalidNormalForm> {
    for window in block.windows(2) {
        if window[0].0 >= window[1].0 {
            return Err(InvalidNormalForm::UnsortedBlock(window[0].0, window[1].0));
        }
    }
    for &(i, r) in block {
        if r == 0 {
            return Err(InvalidNormalForm::ZeroExponent(i));
        }
    }
    Ok(())
}

fn block_contains(block: &[Term], index: u32) -> bool {
    block.binary_search_by_key(&index, |t| t.0).is_ok()
}

impl NormalForm {
    pub fn identity() -> NormalForm {
        NormalForm::default()
    }

    /// The generator x_k as a normal form.
    pub fn generator(k: u32) -> NormalForm {
        NormalForm { pos: vec![(k, 1)], neg: Vec::new() }
    }

    /// Validates all normal-form conditions.
    pub fn from_parts(pos: Vec<Term>, neg: Vec<Term>) -> Result<NormalForm, InvalidNormalForm> {
        check_block(&pos)?;
        check_block(&neg)?;
        if let (Some(p), Some(n)) = (pos.last(), neg.last()) {
            if p.0 == n.0 {
                return Err(InvalidNormalForm::EqualBlockEnds(p.0));
            }
        }
        for &(i, _) in &pos {
            if block_contains(&neg, i)
                && !block_contains(&pos, i + 1)
                && !block_contains(&neg, i + 1)
            {
                return Err(InvalidNormalForm::MissingSuccessor(i, i + 1));
            }
        }
        Ok(NormalForm { pos, neg })
    }

    pub fn positive_block(&self) -> &[Term] {
        &self.pos
    }

    pub fn negative_block(&self) -> &[Term] {
        &self.neg
    }

    pub fn is_identity(&self) -> bool {
        self.pos.is_empty() && self.neg.is_empty()
    }

    /// Rewrites an arbitrary word into the unique normal form.
    pub fn normalize(w: &Word) -> NormalForm {
        let mut nf = NormalForm::identity();
        for &letter in w.letters() {
            nf.mul_letter(letter);
        }
        nf.cleanup();
        nf
    }

    /// Group multiplication: a * b.
    pub fn multiply(&self, other: &NormalForm) -> NormalForm {
        let mut nf = self.clone();
        for &letter in other.to_word().letters() {
            nf.mul_letter(letter);
        }
        nf.cleanup();
        nf
    }

    /// Inverse: the two blocks swap roles.
    pub fn inverse(&self) -> NormalForm {
        NormalForm { pos: self.neg.clone(), neg: self.pos.clone() }
    }

    /// The shift endomorphism applied k times: every index increases by k.
    pub fn shift(&self, k: u32) -> NormalForm {
        let bump = |block: &[Term]| block.iter().map(|&(i, r)| (i + k, r)).collect();
        NormalForm { pos: bump(&self.pos), neg: bump(&self.neg) }
    }

    pub fn d_statistic(&self) -> DStat {
        let exp_sum: u64 = self
            .pos
            .iter()
            .chain(self.neg.iter())
            .map(|&(_, r)| r as u64)
            .sum();
        let top = |block: &[Term]| block.last().map_or(0u64, |&(i, _)| i as u64);
        DStat(exp_sum + top(&self.pos) + top(&self.neg))
    }

    /// Positive block ascending, then negative block descending with
    /// negative signs.
    pub fn to_word(&self) -> Word {
        let mut letters = Vec::new();
        for &(i, r) in &self.pos {
            letters.extend(std::iter::repeat_n(Letter::positive(i), r as usize));
        }
        for &(j, s) in self.neg.iter().rev() {
            letters.extend(std::iter::repeat_n(Letter::negative(j), s as usize));
        }
        Word::from_letters(letters)
    }

    fn mul_letter(&mut self, letter: Letter) {
        match letter.sign {
            Sign::Plus => self.mul_positive(letter.index),
            Sign::Minus => self.mul_negative(letter.index),
        }
        self.boundary_cancel();
    }

    /// Right-multiplies by x_k, pushing it left through the negative block
    /// and into position within the positive block.
    fn mul_positive(&mut self, mut k: u32) {
        let mut idx = 0;
        while idx < self.neg.len() {
            let (j, s) = self.neg[idx];
            if j < k {
                // x_j^-1 x_k -> x_{k+1} x_j^-1, once per power
                k += s;
                idx += 1;
            } else if j == k {
                // cancellation inside the negative block
                if s == 1 {
                    self.neg.remove(idx);
                } else {
                    self.neg[idx].1 -= 1;
                }
                return;
            } else {
                // x_j^-1 x_k -> x_k x_{j+1}^-1: all remaining entries shift up
                for t in idx..self.neg.len() {
                    self.neg[t].0 += 1;
                }
                break;
            }
        }
        // insert into the positive block from the right
        let mut at = self.pos.len();
        while at > 0 {
            let (i, _) = self.pos[at - 1];
            if i > k {
                // x_i x_k -> x_k x_{i+1}
                self.pos[at - 1].0 += 1;
                at -= 1;
            } else if i == k {
                self.pos[at - 1].1 += 1;
                return;
            } else {
                break;
            }
        }
        self.pos.insert(at, (k, 1));
    }

    /// Right-multiplies by x_k^{-1}, pushing it left through the negative
    /// block towards its sorted position.
    fn mul_negative(&mut self, mut k: u32) {
        let mut idx = 0;
        while idx < self.neg.len() {
            let (j, s) = self.neg[idx];
            if j < k {
                // x_j^-1 x_k^-1 -> x_{k+1}^-1 x_j^-1, once per power
                k += s;
                idx += 1;
            } else if j == k {
                self.neg[idx].1 += 1;
                return;
            } else {
                self.neg.insert(idx, (k, 1));
                return;
            }
        }
        // passed the whole negative block; it now borders the positive tail
        if let Some(last) = self.pos.last_mut() {
            if last.0 == k {
                last.1 -= 1;
                if last.1 == 0 {
                    self.pos.pop();
                }
                return;
            }
        }
        self.neg.push((k, 1));
    }

    /// Cancels x_i^r x_i^{-s} pairs at the block boundary while the highest
    /// indices coincide.
    fn boundary_cancel(&mut self) {
        while let (Some(&(i, r)), Some(&(j, s))) = (self.pos.last(), self.neg.last()) {
            if i != j {
                break;
            }
            let t = r.min(s);
            let p = self.pos.last_mut().unwrap();
            p.1 -= t;
            if p.1 == 0 {
                self.pos.pop();
            }
            let n = self.neg.last_mut().unwrap();
            n.1 -= t;
            if n.1 == 0 {
                self.neg.pop();
            }
        }
    }

    /// Enforces the successor condition: while some index i sits in both
    /// blocks with neither x_{i+1} nor x_{i+1}^{-1} present, drop one power
    /// of x_i from each block and pull every index above i+1 down by one
    /// (the subword between the dropped pair is phi^2 of something and gets
    /// replaced by phi of it). Smallest index first, re-scan after each
    /// rewrite.
    fn cleanup(&mut self) {
        'scan: loop {
            for t in 0..self.pos.len() {
                let i = self.pos[t].0;
                if !block_contains(&self.neg, i) {
                    continue;
                }
                if block_contains(&self.pos, i + 1) || block_contains(&self.neg, i + 1) {
                    continue;
                }
                Self::drop_power(&mut self.pos, i);
                Self::drop_power(&mut self.neg, i);
                for block in [&mut self.pos, &mut self.neg] {
                    for entry in block.iter_mut() {
                        if entry.0 > i + 1 {
                            entry.0 -= 1;
                        }
                    }
                }
                self.boundary_cancel();
                continue 'scan;
            }
            return;
        }
    }

    fn drop_power(block: &mut Vec<Term>, index: u32) {
        let at = block
            .binary_search_by_key(&index, |t| t.0)
            .expect("index present by construction");
        block[at].1 -= 1;
        if block[at].1 == 0 {
            block.remove(at);
        }
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_word())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nf(text: &str) -> NormalForm {
        NormalForm::normalize(&Word::parse(text).unwrap())
    }

    fn parts(a: &NormalForm) -> (Vec<Term>, Vec<Term>) {
        (a.pos.clone(), a.neg.clone())
    }

    #[test]
    fn normalize_relation_instances() {
        // x_1 x_0 = x_0 x_2 by the defining relation with i=0, j=1
        assert_eq!(parts(&nf("x1 x0")), (vec![(0, 1), (2, 1)], vec![]));
        // x_1 x_3 x_1^-1 = x_2 forced by x_1^-1 x_2 x_1 = x_3
        assert_eq!(parts(&nf("x1 x3 x1^-1")), (vec![(2, 1)], vec![]));
        // shuffle example
        assert_eq!(
            parts(&nf("x0 x1^-1 x0 x1^-1")),
            (vec![(0, 2)], vec![(1, 1), (2, 1)])
        );
    }

    #[test]
    fn normalize_identity_and_cancellation() {
        assert!(nf("").is_identity());
        assert!(nf("x0 x0^-1").is_identity());
        assert!(nf("x1 x0 x0^-1 x1^-1").is_identity());
        assert!(nf("x5 x5^-1 x3 x3^-1").is_identity());
    }

    #[test]
    fn successor_condition_cleanup() {
        // x_1 x_3 x_1^-1 has index 1 in both blocks with no x_2: collapses
        let a = nf("x1 x3 x1^-1");
        assert_eq!(parts(&a), (vec![(2, 1)], vec![]));
        // x_0 x_5 x_0^-1 -> x_4
        assert_eq!(parts(&nf("x0 x5 x0^-1")), (vec![(4, 1)], vec![]));
        // with the successor present, no cleanup happens
        let b = nf("x1 x2 x4 x1^-1");
        assert_eq!(parts(&b), (vec![(1, 1), (2, 1), (4, 1)], vec![(1, 1)]));
    }

    #[test]
    fn multiply_examples() {
        let id = NormalForm::identity();
        assert_eq!(
            NormalForm::generator(0).multiply(&nf("x0^-1")),
            id
        );
        assert_eq!(
            NormalForm::generator(1).multiply(&NormalForm::generator(0)),
            nf("x0 x2")
        );
        // (x_0 x_1^-1) * x_2 = x_0 x_3 x_1^-1
        assert_eq!(nf("x0 x1^-1").multiply(&nf("x2")), nf("x0 x3 x1^-1"));
        assert_eq!(id.multiply(&nf("x4")), nf("x4"));
    }

    #[test]
    fn inverse_examples() {
        let id = NormalForm::identity();
        assert_eq!(id.inverse(), id);
        let a = nf("x0 x2");
        assert_eq!(parts(&a.inverse()), (vec![], vec![(0, 1), (2, 1)]));
        let b = nf("x0 x1^-1 x0 x1^-1"); // x_0^2 x_2^-1 x_1^-1
        assert_eq!(parts(&b.inverse()), (vec![(1, 1), (2, 1)], vec![(0, 2)]));
        assert!(a.multiply(&a.inverse()).is_identity());
        assert!(b.inverse().multiply(&b).is_identity());
    }

    #[test]
    fn shift_examples() {
        assert_eq!(NormalForm::generator(0).shift(1), NormalForm::generator(1));
        assert_eq!(nf("x0 x1^-1").shift(2), nf("x2 x3^-1"));
        let a = nf("x0 x2 x1^-1");
        assert_eq!(a.shift(0), a);
        // phi-law: shift(a,2) = x_0^-1 shift(a,1) x_0
        let x0 = NormalForm::generator(0);
        let conj = x0.inverse().multiply(&a.shift(1)).multiply(&x0);
        assert_eq!(a.shift(2), conj);
    }

    #[test]
    fn d_statistic_examples() {
        assert_eq!(NormalForm::identity().d_statistic(), DStat(0));
        assert_eq!(nf("x0 x1^-1 x0 x1^-1").d_statistic(), DStat(6));
        assert_eq!(nf("x2").d_statistic(), DStat(3));
        assert_eq!(nf("x0 x1^-1").d_statistic(), DStat(3));
    }

    #[test]
    fn to_word_round_trip() {
        for text in ["", "x0 x1^-1 x0 x1^-1", "x0 x2", "x3 x1^-1", "x0^4 x7 x5^-2"] {
            let a = nf(text);
            assert_eq!(NormalForm::normalize(&a.to_word()), a, "word {text:?}");
        }
        assert_eq!(
            nf("x0 x1^-1 x0 x1^-1").to_word(),
            Word::parse("x0^2 x2^-1 x1^-1").unwrap()
        );
    }

    #[test]
    fn from_parts_validation() {
        assert!(NormalForm::from_parts(vec![(0, 1), (2, 1)], vec![]).is_ok());
        assert!(matches!(
            NormalForm::from_parts(vec![(0, 0)], vec![]),
            Err(InvalidNormalForm::ZeroExponent(0))
        ));
        assert!(matches!(
            NormalForm::from_parts(vec![(2, 1), (1, 1)], vec![]),
            Err(InvalidNormalForm::UnsortedBlock(2, 1))
        ));
        assert!(matches!(
            NormalForm::from_parts(vec![(1, 1)], vec![(1, 1)]),
            Err(InvalidNormalForm::EqualBlockEnds(1))
        ));
        // index 1 in both blocks with no index 2 anywhere
        assert!(matches!(
            NormalForm::from_parts(vec![(1, 1), (3, 1)], vec![(1, 1)]),
            Err(InvalidNormalForm::MissingSuccessor(1, 2))
        ));
    }

    #[test]
    fn normalize_never_longer_than_reduced_word() {
        let w = Word::parse("x3 x2 x1 x0 x0^-1 x1^-1 x4 x4").unwrap();
        let a = NormalForm::normalize(&w);
        let total: u64 = a
            .pos
            .iter()
            .chain(a.neg.iter())
            .map(|&(_, r)| r as u64)
            .sum();
        assert!(total <= w.free_reduce().len() as u64);
    }
}
