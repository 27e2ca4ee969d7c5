//! Shift systems `Γ ↷ A^Γ` over finite or cube alphabets, finitely
//! represented configurations and the metric calculus on them.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteWindow, Group, GroupElement};

pub mod alphabet;
pub mod metric;
pub mod patterns;
pub mod transfer;

pub use alphabet::{Alphabet, FiniteAlphabet};
pub use metric::{eval_metric, microstate_metrics, Base, Pseudometric, PseudometricSpec};
pub use patterns::{count_patterns, enumerate_patterns, PatternEnumerator};
pub use transfer::OneDimSft;

/// Letters on a finite window: `letters[i]` sits at `window.elements()[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pattern {
    pub window: FiniteWindow,
    pub letters: Vec<u32>,
}

impl Pattern {
    pub fn new(window: FiniteWindow, letters: Vec<u32>) -> Result<Pattern> {
        if window.len() != letters.len() {
            return Err(Error::DimensionMismatch { expected: window.len(), found: letters.len() });
        }
        Ok(Pattern { window, letters })
    }

    /// The word `w` placed on `{0, ..., |w|-1} ⊆ Z`.
    pub fn word(group: &Group, word: &[u32]) -> Result<Pattern> {
        let window = FiniteWindow::interval(group, 0, word.len() as i64 - 1)?;
        Pattern::new(window, word.to_vec())
    }

    /// Whether `x_{g w} = p_w` for every `w` in the window.
    pub fn occurs_at(&self, x: &Configuration, g: &GroupElement) -> bool {
        let group = self.window.group();
        self.window.iter().zip(&self.letters).all(|(w, &a)| x.letter(&group.mul(g, w)) == a)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Constraint {
    Full,
    Forbidden(Vec<Pattern>),
}

/// A full shift or a subshift of finite type defined by forbidden patterns
/// applied at every translate.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftSystem {
    alphabet: Alphabet,
    group: Group,
    constraint: Constraint,
}

impl ShiftSystem {
    pub fn new(alphabet: Alphabet, group: Group, constraint: Constraint) -> Result<ShiftSystem> {
        if let Constraint::Forbidden(patterns) = &constraint {
            let k = alphabet.as_finite().ok_or(Error::AlphabetNotFinite)?.size() as u32;
            for p in patterns {
                if *p.window.group() != group {
                    return Err(Error::MismatchedOwners);
                }
                if p.letters.iter().any(|&a| a >= k) {
                    return Err(Error::OutOfRange(format!("pattern letter outside an alphabet of size {k}")));
                }
            }
        }
        Ok(ShiftSystem { alphabet, group, constraint })
    }

    pub fn full_shift(group: &Group, k: usize) -> Result<ShiftSystem> {
        ShiftSystem::new(Alphabet::discrete(k)?, group.clone(), Constraint::Full)
    }

    pub fn cube_shift(group: &Group, dim: usize) -> Result<ShiftSystem> {
        ShiftSystem::new(Alphabet::cube(dim)?, group.clone(), Constraint::Full)
    }

    /// A subshift of `{0..k-1}^Z` forbidding the given words.
    pub fn one_dim_sft(k: usize, forbidden: &[&[u32]]) -> Result<ShiftSystem> {
        let z = Group::integers();
        let patterns = forbidden.iter().map(|w| Pattern::word(&z, w)).collect::<Result<_>>()?;
        ShiftSystem::new(Alphabet::discrete(k)?, z, Constraint::Forbidden(patterns))
    }

    /// Binary sequences with no two adjacent ones.
    pub fn golden_mean() -> ShiftSystem {
        ShiftSystem::one_dim_sft(2, &[&[1, 1]]).expect("valid golden-mean shift")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn constraint(&self) -> &Constraint {
        &self.constraint
    }

    pub fn is_full(&self) -> bool {
        self.constraint == Constraint::Full
    }

    pub fn forbidden(&self) -> &[Pattern] {
        match &self.constraint {
            Constraint::Full => &[],
            Constraint::Forbidden(p) => p,
        }
    }

    pub fn finite_alphabet(&self) -> Result<&FiniteAlphabet> {
        self.alphabet.as_finite().ok_or(Error::AlphabetNotFinite)
    }

    /// Whether no forbidden pattern occurs in `x`: every translate meeting the
    /// support is checked, and the constant tail on its own.
    pub fn is_admissible(&self, x: &Configuration) -> bool {
        let group = &self.group;
        for p in self.forbidden() {
            if p.letters.iter().all(|&a| a == x.tail) {
                return false;
            }
            let mut tried = HashSet::new();
            for u in x.support.iter() {
                for w in p.window.iter() {
                    let g = group.mul(u, &group.inverse(w));
                    if tried.insert(g.clone()) && p.occurs_at(x, &g) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// A point of `A^Γ` with finitely many letters on `support` and the
/// constant letter `tail` elsewhere.
#[derive(Clone, Debug)]
pub struct Configuration {
    support: FiniteWindow,
    letters: Vec<u32>,
    tail: u32,
}

impl Configuration {
    pub fn new(support: FiniteWindow, letters: Vec<u32>, tail: u32) -> Result<Configuration> {
        if support.len() != letters.len() {
            return Err(Error::DimensionMismatch { expected: support.len(), found: letters.len() });
        }
        Ok(Configuration { support, letters, tail })
    }

    pub fn constant(group: &Group, letter: u32) -> Configuration {
        Configuration { support: FiniteWindow::identity(group), letters: vec![letter], tail: letter }
    }

    pub fn from_pattern(p: &Pattern, tail: u32) -> Configuration {
        Configuration { support: p.window.clone(), letters: p.letters.clone(), tail }
    }

    pub fn group(&self) -> &Group {
        self.support.group()
    }

    pub fn support(&self) -> &FiniteWindow {
        &self.support
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn tail(&self) -> u32 {
        self.tail
    }

    pub fn letter(&self, t: &GroupElement) -> u32 {
        match self.support.position(t) {
            Some(i) => self.letters[i],
            None => self.tail,
        }
    }

    /// `(sx)_t = x_{s^{-1} t}`: the letter at `u` moves to `s u`.
    pub fn act(&self, s: &GroupElement) -> Configuration {
        Configuration { support: self.support.translate_left(s), letters: self.letters.clone(), tail: self.tail }
    }

    /// Points of `Γ` where `self` and `other` may differ, assuming equal
    /// tails: the union of supports, filtered to actual differences.
    pub fn differences(&self, other: &Configuration) -> Vec<GroupElement> {
        let mut out: Vec<GroupElement> =
            self.support.iter().filter(|t| self.letter(t) != other.letter(t)).cloned().collect();
        out.extend(
            other.support.iter().filter(|t| !self.support.contains(t) && self.letter(t) != other.letter(t)).cloned(),
        );
        out
    }

    /// Equality as points of `A^Γ`.
    pub fn same_point(&self, other: &Configuration) -> bool {
        self.group() == other.group() && self.tail == other.tail && self.differences(other).is_empty()
    }

    pub fn to_record(&self) -> ConfigurationRecord {
        ConfigurationRecord { window: self.support.format(), letters: self.letters.clone(), tail: self.tail }
    }

    pub fn from_record(group: &Group, rec: &ConfigurationRecord) -> Result<Configuration> {
        let elems = rec.window.iter().map(|w| group.normal_form(w)).collect::<Result<Vec<_>>>()?;
        let support = FiniteWindow::new(group.clone(), elems)?;
        if support.len() != rec.window.len() {
            return Err(Error::InvalidWindow("repeated support element".into()));
        }
        Configuration::new(support, rec.letters.clone(), rec.tail)
    }
}

/// Serialized configuration: window as words, letters as indices, tail letter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigurationRecord {
    pub window: Vec<String>,
    pub letters: Vec<u32>,
    pub tail: u32,
}
