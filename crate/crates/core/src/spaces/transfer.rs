use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::Zero;

use super::{Pattern, ShiftSystem};
use crate::error::{Error, Result};
use crate::group::GroupElement;

const MAX_BLOCKS: usize = 1 << 20;

/// A subshift of finite type on `Z` presented by its essential block graph:
/// states are the `m`-blocks that occur in some bi-infinite point and edges
/// the `(m+1)`-blocks, where `m + 1` is the longest forbidden span. Words of
/// the language correspond one-to-one with paths, so counts and dynamic
/// programs over paths are exact statements about global admissibility.
#[derive(Clone, Debug)]
pub struct OneDimSft {
    k: u32,
    memory: usize,
    /// essential (m+1)-blocks
    edges: BTreeSet<Vec<u32>>,
    /// every language word of length at most m+1
    short: BTreeSet<Vec<u32>>,
}

impl OneDimSft {
    pub fn new(sys: &ShiftSystem) -> Result<OneDimSft> {
        if !sys.group().is_integers() {
            return Err(Error::UnsupportedGroup("transfer matrices need the group Z".into()));
        }
        let k = sys.finite_alphabet()?.size() as u32;
        let words: Vec<(Vec<i64>, &Pattern)> = sys
            .forbidden()
            .iter()
            .map(|p| {
                let offs: Vec<i64> = p
                    .window
                    .iter()
                    .map(|g| match g {
                        GroupElement::Lattice(v) => v[0],
                        _ => unreachable!("Z elements are lattice vectors"),
                    })
                    .collect();
                let lo = *offs.iter().min().unwrap();
                (offs.iter().map(|o| o - lo).collect(), p)
            })
            .collect();
        let span = words.iter().map(|(o, _)| *o.iter().max().unwrap() as usize + 1).max().unwrap_or(1);
        let memory = span - 1;
        if (k as f64).powi(span as i32) > MAX_BLOCKS as f64 {
            return Err(Error::TooLarge(format!("{k}^{span} blocks")));
        }
        let occurs = |block: &[u32]| {
            words.iter().any(|(offs, p)| {
                let width = *offs.iter().max().unwrap() as usize + 1;
                width <= block.len()
                    && (0..=block.len() - width).any(|start| offs.iter().zip(&p.letters).all(|(&o, &a)| block[start + o as usize] == a))
            })
        };
        let mut edges: BTreeSet<Vec<u32>> = all_words(k, span).filter(|w| !occurs(w)).collect();
        // prune blocks that cannot be extended in both directions
        loop {
            let heads: BTreeSet<&[u32]> = edges.iter().map(|e| &e[..memory]).collect();
            let tails: BTreeSet<&[u32]> = edges.iter().map(|e| &e[1..]).collect();
            let keep: BTreeSet<Vec<u32>> =
                edges.iter().filter(|e| tails.contains(&e[..memory]) && heads.contains(&e[1..])).cloned().collect();
            if keep.len() == edges.len() {
                break;
            }
            edges = keep;
        }
        let mut short = BTreeSet::new();
        for e in &edges {
            for j in 0..=e.len() {
                short.insert(e[..j].to_vec());
            }
        }
        Ok(OneDimSft { k, memory, edges, short })
    }

    pub fn alphabet_size(&self) -> u32 {
        self.k
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Whether `word` occurs in some point of the subshift.
    pub fn in_language(&self, word: &[u32]) -> bool {
        if word.len() <= self.memory + 1 {
            return self.short.contains(word);
        }
        word.windows(self.memory + 1).all(|b| self.edges.contains(b))
    }

    /// Whether `word · a` is in the language, given that `word` is.
    fn extends(&self, word: &[u32], a: u32) -> bool {
        let mut w = word.to_vec();
        w.push(a);
        if w.len() <= self.memory + 1 {
            self.short.contains(&w)
        } else {
            self.edges.contains(&w[w.len() - self.memory - 1..])
        }
    }

    /// Number of words of length `n` in the language.
    pub fn count_words(&self, n: usize) -> BigUint {
        if n <= self.memory + 1 {
            return BigUint::from(self.short.iter().filter(|w| w.len() == n).count());
        }
        let m = self.memory;
        let mut counts: BTreeMap<Vec<u32>, BigUint> = BTreeMap::new();
        for e in &self.edges {
            *counts.entry(e[1..].to_vec()).or_default() += 1u32;
        }
        for _ in m + 1..n {
            let mut next: BTreeMap<Vec<u32>, BigUint> = BTreeMap::new();
            for (state, c) in &counts {
                for a in 0..self.k {
                    let mut block = state.clone();
                    block.push(a);
                    if self.edges.contains(&block) {
                        *next.entry(block[1..].to_vec()).or_default() += c;
                    }
                }
            }
            counts = next;
        }
        counts.values().fold(BigUint::zero(), |acc, c| acc + c)
    }

    /// The language words of length `n`, lexicographically.
    pub fn words(&self, n: usize, budget: Option<usize>) -> Result<Vec<Vec<u32>>> {
        let mut out = Vec::new();
        let mut stack = vec![Vec::new()];
        while let Some(w) = stack.pop() {
            if w.len() == n {
                if budget.is_some_and(|b| out.len() >= b) {
                    return Err(Error::TooLarge(format!("more than {} words", budget.unwrap_or(0))));
                }
                out.push(w);
                continue;
            }
            for a in (0..self.k).rev() {
                if self.extends(&w, a) {
                    let mut next = w.clone();
                    next.push(a);
                    stack.push(next);
                }
            }
        }
        Ok(out)
    }

    /// Maximizes `Σ_i score(i, ctx_i)` over language words of length `n`,
    /// where `ctx_i` holds the letters at `i - context ..= i` (fewer near the
    /// start). Returns `None` when the language has no word of length `n`.
    pub fn max_path_score<F: Fn(usize, &[u32]) -> u64>(&self, n: usize, context: usize, score: F) -> Option<u64> {
        let keep = context.max(self.memory);
        let mut best: HashMap<Vec<u32>, u64> = HashMap::from([(Vec::new(), 0)]);
        for i in 0..n {
            let mut next: HashMap<Vec<u32>, u64> = HashMap::new();
            for (state, &value) in &best {
                for a in 0..self.k {
                    if !self.extends(state, a) {
                        continue;
                    }
                    let mut w = state.clone();
                    w.push(a);
                    let ctx_start = w.len().saturating_sub(context + 1);
                    let v = value + score(i, &w[ctx_start..]);
                    if w.len() > keep {
                        w.remove(0);
                    }
                    let slot = next.entry(w).or_insert(0);
                    *slot = (*slot).max(v);
                }
            }
            best = next;
        }
        best.values().copied().max()
    }

    /// Whether local and global admissibility give the same number of words
    /// of length `n`.
    pub fn agrees_with_local(&self, sys: &ShiftSystem, n: usize) -> Result<bool> {
        let z = sys.group();
        let w = crate::group::FiniteWindow::interval(z, 0, n as i64 - 1)?;
        let local = super::count_patterns(sys, &w)?;
        Ok(local == self.count_words(n))
    }

    pub fn is_trivially_full(&self) -> bool {
        self.edges.len() == (self.k as usize).pow((self.memory + 1) as u32) && !self.edges.is_empty()
    }
}

fn all_words(k: u32, len: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = (k as usize).pow(len as u32);
    (0..total).map(move |mut code| {
        let mut w = vec![0u32; len];
        for slot in w.iter_mut().rev() {
            *slot = (code % k as usize) as u32;
            code /= k as usize;
        }
        w
    })
}
