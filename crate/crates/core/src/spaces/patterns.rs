use std::collections::HashSet;
use std::ops::ControlFlow;

use num_bigint::BigUint;
use num_traits::Pow;

use super::ShiftSystem;
use crate::error::{Error, Result};
use crate::group::FiniteWindow;

/// Backtracking enumerator of the locally admissible patterns on a window:
/// assignments `W → A` in which no forbidden pattern occurs at a translate
/// `g` with `g · supp(p) ⊆ W`.
pub struct PatternEnumerator {
    k: u32,
    len: usize,
    /// forbidden occurrences `(position, letter)` grouped by their last position
    checks: Vec<Vec<Vec<(usize, u32)>>>,
}

impl PatternEnumerator {
    pub fn new(sys: &ShiftSystem, w: &FiniteWindow) -> Result<PatternEnumerator> {
        if w.group() != sys.group() {
            return Err(Error::MismatchedOwners);
        }
        let k = sys.finite_alphabet()?.size() as u32;
        let group = sys.group();
        let mut checks = vec![Vec::new(); w.len()];
        for p in sys.forbidden() {
            let w0_inv = group.inverse(&p.window.elements()[0]);
            let mut seen = HashSet::new();
            for u in w.iter() {
                let g = group.mul(u, &w0_inv);
                if !seen.insert(g.clone()) {
                    continue;
                }
                let placed: Option<Vec<(usize, u32)>> =
                    p.window.iter().zip(&p.letters).map(|(v, &a)| w.position(&group.mul(&g, v)).map(|i| (i, a))).collect();
                if let Some(occ) = placed {
                    let last = occ.iter().map(|&(i, _)| i).max().expect("patterns are nonempty");
                    checks[last].push(occ);
                }
            }
        }
        Ok(PatternEnumerator { k, len: w.len(), checks })
    }

    pub fn alphabet_size(&self) -> u32 {
        self.k
    }

    pub fn window_len(&self) -> usize {
        self.len
    }

    fn ok_at(&self, buf: &[u32], i: usize) -> bool {
        !self.checks[i].iter().any(|occ| occ.iter().all(|&(j, a)| buf[j] == a))
    }

    /// Visits admissible patterns in lexicographic order until `visit` breaks.
    pub fn for_each<F: FnMut(&[u32]) -> ControlFlow<()>>(&self, mut visit: F) {
        let mut buf = vec![0u32; self.len];
        let _ = self.dfs(&mut buf, 0, &mut visit);
    }

    fn dfs<F: FnMut(&[u32]) -> ControlFlow<()>>(&self, buf: &mut Vec<u32>, i: usize, visit: &mut F) -> ControlFlow<()> {
        if i == self.len {
            return visit(buf);
        }
        for a in 0..self.k {
            buf[i] = a;
            if self.ok_at(buf, i) {
                self.dfs(buf, i + 1, visit)?;
            }
        }
        ControlFlow::Continue(())
    }

    pub fn is_admissible(&self, pattern: &[u32]) -> bool {
        pattern.len() == self.len && pattern.iter().all(|&a| a < self.k) && (0..self.len).all(|i| self.ok_at(pattern, i))
    }

    /// All admissible patterns, failing with `TooLarge` beyond `budget`.
    pub fn collect(&self, budget: Option<usize>) -> Result<Vec<Vec<u32>>> {
        let mut out = Vec::new();
        let mut over = false;
        self.for_each(|p| {
            if budget.is_some_and(|b| out.len() >= b) {
                over = true;
                return ControlFlow::Break(());
            }
            out.push(p.to_vec());
            ControlFlow::Continue(())
        });
        if over {
            return Err(Error::TooLarge(format!("more than {} patterns", budget.unwrap_or(0))));
        }
        Ok(out)
    }

    pub fn count(&self) -> BigUint {
        let mut n = BigUint::from(0u32);
        self.for_each(|_| {
            n += 1u32;
            ControlFlow::Continue(())
        });
        n
    }
}

/// Locally admissible patterns on `w`, in lexicographic order of letters
/// listed along the window order.
pub fn enumerate_patterns(sys: &ShiftSystem, w: &FiniteWindow, budget: Option<usize>) -> Result<Vec<Vec<u32>>> {
    PatternEnumerator::new(sys, w)?.collect(budget)
}

/// Number of locally admissible patterns on `w`; `k^|W|` for full shifts.
pub fn count_patterns(sys: &ShiftSystem, w: &FiniteWindow) -> Result<BigUint> {
    let k = sys.finite_alphabet()?.size();
    if sys.is_full() {
        if w.group() != sys.group() {
            return Err(Error::MismatchedOwners);
        }
        return Ok(Pow::pow(BigUint::from(k), w.len()));
    }
    Ok(PatternEnumerator::new(sys, w)?.count())
}
