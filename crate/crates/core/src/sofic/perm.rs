use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation of `0..d` stored as its one-line image array.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn new(images: Vec<u32>) -> Result<Permutation> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &x in &images {
            let x = x as usize;
            if x >= d || seen[x] {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection of 0..{d}")));
            }
            seen[x] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(d: usize) -> Permutation {
        Permutation((0..d as u32).collect())
    }

    /// `v ↦ v + 1 mod d`.
    pub fn cycle(d: usize) -> Permutation {
        Permutation((0..d as u32).map(|v| (v + 1) % d as u32).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn apply(&self, v: usize) -> usize {
        self.0[v] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    /// `self ∘ other`, i.e. `v ↦ self(other(v))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&v| self.0[v as usize]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut out = vec![0u32; self.0.len()];
        for (v, &w) in self.0.iter().enumerate() {
            out[w as usize] = v as u32;
        }
        Permutation(out)
    }

    pub fn fixed_points(&self) -> usize {
        self.0.iter().enumerate().filter(|(v, &w)| *v as u32 == w).count()
    }
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = Error;

    fn try_from(images: Vec<u32>) -> Result<Self> {
        Permutation::new(images)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Vec<u32> {
        p.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn perm(d: usize) -> impl Strategy<Value = Permutation> {
        Just((0..d as u32).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| Permutation::new(v).unwrap())
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        assert_eq!(Permutation::cycle(3).images(), &[1, 2, 0]);
    }

    proptest! {
        #[test]
        fn inverse_composes_to_identity(p in perm(12)) {
            prop_assert_eq!(p.compose(&p.inverse()), Permutation::identity(12));
            prop_assert_eq!(p.inverse().inverse(), p);
        }

        #[test]
        fn composition_is_associative(p in perm(9), q in perm(9), r in perm(9)) {
            prop_assert_eq!(p.compose(&q).compose(&r), p.compose(&q.compose(&r)));
        }
    }
}
