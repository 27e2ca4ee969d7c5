//! Maps `σ: Γ → Sym(d)` given on generators and extended along normal
//! forms, with an audit of how close they come to a sofic approximation.
//!
//! Points of `[d]` are indexed `0..d`. Composition follows `σ_{st} = σ_s ∘ σ_t`
//! for homomorphic constructions; for arbitrary generator images the
//! extension of a word `x1 x2 ... xk` is `σ_{x1} ∘ ... ∘ σ_{xk}` and the
//! multiplicativity defect is measured, never assumed.

mod perm;
pub mod quotient;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteWindow, Group, GroupElement};
use crate::rational::{int, Rational};

pub use perm::Permutation;

/// How a map was produced; echoed into reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum Provenance {
    Cyclic,
    Torus { side: usize },
    Homomorphism,
    Random { seed: u64 },
    RegularAction { degree: usize },
}

#[derive(Clone, Debug)]
pub struct SoficMap {
    group: Group,
    d: usize,
    /// one permutation per symmetric generator
    images: Vec<Permutation>,
    provenance: Provenance,
}

impl SoficMap {
    /// Assembles a map from images of the positive generators; inverse
    /// generators receive the inverse permutations.
    pub fn from_generator_images(group: &Group, positive_images: Vec<Permutation>, provenance: Provenance) -> Result<SoficMap> {
        let positive = group.positive_generators();
        if positive_images.len() != positive.len() {
            return Err(Error::Precondition(format!(
                "expected {} generator images, got {}",
                positive.len(),
                positive_images.len()
            )));
        }
        let d = positive_images.first().map(Permutation::len).unwrap_or(1);
        if d == 0 {
            return Err(Error::OutOfRange("d must be at least 1".into()));
        }
        for p in &positive_images {
            if p.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: p.len() });
            }
        }
        let mut images: Vec<Option<Permutation>> = vec![None; group.generators().len()];
        for (&idx, p) in positive.iter().zip(positive_images) {
            let inv = group.generator_inverse(idx);
            if inv == idx && p.compose(&p) != Permutation::identity(d) {
                return Err(Error::InvalidPermutation(
                    "an involutive generator needs an involutive image".into(),
                ));
            }
            images[inv] = Some(p.inverse());
            images[idx] = Some(p);
        }
        let images = images.into_iter().map(|p| p.expect("every generator is assigned")).collect();
        Ok(SoficMap { group: group.clone(), d, images, provenance })
    }

    /// `Z → Sym(d)`, generator `↦ v ↦ v+1 mod d`.
    pub fn from_cyclic(group: &Group, d: usize) -> Result<SoficMap> {
        if !group.is_integers() {
            return Err(Error::UnsupportedGroup("cyclic maps are defined on Z".into()));
        }
        if d == 0 {
            return Err(Error::OutOfRange("d must be at least 1".into()));
        }
        Self::from_generator_images(group, vec![Permutation::cycle(d)], Provenance::Cyclic)
    }

    /// `Z^k → Sym(n^k)`, the product of cyclic shifts on the discrete torus.
    pub fn from_torus(group: &Group, side: usize) -> Result<SoficMap> {
        let k = group
            .lattice_dim()
            .ok_or_else(|| Error::UnsupportedGroup("torus maps are defined on lattices".into()))?;
        if side == 0 {
            return Err(Error::OutOfRange("torus side must be at least 1".into()));
        }
        let d = side.checked_pow(k as u32).ok_or_else(|| Error::TooLarge("torus too large".into()))?;
        let images = (0..k)
            .map(|axis| {
                let stride = side.pow(axis as u32);
                let images = (0..d)
                    .map(|v| {
                        let c = (v / stride) % side;
                        let shifted = (c + 1) % side;
                        (v + shifted * stride - c * stride) as u32
                    })
                    .collect();
                Permutation::new(images)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_generator_images(group, images, Provenance::Torus { side })
    }

    /// A homomorphism from a free group, one permutation per free generator.
    pub fn from_homomorphism(group: &Group, images: Vec<Permutation>) -> Result<SoficMap> {
        if !group.is_free() {
            return Err(Error::UnsupportedGroup("homomorphisms are specified on free groups".into()));
        }
        Self::from_generator_images(group, images, Provenance::Homomorphism)
    }

    /// Uniformly random generator images from a seeded ChaCha8 stream
    /// (Fisher-Yates). Involutive generators get random involutions.
    pub fn from_random(group: &Group, d: usize, seed: u64) -> Result<SoficMap> {
        if d == 0 {
            return Err(Error::OutOfRange("d must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut images = Vec::new();
        for &idx in group.positive_generators() {
            let mut points: Vec<u32> = (0..d as u32).collect();
            points.shuffle(&mut rng);
            if group.generator_inverse(idx) == idx {
                let mut invol: Vec<u32> = (0..d as u32).collect();
                for pair in points.chunks_exact(2) {
                    invol[pair[0] as usize] = pair[1];
                    invol[pair[1] as usize] = pair[0];
                }
                images.push(Permutation::new(invol)?);
            } else {
                images.push(Permutation::new(points)?);
            }
        }
        Self::from_generator_images(group, images, Provenance::Random { seed })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Image of the symmetric generator with index `i`.
    pub fn generator_image(&self, i: usize) -> &Permutation {
        &self.images[i]
    }

    pub fn positive_images(&self) -> Vec<&Permutation> {
        self.group.positive_generators().iter().map(|&i| &self.images[i]).collect()
    }

    /// `σ_g(v)`, composing generator images along the normal form of `g`.
    pub fn apply(&self, g: &GroupElement, v: usize) -> usize {
        let word = self.group.word(g);
        self.apply_word(&word, v)
    }

    fn apply_word(&self, word: &[usize], v: usize) -> usize {
        word.iter().rev().fold(v, |acc, &i| self.images[i].apply(acc))
    }

    /// The full permutation `σ_g`.
    pub fn permutation(&self, g: &GroupElement) -> Permutation {
        let word = self.group.word(g);
        let mut out = Permutation::identity(self.d);
        for &i in &word {
            out = out.compose(&self.images[i]);
        }
        out
    }

    fn check_owner(&self, f: &FiniteWindow) -> Result<()> {
        if *f.group() != self.group {
            return Err(Error::MismatchedOwners);
        }
        Ok(())
    }

    /// Measures multiplicativity and separation on `F` and extracts the good
    /// set `ℬ` of points where `F ∪ F^{-1}` acts injectively and inverses
    /// are respected.
    pub fn goodness(&self, f: &FiniteWindow, tau: &Rational) -> Result<GoodnessReport> {
        self.check_owner(f)?;
        if *tau <= int(0) || *tau >= int(1) {
            return Err(Error::OutOfRange("tau must lie in (0, 1)".into()));
        }
        let d = self.d;
        let perms: Vec<Permutation> = f.iter().map(|s| self.permutation(s)).collect();

        let pairs: Vec<(usize, usize)> = (0..f.len()).flat_map(|i| (0..f.len()).map(move |j| (i, j))).collect();
        let mult_min = pairs
            .par_iter()
            .map(|&(i, j)| {
                let st = self.permutation(&self.group.mul(&f.elements()[i], &f.elements()[j]));
                (0..d).filter(|&v| perms[i].apply(perms[j].apply(v)) == st.apply(v)).count()
            })
            .min()
            .unwrap_or(d);
        let sep_min = pairs
            .par_iter()
            .filter(|(i, j)| i < j)
            .map(|&(i, j)| (0..d).filter(|&v| perms[i].apply(v) != perms[j].apply(v)).count())
            .min()
            .unwrap_or(d);

        let sym = f.union(&f.inverse())?;
        let good_set = self.good_set(&sym);
        let threshold = good_set_threshold(tau, f.len(), d);
        let threshold_met = Rational::from_integer(good_set.len().into()) >= threshold;
        Ok(GoodnessReport {
            window: f.format(),
            d,
            multiplicativity: Rational::new(mult_min.into(), d.into()),
            separation: Rational::new(sep_min.into(), d.into()),
            good_set,
            threshold,
            threshold_met,
        })
    }

    /// Points `v` with `σ_s(v) ≠ σ_t(v)` for distinct `s, t` in `sym` and
    /// `σ_{s^{-1}}(v) = σ_s^{-1}(v)` for every `s` in `sym`.
    pub fn good_set(&self, sym: &FiniteWindow) -> Vec<usize> {
        let perms: Vec<Permutation> = sym.iter().map(|s| self.permutation(s)).collect();
        let inverse_pos: Vec<usize> = sym
            .iter()
            .map(|s| sym.position(&self.group.inverse(s)).expect("window is symmetric"))
            .collect();
        (0..self.d)
            .into_par_iter()
            .filter(|&v| {
                let mut images: Vec<usize> = perms.iter().map(|p| p.apply(v)).collect();
                let inverse_ok = perms
                    .iter()
                    .zip(&inverse_pos)
                    .all(|(p, &k)| p.apply(perms[k].apply(v)) == v);
                images.sort_unstable();
                inverse_ok && images.windows(2).all(|w| w[0] != w[1])
            })
            .collect()
    }
}

/// `(1 - τ / (2(|F|+1))) d`, the size the tiling lemma needs from `ℬ`.
pub fn good_set_threshold(tau: &Rational, window_len: usize, d: usize) -> Rational {
    let denom = Rational::from_integer((2 * (window_len + 1)).into());
    (int(1) - tau / denom) * Rational::from_integer(d.into())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodnessReport {
    pub window: Vec<String>,
    pub d: usize,
    #[serde(with = "crate::rational::serde_rational")]
    pub multiplicativity: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub separation: Rational,
    pub good_set: Vec<usize>,
    #[serde(with = "crate::rational::serde_rational")]
    pub threshold: Rational,
    pub threshold_met: bool,
}
