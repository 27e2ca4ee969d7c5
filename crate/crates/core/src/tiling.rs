//! Greedy quasi-tilings of `[d]` by approximate translates `σ(F_k) c_k`
//! and an independent verifier of their guarantees.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteWindow, GroupElement};
use crate::rational::{fmt_rational, int, Rational};
use crate::sofic::{good_set_threshold, SoficMap};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tile {
    pub shape: Vec<GroupElement>,
    pub center: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tiling {
    pub tiles: Vec<Tile>,
    pub d: usize,
    /// sorted points of `[d]` outside every tile
    pub leftover: Vec<usize>,
}

impl Tiling {
    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn covered(&self) -> usize {
        self.d - self.leftover.len()
    }

    pub fn coverage(&self) -> Rational {
        Rational::new(BigInt::from(self.covered()), BigInt::from(self.d))
    }

    pub fn to_report(&self, sigma: &SoficMap) -> TilingReport {
        let group = sigma.group();
        TilingReport {
            ell: self.tiles.len(),
            tiles: self
                .tiles
                .iter()
                .map(|t| TileReport { shape: t.shape.iter().map(|g| group.format(g)).collect(), center: t.center })
                .collect(),
            covered: self.covered(),
            d: self.d,
            coverage: fmt_rational(&self.coverage()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileReport {
    pub shape: Vec<String>,
    pub center: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingReport {
    pub ell: usize,
    pub tiles: Vec<TileReport>,
    pub covered: usize,
    pub d: usize,
    pub coverage: String,
}

#[derive(Clone, Debug)]
pub struct TileParams {
    pub tau: Rational,
    pub eta: Rational,
    /// Skip the cardinality and good-set precondition checks. Guarantees are
    /// then only reported by [`verify_tiling`], never implied.
    pub permissive: bool,
}

impl TileParams {
    pub fn new(tau: Rational, eta: Rational) -> Self {
        TileParams { tau, eta, permissive: false }
    }
}

/// `(1 - η/(|F|+1)) d`, the size required of the center set `𝒲`.
pub fn center_set_threshold(eta: &Rational, window_len: usize, d: usize) -> Rational {
    let denom = Rational::from_integer(BigInt::from(window_len + 1));
    (int(1) - eta / denom) * Rational::from_integer(BigInt::from(d))
}

fn sorted_unique(set: &[usize], d: usize) -> Result<Vec<usize>> {
    let mut v = set.to_vec();
    v.sort_unstable();
    v.dedup();
    if v.last().is_some_and(|&x| x >= d) {
        return Err(Error::OutOfRange("point outside [d]".into()));
    }
    Ok(v)
}

/// `2 |F'| >= τ |F|` without rounding.
fn shape_large_enough(shape_len: usize, window_len: usize, tau: &Rational) -> bool {
    Rational::from_integer(BigInt::from(2 * shape_len)) >= tau * Rational::from_integer(BigInt::from(window_len))
}

/// Greedy maximal quasi-tiling: candidate centers `c ∈ ℬ ∩ 𝒲` are visited
/// once in ascending order and `(F', c)` with `F' = {s ∈ F : σ_s(c)
/// uncovered}` is accepted when `|F'| ≥ τ|F|/2`. Coverage only grows, so a
/// rejected candidate stays rejected and one pass yields a maximal family.
pub fn tile(
    sigma: &SoficMap,
    f: &FiniteWindow,
    params: &TileParams,
    good: &[usize],
    centers: &[usize],
) -> Result<Tiling> {
    if *f.group() != *sigma.group() {
        return Err(Error::MismatchedOwners);
    }
    let (tau, eta) = (&params.tau, &params.eta);
    if *tau <= int(0) || *tau >= int(1) {
        return Err(Error::OutOfRange("tau must lie in (0, 1)".into()));
    }
    if *eta < int(0) || *eta >= int(1) {
        return Err(Error::OutOfRange("eta must lie in [0, 1)".into()));
    }
    let d = sigma.d();
    let good = sorted_unique(good, d)?;
    let centers = sorted_unique(centers, d)?;
    if !params.permissive {
        let need_b = good_set_threshold(tau, f.len(), d);
        if Rational::from_integer(BigInt::from(good.len())) < need_b {
            return Err(Error::Precondition(format!(
                "|B| = {} is below (1 - tau/(2(|F|+1)))d = {}",
                good.len(),
                fmt_rational(&need_b)
            )));
        }
        let need_w = center_set_threshold(eta, f.len(), d);
        if Rational::from_integer(BigInt::from(centers.len())) < need_w {
            return Err(Error::Precondition(format!(
                "|W| = {} is below (1 - eta/(|F|+1))d = {}",
                centers.len(),
                fmt_rational(&need_w)
            )));
        }
        let sym = f.union(&f.inverse())?;
        let really_good = sigma.good_set(&sym);
        if let Some(v) = good.iter().find(|v| really_good.binary_search(v).is_err()) {
            return Err(Error::Precondition(format!("point {v} of B violates the separation/inverse conditions")));
        }
    }
    let candidates: Vec<usize> = good.iter().copied().filter(|c| centers.binary_search(c).is_ok()).collect();
    if candidates.is_empty() {
        return Err(Error::Precondition("B ∩ W is empty".into()));
    }

    let perms: Vec<_> = f.iter().map(|s| sigma.permutation(s)).collect();
    let mut covered = vec![false; d];
    let mut tiles = Vec::new();
    for &c in &candidates {
        let free: Vec<usize> = (0..f.len()).filter(|&i| !covered[perms[i].apply(c)]).collect();
        if free.is_empty() || !shape_large_enough(free.len(), f.len(), tau) {
            continue;
        }
        let mut shape = Vec::with_capacity(free.len());
        for &i in &free {
            let v = perms[i].apply(c);
            // without the good-set check two shape elements may collide at c
            if covered[v] {
                continue;
            }
            covered[v] = true;
            shape.push(f.elements()[i].clone());
        }
        tiles.push(Tile { shape, center: c });
    }
    let leftover = (0..d).filter(|&v| !covered[v]).collect();
    Ok(Tiling { tiles, d, leftover })
}

/// Why a tiling failed verification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum TilingViolation {
    ShapeTooSmall { k: usize, size: usize },
    NotSubset { k: usize, element: String },
    RepeatedElement { k: usize, element: String },
    CenterOutOfRange { k: usize, center: usize },
    CenterNotAllowed { k: usize, center: usize },
    Overlap { k: usize, k2: usize, v: usize },
    Coverage { covered: usize, required: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingVerdict {
    pub pass: bool,
    pub violations: Vec<TilingViolation>,
    pub covered: usize,
}

/// Rechecks the tiling guarantees from scratch: shape sizes `|F_k| ≥ τ|F|/2`,
/// `F_k ⊆ F`, centers in range (and in `𝒲` when given), pairwise
/// disjointness of `σ(F_k) c_k` and coverage `≥ (1 - τ - η) d`. Tile images
/// are recomputed element by element along normal forms, independently of
/// how [`tile`] cached permutations.
pub fn verify_tiling(
    t: &Tiling,
    sigma: &SoficMap,
    f: &FiniteWindow,
    tau: &Rational,
    eta: &Rational,
    centers: Option<&[usize]>,
) -> TilingVerdict {
    let d = sigma.d();
    let mut violations = Vec::new();
    let group = sigma.group();

    let per_tile: Vec<(Vec<TilingViolation>, Vec<usize>)> = t
        .tiles
        .par_iter()
        .enumerate()
        .map(|(k, tile)| {
            let mut local = Vec::new();
            if !shape_large_enough(tile.shape.len(), f.len(), tau) {
                local.push(TilingViolation::ShapeTooSmall { k, size: tile.shape.len() });
            }
            let mut seen = std::collections::HashSet::new();
            for s in &tile.shape {
                if !f.contains(s) {
                    local.push(TilingViolation::NotSubset { k, element: group.format(s) });
                }
                if !seen.insert(s) {
                    local.push(TilingViolation::RepeatedElement { k, element: group.format(s) });
                }
            }
            if tile.center >= d {
                local.push(TilingViolation::CenterOutOfRange { k, center: tile.center });
                return (local, Vec::new());
            }
            if let Some(w) = centers {
                if !w.contains(&tile.center) {
                    local.push(TilingViolation::CenterNotAllowed { k, center: tile.center });
                }
            }
            let image = tile.shape.iter().map(|s| sigma.apply(s, tile.center)).collect();
            (local, image)
        })
        .collect();

    let mut owner: Vec<Option<usize>> = vec![None; d];
    for (k, (local, image)) in per_tile.into_iter().enumerate() {
        violations.extend(local);
        for v in image {
            match owner[v] {
                Some(k0) => violations.push(TilingViolation::Overlap { k: k0, k2: k, v }),
                None => owner[v] = Some(k),
            }
        }
    }
    let covered = owner.iter().filter(|o| o.is_some()).count();
    let required = (int(1) - tau - eta) * Rational::from_integer(BigInt::from(d));
    if Rational::from_integer(BigInt::from(covered)) < required {
        violations.push(TilingViolation::Coverage { covered, required: fmt_rational(&required) });
    }
    TilingVerdict { pass: violations.is_empty(), violations, covered }
}

/// Centers `c ∈ ℬ ∩ 𝒲` violating `|σ(F)c ∩ V| > (1 - τ/2)|F|`, where `V`
/// is the union of the tiles. Empty for every maximal tiling.
pub fn maximality_violations(
    t: &Tiling,
    sigma: &SoficMap,
    f: &FiniteWindow,
    tau: &Rational,
    good: &[usize],
    centers: &[usize],
) -> Vec<usize> {
    let mut covered = vec![true; t.d];
    for &v in &t.leftover {
        covered[v] = false;
    }
    let bound = (int(1) - tau / int(2)) * Rational::from_integer(BigInt::from(f.len()));
    let mut out: Vec<usize> = good
        .par_iter()
        .copied()
        .filter(|c| centers.contains(c))
        .filter(|&c| {
            let mut image: Vec<usize> = f.iter().map(|s| sigma.apply(s, c)).collect();
            image.sort_unstable();
            image.dedup();
            let hit = image.iter().filter(|&&v| covered[v]).count();
            Rational::from_integer(BigInt::from(hit)) <= bound
        })
        .collect();
    out.sort_unstable();
    out
}
