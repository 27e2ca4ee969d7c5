//! Exact homomorphisms `F_k → Sym(d)` obtained from finite quotients.
//!
//! A tuple of small permutations `x_1..x_k` of some set generates a finite
//! group `H`; left multiplication on `H` gives the regular action, which is
//! the coset action of the kernel (an index-`|H|` subgroup of `F_k`). When
//! no nontrivial word of length `≤ 2r` dies in `H`, every point is good for
//! the ball `B_r`.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Permutation, Provenance, SoficMap};
use crate::error::{Error, Result};
use crate::group::Group;

/// The regular action of `⟨generators⟩` on itself, as a homomorphism from
/// the free group of rank `generators.len()`. Fails with `TooLarge` when the
/// generated group exceeds `cap` elements.
pub fn regular_action(generators: &[Permutation], cap: usize) -> Result<SoficMap> {
    if generators.is_empty() {
        return Err(Error::Precondition("need at least one generator".into()));
    }
    let degree = generators[0].len();
    if let Some(p) = generators.iter().find(|p| p.len() != degree) {
        return Err(Error::DimensionMismatch { expected: degree, found: p.len() });
    }
    let mut elements = vec![Permutation::identity(degree)];
    let mut index: HashMap<Permutation, usize> = HashMap::from([(elements[0].clone(), 0)]);
    let mut k = 0;
    while k < elements.len() {
        for x in generators {
            let y = x.compose(&elements[k]);
            if !index.contains_key(&y) {
                if elements.len() == cap {
                    return Err(Error::TooLarge(format!("generated group exceeds {cap} elements")));
                }
                index.insert(y.clone(), elements.len());
                elements.push(y);
            }
        }
        k += 1;
    }
    let images = generators
        .iter()
        .map(|x| {
            let images = elements.iter().map(|h| index[&x.compose(h)] as u32).collect();
            Permutation::new(images)
        })
        .collect::<Result<Vec<_>>>()?;
    let group = Group::free(generators.len())?;
    SoficMap::from_generator_images(&group, images, Provenance::RegularAction { degree })
}

/// The permutation of the projective line `P^1(F_p)` (points `0..p-1` and
/// `∞ = p`) induced by the matrix `[[a, b], [c, d]]`. Requires `p` prime and
/// a nonzero determinant.
pub fn projective_line_permutation(p: u64, m: [u64; 4]) -> Result<Permutation> {
    let [a, b, c, d] = m.map(|x| x % p);
    if (a * d + p * p - b * c) % p == 0 {
        return Err(Error::Precondition("singular matrix".into()));
    }
    let inv = |x: u64| pow_mod(x, p - 2, p);
    let images = (0..=p)
        .map(|z| {
            // z ↦ (a z + b) / (c z + d)
            let (num, den) = if z == p { (a, c) } else { ((a * z + b) % p, (c * z + d) % p) };
            if den == 0 { p as u32 } else { (num * inv(den) % p) as u32 }
        })
        .collect();
    Permutation::new(images)
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Draws a seeded homomorphism `F_2 → Sym(d)` with `d` in `[min_d, max_d]`
/// whose regular action is injective on the ball of radius `2r` (so the
/// whole of `[d]` is good for `B_r`).
///
/// Candidates are random generator pairs of `S_6` and of `PSL(2, p)` /
/// `PGL(2, p)` acting on projective lines for `p ∈ {7, 11, 13}`; the first
/// candidate meeting both conditions is returned.
pub fn sample_free_quotient(seed: u64, r: usize, min_d: usize, max_d: usize) -> Result<SoficMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f2 = Group::free(2)?;
    let check = f2.ball(2 * r);
    for _ in 0..10_000 {
        let gens: Vec<Permutation> = match rng.gen_range(0..4) {
            0 => (0..2)
                .map(|_| {
                    let mut v: Vec<u32> = (0..6).collect();
                    v.shuffle(&mut rng);
                    Permutation::new(v)
                })
                .collect::<Result<_>>()?,
            k => {
                let p = [7u64, 11, 13][k - 1];
                (0..2)
                    .map(|_| loop {
                        let m = [0; 4].map(|_| rng.gen_range(0..p));
                        if let Ok(perm) = projective_line_permutation(p, m) {
                            break Ok(perm);
                        }
                    })
                    .collect::<Result<_>>()?
            }
        };
        let sigma = match regular_action(&gens, max_d) {
            Ok(s) => s,
            Err(Error::TooLarge(_)) => continue,
            Err(e) => return Err(e),
        };
        if sigma.d() < min_d {
            continue;
        }
        // injective on B_{2r}: distinct elements act differently at point 0
        let mut images = std::collections::HashSet::new();
        if check.iter().all(|g| images.insert(sigma.apply(g, 0))) {
            return Ok(sigma);
        }
    }
    Err(Error::TooLarge("no suitable finite quotient found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn symmetric_group_regular_action() {
        let a = Permutation::new(vec![1, 0, 2, 3, 4, 5]).unwrap();
        let b = Permutation::new(vec![1, 2, 3, 4, 5, 0]).unwrap();
        let s = regular_action(&[a, b], 1000).unwrap();
        assert_eq!(s.d(), 720);
        let f2 = s.group().clone();
        let rep = s.goodness(&f2.ball(2), &ratio(1, 5)).unwrap();
        assert_eq!(rep.multiplicativity, int(1));
        // a is an involution, so a = a^{-1} at every point
        assert!(rep.good_set.is_empty());
        assert!(regular_action(&[Permutation::cycle(7)], 5).is_err());
    }

    #[test]
    fn projective_line() {
        let p = projective_line_permutation(11, [1, 1, 0, 1]).unwrap();
        assert_eq!(p.apply(3), 4);
        assert_eq!(p.apply(11), 11);
        let q = projective_line_permutation(11, [0, 10, 1, 0]).unwrap();
        assert_eq!(q.apply(0), 11);
        assert!(projective_line_permutation(7, [1, 2, 2, 4]).is_err());
    }

    #[test]
    fn sampled_quotients_are_good_on_balls() {
        for seed in 0..4 {
            let s = sample_free_quotient(seed, 2, 500, 2000).unwrap();
            assert!((500..=2000).contains(&s.d()));
            let f2 = s.group().clone();
            let b2 = f2.ball(2);
            let rep = s.goodness(&b2, &ratio(1, 10)).unwrap();
            assert_eq!(rep.good_set.len(), s.d());
            assert_eq!(rep.separation, int(1));
        }
    }
}
