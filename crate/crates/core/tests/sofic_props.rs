mod common;

use common::*;
use meandim::rational::{int, ratio};
use meandim::sofic::{Permutation, SoficMap};
use meandim::{FiniteWindow, Group};
use proptest::prelude::*;

fn perm(d: usize) -> impl Strategy<Value = Permutation> {
    Just((0..d as u32).collect::<Vec<u32>>()).prop_shuffle().prop_map(|v| Permutation::new(v).unwrap())
}

fn symmetric(f: &FiniteWindow) -> FiniteWindow {
    f.union(&f.inverse()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn homomorphisms_are_multiplicative(
        d in 1usize..40,
        side in 1usize..7,
        a in perm(9),
        b in perm(9),
        f in raw_window(6, 3),
    ) {
        let z = Group::integers();
        let z2 = Group::lattice(2).unwrap();
        let f2 = Group::free(2).unwrap();
        let maps = [
            (SoficMap::from_cyclic(&z, d).unwrap(), window(&z, &f)),
            (SoficMap::from_torus(&z2, side).unwrap(), window(&z2, &f)),
            (SoficMap::from_homomorphism(&f2, vec![a, b]).unwrap(), window(&f2, &f)),
        ];
        for (sigma, w) in maps {
            let report = sigma.goodness(&w, &ratio(1, 2)).unwrap();
            prop_assert_eq!(report.multiplicativity, int(1));
            prop_assert!(report.separation >= int(0) && report.separation <= int(1));
            prop_assert!(report.good_set.iter().all(|&v| v < sigma.d()));
        }
    }

    #[test]
    fn extension_rules(seed in any::<u64>(), d in 1usize..30, gi in 0usize..8, w in raw_word(6)) {
        let g = &groups()[gi];
        let sigma = SoficMap::from_random(g, d, seed).unwrap();
        for p in sigma.positive_images() {
            let mut images = p.images().to_vec();
            images.sort_unstable();
            prop_assert_eq!(images, (0..d as u32).collect::<Vec<_>>());
        }
        prop_assert_eq!(sigma.permutation(&g.identity()), Permutation::identity(d));
        for (i, s) in g.generators().iter().enumerate() {
            let inv = &g.generators()[g.generator_inverse(i)];
            prop_assert_eq!(sigma.permutation(inv), sigma.permutation(s).inverse());
        }
        // a word acts as the composition of its letters, rightmost first
        let x = element(g, &w);
        let word = g.word(&x);
        let composed = word.iter().fold(Permutation::identity(d), |acc, &i| acc.compose(&sigma.permutation(&g.generators()[i])));
        prop_assert_eq!(sigma.permutation(&x), composed);
    }

    #[test]
    fn good_set_matches_a_pointwise_recheck(seed in any::<u64>(), d in 1usize..300, f in raw_window(6, 3), vs in proptest::collection::vec(any::<usize>(), 100)) {
        let f2 = Group::free(2).unwrap();
        let sigma = SoficMap::from_random(&f2, d, seed).unwrap();
        let sym = symmetric(&window(&f2, &f));
        let good = sigma.good_set(&sym);
        let perms: Vec<Permutation> = sym.iter().map(|s| sigma.permutation(s)).collect();
        for v in vs.into_iter().map(|v| v % d) {
            let injective = (0..perms.len()).all(|i| (0..i).all(|j| perms[i].apply(v) != perms[j].apply(v)));
            let inverse = sym.iter().zip(&perms).all(|(s, p)| sigma.permutation(&f2.inverse(s)).apply(v) == p.inverse().apply(v));
            prop_assert_eq!(good.contains(&v), injective && inverse, "v = {}", v);
        }
    }

    #[test]
    fn enlarging_the_window_never_enlarges_the_good_set(seed in any::<u64>(), d in 1usize..200, f in raw_window(5, 3), extra in raw_window(4, 3)) {
        let f2 = Group::free(2).unwrap();
        let sigma = SoficMap::from_random(&f2, d, seed).unwrap();
        let small = window(&f2, &f);
        let big = small.union(&window(&f2, &extra)).unwrap();
        let tau = ratio(1, 3);
        let a = sigma.goodness(&small, &tau).unwrap().good_set;
        let b = sigma.goodness(&big, &tau).unwrap().good_set;
        prop_assert!(b.iter().all(|v| a.contains(v)));
    }

    #[test]
    fn random_maps_are_reproducible(seed in any::<u64>(), d in 1usize..50) {
        let f2 = Group::free(2).unwrap();
        let a = SoficMap::from_random(&f2, d, seed).unwrap();
        let b = SoficMap::from_random(&f2, d, seed).unwrap();
        prop_assert_eq!(a.positive_images(), b.positive_images());
    }
}
