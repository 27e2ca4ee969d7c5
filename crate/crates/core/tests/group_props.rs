mod common;

use std::collections::{HashSet, VecDeque};

use common::*;
use meandim::group::folner_defect;
use meandim::rational::{int, ratio};
use meandim::{FiniteWindow, Group, GroupElement};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn multiplication_is_associative(gi in 0usize..8, a in raw_word(6), b in raw_word(6), c in raw_word(6)) {
        let g = &groups()[gi];
        let (x, y, z) = (element(g, &a), element(g, &b), element(g, &c));
        prop_assert_eq!(g.mul(&g.mul(&x, &y), &z), g.mul(&x, &g.mul(&y, &z)));
    }

    #[test]
    fn inverses_and_identity(gi in 0usize..8, a in raw_word(8)) {
        let g = &groups()[gi];
        let x = element(g, &a);
        prop_assert!(g.contains(&x));
        prop_assert_eq!(g.inverse(&g.inverse(&x)), x.clone());
        prop_assert_eq!(g.mul(&x, &g.identity()), x.clone());
        prop_assert_eq!(g.mul(&g.identity(), &x), x.clone());
        prop_assert!(g.is_identity(&g.mul(&x, &g.inverse(&x))));
    }

    #[test]
    fn normal_forms_are_unique(gi in 0usize..8, a in raw_word(8)) {
        // re-evaluating the geodesic word of an element returns the same normal form
        let g = &groups()[gi];
        let x = element(g, &a);
        let w = g.word(&x);
        prop_assert_eq!(g.eval_word(&w), x.clone());
        prop_assert_eq!(w.len(), g.length(&x));
        prop_assert!(g.length(&x) <= a.len());
    }

    #[test]
    fn product_windows_associate(gi in 0usize..8, k in raw_window(4, 3), f in raw_window(4, 3), h in raw_window(4, 3)) {
        let g = &groups()[gi];
        let (k, f, h) = (window(g, &k), window(g, &f), window(g, &h));
        let left = FiniteWindow::product(&FiniteWindow::product(&k, &f).unwrap(), &h).unwrap();
        let right = FiniteWindow::product(&k, &FiniteWindow::product(&f, &h).unwrap()).unwrap();
        prop_assert!(left.set_eq(&right));
    }
}

/// Ball sizes by breadth-first search on freely reduced words, kept apart
/// from the library's own enumeration.
fn bfs_free_balls(k: usize, r: usize) -> Vec<usize> {
    let mut seen: HashSet<Vec<i32>> = HashSet::from([Vec::new()]);
    let mut queue = VecDeque::from([Vec::<i32>::new()]);
    let mut sizes = vec![0usize; r + 1];
    while let Some(w) = queue.pop_front() {
        sizes[w.len()] += 1;
        if w.len() == r {
            continue;
        }
        for l in (1..=k as i32).flat_map(|i| [i, -i]) {
            if w.last() == Some(&-l) {
                continue;
            }
            let mut next = w.clone();
            next.push(l);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    (0..=r).map(|i| sizes[..=i].iter().sum()).collect()
}

#[test]
fn free_ball_sizes_match_bfs_and_closed_form() {
    for k in 1..=3usize {
        let g = Group::free(k).unwrap();
        let bfs = bfs_free_balls(k, 6);
        for r in 0..=6usize {
            let size = g.ball(r).len();
            assert_eq!(size, bfs[r], "F_{k} B_{r}");
            let closed = if k == 1 { 2 * r + 1 } else { 1 + 2 * k * ((2 * k - 1).pow(r as u32) - 1) / (2 * k - 2) };
            assert_eq!(size, closed, "F_{k} B_{r}");
        }
    }
}

#[test]
fn ball_elements_have_the_right_length() {
    let g = Group::free(2).unwrap();
    let b = g.ball(4);
    let lengths: HashSet<usize> = b.iter().map(|x| g.length(x)).collect();
    assert_eq!(lengths, (0..=4).collect());
    assert!(b.iter().all(|x| matches!(x, GroupElement::Free(w) if w.windows(2).all(|p| p[0] != -p[1]))));
}

#[test]
fn folner_defects() {
    for dim in 1..=2usize {
        let g = Group::lattice(dim).unwrap();
        let b1 = g.ball(1);
        let defects: Vec<_> = [4, 16, 64]
            .iter()
            .map(|&n| folner_defect(&b1, &FiniteWindow::lattice_box(&g, n).unwrap()).unwrap())
            .collect();
        assert!(defects.windows(2).all(|w| w[1] < w[0]), "Z^{dim}: {defects:?}");
        assert!(defects[2] <= ratio(2 * dim as i64, 64));
    }
    let f2 = Group::free(2).unwrap();
    let b1 = f2.ball(1);
    for r in 0..=8 {
        assert!(folner_defect(&b1, &f2.ball(r)).unwrap() >= int(1), "F2 B_{r}");
    }
}
