mod common;

use common::*;
use meandim::invariants::{
    amplification, naive_eps_entropy, naive_mdim_bracket, orbit_capacity, separated_exact, separated_greedy,
    CylinderSet, WdimOptions, WindowFamily,
};
use meandim::rational::{int, ratio};
use meandim::spaces::{Base, ShiftSystem};
use meandim::{FiniteWindow, Group, Rational};
use proptest::prelude::*;

fn metric(n: usize, weights: &[u8]) -> Vec<Vec<Rational>> {
    let mut w = vec![vec![0u32; n]; n];
    let mut it = weights.iter().cycle();
    for i in 0..n {
        for j in i + 1..n {
            let x = 1 + (*it.next().unwrap() % 9) as u32;
            w[i][j] = x;
            w[j][i] = x;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                w[i][j] = w[i][j].min(w[i][k] + w[k][j]);
            }
        }
    }
    w.iter().map(|r| r.iter().map(|&x| int(x as i64)).collect()).collect()
}

fn brute_separated(dist: &[Vec<Rational>], eps: &Rational) -> usize {
    let n = dist.len();
    (0u32..1 << n)
        .filter(|m| (0..n).all(|i| (0..n).all(|j| i == j || m >> i & 1 == 0 || m >> j & 1 == 0 || dist[i][j] >= *eps)))
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// A binary subshift of `Z` from forbidden words of length 1 to 3.
fn sft() -> impl Strategy<Value = Vec<Vec<u32>>> {
    proptest::collection::vec(proptest::collection::vec(0u32..2, 1..=3), 0..4)
}

fn system(words: &[Vec<u32>]) -> ShiftSystem {
    let refs: Vec<&[u32]> = words.iter().map(Vec::as_slice).collect();
    ShiftSystem::one_dim_sft(2, &refs).unwrap()
}

/// Binary words on states `(a, b)` of two letters. Returns the most `1`s
/// over words of length `n ≥ 2` that extend to a bi-infinite point, or
/// `None` when there is no such word.
fn max_ones_oracle(forbidden: &[Vec<u32>], n: usize) -> Option<usize> {
    let clean = |w: &[u32]| !forbidden.iter().any(|f| w.windows(f.len()).any(|x| x == f.as_slice()));
    let states: Vec<[u32; 2]> = (0..4).map(|s| [s >> 1, s & 1]).collect();
    let ok: Vec<bool> = states.iter().map(|s| clean(s)).collect();
    let edge = |s: usize, t: usize| ok[s] && ok[t] && states[s][1] == states[t][0] && clean(&[states[s][0], states[s][1], states[t][1]]);
    // states with arbitrarily long forward (backward) continuations
    let mut fwd = ok.clone();
    let mut bwd = ok.clone();
    for _ in 0..4 {
        fwd = (0..4).map(|s| fwd[s] && (0..4).any(|t| edge(s, t) && fwd[t])).collect();
        bwd = (0..4).map(|t| bwd[t] && (0..4).any(|s| edge(s, t) && bwd[s])).collect();
    }
    let ones = |s: usize| (states[s][0] + states[s][1]) as usize;
    let mut best: Vec<Option<usize>> = (0..4).map(|s| bwd[s].then(|| ones(s))).collect();
    for _ in 2..n {
        best = (0..4)
            .map(|t| (0..4).filter(|&s| edge(s, t)).filter_map(|s| best[s]).max().map(|b| b + states[t][1] as usize))
            .collect();
    }
    (0..4).filter(|&s| fwd[s]).filter_map(|s| best[s]).max()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn greedy_is_sandwiched(n in 1usize..=10, weights in proptest::collection::vec(any::<u8>(), 45), e in 1i64..=12) {
        let dist = metric(n, &weights);
        let eps = ratio(e, 2);
        let exact = separated_exact(&dist, &eps).unwrap();
        prop_assert_eq!(exact, brute_separated(&dist, &eps));
        let exact2 = separated_exact(&dist, &(&eps * int(2))).unwrap();
        let (greedy, _) = separated_greedy(&dist, &eps);
        prop_assert!(exact2 <= greedy && greedy <= exact);
    }

    #[test]
    fn more_windows_never_raise_the_entropy_bound(forbidden in sft(), base in proptest::collection::btree_set(1usize..10, 1..4), extra in proptest::collection::btree_set(1usize..12, 1..4), eps in prop::sample::select(vec![ratio(1, 2), int(1)])) {
        let sys = system(&forbidden);
        prop_assume!(max_ones_oracle(&forbidden, 2).is_some());
        let z = Group::integers();
        let fam = |ns: &std::collections::BTreeSet<usize>| {
            WindowFamily::new(ns.iter().map(|&n| (format!("interval:{n}"), FiniteWindow::interval(&z, 0, n as i64 - 1).unwrap())).collect()).unwrap()
        };
        let small = fam(&base);
        let big = small.extended(&fam(&extra)).unwrap();
        let a = naive_eps_entropy(&sys, &Base::Disc, &eps, &small).unwrap();
        let b = naive_eps_entropy(&sys, &Base::Disc, &eps, &big).unwrap();
        prop_assert!(b.upper <= a.upper);
        prop_assert!(a.is_valid() && b.is_valid());
    }

    #[test]
    fn orbit_capacity_matches_the_dp_oracle(forbidden in sft(), n in 2usize..=20, letter in 0u32..2) {
        let Some(_) = max_ones_oracle(&forbidden, n) else { return Ok(()) };
        let sys = system(&forbidden);
        let z = Group::integers();
        let fam = WindowFamily::parse(&z, &format!("interval:{n}")).unwrap();
        let b = orbit_capacity(&sys, &CylinderSet::letter_at_identity(&z, letter), &fam, 1 << 20).unwrap();
        // visits to [x_e = 0] are counted by flipping the letters of the shift
        let flipped: Vec<Vec<u32>> = forbidden.iter().map(|w| w.iter().map(|a| a ^ letter ^ 1).collect()).collect();
        let want = max_ones_oracle(&flipped, n).unwrap();
        prop_assert_eq!(b.upper.clone(), ratio(want as i64, n as i64));
        prop_assert!(b.is_valid(), "{}", b);
    }

    #[test]
    fn finite_alphabets_have_zero_mean_dimension(forbidden in sft(), hi in 1usize..12, e in 1i64..8) {
        prop_assume!(max_ones_oracle(&forbidden, 2).is_some());
        let z = Group::integers();
        let b = naive_mdim_bracket(&system(&forbidden), &ratio(e, 8), &WindowFamily::intervals(&z, 1, hi).unwrap(), &WdimOptions::default()).unwrap();
        prop_assert!(b.lower == int(0) && b.upper == int(0));
    }

    #[test]
    fn identity_does_not_amplify(gi in 0usize..8, windows in proptest::collection::vec(raw_window(5, 3), 1..4)) {
        let g = &groups()[gi];
        let fam = WindowFamily::new(windows.iter().enumerate().map(|(i, w)| (format!("w{i}"), window(g, w))).collect()).unwrap();
        let b = amplification(&FiniteWindow::identity(g), &fam).unwrap();
        prop_assert!(b.rows.iter().all(|r| r.value == int(1)));
        prop_assert!(b.is_valid());
    }
}

#[test]
fn dp_oracle_on_known_shifts() {
    assert_eq!(max_ones_oracle(&[vec![1, 1]], 20), Some(10));
    assert_eq!(max_ones_oracle(&[vec![1, 0]], 7), Some(7));
    assert_eq!(max_ones_oracle(&[vec![1]], 5), Some(0));
    // 0 and 1 both forbidden: the shift is empty
    assert_eq!(max_ones_oracle(&[vec![0], vec![1]], 3), None);
    // only 01 and 10 are allowed pairs: period-two points
    assert_eq!(max_ones_oracle(&[vec![0, 0], vec![1, 1]], 9), Some(5));
    // 1 may appear only as an isolated transient, which never extends both ways
    assert_eq!(max_ones_oracle(&[vec![1, 0], vec![0, 1], vec![1, 1]], 4), Some(0));
}
