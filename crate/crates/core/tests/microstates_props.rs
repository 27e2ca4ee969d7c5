use meandim::microstates::{
    count_separated_microstates, is_member, map_lowerbound_check, pullback, sup_distance_matrix, Microstate,
    MicrostateSpaceSpec, Verdict,
};
use meandim::rational::{int, ratio};
use meandim::sofic::SoficMap;
use meandim::spaces::{Configuration, PseudometricSpec, ShiftSystem};
use meandim::{FiniteWindow, Group, Rational};
use proptest::prelude::*;

fn spec(sys: ShiftSystem, rho: PseudometricSpec, hi: i64, delta: Rational, d: usize) -> MicrostateSpaceSpec {
    let z = Group::integers();
    let f = FiniteWindow::interval(&z, 0, hi).unwrap();
    MicrostateSpaceSpec::new(sys, rho, f, delta, SoficMap::from_cyclic(&z, d).unwrap()).unwrap()
}

fn full() -> ShiftSystem {
    ShiftSystem::full_shift(&Group::integers(), 2).unwrap()
}

/// A pullback with some letters of some points flipped.
fn perturbed(s: &MicrostateSpaceSpec, omega: &[u32], flips: &[(usize, usize)]) -> Microstate {
    let base = pullback(s, omega).unwrap();
    let mut points: Vec<Configuration> = base.points().to_vec();
    let n = points.len();
    for &(v, i) in flips {
        let x = &points[v % n];
        let mut letters = x.letters().to_vec();
        let i = i % letters.len();
        letters[i] ^= 1;
        points[v % n] = Configuration::new(x.support().clone(), letters, x.tail()).unwrap();
    }
    Microstate::new(points).unwrap()
}

fn deltas() -> impl Strategy<Value = Rational> {
    (0i64..=8).prop_map(|k| ratio(k, 8))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distinct_labelings_give_separated_pullbacks(d in 1usize..12, a in any::<u32>(), b in any::<u32>(), induced in any::<bool>()) {
        let mask = (1u32 << d) - 1;
        let (a, b) = (a & mask, b & mask);
        prop_assume!(a != b);
        let rho = if induced { PseudometricSpec::induced(3) } else { PseudometricSpec::disc() };
        let s = spec(full(), rho, 1, int(0), d);
        let bits = |x: u32| (0..d).map(|v| x >> v & 1).collect::<Vec<u32>>();
        let pair = [pullback(&s, &bits(a)).unwrap(), pullback(&s, &bits(b)).unwrap()];
        let dist = sup_distance_matrix(&s, &pair);
        prop_assert!(dist[0][1] > int(0));
        if !induced {
            prop_assert_eq!(dist[0][1].clone(), int(1));
        }
    }

    #[test]
    fn membership_grows_with_delta(
        d in 1usize..10,
        omega in proptest::collection::vec(0u32..2, 10),
        flips in proptest::collection::vec((any::<usize>(), any::<usize>()), 0..4),
        d1 in deltas(),
        d2 in deltas(),
        induced in any::<bool>(),
    ) {
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let rho = || if induced { PseudometricSpec::induced(2) } else { PseudometricSpec::disc() };
        let s_lo = spec(full(), rho(), 1, lo, d);
        let s_hi = spec(full(), rho(), 1, hi, d);
        let phi = perturbed(&s_lo, &omega[..d], &flips);
        let a = is_member(&s_lo, &phi).unwrap().verdict;
        let b = is_member(&s_hi, &phi).unwrap().verdict;
        if a == Verdict::Yes {
            prop_assert_eq!(b, Verdict::Yes);
        }
        if b == Verdict::No {
            prop_assert_eq!(a, Verdict::No);
        }
    }

    #[test]
    fn certified_members_satisfy_the_counting_lemma(
        d in 1usize..12,
        omega in proptest::collection::vec(0u32..2, 12),
        flips in proptest::collection::vec((any::<usize>(), any::<usize>()), 0..3),
        delta in deltas(),
        hi in 1i64..=2,
    ) {
        let s = spec(full(), PseudometricSpec::disc(), hi, delta.clone(), d);
        let phi = perturbed(&s, &omega[..d], &flips);
        if is_member(&s, &phi).unwrap().verdict == Verdict::Yes {
            let check = map_lowerbound_check(&s, &phi).unwrap();
            prop_assert_eq!(check.verdict, Verdict::Yes);
            let required = (int(1) - &delta) * int(d as i64);
            prop_assert!(check.rows.iter().all(|r| int(r.certain as i64) >= required));
        } else {
            prop_assert!(map_lowerbound_check(&s, &phi).is_err());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn counts_fall_with_eps_and_rise_with_budget(
        d in 1usize..7,
        golden in any::<bool>(),
        e1 in 1i64..=8,
        e2 in 1i64..=8,
        b1 in 1usize..200,
        b2 in 1usize..200,
    ) {
        let sys = if golden { ShiftSystem::golden_mean() } else { full() };
        let s = spec(sys, PseudometricSpec::induced(3), 1, ratio(1, 2), d);
        let (small, large) = if e1 <= e2 { (ratio(e1, 8), ratio(e2, 8)) } else { (ratio(e2, 8), ratio(e1, 8)) };
        let budget = 1 << 12;
        let a = count_separated_microstates(&s, &small, budget).unwrap();
        let b = count_separated_microstates(&s, &large, budget).unwrap();
        prop_assert!(a.count >= b.count, "ε {} gives {} but ε {} gives {}", small, a.count, large, b.count);
        let (lo, hi) = (b1.min(b2), b1.max(b2));
        // a subshift whose finite model outgrows the budget is refused
        let x = match count_separated_microstates(&s, &small, lo) {
            Ok(x) => x,
            Err(meandim::Error::TooLarge(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let y = count_separated_microstates(&s, &small, hi).unwrap();
        prop_assert!(x.count <= y.count, "budget {} gives {} but {} gives {}", lo, x.count, hi, y.count);
        prop_assert!(y.count <= a.count);
    }
}
