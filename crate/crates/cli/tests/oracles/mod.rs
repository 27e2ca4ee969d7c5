//! Reference computations written independently of the library code paths.

use meandim::rational::Rational;
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Rank over Q by dense Gaussian elimination on exact rationals.
pub fn rational_rank(rows: &[Vec<Rational>]) -> usize {
    let mut pivots: Vec<(usize, Vec<Rational>)> = Vec::new();
    for row in rows {
        let mut v = row.clone();
        for (col, p) in &pivots {
            if v[*col].is_zero() {
                continue;
            }
            let f = &v[*col] / &p[*col];
            for (x, y) in v.iter_mut().zip(p) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        if let Some(col) = v.iter().position(|x| !x.is_zero()) {
            pivots.push((col, v));
        }
    }
    pivots.len()
}

pub fn to_rational(rows: &[Vec<BigInt>]) -> Vec<Vec<Rational>> {
    rows.iter().map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect()
}

/// Determinant over Q by elimination.
pub fn rational_det(m: &[Vec<BigInt>]) -> Rational {
    let mut a = to_rational(m);
    let n = a.len();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c].clone();
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &a[c][c];
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
        }
    }
    det
}

/// Largest ε-separated subset (all pairwise distances ≥ ε) by trying every
/// subset, largest first. Meant for at most ~16 points.
pub fn separated_by_subsets(dist: &[Vec<Rational>], eps: &Rational) -> usize {
    let n = dist.len();
    assert!(n <= 20, "exhaustive oracle only for small spaces");
    let ok: Vec<u32> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && dist[i][j] >= *eps).fold(0u32, |m, j| m | (1 << j)))
        .collect();
    let mut best = 0;
    for mask in 0u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let fine = (0..n).filter(|&i| mask >> i & 1 == 1).all(|i| mask & !(1 << i) & !ok[i] == 0);
        if fine {
            best = size;
        }
    }
    best
}

/// Maximum clique of a graph on at most 64 vertices (adjacency as bitsets).
pub fn max_clique(adj: &[u64]) -> usize {
    fn grow(adj: &[u64], size: usize, cand: u64, best: &mut usize) {
        if cand == 0 {
            *best = (*best).max(size);
            return;
        }
        if size + cand.count_ones() as usize <= *best {
            return;
        }
        let mut rest = cand;
        while rest != 0 {
            if size + rest.count_ones() as usize <= *best {
                return;
            }
            let v = rest.trailing_zeros() as usize;
            rest &= !(1u64 << v);
            grow(adj, size + 1, rest & adj[v], best);
        }
    }
    assert!(adj.len() <= 64);
    let all = if adj.len() == 64 { u64::MAX } else { (1u64 << adj.len()) - 1 };
    let mut best = 0;
    grow(adj, 0, all, &mut best);
    best
}

/// Number of binary words of length `n` without `11`, from powers of the
/// 2×2 transfer matrix.
pub fn golden_words(n: usize) -> BigInt {
    let mut m = [[BigInt::one(), BigInt::one()], [BigInt::one(), BigInt::zero()]];
    let mut acc = [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]];
    let mul = |a: &[[BigInt; 2]; 2], b: &[[BigInt; 2]; 2]| {
        let mut c = [[BigInt::zero(), BigInt::zero()], [BigInt::zero(), BigInt::zero()]];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] = &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
            }
        }
        c
    };
    let mut e = n.saturating_sub(1);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(&acc, &m);
        }
        m = mul(&m, &m);
        e >>= 1;
    }
    if n == 0 {
        return BigInt::one();
    }
    acc.iter().flatten().sum()
}

/// Most `1`s in a golden-mean word of length `n`, by dynamic programming
/// over the last letter.
pub fn golden_max_ones(n: usize) -> usize {
    // (best ending in 0, best ending in 1)
    let mut state = (0usize, 1usize);
    for _ in 1..n {
        state = (state.0.max(state.1), state.0 + 1);
    }
    if n == 0 {
        0
    } else {
        state.0.max(state.1)
    }
}

/// `|B_r|` in the free group of rank 2.
pub fn free_ball(r: u32) -> u64 {
    2 * 3u64.pow(r) - 1
}
