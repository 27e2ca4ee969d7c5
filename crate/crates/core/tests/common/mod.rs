#![allow(dead_code)]

use meandim::{FiniteWindow, Group, GroupElement};
use proptest::prelude::*;

pub fn groups() -> Vec<Group> {
    ["free:1", "free:2", "free:3", "lattice:1", "lattice:2", "lattice:3", "cyclic:7", "product:free:2,cyclic:3"]
        .iter()
        .map(|s| Group::new(meandim::GroupSpec::parse_compact(s).unwrap()).unwrap())
        .collect()
}

/// Raw words: each entry picks a symmetric generator modulo the generator count.
pub fn raw_word(max_len: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(0usize..64, 0..=max_len)
}

pub fn element(g: &Group, raw: &[usize]) -> GroupElement {
    let n = g.generators().len();
    let word: Vec<usize> = raw.iter().map(|&i| i % n).collect();
    g.eval_word(&word)
}

pub fn window(g: &Group, raws: &[Vec<usize>]) -> FiniteWindow {
    let mut elems: Vec<GroupElement> = Vec::new();
    for r in raws {
        let x = element(g, r);
        if !elems.contains(&x) {
            elems.push(x);
        }
    }
    if elems.is_empty() {
        elems.push(g.identity());
    }
    FiniteWindow::new(g.clone(), elems).unwrap()
}

pub fn raw_window(max_size: usize, max_len: usize) -> impl Strategy<Value = Vec<Vec<usize>>> {
    proptest::collection::vec(raw_word(max_len), 1..=max_size)
}

/// Rank over Q by dense elimination on exact rationals.
pub fn rational_rank(rows: &[Vec<meandim::Rational>]) -> usize {
    use num_traits::Zero;
    let mut pivots: Vec<(usize, Vec<meandim::Rational>)> = Vec::new();
    for row in rows {
        let mut v = row.clone();
        for (col, p) in &pivots {
            if v[*col].is_zero() {
                continue;
            }
            let f = &v[*col] / &p[*col];
            for (x, y) in v.iter_mut().zip(p) {
                *x -= &f * y;
            }
        }
        if let Some(col) = v.iter().position(|x| !x.is_zero()) {
            pivots.push((col, v));
        }
    }
    pivots.len()
}
