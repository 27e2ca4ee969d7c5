//! Finitely generated groups with an exact word problem.
//!
//! Supported families are free groups, lattices `Z^d`, finite groups given
//! by a multiplication table (or the cyclic shortcut) and direct products of
//! these. Every element has a unique normal form ([`GroupElement`]); the
//! symmetric generating set is ordered `g1, g1^-1, g2, g2^-1, ...` with
//! self-inverse generators listed once.
//!
//! Generators are named by lowercase letters (`a b c d f g ...`, skipping
//! `e`, which always denotes the identity); lattices of dimension at most
//! three use `x y z`. Uppercase letters denote inverses and `^k` raises a
//! letter to an integer power, so `aAb`, `a*a^-1*b` and `a A b` all parse.

mod window;

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use window::{folner_defect, FiniteWindow};

const LETTERS: &[u8] = b"abcdfghijklmnopqrstuvwxyz";
const LATTICE_LETTERS: &[u8] = b"xyz";

/// Serializable description of a group, e.g. `{"kind": "free", "rank": 2}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GroupSpec {
    Free { rank: usize },
    Lattice { dim: usize },
    Cyclic { order: usize },
    /// `table[i][j]` is the index of `i * j`; `generators` are element indices.
    Finite { table: Vec<Vec<usize>>, generators: Vec<usize> },
    Product { factors: Vec<GroupSpec> },
}

impl GroupSpec {
    /// Parses the compact CLI form: `free:2`, `lattice:2` (alias `z:2`),
    /// `cyclic:5`, or `product:free:1,lattice:1`.
    pub fn parse_compact(text: &str) -> Result<GroupSpec> {
        let bad = || Error::InvalidGroup(format!("cannot parse group `{text}`"));
        let t = text.trim();
        if let Some(rest) = t.strip_prefix("product:") {
            let factors = rest
                .split(',')
                .map(GroupSpec::parse_compact)
                .collect::<Result<Vec<_>>>()?;
            return Ok(GroupSpec::Product { factors });
        }
        let (kind, arg) = t.split_once(':').ok_or_else(bad)?;
        let n: usize = arg.trim().parse().map_err(|_| bad())?;
        match kind.trim() {
            "free" => Ok(GroupSpec::Free { rank: n }),
            "lattice" | "z" | "Z" => Ok(GroupSpec::Lattice { dim: n }),
            "cyclic" => Ok(GroupSpec::Cyclic { order: n }),
            _ => Err(bad()),
        }
    }
}

/// Normal form of a group element.
///
/// Free words store letters as `±(i+1)` for generator `i`; lattice vectors
/// store coordinates; finite elements store the table index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupElement {
    Free(Vec<i32>),
    Lattice(Vec<i64>),
    Finite(usize),
    Product(Vec<GroupElement>),
}

#[derive(Debug)]
enum Family {
    Free { rank: usize },
    Lattice { dim: usize },
    Finite(FiniteData),
    Product(Vec<Group>),
}

#[derive(Debug)]
struct FiniteData {
    order: usize,
    table: Option<Vec<Vec<usize>>>,
    identity: usize,
    inverse: Vec<usize>,
    /// shortlex word (symmetric generator indices) per element
    words: Vec<Vec<usize>>,
}

impl FiniteData {
    fn mul(&self, a: usize, b: usize) -> usize {
        match &self.table {
            Some(t) => t[a][b],
            None => (a + b) % self.order,
        }
    }
}

#[derive(Debug)]
struct Inner {
    spec: GroupSpec,
    family: Family,
    /// symmetric generating set in canonical order
    gens: Vec<GroupElement>,
    gen_inverse: Vec<usize>,
    /// index into `gens` of each positive generator
    positive: Vec<usize>,
    names: Vec<char>,
}

/// A finitely generated group with solvable word problem. Cheap to clone.
#[derive(Clone, Debug)]
pub struct Group(Arc<Inner>);

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Eq for Group {}

impl Group {
    pub fn new(spec: GroupSpec) -> Result<Group> {
        let family = match &spec {
            GroupSpec::Free { rank } => {
                if *rank == 0 || *rank > LETTERS.len() {
                    return Err(Error::InvalidGroup(format!("free rank must be in 1..={}", LETTERS.len())));
                }
                Family::Free { rank: *rank }
            }
            GroupSpec::Lattice { dim } => {
                if *dim == 0 || *dim > LETTERS.len() {
                    return Err(Error::InvalidGroup(format!("lattice dimension must be in 1..={}", LETTERS.len())));
                }
                Family::Lattice { dim: *dim }
            }
            GroupSpec::Cyclic { order } => {
                if *order == 0 {
                    return Err(Error::InvalidGroup("cyclic order must be positive".into()));
                }
                let inverse = (0..*order).map(|i| (order - i) % order).collect();
                Family::Finite(FiniteData { order: *order, table: None, identity: 0, inverse, words: Vec::new() })
            }
            GroupSpec::Finite { table, generators } => Family::Finite(validate_table(table, generators)?),
            GroupSpec::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::InvalidGroup("product needs at least one factor".into()));
                }
                Family::Product(factors.iter().cloned().map(Group::new).collect::<Result<_>>()?)
            }
        };
        let mut inner = Inner { spec, family, gens: Vec::new(), gen_inverse: Vec::new(), positive: Vec::new(), names: Vec::new() };
        build_generators(&mut inner)?;
        if let Family::Finite(data) = &mut inner.family {
            data.words = shortlex_words(data, &inner.gens);
            if data.words.iter().filter(|w| w.is_empty()).count() > 1 {
                return Err(Error::InvalidGroup("generators do not generate the finite group".into()));
            }
        }
        Ok(Group(Arc::new(inner)))
    }

    pub fn free(rank: usize) -> Result<Group> {
        Group::new(GroupSpec::Free { rank })
    }

    pub fn lattice(dim: usize) -> Result<Group> {
        Group::new(GroupSpec::Lattice { dim })
    }

    pub fn integers() -> Group {
        Group::lattice(1).expect("Z is valid")
    }

    pub fn cyclic(order: usize) -> Result<Group> {
        Group::new(GroupSpec::Cyclic { order })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.0.spec
    }

    pub fn is_free(&self) -> bool {
        matches!(self.0.family, Family::Free { .. })
    }

    pub fn free_rank(&self) -> Option<usize> {
        match self.0.family {
            Family::Free { rank } => Some(rank),
            _ => None,
        }
    }

    pub fn lattice_dim(&self) -> Option<usize> {
        match self.0.family {
            Family::Lattice { dim } => Some(dim),
            _ => None,
        }
    }

    /// True for `Z`, the only group where the one-dimensional transfer
    /// machinery applies.
    pub fn is_integers(&self) -> bool {
        self.lattice_dim() == Some(1)
    }

    /// Torsion-free and left-orderable: free groups, lattices and their
    /// products. Group rings of these have no zero divisors.
    pub fn is_orderable(&self) -> bool {
        match &self.0.family {
            Family::Free { .. } | Family::Lattice { .. } => true,
            Family::Finite(d) => d.order == 1,
            Family::Product(fs) => fs.iter().all(Group::is_orderable),
        }
    }

    pub fn order(&self) -> Option<usize> {
        match &self.0.family {
            Family::Finite(d) => Some(d.order),
            Family::Product(fs) => fs.iter().map(Group::order).try_fold(1usize, |acc, o| o.map(|o| acc * o)),
            _ => None,
        }
    }

    /// The ordered symmetric generating set.
    pub fn generators(&self) -> &[GroupElement] {
        &self.0.gens
    }

    /// Index (into [`Group::generators`]) of the inverse of generator `i`.
    pub fn generator_inverse(&self, i: usize) -> usize {
        self.0.gen_inverse[i]
    }

    /// Indices of the positive generators, one per named letter.
    pub fn positive_generators(&self) -> &[usize] {
        &self.0.positive
    }

    pub fn identity(&self) -> GroupElement {
        match &self.0.family {
            Family::Free { .. } => GroupElement::Free(Vec::new()),
            Family::Lattice { dim } => GroupElement::Lattice(vec![0; *dim]),
            Family::Finite(d) => GroupElement::Finite(d.identity),
            Family::Product(fs) => GroupElement::Product(fs.iter().map(Group::identity).collect()),
        }
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        *g == self.identity()
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match (&self.0.family, a, b) {
            (Family::Free { .. }, GroupElement::Free(x), GroupElement::Free(y)) => {
                let mut out = x.clone();
                for &l in y {
                    if out.last() == Some(&-l) {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                }
                GroupElement::Free(out)
            }
            (Family::Lattice { .. }, GroupElement::Lattice(x), GroupElement::Lattice(y)) => {
                GroupElement::Lattice(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (Family::Finite(d), GroupElement::Finite(x), GroupElement::Finite(y)) => GroupElement::Finite(d.mul(*x, *y)),
            (Family::Product(fs), GroupElement::Product(x), GroupElement::Product(y)) => {
                GroupElement::Product(fs.iter().zip(x.iter().zip(y)).map(|(f, (p, q))| f.mul(p, q)).collect())
            }
            _ => panic!("group element does not belong to this group"),
        }
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        match (&self.0.family, g) {
            (Family::Free { .. }, GroupElement::Free(x)) => GroupElement::Free(x.iter().rev().map(|l| -l).collect()),
            (Family::Lattice { .. }, GroupElement::Lattice(x)) => GroupElement::Lattice(x.iter().map(|c| -c).collect()),
            (Family::Finite(d), GroupElement::Finite(x)) => GroupElement::Finite(d.inverse[*x]),
            (Family::Product(fs), GroupElement::Product(x)) => {
                GroupElement::Product(fs.iter().zip(x).map(|(f, p)| f.inverse(p)).collect())
            }
            _ => panic!("group element does not belong to this group"),
        }
    }

    /// Checks that `g` is a well-formed normal form of this group.
    pub fn contains(&self, g: &GroupElement) -> bool {
        match (&self.0.family, g) {
            (Family::Free { rank }, GroupElement::Free(x)) => {
                x.iter().all(|l| *l != 0 && l.unsigned_abs() as usize <= *rank) && x.windows(2).all(|w| w[0] != -w[1])
            }
            (Family::Lattice { dim }, GroupElement::Lattice(x)) => x.len() == *dim,
            (Family::Finite(d), GroupElement::Finite(x)) => *x < d.order,
            (Family::Product(fs), GroupElement::Product(x)) => {
                fs.len() == x.len() && fs.iter().zip(x).all(|(f, p)| f.contains(p))
            }
            _ => false,
        }
    }

    /// Word length with respect to the symmetric generating set.
    pub fn length(&self, g: &GroupElement) -> usize {
        match (&self.0.family, g) {
            (Family::Free { .. }, GroupElement::Free(x)) => x.len(),
            (Family::Lattice { .. }, GroupElement::Lattice(x)) => x.iter().map(|c| c.unsigned_abs() as usize).sum(),
            (Family::Finite(d), GroupElement::Finite(x)) => d.words[*x].len(),
            (Family::Product(fs), GroupElement::Product(x)) => fs.iter().zip(x).map(|(f, p)| f.length(p)).sum(),
            _ => panic!("group element does not belong to this group"),
        }
    }

    /// A geodesic word for `g` as indices into [`Group::generators`]; the
    /// product of the word, read left to right, equals `g`.
    pub fn word(&self, g: &GroupElement) -> Vec<usize> {
        match (&self.0.family, g) {
            (Family::Free { .. }, GroupElement::Free(x)) => x
                .iter()
                .map(|&l| {
                    let base = 2 * (l.unsigned_abs() as usize - 1);
                    if l > 0 { base } else { base + 1 }
                })
                .collect(),
            (Family::Lattice { .. }, GroupElement::Lattice(x)) => {
                let mut w = Vec::new();
                for (i, &c) in x.iter().enumerate() {
                    let letter = if c >= 0 { 2 * i } else { 2 * i + 1 };
                    w.extend(std::iter::repeat_n(letter, c.unsigned_abs() as usize));
                }
                w
            }
            (Family::Finite(d), GroupElement::Finite(x)) => d.words[*x].clone(),
            (Family::Product(fs), GroupElement::Product(x)) => {
                let mut w = Vec::new();
                let mut offset = 0;
                for (f, p) in fs.iter().zip(x) {
                    w.extend(f.word(p).into_iter().map(|i| i + offset));
                    offset += f.generators().len();
                }
                w
            }
            _ => panic!("group element does not belong to this group"),
        }
    }

    /// Product of a word of symmetric-generator indices.
    pub fn eval_word(&self, word: &[usize]) -> GroupElement {
        word.iter().fold(self.identity(), |acc, &i| self.mul(&acc, &self.0.gens[i]))
    }

    /// Canonical representative of a raw word such as `"aAb"` or `"x y X"`.
    pub fn normal_form(&self, raw: &str) -> Result<GroupElement> {
        let letters = self.parse_letters(raw)?;
        Ok(self.eval_word(&letters))
    }

    fn parse_letters(&self, raw: &str) -> Result<Vec<usize>> {
        let chars: Vec<char> = raw.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || matches!(c, '*' | '.' | '·') {
                i += 1;
                continue;
            }
            if c == 'e' || c == '1' {
                i += 1;
                continue;
            }
            let (gen_idx, inverted) = self
                .letter_index(c)
                .ok_or_else(|| Error::UnknownGenerator(c.to_string()))?;
            i += 1;
            let mut exp: i64 = 1;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let start = i;
                if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                exp = digits.parse().map_err(|_| Error::MalformedWord(raw.to_string()))?;
            }
            if inverted {
                exp = -exp;
            }
            let letter = if exp >= 0 { gen_idx } else { self.0.gen_inverse[gen_idx] };
            out.extend(std::iter::repeat_n(letter, exp.unsigned_abs() as usize));
        }
        Ok(out)
    }

    fn letter_index(&self, c: char) -> Option<(usize, bool)> {
        let lower = c.to_ascii_lowercase();
        let pos = self.0.names.iter().position(|&n| n == lower)?;
        Some((self.0.positive[pos], c.is_ascii_uppercase()))
    }

    /// Renders `g` as a geodesic word, `e` for the identity.
    pub fn format(&self, g: &GroupElement) -> String {
        let word = self.word(g);
        if word.is_empty() {
            return "e".to_string();
        }
        word.iter().map(|&i| self.generator_symbol(i)).collect()
    }

    fn generator_symbol(&self, i: usize) -> char {
        if let Some(p) = self.0.positive.iter().position(|&q| q == i) {
            self.0.names[p]
        } else {
            let p = self.0.positive.iter().position(|&q| self.0.gen_inverse[q] == i).unwrap();
            self.0.names[p].to_ascii_uppercase()
        }
    }

    /// The ball `B_r` of word length at most `r`, in BFS order.
    pub fn ball(&self, r: usize) -> FiniteWindow {
        let mut elems = vec![self.identity()];
        let mut seen: HashSet<GroupElement> = elems.iter().cloned().collect();
        let mut frontier = 0;
        for _ in 0..r {
            let end = elems.len();
            for k in frontier..end {
                for s in &self.0.gens {
                    let g = self.mul(&elems[k], s);
                    if seen.insert(g.clone()) {
                        elems.push(g);
                    }
                }
            }
            if elems.len() == end {
                break;
            }
            frontier = end;
        }
        FiniteWindow::from_distinct(self.clone(), elems)
    }

    /// Deterministic injective enumeration `s_1 = e, s_2, ...` in BFS order:
    /// by word length, then by parent position, then by generator index.
    /// For free groups this is shortlex order over `a < A < b < B < ...`.
    pub fn enumerate(&self) -> Enumeration {
        let id = self.identity();
        let mut seen = HashSet::new();
        seen.insert(id.clone());
        Enumeration { group: self.clone(), queue: VecDeque::from([id]), seen }
    }

    /// The first `n` elements of [`Group::enumerate`].
    pub fn first_elements(&self, n: usize) -> Vec<GroupElement> {
        self.enumerate().take(n).collect()
    }
}

pub struct Enumeration {
    group: Group,
    queue: VecDeque<GroupElement>,
    seen: HashSet<GroupElement>,
}

impl Iterator for Enumeration {
    type Item = GroupElement;

    fn next(&mut self) -> Option<GroupElement> {
        let g = self.queue.pop_front()?;
        for s in self.group.generators() {
            let h = self.group.mul(&g, s);
            if self.seen.insert(h.clone()) {
                self.queue.push_back(h);
            }
        }
        Some(g)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Free(x) => write!(f, "free{x:?}"),
            GroupElement::Lattice(x) => write!(f, "{x:?}"),
            GroupElement::Finite(i) => write!(f, "#{i}"),
            GroupElement::Product(xs) => {
                write!(f, "(")?;
                for (k, x) in xs.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

fn validate_table(table: &[Vec<usize>], generators: &[usize]) -> Result<FiniteData> {
    let n = table.len();
    if n == 0 || table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
        return Err(Error::InvalidGroup("multiplication table must be square with entries < order".into()));
    }
    let identity = (0..n)
        .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
        .ok_or_else(|| Error::InvalidGroup("table has no identity".into()))?;
    let mut inverse = vec![usize::MAX; n];
    for x in 0..n {
        inverse[x] = (0..n)
            .find(|&y| table[x][y] == identity)
            .ok_or_else(|| Error::InvalidGroup(format!("element {x} has no inverse")))?;
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(Error::InvalidGroup("table is not associative".into()));
                }
            }
        }
    }
    if generators.iter().any(|&g| g >= n) {
        return Err(Error::InvalidGroup("generator index out of range".into()));
    }
    Ok(FiniteData { order: n, table: Some(table.to_vec()), identity, inverse, words: Vec::new() })
}

fn build_generators(inner: &mut Inner) -> Result<()> {
    let mut gens = Vec::new();
    let mut inv = Vec::new();
    let mut positive = Vec::new();
    fn push_pair(
        g: GroupElement,
        ginv: GroupElement,
        gens: &mut Vec<GroupElement>,
        inv: &mut Vec<usize>,
        positive: &mut Vec<usize>,
    ) {
        let i = gens.len();
        positive.push(i);
        if g == ginv {
            gens.push(g);
            inv.push(i);
        } else {
            gens.push(g);
            gens.push(ginv);
            inv.push(i + 1);
            inv.push(i);
        }
    }
    match &inner.family {
        Family::Free { rank } => {
            for i in 0..*rank as i32 {
                push_pair(GroupElement::Free(vec![i + 1]), GroupElement::Free(vec![-(i + 1)]), &mut gens, &mut inv, &mut positive);
            }
        }
        Family::Lattice { dim } => {
            for i in 0..*dim {
                let mut v = vec![0i64; *dim];
                v[i] = 1;
                let mut w = vec![0i64; *dim];
                w[i] = -1;
                push_pair(GroupElement::Lattice(v), GroupElement::Lattice(w), &mut gens, &mut inv, &mut positive);
            }
        }
        Family::Finite(d) => {
            let list: Vec<usize> = match &inner.spec {
                GroupSpec::Cyclic { order } => {
                    if *order == 1 {
                        Vec::new()
                    } else {
                        vec![1]
                    }
                }
                GroupSpec::Finite { generators, .. } => generators.clone(),
                _ => unreachable!(),
            };
            let mut used = HashSet::new();
            for g in list {
                if g == d.identity {
                    return Err(Error::InvalidGroup("generating set must exclude the identity".into()));
                }
                if used.contains(&g) {
                    continue;
                }
                used.insert(g);
                used.insert(d.inverse[g]);
                push_pair(GroupElement::Finite(g), GroupElement::Finite(d.inverse[g]), &mut gens, &mut inv, &mut positive);
            }
        }
        Family::Product(fs) => {
            for (k, f) in fs.iter().enumerate() {
                let offset = gens.len();
                for (i, g) in f.generators().iter().enumerate() {
                    let mut parts: Vec<GroupElement> = fs.iter().map(Group::identity).collect();
                    parts[k] = g.clone();
                    gens.push(GroupElement::Product(parts));
                    inv.push(offset + f.generator_inverse(i));
                }
                positive.extend(f.positive_generators().iter().map(|p| p + offset));
            }
        }
    }
    let names: Vec<char> = match &inner.family {
        Family::Lattice { dim } if *dim <= LATTICE_LETTERS.len() => {
            LATTICE_LETTERS[..*dim].iter().map(|&b| b as char).collect()
        }
        _ => {
            if positive.len() > LETTERS.len() {
                return Err(Error::InvalidGroup("too many generators to name".into()));
            }
            LETTERS[..positive.len()].iter().map(|&b| b as char).collect()
        }
    };
    inner.gens = gens;
    inner.gen_inverse = inv;
    inner.positive = positive;
    inner.names = names;
    Ok(())
}

fn shortlex_words(d: &FiniteData, gens: &[GroupElement]) -> Vec<Vec<usize>> {
    let mut words: Vec<Option<Vec<usize>>> = vec![None; d.order];
    words[d.identity] = Some(Vec::new());
    let mut queue = VecDeque::from([d.identity]);
    while let Some(x) = queue.pop_front() {
        for (i, g) in gens.iter().enumerate() {
            let GroupElement::Finite(g) = g else { unreachable!() };
            let y = d.mul(x, *g);
            if words[y].is_none() {
                let mut w = words[x].clone().unwrap();
                w.push(i);
                words[y] = Some(w);
                queue.push_back(y);
            }
        }
    }
    // unreachable elements get an empty placeholder, rejected by the caller
    words.into_iter().map(|w| w.unwrap_or_default()).collect()
}

/// Lookup table from element to position, shared by windows and ranks.
pub(crate) type ElementIndex = HashMap<GroupElement, usize>;
