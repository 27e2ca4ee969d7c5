//! Finitely presented `ZΓ`-modules `ZΓ^n / N` and their text format.
//!
//! ```text
//! # comment
//! group lattice:1
//! rank 1
//! relator (0, x, 1) (0, e, -1)
//! generator (0, e, 1)
//! ```
//!
//! Each `relator` or `generator` line is a vector of `ZΓ^n` written as
//! `(component, word, coefficient)` triples; repeated positions add up.

use crate::error::{Error, Result};
use crate::group::{Group, GroupSpec};

use super::ring::GroupRingElement;

/// A vector of `ZΓ^n`.
pub type ModuleVector = Vec<GroupRingElement>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZGModulePresentation {
    group: Group,
    rank: usize,
    relators: Vec<ModuleVector>,
}

impl ZGModulePresentation {
    /// Zero relators are dropped and the rest sorted and deduplicated.
    pub fn new(group: &Group, rank: usize, relators: Vec<ModuleVector>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::OutOfRange("free rank must be at least 1".into()));
        }
        check_vectors(group, rank, &relators)?;
        let mut relators: Vec<ModuleVector> =
            relators.into_iter().filter(|r| r.iter().any(|c| !c.is_zero())).collect();
        relators.sort();
        relators.dedup();
        Ok(ZGModulePresentation { group: group.clone(), rank, relators })
    }

    /// `ZΓ^n` itself.
    pub fn free(group: &Group, rank: usize) -> Result<Self> {
        Self::new(group, rank, Vec::new())
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn relators(&self) -> &[ModuleVector] {
        &self.relators
    }

    pub fn is_free(&self) -> bool {
        self.relators.is_empty()
    }
}

/// Generators `a_1..a_m` of a finitely generated subgroup of the module,
/// given by lifts to `ZΓ^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupSpec {
    generators: Vec<ModuleVector>,
}

impl SubgroupSpec {
    pub fn new(pres: &ZGModulePresentation, generators: Vec<ModuleVector>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::OutOfRange("a subgroup needs at least one generator".into()));
        }
        check_vectors(&pres.group, pres.rank, &generators)?;
        Ok(SubgroupSpec { generators })
    }

    /// The subgroup generated by the basis vector `e_c`.
    pub fn basis(pres: &ZGModulePresentation, c: usize) -> Result<Self> {
        let g = &pres.group;
        let v = (0..pres.rank)
            .map(|i| if i == c { GroupRingElement::one(g) } else { GroupRingElement::zero() })
            .collect();
        Self::new(pres, vec![v])
    }

    /// The span of `{δ_g e_c : g ∈ B_r, c < n}`.
    pub fn ball_span(pres: &ZGModulePresentation, r: usize) -> Result<Self> {
        let g = &pres.group;
        let mut gens = Vec::new();
        for c in 0..pres.rank {
            for s in g.ball(r).iter() {
                gens.push(
                    (0..pres.rank)
                        .map(|i| if i == c { GroupRingElement::monomial(s.clone(), 1) } else { GroupRingElement::zero() })
                        .collect(),
                );
            }
        }
        Self::new(pres, gens)
    }

    pub fn generators(&self) -> &[ModuleVector] {
        &self.generators
    }

    pub fn is_zero(&self) -> bool {
        self.generators.iter().all(|v| v.iter().all(GroupRingElement::is_zero))
    }
}

fn check_vectors(group: &Group, rank: usize, vs: &[ModuleVector]) -> Result<()> {
    for v in vs {
        if v.len() != rank {
            return Err(Error::DimensionMismatch { expected: rank, found: v.len() });
        }
        if v.iter().flat_map(|c| c.support()).any(|g| !group.contains(g)) {
            return Err(Error::MismatchedOwners);
        }
    }
    Ok(())
}

/// A parsed module file: the presentation and, when given, a subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleFile {
    pub presentation: ZGModulePresentation,
    pub subgroup: Option<SubgroupSpec>,
}

impl ModuleFile {
    pub fn parse(text: &str) -> Result<ModuleFile> {
        let mut group: Option<Group> = None;
        let mut rank: Option<usize> = None;
        let mut relators = Vec::new();
        let mut generators = Vec::new();
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            last_line = line;
            let err = |msg: String| Error::Parse { line, msg };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
            let rest = rest.trim();
            match key {
                "group" => {
                    if group.is_some() {
                        return Err(err("duplicate `group` line".into()));
                    }
                    let spec = GroupSpec::parse_compact(rest).map_err(|e| err(e.to_string()))?;
                    group = Some(Group::new(spec).map_err(|e| err(e.to_string()))?);
                }
                "rank" => {
                    if rank.is_some() {
                        return Err(err("duplicate `rank` line".into()));
                    }
                    let n: usize = rest.parse().map_err(|_| err(format!("bad rank `{rest}`")))?;
                    if n == 0 {
                        return Err(err("rank must be at least 1".into()));
                    }
                    rank = Some(n);
                }
                "relator" | "generator" => {
                    let (Some(g), Some(n)) = (&group, rank) else {
                        return Err(err(format!("`{key}` before `group` and `rank`")));
                    };
                    let v = parse_vector(g, n, rest).map_err(err)?;
                    if key == "relator" {
                        relators.push(v);
                    } else {
                        generators.push(v);
                    }
                }
                other => return Err(err(format!("unknown keyword `{other}`"))),
            }
        }
        let missing = |what: &str| Error::Parse { line: last_line, msg: format!("missing `{what}` line") };
        let group = group.ok_or_else(|| missing("group"))?;
        let rank = rank.ok_or_else(|| missing("rank"))?;
        let presentation = ZGModulePresentation::new(&group, rank, relators)?;
        let subgroup = if generators.is_empty() { None } else { Some(SubgroupSpec::new(&presentation, generators)?) };
        Ok(ModuleFile { presentation, subgroup })
    }

    pub fn to_text(&self) -> String {
        let p = &self.presentation;
        let mut out = format!("group {}\nrank {}\n", compact_spec(p.group.spec()), p.rank);
        for r in &p.relators {
            out.push_str(&format!("relator {}\n", format_vector(&p.group, r)));
        }
        if let Some(a) = &self.subgroup {
            for v in &a.generators {
                out.push_str(&format!("generator {}\n", format_vector(&p.group, v)));
            }
        }
        out
    }
}

fn compact_spec(spec: &GroupSpec) -> String {
    match spec {
        GroupSpec::Free { rank } => format!("free:{rank}"),
        GroupSpec::Lattice { dim } => format!("lattice:{dim}"),
        GroupSpec::Cyclic { order } => format!("cyclic:{order}"),
        GroupSpec::Product { factors } => {
            format!("product:{}", factors.iter().map(compact_spec).collect::<Vec<_>>().join(","))
        }
        GroupSpec::Finite { .. } => "finite".into(),
    }
}

fn format_vector(group: &Group, v: &ModuleVector) -> String {
    let triples: Vec<String> = v
        .iter()
        .enumerate()
        .flat_map(|(c, x)| x.terms().map(move |(g, k)| format!("({c}, {}, {k})", group.format(g))))
        .collect();
    if triples.is_empty() {
        "(0, e, 0)".into()
    } else {
        triples.join(" ")
    }
}

fn parse_vector(group: &Group, rank: usize, text: &str) -> std::result::Result<ModuleVector, String> {
    let mut v = vec![GroupRingElement::zero(); rank];
    let mut rest = text.trim();
    if rest.is_empty() {
        return Err("expected at least one (component, word, coefficient) triple".into());
    }
    while !rest.is_empty() {
        let body = rest.strip_prefix('(').ok_or_else(|| format!("expected `(` at `{rest}`"))?;
        let close = body.find(')').ok_or("unclosed `(`")?;
        let fields: Vec<&str> = body[..close].split(',').map(str::trim).collect();
        rest = body[close + 1..].trim_start();
        let [c, word, k] = fields[..] else {
            return Err(format!("expected 3 fields, found {}", fields.len()));
        };
        let c: usize = c.parse().map_err(|_| format!("bad component `{c}`"))?;
        if c >= rank {
            return Err(format!("component {c} out of range for rank {rank}"));
        }
        let k: num_bigint::BigInt = k.parse().map_err(|_| format!("bad coefficient `{k}`"))?;
        let g = group.normal_form(word).map_err(|e| e.to_string())?;
        v[c] = v[c].add(&GroupRingElement::monomial(g, k));
    }
    Ok(v)
}

/// Built-in module files, by name.
pub const PRESETS: &[(&str, &str)] = &[
    ("ZGamma-free", "# the free module Z[Z] with A = <1>\ngroup lattice:1\nrank 1\ngenerator (0, e, 1)\n"),
    (
        "ZGamma-trivial",
        "# Z[t, 1/t] / (t - 1), the trivial module Z, with A = <1>\ngroup lattice:1\nrank 1\nrelator (0, x, 1) (0, e, -1)\ngenerator (0, e, 1)\n",
    ),
    (
        "F2-ball2",
        "# the free module Z[F_2] with A spanned by the ball of radius 2\ngroup free:2\nrank 1\ngenerator (0, e, 1)\ngenerator (0, a, 1)\ngenerator (0, A, 1)\ngenerator (0, b, 1)\ngenerator (0, B, 1)\ngenerator (0, aa, 1)\ngenerator (0, ab, 1)\ngenerator (0, aB, 1)\ngenerator (0, AA, 1)\ngenerator (0, Ab, 1)\ngenerator (0, AB, 1)\ngenerator (0, ba, 1)\ngenerator (0, bA, 1)\ngenerator (0, bb, 1)\ngenerator (0, Ba, 1)\ngenerator (0, BA, 1)\ngenerator (0, BB, 1)\n",
    ),
];

pub fn preset(name: &str) -> Result<ModuleFile> {
    let text = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::OutOfRange(format!("unknown module preset `{name}`")))?;
    ModuleFile::parse(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_round_trip() {
        let f = preset("ZGamma-trivial").unwrap();
        assert_eq!(f.presentation.rank(), 1);
        assert_eq!(f.presentation.relators().len(), 1);
        let again = ModuleFile::parse(&f.to_text()).unwrap();
        assert_eq!(again, f);
        for (name, _) in PRESETS {
            let p = preset(name).unwrap();
            assert_eq!(ModuleFile::parse(&p.to_text()).unwrap(), p);
        }
    }

    #[test]
    fn canonical_relator_order() {
        let a = "group free:2\nrank 2\nrelator (1, a, 2)\nrelator (0, b, 1) (0, e, -1)\nrelator (1, a, 2)\n";
        let b = "group free:2\nrank 2\nrelator (0, e, -1) (0, b, 1)\nrelator (1, a, 1) (1, a, 1)\nrelator (0, a, 0)\n";
        let (a, b) = (ModuleFile::parse(a).unwrap(), ModuleFile::parse(b).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.presentation.relators().len(), 2);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let cases = [
            ("group free:2\nrank 1\nrelator (1, a, 1)\n", 3),
            ("group free:2\nrelator (0, a, 1)\n", 2),
            ("group free:2\nrank 0\n", 2),
            ("group free:2\nrank 1\nrelator (0, q, 1)\n", 3),
            ("group free:2\nrank 1\n\nbogus\n", 4),
            ("rank 1\n", 1),
            ("group free:2\nrank 1\nrelator (0, a)\n", 3),
        ];
        for (text, line) in cases {
            match ModuleFile::parse(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("expected a parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn subgroup_validation() {
        let z = Group::integers();
        let p = ZGModulePresentation::free(&z, 2).unwrap();
        assert!(SubgroupSpec::new(&p, vec![]).is_err());
        assert!(SubgroupSpec::new(&p, vec![vec![GroupRingElement::zero()]]).is_err());
        assert_eq!(SubgroupSpec::ball_span(&p, 1).unwrap().generators().len(), 6);
        assert!(ZGModulePresentation::free(&z, 0).is_err());
    }
}
