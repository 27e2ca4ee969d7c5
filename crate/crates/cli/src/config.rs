//! Run configuration: a JSON document of requests executed in order.

use std::collections::BTreeMap;

use meandim::group::{FiniteWindow, Group, GroupSpec};
use meandim::invariants::WindowFamily;
use meandim::rational::{parse_rational, Rational};
use meandim::sofic::{quotient::sample_free_quotient, SoficMap};
use meandim::spaces::{Alphabet, Base, Constraint, Pattern, PseudometricSpec, ShiftSystem};
use meandim::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<Output>,
    #[serde(default)]
    pub requests: Vec<Request>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tsv: Option<String>,
}

/// A number written as an integer, a decimal or a string such as `"1/3"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Num {
    pub fn value(&self) -> Result<Rational> {
        match self {
            Num::Int(n) => Ok(Rational::from_integer((*n).into())),
            // shortest round-trip decimal, so 0.1 reads as 1/10
            Num::Float(x) => parse_rational(&format!("{x}")),
            Num::Text(s) => parse_rational(s),
        }
    }
}

fn default_group() -> GroupArg {
    GroupArg::Compact("lattice:1".into())
}

fn default_metric() -> String {
    "disc".into()
}

fn default_budget() -> usize {
    1 << 20
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum Request {
    GroupInfo(GroupInfoReq),
    SoficGen(SoficGenReq),
    SoficAudit(SoficAuditReq),
    Tile(TileReq),
    Separated(SeparatedReq),
    Entropy(EntropyReq),
    Mdim(MdimReq),
    Amplification(AmplificationReq),
    Ocap(OcapReq),
    Meanrank(MeanrankReq),
    SoficRank(SoficRankReq),
    Snf(SnfReq),
    Microstates(MicrostatesReq),
    Decay(DecayReq),
}

impl Request {
    pub fn op(&self) -> &'static str {
        match self {
            Request::GroupInfo(_) => "group-info",
            Request::SoficGen(_) => "sofic-gen",
            Request::SoficAudit(_) => "sofic-audit",
            Request::Tile(_) => "tile",
            Request::Separated(_) => "separated",
            Request::Entropy(_) => "entropy",
            Request::Mdim(_) => "mdim",
            Request::Amplification(_) => "amplification",
            Request::Ocap(_) => "ocap",
            Request::Meanrank(_) => "meanrank",
            Request::SoficRank(_) => "sofic-rank",
            Request::Snf(_) => "snf",
            Request::Microstates(_) => "microstates",
            Request::Decay(_) => "decay",
        }
    }

    pub fn id(&self) -> Option<&str> {
        match self {
            Request::GroupInfo(r) => r.id.as_deref(),
            Request::SoficGen(r) => r.id.as_deref(),
            Request::SoficAudit(r) => r.id.as_deref(),
            Request::Tile(r) => r.id.as_deref(),
            Request::Separated(r) => r.id.as_deref(),
            Request::Entropy(r) => r.id.as_deref(),
            Request::Mdim(r) => r.id.as_deref(),
            Request::Amplification(r) => r.id.as_deref(),
            Request::Ocap(r) => r.id.as_deref(),
            Request::Meanrank(r) => r.id.as_deref(),
            Request::SoficRank(r) => r.id.as_deref(),
            Request::Snf(r) => r.id.as_deref(),
            Request::Microstates(r) => r.id.as_deref(),
            Request::Decay(r) => r.id.as_deref(),
        }
    }

    /// Seeds the request consumes, for the report's registry.
    pub fn seeds(&self) -> Vec<u64> {
        let sofic = |s: &str| SoficSpec::parse(s).ok().and_then(|x| x.seed()).into_iter().collect();
        match self {
            Request::SoficGen(r) => sofic(&r.sofic),
            Request::SoficAudit(r) => sofic(&r.sofic),
            Request::Tile(r) => sofic(&r.sofic),
            Request::SoficRank(r) => sofic(&r.sofic),
            Request::Microstates(r) => sofic(&r.sofic),
            Request::Separated(r) => r.random.as_ref().map(|x| x.seed).into_iter().collect(),
            Request::Snf(r) => r.random.as_ref().map(|x| x.seed).into_iter().collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupInfoReq {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub group: GroupArg,
    #[serde(default = "default_radius")]
    pub radius: usize,
}

fn default_radius() -> usize {
    3
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SoficGenReq {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub group: GroupArg,
    pub sofic: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SoficAuditReq {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub group: GroupArg,
    pub sofic: String,
    pub window: String,
    #[serde(default = "default_tau")]
    pub tau: Num,
}

fn default_tau() -> Num {
    Num::Text("1/10".into())
}

fn default_eta() -> Num {
    Num::Int(0)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TileReq {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub group: GroupArg,
    pub sofic: String,
    pub window: String,
    pub tau: Num,
    #[serde(default = "default_eta")]
    pub eta: Num,
    /// include every tile in the result
    #[serde(default)]
    pub tiles: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSpaces {
    pub count: usize,
    pub max_points: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparatedReq {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<Vec<Num>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomSpaces>,
    pub eps: Num,
}

/// A shift system: `full:K`, `cube:M`, `line:0,1/2,1`, `golden-mean` or
/// `sft:K:00,11` over `Z`, plus optional extra forbidden patterns.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    #[serde(default = "default_group")]
    pub group: GroupArg,
    pub shift: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub forbidden: Vec<PatternSpec>,
}

/// Letters placed on the listed group elements.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternSpec {
    pub window: Vec<String>,
    pub letters: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyReq {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub system: SystemSpec,
    #[serde(default = "default_metric")]
    pub metric: String,
    pub eps: Num,
    pub family: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MdimReq {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub system: SystemSpec,
    pub eps: Num,
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps0: Option<Num>,
    #[serde(default)]
    pub refinement: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplificationReq {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub group: GroupArg,
    pub window: String,
    pub family: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OcapReq {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub system: SystemSpec,
    /// cylinders whose union is the set `A`
    pub set: Vec<PatternSpec>,
    pub family: String,
    #[serde(default = "default_budget")]
    pub budget: usize,
}

/// A module file given by preset name, path or inline text.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanrankReq {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub module: ModuleSpec,
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SoficRankReq {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub module: ModuleSpec,
    pub window: String,
    pub sofic: String,
    #[serde(default)]
    pub radius: usize,
    /// compare against the naive upper bound over this family
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomMatrices {
    pub count: usize,
    pub max_dim: usize,
    pub max_entry: i64,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnfReq {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomMatrices>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MicrostatesReq {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub system: SystemSpec,
    #[serde(default = "default_metric")]
    pub metric: String,
    pub window: String,
    pub delta: Num,
    pub sofic: String,
    pub eps: Num,
    #[serde(default = "default_budget")]
    pub budget: usize,
    /// also enumerate members and run the counting lemma on each
    #[serde(default)]
    pub lemma: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayReq {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub system: SystemSpec,
    #[serde(default = "default_metric")]
    pub metric: String,
    pub grid: Vec<Num>,
    pub family: String,
}

/// Schema errors carry the position reported by the JSON parser.
#[derive(Debug)]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error at line {}, column {}: {}", self.line, self.column, self.message)
    }
}

pub fn parse_config(text: &str) -> std::result::Result<RunConfig, ConfigError> {
    serde_json::from_str(text).map_err(|e| {
        // the position is reported separately
        let full = e.to_string();
        let message = full.rsplit_once(" at line ").map_or(full.as_str(), |(m, _)| m).to_string();
        ConfigError { line: e.line(), column: e.column(), message }
    })
}

/// A group written compactly (`free:2`) or as `{"kind": "free", "rank": 2}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupArg {
    Compact(String),
    Spec(GroupSpec),
}

impl GroupArg {
    pub fn build(&self) -> Result<Group> {
        match self {
            GroupArg::Compact(text) => Group::new(GroupSpec::parse_compact(text)?),
            GroupArg::Spec(spec) => Group::new(spec.clone()),
        }
    }
}

pub fn window(group: &Group, text: &str) -> Result<FiniteWindow> {
    FiniteWindow::parse(group, text)
}

pub fn family(group: &Group, text: &str) -> Result<WindowFamily> {
    WindowFamily::parse(group, text)
}

pub fn metric(text: &str) -> Result<PseudometricSpec> {
    let t = text.trim();
    if t == "disc" {
        return Ok(PseudometricSpec::disc());
    }
    if let Some(n) = t.strip_prefix("induced:") {
        let n = n.trim().parse().map_err(|_| Error::OutOfRange(format!("bad depth in `{text}`")))?;
        return Ok(PseudometricSpec::induced(n));
    }
    Err(Error::OutOfRange(format!("unknown metric `{text}` (use disc or induced:N)")))
}

pub fn base(text: &str) -> Result<Base> {
    Ok(metric(text)?.base)
}

fn pattern(group: &Group, p: &PatternSpec) -> Result<Pattern> {
    let elems = p.window.iter().map(|w| group.normal_form(w)).collect::<Result<Vec<_>>>()?;
    Pattern::new(FiniteWindow::new(group.clone(), elems)?, p.letters.clone())
}

pub fn patterns(group: &Group, ps: &[PatternSpec]) -> Result<Vec<Pattern>> {
    ps.iter().map(|p| pattern(group, p)).collect()
}

impl SystemSpec {
    pub fn build(&self) -> Result<ShiftSystem> {
        let g = self.group.build()?;
        let bad = || Error::OutOfRange(format!("unknown shift `{}`", self.shift));
        let (kind, arg) = self.shift.split_once(':').unwrap_or((self.shift.as_str(), ""));
        let mut forbidden = patterns(&g, &self.forbidden)?;
        let alphabet = match kind {
            "golden-mean" => {
                forbidden.push(Pattern::word(&g, &[1, 1])?);
                Alphabet::discrete(2)?
            }
            "full" => Alphabet::discrete(arg.parse().map_err(|_| bad())?)?,
            "cube" => Alphabet::cube(arg.parse().map_err(|_| bad())?)?,
            "line" => {
                let pts = arg.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
                Alphabet::Finite(meandim::spaces::FiniteAlphabet::on_line(&pts)?)
            }
            "sft" => {
                let (k, words) = arg.split_once(':').ok_or_else(bad)?;
                for w in words.split(',').filter(|w| !w.is_empty()) {
                    let letters = w
                        .chars()
                        .map(|c| c.to_digit(36).ok_or_else(bad))
                        .collect::<Result<Vec<u32>>>()?;
                    forbidden.push(Pattern::word(&g, &letters)?);
                }
                Alphabet::discrete(k.parse().map_err(|_| bad())?)?
            }
            _ => return Err(bad()),
        };
        let constraint = if forbidden.is_empty() { Constraint::Full } else { Constraint::Forbidden(forbidden) };
        ShiftSystem::new(alphabet, g, constraint)
    }
}

/// `cyclic:D`, `torus:SIDE`, `random:D:SEED` or `quotient:MIN..MAX:SEED`
/// (free group of rank 2, radius-2 injectivity).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SoficSpec {
    Cyclic(usize),
    Torus(usize),
    Random { d: usize, seed: u64 },
    Quotient { min: usize, max: usize, seed: u64 },
}

impl SoficSpec {
    pub fn parse(text: &str) -> Result<SoficSpec> {
        let bad = || Error::OutOfRange(format!("cannot parse sofic map `{text}`"));
        let parts: Vec<&str> = text.trim().split(':').collect();
        let num = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
        match parts[..] {
            ["cyclic", d] => Ok(SoficSpec::Cyclic(num(d)? as usize)),
            ["torus", s] => Ok(SoficSpec::Torus(num(s)? as usize)),
            ["random", d, seed] => Ok(SoficSpec::Random { d: num(d)? as usize, seed: num(seed)? }),
            ["quotient", range, seed] => {
                let (a, b) = range.split_once("..").unwrap_or((range, range));
                Ok(SoficSpec::Quotient { min: num(a)? as usize, max: num(b)? as usize, seed: num(seed)? })
            }
            _ => Err(bad()),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            SoficSpec::Random { seed, .. } | SoficSpec::Quotient { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    pub fn build(&self, group: &Group) -> Result<SoficMap> {
        match *self {
            SoficSpec::Cyclic(d) => SoficMap::from_cyclic(group, d),
            SoficSpec::Torus(s) => SoficMap::from_torus(group, s),
            SoficSpec::Random { d, seed } => SoficMap::from_random(group, d, seed),
            SoficSpec::Quotient { min, max, seed } => {
                if group.free_rank() != Some(2) {
                    return Err(Error::UnsupportedGroup("quotient maps are sampled for free:2".into()));
                }
                sample_free_quotient(seed, 2, min, max)
            }
        }
    }
}

/// Echo of the seeds each request used, keyed by request label.
pub type SeedRegistry = BTreeMap<String, Vec<u64>>;
