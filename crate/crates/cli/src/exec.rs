//! Runs one request against the library and shapes the outcome for the report.

use meandim::invariants::{
    amplification, decay_diagnostic, naive_eps_entropy, naive_mdim_bracket, orbit_capacity, separated_exact,
    separated_greedy, Bracket, CylinderSet, WdimOptions,
};
use meandim::meanrank::{
    bareiss_rank, naive_mean_rank_bracket, preset, smith_normal_form, sofic_rank_surrogate, IntMatrix, ModuleFile,
    SubgroupSpec, TruncationSchedule,
};
use meandim::microstates::{
    count_separated_microstates, enumerate_members, map_lowerbound_check, MicrostateSpaceSpec, Verdict,
};
use meandim::rational::{fmt_rational, int, LogRatio, Rational};
use meandim::tiling::{maximality_violations, tile, verify_tiling, TileParams};
use meandim::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::*;

/// One TSV line.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub invariant: String,
    pub window: String,
    pub lower: String,
    pub upper: String,
    pub witness: String,
    pub status: String,
}

impl Row {
    fn new(invariant: &str, window: impl Into<String>, lower: impl Into<String>, upper: impl Into<String>) -> Row {
        Row {
            invariant: invariant.into(),
            window: window.into(),
            lower: lower.into(),
            upper: upper.into(),
            witness: String::new(),
            status: "ok".into(),
        }
    }

    fn witness(mut self, w: impl Into<String>) -> Row {
        self.witness = w.into();
        self
    }

    fn status(mut self, s: &str) -> Row {
        self.status = s.into();
        self
    }
}

pub struct Outcome {
    pub result: Value,
    pub rows: Vec<Row>,
    pub partial: bool,
}

impl Outcome {
    fn new(result: Value, rows: Vec<Row>) -> Outcome {
        Outcome { result, rows, partial: false }
    }
}

pub fn execute(req: &Request) -> Result<Outcome> {
    match req {
        Request::GroupInfo(r) => group_info(r),
        Request::SoficGen(r) => sofic_gen(r),
        Request::SoficAudit(r) => sofic_audit(r),
        Request::Tile(r) => tiling(r),
        Request::Separated(r) => separated(r),
        Request::Entropy(r) => entropy(r),
        Request::Mdim(r) => mdim(r),
        Request::Amplification(r) => amplify(r),
        Request::Ocap(r) => ocap(r),
        Request::Meanrank(r) => meanrank(r),
        Request::SoficRank(r) => sofic_rank(r),
        Request::Snf(r) => snf(r),
        Request::Microstates(r) => microstates(r),
        Request::Decay(r) => decay(r),
    }
}

fn q(x: &Rational) -> String {
    fmt_rational(x)
}

fn log_json(x: &LogRatio) -> Value {
    json!({ "exact": x.to_string(), "approx": x.value() })
}

fn bracket_json<T>(b: &Bracket<T>, value: impl Fn(&T) -> Value) -> Value {
    json!({
        "lower": value(&b.lower),
        "upper": value(&b.upper),
        "upper_witness": b.upper_witness,
        "lower_witness": b.lower_witness,
        "rows": b.rows.iter().map(|r| json!({
            "window": r.window,
            "size": r.size,
            "value": value(&r.value),
            "note": r.note,
        })).collect::<Vec<_>>(),
    })
}

/// One row per window holding its upper bound, then the bracket itself.
fn bracket_rows<T>(inv: &str, b: &Bracket<T>, show: impl Fn(&T) -> String) -> Vec<Row> {
    let mut rows: Vec<Row> =
        b.rows.iter().map(|r| Row::new(inv, &r.window, "", show(&r.value)).witness(&r.note)).collect();
    rows.push(
        Row::new(inv, "inf", show(&b.lower), show(&b.upper))
            .witness(format!("upper at {}; lower: {}", b.upper_witness, b.lower_witness)),
    );
    rows
}

fn group_info(r: &GroupInfoReq) -> Result<Outcome> {
    let g = r.group.build()?;
    let balls: Vec<Value> = (0..=r.radius).map(|k| json!({ "radius": k, "size": g.ball(k).len() })).collect();
    let gens: Vec<String> = g.generators().iter().map(|s| g.format(s)).collect();
    let rows = (0..=r.radius).map(|k| Row::new("ball-size", format!("ball:{k}"), "", g.ball(k).len().to_string())).collect();
    Ok(Outcome::new(
        json!({
            "spec": g.spec(),
            "generators": gens,
            "order": g.order(),
            "orderable": g.is_orderable(),
            "balls": balls,
        }),
        rows,
    ))
}

fn sofic_map(group: &meandim::Group, text: &str) -> Result<meandim::sofic::SoficMap> {
    SoficSpec::parse(text)?.build(group)
}

fn sofic_gen(r: &SoficGenReq) -> Result<Outcome> {
    let g = r.group.build()?;
    let sigma = sofic_map(&g, &r.sofic)?;
    let images: Vec<&[u32]> = sigma.positive_images().into_iter().map(|p| p.images()).collect();
    let row = Row::new("sofic-map", "", "", sigma.d().to_string()).witness(r.sofic.clone());
    Ok(Outcome::new(json!({ "d": sigma.d(), "provenance": sigma.provenance(), "images": images }), vec![row]))
}

fn sofic_audit(r: &SoficAuditReq) -> Result<Outcome> {
    let g = r.group.build()?;
    let sigma = sofic_map(&g, &r.sofic)?;
    let f = window(&g, &r.window)?;
    let report = sigma.goodness(&f, &r.tau.value()?)?;
    let rows = vec![
        Row::new("multiplicativity", &r.window, "", q(&report.multiplicativity)),
        Row::new("separation", &r.window, q(&report.separation), ""),
        Row::new("good-set", &r.window, report.good_set.len().to_string(), "")
            .witness(format!("threshold {}", q(&report.threshold)))
            .status(if report.threshold_met { "ok" } else { "fail" }),
    ];
    Ok(Outcome::new(serde_json::to_value(&report).expect("report serializes"), rows))
}

fn tiling(r: &TileReq) -> Result<Outcome> {
    let g = r.group.build()?;
    let sigma = sofic_map(&g, &r.sofic)?;
    let f = window(&g, &r.window)?;
    let (tau, eta) = (r.tau.value()?, r.eta.value()?);
    let goodness = sigma.goodness(&f, &tau)?;
    let all: Vec<usize> = (0..sigma.d()).collect();
    let t = tile(&sigma, &f, &TileParams::new(tau.clone(), eta.clone()), &goodness.good_set, &all)?;
    let verdict = verify_tiling(&t, &sigma, &f, &tau, &eta, Some(&all));
    let residual = maximality_violations(&t, &sigma, &f, &tau, &goodness.good_set, &all);
    let report = t.to_report(&sigma);
    let mut result = json!({
        "d": t.d,
        "ell": t.len(),
        "covered": t.covered(),
        "coverage": q(&t.coverage()),
        "good_set_size": goodness.good_set.len(),
        "verdict": verdict,
        "maximality_violations": residual,
    });
    if r.tiles {
        result["tiles"] = serde_json::to_value(&report.tiles).expect("tiles serialize");
    }
    let pass = verdict.pass && residual.is_empty();
    let row = Row::new("tiling", &r.window, q(&t.coverage()), "")
        .witness(format!("ell={} covered={}/{}", t.len(), t.covered(), t.d))
        .status(if pass { "ok" } else { "fail" });
    Ok(Outcome::new(result, vec![row]))
}

fn random_space(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<Rational>> {
    // l1 distances between points of a small integer grid
    let pts: Vec<[i64; 3]> = (0..n).map(|_| [rng.gen_range(0..6), rng.gen_range(0..6), rng.gen_range(0..6)]).collect();
    pts.iter()
        .map(|a| pts.iter().map(|b| int(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum())).collect())
        .collect()
}

fn separated(r: &SeparatedReq) -> Result<Outcome> {
    let eps = r.eps.value()?;
    let mut spaces = Vec::new();
    if let Some(m) = &r.distances {
        spaces.push(m.iter().map(|row| row.iter().map(Num::value).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?);
    }
    if let Some(rs) = &r.random {
        if rs.max_points == 0 {
            return Err(Error::OutOfRange("max_points must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(rs.seed);
        for _ in 0..rs.count {
            let n = rng.gen_range(1..=rs.max_points);
            spaces.push(random_space(&mut rng, n));
        }
    }
    let two = &eps * int(2);
    let mut cases = Vec::new();
    let mut rows = Vec::new();
    let mut within = 0;
    for (i, m) in spaces.iter().enumerate() {
        let exact = separated_exact(m, &eps)?;
        let exact2 = separated_exact(m, &two)?;
        let (greedy, _) = separated_greedy(m, &eps);
        let ok = exact2 <= greedy && greedy <= exact;
        within += ok as usize;
        cases.push(json!({ "points": m.len(), "exact": exact, "exact_2eps": exact2, "greedy": greedy }));
        rows.push(
            Row::new("separated", format!("space:{i}"), greedy.to_string(), exact.to_string())
                .witness(format!("points={} exact(2eps)={exact2}", m.len()))
                .status(if ok { "ok" } else { "fail" }),
        );
    }
    Ok(Outcome::new(json!({ "eps": q(&eps), "cases": cases, "greedy_within_bounds": within }), rows))
}

fn entropy(r: &EntropyReq) -> Result<Outcome> {
    let sys = r.system.build()?;
    let fam = family(sys.group(), &r.family)?;
    let b = naive_eps_entropy(&sys, &base(&r.metric)?, &r.eps.value()?, &fam)?;
    Ok(Outcome::new(bracket_json(&b, log_json), bracket_rows("entropy", &b, |x| x.to_string())))
}

fn mdim(r: &MdimReq) -> Result<Outcome> {
    let sys = r.system.build()?;
    let fam = family(sys.group(), &r.family)?;
    let opts = WdimOptions { eps0: r.eps0.as_ref().map(Num::value).transpose()?, refinement: r.refinement };
    let b = naive_mdim_bracket(&sys, &r.eps.value()?, &fam, &opts)?;
    Ok(Outcome::new(bracket_json(&b, |x| json!(q(x))), bracket_rows("mdim", &b, q)))
}

fn amplify(r: &AmplificationReq) -> Result<Outcome> {
    let g = r.group.build()?;
    let b = amplification(&window(&g, &r.window)?, &family(&g, &r.family)?)?;
    Ok(Outcome::new(bracket_json(&b, |x| json!(q(x))), bracket_rows("amplification", &b, q)))
}

fn ocap(r: &OcapReq) -> Result<Outcome> {
    let sys = r.system.build()?;
    let a = CylinderSet::new(sys.group(), patterns(sys.group(), &r.set)?)?;
    let b = orbit_capacity(&sys, &a, &family(sys.group(), &r.family)?, r.budget)?;
    Ok(Outcome::new(bracket_json(&b, |x| json!(q(x))), bracket_rows("ocap", &b, q)))
}

fn module(spec: &ModuleSpec) -> Result<ModuleFile> {
    match (&spec.preset, &spec.path, &spec.text) {
        (Some(name), None, None) => preset(name),
        (None, Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Precondition(format!("cannot read module file {path}: {e}")))?;
            ModuleFile::parse(&text)
        }
        (None, None, Some(text)) => ModuleFile::parse(text),
        _ => Err(Error::Precondition("module needs exactly one of preset, path or text".into())),
    }
}

fn subgroup(m: &ModuleFile) -> Result<SubgroupSpec> {
    m.subgroup.clone().ok_or_else(|| Error::Precondition("module file has no generator lines".into()))
}

fn meanrank(r: &MeanrankReq) -> Result<Outcome> {
    let m = module(&r.module)?;
    let a = subgroup(&m)?;
    let fam = family(m.presentation.group(), &r.family)?;
    let sched = r.schedule.clone().map(TruncationSchedule::new).transpose()?;
    let out = naive_mean_rank_bracket(&m.presentation, &a, &fam, sched.as_ref())?;
    let mut result = bracket_json(&out.bracket, |x| json!(q(x)));
    result["exact_rows"] = json!(out.exact_rows);
    result["windows"] = out
        .windows
        .iter()
        .zip(fam.labels())
        .map(|(w, label)| json!({ "window": label, "rank": w.rank, "radius": w.radius, "stable": w.stable, "history": w.history }))
        .collect();
    let mut rows = bracket_rows("meanrank", &out.bracket, q);
    for (row, w) in rows.iter_mut().zip(&out.windows) {
        if !w.stable {
            row.status = "unstable".into();
        }
    }
    Ok(Outcome::new(result, rows))
}

fn sofic_rank(r: &SoficRankReq) -> Result<Outcome> {
    let m = module(&r.module)?;
    let a = subgroup(&m)?;
    let g = m.presentation.group();
    let f = window(g, &r.window)?;
    let sigma = sofic_map(g, &r.sofic)?;
    let s = sofic_rank_surrogate(&m.presentation, &a, &a, &f, &sigma, r.radius)?;
    let mut result = json!({
        "value": q(&s.value),
        "rank": s.rank,
        "d": s.d,
        "radius": s.radius,
        "coordinates": s.coordinates,
    });
    let mut row = Row::new("sofic-rank", &r.window, "", q(&s.value)).witness(format!("rank={} d={}", s.rank, s.d));
    if let Some(text) = &r.family {
        let b = naive_mean_rank_bracket(&m.presentation, &a, &family(g, text)?, None)?.bracket;
        let ok = s.value <= b.upper;
        result["naive_upper"] = json!(q(&b.upper));
        result["below_naive_upper"] = json!(ok);
        row.witness = format!("{} naive_upper={}", row.witness, q(&b.upper));
        row.status = if ok { "ok" } else { "fail" }.into();
    }
    Ok(Outcome::new(result, vec![row]))
}

/// Failed checks on one Smith form; empty when it is a valid certificate.
fn snf_failures(m: &IntMatrix) -> Vec<String> {
    let (u, d, v) = smith_normal_form(m);
    let mut bad = Vec::new();
    if u.mul(m).mul(&v) != d {
        bad.push("U M V != D".to_string());
    }
    if !d.is_diagonal() {
        bad.push("D is not diagonal".into());
    }
    if !u.det().abs().is_one() || !v.det().abs().is_one() {
        bad.push("U or V is not unimodular".into());
    }
    let diag: Vec<BigInt> = (0..d.rows().min(d.cols())).map(|i| d.get(i, i).clone()).collect();
    if diag.iter().any(|x| x.is_negative()) {
        bad.push("negative invariant factor".into());
    }
    for w in diag.windows(2) {
        let ok = if w[0].is_zero() { w[1].is_zero() } else { w[1].is_multiple_of(&w[0]) };
        if !ok {
            bad.push(format!("{} does not divide {}", w[0], w[1]));
        }
    }
    let rank = diag.iter().filter(|x| !x.is_zero()).count();
    if rank != bareiss_rank(m) {
        bad.push(format!("rank {rank} differs from elimination rank {}", bareiss_rank(m)));
    }
    bad
}

fn snf(r: &SnfReq) -> Result<Outcome> {
    let mut mats = Vec::new();
    if let Some(m) = &r.matrix {
        if m.is_empty() || m[0].is_empty() || m.iter().any(|row| row.len() != m[0].len()) {
            return Err(Error::OutOfRange("matrix must be a nonempty rectangle".into()));
        }
        mats.push(IntMatrix::from_rows(m));
    }
    if let Some(rm) = &r.random {
        if rm.max_dim == 0 || rm.max_entry < 0 {
            return Err(Error::OutOfRange("max_dim must be positive and max_entry nonnegative".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(rm.seed);
        for _ in 0..rm.count {
            let (rows, cols) = (rng.gen_range(1..=rm.max_dim), rng.gen_range(1..=rm.max_dim));
            let m: Vec<Vec<i64>> =
                (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-rm.max_entry..=rm.max_entry)).collect()).collect();
            mats.push(IntMatrix::from_rows(&m));
        }
    }
    let mut failures = Vec::new();
    let mut single = Value::Null;
    for (i, m) in mats.iter().enumerate() {
        let bad = snf_failures(m);
        if !bad.is_empty() {
            failures.push(json!({ "case": i, "problems": bad }));
        }
        if r.random.is_none() {
            let (_, d, _) = smith_normal_form(m);
            let diag: Vec<String> = (0..d.rows().min(d.cols())).map(|i| d.get(i, i).to_string()).collect();
            single = json!({ "invariant_factors": diag, "rank": bareiss_rank(m) });
        }
    }
    let passed = mats.len() - failures.len();
    let row = Row::new("snf", format!("cases:{}", mats.len()), "", passed.to_string())
        .status(if failures.is_empty() { "ok" } else { "fail" });
    let mut result = json!({ "cases": mats.len(), "passed": passed, "failures": failures });
    if !single.is_null() {
        result["smith"] = single;
    }
    Ok(Outcome::new(result, vec![row]))
}

fn microstates(r: &MicrostatesReq) -> Result<Outcome> {
    let sys = r.system.build()?;
    let g = sys.group().clone();
    let f = window(&g, &r.window)?;
    let sigma = sofic_map(&g, &r.sofic)?;
    let spec = MicrostateSpaceSpec::new(sys, metric(&r.metric)?, f, r.delta.value()?, sigma)?;
    let eps = r.eps.value()?;
    let c = count_separated_microstates(&spec, &eps, r.budget)?;
    let mut result = json!({
        "count": c.count,
        "d": c.d,
        "estimate": c.estimate.as_ref().map(log_json),
        "partial": c.partial,
        "method": c.method,
        "examined": c.examined,
    });
    let estimate = c.estimate.as_ref().map_or("-inf".to_string(), |e| e.to_string());
    let mut rows = vec![Row::new("microstates", &r.window, c.count.to_string(), estimate)
        .witness(format!("d={} eps={} examined={}", c.d, q(&eps), c.examined))
        .status(if c.partial { "partial" } else { "ok" })];
    let mut partial = c.partial;
    if r.lemma {
        let found = enumerate_members(&spec, r.budget)?;
        let (mut yes, mut no, mut undecided) = (0, 0, 0);
        for phi in &found.members {
            match map_lowerbound_check(&spec, phi)?.verdict {
                Verdict::Yes => yes += 1,
                Verdict::No => no += 1,
                Verdict::Undecided => undecided += 1,
            }
        }
        result["lemma"] = json!({
            "members": found.members.len(),
            "holds": yes,
            "violations": no,
            "undecided": undecided,
            "partial": found.partial,
        });
        partial |= found.partial;
        rows.push(
            Row::new("map-lemma", &r.window, yes.to_string(), found.members.len().to_string())
                .witness(format!("violations={no} undecided={undecided}"))
                .status(if no > 0 {
                    "fail"
                } else if found.partial {
                    "partial"
                } else {
                    "ok"
                }),
        );
    }
    Ok(Outcome { result, rows, partial })
}

fn decay(r: &DecayReq) -> Result<Outcome> {
    let sys = r.system.build()?;
    let grid = r.grid.iter().map(Num::value).collect::<Result<Vec<_>>>()?;
    let t = decay_diagnostic(&sys, &base(&r.metric)?, &grid, &family(sys.group(), &r.family)?)?;
    let rows_json: Vec<Value> = t
        .rows
        .iter()
        .map(|x| {
            json!({
                "eps": q(&x.eps),
                "entropy_ratio": x.entropy_ratio,
                "count_ratio": x.count_ratio,
                "product": x.product,
                "entropy_upper": log_json(&x.entropy_upper),
            })
        })
        .collect();
    let rows = t
        .rows
        .iter()
        .map(|x| Row::new("decay", format!("eps={}", q(&x.eps)), "", x.product.to_string()).witness(x.entropy_upper.to_string()))
        .collect();
    Ok(Outcome::new(json!({ "rows": rows_json, "trending_to_zero": t.trending_to_zero }), rows))
}

