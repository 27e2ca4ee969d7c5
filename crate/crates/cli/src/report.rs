//! Report assembly. Field order is fixed by the structs and objects are
//! key-sorted, so equal inputs give equal bytes.

use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::config::{RunConfig, SeedRegistry};
use crate::exec::{execute, Row};

pub const SCHEMA: &str = "meandim-report/1";
pub const SCHEMA_JSON: &str = include_str!("../schema/report.schema.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Partial,
    Error,
}

#[derive(Debug, Serialize)]
pub struct RequestReport {
    pub id: String,
    pub op: String,
    pub status: Status,
    pub elapsed_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub result: Value,
    pub rows: Vec<Row>,
}

#[derive(Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub requests: usize,
    pub ok: usize,
    pub partial: usize,
    pub error: usize,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub tool: Tool,
    pub config: RunConfig,
    pub seeds: SeedRegistry,
    pub results: Vec<RequestReport>,
    pub summary: Summary,
}

impl RunReport {
    pub fn has_errors(&self) -> bool {
        self.summary.error > 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_tsv(&self) -> String {
        let clean = |s: &str| s.replace(['\t', '\n', '\r'], " ");
        let mut out = String::from("invariant\twindow\tlower\tupper\twitness\tstatus\n");
        for r in &self.results {
            out.push_str(&format!("# {} {} {}\n", r.id, r.op, serde_json::to_string(&r.status).unwrap().trim_matches('"')));
            if let Some(e) = &r.error {
                out.push_str(&format!("{}\t\t\t\t{}\terror\n", r.op, clean(e)));
            }
            for row in &r.rows {
                let fields = [&row.invariant, &row.window, &row.lower, &row.upper, &row.witness, &row.status];
                out.push_str(&fields.iter().map(|f| clean(f)).collect::<Vec<_>>().join("\t"));
                out.push('\n');
            }
        }
        out
    }
}

/// Executes every request in order. Timings are left out when `mask` is set.
pub fn run(config: &RunConfig, mask: bool) -> RunReport {
    let mut seeds = SeedRegistry::new();
    let mut results = Vec::new();
    for (i, req) in config.requests.iter().enumerate() {
        let id = req.id().map_or_else(|| format!("#{i}"), str::to_string);
        let used = req.seeds();
        if !used.is_empty() {
            seeds.insert(id.clone(), used);
        }
        let start = Instant::now();
        let outcome = execute(req);
        let elapsed = (!mask).then(|| start.elapsed().as_millis() as u64);
        results.push(match outcome {
            Ok(o) => RequestReport {
                id,
                op: req.op().into(),
                status: if o.partial { Status::Partial } else { Status::Ok },
                elapsed_ms: elapsed,
                error: None,
                result: o.result,
                rows: o.rows,
            },
            Err(e) => RequestReport {
                id,
                op: req.op().into(),
                status: Status::Error,
                elapsed_ms: elapsed,
                error: Some(e.to_string()),
                result: Value::Null,
                rows: Vec::new(),
            },
        });
    }
    let count = |s: Status| results.iter().filter(|r| r.status == s).count();
    let summary = Summary {
        requests: results.len(),
        ok: count(Status::Ok),
        partial: count(Status::Partial),
        error: count(Status::Error),
    };
    RunReport {
        schema: SCHEMA,
        tool: Tool { name: "meandim", version: env!("CARGO_PKG_VERSION") },
        config: config.clone(),
        seeds,
        results,
        summary,
    }
}
