use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use meandim::rational::parse_rational;

mod config;
mod exec;
mod presets;
mod report;

use config::*;

#[derive(Parser)]
#[command(name = "meandim", version, about = "Naive dynamical invariants of shifts and group-ring modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct OutputArgs {
    /// write the JSON report here (`-` for stdout)
    #[arg(long, value_name = "PATH")]
    json: Option<String>,
    /// write the TSV table here (`-` for stdout)
    #[arg(long, value_name = "PATH")]
    tsv: Option<String>,
    /// leave request timings out of the report
    #[arg(long)]
    mask_timings: bool,
}

// `--sofic SPEC`, or `--d` with an optional `--seed`. On `free:2` a seed
// samples an exact finite quotient of degree at most `d`; elsewhere it
// draws random permutations of degree `d`. Without a seed the map is cyclic.
#[derive(Args, Clone)]
struct SoficArgs {
    /// cyclic:D, torus:SIDE, random:D:SEED or quotient:MIN..MAX:SEED
    #[arg(long, conflicts_with_all = ["d", "seed"])]
    sofic: Option<String>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl SoficArgs {
    fn resolve(&self, group: &str) -> Result<String, String> {
        if let Some(s) = &self.sofic {
            return Ok(s.clone());
        }
        let d = self.d.ok_or("give --sofic or --d")?;
        let free2 = matches!(meandim::GroupSpec::parse_compact(group), Ok(meandim::GroupSpec::Free { rank: 2 }));
        match self.seed {
            Some(seed) if free2 => Ok(format!("quotient:1..{d}:{seed}")),
            Some(seed) => Ok(format!("random:{d}:{seed}")),
            None => Ok(format!("cyclic:{d}")),
        }
    }
}

#[derive(Args, Clone)]
struct SystemArgs {
    /// full:K, cube:M, line:0,1/2,1, golden-mean or sft:K:00,11
    #[arg(long)]
    system: String,
    #[arg(long, default_value = "lattice:1")]
    group: String,
}

impl SystemArgs {
    fn spec(&self) -> SystemSpec {
        SystemSpec { group: GroupArg::Compact(self.group.clone()), shift: self.system.clone(), forbidden: Vec::new() }
    }
}

fn rational(text: &str) -> Result<String, String> {
    parse_rational(text).map(|_| text.to_string()).map_err(|e| e.to_string())
}

fn num(text: String) -> Num {
    Num::Text(text)
}

#[derive(Subcommand)]
enum Command {
    /// Execute a run config file or a shipped preset.
    Run {
        config: Option<PathBuf>,
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Print the JSON Schema every report validates against.
    Schema,
    /// List the shipped presets, or print one.
    Presets {
        #[arg(long)]
        show: Option<String>,
    },
    /// Describe a group: generators, order and ball sizes.
    GroupInfo {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Build a sofic approximation and print its generator permutations.
    SoficGen {
        #[arg(long)]
        group: String,
        #[command(flatten)]
        sofic: SoficArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Measure multiplicativity and separation of a sofic approximation on a window.
    SoficAudit {
        #[arg(long)]
        group: String,
        #[arg(long = "F")]
        window: String,
        #[arg(long, default_value = "1/10", value_parser = rational)]
        tau: String,
        #[command(flatten)]
        sofic: SoficArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Quasi-tile a sofic approximation by translates of a window.
    Tile {
        #[arg(long)]
        group: String,
        #[arg(long = "F")]
        window: String,
        #[arg(long, value_parser = rational)]
        tau: String,
        #[arg(long, default_value = "0", value_parser = rational)]
        eta: String,
        /// list every tile in the report
        #[arg(long)]
        tiles: bool,
        #[command(flatten)]
        sofic: SoficArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Bracket the naive ε-entropy of a shift over a window family.
    Entropy {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value = "disc")]
        metric: String,
        #[arg(long, value_parser = rational)]
        eps: String,
        #[arg(long)]
        family: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Bracket the naive mean dimension of a shift.
    Mdim {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, value_parser = rational)]
        eps: String,
        #[arg(long)]
        family: String,
        #[arg(long, value_parser = rational)]
        eps0: Option<String>,
        #[arg(long)]
        refinement: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Bracket the orbit capacity of a cylinder set.
    Ocap {
        #[command(flatten)]
        system: SystemArgs,
        /// a cylinder as `word=letter,...`, e.g. `e=1`; repeat for a union
        #[arg(long = "cylinder", required = true)]
        cylinders: Vec<String>,
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 1 << 20)]
        budget: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Bracket the naive mean rank of a submodule of a presented module.
    Meanrank {
        #[arg(long, conflicts_with = "module")]
        preset: Option<String>,
        /// module file path
        #[arg(long)]
        module: Option<PathBuf>,
        #[arg(long)]
        family: String,
        /// comma-separated radii
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<usize>>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Enumerate microstates and count separated families.
    Microstates {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value = "disc")]
        metric: String,
        #[arg(long = "F")]
        window: String,
        #[arg(long, value_parser = rational)]
        delta: String,
        #[arg(long, value_parser = rational)]
        eps: String,
        #[arg(long, default_value_t = 1 << 20)]
        budget: usize,
        /// also check the counting lemma on every enumerated member
        #[arg(long)]
        lemma: bool,
        #[command(flatten)]
        sofic: SoficArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Tabulate ε-entropy bounds across a grid of scales.
    Decay {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value = "disc")]
        metric: String,
        /// comma-separated values of ε in (0, 1)
        #[arg(long, value_delimiter = ',', required = true, value_parser = rational)]
        grid: Vec<String>,
        #[arg(long)]
        family: String,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn cylinder(text: &str) -> Result<PatternSpec, String> {
    let mut window = Vec::new();
    let mut letters = Vec::new();
    for part in text.split(',') {
        let (w, a) = part.split_once('=').ok_or_else(|| format!("expected word=letter in `{part}`"))?;
        window.push(w.trim().to_string());
        letters.push(a.trim().parse().map_err(|_| format!("bad letter in `{part}`"))?);
    }
    Ok(PatternSpec { window, letters })
}

/// Builds the one-request config a subcommand stands for.
fn single(command: Command) -> Result<(RunConfig, OutputArgs), String> {
    let (req, out) = match command {
        Command::Run { .. } | Command::Presets { .. } | Command::Schema => unreachable!("handled by the caller"),
        Command::GroupInfo { group, radius, out } => {
            (Request::GroupInfo(GroupInfoReq { id: None, group: GroupArg::Compact(group), radius }), out)
        }
        Command::SoficGen { group, sofic, out } => {
            let sofic = sofic.resolve(&group)?;
            (Request::SoficGen(SoficGenReq { id: None, group: GroupArg::Compact(group), sofic }), out)
        }
        Command::SoficAudit { group, window, tau, sofic, out } => {
            let sofic = sofic.resolve(&group)?;
            let req = SoficAuditReq { id: None, group: GroupArg::Compact(group), sofic, window, tau: num(tau) };
            (Request::SoficAudit(req), out)
        }
        Command::Tile { group, window, tau, eta, tiles, sofic, out } => {
            let sofic = sofic.resolve(&group)?;
            let req =
                TileReq { id: None, group: GroupArg::Compact(group), sofic, window, tau: num(tau), eta: num(eta), tiles };
            (Request::Tile(req), out)
        }
        Command::Entropy { system, metric, eps, family, out } => {
            (Request::Entropy(EntropyReq { id: None, system: system.spec(), metric, eps: num(eps), family }), out)
        }
        Command::Mdim { system, eps, family, eps0, refinement, out } => {
            let req = MdimReq { id: None, system: system.spec(), eps: num(eps), family, eps0: eps0.map(num), refinement };
            (Request::Mdim(req), out)
        }
        Command::Ocap { system, cylinders, family, budget, out } => {
            let set = cylinders.iter().map(|c| cylinder(c)).collect::<Result<Vec<_>, _>>()?;
            (Request::Ocap(OcapReq { id: None, system: system.spec(), set, family, budget }), out)
        }
        Command::Meanrank { preset, module, family, schedule, out } => {
            let module = match (preset, module) {
                (Some(p), None) => ModuleSpec { preset: Some(p), path: None, text: None },
                (None, Some(m)) => ModuleSpec { preset: None, path: Some(m.display().to_string()), text: None },
                _ => return Err("give --preset or --module".into()),
            };
            (Request::Meanrank(MeanrankReq { id: None, module, family, schedule }), out)
        }
        Command::Microstates { system, metric, window, delta, eps, budget, lemma, sofic, out } => {
            let sofic = sofic.resolve(&system.group)?;
            let req = MicrostatesReq {
                id: None,
                system: system.spec(),
                metric,
                window,
                delta: num(delta),
                sofic,
                eps: num(eps),
                budget,
                lemma,
            };
            (Request::Microstates(req), out)
        }
        Command::Decay { system, metric, grid, family, out } => {
            let grid = grid.into_iter().map(num).collect();
            (Request::Decay(DecayReq { id: None, system: system.spec(), metric, grid, family }), out)
        }
    };
    Ok((RunConfig { name: None, output: None, requests: vec![req] }, out))
}

fn write_to(path: &str, text: &str) -> Result<(), String> {
    if path == "-" {
        print!("{text}");
        Ok(())
    } else {
        std::fs::write(path, text).map_err(|e| format!("cannot write {path}: {e}"))
    }
}

/// Runs the config and writes the outputs; returns the process exit code.
fn execute(config: RunConfig, out: OutputArgs) -> Result<ExitCode, String> {
    let file = config.output.clone().unwrap_or(Output { json: None, tsv: None });
    let json = out.json.or(file.json);
    let tsv = out.tsv.or(file.tsv);
    let report = report::run(&config, out.mask_timings);
    match (&json, &tsv) {
        (None, None) => print!("{}", report.to_json()),
        _ => {
            if let Some(p) = &json {
                write_to(p, &report.to_json())?;
            }
            if let Some(p) = &tsv {
                write_to(p, &report.to_tsv())?;
            }
        }
    }
    Ok(if report.has_errors() { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("MEANDIM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or(format!("MEANDIM_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let usage = |msg: String| {
        eprintln!("meandim: {msg}");
        ExitCode::from(2)
    };
    if let Err(e) = configure_threads() {
        return usage(e);
    }
    let outcome = match cli.command {
        Command::Schema => {
            print!("{}", report::SCHEMA_JSON);
            return ExitCode::SUCCESS;
        }
        Command::Presets { show: None } => {
            for (name, _) in presets::PRESETS {
                println!("{name}");
            }
            return ExitCode::SUCCESS;
        }
        Command::Presets { show: Some(name) } => match presets::get(&name) {
            Some(text) => {
                print!("{text}");
                return ExitCode::SUCCESS;
            }
            None => return usage(format!("unknown preset `{name}`")),
        },
        Command::Run { config, preset, out } => {
            let text = match (config, preset) {
                (Some(path), None) => match std::fs::read_to_string(&path) {
                    Ok(t) => t,
                    Err(e) => return usage(format!("cannot read {}: {e}", path.display())),
                },
                (None, Some(name)) => match presets::get(&name) {
                    Some(t) => t.to_string(),
                    None => return usage(format!("unknown preset `{name}`")),
                },
                _ => return usage("give a config path or --preset".into()),
            };
            match parse_config(&text) {
                Ok(c) => execute(c, out),
                Err(e) => return usage(e.to_string()),
            }
        }
        other => match single(other) {
            Ok((c, out)) => execute(c, out),
            Err(e) => return usage(e),
        },
    };
    outcome.unwrap_or_else(usage)
}
