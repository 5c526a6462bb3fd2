//! Command-line front end: argument parsing, run configuration and report
//! assembly.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::analysis::{
    adversarial_optimum, is_acyclic, lifted_orientation, max_aligned_circulation, run_demo, v1_edge_mask, V0Rule,
};
use crate::error::{Error, Result};
use crate::expansion::{verify_materialized, CheckOutcome, Materialized};
use crate::io::{format_rational, graph_from_json, graph_to_json};
use crate::sampler::{tree_stats, tree_stats_csv};
use crate::tower::{
    tail_check, v0_fraction, BuildOptions, LevelGraph, ScheduleConfig, StepConfig, SubsetConfig,
    Tower, TowerConfig, DEFAULT_LIMIT,
};
use crate::Rational;

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Parser)]
#[command(name = "treelab", version, about = "Build, verify and sample towers of graph expansions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the counts of every level and step.
    Params(CommonArgs),
    /// Build the tower and summarize each level.
    Build(CommonArgs),
    /// Run every structural check on the materialized levels.
    Verify(VerifyArgs),
    /// Ball statistics along sampled vertex sequences.
    Sample(SampleArgs),
    /// Matching, circulation and potential pipeline on one level.
    Demo(CommonArgs),
    /// Graph JSON of a materialized level.
    Export(ExportArgs),
    /// Counts, checks and the demo in a single report.
    Report(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleMode {
    Paper,
    Desk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// `all` or a subset size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubsetArg {
    All,
    Size(usize),
}

fn parse_subset(s: &str) -> std::result::Result<SubsetArg, String> {
    if s == "all" {
        return Ok(SubsetArg::All);
    }
    s.parse()
        .map(SubsetArg::Size)
        .map_err(|_| format!("expected \"all\" or a subset size, got {s:?}"))
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Degree of the root `K_{d,d}`.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Range per desk step, comma separated; the last value repeats.
    #[arg(long = "N", value_delimiter = ',', default_value = "3")]
    pub n: Vec<u64>,
    /// Orientation subset per desk step: "all" or a size drawn at random.
    #[arg(long, default_value = "1", value_parser = parse_subset)]
    pub subset: SubsetArg,
    /// Number of levels, the root included.
    #[arg(long, default_value_t = 2)]
    pub levels: usize,
    #[arg(long, value_enum, default_value_t = ScheduleMode::Desk)]
    pub schedule: ScheduleMode,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Largest level to materialize, in vertices.
    #[arg(long, env = "TREELAB_LIMIT")]
    pub limit: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Removes one edge of the top level before checking.
    #[arg(long, hide = true)]
    pub mutate_remove_edge: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 2)]
    pub radius: usize,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Level to export; the deepest materialized one by default.
    #[arg(long)]
    pub level: Option<usize>,
    /// Re-export a graph JSON file instead of building one.
    #[arg(long)]
    pub from: Option<PathBuf>,
}

/// Everything a run depends on.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub tower: TowerConfig,
    pub limit: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutate_remove_edge: Option<usize>,
}

impl RunConfig {
    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serialization is infallible");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn build_tower(&self, require_explicit: bool) -> Result<Tower> {
        self.tower.build(BuildOptions {
            limit: self.limit,
            require_explicit,
        })
    }
}

impl CommonArgs {
    /// Tower configuration; desk subset seeds are `seed + step`.
    pub fn tower_config(&self) -> Result<TowerConfig> {
        if self.d == 0 {
            return Err(Error::ZeroDegree);
        }
        if self.levels == 0 {
            return Err(Error::Config("--levels must be at least 1".into()));
        }
        let schedule = match self.schedule {
            ScheduleMode::Paper => ScheduleConfig {
                mode: "paper".into(),
                levels: Vec::new(),
            },
            ScheduleMode::Desk => {
                let last = *self
                    .n
                    .last()
                    .ok_or_else(|| Error::Config("--N needs at least one value".into()))?;
                let levels = (0..self.levels - 1)
                    .map(|i| StepConfig {
                        n: self.n.get(i).copied().unwrap_or(last),
                        subset: match self.subset {
                            SubsetArg::All => SubsetConfig::Named("all".into()),
                            SubsetArg::Size(size) => SubsetConfig::Random {
                                size,
                                seed: self.seed.wrapping_add(i as u64),
                            },
                        },
                    })
                    .collect();
                ScheduleConfig {
                    mode: "desk".into(),
                    levels,
                }
            }
        };
        Ok(TowerConfig {
            d: self.d,
            depth: self.levels,
            schedule,
        })
    }

    pub fn run_config(&self, command: &'static str) -> Result<RunConfig> {
        Ok(RunConfig {
            command,
            tower: self.tower_config()?,
            limit: self.limit.unwrap_or(DEFAULT_LIMIT),
            seed: self.seed,
            radius: None,
            samples: None,
            level: None,
            mutate_remove_edge: None,
        })
    }
}

/// What a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub output: String,
    /// False when a check failed.
    pub passed: bool,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    config: &'a RunConfig,
    config_hash: String,
    seed: u64,
    #[serde(flatten)]
    body: T,
}

fn report<T: Serialize>(config: &RunConfig, body: T) -> String {
    let env = Envelope {
        config,
        config_hash: config.hash(),
        seed: config.seed,
        body,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("report serialization is infallible");
    s.push('\n');
    s
}

fn level_kind(graph: &LevelGraph) -> &'static str {
    match graph {
        LevelGraph::Root(_) => "root",
        LevelGraph::Materialized(_) => "materialized",
        LevelGraph::Implicit(_) => "implicit",
        LevelGraph::Symbolic { .. } => "symbolic",
    }
}

fn level_summaries(tower: &Tower) -> Result<Vec<Value>> {
    tower
        .levels()
        .iter()
        .map(|l| {
            let mut v = json!({
                "index": l.index,
                "kind": level_kind(&l.graph),
                "counts": l.counts,
            });
            if let LevelGraph::Symbolic { reason } = &l.graph {
                v["reason"] = json!(reason);
            }
            if l.index >= 2 {
                v["v0_fraction"] = serde_json::to_value(v0_fraction(tower, l.index - 1)?)?;
            }
            Ok(v)
        })
        .collect()
}

fn params_text(tower: &Tower, config: &RunConfig) -> Result<String> {
    let mut out = format!(
        "d = {}, schedule = {}, levels = {}\n",
        config.tower.d, config.tower.schedule.mode, config.tower.depth
    );
    for l in tower.levels() {
        if let Some(step) = &l.counts.step {
            out.push_str(&format!(
                "step {}: N = {}, K = {}\n",
                l.index - 1,
                step.n.formula(),
                step.k.formula()
            ));
            out.push_str(&format!(
                "level {}: fiber = {}, vertices = {}, edges = {}, V1 = {}, V0 = {}\n",
                l.index, step.fiber_size, l.counts.vertices, l.counts.edges, step.v1_count, step.v0_count
            ));
            let m = v0_fraction(tower, l.index - 1)?;
            let kind = if m.is_exact() { "exact" } else { "at most" };
            out.push_str(&format!(
                "level {}: padding fraction {kind} {}\n",
                l.index,
                format_rational(m.value())
            ));
        } else {
            out.push_str(&format!(
                "level {}: vertices = {}, edges = {}\n",
                l.index, l.counts.vertices, l.counts.edges
            ));
        }
    }
    Ok(out)
}

fn tail_reports(tower: &Tower) -> Result<Vec<crate::tower::TailReport>> {
    (0..tower.depth()).map(|n| tail_check(tower, n)).collect()
}

fn cmd_params(args: &CommonArgs) -> Result<Outcome> {
    let config = args.run_config("params")?;
    // Counting never needs a graph.
    let tower = config.tower.build(BuildOptions {
        limit: 0,
        require_explicit: false,
    })?;
    let output = match args.format.unwrap_or(Format::Text) {
        Format::Text => params_text(&tower, &config)?,
        Format::Json => report(&config, json!({ "levels": level_summaries(&tower)? })),
        Format::Csv => return Err(Error::Config("params has no CSV form".into())),
    };
    Ok(Outcome { output, passed: true })
}

fn cmd_build(args: &CommonArgs) -> Result<Outcome> {
    let config = args.run_config("build")?;
    let tower = config.build_tower(false)?;
    let body = json!({
        "representable_depth": tower.representable_depth(),
        "levels": level_summaries(&tower)?,
    });
    Ok(Outcome {
        output: report(&config, body),
        passed: true,
    })
}

/// The checks of one materialized level.
fn level_checks(m: &Materialized) -> Result<Vec<CheckOutcome>> {
    let mut checks = verify_materialized(m).checks;
    let mask = v1_edge_mask(m);
    for s in 0..m.params().k() {
        let o = lifted_orientation(m, m.params().orientation(s), V0Rule::LowToHigh)?;
        let acyclic = is_acyclic(m.graph(), &o, Some(&mask))?;
        let aligned = max_aligned_circulation(m.graph(), &o, Some(&mask))?.value;
        let passed = acyclic && aligned == Rational::from_integer(0.into());
        checks.push(CheckOutcome {
            name: format!("aligned_v1_zero[{s}]"),
            passed,
            detail: format!("acyclic = {acyclic}, aligned optimum = {}", format_rational(&aligned)),
            witness: None,
        });
    }
    let o = lifted_orientation(m, m.params().orientation(0), V0Rule::Adversarial)?;
    let aligned = max_aligned_circulation(m.graph(), &o, None)?.value;
    let cut = m.params().degree() * m.v0_count();
    let expected = adversarial_optimum(m);
    checks.push(CheckOutcome {
        name: "aligned_cut_bound".into(),
        passed: aligned <= Rational::from_integer(cut.into())
            && aligned == Rational::from_integer(expected.into()),
        detail: format!(
            "aligned optimum {} (expected {expected}) against d·|V0| = {cut}",
            format_rational(&aligned)
        ),
        witness: None,
    });
    Ok(checks)
}

fn cmd_verify(args: &VerifyArgs) -> Result<Outcome> {
    let mut config = args.common.run_config("verify")?;
    config.mutate_remove_edge = args.mutate_remove_edge;
    let tower = config.build_tower(true)?;
    let top = tower.depth();
    let mut levels = Vec::new();
    let mut passed = true;
    for l in tower.levels().iter().filter(|l| l.index >= 2) {
        let m = l.materialized().expect("every level above the root is explicit");
        let mutated;
        let m = match args.mutate_remove_edge {
            Some(e) if l.index == top => {
                mutated = m.without_edge(e)?;
                &mutated
            }
            _ => m,
        };
        let checks = level_checks(m)?;
        passed &= checks.iter().all(|c| c.passed);
        levels.push(json!({ "level": l.index, "checks": checks }));
    }
    let tails = tail_reports(&tower)?;
    passed &= tails.iter().all(|t| t.holds);
    let body = json!({ "passed": passed, "levels": levels, "tail": tails });
    Ok(Outcome {
        output: report(&config, body),
        passed,
    })
}

fn cmd_sample(args: &SampleArgs) -> Result<Outcome> {
    let mut config = args.common.run_config("sample")?;
    config.radius = Some(args.radius);
    config.samples = Some(args.samples);
    let tower = config.build_tower(false)?;
    let levels: Vec<usize> = (1..=tower.representable_depth()).collect();
    let rows = tree_stats(&tower, &levels, args.radius, args.samples, args.common.seed)?;
    let output = match args.common.format.unwrap_or(Format::Csv) {
        Format::Csv => tree_stats_csv(&rows),
        Format::Json => report(&config, json!({ "rows": rows })),
        Format::Text => return Err(Error::Config("sample writes CSV or JSON".into())),
    };
    Ok(Outcome { output, passed: true })
}

fn deepest_materialized(tower: &Tower) -> Result<&Materialized> {
    tower
        .levels()
        .iter()
        .rev()
        .find_map(|l| l.materialized())
        .ok_or_else(|| Error::LevelUnavailable {
            level: 2,
            reason: "no level above the root fits under the materialization limit".into(),
        })
}

fn cmd_demo(args: &CommonArgs) -> Result<Outcome> {
    let config = args.run_config("demo")?;
    let tower = config.build_tower(false)?;
    let m = deepest_materialized(&tower)?;
    let r = run_demo(m, args.seed)?;
    let passed = r.passed();
    Ok(Outcome {
        output: report(&config, r),
        passed,
    })
}

fn cmd_export(args: &ExportArgs) -> Result<Outcome> {
    let mut output = if let Some(path) = &args.from {
        graph_to_json(&graph_from_json(&std::fs::read_to_string(path)?)?)
    } else {
        let mut config = args.common.run_config("export")?;
        config.level = args.level;
        let tower = config.build_tower(false)?;
        match args.level {
            Some(n) => match &tower.level(n)?.graph {
                LevelGraph::Root(g) => graph_to_json(g),
                LevelGraph::Materialized(m) => graph_to_json(m.graph()),
                _ => {
                    return Err(Error::LevelUnavailable {
                        level: n,
                        reason: "level is not materialized".into(),
                    })
                }
            },
            None => graph_to_json(deepest_materialized(&tower)?.graph()),
        }
    };
    output.push('\n');
    Ok(Outcome { output, passed: true })
}

fn cmd_report(args: &CommonArgs) -> Result<Outcome> {
    let config = args.run_config("report")?;
    let tower = config.build_tower(false)?;
    let mut passed = true;
    let mut levels = Vec::new();
    for l in tower.levels() {
        if let Some(m) = l.materialized() {
            let checks = level_checks(m)?;
            let ok = checks.iter().all(|c| c.passed);
            passed &= ok;
            levels.push(json!({
                "level": l.index,
                "passed": ok,
                "failures": checks.into_iter().filter(|c| !c.passed).collect::<Vec<_>>(),
            }));
        }
    }
    let tails = tail_reports(&tower)?;
    passed &= tails.iter().all(|t| t.holds);
    let demo = match deepest_materialized(&tower) {
        Ok(m) => {
            let r = run_demo(m, args.seed)?;
            passed &= r.passed();
            serde_json::to_value(r)?
        }
        Err(_) => Value::Null,
    };
    let body = json!({
        "passed": passed,
        "counts": level_summaries(&tower)?,
        "verification": levels,
        "tail": tails,
        "demo": demo,
    });
    Ok(Outcome {
        output: report(&config, body),
        passed,
    })
}

fn out_path(cli: &Cli) -> Option<&PathBuf> {
    match &cli.command {
        Command::Params(a) | Command::Build(a) | Command::Demo(a) | Command::Report(a) => a.out.as_ref(),
        Command::Verify(a) => a.common.out.as_ref(),
        Command::Sample(a) => a.common.out.as_ref(),
        Command::Export(a) => a.common.out.as_ref(),
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Params(a) => cmd_params(a),
        Command::Build(a) => cmd_build(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Demo(a) => cmd_demo(a),
        Command::Export(a) => cmd_export(a),
        Command::Report(a) => cmd_report(a),
    }
}

/// Runs the command and writes its output; returns the process exit code.
pub fn run(cli: &Cli) -> u8 {
    let outcome = match execute(cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let written = match out_path(cli) {
        Some(path) => std::fs::write(path, &outcome.output),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(outcome.output.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 2;
    }
    if outcome.passed {
        0
    } else {
        1
    }
}
