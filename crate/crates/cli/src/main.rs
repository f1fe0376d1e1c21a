use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use resilnet_core::harness::{self, PredictorKind, ScenarioConfig};
use resilnet_core::metrics::{metrics_report, DEFAULT_ADOPTION_THRESHOLD, DEFAULT_DECAY};
use resilnet_core::service::{ServiceTrace, SlaTier, SlaTiers};
use resilnet_core::topology::{self, DisruptionRegion, FlowRequest, NodeId, Topology};

#[derive(Parser)]
#[command(name = "resilnet", version, about = "Wireless resilience simulator and analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write summary.json (and slots.csv).
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run several policies over seeded replications.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// Comma-separated: oracle,markov,average,worst_state,diversity,fixed
        #[arg(long, value_delimiter = ',', default_value = "oracle,markov,average,worst_state")]
        kinds: Vec<String>,
        #[arg(long, default_value_t = 1)]
        reps: u64,
        #[arg(long)]
        out: PathBuf,
        /// Run replications on the calling thread.
        #[arg(long)]
        serial: bool,
    },
    /// Score a `t,s` service trace.
    Metrics {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ADOPTION_THRESHOLD)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_DECAY)]
        tau: f64,
        /// Phase weights (absorption,adoption,recovery); defaults to equal.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analyse a topology file.
    Graph {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long, value_enum)]
        analysis: Analysis,
        #[arg(long)]
        source: Option<u32>,
        #[arg(long)]
        destination: Option<u32>,
        /// Circle region as `x,y,radius`.
        #[arg(long, value_delimiter = ',')]
        region_circle: Option<Vec<f64>>,
        /// Region as an explicit node list.
        #[arg(long, value_delimiter = ',')]
        region_nodes: Option<Vec<u32>>,
        /// Nodes to remove for `isolate`.
        #[arg(long, value_delimiter = ',')]
        remove: Option<Vec<u32>>,
        /// JSON file with `tiers` and `flows` for `shed`.
        #[arg(long)]
        flows: Option<PathBuf>,
        #[arg(long)]
        capacity: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Analysis {
    Connectivity,
    Critical,
    Isolate,
    Reroute,
    Shed,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct FlowFile {
    tiers: Vec<SlaTier>,
    flows: Vec<FlowEntry>,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct FlowEntry {
    id: u32,
    source: NodeId,
    destination: NodeId,
    demand: f64,
    tier: String,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(value: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run(scenario: &Path, out: Option<PathBuf>, seed: Option<u64>) -> Result<()> {
    let mut config = ScenarioConfig::from_json(&read(scenario)?)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let dir = out
        .or_else(|| config.output.dir.clone().map(PathBuf::from))
        .context("no output directory: pass --out or set output.dir")?;
    let outcome = harness::run_scenario(&config)?;
    let summary = harness::write_run_outputs(&dir, &outcome, config.output.per_slot_csv)?;
    eprintln!(
        "{}: achieved outage {:.5} (target {}), mean allocation {:.4}, overhead vs oracle {:.2}%",
        summary.kind,
        summary.achieved_outage,
        summary.target_outage,
        summary.mean_allocation,
        100.0 * summary.overhead_vs_oracle
    );
    Ok(())
}

fn sweep(scenario: &Path, kinds: &[String], reps: u64, out: &Path, serial: bool) -> Result<()> {
    if reps < 1 {
        bail!("--reps must be >= 1");
    }
    let config = ScenarioConfig::from_json(&read(scenario)?)?;
    let kinds = kinds
        .iter()
        .filter(|k| !k.trim().is_empty())
        .map(|k| k.parse::<PredictorKind>())
        .collect::<Result<Vec<_>, _>>()?;
    let reports = if serial {
        harness::run_sweep_serial(&config, &kinds, reps)?
    } else {
        harness::run_sweep(&config, &kinds, reps)?
    };
    harness::write_sweep_outputs(out, &reports)?;
    eprintln!("{} rows written to {}", reports.len(), out.display());
    Ok(())
}

fn metrics(trace: &Path, alpha: f64, tau: f64, weights: Option<Vec<f64>>, out: Option<&Path>) -> Result<()> {
    let trace = ServiceTrace::read_csv(fs::File::open(trace).with_context(|| format!("opening {}", trace.display()))?)?;
    let weights = match weights.as_deref() {
        Some(&[a, b, c]) => [a, b, c],
        Some(_) => bail!("--weights needs exactly three values"),
        None => [1.0 / 3.0; 3],
    };
    let report = metrics_report(&trace, alpha, tau, weights)?;
    emit(&serde_json::to_value(report)?, out)
}

fn region(circle: Option<Vec<f64>>, nodes: Option<Vec<u32>>) -> Result<DisruptionRegion> {
    Ok(match (circle, nodes) {
        (Some(_), Some(_)) => bail!("give either --region-circle or --region-nodes, not both"),
        (Some(c), None) => match c[..] {
            [x, y, r] => DisruptionRegion::circle(x, y, r)?,
            _ => bail!("--region-circle needs exactly three values: x,y,radius"),
        },
        (None, Some(ids)) => DisruptionRegion::Nodes(ids.into_iter().map(NodeId).collect()),
        (None, None) => DisruptionRegion::empty(),
    })
}

fn shed(flows_path: &Path, capacity: f64) -> Result<serde_json::Value> {
    let file: FlowFile = serde_json::from_str(&read(flows_path)?).context("parsing flow file")?;
    let tiers = SlaTiers::new(file.tiers)?;
    let flows = file
        .flows
        .into_iter()
        .map(|f| {
            let tier = tiers.by_name(&f.tier).with_context(|| format!("flow {}: unknown tier `{}`", f.id, f.tier))?;
            Ok(FlowRequest::new(f.id, f.source, f.destination, f.demand, tier.clone())?)
        })
        .collect::<Result<Vec<_>>>()?;
    let admitted = topology::shed_traffic(&flows, capacity);
    let rows: Vec<_> = flows
        .iter()
        .zip(&admitted)
        .map(|(f, a)| json!({"id": f.id, "tier": f.tier.name, "demand": f.demand, "admitted": a}))
        .collect();
    Ok(json!({"analysis": "shed", "capacity": capacity, "flows": rows}))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { scenario, out, seed } => run(&scenario, out, seed),
        Command::Sweep { scenario, kinds, reps, out, serial } => sweep(&scenario, &kinds, reps, &out, serial),
        Command::Metrics { trace, alpha, tau, weights, out } => metrics(&trace, alpha, tau, weights, out.as_deref()),
        Command::Graph {
            topology: path,
            analysis,
            source,
            destination,
            region_circle,
            region_nodes,
            remove,
            flows,
            capacity,
            out,
        } => {
            let g: Topology = serde_json::from_str(&read(&path)?).context("parsing topology")?;
            let report = match analysis {
                Analysis::Connectivity => json!({
                    "analysis": "connectivity",
                    "nodes": g.node_count(),
                    "connected": g.is_connected(),
                    "vertex_connectivity": topology::vertex_connectivity(&g)?,
                }),
                Analysis::Critical => json!({
                    "analysis": "critical",
                    "critical_nodes": topology::critical_nodes(&g)?,
                }),
                Analysis::Isolate => {
                    let ids: Vec<NodeId> = remove.unwrap_or_default().into_iter().map(NodeId).collect();
                    let (_, report) = topology::isolate(&g, &ids)?;
                    json!({"analysis": "isolate", "removed": ids, "report": report})
                }
                Analysis::Reroute => {
                    let (Some(s), Some(d)) = (source, destination) else {
                        bail!("reroute needs --source and --destination");
                    };
                    let region = region(region_circle, region_nodes)?;
                    let path = topology::reroute_avoiding(&g, NodeId(s), NodeId(d), &region)?;
                    json!({"analysis": "reroute", "hops": path.len() - 1, "path": path})
                }
                Analysis::Shed => {
                    let flows = flows.context("shed needs --flows")?;
                    let capacity = capacity.context("shed needs --capacity")?;
                    shed(&flows, capacity)?
                }
            };
            emit(&report, out.as_deref())
        }
    }
}
