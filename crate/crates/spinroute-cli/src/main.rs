//! Command-line front end: build networks and chips, run transfers, compile
//! and simulate routes, drive the dual-rail protocol, and run the invariant
//! battery. Documents are emitted whole (never partially written) and are
//! byte-stable for fixed inputs and seeds.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use spinroute::dualrail::{self, RailKind};
use spinroute::hexchip::{HexChip, HexError, VertexId};
use spinroute::network::{SpinNetwork, NETWORK_FORMAT_VERSION};
use spinroute::pst;
use spinroute::sector::{
    average_fidelity, peak_search, transfer_series, transfer_series_csv, SectorHamiltonian,
};
use spinroute::verify;
use spinroute::SiteId;

/// Exit code used when route planning finds no defect-free path.
const EXIT_UNROUTABLE: u8 = 3;

#[derive(Parser)]
#[command(name = "spinroute", version, about = "Spin-network state-transfer simulator and router")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and validate network documents.
    Net {
        #[command(subcommand)]
        cmd: NetCmd,
    },
    /// Transfer amplitude time series, fidelities, and the peak.
    Transfer(TransferArgs),
    /// Engineered-chain perfect-transfer checks.
    Pst {
        #[command(subcommand)]
        cmd: PstCmd,
    },
    /// Diamond quasi-1D chain protocol.
    Diamond {
        #[command(subcommand)]
        cmd: DiamondCmd,
    },
    /// Hexagonal Hadamard-switch chips: build, check, route.
    Hex {
        #[command(subcommand)]
        cmd: HexCmd,
    },
    /// Dual-rail conclusive transfer runs and disorder sweeps.
    Dualrail {
        #[command(subcommand)]
        cmd: DualrailCmd,
    },
    /// Run the named invariant battery.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Document,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Builder {
    Uniform,
    Pst,
    Diamond,
}

#[derive(Args)]
struct NetworkSource {
    /// Read a network document instead of building one.
    #[arg(long, conflicts_with_all = ["builder", "n", "cells"])]
    net: Option<PathBuf>,
    /// Builder to construct a network on the fly.
    #[arg(long, value_enum)]
    builder: Option<Builder>,
    /// Number of sites (uniform and pst builders).
    #[arg(long)]
    n: Option<usize>,
    /// Number of diamond cells (diamond builder).
    #[arg(long)]
    cells: Option<usize>,
    /// Anisotropy Δ (uniform builder only).
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Uniform field B (uniform builder only).
    #[arg(long, default_value_t = 0.0)]
    field: f64,
}

impl NetworkSource {
    fn load(&self) -> Result<SpinNetwork> {
        if let Some(path) = &self.net {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            return Ok(SpinNetwork::from_json(&text)?);
        }
        let builder = self
            .builder
            .ok_or_else(|| anyhow!("either --net or --builder is required"))?;
        Ok(match builder {
            Builder::Uniform => {
                let n = self.n.ok_or_else(|| anyhow!("--n is required for the uniform builder"))?;
                spinroute::build_uniform_chain(n, self.delta, self.field)?
            }
            Builder::Pst => {
                let n = self.n.ok_or_else(|| anyhow!("--n is required for the pst builder"))?;
                spinroute::build_pst_chain(n)?
            }
            Builder::Diamond => {
                let cells = self
                    .cells
                    .ok_or_else(|| anyhow!("--cells is required for the diamond builder"))?;
                spinroute::build_diamond_chain(cells)?
            }
        })
    }
}

#[derive(Subcommand)]
enum NetCmd {
    /// Emit a network document for a builder.
    Build {
        #[command(flatten)]
        source: NetworkSource,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Check a network document against the type invariants.
    Validate {
        #[arg(long)]
        net: PathBuf,
    },
}

#[derive(Args)]
struct TransferArgs {
    #[command(flatten)]
    source: NetworkSource,
    /// Sender site (0-based; default first site).
    #[arg(long)]
    from: Option<usize>,
    /// Receiver site (0-based; default last site).
    #[arg(long)]
    to: Option<usize>,
    /// End of the scan window (0, t-max].
    #[arg(long, allow_negative_numbers = true)]
    t_max: f64,
    /// Number of scan points.
    #[arg(long, default_value_t = 4000)]
    grid: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PstCmd {
    /// Verify perfect transfer of an engineered chain at a candidate time.
    Verify {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        net: Option<PathBuf>,
        /// Candidate transfer time (default π).
        #[arg(long, default_value_t = std::f64::consts::PI)]
        t: f64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DiamondCmd {
    /// Compile and run the lower-leg pulse schedule for a diamond chain.
    Run {
        #[arg(long)]
        cells: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ChipSource {
    /// Read a chip document.
    #[arg(long, conflicts_with_all = ["layers", "rows", "cols", "junction", "defect"])]
    chip: Option<PathBuf>,
    #[arg(long)]
    layers: Option<u32>,
    #[arg(long)]
    rows: Option<u32>,
    #[arg(long)]
    cols: Option<u32>,
    /// Interlayer junction at l,q,r (joins the vertex above; repeatable).
    #[arg(long = "junction", value_parser = parse_vertex)]
    junction: Vec<VertexId>,
    /// Defective switch at l,q,r (repeatable).
    #[arg(long = "defect", value_parser = parse_vertex)]
    defect: Vec<VertexId>,
}

impl ChipSource {
    fn load(&self) -> Result<HexChip> {
        if let Some(path) = &self.chip {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            return Ok(HexChip::from_json(&text)?);
        }
        let (layers, rows, cols) = match (self.layers, self.rows, self.cols) {
            (Some(l), Some(r), Some(c)) => (l, r, c),
            _ => bail!("either --chip or all of --layers/--rows/--cols are required"),
        };
        Ok(HexChip::build(layers, rows, cols, &self.junction, &self.defect)?)
    }
}

fn parse_vertex(text: &str) -> Result<VertexId, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected l,q,r, got `{text}`"));
    }
    let layer = parts[0].trim().parse().map_err(|_| format!("bad layer in `{text}`"))?;
    let q = parts[1].trim().parse().map_err(|_| format!("bad q in `{text}`"))?;
    let r = parts[2].trim().parse().map_err(|_| format!("bad r in `{text}`"))?;
    Ok(VertexId::new(layer, q, r))
}

#[derive(Subcommand)]
enum HexCmd {
    /// Emit a chip document.
    Build {
        #[command(flatten)]
        source: ChipSource,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Verify ξ-basis block structure and the pulse table.
    Check {
        #[command(flatten)]
        source: ChipSource,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Plan, compile, and simulate a route between two heads.
    Route {
        #[command(flatten)]
        source: ChipSource,
        #[arg(long, value_parser = parse_vertex)]
        from: VertexId,
        #[arg(long, value_parser = parse_vertex)]
        to: VertexId,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DualrailCmd {
    /// One protocol run for a fixed seed.
    Run {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Chain profile of both rails.
        #[arg(long, value_enum, default_value_t = Builder::Uniform)]
        builder: Builder,
        #[arg(long, default_value_t = 0.99)]
        target: f64,
        #[arg(long, default_value_t = 500)]
        max_attempts: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Ensemble over consecutive seeds with attempt-count quantiles.
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 200)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        seed_start: u64,
        #[arg(long, value_enum, default_value_t = Builder::Uniform)]
        builder: Builder,
        #[arg(long, default_value_t = 0.99)]
        target: f64,
        #[arg(long, default_value_t = 500)]
        max_attempts: usize,
        #[arg(long, value_enum, default_value_t = Format::Document)]
        format: Format,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Largest network size the full-space oracle checks (cap 14).
    #[arg(long, default_value_t = 8)]
    max_sites: usize,
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{content}"),
    }
    Ok(())
}

fn complex_pair(z: Complex64) -> serde_json::Value {
    serde_json::json!([z.re, z.im])
}

fn rail_kind(builder: Builder) -> Result<RailKind> {
    match builder {
        Builder::Uniform => Ok(RailKind::Uniform),
        Builder::Pst => Ok(RailKind::Pst),
        Builder::Diamond => bail!("dual-rail chains must be uniform or pst"),
    }
}

fn run() -> Result<u8> {
    if let Ok(threads) = std::env::var("SPINROUTE_THREADS") {
        let threads: usize = threads
            .parse()
            .map_err(|_| anyhow!("SPINROUTE_THREADS must be a positive integer"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    let cli = Cli::parse();
    match cli.command {
        Command::Net { cmd } => match cmd {
            NetCmd::Build { source, out } => {
                let net = source.load()?;
                emit(&out, &(net.to_json() + "\n"))?;
                Ok(0)
            }
            NetCmd::Validate { net } => {
                let text = std::fs::read_to_string(&net)
                    .with_context(|| format!("reading {}", net.display()))?;
                // Parse leniently so validate can report on malformed content.
                match SpinNetwork::from_json(&text) {
                    Ok(network) => {
                        let violations = network.validate();
                        if violations.is_empty() {
                            println!("ok: {} sites, {} couplings, version {}",
                                network.n_sites(), network.couplings().len(), NETWORK_FORMAT_VERSION);
                            Ok(0)
                        } else {
                            for v in violations {
                                eprintln!("violation: {v}");
                            }
                            Ok(1)
                        }
                    }
                    Err(e) => {
                        eprintln!("invalid document: {e}");
                        Ok(1)
                    }
                }
            }
        },
        Command::Transfer(args) => {
            if !(args.t_max > 0.0) || !args.t_max.is_finite() {
                bail!("--t-max must be positive and finite, got {}", args.t_max);
            }
            if args.grid < 2 {
                bail!("--grid must be at least 2, got {}", args.grid);
            }
            let net = args.source.load()?;
            let n = net.n_sites();
            let from = SiteId(args.from.unwrap_or(0));
            let to = SiteId(args.to.unwrap_or(n - 1));
            let h = SectorHamiltonian::new(&net)?;
            let series = transfer_series(&h, from, to, args.t_max, args.grid)?;
            let peak = peak_search(&h, from, to, (0.0, args.t_max), args.grid)?;
            let pf = average_fidelity(peak.amplitude);
            let peak_doc = serde_json::json!({
                "t": peak.time,
                "amplitude": complex_pair(peak.amplitude),
                "magnitude": peak.amplitude.norm(),
                "fbar": pf.as_received,
                "fbar_star": pf.phase_corrected,
            });
            match args.format {
                Format::Csv => {
                    emit(&args.out, &transfer_series_csv(&series))?;
                    eprintln!("peak: {}", serde_json::to_string(&peak_doc)?);
                }
                Format::Document => {
                    let doc = serde_json::json!({
                        "from": from.0,
                        "to": to.0,
                        "t_max": args.t_max,
                        "grid": args.grid,
                        "series": series.iter().map(|s| serde_json::json!({
                            "t": s.t,
                            "g": complex_pair(s.amplitude),
                            "fbar": s.fidelity.as_received,
                            "fbar_star": s.fidelity.phase_corrected,
                        })).collect::<Vec<_>>(),
                        "peak": peak_doc,
                    });
                    emit(&args.out, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
                }
            }
            Ok(0)
        }
        Command::Pst { cmd } => match cmd {
            PstCmd::Verify { n, net, t, out } => {
                let chain = match (n, net) {
                    (Some(n), None) => spinroute::build_pst_chain(n)?,
                    (None, Some(path)) => {
                        let text = std::fs::read_to_string(&path)
                            .with_context(|| format!("reading {}", path.display()))?;
                        SpinNetwork::from_json(&text)?
                    }
                    _ => bail!("exactly one of --n or --net is required"),
                };
                let report = pst::verify_pst(&chain, t)?;
                emit(&out, &(serde_json::to_string_pretty(&report.to_document())? + "\n"))?;
                Ok(if report.magnitude >= 1.0 - 1e-9 { 0 } else { 1 })
            }
        },
        Command::Diamond { cmd } => match cmd {
            DiamondCmd::Run { cells, out } => {
                let chain = spinroute::build_diamond_chain(cells)?;
                let schedule = pst::diamond_schedule(cells)?;
                let psi0 = spinroute::SectorState::basis(chain.n_sites(), SiteId(0))?;
                let end = spinroute::run_schedule(&chain, &psi0, &schedule)?;
                let amp = end.amplitude(3 * cells);
                let dec = pst::diamond_decompose(&chain)?;
                let doc = serde_json::json!({
                    "cells": cells,
                    "schedule": schedule.to_document(),
                    "end_site": 3 * cells,
                    "amplitude": complex_pair(amp),
                    "magnitude": amp.norm(),
                    "off_block_residual": dec.off_block_residual,
                    "block_coupling_deviation": pst::block_coupling_deviation(&dec),
                });
                emit(&out, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
                Ok(0)
            }
        },
        Command::Hex { cmd } => match cmd {
            HexCmd::Build { source, out } => {
                let chip = source.load()?;
                emit(&out, &(chip.to_document().to_json() + "\n"))?;
                Ok(0)
            }
            HexCmd::Check { source, out } => {
                let chip = source.load()?;
                let check = chip.block_structure_check();
                let table = verify::pulse_table_check(&spinroute::hexchip::HADAMARD_SIGNS);
                let ok = check.off_block_residual < 1e-10
                    && check.coupling_deviation < 1e-10
                    && table.passed;
                let doc = serde_json::json!({
                    "off_block_residual": check.off_block_residual,
                    "coupling_deviation": check.coupling_deviation,
                    "two_blocks": check.two_blocks,
                    "three_blocks": check.three_blocks,
                    "parked_states": check.parked_states,
                    "pulse_table": table.passed,
                    "ok": ok,
                });
                emit(&out, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
                Ok(if ok { 0 } else { 1 })
            }
            HexCmd::Route {
                source,
                from,
                to,
                out,
            } => {
                let chip = source.load()?;
                let route = match chip.plan_route(from, to) {
                    Ok(r) => r,
                    Err(e @ HexError::Unroutable { .. }) => {
                        eprintln!("{e}");
                        return Ok(EXIT_UNROUTABLE);
                    }
                    Err(e) => return Err(e.into()),
                };
                let schedule = chip.compile(&route)?;
                let outcome = chip.simulate_route(&route)?;
                let doc = serde_json::json!({
                    "route": route.to_document(),
                    "schedule": schedule.to_document(),
                    "outcome": outcome.to_document(),
                });
                emit(&out, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
                Ok(0)
            }
        },
        Command::Dualrail { cmd } => match cmd {
            DualrailCmd::Run {
                n,
                epsilon,
                seed,
                builder,
                target,
                max_attempts,
                out,
            } => {
                let kind = rail_kind(builder)?;
                let sys = match kind {
                    RailKind::Uniform => dualrail::build_dual_rail(n, epsilon, seed)?,
                    RailKind::Pst => dualrail::build_pst_dual_rail(n, epsilon, seed)?,
                };
                let log = dualrail::run_protocol(&sys, max_attempts, target)?;
                let doc = log.to_document(&sys, target, max_attempts);
                emit(&out, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
                Ok(0)
            }
            DualrailCmd::Sweep {
                n,
                epsilon,
                seeds,
                seed_start,
                builder,
                target,
                max_attempts,
                format,
                out,
            } => {
                let kind = rail_kind(builder)?;
                let seed_list: Vec<u64> = (seed_start..seed_start + seeds as u64).collect();
                let summary =
                    dualrail::run_ensemble(kind, n, epsilon, &seed_list, target, max_attempts)?;
                match format {
                    Format::Document => {
                        emit(&out, &(serde_json::to_string_pretty(&summary.to_document())? + "\n"))?;
                    }
                    Format::Csv => {
                        let mut csv = String::from("seed,attempts,reached,cumulative\n");
                        for run in &summary.runs {
                            writeln!(
                                csv,
                                "{},{},{},{:.16e}",
                                run.seed, run.attempts, run.reached, run.final_cumulative
                            )?;
                        }
                        emit(&out, &csv)?;
                    }
                }
                Ok(0)
            }
        },
        Command::Verify(args) => {
            let outcomes = verify::run_battery(args.max_sites)?;
            let mut failed = false;
            for o in &outcomes {
                println!(
                    "check {}: {} - {}",
                    o.name,
                    if o.passed { "ok" } else { "FAIL" },
                    o.detail
                );
                failed |= !o.passed;
            }
            Ok(if failed { 1 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
