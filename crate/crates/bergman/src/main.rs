use std::collections::BTreeMap;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use bergman::experiments::{self, cutoff, discretization, identities, theorem, ExperimentConfig, Report, Table};

#[derive(Parser)]
#[command(name = "bergman", version, about = "Bergman tree and Schatten-class commutator experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON experiment configuration; defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the configured one).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed (overrides the configured one).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Build or check the Bergman tree.
    Tree {
        #[command(subcommand)]
        action: TreeAction,
    },
    /// Mean oscillation against its closed form and floor.
    Mo {
        #[command(subcommand)]
        action: MoAction,
    },
    /// Spectrum of the truncated commutator model, with matrix export.
    Op {
        #[command(subcommand)]
        action: OpAction,
    },
    /// Run one named check.
    Verify {
        /// One of the identifiers printed by `verify list`.
        id: String,
    },
    /// Schatten sums against discrete oscillation sums.
    Theorem {
        #[command(subcommand)]
        action: TheoremAction,
    },
    /// Divergence and convergence around the cutoff exponent.
    Cutoff,
    /// Every experiment that applies to the configuration.
    Report,
}

#[derive(Subcommand)]
enum TreeAction {
    /// Write the tree as JSON lines.
    Build,
    /// Run every structural check against one tree.
    Check,
}

#[derive(Subcommand)]
enum MoAction {
    Eval,
}

#[derive(Subcommand)]
enum OpAction {
    Spectrum,
}

#[derive(Subcommand)]
enum TheoremAction {
    Ratio,
    /// The discretization chain from the integral to the tree sums.
    Chain,
}

fn load_config(common: &Common) -> bergman::error::Result<(ExperimentConfig, PathBuf)> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    let out =
        common.out.clone().or_else(|| cfg.output.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out"));
    cfg.validate()?;
    Ok((cfg, out))
}

fn print_report(r: &Report) {
    for a in &r.assertions {
        println!("{} {}/{}  {}", if a.passed { "PASS" } else { "FAIL" }, r.experiment, a.name, a.detail);
    }
    for note in &r.notes {
        println!("note {}: {note}", r.experiment);
    }
}

fn write_timing(dir: &Path, timing: &BTreeMap<String, f64>) -> bergman::error::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("timing.json"), serde_json::to_string_pretty(timing)?)?;
    Ok(())
}

fn run(cli: Cli) -> bergman::error::Result<bool> {
    let (cfg, out) = load_config(&cli.common)?;
    let mut timing = BTreeMap::new();
    let start = Instant::now();
    let reports: Vec<Report> = match cli.command {
        Command::Tree { action: TreeAction::Build } => {
            let tree = cfg.build_tree(cfg.depth)?;
            std::fs::create_dir_all(&out)?;
            let path = out.join("tree.jsonl");
            tree.export_jsonl(BufWriter::new(std::fs::File::create(&path)?))?;
            println!("wrote {} nodes to {}", tree.len(), path.display());
            Vec::new()
        }
        Command::Tree { action: TreeAction::Check } => vec![experiments::tree_suite(&cfg)?],
        Command::Mo { action: MoAction::Eval } => vec![identities::mo_eval(&cfg)?],
        Command::Op { action: OpAction::Spectrum } => vec![identities::op_spectrum(&cfg, Some(&out))?],
        Command::Verify { id } if id == "list" => {
            for c in experiments::CHECKS {
                println!("{c}");
            }
            return Ok(true);
        }
        Command::Verify { id } => vec![experiments::verify(&id, &cfg)?],
        Command::Theorem { action: TheoremAction::Ratio } => vec![theorem::theorem_ratio(&cfg)?],
        Command::Theorem { action: TheoremAction::Chain } => vec![discretization::discretization_chain(&cfg)?],
        Command::Cutoff => vec![cutoff::cutoff(&cfg)?],
        Command::Report => {
            let all = experiments::run_all(&cfg)?;
            let mut summary = Report::new("summary", &cfg);
            let mut t = Table::new("experiments", &["index", "assertions", "failures"]);
            for (i, r) in all.iter().enumerate() {
                t.push(&[i as f64, r.assertions.len() as f64, r.failures().len() as f64]);
                summary.notes.push(format!("{i}: {}", r.experiment));
                summary.check(r.experiment.clone(), r.passed(), format!("{} failures", r.failures().len()));
            }
            summary.tables.push(t);
            let mut all = all;
            all.push(summary);
            all
        }
    };
    timing.insert("total_seconds".to_string(), start.elapsed().as_secs_f64());
    let mut ok = true;
    for r in &reports {
        print_report(r);
        for path in r.emit(&out)? {
            println!("wrote {}", path.display());
        }
        ok &= r.passed();
    }
    write_timing(&out, &timing)?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
