use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod output;

use config::{ExperimentConfig, QValue};

/// Rearrangements, Lorentz norms, Riesz potentials, Hausdorff content and
/// exponential decay checks on gridded test functions.
///
/// Every run writes `<command>.json` and CSV data files to the output
/// directory (`--out`, the config's `output.dir`, `$CRITDECAY_OUT`, or
/// `./critdecay-out`). The exit status is 0 exactly when every check holds.
#[derive(Debug, Parser)]
#[command(name = "critdecay", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Ambient dimension.
    #[arg(long = "N", global = true)]
    dim: Option<usize>,
    /// Cells per axis.
    #[arg(long, global = true)]
    cells: Option<usize>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Content dimension; repeat for several.
    #[arg(long, global = true)]
    beta: Vec<f64>,
    #[arg(long, global = true)]
    p: Vec<f64>,
    /// Second Lorentz exponent, a number or `inf`; repeat for several.
    #[arg(long, global = true, value_parser = parse_q)]
    q: Vec<QValue>,
    /// Write a matplotlib script next to the decay CSV files.
    #[arg(long, global = true)]
    plot: bool,
}

fn parse_q(s: &str) -> std::result::Result<QValue, String> {
    match s {
        "inf" | "infinity" => Ok(QValue::Word(config::Infinity::Inf)),
        _ => s.parse().map(QValue::Num).map_err(|_| format!("`{s}` is neither a number nor `inf`")),
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decreasing rearrangement `f*` of each function.
    Rearrange,
    /// Lorentz quasi-norm and norm over the `p`, `q` grid.
    LorentzNorm,
    /// Riesz potential `I_α f`.
    Riesz,
    /// Fractional maximal function `M_γ f` (`γ` from the config).
    Maximal,
    /// Content of the level sets of `|f|`.
    Content,
    /// Choquet integral of `|f|` against the content.
    Choquet,
    /// Check one inequality over the function suite.
    Verify {
        #[arg(value_enum)]
        lemma: LemmaId,
    },
    /// Level-set decay of `I_α f` against the constructed bound, for the
    /// near-extremal family and the configured functions.
    Decay,
    /// Print the constant chain.
    Constants {
        /// `|Ω|`; defaults to the volume of the configured box.
        #[arg(long)]
        volume: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LemmaId {
    Hardy,
    NormEquivalence,
    LorentzEquivalence,
    Calderon,
    Lemma15,
    Lemma14,
    Holder,
    HolderPrime,
    TruncatedKernel,
    Hedberg,
    WeakType,
    Main2,
    Main1,
    Corollary,
}

impl LemmaId {
    pub fn name(self) -> String {
        self.to_possible_value().unwrap().get_name().to_string()
    }
}

fn apply_overrides(cfg: &mut ExperimentConfig, c: &Common) {
    if let Some(n) = c.dim {
        if n != cfg.domain.dim {
            cfg.domain.dim = n;
            cfg.domain.lower = None;
            cfg.domain.upper = None;
        }
    }
    if let Some(m) = c.cells {
        cfg.domain.cells = m;
    }
    if let Some(a) = c.alpha {
        cfg.params.alpha = a;
    }
    if !c.beta.is_empty() {
        cfg.params.beta = c.beta.clone();
    }
    if !c.p.is_empty() {
        cfg.params.p = c.p.clone();
    }
    if !c.q.is_empty() {
        cfg.params.q = c.q.clone();
    }
    cfg.output.plot |= c.plot;
}

fn run(cli: Cli) -> Result<bool> {
    let mut cfg = match &cli.common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    apply_overrides(&mut cfg, &cli.common);
    if let Some(j) = cli.common.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .context("configuring the thread pool")?;
    }
    let dir = output::resolve_dir(cli.common.out.as_deref(), cfg.output.dir.as_deref());
    let mut out = output::Output::create(dir)?;
    let report = match cli.command {
        Command::Rearrange => commands::rearrange(&cfg, &mut out)?,
        Command::LorentzNorm => commands::lorentz_norm(&cfg, &mut out)?,
        Command::Riesz => commands::riesz(&cfg, &mut out)?,
        Command::Maximal => commands::maximal(&cfg, &mut out)?,
        Command::Content => commands::content(&cfg, &mut out)?,
        Command::Choquet => commands::choquet(&cfg, &mut out)?,
        Command::Verify { lemma } => commands::verify(lemma, &cfg, &mut out)?,
        Command::Decay => commands::decay(&cfg, &mut out)?,
        Command::Constants { volume } => commands::constants(&cfg, volume, &mut out)?,
    };
    let name = format!("{}.json", report.command.replace(' ', "_"));
    let path = out.json(&name, &report)?;
    if cfg.output.plot {
        out.plot_script("plot_decay.py")?;
    }
    eprintln!(
        "{}: {} ({} checks, worst margin {}) -> {}",
        report.command,
        if report.holds { "holds" } else { "VIOLATED" },
        report.checks.len(),
        report.worst_margin.map_or("n/a".to_string(), |m| format!("{m:.3e}")),
        path.display()
    );
    Ok(report.holds)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
