use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use expander_forge::budget::{Budgets, OVERRIDE_VAR};
use expander_forge::report::Status;
use expander_forge::runner::{run, Command, Format, RunConfig, RunOutcome};
use expander_forge::walk_sim::MixMode;

#[derive(Parser)]
#[command(name = "expander-forge", version, about = "Build and check hypergraph expanders over F_2^t")]
#[command(after_help = format!(
    "Exit status: 0 when every executed check passes, 1 on a failed check or a run error, \
     2 on invalid arguments.\nSet {OVERRIDE_VAR}=N to raise every counting budget to at least N."
))]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Sample a generator set with distinct subset sums and print the generator file
    Sample,
    /// Report the subset-sum condition (with a collision witness) and the exact Cayley gap
    Certify,
    /// Build the hypergraph and print its edge list
    Build,
    /// Print the order-k walk graph
    Walkgraph,
    /// Spectral gaps of the Cayley graph and the walk graphs, with solver cross-checks
    Spectrum,
    /// Run lemma checks by name (`--lemma a,b` or `all`)
    Verify,
    /// Edge counts between random vertex subsets against the discrepancy bounds
    Discrepancy,
    /// Total-variation curve of the lazy walk on the order-k walk graph
    Mix,
    /// Certify, build, spectra, every lemma check, discrepancy and mixing
    All,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Command {
        match c {
            Cmd::Sample => Command::Sample,
            Cmd::Certify => Command::Certify,
            Cmd::Build => Command::Build,
            Cmd::Walkgraph => Command::Walkgraph,
            Cmd::Spectrum => Command::Spectrum,
            Cmd::Verify => Command::Verify,
            Cmd::Discrepancy => Command::Discrepancy,
            Cmd::Mix => Command::Mix,
            Cmd::All => Command::All,
        }
    }
}

#[derive(Args)]
struct Opts {
    /// Uniformity
    #[arg(long, global = true, default_value_t = 3)]
    r: u32,
    /// Dimension of F_2^t
    #[arg(long, global = true, default_value_t = 8)]
    t: u32,
    /// Number of generators
    #[arg(long = "s-size", global = true, default_value_t = 6)]
    s_size: usize,
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Face order, 1 <= k <= r-1
    #[arg(long, global = true)]
    k: Option<u32>,
    /// Generator file to use instead of sampling
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Write the primary output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write the JSON report here
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Vertex label file for `walkgraph`
    #[arg(long, global = true)]
    labels: Option<PathBuf>,
    /// json, csv or text; defaults to text for sample/build/walkgraph, csv for discrepancy/mix
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long = "budget-tuples", global = true)]
    budget_tuples: Option<u128>,
    #[arg(long = "budget-vertices", global = true)]
    budget_vertices: Option<u128>,
    /// Largest graph handed to the dense eigensolver
    #[arg(long = "dense-cap", global = true)]
    dense_cap: Option<usize>,
    #[arg(long, global = true)]
    lemma: Option<String>,
    #[arg(long, global = true, default_value_t = 50)]
    draws: usize,
    /// Probability that a vertex joins each random subset
    #[arg(long = "subset-density", global = true, default_value_t = 0.5)]
    subset_density: f64,
    /// lemma, prop or theorem; all three when omitted
    #[arg(long, global = true)]
    form: Option<String>,
    #[arg(long, global = true, default_value_t = 0.5)]
    lazy: f64,
    #[arg(long, global = true, default_value_t = 50)]
    steps: usize,
    /// exact or sampled
    #[arg(long, global = true, default_value = "exact")]
    mode: String,
    #[arg(long, global = true, default_value_t = 100_000)]
    trajectories: u64,
    /// Random samples per sampled lemma check
    #[arg(long, global = true, default_value_t = 64)]
    samples: usize,
}

impl Opts {
    fn config(&self) -> Result<RunConfig, String> {
        let mut budgets = Budgets::default().with_env_override();
        if let Some(b) = self.budget_tuples {
            budgets.max_tuples = b;
        }
        if let Some(b) = self.budget_vertices {
            budgets.max_vertices = b;
        }
        if let Some(b) = self.dense_cap {
            budgets.dense_cap = b;
        }
        let mode: MixMode = self.mode.parse().map_err(|e| format!("{e}"))?;
        Ok(RunConfig {
            r: self.r,
            t: self.t,
            s_size: self.s_size,
            seed: self.seed,
            k: self.k,
            lemma: self.lemma.clone(),
            draws: self.draws,
            subset_density: self.subset_density,
            form: self.form.clone(),
            lazy: self.lazy,
            steps: self.steps,
            mode,
            trajectories: self.trajectories,
            samples: self.samples,
            input: self.input.as_ref().map(|p| p.display().to_string()),
            budgets,
            threads: self.threads,
        })
    }
}

fn summary(outcome: &RunOutcome) -> String {
    let checks = &outcome.report.checks;
    let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
    let mut line = format!(
        "{}: {} checks, {} pass, {} fail, {} skipped",
        outcome.report.command.name(),
        checks.len(),
        count(Status::Pass),
        count(Status::Fail),
        count(Status::Skipped)
    );
    for c in checks.iter().filter(|c| c.status == Status::Fail) {
        line.push_str(&format!("\n  FAIL {} [{}]", c.name, c.instance));
        if let Some(reason) = &c.reason {
            line.push_str(&format!(": {reason}"));
        }
    }
    if let Some(e) = &outcome.report.error {
        line.push_str(&format!("\n  error: {e}"));
    }
    line
}

fn write(path: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command: Command = cli.command.into();
    let fail = |msg: String| {
        eprintln!("expander-forge: {msg}");
        ExitCode::from(2)
    };
    let cfg = match cli.opts.config() {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let format = match cli.opts.format.as_deref().map(str::parse::<Format>) {
        None => command.default_format(),
        Some(Ok(f)) => f,
        Some(Err(e)) => return fail(e.to_string()),
    };
    if !command.supports(format) {
        return fail(format!("{} has no {format:?} output", command.name()).to_lowercase());
    }
    let outcome = match run(command, &cfg) {
        Ok(o) => o,
        Err(e) => return fail(e.to_string()),
    };
    // a run that stopped early may lack its artifact; fall back to the report
    let primary = outcome
        .render(format)
        .unwrap_or_else(|_| outcome.report.to_json());
    let mut io = write(&cli.opts.out, &primary);
    if let Some(path) = &cli.opts.report {
        io = io.and(write(&Some(path.clone()), &outcome.report.to_json()));
    }
    if let (Some(path), Some(labels)) = (&cli.opts.labels, &outcome.labels) {
        io = io.and(write(&Some(path.clone()), labels));
    }
    eprintln!("{}", summary(&outcome));
    if let Err(e) = io {
        eprintln!("expander-forge: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(outcome.exit_code() as u8)
}
