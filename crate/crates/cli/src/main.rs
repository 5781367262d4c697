//! `finsum` command-line front end.

mod commands;
mod error;
mod report;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::{CliError, Status};
use report::Outcome;
use settings::Settings;

#[derive(Parser)]
#[command(name = "finsum", version, about = "Finite sumsets t + FS_k(B) in dense sets, with the dynamics behind them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Densities along initial windows and the densest windows.
    Density(Opts),
    /// Direct search for (t, B) by depth-first enumeration.
    FindSumset(Opts),
    /// Exhaustive check of a certificate.
    Verify(Opts),
    /// Symbolic shift point and return-time region for a set.
    Correspond(Opts),
    /// Erdős progression on a torus system.
    Progression(Opts),
    /// Generators extracted from a rotation progression.
    Extract(Opts),
    /// Empirical measures and the checks run on them.
    Measures(Opts),
    /// Cyclic Gowers norm of a values file, or a trajectory seminorm.
    Gowers(Opts),
    /// Multiple recurrence average on a graph subtorus.
    Recurrence(Opts),
    /// Empty intersections for the thickened graph.
    Counterexample(Opts),
    /// Set to verified certificate through the dynamical construction.
    Pipeline(Opts),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Density(_) => "density",
            Command::FindSumset(_) => "find-sumset",
            Command::Verify(_) => "verify",
            Command::Correspond(_) => "correspond",
            Command::Progression(_) => "progression",
            Command::Extract(_) => "extract",
            Command::Measures(_) => "measures",
            Command::Gowers(_) => "gowers",
            Command::Recurrence(_) => "recurrence",
            Command::Counterexample(_) => "counterexample",
            Command::Pipeline(_) => "pipeline",
        }
    }

    fn opts(&self) -> &Opts {
        match self {
            Command::Density(o)
            | Command::FindSumset(o)
            | Command::Verify(o)
            | Command::Correspond(o)
            | Command::Progression(o)
            | Command::Extract(o)
            | Command::Measures(o)
            | Command::Gowers(o)
            | Command::Recurrence(o)
            | Command::Counterexample(o)
            | Command::Pipeline(o) => o,
        }
    }
}

/// Every option is a string here and typed when read, so config values and
/// flags go through the same parser.
#[derive(Args, Clone, Debug, Default)]
struct Opts {
    /// Flat `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Set generator: odds, evens, full, congruence:r:m, bernoulli:p:seed, bohr:alpha:lo:hi, straus:eps:seed, file:path.
    #[arg(long)]
    set: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    horizon: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Search budget: DFS nodes, scanned integers or operations, depending on the command.
    #[arg(long = "budget-nodes")]
    budget_nodes: Option<String>,
    #[arg(long)]
    tmax: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    /// Window length.
    #[arg(long = "N")]
    n: Option<String>,
    /// Outer lag range for trajectory seminorms.
    #[arg(long = "H")]
    h: Option<String>,
    #[arg(long)]
    threads: Option<String>,
    /// Directory for the JSON report, CSV plot data and artifacts.
    #[arg(long)]
    out: Option<String>,
    /// Certificate: JSON text, a JSON file, or `(t=0,B={1,3},k=2)`.
    #[arg(long)]
    cert: Option<String>,
    /// circle, skew or torus.
    #[arg(long)]
    system: Option<String>,
    /// Rotation number (`golden`, `sqrt2` or a decimal); comma-separated for tori.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    observable: Option<String>,
    /// `;`-separated observables g_1..g_k.
    #[arg(long)]
    observables: Option<String>,
    /// Starting point, comma-separated coordinates.
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    /// Norm order.
    #[arg(long)]
    s: Option<String>,
    /// Number of generators, or word length for `correspond`.
    #[arg(long)]
    size: Option<String>,
    #[arg(long)]
    radius: Option<String>,
    #[arg(long)]
    resolution: Option<String>,
    /// File of values, one `re [im]` per line.
    #[arg(long)]
    values: Option<String>,
    #[arg(long)]
    u: Option<String>,
    #[arg(long)]
    v: Option<String>,
    /// Arcs `center:radius,center:radius`.
    #[arg(long)]
    arcs: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    /// Cloud or witness count.
    #[arg(long)]
    count: Option<String>,
}

impl Opts {
    fn flags(&self) -> Vec<(&'static str, Option<String>)> {
        let o = self.clone();
        vec![
            ("set", o.set),
            ("k", o.k),
            ("horizon", o.horizon),
            ("seed", o.seed),
            ("budget-nodes", o.budget_nodes),
            ("tmax", o.tmax),
            ("tol", o.tol),
            ("N", o.n),
            ("H", o.h),
            ("threads", o.threads),
            ("out", o.out),
            ("cert", o.cert),
            ("system", o.system),
            ("alpha", o.alpha),
            ("observable", o.observable),
            ("observables", o.observables),
            ("a", o.a),
            ("beta", o.beta),
            ("s", o.s),
            ("size", o.size),
            ("radius", o.radius),
            ("resolution", o.resolution),
            ("values", o.values),
            ("u", o.u),
            ("v", o.v),
            ("arcs", o.arcs),
            ("delta", o.delta),
            ("count", o.count),
        ]
    }
}

fn settings(opts: &Opts) -> Result<Settings, CliError> {
    let mut s = match &opts.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    s.overlay(opts.flags());
    if let Some(n) = s.get::<usize>("threads")? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    Ok(s)
}

fn dispatch(command: &Command, s: &Settings) -> Result<Outcome, CliError> {
    match command {
        Command::Density(_) => commands::density(s),
        Command::FindSumset(_) => commands::find_sumset(s),
        Command::Verify(_) => commands::verify(s),
        Command::Correspond(_) => commands::correspond(s),
        Command::Progression(_) => commands::progression(s),
        Command::Extract(_) => commands::extract(s),
        Command::Measures(_) => commands::measures(s),
        Command::Gowers(_) => commands::gowers(s),
        Command::Recurrence(_) => commands::recurrence(s),
        Command::Counterexample(_) => commands::counterexample(s),
        Command::Pipeline(_) => commands::pipeline(s),
    }
}

fn run(cli: &Cli) -> Status {
    let name = cli.command.name();
    let (s, result) = match settings(cli.command.opts()) {
        Ok(s) => {
            let r = dispatch(&cli.command, &s);
            (s, r)
        }
        Err(e) => (Settings::default(), Err(e)),
    };
    let (status, env, outcome) = match &result {
        Ok(o) => {
            let status = if o.pass { Status::Ok } else { Status::VerificationFailed };
            (status, report::envelope(name, status, &s.inputs(), Some(&o.report), None), Some(o))
        }
        Err(e) => {
            eprintln!("finsum {name}: {e}");
            (e.status(), report::envelope(name, e.status(), &s.inputs(), None, Some(e)), None)
        }
    };
    let text = match report::render(&env) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("finsum {name}: {e}");
            return Status::InputError;
        }
    };
    print!("{text}");
    if let Some(dir) = s.str("out") {
        if let Err(e) = report::write_outputs(std::path::Path::new(dir), name, &text, outcome) {
            eprintln!("finsum {name}: writing outputs: {e}");
            return Status::InputError;
        }
    }
    status
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { Status::InputError as u8 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(&cli) as u8)
}
