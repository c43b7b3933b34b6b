mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use manhattan::thermo::Tolerances;

use commands::Session;
use config::{resolve_fixture, Grid, RunConfig};

/// Manhattan curves for pairs of word metrics on hyperbolic groups.
#[derive(Parser)]
#[command(name = "manhattan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Fixture name (looked up in MANHATTAN_FIXTURE_DIR) or path.
    #[arg(long)]
    fixture: String,
    /// Metric whose spheres are enumerated.
    #[arg(long, default_value = "Sstar")]
    base: String,
    /// Metric giving the edge weights.
    #[arg(long, default_value = "S")]
    target: String,
    /// Depth of the ball used to build and certify the automaton.
    #[arg(short = 'N', long, default_value_t = 8)]
    horizon: usize,
    /// Cone-type radius; by default the smallest that certifies.
    #[arg(short = 'k', long)]
    cone_radius: Option<usize>,
    /// Grid of parameters a, as lo:hi:count.
    #[arg(long, default_value = "-3:3:121", allow_hyphen_values = true)]
    grid: Grid,
    /// Relative tolerance of Perron roots.
    #[arg(long, default_value_t = 1e-14)]
    tol: f64,
    /// Output directory for artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Use an automaton file instead of building one.
    #[arg(long)]
    automaton: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the fixture's rewriting systems, relators and definitions.
    Validate(Common),
    /// Build the cone-type automaton and write it as JSON.
    BuildAutomaton(Common),
    /// Certify an automaton against the Cayley-graph oracle to depth N.
    Certify(Common),
    /// Write θ, θ′, θ″ over the grid as CSV.
    Curve(Common),
    /// Print θ and its derivatives at given points.
    Derivatives {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "0", allow_hyphen_values = true)]
        at: Vec<f64>,
    },
    /// Growth rates of both metrics.
    Growth(Common),
    /// Mean distortion τ = -θ′(0).
    Distortion(Common),
    /// Dilation constants with witness cycles.
    Dilation(Common),
    /// Multifractal spectrum over [α_min, α_max] (or --range) as CSV.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        range: Option<Grid>,
    },
    /// Large-deviation rate function over [α_min, α_max] (or --range) as CSV.
    Ldp {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        range: Option<Grid>,
    },
    /// Rough-similarity verdict.
    Rigidity(Common),
    /// Compare the curve with the one for the swapped pair of metrics.
    DualCheck(Common),
    /// Sphere sums from the ball against θ.
    Empirical {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "-1,0,1,2", allow_hyphen_values = true)]
        at: Vec<f64>,
    },
    /// Everything above, with all artifacts written.
    Report(Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Validate(c)
            | Command::BuildAutomaton(c)
            | Command::Certify(c)
            | Command::Curve(c)
            | Command::Growth(c)
            | Command::Distortion(c)
            | Command::Dilation(c)
            | Command::Rigidity(c)
            | Command::DualCheck(c)
            | Command::Report(c) => c,
            Command::Derivatives { common, .. }
            | Command::Spectrum { common, .. }
            | Command::Ldp { common, .. }
            | Command::Empirical { common, .. } => common,
        }
    }
}

fn run(cli: Cli) -> manhattan::Result<()> {
    let c = cli.command.common().clone();
    if let Some(n) = c.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| manhattan::Error::Invalid(format!("worker pool: {e}")))?;
    }
    let cfg = RunConfig {
        fixture: resolve_fixture(&c.fixture)?,
        base: c.base,
        target: c.target,
        horizon: c.horizon,
        cone_radius: c.cone_radius,
        grid: c.grid,
        tolerances: Tolerances {
            perron: c.tol,
            ..Tolerances::default()
        },
        out: c.out,
        automaton: c.automaton,
    };
    let s = Session::open(cfg)?;
    match &cli.command {
        Command::Validate(_) => commands::validate(&s),
        Command::BuildAutomaton(_) => commands::build_automaton(&s),
        Command::Certify(_) => commands::certify_cmd(&s),
        Command::Curve(_) => commands::curve(&s),
        Command::Derivatives { at, .. } => commands::derivatives(&s, at),
        Command::Growth(_) => commands::growth(&s),
        Command::Distortion(_) => commands::distortion(&s),
        Command::Dilation(_) => commands::dilation(&s),
        Command::Spectrum { range, .. } => commands::spectrum(&s, *range),
        Command::Ldp { range, .. } => commands::ldp(&s, *range),
        Command::Rigidity(_) => commands::rigidity(&s),
        Command::DualCheck(_) => commands::dual_check(&s),
        Command::Empirical { at, .. } => commands::empirical(&s, at),
        Command::Report(_) => commands::report(&s),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation_failure() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
