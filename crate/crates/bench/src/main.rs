use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use gdaam::problems::ScalarGameId;
use gdaam_bench::config::{load_overrides, parse_list, Overrides};
use gdaam_bench::csvio::write_summary;
use gdaam_bench::experiment::{preset, run_experiment, ExperimentSpec, ProblemSpec, PRESETS};
use gdaam_bench::verify::{verify, Suite};

const EXIT_INVALID: u8 = 1;
const EXIT_VERIFY_FAILED: u8 = 2;

#[derive(Parser)]
#[command(name = "gdaam", version, about = "Anderson-mixing accelerated GDA benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or an explicitly described experiment.
    Run(RunArgs),
    /// Run a verification suite (or `all`).
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Repeat an experiment over several values of one parameter.
    Sweep {
        #[arg(long)]
        param: String,
        #[arg(long)]
        values: String,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long)]
    preset: Option<String>,
    /// bilinear, bilinear_quadratic or scalar
    #[arg(long, default_value = "bilinear")]
    problem: String,
    /// Scalar game id when `--problem scalar`.
    #[arg(long)]
    game: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    kappa: Option<f64>,
    /// Diagonal shift of B and C for bilinear_quadratic.
    #[arg(long, default_value_t = 0.5)]
    shift: f64,
    /// Comma-separated method names.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Comma-separated seeds.
    #[arg(long)]
    seed: Option<String>,
    /// restart or sliding
    #[arg(long)]
    mode: Option<String>,
    /// negative or positive (EG with momentum)
    #[arg(long)]
    momentum: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    /// INI file with `[defaults]` and per-preset sections.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl RunArgs {
    fn cli_overrides(&self) -> anyhow::Result<Overrides> {
        let mut o = Overrides::default();
        let pairs: [(&str, Option<String>); 11] = [
            ("n", self.n.map(|v| v.to_string())),
            ("kappa", self.kappa.map(|v| v.to_string())),
            ("methods", self.method.clone()),
            ("p", self.p.map(|v| v.to_string())),
            ("eta", self.eta.map(|v| v.to_string())),
            ("tol", self.tol.map(|v| v.to_string())),
            ("max_iters", self.max_iters.map(|v| v.to_string())),
            ("seeds", self.seed.clone()),
            ("mode", self.mode.clone()),
            ("momentum", self.momentum.clone()),
            ("jobs", self.jobs.map(|v| v.to_string())),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                o.set(k, &v)?;
            }
        }
        o.out = self.out.clone();
        Ok(o)
    }

    fn overrides(&self, section: Option<&str>) -> anyhow::Result<Overrides> {
        let file = match &self.config {
            Some(path) => load_overrides(path, section).with_context(|| format!("reading {}", path.display()))?,
            None => Overrides::default(),
        };
        Ok(file.merged(&self.cli_overrides()?))
    }

    fn specs(&self) -> anyhow::Result<(Vec<ExperimentSpec>, Overrides)> {
        if let Some(name) = &self.preset {
            let overrides = self.overrides(Some(name))?;
            let mut specs = preset(name)?;
            for s in &mut specs {
                overrides.apply(s);
            }
            return Ok((specs, overrides));
        }
        let overrides = self.overrides(Some("run"))?;
        let problem = match self.problem.as_str() {
            "bilinear" => ProblemSpec::Bilinear {
                n: overrides.n.unwrap_or(100),
                kappa: overrides.kappa,
            },
            "bilinear_quadratic" => ProblemSpec::BilinearQuadratic {
                n: overrides.n.unwrap_or(50),
                shift: self.shift,
            },
            "scalar" => {
                let Some(game) = &self.game else {
                    bail!("--problem scalar needs --game (one of {})", game_ids());
                };
                ProblemSpec::Scalar(game.parse::<ScalarGameId>()?)
            }
            other => bail!("unknown problem `{other}`"),
        };
        let Some(methods) = overrides.methods.clone() else {
            bail!("--method is required without --preset");
        };
        let mut spec = ExperimentSpec::new("run", problem, methods);
        overrides.apply(&mut spec);
        Ok((vec![spec], overrides))
    }
}

fn game_ids() -> String {
    ScalarGameId::ALL.iter().map(|g| g.as_str()).collect::<Vec<_>>().join(", ")
}

fn execute(specs: &[ExperimentSpec], overrides: &Overrides) -> anyhow::Result<()> {
    let jobs = overrides
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    for spec in specs {
        spec.validate()?;
    }
    for spec in specs {
        eprintln!("{spec}");
        let table = run_experiment(spec, jobs, overrides.out.as_deref())?;
        println!("# {}", table.name);
        write_summary(std::io::stdout().lock(), &table.rows)?;
    }
    Ok(())
}

fn sweep_specs(param: &str, values: &str, run: &RunArgs) -> anyhow::Result<(Vec<ExperimentSpec>, Overrides)> {
    let (base, overrides) = run.specs()?;
    let raw: Vec<String> = parse_list(param, values)?;
    if raw.is_empty() {
        bail!("--values is empty");
    }
    let mut specs = Vec::new();
    for spec in &base {
        for v in &raw {
            let mut o = Overrides::default();
            o.set(param, v)?;
            let mut s = spec.clone();
            o.apply(&mut s);
            s.name = format!("{}_{param}{v}", spec.name);
            specs.push(s);
        }
    }
    Ok((specs, overrides))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run(args) => args.specs().and_then(|(s, o)| execute(&s, &o)),
        Command::Sweep { param, values, run } => sweep_specs(param, values, run).and_then(|(s, o)| execute(&s, &o)),
        Command::Verify { suite } => {
            let suites: Vec<Suite> = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                match suite.parse() {
                    Ok(s) => vec![s],
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(EXIT_INVALID);
                    }
                }
            };
            let mut failed = false;
            for s in suites {
                let report = verify(s);
                println!("{report}");
                failed |= !report.passed();
            }
            return if failed {
                ExitCode::from(EXIT_VERIFY_FAILED)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            eprintln!("presets: {}", PRESETS.join(", "));
            ExitCode::from(EXIT_INVALID)
        }
    }
}
