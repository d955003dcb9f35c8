//! Experiment specifications, presets and the parallel runner.

use std::fmt;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use gdaam::anderson::{MixerConfig, MixingMode};
use gdaam::optimizers::{run, Method, SolverConfig, Status, Trajectory};
use gdaam::problems::{
    make_random_bilinear, make_random_bilinear_quadratic, random_initial_point, JointIterate, MinimaxProblem,
    ScalarGame, ScalarGameId,
};
use nalgebra::DVector;
use rayon::prelude::*;

use crate::csvio::{write_summary, write_trajectory, SummaryRow};
use crate::error::{BenchError, Result};

/// Starting point for the two-variable games.
pub const SCALAR_START: (f64, f64) = (3.0, 3.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProblemSpec {
    /// Gaussian `A` (or prescribed `kappa(A)`), rescaled to `sigma_max = 1`.
    Bilinear { n: usize, kappa: Option<f64> },
    BilinearQuadratic { n: usize, shift: f64 },
    Scalar(ScalarGameId),
}

impl ProblemSpec {
    pub fn build(&self, seed: u64) -> (Box<dyn MinimaxProblem>, JointIterate) {
        match *self {
            ProblemSpec::Bilinear { n, kappa } => (
                Box::new(make_random_bilinear(n, seed, kappa).rescale_to_unit_norm()),
                random_initial_point(n, seed),
            ),
            ProblemSpec::BilinearQuadratic { n, shift } => {
                (Box::new(make_random_bilinear_quadratic(n, seed, shift)), random_initial_point(n, seed))
            }
            ProblemSpec::Scalar(id) => (
                Box::new(ScalarGame::new(id)),
                JointIterate::new(
                    &DVector::from_element(1, SCALAR_START.0),
                    &DVector::from_element(1, SCALAR_START.1),
                ),
            ),
        }
    }
}

/// Which heavy-ball variant `Method::EgMomentum` stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentumPreset {
    Negative,
    Positive,
}

impl FromStr for MomentumPreset {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "negative" | "nm" => Ok(MomentumPreset::Negative),
            "positive" | "pm" => Ok(MomentumPreset::Positive),
            _ => Err(BenchError::InvalidSpec(format!("unknown momentum preset `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub problem: ProblemSpec,
    pub methods: Vec<Method>,
    pub eta: f64,
    pub p: usize,
    pub mode: MixingMode,
    pub tol: f64,
    pub max_iters: usize,
    pub seeds: Vec<u64>,
    pub momentum: MomentumPreset,
}

impl ExperimentSpec {
    pub fn new(name: impl Into<String>, problem: ProblemSpec, methods: Vec<Method>) -> Self {
        Self {
            name: name.into(),
            problem,
            methods,
            eta: 1.0,
            p: 10,
            mode: MixingMode::Restart,
            tol: 1e-5,
            max_iters: 100_000,
            seeds: vec![0],
            momentum: MomentumPreset::Negative,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(BenchError::InvalidSpec(format!("{}: no methods", self.name)));
        }
        if self.seeds.is_empty() {
            return Err(BenchError::InvalidSpec(format!("{}: no seeds", self.name)));
        }
        match self.problem {
            ProblemSpec::Bilinear { n, kappa } => {
                if n == 0 {
                    return Err(BenchError::InvalidSpec("n must be positive".into()));
                }
                if let Some(k) = kappa {
                    if !(k >= 1.0) {
                        return Err(BenchError::InvalidSpec(format!("kappa must be at least 1, got {k}")));
                    }
                }
            }
            ProblemSpec::BilinearQuadratic { n, shift } => {
                if n == 0 || !(shift > 0.0) {
                    return Err(BenchError::InvalidSpec("bilinear_quadratic needs n > 0 and shift > 0".into()));
                }
            }
            ProblemSpec::Scalar(_) => {}
        }
        for &m in &self.methods {
            self.solver_config(m).validate()?;
        }
        Ok(())
    }

    pub fn solver_config(&self, method: Method) -> SolverConfig {
        let base = match method {
            Method::EgMomentum => match self.momentum {
                MomentumPreset::Negative => SolverConfig::eg_negative_momentum(self.eta),
                MomentumPreset::Positive => SolverConfig::eg_positive_momentum(),
            },
            m if m.uses_mixer() => {
                let mut cfg = SolverConfig::gda_am(m, self.eta, self.p);
                cfg.mixer = Some(match self.mode {
                    MixingMode::Restart => MixerConfig::restart(self.p),
                    MixingMode::Sliding => MixerConfig::sliding(self.p),
                });
                cfg
            }
            m => SolverConfig::new(m, self.eta),
        };
        base.with_tol(self.tol).with_max_iters(self.max_iters)
    }
}

impl fmt::Display for ExperimentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let methods: Vec<&str> = self.methods.iter().map(|m| m.as_str()).collect();
        write!(
            f,
            "{}: {:?} methods=[{}] eta={} p={} tol={} max_iters={} seeds={:?}",
            self.name,
            self.problem,
            methods.join(","),
            self.eta,
            self.p,
            self.tol,
            self.max_iters,
            self.seeds
        )
    }
}

/// Step sizes for the two-variable games with table size 3.
pub fn scalar_step_size(id: ScalarGameId) -> f64 {
    match id {
        ScalarGameId::QuarticExp | ScalarGameId::CubicMix => 0.01,
        ScalarGameId::SaddleExpBump
        | ScalarGameId::NegQuadraticCross
        | ScalarGameId::CubicAntisym
        | ScalarGameId::QuarticCubic => 0.1,
    }
}

pub const PRESETS: [&str; 6] = ["fig1", "fig4", "fig5", "fig6a", "fig6c", "egpm"];

const ALL_METHODS: [Method; 7] = Method::ALL;

pub fn preset(name: &str) -> Result<Vec<ExperimentSpec>> {
    let seeds5: Vec<u64> = (0..5).collect();
    let specs = match name {
        "fig1" => ScalarGameId::ALL
            .into_iter()
            .map(|id| {
                let mut s = ExperimentSpec::new(
                    format!("fig1_{id}"),
                    ProblemSpec::Scalar(id),
                    vec![Method::AltGdaAm, Method::SimGdaAm, Method::SimGda],
                );
                s.eta = scalar_step_size(id);
                s.p = 3;
                s.tol = 1e-4;
                s
            })
            .collect(),
        "fig4" => [100, 500, 1000]
            .into_iter()
            .map(|n| {
                let mut s = ExperimentSpec::new(
                    format!("fig4_n{n}"),
                    ProblemSpec::Bilinear { n, kappa: None },
                    ALL_METHODS.to_vec(),
                );
                s.seeds = seeds5.clone();
                s
            })
            .collect(),
        "fig5" => {
            let mut s = ExperimentSpec::new(
                "fig5_n100",
                ProblemSpec::Bilinear { n: 100, kappa: None },
                vec![Method::SimGdaAm, Method::AltGdaAm, Method::Eg, Method::Og],
            );
            s.seeds = (0..3).collect();
            vec![s]
        }
        "fig6a" => [5, 10, 20, 50, 100]
            .into_iter()
            .map(|p| {
                let mut s = ExperimentSpec::new(
                    format!("fig6a_p{p}"),
                    ProblemSpec::Bilinear {
                        n: 500,
                        kappa: Some(10.0),
                    },
                    vec![Method::AltGdaAm],
                );
                s.p = p;
                s.seeds = seeds5.clone();
                s
            })
            .collect(),
        "fig6c" => [0.5, 1.0, 1.5, 2.0, 3.0]
            .into_iter()
            .map(|eta| {
                let mut s = ExperimentSpec::new(
                    format!("fig6c_eta{eta}"),
                    ProblemSpec::Bilinear {
                        n: 500,
                        kappa: Some(10.0),
                    },
                    vec![Method::SimGdaAm, Method::AltGdaAm],
                );
                s.eta = eta;
                s.seeds = (0..3).collect();
                s.max_iters = 20_000;
                s
            })
            .collect(),
        "egpm" => {
            let mut s = ExperimentSpec::new(
                "egpm_n100",
                ProblemSpec::Bilinear {
                    n: 100,
                    kappa: Some(10.0),
                },
                vec![Method::EgMomentum, Method::Eg, Method::AltGdaAm],
            );
            s.momentum = MomentumPreset::Positive;
            s.eta = 0.5;
            s.seeds = (0..3).collect();
            vec![s]
        }
        other => {
            return Err(BenchError::InvalidSpec(format!(
                "unknown preset `{other}` (expected one of {})",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(specs)
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub row: SummaryRow,
    pub trajectory: Trajectory,
}

pub fn run_one(spec: &ExperimentSpec, problem: &dyn MinimaxProblem, w0: &JointIterate, method: Method, seed: u64) -> Result<RunOutcome> {
    let start = Instant::now();
    let trajectory = run(problem, &spec.solver_config(method), w0)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let last = trajectory.final_record().expect("a run records its start");
    let row = SummaryRow {
        method: method.as_str().to_string(),
        seed,
        status: trajectory.status,
        iters: trajectory.iterations(),
        final_dist: last.dist_to_opt,
        wall_ms,
    };
    Ok(RunOutcome { row, trajectory })
}

#[derive(Debug, Clone)]
pub struct ResultTable {
    pub name: String,
    /// Sorted by `(method, seed)`.
    pub rows: Vec<SummaryRow>,
    pub trajectories: Vec<Trajectory>,
}

impl ResultTable {
    pub fn row(&self, method: Method, seed: u64) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.method == method.as_str() && r.seed == seed)
    }

    pub fn converged_iters(&self, method: Method, seed: u64) -> Option<usize> {
        self.row(method, seed).filter(|r| r.status == Status::Converged).map(|r| r.iters)
    }
}

fn trajectory_file(method: &str, seed: u64) -> String {
    format!("{method}_seed{seed}.csv")
}

/// Runs every `(method, seed)` pair on a pool of `jobs` threads.
///
/// With `out` set, writes `out/<name>/summary.csv` and one trajectory file
/// per run.
pub fn run_experiment(spec: &ExperimentSpec, jobs: usize, out: Option<&Path>) -> Result<ResultTable> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| BenchError::InvalidSpec(e.to_string()))?;
    let outcomes: Vec<Result<RunOutcome>> = pool.install(|| {
        let problems: Vec<_> = spec.seeds.par_iter().map(|&s| (s, spec.problem.build(s))).collect();
        let tasks: Vec<_> = problems
            .iter()
            .flat_map(|(seed, built)| spec.methods.iter().map(move |&m| (m, *seed, built)))
            .collect();
        tasks
            .into_par_iter()
            .map(|(m, seed, (problem, w0))| run_one(spec, problem.as_ref(), w0, m, seed))
            .collect()
    });
    let mut outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    outcomes.sort_by(|a, b| (&a.row.method, a.row.seed).cmp(&(&b.row.method, b.row.seed)));

    if let Some(dir) = out {
        let dir = dir.join(&spec.name);
        fs::create_dir_all(&dir)?;
        for o in &outcomes {
            let f = File::create(dir.join(trajectory_file(&o.row.method, o.row.seed)))?;
            write_trajectory(BufWriter::new(f), &o.trajectory.records)?;
        }
        let rows: Vec<SummaryRow> = outcomes.iter().map(|o| o.row.clone()).collect();
        write_summary(BufWriter::new(File::create(dir.join("summary.csv"))?), &rows)?;
    }
    let (rows, trajectories) = outcomes.into_iter().map(|o| (o.row, o.trajectory)).unzip();
    Ok(ResultTable {
        name: spec.name.clone(),
        rows,
        trajectories,
    })
}
