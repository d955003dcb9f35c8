//! Iterative minimax solvers and the common driver [`run`].

mod steps;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::anderson::{AndersonMixer, MixerConfig, MixerStats};
use crate::error::{Error, Result};
use crate::problems::{JointIterate, MinimaxProblem};

pub use steps::{step_alt_gda, step_eg, step_eg_momentum, step_og, step_sim_gda};

/// Iterates whose norm exceeds this are declared divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    SimGda,
    AltGda,
    Eg,
    Og,
    EgMomentum,
    SimGdaAm,
    AltGdaAm,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::SimGda,
        Method::AltGda,
        Method::Eg,
        Method::Og,
        Method::EgMomentum,
        Method::SimGdaAm,
        Method::AltGdaAm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::SimGda => "sim-gda",
            Method::AltGda => "alt-gda",
            Method::Eg => "eg",
            Method::Og => "og",
            Method::EgMomentum => "eg-momentum",
            Method::SimGdaAm => "sim-gda-am",
            Method::AltGdaAm => "alt-gda-am",
        }
    }

    pub fn uses_mixer(self) -> bool {
        matches!(self, Method::SimGdaAm | Method::AltGdaAm)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        let alias = match norm.as_str() {
            "eg-nm" | "eg-pm" => "eg-momentum",
            other => other,
        };
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == alias)
            .ok_or_else(|| Error::Parse(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    /// Step size; for [`Method::EgMomentum`] the update step size.
    pub eta: f64,
    /// Extrapolation step size for [`Method::EgMomentum`]; defaults to `eta`.
    pub eta_extrapolation: Option<f64>,
    pub momentum: f64,
    pub mixer: Option<MixerConfig>,
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl SolverConfig {
    pub fn new(method: Method, eta: f64) -> Self {
        Self {
            method,
            eta,
            eta_extrapolation: None,
            momentum: 0.0,
            mixer: None,
            tol: 1e-5,
            max_iters: 1_000_000,
            seed: 0,
        }
    }

    pub fn gda_am(method: Method, eta: f64, table_size: usize) -> Self {
        Self {
            mixer: Some(MixerConfig::restart(table_size)),
            ..Self::new(method, eta)
        }
    }

    /// EG with negative momentum `beta = -0.3`, mirroring the positive preset.
    pub fn eg_negative_momentum(eta: f64) -> Self {
        Self {
            momentum: -0.3,
            ..Self::new(Method::EgMomentum, eta)
        }
    }

    /// EG with positive momentum: extrapolation step 1, update step 0.5,
    /// `beta = 0.3`.
    pub fn eg_positive_momentum() -> Self {
        Self {
            eta_extrapolation: Some(1.0),
            momentum: 0.3,
            ..Self::new(Method::EgMomentum, 0.5)
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return bad(format!("eta must be positive and finite, got {}", self.eta));
        }
        if let Some(e) = self.eta_extrapolation {
            if !(e > 0.0) || !e.is_finite() {
                return bad(format!("extrapolation step must be positive, got {e}"));
            }
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1".into());
        }
        if self.method == Method::EgMomentum && !(self.momentum > -1.0 && self.momentum < 1.0) {
            return bad(format!("momentum must lie in (-1, 1), got {}", self.momentum));
        }
        if self.method.uses_mixer() {
            match &self.mixer {
                Some(m) => m.validate()?,
                None => return bad(format!("{} needs a mixer configuration", self.method)),
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Converged,
    MaxIters,
    Diverged,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIters => "max_iters",
            Status::Diverged => "diverged",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Status {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "converged" => Ok(Status::Converged),
            "max_iters" => Ok(Status::MaxIters),
            "diverged" => Ok(Status::Diverged),
            other => Err(Error::Parse(format!("unknown status `{other}`"))),
        }
    }
}

/// State at iterate `w_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub iter: usize,
    /// Nanoseconds since the run started.
    pub time_ns: u64,
    pub dist_to_opt: Option<f64>,
    /// `||V(w_t)||`.
    pub grad_norm: f64,
    /// `||step(w_t) - w_t||` for the method's raw (unmixed) step.
    pub residual_norm: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub method: Method,
    pub records: Vec<Record>,
    pub status: Status,
    pub final_iterate: JointIterate,
    pub mixer_stats: Option<MixerStats>,
}

impl Trajectory {
    /// Number of steps taken.
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.iter)
    }

    pub fn final_record(&self) -> Option<&Record> {
        self.records.last()
    }

    pub fn distances(&self) -> Option<Vec<f64>> {
        self.records.iter().map(|r| r.dist_to_opt).collect()
    }
}

enum Stepper {
    Plain,
    Og { prev_field: Option<JointIterate> },
    Momentum { prev: Option<JointIterate> },
    Mixed(Box<AndersonMixer>),
}

fn raw_step(problem: &dyn MinimaxProblem, config: &SolverConfig, stepper: &Stepper, w: &JointIterate) -> JointIterate {
    let eta = config.eta;
    match (config.method, stepper) {
        (Method::SimGda | Method::SimGdaAm, _) => step_sim_gda(problem, w, eta),
        (Method::AltGda | Method::AltGdaAm, _) => step_alt_gda(problem, w, eta),
        (Method::Eg, _) => step_eg(problem, w, eta),
        (Method::Og, Stepper::Og { prev_field }) => step_og(problem, w, prev_field.as_ref(), eta),
        (Method::EgMomentum, Stepper::Momentum { prev }) => step_eg_momentum(
            problem,
            w,
            prev.as_ref(),
            config.eta_extrapolation.unwrap_or(eta),
            eta,
            config.momentum,
        ),
        _ => unreachable!("stepper state matches the method"),
    }
}

/// Runs `config.method` from `w0` until the stopping rule fires.
///
/// Stops when `||w_t - w*|| <= tol` (if the problem knows `w*`) or
/// `||V(w_t)|| <= tol` (otherwise), when `max_iters` steps were taken, or
/// when the iterate norm exceeds [`DIVERGENCE_THRESHOLD`].
pub fn run(problem: &dyn MinimaxProblem, config: &SolverConfig, w0: &JointIterate) -> Result<Trajectory> {
    config.validate()?;
    let (nx, ny) = problem.dims();
    if w0.nx() != nx || w0.ny() != ny {
        return Err(Error::DimensionMismatch {
            expected: nx + ny,
            got: w0.as_vector().len(),
        });
    }
    let solution = problem.exact_solution();
    let mut stepper = match config.method {
        Method::Og => Stepper::Og { prev_field: None },
        Method::EgMomentum => Stepper::Momentum { prev: None },
        m if m.uses_mixer() => Stepper::Mixed(Box::new(AndersonMixer::new(config.mixer.expect("validated"))?)),
        _ => Stepper::Plain,
    };

    let start = Instant::now();
    let mut records = Vec::new();
    let mut w = w0.clone();
    let mut t = 0usize;
    let status = loop {
        let field = problem.grad_field(&w);
        let grad_norm = field.norm();
        let dist = solution.as_ref().map(|s| w.distance(s));
        let diverged = !w.is_finite() || w.norm() > DIVERGENCE_THRESHOLD || !grad_norm.is_finite();
        let raw = if diverged { None } else { Some(raw_step(problem, config, &stepper, &w)) };
        let residual_norm = raw.as_ref().map_or(f64::INFINITY, |r| r.distance(&w));
        records.push(Record {
            iter: t,
            time_ns: start.elapsed().as_nanos() as u64,
            dist_to_opt: dist,
            grad_norm,
            residual_norm,
        });

        if diverged {
            break Status::Diverged;
        }
        let measure = dist.unwrap_or(grad_norm);
        if measure <= config.tol {
            break Status::Converged;
        }
        if t >= config.max_iters {
            break Status::MaxIters;
        }

        let raw = raw.expect("finite iterate");
        let next = match &mut stepper {
            Stepper::Plain => raw,
            Stepper::Og { prev_field } => {
                *prev_field = Some(field);
                raw
            }
            Stepper::Momentum { prev } => {
                *prev = Some(w.clone());
                raw
            }
            Stepper::Mixed(mixer) => JointIterate::from_stacked(mixer.extrapolate(w.as_vector(), raw.as_vector()), nx),
        };
        w = next;
        t += 1;
    };

    let mixer_stats = match &stepper {
        Stepper::Mixed(m) => Some(m.stats()),
        _ => None,
    };
    Ok(Trajectory {
        method: config.method,
        records,
        status,
        final_iterate: w,
        mixer_stats,
    })
}
