//! Fixed-seed property suites checking solver behaviour against theory.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use gdaam::analysis::{
    alt_operator_spectrum, check_contraction, quad_operator, rate_bound_alt, rate_bound_quad, rate_bound_sim,
    sim_operator_spectrum,
};
use gdaam::anderson::{AndersonMixer, MixerConfig};
use gdaam::gmres::{gmres_cycle, gmres_cycle_iterates, IdentityMinus};
use gdaam::numerics::{dense_eigenvalues, match_spectra};
use gdaam::optimizers::{run, Method, SolverConfig, Status};
use gdaam::problems::{
    make_random_bilinear, make_random_bilinear_quadratic, random_initial_point, scalar_catalog, AffineFixedPointMap,
    MinimaxProblem, Scheme, ScalarGameId,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::BenchError;
use crate::experiment::{ProblemSpec, scalar_step_size};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Equivalence,
    SimRate,
    AltRate,
    QuadRate,
    Spectra,
    ScalarGames,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Equivalence,
        Suite::SimRate,
        Suite::AltRate,
        Suite::QuadRate,
        Suite::Spectra,
        Suite::ScalarGames,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Equivalence => "equivalence",
            Suite::SimRate => "sim_rate",
            Suite::AltRate => "alt_rate",
            Suite::QuadRate => "quad_rate",
            Suite::Spectra => "spectra",
            Suite::ScalarGames => "scalar_games",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| BenchError::InvalidSpec(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct InstanceResult {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: Suite,
    pub instances: Vec<InstanceResult>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        !self.instances.is_empty() && self.instances.iter().all(|i| i.passed)
    }

    pub fn failures(&self) -> usize {
        self.instances.iter().filter(|i| !i.passed).count()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.instances {
            writeln!(f, "  [{}] {}: {}", if i.passed { "ok" } else { "FAIL" }, i.label, i.detail)?;
        }
        write!(
            f,
            "{}: {}/{} instances passed in {:.2}s",
            self.suite,
            self.instances.len() - self.failures(),
            self.instances.len(),
            self.elapsed.as_secs_f64()
        )
    }
}

fn instance(label: String, passed: bool, detail: String) -> InstanceResult {
    InstanceResult { label, passed, detail }
}

pub fn verify(suite: Suite) -> SuiteReport {
    let start = Instant::now();
    let instances = match suite {
        Suite::Equivalence => equivalence(),
        Suite::SimRate => sim_rate(),
        Suite::AltRate => alt_rate(),
        Suite::QuadRate => quad_rate(),
        Suite::Spectra => spectra(),
        Suite::ScalarGames => scalar_games(),
    };
    SuiteReport {
        suite,
        instances,
        elapsed: start.elapsed(),
    }
}

fn gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample(StandardNormal))
}

/// Affine map `w -> G w + b` with `||G||_2 = rho`.
fn random_affine(rng: &mut ChaCha8Rng, n: usize) -> AffineFixedPointMap {
    let g = gaussian(rng, n, n);
    let rho = rng.random_range(0.5..0.95);
    let norm = g.clone().svd(false, false).singular_values.max();
    AffineFixedPointMap {
        g: g * (rho / norm),
        offset: gaussian(rng, n, 1).column(0).into_owned(),
    }
}

const EQUIVALENCE_CYCLES: usize = 3;

/// Restarted mixer outputs against `g(x_j)` for the GMRES iterates `x_j`
/// of each restart cycle; cycle `k + 1` starts at the last output of `k`.
fn equivalence_instance(map: &AffineFixedPointMap, w0: &DVector<f64>, p: usize) -> Result<f64, String> {
    let mut mixer = AndersonMixer::new(MixerConfig::restart(p)).map_err(|e| e.to_string())?;
    let op = map.g.clone();
    let a = IdentityMinus(&op);
    let mut worst = 0.0f64;
    let mut w = w0.clone();
    let mut start = w0.clone();
    for _ in 0..EQUIVALENCE_CYCLES {
        let xs = gmres_cycle_iterates(&a, &map.offset, &start, p - 1).map_err(|e| e.to_string())?;
        for x in &xs {
            let expected = map.apply(x);
            let got = mixer.extrapolate(&w, &map.apply(&w));
            let rel = (&got - &expected).norm() / expected.norm().max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
            w = got;
        }
        start = w.clone();
    }
    Ok(worst)
}

pub const EQUIVALENCE_INSTANCES: usize = 100;
pub const EQUIVALENCE_TOL: f64 = 1e-8;

fn equivalence() -> Vec<InstanceResult> {
    (0..EQUIVALENCE_INSTANCES as u64)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.random_range(2..=20);
            let p = rng.random_range(2..=8);
            let map = random_affine(&mut rng, n);
            let w0 = gaussian(&mut rng, n, 1).column(0).into_owned();
            let label = format!("seed={seed} n={n} p={p}");
            match equivalence_instance(&map, &w0, p) {
                Ok(err) => instance(label, err <= EQUIVALENCE_TOL, format!("max relative deviation {err:.3e}")),
                Err(e) => instance(label, false, e),
            }
        })
        .collect()
}

pub const RATE_SLACK: f64 = 1e-6;
const RATE_CYCLES: usize = 40;

fn sim_rate() -> Vec<InstanceResult> {
    let ns = [20, 50, 100];
    let kappas = [10.0, 100.0, 1000.0];
    let ps = [5, 10, 20];
    (0..50u64)
        .map(|i| {
            let k = i as usize;
            let (n, kappa, p) = (ns[k % 3], kappas[(k / 3) % 3], ps[(k / 9) % 3]);
            let g = make_random_bilinear(n, i, Some(kappa)).rescale_to_unit_norm();
            let kappa_ata = g.condition_number().powi(2);
            let bound = rate_bound_sim(kappa_ata, p);
            let cfg = SolverConfig::gda_am(Method::SimGdaAm, 1.0, p)
                .with_tol(1e-10)
                .with_max_iters(RATE_CYCLES * p);
            let label = format!("seed={i} n={n} kappa(A)={kappa} p={p}");
            match run(&g, &cfg, &random_initial_point(n, i)) {
                Ok(traj) => {
                    let rep = check_contraction(&traj, &bound, p);
                    let v = rep.violations_above(bound.factor + RATE_SLACK);
                    let sq_max = rep.squared_ratios().into_iter().fold(0.0, f64::max);
                    instance(
                        label,
                        v.is_empty() && rep.checked() > 0,
                        format!(
                            "bound {:.4e}, max ratio {:.4e} (squared {:.4e}), {} of {} cycles violate",
                            bound.factor,
                            rep.max_ratio(),
                            sq_max,
                            v.len(),
                            rep.checked()
                        ),
                    )
                }
                Err(e) => instance(label, false, e.to_string()),
            }
        })
        .collect()
}

/// Smallest table size whose disk bound is below one.
pub fn alt_threshold_p(game: &gdaam::problems::BilinearGame, eta: f64) -> Option<usize> {
    (1..=1000).find(|&p| rate_bound_alt(game, eta, p).is_ok_and(|b| b.factor < 1.0))
}

fn alt_rate() -> Vec<InstanceResult> {
    let mut out = Vec::new();
    let n = 100;
    for kappa in [1.5, 2.0, 3.0] {
        for seed in 0..3u64 {
            let g = make_random_bilinear(n, seed, Some(kappa)).rescale_to_unit_norm();
            let Some(p0) = alt_threshold_p(&g, 1.0) else {
                out.push(instance(format!("seed={seed} kappa={kappa}"), false, "no p with factor < 1".into()));
                continue;
            };
            for p in [p0, p0 + 10] {
                let bound = rate_bound_alt(&g, 1.0, p).expect("eta = 1 is valid");
                let cfg = SolverConfig::gda_am(Method::AltGdaAm, 1.0, p)
                    .with_tol(1e-12)
                    .with_max_iters(RATE_CYCLES * p);
                let label = format!("seed={seed} n={n} kappa(A)={kappa} p={p}");
                match run(&g, &cfg, &random_initial_point(n, seed)) {
                    Ok(traj) => {
                        let rep = check_contraction(&traj, &bound, p);
                        let v = rep.violations_above(bound.factor + RATE_SLACK);
                        out.push(instance(
                            label,
                            v.is_empty() && rep.checked() > 0,
                            format!(
                                "bound {:.4}, max ratio {:.4e}, {} of {} cycles violate",
                                bound.factor,
                                rep.max_ratio(),
                                v.len(),
                                rep.checked()
                            ),
                        ));
                    }
                    Err(e) => out.push(instance(label, false, e.to_string())),
                }
            }
        }
    }
    out
}

pub const SPECTRUM_TOL: f64 = 1e-8;

fn spectra() -> Vec<InstanceResult> {
    (0..20u64)
        .map(|seed| {
            let n = 10 + (seed as usize * 37) % 91;
            let kappa = if seed % 2 == 0 { None } else { Some(10f64.powi(1 + (seed as i32 % 3))) };
            let g = make_random_bilinear(n, seed, kappa).rescale_to_unit_norm();
            let mut worst = 0.0f64;
            let mut ok = true;
            for (scheme, spec) in [
                (Scheme::Sim, sim_operator_spectrum(&g, 1.0)),
                (Scheme::Alt, alt_operator_spectrum(&g, 1.0)),
            ] {
                let op = g.affine_map(scheme, 1.0).expect("bilinear map").operator();
                match dense_eigenvalues(&op) {
                    Ok(d) => worst = worst.max(match_spectra(&spec.eigenvalues, &d.eigenvalues)),
                    Err(_) => ok = false,
                }
            }
            instance(
                format!("seed={seed} n={n} kappa={kappa:?}"),
                ok && worst <= SPECTRUM_TOL,
                format!("max eigenvalue mismatch {worst:.3e}"),
            )
        })
        .collect()
}

fn quad_rate() -> Vec<InstanceResult> {
    (0..50u64)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let n = rng.random_range(2..=50);
            let shift = rng.random_range(0.05..1.0);
            let eta = rng.random_range(0.1..1.5);
            let g = make_random_bilinear_quadratic(n, seed, shift);
            let label = format!("seed={seed} n={n} shift={shift:.3} eta={eta:.3}");
            let bound = match rate_bound_quad(&g, eta) {
                Ok(b) => b,
                Err(e) => return instance(label, false, e.to_string()),
            };
            let j = quad_operator(&g, eta);
            let b = gaussian(&mut rng, 2 * n, 1).column(0).into_owned();
            let cycle = match gmres_cycle(&j, &b, &DVector::zeros(2 * n), 2 * n) {
                Ok(c) => c,
                Err(e) => return instance(label, false, e.to_string()),
            };
            let r0 = cycle.residual_history[0];
            let worst = cycle
                .residual_history
                .iter()
                .enumerate()
                .map(|(t, &r)| r / (bound.factor.powi(t as i32) * r0))
                .filter(|x| x.is_finite())
                .fold(0.0f64, f64::max);
            instance(
                label,
                worst <= 1.0 + 1e-10,
                format!("factor {:.4}, max ||r_t|| / bound_t = {worst:.4}", bound.factor),
            )
        })
        .collect()
}

pub const SCALAR_GRAD_TOL: f64 = 1e-4;
pub const SCALAR_MAX_ITERS: usize = 100_000;
pub const SCALAR_TABLE_SIZE: usize = 3;
pub const QUARTIC_CUBIC_TOL: f64 = 1e-2;

fn scalar_games() -> Vec<InstanceResult> {
    let mut out = Vec::new();
    for entry in scalar_catalog() {
        let id = entry.game.id;
        let eta = scalar_step_size(id);
        let (problem, w0) = ProblemSpec::Scalar(id).build(0);
        let am = SolverConfig::gda_am(Method::AltGdaAm, eta, SCALAR_TABLE_SIZE)
            .with_tol(SCALAR_GRAD_TOL)
            .with_max_iters(SCALAR_MAX_ITERS);
        let label = format!("{id} alt-gda-am eta={eta}");
        match run(problem.as_ref(), &am, &w0) {
            Ok(traj) => {
                let w = traj.final_iterate.as_vector();
                let grad = problem.grad_field(&traj.final_iterate).norm();
                let mut passed = traj.status == Status::Converged && grad < SCALAR_GRAD_TOL;
                let mut detail = format!(
                    "{} after {} iterations at ({:.6}, {:.6}), grad {grad:.2e}",
                    traj.status,
                    traj.iterations(),
                    w[0],
                    w[1]
                );
                if let (ScalarGameId::QuarticCubic, Some((x, y))) = (id, entry.local_minimax) {
                    let d = ((w[0] - x).powi(2) + (w[1] - y).powi(2)).sqrt();
                    passed &= d <= QUARTIC_CUBIC_TOL;
                    detail += &format!(", distance to local minimax {d:.2e}");
                }
                out.push(instance(label, passed, detail));
            }
            Err(e) => out.push(instance(label, false, e.to_string())),
        }
    }

    let id = ScalarGameId::NegQuadraticCross;
    let (problem, w0) = ProblemSpec::Scalar(id).build(0);
    let cfg = SolverConfig::new(Method::SimGda, scalar_step_size(id))
        .with_tol(SCALAR_GRAD_TOL)
        .with_max_iters(SCALAR_MAX_ITERS);
    let label = format!("{id} sim-gda must fail");
    match run(problem.as_ref(), &cfg, &w0) {
        Ok(traj) => out.push(instance(
            label,
            traj.status != Status::Converged,
            format!("{} after {} iterations", traj.status, traj.iterations()),
        )),
        Err(e) => out.push(instance(label, false, e.to_string())),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn equivalence_on_a_small_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let map = random_affine(&mut rng, 6);
        let w0 = DVector::from_element(6, 1.0);
        for p in 2..=8 {
            assert!(equivalence_instance(&map, &w0, p).unwrap() < EQUIVALENCE_TOL);
        }
    }

    #[test]
    fn report_formatting() {
        let r = SuiteReport {
            suite: Suite::Spectra,
            instances: vec![instance("a".into(), true, "fine".into()), instance("b".into(), false, "bad".into())],
            elapsed: Duration::from_millis(5),
        };
        assert!(!r.passed());
        let text = r.to_string();
        assert!(text.contains("[FAIL] b: bad"));
        assert!(text.contains("1/2 instances passed"));
    }
}
