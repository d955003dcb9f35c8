//! Restarted GMRES with modified Gram-Schmidt Arnoldi and Givens rotations.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative threshold (against `||b||`) for a happy breakdown.
pub const BREAKDOWN_TOL: f64 = 1e-14;

/// Anything that can multiply a vector.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &DVector<f64>) -> DVector<f64>;
}

impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        self * x
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        (**self).apply(x)
    }
}

/// `x -> x - G x`, the operator whose GMRES iterates Anderson mixing tracks
/// for the fixed-point map `x -> G x + b`.
#[derive(Debug, Clone, Copy)]
pub struct IdentityMinus<'a>(pub &'a DMatrix<f64>);

impl LinearOperator for IdentityMinus<'_> {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        x - self.0 * x
    }
}

#[derive(Debug, Clone)]
pub struct GmresCycle {
    pub solution: DVector<f64>,
    /// `||r_0||, ||r_1||, ...`; shorter than `m + 1` after a happy breakdown.
    pub residual_history: Vec<f64>,
    pub happy_breakdown: bool,
}

#[derive(Debug, Clone)]
pub struct GmresReport {
    pub solution: DVector<f64>,
    /// Initial residual followed by every inner-iteration residual estimate.
    pub residual_history: Vec<f64>,
    /// Index into `residual_history` at which each cycle starts.
    pub cycle_starts: Vec<usize>,
    pub cycles: usize,
    pub converged: bool,
}

impl GmresReport {
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(0.0)
    }
}

struct Arnoldi {
    basis: Vec<DVector<f64>>,
    // rotated Hessenberg columns, i.e. the growing upper triangle R
    r_cols: Vec<Vec<f64>>,
    cs: Vec<f64>,
    sn: Vec<f64>,
    g: Vec<f64>,
    breakdown: bool,
}

impl Arnoldi {
    fn start(r0: DVector<f64>, beta: f64) -> Self {
        Self {
            basis: vec![r0 / beta],
            r_cols: Vec::new(),
            cs: Vec::new(),
            sn: Vec::new(),
            g: vec![beta],
            breakdown: false,
        }
    }

    fn steps(&self) -> usize {
        self.r_cols.len()
    }

    /// One Arnoldi step; returns the updated residual norm.
    fn step<A: LinearOperator>(&mut self, a: &A, breakdown_abs: f64) -> f64 {
        let k = self.steps();
        let mut w = a.apply(&self.basis[k]);
        let mut h = Vec::with_capacity(k + 2);
        for v in &self.basis {
            let hij = v.dot(&w);
            w.axpy(-hij, v, 1.0);
            h.push(hij);
        }
        let hnext = w.norm();
        h.push(hnext);

        for i in 0..k {
            let (c, s) = (self.cs[i], self.sn[i]);
            let (a0, a1) = (h[i], h[i + 1]);
            h[i] = c * a0 + s * a1;
            h[i + 1] = -s * a0 + c * a1;
        }
        let (a0, a1) = (h[k], h[k + 1]);
        let rho = a0.hypot(a1);
        let (c, s) = if rho == 0.0 { (1.0, 0.0) } else { (a0 / rho, a1 / rho) };
        h[k] = rho;
        h.truncate(k + 1);
        self.cs.push(c);
        self.sn.push(s);
        let gk = self.g[k];
        self.g[k] = c * gk;
        self.g.push(-s * gk);
        self.r_cols.push(h);

        if hnext <= breakdown_abs || !hnext.is_finite() {
            self.breakdown = true;
        } else {
            self.basis.push(w / hnext);
        }
        self.g[k + 1].abs()
    }

    /// `x0 + V_k y_k` for the current number of steps `k`.
    fn iterate(&self, x0: &DVector<f64>) -> DVector<f64> {
        let k = self.steps();
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = self.g[i];
            for (j, yj) in y.iter().enumerate().skip(i + 1) {
                s -= self.r_cols[j][i] * yj;
            }
            let d = self.r_cols[i][i];
            y[i] = if d == 0.0 { 0.0 } else { s / d };
        }
        let mut x = x0.clone();
        for (v, yi) in self.basis.iter().zip(&y) {
            x.axpy(*yi, v, 1.0);
        }
        x
    }
}

fn check_dims<A: LinearOperator>(a: &A, b: &DVector<f64>, x0: &DVector<f64>) -> Result<()> {
    let n = a.dim();
    for got in [b.len(), x0.len()] {
        if got != n {
            return Err(Error::DimensionMismatch { expected: n, got });
        }
    }
    Ok(())
}

fn run_cycle<A: LinearOperator>(
    a: &A,
    b: &DVector<f64>,
    x0: &DVector<f64>,
    m: usize,
    stop_abs: f64,
    mut on_iterate: impl FnMut(&Arnoldi),
) -> GmresCycle {
    let r0 = b - a.apply(x0);
    let beta = r0.norm();
    let breakdown_abs = BREAKDOWN_TOL * b.norm();
    if beta <= breakdown_abs || beta == 0.0 || beta <= stop_abs {
        return GmresCycle {
            solution: x0.clone(),
            residual_history: vec![beta],
            happy_breakdown: true,
        };
    }
    let mut arnoldi = Arnoldi::start(r0, beta);
    on_iterate(&arnoldi);
    let mut history = vec![beta];
    for _ in 0..m {
        let res = arnoldi.step(a, breakdown_abs);
        history.push(res);
        on_iterate(&arnoldi);
        if arnoldi.breakdown || res <= stop_abs {
            break;
        }
    }
    GmresCycle {
        solution: arnoldi.iterate(x0),
        residual_history: history,
        happy_breakdown: arnoldi.breakdown,
    }
}

/// One GMRES cycle of at most `m` Arnoldi steps from `x0`.
pub fn gmres_cycle<A: LinearOperator>(a: &A, b: &DVector<f64>, x0: &DVector<f64>, m: usize) -> Result<GmresCycle> {
    check_dims(a, b, x0)?;
    Ok(run_cycle(a, b, x0, m, 0.0, |_| {}))
}

/// Every intermediate iterate `x_0, ..., x_m` of one GMRES cycle.
///
/// After a happy breakdown at step `k` the exact solution `x_k` is repeated
/// so the result always has `m + 1` entries.
pub fn gmres_cycle_iterates<A: LinearOperator>(
    a: &A,
    b: &DVector<f64>,
    x0: &DVector<f64>,
    m: usize,
) -> Result<Vec<DVector<f64>>> {
    check_dims(a, b, x0)?;
    let mut iterates = Vec::with_capacity(m + 1);
    let cycle = run_cycle(a, b, x0, m, 0.0, |arn| iterates.push(arn.iterate(x0)));
    if iterates.is_empty() {
        iterates.push(cycle.solution.clone());
    }
    while iterates.len() < m + 1 {
        iterates.push(cycle.solution.clone());
    }
    Ok(iterates)
}

/// GMRES(m) restarted until `||r|| <= tol * ||b||` or `max_cycles` cycles.
///
/// With `b = 0` the tolerance is taken relative to the initial residual.
pub fn gmres_restarted<A: LinearOperator>(
    a: &A,
    b: &DVector<f64>,
    x0: &DVector<f64>,
    m: usize,
    tol: f64,
    max_cycles: usize,
) -> Result<GmresReport> {
    check_dims(a, b, x0)?;
    if m == 0 {
        return Err(Error::InvalidConfig("GMRES restart length must be at least 1".into()));
    }
    let bnorm = b.norm();
    let r0 = (b - a.apply(x0)).norm();
    let reference = if bnorm > 0.0 { bnorm } else { r0 };
    let stop_abs = tol * reference;

    let mut report = GmresReport {
        solution: x0.clone(),
        residual_history: vec![r0],
        cycle_starts: Vec::new(),
        cycles: 0,
        converged: r0 <= stop_abs || r0 == 0.0,
    };
    while !report.converged && report.cycles < max_cycles {
        let cycle = run_cycle(a, b, &report.solution, m, stop_abs, |_| {});
        report.cycle_starts.push(report.residual_history.len() - 1);
        // the cycle's first entry is a fresh evaluation of the residual the
        // previous cycle ended on
        *report.residual_history.last_mut().expect("non-empty") = cycle.residual_history[0];
        report.residual_history.extend_from_slice(&cycle.residual_history[1..]);
        report.solution = cycle.solution;
        report.cycles += 1;
        let true_res = (b - a.apply(&report.solution)).norm();
        report.converged = true_res <= stop_abs || (cycle.happy_breakdown && true_res <= 1e3 * f64::EPSILON * reference);
    }
    if report.converged {
        Ok(report)
    } else {
        Err(Error::MaxCyclesExceeded(Box::new(report)))
    }
}
