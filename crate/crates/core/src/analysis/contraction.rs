use super::bounds::RateBound;
use crate::optimizers::Trajectory;

/// Cycles whose starting distance is below `NOISE_FLOOR_FACTOR * eps * N_0`
/// are reported but not judged: their ratios are rounding noise.
pub const NOISE_FLOOR_FACTOR: f64 = 1e2;
pub const RELATIVE_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleRatio {
    /// Cycle `k` covers iterations `k p ..= (k + 1) p`.
    pub cycle: usize,
    pub start: f64,
    pub end: f64,
    pub ratio: f64,
    pub skipped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    pub factor: f64,
    pub p: usize,
    pub noise_floor: f64,
    pub cycles: Vec<CycleRatio>,
}

impl ContractionReport {
    /// Cycles with `ratio > threshold` among those above the noise floor.
    pub fn violations_above(&self, threshold: f64) -> Vec<usize> {
        self.cycles.iter().filter(|c| !c.skipped && !(c.ratio <= threshold)).map(|c| c.cycle).collect()
    }

    /// Violations of `ratio <= factor (1 + 1e-6)`.
    pub fn violations(&self) -> Vec<usize> {
        self.violations_above(self.factor * (1.0 + RELATIVE_SLACK))
    }

    pub fn is_ok(&self) -> bool {
        self.violations().is_empty()
    }

    pub fn checked(&self) -> usize {
        self.cycles.iter().filter(|c| !c.skipped).count()
    }

    pub fn max_ratio(&self) -> f64 {
        self.cycles.iter().filter(|c| !c.skipped).fold(0.0, |m, c| m.max(c.ratio))
    }

    /// Ratios of squared distances, `N_{(k+1)p}^2 / N_{kp}^2`.
    pub fn squared_ratios(&self) -> Vec<f64> {
        self.cycles.iter().map(|c| c.ratio * c.ratio).collect()
    }
}

/// Per-restart ratios `N_{(k+1)p} / N_{kp}` of the distance to the solution
/// along `traj`, compared against `bound.factor`.
///
/// Records without a distance end the scan.
pub fn check_contraction(traj: &Trajectory, bound: &RateBound, p: usize) -> ContractionReport {
    assert!(p >= 1);
    let dist: Vec<f64> = traj.records.iter().map_while(|r| r.dist_to_opt).collect();
    let n0 = dist.first().copied().unwrap_or(0.0);
    let noise_floor = NOISE_FLOOR_FACTOR * f64::EPSILON * n0;
    let cycles = (0..)
        .map_while(|k: usize| {
            let end = dist.get((k + 1) * p)?;
            let start = dist[k * p];
            let skipped = start <= noise_floor;
            let ratio = if start > 0.0 { end / start } else { 0.0 };
            Some(CycleRatio {
                cycle: k,
                start,
                end: *end,
                ratio,
                skipped,
            })
        })
        .collect();
    ContractionReport {
        factor: bound.factor,
        p,
        noise_floor,
        cycles,
    }
}
