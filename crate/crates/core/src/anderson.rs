//! Anderson mixing for fixed-point iterations `w -> g(w)`.
//!
//! The mixer keeps `(w_i, g(w_i))` pairs, factors the residual differences
//! `f_{i+1} - f_i` (with `f_i = g(w_i) - w_i`) incrementally, and returns
//! `g(w_t) - dG gamma` where `gamma` solves the unconstrained least-squares
//! form of `min ||F beta||, sum(beta) = 1`.

use std::collections::VecDeque;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::numerics::{ThinQR, WeightVector, DEFAULT_DROP_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixingMode {
    /// Clear the table after every `p` extrapolations.
    Restart,
    /// Keep the most recent `p + 1` pairs.
    Sliding,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixerConfig {
    pub table_size: usize,
    pub mode: MixingMode,
    pub drop_tol: f64,
    /// Tikhonov weight used when the QR factor is ill-conditioned;
    /// `None` picks `1e-12 ||R||_F^2`.
    pub regularization: Option<f64>,
}

impl MixerConfig {
    pub fn restart(table_size: usize) -> Self {
        Self {
            table_size,
            mode: MixingMode::Restart,
            drop_tol: DEFAULT_DROP_TOL,
            regularization: None,
        }
    }

    pub fn sliding(table_size: usize) -> Self {
        Self {
            mode: MixingMode::Sliding,
            ..Self::restart(table_size)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.table_size == 0 {
            return Err(Error::InvalidConfig("table size p must be at least 1".into()));
        }
        if !(self.drop_tol > 0.0) {
            return Err(Error::InvalidConfig(format!("drop_tol must be positive, got {}", self.drop_tol)));
        }
        if let Some(d) = self.regularization {
            if !(d >= 0.0) {
                return Err(Error::InvalidConfig(format!("regularization must be nonnegative, got {d}")));
            }
        }
        Ok(())
    }
}

impl Default for MixerConfig {
    fn default() -> Self {
        Self::restart(10)
    }
}

/// Counters describing what the mixer has done so far.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MixerStats {
    pub extrapolations: usize,
    pub scheduled_restarts: usize,
    pub dependent_restarts: usize,
    pub ill_conditioned_solves: usize,
    pub nonfinite_fallbacks: usize,
}

#[derive(Debug, Clone)]
struct Entry {
    w: DVector<f64>,
    gw: DVector<f64>,
    f: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct AndersonMixer {
    config: MixerConfig,
    history: VecDeque<Entry>,
    qr: Option<ThinQR>,
    since_restart: usize,
    last_weights: Option<WeightVector>,
    stats: MixerStats,
}

impl AndersonMixer {
    pub fn new(config: MixerConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            history: VecDeque::with_capacity(config.table_size + 1),
            qr: None,
            since_restart: 0,
            last_weights: None,
            stats: MixerStats::default(),
        })
    }

    pub fn config(&self) -> &MixerConfig {
        &self.config
    }

    pub fn history_len(&self) -> usize {
        self.history.len()
    }

    pub fn qr_columns(&self) -> usize {
        self.qr.as_ref().map_or(0, ThinQR::ncols)
    }

    pub fn iterations_since_restart(&self) -> usize {
        self.since_restart
    }

    pub fn stats(&self) -> MixerStats {
        self.stats
    }

    /// Weights used by the most recent extrapolation, oldest pair first.
    pub fn last_weights(&self) -> Option<&WeightVector> {
        self.last_weights.as_ref()
    }

    /// Empties the table. Counters in [`MixerStats`] are kept.
    pub fn reset(&mut self) {
        self.history.clear();
        if let Some(qr) = self.qr.as_mut() {
            qr.clear();
        }
        self.since_restart = 0;
    }

    /// Records `(w, g(w))` and returns the mixed next iterate.
    pub fn extrapolate(&mut self, w: &DVector<f64>, gw: &DVector<f64>) -> DVector<f64> {
        assert_eq!(w.len(), gw.len(), "iterate and its image must have the same length");
        self.stats.extrapolations += 1;
        let n = w.len();
        if self.qr.as_ref().is_none_or(|qr| qr.nrows() != n) {
            self.qr = Some(ThinQR::with_drop_tol(n, self.config.drop_tol));
            self.history.clear();
            self.since_restart = 0;
        }
        if !w.iter().chain(gw.iter()).all(|v| v.is_finite()) {
            self.stats.nonfinite_fallbacks += 1;
            self.reset();
            return gw.clone();
        }

        let f = gw - w;
        if self.config.mode == MixingMode::Sliding && self.history.len() == self.config.table_size + 1 {
            self.history.pop_front();
            self.rebuild_qr();
        }
        if let Some(prev) = self.history.back() {
            let diff = &f - &prev.f;
            let qr = self.qr.as_mut().expect("qr initialised");
            if qr.append_column(&diff).is_err() {
                self.stats.dependent_restarts += 1;
                self.reset();
            }
        }
        self.history.push_back(Entry {
            w: w.clone(),
            gw: gw.clone(),
            f,
        });
        self.since_restart += 1;

        let out = self.mix();
        let out = match out {
            Some(v) => v,
            None => {
                self.stats.nonfinite_fallbacks += 1;
                self.reset();
                self.history.push_back(Entry {
                    w: w.clone(),
                    gw: gw.clone(),
                    f: gw - w,
                });
                self.since_restart = 1;
                self.last_weights = Some(WeightVector { beta: vec![1.0] });
                gw.clone()
            }
        };

        if self.config.mode == MixingMode::Restart && self.since_restart >= self.config.table_size {
            self.stats.scheduled_restarts += 1;
            self.reset();
        }
        out
    }

    fn rebuild_qr(&mut self) {
        let qr = self.qr.as_mut().expect("qr initialised");
        qr.clear();
        let mut kept = VecDeque::with_capacity(self.history.len());
        for entry in self.history.drain(..) {
            if let Some(prev) = kept.back() {
                let prev: &Entry = prev;
                if qr.append_column(&(&entry.f - &prev.f)).is_err() {
                    // the window no longer spans a valid table; keep the newest part
                    qr.clear();
                    kept.clear();
                    self.stats.dependent_restarts += 1;
                }
            }
            kept.push_back(entry);
        }
        self.history = kept;
    }

    fn mix(&mut self) -> Option<DVector<f64>> {
        let last = self.history.back().expect("non-empty history");
        let qr = self.qr.as_ref().expect("qr initialised");
        if qr.is_empty() {
            self.last_weights = Some(WeightVector { beta: vec![1.0] });
            return Some(last.gw.clone());
        }
        let sol = qr.solve_least_squares(&last.f, self.config.regularization);
        if sol.ill_conditioned {
            self.stats.ill_conditioned_solves += 1;
        }
        let gamma = sol.coefficients;
        let mut out = last.gw.clone();
        for (i, pair) in self.history.iter().zip(self.history.iter().skip(1)).enumerate() {
            let dg = &pair.1.gw - &pair.0.gw;
            out.axpy(-gamma[i], &dg, 1.0);
        }
        if !out.iter().all(|v| v.is_finite()) {
            return None;
        }
        self.last_weights = Some(WeightVector::from_gamma(gamma.as_slice()));
        Some(out)
    }

    /// Iterates stored in the table, oldest first.
    pub fn iterates(&self) -> impl Iterator<Item = &DVector<f64>> {
        self.history.iter().map(|e| &e.w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn scalar_affine_map_hits_fixed_point() {
        let g = |w: &DVector<f64>| w * 0.5 + v(&[1.0]);
        let mut mixer = AndersonMixer::new(MixerConfig::restart(2)).unwrap();
        let w0 = v(&[0.0]);
        let w1 = mixer.extrapolate(&w0, &g(&w0));
        assert_eq!(w1[0], 1.0);
        let w2 = mixer.extrapolate(&w1, &g(&w1));
        assert!((w2[0] - 2.0).abs() < 1e-15);
        assert_eq!(mixer.last_weights().unwrap().beta, vec![-1.0, 2.0]);
    }

    #[test]
    fn two_dimensional_affine_map_is_exact() {
        let gm = DMatrix::from_row_slice(2, 2, &[0.3, 0.4, -0.2, 0.6]);
        let b = v(&[1.0, -1.0]);
        let fixed = (DMatrix::identity(2, 2) - &gm).lu().solve(&b).unwrap();
        let mut mixer = AndersonMixer::new(MixerConfig::restart(3)).unwrap();
        let mut w = v(&[5.0, 3.0]);
        for _ in 0..3 {
            let gw = &gm * &w + &b;
            w = mixer.extrapolate(&w, &gw);
        }
        assert!((w - fixed).norm() < 1e-10);
    }

    #[test]
    fn fixed_point_is_returned_unchanged() {
        let mut mixer = AndersonMixer::new(MixerConfig::restart(4)).unwrap();
        let w = v(&[1.0, 2.0, 3.0]);
        assert_eq!(mixer.extrapolate(&w, &w), w);
        assert_eq!(mixer.extrapolate(&w, &w), w);
    }

    #[test]
    fn reset_is_idempotent_and_forgets_history() {
        let mut mixer = AndersonMixer::new(MixerConfig::sliding(3)).unwrap();
        mixer.extrapolate(&v(&[1.0]), &v(&[0.5]));
        mixer.extrapolate(&v(&[0.5]), &v(&[0.2]));
        mixer.reset();
        mixer.reset();
        assert_eq!(mixer.history_len(), 0);
        assert_eq!(mixer.qr_columns(), 0);
        assert_eq!(mixer.iterations_since_restart(), 0);
        assert_eq!(mixer.extrapolate(&v(&[7.0]), &v(&[4.0])), v(&[4.0]));
    }

    #[test]
    fn restart_mode_bounds_the_table() {
        let p = 4;
        let mut mixer = AndersonMixer::new(MixerConfig::restart(p)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let gm = DMatrix::from_fn(6, 6, |_, _| StandardNormal.sample(&mut rng)) * 0.2;
        let mut w = DVector::from_element(6, 1.0);
        for t in 0..20 {
            let gw = &gm * &w;
            w = mixer.extrapolate(&w, &gw);
            assert!(mixer.history_len() <= p);
            assert_eq!(mixer.qr_columns(), mixer.history_len().saturating_sub(1));
            assert_eq!(mixer.history_len(), (t + 1) % p);
        }
        assert_eq!(mixer.stats().scheduled_restarts, 5);
    }

    #[test]
    fn sliding_mode_keeps_p_plus_one() {
        let p = 3;
        let mut mixer = AndersonMixer::new(MixerConfig::sliding(p)).unwrap();
        let gm = DMatrix::from_row_slice(4, 4, &[
            0.5, 0.1, 0.0, 0.0, //
            -0.1, 0.5, 0.2, 0.0, //
            0.0, -0.2, 0.4, 0.1, //
            0.0, 0.0, -0.1, 0.3,
        ]);
        let b = v(&[1.0, 0.0, -1.0, 2.0]);
        let fixed = (DMatrix::identity(4, 4) - &gm).lu().solve(&b).unwrap();
        let mut w = DVector::zeros(4);
        for _ in 0..12 {
            let gw = &gm * &w + &b;
            w = mixer.extrapolate(&w, &gw);
            assert!(mixer.history_len() <= p + 1);
            assert_eq!(mixer.qr_columns(), mixer.history_len().saturating_sub(1));
        }
        assert!((w - fixed).norm() < 1e-8);
    }

    #[test]
    fn residual_nonincreasing_within_cycle() {
        // G = rho * orthogonal keeps ||G r|| proportional to the GMRES residual
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let n = 12;
            let q = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng)).qr().q();
            let gm = q * 0.9;
            let b = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
            let p = 6;
            let mut mixer = AndersonMixer::new(MixerConfig::restart(p)).unwrap();
            let mut w = DVector::zeros(n);
            let mut residuals = Vec::new();
            for _ in 0..p {
                let gw = &gm * &w + &b;
                residuals.push((&gw - &w).norm());
                w = mixer.extrapolate(&w, &gw);
            }
            for pair in residuals.windows(2) {
                assert!(pair[1] <= pair[0] * (1.0 + 1e-10));
            }
        }
    }

    #[test]
    fn nonfinite_input_falls_back() {
        let mut mixer = AndersonMixer::new(MixerConfig::restart(3)).unwrap();
        mixer.extrapolate(&v(&[1.0]), &v(&[0.0]));
        let out = mixer.extrapolate(&v(&[f64::NAN]), &v(&[2.0]));
        assert_eq!(out, v(&[2.0]));
        assert_eq!(mixer.stats().nonfinite_fallbacks, 1);
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(AndersonMixer::new(MixerConfig::restart(0)).is_err());
        let mut c = MixerConfig::restart(2);
        c.drop_tol = 0.0;
        assert!(AndersonMixer::new(c).is_err());
    }
}
