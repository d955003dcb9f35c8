use nalgebra::{DMatrix, DVector};

use super::qr::ThinQR;

/// Mixing weights in the constrained (`beta`, summing to one) form.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub beta: Vec<f64>,
}

impl WeightVector {
    pub fn from_gamma(gamma: &[f64]) -> Self {
        Self {
            beta: gamma_to_beta(gamma),
        }
    }

    pub fn gamma(&self) -> Vec<f64> {
        beta_to_gamma(&self.beta)
    }

    pub fn sum(&self) -> f64 {
        self.beta.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }
}

/// `beta_0 = gamma_0`, `beta_i = gamma_i - gamma_{i-1}`, `beta_p = 1 - gamma_{p-1}`.
pub fn gamma_to_beta(gamma: &[f64]) -> Vec<f64> {
    let p = gamma.len();
    let mut beta = Vec::with_capacity(p + 1);
    let mut prev = 0.0;
    for &g in gamma {
        beta.push(g - prev);
        prev = g;
    }
    beta.push(1.0 - prev);
    beta
}

/// Inverse of [`gamma_to_beta`]: `gamma_i = beta_0 + ... + beta_i`.
pub fn beta_to_gamma(beta: &[f64]) -> Vec<f64> {
    let p = beta.len().saturating_sub(1);
    let mut acc = 0.0;
    beta[..p]
        .iter()
        .map(|b| {
            acc += b;
            acc
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct MixingSolution {
    pub weights: WeightVector,
    pub ill_conditioned: bool,
    /// Difference columns skipped because they were numerically dependent;
    /// their `gamma` entries are pinned to zero.
    pub dropped_columns: Vec<usize>,
}

/// Solves `min ||F beta||` subject to `sum(beta) = 1`.
///
/// The constraint is eliminated by writing `F beta = f_last - dF gamma`
/// with `dF = [f_1 - f_0, ..., f_p - f_{p-1}]`; `dF` is factored column by
/// column and `gamma` comes from back substitution.
pub fn solve_mixing_weights(residuals: &DMatrix<f64>) -> MixingSolution {
    let cols = residuals.ncols();
    assert!(cols >= 1, "need at least one residual column");
    let n = residuals.nrows();
    let last = residuals.column(cols - 1).into_owned();

    let mut qr = ThinQR::new(n);
    let mut kept = Vec::with_capacity(cols - 1);
    let mut dropped_columns = Vec::new();
    for j in 0..cols - 1 {
        let diff: DVector<f64> = residuals.column(j + 1) - residuals.column(j);
        match qr.append_column(&diff) {
            Ok(()) => kept.push(j),
            Err(_) => dropped_columns.push(j),
        }
    }

    let sol = qr.solve_least_squares(&last, None);
    let mut gamma = vec![0.0; cols - 1];
    for (slot, &j) in kept.iter().enumerate() {
        gamma[j] = sol.coefficients[slot];
    }
    MixingSolution {
        weights: WeightVector::from_gamma(&gamma),
        ill_conditioned: sol.ill_conditioned,
        dropped_columns,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn weighted_norm(f: &DMatrix<f64>, beta: &[f64]) -> f64 {
        (f * DVector::from_column_slice(beta)).norm()
    }

    #[test]
    fn single_column() {
        let f = DMatrix::from_column_slice(3, 1, &[1.0, -2.0, 0.5]);
        assert_eq!(solve_mixing_weights(&f).weights.beta, vec![1.0]);
    }

    #[test]
    fn opposite_columns_cancel() {
        let f = DMatrix::from_column_slice(2, 2, &[1.0, 2.0, -1.0, -2.0]);
        let sol = solve_mixing_weights(&f);
        assert!((sol.weights.beta[0] - 0.5).abs() < 1e-15);
        assert!((sol.weights.beta[1] - 0.5).abs() < 1e-15);
        assert!(weighted_norm(&f, &sol.weights.beta) < 1e-15);
    }

    #[test]
    fn orthonormal_columns_split_evenly() {
        let f = DMatrix::<f64>::identity(2, 2);
        let sol = solve_mixing_weights(&f);
        assert!((sol.weights.beta[0] - 0.5).abs() < 1e-15);
        assert!((sol.weights.beta[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn repeated_column_is_dropped() {
        let f = DMatrix::from_column_slice(2, 3, &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
        let sol = solve_mixing_weights(&f);
        assert_eq!(sol.dropped_columns, vec![0]);
        assert!((sol.weights.sum() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gamma_beta_example() {
        assert_eq!(gamma_to_beta(&[0.25, 0.75]), vec![0.25, 0.5, 0.25]);
        assert_eq!(beta_to_gamma(&[0.25, 0.5, 0.25]), vec![0.25, 0.75]);
        assert_eq!(gamma_to_beta(&[]), vec![1.0]);
    }

    proptest! {
        #[test]
        fn weights_sum_to_one_and_beat_every_vertex(
            n in 2usize..12,
            k in 1usize..6,
            seed in proptest::collection::vec(-1.0f64..1.0, 72),
        ) {
            let k = k.min(n);
            let f = DMatrix::from_fn(n, k, |i, j| seed[(i * 6 + j) % seed.len()] + 0.01 * (i as f64 - j as f64));
            let sol = solve_mixing_weights(&f);
            prop_assert!((sol.weights.sum() - 1.0).abs() <= 1e-12);
            let best = weighted_norm(&f, &sol.weights.beta);
            for j in 0..k {
                prop_assert!(best <= f.column(j).norm() * (1.0 + 1e-10) + 1e-14);
            }
        }

        #[test]
        fn beta_gamma_round_trip(gamma in proptest::collection::vec(-10.0f64..10.0, 0..12)) {
            let back = beta_to_gamma(&gamma_to_beta(&gamma));
            prop_assert_eq!(back.len(), gamma.len());
            for (a, b) in back.iter().zip(&gamma) {
                prop_assert!((a - b).abs() <= 1e-14 * (1.0 + b.abs()));
            }
        }
    }
}
