use nalgebra::{DMatrix, DVector};

/// Relative threshold below which an appended column counts as dependent.
pub const DEFAULT_DROP_TOL: f64 = 1e-10;

/// Ratio of largest to smallest `|R(i,i)|` above which the least-squares
/// solve is flagged ill-conditioned and regularised.
pub const CONDITION_WARNING_RATIO: f64 = 1e12;

/// Signal returned by [`ThinQR::append_column`] when the new column lies
/// (numerically) in the span of the existing ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DependentColumn {
    pub residual_norm: f64,
    pub column_norm: f64,
}

/// Result of a least-squares solve against the current factors.
#[derive(Debug, Clone)]
pub struct LeastSquaresSolution {
    pub coefficients: DVector<f64>,
    /// `max |R(i,i)| / min |R(i,i)|` exceeded [`CONDITION_WARNING_RATIO`]
    /// and a Tikhonov term was added.
    pub ill_conditioned: bool,
}

/// Thin QR factorisation `M = Q R` grown one column at a time.
///
/// `Q` is `n x k` with orthonormal columns and `R` is `k x k` upper
/// triangular with a nonnegative diagonal.
#[derive(Debug, Clone)]
pub struct ThinQR {
    nrows: usize,
    drop_tol: f64,
    q: Vec<DVector<f64>>,
    r: DMatrix<f64>,
}

impl ThinQR {
    pub fn new(nrows: usize) -> Self {
        Self::with_drop_tol(nrows, DEFAULT_DROP_TOL)
    }

    pub fn with_drop_tol(nrows: usize, drop_tol: f64) -> Self {
        Self {
            nrows,
            drop_tol,
            q: Vec::new(),
            r: DMatrix::zeros(0, 0),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn drop_tol(&self) -> f64 {
        self.drop_tol
    }

    pub fn q_columns(&self) -> &[DVector<f64>] {
        &self.q
    }

    pub fn q(&self) -> DMatrix<f64> {
        if self.q.is_empty() {
            return DMatrix::zeros(self.nrows, 0);
        }
        DMatrix::from_columns(&self.q)
    }

    pub fn r(&self) -> &DMatrix<f64> {
        &self.r
    }

    pub fn clear(&mut self) {
        self.q.clear();
        self.r = DMatrix::zeros(0, 0);
    }

    /// Appends `col` on the right with one modified Gram-Schmidt sweep.
    ///
    /// A second sweep runs when the first one cancels more than half of the
    /// column's norm; its projections are folded into the same column of
    /// `R`, so `QR` still reproduces the accepted columns.
    pub fn append_column(&mut self, col: &DVector<f64>) -> Result<(), DependentColumn> {
        assert_eq!(col.len(), self.nrows, "column length must match the QR row count");
        let k = self.q.len();
        let column_norm = col.norm();
        let mut v = col.clone();
        let mut coeffs = vec![0.0; k];

        let mut before = column_norm;
        for _pass in 0..2 {
            for (i, qi) in self.q.iter().enumerate() {
                let h = qi.dot(&v);
                coeffs[i] += h;
                v.axpy(-h, qi, 1.0);
            }
            let after = v.norm();
            if k == 0 || after > 0.5 * before {
                break;
            }
            before = after;
        }

        let residual_norm = v.norm();
        if !(residual_norm > self.drop_tol * column_norm) || !residual_norm.is_finite() {
            return Err(DependentColumn {
                residual_norm,
                column_norm,
            });
        }

        v /= residual_norm;
        self.q.push(v);
        let mut r = DMatrix::zeros(k + 1, k + 1);
        r.view_mut((0, 0), (k, k)).copy_from(&self.r);
        for (i, c) in coeffs.into_iter().enumerate() {
            r[(i, k)] = c;
        }
        r[(k, k)] = residual_norm;
        self.r = r;
        Ok(())
    }

    /// `Q^T v`.
    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.q.len(), self.q.iter().map(|qi| qi.dot(v)))
    }

    /// Whether the diagonal of `R` spans more than [`CONDITION_WARNING_RATIO`].
    pub fn is_ill_conditioned(&self) -> bool {
        let k = self.q.len();
        if k == 0 {
            return false;
        }
        let diag = self.r.diagonal();
        let max = diag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let min = diag.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        min == 0.0 || max / min > CONDITION_WARNING_RATIO
    }

    /// Minimises `||rhs - M c||` by back substitution on `R c = Q^T rhs`.
    ///
    /// When `R` is ill-conditioned the Tikhonov problem
    /// `min ||rhs - M c||^2 + delta ||c||^2` is solved instead, with
    /// `delta = regularization` or `1e-12 ||R||_F^2` by default.
    pub fn solve_least_squares(&self, rhs: &DVector<f64>, regularization: Option<f64>) -> LeastSquaresSolution {
        let k = self.q.len();
        if k == 0 {
            return LeastSquaresSolution {
                coefficients: DVector::zeros(0),
                ill_conditioned: false,
            };
        }
        let qtb = self.project(rhs);
        if !self.is_ill_conditioned() {
            if let Some(c) = back_substitute(&self.r, &qtb) {
                return LeastSquaresSolution {
                    coefficients: c,
                    ill_conditioned: false,
                };
            }
        }
        let delta = regularization.unwrap_or_else(|| 1e-12 * self.r.norm_squared());
        let delta = if delta > 0.0 { delta } else { f64::MIN_POSITIVE };
        let rt = self.r.transpose();
        let mut normal = &rt * &self.r;
        for i in 0..k {
            normal[(i, i)] += delta;
        }
        let rhs = &rt * qtb;
        let coefficients = match normal.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => normal.lu().solve(&rhs).unwrap_or_else(|| DVector::zeros(k)),
        };
        LeastSquaresSolution {
            coefficients,
            ill_conditioned: true,
        }
    }
}

/// Solves `R x = b` for upper-triangular `R`; `None` on a zero pivot.
pub(crate) fn back_substitute(r: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let k = b.len();
    let mut x = DVector::zeros(k);
    for i in (0..k).rev() {
        let mut s = b[i];
        for j in i + 1..k {
            s -= r[(i, j)] * x[j];
        }
        let d = r[(i, i)];
        if d == 0.0 {
            return None;
        }
        x[i] = s / d;
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(n: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v
    }

    #[test]
    fn orthogonal_column() {
        let mut qr = ThinQR::new(2);
        qr.append_column(&e(2, 0)).unwrap();
        qr.append_column(&e(2, 1)).unwrap();
        assert_eq!(qr.r(), &DMatrix::identity(2, 2));
    }

    #[test]
    fn one_gram_schmidt_step() {
        let mut qr = ThinQR::new(2);
        qr.append_column(&e(2, 0)).unwrap();
        qr.append_column(&DVector::from_vec(vec![1.0, 1.0])).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!((qr.r() - expected).abs().max() < 1e-15);
        assert!((&qr.q_columns()[1] - e(2, 1)).abs().max() < 1e-15);
    }

    #[test]
    fn exact_dependence() {
        let mut qr = ThinQR::new(2);
        qr.append_column(&e(2, 0)).unwrap();
        let err = qr.append_column(&DVector::from_vec(vec![2.0, 0.0])).unwrap_err();
        assert_eq!(err.residual_norm, 0.0);
        assert_eq!(qr.ncols(), 1);
    }

    #[test]
    fn zero_column_is_dependent() {
        let mut qr = ThinQR::new(3);
        assert!(qr.append_column(&DVector::zeros(3)).is_err());
        assert!(qr.is_empty());
    }

    #[test]
    fn reproduces_columns_and_stays_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 30;
        let mut qr = ThinQR::new(n);
        let mut accepted = Vec::new();
        // nearly collinear columns stress the second sweep
        let base = DVector::from_fn(n, |_, _| rng.random::<f64>() - 0.5);
        for j in 0..16 {
            let noise = DVector::from_fn(n, |_, _| rng.random::<f64>() - 0.5);
            let col = &base + noise * 10f64.powi(-(j as i32 / 2));
            if qr.append_column(&col).is_ok() {
                accepted.push(col);
            }
        }
        let m = DMatrix::from_columns(&accepted);
        let q = qr.q();
        let recon = &q * qr.r();
        assert!((recon - &m).norm() <= 1e-9 * m.norm());
        let gram = q.transpose() * &q - DMatrix::identity(qr.ncols(), qr.ncols());
        assert!(gram.abs().max() <= 1e-10, "{}", gram.abs().max());
        for i in 0..qr.ncols() {
            assert!(qr.r()[(i, i)] >= 0.0);
        }
    }

    #[test]
    fn least_squares_matches_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (n, k) = (12, 4);
        let m = DMatrix::from_fn(n, k, |_, _| rng.random::<f64>() - 0.5);
        let b = DVector::from_fn(n, |_, _| rng.random::<f64>() - 0.5);
        let mut qr = ThinQR::new(n);
        for j in 0..k {
            qr.append_column(&m.column(j).into_owned()).unwrap();
        }
        let sol = qr.solve_least_squares(&b, None);
        assert!(!sol.ill_conditioned);
        let normal = m.transpose() * &m;
        let expected = normal.lu().solve(&(m.transpose() * &b)).unwrap();
        assert!((sol.coefficients - expected).abs().max() < 1e-12);
    }

    #[test]
    fn ill_conditioned_solve_is_regularised_and_finite() {
        let n = 4;
        let mut qr = ThinQR::with_drop_tol(n, 1e-15);
        qr.append_column(&DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0])).unwrap();
        qr.append_column(&DVector::from_vec(vec![1.0, 1e-13, 0.0, 0.0])).unwrap();
        qr.append_column(&DVector::from_vec(vec![0.0, 0.0, 1e-6, 0.0])).unwrap();
        assert!(qr.is_ill_conditioned());
        let sol = qr.solve_least_squares(&DVector::from_vec(vec![1.0, 1.0, 1.0, 1.0]), None);
        assert!(sol.ill_conditioned);
        assert!(sol.coefficients.iter().all(|v| v.is_finite()));
    }
}
