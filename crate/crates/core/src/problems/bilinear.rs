use nalgebra::{DMatrix, DVector, SVD};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{AffineFixedPointMap, JointIterate, MinimaxProblem, Scheme};
use crate::error::{Error, Result};
use crate::numerics::singular_values;

/// `f(x, y) = x^T A y + b^T x + c^T y`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearGame {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: DVector<f64>,
}

impl BilinearGame {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: DVector<f64>) -> Result<Self> {
        if b.len() != a.nrows() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: b.len(),
            });
        }
        if c.len() != a.ncols() {
            return Err(Error::DimensionMismatch {
                expected: a.ncols(),
                got: c.len(),
            });
        }
        Ok(Self { a, b, c })
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn singular_values(&self) -> Vec<f64> {
        singular_values(&self.a)
    }

    /// `kappa(A)`; `kappa(A^T A)` is its square.
    pub fn condition_number(&self) -> f64 {
        let s = self.singular_values();
        s[0] / s[s.len() - 1]
    }

    /// Divides `A` by its spectral norm. `b` and `c` are untouched.
    pub fn rescale_to_unit_norm(&self) -> Self {
        let smax = self.singular_values()[0];
        let a = if smax > 0.0 { &self.a / smax } else { self.a.clone() };
        Self {
            a,
            b: self.b.clone(),
            c: self.c.clone(),
        }
    }

    /// `(x*, y*) = (-A^{-T} c, -A^{-1} b)`.
    pub fn exact_nash(&self) -> Result<JointIterate> {
        if self.a.nrows() != self.a.ncols() {
            return Err(Error::SingularMatrix);
        }
        let lu = self.a.clone().lu();
        let y = lu.solve(&(-&self.b)).ok_or(Error::SingularMatrix)?;
        let x = self.a.transpose().lu().solve(&(-&self.c)).ok_or(Error::SingularMatrix)?;
        if !x.iter().chain(y.iter()).all(|v| v.is_finite()) {
            return Err(Error::SingularMatrix);
        }
        Ok(JointIterate::new(&x, &y))
    }
}

impl MinimaxProblem for BilinearGame {
    fn name(&self) -> String {
        format!("bilinear(n={})", self.n())
    }

    fn dims(&self) -> (usize, usize) {
        (self.a.nrows(), self.a.ncols())
    }

    fn value(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.a * y)) + self.b.dot(x) + self.c.dot(y)
    }

    fn grad_x(&self, _x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        &self.a * y + &self.b
    }

    fn grad_y(&self, x: &DVector<f64>, _y: &DVector<f64>) -> DVector<f64> {
        self.a.tr_mul(x) + &self.c
    }

    fn exact_solution(&self) -> Option<JointIterate> {
        self.exact_nash().ok()
    }

    fn affine_map(&self, scheme: Scheme, eta: f64) -> Option<AffineFixedPointMap> {
        let (nx, ny) = self.dims();
        let zx = DMatrix::zeros(nx, nx);
        let zy = DMatrix::zeros(ny, ny);
        let at = -self.a.transpose();
        Some(AffineFixedPointMap::from_affine_field(
            [&zx, &self.a, &at, &zy],
            &self.b,
            &(-&self.c),
            scheme,
            eta,
        ))
    }
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

fn gaussian_vector(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// Random `n x n` game with standard normal `A`, `b`, `c`.
///
/// With `target_kappa`, the singular values of `A` are replaced by
/// `sigma_max * kappa^{-i/(n-1)}` (log-uniform) keeping the singular vectors.
pub fn make_random_bilinear(n: usize, seed: u64, target_kappa: Option<f64>) -> BilinearGame {
    assert!(n >= 1, "game dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = gaussian_matrix(n, n, &mut rng);
    let b = gaussian_vector(n, &mut rng);
    let c = gaussian_vector(n, &mut rng);

    if let Some(kappa) = target_kappa {
        assert!(kappa >= 1.0, "target condition number must be at least 1");
        let svd = SVD::new(a.clone(), true, true);
        let u = svd.u.expect("requested U");
        let vt = svd.v_t.expect("requested V^T");
        let smax = svd.singular_values.max();
        let sigma = DVector::from_fn(n, |i, _| {
            if n == 1 {
                smax
            } else {
                smax * kappa.powf(-(i as f64) / (n - 1) as f64)
            }
        });
        a = u * DMatrix::from_diagonal(&sigma) * vt;
    }
    BilinearGame { a, b, c }
}

/// Standard normal starting point for an `n x n` bilinear game, drawn from a
/// stream independent of the one that generated the game.
pub fn random_initial_point(n: usize, seed: u64) -> JointIterate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let x = gaussian_vector(n, &mut rng);
    let y = gaussian_vector(n, &mut rng);
    JointIterate::new(&x, &y)
}
