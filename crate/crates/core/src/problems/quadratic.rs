use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{AffineFixedPointMap, JointIterate, MinimaxProblem, Scheme};
use crate::error::{Error, Result};

/// `f(x, y) = x^T A y + x^T B x - y^T C y + b^T x + c^T y` with symmetric
/// positive definite `B`, `C`.
///
/// Gradients: `grad_x f = A y + 2 B x + b`, `grad_y f = A^T x - 2 C y + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearQuadraticGame {
    a: DMatrix<f64>,
    b_mat: DMatrix<f64>,
    c_mat: DMatrix<f64>,
    b: DVector<f64>,
    c: DVector<f64>,
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.symmetric_eigenvalues().min()
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

impl BilinearQuadraticGame {
    pub fn new(a: DMatrix<f64>, b_mat: DMatrix<f64>, c_mat: DMatrix<f64>, b: DVector<f64>, c: DVector<f64>) -> Result<Self> {
        let (nx, ny) = a.shape();
        for (expected, got) in [
            (nx, b_mat.nrows()),
            (nx, b_mat.ncols()),
            (ny, c_mat.nrows()),
            (ny, c_mat.ncols()),
            (nx, b.len()),
            (ny, c.len()),
        ] {
            if expected != got {
                return Err(Error::DimensionMismatch { expected, got });
            }
        }
        let b_mat = symmetrize(&b_mat);
        let c_mat = symmetrize(&c_mat);
        for m in [&b_mat, &c_mat] {
            let lmin = min_eigenvalue(m);
            if !(lmin > 0.0) {
                return Err(Error::NotPositiveDefinite(lmin));
            }
        }
        Ok(Self { a, b_mat, c_mat, b, c })
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b_mat(&self) -> &DMatrix<f64> {
        &self.b_mat
    }

    pub fn c_mat(&self) -> &DMatrix<f64> {
        &self.c_mat
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    fn field_blocks(&self) -> [DMatrix<f64>; 4] {
        [
            &self.b_mat * 2.0,
            self.a.clone(),
            -self.a.transpose(),
            &self.c_mat * 2.0,
        ]
    }

    /// Linear part `M` of the field `V(w) = M w + (b, -c)`.
    pub fn field_matrix(&self) -> DMatrix<f64> {
        let (nx, ny) = self.a.shape();
        let [mxx, mxy, myx, myy] = self.field_blocks();
        let mut m = DMatrix::zeros(nx + ny, nx + ny);
        m.view_mut((0, 0), (nx, nx)).copy_from(&mxx);
        m.view_mut((0, nx), (nx, ny)).copy_from(&mxy);
        m.view_mut((nx, 0), (ny, nx)).copy_from(&myx);
        m.view_mut((nx, nx), (ny, ny)).copy_from(&myy);
        m
    }

    pub fn solve_equilibrium(&self) -> Result<JointIterate> {
        let (nx, _) = self.a.shape();
        let rhs = DVector::from_iterator(
            self.b.len() + self.c.len(),
            self.b.iter().map(|v| -v).chain(self.c.iter().copied()),
        );
        let w = self.field_matrix().lu().solve(&rhs).ok_or(Error::SingularMatrix)?;
        Ok(JointIterate::from_stacked(w, nx))
    }
}

impl MinimaxProblem for BilinearQuadraticGame {
    fn name(&self) -> String {
        format!("bilinear_quadratic(n={})", self.a.nrows())
    }

    fn dims(&self) -> (usize, usize) {
        self.a.shape()
    }

    fn value(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.a * y)) + x.dot(&(&self.b_mat * x)) - y.dot(&(&self.c_mat * y)) + self.b.dot(x) + self.c.dot(y)
    }

    fn grad_x(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        &self.a * y + &self.b_mat * x * 2.0 + &self.b
    }

    fn grad_y(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.a.tr_mul(x) - &self.c_mat * y * 2.0 + &self.c
    }

    fn exact_solution(&self) -> Option<JointIterate> {
        self.solve_equilibrium().ok()
    }

    fn affine_map(&self, scheme: Scheme, eta: f64) -> Option<AffineFixedPointMap> {
        let [mxx, mxy, myx, myy] = self.field_blocks();
        Some(AffineFixedPointMap::from_affine_field(
            [&mxx, &mxy, &myx, &myy],
            &self.b,
            &(-&self.c),
            scheme,
            eta,
        ))
    }
}

/// Random square instance: Gaussian `A / sqrt(n)`, and `B`, `C` of the form
/// `M^T M / n + shift I`.
pub fn make_random_bilinear_quadratic(n: usize, seed: u64, shift: f64) -> BilinearQuadraticGame {
    assert!(n >= 1 && shift > 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (n as f64).sqrt();
    let mut gauss = |r: usize, c: usize| DMatrix::from_fn(r, c, |_, _| StandardNormal.sample(&mut rng));
    let a = gauss(n, n) * scale;
    let mb = gauss(n, n);
    let mc = gauss(n, n);
    let b = gauss(n, 1).column(0).into_owned();
    let c = gauss(n, 1).column(0).into_owned();
    let id = DMatrix::<f64>::identity(n, n);
    let b_mat = mb.transpose() * &mb / n as f64 + &id * shift;
    let c_mat = mc.transpose() * &mc / n as f64 + &id * shift;
    BilinearQuadraticGame::new(a, b_mat, c_mat, b, c).expect("construction yields SPD blocks")
}
