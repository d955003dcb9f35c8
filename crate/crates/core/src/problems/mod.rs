//! Minimax problems `min_x max_y f(x, y)` and their GDA fixed-point maps.

mod bilinear;
mod io;
mod quadratic;
mod scalar;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub use bilinear::{make_random_bilinear, random_initial_point, BilinearGame};
pub use io::{read_problem, write_problem, SerializedProblem};
pub use quadratic::{make_random_bilinear_quadratic, BilinearQuadraticGame};
pub use scalar::{scalar_catalog, CatalogEntry, ScalarGame, ScalarGameId, SecondOrder};

/// The stacked point `w = (x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointIterate {
    w: DVector<f64>,
    nx: usize,
}

impl JointIterate {
    pub fn new(x: &DVector<f64>, y: &DVector<f64>) -> Self {
        let mut w = DVector::zeros(x.len() + y.len());
        w.rows_mut(0, x.len()).copy_from(x);
        w.rows_mut(x.len(), y.len()).copy_from(y);
        Self { w, nx: x.len() }
    }

    pub fn from_stacked(w: DVector<f64>, nx: usize) -> Self {
        assert!(nx <= w.len());
        Self { w, nx }
    }

    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self {
            w: DVector::zeros(nx + ny),
            nx,
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.w.len() - self.nx
    }

    pub fn x(&self) -> DVector<f64> {
        self.w.rows(0, self.nx).into_owned()
    }

    pub fn y(&self) -> DVector<f64> {
        self.w.rows(self.nx, self.ny()).into_owned()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.w
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.w
    }

    pub fn norm(&self) -> f64 {
        self.w.norm()
    }

    pub fn is_finite(&self) -> bool {
        self.w.iter().all(|v| v.is_finite())
    }

    pub fn distance(&self, other: &JointIterate) -> f64 {
        (&self.w - &other.w).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Sim,
    Alt,
}

/// A smooth two-player zero-sum game.
pub trait MinimaxProblem: Send + Sync {
    fn name(&self) -> String;

    /// `(dim x, dim y)`.
    fn dims(&self) -> (usize, usize);

    fn value(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64;

    fn grad_x(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64>;

    fn grad_y(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64>;

    /// The equilibrium, when it is known in closed form.
    fn exact_solution(&self) -> Option<JointIterate> {
        None
    }

    /// The explicit `(G, b)` pair for games whose gradient field is affine.
    fn affine_map(&self, _scheme: Scheme, _eta: f64) -> Option<AffineFixedPointMap> {
        None
    }

    /// `V(w) = (grad_x f, -grad_y f)`.
    fn grad_field(&self, w: &JointIterate) -> JointIterate {
        let (x, y) = (w.x(), w.y());
        JointIterate::new(&self.grad_x(&x, &y), &(-self.grad_y(&x, &y)))
    }
}

/// One simultaneous GDA step `w - eta V(w)`.
pub fn sim_gda_step(problem: &dyn MinimaxProblem, w: &JointIterate, eta: f64) -> JointIterate {
    let v = problem.grad_field(w);
    JointIterate::from_stacked(w.as_vector() - v.as_vector() * eta, w.nx())
}

/// One alternating GDA step: `x` first, then `y` against the new `x`.
pub fn alt_gda_step(problem: &dyn MinimaxProblem, w: &JointIterate, eta: f64) -> JointIterate {
    let (x, y) = (w.x(), w.y());
    let x_new = &x - problem.grad_x(&x, &y) * eta;
    let y_new = &y + problem.grad_y(&x_new, &y) * eta;
    JointIterate::new(&x_new, &y_new)
}

/// `w -> G w + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFixedPointMap {
    pub g: DMatrix<f64>,
    pub offset: DVector<f64>,
}

impl AffineFixedPointMap {
    pub fn apply(&self, w: &DVector<f64>) -> DVector<f64> {
        &self.g * w + &self.offset
    }

    /// `I - G`.
    pub fn operator(&self) -> DMatrix<f64> {
        DMatrix::identity(self.g.nrows(), self.g.ncols()) - &self.g
    }

    /// Solves `(I - G) w = offset`.
    pub fn fixed_point(&self) -> Result<DVector<f64>> {
        self.operator().lu().solve(&self.offset).ok_or(Error::SingularMatrix)
    }

    /// Maps for a game with affine field `V(w) = M w + v`, where
    /// `M = [[mxx, mxy], [myx, myy]]` and `v = (vx, vy)`.
    pub fn from_affine_field(
        blocks: [&DMatrix<f64>; 4],
        vx: &DVector<f64>,
        vy: &DVector<f64>,
        scheme: Scheme,
        eta: f64,
    ) -> Self {
        let [mxx, mxy, myx, myy] = blocks;
        let (nx, ny) = (vx.len(), vy.len());
        let n = nx + ny;
        let mut g = DMatrix::zeros(n, n);
        let mut offset = DVector::zeros(n);

        let gxx = DMatrix::identity(nx, nx) - mxx * eta;
        let gxy = -mxy * eta;
        let ox = -vx * eta;
        let gyy0 = DMatrix::identity(ny, ny) - myy * eta;
        let (gyx, gyy, oy) = match scheme {
            Scheme::Sim => (-myx * eta, gyy0, -vy * eta),
            Scheme::Alt => {
                // y' = y - eta (myx x' + myy y + vy) with x' = gxx x + gxy y + ox
                let k = myx * eta;
                (-&k * &gxx, gyy0 - &k * &gxy, -vy * eta - &k * &ox)
            }
        };
        g.view_mut((0, 0), (nx, nx)).copy_from(&gxx);
        g.view_mut((0, nx), (nx, ny)).copy_from(&gxy);
        g.view_mut((nx, 0), (ny, nx)).copy_from(&gyx);
        g.view_mut((nx, nx), (ny, ny)).copy_from(&gyy);
        offset.rows_mut(0, nx).copy_from(&ox);
        offset.rows_mut(nx, ny).copy_from(&oy);
        Self { g, offset }
    }
}

/// A GDA fixed-point map: explicit when the field is affine, a callable
/// step otherwise.
pub enum FixedPointMap<'a> {
    Affine(AffineFixedPointMap),
    Nonlinear {
        problem: &'a dyn MinimaxProblem,
        scheme: Scheme,
        eta: f64,
    },
}

impl FixedPointMap<'_> {
    pub fn apply(&self, w: &JointIterate) -> JointIterate {
        match self {
            FixedPointMap::Affine(m) => JointIterate::from_stacked(m.apply(w.as_vector()), w.nx()),
            FixedPointMap::Nonlinear { problem, scheme, eta } => match scheme {
                Scheme::Sim => sim_gda_step(*problem, w, *eta),
                Scheme::Alt => alt_gda_step(*problem, w, *eta),
            },
        }
    }

    pub fn as_affine(&self) -> Option<&AffineFixedPointMap> {
        match self {
            FixedPointMap::Affine(m) => Some(m),
            FixedPointMap::Nonlinear { .. } => None,
        }
    }
}

pub fn fixed_point_map(problem: &dyn MinimaxProblem, scheme: Scheme, eta: f64) -> Result<FixedPointMap<'_>> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidConfig(format!("step size must be positive, got {eta}")));
    }
    Ok(match problem.affine_map(scheme, eta) {
        Some(m) => FixedPointMap::Affine(m),
        None => FixedPointMap::Nonlinear { problem, scheme, eta },
    })
}
