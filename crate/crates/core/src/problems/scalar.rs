use std::fmt;
use std::str::FromStr;

use nalgebra::{DVector, Matrix2, Vector2};

use super::{JointIterate, MinimaxProblem};
use crate::error::Error;

/// Anything with a closed-form gradient and Hessian in two scalar variables.
pub trait SecondOrder {
    fn gradient(&self, x: f64, y: f64) -> Vector2<f64>;
    /// `[[f_xx, f_xy], [f_xy, f_yy]]`.
    fn hessian(&self, x: f64, y: f64) -> Matrix2<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScalarGameId {
    SaddleExpBump,
    QuarticExp,
    NegQuadraticCross,
    CubicMix,
    CubicAntisym,
    QuarticCubic,
}

impl ScalarGameId {
    pub const ALL: [ScalarGameId; 6] = [
        ScalarGameId::SaddleExpBump,
        ScalarGameId::QuarticExp,
        ScalarGameId::NegQuadraticCross,
        ScalarGameId::CubicMix,
        ScalarGameId::CubicAntisym,
        ScalarGameId::QuarticCubic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScalarGameId::SaddleExpBump => "saddle_exp_bump",
            ScalarGameId::QuarticExp => "quartic_exp",
            ScalarGameId::NegQuadraticCross => "neg_quadratic_cross",
            ScalarGameId::CubicMix => "cubic_mix",
            ScalarGameId::CubicAntisym => "cubic_antisym",
            ScalarGameId::QuarticCubic => "quartic_cubic",
        }
    }

    pub fn formula(self) -> &'static str {
        match self {
            ScalarGameId::SaddleExpBump => "(x-1/2)(y-1/2) + 1/3 exp(-(x-1/4)^2 - (y-3/4)^2)",
            ScalarGameId::QuarticExp => "(4x^2 - (y - 3x + 0.05x^3)^2 - 0.1y^4) exp(-0.01(x^2+y^2))",
            ScalarGameId::NegQuadraticCross => "-3x^2 - y^2 + 4xy",
            ScalarGameId::CubicMix => "x^3/3 + y^2 + 2xy - 6x - 3y + 4",
            ScalarGameId::CubicAntisym => "x^3 - y^3 - 2xy + 6",
            ScalarGameId::QuarticCubic => "2x^2 + y^2 + 4xy + 4/3 y^3 - 1/4 y^4",
        }
    }
}

impl fmt::Display for ScalarGameId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScalarGameId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScalarGameId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown scalar game `{s}`")))
    }
}

/// One of the six two-variable test functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalarGame {
    pub id: ScalarGameId,
}

impl ScalarGame {
    pub fn new(id: ScalarGameId) -> Self {
        Self { id }
    }

    pub fn f(&self, x: f64, y: f64) -> f64 {
        match self.id {
            ScalarGameId::SaddleExpBump => {
                let (u, v) = (x - 0.25, y - 0.75);
                (x - 0.5) * (y - 0.5) + (-u * u - v * v).exp() / 3.0
            }
            ScalarGameId::QuarticExp => {
                let s = y - 3.0 * x + 0.05 * x.powi(3);
                (4.0 * x * x - s * s - 0.1 * y.powi(4)) * (-0.01 * (x * x + y * y)).exp()
            }
            ScalarGameId::NegQuadraticCross => -3.0 * x * x - y * y + 4.0 * x * y,
            ScalarGameId::CubicMix => x.powi(3) / 3.0 + y * y + 2.0 * x * y - 6.0 * x - 3.0 * y + 4.0,
            ScalarGameId::CubicAntisym => x.powi(3) - y.powi(3) - 2.0 * x * y + 6.0,
            ScalarGameId::QuarticCubic => {
                2.0 * x * x + y * y + 4.0 * x * y + 4.0 / 3.0 * y.powi(3) - 0.25 * y.powi(4)
            }
        }
    }
}

// quartic_exp is P(x, y) e^{q(x, y)}; returns (P, P_x, P_y, P_xx, P_xy, P_yy)
fn quartic_exp_poly(x: f64, y: f64) -> [f64; 6] {
    let s = y - 3.0 * x + 0.05 * x.powi(3);
    let sx = -3.0 + 0.15 * x * x;
    let p = 4.0 * x * x - s * s - 0.1 * y.powi(4);
    let px = 8.0 * x - 2.0 * s * sx;
    let py = -2.0 * s - 0.4 * y.powi(3);
    let pxx = 8.0 - 2.0 * sx * sx - 2.0 * s * 0.3 * x;
    let pxy = -2.0 * sx;
    let pyy = -2.0 - 1.2 * y * y;
    [p, px, py, pxx, pxy, pyy]
}

impl SecondOrder for ScalarGame {
    fn gradient(&self, x: f64, y: f64) -> Vector2<f64> {
        match self.id {
            ScalarGameId::SaddleExpBump => {
                let (u, v) = (x - 0.25, y - 0.75);
                let e = (-u * u - v * v).exp() / 3.0;
                Vector2::new((y - 0.5) - 2.0 * u * e, (x - 0.5) - 2.0 * v * e)
            }
            ScalarGameId::QuarticExp => {
                let [p, px, py, ..] = quartic_exp_poly(x, y);
                let e = (-0.01 * (x * x + y * y)).exp();
                Vector2::new((px - 0.02 * x * p) * e, (py - 0.02 * y * p) * e)
            }
            ScalarGameId::NegQuadraticCross => Vector2::new(-6.0 * x + 4.0 * y, -2.0 * y + 4.0 * x),
            ScalarGameId::CubicMix => Vector2::new(x * x + 2.0 * y - 6.0, 2.0 * y + 2.0 * x - 3.0),
            ScalarGameId::CubicAntisym => Vector2::new(3.0 * x * x - 2.0 * y, -3.0 * y * y - 2.0 * x),
            ScalarGameId::QuarticCubic => {
                Vector2::new(4.0 * x + 4.0 * y, 2.0 * y + 4.0 * x + 4.0 * y * y - y.powi(3))
            }
        }
    }

    fn hessian(&self, x: f64, y: f64) -> Matrix2<f64> {
        let (fxx, fxy, fyy) = match self.id {
            ScalarGameId::SaddleExpBump => {
                let (u, v) = (x - 0.25, y - 0.75);
                let e = (-u * u - v * v).exp() / 3.0;
                ((4.0 * u * u - 2.0) * e, 1.0 + 4.0 * u * v * e, (4.0 * v * v - 2.0) * e)
            }
            ScalarGameId::QuarticExp => {
                let [p, px, py, pxx, pxy, pyy] = quartic_exp_poly(x, y);
                let e = (-0.01 * (x * x + y * y)).exp();
                let (qx, qy, qxx) = (-0.02 * x, -0.02 * y, -0.02);
                (
                    (pxx + 2.0 * px * qx + p * qxx + p * qx * qx) * e,
                    (pxy + px * qy + py * qx + p * qx * qy) * e,
                    (pyy + 2.0 * py * qy + p * qxx + p * qy * qy) * e,
                )
            }
            ScalarGameId::NegQuadraticCross => (-6.0, 4.0, -2.0),
            ScalarGameId::CubicMix => (2.0 * x, 2.0, 2.0),
            ScalarGameId::CubicAntisym => (6.0 * x, -2.0, -6.0 * y),
            ScalarGameId::QuarticCubic => (4.0, 4.0, 2.0 + 8.0 * y - 3.0 * y * y),
        };
        Matrix2::new(fxx, fxy, fxy, fyy)
    }
}

impl MinimaxProblem for ScalarGame {
    fn name(&self) -> String {
        self.id.as_str().to_string()
    }

    fn dims(&self) -> (usize, usize) {
        (1, 1)
    }

    fn value(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.f(x[0], y[0])
    }

    fn grad_x(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        DVector::from_element(1, self.gradient(x[0], y[0])[0])
    }

    fn grad_y(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        DVector::from_element(1, self.gradient(x[0], y[0])[1])
    }
}

/// A catalog game with whatever reference data is known analytically.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub game: ScalarGame,
    /// Analytic stationary points.
    pub stationary_points: Vec<(f64, f64)>,
    /// The stationary point certified as a local minimax, if any.
    pub local_minimax: Option<(f64, f64)>,
}

impl CatalogEntry {
    pub fn local_minimax_iterate(&self) -> Option<JointIterate> {
        self.local_minimax.map(|(x, y)| JointIterate::new(&DVector::from_element(1, x), &DVector::from_element(1, y)))
    }
}

pub fn scalar_catalog() -> Vec<CatalogEntry> {
    let r2 = std::f64::consts::SQRT_2;
    ScalarGameId::ALL
        .into_iter()
        .map(|id| {
            let (stationary_points, local_minimax) = match id {
                ScalarGameId::NegQuadraticCross => (vec![(0.0, 0.0)], Some((0.0, 0.0))),
                ScalarGameId::QuarticCubic => (
                    vec![(0.0, 0.0), (-(2.0 - r2), 2.0 - r2), (-(2.0 + r2), 2.0 + r2)],
                    Some((-(2.0 + r2), 2.0 + r2)),
                ),
                ScalarGameId::CubicMix => (vec![(3.0, -1.5), (-1.0, 2.5)], None),
                ScalarGameId::CubicAntisym => {
                    let x = -(2.0f64 / 6.75).cbrt();
                    (vec![(0.0, 0.0), (x, 1.5 * x * x)], None)
                }
                ScalarGameId::SaddleExpBump | ScalarGameId::QuarticExp => (Vec::new(), None),
            };
            CatalogEntry {
                game: ScalarGame::new(id),
                stationary_points,
                local_minimax,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn central_gradient(g: &ScalarGame, x: f64, y: f64) -> Vector2<f64> {
        let h = 1e-5;
        Vector2::new(
            (g.f(x + h, y) - g.f(x - h, y)) / (2.0 * h),
            (g.f(x, y + h) - g.f(x, y - h)) / (2.0 * h),
        )
    }

    fn central_hessian(g: &ScalarGame, x: f64, y: f64) -> Matrix2<f64> {
        let h = 1e-5;
        let dx = (g.gradient(x + h, y) - g.gradient(x - h, y)) / (2.0 * h);
        let dy = (g.gradient(x, y + h) - g.gradient(x, y - h)) / (2.0 * h);
        Matrix2::new(dx[0], dy[0], dx[1], dy[1])
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for entry in scalar_catalog() {
            let g = entry.game;
            for _ in 0..100 {
                let (x, y) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
                let scale = 1.0 + g.f(x, y).abs();
                let err = (g.gradient(x, y) - central_gradient(&g, x, y)).abs().max();
                assert!(err <= 1e-6 * scale, "{} at ({x},{y}): {err}", g.id);
                let herr = (g.hessian(x, y) - central_hessian(&g, x, y)).abs().max();
                assert!(herr <= 1e-5 * scale, "{} hessian at ({x},{y}): {herr}", g.id);
            }
        }
    }

    #[test]
    fn neg_quadratic_cross_field_at_one_one() {
        let g = ScalarGame::new(ScalarGameId::NegQuadraticCross);
        let w = JointIterate::new(&DVector::from_element(1, 1.0), &DVector::from_element(1, 1.0));
        let v = g.grad_field(&w);
        assert_eq!(v.as_vector().as_slice(), &[-2.0, -2.0]);
    }

    #[test]
    fn listed_stationary_points_are_stationary() {
        for entry in scalar_catalog() {
            for &(x, y) in &entry.stationary_points {
                assert!(entry.game.gradient(x, y).norm() < 1e-12, "{} at ({x},{y})", entry.game.id);
            }
        }
    }

    #[test]
    fn ids_round_trip_through_strings() {
        for id in ScalarGameId::ALL {
            assert_eq!(id.as_str().parse::<ScalarGameId>().unwrap(), id);
        }
        assert!("nope".parse::<ScalarGameId>().is_err());
    }
}
