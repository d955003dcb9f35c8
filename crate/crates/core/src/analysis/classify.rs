use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::problems::{JointIterate, SecondOrder};

pub const STATIONARY_TOL: f64 = 1e-8;
pub const CURVATURE_MARGIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinimaxLabel {
    LocalMinimax,
    NotLocalMinimax,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryClassification {
    pub point: JointIterate,
    pub grad_norm: f64,
    pub label: MinimaxLabel,
}

/// Second-order test at a stationary point of a scalar game.
///
/// Sufficient: `f_yy < 0` and `f_xx - f_xy^2 / f_yy > 0`. Necessary:
/// `f_yy <= 0` and, when `f_yy < 0`, the same Schur complement `>= 0`.
/// Strict inequalities need a margin of [`CURVATURE_MARGIN`].
pub fn classify_stationary<G: SecondOrder + ?Sized>(game: &G, x: f64, y: f64) -> Result<StationaryClassification> {
    let grad_norm = game.gradient(x, y).norm();
    if !(grad_norm <= STATIONARY_TOL) {
        return Err(Error::NotStationary(grad_norm));
    }
    let h = game.hessian(x, y);
    let (fxx, fxy, fyy) = (h[(0, 0)], h[(0, 1)], h[(1, 1)]);
    let label = if fyy > CURVATURE_MARGIN {
        MinimaxLabel::NotLocalMinimax
    } else if fyy < -CURVATURE_MARGIN {
        let schur = fxx - fxy * fxy / fyy;
        if schur > CURVATURE_MARGIN {
            MinimaxLabel::LocalMinimax
        } else if schur < -CURVATURE_MARGIN {
            MinimaxLabel::NotLocalMinimax
        } else {
            MinimaxLabel::Indeterminate
        }
    } else {
        MinimaxLabel::Indeterminate
    };
    Ok(StationaryClassification {
        point: JointIterate::new(&DVector::from_element(1, x), &DVector::from_element(1, y)),
        grad_norm,
        label,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{scalar_catalog, ScalarGame, ScalarGameId};
    use nalgebra::{Matrix2, Vector2};

    struct Xy;
    impl SecondOrder for Xy {
        fn gradient(&self, x: f64, y: f64) -> Vector2<f64> {
            Vector2::new(y, x)
        }
        fn hessian(&self, _x: f64, _y: f64) -> Matrix2<f64> {
            Matrix2::new(0.0, 1.0, 1.0, 0.0)
        }
    }

    #[test]
    fn reference_labels() {
        let c = classify_stationary(&ScalarGame::new(ScalarGameId::NegQuadraticCross), 0.0, 0.0).unwrap();
        assert_eq!(c.label, MinimaxLabel::LocalMinimax);
        let c = classify_stationary(&ScalarGame::new(ScalarGameId::QuarticCubic), 0.0, 0.0).unwrap();
        assert_eq!(c.label, MinimaxLabel::NotLocalMinimax);
        assert_eq!(classify_stationary(&Xy, 0.0, 0.0).unwrap().label, MinimaxLabel::Indeterminate);
    }

    #[test]
    fn catalog_local_minimax_points_classify() {
        for entry in scalar_catalog() {
            if let Some((x, y)) = entry.local_minimax {
                let c = classify_stationary(&entry.game, x, y).unwrap();
                assert_eq!(c.label, MinimaxLabel::LocalMinimax, "{}", entry.game.id);
            }
        }
    }

    #[test]
    fn non_stationary_point_is_rejected() {
        let err = classify_stationary(&Xy, 1.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::NotStationary(g) if g == 1.0));
    }
}
