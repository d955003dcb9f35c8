use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub const DEFAULT_NUM_ANGLES: usize = 256;

/// Boundary points of the numerical range `{z^* A z : |z| = 1}`.
///
/// For each angle `theta_k = 2 pi k / num_angles` the point `v^* A v` is
/// taken for the top eigenvector `v` of the Hermitian part of
/// `e^{-i theta} A`; this is the support point in direction `e^{i theta}`,
/// so the points come out counterclockwise.
pub fn numerical_range_boundary(a: &DMatrix<f64>, num_angles: usize) -> Vec<Complex64> {
    assert!(a.is_square(), "numerical range needs a square matrix");
    assert!(num_angles >= 8, "need at least 8 angles");
    let ac: DMatrix<Complex64> = a.map(|v| Complex64::new(v, 0.0));
    (0..num_angles)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / num_angles as f64;
            let rot = &ac * Complex64::from_polar(1.0, -theta);
            let herm = (&rot + rot.adjoint()) * Complex64::new(0.5, 0.0);
            let eig = herm.symmetric_eigen();
            let top = eig.eigenvalues.imax();
            let v = eig.eigenvectors.column(top);
            (v.adjoint() * &ac * v)[(0, 0)]
        })
        .collect()
}

/// `true` when consecutive edges of the closed polygon never turn clockwise
/// by more than `tol` (relative to the edge lengths). Near-duplicate points
/// are merged first.
pub fn is_convex_ccw(points: &[Complex64], tol: f64) -> bool {
    let scale = points.iter().fold(0.0f64, |m, z| m.max(z.norm())).max(f64::MIN_POSITIVE);
    let mut pts: Vec<Complex64> = Vec::with_capacity(points.len());
    for &z in points {
        if pts.last().is_none_or(|l: &Complex64| (z - l).norm() > 1e-9 * scale) {
            pts.push(z);
        }
    }
    while pts.len() > 1 && (pts[0] - pts[pts.len() - 1]).norm() <= 1e-9 * scale {
        pts.pop();
    }
    let n = pts.len();
    if n < 3 {
        return true;
    }
    (0..n).all(|i| {
        let e1 = pts[(i + 1) % n] - pts[i];
        let e2 = pts[(i + 2) % n] - pts[(i + 1) % n];
        let cross = e1.re * e2.im - e1.im * e2.re;
        cross >= -tol * e1.norm() * e2.norm()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist_to_segment(z: Complex64, a: Complex64, b: Complex64) -> f64 {
        let d = b - a;
        let t = (((z - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
        (z - (a + d * t)).norm()
    }

    #[test]
    fn normal_matrix_gives_eigenvalue_hull() {
        // eigenvalues 2, -1, +-i: all hull vertices, listed counterclockwise
        let mut a = DMatrix::zeros(4, 4);
        a[(0, 0)] = 2.0;
        a[(1, 1)] = -1.0;
        a[(2, 3)] = 1.0;
        a[(3, 2)] = -1.0;
        let hull = [
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ];
        let pts = numerical_range_boundary(&a, DEFAULT_NUM_ANGLES);
        for z in &pts {
            let d = (0..4).map(|i| dist_to_segment(*z, hull[i], hull[(i + 1) % 4])).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-6, "{z}");
        }
        for v in hull {
            let d = pts.iter().map(|z| (z - v).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-6, "{v}");
        }
        assert!(is_convex_ccw(&pts, 1e-9));
    }

    #[test]
    fn nilpotent_gives_half_disk_circle() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let pts = numerical_range_boundary(&a, 64);
        for z in &pts {
            assert!((z.norm() - 0.5).abs() < 1e-12, "{z}");
        }
        // independent check: random unit vectors land inside the circle
        for k in 0..200 {
            let t = k as f64 * 0.137;
            let z = [Complex64::from_polar(t.cos(), 0.3 * t), Complex64::from_polar(t.sin(), 1.7 * t)];
            let val = z[0].conj() * z[1];
            assert!(val.norm() <= 0.5 + 1e-12);
        }
        assert!(is_convex_ccw(&pts, 1e-9));
    }

    #[test]
    fn alternating_block_gives_ellipse() {
        for (eta, sigma) in [(1.0, 1.0), (0.5, 0.8), (1.5, 1.0)] {
            let a_: f64 = eta * sigma;
            let m = DMatrix::from_row_slice(2, 2, &[0.0, a_, -a_, a_ * a_]);
            let pts = numerical_range_boundary(&m, DEFAULT_NUM_ANGLES);
            let (cx, hx, hy) = (a_ * a_ / 2.0, a_ * a_ / 2.0, a_);
            for z in &pts {
                let e = ((z.re - cx) / hx).powi(2) + (z.im / hy).powi(2);
                assert!((e - 1.0).abs() < 1e-10, "{z} -> {e}");
            }
            let extreme = |f: &dyn Fn(&Complex64) -> f64| pts.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
            assert!((extreme(&|z| z.re) - a_ * a_).abs() < 1e-3);
            assert!(extreme(&|z| -z.re).abs() < 1e-3);
            assert!((extreme(&|z| z.im) - a_).abs() < 1e-3);
            assert!(is_convex_ccw(&pts, 1e-9));
        }
    }

    #[test]
    fn random_matrix_boundary_is_convex() {
        let a = DMatrix::from_fn(12, 12, |i, j| ((i * 7 + j * 3) as f64 * 0.61).sin());
        assert!(is_convex_ccw(&numerical_range_boundary(&a, 128), 1e-9));
    }

    #[test]
    fn convexity_detects_reflex_vertex() {
        let pts = [
            Complex64::new(0.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(1.0, 0.2),
            Complex64::new(2.0, 2.0),
            Complex64::new(0.0, 2.0),
        ];
        assert!(!is_convex_ccw(&pts, 1e-9));
    }
}
