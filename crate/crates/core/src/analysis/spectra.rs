use nalgebra::{DMatrix, DVector, SVD};
use num_complex::Complex64;

use crate::numerics::Spectrum;
use crate::problems::{BilinearGame, MinimaxProblem, Scheme};

/// Largest `||M z - lambda z||` over unit complex vectors `z = re + i im`.
fn eigenpair_residual(m: &DMatrix<f64>, lambda: Complex64, re: &DVector<f64>, im: &DVector<f64>) -> f64 {
    let scale = (re.norm_squared() + im.norm_squared()).sqrt();
    if scale == 0.0 {
        return 0.0;
    }
    let rr = m * re - (re * lambda.re - im * lambda.im);
    let ri = m * im - (im * lambda.re + re * lambda.im);
    (rr.norm_squared() + ri.norm_squared()).sqrt() / scale
}

struct Pairs {
    sigma: Vec<f64>,
    u: DMatrix<f64>,
    v: DMatrix<f64>,
    /// `|nx - ny|` zero eigenvalues from the rectangular part.
    padding: usize,
}

fn svd_pairs(game: &BilinearGame) -> Pairs {
    let a = game.a();
    let svd = SVD::new(a.clone(), true, true);
    let u = svd.u.expect("requested U");
    let v = svd.v_t.expect("requested V^T").transpose();
    Pairs {
        sigma: svd.singular_values.iter().copied().collect(),
        u,
        v,
        padding: a.nrows().abs_diff(a.ncols()),
    }
}

fn stacked(nx: usize, ny: usize, xpart: DVector<f64>, ypart: DVector<f64>) -> DVector<f64> {
    let mut w = DVector::zeros(nx + ny);
    w.rows_mut(0, nx).copy_from(&xpart);
    w.rows_mut(nx, ny).copy_from(&ypart);
    w
}

/// Eigenvalues `{+-i eta sigma_j}` of `I - G` for simultaneous GDA.
///
/// `residual_bound` is measured on the explicit operator with the
/// eigenvectors `(u_j, +-i v_j)` built from the SVD of `A`.
pub fn sim_operator_spectrum(game: &BilinearGame, eta: f64) -> Spectrum {
    let (nx, ny) = game.dims();
    let op = game.affine_map(Scheme::Sim, eta).expect("bilinear map").operator();
    let pairs = svd_pairs(game);
    let mut eigenvalues = Vec::with_capacity(nx + ny);
    let mut residual: f64 = 0.0;
    for (j, &s) in pairs.sigma.iter().enumerate() {
        let re = stacked(nx, ny, pairs.u.column(j).into_owned(), DVector::zeros(ny));
        for sign in [1.0, -1.0] {
            let lambda = Complex64::new(0.0, sign * eta * s);
            let im = stacked(nx, ny, DVector::zeros(nx), pairs.v.column(j) * sign);
            residual = residual.max(eigenpair_residual(&op, lambda, &re, &im));
            eigenvalues.push(lambda);
        }
    }
    eigenvalues.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), pairs.padding));
    Spectrum {
        eigenvalues,
        residual_bound: residual,
    }
}

/// `lambda_{+-} = eta s (eta s +- sqrt((eta s)^2 - 4)) / 2` for `s = sigma`.
pub fn alt_block_eigenvalues(eta_sigma: f64) -> [Complex64; 2] {
    let a = eta_sigma;
    let disc = Complex64::new(a * a * a * a - 4.0 * a * a, 0.0).sqrt();
    let center = Complex64::new(a * a, 0.0);
    [(center + disc) * 0.5, (center - disc) * 0.5]
}

/// Eigenvalues of `I - G` for alternating GDA, two per singular value.
///
/// In the basis `(u_j, v_j)` the operator is `[[0, a], [-a, a^2]]` with
/// `a = eta sigma_j`; its eigenvector for `lambda` is `(a, lambda)`.
pub fn alt_operator_spectrum(game: &BilinearGame, eta: f64) -> Spectrum {
    let (nx, ny) = game.dims();
    let op = game.affine_map(Scheme::Alt, eta).expect("bilinear map").operator();
    let pairs = svd_pairs(game);
    let mut eigenvalues = Vec::with_capacity(nx + ny);
    let mut residual: f64 = 0.0;
    for (j, &s) in pairs.sigma.iter().enumerate() {
        let a = eta * s;
        let u = pairs.u.column(j).into_owned();
        let v = pairs.v.column(j).into_owned();
        for lambda in alt_block_eigenvalues(a) {
            let re = stacked(nx, ny, &u * a, &v * lambda.re);
            let im = stacked(nx, ny, DVector::zeros(nx), &v * lambda.im);
            residual = residual.max(eigenpair_residual(&op, lambda, &re, &im));
            eigenvalues.push(lambda);
        }
    }
    eigenvalues.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), pairs.padding));
    Spectrum {
        eigenvalues,
        residual_bound: residual,
    }
}
