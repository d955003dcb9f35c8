use nalgebra::DMatrix;
use num_complex::Complex64;

use super::spectra::alt_operator_spectrum;
use crate::error::{Error, Result};
use crate::numerics::chebyshev_t_one_plus;
use crate::problems::{BilinearGame, BilinearQuadraticGame};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    SimChebyshev,
    AltDisk,
    QuadElman,
}

/// Disk `D(c, r)` on the real axis enclosing an operator spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskBound {
    pub c: f64,
    pub r: f64,
}

impl DiskBound {
    pub fn ratio(&self) -> f64 {
        self.r / self.c
    }
}

/// A contraction factor together with the parameters it was computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBound {
    pub factor: f64,
    pub kind: BoundKind,
    pub p: Option<usize>,
    pub eta: Option<f64>,
    /// `kappa(A^T A)` for the simultaneous bound.
    pub kappa: Option<f64>,
    pub disk: Option<DiskBound>,
}

/// `1 / T_p(1 + 2 / (kappa - 1))`: the per-restart factor for simultaneous
/// GDA-AM with table size `p` on a bilinear game with `kappa(A^T A) = kappa`.
pub fn rate_bound_sim(kappa_ata: f64, p: usize) -> RateBound {
    assert!(kappa_ata >= 1.0, "condition numbers are at least 1");
    let factor = if kappa_ata == 1.0 {
        0.0
    } else if kappa_ata.is_infinite() {
        1.0
    } else {
        1.0 / chebyshev_t_one_plus(p as u32, 2.0 / (kappa_ata - 1.0))
    };
    RateBound {
        factor,
        kind: BoundKind::SimChebyshev,
        p: Some(p),
        eta: None,
        kappa: Some(kappa_ata),
        disk: None,
    }
}

const GOLDEN_ITERS: usize = 200;

/// Minimizes the convex `u -> max_i |lambda_i u - 1|` over `[lo, hi]`.
fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_ITERS {
        if hi - lo <= 1e-15 * hi.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

/// Smallest-ratio disk `D(c, r)` with real centre containing `eigenvalues`.
///
/// Works in `u = 1/c`: `|lambda - c| / c = |lambda u - 1|`, whose pointwise
/// minimizer is `Re(lambda) / |lambda|^2`, so the optimum lies between the
/// smallest and largest of those.
pub fn enclosing_disk(eigenvalues: &[Complex64]) -> DiskBound {
    let nonzero: Vec<Complex64> = eigenvalues.iter().copied().filter(|z| z.norm() > 0.0).collect();
    let targets: Vec<f64> = nonzero.iter().map(|z| z.re / z.norm_sqr()).collect();
    let lo = targets.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = targets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!(lo > 0.0, "spectrum must lie in the open right half-plane");
    let spread = |u: f64| nonzero.iter().fold(0.0f64, |m, z| m.max((z * u - 1.0).norm()));
    let u = if hi - lo > 0.0 { golden_section(spread, lo, hi) } else { lo };
    let c = 1.0 / u;
    let r = eigenvalues.iter().fold(0.0f64, |m, z| m.max((z - c).norm()));
    DiskBound { c, r }
}

/// `sqrt(1 + 2 eta / (2 - eta)) (r / c)^p` for alternating GDA-AM, with the
/// disk enclosing the spectrum of `I - G` for the game as given (normally
/// rescaled so that `sigma_max = 1`).
pub fn alt_disk_bound(game: &BilinearGame, eta: f64, p: usize) -> Result<(DiskBound, RateBound)> {
    if !(eta > 0.0 && eta < 2.0) {
        return Err(Error::InvalidEta(eta));
    }
    let spectrum = alt_operator_spectrum(game, eta);
    let disk = enclosing_disk(&spectrum.eigenvalues);
    let prefactor = (1.0 + 2.0 * eta / (2.0 - eta)).sqrt();
    let bound = RateBound {
        factor: prefactor * disk.ratio().powi(p as i32),
        kind: BoundKind::AltDisk,
        p: Some(p),
        eta: Some(eta),
        kappa: None,
        disk: Some(disk),
    };
    Ok((disk, bound))
}

pub fn rate_bound_alt(game: &BilinearGame, eta: f64, p: usize) -> Result<RateBound> {
    alt_disk_bound(game, eta, p).map(|(_, b)| b)
}

/// `J = [[eta B, eta A], [-eta A^T, eta C]]`.
pub fn quad_operator(game: &BilinearQuadraticGame, eta: f64) -> DMatrix<f64> {
    let (nx, ny) = game.a().shape();
    let mut j = DMatrix::zeros(nx + ny, nx + ny);
    j.view_mut((0, 0), (nx, nx)).copy_from(&(game.b_mat() * eta));
    j.view_mut((0, nx), (nx, ny)).copy_from(&(game.a() * eta));
    j.view_mut((nx, 0), (ny, nx)).copy_from(&(-game.a().transpose() * eta));
    j.view_mut((nx, nx), (ny, ny)).copy_from(&(game.c_mat() * eta));
    j
}

/// Per-iteration GMRES factor `sqrt(1 - lmin(J + J^T)^2 / (4 lmax(J^T J)))`
/// for `J` from [`quad_operator`]; after `t` steps the bound is `factor^t`.
pub fn rate_bound_quad(game: &BilinearQuadraticGame, eta: f64) -> Result<RateBound> {
    if !(eta > 0.0) {
        return Err(Error::InvalidEta(eta));
    }
    let j = quad_operator(game, eta);
    let sym = &j + j.transpose();
    let lmin = sym.symmetric_eigenvalues().min();
    if !(lmin > 0.0) {
        return Err(Error::NotPositiveDefinite(lmin));
    }
    let lmax = (j.transpose() * &j).symmetric_eigenvalues().max();
    let factor = (1.0 - lmin * lmin / (4.0 * lmax)).max(0.0).sqrt();
    Ok(RateBound {
        factor,
        kind: BoundKind::QuadElman,
        p: None,
        eta: Some(eta),
        kappa: None,
        disk: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::chebyshev_t;
    use crate::problems::{make_random_bilinear, make_random_bilinear_quadratic};
    use nalgebra::DVector;
    use proptest::prelude::*;

    #[test]
    fn sim_bound_small_cases() {
        assert!((rate_bound_sim(9.0, 1).factor - 0.8).abs() < 1e-15);
        assert!((rate_bound_sim(9.0, 2).factor - 1.0 / 2.125).abs() < 1e-15);
        for p in [1, 5, 40] {
            assert_eq!(rate_bound_sim(1.0, p).factor, 0.0);
        }
    }

    #[test]
    fn sim_bound_matches_recurrence() {
        for kappa in [2.0, 10.0, 1e3] {
            for p in 1..12u32 {
                let direct = 1.0 / chebyshev_t(p, 1.0 + 2.0 / (kappa - 1.0));
                let b = rate_bound_sim(kappa, p as usize).factor;
                assert!((b - direct).abs() <= 1e-13 * direct, "{kappa} {p}");
            }
        }
    }

    #[test]
    fn sim_bound_grid_monotone() {
        let kappas = [1.5, 3.0, 10.0, 1e2, 1e3, 1e4, 1e5, 1e6];
        for &k in &kappas {
            let f: Vec<f64> = (1..=64).map(|p| rate_bound_sim(k, p).factor).collect();
            assert!(f.windows(2).all(|w| w[1] <= w[0]));
            assert!(f.iter().all(|&x| (0.0..1.0).contains(&x)));
        }
        for p in 1..=64 {
            let f: Vec<f64> = kappas.iter().map(|&k| rate_bound_sim(k, p).factor).collect();
            assert!(f.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    proptest! {
        #[test]
        fn sim_bound_monotone(k in 1.0f64..1e6, dk in 0.0f64..1e3, p in 1usize..64) {
            let b = rate_bound_sim(k, p).factor;
            prop_assert!(rate_bound_sim(k, p + 1).factor <= b);
            prop_assert!(rate_bound_sim(k + dk, p).factor >= b);
        }
    }

    fn identity_game(n: usize) -> BilinearGame {
        BilinearGame::new(DMatrix::identity(n, n), DVector::zeros(n), DVector::zeros(n)).unwrap()
    }

    #[test]
    fn unit_spectrum_disk() {
        let (disk, bound) = alt_disk_bound(&identity_game(3), 1.0, 1).unwrap();
        assert!((disk.c - 2.0).abs() < 1e-7, "{disk:?}");
        assert!((disk.r - 3f64.sqrt()).abs() < 1e-7);
        assert!((bound.factor / disk.ratio() - 3f64.sqrt()).abs() < 1e-12);
        for p in 1..10 {
            let f = rate_bound_alt(&identity_game(3), 1.0, p).unwrap().factor;
            assert_eq!(f < 1.0, p >= 4, "p={p} factor={f}");
        }
    }

    #[test]
    fn disk_contains_spectrum_and_is_locally_optimal() {
        for seed in 0..8 {
            let g = make_random_bilinear(20, seed, None).rescale_to_unit_norm();
            for eta in [0.3, 1.0, 1.7] {
                let (disk, _) = alt_disk_bound(&g, eta, 5).unwrap();
                let spec = alt_operator_spectrum(&g, eta);
                let worst = spec.eigenvalues.iter().fold(0.0f64, |m, z| m.max((z - disk.c).norm()));
                assert!(worst <= disk.r + 1e-10);
                assert!(disk.r < disk.c);
                let ratio_at = |c: f64| spec.eigenvalues.iter().fold(0.0f64, |m, z| m.max((z - c).norm())) / c;
                for c in [disk.c * 0.99, disk.c * 1.01] {
                    assert!(ratio_at(c) >= disk.ratio() - 1e-12);
                }
            }
        }
    }

    #[test]
    fn invalid_eta() {
        let g = identity_game(2);
        assert!(matches!(alt_disk_bound(&g, 2.0, 3), Err(Error::InvalidEta(_))));
        assert!(matches!(alt_disk_bound(&g, 0.0, 3), Err(Error::InvalidEta(_))));
    }

    #[test]
    fn quad_identity_is_exact() {
        let one = DMatrix::identity(1, 1);
        let g = BilinearQuadraticGame::new(DMatrix::zeros(1, 1), one.clone(), one, DVector::zeros(1), DVector::zeros(1))
            .unwrap();
        let b = rate_bound_quad(&g, 1.0).unwrap();
        assert_eq!(b.factor, 0.0);
    }

    #[test]
    fn quad_factor_in_unit_interval() {
        for seed in 0..10 {
            let g = make_random_bilinear_quadratic(8, seed, 0.1);
            let f = rate_bound_quad(&g, 0.5).unwrap().factor;
            assert!((0.0..1.0).contains(&f));
        }
    }
}
