use nalgebra::{DMatrix, Schur, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

const SCHUR_MAX_ITERS_PER_DIM: usize = 200;
const SVD_MAX_ITERS: usize = 0; // 0 lets nalgebra iterate until convergence

/// Eigenvalues of a real square matrix together with the largest
/// eigenpair residual `max_i ||A v_i - lambda_i v_i||` (unit `v_i`).
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub residual_bound: f64,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Eigenvalues sorted by real part, then imaginary part.
    pub fn sorted(&self) -> Vec<Complex64> {
        let mut v = self.eigenvalues.clone();
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }
}

/// All eigenvalues of `a` through the real Schur form `A = Q T Q^T`.
///
/// Eigenvectors are recovered by back substitution on the quasi-triangular
/// `T` so that [`Spectrum::residual_bound`] is a measured quantity.
pub fn dense_eigenvalues(a: &DMatrix<f64>) -> Result<Spectrum> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ncols(),
        });
    }
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            residual_bound: 0.0,
        });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonConvergence);
    }

    let schur = Schur::try_new(a.clone(), f64::EPSILON, SCHUR_MAX_ITERS_PER_DIM * n.max(10))
        .ok_or(Error::NonConvergence)?;
    let (q, t) = schur.unpack();

    let blocks = diagonal_blocks(&t);
    let tnorm = t.norm().max(f64::MIN_POSITIVE);
    let mut eigenvalues = Vec::with_capacity(n);
    let mut residual_bound = 0.0f64;
    for &(start, size) in &blocks {
        for lambda in block_eigenvalues(&t, start, size) {
            let y = quasi_triangular_eigenvector(&t, &blocks, start, size, lambda, tnorm);
            let v = complex_matvec_real(&q, &y);
            let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let av = complex_matvec_real(a, &v);
            let r = av
                .iter()
                .zip(&v)
                .map(|(x, vi)| (x - lambda * vi).norm_sqr())
                .sum::<f64>()
                .sqrt();
            residual_bound = residual_bound.max(r / vnorm);
            eigenvalues.push(lambda);
        }
    }
    Ok(Spectrum {
        eigenvalues,
        residual_bound,
    })
}

/// `(start, size)` of each 1x1 or 2x2 diagonal block of a real Schur form.
fn diagonal_blocks(t: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let n = t.nrows();
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            blocks.push((i, 2));
            i += 2;
        } else {
            blocks.push((i, 1));
            i += 1;
        }
    }
    blocks
}

fn block_eigenvalues(t: &DMatrix<f64>, start: usize, size: usize) -> Vec<Complex64> {
    if size == 1 {
        return vec![Complex64::new(t[(start, start)], 0.0)];
    }
    let (a, b) = (t[(start, start)], t[(start, start + 1)]);
    let (c, d) = (t[(start + 1, start)], t[(start + 1, start + 1)]);
    let half_trace = 0.5 * (a + d);
    let half_diff = 0.5 * (a - d);
    let disc = half_diff * half_diff + b * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        vec![Complex64::new(half_trace + s, 0.0), Complex64::new(half_trace - s, 0.0)]
    } else {
        let s = (-disc).sqrt();
        vec![Complex64::new(half_trace, s), Complex64::new(half_trace, -s)]
    }
}

/// Solves `(T - lambda I) y = 0` with `y` supported on rows `..start+size`.
fn quasi_triangular_eigenvector(
    t: &DMatrix<f64>,
    blocks: &[(usize, usize)],
    start: usize,
    size: usize,
    lambda: Complex64,
    tnorm: f64,
) -> Vec<Complex64> {
    let n = t.nrows();
    let small = f64::EPSILON * tnorm;
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    if size == 1 {
        y[start] = Complex64::new(1.0, 0.0);
    } else {
        let a = Complex64::new(t[(start, start)], 0.0) - lambda;
        let b = Complex64::new(t[(start, start + 1)], 0.0);
        let c = Complex64::new(t[(start + 1, start)], 0.0);
        let d = Complex64::new(t[(start + 1, start + 1)], 0.0) - lambda;
        // null vector of [[a, b], [c, d]]; pick the better-scaled row
        if a.norm() + b.norm() >= c.norm() + d.norm() {
            y[start] = b;
            y[start + 1] = -a;
        } else {
            y[start] = -d;
            y[start + 1] = c;
        }
        if y[start].norm() + y[start + 1].norm() == 0.0 {
            y[start] = Complex64::new(1.0, 0.0);
        }
    }

    let idx = blocks.iter().position(|&(s, _)| s == start).expect("block start");
    for &(bs, bsize) in blocks[..idx].iter().rev() {
        let end = start + size;
        let mut rhs = [Complex64::new(0.0, 0.0); 2];
        for (k, r) in rhs.iter_mut().enumerate().take(bsize) {
            let row = bs + k;
            let mut s = Complex64::new(0.0, 0.0);
            for (j, yj) in y.iter().enumerate().take(end).skip(bs + bsize) {
                s += t[(row, j)] * yj;
            }
            *r = -s;
        }
        if bsize == 1 {
            let mut piv = Complex64::new(t[(bs, bs)], 0.0) - lambda;
            if piv.norm() < small {
                piv = Complex64::new(small.max(f64::MIN_POSITIVE), 0.0);
            }
            y[bs] = rhs[0] / piv;
        } else {
            let a = Complex64::new(t[(bs, bs)], 0.0) - lambda;
            let b = Complex64::new(t[(bs, bs + 1)], 0.0);
            let c = Complex64::new(t[(bs + 1, bs)], 0.0);
            let d = Complex64::new(t[(bs + 1, bs + 1)], 0.0) - lambda;
            let mut det = a * d - b * c;
            if det.norm() < small * small.max(1.0) {
                det = Complex64::new(small.max(f64::MIN_POSITIVE), 0.0);
            }
            y[bs] = (d * rhs[0] - b * rhs[1]) / det;
            y[bs + 1] = (a * rhs[1] - c * rhs[0]) / det;
        }
        // keep the vector from overflowing on nearly defective matrices
        let scale = y.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if scale > 1e100 {
            for z in y.iter_mut() {
                *z /= scale;
            }
        }
    }
    y
}

fn complex_matvec_real(m: &DMatrix<f64>, v: &[Complex64]) -> Vec<Complex64> {
    let (rows, cols) = m.shape();
    let mut out = vec![Complex64::new(0.0, 0.0); rows];
    for (j, vj) in v.iter().enumerate().take(cols) {
        if vj.re == 0.0 && vj.im == 0.0 {
            continue;
        }
        let col = m.column(j);
        for (o, mij) in out.iter_mut().zip(col.iter()) {
            *o += vj * *mij;
        }
    }
    out
}

/// Singular values of `a` in descending order.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let svd = SVD::try_new(a.clone(), false, false, f64::EPSILON, SVD_MAX_ITERS)
        .expect("SVD without an iteration cap always converges");
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `sigma_max / sigma_min`; infinite for singular matrices.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&max), Some(&min)) if min > 0.0 => max / min,
        _ => f64::INFINITY,
    }
}

/// Largest distance between paired entries of two multisets of complex
/// numbers, pairing greedily by nearest neighbour.
pub fn match_spectra(expected: &[Complex64], actual: &[Complex64]) -> f64 {
    if expected.len() != actual.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; actual.len()];
    let mut worst = 0.0f64;
    for e in expected {
        let mut best = (usize::MAX, f64::INFINITY);
        for (j, a) in actual.iter().enumerate() {
            if !used[j] {
                let d = (e - a).norm();
                if d < best.1 {
                    best = (j, d);
                }
            }
        }
        used[best.0] = true;
        worst = worst.max(best.1);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng))
    }

    #[test]
    fn identity() {
        let s = dense_eigenvalues(&DMatrix::identity(3, 3)).unwrap();
        assert!(s.eigenvalues.iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        assert!(s.residual_bound < 1e-15);
    }

    #[test]
    fn rotation() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let s = dense_eigenvalues(&a).unwrap();
        let err = match_spectra(&[Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)], &s.eigenvalues);
        assert!(err < 1e-14);
    }

    #[test]
    fn residual_contract_on_random_matrices() {
        for (n, seed) in [(5, 1), (20, 2), (60, 3), (150, 4)] {
            let a = random(n, seed);
            let s = dense_eigenvalues(&a).unwrap();
            assert_eq!(s.len(), n);
            assert!(s.residual_bound <= 1e-8 * a.norm(), "n={n}: {}", s.residual_bound);
        }
    }

    #[test]
    fn trace_and_determinant_consistency() {
        let a = random(7, 9);
        let s = dense_eigenvalues(&a).unwrap();
        let sum: Complex64 = s.eigenvalues.iter().sum();
        let prod: Complex64 = s.eigenvalues.iter().product();
        assert!((sum.re - a.trace()).abs() < 1e-10 && sum.im.abs() < 1e-10);
        let det = a.clone().determinant();
        assert!((prod.re - det).abs() < 1e-9 * det.abs().max(1.0) && prod.im.abs() < 1e-9);
    }

    // Faddeev-LeVerrier coefficients, then Durand-Kerner roots
    fn characteristic_roots(a: &DMatrix<f64>) -> Vec<Complex64> {
        let n = a.nrows();
        let mut coeffs = vec![1.0];
        let mut m = DMatrix::<f64>::zeros(n, n);
        let mut c = 1.0;
        for k in 1..=n {
            m = a * &m + DMatrix::identity(n, n) * c;
            c = -(a * &m).trace() / k as f64;
            coeffs.push(c);
        }
        let eval = |z: Complex64| coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &ck| acc * z + ck);
        let seed = Complex64::new(0.4, 0.9);
        let mut roots: Vec<Complex64> = (0..n).map(|i| seed.powu(i as u32) * 2.0).collect();
        for _ in 0..2000 {
            let prev = roots.clone();
            for i in 0..n {
                let mut denom = Complex64::new(1.0, 0.0);
                for (j, rj) in roots.iter().enumerate() {
                    if j != i {
                        denom *= roots[i] - rj;
                    }
                }
                let step = eval(roots[i]) / denom;
                roots[i] -= step;
            }
            let moved = roots.iter().zip(&prev).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
            if moved < 1e-15 {
                break;
            }
        }
        roots
    }

    #[test]
    fn matches_characteristic_polynomial_roots() {
        for seed in 0..5 {
            let a = random(8, 100 + seed);
            let s = dense_eigenvalues(&a).unwrap();
            let roots = characteristic_roots(&a);
            let err = match_spectra(&roots, &s.eigenvalues);
            assert!(err <= 1e-8, "seed {seed}: {err}");
        }
    }

    #[test]
    fn singular_values_match_gram_eigenvalues() {
        let a = random(6, 77);
        let gram = a.transpose() * &a;
        let mut expected: Vec<f64> = gram.symmetric_eigenvalues().iter().map(|l| l.max(0.0).sqrt()).collect();
        expected.sort_by(|x, y| y.total_cmp(x));
        for (s, e) in singular_values(&a).iter().zip(&expected) {
            assert!((s - e).abs() <= 1e-10, "{s} vs {e}");
        }
    }

    #[test]
    fn singular_values_basic() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3.0]));
        assert_eq!(singular_values(&d), vec![3.0, 1.0]);
        let q = DMatrix::from_row_slice(2, 2, &[0.6, -0.8, 0.8, 0.6]);
        assert!(singular_values(&q).iter().all(|s| (s - 1.0).abs() < 1e-14));
        assert_eq!(condition_number(&DMatrix::zeros(2, 2)), f64::INFINITY);
    }
}
