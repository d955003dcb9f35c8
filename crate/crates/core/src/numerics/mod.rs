//! Dense linear-algebra primitives.

mod chebyshev;
mod eigen;
mod qr;
mod weights;

pub use chebyshev::{chebyshev_t, chebyshev_t_one_plus};
pub use eigen::{condition_number, dense_eigenvalues, match_spectra, singular_values, Spectrum};
pub use qr::{DependentColumn, LeastSquaresSolution, ThinQR, CONDITION_WARNING_RATIO, DEFAULT_DROP_TOL};
pub use weights::{beta_to_gamma, gamma_to_beta, solve_mixing_weights, MixingSolution, WeightVector};
