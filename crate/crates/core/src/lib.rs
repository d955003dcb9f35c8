//! Anderson-mixing accelerated gradient descent ascent (GDA-AM) for minimax
//! problems.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: Chebyshev evaluation, an incrementally updated thin QR,
//!   the constrained least-squares solve behind Anderson mixing, and dense
//!   eigenvalue / singular value helpers.
//! * [`anderson`]: the Anderson mixing table (restarted or sliding window).
//! * [`gmres`]: restarted GMRES with Givens rotations, used as an exact
//!   cross-oracle for the mixer on affine maps.
//! * [`problems`]: bilinear and bilinear-quadratic games plus six analytic
//!   two-variable saddle functions.
//! * [`optimizers`]: GDA, EG, OG, EG with momentum and the two GDA-AM
//!   variants, with trajectory recording.
//! * [`analysis`]: closed-form operator spectra, contraction-rate bounds,
//!   numerical ranges and local-minimax classification.

pub mod analysis;
pub mod anderson;
pub mod error;
pub mod gmres;
pub mod numerics;
pub mod optimizers;
pub mod problems;

pub use error::{Error, Result};
