//! Closed-form spectra, rate bounds, numerical ranges and second-order
//! classification used to check convergence behaviour against theory.

mod bounds;
mod classify;
mod contraction;
mod range;
mod spectra;

use std::io::{self, Write};

use num_complex::Complex64;

pub use bounds::{
    alt_disk_bound, enclosing_disk, quad_operator, rate_bound_alt, rate_bound_quad, rate_bound_sim, BoundKind,
    DiskBound, RateBound,
};
pub use classify::{classify_stationary, MinimaxLabel, StationaryClassification, CURVATURE_MARGIN, STATIONARY_TOL};
pub use contraction::{check_contraction, ContractionReport, CycleRatio, NOISE_FLOOR_FACTOR, RELATIVE_SLACK};
pub use range::{is_convex_ccw, numerical_range_boundary, DEFAULT_NUM_ANGLES};
pub use spectra::{alt_block_eigenvalues, alt_operator_spectrum, sim_operator_spectrum};

/// Writes `re,im` rows with a header.
pub fn write_complex_csv<W: Write>(mut out: W, points: &[Complex64]) -> io::Result<()> {
    writeln!(out, "re,im")?;
    for z in points {
        writeln!(out, "{},{}", z.re, z.im)?;
    }
    Ok(())
}
