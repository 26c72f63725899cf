//! Finite-difference Dirichlet eigenmodes of planar billiards and the
//! position-space diagnostics used to look for scars and bouncing balls.
//!
//! Modes come from a five-point Laplacian, so at a given frequency they are
//! close to, but not the same as, the eigenvalues of the continuum problem.
//! Comparisons are made through mass ratios, not individual eigenvalues.

mod diagnostics;
mod domain;
mod factor;
mod lanczos;

pub use diagnostics::{
    area_fraction, bouncing_ball_rect, bouncing_ball_score, bouncing_ball_score_field, density_grid,
    field_measure, median, mode_pgm, position_measure, qe_spatial_variance, quantile, scar_score,
    scar_score_field, scar_tube, ModeRecord, RegionObservable, MIN_QE_MODES,
};
pub use domain::{build_laplacian, build_laplacian_on, DiscreteDomain, Geometry, Laplacian, Rectangle, MIN_INTERIOR};
pub use factor::{eigenvalue_count, ShiftedFactor, SymbolicFactor};
pub use lanczos::{
    eigenmodes_near, gram_defect, solve_window, weyl_estimate, BilliardMode, Solver, SolverOptions, MAX_KH,
    RESIDUAL_LIMIT,
};
