//! PCA with outliers.
//!
//! Given `n` points in ℝᵈ, a rank `r` and an outlier budget `k`, find a
//! rank-r subspace through the origin and `k` rows to discard so that the
//! squared distance of the remaining rows to the subspace is minimal.
//!
//! Three solvers share one objective:
//!
//! * [`brute_force_solve`]: every k-subset, the ground-truth oracle;
//! * [`voronoi_solve_2d`] / [`voronoi_solve_sampled`]: enumerate cells of the
//!   degree-(n−k) diagram of subspaces with respect to the points, exactly in
//!   the plane and by uniform sampling in general;
//! * [`randomized_solve`]: keep the best of `T` Haar-uniform subspaces, then
//!   refit.
//!
//! The [`grassmann`] module supplies the sampling, distances, volumes and the
//! sample-count estimate used to size `T`.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the `*64` and
//! `*32` aliases below fix the scalar.

pub use nalgebra;

pub mod bench;
pub mod error;
pub mod grassmann;
pub mod instance;
pub mod io;
pub mod linalg;
pub mod randomized;
pub mod rng;
pub mod scalar;
pub mod voronoi;

pub use error::{Error, Result};
pub use grassmann::{
    ball_measure_lower_bound, grassmann_distance, grassmannian_dimension, grassmannian_volume,
    mc_ball_measure, principal_angles, required_samples, sample_uniform, McEstimate,
    PrincipalAngles,
};
pub use instance::{generate_planted_instance, Instance, PlantedSpec, PlantedTruth};
pub use linalg::{
    dist_point_subspace, pca_fit, pca_outlier_objective, trimmed_loss, DataMatrix, OutlierSet,
    PcaSolution, Subspace, TrimmedLoss,
};
pub use randomized::{
    alpha_gap, ordering_preservation_radius, randomized_solve, GapReport, PreservationReport,
};
pub use rng::SeededRng;
pub use scalar::{losses_agree, Real};
pub use voronoi::{
    arc_breakpoints_2d, brute_force_solve, build_arc_diagram_2d, enumerate_candidate_sets_sampled,
    voronoi_solve_2d, voronoi_solve_sampled, ArcCell, Method, SolveResult,
};

pub type DataMatrix64 = DataMatrix<f64>;
pub type DataMatrix32 = DataMatrix<f32>;
pub type Subspace64 = Subspace<f64>;
pub type Subspace32 = Subspace<f32>;
pub type SolveResult64 = SolveResult<f64>;
pub type SolveResult32 = SolveResult<f32>;
pub type Instance64 = Instance<f64>;
pub type ArcCell64 = ArcCell<f64>;
