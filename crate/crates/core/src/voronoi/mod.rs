//! Exact and cell-enumerating solvers for PCA with outliers.
//!
//! * [`brute_force_solve`] tries every k-subset and defines ground truth.
//! * [`voronoi_solve_2d`] walks the degree-(n−k) arrangement of lines through
//!   the origin in the plane, where every cell boundary has a closed form.
//! * [`voronoi_solve_sampled`] discovers cells of the same arrangement in any
//!   dimension by evaluating uniformly sampled subspaces.
//!
//! A cell is identified by its set of k farthest points; only that set is
//! needed to refit.

mod brute;
mod planar;
mod sampled;
mod svg;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pca_fit_rows, pca_outlier_objective, DataMatrix, OutlierSet, Subspace};
use crate::scalar::Real;

pub use brute::{binomial, brute_force_solve, brute_force_solve_with_budget, DEFAULT_BUDGET};
pub use planar::{arc_breakpoints_2d, build_arc_diagram_2d, voronoi_solve_2d, ArcCell};
pub use sampled::{enumerate_candidate_sets_sampled, voronoi_solve_sampled};
pub(crate) use sampled::sampled_trimmed_losses;
pub use svg::arc_diagram_svg;

/// Which solver produced a result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "brute")]
    Brute,
    #[serde(rename = "voronoi2d")]
    Voronoi2d,
    #[serde(rename = "voronoi-sampled")]
    VoronoiSampled,
    #[serde(rename = "randomized")]
    Randomized,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Brute,
        Method::Voronoi2d,
        Method::VoronoiSampled,
        Method::Randomized,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Voronoi2d => "voronoi2d",
            Method::VoronoiSampled => "voronoi-sampled",
            Method::Randomized => "randomized",
        }
    }

    /// Whether the method consumes a sample count `T`.
    pub fn is_sampled(self) -> bool {
        matches!(self, Method::VoronoiSampled | Method::Randomized)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method `{s}`")))
    }
}

/// A subspace and outlier set together with the objective they achieve.
#[derive(Clone, Debug)]
pub struct SolveResult<T: Real> {
    pub subspace: Subspace<T>,
    pub outliers: OutlierSet,
    pub loss: T,
    pub method: Method,
    pub seed: Option<u64>,
    pub samples_used: Option<u64>,
}

/// Refit on the complement of `outliers` and score the pair.
pub(crate) fn refit<T: Real>(
    data: &DataMatrix<T>,
    outliers: &OutlierSet,
    r: usize,
) -> Result<(Subspace<T>, T)> {
    let rows = outliers.complement(data.nrows());
    let fit = pca_fit_rows(data, &rows, r)?;
    let loss = pca_outlier_objective(data, outliers, &fit.subspace)?;
    Ok((fit.subspace, loss))
}

/// Keeps the smaller loss; equal losses keep the lexicographically smaller set.
pub(crate) fn better<T: Real>(
    a: (OutlierSet, Subspace<T>, T),
    b: (OutlierSet, Subspace<T>, T),
) -> (OutlierSet, Subspace<T>, T) {
    if b.2 < a.2 || (b.2 == a.2 && b.0 < a.0) {
        b
    } else {
        a
    }
}

pub(crate) fn check_k(k: usize, n: usize) -> Result<()> {
    if k >= n {
        return Err(Error::OutlierCountOutOfRange { k, n });
    }
    Ok(())
}
