//! Randomized solver by uniform Grassmannian sampling, plus the α-gap and a
//! Monte-Carlo probe of how far the optimal ordering survives around a
//! subspace.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grassmann::perturb_at_distance;
use crate::linalg::{farthest_k, DataMatrix, Subspace};
use crate::rng::SeededRng;
use crate::scalar::Real;
use crate::voronoi::{refit, sampled_trimmed_losses, Method, SolveResult};

/// Width of one distance shell in [`ordering_preservation_radius`].
pub const SHELL_WIDTH: f64 = 0.02;
/// Default probe count for [`ordering_preservation_radius`].
pub const DEFAULT_PROBES: usize = 500;
const DEGENERATE_GAP: f64 = 1e-12;

/// Samples `t` uniform subspaces, keeps the one with the smallest trimmed
/// loss (earliest sample on ties), drops its k farthest rows and refits.
///
/// Sample `i` comes from `rng.substream(i)`, so the stream matches
/// [`voronoi_solve_sampled`](crate::voronoi::voronoi_solve_sampled) for the
/// same generator.
pub fn randomized_solve<T: Real>(
    data: &DataMatrix<T>,
    r: usize,
    k: usize,
    t: u64,
    rng: &SeededRng,
) -> Result<SolveResult<T>> {
    let evaluated = sampled_trimmed_losses(data, r, k, t, rng)?;
    let (_, best) = evaluated
        .into_iter()
        .reduce(|a, b| if b.1.loss < a.1.loss { b } else { a })
        .expect("T >= 1");
    let (subspace, loss) = refit(data, &best.outliers, r)?;
    Ok(SolveResult {
        subspace,
        outliers: best.outliers,
        loss,
        method: Method::Randomized,
        seed: Some(rng.seed()),
        samples_used: Some(t),
    })
}

/// Separation between the farthest inlier and the nearest outlier of a
/// subspace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapReport {
    /// Distance of the farthest inlier, the (k+1)-th largest.
    pub d1: f64,
    /// Distance of the nearest outlier, the k-th largest.
    pub d2: f64,
    /// `(d2 − d1) / d1`.
    pub alpha: f64,
}

pub fn alpha_gap<T: Real>(data: &DataMatrix<T>, l: &Subspace<T>, k: usize) -> Result<GapReport> {
    let n = data.nrows();
    if k == 0 {
        return Err(Error::InvalidParameter(
            "alpha gap needs at least one outlier (k >= 1)".into(),
        ));
    }
    if k >= n {
        return Err(Error::OutlierCountOutOfRange { k, n });
    }
    let mut dist: Vec<f64> = l
        .row_distances_sq(data)?
        .into_iter()
        .map(|v| v.as_f64().sqrt())
        .collect();
    dist.sort_by(|a, b| b.partial_cmp(a).expect("finite distances"));
    let (d2, d1) = (dist[k - 1], dist[k]);
    if d1 <= DEGENERATE_GAP {
        return Err(Error::DegenerateGap { d1 });
    }
    Ok(GapReport {
        d1,
        d2,
        alpha: (d2 - d1) / d1,
    })
}

/// Radius found by [`ordering_preservation_radius`] together with the gap it
/// is meant to be compared against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PreservationReport {
    /// Largest shell edge such that every probe closer than it keeps the
    /// same k-farthest set as the center.
    pub radius: f64,
    pub gap: GapReport,
    pub probes_used: usize,
}

/// Probes subspaces in shells `[s·w, (s+1)·w)` of Grassmannian distance
/// around `l` (`w` = [`SHELL_WIDTH`]), innermost first, and stops at the
/// first shell where some probe changes the k-farthest set.
///
/// Probes are spread evenly over the `1/w` shells covering `[0, 1]`.
pub fn ordering_preservation_radius<T: Real>(
    data: &DataMatrix<T>,
    l: &Subspace<T>,
    k: usize,
    probes: usize,
    rng: &SeededRng,
) -> Result<PreservationReport> {
    if probes == 0 {
        return Err(Error::InvalidParameter("probes must be >= 1".into()));
    }
    let gap = alpha_gap(data, l, k)?;
    let reference = farthest_k(&l.row_distances_sq(data)?, k);
    let shells = (1.0 / SHELL_WIDTH).round() as usize;
    let per_shell = probes.div_ceil(shells);
    let mut radius = 0.0;
    let mut used = 0;
    for shell in 0..shells {
        let preserved = (0..per_shell)
            .into_par_iter()
            .map(|j| -> Result<bool> {
                let mut probe_rng = rng.substream((shell * per_shell + j) as u64);
                let u: f64 = probe_rng.random();
                let dist = (SHELL_WIDTH * (shell as f64 + u)).min(1.0);
                let probe = perturb_at_distance(l, T::lit(dist), &mut probe_rng)?;
                Ok(farthest_k(&probe.row_distances_sq(data)?, k) == reference)
            })
            .collect::<Result<Vec<bool>>>()?;
        used += per_shell;
        if preserved.iter().all(|&p| p) {
            radius = (SHELL_WIDTH * (shell + 1) as f64).min(1.0);
        } else {
            break;
        }
    }
    Ok(PreservationReport {
        radius,
        gap,
        probes_used: used,
    })
}
