//! Grassmannian Gr(r, d) toolkit.
//!
//! Uniform (Haar) sampling, principal angles, the `sin θ_max` distance,
//! closed-form volume and ball-measure expressions, and the sample count
//! the randomized solver needs.
//!
//! Two of the closed forms are known to be loose or asymmetric:
//!
//! * [`grassmannian_volume`] is not invariant under `r ↔ d − r`
//!   (`Gr(1,3)` gives π/2, `Gr(2,3)` gives π).
//! * [`ball_measure_lower_bound`] is not a true lower bound on `Gr(1,2)`:
//!   for α = 0.1 it gives ≈ 0.2332 while the exact measure is
//!   `2·asin(α)/π ≈ 0.0638`. [`mc_ball_measure`] exists to show this.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{check_rank, dist_point_subspace, Subspace};
use crate::rng::SeededRng;
use crate::scalar::Real;

/// Principal angles between two equal-rank subspaces, nondecreasing, each
/// in `[0, π/2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalAngles<T: Real> {
    angles: Vec<T>,
}

impl<T: Real> PrincipalAngles<T> {
    pub fn angles(&self) -> &[T] {
        &self.angles
    }

    pub fn largest(&self) -> T {
        *self.angles.last().expect("rank >= 1")
    }
}

fn gaussian_matrix<T: Real>(rows: usize, cols: usize, rng: &mut SeededRng) -> DMatrix<T> {
    // Column-major fill so the draw order is fixed.
    let mut m = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            let z: f64 = rng.sample(StandardNormal);
            m[(i, j)] = T::lit(z);
        }
    }
    m
}

/// Draws a rank-r subspace of ℝᵈ from the normalized Haar measure.
///
/// The span of a `d × r` standard Gaussian matrix is Haar distributed; its
/// orthonormalization is the returned basis.
pub fn sample_uniform<T: Real>(r: usize, d: usize, rng: &mut SeededRng) -> Result<Subspace<T>> {
    check_rank(r, d)?;
    loop {
        match Subspace::orthonormalize(gaussian_matrix(d, r, rng)) {
            Err(Error::RankDeficient) => continue,
            other => return other,
        }
    }
}

/// Haar-distributed `d × d` orthogonal matrix.
pub fn random_orthogonal<T: Real>(d: usize, rng: &mut SeededRng) -> DMatrix<T> {
    loop {
        let qr = gaussian_matrix::<T>(d, d, rng).qr();
        let r = qr.r();
        if r.diagonal().iter().any(|v| *v == T::zero()) {
            continue;
        }
        let mut q = qr.q();
        for (j, mut col) in q.column_iter_mut().enumerate() {
            if r[(j, j)] < T::zero() {
                col.neg_mut();
            }
        }
        return q;
    }
}

fn check_pair<T: Real>(u: &Subspace<T>, v: &Subspace<T>) -> Result<()> {
    if u.ambient_dim() != v.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: u.ambient_dim(),
            found: v.ambient_dim(),
        });
    }
    if u.rank() != v.rank() {
        return Err(Error::DimensionMismatch {
            expected: u.rank(),
            found: v.rank(),
        });
    }
    Ok(())
}

pub fn principal_angles<T: Real>(u: &Subspace<T>, v: &Subspace<T>) -> Result<PrincipalAngles<T>> {
    check_pair(u, v)?;
    let m = u.basis().tr_mul(v.basis());
    let sv = m.singular_values();
    let mut angles: Vec<T> = sv
        .iter()
        .map(|&s| s.max(T::zero()).min(T::one()).acos())
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
    Ok(PrincipalAngles { angles })
}

/// `sin θ_max`, in `[0, 1]`.
///
/// Evaluated as the spectral norm of `(I − P_U)·V`, which equals the sine of
/// the largest principal angle and stays accurate for nearby subspaces where
/// going through `acos` would not.
pub fn grassmann_distance<T: Real>(u: &Subspace<T>, v: &Subspace<T>) -> Result<T> {
    check_pair(u, v)?;
    let vb = v.basis();
    let ub = u.basis();
    let residual = vb - ub * ub.tr_mul(vb);
    let s = residual
        .singular_values()
        .iter()
        .copied()
        .fold(T::zero(), |a, b| a.max(b));
    Ok(s.min(T::one()))
}

/// `r(d − r)`.
pub fn grassmannian_dimension(r: usize, d: usize) -> Result<usize> {
    check_rank(r, d)?;
    Ok(r * (d - r))
}

/// Volume of the unit ball in ℝᵐ, `π^{m/2} / Γ(m/2 + 1)`, by the two-step
/// recurrence `ω_m = 2π/m · ω_{m−2}`.
pub fn unit_ball_volume(m: usize) -> f64 {
    let mut even = 1.0; // ω_0
    let mut odd = 2.0; // ω_1
    if m == 0 {
        return even;
    }
    if m == 1 {
        return odd;
    }
    let mut j = 2;
    while j <= m {
        let next = 2.0 * std::f64::consts::PI / j as f64;
        if j % 2 == 0 {
            even *= next;
        } else {
            odd *= next;
        }
        j += 1;
    }
    if m.is_multiple_of(2) {
        even
    } else {
        odd
    }
}

/// Closed-form volume of Gr(r, d):
///
/// ```text
///            ∏_{i=1}^{r} ω_{d−i}
/// ───────────────────────────────────────────
///  ∏_{i=1}^{r} ω_{r−i} · ∏_{i=1}^{d−r} ω_{d−r−i}
/// ```
///
/// with `ω_m = π^{m/2}/Γ(m/2+1)`. Fails with [`Error::VolumeOutOfRange`]
/// when the result under- or overflows `f64`.
pub fn grassmannian_volume(r: usize, d: usize) -> Result<f64> {
    check_rank(r, d)?;
    let num: f64 = (1..=r).map(|i| unit_ball_volume(d - i)).product();
    let den_r: f64 = (1..=r).map(|i| unit_ball_volume(r - i)).product();
    let den_c: f64 = (1..=d - r).map(|i| unit_ball_volume(d - r - i)).product();
    let vol = num / (den_r * den_c);
    let ok = [num, den_r, den_c, vol]
        .iter()
        .all(|v| v.is_finite() && *v > 0.0);
    if !ok {
        return Err(Error::VolumeOutOfRange { r, d });
    }
    Ok(vol)
}

/// `α^{D} · (2e / D)^{D/2}` with `D = r(d − r)`; not clamped to `[0, 1]`.
pub fn ball_measure_lower_bound(alpha: f64, r: usize, d: usize) -> Result<f64> {
    if alpha <= 0.0 || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "alpha must be positive and finite, got {alpha}"
        )));
    }
    let dim = grassmannian_dimension(r, d)? as f64;
    let base = 2.0 * std::f64::consts::E / dim;
    Ok(alpha.powf(dim) * base.powf(dim / 2.0))
}

/// Number of uniform samples for a target success level `eps`:
/// `δ = min(1, ball bound)`, `T = max(1, ⌈eps/δ⌉)`.
pub fn required_samples(alpha: f64, eps: f64, r: usize, d: usize) -> Result<u64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    let delta = ball_measure_lower_bound(alpha, r, d)?.min(1.0);
    let t = (eps / delta).ceil();
    if !t.is_finite() || t >= u64::MAX as f64 {
        return Err(Error::InvalidParameter(format!(
            "sample count for alpha = {alpha} on Gr({r}, {d}) is not representable"
        )));
    }
    Ok((t as u64).max(1))
}

/// Monte-Carlo estimate with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub fraction: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Fraction of uniform samples within Grassmannian distance `alpha` of `v`.
///
/// Sample `i` is drawn from `rng.substream(i)`.
pub fn mc_ball_measure<T: Real>(
    v: &Subspace<T>,
    alpha: f64,
    samples: usize,
    rng: &SeededRng,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    let (r, d) = (v.rank(), v.ambient_dim());
    let hits = (0..samples as u64)
        .into_par_iter()
        .map(|i| -> Result<bool> {
            let u: Subspace<T> = sample_uniform(r, d, &mut rng.substream(i))?;
            Ok(grassmann_distance(&u, v)?.as_f64() <= alpha)
        })
        .try_fold(|| 0usize, |acc, hit| hit.map(|h| acc + h as usize))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let p = hits as f64 / samples as f64;
    Ok(McEstimate {
        fraction: p,
        std_error: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
    })
}

/// Subspace at Grassmannian distance exactly `dist` from `center`, reached
/// along a geodesic in a random tangent direction.
pub fn perturb_at_distance<T: Real>(
    center: &Subspace<T>,
    dist: T,
    rng: &mut SeededRng,
) -> Result<Subspace<T>> {
    if !(dist >= T::zero() && dist <= T::one()) {
        return Err(Error::InvalidParameter(format!(
            "distance must lie in [0, 1], got {dist}"
        )));
    }
    let b = center.basis();
    let (d, r) = b.shape();
    let theta = dist.asin();
    loop {
        let g = gaussian_matrix::<T>(d, r, rng);
        let h = &g - b * b.tr_mul(&g);
        let eig = (h.tr_mul(&h)).symmetric_eigen();
        let sv = eig.eigenvalues.map(|l| l.max(T::zero()).sqrt());
        let smax = sv.iter().copied().fold(T::zero(), |a, s| a.max(s));
        if smax <= T::default_epsilon() {
            continue;
        }
        let w = eig.eigenvectors;
        let scale = theta / smax;
        let cos = DMatrix::from_diagonal(&sv.map(|s| (s * scale).cos()));
        // H·W·diag(sin(sθ)/s) stands in for U·diag(sin(sθ)), which needs no
        // left singular vectors.
        let sinc = DMatrix::from_diagonal(&sv.map(|s| {
            if s > T::default_epsilon().sqrt() * smax {
                (s * scale).sin() / s
            } else {
                scale
            }
        }));
        let y = (b * &w * cos + &h * &w * sinc) * w.transpose();
        return Subspace::orthonormalize(y);
    }
}

/// Both sides of the point-to-subspace distance comparison between two
/// nearby subspaces `U` and `V`.
#[derive(Clone, Copy, Debug)]
pub struct DistanceBound {
    /// `dist(x, V)`.
    pub dist_to_v: f64,
    /// `dist(x, U) + ‖P_U x‖ · dist(U, V)`; always an upper bound.
    pub corrected_bound: f64,
    /// `dist(x, U) · (1 + dist(U, V))`; fails for large points near `U`.
    pub naive_bound: f64,
}

impl DistanceBound {
    pub fn corrected_slack(&self) -> f64 {
        self.corrected_bound - self.dist_to_v
    }

    pub fn naive_holds(&self) -> bool {
        self.dist_to_v <= self.naive_bound
    }
}

pub fn distance_bound<T: Real>(x: &[T], u: &Subspace<T>, v: &Subspace<T>) -> Result<DistanceBound> {
    let gd = grassmann_distance(u, v)?.as_f64();
    let du = dist_point_subspace(x, u)?.as_f64();
    let dv = dist_point_subspace(x, v)?.as_f64();
    let pu = u
        .project(x)?
        .iter()
        .map(|c| c.as_f64() * c.as_f64())
        .sum::<f64>()
        .sqrt();
    Ok(DistanceBound {
        dist_to_v: dv,
        corrected_bound: du + pu * gd,
        naive_bound: du * (1.0 + gd),
    })
}
