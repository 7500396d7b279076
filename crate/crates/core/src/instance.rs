//! Synthetic instances with a planted subspace, planted outliers and a
//! controlled gap between them.

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::sample_uniform;
use crate::linalg::{check_rank, DataMatrix, OutlierSet, Subspace};
use crate::rng::SeededRng;
use crate::scalar::Real;

/// Stream of the per-seed generator; solver samples use substreams instead.
const GENERATOR_STREAM: u64 = 0x6765_6e65_7261_7465;
/// Outliers sit strictly beyond the gap radius.
const RADIUS_MARGIN: f64 = 1.0 + 1e-9;

/// Generator parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedSpec {
    pub n: usize,
    pub d: usize,
    pub r: usize,
    pub k: usize,
    pub noise_sigma: f64,
    pub gap_gamma: f64,
}

impl PlantedSpec {
    pub fn validate(&self) -> Result<()> {
        check_rank(self.r, self.d)?;
        if self.k >= self.n {
            return Err(Error::OutlierCountOutOfRange {
                k: self.k,
                n: self.n,
            });
        }
        if self.gap_gamma <= 1.0 || !self.gap_gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gap_gamma must be finite and > 1, got {}",
                self.gap_gamma
            )));
        }
        if self.noise_sigma < 0.0 || !self.noise_sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise_sigma must be finite and >= 0, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

/// Ground truth recorded by the generator.
#[derive(Clone, Debug)]
pub struct PlantedTruth<T: Real> {
    pub subspace: Subspace<T>,
    pub outliers: OutlierSet,
    pub noise_sigma: f64,
    pub gap_gamma: f64,
    /// Distance at which the outliers were placed.
    pub outlier_radius: f64,
    pub seed: u64,
}

/// Data with its solve parameters `(r, k)`.
#[derive(Clone, Debug)]
pub struct Instance<T: Real> {
    pub data: DataMatrix<T>,
    pub r: usize,
    pub k: usize,
    pub planted: Option<PlantedTruth<T>>,
}

fn normal<T: Real>(len: usize, rng: &mut SeededRng) -> DVector<T> {
    DVector::from_fn(len, |_, _| T::lit(rng.sample(StandardNormal)))
}

fn in_unit_ball<T: Real>(r: usize, rng: &mut SeededRng) -> DVector<T> {
    let c = normal::<T>(r, rng);
    let radius: f64 = rng.random::<f64>().powf(1.0 / r as f64);
    let norm = c.norm();
    if norm == T::zero() {
        c
    } else {
        c * (T::lit(radius) / norm)
    }
}

/// Builds an instance from `seed`:
///
/// 1. a Haar-uniform true subspace `B`;
/// 2. `k` outlier rows at uniformly chosen positions;
/// 3. inliers `B·c + σ·g`, `c` uniform in the unit ball of ℝʳ and `g`
///    standard normal;
/// 4. outliers `B·c + R·u`, `u` a unit direction orthogonal to `B`, with
///    `R = γ · max(farthest inlier distance, σ·√d)`.
///
/// With `σ = 0` the inliers lie on `B` and the base radius falls back to 1,
/// the bound on the inlier coordinates.
pub fn generate_planted_instance<T: Real>(spec: &PlantedSpec, seed: u64) -> Result<Instance<T>> {
    spec.validate()?;
    let PlantedSpec {
        n,
        d,
        r,
        k,
        noise_sigma,
        gap_gamma,
    } = *spec;
    let mut rng = SeededRng::with_stream(seed, GENERATOR_STREAM);
    let truth: Subspace<T> = sample_uniform(r, d, &mut rng)?;
    let b = truth.basis().clone();
    let mut outlier_rows: Vec<usize> = index::sample(&mut rng, n, k).into_vec();
    outlier_rows.sort_unstable();
    let outliers = OutlierSet::new(outlier_rows, n)?;

    let mut rows = DMatrix::<T>::zeros(n, d);
    let mut directions = Vec::with_capacity(k);
    let sigma = T::lit(noise_sigma);
    for i in 0..n {
        let on_subspace = &b * in_unit_ball::<T>(r, &mut rng);
        let g = normal::<T>(d, &mut rng);
        let x = if outliers.contains(i) {
            let perp = &g - &b * b.tr_mul(&g);
            directions.push((i, perp));
            on_subspace
        } else {
            on_subspace + g * sigma
        };
        rows.set_row(i, &x.transpose());
    }

    let inliers = DataMatrix::new(rows.clone())?;
    let dist = truth.row_distances_sq(&inliers)?;
    let farthest_inlier = (0..n)
        .filter(|&i| !outliers.contains(i))
        .map(|i| dist[i].as_f64().sqrt())
        .fold(0.0_f64, f64::max);
    let mut base = farthest_inlier.max(noise_sigma * (d as f64).sqrt());
    if base <= 1e-12 {
        base = 1.0;
    }
    let radius = gap_gamma * base * RADIUS_MARGIN;
    for (i, dir) in directions {
        let norm = dir.norm();
        if norm == T::zero() {
            return Err(Error::InvalidParameter(
                "degenerate outlier direction; try another seed".into(),
            ));
        }
        let offset = dir * (T::lit(radius) / norm);
        let row = rows.row(i).transpose() + offset;
        rows.set_row(i, &row.transpose());
    }

    Ok(Instance {
        data: DataMatrix::new(rows)?,
        r,
        k,
        planted: Some(PlantedTruth {
            subspace: truth,
            outliers,
            noise_sigma,
            gap_gamma,
            outlier_radius: radius,
            seed,
        }),
    })
}
