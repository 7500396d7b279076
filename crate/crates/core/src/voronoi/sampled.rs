use std::collections::HashSet;

use rayon::prelude::*;

use super::{better, check_k, refit, Method, SolveResult};
use crate::error::{Error, Result};
use crate::grassmann::sample_uniform;
use crate::linalg::{check_rank, trimmed_loss, DataMatrix, OutlierSet, Subspace, TrimmedLoss};
use crate::rng::SeededRng;
use crate::scalar::Real;

/// Draws `t` uniform subspaces (sample `i` from `rng.substream(i)`) and
/// evaluates the trimmed loss of each, in sample order.
pub(crate) fn sampled_trimmed_losses<T: Real>(
    data: &DataMatrix<T>,
    r: usize,
    k: usize,
    t: u64,
    rng: &SeededRng,
) -> Result<Vec<(Subspace<T>, TrimmedLoss<T>)>> {
    check_rank(r, data.ncols())?;
    check_k(k, data.nrows())?;
    if t == 0 {
        return Err(Error::InvalidParameter("sample count T must be >= 1".into()));
    }
    (0..t)
        .into_par_iter()
        .map(|i| {
            let v = sample_uniform(r, data.ncols(), &mut rng.substream(i))?;
            let tl = trimmed_loss(data, &v, k)?;
            Ok((v, tl))
        })
        .collect()
}

/// Distinct k-farthest sets seen across `t` uniform samples, in order of
/// first appearance. Each one witnesses a nonempty cell.
pub fn enumerate_candidate_sets_sampled<T: Real>(
    data: &DataMatrix<T>,
    r: usize,
    k: usize,
    t: u64,
    rng: &SeededRng,
) -> Result<Vec<OutlierSet>> {
    let evaluated = sampled_trimmed_losses(data, r, k, t, rng)?;
    let mut seen = HashSet::new();
    Ok(evaluated
        .into_iter()
        .map(|(_, tl)| tl.outliers)
        .filter(|s| seen.insert(s.clone()))
        .collect())
}

/// Refits on every sampled candidate set and keeps the best objective.
pub fn voronoi_solve_sampled<T: Real>(
    data: &DataMatrix<T>,
    r: usize,
    k: usize,
    t: u64,
    rng: &SeededRng,
) -> Result<SolveResult<T>> {
    let candidates = enumerate_candidate_sets_sampled(data, r, k, t, rng)?;
    let best = candidates
        .into_par_iter()
        .map(|set| {
            let (subspace, loss) = refit(data, &set, r)?;
            Ok::<_, Error>((set, subspace, loss))
        })
        .try_reduce_with(|a, b| Ok(better(a, b)))
        .expect("T >= 1 yields a candidate")?;
    let (outliers, subspace, loss) = best;
    Ok(SolveResult {
        subspace,
        outliers,
        loss,
        method: Method::VoronoiSampled,
        seed: Some(rng.seed()),
        samples_used: Some(t),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voronoi::brute_force_solve;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn random(rng: &mut SeededRng, n: usize, d: usize) -> DataMatrix<f64> {
        let vals: Vec<f64> = (0..n * d).map(|_| rng.sample(StandardNormal)).collect();
        DataMatrix::from_row_slice(n, d, &vals).unwrap()
    }

    #[test]
    fn one_sample_one_candidate() {
        let x = random(&mut SeededRng::new(1), 9, 3);
        let c = enumerate_candidate_sets_sampled(&x, 1, 2, 1, &SeededRng::new(5)).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].len(), 2);
    }

    #[test]
    fn zero_samples_rejected() {
        let x = random(&mut SeededRng::new(1), 5, 3);
        assert!(enumerate_candidate_sets_sampled(&x, 1, 1, 0, &SeededRng::new(5)).is_err());
    }

    #[test]
    fn candidates_grow_with_prefixes() {
        let x = random(&mut SeededRng::new(2), 10, 3);
        let rng = SeededRng::new(77);
        let mut prev: Vec<OutlierSet> = Vec::new();
        for t in [1, 4, 16, 64, 256] {
            let cur = enumerate_candidate_sets_sampled(&x, 1, 2, t, &rng).unwrap();
            assert!(cur.len() >= prev.len());
            assert_eq!(&cur[..prev.len()], &prev[..]);
            prev = cur;
        }
    }

    #[test]
    fn never_beats_brute_force_and_is_deterministic() {
        let mut rng = SeededRng::new(3);
        for _ in 0..10 {
            let x = random(&mut rng, 8, 3);
            let brute = brute_force_solve(&x, 2, 2).unwrap();
            let s = SeededRng::new(12);
            let a = voronoi_solve_sampled(&x, 2, 2, 64, &s).unwrap();
            let b = voronoi_solve_sampled(&x, 2, 2, 64, &s).unwrap();
            assert!(a.loss >= brute.loss * (1.0 - 1e-12));
            assert_eq!(a.outliers, b.outliers);
            assert_eq!(a.loss, b.loss);
            assert_eq!(a.samples_used, Some(64));
        }
    }
}
