use itertools::Itertools;
use rayon::prelude::*;

use super::{better, check_k, refit, Method, SolveResult};
use crate::error::{Error, Result};
use crate::linalg::{check_rank, DataMatrix, OutlierSet};
use crate::scalar::Real;

/// Largest `C(n, k)` enumerated without an explicit budget.
pub const DEFAULT_BUDGET: u128 = 2_000_000;

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

pub fn brute_force_solve<T: Real>(data: &DataMatrix<T>, r: usize, k: usize) -> Result<SolveResult<T>> {
    brute_force_solve_with_budget(data, r, k, DEFAULT_BUDGET)
}

/// Exhaustive search over all k-subsets. Equal objectives resolve to the
/// lexicographically smallest subset, independent of evaluation order.
pub fn brute_force_solve_with_budget<T: Real>(
    data: &DataMatrix<T>,
    r: usize,
    k: usize,
    budget: u128,
) -> Result<SolveResult<T>> {
    let n = data.nrows();
    check_rank(r, data.ncols())?;
    check_k(k, n)?;
    let subsets = binomial(n, k);
    if subsets > budget {
        return Err(Error::BudgetExceeded { subsets, budget });
    }
    let best = (0..n)
        .combinations(k)
        .par_bridge()
        .map(|combo| {
            let set = OutlierSet::new(combo, n)?;
            let (subspace, loss) = refit(data, &set, r)?;
            Ok::<_, Error>((set, subspace, loss))
        })
        .try_reduce_with(|a, b| Ok(better(a, b)))
        .expect("at least one subset")?;
    let (outliers, subspace, loss) = best;
    Ok(SolveResult {
        subspace,
        outliers,
        loss,
        method: Method::Brute,
        seed: None,
        samples_used: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pca_fit, pca_outlier_objective, pca_fit_rows};
    use crate::rng::SeededRng;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 1), 4);
        assert_eq!(binomial(8, 2), 28);
        assert_eq!(binomial(30, 3), 4060);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(10, 0), 1);
    }

    #[test]
    fn collinear_plus_outlier() {
        let x = DataMatrix::<f64>::from_row_slice(4, 2, &[1.0, 0.0, 2.0, 0.0, 3.0, 0.0, 0.0, 5.0]).unwrap();
        let res = brute_force_solve(&x, 1, 1).unwrap();
        assert_eq!(res.outliers.as_slice(), &[3]);
        assert!(res.loss.abs() < 1e-24);
        assert!((res.subspace.basis()[(0, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_outliers_is_plain_pca() {
        let mut rng = SeededRng::new(2);
        let vals: Vec<f64> = (0..30).map(|_| rng.sample(StandardNormal)).collect();
        let x = DataMatrix::from_row_slice(10, 3, &vals).unwrap();
        let res = brute_force_solve(&x, 2, 0).unwrap();
        let fit = pca_fit(&x, 2).unwrap();
        assert_eq!(res.subspace, fit.subspace);
        assert!((res.loss - fit.loss).abs() <= 1e-9 * fit.loss);
        assert!(res.outliers.is_empty());
    }

    #[test]
    fn matches_independent_enumeration() {
        let mut rng = SeededRng::new(99);
        let vals: Vec<f64> = (0..24).map(|_| rng.sample(StandardNormal)).collect();
        let x = DataMatrix::from_row_slice(8, 3, &vals).unwrap();
        let res = brute_force_solve(&x, 1, 2).unwrap();
        // Independent re-enumeration with nested loops.
        let mut best = f64::INFINITY;
        let mut count = 0;
        for a in 0..8 {
            for b in a + 1..8 {
                count += 1;
                let s = OutlierSet::new(vec![a, b], 8).unwrap();
                let fit = pca_fit_rows(&x, &s.complement(8), 1).unwrap();
                best = best.min(pca_outlier_objective(&x, &s, &fit.subspace).unwrap());
            }
        }
        assert_eq!(count, 28);
        assert_eq!(res.loss, best);
    }

    #[test]
    fn budget_is_enforced() {
        let x = DataMatrix::from_row_slice(30, 2, &vec![1.0; 60]).unwrap();
        let err = brute_force_solve_with_budget(&x, 1, 3, 1000).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { subsets: 4060, budget: 1000 }));
    }
}
