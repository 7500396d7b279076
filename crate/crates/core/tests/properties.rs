use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

use vorpca::grassmann::{distance_bound, perturb_at_distance};
use vorpca::{
    dist_point_subspace, grassmann_distance, pca_fit, pca_outlier_objective, principal_angles,
    sample_uniform, trimmed_loss, DataMatrix64, OutlierSet, SeededRng, Subspace64,
};

fn gaussian(rng: &mut SeededRng, n: usize, d: usize) -> DataMatrix64 {
    let vals: Vec<f64> = (0..n * d).map(|_| rng.sample(StandardNormal)).collect();
    DataMatrix64::from_row_slice(n, d, &vals).unwrap()
}

/// (seed, n, d, r, k) with 1 ≤ r < d and k < n.
fn shape() -> impl Strategy<Value = (u64, usize, usize, usize, usize)> {
    (any::<u64>(), 2usize..7, 1usize..12).prop_flat_map(|(seed, d, n)| {
        (Just(seed), Just(n), Just(d), 1..d, 0..n)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_orthogonal((seed, _n, d, r, _k) in shape()) {
        let mut rng = SeededRng::new(seed);
        let v: Subspace64 = sample_uniform(r, d, &mut rng).unwrap();
        let x: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let p = v.project(&x).unwrap();
        let dist = dist_point_subspace(&x, &v).unwrap();
        let norm2: f64 = x.iter().map(|a| a * a).sum();
        let proj2: f64 = p.iter().map(|a| a * a).sum();
        prop_assert!((proj2 + dist * dist - norm2).abs() <= 1e-10 * norm2.max(1.0));
    }

    #[test]
    fn pca_beats_random_subspaces((seed, n, d, r, _k) in shape()) {
        let mut rng = SeededRng::new(seed);
        let x = gaussian(&mut rng, n, d);
        let fit = pca_fit(&x, r).unwrap();
        for _ in 0..100 {
            let v: Subspace64 = sample_uniform(r, d, &mut rng).unwrap();
            let loss = pca_outlier_objective(&x, &OutlierSet::empty(), &v).unwrap();
            prop_assert!(fit.loss <= loss + 1e-10 * x.energy());
        }
    }

    #[test]
    fn trimmed_loss_shrinks_with_k((seed, n, d, r, _k) in shape()) {
        let mut rng = SeededRng::new(seed);
        let x = gaussian(&mut rng, n, d);
        let v: Subspace64 = sample_uniform(r, d, &mut rng).unwrap();
        let mut prev = f64::INFINITY;
        for k in 0..n {
            let t = trimmed_loss(&x, &v, k).unwrap();
            prop_assert_eq!(t.outliers.len(), k);
            prop_assert!(t.loss <= prev);
            prev = t.loss;
        }
    }

    #[test]
    fn trimmed_loss_is_the_best_objective_for_fixed_subspace((seed, n, d, r, k) in shape()) {
        let mut rng = SeededRng::new(seed);
        let x = gaussian(&mut rng, n, d);
        let v: Subspace64 = sample_uniform(r, d, &mut rng).unwrap();
        let t = trimmed_loss(&x, &v, k).unwrap();
        let direct = pca_outlier_objective(&x, &t.outliers, &v).unwrap();
        prop_assert!((direct - t.loss).abs() <= 1e-12 * x.energy());
        // Any other k-set leaves more residual.
        let mut idx: Vec<usize> = (0..n).collect();
        for _ in 0..10 {
            for i in (1..n).rev() {
                idx.swap(i, rng.random_range(0..=i));
            }
            let other = OutlierSet::from_unsorted(idx[..k].to_vec(), n).unwrap();
            let loss = pca_outlier_objective(&x, &other, &v).unwrap();
            prop_assert!(t.loss <= loss + 1e-12 * x.energy());
        }
    }

    #[test]
    fn distance_is_symmetric_and_bounded((seed, _n, d, r, _k) in shape()) {
        let mut rng = SeededRng::new(seed);
        let u: Subspace64 = sample_uniform(r, d, &mut rng).unwrap();
        let v: Subspace64 = sample_uniform(r, d, &mut rng).unwrap();
        let uv = grassmann_distance(&u, &v).unwrap();
        let vu = grassmann_distance(&v, &u).unwrap();
        prop_assert!((0.0..=1.0).contains(&uv));
        prop_assert!((uv - vu).abs() <= 1e-12);
        prop_assert!(grassmann_distance(&u, &u).unwrap() <= 1e-12);
        let theta = principal_angles(&u, &v).unwrap().largest();
        prop_assert!((theta.sin() - uv).abs() <= 1e-7);
    }

    #[test]
    fn corrected_bound_holds(
        (seed, _n, d, r, _k) in shape(),
        dist in 0.0f64..=1.0,
        scale in 0.01f64..100.0,
    ) {
        let mut rng = SeededRng::new(seed);
        let u: Subspace64 = sample_uniform(r, d, &mut rng).unwrap();
        let v = perturb_at_distance(&u, dist, &mut rng).unwrap();
        let x: Vec<f64> = (0..d).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
        let b = distance_bound(&x, &u, &v).unwrap();
        prop_assert!(b.corrected_slack() >= -1e-9 * scale.max(1.0));
    }
}
