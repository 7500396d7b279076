//! The arrangement on Gr(1, 2).
//!
//! A line through the origin is `L_θ = span{(cos θ, sin θ)}`, θ ∈ [0, π). For
//! a point x,
//!
//! ```text
//! dist²(x, L_θ) = ‖x‖²/2 − (a·cos 2θ + b·sin 2θ)/2,  a = x₁² − x₂², b = 2x₁x₂
//! ```
//!
//! so two points swap order exactly where `A·cos 2θ + B·sin 2θ = C` with
//! `A = aᵢ − aⱼ`, `B = bᵢ − bⱼ`, `C = ‖xᵢ‖² − ‖xⱼ‖²`. Between consecutive
//! roots the k-farthest set is constant.

use std::collections::BTreeSet;

use super::{better, check_k, refit, Method, SolveResult};
use crate::error::{Error, Result};
use crate::linalg::{farthest_k, DataMatrix, OutlierSet, Subspace};
use crate::scalar::Real;

const ANGLE_TOL: f64 = 1e-12;

/// Half-open arc `[theta_lo, theta_hi)` of line angles sharing one
/// k-farthest set.
///
/// `theta_lo` lies in `[0, π)`; `theta_hi` is unwrapped, so an arc crossing
/// π has `theta_hi > π`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcCell<T: Real> {
    pub theta_lo: T,
    pub theta_hi: T,
    pub farthest_k: OutlierSet,
    /// Midpoint angle, reduced into `[0, π)`.
    pub representative: T,
}

fn check_planar<T: Real>(data: &DataMatrix<T>) -> Result<()> {
    if data.ncols() != 2 {
        return Err(Error::NotPlanar {
            d: data.ncols(),
            r: 1,
        });
    }
    Ok(())
}

fn wrap_pi<T: Real>(theta: T) -> T {
    let pi = T::pi();
    let mut t = theta % pi;
    if t < T::zero() {
        t += pi;
    }
    if t >= pi {
        t -= pi;
    }
    t
}

/// Every angle in `[0, π)` at which two points are equidistant from the
/// line, sorted and deduplicated.
pub fn arc_breakpoints_2d<T: Real>(data: &DataMatrix<T>) -> Result<Vec<T>> {
    check_planar(data)?;
    let n = data.nrows();
    let two = T::lit(2.0);
    let coeffs: Vec<(T, T, T)> = (0..n)
        .map(|i| {
            let (x1, x2) = (data.get(i, 0), data.get(i, 1));
            (x1 * x1 - x2 * x2, two * x1 * x2, x1 * x1 + x2 * x2)
        })
        .collect();
    let mut roots = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let a = coeffs[i].0 - coeffs[j].0;
            let b = coeffs[i].1 - coeffs[j].1;
            let c = coeffs[i].2 - coeffs[j].2;
            let amp = a.hypot(b);
            // |C| ≤ amp always holds, so amp = 0 means the pair is tied for
            // every line (duplicates, antipodes).
            if amp <= T::lit(1e-14) * (coeffs[i].2 + coeffs[j].2) {
                continue;
            }
            let phase = b.atan2(a);
            let spread = (c / amp).max(-T::one()).min(T::one()).acos();
            roots.push(wrap_pi((phase + spread) / two));
            roots.push(wrap_pi((phase - spread) / two));
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
    let tol = T::lit(ANGLE_TOL);
    let mut out: Vec<T> = Vec::with_capacity(roots.len());
    for t in roots {
        if out.last().is_none_or(|&last| t - last > tol) {
            out.push(t);
        }
    }
    // The circle closes at π.
    if out.len() > 1 && out[0] + T::pi() - out[out.len() - 1] <= tol {
        out.pop();
    }
    Ok(out)
}

fn farthest_on_line<T: Real>(data: &DataMatrix<T>, theta: T, k: usize) -> Result<OutlierSet> {
    let line = Subspace::from_orthonormal(nalgebra::DMatrix::from_column_slice(
        2,
        1,
        &[theta.cos(), theta.sin()],
    ))?;
    Ok(farthest_k(&line.row_distances_sq(data)?, k))
}

/// Cells of the degree-(n−k) diagram on lines through the origin, adjacent
/// arcs with the same farthest set merged.
pub fn build_arc_diagram_2d<T: Real>(data: &DataMatrix<T>, k: usize) -> Result<Vec<ArcCell<T>>> {
    check_k(k, data.nrows())?;
    let breaks = arc_breakpoints_2d(data)?;
    let pi = T::pi();
    let half = T::lit(0.5);
    if breaks.is_empty() {
        let mid = pi * half;
        return Ok(vec![ArcCell {
            theta_lo: T::zero(),
            theta_hi: pi,
            farthest_k: farthest_on_line(data, mid, k)?,
            representative: mid,
        }]);
    }
    let m = breaks.len();
    let mut arcs: Vec<(T, T, OutlierSet)> = Vec::with_capacity(m);
    for i in 0..m {
        let lo = breaks[i];
        let hi = if i + 1 < m { breaks[i + 1] } else { breaks[0] + pi };
        if hi - lo < T::lit(ANGLE_TOL) {
            continue;
        }
        let set = farthest_on_line(data, (lo + hi) * half, k)?;
        match arcs.last_mut() {
            Some(last) if last.2 == set => last.1 = hi,
            _ => arcs.push((lo, hi, set)),
        }
    }
    if arcs.len() > 1 && arcs[0].2 == arcs[arcs.len() - 1].2 {
        let first = arcs.remove(0);
        let last = arcs.last_mut().expect("len > 1");
        last.1 = first.1 + pi;
    }
    if arcs.len() == 1 {
        let set = arcs.pop().expect("one arc").2;
        let mid = pi * half;
        return Ok(vec![ArcCell {
            theta_lo: T::zero(),
            theta_hi: pi,
            farthest_k: set,
            representative: mid,
        }]);
    }
    Ok(arcs
        .into_iter()
        .map(|(lo, hi, set)| ArcCell {
            theta_lo: lo,
            theta_hi: hi,
            farthest_k: set,
            representative: wrap_pi((lo + hi) * half),
        })
        .collect())
}

/// Exact planar solve (d = 2, r = 1): refit on every distinct cell set and
/// keep the best.
pub fn voronoi_solve_2d<T: Real>(data: &DataMatrix<T>, k: usize) -> Result<SolveResult<T>> {
    check_planar(data)?;
    let cells = build_arc_diagram_2d(data, k)?;
    let candidates: BTreeSet<OutlierSet> = cells.into_iter().map(|c| c.farthest_k).collect();
    let mut best = None;
    for set in candidates {
        let (subspace, loss) = refit(data, &set, 1)?;
        let cand = (set, subspace, loss);
        best = Some(match best {
            None => cand,
            Some(b) => better(b, cand),
        });
    }
    let (outliers, subspace, loss) = best.expect("diagram has at least one cell");
    Ok(SolveResult {
        subspace,
        outliers,
        loss,
        method: Method::Voronoi2d,
        seed: None,
        samples_used: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use crate::voronoi::{binomial, brute_force_solve};
    use rand::Rng;
    use rand_distr::StandardNormal;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn dm(rows: &[[f64; 2]]) -> DataMatrix<f64> {
        DataMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn random_planar(rng: &mut SeededRng, n: usize) -> DataMatrix<f64> {
        let vals: Vec<f64> = (0..2 * n).map(|_| rng.sample(StandardNormal)).collect();
        DataMatrix::from_row_slice(n, 2, &vals).unwrap()
    }

    #[test]
    fn breakpoints_of_unit_axes() {
        let b = arc_breakpoints_2d(&dm(&[[1.0, 0.0], [0.0, 1.0]])).unwrap();
        assert_eq!(b.len(), 2);
        assert!((b[0] - FRAC_PI_4).abs() < 1e-15);
        assert!((b[1] - 3.0 * FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn degenerate_pairs_have_no_breakpoints() {
        assert!(arc_breakpoints_2d(&dm(&[[0.3, 0.7], [0.3, 0.7]])).unwrap().is_empty());
        assert!(arc_breakpoints_2d(&dm(&[[1.0, 0.0], [-1.0, 0.0]])).unwrap().is_empty());
    }

    #[test]
    fn breakpoints_are_equidistance_roots() {
        let mut rng = SeededRng::new(4);
        let x = random_planar(&mut rng, 6);
        for theta in arc_breakpoints_2d(&x).unwrap() {
            assert!((0.0..PI).contains(&theta));
            let line = Subspace::span(&[vec![theta.cos(), theta.sin()]]).unwrap();
            let d = line.row_distances_sq(&x).unwrap();
            let tied = (0..6).any(|i| (i + 1..6).any(|j| (d[i] - d[j]).abs() < 1e-9));
            assert!(tied, "no tied pair at {theta}");
        }
    }

    #[test]
    fn single_point_single_cell() {
        let cells = build_arc_diagram_2d(&dm(&[[0.4, -1.0]]), 0).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].theta_lo, 0.0);
        assert_eq!(cells[0].theta_hi, PI);
        assert!(cells[0].farthest_k.is_empty());
    }

    #[test]
    fn unit_axes_diagram() {
        let cells = build_arc_diagram_2d(&dm(&[[1.0, 0.0], [0.0, 1.0]]), 1).unwrap();
        assert_eq!(cells.len(), 2);
        let mut sets: Vec<_> = cells.iter().map(|c| c.farthest_k.as_slice().to_vec()).collect();
        sets.sort();
        assert_eq!(sets, vec![vec![0], vec![1]]);
        for c in &cells {
            let lo = c.theta_lo;
            assert!((lo - FRAC_PI_4).abs() < 1e-15 || (lo - 3.0 * FRAC_PI_4).abs() < 1e-15);
            assert!((c.theta_hi - c.theta_lo - PI / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn collinear_plus_outlier() {
        let x = dm(&[[1.0, 0.0], [2.0, 0.0], [3.0, 0.0], [0.0, 5.0]]);
        let res = voronoi_solve_2d(&x, 1).unwrap();
        assert_eq!(res.outliers.as_slice(), &[3]);
        assert!(res.loss.abs() < 1e-24);
    }

    #[test]
    fn rejects_non_planar() {
        let x = DataMatrix::from_row_slice(2, 3, &[1.0; 6]).unwrap();
        assert!(matches!(voronoi_solve_2d(&x, 0), Err(Error::NotPlanar { .. })));
    }

    #[test]
    fn candidate_count_is_bounded_and_contains_optimum() {
        let mut rng = SeededRng::new(17);
        for trial in 0..60 {
            let n = 4 + trial % 9;
            let k = trial % 4;
            let x = random_planar(&mut rng, n);
            let cells = build_arc_diagram_2d(&x, k).unwrap();
            let distinct: BTreeSet<_> = cells.iter().map(|c| c.farthest_k.clone()).collect();
            assert!(distinct.len() as u128 <= 2 * binomial(n, 2) + 1);
            let brute = brute_force_solve(&x, 1, k).unwrap();
            assert!(distinct.contains(&brute.outliers), "trial {trial}");
        }
    }

    #[test]
    fn cells_tile_the_circle() {
        let mut rng = SeededRng::new(23);
        let x = random_planar(&mut rng, 7);
        let cells = build_arc_diagram_2d(&x, 2).unwrap();
        let total: f64 = cells.iter().map(|c| c.theta_hi - c.theta_lo).sum();
        assert!((total - PI).abs() < 1e-12);
        for c in &cells {
            assert_eq!(farthest_on_line(&x, c.representative, 2).unwrap(), c.farthest_k);
        }
    }
}
