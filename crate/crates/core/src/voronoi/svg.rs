use std::fmt::Write;

use super::ArcCell;
use crate::linalg::{DataMatrix, OutlierSet};
use crate::scalar::Real;

/// Renders the planar diagram: every line angle θ is drawn at θ and θ + π on
/// a circle, colored by its cell's farthest set, with the data points
/// scaled inside.
pub fn arc_diagram_svg<T: Real>(cells: &[ArcCell<T>], data: &DataMatrix<T>) -> String {
    const SIZE: f64 = 400.0;
    const C: f64 = SIZE / 2.0;
    const RADIUS: f64 = 170.0;

    let mut sets: Vec<&OutlierSet> = cells.iter().map(|c| &c.farthest_k).collect();
    sets.sort();
    sets.dedup();
    let color = |set: &OutlierSet| {
        let idx = sets.iter().position(|s| *s == set).unwrap_or(0);
        let hue = 360.0 * idx as f64 / sets.len().max(1) as f64;
        format!("hsl({hue:.0},70%,50%)")
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let point = |theta: f64| (C + RADIUS * theta.cos(), C - RADIUS * theta.sin());
    for cell in cells {
        let (lo, hi) = (cell.theta_lo.as_f64(), cell.theta_hi.as_f64());
        let large = if hi - lo > std::f64::consts::PI { 1 } else { 0 };
        for shift in [0.0, std::f64::consts::PI] {
            let (x0, y0) = point(lo + shift);
            let (x1, y1) = point(hi + shift);
            let _ = writeln!(
                out,
                r#"  <path d="M {x0:.3} {y0:.3} A {RADIUS} {RADIUS} 0 {large} 0 {x1:.3} {y1:.3}" fill="none" stroke="{}" stroke-width="8"><title>{:?}</title></path>"#,
                color(&cell.farthest_k),
                cell.farthest_k.as_slice()
            );
        }
    }
    let max_norm = (0..data.nrows())
        .map(|i| data.get(i, 0).as_f64().hypot(data.get(i, 1).as_f64()))
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let scale = 0.8 * RADIUS / max_norm;
    for i in 0..data.nrows() {
        let (x, y) = (data.get(i, 0).as_f64(), data.get(i, 1).as_f64());
        let _ = writeln!(
            out,
            r#"  <circle cx="{:.3}" cy="{:.3}" r="3" fill="black"><title>{i}</title></circle>"#,
            C + scale * x,
            C - scale * y
        );
    }
    out.push_str("</svg>\n");
    out
}
