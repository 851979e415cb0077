//! Shape diagnostics for payoff clouds: total least squares line, convex
//! hull area and the share of points where X does at least as well as Y.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Orthogonal residual below which a cloud counts as a line.
pub const COLLINEAR_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    /// `dy/dx` of the fitted line; infinite for a vertical line.
    pub slope: f64,
    /// Value at `s_X = 0`; NaN for a vertical line.
    pub intercept: f64,
    pub max_residual: f64,
    pub centroid: (f64, f64),
    /// Unit direction of the line.
    pub direction: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloudDiagnostics {
    pub collinear: bool,
    /// `None` when every point coincides.
    pub line: Option<LineFit>,
    pub hull_area: f64,
    pub dominance_fraction: f64,
}

pub fn fit_line(points: &[(f64, f64)]) -> Option<LineFit> {
    let n = points.len() as f64;
    let (first, rest) = points.split_first()?;
    if rest.iter().all(|p| p == first) {
        return None;
    }
    let cx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let cy = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x - cx, y - cy);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    // Principal axis of the 2x2 scatter matrix.
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let (sin, cos) = theta.sin_cos();
    let max_residual = points
        .iter()
        .map(|&(x, y)| (-(x - cx) * sin + (y - cy) * cos).abs())
        .fold(0.0, f64::max);
    let (slope, intercept) = if cos == 0.0 {
        (f64::INFINITY, f64::NAN)
    } else {
        let slope = sin / cos;
        (slope, cy - slope * cx)
    };
    Some(LineFit {
        slope,
        intercept,
        max_residual,
        centroid: (cx, cy),
        direction: (cos, sin),
    })
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Counter-clockwise convex hull (monotone chain), collinear points dropped.
pub fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for &p in pts.iter() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

pub fn polygon_area(poly: &[(f64, f64)]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let twice: f64 = poly
        .iter()
        .zip(poly.iter().cycle().skip(1))
        .map(|(a, b)| a.0 * b.1 - b.0 * a.1)
        .sum();
    twice.abs() / 2.0
}

/// Coincident points give `collinear = true`, no line and zero area.
pub fn analyze_cloud(points: &[(f64, f64)]) -> Result<CloudDiagnostics> {
    if points.is_empty() {
        return Err(Error::DegenerateCloud("no points"));
    }
    let line = fit_line(points);
    let collinear = line.is_none_or(|l| l.max_residual < COLLINEAR_TOL);
    let hull_area = polygon_area(&convex_hull(points));
    let dominant = points.iter().filter(|&&(x, y)| x >= y - 1e-12).count();
    Ok(CloudDiagnostics {
        collinear,
        line,
        hull_area,
        dominance_fraction: dominant as f64 / points.len() as f64,
    })
}
