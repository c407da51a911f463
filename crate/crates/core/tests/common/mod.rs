#![allow(dead_code)]

use polyinv_core::numerics::{dot, norm, rank, solve_lp, solve_square, LinearProgram, LpOutcome};
use polyinv_core::{Polytope, RandomSource};

/// Vertices of `conv(points)` (origin strictly inside) by enumerating every
/// `n`-subset, keeping the planes through them that support all points, and
/// taking the points tight on `n` independent supporting planes.
pub fn brute_force_hull_vertices(points: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let n = points[0].len();
    let mut planes: Vec<Vec<f64>> = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let rows: Vec<Vec<f64>> = idx.iter().map(|&i| points[i].clone()).collect();
        if let Some(h) = solve_square(&rows, &vec![1.0; n]) {
            if h.iter().all(|v| v.is_finite()) && points.iter().all(|p| dot(&h, p) <= 1.0 + tol) {
                planes.push(h);
            }
        }
        // Next combination.
        let mut i = n;
        loop {
            if i == 0 {
                return extreme(points, &planes, tol);
            }
            i -= 1;
            if idx[i] != i + points.len() - n {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn extreme(points: &[Vec<f64>], planes: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let n = points[0].len();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in points {
        let tight: Vec<Vec<f64>> = planes
            .iter()
            .filter(|h| (dot(h, p) - 1.0).abs() <= tol)
            .map(|h| h.iter().map(|x| x / norm(h)).collect())
            .collect();
        let refs: Vec<&[f64]> = tight.iter().map(Vec::as_slice).collect();
        let duplicate = out.iter().any(|q| dist(p, q) <= 1e-10);
        if !duplicate && rank(&refs, 1e-9) >= n {
            out.push(p.clone());
        }
    }
    out
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Same point sets up to `tol` (each point matched to a distinct partner).
pub fn same_point_sets(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|p| {
        match (0..b.len()).find(|&j| !used[j] && dist(p, &b[j]) <= tol) {
            Some(j) => {
                used[j] = true;
                true
            }
            None => false,
        }
    })
}

pub fn gaussian_points(n: usize, count: usize, scale: f64, rng: &mut RandomSource) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..n).map(|_| scale * rng.gaussian()).collect())
        .collect()
}

/// A random C-polytope: the unit box with a few Gaussian points hulled in.
pub fn random_polytope(n: usize, extra: usize, rng: &mut RandomSource) -> Polytope {
    let pts = gaussian_points(n, extra, 1.5, rng);
    Polytope::unit_box(n).unwrap().convex_hull_add(&pts).unwrap()
}

/// Exact distance from the origin to the boundary of `s` inside the cone of
/// half-angle `theta` around `u`: the gauge is maximised over the spherical
/// cap one facet at a time.
pub fn cone_distance_closed_form(s: &Polytope, u: &[f64], theta: f64) -> f64 {
    s.facets()
        .iter()
        .map(|h| {
            let c = (dot(h, u) / (norm(h) * norm(u))).clamp(-1.0, 1.0);
            let gap = (c.acos() - theta).max(0.0);
            if gap >= std::f64::consts::FRAC_PI_2 {
                f64::INFINITY
            } else {
                1.0 / (norm(h) * gap.cos())
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Planar dense search of the same quantity over `steps` ray directions.
pub fn cone_distance_grid(s: &Polytope, u: &[f64], theta: f64, steps: usize) -> f64 {
    let base = u[1].atan2(u[0]);
    (0..=steps)
        .map(|i| {
            let a = base - theta + 2.0 * theta * i as f64 / steps as f64;
            1.0 / s.gauge(&[a.cos(), a.sin()])
        })
        .fold(f64::INFINITY, f64::min)
}

/// Planar `γ(u)`: largest `α` with `αu` in the hull of `S` minus the open
/// cone of half-angle `theta` around `u`.
pub fn planar_gamma(s: &Polytope, u: &[f64], theta: f64) -> f64 {
    let angle = u[1].atan2(u[0]);
    let mut pts = vec![vec![0.0, 0.0]];
    for side in [-1.0, 1.0] {
        let d = [(angle + side * theta).cos(), (angle + side * theta).sin()];
        let g = s.gauge(&d);
        pts.push(vec![d[0] / g, d[1] / g]);
    }
    for v in s.vertices() {
        if dot(u, v) <= norm(u) * norm(v) * theta.cos() {
            pts.push(v.clone());
        }
    }
    let m = pts.len();
    let mut obj = vec![0.0; m];
    obj.push(-1.0);
    let mut lp = LinearProgram::nonnegative(obj);
    for i in 0..2 {
        let mut row: Vec<f64> = pts.iter().map(|p| p[i]).collect();
        row.push(-u[i]);
        lp = lp.eq(row, 0.0);
    }
    let mut row = vec![1.0; m];
    row.push(0.0);
    lp = lp.eq(row, 1.0);
    match solve_lp(&lp).unwrap() {
        LpOutcome::Optimal { value, .. } => -value,
        other => panic!("{other:?}"),
    }
}

/// `γ_min`: the planar `γ(u)` minimised over the vertices.
pub fn planar_gamma_min(s: &Polytope, theta: f64) -> f64 {
    s.vertices()
        .iter()
        .map(|u| planar_gamma(s, u, theta))
        .fold(f64::INFINITY, f64::min)
}
