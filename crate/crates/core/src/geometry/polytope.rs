use std::path::Path;

use serde::{Deserialize, Serialize};

use super::hull::{HullBuilder, Insertion, VISIBLE_TOL};
use super::{MAX_DIM, MIN_DIM};
use crate::error::{Error, Result};
use crate::numerics::{dot, norm, rank, solve_lp, FacetPiece, LinearProgram, LpOutcome};

const TIGHT_TOL: f64 = 1e-9;

/// Where a vertex came from. Data-driven iterations use this to map vertices
/// back to the sample pair (and sign copy) that produced them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexTag {
    /// Vertex of the initial set or of a polytope built from plain points.
    Initial,
    /// `±y / ‖±x‖` from sample pair `pair`.
    Sample { pair: usize, negated: bool },
    /// Image of a vertex under a known mode matrix.
    Mapped,
}

/// A C-polytope `{x : hᵀx <= 1 for every facet normal h}` stored with its
/// irredundant vertex list and per-facet incident vertices.
#[derive(Clone, Debug)]
pub struct Polytope {
    n: usize,
    vertices: Vec<Vec<f64>>,
    tags: Vec<VertexTag>,
    facets: Vec<Vec<f64>>,
    incidence: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct PolytopeFile {
    n: usize,
    vertices: Vec<Vec<f64>>,
    facets: Vec<Vec<f64>>,
}

fn check_dim_range(n: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::arg(format!("dimension {n} outside the supported range {MIN_DIM}..={MAX_DIM}")))
    }
}

impl Polytope {
    /// The hypercube `{x : ‖x‖∞ <= 1}`.
    pub fn unit_box(n: usize) -> Result<Self> {
        check_dim_range(n)?;
        let vertices: Vec<Vec<f64>> = (0..1usize << n)
            .map(|mask| (0..n).map(|i| if (mask >> i) & 1 == 0 { 1.0 } else { -1.0 }).collect())
            .collect();
        let mut facets = Vec::with_capacity(2 * n);
        let mut incidence = Vec::with_capacity(2 * n);
        for i in 0..n {
            for (sign, bit) in [(1.0, 0), (-1.0, 1)] {
                let mut h = vec![0.0; n];
                h[i] = sign;
                facets.push(h);
                incidence.push((0..1usize << n).filter(|m| (m >> i) & 1 == bit).collect());
            }
        }
        Ok(Self {
            n,
            tags: vec![VertexTag::Initial; vertices.len()],
            vertices,
            facets,
            incidence,
        })
    }

    /// Convex hull of `points`; fails unless the origin is strictly inside.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let n = points.first().map(|p| p.len()).ok_or_else(|| Error::arg("no points"))?;
        check_dim_range(n)?;
        for p in points {
            Error::check_dim(n, p.len())?;
        }
        let reach = points.iter().map(|p| norm(p)).fold(0.0, f64::max);
        if reach == 0.0 {
            return Err(Error::Degeneracy("all points are at the origin".into()));
        }
        let mut radius = 1e-3 * reach;
        while radius > 1e-13 * reach {
            let mut b = HullBuilder::seeded(n, radius);
            for (k, p) in points.iter().enumerate() {
                b.insert(p, k)?;
            }
            if b.seed_is_interior() {
                let tags = vec![VertexTag::Initial; points.len()];
                return Self::from_extracted(n, b, &tags);
            }
            radius *= 1e-3;
        }
        Err(Error::Degeneracy("origin is not strictly inside the convex hull".into()))
    }

    /// Builds a polytope from both representations, validating that they
    /// describe the same C-polytope and recomputing incidences.
    pub fn from_parts(n: usize, vertices: Vec<Vec<f64>>, facets: Vec<Vec<f64>>) -> Result<Self> {
        check_dim_range(n)?;
        for v in vertices.iter().chain(&facets) {
            Error::check_dim(n, v.len())?;
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Validation("non-finite coordinate".into()));
            }
        }
        if vertices.len() < n + 1 || facets.len() < n + 1 {
            return Err(Error::Validation("too few vertices or facets for a full-dimensional polytope".into()));
        }
        let mut incidence = vec![Vec::new(); facets.len()];
        for (vi, v) in vertices.iter().enumerate() {
            let mut tight: Vec<&[f64]> = Vec::new();
            for (fi, h) in facets.iter().enumerate() {
                let s = dot(h, v);
                if s > 1.0 + TIGHT_TOL {
                    return Err(Error::Validation(format!("vertex {vi} violates facet {fi} by {:e}", s - 1.0)));
                }
                if s >= 1.0 - TIGHT_TOL {
                    incidence[fi].push(vi);
                    tight.push(h);
                }
            }
            if rank(&tight, TIGHT_TOL) < n {
                return Err(Error::Validation(format!("vertex {vi} is not tight on n independent facets")));
            }
        }
        if let Some(fi) = incidence.iter().position(|inc| inc.len() < n) {
            return Err(Error::Validation(format!("facet {fi} touches fewer than n vertices")));
        }
        Ok(Self {
            n,
            tags: vec![VertexTag::Initial; vertices.len()],
            vertices,
            facets,
            incidence,
        })
    }

    fn from_extracted(n: usize, builder: HullBuilder, tags: &[VertexTag]) -> Result<Self> {
        let ex = builder.finish()?;
        Ok(Self {
            n,
            tags: ex.vertices.iter().map(|(l, _)| tags[*l]).collect(),
            vertices: ex.vertices.into_iter().map(|(_, p)| p).collect(),
            facets: ex.facets,
            incidence: ex.incidence,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn tags(&self) -> &[VertexTag] {
        &self.tags
    }

    /// Facet normals `h` of the inequalities `hᵀx <= 1`.
    pub fn facets(&self) -> &[Vec<f64>] {
        &self.facets
    }

    pub fn incidence(&self) -> &[Vec<usize>] {
        &self.incidence
    }

    /// Minkowski gauge `min{λ >= 0 : x ∈ λS}`, i.e. the largest facet value
    /// clamped at zero.
    ///
    /// Panics if `x` has the wrong dimension.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n, "gauge: dimension mismatch");
        self.facets.iter().map(|h| dot(h, x)).fold(0.0, f64::max)
    }

    pub fn checked_gauge(&self, x: &[f64]) -> Result<f64> {
        Error::check_dim(self.n, x.len())?;
        Ok(self.gauge(x))
    }

    /// Gauge from the vertex view: `min t` s.t. `x = Σ λᵢ vᵢ`, `Σ λᵢ = t`, `λ >= 0`.
    pub fn gauge_via_vertex_lp(&self, x: &[f64]) -> Result<f64> {
        Error::check_dim(self.n, x.len())?;
        let m = self.vertices.len();
        let mut objective = vec![1.0; m];
        objective.push(0.0);
        let mut lp = LinearProgram::nonnegative(objective);
        for i in 0..self.n {
            let mut row: Vec<f64> = self.vertices.iter().map(|v| v[i]).collect();
            row.push(0.0);
            lp = lp.eq(row, x[i]);
        }
        match solve_lp(&lp)? {
            LpOutcome::Optimal { value, .. } => Ok(value),
            other => Err(Error::numerical(format!("vertex gauge LP ended as {other:?}"))),
        }
    }

    /// Radius of the largest origin-centred ball inside the polytope.
    pub fn inradius(&self) -> f64 {
        self.facets.iter().map(|h| 1.0 / norm(h)).fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::arg("scale factor must be positive and finite"));
        }
        Ok(Self {
            n: self.n,
            vertices: self.vertices.iter().map(|v| v.iter().map(|x| x * factor).collect()).collect(),
            tags: self.tags.clone(),
            facets: self.facets.iter().map(|h| h.iter().map(|x| x / factor).collect()).collect(),
            incidence: self.incidence.clone(),
        })
    }

    /// `conv(S ∪ points)`; points with gauge `<= 1 + 1e-12` leave `S` unchanged.
    pub fn convex_hull_add(&self, points: &[Vec<f64>]) -> Result<Self> {
        let tags = vec![VertexTag::Initial; points.len()];
        self.convex_hull_add_tagged(points, &tags)
    }

    /// As [`Polytope::convex_hull_add`], recording `tags[i]` on every vertex
    /// created by `points[i]`.
    pub fn convex_hull_add_tagged(&self, points: &[Vec<f64>], tags: &[VertexTag]) -> Result<Self> {
        Error::check_dim(points.len(), tags.len())?;
        for p in points {
            Error::check_dim(self.n, p.len())?;
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::arg("hull points must be finite"));
            }
        }
        let mut outside: Vec<(usize, f64)> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, self.gauge(p)))
            .filter(|&(_, g)| g > 1.0 + VISIBLE_TOL)
            .collect();
        if outside.is_empty() {
            return Ok(self.clone());
        }
        // Farthest first, so later points are usually rejected without work.
        outside.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

        let base = self.vertices.len();
        let mut all_tags = self.tags.clone();
        all_tags.extend_from_slice(tags);
        let mut builder = HullBuilder::seeded(self.n, 0.5 * self.inradius());
        for &(i, _) in &outside {
            let _: Insertion = builder.insert(&points[i], base + i)?;
        }
        for (k, v) in self.vertices.iter().enumerate() {
            builder.insert(v, k)?;
        }
        Self::from_extracted(self.n, builder, &all_tags)
    }

    /// True iff every point has gauge at most `factor` (with `1e-12` slack).
    pub fn contains_scaled(&self, points: &[Vec<f64>], factor: f64) -> bool {
        points.iter().all(|p| self.gauge(p) <= factor + 1e-12)
    }

    /// Facet `f` as a hyperplane piece bounded by the facets it shares at
    /// least `n - 1` vertices with (a superset of its ridge neighbours).
    pub fn facet_piece(&self, f: usize) -> FacetPiece {
        let mine = &self.incidence[f];
        let bounds = self
            .incidence
            .iter()
            .enumerate()
            .filter(|&(g, inc)| g != f && inc.iter().filter(|v| mine.contains(v)).count() >= self.n - 1)
            .map(|(g, _)| (self.facets[g].clone(), 1.0))
            .collect();
        FacetPiece {
            normal: self.facets[f].clone(),
            offset: 1.0,
            bounds,
        }
    }

    /// True when the vertex set is closed under negation (within `tol`).
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.vertices.iter().all(|v| {
            self.vertices
                .iter()
                .any(|w| v.iter().zip(w).all(|(a, b)| (a + b).abs() <= tol))
        })
    }

    /// Vertex sets match one-to-one within `tol` (greedy nearest matching).
    pub fn same_vertices(&self, other: &Polytope, tol: f64) -> bool {
        if self.n != other.n || self.vertices.len() != other.vertices.len() {
            return false;
        }
        let mut used = vec![false; other.vertices.len()];
        for v in &self.vertices {
            let best = other
                .vertices
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, w)| (j, v.iter().zip(w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match best {
                Some((j, d)) if d <= tol => used[j] = true,
                _ => return false,
            }
        }
        true
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&PolytopeFile {
            n: self.n,
            vertices: self.vertices.clone(),
            facets: self.facets.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PolytopeFile = serde_json::from_str(text)?;
        Self::from_parts(file.n, file.vertices, file.facets)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Largest `λ` with `λ·outer ⊆ inner`.
pub fn inclusion_ratio(inner: &Polytope, outer: &Polytope) -> Result<f64> {
    Error::check_dim(inner.dim(), outer.dim())?;
    let worst = outer.vertices().iter().map(|v| inner.gauge(v)).fold(0.0, f64::max);
    Ok(1.0 / worst)
}
