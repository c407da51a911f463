//! Incremental beneath-beyond convex hull for origin-containing point sets.
//!
//! The boundary is kept as a simplicial complex: every simplex stores its `n`
//! vertex ids, the neighbour across each vertex, and the normal `h` of its
//! supporting hyperplane `hᵀx = 1`. Coplanar simplices are merged into facets
//! only when the hull is extracted.
//!
//! Construction starts from a small cross-polytope around the origin; its
//! corners must end up strictly interior, which is exactly the condition that
//! the origin lies in the interior of the hull.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::numerics::{dot, rank, solve_square};

/// A point counts as beyond a simplex when `hᵀp > 1 + VISIBLE_TOL`; exact
/// ties behave as if `p` were shrunk infinitesimally towards the origin.
pub(crate) const VISIBLE_TOL: f64 = 1e-12;
const CONVEXITY_TOL: f64 = 1e-9;
const MERGE_TOL: f64 = 1e-10;
pub(crate) const DEDUP_DIST: f64 = 1e-10;
// Below MERGE_TOL so that facets kept apart are never treated as parallel.
const RANK_TOL: f64 = 1e-11;
const NO_NEIGHBOR: usize = usize::MAX;

#[derive(Clone, Debug)]
struct Simplex {
    verts: Vec<usize>,
    neighbors: Vec<usize>,
    normal: Vec<f64>,
    alive: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Insertion {
    Added,
    Inside,
    /// Beyond the hull by less than the convexity tolerance in a position
    /// where the new cone would be ill-conditioned; dropped.
    Skipped,
}

pub(crate) struct HullBuilder {
    n: usize,
    points: Vec<Vec<f64>>,
    labels: Vec<Option<usize>>,
    simplices: Vec<Simplex>,
    free: Vec<usize>,
    mark: Vec<u64>,
    epoch: u64,
}

pub(crate) struct ExtractedHull {
    /// `(label, coordinates)` sorted by label.
    pub vertices: Vec<(usize, Vec<f64>)>,
    pub facets: Vec<Vec<f64>>,
    pub incidence: Vec<Vec<usize>>,
}

struct Fresh {
    simplex: Simplex,
    outer: usize,
    outer_slot: usize,
}

impl HullBuilder {
    /// Cross-polytope seed `conv{±radius·e_i}`.
    pub fn seeded(n: usize, radius: f64) -> Self {
        let mut points = Vec::with_capacity(2 * n);
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut p = vec![0.0; n];
                p[i] = s * radius;
                points.push(p);
            }
        }
        let count = 1usize << n;
        let mut simplices = Vec::with_capacity(count);
        for mask in 0..count {
            let verts = (0..n).map(|i| 2 * i + ((mask >> i) & 1)).collect();
            let neighbors = (0..n).map(|i| mask ^ (1 << i)).collect();
            let normal = (0..n)
                .map(|i| if (mask >> i) & 1 == 0 { 1.0 / radius } else { -1.0 / radius })
                .collect();
            simplices.push(Simplex { verts, neighbors, normal, alive: true });
        }
        Self {
            n,
            labels: vec![None; points.len()],
            points,
            mark: vec![0; simplices.len()],
            simplices,
            free: Vec::new(),
            epoch: 0,
        }
    }

    pub fn insert(&mut self, p: &[f64], label: usize) -> Result<Insertion> {
        let n = self.n;
        let visible: Vec<usize> = self
            .simplices
            .iter()
            .enumerate()
            .filter(|(_, s)| s.alive && dot(&s.normal, p) > 1.0 + VISIBLE_TOL)
            .map(|(i, _)| i)
            .collect();
        if visible.is_empty() {
            return Ok(Insertion::Inside);
        }
        for &i in &visible {
            for &v in &self.simplices[i].verts {
                let d2: f64 = self.points[v].iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
                if d2 <= DEDUP_DIST * DEDUP_DIST {
                    return Ok(Insertion::Inside);
                }
            }
        }
        self.epoch += 1;
        for &i in &visible {
            self.mark[i] = self.epoch;
        }
        let pid = self.points.len();

        let mut fresh: Vec<Fresh> = Vec::new();
        for &i in &visible {
            let s = &self.simplices[i];
            for j in 0..n {
                let nb = s.neighbors[j];
                if self.mark[nb] == self.epoch {
                    continue;
                }
                let mut verts: Vec<usize> = s
                    .verts
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, &v)| v)
                    .collect();
                let rows: Vec<Vec<f64>> = verts
                    .iter()
                    .map(|&v| self.points[v].clone())
                    .chain(std::iter::once(p.to_vec()))
                    .collect();
                verts.push(pid);
                let Some(normal) = solve_square(&rows, &vec![1.0; n]) else {
                    return Ok(Insertion::Skipped);
                };
                let outer = &self.simplices[nb];
                let outer_slot = outer
                    .neighbors
                    .iter()
                    .position(|&x| x == i)
                    .ok_or_else(|| Error::Degeneracy("broken hull adjacency".into()))?;
                let apex = outer.verts[outer_slot];
                if dot(&normal, &self.points[apex]) > 1.0 + CONVEXITY_TOL {
                    return Ok(Insertion::Skipped);
                }
                let mut neighbors = vec![NO_NEIGHBOR; n];
                neighbors[n - 1] = nb;
                fresh.push(Fresh {
                    simplex: Simplex { verts, neighbors, normal, alive: true },
                    outer: nb,
                    outer_slot,
                });
            }
        }

        // Glue the new cone along the (n-3)-faces of the horizon.
        let mut open: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
        let mut links = Vec::new();
        for (f, fr) in fresh.iter().enumerate() {
            for j in 0..n - 1 {
                let mut key: Vec<usize> = fr.simplex.verts[..n - 1]
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, &v)| v)
                    .collect();
                key.sort_unstable();
                match open.remove(&key) {
                    Some((g, slot)) => links.push(((f, j), (g, slot))),
                    None => {
                        open.insert(key, (f, j));
                    }
                }
            }
        }
        if !open.is_empty() {
            return Err(Error::Degeneracy(
                "horizon of the visible region is not a closed ridge cycle".into(),
            ));
        }
        for &((f, j), (g, slot)) in &links {
            let a = fresh[g].simplex.verts[slot];
            let b = fresh[f].simplex.verts[j];
            let pa = if a == pid { p } else { &self.points[a] };
            let pb = if b == pid { p } else { &self.points[b] };
            if dot(&fresh[f].simplex.normal, pa) > 1.0 + CONVEXITY_TOL
                || dot(&fresh[g].simplex.normal, pb) > 1.0 + CONVEXITY_TOL
            {
                return Ok(Insertion::Skipped);
            }
        }

        // Commit.
        self.points.push(p.to_vec());
        self.labels.push(Some(label));
        let ids: Vec<usize> = fresh.iter().map(|_| self.alloc_slot()).collect();
        for &((f, j), (g, slot)) in &links {
            fresh[f].simplex.neighbors[j] = ids[g];
            fresh[g].simplex.neighbors[slot] = ids[f];
        }
        for (fr, &id) in fresh.into_iter().zip(&ids) {
            self.simplices[fr.outer].neighbors[fr.outer_slot] = id;
            self.simplices[id] = fr.simplex;
        }
        for &i in &visible {
            self.simplices[i].alive = false;
            self.free.push(i);
        }
        Ok(Insertion::Added)
    }

    fn alloc_slot(&mut self) -> usize {
        if let Some(i) = self.free.pop() {
            return i;
        }
        self.simplices.push(Simplex {
            verts: Vec::new(),
            neighbors: Vec::new(),
            normal: Vec::new(),
            alive: false,
        });
        self.mark.push(0);
        self.simplices.len() - 1
    }

    /// True when no seed corner survives on the boundary.
    pub fn seed_is_interior(&self) -> bool {
        self.simplices
            .iter()
            .filter(|s| s.alive)
            .all(|s| s.verts.iter().all(|&v| self.labels[v].is_some()))
    }

    pub fn finish(self) -> Result<ExtractedHull> {
        if !self.seed_is_interior() {
            return Err(Error::Degeneracy(
                "origin is not strictly inside the convex hull".into(),
            ));
        }
        let n = self.n;
        let alive: Vec<usize> = (0..self.simplices.len()).filter(|&i| self.simplices[i].alive).collect();

        // Union coplanar neighbours into facets.
        let mut parent: Vec<usize> = (0..self.simplices.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &i in &alive {
            for &j in &self.simplices[i].neighbors {
                if j > i {
                    let (a, b) = (&self.simplices[i].normal, &self.simplices[j].normal);
                    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
                    let scale = dot(a, a).sqrt().max(1.0);
                    if diff <= MERGE_TOL * scale {
                        let (ra, rb) = (find(&mut parent, i), find(&mut parent, j));
                        if ra != rb {
                            parent[ra.max(rb)] = ra.min(rb);
                        }
                    }
                }
            }
        }
        let mut group_of_root: HashMap<usize, usize> = HashMap::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &i in &alive {
            let r = find(&mut parent, i);
            let g = *group_of_root.entry(r).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[g].push(i);
        }
        let facets: Vec<Vec<f64>> = groups
            .iter()
            .map(|g| self.simplices[*g.iter().min().unwrap()].normal.clone())
            .collect();

        // A boundary point is a vertex iff the facets through it span ℝⁿ.
        let mut point_groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for (g, members) in groups.iter().enumerate() {
            for &s in members {
                for &v in &self.simplices[s].verts {
                    let list = point_groups.entry(v).or_default();
                    if !list.contains(&g) {
                        list.push(g);
                    }
                }
            }
        }
        let mut candidates: Vec<usize> = point_groups.keys().copied().collect();
        candidates.sort_by_key(|&v| self.labels[v]);
        let mut out_index: HashMap<usize, usize> = HashMap::new();
        let mut vertices = Vec::new();
        for v in candidates {
            let gs = &point_groups[&v];
            let units: Vec<Vec<f64>> = gs
                .iter()
                .map(|&g| {
                    let len = dot(&facets[g], &facets[g]).sqrt();
                    facets[g].iter().map(|x| x / len).collect()
                })
                .collect();
            let normals: Vec<&[f64]> = units.iter().map(Vec::as_slice).collect();
            if gs.len() >= n && rank(&normals, RANK_TOL) >= n {
                out_index.insert(v, vertices.len());
                vertices.push((self.labels[v].expect("seed corners were checked"), self.points[v].clone()));
            }
        }
        let incidence = groups
            .iter()
            .map(|members| {
                let mut inc: Vec<usize> = members
                    .iter()
                    .flat_map(|&s| self.simplices[s].verts.iter())
                    .filter_map(|v| out_index.get(v).copied())
                    .collect();
                inc.sort_unstable();
                inc.dedup();
                inc
            })
            .collect::<Vec<Vec<usize>>>();
        if vertices.len() <= n || facets.len() <= n || incidence.iter().any(|inc| inc.len() < n) {
            return Err(Error::Degeneracy("hull lost full dimension (ill-conditioned input)".into()));
        }
        Ok(ExtractedHull { vertices, facets, incidence })
    }
}
