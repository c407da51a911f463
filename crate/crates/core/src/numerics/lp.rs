//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Problems here are tiny (gauge oracles and cutting-plane subproblems), so
//! the solver keeps a full tableau and favours termination guarantees over
//! speed.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `minimize objective·x` subject to `constraints`, with `x_j >= lower_bounds[j]`
/// when a bound is present and `x_j` free otherwise.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower_bounds: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, point: Vec<f64> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }
}

impl LinearProgram {
    /// All variables free.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            constraints: Vec::new(),
            lower_bounds: vec![None; n],
        }
    }

    /// All variables nonnegative.
    pub fn nonnegative(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            constraints: Vec::new(),
            lower_bounds: vec![Some(0.0); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn lower_bound(mut self, var: usize, bound: f64) -> Self {
        self.lower_bounds[var] = Some(bound);
        self
    }

    pub fn push(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn le(mut self, coeffs: Vec<f64>, rhs: f64) -> Self {
        self.push(coeffs, Relation::Le, rhs);
        self
    }

    pub fn ge(mut self, coeffs: Vec<f64>, rhs: f64) -> Self {
        self.push(coeffs, Relation::Ge, rhs);
        self
    }

    pub fn eq(mut self, coeffs: Vec<f64>, rhs: f64) -> Self {
        self.push(coeffs, Relation::Eq, rhs);
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        Error::check_dim(n, self.lower_bounds.len())?;
        for c in &self.constraints {
            Error::check_dim(n, c.coeffs.len())?;
            if !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()) {
                return Err(Error::arg("LP data must be finite"));
            }
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::arg("LP objective must be finite"));
        }
        Ok(())
    }
}

/// Column bookkeeping of the standard-form transformation.
enum VarMap {
    Shifted { col: usize, shift: f64 },
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.width]
    }

    fn pivot(&mut self, obj: &mut [f64], r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        let f = obj[c];
        if f != 0.0 {
            for (v, pv) in obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            obj[c] = 0.0;
        }
        // Rounding can leave basic values marginally negative; the ratio test
        // treats them as zero, so the tableau must agree.
        let w = self.width;
        for row in self.rows.iter_mut() {
            if row[w] < 0.0 {
                row[w] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Runs Bland-rule pivots on `obj` (reduced costs, last entry = -value)
    /// over columns `< eligible`. Returns false when unbounded.
    fn optimize(&mut self, obj: &mut [f64], eligible: usize, pivots: &mut usize) -> Result<bool> {
        loop {
            let Some(enter) = (0..eligible).find(|&j| obj[j] < -COST_TOL) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][enter];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r).max(0.0) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            let tie = (ratio - bratio).abs() <= 1e-12 * (1.0 + bratio.abs());
                            if ratio < bratio && !tie || tie && self.basis[r] < self.basis[br] {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };
            self.pivot(obj, r, enter);
            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return Err(Error::numerical("simplex pivot limit exceeded"));
            }
        }
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let n = lp.num_vars();

    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0;
    for lb in &lp.lower_bounds {
        match lb {
            Some(shift) => {
                maps.push(VarMap::Shifted { col: ncols, shift: *shift });
                ncols += 1;
            }
            None => {
                maps.push(VarMap::Split { pos: ncols, neg: ncols + 1 });
                ncols += 2;
            }
        }
    }
    let structural = ncols;
    let slack_count = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
    let m = lp.constraints.len();
    let width = structural + slack_count + m;
    let art0 = structural + slack_count;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut slack = structural;
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut row = vec![0.0; width + 1];
        let mut rhs = c.rhs;
        for (j, map) in maps.iter().enumerate() {
            let a = c.coeffs[j];
            match *map {
                VarMap::Shifted { col, shift } => {
                    row[col] = a;
                    rhs -= a * shift;
                }
                VarMap::Split { pos, neg } => {
                    row[pos] = a;
                    row[neg] = -a;
                }
            }
        }
        let slack_col = match c.relation {
            Relation::Le => {
                row[slack] = 1.0;
                slack += 1;
                Some(slack - 1)
            }
            Relation::Ge => {
                row[slack] = -1.0;
                slack += 1;
                Some(slack - 1)
            }
            Relation::Eq => None,
        };
        if rhs < 0.0 {
            row.iter_mut().for_each(|v| *v = -*v);
            rhs = -rhs;
        }
        row[width] = rhs;
        match slack_col {
            Some(s) if row[s] > 0.0 => basis.push(s),
            _ => {
                row[art0 + i] = 1.0;
                basis.push(art0 + i);
            }
        }
        rows.push(row);
    }
    let original = rows.clone();
    let mut t = Tableau { rows, basis, width };
    let mut pivots = 0;

    // Phase 1: minimize the sum of basic artificials.
    let mut obj = vec![0.0; width + 1];
    for r in 0..m {
        if t.basis[r] >= art0 {
            obj[t.basis[r]] = 1.0;
        }
    }
    for r in 0..m {
        if t.basis[r] >= art0 {
            let row = t.rows[r].clone();
            for (o, v) in obj.iter_mut().zip(&row) {
                *o -= v;
            }
        }
    }
    t.optimize(&mut obj, width, &mut pivots)?;
    let scale = 1.0 + lp.constraints.iter().fold(0.0_f64, |s, c| s.max(c.rhs.abs()));
    if -obj[width] > FEAS_TOL * scale {
        return Ok(LpOutcome::Infeasible);
    }

    // Drive zero-level artificials out of the basis; drop redundant rows.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= art0 {
            let col = (0..art0)
                .filter(|&j| t.rows[r][j].abs() > 1e-9)
                .max_by(|&a, &b| t.rows[r][a].abs().total_cmp(&t.rows[r][b].abs()));
            match col {
                Some(j) => {
                    t.pivot(&mut obj, r, j);
                    r += 1;
                }
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                }
            }
        } else {
            r += 1;
        }
    }

    // Phase 2 over structural and slack columns only.
    let mut obj = vec![0.0; width + 1];
    for (j, map) in maps.iter().enumerate() {
        match *map {
            VarMap::Shifted { col, .. } => obj[col] = lp.objective[j],
            VarMap::Split { pos, neg } => {
                obj[pos] = lp.objective[j];
                obj[neg] = -lp.objective[j];
            }
        }
    }
    for r in 0..t.rows.len() {
        let cb = obj[t.basis[r]];
        if cb != 0.0 {
            let row = t.rows[r].clone();
            for (o, v) in obj.iter_mut().zip(&row) {
                *o -= cb * v;
            }
        }
    }
    if !t.optimize(&mut obj, art0, &mut pivots)? {
        return Ok(LpOutcome::Unbounded);
    }

    let to_point = |cols: &[f64]| -> Vec<f64> {
        maps.iter()
            .map(|map| match *map {
                VarMap::Shifted { col, shift } => cols[col] + shift,
                VarMap::Split { pos, neg } => cols[pos] - cols[neg],
            })
            .collect()
    };
    let mut cols = vec![0.0; width];
    for (r, &b) in t.basis.iter().enumerate() {
        cols[b] = t.rhs(r).max(0.0);
    }
    let mut point = to_point(&cols);
    if check_feasible(lp, &point).is_err() {
        let refined = resolve_basis(&original, &t.basis, width)
            .map(|c| to_point(&c))
            .ok_or_else(|| Error::numerical("simplex basis is singular"))?;
        check_feasible(lp, &refined)?;
        point = refined;
    }
    let value = lp.objective.iter().zip(&point).map(|(c, x)| c * x).sum();
    Ok(LpOutcome::Optimal { value, point })
}

/// Recomputes basic values from the untouched constraint rows.
fn resolve_basis(original: &[Vec<f64>], basis: &[usize], width: usize) -> Option<Vec<f64>> {
    let b = nalgebra::DMatrix::from_fn(original.len(), basis.len(), |i, j| original[i][basis[j]]);
    let rhs = nalgebra::DVector::from_fn(original.len(), |i, _| original[i][width]);
    let x = b.svd(true, true).solve(&rhs, 1e-14).ok()?;
    let mut cols = vec![0.0; width];
    for (j, &c) in basis.iter().enumerate() {
        cols[c] = x[j].max(0.0);
    }
    Some(cols)
}

fn check_feasible(lp: &LinearProgram, x: &[f64]) -> Result<()> {
    for c in &lp.constraints {
        let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        let mag: f64 = c.coeffs.iter().zip(x).map(|(a, v)| (a * v).abs()).sum();
        let tol = FEAS_TOL * (1.0 + mag.max(c.rhs.abs()));
        let ok = match c.relation {
            Relation::Le => lhs <= c.rhs + tol,
            Relation::Ge => lhs >= c.rhs - tol,
            Relation::Eq => (lhs - c.rhs).abs() <= tol,
        };
        if !ok {
            return Err(Error::numerical(format!(
                "simplex returned a point violating a constraint by {:e}",
                (lhs - c.rhs).abs()
            )));
        }
    }
    for (xj, lb) in x.iter().zip(&lp.lower_bounds) {
        if let Some(l) = lb {
            if *xj < l - FEAS_TOL * (1.0 + l.abs()) {
                return Err(Error::numerical("simplex returned a point below a variable bound"));
            }
        }
    }
    Ok(())
}
