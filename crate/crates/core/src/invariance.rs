//! Set iterations for invariant polytopes.
//!
//! The model-based iteration grows `R_{k+1} = conv(R_k ∪ ⋃_σ A_σ 𝒱(R_k))`
//! from the true matrices. The data-driven iteration sees only sample pairs
//! `(x, y)`: at step `k` it rescales every successor by the current gauge of
//! its state, `Ω_k = {y/‖x‖_k} ∪ {−y/‖−x‖_k}`, stops once `Ω_k ⊆ (1+ε)R̃_k`
//! and otherwise hulls `Ω_k` in.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::geometry::{Polytope, VertexTag};
use crate::system::{SamplePair, SampleSet, SwitchedLinearSystem};

#[derive(Clone, Debug, PartialEq)]
pub struct IterationConfig {
    /// Stopping slack `ε`: converged when every new point has gauge `<= 1 + ε`.
    pub tolerance: f64,
    /// Maximum number of hull updates.
    pub max_iterations: usize,
    /// Keep every iterate in the trace.
    pub record_iterates: bool,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 200,
            record_iterates: false,
        }
    }
}

impl IterationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::arg(format!("tolerance {} must be positive", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::arg("max_iterations must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIterations,
    Degeneracy,
}

/// State of one stopping check: iterate `k`'s size and the largest gauge of
/// the points proposed against it.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub vertices: usize,
    pub facets: usize,
    pub max_gauge: f64,
    pub ms: f64,
}

#[derive(Clone, Debug)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
    /// `R_0, R_1, …` when [`IterationConfig::record_iterates`] is set.
    pub iterates: Vec<Polytope>,
}

impl IterationTrace {
    /// Index of the final stopping check, i.e. the number of hull updates.
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.k)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,vertices,facets,max_gauge,ms\n");
        for r in &self.records {
            let _ = writeln!(out, "{},{},{},{},{:.3}", r.k, r.vertices, r.facets, r.max_gauge, r.ms);
        }
        out
    }
}

/// Result of a data-driven run plus the bookkeeping needed to detect
/// supporting samples.
#[derive(Clone, Debug)]
pub struct DataDrivenRun {
    pub set: Polytope,
    pub trace: IterationTrace,
    /// Pairs whose removal might change the result: every pair that created a
    /// vertex of some iterate, and every pair that was the only violator at a
    /// stopping check that failed.
    pub candidates: BTreeSet<usize>,
}

fn degeneracy(trace: &mut IterationTrace, e: Error) -> Error {
    if matches!(e, Error::Degeneracy(_)) {
        trace.termination = Termination::Degeneracy;
    }
    e
}

/// Known-matrix iteration from `initial` until the set maps into `(1+ε)` itself.
pub fn model_based_invariant_set(
    sys: &SwitchedLinearSystem,
    initial: &Polytope,
    cfg: &IterationConfig,
) -> Result<(Polytope, IterationTrace)> {
    cfg.validate()?;
    Error::check_dim(initial.dim(), sys.dim())?;
    let mut trace = IterationTrace {
        records: Vec::new(),
        termination: Termination::MaxIterations,
        iterates: Vec::new(),
    };
    let mut current = initial.clone();
    for k in 0..=cfg.max_iterations {
        let start = Instant::now();
        if cfg.record_iterates {
            trace.iterates.push(current.clone());
        }
        let mapped: Vec<Vec<f64>> = sys
            .matrices()
            .iter()
            .flat_map(|a| current.vertices().iter().map(move |v| a.mul_vec(v)))
            .collect();
        let max_gauge = mapped.iter().map(|p| current.gauge(p)).fold(0.0, f64::max);
        let mut record = IterationRecord {
            k,
            vertices: current.vertices().len(),
            facets: current.facets().len(),
            max_gauge,
            ms: 0.0,
        };
        if max_gauge <= 1.0 + cfg.tolerance {
            record.ms = start.elapsed().as_secs_f64() * 1e3;
            trace.records.push(record);
            trace.termination = Termination::Converged;
            return Ok((current, trace));
        }
        if k == cfg.max_iterations {
            record.ms = start.elapsed().as_secs_f64() * 1e3;
            trace.records.push(record);
            break;
        }
        let tags = vec![VertexTag::Mapped; mapped.len()];
        current = current
            .convex_hull_add_tagged(&mapped, &tags)
            .map_err(|e| degeneracy(&mut trace, e))?;
        record.ms = start.elapsed().as_secs_f64() * 1e3;
        trace.records.push(record);
    }
    Err(Error::Nonconvergence {
        iterations: cfg.max_iterations,
        trace: Box::new(trace),
    })
}

/// Sample-only iteration (the black-box algorithm).
pub fn data_driven_invariant_set(
    samples: &SampleSet,
    initial: &Polytope,
    cfg: &IterationConfig,
) -> Result<(Polytope, IterationTrace)> {
    let run = data_driven_run(samples, initial, cfg)?;
    Ok((run.set, run.trace))
}

pub fn data_driven_run(samples: &SampleSet, initial: &Polytope, cfg: &IterationConfig) -> Result<DataDrivenRun> {
    run_on_pairs(samples.pairs(), None, initial, cfg)
}

/// The data-driven run on all pairs except `skip`.
pub fn data_driven_run_without(
    samples: &SampleSet,
    skip: usize,
    initial: &Polytope,
    cfg: &IterationConfig,
) -> Result<DataDrivenRun> {
    if skip >= samples.len() {
        return Err(Error::arg(format!("pair {skip} out of range")));
    }
    run_on_pairs(samples.pairs(), Some(skip), initial, cfg)
}

fn run_on_pairs(
    pairs: &[SamplePair],
    skip: Option<usize>,
    initial: &Polytope,
    cfg: &IterationConfig,
) -> Result<DataDrivenRun> {
    cfg.validate()?;
    let n = initial.dim();
    for p in pairs {
        Error::check_dim(n, p.x.len())?;
    }
    let active: Vec<usize> = (0..pairs.len()).filter(|&i| Some(i) != skip).collect();
    let mut trace = IterationTrace {
        records: Vec::new(),
        termination: Termination::MaxIterations,
        iterates: Vec::new(),
    };
    let mut candidates = BTreeSet::new();
    let mut current = initial.clone();
    let mut points = Vec::with_capacity(2 * active.len());
    let mut tags = Vec::with_capacity(2 * active.len());
    for k in 0..=cfg.max_iterations {
        let start = Instant::now();
        if cfg.record_iterates {
            trace.iterates.push(current.clone());
        }
        points.clear();
        tags.clear();
        let mut max_gauge: f64 = 0.0;
        let mut violators = Vec::new();
        for &i in &active {
            let SamplePair { x, y, .. } = &pairs[i];
            let neg_x: Vec<f64> = x.iter().map(|v| -v).collect();
            let gp = current.gauge(x);
            let gn = current.gauge(&neg_x);
            let plus: Vec<f64> = y.iter().map(|v| v / gp).collect();
            let minus: Vec<f64> = y.iter().map(|v| -v / gn).collect();
            let worst = current.gauge(&plus).max(current.gauge(&minus));
            if worst > 1.0 + cfg.tolerance {
                violators.push(i);
            }
            max_gauge = max_gauge.max(worst);
            points.push(plus);
            tags.push(VertexTag::Sample { pair: i, negated: false });
            points.push(minus);
            tags.push(VertexTag::Sample { pair: i, negated: true });
        }
        let mut record = IterationRecord {
            k,
            vertices: current.vertices().len(),
            facets: current.facets().len(),
            max_gauge,
            ms: 0.0,
        };
        if violators.is_empty() {
            record.ms = start.elapsed().as_secs_f64() * 1e3;
            trace.records.push(record);
            trace.termination = Termination::Converged;
            return Ok(DataDrivenRun {
                set: current,
                trace,
                candidates,
            });
        }
        if violators.len() == 1 {
            candidates.insert(violators[0]);
        }
        if k == cfg.max_iterations {
            record.ms = start.elapsed().as_secs_f64() * 1e3;
            trace.records.push(record);
            break;
        }
        current = current
            .convex_hull_add_tagged(&points, &tags)
            .map_err(|e| degeneracy(&mut trace, e))?;
        candidates.extend(current.tags().iter().filter_map(|t| match t {
            VertexTag::Sample { pair, .. } => Some(*pair),
            _ => None,
        }));
        record.ms = start.elapsed().as_secs_f64() * 1e3;
        trace.records.push(record);
    }
    Err(Error::Nonconvergence {
        iterations: cfg.max_iterations,
        trace: Box::new(trace),
    })
}

/// `max_i ‖yᵢ‖_S / ‖xᵢ‖_S − 1`, clamped at zero.
pub fn feasibility_residual(set: &Polytope, samples: &SampleSet) -> Result<f64> {
    Error::check_dim(set.dim(), samples.dim())?;
    let mut worst: f64 = 0.0;
    for p in samples.pairs() {
        let gx = set.gauge(&p.x);
        if gx == 0.0 {
            return Err(Error::arg("sample state at the origin"));
        }
        worst = worst.max(set.gauge(&p.y) / gx - 1.0);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{DenseMatrix, RandomSource};
    use crate::system::{generate_stable_system, sample_observations};

    fn scaled_identity(n: usize, s: f64) -> SwitchedLinearSystem {
        SwitchedLinearSystem::new(vec![DenseMatrix::identity(n).scaled(s)]).unwrap()
    }

    fn square() -> Polytope {
        Polytope::unit_box(2).unwrap()
    }

    #[test]
    fn contracting_identity_keeps_initial_set() {
        let sys = scaled_identity(2, 0.5);
        let (r, trace) = model_based_invariant_set(&sys, &square(), &IterationConfig::default()).unwrap();
        assert!(r.same_vertices(&square(), 0.0));
        assert_eq!(trace.iterations(), 0);
        assert_eq!(trace.termination, Termination::Converged);

        let samples = sample_observations(&sys, 100, &mut RandomSource::new(1)).unwrap();
        let run = data_driven_run(&samples, &square(), &IterationConfig::default()).unwrap();
        assert!(run.set.same_vertices(&square(), 0.0));
        assert_eq!(run.trace.records.len(), 1);
        assert!(run.candidates.is_empty());
    }

    #[test]
    fn rotation_keeps_square() {
        let rot = DenseMatrix::from_row_major(2, 2, &[0.0, -0.9, 0.9, 0.0]).unwrap();
        let sys = SwitchedLinearSystem::new(vec![rot]).unwrap();
        let (r, _) = model_based_invariant_set(&sys, &square(), &IterationConfig::default()).unwrap();
        assert!(r.same_vertices(&square(), 0.0));
    }

    #[test]
    fn model_based_result_is_invariant() {
        let sys = generate_stable_system(2, 4, 0.95, &mut RandomSource::new(3)).unwrap();
        let cfg = IterationConfig::default();
        let (r, trace) = model_based_invariant_set(&sys, &square(), &cfg).unwrap();
        assert!(trace.iterations() > 0);
        let residual = sys
            .matrices()
            .iter()
            .flat_map(|a| r.vertices().iter().map(|v| r.gauge(&a.mul_vec(v))))
            .fold(0.0, f64::max)
            - 1.0;
        assert!(residual <= cfg.tolerance);
    }

    #[test]
    fn data_driven_sandwich_and_feasibility() {
        let sys = generate_stable_system(2, 3, 0.9, &mut RandomSource::new(8)).unwrap();
        let samples = sample_observations(&sys, 300, &mut RandomSource::new(9)).unwrap();
        let cfg = IterationConfig {
            record_iterates: true,
            ..Default::default()
        };
        let (model, mtrace) = model_based_invariant_set(&sys, &square(), &cfg).unwrap();
        let run = data_driven_run(&samples, &square(), &cfg).unwrap();
        assert!(feasibility_residual(&run.set, &samples).unwrap() <= cfg.tolerance);
        assert!(run.set.is_symmetric(1e-12));
        for (k, tilde) in run.trace.iterates.iter().enumerate() {
            let outer = mtrace.iterates.get(k).unwrap_or(&model);
            assert!(outer.contains_scaled(tilde.vertices(), 1.0 + 1e-9), "k = {k}");
            if k > 0 {
                let prev = &run.trace.iterates[k - 1];
                assert!(tilde.contains_scaled(prev.vertices(), 1.0 + 1e-9));
            }
        }
        let csv = run.trace.to_csv();
        assert!(csv.starts_with("k,vertices,facets,max_gauge,ms\n"));
        assert_eq!(csv.lines().count(), run.trace.records.len() + 1);
    }

    #[test]
    fn max_iterations_reports_nonconvergence() {
        let sys = generate_stable_system(2, 4, 0.99, &mut RandomSource::new(3)).unwrap();
        let samples = sample_observations(&sys, 200, &mut RandomSource::new(4)).unwrap();
        let cfg = IterationConfig {
            max_iterations: 1,
            ..Default::default()
        };
        match data_driven_invariant_set(&samples, &square(), &cfg) {
            Err(Error::Nonconvergence { iterations, trace }) => {
                assert_eq!(iterations, 1);
                assert_eq!(trace.records.len(), 2);
                assert_eq!(trace.termination, Termination::MaxIterations);
            }
            other => panic!("expected nonconvergence, got {other:?}"),
        }
    }

    #[test]
    fn feasibility_residual_examples() {
        let mk = |y: Vec<f64>| {
            SampleSet::new(2, 1, 0, vec![SamplePair { x: vec![1.0, 0.0], sigma: 1, y }]).unwrap()
        };
        assert_eq!(feasibility_residual(&square(), &mk(vec![2.0, 0.0])).unwrap(), 1.0);
        assert_eq!(feasibility_residual(&square(), &mk(vec![0.3, 0.3])).unwrap(), 0.0);
    }

    #[test]
    fn config_validation() {
        let bad = IterationConfig {
            tolerance: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = IterationConfig {
            max_iterations: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
