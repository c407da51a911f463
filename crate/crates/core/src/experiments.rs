//! Benchmark drivers shared by the command-line tool and the test suites:
//! the per-`(n, M)` comparison of sample-based and model-based sets, and the
//! contraction-rate curves of both certificates against the sample count.

use std::time::Instant;

use crate::certify::{contraction_certificate, scenario_certificate, solve_epsilon_for_confidence, solve_samples_for_confidence};
use crate::error::{Error, Result};
use crate::geometry::{inclusion_ratio, Polytope};
use crate::invariance::{data_driven_invariant_set, model_based_invariant_set, IterationConfig};
use crate::numerics::{child_seed, RandomSource};
use crate::system::{generate_stable_system, sample_observations, SampleSet, SwitchedLinearSystem};

/// Stream indices used to derive child seeds from an experiment seed.
const SYSTEM_STREAM: u64 = 0;
const SAMPLE_STREAM: u64 = 1;

/// Violation levels of the default curve grid, from about 10³ to 1.2·10⁴
/// samples at `(n, M) = (3, 4)`.
pub const DEFAULT_EPSILON_GRID: [f64; 8] = [0.05, 0.04, 0.03, 0.02, 0.015, 0.01, 0.0075, 0.005];

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub n: usize,
    pub modes: usize,
    pub samples: usize,
    pub decay: f64,
    pub seed: u64,
    pub iteration: IterationConfig,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub modes: usize,
    /// Hull updates of the sample-based iteration.
    pub k_tilde: usize,
    pub v_tilde: usize,
    /// Hull updates of the model-based iteration.
    pub k_star: usize,
    pub v_star: usize,
    /// Largest `λ` with `λ·R∞ ⊆ R̃∞`.
    pub lambda_star: f64,
    pub ms: f64,
}

/// Seed of the benchmark row `(n, modes)` under a table seed.
pub fn row_seed(seed: u64, n: usize, modes: usize) -> u64 {
    child_seed(child_seed(seed, n as u64), modes as u64)
}

/// System and samples of an experiment, drawn from independent child streams.
pub fn experiment_data(
    n: usize,
    modes: usize,
    samples: usize,
    decay: f64,
    seed: u64,
) -> Result<(SwitchedLinearSystem, SampleSet)> {
    let root = RandomSource::new(seed);
    let sys = generate_stable_system(n, modes, decay, &mut root.fork(SYSTEM_STREAM))?;
    let set = sample_observations(&sys, samples, &mut root.fork(SAMPLE_STREAM))?;
    Ok((sys, set))
}

pub fn bench_row(cfg: &BenchConfig) -> Result<BenchRow> {
    let start = Instant::now();
    let (sys, samples) = experiment_data(cfg.n, cfg.modes, cfg.samples, cfg.decay, cfg.seed)?;
    let initial = Polytope::unit_box(cfg.n)?;
    let (model, mtrace) = model_based_invariant_set(&sys, &initial, &cfg.iteration)?;
    let (data, dtrace) = data_driven_invariant_set(&samples, &initial, &cfg.iteration)?;
    Ok(BenchRow {
        n: cfg.n,
        modes: cfg.modes,
        k_tilde: dtrace.iterations(),
        v_tilde: data.vertices().len(),
        k_star: mtrace.iterations(),
        v_star: model.vertices().len(),
        lambda_star: inclusion_ratio(&data, &model)?,
        ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Grid {
    /// Violation levels; each is turned into the sample count that makes the
    /// a-priori bound equal the confidence target.
    Epsilon(Vec<f64>),
    /// Sample counts; the a-priori level is solved from each.
    Samples(Vec<u64>),
}

#[derive(Clone, Debug)]
pub struct CurveConfig {
    pub n: usize,
    pub modes: usize,
    pub beta: f64,
    pub decay: f64,
    pub seed: u64,
    pub grid: Grid,
    pub iteration: IterationConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Curve {
    /// Rate from the a-priori contraction certificate.
    Contraction,
    /// Rate from the supporting-sample certificate.
    Scenario,
}

impl Curve {
    pub fn label(self) -> &'static str {
        match self {
            Curve::Contraction => "lambda_B",
            Curve::Scenario => "lambda_eps",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub curve: Curve,
    pub samples: u64,
    /// `None` when the certificate is vacuous or inconclusive.
    pub value: Option<f64>,
}

/// Both contraction-rate curves over the grid, sharing one system and nested
/// sample prefixes. Points are ordered by curve, then by sample count.
pub fn bound_curves(cfg: &CurveConfig) -> Result<Vec<CurvePoint>> {
    let mut plan: Vec<(u64, Option<f64>)> = match &cfg.grid {
        Grid::Epsilon(eps) => eps
            .iter()
            .map(|&e| Ok((solve_samples_for_confidence(e, cfg.beta, cfg.modes, cfg.n)?, Some(e))))
            .collect::<Result<_>>()?,
        Grid::Samples(ns) => ns
            .iter()
            .map(|&count| Ok((count, solve_epsilon_for_confidence(count, cfg.beta, cfg.modes, cfg.n)?)))
            .collect::<Result<_>>()?,
    };
    if plan.is_empty() {
        return Err(Error::arg("empty grid"));
    }
    if plan.iter().any(|&(count, _)| count == 0) {
        return Err(Error::arg("sample counts must be positive"));
    }
    plan.sort_by_key(|&(count, _)| count);
    let largest = plan.last().unwrap().0;
    let largest = usize::try_from(largest).map_err(|_| Error::arg("sample count too large"))?;
    let (_, all) = experiment_data(cfg.n, cfg.modes, largest, cfg.decay, cfg.seed)?;
    let initial = Polytope::unit_box(cfg.n)?;

    let mut contraction = Vec::with_capacity(plan.len());
    let mut scenario = Vec::with_capacity(plan.len());
    for &(count, epsilon) in &plan {
        let prefix = all.truncated(count as usize)?;
        let cert = scenario_certificate(&prefix, &initial, &cfg.iteration, cfg.beta)?;
        let lambda_b = match epsilon {
            Some(e) => contraction_certificate(&cert.set, e, count, cfg.modes)?.lambda(),
            None => None,
        };
        contraction.push(CurvePoint {
            curve: Curve::Contraction,
            samples: count,
            value: lambda_b,
        });
        scenario.push(CurvePoint {
            curve: Curve::Scenario,
            samples: count,
            value: cert.lambda_epsilon(),
        });
    }
    contraction.extend(scenario);
    Ok(contraction)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bench_row_is_deterministic() {
        let cfg = BenchConfig {
            n: 2,
            modes: 3,
            samples: 500,
            decay: 0.95,
            seed: 4,
            iteration: IterationConfig::default(),
        };
        let a = bench_row(&cfg).unwrap();
        let b = bench_row(&cfg).unwrap();
        assert_eq!((a.k_tilde, a.v_tilde, a.lambda_star), (b.k_tilde, b.v_tilde, b.lambda_star));
        assert!(a.lambda_star > 0.0 && a.lambda_star <= 1.0 + 1e-9);
    }

    #[test]
    fn curves_cover_the_grid() {
        let cfg = CurveConfig {
            n: 2,
            modes: 2,
            beta: 1e-3,
            decay: 0.95,
            seed: 1,
            grid: Grid::Samples(vec![400, 200]),
            iteration: IterationConfig::default(),
        };
        let pts = bound_curves(&cfg).unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[0].curve, Curve::Contraction);
        assert_eq!((pts[0].samples, pts[1].samples), (200, 400));
        assert_eq!(pts[2].curve, Curve::Scenario);
        let empty = CurveConfig {
            grid: Grid::Epsilon(vec![]),
            ..cfg
        };
        assert!(bound_curves(&empty).is_err());
    }
}
