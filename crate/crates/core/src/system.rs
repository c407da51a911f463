//! Switched linear systems `x(t+1) = A_σ(t) x(t)`, the sampling oracle that
//! produces `(x, σ, A_σ x)` observations, and the JSON file formats.
//!
//! Mode indices are 1-based everywhere (`σ ∈ 1..=M`), matching the files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{MAX_DIM, MIN_DIM};
use crate::numerics::{norm, sample_unit_sphere, DenseMatrix, RandomSource};

pub const MAX_MODES: usize = 16;

/// Product length used by the generator's stability certificate.
pub const CERTIFICATE_PRODUCT_LENGTH: u32 = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct SwitchedLinearSystem {
    n: usize,
    matrices: Vec<DenseMatrix>,
}

#[derive(Serialize, Deserialize)]
struct SystemFile {
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    modes: Vec<Vec<f64>>,
}

impl SwitchedLinearSystem {
    pub fn new(matrices: Vec<DenseMatrix>) -> Result<Self> {
        let first = matrices
            .first()
            .ok_or_else(|| Error::Validation("a system needs at least one mode".into()))?;
        let n = first.rows();
        for (i, a) in matrices.iter().enumerate() {
            if a.rows() != n || a.cols() != n {
                return Err(Error::Validation(format!(
                    "mode {} is {}x{}, expected {n}x{n}",
                    i + 1,
                    a.rows(),
                    a.cols()
                )));
            }
        }
        Ok(Self { n, matrices })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mode_count(&self) -> usize {
        self.matrices.len()
    }

    /// Ground-truth matrices. Only validation code and the model-based
    /// oracle should look at these.
    pub fn matrices(&self) -> &[DenseMatrix] {
        &self.matrices
    }

    /// `A_σ` for 1-based `sigma`.
    pub fn mode(&self, sigma: usize) -> Result<&DenseMatrix> {
        if sigma == 0 || sigma > self.matrices.len() {
            return Err(Error::arg(format!("mode {sigma} outside 1..={}", self.matrices.len())));
        }
        Ok(&self.matrices[sigma - 1])
    }

    pub fn apply(&self, sigma: usize, x: &[f64]) -> Result<Vec<f64>> {
        Error::check_dim(self.n, x.len())?;
        Ok(self.mode(sigma)?.mul_vec(x))
    }

    /// States `x(0), …, x(k)` under the mode sequence `modes`.
    pub fn trajectory(&self, x0: &[f64], modes: &[usize]) -> Result<Vec<Vec<f64>>> {
        Error::check_dim(self.n, x0.len())?;
        let mut states = vec![x0.to_vec()];
        for &sigma in modes {
            let next = self.apply(sigma, states.last().unwrap())?;
            states.push(next);
        }
        Ok(states)
    }

    /// `max ‖A_{σ_L} ⋯ A_{σ_1}‖₂^{1/L}` over all `M^L` products of length `len`;
    /// an upper bound on the joint spectral radius.
    pub fn product_norm_bound(&self, len: u32) -> f64 {
        let mut products: Vec<DenseMatrix> = vec![DenseMatrix::identity(self.n)];
        for _ in 0..len {
            products = products
                .iter()
                .flat_map(|p| self.matrices.iter().map(move |a| a.matmul(p).expect("square modes")))
                .collect();
        }
        let worst = products.iter().map(DenseMatrix::spectral_norm).fold(0.0, f64::max);
        worst.powf(1.0 / len as f64)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SystemFile {
            n: self.n,
            m: self.matrices.len(),
            modes: self.matrices.iter().map(DenseMatrix::to_row_major).collect(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SystemFile = serde_json::from_str(text)?;
        if file.m == 0 || file.modes.is_empty() {
            return Err(Error::Validation("M must be at least 1".into()));
        }
        if file.m != file.modes.len() {
            return Err(Error::Validation(format!("M = {} but {} modes given", file.m, file.modes.len())));
        }
        if file.n == 0 {
            return Err(Error::Validation("n must be positive".into()));
        }
        let mut matrices = Vec::with_capacity(file.m);
        for (i, entries) in file.modes.iter().enumerate() {
            if entries.len() != file.n * file.n {
                return Err(Error::Validation(format!(
                    "mode {} has {} entries, expected {}",
                    i + 1,
                    entries.len(),
                    file.n * file.n
                )));
            }
            matrices.push(
                DenseMatrix::from_row_major(file.n, file.n, entries)
                    .map_err(|e| Error::Validation(e.to_string()))?,
            );
        }
        Self::new(matrices)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Random system whose joint spectral radius is at most `decay`.
///
/// Entries are standard Gaussian; every matrix is then scaled by `decay / c`
/// with `c` the length-3 product-norm bound, so all length-3 products have
/// spectral norm at most `decay³`.
pub fn generate_stable_system(
    n: usize,
    modes: usize,
    decay: f64,
    rng: &mut RandomSource,
) -> Result<SwitchedLinearSystem> {
    if !(MIN_DIM..=MAX_DIM).contains(&n) {
        return Err(Error::arg(format!("n = {n} outside {MIN_DIM}..={MAX_DIM}")));
    }
    if !(1..=MAX_MODES).contains(&modes) {
        return Err(Error::arg(format!("M = {modes} outside 1..={MAX_MODES}")));
    }
    if !(decay > 0.0 && decay < 1.0) {
        return Err(Error::arg(format!("decay {decay} outside (0, 1)")));
    }
    let raw: Vec<DenseMatrix> = (0..modes)
        .map(|_| {
            let entries: Vec<f64> = (0..n * n).map(|_| rng.gaussian()).collect();
            DenseMatrix::from_row_major(n, n, &entries)
        })
        .collect::<Result<_>>()?;
    let sys = SwitchedLinearSystem::new(raw)?;
    let c = sys.product_norm_bound(CERTIFICATE_PRODUCT_LENGTH);
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::numerical("degenerate random modes"));
    }
    SwitchedLinearSystem::new(sys.matrices.iter().map(|a| a.scaled(decay / c)).collect())
}

/// One observation: unit state `x`, 1-based mode `sigma`, successor `y = A_σ x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePair {
    pub x: Vec<f64>,
    pub sigma: usize,
    pub y: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    seed: u64,
    pairs: Vec<SamplePair>,
}

const UNIT_TOL: f64 = 1e-9;

impl SampleSet {
    pub fn new(n: usize, modes: usize, seed: u64, pairs: Vec<SamplePair>) -> Result<Self> {
        let set = Self { n, m: modes, seed, pairs };
        set.validate()?;
        Ok(set)
    }

    fn validate(&self) -> Result<()> {
        if self.pairs.is_empty() {
            return Err(Error::Validation("a sample set needs at least one pair".into()));
        }
        if self.m == 0 {
            return Err(Error::Validation("M must be at least 1".into()));
        }
        for (i, p) in self.pairs.iter().enumerate() {
            if p.x.len() != self.n || p.y.len() != self.n {
                return Err(Error::Validation(format!("pair {i} has the wrong dimension")));
            }
            if p.sigma == 0 || p.sigma > self.m {
                return Err(Error::Validation(format!("pair {i} has mode {} outside 1..={}", p.sigma, self.m)));
            }
            if p.x.iter().chain(&p.y).any(|v| !v.is_finite()) {
                return Err(Error::Validation(format!("pair {i} is not finite")));
            }
            if (norm(&p.x) - 1.0).abs() > UNIT_TOL {
                return Err(Error::Validation(format!("pair {i}: x is not a unit vector")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mode_count(&self) -> usize {
        self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[SamplePair] {
        &self.pairs
    }

    /// The first `count` pairs (a prefix keeps nested sample sizes coupled).
    pub fn truncated(&self, count: usize) -> Result<Self> {
        if count == 0 || count > self.pairs.len() {
            return Err(Error::arg(format!("cannot take {count} of {} pairs", self.pairs.len())));
        }
        Ok(Self {
            pairs: self.pairs[..count].to_vec(),
            ..self.clone()
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let set: SampleSet = serde_json::from_str(text)?;
        set.validate()?;
        Ok(set)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// `count` i.i.d. pairs: `x` uniform on the unit sphere, `σ` uniform on the modes.
pub fn sample_observations(
    sys: &SwitchedLinearSystem,
    count: usize,
    rng: &mut RandomSource,
) -> Result<SampleSet> {
    if count == 0 {
        return Err(Error::arg("sample count must be at least 1"));
    }
    let seed = rng.seed();
    let pairs = (0..count)
        .map(|_| {
            let x = sample_unit_sphere(sys.n, rng);
            let sigma = rng.index(sys.mode_count()) + 1;
            let y = sys.matrices[sigma - 1].mul_vec(&x);
            SamplePair { x, sigma, y }
        })
        .collect();
    SampleSet::new(sys.n, sys.mode_count(), seed, pairs)
}
