//! Exhaustive reference solvers for small instances.
//!
//! For a fixed sequence the earliest-start timing minimizes every completion
//! time, so enumerating sequences is enough for the fixed-processing-time
//! problem; the compressible problem additionally enumerates every integer
//! compression vector within the budget.

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{canonical_timing, CompressionVector, Instance, Time};

/// Environment variable overriding [`OracleLimits`]: `JOBS[,VECTORS]`.
pub const LIMIT_ENV: &str = "LATESCHED_ORACLE_LIMIT";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_jobs_generic: usize,
    pub max_jobs_compressible: usize,
    /// Bound on `Π_j (a_j + 1)`.
    pub max_vectors: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self { max_jobs_generic: 8, max_jobs_compressible: 5, max_vectors: 100_000 }
    }
}

impl OracleLimits {
    /// Parses `JOBS` or `JOBS,VECTORS`; `JOBS` applies to both oracles.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("{LIMIT_ENV}: cannot parse `{text}`"));
        let mut limits = Self::default();
        let mut parts = text.split(',').map(str::trim);
        let jobs: usize = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        limits.max_jobs_generic = jobs;
        limits.max_jobs_compressible = jobs;
        if let Some(v) = parts.next() {
            limits.max_vectors = v.parse().map_err(|_| bad())?;
        }
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(limits)
    }

    /// Defaults, overridden by the environment when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(LIMIT_ENV) {
            Ok(v) => Self::parse(&v),
            Err(_) => Ok(Self::default()),
        }
    }
}

fn best_sequence_lateness(instance: &Instance, compression: &CompressionVector) -> Time {
    let n = instance.len();
    (0..n)
        .permutations(n)
        .map(|seq| {
            canonical_timing(&seq, instance, compression, 0).expect("permutation of valid jobs").max_lateness(instance)
        })
        .min()
        .unwrap_or(Time::MIN)
}

/// Optimal `L_max` of the instance with processing times `a_j − x_j`.
pub fn oracle_generic(instance: &Instance, compression: &CompressionVector, limits: &OracleLimits) -> Result<Time> {
    compression.validate(instance)?;
    if instance.len() > limits.max_jobs_generic {
        return Err(Error::OracleLimit(format!(
            "{} jobs, generic oracle allows {}",
            instance.len(),
            limits.max_jobs_generic
        )));
    }
    if instance.is_empty() {
        return Err(Error::EmptyJobSet);
    }
    Ok(best_sequence_lateness(instance, compression))
}

/// Optimal `L_max` over all sequences and all integer compression vectors
/// within the budget, with the lexicographically smallest optimal vector.
pub fn oracle_compressible(instance: &Instance, limits: &OracleLimits) -> Result<(Time, CompressionVector)> {
    if instance.is_empty() {
        return Err(Error::EmptyJobSet);
    }
    if instance.len() > limits.max_jobs_compressible {
        return Err(Error::OracleLimit(format!(
            "{} jobs, compressible oracle allows {}",
            instance.len(),
            limits.max_jobs_compressible
        )));
    }
    let vectors =
        instance.jobs().iter().try_fold(1u64, |acc, j| acc.checked_mul(j.processing as u64 + 1)).unwrap_or(u64::MAX);
    if vectors > limits.max_vectors {
        return Err(Error::OracleLimit(format!(
            "{vectors} compression vectors, compressible oracle allows {}",
            limits.max_vectors
        )));
    }

    // lexicographic enumeration; first strict improvement wins ties
    let candidates: Vec<Vec<Time>> = instance
        .jobs()
        .iter()
        .map(|j| 0..=j.processing)
        .multi_cartesian_product()
        .filter(|x| x.iter().zip(instance.jobs()).map(|(&x, j)| x * j.unit_cost).sum::<i64>() <= instance.budget())
        .collect();
    let values: Vec<Time> = candidates
        .par_iter()
        .map(|x| {
            let x = CompressionVector::new(instance, x.clone()).expect("enumerated within bounds");
            best_sequence_lateness(instance, &x)
        })
        .collect();
    let (best, value) = values
        .iter()
        .enumerate()
        .min_by_key(|&(i, &v)| (v, i))
        .map(|(i, &v)| (i, v))
        .expect("the zero vector is always within budget");
    Ok((value, CompressionVector::new(instance, candidates[best].clone())?))
}
