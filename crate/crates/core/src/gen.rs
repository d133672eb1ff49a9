//! Seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Cost, Instance, Job, Time};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BudgetPolicy {
    Zero,
    /// `floor(f * Σ a_j c_j)`.
    Fraction(f64),
    /// Enough budget to compress every job completely.
    Unbounded,
}

impl BudgetPolicy {
    /// `zero`, `unbounded`, or `fraction:F`.
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "zero" => Ok(BudgetPolicy::Zero),
            "unbounded" => Ok(BudgetPolicy::Unbounded),
            _ => text
                .strip_prefix("fraction:")
                .and_then(|f| f.parse::<f64>().ok())
                .filter(|f| f.is_finite() && *f >= 0.0)
                .map(BudgetPolicy::Fraction)
                .ok_or_else(|| Error::InvalidParameter(format!("budget policy `{text}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenParams {
    pub n: usize,
    pub seed: u64,
    pub max_processing: Time,
    pub horizon: Time,
    pub cost_max: Cost,
    pub budget: BudgetPolicy,
}

impl GenParams {
    pub fn new(n: usize, seed: u64) -> Self {
        Self { n, seed, max_processing: 10, horizon: 30, cost_max: 3, budget: BudgetPolicy::Fraction(0.5) }
    }
}

/// Per job, in order: `r ~ U[0, horizon]`, `a ~ U[1, max_processing]`,
/// `d ~ U[r + 1, r + a + horizon]`, `c ~ U[1, cost_max]`. Ids are `J1..Jn`.
pub fn gen_instance(params: &GenParams) -> Result<Instance> {
    if params.n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if params.max_processing < 1 || params.horizon < 1 || params.cost_max < 1 {
        return Err(Error::InvalidParameter("max_processing, horizon and cost_max must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let jobs: Vec<Job> = (1..=params.n)
        .map(|i| {
            let release = rng.random_range(0..=params.horizon);
            let processing = rng.random_range(1..=params.max_processing);
            let due = rng.random_range(release + 1..=release + processing + params.horizon);
            let unit_cost = rng.random_range(1..=params.cost_max);
            Job::new(format!("J{i}"), release, due, processing, unit_cost)
        })
        .collect();
    let full: Cost = jobs.iter().map(|j| j.processing * j.unit_cost).sum();
    let budget = match params.budget {
        BudgetPolicy::Zero => 0,
        BudgetPolicy::Fraction(f) => (f * full as f64).floor() as Cost,
        BudgetPolicy::Unbounded => full,
    };
    Instance::new(jobs, budget)
}
