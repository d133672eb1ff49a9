//! Batch verification harness.
//!
//! Every trial generates an instance, solves it, writes the result document
//! and re-derives its timing, then holds the outcome against the exact
//! oracles and the properties the algorithms are supposed to guarantee.
//! Trials run in parallel; reports come back in trial order.

use rayon::prelude::*;

use crate::algorithms::{algorithm2, algorithm3_stage1, algorithm3_stage2, is_well_balanced, Algorithm, SolveOutcome};
use crate::error::{Error, Result};
use crate::gen::{gen_instance, GenParams};
use crate::io::{parse_result, write_result};
use crate::kernel::extract_kernels;
use crate::model::{Cost, Instance, Schedule, Time};
use crate::oracle::{oracle_compressible, oracle_generic, OracleLimits};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub check: &'static str,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialReport {
    pub trial: usize,
    pub seed: u64,
    pub max_lateness: Time,
    pub total_cost: Cost,
    pub certificate: bool,
    /// Optimum of the fixed-processing-time instance at the output's compressions.
    pub generic_optimum: Time,
    /// Optimum of the budgeted problem, when the instance is small enough.
    pub compressible_optimum: Option<Time>,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub algorithm: Algorithm,
    pub trials: usize,
    pub seed: u64,
    /// Generator settings; `seed` is replaced per trial by `seed + trial`.
    pub params: GenParams,
    pub limits: OracleLimits,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub algorithm: Algorithm,
    pub trials: Vec<TrialReport>,
}

impl VerifyReport {
    pub fn violations(&self) -> impl Iterator<Item = (&TrialReport, &Violation)> {
        self.trials.iter().flat_map(|t| t.violations.iter().map(move |v| (t, v)))
    }

    pub fn passed(&self) -> bool {
        self.violations().next().is_none()
    }
}

pub fn run_verify(config: &VerifyConfig) -> Result<VerifyReport> {
    if !matches!(config.algorithm, Algorithm::Alg2 | Algorithm::Alg3) {
        return Err(Error::InvalidParameter(format!("verify supports alg2 and alg3, not {}", config.algorithm)));
    }
    let trials = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = config.seed.wrapping_add(trial as u64);
            let instance = gen_instance(&GenParams { seed, ..config.params })?;
            let mut report = verify_instance(config.algorithm, &instance, &config.limits)?;
            report.trial = trial;
            report.seed = seed;
            Ok(report)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport { algorithm: config.algorithm, trials })
}

/// Solves `instance` with Algorithm 2 or 3 and runs every applicable check.
pub fn verify_instance(algorithm: Algorithm, instance: &Instance, limits: &OracleLimits) -> Result<TrialReport> {
    let mut violations = Vec::new();
    let outcome = match algorithm {
        Algorithm::Alg2 => {
            let outcome = algorithm2(instance)?;
            check_algorithm2(&outcome, instance, &mut violations);
            outcome
        }
        Algorithm::Alg3 => {
            let stage1 = algorithm3_stage1(instance)?;
            check_stage1(&stage1, instance, limits, &mut violations)?;
            let outcome = algorithm3_stage2(&stage1, instance)?;
            check_stage2(&stage1, &outcome, instance, &mut violations);
            outcome
        }
        other => return Err(Error::InvalidParameter(format!("verify supports alg2 and alg3, not {other}"))),
    };

    check_document(&outcome, instance, &mut violations);
    if !outcome.feasible {
        violations.push(Violation {
            check: "budget",
            detail: format!("cost {} exceeds budget {}", outcome.total_cost, instance.budget()),
        });
    }
    let generic_optimum = oracle_generic(instance, outcome.schedule.compression(), limits)?;
    if outcome.certificate.is_some() && outcome.max_lateness != generic_optimum {
        violations.push(Violation {
            check: "certificate-optimal",
            detail: format!("L = {} but the generic optimum is {generic_optimum}", outcome.max_lateness),
        });
    }
    let compressible_optimum = match oracle_compressible(instance, limits) {
        Ok((value, _)) => Some(value),
        Err(Error::OracleLimit(_)) => None,
        Err(e) => return Err(e),
    };
    if let Some(opt) = compressible_optimum.filter(|&opt| outcome.feasible && outcome.max_lateness < opt) {
        violations.push(Violation {
            check: "compressible-bound",
            detail: format!("feasible L = {} beats the optimum {opt}", outcome.max_lateness),
        });
    }

    Ok(TrialReport {
        trial: 0,
        seed: 0,
        max_lateness: outcome.max_lateness,
        total_cost: outcome.total_cost,
        certificate: outcome.certificate.is_some(),
        generic_optimum,
        compressible_optimum,
        violations,
    })
}

fn check_document(outcome: &SolveOutcome, instance: &Instance, violations: &mut Vec<Violation>) {
    let text = write_result(outcome, instance, true);
    if let Err(e) = parse_result(&text).and_then(|doc| doc.check_against(instance)) {
        violations.push(Violation { check: "document", detail: e.to_string() });
    }
}

fn check_algorithm2(outcome: &SolveOutcome, instance: &Instance, violations: &mut Vec<Violation>) {
    let levels: Vec<Time> = outcome.trace.iterations.iter().map(|i| i.max_lateness).collect();
    if let Some(w) = levels.windows(2).find(|w| w[1] != w[0] - 1) {
        violations.push(Violation { check: "unit-decrement", detail: format!("L went from {} to {}", w[0], w[1]) });
    }
    let steps = levels.len().saturating_sub(1) as Time;
    if steps >= instance.p_max() {
        violations.push(Violation {
            check: "iteration-bound",
            detail: format!("{steps} iterations, p_max = {}", instance.p_max()),
        });
    }
}

fn check_stage1(
    stage1: &SolveOutcome,
    instance: &Instance,
    limits: &OracleLimits,
    violations: &mut Vec<Violation>,
) -> Result<()> {
    let new_kernels = stage1.trace.new_kernel_iterations();
    if new_kernels > instance.len() {
        violations.push(Violation {
            check: "new-kernel-bound",
            detail: format!("{new_kernels} new-kernel iterations for {} jobs", instance.len()),
        });
    }
    for it in &stage1.trace.iterations {
        if let Some(lambda) = it.lambda.filter(|&l| l > it.max_lateness) {
            violations.push(Violation {
                check: "level-below-L",
                detail: format!("iteration {}: level {lambda} above L = {}", it.h, it.max_lateness),
            });
        }
    }
    if stage1.certificate.is_some() {
        let opt = oracle_generic(instance, stage1.schedule.compression(), limits)?;
        if stage1.max_lateness != opt {
            violations.push(Violation {
                check: "stage1-optimal",
                detail: format!("L = {} but the generic optimum is {opt}", stage1.max_lateness),
            });
        }
    }
    if let Some(tau) = well_balance_depth(&stage1.schedule) {
        if !is_well_balanced(&stage1.schedule, instance, tau)? {
            violations.push(Violation { check: "well-balanced", detail: format!("fails within τ ≤ {tau}") });
        }
    }
    Ok(())
}

/// `min(2, min x_e)` over the compressed jobs, if there are any.
pub fn well_balance_depth(schedule: &Schedule) -> Option<Time> {
    let x = schedule.compression();
    x.compressed_jobs().iter().map(|&e| x.get(e)).min().map(|m| m.min(2))
}

/// Whether stage 2 ran in the regime where `L(σ̄) = L(σ̂) + ξ` is claimed:
/// a single pass with `ξ ≤ min x_e` that leaves the kernel family intact.
pub fn repair_regime_applies(stage1: &SolveOutcome, stage2: &SolveOutcome, instance: &Instance) -> bool {
    let Some(repair) = &stage2.trace.repair else { return false };
    let x = stage1.schedule.compression();
    let min_x = x.compressed_jobs().iter().map(|&e| x.get(e)).min().unwrap_or(0);
    let family = |s: &Schedule| {
        let mut f: Vec<Vec<usize>> = extract_kernels(s, instance)
            .into_iter()
            .map(|k| {
                let mut jobs = k.jobs;
                jobs.sort_unstable();
                jobs
            })
            .collect();
        f.sort();
        f
    };
    repair.extra_units == 0 && repair.xi <= min_x && family(&stage1.schedule) == family(&stage2.schedule)
}

fn check_stage2(stage1: &SolveOutcome, outcome: &SolveOutcome, instance: &Instance, violations: &mut Vec<Violation>) {
    if !repair_regime_applies(stage1, outcome, instance) {
        return;
    }
    let xi = outcome.trace.repair.as_ref().map_or(0, |r| r.xi);
    if outcome.max_lateness != stage1.max_lateness + xi {
        violations.push(Violation {
            check: "repair-exactness",
            detail: format!("L = {}, expected {} + {xi}", outcome.max_lateness, stage1.max_lateness),
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;

    #[test]
    fn fixtures_pass() {
        let limits = OracleLimits::default();
        for inst in [fixture_a(5), fixture_a(100), fixture_b(2), fixture_b(0), fixture_c(3)] {
            for alg in [Algorithm::Alg2, Algorithm::Alg3] {
                let report = verify_instance(alg, &inst, &limits).unwrap();
                assert!(report.violations.is_empty(), "{alg}: {:?}", report.violations);
            }
        }
    }

    #[test]
    fn repair_regime_on_fixture_a() {
        let inst = fixture_a(5);
        let s1 = algorithm3_stage1(&inst).unwrap();
        let s2 = algorithm3_stage2(&s1, &inst).unwrap();
        assert!(repair_regime_applies(&s1, &s2, &inst));
    }

    #[test]
    fn batch_is_ordered_and_deterministic() {
        let config = VerifyConfig {
            algorithm: Algorithm::Alg2,
            trials: 6,
            seed: 7,
            params: GenParams::new(4, 0),
            limits: OracleLimits::default(),
        };
        let a = run_verify(&config).unwrap();
        let b = run_verify(&config).unwrap();
        assert_eq!(a.trials, b.trials);
        assert_eq!(a.trials.iter().map(|t| t.seed).collect::<Vec<_>>(), (7..13).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_other_algorithms() {
        let config = VerifyConfig {
            algorithm: Algorithm::Alg1,
            trials: 1,
            seed: 0,
            params: GenParams::new(3, 0),
            limits: OracleLimits::default(),
        };
        assert!(matches!(run_verify(&config), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn generic_oracle_limit_is_an_error() {
        let config = VerifyConfig {
            algorithm: Algorithm::Alg2,
            trials: 1,
            seed: 0,
            params: GenParams::new(9, 0),
            limits: OracleLimits::default(),
        };
        assert!(matches!(run_verify(&config), Err(Error::OracleLimit(_))));
    }
}
