//! The compression algorithms.
//!
//! * [`algorithm1`] compresses the delaying emerging job of every kernel of
//!   the regularized initial ED-schedule by `Δ_min` once.
//! * [`algorithm2`] repeatedly compresses those jobs by one time unit and
//!   re-regularizes while the budget allows.
//! * [`algorithm3_stage1`] makes `Δ_min` jumps, dis-compressing to keep every
//!   tracked kernel at a common lateness level; [`algorithm3_stage2`] repairs
//!   the budget of the stage-1 result.

use std::collections::BTreeSet;
use std::fmt;

use crate::ed::initial_schedule;
use crate::error::{Error, Result};
use crate::kernel::{extract_kernels, regularize, Kernel};
use crate::model::{Cost, Instance, JobIdx, Schedule, Time};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Alg1,
    Alg2,
    Alg3Stage1,
    Alg3,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Alg1 => "alg1",
            Algorithm::Alg2 => "alg2",
            Algorithm::Alg3Stage1 => "alg3-stage1",
            Algorithm::Alg3 => "alg3",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Algorithm::Alg1, Algorithm::Alg2, Algorithm::Alg3Stage1, Algorithm::Alg3]
            .into_iter()
            .find(|a| a.name() == name)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TerminalReason {
    /// Some kernel starts at its earliest release: the schedule is optimal
    /// for its own processing times.
    NoDelayingEmergingJob,
    BudgetExhausted,
    NoNewKernel,
    /// Single-step algorithm whose step produced a different kernel family.
    KernelChanged,
    /// Every delaying emerging job is already fully compressed.
    Stalled,
}

impl TerminalReason {
    pub fn name(self) -> &'static str {
        match self {
            TerminalReason::NoDelayingEmergingJob => "no-delaying-emerging-job",
            TerminalReason::BudgetExhausted => "budget-exhausted",
            TerminalReason::NoNewKernel => "no-new-kernel",
            TerminalReason::KernelChanged => "kernel-changed",
            TerminalReason::Stalled => "stalled",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            TerminalReason::NoDelayingEmergingJob,
            TerminalReason::BudgetExhausted,
            TerminalReason::NoNewKernel,
            TerminalReason::KernelChanged,
            TerminalReason::Stalled,
        ]
        .into_iter()
        .find(|r| r.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelSummary {
    pub jobs: Vec<JobIdx>,
    pub overflow: JobIdx,
    pub emerging: Option<JobIdx>,
    pub delta: Option<Time>,
}

impl From<&Kernel> for KernelSummary {
    fn from(k: &Kernel) -> Self {
        Self { jobs: k.jobs.clone(), overflow: k.overflow, emerging: k.delaying_emerging, delta: k.delta }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Iteration {
    pub h: usize,
    /// Target lateness level `Λ^h` (Algorithms 1 and 3).
    pub lambda: Option<Time>,
    pub delta_min: Option<Time>,
    /// Kernels acted upon in this iteration.
    pub kernels: Vec<KernelSummary>,
    /// Net compression change per job; negative entries are dis-compressions.
    pub compression_deltas: Vec<(JobIdx, Time)>,
    pub max_lateness: Time,
    pub cost: Cost,
}

/// Budget repair performed by stage 2 of Algorithm 3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Repair {
    pub excess: Cost,
    pub k: usize,
    pub xi: Time,
    /// Unit dis-compressions needed after the `ξ` pass.
    pub extra_units: Time,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunTrace {
    pub iterations: Vec<Iteration>,
    /// Jobs compressed as delaying emerging jobs at some point of the run.
    pub compressed_emerging: Vec<JobIdx>,
    pub terminal_reason: TerminalReason,
    pub repair: Option<Repair>,
}

impl RunTrace {
    /// Iterations in which the schedule showed a kernel above the current
    /// target level (Algorithm 3 stage 1).
    pub fn new_kernel_iterations(&self) -> usize {
        self.iterations.windows(2).filter(|w| w[0].lambda.is_some_and(|l| w[0].max_lateness > l)).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOutcome {
    pub algorithm: Algorithm,
    pub schedule: Schedule,
    pub total_cost: Cost,
    pub max_lateness: Time,
    /// A kernel of `schedule` without a delaying emerging job.
    pub certificate: Option<Kernel>,
    pub trace: RunTrace,
    pub feasible: bool,
    /// The algorithm's sufficient conditions for optimality on the budgeted
    /// instance are met. Always implies `feasible`.
    pub conditions_met: bool,
}

impl SolveOutcome {
    fn build(
        algorithm: Algorithm,
        schedule: Schedule,
        instance: &Instance,
        mut trace: RunTrace,
        conditions: bool,
    ) -> Self {
        let certificate = certificate(&schedule, instance);
        let total_cost = schedule.total_cost(instance);
        let feasible = total_cost <= instance.budget();
        trace.compressed_emerging.sort_unstable();
        trace.compressed_emerging.dedup();
        Self {
            algorithm,
            max_lateness: schedule.max_lateness(instance),
            total_cost,
            certificate,
            trace,
            feasible,
            conditions_met: conditions && feasible,
            schedule,
        }
    }
}

/// First kernel of `schedule` whose first job starts at `r(K)`: it has no
/// delaying emerging job and its overflow lateness is a lower bound.
pub fn certificate(schedule: &Schedule, instance: &Instance) -> Option<Kernel> {
    extract_kernels(schedule, instance).into_iter().find(|k| !k.is_delayed())
}

/// The kernels the algorithms act on. A delayed kernel nested inside a
/// longer kernel is dropped: the enclosing kernel's emerging job precedes
/// it as well, and compressing both would move the outer overflow job twice.
fn acting_kernels(schedule: &Schedule, instance: &Instance) -> Vec<Kernel> {
    let all = extract_kernels(schedule, instance);
    let nested = |k: &Kernel| {
        all.iter().any(|m| m.range != k.range && m.range.start <= k.range.start && k.range.end <= m.range.end)
    };
    all.iter().filter(|k| !k.is_delayed() || !nested(k)).cloned().collect()
}

fn min_delta(kernels: &[Kernel]) -> Option<Time> {
    kernels.iter().filter_map(|k| k.delta).min()
}

fn has_certificate(kernels: &[Kernel]) -> bool {
    kernels.iter().any(|k| !k.is_delayed())
}

/// Delaying emerging jobs to compress by `amount`, scanning kernels in
/// schedule order. A kernel whose overflow job already moves `amount`
/// earlier through the jobs chosen so far (an earlier emerging job in the
/// same busy stretch) does not get its own job compressed as well.
fn select_emerging(schedule: &Schedule, instance: &Instance, kernels: &[Kernel], amount: Time) -> Result<Vec<JobIdx>> {
    let mut ordered: Vec<&Kernel> = kernels.iter().filter(|k| k.delaying_emerging.is_some()).collect();
    ordered.sort_by_key(|k| k.range.start);
    let mut chosen: Vec<JobIdx> = Vec::new();
    for kernel in ordered {
        let e = kernel.delaying_emerging.unwrap();
        if chosen.contains(&e) {
            continue;
        }
        let before = schedule.completion_of(kernel.overflow).expect("kernel job is scheduled");
        let (trial, _) = shift_compression(schedule, instance, &chosen, amount)?;
        let after = trial.completion_of(kernel.overflow).expect("kernel job is scheduled");
        if before - after < amount {
            chosen.push(e);
        }
    }
    chosen.sort_unstable();
    Ok(chosen)
}

fn job_family(kernels: &[Kernel]) -> BTreeSet<BTreeSet<JobIdx>> {
    kernels.iter().map(Kernel::job_set).collect()
}

/// Changes the compression of each job in `jobs` by `amount` (negative to
/// dis-compress), clamped to `[0, a_j]`, and re-times the sequence.
fn shift_compression(
    schedule: &Schedule,
    instance: &Instance,
    jobs: &[JobIdx],
    amount: Time,
) -> Result<(Schedule, Vec<(JobIdx, Time)>)> {
    let mut x = schedule.compression().clone();
    let deltas: Vec<(JobIdx, Time)> =
        jobs.iter().map(|&j| (j, x.adjust(instance, j, amount))).filter(|&(_, d)| d != 0).collect();
    Ok((schedule.retimed(instance, x)?, deltas))
}

fn merge_deltas(mut a: Vec<(JobIdx, Time)>, b: Vec<(JobIdx, Time)>) -> Vec<(JobIdx, Time)> {
    for (j, d) in b {
        match a.iter_mut().find(|(k, _)| *k == j) {
            Some(entry) => entry.1 += d,
            None => a.push((j, d)),
        }
    }
    a.retain(|&(_, d)| d != 0);
    a.sort_unstable();
    a
}

fn record(
    h: usize,
    lambda: Option<Time>,
    kernels: &[Kernel],
    deltas: Vec<(JobIdx, Time)>,
    schedule: &Schedule,
    instance: &Instance,
) -> Iteration {
    Iteration {
        h,
        lambda,
        delta_min: kernels.iter().filter_map(|k| k.delta).min(),
        kernels: kernels.iter().map(KernelSummary::from).collect(),
        compression_deltas: deltas,
        max_lateness: schedule.max_lateness(instance),
        cost: schedule.total_cost(instance),
    }
}

fn empty_trace(reason: TerminalReason) -> RunTrace {
    RunTrace { iterations: Vec::new(), compressed_emerging: Vec::new(), terminal_reason: reason, repair: None }
}

/// One `Δ_min` compression of the regularized initial ED-schedule.
pub fn algorithm1(instance: &Instance) -> Result<SolveOutcome> {
    let start = regularize(&initial_schedule(instance)?, instance)?;
    let kernels = acting_kernels(&start, instance);
    let mut trace = empty_trace(TerminalReason::NoDelayingEmergingJob);
    trace.iterations.push(record(0, None, &kernels, Vec::new(), &start, instance));
    if has_certificate(&kernels) {
        return Ok(SolveOutcome::build(Algorithm::Alg1, start, instance, trace, true));
    }

    let Some(dmin) = min_delta(&kernels) else {
        trace.terminal_reason = TerminalReason::Stalled;
        return Ok(SolveOutcome::build(Algorithm::Alg1, start, instance, trace, false));
    };
    let lambda = start.max_lateness(instance) - dmin;
    let emerging = select_emerging(&start, instance, &kernels, dmin)?;
    let (compressed, deltas) = shift_compression(&start, instance, &emerging, dmin)?;
    trace.iterations.push(record(1, Some(lambda), &kernels, deltas, &compressed, instance));
    trace.compressed_emerging = emerging;

    let same_family = job_family(&acting_kernels(&compressed, instance)) == job_family(&kernels);
    trace.terminal_reason = if same_family { TerminalReason::NoNewKernel } else { TerminalReason::KernelChanged };
    Ok(SolveOutcome::build(Algorithm::Alg1, compressed, instance, trace, same_family))
}

/// Unit-step compression loop.
pub fn algorithm2(instance: &Instance) -> Result<SolveOutcome> {
    let mut current = regularize(&initial_schedule(instance)?, instance)?;
    let mut trace = empty_trace(TerminalReason::NoDelayingEmergingJob);
    let mut kernels = acting_kernels(&current, instance);
    trace.iterations.push(record(0, None, &kernels, Vec::new(), &current, instance));

    loop {
        if has_certificate(&kernels) {
            trace.terminal_reason = TerminalReason::NoDelayingEmergingJob;
            break;
        }
        let emerging = select_emerging(&current, instance, &kernels, 1)?;
        if emerging.is_empty() {
            trace.terminal_reason = TerminalReason::Stalled;
            break;
        }
        let (compressed, deltas) = shift_compression(&current, instance, &emerging, 1)?;
        if compressed.total_cost(instance) > instance.budget() {
            trace.terminal_reason = TerminalReason::BudgetExhausted;
            break;
        }
        let lambda = current.max_lateness(instance) - 1;
        trace.compressed_emerging.extend(&emerging);
        current = regularize(&compressed, instance)?;
        let acted_on = std::mem::replace(&mut kernels, acting_kernels(&current, instance));
        let h = trace.iterations.len();
        trace.iterations.push(record(h, Some(lambda), &acted_on, deltas, &current, instance));
    }

    let no_binding = trace.terminal_reason == TerminalReason::NoDelayingEmergingJob;
    Ok(SolveOutcome::build(Algorithm::Alg2, current, instance, trace, no_binding))
}

/// Stage 1 of Algorithm 3; ignores the budget.
///
/// The state is a target level `Λ` and the set of emerging jobs compressed
/// so far. Each iteration regularizes the schedule; if a kernel above `Λ`
/// shows up, its emerging jobs are compressed by `Δ_min`, which gives the
/// new level `L((σ_h)*) − Δ_min`. The lower of the old and new levels is then raised
/// to the higher one by dis-compression. When a kernel without a delaying
/// emerging job appears, its lateness is a lower bound and every compressed
/// job is relaxed up to it.
pub fn algorithm3_stage1(instance: &Instance) -> Result<SolveOutcome> {
    let start = regularize(&initial_schedule(instance)?, instance)?;
    let kernels = acting_kernels(&start, instance);
    let mut trace = empty_trace(TerminalReason::NoDelayingEmergingJob);
    trace.iterations.push(record(0, None, &kernels, Vec::new(), &start, instance));
    if has_certificate(&kernels) {
        return Ok(SolveOutcome::build(Algorithm::Alg3Stage1, start, instance, trace, true));
    }

    let mut lambda: Option<Time> = None;
    let mut tracked: BTreeSet<JobIdx> = BTreeSet::new();
    let mut current = start;
    let limit = instance.len() + 1;
    loop {
        let h = trace.iterations.len();
        if h > limit {
            return Err(Error::Internal(format!("stage 1 exceeded {limit} iterations")));
        }
        if lambda.is_some_and(|l| current.max_lateness(instance) == l) {
            trace.terminal_reason = TerminalReason::NoNewKernel;
            break;
        }

        let regular = if h == 1 { current.clone() } else { regularize(&current, instance)? };
        let kernels = acting_kernels(&regular, instance);
        let reg_level = regular.max_lateness(instance);
        if has_certificate(&kernels) {
            // the certificate kernel bounds L from below: relax everything up to it
            let room = lambda.map_or(0, |l| (reg_level - l).max(0));
            let old: Vec<JobIdx> = tracked.iter().copied().collect();
            let (relaxed, deltas) = relax(&regular, instance, &old, room, reg_level)?;
            lambda = Some(lambda.map_or(reg_level, |l| l.max(reg_level)));
            current = relaxed;
            trace.iterations.push(record(h, lambda, &kernels, deltas, &current, instance));
            trace.terminal_reason = TerminalReason::NoDelayingEmergingJob;
            break;
        }
        let Some(dmin) = min_delta(&kernels) else {
            current = regular;
            trace.terminal_reason = TerminalReason::Stalled;
            break;
        };
        let fresh = select_emerging(&regular, instance, &kernels, dmin)?;
        // a job with less than Δ_min left is compressed fully; its kernel
        // stays above the new level and its next emerging job takes over
        let new_level = reg_level - dmin;
        let (mut next, mut deltas) = shift_compression(&regular, instance, &fresh, dmin)?;
        match lambda {
            Some(level) if new_level > level => {
                // case 1: the older kernels are lifted to the new level
                let old: Vec<JobIdx> = tracked.iter().copied().filter(|j| !fresh.contains(j)).collect();
                let cap = new_level.max(next.max_lateness(instance));
                let (lifted, more) = relax(&next, instance, &old, new_level - level, cap)?;
                next = lifted;
                deltas = merge_deltas(deltas, more);
                lambda = Some(new_level);
            }
            Some(level) if new_level < level => {
                // case 2: the newly arisen kernels are lifted to the old level
                let new_only: Vec<JobIdx> = fresh.iter().copied().filter(|j| !tracked.contains(j)).collect();
                let cap = level.max(next.max_lateness(instance));
                let (lifted, more) = relax(&next, instance, &new_only, level - new_level, cap)?;
                next = lifted;
                deltas = merge_deltas(deltas, more);
            }
            Some(_) => {}
            None => lambda = Some(new_level),
        }
        tracked.extend(fresh);
        current = next;
        trace.iterations.push(record(h, lambda, &kernels, deltas, &current, instance));
    }

    trace.compressed_emerging = current.compression().compressed_jobs();
    let conditions = trace.terminal_reason != TerminalReason::Stalled;
    Ok(SolveOutcome::build(Algorithm::Alg3Stage1, current, instance, trace, conditions))
}

/// Dis-compresses `jobs` uniformly by the largest `τ ≤ max_tau` that keeps
/// `L` at or below `cap`.
fn relax(
    schedule: &Schedule,
    instance: &Instance,
    jobs: &[JobIdx],
    max_tau: Time,
    cap: Time,
) -> Result<(Schedule, Vec<(JobIdx, Time)>)> {
    let mut best = (schedule.clone(), Vec::new());
    for tau in 1..=max_tau {
        let candidate = shift_compression(schedule, instance, jobs, -tau)?;
        if candidate.1.is_empty() || candidate.0.max_lateness(instance) > cap {
            break;
        }
        best = candidate;
    }
    Ok(best)
}

/// Stage 2 of Algorithm 3: dis-compresses every compressed emerging job by
/// `ξ = ⌈excess / k⌉`, then one unit at a time round-robin until the budget holds.
pub fn algorithm3_stage2(stage1: &SolveOutcome, instance: &Instance) -> Result<SolveOutcome> {
    let mut out = stage1.clone();
    out.algorithm = Algorithm::Alg3;
    if stage1.feasible {
        return Ok(out);
    }

    let schedule = &stage1.schedule;
    let mut emerging = schedule.compression().compressed_jobs();
    emerging.sort_by_key(|&j| schedule.position_of(j));
    let k = emerging.len();
    let excess = stage1.total_cost - instance.budget();
    let xi = (excess + k as Cost - 1) / k as Cost;

    let mut x = schedule.compression().clone();
    for &e in &emerging {
        x.adjust(instance, e, -xi);
    }
    let mut extra_units = 0;
    'repair: while x.total_cost(instance) > instance.budget() {
        for &e in &emerging {
            if x.adjust(instance, e, -1) != 0 {
                extra_units += 1;
                if x.total_cost(instance) <= instance.budget() {
                    break 'repair;
                }
            }
        }
    }

    let deltas: Vec<(JobIdx, Time)> =
        emerging.iter().map(|&e| (e, x.get(e) - schedule.compression().get(e))).filter(|&(_, d)| d != 0).collect();
    let repaired = schedule.retimed(instance, x)?;
    let mut trace = stage1.trace.clone();
    let h = trace.iterations.len();
    let kernels = acting_kernels(schedule, instance);
    trace.iterations.push(record(h, None, &kernels, deltas, &repaired, instance));
    trace.repair = Some(Repair { excess, k, xi, extra_units });
    trace.terminal_reason = TerminalReason::BudgetExhausted;
    Ok(SolveOutcome::build(Algorithm::Alg3, repaired, instance, trace, false))
}

pub fn algorithm3(instance: &Instance) -> Result<SolveOutcome> {
    algorithm3_stage2(&algorithm3_stage1(instance)?, instance)
}

pub fn solve(algorithm: Algorithm, instance: &Instance) -> Result<SolveOutcome> {
    match algorithm {
        Algorithm::Alg1 => algorithm1(instance),
        Algorithm::Alg2 => algorithm2(instance),
        Algorithm::Alg3Stage1 => algorithm3_stage1(instance),
        Algorithm::Alg3 => algorithm3(instance),
    }
}

/// Dis-compresses every compressed job of `schedule` by `τ = 1..=tau_max`
/// (bounded by the smallest compression) and checks that `L` grows by
/// exactly `τ` each time.
pub fn is_well_balanced(schedule: &Schedule, instance: &Instance, tau_max: Time) -> Result<bool> {
    let emerging = schedule.compression().compressed_jobs();
    if emerging.is_empty() {
        return Err(Error::InvalidParameter("schedule has no compressed delaying emerging job".into()));
    }
    let bound = emerging.iter().map(|&e| schedule.compression().get(e)).min().unwrap().min(tau_max);
    let base = schedule.max_lateness(instance);
    for tau in 1..=bound {
        let (relaxed, _) = shift_compression(schedule, instance, &emerging, -tau)?;
        if relaxed.max_lateness(instance) != base + tau {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::Job;

    #[test]
    fn alg1_fixture_a() {
        let inst = fixture_a(10);
        let out = algorithm1(&inst).unwrap();
        assert_eq!(out.schedule.compression().as_slice(), &[8, 0]);
        assert_eq!(out.schedule.starts(), &[0, 2]);
        assert_eq!(out.max_lateness, -1);
        assert_eq!(out.total_cost, 8);
        assert_eq!(out.trace.iterations[1].lambda, Some(-1));
        assert!(out.conditions_met);
        assert_eq!(out.certificate.unwrap().jobs, vec![1]);
    }

    #[test]
    fn alg1_fixture_b_new_kernel() {
        let inst = fixture_b(10);
        let out = algorithm1(&inst).unwrap();
        assert_eq!(out.schedule.compression().as_slice(), &[5, 0, 0]);
        assert_eq!(out.max_lateness, 1);
        assert_eq!(out.trace.iterations[1].lambda, Some(0));
        assert!(!out.conditions_met);
        assert_eq!(out.trace.terminal_reason, TerminalReason::KernelChanged);
    }

    #[test]
    fn alg1_certificate_without_compression() {
        // the kernel {b} starts at its release
        let inst = Instance::new(vec![Job::new("a", 0, 5, 3, 1), Job::new("b", 10, 11, 4, 1)], 0).unwrap();
        let out = algorithm1(&inst).unwrap();
        assert_eq!(out.total_cost, 0);
        assert!(out.certificate.is_some());
        assert!(out.conditions_met);
    }

    #[test]
    fn alg2_fixture_a_unbounded() {
        let inst = fixture_a(100);
        let out = algorithm2(&inst).unwrap();
        assert_eq!(out.schedule.compression().as_slice(), &[8, 0]);
        assert_eq!(out.max_lateness, -1);
        assert_eq!(out.trace.iterations.len(), 9);
        let ls: Vec<Time> = out.trace.iterations.iter().map(|i| i.max_lateness).collect();
        assert_eq!(ls, (-1..=7).rev().collect::<Vec<_>>());
        assert_eq!(out.certificate.unwrap().jobs, vec![1]);
        assert_eq!(out.trace.terminal_reason, TerminalReason::NoDelayingEmergingJob);
    }

    #[test]
    fn alg2_fixture_a_budget_five() {
        let inst = fixture_a(5);
        let out = algorithm2(&inst).unwrap();
        assert_eq!(out.schedule.compression().as_slice(), &[5, 0]);
        assert_eq!(out.schedule.starts(), &[0, 5]);
        assert_eq!(out.schedule.completions(), &[5, 8]);
        assert_eq!(out.max_lateness, 2);
        assert_eq!(out.total_cost, 5);
        assert_eq!(out.trace.terminal_reason, TerminalReason::BudgetExhausted);
        assert!(out.feasible);
    }

    #[test]
    fn alg2_zero_budget_is_regularized_start() {
        let inst = fixture_c(0);
        let out = algorithm2(&inst).unwrap();
        let start = regularize(&initial_schedule(&inst).unwrap(), &inst).unwrap();
        assert_eq!(out.schedule, start);
        assert_eq!(out.total_cost, 0);
    }

    #[test]
    fn stage1_fixture_a() {
        let inst = fixture_a(0);
        let out = algorithm3_stage1(&inst).unwrap();
        assert_eq!(out.schedule.compression().as_slice(), &[8, 0]);
        assert_eq!(out.max_lateness, -1);
        assert_eq!(out.trace.iterations.len(), 2);
        assert_eq!(out.certificate.unwrap().jobs, vec![1]);
    }

    #[test]
    fn stage1_fixture_b_terminal_discompression() {
        let inst = fixture_b(0);
        let out = algorithm3_stage1(&inst).unwrap();
        assert_eq!(out.schedule.compression().as_slice(), &[4, 0, 0]);
        assert_eq!(out.schedule.starts(), &[0, 2, 9]);
        assert_eq!(out.schedule.lateness(&inst).per_position, vec![-28, 1, 1]);
        assert_eq!(out.max_lateness, 1);
        assert_eq!(out.total_cost, 4);
        assert_eq!(out.certificate.unwrap().jobs, vec![2]);
    }

    #[test]
    fn stage1_certificate_from_start() {
        let inst = Instance::new(vec![Job::new("a", 0, 5, 3, 1), Job::new("b", 10, 11, 4, 1)], 0).unwrap();
        let out = algorithm3_stage1(&inst).unwrap();
        assert_eq!(out.total_cost, 0);
        assert_eq!(out.max_lateness, 3);
    }

    #[test]
    fn stage2_fixture_a() {
        let inst = fixture_a(5);
        let s1 = algorithm3_stage1(&inst).unwrap();
        assert!(!s1.feasible);
        let out = algorithm3_stage2(&s1, &inst).unwrap();
        let repair = out.trace.repair.clone().unwrap();
        assert_eq!((repair.excess, repair.k, repair.xi, repair.extra_units), (3, 1, 3, 0));
        assert_eq!(out.schedule.compression().as_slice(), &[5, 0]);
        assert_eq!(out.schedule.starts(), &[0, 5]);
        assert_eq!(out.max_lateness, 2);
        assert_eq!(out.max_lateness, s1.max_lateness + repair.xi);
        assert_eq!(out.total_cost, 5);
        assert!(out.feasible);
    }

    #[test]
    fn stage2_fixture_b() {
        let inst = fixture_b(2);
        let s1 = algorithm3_stage1(&inst).unwrap();
        let out = algorithm3_stage2(&s1, &inst).unwrap();
        assert_eq!(out.trace.repair.as_ref().unwrap().xi, 2);
        assert_eq!(out.schedule.compression().as_slice(), &[2, 0, 0]);
        assert_eq!(out.max_lateness, 3);
        assert_eq!(out.total_cost, 2);
    }

    #[test]
    fn stage2_feasible_is_unchanged() {
        let inst = fixture_a(100);
        let s1 = algorithm3_stage1(&inst).unwrap();
        let out = algorithm3_stage2(&s1, &inst).unwrap();
        assert_eq!(out.schedule, s1.schedule);
        assert!(out.trace.repair.is_none());
    }

    #[test]
    fn well_balanced_examples() {
        let inst = fixture_b(0);
        let s = initial_schedule(&inst).unwrap();
        let hat = s.retimed(&inst, x(&inst, &[4, 0, 0])).unwrap();
        assert!(is_well_balanced(&hat, &inst, 1).unwrap());
        let sigma1 = s.retimed(&inst, x(&inst, &[5, 0, 0])).unwrap();
        assert!(!is_well_balanced(&sigma1, &inst, 1).unwrap());

        let inst = fixture_a(0);
        let hat = initial_schedule(&inst).unwrap().retimed(&inst, x(&inst, &[8, 0])).unwrap();
        assert!(is_well_balanced(&hat, &inst, 2).unwrap());

        let plain = initial_schedule(&inst).unwrap();
        assert!(is_well_balanced(&plain, &inst, 1).is_err());
    }
}
