//! Problem data, compression vectors and canonically timed schedules.
//!
//! A schedule is fully determined by its job sequence, its compression
//! vector and the earliest time the machine may start: every job starts at
//! `max(release, completion of predecessor)`.

use std::collections::HashSet;
use std::ops::Range;

use crate::error::{Error, Result};

/// Integer time unit used for release dates, due dates and durations.
pub type Time = i64;

/// Integer cost unit.
pub type Cost = i64;

/// Index of a job inside its [`Instance`].
pub type JobIdx = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Job {
    pub id: String,
    pub release: Time,
    pub due: Time,
    /// Uncompressed processing time.
    pub processing: Time,
    /// Cost of compressing the job by one time unit.
    pub unit_cost: Cost,
}

impl Job {
    pub fn new(id: impl Into<String>, release: Time, due: Time, processing: Time, unit_cost: Cost) -> Self {
        Self { id: id.into(), release, due, processing, unit_cost }
    }

    fn validate(&self) -> Result<()> {
        let reason = if self.release < 0 {
            "release must be >= 0"
        } else if self.due < 1 {
            "due must be >= 1"
        } else if self.processing < 1 {
            "processing must be >= 1"
        } else if self.unit_cost < 1 {
            "unit_cost must be >= 1"
        } else {
            return Ok(());
        };
        Err(Error::InvalidJob { id: self.id.clone(), reason: reason.to_string() })
    }
}

/// A validated job set together with the compression budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    jobs: Vec<Job>,
    budget: Cost,
}

impl Instance {
    pub fn new(jobs: Vec<Job>, budget: Cost) -> Result<Self> {
        if budget < 0 {
            return Err(Error::NegativeBudget(budget));
        }
        let mut seen = HashSet::with_capacity(jobs.len());
        for job in &jobs {
            job.validate()?;
            if !seen.insert(job.id.as_str()) {
                return Err(Error::DuplicateId(job.id.clone()));
            }
        }
        Ok(Self { jobs, budget })
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, idx: JobIdx) -> &Job {
        &self.jobs[idx]
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn budget(&self) -> Cost {
        self.budget
    }

    pub fn with_budget(&self, budget: Cost) -> Result<Self> {
        Self::new(self.jobs.clone(), budget)
    }

    /// Largest uncompressed processing time, 0 for an empty instance.
    pub fn p_max(&self) -> Time {
        self.jobs.iter().map(|j| j.processing).max().unwrap_or(0)
    }

    pub fn index_of(&self, id: &str) -> Option<JobIdx> {
        self.jobs.iter().position(|j| j.id == id)
    }

    pub fn all_jobs(&self) -> Vec<JobIdx> {
        (0..self.jobs.len()).collect()
    }

    /// Cost of compressing every job completely.
    pub fn full_compression_cost(&self) -> Cost {
        self.jobs.iter().map(|j| j.processing * j.unit_cost).sum()
    }
}

/// Per-job compression amounts, indexed like the instance's jobs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompressionVector(Vec<Time>);

impl CompressionVector {
    pub fn zeros(instance: &Instance) -> Self {
        Self(vec![0; instance.len()])
    }

    pub fn new(instance: &Instance, amounts: Vec<Time>) -> Result<Self> {
        let v = Self(amounts);
        v.validate(instance)?;
        Ok(v)
    }

    pub fn validate(&self, instance: &Instance) -> Result<()> {
        if self.0.len() != instance.len() {
            return Err(Error::CompressionLength { expected: instance.len(), got: self.0.len() });
        }
        for (job, &x) in instance.jobs().iter().zip(&self.0) {
            if x < 0 || x > job.processing {
                return Err(Error::CompressionOutOfRange { id: job.id.clone(), x, max: job.processing });
            }
        }
        Ok(())
    }

    pub fn get(&self, job: JobIdx) -> Time {
        self.0[job]
    }

    pub fn as_slice(&self) -> &[Time] {
        &self.0
    }

    /// Effective processing time `a_j - x_j`.
    pub fn processing(&self, instance: &Instance, job: JobIdx) -> Time {
        instance.job(job).processing - self.0[job]
    }

    /// Changes `x_job` by `delta`, clamped to `[0, a_job]`. Returns the
    /// change actually applied.
    pub fn adjust(&mut self, instance: &Instance, job: JobIdx, delta: Time) -> Time {
        let old = self.0[job];
        let new = (old + delta).clamp(0, instance.job(job).processing);
        self.0[job] = new;
        new - old
    }

    pub fn total_cost(&self, instance: &Instance) -> Cost {
        total_cost(self, instance)
    }

    /// Jobs with a positive compression, in index order.
    pub fn compressed_jobs(&self) -> Vec<JobIdx> {
        self.0.iter().enumerate().filter(|(_, &x)| x > 0).map(|(j, _)| j).collect()
    }
}

/// `sum_j x_j * c_j`.
pub fn total_cost(compression: &CompressionVector, instance: &Instance) -> Cost {
    instance.jobs().iter().zip(compression.as_slice()).map(|(j, &x)| x * j.unit_cost).sum()
}

/// Eq. budget predicate: total compression cost within the budget.
pub fn is_feasible(compression: &CompressionVector, instance: &Instance) -> bool {
    total_cost(compression, instance) <= instance.budget()
}

/// A job sequence with its canonical earliest-start timing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    sequence: Vec<JobIdx>,
    compression: CompressionVector,
    earliest_start: Time,
    starts: Vec<Time>,
    completions: Vec<Time>,
}

/// Builds the canonical timing of `sequence`: the first job starts at
/// `max(earliest_start, r)`, every other job at `max(r, predecessor's completion)`.
pub fn canonical_timing(
    sequence: &[JobIdx],
    instance: &Instance,
    compression: &CompressionVector,
    earliest_start: Time,
) -> Result<Schedule> {
    compression.validate(instance)?;
    let mut seen = vec![false; instance.len()];
    let mut starts = Vec::with_capacity(sequence.len());
    let mut completions = Vec::with_capacity(sequence.len());
    let mut t = earliest_start;
    for &j in sequence {
        if j >= instance.len() {
            return Err(Error::UnknownJob(j));
        }
        if std::mem::replace(&mut seen[j], true) {
            return Err(Error::DuplicateJob(instance.job(j).id.clone()));
        }
        let s = t.max(instance.job(j).release);
        let f = s + compression.processing(instance, j);
        starts.push(s);
        completions.push(f);
        t = f;
    }
    Ok(Schedule { sequence: sequence.to_vec(), compression: compression.clone(), earliest_start, starts, completions })
}

impl Schedule {
    pub fn sequence(&self) -> &[JobIdx] {
        &self.sequence
    }

    pub fn compression(&self) -> &CompressionVector {
        &self.compression
    }

    pub fn earliest_start(&self) -> Time {
        self.earliest_start
    }

    /// Start times aligned with [`Schedule::sequence`].
    pub fn starts(&self) -> &[Time] {
        &self.starts
    }

    /// Completion times aligned with [`Schedule::sequence`].
    pub fn completions(&self) -> &[Time] {
        &self.completions
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn position_of(&self, job: JobIdx) -> Option<usize> {
        self.sequence.iter().position(|&j| j == job)
    }

    pub fn start_of(&self, job: JobIdx) -> Option<Time> {
        self.position_of(job).map(|p| self.starts[p])
    }

    pub fn completion_of(&self, job: JobIdx) -> Option<Time> {
        self.position_of(job).map(|p| self.completions[p])
    }

    /// Same sequence and start offset, timed under another compression vector.
    pub fn retimed(&self, instance: &Instance, compression: CompressionVector) -> Result<Schedule> {
        canonical_timing(&self.sequence, instance, &compression, self.earliest_start)
    }

    /// Same compression and start offset, another sequence.
    pub fn resequenced(&self, instance: &Instance, sequence: &[JobIdx]) -> Result<Schedule> {
        canonical_timing(sequence, instance, &self.compression, self.earliest_start)
    }

    pub fn lateness(&self, instance: &Instance) -> LatenessProfile {
        lateness_profile(self, instance)
    }

    /// `L(S)`; `Time::MIN` for an empty schedule.
    pub fn max_lateness(&self, instance: &Instance) -> Time {
        self.lateness(instance).max
    }

    pub fn total_cost(&self, instance: &Instance) -> Cost {
        total_cost(&self.compression, instance)
    }

    pub fn blocks(&self, instance: &Instance) -> BlockPartition {
        blocks_and_gaps(self, instance)
    }
}

/// Lateness of every scheduled job (aligned with the sequence) and their maximum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatenessProfile {
    pub per_position: Vec<Time>,
    pub max: Time,
}

impl LatenessProfile {
    pub fn of(&self, schedule: &Schedule, job: JobIdx) -> Option<Time> {
        schedule.position_of(job).map(|p| self.per_position[p])
    }
}

pub fn lateness_profile(schedule: &Schedule, instance: &Instance) -> LatenessProfile {
    let per_position: Vec<Time> =
        schedule.sequence.iter().zip(&schedule.completions).map(|(&j, &f)| f - instance.job(j).due).collect();
    let max = per_position.iter().copied().max().unwrap_or(Time::MIN);
    LatenessProfile { per_position, max }
}

/// Idle interval between two blocks. `start == end` marks a block boundary
/// where the next job is released exactly when the machine frees up.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gap {
    pub start: Time,
    pub end: Time,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPartition {
    /// Position ranges into the schedule's sequence.
    pub blocks: Vec<Range<usize>>,
    /// `gaps[i]` separates `blocks[i]` and `blocks[i + 1]`.
    pub gaps: Vec<Gap>,
}

impl BlockPartition {
    pub fn block_of(&self, position: usize) -> usize {
        self.blocks.iter().position(|b| b.contains(&position)).expect("position outside schedule")
    }
}

/// Splits a schedule into blocks: a job opens a new block exactly when it
/// starts at its own release time.
pub fn blocks_and_gaps(schedule: &Schedule, instance: &Instance) -> BlockPartition {
    let mut blocks = Vec::new();
    let mut gaps = Vec::new();
    if schedule.is_empty() {
        return BlockPartition { blocks, gaps };
    }
    let mut open = 0;
    for pos in 1..schedule.len() {
        let job = schedule.sequence[pos];
        if schedule.starts[pos] == instance.job(job).release {
            blocks.push(open..pos);
            gaps.push(Gap { start: schedule.completions[pos - 1], end: schedule.starts[pos] });
            open = pos;
        }
    }
    blocks.push(open..schedule.len());
    BlockPartition { blocks, gaps }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn fixture_a_timing() {
        let inst = fixture_a(0);
        let s = canonical_timing(&[0, 1], &inst, &x(&inst, &[0, 0]), 0).unwrap();
        assert_eq!(s.starts(), &[0, 10]);
        assert_eq!(s.completions(), &[10, 13]);

        let s = canonical_timing(&[0, 1], &inst, &x(&inst, &[8, 0]), 0).unwrap();
        assert_eq!(s.starts(), &[0, 2]);
        assert_eq!(s.completions(), &[2, 5]);
    }

    #[test]
    fn single_job_waits_for_release() {
        let inst = Instance::new(vec![Job::new("a", 4, 9, 3, 1)], 0).unwrap();
        let s = canonical_timing(&[0], &inst, &CompressionVector::zeros(&inst), 0).unwrap();
        assert_eq!((s.starts()[0], s.completions()[0]), (4, 7));
    }

    #[test]
    fn earliest_start_delays_first_job() {
        let inst = fixture_a(0);
        let s = canonical_timing(&[1], &inst, &CompressionVector::zeros(&inst), 5).unwrap();
        assert_eq!(s.starts(), &[5]);
    }

    #[test]
    fn timing_errors() {
        let inst = fixture_a(0);
        let zero = CompressionVector::zeros(&inst);
        assert_eq!(canonical_timing(&[0, 7], &inst, &zero, 0), Err(Error::UnknownJob(7)));
        assert!(matches!(canonical_timing(&[0, 0], &inst, &zero, 0), Err(Error::DuplicateJob(_))));
        assert!(matches!(
            CompressionVector::new(&inst, vec![11, 0]),
            Err(Error::CompressionOutOfRange { x: 11, max: 10, .. })
        ));
    }

    #[test]
    fn lateness_fixture_a() {
        let inst = fixture_a(0);
        let s = canonical_timing(&[0, 1], &inst, &x(&inst, &[0, 0]), 0).unwrap();
        let l = s.lateness(&inst);
        assert_eq!(l.per_position, vec![-10, 7]);
        assert_eq!(l.max, 7);

        let s = s.retimed(&inst, x(&inst, &[8, 0])).unwrap();
        let l = s.lateness(&inst);
        assert_eq!(l.per_position, vec![-18, -1]);
        assert_eq!(l.max, -1);
    }

    #[test]
    fn lateness_zero_on_due_date() {
        let inst = Instance::new(vec![Job::new("a", 0, 3, 3, 1)], 0).unwrap();
        let s = canonical_timing(&[0], &inst, &CompressionVector::zeros(&inst), 0).unwrap();
        assert_eq!(s.max_lateness(&inst), 0);
    }

    #[test]
    fn cost_and_feasibility() {
        let inst = fixture_a(5);
        assert_eq!(total_cost(&x(&inst, &[8, 0]), &inst), 8);
        assert_eq!(total_cost(&CompressionVector::zeros(&inst), &inst), 0);
        assert!(is_feasible(&CompressionVector::zeros(&fixture_a(0)), &fixture_a(0)));
        assert_eq!(total_cost(&x(&inst, &[5, 0]), &inst), 5);
        assert!(is_feasible(&x(&inst, &[5, 0]), &inst));
        assert_eq!(total_cost(&x(&inst, &[6, 0]), &inst), 6);
        assert!(!is_feasible(&x(&inst, &[6, 0]), &inst));
    }

    #[test]
    fn blocks_fixture_a_and_b() {
        let inst = fixture_a(0);
        let s = canonical_timing(&[0, 1], &inst, &x(&inst, &[0, 0]), 0).unwrap();
        let p = s.blocks(&inst);
        assert_eq!(p.blocks, vec![0..2]);
        assert!(p.gaps.is_empty());

        let inst = fixture_b(0);
        let s = canonical_timing(&[0, 1, 2], &inst, &CompressionVector::zeros(&inst), 0).unwrap();
        let p = s.blocks(&inst);
        assert_eq!(p.blocks, vec![0..2, 2..3]);
        assert_eq!(p.gaps, vec![Gap { start: 8, end: 9 }]);
    }

    #[test]
    fn zero_length_gap_opens_block() {
        // b is released exactly when a completes
        let inst = Instance::new(vec![Job::new("a", 0, 10, 3, 1), Job::new("b", 3, 10, 2, 1)], 0).unwrap();
        let s = canonical_timing(&[0, 1], &inst, &CompressionVector::zeros(&inst), 0).unwrap();
        let p = s.blocks(&inst);
        assert_eq!(p.blocks, vec![0..1, 1..2]);
        assert_eq!(p.gaps, vec![Gap { start: 3, end: 3 }]);
    }

    #[test]
    fn instance_validation() {
        assert!(matches!(
            Instance::new(vec![Job::new("a", 0, 1, 1, 1), Job::new("a", 0, 1, 1, 1)], 0),
            Err(Error::DuplicateId(id)) if id == "a"
        ));
        assert!(matches!(Instance::new(vec![Job::new("a", 0, 1, 0, 1)], 0), Err(Error::InvalidJob { .. })));
        assert!(matches!(Instance::new(vec![Job::new("a", 0, 1, 1, 0)], 0), Err(Error::InvalidJob { .. })));
        assert!(matches!(Instance::new(vec![Job::new("a", -1, 1, 1, 1)], 0), Err(Error::InvalidJob { .. })));
        assert_eq!(Instance::new(vec![], -1), Err(Error::NegativeBudget(-1)));
        assert_eq!(fixture_a(0).p_max(), 10);
    }
}
