//! Overflow jobs, kernels, delaying emerging jobs and kernel regularization.
//!
//! A kernel is the longest run of jobs ending in an overflow job `o`, free of
//! idle time, in which no job is due later than `o`. A 0-length gap (a job
//! released exactly when the machine frees up) splits the run only when the
//! part after it could not have started any earlier, i.e. starts at its own
//! earliest release. When the kernel's first job starts after the kernel's
//! earliest release and the machine was busy right up to that start, the job
//! that kept it busy is the kernel's delaying emerging job, and the delay it
//! causes is `Δ(K) = f_e − r(K)`.
//!
//! Regularization rebuilds every irregular kernel from its own ED-schedule,
//! omitting the anticipated emerging jobs that made it irregular, and then
//! re-inserts the omitted jobs into the earliest idle interval they fit.

use std::collections::BTreeSet;
use std::ops::Range;

use crate::ed::ed_schedule;
use crate::error::{Error, Result};
use crate::model::{canonical_timing, CompressionVector, Instance, JobIdx, Schedule, Time};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kernel {
    /// Positions in the schedule's sequence; the last one holds the overflow job.
    pub range: Range<usize>,
    pub jobs: Vec<JobIdx>,
    pub overflow: JobIdx,
    /// `r(K)`, the earliest release among the kernel's jobs.
    pub min_release: Time,
    /// Start time of the kernel's first job.
    pub first_start: Time,
    pub delaying_emerging: Option<JobIdx>,
    /// `Δ(K)`, present together with the delaying emerging job.
    pub delta: Option<Time>,
}

impl Kernel {
    /// The first job starts after `r(K)`, so the kernel could finish earlier.
    pub fn is_delayed(&self) -> bool {
        self.first_start > self.min_release
    }

    pub fn job_set(&self) -> BTreeSet<JobIdx> {
        self.jobs.iter().copied().collect()
    }
}

/// Positions of the overflow jobs: jobs attaining `L(S)`, keeping only the
/// last of every run of such jobs that are adjacent within one block.
pub fn overflow_positions(schedule: &Schedule, instance: &Instance) -> Vec<usize> {
    if schedule.is_empty() {
        return Vec::new();
    }
    let lateness = schedule.lateness(instance);
    let segment = segment_starts(schedule);
    let attains = |p: usize| lateness.per_position[p] == lateness.max;
    (0..schedule.len())
        .filter(|&p| attains(p))
        .filter(|&p| {
            let next = p + 1;
            next >= schedule.len() || !attains(next) || segment[next] != segment[p]
        })
        .collect()
}

pub fn overflow_jobs(schedule: &Schedule, instance: &Instance) -> Vec<JobIdx> {
    overflow_positions(schedule, instance).into_iter().map(|p| schedule.sequence()[p]).collect()
}

/// For every position, the first position of its idle-free segment. Only
/// idle time of positive length separates segments.
fn segment_starts(schedule: &Schedule) -> Vec<usize> {
    let mut out = Vec::with_capacity(schedule.len());
    for p in 0..schedule.len() {
        if p == 0 || schedule.starts()[p] > schedule.completions()[p - 1] {
            out.push(p);
        } else {
            out.push(out[p - 1]);
        }
    }
    out
}

/// First position of the kernel ending at `end`: extend backwards over jobs
/// due no later than `o` without crossing positive idle time, then cut at
/// the earliest position from which the rest of the run starts exactly at
/// its own earliest release (such a cut lies on a 0-length gap).
fn kernel_start(schedule: &Schedule, instance: &Instance, segment: &[usize], end: usize) -> usize {
    let seq = schedule.sequence();
    let due = instance.job(seq[end]).due;
    let mut first = end;
    while first > segment[end] && instance.job(seq[first - 1]).due <= due {
        first -= 1;
    }
    let mut suffix_release = Time::MAX;
    let mut cut = None;
    for q in (first..=end).rev() {
        suffix_release = suffix_release.min(instance.job(seq[q]).release);
        if schedule.starts()[q] == suffix_release {
            cut = Some(q);
        }
    }
    cut.unwrap_or(first)
}

/// The job whose completion holds back the kernel starting at position
/// `first`: the nearest earlier job of positive length processed without
/// idle time up to `first`. Fully compressed jobs occupy no time and are
/// skipped.
fn emerging_position(schedule: &Schedule, first: usize) -> Option<usize> {
    let (starts, completions) = (schedule.starts(), schedule.completions());
    let mut p = first;
    while p > 0 && completions[p - 1] == starts[p] {
        p -= 1;
        if completions[p] > starts[p] {
            return Some(p);
        }
    }
    None
}

pub fn extract_kernels(schedule: &Schedule, instance: &Instance) -> Vec<Kernel> {
    let segment = segment_starts(schedule);
    let seq = schedule.sequence();
    overflow_positions(schedule, instance)
        .into_iter()
        .map(|end| {
            let first = kernel_start(schedule, instance, &segment, end);
            let jobs = seq[first..=end].to_vec();
            let min_release = jobs.iter().map(|&j| instance.job(j).release).min().unwrap();
            let first_start = schedule.starts()[first];
            let (delaying_emerging, delta) = match emerging_position(schedule, first) {
                Some(p) if first_start > min_release => (Some(seq[p]), Some(schedule.completions()[p] - min_release)),
                _ => (None, None),
            };
            Kernel {
                range: first..end + 1,
                jobs,
                overflow: seq[end],
                min_release,
                first_start,
                delaying_emerging,
                delta,
            }
        })
        .collect()
}

/// `Δ_min(S)` over the kernels that have a delaying emerging job.
pub fn delta_min(schedule: &Schedule, instance: &Instance) -> Option<Time> {
    extract_kernels(schedule, instance).iter().filter_map(|k| k.delta).min()
}

/// A kernel is regular when the ED-schedule of its own jobs, started at
/// `r(K)`, has an overflow job due at `d_o`.
pub fn is_regular(kernel: &Kernel, schedule: &Schedule, instance: &Instance) -> bool {
    is_regular_under(kernel, schedule.compression(), instance)
}

fn is_regular_under(kernel: &Kernel, compression: &CompressionVector, instance: &Instance) -> bool {
    let aux = ed_schedule(instance, compression, &kernel.jobs, kernel.min_release)
        .expect("kernel jobs are a nonempty subset of the instance");
    let due = instance.job(kernel.overflow).due;
    overflow_jobs(&aux, instance).into_iter().any(|o| instance.job(o).due == due)
}

/// A gap-free piece of a decomposed kernel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub start: Time,
    pub jobs: Vec<JobIdx>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionResult {
    pub components: Vec<Component>,
    /// Anticipated delaying emerging jobs removed while decomposing.
    pub omitted: Vec<JobIdx>,
}

impl DecompositionResult {
    pub fn sequence(&self) -> Vec<JobIdx> {
        self.components.iter().flat_map(|c| c.jobs.iter().copied()).collect()
    }
}

/// Fully decomposes a kernel's job set.
///
/// The jobs are rescheduled by ED from their earliest release. While the
/// partial schedule has an irregular kernel whose delaying emerging job is
/// anticipated (it moved forward relative to `source_order`), that job is
/// omitted and the kernel is decomposed recursively in place.
pub fn decompose_kernel(
    jobs: &[JobIdx],
    instance: &Instance,
    compression: &CompressionVector,
    source_order: &[JobIdx],
) -> Result<DecompositionResult> {
    if jobs.is_empty() {
        return Err(Error::EmptyJobSet);
    }
    let start = min_release(jobs, instance);
    let (sequence, omitted) = decompose_rec(jobs, instance, compression, source_order, jobs.len())?;
    let schedule = canonical_timing(&sequence, instance, compression, start)?;
    let components = schedule
        .blocks(instance)
        .blocks
        .into_iter()
        .map(|b| Component { start: schedule.starts()[b.start], jobs: sequence[b].to_vec() })
        .collect();
    Ok(DecompositionResult { components, omitted })
}

fn min_release(jobs: &[JobIdx], instance: &Instance) -> Time {
    jobs.iter().map(|&j| instance.job(j).release).min().unwrap_or(0)
}

/// True when `job` sits earlier in `current` than in `source`, both orders
/// restricted to the jobs of `current`.
fn is_anticipated(job: JobIdx, current: &[JobIdx], source: &[JobIdx]) -> bool {
    let now = current.iter().position(|&j| j == job);
    let before = source.iter().filter(|j| current.contains(j)).position(|&j| j == job);
    matches!((now, before), (Some(a), Some(b)) if a < b)
}

fn decompose_rec(
    jobs: &[JobIdx],
    instance: &Instance,
    compression: &CompressionVector,
    source_order: &[JobIdx],
    depth_left: usize,
) -> Result<(Vec<JobIdx>, Vec<JobIdx>)> {
    let start = min_release(jobs, instance);
    let mut sequence = ed_schedule(instance, compression, jobs, start)?.sequence().to_vec();
    let mut omitted = Vec::new();

    loop {
        let partial = canonical_timing(&sequence, instance, compression, start)?;
        let target = extract_kernels(&partial, instance).into_iter().find(|k| {
            k.delaying_emerging.is_some_and(|e| is_anticipated(e, &sequence, source_order))
                && !is_regular(k, &partial, instance)
        });
        let Some(kernel) = target else { break };
        if depth_left == 0 {
            return Err(Error::Internal("kernel decomposition exceeded its depth guard".into()));
        }

        let emerging = kernel.delaying_emerging.unwrap();
        let (inner, inner_omitted) = decompose_rec(&kernel.jobs, instance, compression, &sequence, depth_left - 1)?;
        let mut next = Vec::with_capacity(sequence.len());
        for (pos, &j) in sequence.iter().enumerate() {
            if j == emerging || (kernel.range.contains(&pos) && pos != kernel.range.start) {
                continue;
            }
            if pos == kernel.range.start {
                next.extend_from_slice(&inner);
            } else {
                next.push(j);
            }
        }
        omitted.push(emerging);
        omitted.extend(inner_omitted);
        sequence = next;
    }
    Ok((sequence, omitted))
}

/// Builds `(S)*`: every irregular kernel that starts after its earliest
/// release is replaced, together with its delaying emerging job, by its
/// decomposition (pass 1); then the omitted jobs and the removed emerging
/// jobs are put back by ED into the earliest idle interval, shifting later
/// jobs right (pass 2).
pub fn regularize(schedule: &Schedule, instance: &Instance) -> Result<Schedule> {
    let kernels = extract_kernels(schedule, instance);
    let compression = schedule.compression();

    // (segment of positions to replace, decomposition)
    let mut replaced: Vec<(Range<usize>, DecompositionResult, Option<JobIdx>)> = Vec::new();
    for kernel in &kernels {
        // a delayed kernel without an emerging job sits behind idle time
        // that one of its own jobs could have used: always rebuild it
        let rebuild = match kernel.delaying_emerging {
            Some(_) => !is_regular(kernel, schedule, instance),
            None => true,
        };
        if !kernel.is_delayed() || !rebuild {
            continue;
        }
        let segment = match kernel.delaying_emerging {
            Some(e) => schedule.position_of(e).expect("emerging job is scheduled")..kernel.range.end,
            None => kernel.range.clone(),
        };
        if replaced.iter().any(|(r, _, _)| r.start < segment.end && segment.start < r.end) {
            continue;
        }
        let parts = decompose_kernel(&kernel.jobs, instance, compression, schedule.sequence())?;
        replaced.push((segment, parts, kernel.delaying_emerging));
    }
    if replaced.is_empty() {
        return Ok(schedule.clone());
    }

    let mut sequence = Vec::with_capacity(schedule.len());
    for (pos, &j) in schedule.sequence().iter().enumerate() {
        match replaced.iter().find(|(r, _, _)| r.contains(&pos)) {
            Some((r, parts, _)) if r.start == pos => sequence.extend(parts.sequence()),
            Some(_) => {}
            None => sequence.push(j),
        }
    }
    let mut pending: Vec<JobIdx> = replaced
        .iter()
        .flat_map(|(_, parts, e)| parts.omitted.iter().copied().chain(*e))
        .filter(|j| !sequence.contains(j))
        .collect();
    pending.sort_unstable();
    pending.dedup();

    while !pending.is_empty() {
        let current = canonical_timing(&sequence, instance, compression, schedule.earliest_start())?;
        let (pos, job) = next_insertion(&current, instance, &pending);
        sequence.insert(pos, job);
        pending.retain(|&j| j != job);
    }
    canonical_timing(&sequence, instance, compression, schedule.earliest_start())
}

/// Chooses where the next omitted job goes: the chronologically first idle
/// interval in which some pending job is available, else the end.
fn next_insertion(schedule: &Schedule, instance: &Instance, pending: &[JobIdx]) -> (usize, JobIdx) {
    let urgent_released_by = |t: Time| {
        pending
            .iter()
            .copied()
            .filter(|&j| instance.job(j).release <= t)
            .min_by_key(|&j| (instance.job(j).due, instance.job(j).release, j))
    };
    let first_released_before = |t: Time| {
        pending
            .iter()
            .copied()
            .filter(|&j| instance.job(j).release < t)
            .min_by_key(|&j| (instance.job(j).release, instance.job(j).due, j))
    };

    let mut idle_from = schedule.earliest_start();
    for pos in 0..schedule.len() {
        let gap_end = schedule.starts()[pos];
        if gap_end > idle_from {
            if let Some(j) = urgent_released_by(idle_from).or_else(|| first_released_before(gap_end)) {
                return (pos, j);
            }
        }
        idle_from = schedule.completions()[pos];
    }
    let j = urgent_released_by(idle_from).unwrap_or_else(|| {
        pending.iter().copied().min_by_key(|&j| (instance.job(j).release, instance.job(j).due, j)).unwrap()
    });
    (schedule.len(), j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ed::initial_schedule;
    use crate::model::fixtures::*;
    use crate::model::Job;

    #[test]
    fn overflow_fixture_a() {
        let inst = fixture_a(0);
        let s = initial_schedule(&inst).unwrap();
        assert_eq!(overflow_jobs(&s, &inst), vec![1]);
    }

    #[test]
    fn overflow_keeps_last_of_consecutive_run() {
        // c and d both finish with lateness 2, back to back
        let inst = Instance::new(
            vec![
                Job::new("a", 0, 50, 2, 1),
                Job::new("b", 0, 50, 2, 1),
                Job::new("c", 0, 4, 4, 1),
                Job::new("d", 0, 6, 2, 1),
            ],
            0,
        )
        .unwrap();
        let s = canonical_timing(&[0, 1, 2, 3], &inst, &CompressionVector::zeros(&inst), 0).unwrap();
        assert_eq!(s.lateness(&inst).per_position, vec![-48, -46, 4, 4]);
        assert_eq!(overflow_jobs(&s, &inst), vec![3]);
    }

    #[test]
    fn overflow_split_by_block_boundary() {
        let inst = fixture_b(0);
        let s = canonical_timing(&[0, 1, 2], &inst, &x(&inst, &[4, 0, 0]), 0).unwrap();
        assert_eq!(s.starts(), &[0, 2, 9]);
        assert_eq!(s.lateness(&inst).per_position, vec![-28, 1, 1]);
        assert_eq!(overflow_jobs(&s, &inst), vec![1, 2]);
    }

    #[test]
    fn kernel_fixture_a() {
        let inst = fixture_a(0);
        let s = initial_schedule(&inst).unwrap();
        let k = extract_kernels(&s, &inst);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].jobs, vec![1]);
        assert_eq!(k[0].min_release, 2);
        assert_eq!(k[0].delaying_emerging, Some(0));
        assert_eq!(k[0].delta, Some(8));
        assert!(is_regular(&k[0], &s, &inst));
        assert_eq!(delta_min(&s, &inst), Some(8));
    }

    #[test]
    fn kernel_fixture_c_irregular() {
        let inst = fixture_c(0);
        let s = initial_schedule(&inst).unwrap();
        let k = extract_kernels(&s, &inst);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].jobs, vec![1, 2]);
        assert_eq!(k[0].min_release, 2);
        assert_eq!(k[0].delaying_emerging, Some(0));
        assert_eq!(k[0].delta, Some(3));
        assert!(!is_regular(&k[0], &s, &inst));
    }

    #[test]
    fn delta_min_fixture_b() {
        let inst = fixture_b(0);
        let s = initial_schedule(&inst).unwrap();
        let k = extract_kernels(&s, &inst);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].jobs, vec![1]);
        assert_eq!(k[0].delaying_emerging, Some(0));
        assert_eq!(delta_min(&s, &inst), Some(5));
    }

    #[test]
    fn kernel_at_block_start_has_no_emerging_job() {
        let inst = Instance::new(vec![Job::new("a", 0, 5, 3, 1), Job::new("b", 10, 11, 4, 1)], 0).unwrap();
        let s = initial_schedule(&inst).unwrap();
        let k = extract_kernels(&s, &inst);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].jobs, vec![1]);
        assert_eq!(k[0].delaying_emerging, None);
        assert_eq!(k[0].delta, None);
        assert_eq!(delta_min(&s, &inst), None);
    }

    #[test]
    fn decompose_fixture_c() {
        let inst = fixture_c(0);
        let s = initial_schedule(&inst).unwrap();
        let d = decompose_kernel(&[1, 2], &inst, s.compression(), s.sequence()).unwrap();
        assert_eq!(d.components, vec![Component { start: 2, jobs: vec![2, 1] }]);
        assert!(d.omitted.is_empty());
    }

    #[test]
    fn decompose_single_job() {
        let inst = fixture_a(0);
        let d = decompose_kernel(&[1], &inst, &CompressionVector::zeros(&inst), &[0, 1]).unwrap();
        assert_eq!(d.components, vec![Component { start: 2, jobs: vec![1] }]);
        assert!(d.omitted.is_empty());
    }

    #[test]
    fn regularize_fixture_c() {
        let inst = fixture_c(0);
        let s = initial_schedule(&inst).unwrap();
        let r = regularize(&s, &inst).unwrap();
        assert_eq!(r.sequence(), &[0, 2, 1]);
        assert_eq!(r.starts(), &[0, 5, 9]);
        assert_eq!(r.lateness(&inst).per_position, vec![-94, -3, 1]);
        let k = extract_kernels(&r, &inst);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].jobs, vec![1]);
        assert_eq!(k[0].delaying_emerging, Some(2));
        assert!(is_regular(&k[0], &r, &inst));
    }

    #[test]
    fn regularize_keeps_regular_schedule() {
        let inst = fixture_a(0);
        let s = initial_schedule(&inst).unwrap();
        assert_eq!(regularize(&s, &inst).unwrap(), s);
        let inst = fixture_b(0);
        let s = initial_schedule(&inst).unwrap();
        assert_eq!(regularize(&s, &inst).unwrap(), s);
    }
}
