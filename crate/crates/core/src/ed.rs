//! Earliest-due-date list scheduling for jobs with release times
//! (Jackson's rule extended by Schrage).

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::model::{canonical_timing, CompressionVector, Instance, JobIdx, Schedule, Time};

/// Builds the ED-schedule of `jobs` starting no earlier than `start_time`.
///
/// At every decision time the released job with the smallest due date is
/// dispatched; ties go to the smaller release time, then to the smaller job
/// index. When nothing is released the clock jumps to the next release.
pub fn ed_schedule(
    instance: &Instance,
    compression: &CompressionVector,
    jobs: &[JobIdx],
    start_time: Time,
) -> Result<Schedule> {
    if jobs.is_empty() {
        return Err(Error::EmptyJobSet);
    }
    if let Some(&bad) = jobs.iter().find(|&&j| j >= instance.len()) {
        return Err(Error::UnknownJob(bad));
    }

    let mut pending: Vec<JobIdx> = jobs.to_vec();
    // popped from the back: latest release first in the vector
    pending.sort_by_key(|&j| Reverse((instance.job(j).release, j)));

    let mut ready = BinaryHeap::new();
    let mut sequence = Vec::with_capacity(jobs.len());
    let mut t = start_time.max(instance.job(*pending.last().unwrap()).release);

    while sequence.len() < jobs.len() {
        while let Some(&j) = pending.last() {
            let job = instance.job(j);
            if job.release > t {
                break;
            }
            ready.push(Reverse((job.due, job.release, j)));
            pending.pop();
        }
        match ready.pop() {
            Some(Reverse((_, _, j))) => {
                sequence.push(j);
                t += compression.processing(instance, j);
            }
            None => t = instance.job(*pending.last().unwrap()).release,
        }
    }

    canonical_timing(&sequence, instance, compression, start_time)
}

/// The initial ED-schedule: all jobs, uncompressed, from time 0.
pub fn initial_schedule(instance: &Instance) -> Result<Schedule> {
    ed_schedule(instance, &CompressionVector::zeros(instance), &instance.all_jobs(), 0)
}
