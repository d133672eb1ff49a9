//! Instance and result documents (integer-only JSON) and trace CSV export.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algorithms::{RunTrace, SolveOutcome};
use crate::error::{Error, Result};
use crate::model::{canonical_timing, CompressionVector, Cost, Instance, Job, JobIdx, Time};

pub const INSTANCE_VERSION: &str = "latesched-instance/1";
pub const RESULT_VERSION: &str = "latesched-result/1";
pub const ORACLE_VERSION: &str = "latesched-oracle/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobEntry {
    pub id: String,
    pub release: Time,
    pub due: Time,
    pub processing: Time,
    pub unit_cost: Cost,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub version: String,
    pub jobs: Vec<JobEntry>,
    pub budget: Cost,
}

impl From<&Instance> for InstanceDocument {
    fn from(instance: &Instance) -> Self {
        Self {
            version: INSTANCE_VERSION.to_string(),
            jobs: instance
                .jobs()
                .iter()
                .map(|j| JobEntry {
                    id: j.id.clone(),
                    release: j.release,
                    due: j.due,
                    processing: j.processing,
                    unit_cost: j.unit_cost,
                })
                .collect(),
            budget: instance.budget(),
        }
    }
}

impl InstanceDocument {
    pub fn to_instance(&self) -> Result<Instance> {
        check_version(&self.version, INSTANCE_VERSION)?;
        let jobs =
            self.jobs.iter().map(|j| Job::new(j.id.clone(), j.release, j.due, j.processing, j.unit_cost)).collect();
        Instance::new(jobs, self.budget)
    }
}

fn check_version(found: &str, expected: &str) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(Error::Document { path: "version".into(), message: format!("expected `{expected}`, found `{found}`") })
    }
}

fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| Error::Document { path: e.path().to_string(), message: e.inner().to_string() })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("documents serialize infallibly");
    out.push('\n');
    out
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    from_json::<InstanceDocument>(text)?.to_instance()
}

pub fn write_instance(instance: &Instance) -> String {
    to_json(&InstanceDocument::from(instance))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduledJob {
    pub id: String,
    pub compression: Time,
    pub start: Time,
    pub completion: Time,
    pub lateness: Time,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelEntry {
    pub jobs: Vec<String>,
    pub overflow: String,
    pub emerging: Option<String>,
    pub delta: Option<Time>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaEntry {
    pub id: String,
    pub delta: Time,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterationEntry {
    pub h: usize,
    pub lambda: Option<Time>,
    pub delta_min: Option<Time>,
    pub max_lateness: Time,
    pub cost: Cost,
    pub kernels: Vec<KernelEntry>,
    pub compression_deltas: Vec<DeltaEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepairEntry {
    pub excess: Cost,
    pub k: usize,
    pub xi: Time,
    pub extra_units: Time,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceDocument {
    pub terminal_reason: String,
    pub compressed_emerging: Vec<String>,
    pub repair: Option<RepairEntry>,
    pub iterations: Vec<IterationEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDocument {
    pub version: String,
    pub algorithm: String,
    pub budget: Cost,
    pub sequence: Vec<String>,
    /// In sequence order.
    pub jobs: Vec<ScheduledJob>,
    pub max_lateness: Time,
    pub total_cost: Cost,
    pub feasible: bool,
    pub certificate: Option<Vec<String>>,
    pub trace: Option<TraceDocument>,
}

fn ids(instance: &Instance, jobs: &[JobIdx]) -> Vec<String> {
    jobs.iter().map(|&j| instance.job(j).id.clone()).collect()
}

fn trace_document(trace: &RunTrace, instance: &Instance) -> TraceDocument {
    let id = |j: JobIdx| instance.job(j).id.clone();
    TraceDocument {
        terminal_reason: trace.terminal_reason.name().to_string(),
        compressed_emerging: ids(instance, &trace.compressed_emerging),
        repair: trace.repair.as_ref().map(|r| RepairEntry {
            excess: r.excess,
            k: r.k,
            xi: r.xi,
            extra_units: r.extra_units,
        }),
        iterations: trace
            .iterations
            .iter()
            .map(|it| IterationEntry {
                h: it.h,
                lambda: it.lambda,
                delta_min: it.delta_min,
                max_lateness: it.max_lateness,
                cost: it.cost,
                kernels: it
                    .kernels
                    .iter()
                    .map(|k| KernelEntry {
                        jobs: ids(instance, &k.jobs),
                        overflow: id(k.overflow),
                        emerging: k.emerging.map(id),
                        delta: k.delta,
                    })
                    .collect(),
                compression_deltas: it
                    .compression_deltas
                    .iter()
                    .map(|&(j, d)| DeltaEntry { id: id(j), delta: d })
                    .collect(),
            })
            .collect(),
    }
}

impl ResultDocument {
    pub fn from_outcome(outcome: &SolveOutcome, instance: &Instance, with_trace: bool) -> Self {
        let s = &outcome.schedule;
        let lateness = s.lateness(instance);
        let jobs = s
            .sequence()
            .iter()
            .enumerate()
            .map(|(p, &j)| ScheduledJob {
                id: instance.job(j).id.clone(),
                compression: s.compression().get(j),
                start: s.starts()[p],
                completion: s.completions()[p],
                lateness: lateness.per_position[p],
            })
            .collect();
        Self {
            version: RESULT_VERSION.to_string(),
            algorithm: outcome.algorithm.name().to_string(),
            budget: instance.budget(),
            sequence: ids(instance, s.sequence()),
            jobs,
            max_lateness: outcome.max_lateness,
            total_cost: outcome.total_cost,
            feasible: outcome.feasible,
            certificate: outcome.certificate.as_ref().map(|k| ids(instance, &k.jobs)),
            trace: with_trace.then(|| trace_document(&outcome.trace, instance)),
        }
    }

    /// Re-derives the timing from the sequence and compressions alone and
    /// checks every reported number against it.
    pub fn check_against(&self, instance: &Instance) -> Result<()> {
        check_version(&self.version, RESULT_VERSION)?;
        let mismatch = |path: String, message: String| Err(Error::Document { path, message });
        if self.sequence.len() != instance.len() || self.jobs.len() != instance.len() {
            return mismatch("sequence".into(), "must list every job exactly once".into());
        }
        let mut x = vec![0; instance.len()];
        let mut seq = Vec::with_capacity(instance.len());
        for (p, (id, entry)) in self.sequence.iter().zip(&self.jobs).enumerate() {
            let Some(j) = instance.index_of(id) else {
                return mismatch(format!("sequence[{p}]"), format!("unknown job `{id}`"));
            };
            if entry.id != *id {
                return mismatch(format!("jobs[{p}].id"), format!("expected `{id}`"));
            }
            x[j] = entry.compression;
            seq.push(j);
        }
        let x = CompressionVector::new(instance, x)?;
        let schedule = canonical_timing(&seq, instance, &x, 0)?;
        let lateness = schedule.lateness(instance);
        for (p, entry) in self.jobs.iter().enumerate() {
            let derived = (schedule.starts()[p], schedule.completions()[p], lateness.per_position[p]);
            if (entry.start, entry.completion, entry.lateness) != derived {
                return mismatch(format!("jobs[{p}]"), format!("timing differs from re-derived {derived:?}"));
            }
        }
        if self.max_lateness != lateness.max {
            return mismatch("max_lateness".into(), format!("re-derived {}", lateness.max));
        }
        let cost = x.total_cost(instance);
        if self.total_cost != cost {
            return mismatch("total_cost".into(), format!("re-derived {cost}"));
        }
        if self.feasible != (cost <= instance.budget()) {
            return mismatch("feasible".into(), "disagrees with total_cost and budget".into());
        }
        Ok(())
    }
}

pub fn write_result(outcome: &SolveOutcome, instance: &Instance, with_trace: bool) -> String {
    to_json(&ResultDocument::from_outcome(outcome, instance, with_trace))
}

pub fn parse_result(text: &str) -> Result<ResultDocument> {
    let doc: ResultDocument = from_json(text)?;
    check_version(&doc.version, RESULT_VERSION)?;
    Ok(doc)
}

pub fn result_to_string(doc: &ResultDocument) -> String {
    to_json(doc)
}

/// Exact optima of an instance. The compressible part is absent when the
/// instance exceeds that oracle's size guard.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleDocument {
    pub version: String,
    pub budget: Cost,
    /// Optimum without compression.
    pub generic_optimum: Time,
    pub compressible: Option<CompressibleEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompressibleEntry {
    pub optimum: Time,
    pub total_cost: Cost,
    /// Lexicographically smallest optimal compression vector, in job order.
    pub compression: Vec<CompressionEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompressionEntry {
    pub id: String,
    pub x: Time,
}

impl OracleDocument {
    pub fn new(instance: &Instance, generic_optimum: Time, compressible: Option<(Time, &CompressionVector)>) -> Self {
        Self {
            version: ORACLE_VERSION.to_string(),
            budget: instance.budget(),
            generic_optimum,
            compressible: compressible.map(|(optimum, x)| CompressibleEntry {
                optimum,
                total_cost: x.total_cost(instance),
                compression: instance
                    .jobs()
                    .iter()
                    .zip(x.as_slice())
                    .map(|(j, &x)| CompressionEntry { id: j.id.clone(), x })
                    .collect(),
            }),
        }
    }
}

pub fn write_oracle(doc: &OracleDocument) -> String {
    to_json(doc)
}

/// Trace as CSV with columns `h,lambda,delta_min,L,cost`; absent values are empty.
pub fn write_trace_csv<W: std::io::Write>(trace: &RunTrace, writer: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["h", "lambda", "delta_min", "L", "cost"])?;
    let opt = |v: Option<Time>| v.map(|v| v.to_string()).unwrap_or_default();
    for it in &trace.iterations {
        w.write_record([
            it.h.to_string(),
            opt(it.lambda),
            opt(it.delta_min),
            it.max_lateness.to_string(),
            it.cost.to_string(),
        ])?;
    }
    w.flush()
}
