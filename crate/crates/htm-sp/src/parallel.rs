//! Data-parallel Spatial Pooler backend.
//!
//! Mirrors a work-group-per-column accelerator layout: every column maps to
//! one logical group of `group_size` work items. The overlap kernel stages
//! the connected/active synapse predicate into group-local storage, runs a
//! binary tree reduction to the raw count and applies boost and cutoff
//! inside the group. The fused kernel adds a second pass that re-fetches
//! each column's neighborhood slice from the global overlap buffer, selects
//! the n-th largest competitor and applies the strict comparison, skipping
//! columns whose overlap is already zero.
//!
//! The backend is an execution contract, not a device binding: groups fan
//! out across CPU worker lanes, all partials combine in a fixed order, and
//! the synapse-count reduction is integer, so results are bitwise identical
//! to the sequential reference. Per call the backend emits one timing record
//! per phase; staging (bit packing, boost upload, result readout) is timed
//! separately from the compute kernels, matching the "kernel" vs "total"
//! accounting used by the benchmark harness.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SpConfig;
use crate::error::{Error, Result};
use crate::frame::BinaryFrame;
use crate::sp::{nth_largest, SpState};

/// Work-group size cap; mirrors the maximum work-group size constraint of
/// real accelerators.
pub const DEFAULT_MAX_GROUP_SIZE: usize = 1024;

/// Execution geometry for the data-parallel kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelPlan {
    /// Logical work items per column group; always a power of two.
    pub group_size: usize,
    /// One group per column.
    pub num_groups: usize,
    /// Overlap-only vs fused overlap+inhibition layout.
    pub fused: bool,
}

/// Plans kernels with the default work-group cap and the fused layout.
pub fn plan_kernels(config: &SpConfig) -> KernelPlan {
    plan_kernels_with_cap(config, DEFAULT_MAX_GROUP_SIZE)
}

/// Plans kernels with an explicit work-group size cap.
///
/// The group size is the smallest power of two holding one work item per
/// synapse, capped at `max_group_size`. Above the cap each work item
/// accumulates a strided chunk of synapses before the tree reduction.
pub fn plan_kernels_with_cap(config: &SpConfig, max_group_size: usize) -> KernelPlan {
    let cap = floor_pow2(max_group_size.max(1));
    let group_size = config.synapses_per_column.next_power_of_two().min(cap);
    KernelPlan {
        group_size,
        num_groups: config.num_columns,
        fused: true,
    }
}

fn floor_pow2(v: usize) -> usize {
    let mut p = 1;
    while p * 2 <= v {
        p *= 2;
    }
    p
}

/// Execution phase of one backend invocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    StagingIn,
    KernelOverlap,
    KernelInhibition,
    StagingOut,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::StagingIn => "staging_in",
            Phase::KernelOverlap => "kernel_overlap",
            Phase::KernelInhibition => "kernel_inhibition",
            Phase::StagingOut => "staging_out",
        }
    }
}

/// One per-phase wall-clock timing sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub phase: Phase,
    pub duration_ns: u64,
    pub iteration: u64,
}

fn record(phase: Phase, started: Instant, iteration: u64) -> ProfileRecord {
    ProfileRecord {
        phase,
        duration_ns: started.elapsed().as_nanos() as u64,
        iteration,
    }
}

/// Result of one fused overlap+inhibition invocation.
pub struct FusedOutput {
    /// Global overlap buffer (pass 1 output), identical to the sequential
    /// overlap stage.
    pub overlaps: Vec<f64>,
    /// Active column indices, ascending.
    pub active: Vec<usize>,
    /// One record per phase: staging_in, kernel_overlap, kernel_inhibition,
    /// staging_out.
    pub records: Vec<ProfileRecord>,
}

/// Per-column overlap: group-local staging, tree reduction, in-group boost
/// and cutoff. Reads only staged inputs plus the device-resident synapse
/// state; `out` plays the role of the global overlap buffer.
fn overlap_kernel(
    state: &SpState,
    staged_words: &[u64],
    staged_boosts: &[f64],
    plan: &KernelPlan,
    out: &mut Vec<f64>,
) {
    let cfg = state.config();
    let group_size = plan.group_size;
    let synapses = cfg.synapses_per_column;
    let min_overlap = cfg.min_overlap;
    let threshold = cfg.connected_threshold;
    let columns = state.columns();
    (0..state.num_columns())
        .into_par_iter()
        .map_init(
            || vec![0u32; group_size],
            |local, c| {
                let col = &columns[c];
                let inputs = col.synapse_inputs();
                let perms = col.permanences();
                // Each work item accumulates its strided chunk of the
                // synapse predicate into group-local storage.
                for (item, slot) in local.iter_mut().enumerate() {
                    let mut acc = 0u32;
                    let mut j = item;
                    while j < synapses {
                        let idx = inputs[j] as usize;
                        let bit = (staged_words[idx >> 6] >> (idx & 63)) & 1;
                        if perms[j] >= threshold && bit == 1 {
                            acc += 1;
                        }
                        j += group_size;
                    }
                    *slot = acc;
                }
                let raw = tree_reduce(local);
                // Boost and cutoff run inside the group as well.
                if raw < min_overlap {
                    0.0
                } else {
                    raw as f64 * staged_boosts[c]
                }
            },
        )
        .collect_into_vec(out);
}

/// Binary tree reduction of a power-of-two length buffer. Integer addition,
/// fixed combine order.
fn tree_reduce(local: &mut [u32]) -> u32 {
    debug_assert!(local.len().is_power_of_two());
    let mut stride = local.len() / 2;
    while stride > 0 {
        for k in 0..stride {
            local[k] += local[k + stride];
        }
        stride /= 2;
    }
    local[0]
}

fn check_plan(state: &SpState, plan: &KernelPlan) -> Result<()> {
    if plan.num_groups != state.num_columns() {
        return Err(Error::input(format!(
            "plan has {} groups, state has {} columns",
            plan.num_groups,
            state.num_columns()
        )));
    }
    if !plan.group_size.is_power_of_two() {
        return Err(Error::input(format!(
            "group_size {} is not a power of two",
            plan.group_size
        )));
    }
    Ok(())
}

fn check_frame(state: &SpState, frame: &BinaryFrame) -> Result<()> {
    if frame.len() != state.config().input_size {
        return Err(Error::input(format!(
            "frame has {} bits, expected input_size {}",
            frame.len(),
            state.config().input_size
        )));
    }
    Ok(())
}

/// Overlap-only invocation (the standalone overlap kernel layout).
///
/// Returns the per-column overlaps, bitwise identical to
/// [`SpState::compute_overlap`], plus staging_in / kernel_overlap /
/// staging_out timing records. The state is read-only.
pub fn parallel_overlap(
    state: &SpState,
    frame: &BinaryFrame,
    plan: &KernelPlan,
) -> Result<(Vec<f64>, Vec<ProfileRecord>)> {
    check_frame(state, frame)?;
    check_plan(state, plan)?;
    let iteration = state.iteration();
    let mut records = Vec::with_capacity(3);

    let t = Instant::now();
    let staged_words: Vec<u64> = frame.words().to_vec();
    let staged_boosts: Vec<f64> = state.columns().iter().map(|c| c.boost()).collect();
    records.push(record(Phase::StagingIn, t, iteration));

    let mut device_out = Vec::new();
    let t = Instant::now();
    overlap_kernel(state, &staged_words, &staged_boosts, plan, &mut device_out);
    records.push(record(Phase::KernelOverlap, t, iteration));

    let t = Instant::now();
    let overlaps = device_out.clone();
    records.push(record(Phase::StagingOut, t, iteration));

    Ok((overlaps, records))
}

/// Fused overlap+inhibition invocation.
///
/// Pass 1 writes overlaps to the global buffer; pass 2 re-fetches each
/// column's neighborhood slice (width `2 * inhibition_radius + 1`), selects
/// the n-th largest competitor and applies the strict comparison. Columns
/// with zero overlap bypass the selection entirely. The state is read-only;
/// results are bitwise identical to the sequential overlap+inhibition
/// composition.
pub fn run_fused(state: &SpState, frame: &BinaryFrame, plan: &KernelPlan) -> Result<FusedOutput> {
    check_frame(state, frame)?;
    check_plan(state, plan)?;
    let iteration = state.iteration();
    let num_columns = state.num_columns();
    let radius = state.inhibition_radius();
    let n = state.config().winners_set_size;
    let mut records = Vec::with_capacity(4);

    let t = Instant::now();
    let staged_words: Vec<u64> = frame.words().to_vec();
    let staged_boosts: Vec<f64> = state.columns().iter().map(|c| c.boost()).collect();
    records.push(record(Phase::StagingIn, t, iteration));

    // Pass 1: overlap kernel into the global buffer.
    let mut global_overlaps = Vec::new();
    let t = Instant::now();
    overlap_kernel(state, &staged_words, &staged_boosts, plan, &mut global_overlaps);
    records.push(record(Phase::KernelOverlap, t, iteration));

    // Pass 2: per-column neighborhood fetch + n-th max selection.
    let t = Instant::now();
    let mut flags: Vec<bool> = Vec::new();
    (0..num_columns)
        .into_par_iter()
        .map_init(
            || Vec::<f64>::with_capacity(2 * radius),
            |local, c| {
                let own = global_overlaps[c];
                if own == 0.0 {
                    // Zero overlap can never beat a threshold floored at 1;
                    // skip the neighborhood work entirely.
                    return false;
                }
                let lo = c.saturating_sub(radius);
                let hi = (c + radius).min(num_columns - 1);
                local.clear();
                local.extend_from_slice(&global_overlaps[lo..c]);
                local.extend_from_slice(&global_overlaps[c + 1..=hi]);
                let threshold = nth_largest(local, n).max(1.0);
                own > threshold
            },
        )
        .collect_into_vec(&mut flags);
    records.push(record(Phase::KernelInhibition, t, iteration));

    // Readout: device flags to host index list.
    let t = Instant::now();
    let active: Vec<usize> = flags
        .iter()
        .enumerate()
        .filter_map(|(c, &a)| a.then_some(c))
        .collect();
    records.push(record(Phase::StagingOut, t, iteration));

    Ok(FusedOutput {
        overlaps: global_overlaps,
        active,
        records,
    })
}

/// Fused invocation returning only the active set and the timing records.
pub fn parallel_inhibition_fused(
    state: &SpState,
    frame: &BinaryFrame,
    plan: &KernelPlan,
) -> Result<(Vec<usize>, Vec<ProfileRecord>)> {
    let out = run_fused(state, frame, plan)?;
    Ok((out.active, out.records))
}

/// Full pooler step on the parallel backend: fused kernels (state
/// read-only), write-back of overlaps and activity, then the shared
/// sequential learning stage.
pub fn step_parallel(
    state: &mut SpState,
    frame: &BinaryFrame,
    plan: &KernelPlan,
    learning_enabled: bool,
) -> Result<(Vec<usize>, Vec<ProfileRecord>)> {
    let out = run_fused(state, frame, plan)?;
    state.apply_activity(&out.overlaps, &out.active);
    if learning_enabled {
        state.learn(frame, &out.active)?;
    }
    Ok((out.active, out.records))
}

/// Fraction of kernel time spent in the overlap pass:
/// `sum(kernel_overlap) / (sum(kernel_overlap) + sum(kernel_inhibition))`.
pub fn overlap_share(records: &[ProfileRecord]) -> Result<f64> {
    let mut overlap_ns = 0u64;
    let mut overlap_seen = false;
    let mut inhibition_ns = 0u64;
    let mut inhibition_seen = false;
    for r in records {
        match r.phase {
            Phase::KernelOverlap => {
                overlap_ns += r.duration_ns;
                overlap_seen = true;
            }
            Phase::KernelInhibition => {
                inhibition_ns += r.duration_ns;
                inhibition_seen = true;
            }
            _ => {}
        }
    }
    if !overlap_seen || !inhibition_seen {
        return Err(Error::computation(
            "overlap_share needs at least one kernel_overlap and one kernel_inhibition sample",
        ));
    }
    Ok(overlap_ns as f64 / (overlap_ns + inhibition_ns) as f64)
}

/// Writes profile records as CSV with the schema
/// `iteration,phase,duration_ns,backend,num_columns,synapses,min_overlap,winners_set_size`.
pub fn write_profile_csv<W: Write>(
    mut w: W,
    records: &[ProfileRecord],
    backend: &str,
    config: &SpConfig,
) -> std::io::Result<()> {
    writeln!(
        w,
        "iteration,phase,duration_ns,backend,num_columns,synapses,min_overlap,winners_set_size"
    )?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.iteration,
            r.phase.as_str(),
            r.duration_ns,
            backend,
            config.num_columns,
            config.synapses_per_column,
            config.min_overlap,
            config.winners_set_size
        )?;
    }
    Ok(())
}
