//! Exact solver parameterized by distance to clique: kernelize, search the
//! reduced configuration graph, lift the result back.

mod lift;
mod repair;

pub use lift::{build_frame, lift_schedule, mutual_exchanges, remove_mutual_exchanges, LiftFrame};
pub use repair::repair_final_swaps;

use thiserror::Error;

use crate::clique::{solve_clique, CliqueError};
use crate::graph::{clique_split, CliqueSplit};
use crate::kernel::{build_kernel, classify_types, makespan_bound, select_core_agents, Kernel, KernelError};
use crate::model::{validate_schedule, Instance, Schedule};
use crate::search::{shortest_schedule, SearchError, SearchLimits, DEFAULT_STATE_GUARD};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FptError {
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Clique(#[from] CliqueError),
    #[error("lift needs more than max(|core|, 50) non-core agents; got {rest} with {core} core agents")]
    SizeRegime { core: usize, rest: usize },
    #[error("lift failed: {0}")]
    Lift(String),
    #[error("final-turn repair failed: {0}")]
    Repair(String),
    #[error("produced schedule is infeasible: {0}")]
    Infeasible(String),
}

/// Shortest kernel schedule within `limits` whose intermediate
/// placements keep at least `kernel.k` agents on the modulator.
pub fn config_shortest_schedule(kernel: &Kernel, limits: SearchLimits) -> Result<(Option<Schedule>, usize), FptError> {
    let k = kernel.k;
    let mask = &kernel.in_modulator;
    let admissible = |state: &[u32]| state.iter().filter(|&&v| mask[v as usize]).count() >= k;
    let out = shortest_schedule(&kernel.graph, &kernel.start, &kernel.target, limits, &admissible)?;
    Ok((out.schedule, out.states))
}

/// What the solver did on one instance.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FptStats {
    pub dc: usize,
    /// Makespan cap used by the kernel search, if one applied.
    pub bound: Option<usize>,
    pub core_agents: usize,
    pub kernel_vertices: usize,
    pub states: usize,
    /// Solved directly on a clique without a search.
    pub clique_path: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FptOutcome {
    pub schedule: Option<Schedule>,
    pub stats: FptStats,
}

/// Optimal schedule, or `None` if the instance is infeasible (or needs more
/// turns than its limit).
pub fn solve_fpt(inst: &Instance) -> Result<Option<(usize, Schedule)>, FptError> {
    let out = solve_fpt_with(inst, DEFAULT_STATE_GUARD)?;
    Ok(out.schedule.map(|s| (s.makespan(), s)))
}

pub fn solve_fpt_with(inst: &Instance, guard: usize) -> Result<FptOutcome, FptError> {
    let split = clique_split(&inst.graph);
    solve_fpt_split(inst, &split, guard)
}

/// Like [`solve_fpt_with`] for a precomputed split.
pub fn solve_fpt_split(inst: &Instance, split: &CliqueSplit, guard: usize) -> Result<FptOutcome, FptError> {
    let mut stats = FptStats { dc: split.dc(), ..FptStats::default() };
    let limit = inst.limit.unwrap_or(usize::MAX);
    if split.modulator.is_empty() && inst.graph.n() >= 4 {
        stats.clique_path = true;
        let found = solve_clique(inst)?.filter(|(m, _)| *m <= limit);
        return Ok(FptOutcome { schedule: found.map(|(_, s)| s), stats });
    }
    // The closed-form bound rests on compressing moves inside a clique of at
    // least four vertices; smaller cliques search without it.
    let bound = if split.clique.len() >= 4 { Some(makespan_bound(split.dc())?) } else { None };
    stats.bound = bound;
    let cap = bound.unwrap_or(usize::MAX).min(limit);

    let typing = classify_types(inst, split);
    let core = select_core_agents(inst, split, &typing);
    let kernel = build_kernel(inst, split, &typing, &core.core)?;
    stats.core_agents = kernel.agents.len();
    stats.kernel_vertices = kernel.vertices.len();
    let (found, states) = config_shortest_schedule(&kernel, SearchLimits { cap, guard })?;
    stats.states = states;
    let Some(ksched) = found else {
        return Ok(FptOutcome { schedule: None, stats });
    };
    let sched = lift_schedule(inst, split, &kernel, &ksched)?;
    validate_schedule(inst, &sched).map_err(|v| FptError::Infeasible(v.to_string()))?;
    if sched.makespan() > limit {
        return Ok(FptOutcome { schedule: None, stats });
    }
    Ok(FptOutcome { schedule: Some(sched), stats })
}
