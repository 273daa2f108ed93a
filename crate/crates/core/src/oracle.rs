//! Brute-force optimal-makespan solver over the joint configuration space.

use crate::model::{Instance, Schedule};
use crate::search::{shortest_schedule, SearchError, SearchLimits, SearchOutcome};

/// Optimal schedule with makespan at most `cap`, or `None` if there is none.
pub fn optimal_schedule(inst: &Instance, cap: usize) -> Result<Option<(usize, Schedule)>, SearchError> {
    let out = optimal_schedule_with(inst, SearchLimits::new(cap))?;
    Ok(out.schedule.map(|s| (s.makespan(), s)))
}

/// Like [`optimal_schedule`] but with an explicit state guard and the number
/// of stored states in the result.
pub fn optimal_schedule_with(inst: &Instance, limits: SearchLimits) -> Result<SearchOutcome, SearchError> {
    shortest_schedule(&inst.graph, &inst.start, &inst.target, limits, &|_| true)
}
