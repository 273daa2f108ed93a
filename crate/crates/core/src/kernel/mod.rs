//! Kernelization for the distance-to-clique parameter: the partially
//! anonymous wrapper, schedule compression, vertex and agent typing, core
//! agent selection and the reduced instance.

mod compress;
mod core_agents;
mod pamapf;

pub use compress::{compress_schedule, placement_type_key, PlacementTypeKey, Slot};
pub use core_agents::{
    build_kernel, classify_types, select_core_agents, AgentType, CoreAgents, Kernel, Typing, VertexType,
};
pub use pamapf::{build_pamapf, extend_pamapf_solution, validate_pamapf, PamapfInstance};

use thiserror::Error;

use crate::clique::CliqueError;

/// Largest parameter for which the closed-form bounds are evaluated.
pub const MAX_BOUND_DC: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("bound for dc = {0} overflows")]
    Overflow(usize),
    #[error("{0}")]
    Precondition(String),
    #[error(transparent)]
    Clique(#[from] CliqueError),
}

/// Upper bound `3(2dc+2)^dc + 2` on the optimal makespan of a feasible
/// instance with distance to clique `dc`.
pub fn makespan_bound(dc: usize) -> Result<usize, KernelError> {
    if dc > MAX_BOUND_DC {
        return Err(KernelError::Overflow(dc));
    }
    (2 * dc + 2)
        .checked_pow(dc as u32)
        .and_then(|x| x.checked_mul(3))
        .and_then(|x| x.checked_add(2))
        .ok_or(KernelError::Overflow(dc))
}

/// Per-type truncation size `(10dc)^(dc+1)` used when seeding core agents.
pub fn kappa(dc: usize) -> Result<usize, KernelError> {
    if dc == 0 {
        return Ok(0);
    }
    (10 * dc).checked_pow(dc as u32 + 1).ok_or(KernelError::Overflow(dc))
}
