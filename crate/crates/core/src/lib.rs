//! Exact solvers and instance generators for swap-forbidden multiagent path
//! finding, organised around the distance-to-clique parameter.
//!
//! The crate root re-exports the shared types so that the command-line and
//! benchmark crates only need `use dcmapf::*`.

pub mod clique;
pub mod fpt;
pub mod graph;
pub mod hardness;
pub mod io;
pub mod kernel;
pub mod model;
pub mod oracle;
pub mod random;
pub mod search;

pub use clique::{solve_clique, solve_clique_anonymous, CliqueError, SwappingPairSet};
pub use fpt::{
    config_shortest_schedule, lift_schedule, repair_final_swaps, solve_fpt, solve_fpt_split, solve_fpt_with, FptError,
    FptOutcome, FptStats, LiftFrame,
};
pub use graph::{clique_split, complement, is_clique, min_vertex_cover, CliqueSplit, Graph, GraphError};
pub use hardness::{
    build_colored_pancake_instance, build_pancake_instance, build_three_partition_instance,
    colored_pancake_forward_schedule, pancake_forward_schedule, preprocess_three_partition,
    three_partition_forward_schedule, GadgetRegistry, HardnessError, PancakeInstance, ThreePartitionInstance,
};
pub use io::{
    parse_colored_instance, parse_instance, parse_schedule, serialize_colored_instance, serialize_instance,
    serialize_schedule, ParseError, ParseErrorKind,
};
pub use kernel::{
    build_kernel, build_pamapf, classify_types, compress_schedule, extend_pamapf_solution, kappa, makespan_bound,
    select_core_agents, validate_pamapf, CoreAgents, Kernel, KernelError, PamapfInstance, Typing,
};
pub use model::{
    detect_swaps, validate_colored_schedule, validate_moves, validate_schedule, ColoredInstance, Group, Instance,
    ModelError, Placement, Rule, Schedule, Violation,
};
pub use oracle::{optimal_schedule, optimal_schedule_with};
pub use random::{random_instance, RandomError};
pub use search::{JointState, SearchError, SearchLimits, SearchOutcome, DEFAULT_STATE_GUARD};
