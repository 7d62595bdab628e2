//! Short-depth compiling of the link evolution, randomized interpolation
//! channels and their diamond distance.

mod channel;
mod circuit;
mod diamond;
mod optimize;

pub use channel::{
    adiabatic_channel_steps, apply_channel, evolve_density, interpolation_probabilities, randomized_channel,
    sample_channel_trajectory, trajectory_average, trajectory_fidelity, Branch, BranchOp, ChannelSpec, ChannelStep,
    LinkRealization, Trajectory,
};
pub use circuit::{compose, u_matrix, Circuit, Gate};
pub use diamond::{diamond_distance, unitary_diamond_distance, DiamondOptions, DiamondResult};
pub use optimize::{
    compile, extend_params, link_target, CompileProblem, CompileResult, OptimizerConfig, PhaseMode, Slot, Template,
};
