//! LOCC protocols: 1→N telecloning, the clone-state decomposition,
//! many-to-one remote information concentration and the two many-to-many
//! variants. Every run yields one [`Transcript`] per measurement branch.

pub mod decomposition;
mod engine;
pub mod many_to_many;
pub mod registry;
pub mod ric;
pub mod telecloning;
pub mod transcript;

pub use decomposition::{clone_state, CloneFamily};
pub use engine::{Coverage, Leaf, Mode, BRANCH_LIMIT};
pub use many_to_many::{mm_ghz_channel, run_mm_ghz, run_mm_multiqudit, synth_distributed_state, BbarSource};
pub use registry::PartyRegistry;
pub use ric::{deduce_correction, ric_plan, run_ric, run_ric_with_plan, teleportation_identity_check, MeasurementStep, RicBranch, RicRun};
pub use telecloning::{run_telecloning, TelecloneBranch, TelecloneOptions};
pub use transcript::{Correction, LegCorrection, Message, Transcript};
