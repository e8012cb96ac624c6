//! Content-aware image and video retargeting.
//!
//! Seams are found with cumulative-energy dynamic programming and removed in
//! batches: one seam per first-row "parent" per DP pass. For video, frames are
//! grouped into runs whose energy is temporally stable; each run is carved
//! once on its mean energy map and the same seams are replayed onto every
//! frame of the run.

pub mod bench;
pub mod energy;
pub mod error;
pub mod frame;
pub mod media_io;
pub mod pipeline;
pub mod scpl;
pub mod seam_dp;
pub mod temporal;

pub use energy::{gradient_energy, motion_energy, to_luma, BlendWeights, EnergyMap, MAXVAL};
pub use error::{Error, Result};
pub use frame::Frame;
pub use pipeline::{
    retarget_image, retarget_video, AxisOrder, Mode, RetargetConfig, RunEnergy, RunMetrics,
};
pub use scpl::{label_parents, remove_batch, scpl_carve, select_batch, ParentLabels, SeamBatch};
pub use seam_dp::{
    cumulative_energy, min_seam, remove_seam, transpose, DpTables, Orientation, Seam,
};
pub use temporal::{threshold, BufferPolicy, PushOutcome, SpatioTemporalBuffer};
