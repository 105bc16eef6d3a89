//! Trajectory sets for multimodal motion prediction.
//!
//! Prediction is cast as classification over a finite set of trajectories.
//! This crate builds such sets and evaluates predictions over them:
//!
//! - [`coverset`]: fixed sets by greedy epsilon-cover of a trajectory corpus,
//!   a randomized variant, and an exact oracle for small instances.
//! - [`dynamics`]: a kinematic vehicle model, dynamic sets rolled out from the
//!   agent state over control profiles, and hybrid sets.
//! - [`baselines`]: constant velocity / acceleration / yaw-rate extrapolation
//!   and the per-instance physics oracle.
//! - [`metrics`]: minADE_k, FDE and HitRate_{k,d}.
//! - [`classifier`]: a linear softmax head trained with cross-entropy against
//!   nearest-mode labels.
//! - [`io`] and [`synth`]: JSONL corpora, set and model files, and a seeded
//!   synthetic corpus generator.
//! - [`experiments`]: coverage curves, baseline tables, the distance ablation
//!   and the self-check suite used by the `covertraj` binary.

pub mod baselines;
pub mod classifier;
pub mod coverset;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod io;
pub mod metrics;
pub mod synth;
pub mod traj;

pub use error::{Error, Result};
pub use traj::{closest_index, distance, normalize_frame, AgentState, DistanceKind, Point, Provenance, Trajectory, TrajectoryCorpus, TrajectorySet};
