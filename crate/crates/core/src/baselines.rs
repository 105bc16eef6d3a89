//! Physics extrapolation baselines and the per-instance physics oracle.

use serde::{Deserialize, Serialize};

use crate::dynamics::{simulate, IntegrationConfig, Pose};
use crate::error::{Error, Result};
use crate::traj::{distance, normalize_frame, AgentState, DistanceKind, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhysicsModelKind {
    ConstVelYaw,
    ConstVelYawRate,
    ConstAccelYaw,
    ConstAccelYawRate,
}

impl PhysicsModelKind {
    pub const ALL: [PhysicsModelKind; 4] = [
        PhysicsModelKind::ConstVelYaw,
        PhysicsModelKind::ConstVelYawRate,
        PhysicsModelKind::ConstAccelYaw,
        PhysicsModelKind::ConstAccelYawRate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PhysicsModelKind::ConstVelYaw => "const_vel_yaw",
            PhysicsModelKind::ConstVelYawRate => "const_vel_yaw_rate",
            PhysicsModelKind::ConstAccelYaw => "const_accel_yaw",
            PhysicsModelKind::ConstAccelYawRate => "const_accel_yaw_rate",
        }
    }

    fn uses_accel(self) -> bool {
        matches!(self, PhysicsModelKind::ConstAccelYaw | PhysicsModelKind::ConstAccelYawRate)
    }

    fn uses_yaw_rate(self) -> bool {
        matches!(self, PhysicsModelKind::ConstVelYawRate | PhysicsModelKind::ConstAccelYawRate)
    }
}

impl std::fmt::Display for PhysicsModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Extrapolate `s0` with one of the physics models. The result is in the
/// agent frame of `s0`.
pub fn physics_rollout(s0: &AgentState, kind: PhysicsModelKind, cfg: &IntegrationConfig) -> Result<Trajectory> {
    cfg.validate()?;
    s0.validate()?;
    let yaw_rate = if kind.uses_yaw_rate() { s0.yaw_rate } else { 0.0 };
    let accel = if kind.uses_accel() { s0.accel } else { 0.0 };
    let start = Pose::from(s0);
    let (points, _) = simulate(start, cfg.dt, cfg.substeps, cfg.horizon_steps, |_| (yaw_rate, accel));
    Ok(normalize_frame(&Trajectory::new(points, cfg.dt)?, s0))
}

/// Best of the four physics models against `ground_truth` under average
/// point-wise distance. Ties go to the earlier model in [`PhysicsModelKind::ALL`].
pub fn physics_oracle(s0: &AgentState, ground_truth: &Trajectory, cfg: &IntegrationConfig) -> Result<(PhysicsModelKind, f64)> {
    if ground_truth.len() != cfg.horizon_steps {
        return Err(Error::LengthMismatch {
            left: ground_truth.len(),
            right: cfg.horizon_steps,
        });
    }
    let mut best = (PhysicsModelKind::ConstVelYaw, f64::INFINITY);
    for kind in PhysicsModelKind::ALL {
        let err = distance(&physics_rollout(s0, kind, cfg)?, ground_truth, DistanceKind::AvgL2)?;
        if err < best.1 {
            best = (kind, err);
        }
    }
    Ok(best)
}
