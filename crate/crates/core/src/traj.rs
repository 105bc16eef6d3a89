//! Trajectory and state types, agent-frame normalization, and point-wise
//! distances.
//!
//! Trajectories are sequences of future positions only. The agent's current
//! pose is the implied origin and is not stored as a point, so a horizon of
//! `N` steps holds exactly `N` points.

use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::dynamics::ControlProfile;
use crate::error::{Error, Result};

/// A 2-D position in meters.
pub type Point = [f64; 2];

/// Wrap an angle into `[-pi, pi)`.
pub fn wrap_angle(angle: f64) -> f64 {
    let wrapped = (angle + PI).rem_euclid(2.0 * PI) - PI;
    // rem_euclid can round up to exactly 2*pi for tiny negative inputs.
    if wrapped >= PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}

/// Instantaneous kinematic state of an agent.
///
/// `heading` follows the mathematical convention (counter-clockwise from +x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub speed: f64,
    pub accel: f64,
    pub yaw_rate: f64,
}

impl AgentState {
    /// Build a validated state. The heading is wrapped into `[-pi, pi)`.
    pub fn new(x: f64, y: f64, heading: f64, speed: f64, accel: f64, yaw_rate: f64) -> Result<Self> {
        let state = AgentState {
            x,
            y,
            heading: wrap_angle(heading),
            speed,
            accel,
            yaw_rate,
        };
        state.validate()?;
        Ok(state)
    }

    /// A state at the origin facing +y, the canonical agent frame.
    pub fn at_origin(speed: f64) -> Self {
        AgentState {
            x: 0.0,
            y: 0.0,
            heading: FRAC_PI_2,
            speed,
            accel: 0.0,
            yaw_rate: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [self.x, self.y, self.heading, self.speed, self.accel, self.yaw_rate];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("agent state has non-finite fields"));
        }
        if self.speed < 0.0 {
            return Err(Error::invalid(format!("negative speed {}", self.speed)));
        }
        if !(-PI..PI).contains(&self.heading) {
            return Err(Error::invalid(format!("heading {} outside [-pi, pi)", self.heading)));
        }
        Ok(())
    }
}

/// Fixed-rate sequence of future 2-D positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    points: Vec<Point>,
    dt: f64,
}

impl Trajectory {
    pub fn new(points: Vec<Point>, dt: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("trajectory needs at least one point"));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid(format!("sampling interval {dt} must be positive")));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("trajectory has non-finite coordinates"));
        }
        Ok(Trajectory { points, dt })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Point {
        self.points[self.points.len() - 1]
    }

    /// Bit-exact key of the point sequence, used for deduplication.
    pub(crate) fn bit_key(&self) -> Vec<u64> {
        self.points
            .iter()
            .flat_map(|p| [p[0].to_bits(), p[1].to_bits()])
            .collect()
    }

    pub(crate) fn check_compatible(&self, other: &Trajectory) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        if !same_rate(self.dt, other.dt) {
            return Err(Error::RateMismatch {
                left: self.dt,
                right: other.dt,
            });
        }
        Ok(())
    }
}

pub(crate) fn same_rate(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

/// Point-wise distance used for coverage and ground-truth matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceKind {
    /// Maximum point-wise Euclidean distance.
    #[default]
    #[serde(rename = "max")]
    MaxL2,
    /// Mean of point-wise Euclidean distances.
    #[serde(rename = "avg")]
    AvgL2,
    /// Root mean square of point-wise Euclidean distances.
    #[serde(rename = "rms")]
    RmsL2,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 3] = [DistanceKind::MaxL2, DistanceKind::AvgL2, DistanceKind::RmsL2];

    pub fn name(self) -> &'static str {
        match self {
            DistanceKind::MaxL2 => "max",
            DistanceKind::AvgL2 => "avg",
            DistanceKind::RmsL2 => "rms",
        }
    }
}

impl std::str::FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(DistanceKind::MaxL2),
            "avg" => Ok(DistanceKind::AvgL2),
            "rms" => Ok(DistanceKind::RmsL2),
            other => Err(Error::invalid(format!("unknown distance kind {other:?}"))),
        }
    }
}

impl std::fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Distance between two compatible trajectories.
pub fn distance(a: &Trajectory, b: &Trajectory, kind: DistanceKind) -> Result<f64> {
    a.check_compatible(b)?;
    Ok(point_distance(a.points(), b.points(), kind))
}

/// Distance between two equal-length point sequences, without validation.
pub(crate) fn point_distance(a: &[Point], b: &[Point], kind: DistanceKind) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let norms = a
        .iter()
        .zip(b)
        .map(|(p, q)| (p[0] - q[0]).hypot(p[1] - q[1]));
    match kind {
        DistanceKind::MaxL2 => norms.fold(0.0, f64::max),
        DistanceKind::AvgL2 => norms.sum::<f64>() / a.len() as f64,
        DistanceKind::RmsL2 => (norms.map(|n| n * n).sum::<f64>() / a.len() as f64).sqrt(),
    }
}

/// Express a world-frame trajectory in the frame of `origin`: the origin pose
/// moves to (0, 0) and its heading points along +y.
pub fn normalize_frame(raw: &Trajectory, origin: &AgentState) -> Trajectory {
    let angle = FRAC_PI_2 - origin.heading;
    let (sin, cos) = angle.sin_cos();
    let points = raw
        .points()
        .iter()
        .map(|p| {
            let dx = p[0] - origin.x;
            let dy = p[1] - origin.y;
            [cos * dx - sin * dy, sin * dx + cos * dy]
        })
        .collect();
    Trajectory {
        points,
        dt: raw.dt(),
    }
}

/// How a trajectory set was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Fixed,
    Dynamic,
    Hybrid,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Provenance::Fixed => "fixed",
            Provenance::Dynamic => "dynamic",
            Provenance::Hybrid => "hybrid",
        })
    }
}

/// Ordered collection of trajectories used as a classification label space.
///
/// For dynamic and hybrid sets, `profiles` lists the control profile behind
/// each of the leading dynamic modes; any modes after them are fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySet {
    modes: Vec<Trajectory>,
    provenance: Provenance,
    source_indices: Option<Vec<usize>>,
    profiles: Option<Vec<ControlProfile>>,
}

impl TrajectorySet {
    /// Build a set, rejecting empty input, incompatible modes, and exact
    /// duplicate point sequences.
    pub fn new(modes: Vec<Trajectory>, provenance: Provenance) -> Result<Self> {
        let set = Self::from_parts(modes, provenance, None, None)?;
        let mut seen = HashSet::with_capacity(set.modes.len());
        for (index, mode) in set.modes.iter().enumerate() {
            if !seen.insert(mode.bit_key()) {
                return Err(Error::DuplicateMode { index });
            }
        }
        Ok(set)
    }

    /// Like [`TrajectorySet::new`] but allows coincident modes. Profile-indexed
    /// sets instantiated at very low speed can legitimately collapse several
    /// profiles onto the same path.
    pub(crate) fn from_parts(
        modes: Vec<Trajectory>,
        provenance: Provenance,
        source_indices: Option<Vec<usize>>,
        profiles: Option<Vec<ControlProfile>>,
    ) -> Result<Self> {
        let first = modes.first().ok_or(Error::EmptySet)?;
        for mode in &modes[1..] {
            first.check_compatible(mode)?;
        }
        if let Some(indices) = &source_indices {
            if indices.len() != modes.len() {
                return Err(Error::invalid("source_indices length differs from mode count"));
            }
        }
        if let Some(profiles) = &profiles {
            if profiles.len() > modes.len() {
                return Err(Error::invalid("more profiles than modes"));
            }
        }
        Ok(TrajectorySet {
            modes,
            provenance,
            source_indices,
            profiles,
        })
    }

    pub fn with_source_indices(mut self, indices: Vec<usize>) -> Result<Self> {
        if indices.len() != self.modes.len() {
            return Err(Error::invalid("source_indices length differs from mode count"));
        }
        self.source_indices = Some(indices);
        Ok(self)
    }

    pub fn with_profiles(mut self, profiles: Vec<ControlProfile>) -> Result<Self> {
        if profiles.len() > self.modes.len() {
            return Err(Error::invalid("more profiles than modes"));
        }
        self.profiles = Some(profiles);
        Ok(self)
    }

    pub fn modes(&self) -> &[Trajectory] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn source_indices(&self) -> Option<&[usize]> {
        self.source_indices.as_deref()
    }

    pub fn profiles(&self) -> Option<&[ControlProfile]> {
        self.profiles.as_deref()
    }

    /// Number of leading modes generated from control profiles.
    pub fn dynamic_count(&self) -> usize {
        self.profiles.as_ref().map_or(0, Vec::len)
    }

    /// The trailing modes that do not depend on the agent state.
    pub fn fixed_modes(&self) -> &[Trajectory] {
        &self.modes[self.dynamic_count()..]
    }

    pub fn horizon(&self) -> usize {
        self.modes[0].len()
    }

    pub fn dt(&self) -> f64 {
        self.modes[0].dt()
    }
}

/// Index of the set member closest to `target`, with its distance. Ties go to
/// the smallest index.
pub fn closest_index(target: &Trajectory, set: &TrajectorySet, kind: DistanceKind) -> Result<(usize, f64)> {
    closest_in(target, set.modes(), kind)
}

pub(crate) fn closest_in(target: &Trajectory, modes: &[Trajectory], kind: DistanceKind) -> Result<(usize, f64)> {
    let first = modes.first().ok_or(Error::EmptySet)?;
    target.check_compatible(first)?;
    let mut best = (0, f64::INFINITY);
    for (i, mode) in modes.iter().enumerate() {
        target.check_compatible(mode)?;
        let d = point_distance(target.points(), mode.points(), kind);
        if d < best.1 {
            best = (i, d);
        }
    }
    Ok(best)
}

/// Trajectories sharing one horizon and sampling interval, optionally paired
/// with the agent state each one starts from.
///
/// Items are expressed in their own agent frame; seed states keep their
/// original world pose.
#[derive(Debug, Clone)]
pub struct TrajectoryCorpus {
    items: Vec<Trajectory>,
    seed_states: Option<Vec<AgentState>>,
}

impl TrajectoryCorpus {
    pub fn new(items: Vec<Trajectory>, seed_states: Option<Vec<AgentState>>) -> Result<Self> {
        if let Some(first) = items.first() {
            for item in &items[1..] {
                first.check_compatible(item)?;
            }
        }
        if let Some(states) = &seed_states {
            if states.len() != items.len() {
                return Err(Error::invalid(format!(
                    "{} seed states for {} trajectories",
                    states.len(),
                    items.len()
                )));
            }
            for state in states {
                state.validate()?;
            }
        }
        Ok(TrajectoryCorpus { items, seed_states })
    }

    pub fn items(&self) -> &[Trajectory] {
        &self.items
    }

    pub fn seed_states(&self) -> Option<&[AgentState]> {
        self.seed_states.as_deref()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Sub-corpus of the given indices, in the given order.
    pub fn subset(&self, indices: &[usize]) -> TrajectoryCorpus {
        TrajectoryCorpus {
            items: indices.iter().map(|&i| self.items[i].clone()).collect(),
            seed_states: self
                .seed_states
                .as_ref()
                .map(|s| indices.iter().map(|&i| s[i]).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj(points: &[Point]) -> Trajectory {
        Trajectory::new(points.to_vec(), 0.5).unwrap()
    }

    #[test]
    fn hand_computed_distances() {
        let a = traj(&[[0.0, 0.0], [0.0, 1.0], [0.0, 2.0]]);
        let b = traj(&[[1.0, 0.0], [1.0, 1.0], [1.0, 1.0]]);
        let sqrt2 = 2f64.sqrt();
        assert!((distance(&a, &b, DistanceKind::MaxL2).unwrap() - sqrt2).abs() < 1e-15);
        assert!((distance(&a, &b, DistanceKind::AvgL2).unwrap() - (2.0 + sqrt2) / 3.0).abs() < 1e-15);
        assert!((distance(&a, &b, DistanceKind::RmsL2).unwrap() - (4.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn identical_is_zero() {
        let a = traj(&[[1.0, 2.0], [3.0, 5.0]]);
        for kind in DistanceKind::ALL {
            assert_eq!(distance(&a, &a, kind).unwrap(), 0.0);
        }
    }

    #[test]
    fn mismatches_are_errors() {
        let a = traj(&[[0.0, 0.0], [0.0, 1.0]]);
        let b = traj(&[[0.0, 0.0]]);
        assert!(matches!(
            distance(&a, &b, DistanceKind::MaxL2),
            Err(Error::LengthMismatch { left: 2, right: 1 })
        ));
        let c = Trajectory::new(vec![[0.0, 0.0], [0.0, 1.0]], 0.1).unwrap();
        assert!(matches!(distance(&a, &c, DistanceKind::AvgL2), Err(Error::RateMismatch { .. })));
    }

    #[test]
    fn normalize_identity_and_translation() {
        let a = traj(&[[1.0, 2.0], [3.0, -4.0]]);
        let out = normalize_frame(&a, &AgentState::at_origin(3.0));
        for (p, q) in out.points().iter().zip(a.points()) {
            assert!((p[0] - q[0]).abs() < 1e-12 && (p[1] - q[1]).abs() < 1e-12);
        }

        let single = traj(&[[3.0, 4.0]]);
        let origin = AgentState::new(3.0, 4.0, FRAC_PI_2, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(normalize_frame(&single, &origin).points(), &[[0.0, 0.0]]);
    }

    #[test]
    fn normalize_points_heading_up() {
        // One meter ahead of an agent facing +x lands at (0, 1).
        let ahead = traj(&[[11.0, -2.0]]);
        let origin = AgentState::new(10.0, -2.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        let p = normalize_frame(&ahead, &origin).points()[0];
        assert!(p[0].abs() < 1e-12 && (p[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closest_index_ties_and_members() {
        let a = traj(&[[0.0, 1.0]]);
        let dup = TrajectorySet::from_parts(vec![a.clone(), a.clone()], Provenance::Fixed, None, None).unwrap();
        assert_eq!(closest_index(&a, &dup, DistanceKind::AvgL2).unwrap(), (0, 0.0));

        let modes: Vec<_> = (0..5).map(|i| traj(&[[i as f64, 0.0]])).collect();
        let set = TrajectorySet::new(modes, Provenance::Fixed).unwrap();
        assert_eq!(closest_index(&traj(&[[3.0, 0.0]]), &set, DistanceKind::AvgL2).unwrap(), (3, 0.0));
        // Midway between 1 and 2 goes to 1.
        assert_eq!(closest_index(&traj(&[[1.5, 0.0]]), &set, DistanceKind::MaxL2).unwrap().0, 1);
    }

    #[test]
    fn set_rejects_duplicates_and_empty() {
        let a = traj(&[[0.0, 1.0]]);
        assert!(matches!(
            TrajectorySet::new(vec![a.clone(), a], Provenance::Fixed),
            Err(Error::DuplicateMode { index: 1 })
        ));
        assert!(matches!(TrajectorySet::new(vec![], Provenance::Fixed), Err(Error::EmptySet)));
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), -PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert!(wrap_angle(-1e-18) < PI);
        assert!(AgentState::new(0.0, 0.0, 0.0, -1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn corpus_validates_lengths() {
        let a = traj(&[[0.0, 1.0]]);
        let b = traj(&[[0.0, 1.0], [0.0, 2.0]]);
        assert!(TrajectoryCorpus::new(vec![a.clone(), b], None).is_err());
        assert!(TrajectoryCorpus::new(vec![a], Some(vec![])).is_err());
    }
}
