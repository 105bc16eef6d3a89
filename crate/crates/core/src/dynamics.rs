//! Kinematic vehicle model and dynamic trajectory sets.
//!
//! The model is the kinematic bicycle
//!
//! ```text
//! x' = v cos(theta)    y' = v sin(theta)
//! theta' = v / b * tan(steer)    v' = accel
//! ```
//!
//! driven by a [`ControlProfile`] of constant lateral and longitudinal
//! acceleration. Lateral acceleration is turned into a steering angle through
//! `a_lat = v^2 * kappa`, `kappa = tan(steer) / b`, with `max(v, 1)` standing in
//! for `v`. The steering angle is recomputed at every substep as speed changes.
//!
//! Integration uses fixed substeps. Heading and position advance with
//! forward Euler (heading rate and direction taken at the start of the
//! substep); the distance travelled within a substep is the exact
//! constant-acceleration displacement, clamped so the vehicle never reverses.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coverset::{CoverConfig, CoverResult, CoverageReport, SubsetCover};
use crate::error::{Error, Result};
use crate::traj::{point_distance, same_rate, AgentState, DistanceKind, Point, Provenance, Trajectory, TrajectoryCorpus, TrajectorySet};

/// Profiles whose agent-frame rollouts differ by less than this (MaxL2) are
/// treated as the same mode.
pub const DEDUP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleParams {
    /// Wheelbase in meters.
    pub wheelbase: f64,
}

impl VehicleParams {
    pub fn new(wheelbase: f64) -> Result<Self> {
        if !(wheelbase.is_finite() && wheelbase > 0.0) {
            return Err(Error::invalid(format!("wheelbase {wheelbase} must be positive")));
        }
        Ok(VehicleParams { wheelbase })
    }
}

impl Default for VehicleParams {
    fn default() -> Self {
        VehicleParams { wheelbase: 3.0 }
    }
}

/// Constant lateral and longitudinal acceleration held over the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlProfile {
    pub a_lat: f64,
    pub a_lon: f64,
}

impl ControlProfile {
    pub fn new(a_lat: f64, a_lon: f64) -> Result<Self> {
        if !(a_lat.is_finite() && a_lon.is_finite()) {
            return Err(Error::invalid("control profile must be finite"));
        }
        Ok(ControlProfile { a_lat, a_lon })
    }

    pub fn mirrored(self) -> Self {
        ControlProfile {
            a_lat: -self.a_lat,
            a_lon: self.a_lon,
        }
    }
}

/// Cartesian grid of candidate control profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlGrid {
    lat_values: Vec<f64>,
    lon_values: Vec<f64>,
}

impl ControlGrid {
    pub fn new(lat_values: Vec<f64>, lon_values: Vec<f64>) -> Result<Self> {
        for (name, values) in [("lateral", &lat_values), ("longitudinal", &lon_values)] {
            if values.is_empty() {
                return Err(Error::invalid(format!("{name} grid is empty")));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("{name} grid has non-finite values")));
            }
            if values.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(format!("{name} grid must be strictly increasing")));
            }
        }
        let n = lat_values.len();
        if (0..n).any(|i| lat_values[i] != -lat_values[n - 1 - i]) {
            return Err(Error::invalid("lateral grid must be symmetric about zero"));
        }
        Ok(ControlGrid { lat_values, lon_values })
    }

    pub fn lat_values(&self) -> &[f64] {
        &self.lat_values
    }

    pub fn lon_values(&self) -> &[f64] {
        &self.lon_values
    }

    pub fn len(&self) -> usize {
        self.lat_values.len() * self.lon_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All profiles, lateral value outermost.
    pub fn profiles(&self) -> Vec<ControlProfile> {
        self.lat_values
            .iter()
            .flat_map(|&a_lat| self.lon_values.iter().map(move |&a_lon| ControlProfile { a_lat, a_lon }))
            .collect()
    }
}

impl Default for ControlGrid {
    fn default() -> Self {
        ControlGrid {
            lat_values: vec![-6.0, -4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0, 6.0],
            lon_values: vec![-4.0, -2.0, -1.0, 0.0, 1.0, 2.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationConfig {
    /// Output sampling interval in seconds.
    pub dt: f64,
    /// Integration substeps per output sample.
    pub substeps: usize,
    /// Number of output samples.
    pub horizon_steps: usize,
}

impl IntegrationConfig {
    pub fn new(dt: f64, substeps: usize, horizon_steps: usize) -> Result<Self> {
        let cfg = IntegrationConfig {
            dt,
            substeps,
            horizon_steps,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid(format!("dt {} must be positive", self.dt)));
        }
        if self.substeps == 0 || self.horizon_steps == 0 {
            return Err(Error::invalid("substeps and horizon_steps must be at least 1"));
        }
        Ok(())
    }

    pub fn with_substeps(mut self, substeps: usize) -> Self {
        self.substeps = substeps;
        self
    }

    pub fn horizon_seconds(&self) -> f64 {
        self.dt * self.horizon_steps as f64
    }

    pub(crate) fn check_matches(&self, corpus: &TrajectoryCorpus) -> Result<()> {
        if let Some(first) = corpus.items().first() {
            if first.len() != self.horizon_steps {
                return Err(Error::LengthMismatch {
                    left: first.len(),
                    right: self.horizon_steps,
                });
            }
            if !same_rate(first.dt(), self.dt) {
                return Err(Error::RateMismatch {
                    left: first.dt(),
                    right: self.dt,
                });
            }
        }
        Ok(())
    }
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            dt: 0.5,
            substeps: 10,
            horizon_steps: 12,
        }
    }
}

/// Steering angle that produces lateral acceleration `a_lat` at `speed`.
pub fn lat_to_steer(speed: f64, a_lat: f64, params: &VehicleParams) -> f64 {
    let v = speed.max(1.0);
    let curvature = a_lat / (v * v);
    (curvature * params.wheelbase).atan()
}

/// Planar pose plus speed, the integrated state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Pose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub speed: f64,
}

impl From<&AgentState> for Pose {
    fn from(s: &AgentState) -> Self {
        Pose {
            x: s.x,
            y: s.y,
            heading: s.heading,
            speed: s.speed,
        }
    }
}

/// Distance covered and end speed after `h` seconds at constant `accel`,
/// stopping at zero speed.
fn longitudinal(speed: f64, accel: f64, h: f64) -> (f64, f64) {
    let end = speed + accel * h;
    if end >= 0.0 {
        (speed * h + 0.5 * accel * h * h, end)
    } else {
        (speed * speed / (-2.0 * accel), 0.0)
    }
}

/// Integrate `steps` output samples from `start`. `rates(speed)` returns the
/// heading rate and longitudinal acceleration at the current speed.
pub(crate) fn simulate<F>(start: Pose, dt: f64, substeps: usize, steps: usize, rates: F) -> (Vec<Point>, Pose)
where
    F: Fn(f64) -> (f64, f64),
{
    let h = dt / substeps as f64;
    let mut pose = start;
    let mut points = Vec::with_capacity(steps);
    for _ in 0..steps {
        for _ in 0..substeps {
            let (heading_rate, accel) = rates(pose.speed);
            let (ds, speed) = longitudinal(pose.speed, accel, h);
            let (sin, cos) = pose.heading.sin_cos();
            pose.x += ds * cos;
            pose.y += ds * sin;
            pose.heading += heading_rate * h;
            pose.speed = speed;
        }
        points.push([pose.x, pose.y]);
    }
    (points, pose)
}

pub(crate) fn simulate_profile(start: Pose, profile: ControlProfile, params: &VehicleParams, dt: f64, substeps: usize, steps: usize) -> (Vec<Point>, Pose) {
    simulate(start, dt, substeps, steps, |speed| {
        let steer = lat_to_steer(speed, profile.a_lat, params);
        (speed / params.wheelbase * steer.tan(), profile.a_lon)
    })
}

/// Roll out `profile` from `s0`, returning world-frame positions (the start
/// position excluded).
pub fn integrate(s0: &AgentState, profile: ControlProfile, params: &VehicleParams, cfg: &IntegrationConfig) -> Result<Trajectory> {
    cfg.validate()?;
    s0.validate()?;
    let (points, _) = simulate_profile(s0.into(), profile, params, cfg.dt, cfg.substeps, cfg.horizon_steps);
    Trajectory::new(points, cfg.dt)
}

/// Roll out `profile` directly in the agent frame (origin, heading +y).
///
/// Integration runs with heading 0 and is then rotated a quarter turn, which
/// keeps left and right turns exact mirror images.
pub fn rollout_agent_frame(speed: f64, profile: ControlProfile, params: &VehicleParams, cfg: &IntegrationConfig) -> Trajectory {
    let start = Pose {
        x: 0.0,
        y: 0.0,
        heading: 0.0,
        speed: speed.max(0.0),
    };
    let (points, _) = simulate_profile(start, profile, params, cfg.dt, cfg.substeps, cfg.horizon_steps);
    let points = points.into_iter().map(|[forward, left]| [-left, forward]).collect();
    Trajectory::new(points, cfg.dt).expect("rollout of finite state is finite")
}

/// Agent-frame rollouts of `profiles`, one per profile in order.
pub fn instantiate_profiles(speed: f64, profiles: &[ControlProfile], params: &VehicleParams, cfg: &IntegrationConfig) -> Vec<Trajectory> {
    profiles
        .par_iter()
        .map(|&p| rollout_agent_frame(speed, p, params, cfg))
        .collect()
}

/// Dynamic set for explicit profiles. Profiles whose rollouts coincide with an
/// earlier one (within [`DEDUP_TOLERANCE`]) are dropped.
pub fn profile_set(s0: &AgentState, profiles: &[ControlProfile], params: &VehicleParams, cfg: &IntegrationConfig) -> Result<TrajectorySet> {
    cfg.validate()?;
    s0.validate()?;
    if profiles.is_empty() {
        return Err(Error::EmptySet);
    }
    let rollouts = instantiate_profiles(s0.speed, profiles, params, cfg);
    let mut modes: Vec<Trajectory> = Vec::with_capacity(rollouts.len());
    let mut kept = Vec::with_capacity(rollouts.len());
    for (traj, &profile) in rollouts.into_iter().zip(profiles) {
        let duplicate = modes
            .iter()
            .any(|m| point_distance(m.points(), traj.points(), DistanceKind::MaxL2) < DEDUP_TOLERANCE);
        if !duplicate {
            modes.push(traj);
            kept.push(profile);
        }
    }
    TrajectorySet::from_parts(modes, Provenance::Dynamic, None, Some(kept))
}

/// One agent-frame trajectory per grid profile, rolled out from `s0`.
pub fn dynamic_set(s0: &AgentState, grid: &ControlGrid, params: &VehicleParams, cfg: &IntegrationConfig) -> Result<TrajectorySet> {
    profile_set(s0, &grid.profiles(), params, cfg)
}

/// Result of covering a corpus with control profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCover {
    /// Chosen profiles in selection order.
    pub profiles: Vec<ControlProfile>,
    /// Position of each chosen profile in the candidate grid.
    pub grid_indices: Vec<usize>,
    /// Corpus indices no chosen profile covers.
    pub uncovered: Vec<usize>,
}

/// Greedy cover of the corpus by control profiles. Profile `p` covers sample
/// `i` when `p` rolled out from seed state `i` lands within epsilon of sample
/// `i`. Selection stops once no candidate covers a remaining sample.
pub fn profile_cover(
    corpus: &TrajectoryCorpus,
    candidate_grid: &ControlGrid,
    params: &VehicleParams,
    cfg: &IntegrationConfig,
    config: &CoverConfig,
) -> Result<ProfileCover> {
    Ok(profile_greedy(corpus, candidate_grid, params, cfg, config)?.0)
}

/// The profile cover plus, for each chosen profile in order, the samples it
/// covers.
fn profile_greedy(
    corpus: &TrajectoryCorpus,
    candidate_grid: &ControlGrid,
    params: &VehicleParams,
    cfg: &IntegrationConfig,
    config: &CoverConfig,
) -> Result<(ProfileCover, Vec<Vec<usize>>)> {
    config.validate()?;
    cfg.validate()?;
    let seeds = corpus.seed_states().ok_or(Error::MissingSeedStates)?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    cfg.check_matches(corpus)?;

    let candidates = candidate_grid.profiles();
    let covers: Vec<Vec<usize>> = candidates
        .par_iter()
        .map(|&profile| {
            corpus
                .items()
                .iter()
                .zip(seeds)
                .enumerate()
                .filter(|(_, (item, seed))| config.covers(&rollout_agent_frame(seed.speed, profile, params, cfg), item))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();

    let mut covered = vec![false; corpus.len()];
    let mut used = vec![false; candidates.len()];
    let mut grid_indices = Vec::new();
    loop {
        if config.max_set_size.is_some_and(|cap| grid_indices.len() >= cap) {
            break;
        }
        let mut best = None;
        let mut best_gain = 0;
        for (p, list) in covers.iter().enumerate() {
            if used[p] {
                continue;
            }
            let gain = list.iter().filter(|&&i| !covered[i]).count();
            if gain > best_gain {
                best = Some(p);
                best_gain = gain;
            }
        }
        let Some(p) = best else { break };
        used[p] = true;
        grid_indices.push(p);
        for &i in &covers[p] {
            covered[i] = true;
        }
    }

    let chosen_covers = grid_indices.iter().map(|&p| covers[p].clone()).collect();
    let cover = ProfileCover {
        profiles: grid_indices.iter().map(|&p| candidates[p]).collect(),
        grid_indices,
        uncovered: (0..corpus.len()).filter(|&i| !covered[i]).collect(),
    };
    Ok((cover, chosen_covers))
}

/// Control profiles plus the fixed trajectories covering what they miss.
///
/// The dynamic part only becomes concrete trajectories once an agent state
/// is supplied; see [`HybridPlan::instantiate`].
#[derive(Debug, Clone, PartialEq)]
pub struct HybridPlan {
    pub profiles: Vec<ControlProfile>,
    pub fixed: Vec<Trajectory>,
    /// Corpus index of each fixed trajectory.
    pub fixed_sources: Vec<usize>,
    /// False when a size cap stopped the residual cover early.
    pub complete: bool,
}

impl HybridPlan {
    pub fn len(&self) -> usize {
        self.profiles.len() + self.fixed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Label space for an agent in state `s0`: the dynamic modes, in profile
    /// order, followed by the fixed modes.
    pub fn instantiate(&self, s0: &AgentState, params: &VehicleParams, cfg: &IntegrationConfig) -> Result<TrajectorySet> {
        cfg.validate()?;
        let mut modes = instantiate_profiles(s0.speed, &self.profiles, params, cfg);
        modes.extend(self.fixed.iter().cloned());
        TrajectorySet::from_parts(modes, Provenance::Hybrid, None, Some(self.profiles.clone()))
    }

    /// Coverage of the corpus where each sample is matched against the
    /// profiles rolled out from its own seed state and the fixed modes.
    pub fn coverage_report(
        &self,
        corpus: &TrajectoryCorpus,
        params: &VehicleParams,
        cfg: &IntegrationConfig,
        config: &CoverConfig,
    ) -> Result<CoverageReport> {
        config.validate()?;
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let seeds = corpus.seed_states().ok_or(Error::MissingSeedStates)?;
        cfg.check_matches(corpus)?;
        let residuals = corpus
            .items()
            .par_iter()
            .zip(seeds)
            .map(|(item, seed)| {
                let dynamic = self
                    .profiles
                    .iter()
                    .map(|&p| rollout_agent_frame(seed.speed, p, params, cfg))
                    .map(|t| point_distance(t.points(), item.points(), config.kind));
                let fixed = self
                    .fixed
                    .iter()
                    .map(|t| point_distance(t.points(), item.points(), config.kind));
                dynamic.chain(fixed).fold(f64::INFINITY, f64::min)
            })
            .collect();
        Ok(CoverageReport::from_residuals(residuals, config.epsilon))
    }
}

/// Profile cover followed by a fixed greedy cover of the samples the profiles
/// miss.
///
/// Only a prefix of the greedy profile order is kept: its length minimizes
/// the total set size, ties going to the longer prefix. The empty prefix is
/// the plain fixed cover, so the plan is never larger than it.
pub fn hybrid_plan(
    corpus: &TrajectoryCorpus,
    candidate_grid: &ControlGrid,
    params: &VehicleParams,
    cfg: &IntegrationConfig,
    config: &CoverConfig,
) -> Result<HybridPlan> {
    let (dynamic, chosen_covers) = profile_greedy(corpus, candidate_grid, params, cfg, config)?;
    // first prefix length whose profiles cover each sample
    let mut reached_at = vec![usize::MAX; corpus.len()];
    for (m, list) in chosen_covers.iter().enumerate() {
        for &i in list {
            reached_at[i] = reached_at[i].min(m + 1);
        }
    }
    let residual = SubsetCover::new(corpus, config)?;
    let mut best: Option<((bool, usize), usize, Option<CoverResult>)> = None;
    for m in (0..=dynamic.profiles.len()).rev() {
        let uncovered: Vec<usize> = (0..corpus.len()).filter(|&i| reached_at[i] > m).collect();
        let fixed = if uncovered.is_empty() {
            None
        } else {
            Some(residual.cover(&uncovered)?)
        };
        let complete = fixed.as_ref().is_none_or(|f| f.complete);
        let key = (!complete, m + fixed.as_ref().map_or(0, |f| f.set.len()));
        if best.as_ref().is_none_or(|(k, _, _)| key < *k) {
            best = Some((key, m, fixed));
        }
    }
    let (_, m, fixed) = best.expect("prefix range is never empty");
    let (fixed, fixed_sources, complete) = match fixed {
        None => (Vec::new(), Vec::new(), true),
        Some(f) => (
            f.set.modes().to_vec(),
            f.set.source_indices().expect("greedy cover records sources").to_vec(),
            f.complete,
        ),
    };
    Ok(HybridPlan {
        profiles: dynamic.profiles[..m].to_vec(),
        fixed,
        fixed_sources,
        complete,
    })
}

/// Hybrid set instantiated for the agent state `s0`.
pub fn hybrid_set(
    corpus: &TrajectoryCorpus,
    s0: &AgentState,
    candidate_grid: &ControlGrid,
    params: &VehicleParams,
    cfg: &IntegrationConfig,
    config: &CoverConfig,
) -> Result<TrajectorySet> {
    hybrid_plan(corpus, candidate_grid, params, cfg, config)?.instantiate(s0, params, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steering_formula() {
        let params = VehicleParams::new(3.0).unwrap();
        assert_eq!(lat_to_steer(7.0, 0.0, &params), 0.0);
        // kappa = 1 / 4, steer = atan(0.75)
        assert!((lat_to_steer(2.0, 1.0, &params) - 0.643_501_108_793_284_4).abs() < 1e-15);
        assert_eq!(lat_to_steer(0.5, 1.3, &params), lat_to_steer(1.0, 1.3, &params));
        assert_eq!(lat_to_steer(0.0, -2.0, &params), lat_to_steer(1.0, -2.0, &params));
    }

    #[test]
    fn straight_constant_velocity() {
        let s0 = AgentState::at_origin(5.0);
        let cfg = IntegrationConfig::new(0.5, 10, 6).unwrap();
        let t = integrate(&s0, ControlProfile::new(0.0, 0.0).unwrap(), &VehicleParams::default(), &cfg).unwrap();
        for (k, p) in t.points().iter().enumerate() {
            let expected = 2.5 * (k + 1) as f64;
            assert!(p[0].abs() < 1e-12, "{p:?}");
            assert!((p[1] - expected).abs() < 1e-12, "{p:?}");
        }
    }

    #[test]
    fn constant_acceleration_arc_length() {
        let s0 = AgentState::at_origin(2.0);
        let cfg = IntegrationConfig::new(0.5, 10, 12).unwrap();
        let t = integrate(&s0, ControlProfile::new(0.0, 1.0).unwrap(), &VehicleParams::default(), &cfg).unwrap();
        for (k, p) in t.points().iter().enumerate() {
            let time = 0.5 * (k + 1) as f64;
            assert!((p[1] - (2.0 * time + 0.5 * time * time)).abs() < 1e-3);
        }
    }

    #[test]
    fn braking_stops_without_reversing() {
        let s0 = AgentState::at_origin(2.0);
        let cfg = IntegrationConfig::default();
        let t = integrate(&s0, ControlProfile::new(0.0, -4.0).unwrap(), &VehicleParams::default(), &cfg).unwrap();
        // v^2 / (2 |a|) = 0.5 m
        for p in t.points() {
            assert!(p[1] <= 0.5 + 1e-12);
        }
        assert!((t.last()[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn grid_validation() {
        assert!(ControlGrid::new(vec![], vec![0.0]).is_err());
        assert!(ControlGrid::new(vec![-1.0, 0.0, 2.0], vec![0.0]).is_err());
        assert!(ControlGrid::new(vec![1.0, -1.0], vec![0.0]).is_err());
        assert!(ControlGrid::new(vec![-1.0, 1.0], vec![0.0, 0.0]).is_err());
        let grid = ControlGrid::default();
        assert_eq!(grid.len(), 66);
        assert_eq!(grid.profiles()[0], ControlProfile { a_lat: -6.0, a_lon: -4.0 });
    }

    #[test]
    fn single_profile_dynamic_set() {
        let grid = ControlGrid::new(vec![0.0], vec![0.0]).unwrap();
        let s0 = AgentState::new(4.0, -3.0, 0.3, 6.0, 0.0, 0.0).unwrap();
        let set = dynamic_set(&s0, &grid, &VehicleParams::default(), &IntegrationConfig::default()).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.provenance(), Provenance::Dynamic);
        for (k, p) in set.modes()[0].points().iter().enumerate() {
            assert!(p[0].abs() < 1e-12);
            assert!((p[1] - 3.0 * (k + 1) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn agent_frame_matches_normalized_world_rollout() {
        let params = VehicleParams::default();
        let cfg = IntegrationConfig::default();
        let s0 = AgentState::new(12.0, -7.0, 2.1, 6.0, 0.0, 0.0).unwrap();
        let profile = ControlProfile::new(1.5, -0.5).unwrap();
        let world = crate::traj::normalize_frame(&integrate(&s0, profile, &params, &cfg).unwrap(), &s0);
        let local = rollout_agent_frame(6.0, profile, &params, &cfg);
        assert!(point_distance(world.points(), local.points(), DistanceKind::MaxL2) < 1e-9);
        let up = integrate(&AgentState::at_origin(6.0), profile, &params, &cfg).unwrap();
        assert!(point_distance(up.points(), local.points(), DistanceKind::MaxL2) < 1e-9);
    }

    #[test]
    fn profile_cover_requires_seeds() {
        let t = Trajectory::new(vec![[0.0, 1.0]; 12], 0.5).unwrap();
        let corpus = TrajectoryCorpus::new(vec![t], None).unwrap();
        let err = profile_cover(
            &corpus,
            &ControlGrid::default(),
            &VehicleParams::default(),
            &IntegrationConfig::default(),
            &CoverConfig::new(2.0).unwrap(),
        );
        assert!(matches!(err, Err(Error::MissingSeedStates)));
    }
}
