//! Seeded synthetic corpora from the kinematic model.
//!
//! Each record draws a world pose and speed, a control profile (optionally
//! switching to a second profile at a random step), rolls it out, and adds
//! Gaussian position noise. The seed state's `accel` and `yaw_rate` are the
//! initial longitudinal acceleration and heading rate, so the physics
//! baselines see consistent track quantities.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dynamics::{lat_to_steer, simulate_profile, ControlProfile, Pose, VehicleParams};
use crate::error::{Error, Result};
use crate::io::{CorpusFile, CorpusHeader, CorpusRecord, CORPUS_VERSION};
use crate::traj::AgentState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub count: usize,
    pub horizon_s: f64,
    pub dt: f64,
    pub speed_range: (f64, f64),
    pub noise_std: f64,
    pub seed: u64,
    pub lat_range: (f64, f64),
    pub lon_range: (f64, f64),
    /// Probability that a record switches profile partway through.
    pub switch_prob: f64,
    /// Use this profile for every record, with no switches.
    pub forced_profile: Option<ControlProfile>,
    pub params: VehicleParams,
    pub substeps: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            count: 2000,
            horizon_s: 6.0,
            dt: 0.5,
            speed_range: (0.0, 15.0),
            noise_std: 0.0,
            seed: 42,
            lat_range: (-4.0, 4.0),
            lon_range: (-3.0, 2.0),
            switch_prob: 0.2,
            forced_profile: None,
            params: VehicleParams::default(),
            substeps: 10,
        }
    }
}

impl GenConfig {
    pub fn horizon_steps(&self) -> Result<usize> {
        let steps = self.horizon_s / self.dt;
        if !(steps.is_finite() && steps >= 0.5) || (steps - steps.round()).abs() > 1e-9 {
            return Err(Error::InvalidRange(format!(
                "horizon {} s is not a positive multiple of dt {} s",
                self.horizon_s, self.dt
            )));
        }
        Ok(steps.round() as usize)
    }

    fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidRange("count must be at least 1".into()));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidRange(format!("dt {} must be positive", self.dt)));
        }
        self.horizon_steps()?;
        let ranges = [("speed", self.speed_range), ("lateral", self.lat_range), ("longitudinal", self.lon_range)];
        for (name, (lo, hi)) in ranges {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidRange(format!("{name} range [{lo}, {hi}]")));
            }
        }
        if self.speed_range.0 < 0.0 {
            return Err(Error::InvalidRange("speeds must be non-negative".into()));
        }
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return Err(Error::InvalidRange(format!("noise_std {}", self.noise_std)));
        }
        if !(0.0..=1.0).contains(&self.switch_prob) {
            return Err(Error::InvalidRange(format!("switch_prob {}", self.switch_prob)));
        }
        if self.substeps == 0 {
            return Err(Error::InvalidRange("substeps must be at least 1".into()));
        }
        Ok(())
    }
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..hi)
    }
}

fn sample_profile(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> ControlProfile {
    // Half the records drive nearly straight, as real traffic mostly does.
    let a_lat = if rng.random_bool(0.5) {
        let sd = 0.1 * (cfg.lat_range.1 - cfg.lat_range.0);
        let draw: f64 = Normal::new(0.0, sd.max(f64::MIN_POSITIVE)).expect("finite sd").sample(rng);
        draw.clamp(cfg.lat_range.0, cfg.lat_range.1)
    } else {
        uniform(rng, cfg.lat_range)
    };
    ControlProfile {
        a_lat,
        a_lon: uniform(rng, cfg.lon_range),
    }
}

/// Generate a corpus. The output depends only on `cfg`.
pub fn gen_corpus(cfg: &GenConfig) -> Result<CorpusFile> {
    cfg.validate()?;
    let steps = cfg.horizon_steps()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let noise = (cfg.noise_std > 0.0).then(|| Normal::new(0.0, cfg.noise_std).expect("valid noise std"));

    let mut records = Vec::with_capacity(cfg.count);
    for i in 0..cfg.count {
        let x = rng.random_range(-100.0..100.0);
        let y = rng.random_range(-100.0..100.0);
        let heading = rng.random_range(-PI..PI);
        let speed = uniform(&mut rng, cfg.speed_range);

        let (first, switch) = match cfg.forced_profile {
            Some(p) => (p, None),
            None => {
                let first = sample_profile(&mut rng, cfg);
                let switch = (steps > 1 && rng.random_bool(cfg.switch_prob))
                    .then(|| (rng.random_range(1..steps), sample_profile(&mut rng, cfg)));
                (first, switch)
            }
        };

        let start = Pose { x, y, heading, speed };
        let head_steps = switch.map_or(steps, |(at, _)| at);
        let (mut future, pose) = simulate_profile(start, first, &cfg.params, cfg.dt, cfg.substeps, head_steps);
        if let Some((at, second)) = switch {
            let (tail, _) = simulate_profile(pose, second, &cfg.params, cfg.dt, cfg.substeps, steps - at);
            future.extend(tail);
        }
        if let Some(noise) = &noise {
            for p in &mut future {
                p[0] += noise.sample(&mut rng);
                p[1] += noise.sample(&mut rng);
            }
        }

        let steer = lat_to_steer(speed, first.a_lat, &cfg.params);
        let yaw_rate = speed / cfg.params.wheelbase * steer.tan();
        records.push(CorpusRecord {
            id: format!("syn-{i:06}"),
            dt: cfg.dt,
            seed_state: AgentState::new(x, y, heading, speed, first.a_lon, yaw_rate)?,
            future,
        });
    }

    CorpusFile::new(
        CorpusHeader {
            version: CORPUS_VERSION,
            horizon_steps: steps,
            dt: cfg.dt,
        },
        records,
    )
}
