//! File formats: JSONL corpora, trajectory-set JSON and model JSON.
//!
//! Corpus files start with a header line `{"version":1,"horizon_steps":N,"dt":DT}`
//! followed by one record per line:
//!
//! ```text
//! {"id":"...","dt":0.5,"seed_state":{"x":..,"y":..,"heading":..,"speed":..,"accel":..,"yaw_rate":..},
//!  "future":[[x,y],...]}
//! ```
//!
//! Futures are world-frame positions after the seed state; readers express
//! them in the seed state's agent frame. All writes go through a temporary
//! file in the destination directory followed by a rename.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::classifier::{set_fingerprint, SoftmaxModel};
use crate::dynamics::{ControlProfile, HybridPlan, IntegrationConfig, VehicleParams};
use crate::error::{Error, Result};
use crate::metrics::EvalInstance;
use crate::traj::{normalize_frame, same_rate, AgentState, DistanceKind, Point, Provenance, Trajectory, TrajectoryCorpus, TrajectorySet};

pub const CORPUS_VERSION: u32 = 1;

/// Write `bytes` to `path` via a sibling temporary file and rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusHeader {
    pub version: u32,
    pub horizon_steps: usize,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    pub dt: f64,
    pub seed_state: AgentState,
    pub future: Vec<Point>,
}

impl CorpusRecord {
    /// Future in the agent frame of the seed state.
    pub fn agent_frame_future(&self) -> Result<Trajectory> {
        let world = Trajectory::new(self.future.clone(), self.dt)?;
        Ok(normalize_frame(&world, &self.seed_state))
    }

    /// Straight-line distance from the seed position to the last future point.
    pub fn displacement(&self) -> f64 {
        let end = self.future[self.future.len() - 1];
        (end[0] - self.seed_state.x).hypot(end[1] - self.seed_state.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusFile {
    pub header: CorpusHeader,
    pub records: Vec<CorpusRecord>,
}

impl CorpusFile {
    pub fn new(header: CorpusHeader, records: Vec<CorpusRecord>) -> Result<Self> {
        let file = CorpusFile { header, records };
        file.header_check()?;
        for (i, r) in file.records.iter().enumerate() {
            file.record_check(r).map_err(|e| e.at_instance(i))?;
        }
        Ok(file)
    }

    fn header_check(&self) -> Result<()> {
        if self.header.version != CORPUS_VERSION {
            return Err(Error::invalid(format!("unsupported corpus version {}", self.header.version)));
        }
        if self.header.horizon_steps == 0 || !(self.header.dt.is_finite() && self.header.dt > 0.0) {
            return Err(Error::invalid("header needs positive horizon_steps and dt"));
        }
        Ok(())
    }

    fn record_check(&self, r: &CorpusRecord) -> Result<()> {
        if r.future.len() != self.header.horizon_steps {
            return Err(Error::LengthMismatch {
                left: r.future.len(),
                right: self.header.horizon_steps,
            });
        }
        if !same_rate(r.dt, self.header.dt) {
            return Err(Error::RateMismatch {
                left: r.dt,
                right: self.header.dt,
            });
        }
        r.seed_state.validate()?;
        if r.future.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite future coordinates"));
        }
        Ok(())
    }

    /// Agent-frame trajectories with their seed states.
    pub fn corpus(&self) -> Result<TrajectoryCorpus> {
        let items = self
            .records
            .iter()
            .map(CorpusRecord::agent_frame_future)
            .collect::<Result<Vec<_>>>()?;
        let seeds = self.records.iter().map(|r| r.seed_state).collect();
        TrajectoryCorpus::new(items, Some(seeds))
    }

    pub fn eval_instances(&self) -> Result<Vec<EvalInstance>> {
        self.records
            .iter()
            .map(|r| {
                Ok(EvalInstance {
                    state: r.seed_state,
                    truth: r.agent_frame_future()?,
                })
            })
            .collect()
    }

    /// Drop records whose final position lies within `threshold` meters of
    /// the seed position.
    pub fn retain_moving(&mut self, threshold: f64) {
        self.records.retain(|r| r.displacement() >= threshold);
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = serde_json::to_string(&self.header)?;
        out.push('\n');
        for r in &self.records {
            out.push_str(&serde_json::to_string(r)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_jsonl()?.as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let format_err = |line: usize, message: String| Error::Format {
            path: path.to_path_buf(),
            line,
            message,
        };
        let reader = BufReader::new(fs::File::open(path)?);
        let mut lines = reader.lines().enumerate().filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty()));
        let (_, header_line) = lines.next().ok_or_else(|| format_err(1, "missing header".into()))?;
        let header: CorpusHeader = serde_json::from_str(&header_line?).map_err(|e| format_err(1, e.to_string()))?;
        let mut file = CorpusFile {
            header,
            records: Vec::new(),
        };
        file.header_check().map_err(|e| format_err(1, e.to_string()))?;
        for (i, line) in lines {
            let record: CorpusRecord = serde_json::from_str(&line?).map_err(|e| format_err(i + 1, e.to_string()))?;
            file.record_check(&record).map_err(|e| format_err(i + 1, e.to_string()))?;
            file.records.push(record);
        }
        Ok(file)
    }
}

/// Parameters needed to re-instantiate profile-based modes for a new state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsInfo {
    pub wheelbase: f64,
    pub substeps: usize,
    /// Speed the stored dynamic modes were rolled out at.
    pub reference_speed: f64,
}

/// On-disk trajectory set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetFile {
    pub provenance: Provenance,
    pub epsilon: f64,
    pub distance_kind: DistanceKind,
    pub dt: f64,
    pub modes: Vec<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profiles: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_indices: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsInfo>,
}

impl SetFile {
    pub fn from_set(set: &TrajectorySet, epsilon: f64, distance_kind: DistanceKind, dynamics: Option<DynamicsInfo>) -> Self {
        SetFile {
            provenance: set.provenance(),
            epsilon,
            distance_kind,
            dt: set.dt(),
            modes: set.modes().iter().map(|m| m.points().to_vec()).collect(),
            profiles: set.profiles().map(|ps| ps.iter().map(|p| [p.a_lat, p.a_lon]).collect()),
            source_indices: set.source_indices().map(<[usize]>::to_vec),
            dynamics,
        }
    }

    pub fn to_set(&self) -> Result<TrajectorySet> {
        if self.modes.is_empty() {
            return Err(Error::EmptySet);
        }
        let modes = self
            .modes
            .iter()
            .map(|m| Trajectory::new(m.clone(), self.dt))
            .collect::<Result<Vec<_>>>()?;
        let profiles = self
            .profiles
            .as_ref()
            .map(|ps| ps.iter().map(|&[a, b]| ControlProfile::new(a, b)).collect::<Result<Vec<_>>>())
            .transpose()?;
        if profiles.is_some() && self.dynamics.is_none() {
            return Err(Error::invalid("set with profiles needs dynamics parameters"));
        }
        TrajectorySet::from_parts(modes, self.provenance, self.source_indices.clone(), profiles)
    }

    /// The profile-plus-fixed view of a dynamic or hybrid set.
    pub fn plan(&self) -> Result<Option<(HybridPlan, VehicleParams, usize)>> {
        let set = self.to_set()?;
        let (Some(profiles), Some(info)) = (set.profiles(), self.dynamics) else {
            return Ok(None);
        };
        let plan = HybridPlan {
            profiles: profiles.to_vec(),
            fixed: set.fixed_modes().to_vec(),
            fixed_sources: Vec::new(),
            complete: true,
        };
        Ok(Some((plan, VehicleParams::new(info.wheelbase)?, info.substeps)))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        write_atomic(path, &bytes)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&fs::read(path)?)?)
    }
}

/// Per-instance label space for a set file: fixed sets are shared, sets with
/// profiles are re-rolled from each agent's speed.
#[derive(Debug, Clone)]
pub enum LabelSpace {
    Shared(Arc<TrajectorySet>),
    PerInstance {
        plan: HybridPlan,
        params: VehicleParams,
        cfg: IntegrationConfig,
        provenance: Provenance,
    },
}

impl LabelSpace {
    pub fn from_file(file: &SetFile, horizon_steps: usize) -> Result<Self> {
        match file.plan()? {
            None => Ok(LabelSpace::Shared(Arc::new(file.to_set()?))),
            Some((plan, params, substeps)) => Ok(LabelSpace::PerInstance {
                plan,
                params,
                cfg: IntegrationConfig::new(file.dt, substeps, horizon_steps)?,
                provenance: file.provenance,
            }),
        }
    }

    pub fn for_state(&self, state: &AgentState) -> Result<Arc<TrajectorySet>> {
        match self {
            LabelSpace::Shared(set) => Ok(set.clone()),
            LabelSpace::PerInstance {
                plan,
                params,
                cfg,
                provenance,
            } => {
                let set = plan.instantiate(state, params, cfg)?;
                let profiles = set.profiles().map(<[ControlProfile]>::to_vec);
                Ok(Arc::new(TrajectorySet::from_parts(set.modes().to_vec(), *provenance, None, profiles)?))
            }
        }
    }
}

/// On-disk classifier weights, tied to a set by fingerprint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub feature_dim: usize,
    pub num_modes: usize,
    pub weights: Vec<Vec<f64>>,
    pub set_fingerprint: String,
    pub label_distance: DistanceKind,
    pub loss_curve: Vec<f64>,
}

impl ModelFile {
    pub fn from_model(model: &SoftmaxModel, label_distance: DistanceKind, loss_curve: Vec<f64>) -> Self {
        ModelFile {
            feature_dim: model.feature_dim(),
            num_modes: model.num_modes(),
            weights: model.weights().chunks(model.feature_dim()).map(<[f64]>::to_vec).collect(),
            set_fingerprint: model.set_fingerprint(),
            label_distance,
            loss_curve,
        }
    }

    /// Rebuild the model against `set`, which must match the stored fingerprint.
    pub fn to_model(&self, set: Arc<TrajectorySet>) -> Result<SoftmaxModel> {
        let actual = set_fingerprint(&set);
        if actual != self.set_fingerprint {
            return Err(Error::invalid(format!(
                "model was trained on set {} but got set {actual}",
                self.set_fingerprint
            )));
        }
        if self.weights.len() != self.num_modes || self.weights.iter().any(|r| r.len() != self.feature_dim) {
            return Err(Error::invalid("weight matrix shape does not match header"));
        }
        SoftmaxModel::from_weights(set, self.feature_dim, self.weights.concat())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        write_atomic(path, &bytes)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&fs::read(path)?)?)
    }
}
