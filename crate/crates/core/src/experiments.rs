//! End-to-end experiments: coverage curves, baseline tables, evaluation over
//! a label space, the label-distance ablation, and the self-check suite.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{physics_oracle, physics_rollout, PhysicsModelKind};
use crate::classifier::{gradient_check, label_with, train_labeled, FeatureVector, LabeledExample, SoftmaxModel, TrainConfig, TrainOutcome};
use crate::coverset::{brute_force_cover, coverage_report, greedy_cover, random_cover, CoverConfig, CoverageReport};
use crate::dynamics::{
    hybrid_plan, instantiate_profiles, profile_cover, rollout_agent_frame, ControlGrid, ControlProfile, IntegrationConfig, VehicleParams,
};
use crate::error::{Error, Result};
use crate::io::{DynamicsInfo, LabelSpace, SetFile};
use crate::metrics::{evaluate_dataset, EvalInstance, MetricsSpec, MetricsTable, PredictionResult};
use crate::traj::{AgentState, DistanceKind, Provenance, Trajectory, TrajectoryCorpus, TrajectorySet};

/// Options for [`build_set_file`].
#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub provenance: Provenance,
    pub cover: CoverConfig,
    /// Best of this many randomized covers instead of the greedy one (fixed sets only).
    pub random_trials: Option<usize>,
    pub seed: u64,
    /// Speed the stored dynamic modes are rolled out at.
    pub reference_speed: f64,
    pub params: VehicleParams,
    pub substeps: usize,
    pub grid: ControlGrid,
}

/// Build a set of the requested provenance from a corpus. The flag is false
/// when a size cap left part of the corpus uncovered.
pub fn build_set_file(corpus: &TrajectoryCorpus, opts: &BuildOptions) -> Result<(SetFile, bool)> {
    let first = corpus.items().first().ok_or(Error::EmptyCorpus)?;
    let cfg = IntegrationConfig::new(first.dt(), opts.substeps, first.len())?;
    let dynamics = DynamicsInfo {
        wheelbase: opts.params.wheelbase,
        substeps: opts.substeps,
        reference_speed: opts.reference_speed,
    };
    let reference = AgentState::at_origin(opts.reference_speed);
    reference.validate()?;
    let (set, complete, dynamics) = match opts.provenance {
        Provenance::Fixed => {
            let result = match opts.random_trials {
                Some(trials) => random_cover(corpus, &opts.cover, trials, opts.seed)?,
                None => greedy_cover(corpus, &opts.cover)?,
            };
            (result.set, result.complete, None)
        }
        Provenance::Dynamic => {
            let cover = profile_cover(corpus, &opts.grid, &opts.params, &cfg, &opts.cover)?;
            if cover.profiles.is_empty() {
                return Err(Error::EmptySet);
            }
            let modes = instantiate_profiles(opts.reference_speed, &cover.profiles, &opts.params, &cfg);
            let set = TrajectorySet::from_parts(modes, Provenance::Dynamic, None, Some(cover.profiles))?;
            (set, cover.uncovered.is_empty(), Some(dynamics))
        }
        Provenance::Hybrid => {
            let plan = hybrid_plan(corpus, &opts.grid, &opts.params, &cfg, &opts.cover)?;
            let set = plan.instantiate(&reference, &opts.params, &cfg)?;
            (set, plan.complete, Some(dynamics))
        }
    };
    Ok((SetFile::from_set(&set, opts.cover.epsilon, opts.cover.kind, dynamics), complete))
}

/// Coverage of `corpus` by a stored set. Sets with profiles are re-rolled
/// from each sample's own seed state.
pub fn set_coverage(file: &SetFile, corpus: &TrajectoryCorpus, config: &CoverConfig) -> Result<CoverageReport> {
    match file.plan()? {
        None => coverage_report(&file.to_set()?, corpus, config),
        Some((plan, params, substeps)) => {
            let first = corpus.items().first().ok_or(Error::EmptyCorpus)?;
            let cfg = IntegrationConfig::new(file.dt, substeps, first.len())?;
            plan.coverage_report(corpus, &params, &cfg, config)
        }
    }
}

/// CSV histogram of residuals with bins `[i * width, (i + 1) * width)`.
pub fn residual_histogram(residuals: &[f64], width: f64) -> Result<String> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::InvalidRange(format!("bin width {width}")));
    }
    let max = residuals.iter().copied().fold(0.0, f64::max);
    let bins = (max / width).floor() as usize + 1;
    let mut counts = vec![0usize; bins];
    for &r in residuals {
        counts[((r / width).floor() as usize).min(bins - 1)] += 1;
    }
    let mut out = String::from("bin_lo,bin_hi,count\n");
    for (i, c) in counts.iter().enumerate() {
        let _ = writeln!(out, "{:.6},{:.6},{c}", i as f64 * width, (i + 1) as f64 * width);
    }
    Ok(out)
}

/// Set sizes needed for one epsilon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub epsilon: f64,
    pub fixed: usize,
    pub hybrid: usize,
    pub hybrid_dynamic: usize,
    pub hybrid_fixed: usize,
    /// Profiles chosen by the profile cover alone.
    pub dynamic: usize,
    /// Fraction of the corpus those profiles cover.
    pub dynamic_coverage: f64,
}

pub fn coverage_curve(
    corpus: &TrajectoryCorpus,
    epsilons: &[f64],
    grid: &ControlGrid,
    params: &VehicleParams,
    cfg: &IntegrationConfig,
    kind: DistanceKind,
) -> Result<Vec<CurveRow>> {
    epsilons
        .iter()
        .map(|&epsilon| {
            let config = CoverConfig::new(epsilon)?.with_kind(kind);
            let fixed = greedy_cover(corpus, &config)?.set.len();
            let dynamic = profile_cover(corpus, grid, params, cfg, &config)?;
            let plan = hybrid_plan(corpus, grid, params, cfg, &config)?;
            Ok(CurveRow {
                epsilon,
                fixed,
                hybrid: plan.len(),
                hybrid_dynamic: plan.profiles.len(),
                hybrid_fixed: plan.fixed.len(),
                dynamic: dynamic.profiles.len(),
                dynamic_coverage: 1.0 - dynamic.uncovered.len() as f64 / corpus.len() as f64,
            })
        })
        .collect()
}

pub fn curve_to_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from("epsilon,fixed,hybrid,hybrid_dynamic,hybrid_fixed,dynamic,dynamic_coverage\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:.6}",
            r.epsilon, r.fixed, r.hybrid, r.hybrid_dynamic, r.hybrid_fixed, r.dynamic, r.dynamic_coverage
        );
    }
    out
}

/// Single-mode rows for the four physics models and the oracle, with
/// minADE_1, FDE and HitRate_{1,d}.
pub fn baseline_table(instances: &[EvalInstance], cfg: &IntegrationConfig, hit_d: f64) -> Result<Vec<(String, MetricsTable)>> {
    let spec = MetricsSpec {
        ks: vec![1],
        hits: vec![(1, hit_d)],
    };
    let mut rows = Vec::new();
    for kind in PhysicsModelKind::ALL {
        let table = evaluate_dataset(
            |_, inst| PredictionResult::single(physics_rollout(&inst.state, kind, cfg)?),
            instances,
            &spec,
        )?;
        rows.push((kind.name().to_string(), table));
    }
    let oracle = evaluate_dataset(
        |_, inst| {
            let (best, _) = physics_oracle(&inst.state, &inst.truth, cfg)?;
            PredictionResult::single(physics_rollout(&inst.state, best, cfg)?)
        },
        instances,
        &spec,
    )?;
    rows.push(("physics_oracle".to_string(), oracle));
    Ok(rows)
}

/// Where mode probabilities come from during evaluation.
#[derive(Debug, Clone, Copy)]
pub enum Scorer<'a> {
    /// Probability one on the mode closest to the truth under `label_kind`.
    Oracle { label_kind: DistanceKind },
    Model(&'a SoftmaxModel),
}

pub fn evaluate_label_space(instances: &[EvalInstance], space: &LabelSpace, scorer: Scorer<'_>, spec: &MetricsSpec) -> Result<MetricsTable> {
    evaluate_dataset(
        |_, inst| {
            let set = space.for_state(&inst.state)?;
            match scorer {
                Scorer::Oracle { label_kind } => {
                    let mode = label_with(&inst.truth, &set, label_kind)?;
                    PredictionResult::one_hot(set, mode)
                }
                Scorer::Model(model) => {
                    let probs = model.probabilities(&FeatureVector::from_state(&inst.state))?;
                    PredictionResult::new(set, probs)
                }
            }
        },
        instances,
        spec,
    )
}

/// Features and nearest-mode labels for each instance.
pub fn label_examples(instances: &[EvalInstance], space: &LabelSpace, kind: DistanceKind) -> Result<Vec<LabeledExample>> {
    instances
        .iter()
        .enumerate()
        .map(|(i, inst)| {
            let set = space.for_state(&inst.state).map_err(|e| e.at_instance(i))?;
            Ok(LabeledExample {
                features: FeatureVector::from_state(&inst.state),
                label: label_with(&inst.truth, &set, kind).map_err(|e| e.at_instance(i))?,
            })
        })
        .collect()
}

/// Train a classifier whose logits index the modes of `reference`.
pub fn train_on(
    instances: &[EvalInstance],
    space: &LabelSpace,
    reference: Arc<TrajectorySet>,
    kind: DistanceKind,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    let examples = label_examples(instances, space, kind)?;
    train_labeled(&examples, reference, cfg)
}

#[derive(Debug, Clone, Copy)]
pub enum AblationMode {
    /// One-hot on the nearest mode under each distance.
    Oracle,
    /// Train under each labelling distance on four fifths of the instances
    /// (index not divisible by 5) and evaluate on the rest.
    Trained(TrainConfig),
}

/// Row name used in ablation tables.
pub fn ablation_row_name(kind: DistanceKind) -> &'static str {
    match kind {
        DistanceKind::MaxL2 => "max_l2",
        DistanceKind::AvgL2 => "avg_l2",
        DistanceKind::RmsL2 => "rms_l2",
    }
}

/// One metrics row per label-matching distance.
pub fn distance_ablation(
    instances: &[EvalInstance],
    space: &LabelSpace,
    reference: Arc<TrajectorySet>,
    mode: AblationMode,
    spec: &MetricsSpec,
) -> Result<Vec<(String, MetricsTable)>> {
    DistanceKind::ALL
        .iter()
        .map(|&kind| {
            let table = match mode {
                AblationMode::Oracle => evaluate_label_space(instances, space, Scorer::Oracle { label_kind: kind }, spec)?,
                AblationMode::Trained(cfg) => {
                    let (train, test): (Vec<_>, Vec<_>) = instances.iter().cloned().enumerate().partition(|(i, _)| i % 5 != 0);
                    let train: Vec<_> = train.into_iter().map(|(_, x)| x).collect();
                    let test: Vec<_> = test.into_iter().map(|(_, x)| x).collect();
                    if train.is_empty() || test.is_empty() {
                        return Err(Error::invalid("ablation needs at least two instances"));
                    }
                    let outcome = train_on(&train, space, reference.clone(), kind, &cfg)?;
                    evaluate_label_space(&test, space, Scorer::Model(&outcome.model), spec)?
                }
            };
            Ok((ablation_row_name(kind).to_string(), table))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Random walk trajectories for small cover instances.
pub fn random_walk_corpus(rng: &mut ChaCha8Rng, n: usize, steps: usize) -> Result<TrajectoryCorpus> {
    let items = (0..n)
        .map(|_| {
            let mut pos = [0.0, 0.0];
            let points = (0..steps)
                .map(|_| {
                    pos[0] += rng.random_range(-1.0..1.0);
                    pos[1] += rng.random_range(0.0..2.0);
                    pos
                })
                .collect();
            Trajectory::new(points, 0.5)
        })
        .collect::<Result<Vec<_>>>()?;
    TrajectoryCorpus::new(items, None)
}

/// Approximation factor checked against brute force: `ceil(ln n)`, at least 1.
pub fn greedy_bound_factor(n: usize) -> usize {
    ((n as f64).ln().ceil() as usize).max(1)
}

fn check_greedy_vs_brute_force(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let mut worst = String::new();
    let mut passed = true;
    for trial in 0..50 {
        let n = rng.random_range(2..=12);
        let corpus = random_walk_corpus(rng, n, 6)?;
        let config = CoverConfig::new(rng.random_range(0.5..3.0))?;
        let greedy = greedy_cover(&corpus, &config)?.set;
        let opt = brute_force_cover(&corpus, &config)?;
        let covered = coverage_report(&greedy, &corpus, &config)?.fraction_covered == 1.0;
        if !covered || opt.len() > greedy.len() || greedy.len() > greedy_bound_factor(n) * opt.len() {
            passed = false;
            worst = format!("trial {trial}: n={n} greedy={} optimum={} covered={covered}", greedy.len(), opt.len());
        }
    }
    Ok(CheckOutcome {
        name: "greedy_vs_brute_force".into(),
        passed,
        detail: if passed { "50 instances within ceil(ln n) of optimum".into() } else { worst },
    })
}

/// Worst distance of a constant lateral acceleration rollout from the circle
/// of radius `v^2 / a_lat` through the start point, tangent to the heading.
pub fn circle_deviation(speed: f64, a_lat: f64, cfg: &IntegrationConfig) -> f64 {
    let params = VehicleParams::default();
    let radius = speed * speed / a_lat;
    let t = rollout_agent_frame(speed, ControlProfile { a_lat, a_lon: 0.0 }, &params, cfg);
    // agent frame faces +y: a left turn circles around (-radius, 0)
    t.points()
        .iter()
        .map(|p| ((p[0] + radius).hypot(p[1]) - radius.abs()).abs())
        .fold(0.0, f64::max)
}

fn check_circle_arc() -> Result<CheckOutcome> {
    let cfg = IntegrationConfig::new(0.1, 10, 60)?;
    let deviation = circle_deviation(4.0, 2.0, &cfg);
    Ok(CheckOutcome {
        name: "circle_arc".into(),
        passed: deviation <= 0.05,
        detail: format!("max radial deviation {deviation:.4} m (limit 0.05)"),
    })
}

fn check_gradients(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let modes = rng.random_range(2..=6);
        let dim = rng.random_range(1..=5);
        let set = Arc::new(TrajectorySet::new(
            (0..modes).map(|i| Trajectory::new(vec![[i as f64, 1.0]], 0.5)).collect::<Result<_>>()?,
            Provenance::Fixed,
        )?);
        let weights = (0..modes * dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        let model = SoftmaxModel::from_weights(set, dim, weights)?;
        let features = FeatureVector::new((0..dim).map(|_| rng.random_range(-2.0..2.0)).collect())?;
        let label = rng.random_range(0..modes);
        worst = worst.max(gradient_check(&model, &features, label)?);
    }
    Ok(CheckOutcome {
        name: "gradient_check".into(),
        passed: worst <= 1e-5,
        detail: format!("max relative error {worst:.3e} (limit 1e-5)"),
    })
}

/// Oracle checks run by `covertraj selfcheck`.
pub fn selfcheck(seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(vec![
        check_greedy_vs_brute_force(&mut rng)?,
        check_circle_arc()?,
        check_gradients(&mut rng)?,
    ])
}
