//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use covertraj::baselines::{physics_oracle, physics_rollout, PhysicsModelKind};
use covertraj::classifier::{gradient_check, softmax, train_labeled, FeatureVector, LabeledExample, SoftmaxModel, TrainConfig};
use covertraj::coverset::{brute_force_cover, greedy_cover, CoverConfig};
use covertraj::dynamics::{
    hybrid_plan, integrate, rollout_agent_frame, ControlGrid, ControlProfile, IntegrationConfig, VehicleParams,
};
use covertraj::metrics::{hit, min_ade, PredictionResult};
use covertraj::synth::{gen_corpus, GenConfig};
use covertraj::{distance, normalize_frame, AgentState, DistanceKind, Provenance, Trajectory, TrajectoryCorpus, TrajectorySet};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn max_l2(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p[0] - q[0]).hypot(p[1] - q[1]))
        .fold(0.0, f64::max)
}

fn synthetic(count: usize, noise_std: f64, seed: u64) -> TrajectoryCorpus {
    let cfg = GenConfig {
        count,
        noise_std,
        seed,
        ..GenConfig::default()
    };
    gen_corpus(&cfg).unwrap().corpus().unwrap()
}

fn random_walks(rng: &mut ChaCha8Rng, n: usize, steps: usize) -> TrajectoryCorpus {
    let items = (0..n)
        .map(|_| {
            let (mut x, mut y) = (0.0, 0.0);
            let pts = (0..steps)
                .map(|_| {
                    x += rng.random_range(-1.5..1.5);
                    y += rng.random_range(0.0..2.0);
                    [x, y]
                })
                .collect();
            Trajectory::new(pts, 0.5).unwrap()
        })
        .collect();
    TrajectoryCorpus::new(items, None).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng) -> AgentState {
    AgentState::new(
        rng.random_range(-50.0..50.0),
        rng.random_range(-50.0..50.0),
        rng.random_range(-3.1..3.1),
        rng.random_range(0.0..15.0),
        rng.random_range(-3.0..2.0),
        rng.random_range(-0.5..0.5),
    )
    .unwrap()
}

fn cover_correctness() -> Outcome {
    let mut worst = Duration::ZERO;
    let mut sizes = Vec::new();
    for (count, noise, seed) in [(2000, 0.0, 42), (1000, 0.3, 7)] {
        let corpus = synthetic(count, noise, seed);
        let start = Instant::now();
        for eps in [2.0, 3.0, 4.0, 5.0, 8.0] {
            let result = greedy_cover(&corpus, &CoverConfig::new(eps).unwrap()).unwrap();
            let all = corpus
                .items()
                .iter()
                .all(|k| result.set.modes().iter().any(|l| max_l2(k.points(), l.points()) <= eps));
            if !all || !result.complete {
                return outcome(false, format!("corpus seed {seed} not covered at eps {eps}"));
            }
            sizes.push(result.set.len());
        }
        worst = worst.max(start.elapsed());
    }
    outcome(
        worst <= Duration::from_secs(60),
        format!("every sample within eps of a set element, sizes {sizes:?}, slowest corpus {worst:.1?}"),
    )
}

fn approximation_bound() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_ratio: f64 = 0.0;
    for i in 0..100 {
        let n = rng.random_range(2..=12);
        let corpus = random_walks(&mut rng, n, 6);
        let config = CoverConfig::new(rng.random_range(0.5..4.0)).unwrap();
        let greedy = greedy_cover(&corpus, &config).unwrap().set.len();
        let opt = brute_force_cover(&corpus, &config).unwrap().len();
        let factor = (n as f64).ln().ceil() as usize;
        if greedy > factor * opt {
            return outcome(false, format!("instance {i}: n={n} greedy={greedy} optimum={opt}"));
        }
        worst_ratio = worst_ratio.max(greedy as f64 / opt as f64);
    }
    let elapsed = start.elapsed();
    outcome(
        elapsed <= Duration::from_secs(30),
        format!("100 instances, worst greedy/optimum {worst_ratio:.2}, {elapsed:.1?}"),
    )
}

fn curve_shape() -> Outcome {
    let corpus = synthetic(2000, 0.0, 42);
    let sizes: Vec<usize> = [8.0, 5.0, 4.0, 3.0, 2.0]
        .iter()
        .map(|&e| greedy_cover(&corpus, &CoverConfig::new(e).unwrap()).unwrap().set.len())
        .collect();
    let ordered = sizes.windows(2).all(|w| w[0] <= w[1]);
    outcome(
        ordered && sizes[4] < 2000,
        format!("sizes at eps 8,5,4,3,2: {sizes:?}"),
    )
}

fn dynamic_advantage() -> Outcome {
    let corpus = synthetic(2000, 0.0, 42);
    let params = VehicleParams::default();
    let cfg = IntegrationConfig::default();
    let mut detail = Vec::new();
    let mut passed = true;
    for eps in [2.0, 3.0] {
        let config = CoverConfig::new(eps).unwrap();
        let fixed = greedy_cover(&corpus, &config).unwrap().set.len();
        let hybrid = hybrid_plan(&corpus, &ControlGrid::default(), &params, &cfg, &config).unwrap().len();
        passed &= hybrid <= fixed;
        detail.push(format!("eps {eps}: hybrid {hybrid} vs fixed {fixed}"));
    }
    outcome(passed, detail.join(", "))
}

fn radial_deviation(cfg: &IntegrationConfig) -> f64 {
    let (v, a_lat) = (4.0, 2.0);
    let r = v * v / a_lat;
    let t = rollout_agent_frame(v, ControlProfile::new(a_lat, 0.0).unwrap(), &VehicleParams::default(), cfg);
    t.points()
        .iter()
        .map(|p| ((p[0] + r).hypot(p[1]) - r).abs())
        .fold(0.0, f64::max)
}

fn dynamics_oracles() -> Outcome {
    let start = Instant::now();
    let fine = radial_deviation(&IntegrationConfig::new(0.1, 10, 60).unwrap());
    let coarse = radial_deviation(&IntegrationConfig::new(0.5, 10, 12).unwrap());

    let params = VehicleParams::default();
    let profile = ControlProfile::new(1.5, 0.0).unwrap();
    let base = IntegrationConfig::new(0.5, 1, 12).unwrap();
    let reference = rollout_agent_frame(6.0, profile, &params, &base.with_substeps(10_000));
    let err = |s| max_l2(rollout_agent_frame(6.0, profile, &params, &base.with_substeps(s)).points(), reference.points());
    let ratios: Vec<f64> = [5, 10, 20].iter().map(|&s| err(s) / err(2 * s)).collect();
    let ratios_ok = ratios.iter().all(|r| (1.5..=2.5).contains(r));
    let elapsed = start.elapsed();
    outcome(
        fine <= 0.05 && ratios_ok && elapsed <= Duration::from_secs(1),
        format!(
            "circle deviation {fine:.4} m at 10 Hz ({coarse:.4} m at 2 Hz), refinement ratios {:.3?}, {elapsed:.1?}",
            ratios
        ),
    )
}

fn baseline_dominance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cfg = IntegrationConfig::default();
    let params = VehicleParams::default();
    let mut worst_identity: f64 = 0.0;
    for i in 0..1000 {
        let s0 = random_state(&mut rng);
        let truth = Trajectory::new(
            (0..cfg.horizon_steps)
                .map(|_| [rng.random_range(-20.0..20.0), rng.random_range(-5.0..60.0)])
                .collect(),
            cfg.dt,
        )
        .unwrap();
        let (_, best) = physics_oracle(&s0, &truth, &cfg).unwrap();
        for kind in PhysicsModelKind::ALL {
            let err = distance(&physics_rollout(&s0, kind, &cfg).unwrap(), &truth, DistanceKind::AvgL2).unwrap();
            if best > err {
                return outcome(false, format!("instance {i}: oracle {best} above {kind} {err}"));
            }
        }
        let straight = AgentState { yaw_rate: 0.0, accel: 0.0, ..s0 };
        let cv = physics_rollout(&straight, PhysicsModelKind::ConstVelYaw, &cfg).unwrap();
        let kin = normalize_frame(&integrate(&straight, ControlProfile::new(0.0, 0.0).unwrap(), &params, &cfg).unwrap(), &straight);
        worst_identity = worst_identity.max(max_l2(cv.points(), kin.points()));
    }
    outcome(
        worst_identity <= 1e-9,
        format!("oracle never above any model on 1000 instances, ConstVelYaw vs zero profile {worst_identity:.2e}"),
    )
}

fn metric_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let ks = [1, 5, 10, 15];
    let ds = [0.5, 1.0, 2.0, 4.0];
    let mut counts = vec![vec![0usize; ds.len()]; ks.len()];
    for i in 0..1000 {
        let modes = rng.random_range(15..=25);
        let set = TrajectorySet::new(
            (0..modes)
                .map(|_| {
                    Trajectory::new((0..12).map(|_| [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)]).collect(), 0.5).unwrap()
                })
                .collect(),
            Provenance::Fixed,
        )
        .unwrap();
        let raw: Vec<f64> = (0..modes).map(|_| rng.random_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        // truth is one mode jittered, so hits happen at the larger radii
        let anchor = set.modes()[rng.random_range(0..modes)].points().to_vec();
        let jitter = rng.random_range(0.2..3.0);
        let truth = Trajectory::new(
            anchor.iter().map(|p| [p[0] + rng.random_range(-jitter..jitter), p[1] + rng.random_range(-jitter..jitter)]).collect(),
            0.5,
        )
        .unwrap();
        let pred = PredictionResult::new(Arc::new(set), raw.iter().map(|p| p / total).collect()).unwrap();
        let ades: Vec<f64> = ks.iter().map(|&k| min_ade(&pred, &truth, k).unwrap()).collect();
        if ades.windows(2).any(|w| w[1] > w[0]) {
            return outcome(false, format!("fixture {i}: minADE {ades:?}"));
        }
        let hits: Vec<Vec<bool>> = ks
            .iter()
            .map(|&k| ds.iter().map(|&d| hit(&pred, &truth, k, d).unwrap()).collect())
            .collect();
        for a in 0..ks.len() {
            for b in 0..ds.len() {
                let down = a > 0 && hits[a - 1][b] && !hits[a][b];
                let left = b > 0 && hits[a][b - 1] && !hits[a][b];
                if down || left {
                    return outcome(false, format!("fixture {i}: hit table {hits:?}"));
                }
                counts[a][b] += usize::from(hits[a][b]);
            }
        }
    }
    let rates_ordered = (0..ks.len()).all(|a| (0..ds.len()).all(|b| (a == 0 || counts[a - 1][b] <= counts[a][b]) && (b == 0 || counts[a][b - 1] <= counts[a][b])));
    outcome(
        rates_ordered,
        format!(
            "1000 fixtures ordered, HitRate_1_0.5 = {:.3}, HitRate_15_4 = {:.3}",
            counts[0][0] as f64 / 1000.0,
            counts[3][3] as f64 / 1000.0
        ),
    )
}

fn classifier_correctness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_grad: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    for _ in 0..100 {
        let modes = rng.random_range(2..=8);
        let dim = rng.random_range(1..=6);
        let set = Arc::new(
            TrajectorySet::new(
                (0..modes).map(|m| Trajectory::new(vec![[m as f64, 0.0]], 0.5).unwrap()).collect(),
                Provenance::Fixed,
            )
            .unwrap(),
        );
        let weights = (0..modes * dim).map(|_| rng.random_range(-3.0..3.0)).collect();
        let model = SoftmaxModel::from_weights(set, dim, weights).unwrap();
        let features = FeatureVector::new((0..dim).map(|_| rng.random_range(-3.0..3.0)).collect()).unwrap();
        worst_grad = worst_grad.max(gradient_check(&model, &features, rng.random_range(0..modes)).unwrap());

        let scale = 10f64.powi(rng.random_range(0..4));
        let logits: Vec<f64> = (0..modes).map(|_| rng.random_range(-scale..scale)).collect();
        worst_norm = worst_norm.max((softmax(&logits).iter().sum::<f64>() - 1.0).abs());
    }

    let set = Arc::new(
        TrajectorySet::new(
            vec![Trajectory::new(vec![[-1.0, 1.0]], 0.5).unwrap(), Trajectory::new(vec![[1.0, 1.0]], 0.5).unwrap()],
            Provenance::Fixed,
        )
        .unwrap(),
    );
    let examples: Vec<LabeledExample> = (0..64)
        .map(|_| {
            let x: f64 = rng.random_range(-2.0..2.0);
            let x = if x.abs() < 0.2 { x.signum() * 0.2 } else { x };
            LabeledExample {
                features: FeatureVector::new(vec![x, rng.random_range(-1.0..1.0), 1.0]).unwrap(),
                label: usize::from(x > 0.0),
            }
        })
        .collect();
    let slow = TrainConfig {
        epochs: 100,
        lr: 1e-3,
        batch_size: 64,
        seed: 1,
    };
    let curve = train_labeled(&examples, set.clone(), &slow).unwrap().loss_curve;
    let non_increasing = curve.windows(2).all(|w| w[1] <= w[0]);
    let fit = TrainConfig {
        epochs: 200,
        lr: 0.5,
        batch_size: 16,
        seed: 1,
    };
    let model = train_labeled(&examples, set, &fit).unwrap().model;
    let acc = covertraj::classifier::accuracy(&model, &examples).unwrap();
    let elapsed = start.elapsed();
    outcome(
        worst_grad <= 1e-5 && worst_norm <= 1e-9 && non_increasing && acc == 1.0 && elapsed <= Duration::from_secs(30),
        format!(
            "gradient error {worst_grad:.2e}, softmax sum error {worst_norm:.1e}, loss non-increasing {non_increasing}, separable accuracy {acc}"
        ),
    )
}

fn covertraj(dir: &Path, args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_covertraj"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(String::from_utf8_lossy(&out.stdout).into_owned())
    } else {
        Err(format!("covertraj {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)))
    }
}

fn oracle_hit_rate() -> Result<Outcome, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    covertraj(d, &["gen-corpus", "--out", "c.jsonl", "--count", "1000", "--noise-std", "0.2", "--seed", "5"])?;
    covertraj(d, &["build-set", "--corpus", "c.jsonl", "--out", "s.json", "--epsilon", "2", "--distance", "max"])?;
    covertraj(d, &["cover-report", "--corpus", "c.jsonl", "--set", "s.json", "--epsilon", "2", "--out", "r.json"])?;
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("r.json")).unwrap()).map_err(|e| e.to_string())?;
    covertraj(
        d,
        &["evaluate", "--corpus", "c.jsonl", "--set", "s.json", "--oracle-probs", "--label-distance", "max", "--hit-k", "1", "--hit-d", "2", "--ks", "1", "--json", "e.json"],
    )?;
    let table: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("e.json")).unwrap()).map_err(|e| e.to_string())?;
    let rate = table[0][1]["hit_rates"][0]["rate"].as_f64().ok_or("missing hit rate")?;
    let covered = report["fraction_covered"].as_f64() == Some(1.0);
    Ok(outcome(
        covered && rate == 1.0,
        format!("fraction covered {}, HitRate_1_2 = {rate}", report["fraction_covered"]),
    ))
}

fn ablation_table() -> Result<Outcome, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    covertraj(d, &["gen-corpus", "--out", "c.jsonl", "--seed", "42"])?;
    covertraj(d, &["build-set", "--corpus", "c.jsonl", "--out", "s.json", "--mode", "hybrid", "--epsilon", "5"])?;
    let csv = covertraj(d, &["evaluate", "--corpus", "c.jsonl", "--set", "s.json", "--ablation", "--epochs", "100", "--seed", "1"])?;
    let rows: Vec<Vec<String>> = csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect();
    let names: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    let values = |name: &str| -> Vec<f64> {
        rows.iter().find(|r| r[0] == name).map(|r| r[2..].iter().map(|v| v.parse().unwrap()).collect()).unwrap_or_default()
    };
    let finite = rows.iter().all(|r| r[1..].iter().all(|v| v.parse::<f64>().is_ok_and(f64::is_finite)));
    // minADE columns and FDE; the last column is the hit rate
    let (avg, rms) = (values("avg_l2"), values("rms_l2"));
    let gap = avg[..avg.len() - 1]
        .iter()
        .zip(&rms)
        .map(|(a, b)| (a - b).abs() / a.min(*b))
        .fold(0.0, f64::max);
    Ok(outcome(
        names == ["max_l2", "avg_l2", "rms_l2"] && finite && gap <= 0.10,
        format!("rows {names:?}, largest avg/rms gap {:.1}%", 100.0 * gap),
    ))
}

fn reproducibility() -> Result<Outcome, String> {
    let runs: Vec<tempfile::TempDir> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    let files = ["c.jsonl", "f.json", "r.json", "h.json", "m.json", "e.csv", "a.csv", "b.csv", "curve.csv", "rep.json", "hist.csv"];
    let mut stdout = Vec::new();
    for dir in &runs {
        let d = dir.path();
        covertraj(d, &["gen-corpus", "--out", "c.jsonl", "--count", "300", "--noise-std", "0.3", "--seed", "11"])?;
        covertraj(d, &["build-set", "--corpus", "c.jsonl", "--out", "f.json", "--epsilon", "3"])?;
        covertraj(d, &["build-set", "--corpus", "c.jsonl", "--out", "r.json", "--epsilon", "3", "--random-trials", "20", "--seed", "4"])?;
        covertraj(d, &["build-set", "--corpus", "c.jsonl", "--out", "h.json", "--mode", "hybrid", "--epsilon", "3"])?;
        covertraj(d, &["cover-report", "--corpus", "c.jsonl", "--set", "h.json", "--epsilon", "3", "--out", "rep.json", "--histogram", "hist.csv"])?;
        covertraj(d, &["coverage-curve", "--corpus", "c.jsonl", "--epsilons", "8,5,3", "--out", "curve.csv"])?;
        covertraj(d, &["baselines", "--corpus", "c.jsonl", "--out", "b.csv"])?;
        covertraj(d, &["train", "--corpus", "c.jsonl", "--set", "h.json", "--out", "m.json", "--epochs", "20", "--seed", "3"])?;
        covertraj(d, &["evaluate", "--corpus", "c.jsonl", "--set", "h.json", "--model", "m.json", "--out", "e.csv"])?;
        covertraj(d, &["evaluate", "--corpus", "c.jsonl", "--set", "f.json", "--ablation", "--epochs", "10", "--seed", "3", "--out", "a.csv"])?;
        stdout.push(covertraj(d, &["selfcheck", "--seed", "8"])?);
    }
    let differing: Vec<&str> = files
        .iter()
        .copied()
        .filter(|f| std::fs::read(runs[0].path().join(f)).ok() != std::fs::read(runs[1].path().join(f)).ok())
        .collect();
    Ok(outcome(
        differing.is_empty() && stdout[0] == stdout[1],
        if differing.is_empty() {
            format!("{} output files and selfcheck output identical across two runs", files.len())
        } else {
            format!("differing outputs: {differing:?}")
        },
    ))
}

type Criterion = fn() -> Outcome;

fn main() {
    let criteria: [(&str, Criterion); 11] = [
        ("cover correctness", cover_correctness),
        ("greedy approximation bound", approximation_bound),
        ("coverage curve shape", curve_shape),
        ("dynamic advantage", dynamic_advantage),
        ("dynamics oracles", dynamics_oracles),
        ("baseline dominance", baseline_dominance),
        ("metric monotonicity", metric_monotonicity),
        ("oracle hit rate on a covered corpus", || oracle_hit_rate().unwrap_or_else(|e| outcome(false, e))),
        ("classifier correctness", classifier_correctness),
        ("distance ablation table", || ablation_table().unwrap_or_else(|e| outcome(false, e))),
        ("reproducibility", || reproducibility().unwrap_or_else(|e| outcome(false, e))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let o = run();
        println!("{} criterion {} ({name}): {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
