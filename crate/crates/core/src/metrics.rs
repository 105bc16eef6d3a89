//! Multimodal evaluation: minADE_k, FDE and HitRate_{k,d}.
//!
//! The "k most likely" modes are the k highest probabilities, ties broken
//! by smallest mode index.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::traj::{point_distance, AgentState, DistanceKind, Trajectory, TrajectorySet};

/// Allowed deviation of the probability sum from one.
pub const PROB_SUM_TOLERANCE: f64 = 1e-6;

/// A trajectory set with one probability per mode.
#[derive(Debug, Clone)]
pub struct PredictionResult {
    set: Arc<TrajectorySet>,
    probs: Vec<f64>,
}

impl PredictionResult {
    pub fn new(set: Arc<TrajectorySet>, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != set.len() {
            return Err(Error::invalid(format!("{} probabilities for {} modes", probs.len(), set.len())));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::invalid("probabilities must be finite and non-negative"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::invalid(format!("probabilities sum to {sum}")));
        }
        Ok(PredictionResult { set, probs })
    }

    /// Probability one on `mode`.
    pub fn one_hot(set: Arc<TrajectorySet>, mode: usize) -> Result<Self> {
        if mode >= set.len() {
            return Err(Error::invalid(format!("mode {mode} out of range")));
        }
        let mut probs = vec![0.0; set.len()];
        probs[mode] = 1.0;
        Ok(PredictionResult { set, probs })
    }

    /// A single trajectory predicted with certainty.
    pub fn single(mode: Trajectory) -> Result<Self> {
        let set = TrajectorySet::from_parts(vec![mode], crate::traj::Provenance::Fixed, None, None)?;
        Ok(PredictionResult {
            set: Arc::new(set),
            probs: vec![1.0],
        })
    }

    pub fn set(&self) -> &TrajectorySet {
        &self.set
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Mode indices ordered by decreasing probability, smallest index first
    /// among equals, truncated to `k`.
    pub fn top_k(&self, k: usize) -> Result<Vec<usize>> {
        let modes = self.probs.len();
        if k == 0 || k > modes {
            return Err(Error::KOutOfRange { k, modes });
        }
        let mut order: Vec<usize> = (0..modes).collect();
        // stable sort keeps index order among equal probabilities
        order.sort_by(|&a, &b| self.probs[b].total_cmp(&self.probs[a]));
        order.truncate(k);
        Ok(order)
    }

    pub fn most_likely(&self) -> usize {
        self.top_k(1).expect("non-empty prediction")[0]
    }

    fn check_truth(&self, truth: &Trajectory) -> Result<()> {
        truth.check_compatible(&self.set.modes()[0])
    }
}

/// Smallest average displacement among the `k` most likely modes.
pub fn min_ade(pred: &PredictionResult, truth: &Trajectory, k: usize) -> Result<f64> {
    pred.check_truth(truth)?;
    best_of_top_k(pred, truth, k, DistanceKind::AvgL2)
}

/// Final-point displacement of the most likely mode.
pub fn fde(pred: &PredictionResult, truth: &Trajectory) -> Result<f64> {
    pred.check_truth(truth)?;
    let mode = &pred.set.modes()[pred.most_likely()];
    let (a, b) = (mode.last(), truth.last());
    Ok((a[0] - b[0]).hypot(a[1] - b[1]))
}

/// Whether some mode among the `k` most likely stays within `d` meters of the
/// truth at every step.
pub fn hit(pred: &PredictionResult, truth: &Trajectory, k: usize, d: f64) -> Result<bool> {
    pred.check_truth(truth)?;
    Ok(best_of_top_k(pred, truth, k, DistanceKind::MaxL2)? <= d)
}

fn best_of_top_k(pred: &PredictionResult, truth: &Trajectory, k: usize, kind: DistanceKind) -> Result<f64> {
    Ok(pred
        .top_k(k)?
        .into_iter()
        .map(|m| point_distance(pred.set.modes()[m].points(), truth.points(), kind))
        .fold(f64::INFINITY, f64::min))
}

/// Fraction of hits.
pub fn hit_rate(records: &[bool]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    Ok(records.iter().filter(|&&h| h).count() as f64 / records.len() as f64)
}

/// Which metrics to compute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSpec {
    pub ks: Vec<usize>,
    /// `(k, d)` pairs for HitRate_{k,d}.
    pub hits: Vec<(usize, f64)>,
}

impl Default for MetricsSpec {
    fn default() -> Self {
        MetricsSpec {
            ks: vec![1, 5, 10, 15],
            hits: vec![(5, 2.0)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HitRecord {
    pub k: usize,
    pub d: f64,
    pub hit: bool,
}

/// Metrics for one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub min_ade: BTreeMap<usize, f64>,
    pub fde: f64,
    pub hits: Vec<HitRecord>,
}

pub fn evaluate_instance(pred: &PredictionResult, truth: &Trajectory, spec: &MetricsSpec) -> Result<EvalRecord> {
    let min_ade = spec
        .ks
        .iter()
        .map(|&k| Ok((k, min_ade(pred, truth, k)?)))
        .collect::<Result<_>>()?;
    let hits = spec
        .hits
        .iter()
        .map(|&(k, d)| Ok(HitRecord { k, d, hit: hit(pred, truth, k, d)? }))
        .collect::<Result<_>>()?;
    Ok(EvalRecord {
        min_ade,
        fde: fde(pred, truth)?,
        hits,
    })
}

/// One evaluation instance: the agent's current state and its future.
#[derive(Debug, Clone)]
pub struct EvalInstance {
    pub state: AgentState,
    pub truth: Trajectory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HitRate {
    pub k: usize,
    pub d: f64,
    pub rate: f64,
}

/// Dataset means of every metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsTable {
    pub instances: usize,
    pub min_ade: Vec<(usize, f64)>,
    pub fde: f64,
    pub hit_rates: Vec<HitRate>,
}

impl MetricsTable {
    pub fn min_ade_at(&self, k: usize) -> Option<f64> {
        self.min_ade.iter().find(|(kk, _)| *kk == k).map(|(_, v)| *v)
    }

    pub fn hit_rate_at(&self, k: usize, d: f64) -> Option<f64> {
        self.hit_rates.iter().find(|h| h.k == k && h.d == d).map(|h| h.rate)
    }

    fn from_records(records: &[EvalRecord], spec: &MetricsSpec) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let n = records.len() as f64;
        let min_ade = spec
            .ks
            .iter()
            .map(|&k| (k, records.iter().map(|r| r.min_ade[&k]).sum::<f64>() / n))
            .collect();
        let hit_rates = spec
            .hits
            .iter()
            .enumerate()
            .map(|(j, &(k, d))| {
                let hits: Vec<bool> = records.iter().map(|r| r.hits[j].hit).collect();
                Ok(HitRate { k, d, rate: hit_rate(&hits)? })
            })
            .collect::<Result<_>>()?;
        Ok(MetricsTable {
            instances: records.len(),
            min_ade,
            fde: records.iter().map(|r| r.fde).sum::<f64>() / n,
            hit_rates,
        })
    }
}

/// Evaluate `predictor` on every instance and average. Instances are
/// evaluated in parallel; the reduction runs in instance order.
pub fn evaluate_dataset<F>(predictor: F, dataset: &[EvalInstance], spec: &MetricsSpec) -> Result<MetricsTable>
where
    F: Fn(usize, &EvalInstance) -> Result<PredictionResult> + Sync,
{
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let records = dataset
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            predictor(i, inst)
                .and_then(|pred| evaluate_instance(&pred, &inst.truth, spec))
                .map_err(|e| e.at_instance(i))
        })
        .collect::<Result<Vec<_>>>()?;
    MetricsTable::from_records(&records, spec)
}

fn format_d(d: f64) -> String {
    if d.fract() == 0.0 {
        format!("{}", d as i64)
    } else {
        format!("{d}")
    }
}

/// CSV with one row per named table. All tables must share a spec.
pub fn tables_to_csv(label: &str, rows: &[(String, MetricsTable)]) -> String {
    let mut out = String::new();
    let Some((_, first)) = rows.first() else {
        return out;
    };
    out.push_str(label);
    out.push_str(",instances");
    for (k, _) in &first.min_ade {
        let _ = write!(out, ",minADE_{k}");
    }
    out.push_str(",FDE");
    for h in &first.hit_rates {
        let _ = write!(out, ",HitRate_{}_{}", h.k, format_d(h.d));
    }
    out.push('\n');
    for (name, table) in rows {
        let _ = write!(out, "{name},{}", table.instances);
        for (_, v) in &table.min_ade {
            let _ = write!(out, ",{v:.6}");
        }
        let _ = write!(out, ",{:.6}", table.fde);
        for h in &table.hit_rates {
            let _ = write!(out, ",{:.6}", h.rate);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traj::Provenance;

    fn straight(offset: f64) -> Trajectory {
        Trajectory::new((1..=4).map(|i| [offset, i as f64]).collect(), 0.5).unwrap()
    }

    fn three_modes() -> Arc<TrajectorySet> {
        Arc::new(TrajectorySet::new(vec![straight(0.0), straight(1.0), straight(3.0)], Provenance::Fixed).unwrap())
    }

    #[test]
    fn probabilities_validated() {
        assert!(PredictionResult::new(three_modes(), vec![0.5, 0.5]).is_err());
        assert!(PredictionResult::new(three_modes(), vec![0.5, 0.6, -0.1]).is_err());
        assert!(PredictionResult::new(three_modes(), vec![0.5, 0.2, 0.2]).is_err());
        assert!(PredictionResult::new(three_modes(), vec![0.5, 0.3, 0.2]).is_ok());
    }

    #[test]
    fn hand_ranked_fixture() {
        // Ranks by probability: mode 1 (0.5), mode 2 (0.3), mode 0 (0.2).
        // Truth at offset 2.5: distances 2.5, 1.5, 0.5.
        let pred = PredictionResult::new(three_modes(), vec![0.2, 0.5, 0.3]).unwrap();
        let truth = straight(2.5);
        assert_eq!(pred.top_k(3).unwrap(), vec![1, 2, 0]);
        assert!((min_ade(&pred, &truth, 1).unwrap() - 1.5).abs() < 1e-12);
        assert!((min_ade(&pred, &truth, 2).unwrap() - 0.5).abs() < 1e-12);
        assert!((min_ade(&pred, &truth, 3).unwrap() - 0.5).abs() < 1e-12);
        assert!((fde(&pred, &truth).unwrap() - 1.5).abs() < 1e-12);
        assert!(!hit(&pred, &truth, 1, 1.0).unwrap());
        assert!(hit(&pred, &truth, 2, 1.0).unwrap());
        assert!(matches!(min_ade(&pred, &truth, 0), Err(Error::KOutOfRange { k: 0, modes: 3 })));
        assert!(matches!(min_ade(&pred, &truth, 4), Err(Error::KOutOfRange { .. })));
    }

    #[test]
    fn probability_ties_prefer_smaller_index() {
        let pred = PredictionResult::new(three_modes(), vec![0.25, 0.375, 0.375]).unwrap();
        assert_eq!(pred.top_k(2).unwrap(), vec![1, 2]);
        assert_eq!(pred.most_likely(), 1);
    }

    #[test]
    fn fde_endpoint_distance() {
        let mode = Trajectory::new(vec![[0.0, 5.0], [0.0, 10.0]], 0.5).unwrap();
        let truth = Trajectory::new(vec![[0.0, 5.0], [0.0, 12.0]], 0.5).unwrap();
        let pred = PredictionResult::single(mode).unwrap();
        assert_eq!(fde(&pred, &truth).unwrap(), 2.0);
        assert_eq!(min_ade(&pred, &truth, 1).unwrap(), 1.0);
    }

    #[test]
    fn length_mismatch() {
        let pred = PredictionResult::one_hot(three_modes(), 0).unwrap();
        let short = Trajectory::new(vec![[0.0, 1.0]], 0.5).unwrap();
        assert!(matches!(fde(&pred, &short), Err(Error::LengthMismatch { .. })));
        assert!(matches!(min_ade(&pred, &short, 1), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn hit_rate_edges() {
        assert!(matches!(hit_rate(&[]), Err(Error::EmptyRecords)));
        assert_eq!(hit_rate(&[true]).unwrap(), 1.0);
        assert_eq!(hit_rate(&[true, false, false, true]).unwrap(), 0.5);
        let pred = PredictionResult::one_hot(three_modes(), 1).unwrap();
        assert!(!hit(&pred, &straight(0.5), 3, 0.0).unwrap());
    }

    #[test]
    fn dataset_errors_carry_instance_index() {
        let data = vec![
            EvalInstance { state: AgentState::at_origin(1.0), truth: straight(0.0) },
            EvalInstance {
                state: AgentState::at_origin(1.0),
                truth: Trajectory::new(vec![[0.0, 1.0]], 0.5).unwrap(),
            },
        ];
        let set = three_modes();
        let spec = MetricsSpec { ks: vec![1], hits: vec![(1, 2.0)] };
        let err = evaluate_dataset(|_, _| PredictionResult::one_hot(set.clone(), 0), &data, &spec).unwrap_err();
        assert!(matches!(err, Error::Instance { index: 1, .. }));
        assert!(matches!(
            evaluate_dataset(|_, _| PredictionResult::one_hot(set.clone(), 0), &[], &spec),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn csv_layout() {
        let table = MetricsTable {
            instances: 2,
            min_ade: vec![(1, 1.0), (5, 0.5)],
            fde: 2.0,
            hit_rates: vec![HitRate { k: 5, d: 2.0, rate: 0.5 }],
        };
        let csv = tables_to_csv("model", &[("a".into(), table)]);
        assert_eq!(csv, "model,instances,minADE_1,minADE_5,FDE,HitRate_5_2\na,2,1.000000,0.500000,2.000000,0.500000\n");
    }
}
