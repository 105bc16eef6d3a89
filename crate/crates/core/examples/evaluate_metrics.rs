//! minADE_k, FDE and HitRate_{k,d} on a small hand-built prediction.

use std::sync::Arc;

use covertraj::metrics::{evaluate_instance, MetricsSpec, PredictionResult};
use covertraj::{Provenance, Trajectory, TrajectorySet};

fn line(x: f64) -> Trajectory {
    Trajectory::new((1..=6).map(|t| [x * t as f64 / 6.0, 2.0 * t as f64]).collect(), 0.5).expect("valid trajectory")
}

fn main() -> covertraj::Result<()> {
    // straight ahead, drifting left, drifting right
    let set = Arc::new(TrajectorySet::new(vec![line(0.0), line(-3.0), line(3.0)], Provenance::Fixed)?);
    let pred = PredictionResult::new(set, vec![0.5, 0.2, 0.3])?;
    let truth = line(2.5);

    let spec = MetricsSpec {
        ks: vec![1, 2, 3],
        hits: vec![(1, 2.0), (2, 2.0), (2, 0.5)],
    };
    let record = evaluate_instance(&pred, &truth, &spec)?;
    for (k, ade) in &record.min_ade {
        println!("minADE_{k} = {ade:.3}");
    }
    println!("FDE = {:.3}", record.fde);
    for h in &record.hits {
        println!("hit within {} m among top {}: {}", h.d, h.k, h.hit);
    }
    Ok(())
}
