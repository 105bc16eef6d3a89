//! Train the linear softmax classifier over a fixed set and compare it with
//! the nearest-mode oracle.

use std::sync::Arc;

use covertraj::classifier::TrainConfig;
use covertraj::coverset::{greedy_cover, CoverConfig};
use covertraj::experiments::{evaluate_label_space, train_on, Scorer};
use covertraj::io::LabelSpace;
use covertraj::metrics::{tables_to_csv, MetricsSpec};
use covertraj::synth::{gen_corpus, GenConfig};
use covertraj::DistanceKind;

fn main() -> covertraj::Result<()> {
    let file = gen_corpus(&GenConfig {
        count: 1500,
        ..GenConfig::default()
    })?;
    let set = Arc::new(greedy_cover(&file.corpus()?, &CoverConfig::new(5.0)?)?.set);
    let space = LabelSpace::Shared(set.clone());
    let instances = file.eval_instances()?;
    let (train, test) = instances.split_at(1200);

    let cfg = TrainConfig {
        epochs: 100,
        ..TrainConfig::default()
    };
    let outcome = train_on(train, &space, set.clone(), DistanceKind::AvgL2, &cfg)?;
    println!(
        "{} modes, loss {:.3} -> {:.3}",
        set.len(),
        outcome.loss_curve[0],
        outcome.loss_curve.last().unwrap()
    );

    let spec = MetricsSpec::default();
    let rows = vec![
        ("linear".to_string(), evaluate_label_space(test, &space, Scorer::Model(&outcome.model), &spec)?),
        (
            "oracle".to_string(),
            evaluate_label_space(test, &space, Scorer::Oracle { label_kind: DistanceKind::AvgL2 }, &spec)?,
        ),
    ];
    print!("{}", tables_to_csv("model", &rows));
    Ok(())
}
