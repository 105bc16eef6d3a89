//! Constant velocity/acceleration baselines and their per-instance oracle.

use covertraj::dynamics::IntegrationConfig;
use covertraj::experiments::baseline_table;
use covertraj::metrics::tables_to_csv;
use covertraj::synth::{gen_corpus, GenConfig};

fn main() -> covertraj::Result<()> {
    let file = gen_corpus(&GenConfig {
        count: 1000,
        noise_std: 0.1,
        ..GenConfig::default()
    })?;
    let rows = baseline_table(&file.eval_instances()?, &IntegrationConfig::default(), 2.0)?;
    print!("{}", tables_to_csv("model", &rows));
    Ok(())
}
