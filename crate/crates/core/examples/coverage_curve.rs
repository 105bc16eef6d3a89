//! Set sizes needed for full coverage as epsilon shrinks, as plot-ready CSV.

use covertraj::dynamics::{ControlGrid, IntegrationConfig, VehicleParams};
use covertraj::experiments::{coverage_curve, curve_to_csv};
use covertraj::synth::{gen_corpus, GenConfig};
use covertraj::DistanceKind;

fn main() -> covertraj::Result<()> {
    let corpus = gen_corpus(&GenConfig {
        count: 1000,
        ..GenConfig::default()
    })?
    .corpus()?;
    let rows = coverage_curve(
        &corpus,
        &[8.0, 5.0, 4.0, 3.0, 2.0],
        &ControlGrid::default(),
        &VehicleParams::default(),
        &IntegrationConfig::default(),
        DistanceKind::MaxL2,
    )?;
    print!("{}", curve_to_csv(&rows));
    Ok(())
}
