//! Cover a kinematic corpus with control profiles, fill the gaps with fixed
//! trajectories, then instantiate the label space for two agents.

use covertraj::coverset::{greedy_cover, CoverConfig};
use covertraj::dynamics::{hybrid_plan, profile_cover, ControlGrid, IntegrationConfig, VehicleParams};
use covertraj::synth::{gen_corpus, GenConfig};
use covertraj::AgentState;

fn main() -> covertraj::Result<()> {
    let corpus = gen_corpus(&GenConfig::default())?.corpus()?;
    let grid = ControlGrid::default();
    let params = VehicleParams::default();
    let cfg = IntegrationConfig::default();
    let config = CoverConfig::new(2.0)?;

    let fixed = greedy_cover(&corpus, &config)?.set.len();
    let dynamic = profile_cover(&corpus, &grid, &params, &cfg, &config)?;
    let plan = hybrid_plan(&corpus, &grid, &params, &cfg, &config)?;
    println!("fixed cover: {fixed} modes");
    println!(
        "profiles alone: {} profiles, {} of {} samples left over",
        dynamic.profiles.len(),
        dynamic.uncovered.len(),
        corpus.len()
    );
    println!("hybrid: {} profiles + {} fixed = {}", plan.profiles.len(), plan.fixed.len(), plan.len());

    let report = plan.coverage_report(&corpus, &params, &cfg, &config)?;
    println!("hybrid coverage {:.3}", report.fraction_covered);

    for speed in [3.0, 11.0] {
        let set = plan.instantiate(&AgentState::at_origin(speed), &params, &cfg)?;
        let far = set.modes()[..set.dynamic_count()]
            .iter()
            .map(|m| m.last()[1])
            .fold(f64::NEG_INFINITY, f64::max);
        println!("v = {speed}: {} modes, farthest dynamic endpoint {far:.1} m ahead", set.len());
    }
    Ok(())
}
