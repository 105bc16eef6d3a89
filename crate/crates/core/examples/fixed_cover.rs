//! Greedy epsilon covers of a synthetic corpus at several radii.
//!
//! cargo run --release --example fixed_cover

use covertraj::coverset::{coverage_report, greedy_cover, CoverConfig};
use covertraj::synth::{gen_corpus, GenConfig};
use covertraj::DistanceKind;

fn main() -> covertraj::Result<()> {
    let corpus = gen_corpus(&GenConfig {
        count: 1000,
        noise_std: 0.2,
        ..GenConfig::default()
    })?
    .corpus()?;

    for eps in [8.0, 4.0, 2.0] {
        let config = CoverConfig::new(eps)?.with_kind(DistanceKind::MaxL2);
        let result = greedy_cover(&corpus, &config)?;
        let report = coverage_report(&result.set, &corpus, &config)?;
        println!(
            "eps {eps}: {} modes cover {:.1}% (max residual {:.3} m)",
            result.set.len(),
            100.0 * report.fraction_covered,
            report.max_residual
        );
    }
    Ok(())
}
