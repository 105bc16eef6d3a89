//! Randomized weighted covers against the deterministic greedy one.

use covertraj::coverset::{greedy_cover, random_cover, CoverConfig};
use covertraj::synth::{gen_corpus, GenConfig};

fn main() -> covertraj::Result<()> {
    let corpus = gen_corpus(&GenConfig {
        count: 300,
        noise_std: 0.3,
        seed: 5,
        ..GenConfig::default()
    })?
    .corpus()?;
    let config = CoverConfig::new(3.0)?;

    let greedy = greedy_cover(&corpus, &config)?.set.len();
    println!("greedy: {greedy} modes");
    for trials in [1, 10, 50] {
        let best = random_cover(&corpus, &config, trials, 7)?;
        println!("random, best of {trials:>2}: {} modes", best.set.len());
    }
    Ok(())
}
