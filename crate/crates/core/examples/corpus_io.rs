//! Write a corpus and a hybrid set to disk, read both back, and rebuild the
//! label space for one recorded agent.

use covertraj::coverset::CoverConfig;
use covertraj::dynamics::{ControlGrid, VehicleParams};
use covertraj::experiments::{build_set_file, BuildOptions};
use covertraj::io::{CorpusFile, LabelSpace, SetFile};
use covertraj::synth::{gen_corpus, GenConfig};
use covertraj::Provenance;

fn main() -> covertraj::Result<()> {
    let dir = tempfile::tempdir()?;
    let corpus_path = dir.path().join("corpus.jsonl");
    let set_path = dir.path().join("hybrid.json");

    gen_corpus(&GenConfig {
        count: 400,
        ..GenConfig::default()
    })?
    .write(&corpus_path)?;
    let mut file = CorpusFile::read(&corpus_path)?;
    let before = file.records.len();
    file.retain_moving(1.0);
    println!("{before} records, {} move at least 1 m", file.records.len());

    let opts = BuildOptions {
        provenance: Provenance::Hybrid,
        cover: CoverConfig::new(3.0)?,
        random_trials: None,
        seed: 0,
        reference_speed: 8.0,
        params: VehicleParams::default(),
        substeps: 10,
        grid: ControlGrid::default(),
    };
    let (set_file, complete) = build_set_file(&file.corpus()?, &opts)?;
    set_file.write(&set_path)?;
    let back = SetFile::read(&set_path)?;
    assert_eq!(back, set_file);
    println!("hybrid set of {} modes (complete: {complete}) survives the round trip", back.modes.len());

    let space = LabelSpace::from_file(&back, file.header.horizon_steps)?;
    let agent = &file.records[0];
    let local = space.for_state(&agent.seed_state)?;
    println!(
        "{} at {:.1} m/s gets {} modes, {} re-rolled from its own speed",
        agent.id,
        agent.seed_state.speed,
        local.len(),
        local.dynamic_count()
    );
    Ok(())
}
