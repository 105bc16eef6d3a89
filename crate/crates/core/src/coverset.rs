//! Fixed trajectory sets by greedy set cover.
//!
//! A corpus element `k` is covered by a set element `l` when
//! `distance(k, l) <= epsilon`. Set elements are always drawn from the corpus.
//! Exact duplicate point sequences are collapsed to their first occurrence
//! before covering.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::traj::{point_distance, DistanceKind, Provenance, Trajectory, TrajectoryCorpus, TrajectorySet};

/// Largest corpus [`brute_force_cover`] accepts.
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TieBreak {
    #[default]
    SmallestIndex,
}

/// Which corpus elements may be picked at each greedy step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CandidatePool {
    /// Every corpus element, covered or not.
    #[default]
    Corpus,
    /// Only elements that are not yet covered.
    Uncovered,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverConfig {
    pub epsilon: f64,
    pub kind: DistanceKind,
    pub tie_break: TieBreak,
    pub candidates: CandidatePool,
    pub max_set_size: Option<usize>,
}

impl CoverConfig {
    pub fn new(epsilon: f64) -> Result<Self> {
        let config = CoverConfig {
            epsilon,
            kind: DistanceKind::MaxL2,
            tie_break: TieBreak::SmallestIndex,
            candidates: CandidatePool::Corpus,
            max_set_size: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_kind(mut self, kind: DistanceKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_candidates(mut self, candidates: CandidatePool) -> Self {
        self.candidates = candidates;
        self
    }

    pub fn with_max_set_size(mut self, cap: usize) -> Self {
        self.max_set_size = Some(cap);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::invalid(format!("epsilon {} must be positive", self.epsilon)));
        }
        if self.max_set_size == Some(0) {
            return Err(Error::invalid("max_set_size must be at least 1"));
        }
        Ok(())
    }

    pub(crate) fn covers(&self, a: &Trajectory, b: &Trajectory) -> bool {
        point_distance(a.points(), b.points(), self.kind) <= self.epsilon
    }
}

/// A cover together with whether it reached every corpus element.
/// `complete` is false only when `max_set_size` stopped the search early.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverResult {
    pub set: TrajectorySet,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub epsilon: f64,
    pub fraction_covered: f64,
    pub max_residual: f64,
    pub residuals: Vec<f64>,
}

impl CoverageReport {
    pub(crate) fn from_residuals(residuals: Vec<f64>, epsilon: f64) -> Self {
        let covered = residuals.iter().filter(|&&r| r <= epsilon).count();
        CoverageReport {
            epsilon,
            fraction_covered: covered as f64 / residuals.len() as f64,
            max_residual: residuals.iter().copied().fold(0.0, f64::max),
            residuals,
        }
    }

    pub fn uncovered(&self) -> Vec<usize> {
        self.residuals
            .iter()
            .enumerate()
            .filter(|(_, &r)| r > self.epsilon)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Indices of the first occurrence of every distinct point sequence.
pub(crate) fn unique_indices(items: &[Trajectory]) -> Vec<usize> {
    let mut seen = HashMap::with_capacity(items.len());
    items
        .iter()
        .enumerate()
        .filter(|(i, t)| *seen.entry(t.bit_key()).or_insert(*i) == *i)
        .map(|(i, _)| i)
        .collect()
}

/// Epsilon-neighborhoods over the distinct corpus elements. The relation is
/// symmetric and reflexive.
struct CoverGraph {
    /// Original corpus index of each distinct element.
    originals: Vec<usize>,
    neighbors: Vec<Vec<u32>>,
}

impl CoverGraph {
    fn build(corpus: &TrajectoryCorpus, config: &CoverConfig) -> Result<Self> {
        config.validate()?;
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let items = corpus.items();
        let originals = unique_indices(items);
        let neighbors = originals
            .par_iter()
            .map(|&i| {
                originals
                    .iter()
                    .enumerate()
                    .filter(|(_, &j)| config.covers(&items[i], &items[j]))
                    .map(|(u, _)| u as u32)
                    .collect()
            })
            .collect();
        Ok(CoverGraph { originals, neighbors })
    }

    fn len(&self) -> usize {
        self.originals.len()
    }

    /// Run the greedy loop, delegating each pick to `choose`, which sees the
    /// current gains and candidate mask and returns a distinct-element index.
    fn run<F>(&self, config: &CoverConfig, mut choose: F) -> (Vec<usize>, bool)
    where
        F: FnMut(&[usize], &[bool]) -> usize,
    {
        let n = self.len();
        let mut gain: Vec<usize> = self.neighbors.iter().map(Vec::len).collect();
        let mut covered = vec![false; n];
        let mut eligible = vec![true; n];
        let mut remaining = n;
        let mut chosen = Vec::new();
        let cap = config.max_set_size.unwrap_or(usize::MAX);

        while remaining > 0 && chosen.len() < cap {
            let pick = choose(&gain, &eligible);
            debug_assert!(gain[pick] > 0 && eligible[pick]);
            chosen.push(pick);
            for &j in &self.neighbors[pick] {
                let j = j as usize;
                if covered[j] {
                    continue;
                }
                covered[j] = true;
                remaining -= 1;
                if config.candidates == CandidatePool::Uncovered {
                    eligible[j] = false;
                }
                for &k in &self.neighbors[j] {
                    gain[k as usize] -= 1;
                }
            }
            eligible[pick] = false;
        }
        (chosen, remaining == 0)
    }

    fn to_result(&self, corpus: &TrajectoryCorpus, chosen: Vec<usize>, complete: bool) -> Result<CoverResult> {
        let indices: Vec<usize> = chosen.iter().map(|&u| self.originals[u]).collect();
        let modes = indices.iter().map(|&i| corpus.items()[i].clone()).collect();
        let set = TrajectorySet::from_parts(modes, Provenance::Fixed, Some(indices), None)?;
        Ok(CoverResult { set, complete })
    }
}

/// Greedy covers of index subsets of one corpus, sharing a single
/// neighborhood graph. `cover(subset)` picks the same trajectories as
/// `greedy_cover` on `corpus.subset(subset)`, reported by corpus index.
pub(crate) struct SubsetCover<'a> {
    corpus: &'a TrajectoryCorpus,
    config: &'a CoverConfig,
    graph: CoverGraph,
    /// Distinct-element index of every corpus index.
    group: Vec<usize>,
}

impl<'a> SubsetCover<'a> {
    pub(crate) fn new(corpus: &'a TrajectoryCorpus, config: &'a CoverConfig) -> Result<Self> {
        let graph = CoverGraph::build(corpus, config)?;
        let key_group: HashMap<_, _> = graph
            .originals
            .iter()
            .enumerate()
            .map(|(u, &i)| (corpus.items()[i].bit_key(), u))
            .collect();
        let group = corpus.items().iter().map(|t| key_group[&t.bit_key()]).collect();
        Ok(SubsetCover {
            corpus,
            config,
            graph,
            group,
        })
    }

    /// `subset` must be sorted ascending and non-empty.
    pub(crate) fn cover(&self, subset: &[usize]) -> Result<CoverResult> {
        if subset.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut local_of = vec![u32::MAX; self.graph.len()];
        let mut groups = Vec::new();
        let mut originals = Vec::new();
        for &i in subset {
            let g = self.group[i];
            if local_of[g] == u32::MAX {
                local_of[g] = groups.len() as u32;
                groups.push(g);
                originals.push(i);
            }
        }
        let neighbors = groups
            .iter()
            .map(|&g| {
                self.graph.neighbors[g]
                    .iter()
                    .map(|&u| local_of[u as usize])
                    .filter(|&l| l != u32::MAX)
                    .collect()
            })
            .collect();
        let local = CoverGraph { originals, neighbors };
        let (chosen, complete) = local.run(self.config, argmax_gain);
        local.to_result(self.corpus, chosen, complete)
    }
}

fn argmax_gain(gain: &[usize], eligible: &[bool]) -> usize {
    let mut best = usize::MAX;
    let mut best_gain = 0;
    for (i, (&g, &ok)) in gain.iter().zip(eligible).enumerate() {
        // strict comparison keeps the smallest index on ties
        if ok && g > best_gain {
            best = i;
            best_gain = g;
        }
    }
    best
}

/// Deterministic greedy cover: each step adds the element covering the most
/// still-uncovered corpus elements, ties to the smallest corpus index.
pub fn greedy_cover(corpus: &TrajectoryCorpus, config: &CoverConfig) -> Result<CoverResult> {
    let graph = CoverGraph::build(corpus, config)?;
    let (chosen, complete) = graph.run(config, argmax_gain);
    graph.to_result(corpus, chosen, complete)
}

/// Randomized greedy cover. Each trial samples the next element with
/// probability proportional to its uncovered-coverage count; the smallest
/// cover over all trials wins, earliest trial on ties.
///
/// Trial `t` draws from stream `t` of a ChaCha8 generator keyed by `rng_seed`,
/// so results are reproducible and independent of the trial count.
pub fn random_cover(corpus: &TrajectoryCorpus, config: &CoverConfig, trials: usize, rng_seed: u64) -> Result<CoverResult> {
    if trials == 0 {
        return Err(Error::invalid("random_cover needs at least one trial"));
    }
    let graph = CoverGraph::build(corpus, config)?;
    let mut best: Option<(Vec<usize>, bool)> = None;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        rng.set_stream(trial as u64);
        let outcome = graph.run(config, |gain, eligible| {
            let total: usize = gain.iter().zip(eligible).filter(|(_, &ok)| ok).map(|(&g, _)| g).sum();
            let mut ticket = rng.random_range(0..total);
            for (i, (&g, &ok)) in gain.iter().zip(eligible).enumerate() {
                if !ok {
                    continue;
                }
                if ticket < g {
                    return i;
                }
                ticket -= g;
            }
            unreachable!("ticket exceeds total gain")
        });
        let better = match &best {
            None => true,
            Some((chosen, complete)) => {
                (outcome.1 && !complete) || (outcome.1 == *complete && outcome.0.len() < chosen.len())
            }
        };
        if better {
            best = Some(outcome);
        }
    }
    let (chosen, complete) = best.expect("at least one trial");
    graph.to_result(corpus, chosen, complete)
}

/// Exact minimum cover by exhaustive search in increasing size order. Among
/// minimum covers the lexicographically smallest index set is returned.
pub fn brute_force_cover(corpus: &TrajectoryCorpus, config: &CoverConfig) -> Result<TrajectorySet> {
    if corpus.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            size: corpus.len(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let graph = CoverGraph::build(corpus, config)?;
    let n = graph.len();
    let masks: Vec<u32> = graph
        .neighbors
        .iter()
        .map(|nb| nb.iter().fold(0u32, |m, &j| m | (1 << j)))
        .collect();
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };

    for size in 1..=n {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            if combo.iter().fold(0u32, |m, &i| m | masks[i]) == full {
                let result = graph.to_result(corpus, combo, true)?;
                return Ok(result.set);
            }
            // advance to the next combination in lexicographic order
            let Some(pos) = (0..size).rev().find(|&p| combo[p] < n - size + p) else {
                break;
            };
            combo[pos] += 1;
            for p in pos + 1..size {
                combo[p] = combo[p - 1] + 1;
            }
        }
    }
    unreachable!("the whole corpus is always a cover")
}

/// Distance from every corpus element to its nearest set element.
pub fn coverage_report(set: &TrajectorySet, corpus: &TrajectoryCorpus, config: &CoverConfig) -> Result<CoverageReport> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let first = set.modes().first().ok_or(Error::EmptySet)?;
    corpus.items()[0].check_compatible(first)?;
    let residuals = corpus
        .items()
        .par_iter()
        .map(|item| {
            set.modes()
                .iter()
                .map(|mode| point_distance(item.points(), mode.points(), config.kind))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    Ok(CoverageReport::from_residuals(residuals, config.epsilon))
}
