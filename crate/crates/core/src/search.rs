//! Seeded beam search over `d`-regular digraphs for large excess.
//!
//! Each population slot owns a ChaCha8 stream (seed shared, stream = slot
//! index), so results do not depend on the number of scoring threads.

use std::cmp::Reverse;
use std::collections::{BTreeMap, HashSet};

use num_rational::BigRational;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::EnumOptions;
use crate::error::{Error, Result};
use crate::graph::{DiGraph, Fingerprint};
use crate::verify::{certify, Certificate};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Search parameters. The defaults are tuning choices for small orders.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    /// Beam width.
    pub population: usize,
    pub iterations: usize,
    /// Swaps applied to produce each child.
    pub moves_per_step: usize,
    /// A slot whose children failed to improve on it this many times in a
    /// row is reseeded with a fresh random graph.
    pub restart_after: usize,
    /// Number of records kept in the returned leaderboard.
    pub leaderboard: usize,
}

impl SearchConfig {
    pub fn new(n: usize, d: usize) -> Self {
        SearchConfig {
            n,
            d,
            seed: DEFAULT_SEED,
            population: 32,
            iterations: 200,
            moves_per_step: 1,
            restart_after: 25,
            leaderboard: 32,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::param("search needs d >= 2"));
        }
        if self.d > self.n || !self.n.is_multiple_of(self.d) {
            return Err(Error::NotDivisible {
                n: self.n,
                d: self.d,
            });
        }
        if self.population == 0 {
            return Err(Error::param("population must be at least 1"));
        }
        Ok(())
    }
}

/// A certified graph found by the search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub certificate: Certificate,
    /// Iteration at which the graph was first scored (0 = initial sample).
    pub iteration: usize,
    pub fingerprint: Fingerprint,
    /// Fingerprint of the parent, or `"random"` for fresh samples.
    pub lineage: String,
}

const PERMUTATION_RETRIES: usize = 1000;
const RESTARTS: usize = 100;
const SWAP_DRAWS: usize = 64;

/// Samples a `d`-regular digraph as a union of `d` random permutations.
/// A permutation that would repeat an existing arc is redrawn; after too many
/// redraws the whole sample restarts.
pub fn random_regular_digraph<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<DiGraph> {
    if d > n {
        return Err(Error::param(format!(
            "no {d}-regular digraph on {n} vertices"
        )));
    }
    'restart: for _ in 0..RESTARTS {
        let mut taken = vec![vec![false; n]; n];
        let mut perm: Vec<usize> = (0..n).collect();
        for _ in 0..d {
            let mut placed = false;
            for _ in 0..PERMUTATION_RETRIES {
                perm.shuffle(rng);
                if (0..n).all(|v| !taken[v][perm[v]]) {
                    placed = true;
                    break;
                }
            }
            if !placed {
                continue 'restart;
            }
            for v in 0..n {
                taken[v][perm[v]] = true;
            }
        }
        let adj = taken
            .iter()
            .map(|row| (0..n).filter(|&w| row[w]).collect())
            .collect();
        return DiGraph::from_out_adj(adj);
    }
    Err(Error::GenerationFailed { attempts: RESTARTS })
}

/// Rewires `u->v, x->y` into `u->y, x->v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SwapMove {
    pub u: usize,
    pub v: usize,
    pub x: usize,
    pub y: usize,
}

impl SwapMove {
    pub fn is_valid(&self, g: &DiGraph) -> bool {
        let &SwapMove { u, v, x, y } = self;
        u != x
            && v != y
            && g.has_arc(u, v)
            && g.has_arc(x, y)
            && !g.has_arc(u, y)
            && !g.has_arc(x, v)
    }

    pub fn apply(&self, g: &DiGraph) -> Result<DiGraph> {
        if !self.is_valid(g) {
            return Err(Error::param(format!("invalid swap {self:?}")));
        }
        let &SwapMove { u, v, x, y } = self;
        let arcs = g.arcs().map(|a| match a {
            a if a == (u, v) => (u, y),
            a if a == (x, y) => (x, v),
            a => a,
        });
        DiGraph::from_arcs(g.n(), arcs)
    }

    /// The swap that undoes this one.
    pub fn inverse(&self) -> SwapMove {
        SwapMove {
            u: self.u,
            v: self.y,
            x: self.x,
            y: self.v,
        }
    }
}

/// Draws a valid swap, giving up after a bounded number of draws.
pub fn random_swap<R: Rng + ?Sized>(g: &DiGraph, rng: &mut R) -> Option<SwapMove> {
    let arcs: Vec<(usize, usize)> = g.arcs().collect();
    if arcs.len() < 2 {
        return None;
    }
    (0..SWAP_DRAWS).find_map(|_| {
        let &(u, v) = arcs.choose(rng)?;
        let &(x, y) = arcs.choose(rng)?;
        let m = SwapMove { u, v, x, y };
        m.is_valid(g).then_some(m)
    })
}

/// One degree-preserving 2-swap; `g` is returned unchanged if none is found.
pub fn swap_move<R: Rng + ?Sized>(g: &DiGraph, rng: &mut R) -> DiGraph {
    random_swap(g, rng)
        .and_then(|m| m.apply(g).ok())
        .unwrap_or_else(|| g.clone())
}

struct Member {
    graph: DiGraph,
    fingerprint: Fingerprint,
    /// `None` when the graph has no cycle-factor.
    excess: Option<BigRational>,
    stale: usize,
}

/// Ordering key: larger excess first, ties by fingerprint.
fn rank(a: &Member, b: &Member) -> std::cmp::Ordering {
    b.excess
        .cmp(&a.excess)
        .then_with(|| a.fingerprint.cmp(&b.fingerprint))
}

struct Candidate {
    graph: DiGraph,
    lineage: String,
    /// Fingerprint and score of the member this was derived from.
    parent: Option<(Fingerprint, Option<BigRational>)>,
}

impl Candidate {
    fn fresh(graph: DiGraph) -> Self {
        Candidate {
            graph,
            lineage: "random".into(),
            parent: None,
        }
    }
}

/// Runs the search and returns the leaderboard, best first.
pub fn run_search(config: &SearchConfig) -> Result<Vec<SearchRecord>> {
    run_search_with(config, |_, _| {})
}

/// As [`run_search`], calling `observe(iteration, new_records)` after each
/// iteration with the graphs first seen in it.
pub fn run_search_with(
    config: &SearchConfig,
    mut observe: impl FnMut(usize, &[SearchRecord]),
) -> Result<Vec<SearchRecord>> {
    config.validate()?;
    let opts = EnumOptions::serial();
    let provenance = format!("search seed={}", config.seed);
    let mut rngs: Vec<ChaCha8Rng> = (0..config.population)
        .map(|slot| {
            let mut r = ChaCha8Rng::seed_from_u64(config.seed);
            r.set_stream(slot as u64);
            r
        })
        .collect();
    let fresh = |rng: &mut ChaCha8Rng| random_regular_digraph(config.n, config.d, rng).ok();

    let mut seen: HashSet<Fingerprint> = HashSet::new();
    let mut board: BTreeMap<(Reverse<BigRational>, Fingerprint), SearchRecord> = BTreeMap::new();
    let mut population: Vec<Member> = Vec::new();
    let mut candidates: Vec<Candidate> = rngs
        .iter_mut()
        .filter_map(&fresh)
        .map(Candidate::fresh)
        .collect();

    for iteration in 0..=config.iterations {
        // Scoring is parallel; collection keeps candidate order.
        let scored: Vec<(Candidate, Fingerprint, Option<Certificate>)> = candidates
            .into_par_iter()
            .map(|c| {
                let fp = c.graph.fingerprint();
                let cert = certify(&c.graph, config.d, &provenance, &opts).ok();
                (c, fp, cert)
            })
            .collect();

        let mut improved: HashSet<Fingerprint> = HashSet::new();
        let mut new_records = Vec::new();
        for (cand, fp, cert) in scored {
            let excess = cert.as_ref().map(|c| c.excess.clone());
            if let Some((parent, parent_excess)) = cand.parent {
                if excess > parent_excess {
                    improved.insert(parent);
                }
            }
            if !seen.insert(fp) {
                continue;
            }
            if let Some(cert) = cert {
                let record = SearchRecord {
                    certificate: cert,
                    iteration,
                    fingerprint: fp,
                    lineage: cand.lineage,
                };
                board.insert(
                    (Reverse(record.certificate.excess.clone()), fp),
                    record.clone(),
                );
                if board.len() > config.leaderboard {
                    board.pop_last();
                }
                new_records.push(record);
            }
            population.push(Member {
                graph: cand.graph,
                fingerprint: fp,
                excess,
                stale: 0,
            });
        }
        observe(iteration, &new_records);
        if iteration == config.iterations {
            break;
        }

        for m in &mut population {
            if improved.contains(&m.fingerprint) {
                m.stale = 0;
            } else {
                m.stale += 1;
            }
        }
        population.sort_by(rank);
        population.truncate(config.population);

        // Survivors breed; stagnant ones are replaced by fresh samples.
        candidates = Vec::with_capacity(config.population);
        let mut retired = Vec::new();
        for (slot, rng) in rngs.iter_mut().enumerate() {
            match population.get(slot) {
                Some(m) if m.stale < config.restart_after => {
                    let mut g = m.graph.clone();
                    for _ in 0..config.moves_per_step.max(1) {
                        g = swap_move(&g, rng);
                    }
                    candidates.push(Candidate {
                        graph: g,
                        lineage: m.fingerprint.to_string(),
                        parent: Some((m.fingerprint, m.excess.clone())),
                    });
                }
                other => {
                    if other.is_some() {
                        retired.push(slot);
                    }
                    candidates.extend(fresh(rng).map(Candidate::fresh));
                }
            }
        }
        for slot in retired.into_iter().rev() {
            population.remove(slot);
        }
    }
    Ok(board.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::complete_looped;
    use crate::Rational;

    #[test]
    fn random_regular_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = random_regular_digraph(6, 3, &mut rng).unwrap();
        assert!(g.is_d_regular(3));
        let k4 = random_regular_digraph(4, 4, &mut rng).unwrap();
        assert_eq!(k4, complete_looped(4).unwrap());
        assert!(matches!(
            random_regular_digraph(3, 4, &mut rng),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn swaps_preserve_degrees_and_invert() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut g = random_regular_digraph(8, 3, &mut rng).unwrap();
        for _ in 0..200 {
            if let Some(m) = random_swap(&g, &mut rng) {
                let h = m.apply(&g).unwrap();
                assert!(h.is_d_regular(3));
                assert_eq!(m.inverse().apply(&h).unwrap(), g);
                g = h;
            }
        }
        let k3 = complete_looped(3).unwrap();
        assert_eq!(swap_move(&k3, &mut rng), k3);
        assert!(random_swap(&k3, &mut rng).is_none());
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::new(6, 3).validate().is_ok());
        assert!(SearchConfig::new(7, 3).validate().is_err());
        assert!(SearchConfig::new(4, 1).validate().is_err());
        let mut c = SearchConfig::new(6, 3);
        c.population = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn small_search_is_reproducible_and_sound() {
        let mut c = SearchConfig::new(6, 3);
        c.population = 8;
        c.iterations = 20;
        let a = run_search(&c).unwrap();
        let b = run_search(&c).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_empty());
        for w in a.windows(2) {
            assert!(w[0].certificate.excess >= w[1].certificate.excess);
        }
        for r in &a {
            assert!(r.certificate.recheck(&EnumOptions::default()).unwrap());
        }
    }

    #[test]
    fn degree_two_never_beats_benchmark() {
        let mut c = SearchConfig::new(4, 2);
        c.population = 8;
        c.iterations = 30;
        let board = run_search(&c).unwrap();
        assert_eq!(
            board[0].certificate.excess,
            Rational::from_integer(0.into())
        );
    }
}
