//! Backtracking over cycle-factors with incremental cycle counting.
//!
//! Vertices receive their image `σ(v)` in increasing order. The partial
//! assignment is a set of vertex-disjoint paths and cycles; for each open path
//! we keep its start (indexed by its end) and its end (indexed by its start).
//! Adding `v -> w` either closes the path ending at `v` (when `w` is its
//! start) or concatenates two paths, so the cycle count of every leaf is known
//! without a decomposition pass.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use rayon::prelude::*;

use super::{ArcConstraints, EnumOptions, FactorStats};
use crate::error::{Error, Result};
use crate::graph::{DiGraph, MASK_LIMIT};

trait HeadSet: Clone + Send {
    fn with_capacity(n: usize) -> Self;
    fn contains(&self, w: usize) -> bool;
    fn insert(&mut self, w: usize);
    fn remove(&mut self, w: usize);
}

#[derive(Clone)]
struct Mask(u64);

impl HeadSet for Mask {
    fn with_capacity(n: usize) -> Self {
        debug_assert!(n <= MASK_LIMIT);
        Mask(0)
    }
    #[inline(always)]
    fn contains(&self, w: usize) -> bool {
        self.0 >> w & 1 == 1
    }
    #[inline(always)]
    fn insert(&mut self, w: usize) {
        self.0 |= 1 << w;
    }
    #[inline(always)]
    fn remove(&mut self, w: usize) {
        self.0 &= !(1 << w);
    }
}

#[derive(Clone)]
struct Flags(Vec<bool>);

impl HeadSet for Flags {
    fn with_capacity(n: usize) -> Self {
        Flags(vec![false; n])
    }
    #[inline(always)]
    fn contains(&self, w: usize) -> bool {
        self.0[w]
    }
    #[inline(always)]
    fn insert(&mut self, w: usize) {
        self.0[w] = true;
    }
    #[inline(always)]
    fn remove(&mut self, w: usize) {
        self.0[w] = false;
    }
}

/// Allowed images per vertex after applying the constraints.
struct Plan {
    cand: Vec<Vec<usize>>,
}

impl Plan {
    /// `None` when the constraints already rule out every factor.
    fn new(g: &DiGraph, constraints: &ArcConstraints) -> Result<Option<Plan>> {
        let n = g.n();
        constraints.validate(n)?;
        let mut forced = vec![None; n];
        let mut reserved = vec![false; n];
        for &(u, v) in &constraints.required {
            if !g.has_arc(u, v) {
                return Ok(None);
            }
            forced[u] = Some(v);
            reserved[v] = true;
        }
        let cand: Vec<Vec<usize>> = (0..n)
            .map(|u| match forced[u] {
                Some(v) => vec![v],
                None => g
                    .out_neighbors(u)
                    .iter()
                    .copied()
                    .filter(|&v| !reserved[v] && !constraints.forbidden.contains(&(u, v)))
                    .collect(),
            })
            .collect();
        if cand.iter().any(Vec::is_empty) {
            return Ok(None);
        }
        Ok(Some(Plan { cand }))
    }

    fn n(&self) -> usize {
        self.cand.len()
    }
}

trait Sink {
    fn leaf(&mut self, sigma: &[usize], cycles: usize, fixed: usize);
}

enum Undo {
    Closed,
    Merged {
        start: usize,
        end: usize,
        old_end: usize,
        old_start: usize,
    },
}

struct Walk<'p, H> {
    plan: &'p Plan,
    sigma: Vec<usize>,
    /// `start_of[x]`: start of the open path whose end is `x`.
    start_of: Vec<usize>,
    /// `end_of[x]`: end of the open path whose start is `x`.
    end_of: Vec<usize>,
    used: H,
    cycles: usize,
    fixed: usize,
}

impl<'p, H: HeadSet> Walk<'p, H> {
    fn new(plan: &'p Plan) -> Self {
        let n = plan.n();
        Walk {
            plan,
            sigma: vec![usize::MAX; n],
            start_of: (0..n).collect(),
            end_of: (0..n).collect(),
            used: H::with_capacity(n),
            cycles: 0,
            fixed: 0,
        }
    }

    #[inline(always)]
    fn push(&mut self, v: usize, w: usize) -> Undo {
        self.used.insert(w);
        self.sigma[v] = w;
        let start = self.start_of[v];
        if start == w {
            self.cycles += 1;
            if v == w {
                self.fixed += 1;
            }
            Undo::Closed
        } else {
            let end = self.end_of[w];
            let undo = Undo::Merged {
                start,
                end,
                old_end: self.end_of[start],
                old_start: self.start_of[end],
            };
            self.end_of[start] = end;
            self.start_of[end] = start;
            undo
        }
    }

    #[inline(always)]
    fn pop(&mut self, v: usize, w: usize, undo: Undo) {
        match undo {
            Undo::Closed => {
                self.cycles -= 1;
                if v == w {
                    self.fixed -= 1;
                }
            }
            Undo::Merged {
                start,
                end,
                old_end,
                old_start,
            } => {
                self.end_of[start] = old_end;
                self.start_of[end] = old_start;
            }
        }
        self.sigma[v] = usize::MAX;
        self.used.remove(w);
    }

    fn descend<K: Sink>(&mut self, v: usize, sink: &mut K) {
        let plan = self.plan;
        if v == plan.n() {
            sink.leaf(&self.sigma, self.cycles, self.fixed);
            return;
        }
        for &w in &plan.cand[v] {
            if self.used.contains(w) {
                continue;
            }
            let undo = self.push(v, w);
            self.descend(v + 1, sink);
            self.pop(v, w, undo);
        }
    }

    /// Valid assignments of the first `depth` vertices.
    fn prefixes(&mut self, v: usize, depth: usize, out: &mut Vec<Vec<usize>>) {
        if v == depth {
            out.push(self.sigma[..depth].to_vec());
            return;
        }
        let plan = self.plan;
        for &w in &plan.cand[v] {
            if self.used.contains(w) {
                continue;
            }
            let undo = self.push(v, w);
            self.prefixes(v + 1, depth, out);
            self.pop(v, w, undo);
        }
    }
}

/// Per-task accumulator. Counters are `u64`: each leaf adds at most `n`, and
/// leaves are visited one at a time, so they cannot wrap in practice.
struct StatsSink {
    n: usize,
    histogram: Vec<u64>,
    fix_sum: u64,
    usage: Option<Vec<u64>>,
}

impl StatsSink {
    fn new(n: usize, with_usage: bool) -> Self {
        StatsSink {
            n,
            histogram: vec![0; n + 1],
            fix_sum: 0,
            usage: with_usage.then(|| vec![0; n * n]),
        }
    }

    fn into_stats(self, g: &DiGraph) -> FactorStats {
        let mut stats = FactorStats::empty(self.n, self.usage.is_some());
        for (k, &c) in self.histogram.iter().enumerate() {
            if c > 0 {
                stats.histogram.insert(k, BigUint::from(c));
                stats.count += c;
                stats.cycle_sum += BigUint::from(c) * BigUint::from(k);
            }
        }
        stats.fix_sum = BigUint::from(self.fix_sum);
        if let Some(usage) = self.usage {
            stats.edge_usage = Some(
                g.arcs()
                    .map(|(u, v)| ((u, v), BigUint::from(usage[u * self.n + v])))
                    .collect::<BTreeMap<_, _>>(),
            );
        }
        stats
    }
}

impl Sink for StatsSink {
    #[inline(always)]
    fn leaf(&mut self, sigma: &[usize], cycles: usize, fixed: usize) {
        self.histogram[cycles] += 1;
        self.fix_sum += fixed as u64;
        if let Some(usage) = &mut self.usage {
            for (v, &w) in sigma.iter().enumerate() {
                usage[v * self.n + w] += 1;
            }
        }
    }
}

struct FnSink<F>(F);

impl<F: FnMut(&[usize], usize)> Sink for FnSink<F> {
    fn leaf(&mut self, sigma: &[usize], cycles: usize, _fixed: usize) {
        (self.0)(sigma, cycles)
    }
}

/// Exact statistics over every cycle-factor of `g` that uses all required
/// arcs and no forbidden arc.
///
/// Required arcs that are not arcs of `g` make the factor set empty; a
/// required set that is not a partial permutation is rejected. The result
/// does not depend on `opts.threads`.
pub fn cycle_factor_stats(
    g: &DiGraph,
    constraints: &ArcConstraints,
    opts: &EnumOptions,
) -> Result<FactorStats> {
    let n = g.n();
    if n > opts.max_vertices {
        return Err(Error::TooLarge {
            n,
            limit: opts.max_vertices,
        });
    }
    let Some(plan) = Plan::new(g, constraints)? else {
        let mut stats = FactorStats::empty(n, opts.edge_usage);
        if opts.edge_usage {
            stats.edge_usage = Some(g.arcs().map(|a| (a, BigUint::ZERO)).collect());
        }
        return Ok(stats);
    };
    let stats = if n <= MASK_LIMIT {
        run::<Mask>(g, &plan, opts)
    } else {
        run::<Flags>(g, &plan, opts)
    };
    Ok(stats)
}

fn run<H: HeadSet>(g: &DiGraph, plan: &Plan, opts: &EnumOptions) -> FactorStats {
    let n = plan.n();
    let threads = match opts.threads {
        0 => rayon::current_num_threads(),
        t => t,
    };
    if threads <= 1 || n < 4 {
        let mut sink = StatsSink::new(n, opts.edge_usage);
        Walk::<H>::new(plan).descend(0, &mut sink);
        return sink.into_stats(g);
    }

    // Split the tree at a shallow depth with enough branches to keep every
    // worker busy; partial results are merged by field-wise addition.
    let target = 16 * threads;
    let mut depth = 1;
    let mut prefixes = Vec::new();
    loop {
        prefixes.clear();
        Walk::<H>::new(plan).prefixes(0, depth, &mut prefixes);
        if prefixes.len() >= target || depth >= n.min(6) {
            break;
        }
        depth += 1;
    }

    let work = || {
        prefixes
            .par_iter()
            .map(|prefix| {
                let mut walk = Walk::<H>::new(plan);
                for (v, &w) in prefix.iter().enumerate() {
                    // Undo records are dropped: the walk is discarded afterwards.
                    let _ = walk.push(v, w);
                }
                let mut sink = StatsSink::new(n, opts.edge_usage);
                walk.descend(prefix.len(), &mut sink);
                sink.into_stats(g)
            })
            .reduce(
                || FactorStats::empty(n, opts.edge_usage),
                |mut a, b| {
                    a += &b;
                    a
                },
            )
    };
    let mut stats = if opts.threads == 0 || opts.threads == rayon::current_num_threads() {
        work()
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(work),
            Err(_) => work(),
        }
    };
    if opts.edge_usage {
        // Every arc is listed, also when no prefix survived.
        let usage = stats.edge_usage.get_or_insert_with(Default::default);
        for a in g.arcs() {
            usage.entry(a).or_default();
        }
    }
    stats
}

/// Calls `visit(σ, c(σ))` for every cycle-factor respecting the constraints,
/// in lexicographic order of `σ`.
pub fn for_each_cycle_factor(
    g: &DiGraph,
    constraints: &ArcConstraints,
    visit: impl FnMut(&[usize], usize),
) -> Result<()> {
    let Some(plan) = Plan::new(g, constraints)? else {
        return Ok(());
    };
    let mut sink = FnSink(visit);
    if g.n() <= MASK_LIMIT {
        Walk::<Mask>::new(&plan).descend(0, &mut sink);
    } else {
        Walk::<Flags>::new(&plan).descend(0, &mut sink);
    }
    Ok(())
}

/// `E c(σ)` for a uniformly random cycle-factor `σ` of `g`.
pub fn expected_cycles(g: &DiGraph) -> Result<BigRational> {
    cycle_factor_stats(g, &ArcConstraints::none(), &EnumOptions::default())?.expectation()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_xd, complete_looped, looped_bidirected_cycle};
    use crate::exact::harmonic;
    use crate::Rational;

    fn hist(stats: &FactorStats) -> Vec<(usize, u64)> {
        stats
            .histogram
            .iter()
            .map(|(k, v)| (*k, u64::try_from(v).unwrap()))
            .collect()
    }

    #[test]
    fn looped_six_cycle() {
        let g = looped_bidirected_cycle(6).unwrap();
        let s = cycle_factor_stats(&g, &ArcConstraints::none(), &EnumOptions::default()).unwrap();
        assert_eq!(hist(&s), vec![(1, 2), (3, 2), (4, 9), (5, 6), (6, 1)]);
        assert_eq!(s.count, BigUint::from(20u32));
        assert_eq!(s.cycle_sum, BigUint::from(80u32));
        assert_eq!(s.expectation().unwrap(), Rational::from_integer(4.into()));
        s.check_invariants().unwrap();
    }

    #[test]
    fn complete_looped_matches_harmonic() {
        for d in 1..=6 {
            let g = complete_looped(d).unwrap();
            assert_eq!(expected_cycles(&g).unwrap(), harmonic::<Rational>(d));
        }
        let s = cycle_factor_stats(
            &complete_looped(3).unwrap(),
            &ArcConstraints::none(),
            &EnumOptions::serial(),
        )
        .unwrap();
        assert_eq!(
            (s.count, s.cycle_sum),
            (BigUint::from(6u32), BigUint::from(11u32))
        );
    }

    #[test]
    fn required_two_cycle_in_k4() {
        let g = complete_looped(4).unwrap();
        let c = ArcConstraints::none().require(0, 1).require(1, 0);
        let s = cycle_factor_stats(&g, &c, &EnumOptions::default()).unwrap();
        assert_eq!(
            (s.count, s.cycle_sum),
            (BigUint::from(2u32), BigUint::from(5u32))
        );
    }

    #[test]
    fn missing_required_arc_gives_empty_stats() {
        let g = looped_bidirected_cycle(6).unwrap();
        let c = ArcConstraints::none().require(0, 3);
        let s = cycle_factor_stats(&g, &c, &EnumOptions::default().with_edge_usage()).unwrap();
        assert!(s.is_empty());
        s.check_invariants().unwrap();
        assert_eq!(s.expectation(), Err(Error::NoCycleFactor));
    }

    #[test]
    fn malformed_constraints_rejected() {
        let g = complete_looped(3).unwrap();
        let two_tails = ArcConstraints::none().require(0, 1).require(0, 2);
        assert!(matches!(
            cycle_factor_stats(&g, &two_tails, &EnumOptions::default()),
            Err(Error::MalformedConstraints(_))
        ));
        let two_heads = ArcConstraints::none().require(0, 1).require(2, 1);
        assert!(cycle_factor_stats(&g, &two_heads, &EnumOptions::default()).is_err());
        let clash = ArcConstraints::none().require(0, 1).forbid(0, 1);
        assert!(cycle_factor_stats(&g, &clash, &EnumOptions::default()).is_err());
    }

    #[test]
    fn sink_vertex_has_no_factor() {
        let g = DiGraph::from_arcs(3, [(0, 1), (1, 0), (2, 0)]).unwrap();
        assert_eq!(expected_cycles(&g), Err(Error::NoCycleFactor));
        let lonely = DiGraph::from_arcs(2, [(0, 0)]).unwrap();
        assert_eq!(expected_cycles(&lonely), Err(Error::NoCycleFactor));
    }

    #[test]
    fn edge_usage_and_fixed_points() {
        let g = complete_looped(2).unwrap();
        let s = cycle_factor_stats(
            &g,
            &ArcConstraints::none(),
            &EnumOptions::default().with_edge_usage(),
        )
        .unwrap();
        let usage = s.edge_usage.as_ref().unwrap();
        assert_eq!(usage.len(), 4);
        assert!(usage.values().all(|v| *v == BigUint::from(1u32)));
        assert_eq!(s.fix_sum, BigUint::from(2u32));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let (x4, _) = build_xd(4).unwrap();
        let serial = cycle_factor_stats(
            &x4,
            &ArcConstraints::none(),
            &EnumOptions::serial().with_edge_usage(),
        )
        .unwrap();
        for t in [2, 3, 8] {
            let par = cycle_factor_stats(
                &x4,
                &ArcConstraints::none(),
                &EnumOptions::default().threads(t).with_edge_usage(),
            )
            .unwrap();
            assert_eq!(serial, par, "threads = {t}");
        }
    }

    #[test]
    fn visitor_sees_every_factor() {
        let g = looped_bidirected_cycle(6).unwrap();
        let mut seen = Vec::new();
        for_each_cycle_factor(&g, &ArcConstraints::none(), |s, c| {
            seen.push((s.to_vec(), c))
        })
        .unwrap();
        assert_eq!(seen.len(), 20);
        assert!(seen.windows(2).all(|w| w[0].0 < w[1].0));
        assert!(seen.contains(&(vec![0, 1, 2, 3, 4, 5], 6)));
        assert!(seen.contains(&(vec![1, 2, 3, 4, 5, 0], 1)));
    }

    #[test]
    fn size_limit_enforced() {
        let g = DiGraph::empty(70);
        assert!(matches!(
            cycle_factor_stats(&g, &ArcConstraints::none(), &EnumOptions::default()),
            Err(Error::TooLarge { n: 70, limit: 64 })
        ));
    }

    #[test]
    fn list_path_above_mask_limit() {
        let k1 = complete_looped(1).unwrap();
        let k2 = complete_looped(2).unwrap();
        let mut parts: Vec<&DiGraph> = vec![&k1; 66];
        parts.push(&k2);
        let g = DiGraph::disjoint_union(parts);
        assert_eq!(g.n(), 68);
        let opts = EnumOptions {
            max_vertices: 128,
            ..EnumOptions::default()
        };
        let s = cycle_factor_stats(&g, &ArcConstraints::none(), &opts).unwrap();
        assert_eq!(s.count, BigUint::from(2u32));
        assert_eq!(hist(&s), vec![(67, 1), (68, 1)]);
    }
}
