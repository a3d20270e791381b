//! Exact enumeration of cycle-factors and 2-factors.
//!
//! [`cycle_factor_stats`] walks every cycle-factor of a digraph (optionally
//! with required/forbidden arcs) and returns exact counts, the total cycle
//! count and the cycle-count histogram. [`two_factor_stats`] does the same
//! for 2-factors of undirected graphs under either edge convention.

mod directed;
mod patterns;
mod undirected;

use std::collections::BTreeMap;
use std::ops::AddAssign;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::biguint_to_rational;

pub use directed::{cycle_factor_stats, expected_cycles, for_each_cycle_factor};
pub use patterns::{
    classify_crossing_patterns, crossing_census, cycle_matching_counts, gn_classification_check,
    CrossingCensus, GnClassification, PatternRow,
};
pub use undirected::{two_factor_stats, EdgeConvention};

/// Exact statistics over a set of factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorStats {
    /// Number of vertices of the graph the statistics describe.
    pub n: usize,
    /// `N`, the number of factors.
    pub count: BigUint,
    /// `T`, the sum of the cycle counts.
    pub cycle_sum: BigUint,
    /// Cycle count -> number of factors with that many cycles.
    pub histogram: BTreeMap<usize, BigUint>,
    /// Sum over factors of the number of fixed points (loops used).
    pub fix_sum: BigUint,
    /// Arc -> number of factors using it; present when requested.
    pub edge_usage: Option<BTreeMap<(usize, usize), BigUint>>,
}

impl FactorStats {
    pub fn empty(n: usize, with_usage: bool) -> Self {
        FactorStats {
            n,
            count: BigUint::zero(),
            cycle_sum: BigUint::zero(),
            histogram: BTreeMap::new(),
            fix_sum: BigUint::zero(),
            edge_usage: with_usage.then(BTreeMap::new),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.count.is_zero()
    }

    /// `T / N`, or [`Error::NoCycleFactor`] when there are no factors.
    pub fn expectation(&self) -> Result<BigRational> {
        if self.count.is_zero() {
            return Err(Error::NoCycleFactor);
        }
        Ok(biguint_to_rational(&self.cycle_sum) / biguint_to_rational(&self.count))
    }

    /// `fix_sum / N`.
    pub fn expected_fixed_points(&self) -> Result<BigRational> {
        if self.count.is_zero() {
            return Err(Error::NoCycleFactor);
        }
        Ok(biguint_to_rational(&self.fix_sum) / biguint_to_rational(&self.count))
    }

    /// Statistics of a disjoint union: counts multiply and histograms
    /// convolve. Edge usage is not carried through.
    pub fn product(&self, other: &FactorStats) -> FactorStats {
        let mut histogram: BTreeMap<usize, BigUint> = BTreeMap::new();
        for (a, ca) in &self.histogram {
            for (b, cb) in &other.histogram {
                *histogram.entry(a + b).or_default() += ca * cb;
            }
        }
        FactorStats {
            n: self.n + other.n,
            count: &self.count * &other.count,
            cycle_sum: &self.cycle_sum * &other.count + &other.cycle_sum * &self.count,
            histogram,
            fix_sum: &self.fix_sum * &other.count + &other.fix_sum * &self.count,
            edge_usage: None,
        }
    }

    /// Checks the internal bookkeeping identities.
    pub fn check_invariants(&self) -> Result<()> {
        let total: BigUint = self.histogram.values().sum();
        let weighted: BigUint = self
            .histogram
            .iter()
            .map(|(k, v)| v * BigUint::from(*k))
            .sum();
        if total != self.count || weighted != self.cycle_sum {
            return Err(Error::Consistency(
                "histogram disagrees with count or cycle sum".into(),
            ));
        }
        if self.count.is_zero()
            && !(self.cycle_sum.is_zero()
                && self.fix_sum.is_zero()
                && self
                    .edge_usage
                    .as_ref()
                    .is_none_or(|u| u.values().all(Zero::is_zero)))
        {
            return Err(Error::Consistency(
                "empty factor set with non-zero fields".into(),
            ));
        }
        Ok(())
    }
}

impl AddAssign<&FactorStats> for FactorStats {
    /// Merges statistics over disjoint sets of factors of the same graph.
    fn add_assign(&mut self, rhs: &FactorStats) {
        debug_assert_eq!(self.n, rhs.n);
        self.count += &rhs.count;
        self.cycle_sum += &rhs.cycle_sum;
        self.fix_sum += &rhs.fix_sum;
        for (k, v) in &rhs.histogram {
            *self.histogram.entry(*k).or_default() += v;
        }
        match (&mut self.edge_usage, &rhs.edge_usage) {
            (Some(mine), Some(theirs)) => {
                for (arc, v) in theirs {
                    *mine.entry(*arc).or_default() += v;
                }
            }
            (mine @ None, Some(theirs)) => *mine = Some(theirs.clone()),
            _ => {}
        }
    }
}

/// Arcs that every factor must use, and arcs that none may use.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ArcConstraints {
    pub required: Vec<(usize, usize)>,
    pub forbidden: Vec<(usize, usize)>,
}

impl ArcConstraints {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn require(mut self, u: usize, v: usize) -> Self {
        self.required.push((u, v));
        self
    }

    pub fn forbid(mut self, u: usize, v: usize) -> Self {
        self.forbidden.push((u, v));
        self
    }

    pub fn is_empty(&self) -> bool {
        self.required.is_empty() && self.forbidden.is_empty()
    }

    /// Required arcs must form a partial permutation and be disjoint from the
    /// forbidden ones. Arcs absent from the graph are not an error.
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::MalformedConstraints(m));
        for &(u, v) in self.required.iter().chain(&self.forbidden) {
            if u >= n || v >= n {
                return bad(format!("arc {u}->{v} out of range for n={n}"));
            }
        }
        let mut tails = vec![false; n];
        let mut heads = vec![false; n];
        for &(u, v) in &self.required {
            if std::mem::replace(&mut tails[u], true) {
                return bad(format!("two required arcs leave {u}"));
            }
            if std::mem::replace(&mut heads[v], true) {
                return bad(format!("two required arcs enter {v}"));
            }
        }
        if let Some(a) = self.required.iter().find(|a| self.forbidden.contains(a)) {
            return bad(format!("arc {}->{} both required and forbidden", a.0, a.1));
        }
        Ok(())
    }
}

/// Knobs for the enumerators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumOptions {
    /// Record per-arc usage counts.
    pub edge_usage: bool,
    /// Worker threads; `0` uses the ambient rayon pool, `1` runs serially.
    pub threads: usize,
    /// Graphs above this order are rejected.
    pub max_vertices: usize,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            edge_usage: false,
            threads: 0,
            max_vertices: crate::graph::MASK_LIMIT,
        }
    }
}

impl EnumOptions {
    pub fn with_edge_usage(mut self) -> Self {
        self.edge_usage = true;
        self
    }

    pub fn serial() -> Self {
        EnumOptions {
            threads: 1,
            ..Self::default()
        }
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }
}
