//! Certificates against the clique benchmark and exhaustive degree-two checks.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::build_xd;
use crate::enumerate::{
    classify_crossing_patterns, cycle_factor_stats, gn_classification_check, ArcConstraints,
    EnumOptions, FactorStats, GnClassification,
};
use crate::error::{Error, Result};
use crate::exact::{
    biguint_to_rational, harmonic, ratio_string, ratio_to_f64, serde_str, xd_closed_form,
};
use crate::graph::DiGraph;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    BeatsBenchmark,
    Ties,
    Below,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::BeatsBenchmark => "beats_benchmark",
            Verdict::Ties => "ties",
            Verdict::Below => "below",
        }
    }

    pub fn of_excess(excess: &BigRational) -> Verdict {
        if excess.is_positive() {
            Verdict::BeatsBenchmark
        } else if excess.is_zero() {
            Verdict::Ties
        } else {
            Verdict::Below
        }
    }
}

/// Exact comparison of a `d`-regular digraph against `(n/d) H_d`.
///
/// The string fields are authoritative; the `_decimal` fields are rounded
/// conveniences.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// The graph in text format.
    pub graph: String,
    pub n: usize,
    pub d: usize,
    #[serde(rename = "N", with = "serde_str::biguint")]
    pub count: BigUint,
    #[serde(rename = "T", with = "serde_str::biguint")]
    pub cycle_sum: BigUint,
    #[serde(with = "serde_str::ratio")]
    pub expectation: BigRational,
    pub expectation_decimal: f64,
    #[serde(with = "serde_str::ratio")]
    pub benchmark: BigRational,
    pub benchmark_decimal: f64,
    #[serde(with = "serde_str::ratio")]
    pub excess: BigRational,
    pub excess_decimal: f64,
    pub verdict: Verdict,
    pub provenance: String,
}

impl Certificate {
    /// Recomputes everything from the embedded graph and compares.
    pub fn recheck(&self, opts: &EnumOptions) -> Result<bool> {
        let g = DiGraph::from_text(&self.graph)?;
        let fresh = certify(&g, self.d, &self.provenance, opts)?;
        Ok(fresh == *self)
    }
}

/// `(n/d) H_d`.
pub fn benchmark(n: usize, d: usize) -> Result<BigRational> {
    if d == 0 || !n.is_multiple_of(d) {
        return Err(Error::NotDivisible { n, d });
    }
    Ok(Rational::from_integer((n / d).into()) * harmonic::<Rational>(d))
}

/// Enumerates `C(g)` and compares `E c(σ)` with `(n/d) H_d`.
pub fn certify(g: &DiGraph, d: usize, provenance: &str, opts: &EnumOptions) -> Result<Certificate> {
    if !g.is_d_regular(d) {
        return Err(Error::NotRegular { d });
    }
    let bench = benchmark(g.n(), d)?;
    let stats = cycle_factor_stats(g, &ArcConstraints::none(), opts)?;
    certificate_from_stats(g, d, &stats, bench, provenance)
}

pub(crate) fn certificate_from_stats(
    g: &DiGraph,
    d: usize,
    stats: &FactorStats,
    benchmark: BigRational,
    provenance: &str,
) -> Result<Certificate> {
    let expectation = stats.expectation()?;
    let excess = &expectation - &benchmark;
    Ok(Certificate {
        graph: g.to_text(),
        n: g.n(),
        d,
        count: stats.count.clone(),
        cycle_sum: stats.cycle_sum.clone(),
        expectation_decimal: ratio_to_f64(&expectation),
        expectation,
        benchmark_decimal: ratio_to_f64(&benchmark),
        benchmark,
        excess_decimal: ratio_to_f64(&excess),
        verdict: Verdict::of_excess(&excess),
        excess,
        provenance: provenance.to_string(),
    })
}

/// Every vertex has a loop and exactly one further out-neighbour, which
/// points back: the graph is a disjoint union of `K_2°`.
pub fn is_union_of_looped_pairs(g: &DiGraph) -> bool {
    g.n().is_multiple_of(2)
        && (0..g.n()).all(|v| {
            let outs = g.out_neighbors(v);
            outs.len() == 2 && g.has_arc(v, v) && {
                let w = if outs[0] == v { outs[1] } else { outs[0] };
                g.out_neighbors(w).len() == 2 && g.has_arc(w, w) && g.has_arc(w, v)
            }
        })
}

/// The double cover of a 2-regular digraph splits into even cycles, each
/// with exactly two perfect matchings; this checks the first half.
pub fn double_cover_is_even_cycles(g: &DiGraph) -> bool {
    let cover = g.double_cover();
    cover.is_regular(2)
        && cover.components().iter().all(|(left, right)| {
            let edges = cover.edges.iter().filter(|(l, _)| left.contains(l)).count();
            left.len() == right.len() && edges == 2 * left.len()
        })
}

/// Calls `visit` on every labelled `d`-regular digraph on `n` vertices
/// (loops allowed, no parallel arcs). Out-neighbour sets are chosen vertex by
/// vertex with running in-degree caps.
pub fn for_each_regular_digraph(n: usize, d: usize, mut visit: impl FnMut(DiGraph)) {
    if d > n {
        return;
    }
    let subsets = k_subsets(n, d);
    let mut indeg = vec![0usize; n];
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    fn rec(
        v: usize,
        n: usize,
        d: usize,
        subsets: &[Vec<usize>],
        indeg: &mut [usize],
        chosen: &mut Vec<usize>,
        visit: &mut dyn FnMut(DiGraph),
    ) {
        if v == n {
            let adj = chosen.iter().map(|&i| subsets[i].clone()).collect();
            visit(DiGraph::from_out_adj(adj).expect("subsets are duplicate-free"));
            return;
        }
        // Remaining capacity must exactly absorb the arcs still to be placed.
        let remaining_arcs = (n - v) * d;
        let capacity: usize = indeg.iter().map(|&x| d - x).sum();
        if capacity != remaining_arcs {
            return;
        }
        for (i, s) in subsets.iter().enumerate() {
            if s.iter().any(|&w| indeg[w] == d) {
                continue;
            }
            for &w in s {
                indeg[w] += 1;
            }
            chosen.push(i);
            rec(v + 1, n, d, subsets, indeg, chosen, visit);
            chosen.pop();
            for &w in s {
                indeg[w] -= 1;
            }
        }
    }
    rec(0, n, d, &subsets, &mut indeg, &mut chosen, &mut visit);
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            if n - x < k - cur.len() {
                break;
            }
            cur.push(x);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// A graph that failed one of the degree-two checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct D2Violation {
    pub graph: String,
    pub check: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct D2OrderReport {
    pub n: usize,
    /// Labelled 2-regular digraphs examined.
    pub graphs: usize,
    /// Distinct fingerprints among them.
    pub fingerprint_classes: usize,
    #[serde(with = "serde_str::ratio")]
    pub max_expectation: BigRational,
    /// Labelled graphs attaining the maximum.
    pub maximizers: usize,
    pub maximizers_all_looped_pairs: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct D2Report {
    pub n_max: usize,
    pub orders: Vec<D2OrderReport>,
    pub violators: Vec<D2Violation>,
    pub passed: bool,
}

/// Default and maximum order for [`d2_theorem_suite`].
pub const D2_DEFAULT_N: usize = 6;
pub const D2_LIMIT: usize = 7;

/// For every labelled 2-regular digraph on `1..=n_max` vertices checks:
/// every arc lies in a random cycle-factor with probability 1/2,
/// `E fix = λ/2`, `E c <= n/2 + λ/4`, and `E c = 3n/4` exactly for disjoint
/// unions of `K_2°`.
pub fn d2_theorem_suite(n_max: usize) -> Result<D2Report> {
    if n_max > D2_LIMIT {
        return Err(Error::param(format!(
            "degree-two suite limited to n <= {D2_LIMIT}"
        )));
    }
    let half = Rational::new(1.into(), 2.into());
    let mut orders = Vec::new();
    let mut violators = Vec::new();
    for n in 1..=n_max {
        let mut graphs = Vec::new();
        for_each_regular_digraph(n, 2, |g| graphs.push(g));
        let results: Vec<(Rational, bool, Vec<D2Violation>)> = graphs
            .par_iter()
            .map(|g| check_d2_graph(g, &half))
            .collect::<Result<_>>()?;
        let mut fps: Vec<_> = graphs.iter().map(DiGraph::fingerprint).collect();
        fps.sort_unstable();
        fps.dedup();
        let max = results
            .iter()
            .map(|r| r.0.clone())
            .max()
            .unwrap_or_else(Rational::zero);
        let maximizers: Vec<_> = results.iter().filter(|r| r.0 == max).collect();
        orders.push(D2OrderReport {
            n,
            graphs: graphs.len(),
            fingerprint_classes: fps.len(),
            maximizers: maximizers.len(),
            maximizers_all_looped_pairs: maximizers.iter().all(|r| r.1),
            max_expectation: max,
        });
        violators.extend(results.into_iter().flat_map(|r| r.2));
    }
    Ok(D2Report {
        n_max,
        passed: violators.is_empty(),
        orders,
        violators,
    })
}

fn check_d2_graph(g: &DiGraph, half: &Rational) -> Result<(Rational, bool, Vec<D2Violation>)> {
    let n = g.n();
    let stats = cycle_factor_stats(
        g,
        &ArcConstraints::none(),
        &EnumOptions::serial().with_edge_usage(),
    )?;
    let mut bad = Vec::new();
    let mut flag = |check: String| {
        bad.push(D2Violation {
            graph: g.to_text(),
            check,
        })
    };
    let expectation = match stats.expectation() {
        Ok(e) => e,
        Err(_) => {
            // A 2-regular digraph always has a cycle-factor.
            flag("empty factor set".into());
            return Ok((Rational::zero(), false, bad));
        }
    };
    let count = biguint_to_rational(&stats.count);
    for (arc, used) in stats.edge_usage.as_ref().expect("requested") {
        if &(biguint_to_rational(used) / &count) != half {
            flag(format!("arc {}->{} marginal is not 1/2", arc.0, arc.1));
        }
    }
    let lambda = Rational::from_integer(g.loop_count().into());
    if stats.expected_fixed_points()? != &lambda / Rational::from_integer(2.into()) {
        flag("E fix != lambda/2".into());
    }
    let n_r = Rational::from_integer(n.into());
    let bound =
        &n_r / Rational::from_integer(2.into()) + &lambda / Rational::from_integer(4.into());
    if expectation > bound {
        flag(format!(
            "E c = {} exceeds n/2 + lambda/4",
            ratio_string(&expectation)
        ));
    }
    if !double_cover_is_even_cycles(g) {
        flag("double cover is not a union of even cycles".into());
    }
    let pairs = is_union_of_looped_pairs(g);
    let three_quarters = Rational::new((3 * n).into(), 4.into());
    if (expectation == three_quarters) != pairs {
        flag(format!(
            "E c = 3n/4 is {} but union-of-looped-pairs is {pairs}",
            expectation == three_quarters
        ));
    }
    Ok((expectation, pairs, bad))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XdCheck {
    pub d: usize,
    #[serde(rename = "N", with = "serde_str::biguint")]
    pub count: BigUint,
    #[serde(rename = "T", with = "serde_str::biguint")]
    pub cycle_sum: BigUint,
    #[serde(with = "serde_str::ratio")]
    pub expectation: BigRational,
    #[serde(with = "serde_str::ratio")]
    pub excess: BigRational,
    pub stats_match: bool,
    pub rows_match: bool,
    /// First differing quantity, if any.
    pub mismatch: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XdCrossReport {
    pub d_max: usize,
    pub checks: Vec<XdCheck>,
    pub passed: bool,
}

/// Compares full enumeration of `X_d` with the closed forms for every
/// `3 <= d <= d_max`: `N`, `T`, `E c` and each table row.
pub fn xd_cross_validation(d_max: usize, opts: &EnumOptions) -> Result<XdCrossReport> {
    let mut checks = Vec::new();
    for d in 3..=d_max {
        checks.push(xd_check(d, opts)?);
    }
    Ok(XdCrossReport {
        d_max,
        passed: checks.iter().all(|c| c.mismatch.is_none()),
        checks,
    })
}

pub fn xd_check(d: usize, opts: &EnumOptions) -> Result<XdCheck> {
    let closed = xd_closed_form::<Rational>(d)?;
    let (g, _) = build_xd(d)?;
    let stats = cycle_factor_stats(&g, &ArcConstraints::none(), opts)?;
    let expectation = stats.expectation()?;
    let mut problems = Vec::new();
    let count = biguint_to_rational(&stats.count);
    let cycle_sum = biguint_to_rational(&stats.cycle_sum);
    if count != closed.count {
        problems.push(format!(
            "N: enumerated {} vs closed form {}",
            count, closed.count
        ));
    }
    if cycle_sum != closed.cycle_sum {
        problems.push(format!(
            "T: enumerated {} vs closed form {}",
            cycle_sum, closed.cycle_sum
        ));
    }
    if expectation != closed.expectation {
        problems.push(format!(
            "E c: enumerated {} vs closed form {}",
            ratio_string(&expectation),
            ratio_string(&closed.expectation)
        ));
    }
    let stats_problems = problems.len();
    let rows = classify_crossing_patterns(d, opts)?;
    for (measured, formula) in rows.iter().zip(&closed.rows) {
        if biguint_to_rational(&measured.count) != formula.count {
            problems.push(format!(
                "row {} count: {} vs {}",
                formula.class.label(),
                measured.count,
                formula.count
            ));
        } else if measured.mean != formula.mean {
            problems.push(format!(
                "row {} mean: {} vs {}",
                formula.class.label(),
                ratio_string(&measured.mean),
                ratio_string(&formula.mean)
            ));
        }
    }
    Ok(XdCheck {
        d,
        stats_match: stats_problems == 0,
        rows_match: problems.len() == stats_problems,
        count: stats.count,
        cycle_sum: stats.cycle_sum,
        excess: &expectation - &closed.benchmark,
        expectation,
        mismatch: problems.into_iter().next(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GnReport {
    pub checks: Vec<GnClassification>,
    pub passed: bool,
}

/// Runs [`gn_classification_check`] for every `n_min <= n <= n_max`.
pub fn gn_classification_suite(n_min: usize, n_max: usize) -> Result<GnReport> {
    let checks = (n_min..=n_max)
        .map(gn_classification_check)
        .collect::<Result<Vec<_>>>()?;
    Ok(GnReport {
        passed: checks.iter().all(|c| c.holds),
        checks,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxScanReport {
    pub n: usize,
    pub d: usize,
    pub graphs: usize,
    #[serde(with = "serde_str::ratio")]
    pub max_expectation: BigRational,
    #[serde(with = "serde_str::ratio")]
    pub benchmark: BigRational,
    pub maximizers: usize,
    /// Text of the first maximizer found.
    pub example: String,
}

/// Exhaustively scans labelled `d`-regular digraphs on `n` vertices for the
/// largest expected cycle count. Only a measurement: nothing is asserted.
pub fn regular_max_scan(n: usize, d: usize) -> Result<MaxScanReport> {
    if n > 7 {
        return Err(Error::param("exhaustive scan limited to n <= 7"));
    }
    let bench = benchmark(n, d)?;
    let mut graphs = Vec::new();
    for_each_regular_digraph(n, d, |g| graphs.push(g));
    let values: Vec<Rational> = graphs
        .par_iter()
        .map(|g| {
            cycle_factor_stats(g, &ArcConstraints::none(), &EnumOptions::serial())
                .and_then(|s| s.expectation())
        })
        .collect::<Result<_>>()?;
    let max = values.iter().max().cloned().unwrap_or_else(Rational::zero);
    let first = values.iter().position(|v| *v == max);
    Ok(MaxScanReport {
        n,
        d,
        graphs: graphs.len(),
        maximizers: values.iter().filter(|v| **v == max).count(),
        example: first.map(|i| graphs[i].to_text()).unwrap_or_default(),
        max_expectation: max,
        benchmark: bench,
    })
}
