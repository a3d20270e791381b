//! Acceptance criteria 1-10. Each criterion prints one PASS/FAIL line with
//! its runtime against the pinned bound. Set `CYCLEFACTOR_ACCEPT_D7=1` to
//! include `X_7` in criterion 2.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use cyclefactor_core::constructions::{
    build_gkd, build_xd, complete_looped, looped_bidirected_cycle, undirected_family,
};
use cyclefactor_core::enumerate::{
    classify_crossing_patterns, cycle_matching_counts, gn_classification_check,
};
use cyclefactor_core::exact::{
    asymptotic_excess_probe, excess_closed_form, f_poly, f_prime, harmonic, ratio_to_f64,
    table1_rows,
};
use cyclefactor_core::search::run_search_with;
use cyclefactor_core::verify::{benchmark, d2_theorem_suite};
use cyclefactor_core::{
    cycle_factor_stats, two_factor_stats, ArcConstraints, DiGraph, EdgeConvention, EnumOptions,
    Rational, SearchConfig,
};
use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

fn int(x: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(x.clone()))
}

fn fact(m: usize) -> Rational {
    (1..=m).fold(q(1, 1), |acc, i| acc * q(i as i64, 1))
}

fn harm(m: usize) -> Rational {
    (1..=m).fold(q(0, 1), |acc, i| acc + q(1, i as i64))
}

type Outcome = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn criterion(&mut self, id: u32, title: &str, bound: Duration, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let result = f();
        let took = start.elapsed();
        let verdict = match (&result, took <= bound) {
            (Ok(()), true) => "PASS".to_string(),
            (Ok(()), false) => format!("FAIL (took {took:.2?}, bound {bound:?})"),
            (Err(e), _) => format!("FAIL ({e})"),
        };
        // Written past the harness capture so the lines always show.
        let _ = writeln!(
            std::io::stdout(),
            "acceptance {id:>2} {title:<46} {took:>10.2?} / {bound:>5?}  {verdict}"
        );
        if !verdict.starts_with("PASS") {
            self.failures.push(format!("{id}: {verdict}"));
        }
    }
}

fn stats(g: &DiGraph) -> cyclefactor_core::FactorStats {
    cycle_factor_stats(g, &ArcConstraints::none(), &EnumOptions::default()).unwrap()
}

fn c1() -> Outcome {
    let g = looped_bidirected_cycle(6).unwrap();
    let s = stats(&g);
    let hist: Vec<(usize, u64)> = s
        .histogram
        .iter()
        .map(|(k, v)| (*k, u64::try_from(v).unwrap()))
        .collect();
    ensure(s.count == BigUint::from(20u32), || {
        format!("N = {}", s.count)
    })?;
    ensure(hist == vec![(1, 2), (3, 2), (4, 9), (5, 6), (6, 1)], || {
        format!("histogram {hist:?}")
    })?;
    let e = s.expectation().unwrap();
    ensure(e == q(4, 1), || format!("E c = {e}"))?;
    let b = benchmark(6, 3).unwrap();
    ensure(b == q(11, 3), || format!("benchmark {b}"))?;
    ensure(&e - &b == q(1, 3), || "excess".into())
}

fn c2(ds: std::ops::RangeInclusive<usize>) -> Outcome {
    for d in ds {
        let (g, _) = build_xd(d).unwrap();
        let s = stats(&g);
        let dd = BigInt::from(d);
        let p = dd.pow(4) - 6 * dd.pow(3) + 19 * dd.pow(2) - 30 * &dd + 20;
        let expected_n = fact(d - 2) * fact(d - 2) * Rational::from_integer(p);
        ensure(int(&s.count) == expected_n, || {
            format!("d={d}: N = {} vs {expected_n}", s.count)
        })?;
        let rows = table1_rows::<Rational>(d).unwrap();
        let closed_t = rows.iter().fold(q(0, 1), |acc, r| acc + &r.count * &r.mean);
        ensure(int(&s.cycle_sum) == closed_t, || {
            format!("d={d}: T = {} vs {closed_t}", s.cycle_sum)
        })?;
        let e = s.expectation().unwrap();
        let excess = excess_closed_form::<Rational>(d).unwrap();
        ensure(
            e.clone() - harmonic::<Rational>(d) * q(2, 1) == excess,
            || format!("d={d}: excess"),
        )?;
        let measured =
            classify_crossing_patterns(d, &EnumOptions::default()).map_err(|e| e.to_string())?;
        for (m, r) in measured.iter().zip(&rows) {
            ensure(int(&m.count) == r.count && m.mean == r.mean, || {
                format!(
                    "d={d}: row {} measured ({}, {}) vs ({}, {})",
                    r.class, m.count, m.mean, r.count, r.mean
                )
            })?;
        }
    }
    Ok(())
}

fn c3() -> Outcome {
    for d in 3..=500 {
        let e = excess_closed_form::<Rational>(d).unwrap();
        ensure(e > q(0, 1), || format!("excess({d}) = {e}"))?;
        ensure(f_poly::<BigInt>(d) > BigInt::from(0), || {
            format!("f({d}) <= 0")
        })?;
        ensure(f_prime::<BigInt>(d) > BigInt::from(0), || {
            format!("f'({d}) <= 0")
        })?;
    }
    let exact = ratio_to_f64(&asymptotic_excess_probe::<Rational>(500).unwrap());
    ensure(exact > 5.8 && exact < 6.2, || {
        format!("d^2 excess at 500 = {exact}")
    })
}

fn c4() -> Outcome {
    for (k, d) in [(3, 3), (4, 3), (3, 4)] {
        let e = stats(&build_gkd(k, d).unwrap()).expectation().unwrap();
        let h = harm(d);
        let predicted =
            &h * q(2, 1) + excess_closed_form::<Rational>(d).unwrap() + &h * q(k as i64 - 2, 1);
        ensure(e == predicted, || {
            format!("G_({k},{d}): {e} vs {predicted}")
        })?;
        ensure(e > &h * q(k as i64, 1), || {
            format!("G_({k},{d}) does not beat kH_d")
        })?;
    }
    Ok(())
}

fn c5() -> Outcome {
    let r = d2_theorem_suite(6).map_err(|e| e.to_string())?;
    ensure(r.violators.is_empty(), || {
        format!(
            "{} violators, first {:?}",
            r.violators.len(),
            r.violators.first()
        )
    })?;
    for o in r.orders.iter().filter(|o| o.n % 2 == 0) {
        ensure(
            o.max_expectation == q(3 * o.n as i64, 4) && o.maximizers_all_looped_pairs,
            || format!("n={}: max {}", o.n, o.max_expectation),
        )?;
    }
    Ok(())
}

fn c6() -> Outcome {
    for n in 4..=12 {
        let c = gn_classification_check(n).map_err(|e| e.to_string())?;
        ensure(c.holds, || format!("classification fails at n={n}"))?;
    }
    let m: Vec<u64> = cycle_matching_counts(6)
        .unwrap()
        .iter()
        .map(|x| u64::try_from(x).unwrap())
        .collect();
    ensure(m == vec![1, 6, 9, 2], || format!("matchings of C6: {m:?}"))
}

/// Partial permutations on `n` points as (arcs, number of closed cycles).
fn partial_perms(n: usize) -> Vec<(Vec<(usize, usize)>, usize)> {
    fn rec(
        v: usize,
        n: usize,
        img: &mut Vec<Option<usize>>,
        used: &mut [bool],
        out: &mut Vec<Vec<Option<usize>>>,
    ) {
        if v == n {
            out.push(img.clone());
            return;
        }
        img.push(None);
        rec(v + 1, n, img, used, out);
        img.pop();
        for w in 0..n {
            if !used[w] {
                used[w] = true;
                img.push(Some(w));
                rec(v + 1, n, img, used, out);
                img.pop();
                used[w] = false;
            }
        }
    }
    let mut imgs = Vec::new();
    rec(0, n, &mut Vec::new(), &mut vec![false; n], &mut imgs);
    imgs.into_iter()
        .map(|img| {
            let arcs: Vec<_> = (0..n).filter_map(|v| img[v].map(|w| (v, w))).collect();
            // A vertex lies on a closed cycle iff following F returns to it.
            let on_cycle = (0..n)
                .filter(|&s| {
                    let mut v = s;
                    for _ in 0..n {
                        match img[v] {
                            Some(w) => v = w,
                            None => return false,
                        }
                        if v == s {
                            return true;
                        }
                    }
                    false
                })
                .collect::<Vec<_>>();
            let cycles = on_cycle
                .iter()
                .filter(|&&s| {
                    // Count each cycle at its smallest vertex.
                    let mut v = img[s].unwrap();
                    while v != s {
                        if v < s {
                            return false;
                        }
                        v = img[v].unwrap();
                    }
                    true
                })
                .count();
            (arcs, cycles)
        })
        .collect()
}

fn c7() -> Outcome {
    for n in 1..=6 {
        let g = complete_looped(n).unwrap();
        for (arcs, cycles) in partial_perms(n) {
            let r = arcs.len();
            let c = arcs
                .iter()
                .fold(ArcConstraints::none(), |c, &(u, v)| c.require(u, v));
            let s =
                cycle_factor_stats(&g, &c, &EnumOptions::serial()).map_err(|e| e.to_string())?;
            let count = fact(n - r);
            let sum = &count * (harm(n - r) + q(cycles as i64, 1));
            ensure(int(&s.count) == count && int(&s.cycle_sum) == sum, || {
                format!(
                    "n={n} F={arcs:?}: ({}, {}) vs ({count}, {sum})",
                    s.count, s.cycle_sum
                )
            })?;
        }
    }
    Ok(())
}

fn c8() -> Outcome {
    let cases = [
        ("C6", EdgeConvention::EdgesAsTwoCycles, q(7, 3)),
        ("2K3", EdgeConvention::Strict, q(2, 1)),
        ("2K3", EdgeConvention::EdgesAsTwoCycles, q(2, 1)),
        ("K222", EdgeConvention::Strict, q(6, 5)),
        ("K5", EdgeConvention::Strict, q(1, 1)),
        ("6K5", EdgeConvention::Strict, q(6, 1)),
        ("5K222", EdgeConvention::Strict, q(6, 1)),
    ];
    for (name, conv, expected) in cases {
        let e = two_factor_stats(&undirected_family(name).unwrap(), conv)
            .and_then(|s| s.expectation())
            .map_err(|e| e.to_string())?;
        ensure(e == expected, || format!("{name} {conv:?}: {e}"))?;
    }
    Ok(())
}

fn permanent(m: &[Vec<bool>], row: usize, used: &mut [bool]) -> u64 {
    if row == m.len() {
        return 1;
    }
    let mut total = 0;
    for c in 0..m.len() {
        if m[row][c] && !used[c] {
            used[c] = true;
            total += permanent(m, row + 1, used);
            used[c] = false;
        }
    }
    total
}

fn c9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2_718_281);
    for i in 0..50 {
        let n = rng.random_range(1..=7);
        let p = rng.random_range(0.3..0.8);
        let arcs: Vec<_> = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|_| rng.random_bool(p))
            .collect();
        let g = DiGraph::from_arcs(n, arcs).unwrap();
        let count = stats(&g).count;
        let m = g.double_cover().biadjacency();
        let perm = permanent(&m, 0, &mut vec![false; n]);
        ensure(count == BigUint::from(perm), || {
            format!("graph {i}: {count} vs permanent {perm}")
        })?;
    }
    Ok(())
}

fn c10() -> Outcome {
    // The shipped defaults through the binary.
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("search.jsonl");
    let o = Command::new(env!("CARGO_BIN_EXE_cyclefactor"))
        .args([
            "search",
            "--n",
            "6",
            "--d",
            "3",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(o.status.success(), || {
        String::from_utf8_lossy(&o.stderr).into_owned()
    })?;
    let summary: serde_json::Value =
        serde_json::from_slice(&o.stdout).map_err(|e| e.to_string())?;
    let head = summary["head_excess"].as_str().unwrap_or("missing");
    let head = cyclefactor_core::exact::parse_ratio(head).map_err(|e| e.to_string())?;
    ensure(head >= q(1, 3), || format!("head excess {head}"))?;

    let config = SearchConfig::new(6, 3);
    let a = cyclefactor_core::run_search(&config).map_err(|e| e.to_string())?;
    let b = cyclefactor_core::run_search(&config).map_err(|e| e.to_string())?;
    ensure(a == b, || "search is not deterministic".into())?;
    ensure(a[0].certificate.excess >= q(1, 3), || {
        "library head below 1/3".into()
    })?;

    for (n, d) in [(4, 2), (6, 2)] {
        let mut worst = None;
        let board = run_search_with(&SearchConfig::new(n, d), |_, recs| {
            for r in recs {
                if r.certificate.excess > q(0, 1) && worst.is_none() {
                    worst = Some(r.certificate.graph.clone());
                }
            }
        })
        .map_err(|e| e.to_string())?;
        ensure(worst.is_none(), || {
            format!("positive excess at d=2: {worst:?}")
        })?;
        ensure(board[0].certificate.excess == q(0, 1), || {
            format!("({n},{d}) head {}", board[0].certificate.excess)
        })?;
    }
    Ok(())
}

#[test]
fn acceptance_criteria() {
    let with_d7 = std::env::var("CYCLEFACTOR_ACCEPT_D7").is_ok_and(|v| v == "1");
    let secs = Duration::from_secs;
    let mut gate = Gate {
        failures: Vec::new(),
    };
    gate.criterion(1, "G_6 reproduction", secs(1), c1);
    gate.criterion(2, "X_d cross-validation, d = 3..6", secs(5), || c2(3..=6));
    if with_d7 {
        gate.criterion(2, "X_d cross-validation, d = 7", secs(120), || c2(7..=7));
    }
    gate.criterion(3, "excess positivity and asymptotics", secs(1), c3);
    gate.criterion(4, "G_{k,d} padding", secs(10), c4);
    gate.criterion(5, "degree-two exhaustive suite, n <= 6", secs(60), c5);
    gate.criterion(6, "G_n classification, 4 <= n <= 12", secs(30), c6);
    gate.criterion(7, "partial-permutation oracle, n <= 6", secs(120), c7);
    gate.criterion(8, "undirected values", secs(10), c8);
    gate.criterion(9, "permanent oracle, 50 digraphs", secs(60), c9);
    gate.criterion(10, "search rediscovery", secs(120), c10);
    assert!(
        gate.failures.is_empty(),
        "failed criteria: {:#?}",
        gate.failures
    );
}
