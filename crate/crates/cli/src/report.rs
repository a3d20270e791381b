//! The full reproduction run behind `report`.

use std::time::Instant;

use cyclefactor_core::constructions::{build_gkd, looped_bidirected_cycle, undirected_family};
use cyclefactor_core::exact::{
    asymptotic_excess_probe, excess_closed_form, f_positivity, harmonic, ratio_string,
};
use cyclefactor_core::verify::{d2_theorem_suite, gn_classification_suite, xd_check, D2_DEFAULT_N};
use cyclefactor_core::{
    certify, cycle_factor_stats, two_factor_stats, ArcConstraints, EdgeConvention, EnumOptions,
    Rational, Result,
};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

struct Runner {
    checks: Vec<Check>,
}

impl Runner {
    fn check(
        &mut self,
        name: impl Into<String>,
        f: impl FnOnce() -> Result<(bool, String)>,
    ) -> Result<()> {
        let start = Instant::now();
        let (passed, detail) = f()?;
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        });
        Ok(())
    }
}

pub fn reproduce(with_d7: bool, opts: &EnumOptions) -> Result<Report> {
    let mut r = Runner { checks: Vec::new() };

    r.check("G_6 expected cycles", || {
        let c = certify(&looped_bidirected_cycle(6)?, 3, "G_6", opts)?;
        Ok((
            c.expectation == q(4, 1) && c.benchmark == q(11, 3),
            format!(
                "E c = {}, benchmark {}",
                ratio_string(&c.expectation),
                ratio_string(&c.benchmark)
            ),
        ))
    })?;

    let d_max = if with_d7 { 7 } else { 6 };
    for d in 3..=d_max {
        r.check(format!("X_{d} enumeration vs closed forms"), || {
            let c = xd_check(d, opts)?;
            let detail = match &c.mismatch {
                None => format!("N = {}, excess = {}", c.count, ratio_string(&c.excess)),
                Some(m) => m.clone(),
            };
            Ok((c.mismatch.is_none(), detail))
        })?;
    }

    r.check("closed-form excess at d = 3, 4", || {
        let e3 = excess_closed_form::<Rational>(3)?;
        let e4 = excess_closed_form::<Rational>(4)?;
        Ok((
            e3 == q(1, 3) && e4 == q(29, 114),
            format!("{}, {}", ratio_string(&e3), ratio_string(&e4)),
        ))
    })?;

    r.check("excess positive and d^2 excess near 6", || {
        let positive =
            (3..=500).all(|d| excess_closed_form::<Rational>(d).is_ok_and(|e| e > q(0, 1)));
        let probe = asymptotic_excess_probe::<f64>(500)?;
        Ok((
            positive && f_positivity(500) && probe > 5.8 && probe < 6.2,
            format!("d^2 excess at d = 500: {probe:.4}"),
        ))
    })?;

    for (k, d) in [(3, 3), (4, 3), (3, 4)] {
        r.check(format!("G_{{{k},{d}}} padding"), || {
            let c = certify(&build_gkd(k, d)?, d, "", opts)?;
            let h = harmonic::<Rational>(d);
            let predicted =
                &h * Rational::from_integer(k.into()) + excess_closed_form::<Rational>(d)?;
            Ok((
                c.expectation == predicted && c.excess > q(0, 1),
                format!("E c = {}", ratio_string(&c.expectation)),
            ))
        })?;
    }

    let undirected = [
        ("C6", EdgeConvention::EdgesAsTwoCycles, q(7, 3)),
        ("2K3", EdgeConvention::Strict, q(2, 1)),
        ("K222", EdgeConvention::Strict, q(6, 5)),
        ("K5", EdgeConvention::Strict, q(1, 1)),
        ("6K5", EdgeConvention::Strict, q(6, 1)),
        ("5K222", EdgeConvention::Strict, q(6, 1)),
    ];
    for (name, conv, expected) in undirected {
        r.check(format!("undirected {name} ({conv:?})"), || {
            let e = two_factor_stats(&undirected_family(name)?, conv)?.expectation()?;
            Ok((e == expected, ratio_string(&e)))
        })?;
    }

    r.check("degree-two suite", || {
        let s = d2_theorem_suite(D2_DEFAULT_N)?;
        let graphs: usize = s.orders.iter().map(|o| o.graphs).sum();
        Ok((
            s.passed,
            format!("{graphs} graphs, {} violators", s.violators.len()),
        ))
    })?;

    r.check("G_n classification, 4 <= n <= 12", || {
        let s = gn_classification_suite(4, 12)?;
        Ok((s.passed, format!("{} orders", s.checks.len())))
    })?;

    r.check("G_6 histogram", || {
        let s = cycle_factor_stats(&looped_bidirected_cycle(6)?, &ArcConstraints::none(), opts)?;
        let hist: Vec<String> = s
            .histogram
            .iter()
            .map(|(k, v)| format!("{k}:{v}"))
            .collect();
        let detail = hist.join(" ");
        Ok((detail == "1:2 3:2 4:9 5:6 6:1", detail))
    })?;

    let passed = r.checks.iter().all(|c| c.passed);
    Ok(Report {
        checks: r.checks,
        passed,
    })
}
