use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::Context;
use cyclefactor_core::constructions::{
    build_gkd, build_xd, complete_looped, looped_bidirected_cycle, undirected_family,
    undirected_three_block_splice,
};
use cyclefactor_core::enumerate::classify_crossing_patterns;
use cyclefactor_core::exact::{
    count_polynomial, excess_closed_form, f_poly, f_prime, ratio_string, xd_closed_form,
};
use cyclefactor_core::search::run_search_with;
use cyclefactor_core::verify::{
    d2_theorem_suite, gn_classification_suite, regular_max_scan, xd_cross_validation, D2_DEFAULT_N,
};
use cyclefactor_core::{
    certify, cycle_factor_stats, two_factor_stats, ArcConstraints, DiGraph, EdgeConvention,
    EnumOptions, Error, Rational, SearchConfig, UGraph,
};
use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::json::{self, emit, put_ratio};
use crate::{report, Cli, Command, Convention, Family, Suite};

fn need<T>(value: Option<T>, flag: &str) -> Result<T, Error> {
    value.ok_or_else(|| Error::InvalidParameter(format!("this family needs {flag}")))
}

fn read_graph(path: &Path) -> anyhow::Result<DiGraph> {
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
    }
    Ok(DiGraph::from_text(&text)?)
}

fn status(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

pub fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    let opts = EnumOptions::default();
    let table = cli.table;
    match cli.command {
        Command::Gen {
            family,
            n,
            d,
            k,
            m,
            name,
            json,
            out,
        } => {
            let g = match family {
                Family::Complete => complete_looped(need(d, "--d")?)?,
                Family::Gn => looped_bidirected_cycle(need(n, "--n")?)?,
                Family::Xd => build_xd(need(d, "--d")?)?.0,
                Family::Gkd => build_gkd(need(k, "--k")?, need(d, "--d")?)?,
                Family::Undirected => {
                    undirected_family(&need(name, "--name")?)?.to_symmetric_digraph()
                }
                Family::Splice => {
                    undirected_three_block_splice(need(m, "--m")?)?.to_symmetric_digraph()
                }
            };
            let text = if json {
                let v = json!({
                    "n": g.n(),
                    "d": g.regular_degree(),
                    "arcs": g.arc_count(),
                    "fingerprint": g.fingerprint(),
                    "graph": g.to_text(),
                });
                serde_json::to_string_pretty(&v)? + "\n"
            } else {
                g.to_text()
            };
            match out {
                Some(path) => std::fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => io::stdout().write_all(text.as_bytes())?,
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Expect {
            graph,
            edge_usage,
            histogram,
            undirected,
            convention,
        } => {
            let g = read_graph(&graph)?;
            let stats = if undirected {
                let conv = match convention {
                    Convention::Strict => EdgeConvention::Strict,
                    Convention::EdgesAsTwoCycles => EdgeConvention::EdgesAsTwoCycles,
                };
                two_factor_stats(&UGraph::from_symmetric_digraph(&g)?, conv)?
            } else {
                let o = if edge_usage {
                    opts.with_edge_usage()
                } else {
                    opts
                };
                cycle_factor_stats(&g, &ArcConstraints::none(), &o)?
            };
            let expectation = stats.expectation()?;
            if table {
                println!("vertices      {}", stats.n);
                println!("factors (N)   {}", stats.count);
                println!("cycle sum (T) {}", stats.cycle_sum);
                println!("E c           {}", ratio_string(&expectation));
                if histogram {
                    println!("\ncycles  factors");
                    for (k, c) in &stats.histogram {
                        println!("{k:>6}  {c}");
                    }
                }
            } else {
                let mut v = json::stats(&stats, histogram, edge_usage && !undirected);
                v["undirected"] = json!(undirected);
                emit(&v)?;
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Verify {
            graph,
            d,
            provenance,
        } => {
            let g = read_graph(&graph)?;
            let cert = certify(&g, d, &provenance, &opts)?;
            if table {
                println!("E c        {}", ratio_string(&cert.expectation));
                println!("benchmark  {}", ratio_string(&cert.benchmark));
                println!("excess     {}", ratio_string(&cert.excess));
                println!("verdict    {}", cert.verdict.label());
            } else {
                emit(&cert)?;
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Formula { d } => {
            let exact = xd_closed_form::<Rational>(d)?;
            let float = excess_closed_form::<f64>(d)?;
            if table {
                println!("N          {}", exact.count);
                println!("T          {}", exact.cycle_sum);
                println!("E c        {}", ratio_string(&exact.expectation));
                println!("2 H_d      {}", ratio_string(&exact.benchmark));
                println!("excess     {} ({float:.6e})", ratio_string(&exact.excess));
            } else {
                let mut v = json::closed_form(&exact);
                v["count_polynomial"] = json!(count_polynomial::<BigInt>(d).to_string());
                v["f"] = json!(f_poly::<BigInt>(d).to_string());
                v["f_prime"] = json!(f_prime::<BigInt>(d).to_string());
                v["excess_f64"] = json!(float);
                emit(&v)?;
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Table1 { d, enumerate } => {
            let exact = xd_closed_form::<Rational>(d)?;
            let measured = if enumerate {
                Some(classify_crossing_patterns(d, &opts)?)
            } else {
                None
            };
            let matches = measured.as_ref().map(|rows| {
                rows.iter().zip(&exact.rows).all(|(m, f)| {
                    Rational::from_integer(m.count.clone().into()) == f.count && m.mean == f.mean
                })
            });
            if table {
                println!("{:<12} {:>24} {:>20}", "pattern", "count", "mean");
                for row in &exact.rows {
                    println!(
                        "{:<12} {:>24} {:>20}",
                        row.class.label(),
                        row.count.to_integer(),
                        ratio_string(&row.mean)
                    );
                }
                if let Some(ok) = matches {
                    println!("\nenumeration agrees: {ok}");
                }
            } else {
                let mut v = json!({
                    "d": d,
                    "rows": exact.rows.iter().map(json::table1_row).collect::<Vec<_>>(),
                });
                if let Some(rows) = &measured {
                    v["measured"] = serde_json::to_value(rows)?;
                    v["match"] = json!(matches);
                }
                emit(&v)?;
            }
            Ok(status(matches.unwrap_or(true)))
        }

        Command::Suite {
            name,
            n_max,
            d_max,
            n,
            d,
        } => match name {
            Suite::D2 => {
                let r = d2_theorem_suite(n_max.unwrap_or(D2_DEFAULT_N))?;
                emit(&r)?;
                Ok(status(r.passed))
            }
            Suite::XdCross => {
                let r = xd_cross_validation(d_max.unwrap_or(6), &opts)?;
                emit(&r)?;
                Ok(status(r.passed))
            }
            Suite::GnClass => {
                let r = gn_classification_suite(4, n_max.unwrap_or(12))?;
                emit(&r)?;
                Ok(status(r.passed))
            }
            Suite::MaxScan => {
                let r = regular_max_scan(n.unwrap_or(6), d.unwrap_or(3))?;
                emit(&r)?;
                Ok(ExitCode::SUCCESS)
            }
        },

        Command::Search {
            n,
            d,
            seed,
            pop,
            iters,
            moves,
            restart_after,
            leaderboard,
            out,
        } => {
            let config = SearchConfig {
                n,
                d,
                seed,
                population: pop,
                iterations: iters,
                moves_per_step: moves,
                restart_after,
                leaderboard,
            };
            config.validate()?;
            let mut sink: Box<dyn Write> = match &out {
                Some(path) => Box::new(BufWriter::new(
                    File::create(path).with_context(|| format!("creating {}", path.display()))?,
                )),
                None => Box::new(io::stdout().lock()),
            };
            let mut write_error = None;
            let board = run_search_with(&config, |_, records| {
                if write_error.is_some() {
                    return;
                }
                let res = records
                    .iter()
                    .try_for_each(|r| {
                        serde_json::to_writer(&mut sink, r)?;
                        writeln!(sink).map_err(serde_json::Error::io)
                    })
                    .and_then(|_| sink.flush().map_err(serde_json::Error::io));
                if let Err(e) = res {
                    write_error = Some(e);
                }
            })?;
            if let Some(e) = write_error {
                return Err(e.into());
            }
            drop(sink);
            if out.is_some() {
                let mut summary = Map::new();
                summary.insert("config".into(), serde_json::to_value(&config)?);
                summary.insert("records".into(), json!(board.len()));
                if let Some(head) = board.first() {
                    put_ratio(&mut summary, "head_excess", &head.certificate.excess);
                }
                summary.insert("leaderboard".into(), serde_json::to_value(&board)?);
                emit(&Value::Object(summary))?;
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Report { paper: _, with_d7 } => {
            let r = report::reproduce(with_d7, &opts)?;
            if table {
                for c in &r.checks {
                    println!(
                        "{} {:<40} {}",
                        if c.passed { "PASS" } else { "FAIL" },
                        c.name,
                        c.detail
                    );
                }
                println!(
                    "\n{}",
                    if r.passed {
                        "all checks passed"
                    } else {
                        "some checks FAILED"
                    }
                );
            } else {
                emit(&r)?;
            }
            Ok(status(r.passed))
        }
    }
}
