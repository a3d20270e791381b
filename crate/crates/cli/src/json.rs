//! JSON views of engine results. Rationals are written as `"p/q"` strings
//! next to a `_decimal` float.

use std::io::{self, Write};

use cyclefactor_core::exact::{ratio_string, ratio_to_f64, Table1Row, XdClosedForm};
use cyclefactor_core::{FactorStats, Rational};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Map, Value};

pub fn put_ratio(obj: &mut Map<String, Value>, key: &str, r: &Rational) {
    obj.insert(key.into(), Value::String(ratio_string(r)));
    obj.insert(format!("{key}_decimal"), json!(ratio_to_f64(r)));
}

pub fn integer(r: &Rational) -> Value {
    Value::String(r.to_integer().to_string())
}

pub fn big(x: &BigUint) -> Value {
    Value::String(x.to_string())
}

pub fn stats(s: &FactorStats, histogram: bool, usage: bool) -> Value {
    let mut obj = Map::new();
    obj.insert("n".into(), json!(s.n));
    obj.insert("N".into(), big(&s.count));
    obj.insert("T".into(), big(&s.cycle_sum));
    if let Ok(e) = s.expectation() {
        put_ratio(&mut obj, "expectation", &e);
    }
    if let Ok(f) = s.expected_fixed_points() {
        put_ratio(&mut obj, "expected_fixed_points", &f);
    }
    if histogram {
        let h: Map<String, Value> = s
            .histogram
            .iter()
            .map(|(k, v)| (k.to_string(), big(v)))
            .collect();
        obj.insert("histogram".into(), Value::Object(h));
    }
    if let (true, Some(u)) = (usage, &s.edge_usage) {
        let count = cyclefactor_core::exact::biguint_to_rational(&s.count);
        let arcs: Vec<Value> = u
            .iter()
            .map(|(&(from, to), c)| {
                let mut a = Map::new();
                a.insert("from".into(), json!(from));
                a.insert("to".into(), json!(to));
                a.insert("count".into(), big(c));
                let p = cyclefactor_core::exact::biguint_to_rational(c) / &count;
                put_ratio(&mut a, "probability", &p);
                Value::Object(a)
            })
            .collect();
        obj.insert("edge_usage".into(), Value::Array(arcs));
    }
    Value::Object(obj)
}

pub fn table1_row(row: &Table1Row<Rational>) -> Value {
    let mut obj = Map::new();
    obj.insert("class".into(), json!(row.class));
    obj.insert("pattern".into(), json!(row.class.label()));
    obj.insert("count".into(), integer(&row.count));
    put_ratio(&mut obj, "mean", &row.mean);
    Value::Object(obj)
}

pub fn closed_form(c: &XdClosedForm<Rational>) -> Value {
    let mut obj = Map::new();
    obj.insert("d".into(), json!(c.d));
    obj.insert("N".into(), integer(&c.count));
    obj.insert("T".into(), integer(&c.cycle_sum));
    put_ratio(&mut obj, "expectation", &c.expectation);
    put_ratio(&mut obj, "benchmark", &c.benchmark);
    put_ratio(&mut obj, "excess", &c.excess);
    obj.insert("rows".into(), c.rows.iter().map(table1_row).collect());
    Value::Object(obj)
}

/// Writes one JSON document followed by a newline.
pub fn emit(value: &impl Serialize) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}
