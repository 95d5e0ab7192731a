//! Field-by-field comparison of two reports.

use serde_json::{json, Map, Value};

use crate::json::{as_f64, num};
use crate::run::REPORT_FORMAT;

#[derive(Debug, Clone, PartialEq)]
pub enum CompareError {
    NotAReport(&'static str),
    KindMismatch { a: String, b: String },
}

impl std::fmt::Display for CompareError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CompareError::NotAReport(which) => write!(f, "report {which} is not a {REPORT_FORMAT} document"),
            CompareError::KindMismatch { a, b } => write!(f, "KIND_MISMATCH: report A is {a}, report B is {b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Leaf {
    /// Value with its uncertainty interval.
    Estimate { value: f64, lo: f64, hi: f64 },
    Number(f64),
    Other(Value),
}

fn leaf_value(l: &Leaf) -> Value {
    match l {
        Leaf::Estimate { value, lo, hi } => json!({ "value": num(*value), "interval": [num(*lo), num(*hi)] }),
        Leaf::Number(x) => num(*x),
        Leaf::Other(v) => v.clone(),
    }
}

fn as_estimate(m: &Map<String, Value>) -> Option<Leaf> {
    if m.len() != 2 {
        return None;
    }
    let value = as_f64(m.get("value")?)?;
    let iv = m.get("interval")?.as_array()?;
    if iv.len() != 2 {
        return None;
    }
    Some(Leaf::Estimate {
        value,
        lo: as_f64(&iv[0])?,
        hi: as_f64(&iv[1])?,
    })
}

fn flatten(v: &Value, path: String, out: &mut Vec<(String, Leaf)>) {
    match v {
        Value::Object(m) => {
            if let Some(e) = as_estimate(m) {
                out.push((path, e));
                return;
            }
            for (k, x) in m {
                flatten(x, format!("{path}.{k}"), out);
            }
        }
        Value::Number(_) => out.push((path, Leaf::Number(as_f64(v).unwrap_or(f64::NAN)))),
        _ => out.push((path, Leaf::Other(v.clone()))),
    }
}

fn results(report: &Value, which: &'static str) -> Result<(String, Vec<(String, Leaf)>), CompareError> {
    if report.get("format").and_then(Value::as_str) != Some(REPORT_FORMAT) {
        return Err(CompareError::NotAReport(which));
    }
    let kind = report
        .get("kind")
        .and_then(Value::as_str)
        .ok_or(CompareError::NotAReport(which))?
        .to_string();
    let res = report
        .get("results")
        .and_then(Value::as_object)
        .ok_or(CompareError::NotAReport(which))?;
    let mut out = Vec::new();
    for (section, body) in res {
        if let Some(values) = body.get("values") {
            flatten(values, section.clone(), &mut out);
        }
    }
    Ok((kind, out))
}

/// `(difference, significant)`; estimates differ significantly when their
/// intervals are disjoint, everything else when not equal.
fn judge(a: &Leaf, b: &Leaf) -> (Option<f64>, bool) {
    match (a, b) {
        (
            Leaf::Estimate { value: va, lo: la, hi: ha },
            Leaf::Estimate { value: vb, lo: lb, hi: hb },
        ) => {
            let same = va.to_bits() == vb.to_bits() && la.to_bits() == lb.to_bits() && ha.to_bits() == hb.to_bits();
            if same {
                return (None, false);
            }
            (Some(vb - va), ha < lb || hb < la || va.is_nan() != vb.is_nan())
        }
        (Leaf::Number(x), Leaf::Number(y)) => {
            if x.to_bits() == y.to_bits() {
                (None, false)
            } else {
                (Some(y - x), true)
            }
        }
        _ => (None, a != b),
    }
}

/// Compares the `results` of two reports path by path. Reports of different
/// kinds are refused unless `cross` is set, in which case only shared paths count.
pub fn compare(a: &Value, b: &Value, cross: bool) -> Result<Value, CompareError> {
    let (kind_a, la) = results(a, "A")?;
    let (kind_b, lb) = results(b, "B")?;
    if kind_a != kind_b && !cross {
        return Err(CompareError::KindMismatch { a: kind_a, b: kind_b });
    }
    let mb: std::collections::BTreeMap<&str, &Leaf> = lb.iter().map(|(p, l)| (p.as_str(), l)).collect();
    let ma: std::collections::BTreeMap<&str, &Leaf> = la.iter().map(|(p, l)| (p.as_str(), l)).collect();
    let mut differences = Vec::new();
    let mut significant = Vec::new();
    let mut compared = 0usize;
    for (path, leaf_a) in &la {
        let Some(leaf_b) = mb.get(path.as_str()) else {
            continue;
        };
        compared += 1;
        let (diff, sig) = judge(leaf_a, leaf_b);
        if diff.is_none() && !sig && leaf_a == *leaf_b {
            continue;
        }
        if sig {
            significant.push(Value::String(path.clone()));
        }
        differences.push(json!({
            "path": path,
            "a": leaf_value(leaf_a),
            "b": leaf_value(leaf_b),
            "difference": diff.map(num),
            "significant": sig,
        }));
    }
    let only = |x: &[(String, Leaf)], other: &std::collections::BTreeMap<&str, &Leaf>| -> Vec<String> {
        x.iter().filter(|(p, _)| !other.contains_key(p.as_str())).map(|(p, _)| p.clone()).collect()
    };
    Ok(json!({
        "kind_a": kind_a,
        "kind_b": kind_b,
        "compared": compared,
        "only_in_a": only(&la, &mb),
        "only_in_b": only(&lb, &ma),
        "differences": differences,
        "significant": significant,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(kind: &str, value: f64, lo: f64, hi: f64) -> Value {
        json!({
            "format": REPORT_FORMAT,
            "kind": kind,
            "results": { "spectral_dimension": { "op": "x", "params": {}, "values": {
                "dimension": { "value": num(value), "interval": [num(lo), num(hi)] },
                "count": 3,
            }}},
        })
    }

    #[test]
    fn overlapping_intervals_are_not_significant() {
        let d = compare(&report("GAP_TRIPLE", 0.63, 0.62, 0.64), &report("GAP_TRIPLE", 0.635, 0.63, 0.65), false).unwrap();
        assert_eq!(d["differences"].as_array().unwrap().len(), 1);
        assert!(d["significant"].as_array().unwrap().is_empty());
        let d = compare(&report("GAP_TRIPLE", 0.63, 0.62, 0.64), &report("GAP_TRIPLE", 0.7, 0.69, 0.71), false).unwrap();
        assert_eq!(d["significant"][0], "spectral_dimension.dimension");
    }

    #[test]
    fn kinds_must_match_unless_cross() {
        let a = report("GAP_TRIPLE", 0.63, 0.62, 0.64);
        let b = report("PAIR_TRIPLE", 0.63, 0.62, 0.64);
        assert!(matches!(compare(&a, &b, false), Err(CompareError::KindMismatch { .. })));
        let d = compare(&a, &b, true).unwrap();
        assert_eq!(d["compared"], 2);
        assert!(d["differences"].as_array().unwrap().is_empty());
    }
}
