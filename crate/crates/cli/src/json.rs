//! Number formatting shared by reports and CSV series.

use serde_json::{json, Number, Value};

/// `x` with 17 significant digits, e.g. `6.3092975357145699e-1`.
pub fn fmt(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x == f64::INFINITY {
        "∞".into()
    } else if x == f64::NEG_INFINITY {
        "-∞".into()
    } else {
        format!("{x:.16e}")
    }
}

/// JSON number with 17 significant digits; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(fmt(x).parse::<Number>().expect("formatted float is valid JSON"))
    } else {
        Value::String(fmt(x))
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// Estimate with its uncertainty interval.
pub fn estimate(value: f64, lo: f64, hi: f64) -> Value {
    json!({ "value": num(value), "interval": [num(lo), num(hi)] })
}

/// Value known in closed form: a degenerate interval.
pub fn exact(value: f64) -> Value {
    estimate(value, value, value)
}

/// Inverse of [`num`].
pub fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => match s.as_str() {
            "NaN" => Some(f64::NAN),
            "∞" => Some(f64::INFINITY),
            "-∞" => Some(f64::NEG_INFINITY),
            _ => None,
        },
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [std::f64::consts::PI, 1.0 / 3.0, -2.5e-300, 0.0, 1e22] {
            let v = num(x);
            let s = serde_json::to_string(&v).unwrap();
            let digits = s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).count();
            assert_eq!(digits, 17, "{s}");
            assert_eq!(as_f64(&serde_json::from_str(&s).unwrap()), Some(x));
        }
        assert_eq!(num(f64::INFINITY), Value::String("∞".into()));
        assert!(as_f64(&num(f64::NAN)).unwrap().is_nan());
    }
}
