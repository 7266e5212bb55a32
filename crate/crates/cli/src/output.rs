use serde_json::Value;

/// Round to 12 significant digits; non-finite values pass through.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Round every number in a JSON tree to 12 significant digits.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(x) = n.as_f64().filter(|_| !n.is_i64() && !n.is_u64()) {
                if let Some(r) = serde_json::Number::from_f64(round12(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// One TSV cell: 12 significant digits, `nan` for missing values.
pub fn cell(x: Option<f64>) -> String {
    match x {
        Some(x) if x.is_finite() => round12(x).to_string(),
        Some(x) if x.is_infinite() => if x > 0.0 { "inf" } else { "-inf" }.to_string(),
        _ => "nan".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn twelve_digits() {
        assert_eq!(round12(0.538_370_123_456_789_1), 0.538370123457);
        assert_eq!(round12(1.0 / 3.0).to_string(), "0.333333333333");
        assert_eq!(round12(0.017825), 0.017825);
    }

    #[test]
    fn rounds_nested_but_not_integers() {
        let mut v = json!({"a": [2.0 / 3.0, 7], "b": {"c": 1e-20 / 3.0}});
        round_json(&mut v);
        assert_eq!(v, json!({"a": [0.666666666667, 7], "b": {"c": 3.33333333333e-21}}));
    }

    #[test]
    fn cells() {
        assert_eq!(cell(None), "nan");
        assert_eq!(cell(Some(f64::NAN)), "nan");
        assert_eq!(cell(Some(0.25)), "0.25");
    }
}
