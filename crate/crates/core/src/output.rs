//! Canonical JSON: object keys sorted, floats printed with 17 significant digits.

use serde_json::{json, Map, Value};

use crate::asymptotics::{AsymptoticReport, IdentityCheck, LowTemperatureCheck, So3Check};
use crate::minimizer::MinimizationResult;
use crate::quadrature::{IndexValue, LineIntegral};
use crate::special::EllipticParams;
use crate::theory::{Rational, TheorySpec, ValidationReport};

pub fn rational_str(r: &Rational) -> String {
    if r.denom() == &1.into() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_f64(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return "0.0".into();
    }
    format!("{x:.16e}")
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&fmt_f64(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) => {
            out.push('[');
            for (k, x) in a.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_value(x, out);
            }
            out.push(']');
        }
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push('{');
            for (k, key) in keys.into_iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(key.clone()).to_string());
                out.push(':');
                write_value(&m[key], out);
            }
            out.push('}');
        }
    }
}

/// Serialized form with sorted keys and fixed float formatting.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, &mut out);
    out
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|x| num(*x)).collect())
}

fn opt_rat(r: &Option<Rational>) -> Value {
    r.as_ref().map(|r| Value::String(rational_str(r))).unwrap_or(Value::Null)
}

fn params_json(p: &EllipticParams) -> Value {
    json!({"b": num(p.b), "beta": num(p.beta)})
}

pub fn validation_json(t: &TheorySpec, rep: &ValidationReport, traces: Option<(Rational, Rational)>) -> Value {
    let mut m = Map::new();
    m.insert("theory".into(), json!(t.name));
    m.insert("passed".into(), json!(rep.passed()));
    m.insert("failures".into(), json!(rep.messages()));
    if let Some((a, b)) = traces {
        m.insert("tr_r".into(), json!(rational_str(&a)));
        m.insert("tr_r3".into(), json!(rational_str(&b)));
    }
    Value::Object(m)
}

pub fn minimization_json(res: &MinimizationResult) -> Value {
    let l_min = match &res.l_min {
        Some(r) => Value::String(rational_str(r)),
        None => num(res.l_min_f64),
    };
    json!({
        "mode": res.mode.as_str(),
        "l_min": l_min,
        "l_min_float": num(res.l_min_f64),
        "dim_hqu": res.dim_hqu,
        "vertices": res.vertices.iter().map(|v| v.iter().map(rational_str).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "face_witnesses": res.face_witnesses,
    })
}

pub fn index_json(theory: &str, params: &EllipticParams, v: &IndexValue) -> Value {
    json!({
        "theory": theory,
        "value_re": num(v.value.re),
        "value_im": num(v.value.im),
        "log_re": num(v.log_value.re),
        "log_im": num(v.log_value.im),
        "est_error": num(v.estimated_error),
        "grid_n": v.grid_n,
        "params": params_json(params),
    })
}

pub fn report_json(r: &AsymptoticReport) -> Value {
    json!({
        "theory": r.theory,
        "b": num(r.b),
        "beta_ladder": nums(&r.beta_ladder),
        "tr_r": opt_rat(&r.tr_r),
        "tr_r3": opt_rat(&r.tr_r3),
        "l_min": opt_rat(&r.l_min),
        "l_min_float": num(r.l_min_f64),
        "dim_hqu": r.dim_hqu,
        "predicted_log": nums(&r.predicted_log),
        "measured_log": nums(&r.measured_log),
        "residuals": nums(&r.residuals),
        "quadrature_rel_error": nums(&r.quadrature_error),
        "differences": nums(&r.differences),
        "contraction": nums(&r.contraction),
    })
}

pub fn so3_json(c: &So3Check) -> Value {
    json!({
        "betas": nums(&c.betas),
        "measured_log": nums(&c.measured_log),
        "closed_form": nums(&c.closed_form),
        "residuals": nums(&c.residuals),
    })
}

pub fn identity_json(c: &IdentityCheck) -> Value {
    json!({
        "b": num(c.b),
        "beta": num(c.beta),
        "lhs_re": num(c.lhs.re),
        "lhs_im": num(c.lhs.im),
        "rhs_re": num(c.rhs.re),
        "rhs_im": num(c.rhs.im),
        "relative_error": num(c.relative_error),
        "passed": c.passed,
    })
}

pub fn low_temperature_json(c: &LowTemperatureCheck) -> Value {
    json!({
        "betas": nums(&c.betas),
        "value_re": nums(&c.values.iter().map(|v| v.re).collect::<Vec<_>>()),
        "value_im": nums(&c.values.iter().map(|v| v.im).collect::<Vec<_>>()),
        "distance_from_one": nums(&c.distance),
        "monotone": c.monotone,
        "passed": c.passed,
    })
}

pub fn line_integral_json(name: &str, b: f64, v: &LineIntegral) -> Value {
    json!({
        "name": name,
        "b": num(b),
        "value_re": num(v.value.re),
        "value_im": num(v.value.im),
        "tail_bound": num(v.tail_bound),
        "cutoff": num(v.cutoff),
        "panels": v.panels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_sorted_and_floats_fixed() {
        let v = json!({"b": 1.5, "a": [0.1, 2], "c": {"z": null, "y": "s"}});
        assert_eq!(canonical_json(&v), r#"{"a":[1.0000000000000001e-1,2],"b":1.5000000000000000e0,"c":{"y":"s","z":null}}"#);
    }

    #[test]
    fn canonical_output_parses_back() {
        let v = json!({"x": 0.1 + 0.2, "y": -3.0e-300});
        let back: Value = serde_json::from_str(&canonical_json(&v)).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1 + 0.2));
        assert_eq!(back["y"].as_f64(), Some(-3.0e-300));
    }

    #[test]
    fn rationals_print_reduced() {
        assert_eq!(rational_str(&crate::theory::rat(-4, 30)), "-2/15");
        assert_eq!(rational_str(&crate::theory::rat(6, 3)), "2");
    }
}
