//! Deterministic JSON and CSV rendering of results.
//!
//! Floats are rounded to 12 significant digits; infinities become the strings
//! `"-inf"` / `"inf"` in JSON and empty cells (with a note) in CSV. Object
//! keys are sorted.

use std::io::Write;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::features::{CorrelationReport, FeatureTable, Quartiles, TrialOutcome};
use crate::flow::{FlowGraph, PrincipalSolutions, TropicalMagnitude, TropicalMatrix};
use crate::linalg::Matrix;
use crate::metric::{MagnitudePoint, WeightingResult};
use crate::Scalar;

pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("float round-trips")
}

/// Text form used in CSV cells and for non-finite JSON values.
pub fn format_number<T: Scalar>(x: T) -> String {
    let x = x.as_f64();
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        let r = round_sig(x);
        if r == r.trunc() && r.abs() < 1e15 {
            format!("{}", r as i64)
        } else {
            format!("{r}")
        }
    }
}

pub fn number<T: Scalar>(x: T) -> Value {
    let x = x.as_f64();
    if x.is_finite() {
        Value::from(round_sig(x))
    } else {
        Value::from(format_number(x))
    }
}

pub fn numbers<T: Scalar>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(|&x| number(x)).collect())
}

/// Exact integer: a JSON number when it fits in `u64`, else a decimal string.
pub fn big(n: &BigUint) -> Value {
    n.to_u64()
        .map_or_else(|| Value::from(n.to_string()), Value::from)
}

pub fn matrix<T: Scalar>(m: &Matrix<T>) -> Value {
    Value::Array((0..m.rows()).map(|i| numbers(m.row(i))).collect())
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn edge_json(f: &FlowGraph, e: (usize, usize)) -> Value {
    let (a, b) = f.edge_labels(e);
    json!([a, b])
}

pub fn tropical<T: Scalar>(
    f: &FlowGraph,
    z: &TropicalMatrix<T>,
    p: &PrincipalSolutions<T>,
    mag: TropicalMagnitude<T>,
) -> Value {
    let magnitude = match mag {
        TropicalMagnitude::Value(v) => number(v),
        TropicalMagnitude::Undefined { .. } => Value::from("undefined"),
    };
    let mut out = json!({
        "edges": z.edges.iter().map(|&e| edge_json(f, e)).collect::<Vec<_>>(),
        "Z": matrix(&z.m),
        "v_hat": numbers(&p.v_hat),
        "w_hat": numbers(&p.w_hat),
        "magnitude": magnitude,
    });
    if let TropicalMagnitude::Undefined { lhs, rhs } = mag {
        out["lhs"] = number(lhs);
        out["rhs"] = number(rhs);
    }
    out
}

pub fn weighting_result<T: Scalar>(w: &WeightingResult<T>) -> Value {
    json!({
        "w": numbers(&w.w),
        "residual": number(w.residual),
        "method": w.method.as_str(),
        "sum": number(w.magnitude),
    })
}

pub fn magnitude_points<T: Scalar>(points: &[MagnitudePoint<T>], with_weights: bool) -> Value {
    Value::Array(
        points
            .iter()
            .map(|p| {
                let mut o = json!({
                    "t": number(p.t),
                    "magnitude": number(p.magnitude()),
                    "method": p.weighting.method.as_str(),
                    "residual": number(p.weighting.residual),
                    "comagnitude": number(p.coweighting.magnitude),
                });
                if with_weights {
                    o["weighting"] = weighting_result(&p.weighting);
                    o["coweighting"] = weighting_result(&p.coweighting);
                }
                o
            })
            .collect(),
    )
}

/// Header `t,magnitude,method,residual`, then with `with_weights` one
/// `w[label]` and one `v[label]` column per vertex (weighting, coweighting),
/// and a trailing note column.
pub fn write_magnitude_csv<T: Scalar>(
    points: &[MagnitudePoint<T>],
    vertices: &[String],
    with_weights: bool,
    out: impl Write,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["t", "magnitude", "method", "residual"]
        .map(String::from)
        .into();
    if with_weights {
        header.extend(vertices.iter().map(|v| format!("w[{v}]")));
        header.extend(vertices.iter().map(|v| format!("v[{v}]")));
    }
    header.push("note".into());
    w.write_record(&header)?;
    for p in points {
        let mut notes = Vec::new();
        let mut cell = |name: &str, x: T| {
            if x.is_finite() {
                format_number(x)
            } else {
                notes.push(format!("{name}={}", format_number(x)));
                String::new()
            }
        };
        let mut row = vec![
            cell("t", p.t),
            cell("magnitude", p.magnitude()),
            p.weighting.method.as_str().to_string(),
            cell("residual", p.weighting.residual),
        ];
        if with_weights {
            for (v, &x) in vertices.iter().zip(&p.weighting.w) {
                row.push(cell(&format!("w[{v}]"), x));
            }
            for (v, &x) in vertices.iter().zip(&p.coweighting.w) {
                row.push(cell(&format!("v[{v}]"), x));
            }
        }
        row.push(notes.join(";"));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn feature_table_json<T: Scalar>(t: &FeatureTable<T>) -> Value {
    let columns: Map<String, Value> = t
        .columns
        .iter()
        .map(|(n, v)| (n.clone(), numbers(v)))
        .collect();
    let absent: Map<String, Value> = t
        .absent
        .iter()
        .map(|(n, why)| (n.clone(), Value::from(why.clone())))
        .collect();
    json!({
        "vertices": t.vertices,
        "columns": columns,
        "absent": absent,
        "meta": {
            "weighting_t": number(t.meta.weighting_t),
            "ball_t": number(t.meta.ball_t),
            "katz_alpha": t.meta.katz_alpha.map_or(Value::Null, number),
            "weighting_method": t.meta.weighting_method.as_str(),
            "coweighting_method": t.meta.coweighting_method.as_str(),
        },
    })
}

/// One row per vertex; header `vertex,<columns...>,note`. Non-finite values
/// are left empty and named in the note cell.
pub fn write_feature_table_csv<T: Scalar>(t: &FeatureTable<T>, out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["vertex".to_string()];
    header.extend(t.columns.iter().map(|(n, _)| n.clone()));
    header.push("note".into());
    w.write_record(&header)?;
    for (i, v) in t.vertices.iter().enumerate() {
        let mut row = vec![v.clone()];
        let mut notes = Vec::new();
        for (name, col) in &t.columns {
            let x = col[i];
            if x.is_finite() {
                row.push(format_number(x));
            } else {
                row.push(String::new());
                notes.push(format!("{name}={}", format_number(x)));
            }
        }
        row.push(notes.join(";"));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn quartiles_json(q: &Option<Quartiles>) -> Value {
    match q {
        None => Value::Null,
        Some(q) => json!({
            "min": number(q.min),
            "q1": number(q.q1),
            "median": number(q.median),
            "q3": number(q.q3),
            "max": number(q.max),
        }),
    }
}

pub fn correlation_json(r: &CorrelationReport) -> Value {
    let config = serde_json::to_value(&r.config).expect("config serializes");
    let trials: Vec<Value> = r
        .trials
        .iter()
        .map(|t| {
            let mut o = json!({
                "index": t.index,
                "seed": t.seed,
                "ambient_vertices": t.ambient_vertices,
                "shared_vertices": t.outcome.shared_vertices(),
            });
            match &t.outcome {
                TrialOutcome::Defined { coefficients, .. } => {
                    o["status"] = "defined".into();
                    let c: Map<String, Value> = r
                        .features
                        .iter()
                        .zip(coefficients)
                        .map(|(f, c)| (f.clone(), c.map_or(Value::Null, number)))
                        .collect();
                    o["coefficients"] = Value::Object(c);
                }
                TrialOutcome::Degenerate { .. } => o["status"] = "degenerate".into(),
            }
            o
        })
        .collect();
    let summary: Map<String, Value> = r
        .summary
        .iter()
        .map(|s| {
            let v = json!({
                "defined": s.defined,
                "undefined": s.undefined,
                "quartiles": quartiles_json(&s.quartiles),
            });
            (s.feature.clone(), v)
        })
        .collect();
    json!({
        "config": config,
        "features": r.features,
        "degenerate": r.degenerate,
        "trials": trials,
        "summary": summary,
    })
}

/// Long format `trial,feature,coefficient,note`; degenerate trials are
/// listed once with feature left empty.
pub fn write_correlation_csv(r: &CorrelationReport, out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trial", "feature", "coefficient", "note"])?;
    for t in &r.trials {
        let idx = t.index.to_string();
        match &t.outcome {
            TrialOutcome::Defined { coefficients, .. } => {
                for (f, c) in r.features.iter().zip(coefficients) {
                    match c {
                        Some(c) => w.write_record([idx.as_str(), f, &format_number(*c), ""])?,
                        None => w.write_record([idx.as_str(), f, "", "undefined"])?,
                    }
                }
            }
            TrialOutcome::Degenerate { shared_vertices } => {
                let note = format!("degenerate: {shared_vertices} shared vertices");
                w.write_record([idx.as_str(), "", "", &note])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{feature_table, FeatureConfig};
    use crate::graph::Digraph;
    use crate::spectral::EntropyValue;

    #[test]
    fn infinities_are_strings() {
        assert_eq!(number(f64::NEG_INFINITY), Value::from("-inf"));
        assert_eq!(number(f64::INFINITY), Value::from("inf"));
        let e = EntropyValue(f64::NEG_INFINITY);
        assert_eq!(number(e.value()), json!("-inf"));
    }

    #[test]
    fn twelve_digits() {
        assert_eq!(number(1.324_717_957_244_746f64), json!(1.32471795724));
        assert_eq!(number(0.1f64 + 0.2), json!(0.3));
        assert_eq!(format_number(3.0f64), "3");
        assert_eq!(format_number(-0.5f64), "-0.5");
        assert_eq!(to_json_string(&number(-0.0f64)), "0.0\n");
    }

    #[test]
    fn csv_header_first_and_deterministic() {
        let d = Digraph::from_edges(3, [(0, 1), (1, 0), (1, 2), (2, 0)]);
        let t = feature_table::<f64>(&d, &FeatureConfig::default());
        let render = || {
            let mut buf = Vec::new();
            write_feature_table_csv(&t, &mut buf).unwrap();
            String::from_utf8(buf).unwrap()
        };
        let a = render();
        assert_eq!(a, render());
        let first = a.lines().next().unwrap();
        assert!(first.starts_with("vertex,in-degree,out-degree,"));
        assert!(first.ends_with(",note"));
        assert_eq!(a.lines().count(), 4);
        assert_eq!(
            to_json_string(&feature_table_json(&t)),
            to_json_string(&feature_table_json(&t))
        );
    }
}
