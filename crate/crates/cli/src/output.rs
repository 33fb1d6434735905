use std::io::Write;

use serde_json::{json, Number, Value};

use pointpush::bounds::{round_sig, ORDER_SLACK};
use pointpush::Config;

use crate::commands::Document;
use crate::{Failure, Format, GlobalOpts};

/// Rounds every non-integer number to the display precision. Integers pass
/// through untouched so large exact entries survive.
fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_sig).and_then(Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(xs) => xs.iter_mut().for_each(round_floats),
        Value::Object(m) => m.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn envelope(doc: &Document, cfg: &Config) -> Value {
    let mut v = json!({
        "command": doc.command,
        "params": doc.params,
        "result": doc.result,
        "tolerances": {
            "spectral_tol": cfg.spectral_tol,
            "eps_unit": cfg.eps_unit,
            "order_slack": ORDER_SLACK,
            "product_budget": cfg.product_budget.to_string(),
            "length_cap": cfg.length_cap,
        },
        "timing": { "elapsed_seconds": doc.elapsed_seconds },
    });
    round_floats(&mut v);
    v
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Depth-first `(dotted.path, value)` listing of a JSON tree.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&join(k), x, out)),
        Value::Array(xs) if xs.iter().any(|x| x.is_object() || x.is_array()) => {
            xs.iter().enumerate().for_each(|(i, x)| flatten(&join(&i.to_string()), x, out))
        }
        Value::Array(xs) => out.push((prefix.to_string(), xs.iter().map(scalar).collect::<Vec<_>>().join(" "))),
        x => out.push((prefix.to_string(), scalar(x))),
    }
}

fn flat_result(result: &Value) -> Vec<(String, String)> {
    let mut rounded = result.clone();
    round_floats(&mut rounded);
    let mut out = Vec::new();
    flatten("", &rounded, &mut out);
    out
}

fn render(doc: &Document, g: &GlobalOpts, cfg: &Config) -> Result<String, Failure> {
    Ok(match g.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&envelope(doc, cfg)).map_err(|e| Failure::Other(e.into()))?;
            s.push('\n');
            s
        }
        Format::Csv => match &doc.csv {
            Some(c) => c.clone(),
            None => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["key", "value"]).map_err(|e| Failure::Other(e.into()))?;
                for (k, v) in flat_result(&doc.result) {
                    w.write_record([k, v]).map_err(|e| Failure::Other(e.into()))?;
                }
                let bytes = w.into_inner().map_err(|e| Failure::Other(anyhow::anyhow!(e.to_string())))?;
                String::from_utf8(bytes).map_err(|e| Failure::Other(e.into()))?
            }
        },
        Format::Text => {
            let body = match &doc.text {
                Some(t) => t.clone(),
                None => flat_result(&doc.result)
                    .into_iter()
                    .map(|(k, v)| format!("{k}: {v}"))
                    .collect::<Vec<_>>()
                    .join("\n"),
            };
            format!("{}\n", body.trim_end())
        }
    })
}

pub fn emit(doc: &Document, g: &GlobalOpts) -> Result<(), Failure> {
    let cfg = g.config()?;
    let s = render(doc, g, &cfg)?;
    match &g.output {
        Some(path) => std::fs::write(path, s)?,
        None => std::io::stdout().lock().write_all(s.as_bytes())?,
    }
    Ok(())
}
