use serde::Serialize;
use serde_json::{json, Value};

use thincond_core::dist::{TriMatrix, TruncatedPmf};
use thincond_core::pp::ConfigMeasure;

/// One named check against a declared tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Verdict {
    /// Passes when `value` does not exceed `tolerance`.
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }

    /// Passes when `value` strictly exceeds `tolerance` (e.g. p-values).
    pub fn at_least(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value > tolerance,
        }
    }
}

/// Machine-readable command report. The body is a pure function of the job,
/// so identical jobs render byte-identically apart from `wall_clock_ms`.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub inputs_digest: String,
    pub results: Value,
    pub residuals: Value,
    pub verdicts: Vec<Verdict>,
    pub wall_clock_ms: u64,
}

impl Report {
    pub fn new(command: &str, inputs: Value) -> Self {
        let digest = fnv1a64(format!("{command}\u{1f}{inputs}").as_bytes());
        Self {
            command: command.into(),
            inputs,
            inputs_digest: format!("{digest:016x}"),
            results: Value::Null,
            residuals: json!({}),
            verdicts: Vec::new(),
            wall_clock_ms: 0,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn render(&self, format: &str) -> Result<String, String> {
        match format {
            "json" => {
                let mut text = serde_json::to_string_pretty(self)
                    .map_err(|e| format!("serialization failed: {e}"))?;
                text.push('\n');
                Ok(text)
            }
            "csv" => Ok(self.render_csv()),
            other => Err(format!("unknown format `{other}` (json|csv)")),
        }
    }

    /// CSV rendering: one table per result section (header row, one entry
    /// per line), then the verdicts table.
    fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "command,inputs_digest\n{},{}\n",
            self.command, self.inputs_digest
        ));
        if let Value::Object(map) = &self.results {
            for (name, value) in map {
                csv_section(&mut out, name, value);
            }
        }
        if let Value::Object(map) = &self.residuals {
            if !map.is_empty() {
                out.push_str("\nresidual,value\n");
                for (name, value) in map {
                    out.push_str(&format!("{name},{}\n", csv_scalar(value)));
                }
            }
        }
        out.push_str("\nverdict,value,tolerance,pass\n");
        for v in &self.verdicts {
            out.push_str(&format!("{},{},{},{}\n", v.name, v.value, v.tolerance, v.pass));
        }
        out
    }
}

fn csv_scalar(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_section(out: &mut String, name: &str, value: &Value) {
    match value {
        Value::Object(map) if map.contains_key("entries") => {
            // Matrix DTO: row-major entries.
            let side = map
                .get("n_max")
                .and_then(Value::as_u64)
                .map(|n| n as usize + 1)
                .unwrap_or(0);
            out.push_str(&format!("\n{name}:row,col,value\n"));
            let entries = map.get("entries").and_then(Value::as_array);
            if let (Some(entries), 1..) = (entries, side) {
                for (i, entry) in entries.iter().enumerate() {
                    out.push_str(&format!(
                        "{},{},{}\n",
                        i / side,
                        i % side,
                        csv_scalar(entry)
                    ));
                }
            }
        }
        Value::Object(map) if map.contains_key("weights") => {
            out.push_str(&format!("\n{name}:n,weight\n"));
            if let Some(weights) = map.get("weights").and_then(Value::as_array) {
                for (n, w) in weights.iter().enumerate() {
                    out.push_str(&format!("{n},{}\n", csv_scalar(w)));
                }
            }
        }
        Value::Array(items)
            if items
                .iter()
                .all(|i| i.get("counts").is_some() && i.get("weight").is_some()) =>
        {
            out.push_str(&format!("\n{name}:counts,weight\n"));
            for item in items {
                let counts = item
                    .get("counts")
                    .and_then(Value::as_array)
                    .map(|c| {
                        c.iter()
                            .map(csv_scalar)
                            .collect::<Vec<_>>()
                            .join(";")
                    })
                    .unwrap_or_default();
                out.push_str(&format!(
                    "{counts},{}\n",
                    csv_scalar(item.get("weight").unwrap_or(&Value::Null))
                ));
            }
        }
        Value::Array(items) => {
            out.push_str(&format!("\n{name}:index,value\n"));
            for (i, item) in items.iter().enumerate() {
                out.push_str(&format!("{i},{}\n", csv_scalar(item)));
            }
        }
        scalar => {
            out.push_str(&format!("\n{name},{}\n", csv_scalar(scalar)));
        }
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Matrix DTO: row-major entries with window and orientation metadata.
pub fn matrix_value(m: &TriMatrix<f64>) -> Value {
    let entries: Vec<f64> = (0..m.side())
        .flat_map(|r| m.row(r).to_vec())
        .collect();
    json!({
        "n_max": m.n_max(),
        "orientation": match m.orientation() {
            thincond_core::dist::Orientation::Lower => "lower",
            thincond_core::dist::Orientation::Upper => "upper",
        },
        "row_defect": m.row_defect(),
        "entries": entries,
    })
}

pub fn pmf_value(pmf: &TruncatedPmf<f64>) -> Value {
    json!({
        "n_max": pmf.n_max(),
        "tail_bound": pmf.tail_bound(),
        "normalized": pmf.is_normalized(),
        "weights": pmf.weights().to_vec(),
    })
}

pub fn measure_value(measure: &ConfigMeasure<f64>) -> Value {
    serde_json::to_value(measure).expect("measure serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable_and_input_sensitive() {
        let a = Report::new("thin", json!({"dist": "poisson:lambda=2"}));
        let b = Report::new("thin", json!({"dist": "poisson:lambda=2"}));
        let c = Report::new("thin", json!({"dist": "poisson:lambda=3"}));
        assert_eq!(a.inputs_digest, b.inputs_digest);
        assert_ne!(a.inputs_digest, c.inputs_digest);
    }

    #[test]
    fn verdict_directions() {
        assert!(Verdict::at_most("r", 1e-12, 1e-11).pass);
        assert!(!Verdict::at_most("r", 1e-10, 1e-11).pass);
        assert!(Verdict::at_least("p", 0.3, 0.001).pass);
        assert!(!Verdict::at_least("p", 0.0005, 0.001).pass);
    }
}
