//! Result rows, curve points and their CSV / JSON renderings.

use serde_json::{json, Map, Value};

pub const COLUMNS: &[&str] = &[
    "command", "K", "n", "epsilon", "metric", "value", "ci_lo", "ci_hi", "valid", "regime",
];

/// One line of the primary table.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub command: &'static str,
    pub k: Option<usize>,
    pub n: Option<u64>,
    pub epsilon: Option<f64>,
    pub metric: String,
    pub value: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub valid: Option<bool>,
    pub regime: Option<&'static str>,
}

impl Row {
    pub fn new(command: &'static str, metric: impl Into<String>, value: f64) -> Self {
        Row {
            command,
            k: None,
            n: None,
            epsilon: None,
            metric: metric.into(),
            value: Some(value),
            ci_lo: None,
            ci_hi: None,
            valid: None,
            regime: None,
        }
    }

    pub fn k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn n(mut self, n: u64) -> Self {
        self.n = Some(n);
        self
    }

    pub fn eps(mut self, eps: f64) -> Self {
        self.epsilon = Some(eps);
        self
    }

    pub fn ci(mut self, lo: f64, hi: f64) -> Self {
        self.ci_lo = Some(lo);
        self.ci_hi = Some(hi);
        self
    }

    pub fn valid(mut self, valid: bool) -> Self {
        self.valid = Some(valid);
        self
    }

    pub fn regime(mut self, regime: &'static str) -> Self {
        self.regime = Some(regime);
        self
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.command.to_string(),
            opt(self.k),
            opt(self.n),
            optf(self.epsilon),
            self.metric.clone(),
            optf(self.value),
            optf(self.ci_lo),
            optf(self.ci_hi),
            opt(self.valid),
            self.regime.unwrap_or("").to_string(),
        ]
    }

    fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "K": self.k,
            "n": self.n,
            "epsilon": jf(self.epsilon),
            "metric": self.metric,
            "value": jf(self.value),
            "ci_lo": jf(self.ci_lo),
            "ci_hi": jf(self.ci_hi),
            "valid": self.valid,
            "regime": self.regime,
        })
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        x.to_string()
    }
}

fn optf(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Non-finite numbers become strings, since JSON has no literal for them.
fn jf(v: Option<f64>) -> Value {
    match v {
        None => Value::Null,
        Some(x) if x.is_finite() => json!(x),
        Some(x) => Value::String(fmt_f64(x)),
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn rows_csv(rows: &[Row]) -> String {
    let mut out = COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.cells().iter().map(|c| csv_cell(c)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn rows_json(manifest: &[(String, String)], rows: &[Row]) -> String {
    let mut m = Map::new();
    for (k, v) in manifest {
        m.insert(k.clone(), Value::String(v.clone()));
    }
    let doc = json!({
        "manifest": Value::Object(m),
        "rows": rows.iter().map(Row::to_json).collect::<Vec<_>>(),
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("rows serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    pub series: String,
    pub value: f64,
}

/// Long-format `x,series,value`, sorted by `x` then series name.
pub fn emit_curves(mut points: Vec<CurvePoint>) -> String {
    points.sort_by(|a, b| a.x.total_cmp(&b.x).then_with(|| a.series.cmp(&b.series)));
    let mut out = String::from("x,series,value\n");
    for p in &points {
        out.push_str(&format!("{},{},{}\n", fmt_f64(p.x), csv_cell(&p.series), fmt_f64(p.value)));
    }
    out
}

pub fn manifest_text(manifest: &[(String, String)]) -> String {
    manifest.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}
