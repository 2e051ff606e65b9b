//! Report assembly and rendering.

use clap::ValueEnum;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u64 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    #[default]
    Markdown,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }
}

/// One command's output. `result` is the machine-readable payload used for
/// JSON; `tables` and `notes` carry the same content for people and CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub title: String,
    pub parameters: Map<String, Value>,
    pub notes: Vec<String>,
    pub tables: Vec<Table>,
    pub result: Value,
}

impl Report {
    pub fn new(command: &str, title: impl Into<String>) -> Self {
        Self {
            command: command.to_string(),
            title: title.into(),
            parameters: Map::new(),
            notes: Vec::new(),
            tables: Vec::new(),
            result: Value::Null,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn table(&mut self, table: Table) -> &mut Self {
        self.tables.push(table);
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.render_json(),
            Format::Csv => self.render_csv(),
            Format::Markdown => self.render_markdown(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA_VERSION,
            "tool": "prefaxiom",
            "version": TOOL_VERSION,
            "command": self.command,
            "parameters": round_floats(Value::Object(self.parameters.clone())),
            "result": round_floats(self.result.clone()),
            "notes": self.notes,
        })
    }

    fn render_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        out.push('\n');
        out
    }

    fn render_markdown(&self) -> String {
        let mut out = format!("# {}\n\n", self.title);
        if !self.parameters.is_empty() {
            for (k, v) in &self.parameters {
                let shown = match v {
                    Value::String(s) => s.clone(),
                    Value::Array(items) => items
                        .iter()
                        .map(|i| i.as_str().map_or_else(|| i.to_string(), str::to_string))
                        .collect::<Vec<_>>()
                        .join(", "),
                    other => other.to_string(),
                };
                out.push_str(&format!("- {k}: {shown}\n"));
            }
            out.push('\n');
        }
        for note in &self.notes {
            out.push_str(note);
            out.push_str("\n\n");
        }
        for t in &self.tables {
            out.push_str(&format!("## {}\n\n", t.name));
            out.push_str(&format!("| {} |\n", t.header.join(" | ")));
            out.push_str(&format!("|{}\n", "---|".repeat(t.header.len())));
            for row in &t.rows {
                out.push_str(&format!("| {} |\n", row.join(" | ")));
            }
            out.push('\n');
        }
        out.push_str(&format!("_prefaxiom {TOOL_VERSION}_\n"));
        out
    }

    /// Every table as CSV rows prefixed by the table name.
    fn render_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .flexible(true)
            .from_writer(Vec::new());
        for t in &self.tables {
            let mut header = vec!["table".to_string()];
            header.extend(t.header.iter().cloned());
            w.write_record(&header).expect("in-memory write");
            for row in &t.rows {
                let mut rec = vec![t.name.clone()];
                rec.extend(row.iter().cloned());
                w.write_record(&rec).expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Text form of `x` at 12 significant digits.
pub fn fmt_float(x: f64) -> String {
    let r = round12(x);
    if r == 0.0 {
        return "0".to_string();
    }
    if r.is_finite() && !(1e-4..1e15).contains(&r.abs()) {
        return format!("{r:e}");
    }
    format!("{r}")
}

/// JSON number rounded to 12 significant digits (`null` when not finite).
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(round12(x))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// Every non-integer number in `v` rounded to 12 significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num(n.as_f64().expect("f64 number")),
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_floats(v))).collect())
        }
        other => other,
    }
}
