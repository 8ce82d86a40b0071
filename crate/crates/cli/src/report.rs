//! Result records and their CSV / JSON forms.
//!
//! A report is one JSON object with `command`, `params`, `solutions[]` and
//! `checks{}`; the CSV form is the `solutions` table. Field order is the
//! insertion order, so identical runs give identical bytes.

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Floats(Vec<f64>),
    Empty,
}

/// CSV float text: 17 significant digits.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

fn float_value(v: f64) -> Value {
    Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

impl Cell {
    fn to_value(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Float(v) => float_value(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Floats(v) => Value::Array(v.iter().map(|&x| float_value(x)).collect()),
            Cell::Empty => Value::Null,
        }
    }

    fn from_value(v: &Value) -> Result<Self, ReportError> {
        Ok(match v {
            Value::Null => Cell::Empty,
            Value::Bool(b) => Cell::Bool(*b),
            Value::String(s) => Cell::Text(s.clone()),
            Value::Number(n) => match n.as_i64() {
                Some(i) => Cell::Int(i),
                None => Cell::Float(n.as_f64().ok_or_else(|| ReportError::Shape(format!("unrepresentable number {n}")))?),
            },
            Value::Array(items) => Cell::Floats(
                items
                    .iter()
                    .map(|x| match x {
                        Value::Null => Ok(f64::NAN),
                        Value::Number(n) => n.as_f64().ok_or_else(|| ReportError::Shape(format!("unrepresentable number {n}"))),
                        other => Err(ReportError::Shape(format!("array entries must be numbers, got {other}"))),
                    })
                    .collect::<Result<_, _>>()?,
            ),
            Value::Object(_) => return Err(ReportError::Shape("nested objects are not allowed in a record".into())),
        })
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Float(v) => Some(*v),
            _ => None,
        }
    }

    fn csv_text(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Floats(v) => v.iter().map(|&x| format_float(x)).collect::<Vec<_>>().join(";"),
            Cell::Empty => String::new(),
        }
    }
}

/// Ordered key/value record.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Record(pub Vec<(String, Cell)>);

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, cell: Cell) -> &mut Self {
        match self.0.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = cell,
            None => self.0.push((key.to_string(), cell)),
        }
        self
    }

    pub fn float(&mut self, key: &str, v: f64) -> &mut Self {
        self.set(key, Cell::Float(v))
    }

    pub fn int(&mut self, key: &str, v: i64) -> &mut Self {
        self.set(key, Cell::Int(v))
    }

    pub fn text(&mut self, key: &str, v: impl Into<String>) -> &mut Self {
        self.set(key, Cell::Text(v.into()))
    }

    pub fn bool(&mut self, key: &str, v: bool) -> &mut Self {
        self.set(key, Cell::Bool(v))
    }

    pub fn floats(&mut self, key: &str, v: Vec<f64>) -> &mut Self {
        self.set(key, Cell::Floats(v))
    }

    pub fn opt_float(&mut self, key: &str, v: Option<f64>) -> &mut Self {
        self.set(key, v.map_or(Cell::Empty, Cell::Float))
    }

    pub fn get(&self, key: &str) -> Option<&Cell> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, c)| c)
    }

    fn to_value(&self) -> Value {
        Value::Object(self.0.iter().map(|(k, c)| (k.clone(), c.to_value())).collect::<Map<_, _>>())
    }

    fn from_value(v: &Value, what: &str) -> Result<Self, ReportError> {
        let obj = v.as_object().ok_or_else(|| ReportError::Shape(format!("'{what}' must be an object")))?;
        obj.iter().map(|(k, v)| Ok((k.clone(), Cell::from_value(v)?))).collect::<Result<Vec<_>, _>>().map(Record)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReportError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("unexpected report shape: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub command: String,
    pub params: Record,
    pub solutions: Vec<Record>,
    pub checks: Record,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self { command: command.to_string(), ..Self::default() }
    }

    pub fn to_json(&self) -> String {
        let mut top = Map::new();
        top.insert("command".into(), Value::String(self.command.clone()));
        top.insert("params".into(), self.params.to_value());
        top.insert("solutions".into(), Value::Array(self.solutions.iter().map(Record::to_value).collect()));
        top.insert("checks".into(), self.checks.to_value());
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("in-memory JSON serialization");
        s.push('\n');
        s
    }

    /// Reads a report produced by [`Report::to_json`].
    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        let v: Value = serde_json::from_str(text).map_err(|e| ReportError::Json(e.to_string()))?;
        let obj = v.as_object().ok_or_else(|| ReportError::Shape("top level must be an object".into()))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "command" | "params" | "solutions" | "checks") {
                return Err(ReportError::Shape(format!("unknown top-level key '{key}'")));
            }
        }
        let field = |k: &str| obj.get(k).ok_or_else(|| ReportError::Shape(format!("missing '{k}'")));
        let command = field("command")?.as_str().ok_or_else(|| ReportError::Shape("'command' must be a string".into()))?;
        let solutions = field("solutions")?
            .as_array()
            .ok_or_else(|| ReportError::Shape("'solutions' must be an array".into()))?
            .iter()
            .map(|s| Record::from_value(s, "solutions[]"))
            .collect::<Result<_, _>>()?;
        Ok(Report {
            command: command.to_string(),
            params: Record::from_value(field("params")?, "params")?,
            solutions,
            checks: Record::from_value(field("checks")?, "checks")?,
        })
    }

    /// The `solutions` table; columns are the union of keys in first-seen order.
    /// An empty table still gets a header row.
    pub fn to_csv(&self) -> String {
        let mut columns: Vec<&str> = Vec::new();
        if self.solutions.is_empty() {
            columns.push("solutions");
        }
        for r in &self.solutions {
            for (k, _) in &r.0 {
                if !columns.contains(&k.as_str()) {
                    columns.push(k);
                }
            }
        }
        let rows = self.solutions.iter().map(|r| columns.iter().map(|c| r.get(c).map_or(String::new(), Cell::csv_text)).collect::<Vec<String>>());
        write_csv(&columns, rows)
    }
}

/// RFC 4180 text with a header row.
pub fn write_csv<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(header).expect("write to memory");
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>()).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv output is utf-8")
}
