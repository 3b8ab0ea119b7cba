//! Serialization of command results: CSV tables and JSON documents with every
//! float written to 17 significant digits.

use std::f64::consts::LN_2;
use std::io;

use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

/// Keys holding information quantities (nats), converted by `--bits`.
const INFO_KEYS: &[&str] = &[
    "mi_rate",
    "source_entropy",
    "sigma_at_eps0",
    "theorem1_mi",
    "gap",
    "mi_mean",
    "mi_std",
    "h_s",
    "h_t",
    "h_s_given_y_mean",
    "h_s_given_y",
    "mi_per_symbol",
    "mi_via_outputs",
    "stderr",
    "mi_s",
    "mi_t_given_s",
    "mi_joint",
    "phi",
    "phi_conditional",
    "sum_rate",
    "conditional_rate",
    "user_rate",
    "mi_user_s",
    "mi_user_t",
    "rate",
    "gamma",
    "mi_main",
    "mi_tap",
    "value",
    "secrecy_capacity",
    "max_rate",
    "code_rate",
    "equivocation_bound",
];

/// Column-ordered rows for CSV output.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends the values of `record` under this table's columns.
    pub fn push(&mut self, record: &Value) {
        let row = self
            .columns
            .iter()
            .map(|c| record.get(c).cloned().unwrap_or(Value::Null))
            .collect();
        self.rows.push(row);
    }
}

/// A command's result in both output shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub json: Value,
    pub table: Table,
}

fn to_bits_value(v: &mut Value) {
    if let Some(x) = v.as_f64() {
        *v = Value::from(x / LN_2);
    }
}

fn to_bits(v: &mut Value) {
    match v {
        Value::Object(map) => {
            for (k, x) in map.iter_mut() {
                if INFO_KEYS.contains(&k.as_str()) && x.is_number() {
                    to_bits_value(x);
                } else {
                    to_bits(x);
                }
            }
        }
        Value::Array(xs) => xs.iter_mut().for_each(to_bits),
        _ => {}
    }
}

impl Output {
    /// Converts nats to bits in every information-valued field.
    pub fn in_bits(mut self) -> Self {
        to_bits(&mut self.json);
        if let Value::Object(map) = &mut self.json {
            map.insert("units".into(), Value::from("bits"));
        }
        for (i, c) in self.table.columns.iter().enumerate() {
            if INFO_KEYS.contains(&c.as_str()) {
                for row in &mut self.table.rows {
                    to_bits_value(&mut row[i]);
                }
            }
        }
        self
    }
}

/// Formats a float with 17 significant digits; non-finite values become
/// `inf`, `-inf` or `nan` in CSV (JSON has no form for them and gets `null`).
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        // adding zero turns -0 into +0
        format!("{:.16e}", x + 0.0)
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.to_string(),
            (_, Some(i)) => i.to_string(),
            _ => format_f64(n.as_f64().unwrap_or(f64::NAN)),
        },
        other => other.to_string(),
    }
}

pub fn write_csv(table: &Table) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(cell))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Pretty printer that writes floats with 17 significant digits.
struct Digits17<'a>(PrettyFormatter<'a>);

impl Formatter for Digits17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format!("{:.16e}", value + 0.0).as_bytes())
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn write_json(v: &Value) -> anyhow::Result<String> {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, Digits17(PrettyFormatter::new()));
    serde::Serialize::serialize(v, &mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf)?)
}
