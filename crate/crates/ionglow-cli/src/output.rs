//! Deterministic text emission. Floats are printed with 13 significant
//! digits so emitted tables re-parse to the in-memory values.

use serde::Serialize;

pub fn float(x: f64) -> String {
    format!("{x:.12e}")
}

pub fn csv_line(fields: &[String]) -> String {
    let mut line = fields.join(",");
    line.push('\n');
    line
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report");
    text.push('\n');
    text
}
