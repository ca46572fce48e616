//! Tabular report rendering: CSV (RFC 4180 quoting) and JSON.

use serde_json::{Map, Value};

/// A rectangular table with named columns. All report exports go through
/// this so CSV and JSON stay consistent and byte-deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Table {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&csv_line(&self.columns));
        for row in &self.rows {
            out.push_str(&csv_line(row));
        }
        out
    }

    /// Array of objects keyed by column name, in column order.
    pub fn to_json_value(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (col, cell) in self.columns.iter().zip(row) {
                    obj.insert(col.clone(), Value::String(cell.clone()));
                }
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("table is valid json");
        s.push('\n');
        s
    }
}

fn csv_line(cells: &[String]) -> String {
    let mut line = String::new();
    for (i, cell) in cells.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        line.push_str(&csv_field(cell));
    }
    line.push('\n');
    line
}

/// RFC 4180 quoting: fields containing separators, quotes or line breaks are
/// wrapped in double quotes, with inner quotes doubled.
pub fn csv_field(cell: &str) -> String {
    if cell.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// Fixed-precision share/probability formatting used across reports.
pub fn fmt_share(x: f64) -> String {
    format!("{x:.6}")
}

/// Fixed-precision statistic formatting (z-scores, heights).
pub fn fmt_stat(x: f64) -> String {
    format!("{x:.4}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoting_follows_rfc4180() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
        assert_eq!(csv_field("two\nlines"), "\"two\nlines\"");
    }

    #[test]
    fn table_renders_csv_and_json() {
        let mut t = Table::new(&["rank", "text"]);
        t.push_row(vec!["1".into(), "hello, world".into()]);
        assert_eq!(t.to_csv(), "rank,text\n1,\"hello, world\"\n");
        let json: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(json[0]["text"], "hello, world");
    }
}
