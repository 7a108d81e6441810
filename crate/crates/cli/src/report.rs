//! Tabular reports rendered as CSV or JSON.

use std::io::Write;

use serde::{Deserialize, Serialize};

/// One table cell. Integers that may exceed 2^53 are carried as strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Bool(bool),
    Num(f64),
    Str(String),
}

impl Cell {
    pub fn int(v: impl ToString) -> Self {
        Cell::Str(v.to_string())
    }

    fn csv_text(&self) -> String {
        match self {
            Cell::Bool(b) => b.to_string(),
            Cell::Num(v) => format_real(*v),
            Cell::Str(s) => s.clone(),
        }
    }
}

/// Shortest decimal that round-trips to `v`.
pub fn format_real(v: f64) -> String {
    if v.is_finite() {
        serde_json::to_string(&v).expect("finite float")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    /// Decimal string, since `|d|` may exceed 2^53.
    pub d: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordering: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<String>,
    pub precision_bits: u32,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(d: i64, command: &str, precision_bits: u32, columns: &[&str]) -> Self {
        Report {
            schema_version: 1,
            d: d.to_string(),
            command: command.to_string(),
            ordering: None,
            bound: None,
            precision_bits,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_text))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        serde_json::to_writer(&mut out, self)?;
        out.write_all(b"\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new(-1, "weyl", 128, &["m", "abs_weyl_sum", "error_bound"]);
        r.ordering = Some("norm".into());
        r.push(vec![Cell::int(0), Cell::Num(1.0), Cell::Num(0.0)]);
        r.push(vec![Cell::int(1), Cell::Num(1.25e-17), Cell::Num(3.0e-15)]);
        r
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let mut buf = Vec::new();
        r.write_json(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(r#"{"schema_version":1,"d":"-1","command":"weyl""#));
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "m,abs_weyl_sum,error_bound\n0,1.0,0.0\n1,1.25e-17,3e-15\n"
        );
    }

    #[test]
    fn empty_table_is_header_only() {
        let mut buf = Vec::new();
        Report::new(2, "enumerate", 128, &["a", "b"])
            .write_csv(&mut buf)
            .unwrap();
        assert_eq!(buf, b"a,b\n");
    }

    #[test]
    fn quoting_follows_rfc_4180() {
        let mut r = Report::new(2, "selftest", 128, &["check", "detail"]);
        r.push(vec![Cell::Str("a, b".into()), Cell::Str("say \"hi\"".into())]);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "check,detail\n\"a, b\",\"say \"\"hi\"\"\"\n"
        );
    }
}
