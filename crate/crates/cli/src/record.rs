use std::collections::BTreeMap;

use invset::exactnum::{to_decimal, QuadExtElement, Rational};
use serde::Serialize;

pub const DECIMAL_DIGITS: usize = 30;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResultValue {
    pub exact: String,
    pub decimal: String,
}

/// One line of output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunRecord {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub results: BTreeMap<String, ResultValue>,
    pub flags: Vec<String>,
    pub seed: Option<String>,
    pub version: String,
}

impl RunRecord {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            results: BTreeMap::new(),
            flags: Vec::new(),
            seed: None,
            version: VERSION.to_string(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn rational(&mut self, key: &str, r: &Rational) -> &mut Self {
        self.results.insert(key.to_string(), ResultValue { exact: r.to_string(), decimal: to_decimal(r, DECIMAL_DIGITS) });
        self
    }

    pub fn quad(&mut self, key: &str, q: &QuadExtElement) -> &mut Self {
        self.results.insert(key.to_string(), ResultValue { exact: q.to_string(), decimal: q.to_decimal(DECIMAL_DIGITS) });
        self
    }

    /// A floating-point result; `exact` is the binary value of the double.
    pub fn float(&mut self, key: &str, x: f64) -> &mut Self {
        let r = Rational::from_float(x).expect("finite result");
        self.results.insert(key.to_string(), ResultValue { exact: r.to_string(), decimal: format!("{x:.17e}") });
        self
    }

    /// A non-numeric result (bit strings); `decimal` carries a readable form.
    pub fn text(&mut self, key: &str, exact: impl ToString, readable: impl ToString) -> &mut Self {
        self.results.insert(key.to_string(), ResultValue { exact: exact.to_string(), decimal: readable.to_string() });
        self
    }

    pub fn flag(&mut self, f: &str) -> &mut Self {
        self.flags.push(f.to_string());
        self
    }

    pub fn has_flag(&self, f: &str) -> bool {
        self.flags.iter().any(|x| x == f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Records,
    Csv,
}

pub fn render(records: &[RunRecord], format: Format) -> String {
    match format {
        Format::Records => records
            .iter()
            .map(|r| serde_json::to_string(r).expect("records serialise") + "\n")
            .collect(),
        Format::Csv => render_csv(records),
    }
}

fn render_csv(records: &[RunRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["record", "command", "seed", "version", "kind", "key", "exact", "decimal"]).expect("in-memory write");
    for (i, r) in records.iter().enumerate() {
        let idx = i.to_string();
        let seed = r.seed.clone().unwrap_or_default();
        let head = [idx.as_str(), r.command.as_str(), seed.as_str(), r.version.as_str()];
        for (k, v) in &r.parameters {
            w.write_record(head.iter().copied().chain(["parameter", k, v, ""])).expect("in-memory write");
        }
        for (k, v) in &r.results {
            w.write_record(head.iter().copied().chain(["result", k, &v.exact, &v.decimal])).expect("in-memory write");
        }
        for f in &r.flags {
            w.write_record(head.iter().copied().chain(["flag", f, "", ""])).expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use invset::exactnum::ratio;

    #[test]
    fn json_line_shape() {
        let mut r = RunRecord::new("niven classify");
        r.param("phi", "1/3 pi").rational("cos_phi", &ratio(1, 2)).flag("EXCEPTIONAL");
        let line = render(&[r], Format::Records);
        assert!(line.ends_with('\n'));
        assert_eq!(line.lines().count(), 1);
        assert!(line.contains(r#""cos_phi":{"exact":"1/2","decimal":"0.500000000000000000000000000000"}"#), "{line}");
        assert!(line.contains(r#""seed":null"#));
    }

    #[test]
    fn csv_rows() {
        let mut r = RunRecord::new("x");
        r.param("a", "1").rational("b", &ratio(-1, 4)).flag("F");
        r.seed = Some("00000000000000ff".into());
        let out = render(&[r], Format::Csv);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[2], "0,x,00000000000000ff,0.1.0,result,b,-1/4,-0.250000000000000000000000000000");
    }
}
