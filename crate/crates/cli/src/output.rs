//! Column tables and their CSV / JSON encodings.

use std::io::Write;
use std::path::Path;

use qrabi_core::ModelParams;
use serde_json::{json, Map, Value as Json};

use crate::config::Format;
use crate::error::{CliError, Result};

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub params: ModelParams,
    pub n_tr: usize,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str], params: ModelParams, n_tr: usize) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            params,
            n_tr,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(format_cell).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Json {
        let mut data = Map::new();
        for (i, c) in self.columns.iter().enumerate() {
            let col: Vec<Json> = self.rows.iter().map(|r| cell_json(&r[i])).collect();
            data.insert(c.clone(), Json::Array(col));
        }
        json!({
            "metadata": {
                "name": self.name,
                "params": {
                    "delta": self.params.delta(),
                    "g1": self.params.g1(),
                    "g2": self.params.g2(),
                    "epsilon": self.params.epsilon(),
                },
                "n_tr": self.n_tr,
                "version": env!("CARGO_PKG_VERSION"),
            },
            "columns": self.columns,
            "data": data,
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("tables serialize");
                s.push('\n');
                s
            }
        }
    }

    pub fn write_to(&self, path: &Path, format: Format) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        let mut f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        f.write_all(self.render(format).as_bytes()).map_err(|e| CliError::io(path, e))
    }
}

/// `%.12g`-style: 12 significant digits, trailing zeros dropped, exponent
/// form outside `[1e-5, 1e12)`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn format_cell(c: &Cell) -> String {
    match c {
        Cell::Num(x) => format_number(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Text(t) => t.clone(),
    }
}

/// Numbers carry the same 12 digits as the CSV form.
fn cell_json(c: &Cell) -> Json {
    match c {
        Cell::Num(x) => format_number(*x).parse::<f64>().ok().filter(|v| v.is_finite()).map_or(Json::Null, Json::from),
        Cell::Int(i) => Json::from(*i),
        Cell::Text(t) => Json::from(t.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.1 + 0.2), "0.3");
        assert_eq!(format_number(-0.5), "-0.5");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(std::f64::consts::PI), "3.14159265359");
        assert_eq!(format_number(1.5e-7), "1.5e-7");
        assert_eq!(format_number(2.5e13), "2.5e13");
        assert_eq!(format_number(123456.7890123456), "123456.789012");
        assert_eq!(format_number(0.000123456789012345), "0.000123456789012");
        assert_eq!(format_number(999999999999.6), "1e12");
        assert_eq!(format_number(f64::NAN), "nan");
    }

    #[test]
    fn csv_layout() {
        let p = ModelParams::new(1.0, 0.0, 0.0).unwrap();
        let mut t = Table::new("x", &["g1", "level_index", "method", "energy"], p, 60);
        t.push(vec![Cell::Num(0.0), Cell::Int(0), Cell::Text("fock".into()), Cell::Num(-0.5)]);
        assert_eq!(t.to_csv(), "g1,level_index,method,energy\n0,0,fock,-0.5\n");
        let j = t.to_json();
        assert_eq!(j["metadata"]["n_tr"], 60);
        assert_eq!(j["data"]["energy"][0], -0.5);
        assert_eq!(j["data"]["method"][0], "fock");
    }
}
