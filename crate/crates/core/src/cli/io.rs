//! File formats: coefficient lists, two-column sample files, and the
//! CSV/JSON table encodings.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use super::CliError;

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_number(token: &str, path: &Path, line: usize) -> Result<f64, CliError> {
    let v: f64 = token.parse().map_err(|_| {
        CliError::Input(format!("{}:{line}: cannot parse {token:?} as a number", path.display()))
    })?;
    if !v.is_finite() {
        return Err(CliError::Input(format!("{}:{line}: non-finite value {token}", path.display())));
    }
    Ok(v)
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Coefficients separated by commas, whitespace or newlines, index implicit
/// from 0. Lines starting with `#` are comments.
pub fn parse_coefficients(text: &str, path: &Path) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        for token in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            out.push(parse_number(token, path, i + 1)?);
        }
    }
    if out.is_empty() {
        return Err(CliError::Input(format!("{}: no coefficients found", path.display())));
    }
    Ok(out)
}

/// Two columns `node, value` separated by a comma or whitespace; an optional
/// non-numeric header line and `#` comments are skipped.
pub fn parse_samples(text: &str, path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let (mut nodes, mut values) = (Vec::new(), Vec::new());
    let mut first = true;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        let header = first && fields.iter().any(|f| f.parse::<f64>().is_err());
        first = false;
        if header {
            continue;
        }
        if fields.len() != 2 {
            return Err(CliError::Input(format!(
                "{}:{}: expected two columns (node, value), found {}",
                path.display(),
                i + 1,
                fields.len()
            )));
        }
        nodes.push(parse_number(fields[0], path, i + 1)?);
        values.push(parse_number(fields[1], path, i + 1)?);
    }
    if nodes.is_empty() {
        return Err(CliError::Input(format!("{}: no samples found", path.display())));
    }
    Ok((nodes, values))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A rectangular grid: the rows are the Cartesian product of the axes with
/// the last axis varying fastest, each row carrying one value per field.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub axes: Vec<(String, Vec<f64>)>,
    pub fields: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub meta: Map<String, Value>,
}

impl Table {
    pub fn new(axes: Vec<(String, Vec<f64>)>, fields: &[&str]) -> Self {
        Self {
            axes,
            fields: fields.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            meta: Map::new(),
        }
    }

    /// Axis coordinates of row `index`.
    fn coordinates(&self, mut index: usize) -> Vec<f64> {
        let mut coords = vec![0.0; self.axes.len()];
        for (k, (_, axis)) in self.axes.iter().enumerate().rev() {
            coords[k] = axis[index % axis.len()];
            index /= axis.len();
        }
        coords
    }

    pub fn to_csv(&self) -> String {
        let mut header: Vec<&str> = self.axes.iter().map(|(n, _)| n.as_str()).collect();
        header.extend(self.fields.iter().map(String::as_str));
        let mut out = header.join(",");
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            let cells: Vec<String> = self.coordinates(i).into_iter().chain(row.iter().copied()).map(fmt_f64).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let axes: Map<String, Value> = self
            .axes
            .iter()
            .map(|(n, a)| (n.clone(), json!(a.iter().map(|&v| exact(v)).collect::<Vec<_>>())))
            .collect();
        let values: Vec<Value> = if self.fields.len() == 1 {
            self.rows.iter().map(|r| exact(r[0])).collect()
        } else {
            self.rows
                .iter()
                .map(|r| Value::Array(r.iter().map(|&v| exact(v)).collect()))
                .collect()
        };
        let mut meta = self.meta.clone();
        meta.insert(
            "axis_order".into(),
            json!(self.axes.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>()),
        );
        meta.insert("fields".into(), json!(self.fields));
        meta.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        let mut text = serde_json::to_string_pretty(&json!({ "axes": axes, "values": values, "meta": meta }))
            .expect("tables serialize");
        text.push('\n');
        text
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

fn exact(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

/// Coefficients: one per line for CSV, a table over `n` for JSON.
pub fn render_coefficients(coeffs: &[f64], format: Format, meta: Map<String, Value>) -> String {
    match format {
        Format::Csv => coeffs.iter().map(|&c| fmt_f64(c) + "\n").collect(),
        Format::Json => {
            let mut t = Table::new(vec![("n".into(), (0..coeffs.len()).map(|n| n as f64).collect())], &["value"]);
            t.rows = coeffs.iter().map(|&c| vec![c]).collect();
            t.meta = meta;
            t.to_json()
        }
    }
}

pub fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_lists() {
        let p = Path::new("in.txt");
        assert_eq!(parse_coefficients("0,1", p).unwrap(), vec![0.0, 1.0]);
        assert_eq!(parse_coefficients("# c\n0\n 1.5 \n\n-2e-3", p).unwrap(), vec![0.0, 1.5, -2e-3]);
        assert!(parse_coefficients("", p).is_err());
        assert!(parse_coefficients("1, x", p).is_err());
        assert!(parse_coefficients("1, NaN", p).is_err());
    }

    #[test]
    fn sample_files() {
        let p = Path::new("in.csv");
        let (n, v) = parse_samples("phi,value\n0.1,2\n0.2 3\n", p).unwrap();
        assert_eq!((n, v), (vec![0.1, 0.2], vec![2.0, 3.0]));
        assert!(parse_samples("0.1,2,3\n", p).is_err());
        assert!(parse_samples("phi,value\n", p).is_err());
    }

    #[test]
    fn row_major_layout_and_round_trip() {
        let mut t = Table::new(vec![("x".into(), vec![0.0, 1.0]), ("y".into(), vec![5.0, 6.0, 7.0])], &["value"]);
        t.rows = (0..6).map(|i| vec![i as f64 / 3.0]).collect();
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,y,value");
        assert_eq!(lines.len(), 7);
        assert!(lines[2].starts_with(&format!("{},{}", fmt_f64(0.0), fmt_f64(6.0))));
        let json: Value = serde_json::from_str(&t.to_json()).unwrap();
        for (i, line) in lines[1..].iter().enumerate() {
            let last: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            assert_eq!(json["values"][i].as_f64().unwrap(), last);
        }
        assert_eq!(json["meta"]["axis_order"], json!(["x", "y"]));
    }
}
