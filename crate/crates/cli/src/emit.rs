// Copyright 2026 The mmrabi Authors
// SPDX-License-Identifier: Apache-2.0

//! Byte-reproducible artifacts: JSON with sorted keys and every float in
//! `{:.16e}` form, CSV with the same float format.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{CliError, CliResult};

/// Pretty JSON with floats at 17 significant digits.
struct FixedFloat<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloat<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{}", fmt_f64(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// `{:.16e}` for finite values; JSON has no spelling for the others.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "Infinity".into()
    } else {
        "-Infinity".into()
    }
}

/// Serializes through `serde_json::Value` (whose maps are sorted) and
/// prints floats at fixed precision. Non-finite floats become `null`.
pub fn to_json_string<T: Serialize>(value: &T) -> CliResult<String> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Io {
        path: "<json>".into(),
        source: io::Error::other(e),
    })?;
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, FixedFloat(PrettyFormatter::new()));
    v.serialize(&mut ser).map_err(|e| CliError::Io {
        path: "<json>".into(),
        source: io::Error::other(e),
    })?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// Column-oriented CSV builder.
#[derive(Debug, Clone, Default)]
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: vec![],
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Builds `t, col...` from a time grid and equally long series.
    pub fn from_series(times: &[f64], columns: &[(String, &[f64])]) -> Self {
        let mut header = vec!["t".to_string()];
        header.extend(columns.iter().map(|(n, _)| n.clone()));
        let mut csv = Csv::new(&header);
        for (k, t) in times.iter().enumerate() {
            let mut row = vec![fmt_f64(*t)];
            row.extend(
                columns
                    .iter()
                    .map(|(_, s)| s.get(k).map_or(String::new(), |x| fmt_f64(*x))),
            );
            csv.push(row);
        }
        csv
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Output directory plus a record of what was written.
#[derive(Debug)]
pub struct Sink {
    pub dir: PathBuf,
    pub quiet: bool,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path, quiet: bool) -> CliResult<Self> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            quiet,
            written: vec![],
        })
    }

    fn write(&mut self, name: &str, text: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if !self.quiet {
            eprintln!("wrote {}", path.display());
        }
        self.written.push(path);
        Ok(())
    }

    pub fn csv(&mut self, name: &str, csv: &Csv) -> CliResult<()> {
        self.write(&format!("{name}.csv"), &csv.render())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let text = to_json_string(value)?;
        self.write(&format!("{name}.json"), &text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn floats_have_seventeen_digits_and_keys_are_sorted() {
        let mut m = HashMap::new();
        m.insert("zeta", 0.1f64);
        m.insert("alpha", -2.5e-7);
        let s = to_json_string(&m).unwrap();
        let a = s.find("alpha").unwrap();
        let z = s.find("zeta").unwrap();
        assert!(a < z);
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("-2.4999999999999999e-7"), "{s}");
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["zeta"].as_f64(), Some(0.1));
    }

    #[test]
    fn integers_stay_integers() {
        let s = to_json_string(&serde_json::json!({"n": 3, "x": 3.0})).unwrap();
        assert!(s.contains("\"n\": 3,"));
        assert!(s.contains("3.0000000000000000e0"));
    }

    #[test]
    fn series_csv_layout() {
        let a = [1.0, 2.0];
        let csv = Csv::from_series(&[0.0, 0.5], &[("F".into(), &a)]);
        assert_eq!(
            csv.render(),
            "t,F\n0.0000000000000000e0,1.0000000000000000e0\n5.0000000000000000e-1,2.0000000000000000e0\n"
        );
    }
}
