//! Report serialization: pretty JSON, or a flat `path,value` CSV projection.

use std::io::Write;
use std::path::PathBuf;

use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Where and how a report is written.
pub struct Sink {
    path: Option<PathBuf>,
    format: Format,
}

impl Sink {
    /// `--out json|csv` picks the format on stdout; any other value is a path
    /// whose extension picks the format unless `--format` is given.
    pub fn new(out: &Option<String>, format: Option<Format>) -> Result<Self> {
        let (path, implied) = match out.as_deref() {
            None => (None, None),
            Some("json") => (None, Some(Format::Json)),
            Some("csv") => (None, Some(Format::Csv)),
            Some(path) => {
                let by_ext = path.ends_with(".csv").then_some(Format::Csv);
                (Some(PathBuf::from(path)), by_ext)
            }
        };
        Ok(Self {
            path,
            format: format.or(implied).unwrap_or(Format::Json),
        })
    }

    pub fn write<T: Serialize>(&self, report: &T) -> Result<()> {
        let text = render(report, self.format)?;
        match &self.path {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

pub fn render<T: Serialize>(report: &T, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(report)? + "\n",
        Format::Csv => {
            let mut rows = Vec::new();
            flatten(&serde_json::to_value(report)?, String::new(), &mut rows);
            let mut out = String::from("path,value\n");
            for (path, value) in rows {
                out.push_str(&path);
                out.push(',');
                out.push_str(&value);
                out.push('\n');
            }
            out
        }
    })
}

fn flatten(value: &Value, path: String, rows: &mut Vec<(String, String)>) {
    let join = |key: &str| {
        if path.is_empty() {
            key.to_string()
        } else {
            format!("{path}.{key}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(v, join(k), rows);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(v, join(&i.to_string()), rows);
            }
        }
        Value::String(s) if s.contains([',', '"', '\n']) => {
            rows.push((path, format!("\"{}\"", s.replace('"', "\"\""))))
        }
        Value::String(s) => rows.push((path, s.clone())),
        Value::Null => rows.push((path, String::new())),
        other => rows.push((path, other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_projection_flattens_paths() {
        let v = serde_json::json!({"a": 1.5, "b": {"c": [1, 2]}, "d": "x,y", "e": null});
        let text = render(&v, Format::Csv).unwrap();
        assert_eq!(text, "path,value\na,1.5\nb.c.0,1\nb.c.1,2\nd,\"x,y\"\ne,\n");
    }

    #[test]
    fn out_alias_selects_format() {
        assert_eq!(
            Sink::new(&Some("csv".into()), None).unwrap().format,
            Format::Csv
        );
        assert_eq!(
            Sink::new(&Some("r.csv".into()), None).unwrap().format,
            Format::Csv
        );
        assert_eq!(
            Sink::new(&Some("r.txt".into()), Some(Format::Csv))
                .unwrap()
                .format,
            Format::Csv
        );
        assert_eq!(Sink::new(&None, None).unwrap().format, Format::Json);
    }
}
