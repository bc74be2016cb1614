use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use super::HarnessError;

/// Config hash and quadrature sizes, embedded in every output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub config_hash: String,
    /// (key, compact JSON value) pairs, in emission order.
    pub entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn new(config_hash: String) -> Self {
        Self { config_hash, entries: Vec::new() }
    }

    pub fn with<T: Serialize>(mut self, key: &str, value: &T) -> Self {
        let v = serde_json::to_string(value).expect("metadata serializes");
        self.entries.push((key.to_string(), v));
        self
    }

    fn to_json(&self) -> Value {
        let mut map = serde_json::Map::new();
        map.insert("config_hash".into(), Value::String(self.config_hash.clone()));
        for (k, v) in &self.entries {
            map.insert(k.clone(), serde_json::from_str(v).expect("metadata is JSON"));
        }
        Value::Object(map)
    }
}

/// Fixed-width scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Io(format!("{}: {e}", path.display()))
}

pub fn ensure_dir(dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

/// CSV preceded by `# key=value` comment lines.
pub fn write_csv(
    dir: &Path,
    name: &str,
    meta: &Metadata,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<PathBuf, HarnessError> {
    let path = dir.join(name);
    let mut buf = format!("# config_hash={}\n", meta.config_hash);
    for (k, v) in &meta.entries {
        buf.push_str(&format!("# {k}={v}\n"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| io_err(&path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| io_err(&path, e))?;
    }
    let body = w.into_inner().map_err(|e| io_err(&path, e))?;
    buf.push_str(std::str::from_utf8(&body).expect("csv output is UTF-8"));
    fs::write(&path, buf).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

/// `{"metadata": ..., "data": ...}`, pretty-printed with a final newline.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, meta: &Metadata, data: &T) -> Result<PathBuf, HarnessError> {
    let path = dir.join(name);
    let doc = json!({ "metadata": meta.to_json(), "data": data });
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| io_err(&path, e))?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        let x = 0.1 + 0.2;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        assert_eq!(fmt_f64(-1e-300), "-1.0000000000000000e-300");
    }

    #[test]
    fn files_carry_metadata() {
        let dir = tempfile::tempdir().unwrap();
        let meta = Metadata::new("abc".into()).with("grid_scale", &1.0);
        let p = write_csv(dir.path(), "t.csv", &meta, &["a", "b"], &[vec!["1".into(), fmt_f64(2.0)]]).unwrap();
        let text = fs::read_to_string(p).unwrap();
        assert_eq!(text, "# config_hash=abc\n# grid_scale=1.0\na,b\n1,2.0000000000000000e0\n");
        let p = write_json(dir.path(), "t.json", &meta, &vec![1, 2]).unwrap();
        let v: Value = serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap();
        assert_eq!(v["metadata"]["config_hash"], "abc");
        assert_eq!(v["data"][1], 2);
    }
}
