//! CSV and JSON writers. Every file carries its provenance: CSV files start
//! with a single `#`-prefixed JSON line holding the full run configuration,
//! JSON files embed it as a field. Floats are written in shortest
//! round-trip form, so re-running an embedded configuration reproduces the
//! file byte for byte.

use crate::Result;
use std::io::Write;
use std::path::Path;

/// Write a CSV file with a JSON comment header.
pub fn csv_with_header<P: AsRef<Path>>(
    path: P,
    meta: &serde_json::Value,
    columns: &[&str],
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<()> {
    let mut out = String::new();
    out.push_str("# ");
    out.push_str(&serde_json::to_string(meta)?);
    out.push('\n');
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            first = false;
            out.push_str(&format_f64(v));
        }
        out.push('\n');
    }
    write_atomic(path.as_ref(), out.as_bytes())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}

/// Shortest round-trip decimal form.
pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{v}")
    }
}

/// Read back the JSON header of a CSV written by [`csv_with_header`].
pub fn read_csv_header<P: AsRef<Path>>(path: P) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(path)?;
    let first = text.lines().next().unwrap_or("");
    let json = first.strip_prefix("# ").unwrap_or(first);
    Ok(serde_json::from_str(json)?)
}

/// Write a pretty JSON record.
pub fn json_record<P: AsRef<Path>>(path: P, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path.as_ref(), text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_header_and_floats() {
        let dir = std::env::temp_dir().join("twomode_export_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("t.csv");
        let meta = serde_json::json!({"J": 10.0, "variant": "exact"});
        let rows = vec![vec![0.1, 1.0 / 3.0], vec![f64::INFINITY, -0.0]];
        csv_with_header(&path, &meta, &["omega", "s_ff"], rows.into_iter()).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# {"));
        assert_eq!(lines.next().unwrap(), "omega,s_ff");
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[1].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(read_csv_header(&path).unwrap(), meta);
    }
}
