use std::io::{self, Write};

use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "ellcert/v1";

/// One line of structured output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record<T> {
    pub schema: String,
    pub kind: String,
    pub data: T,
}

impl<T> Record<T> {
    pub fn new(kind: &str, data: T) -> Self {
        Record {
            schema: SCHEMA.to_string(),
            kind: kind.to_string(),
            data,
        }
    }
}

pub fn write_record<T: Serialize>(out: &mut dyn Write, kind: &str, data: &T) -> io::Result<()> {
    let line = serde_json::to_string(&Record::new(kind, data)).map_err(io::Error::other)?;
    writeln!(out, "{line}")
}

/// Parses one structured line back into a typed record.
pub fn parse_record<T: for<'de> Deserialize<'de>>(
    line: &str,
) -> Result<Record<T>, serde_json::Error> {
    serde_json::from_str(line)
}

/// Aligned `key  value` lines.
pub fn write_pairs(out: &mut dyn Write, pairs: &[(&str, String)]) -> io::Result<()> {
    let w = pairs
        .iter()
        .map(|(k, _)| k.chars().count())
        .max()
        .unwrap_or(0);
    for (k, v) in pairs {
        writeln!(out, "{k:<w$}  {v}")?;
    }
    Ok(())
}

pub fn write_csv(out: &mut dyn Write, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for r in rows {
        let cells: Vec<String> = r.iter().map(|c| csv_cell(c)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

fn csv_cell(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_round_trip() {
        let mut buf = Vec::new();
        write_record(&mut buf, "demo", &vec![1u64, 2]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "{\"schema\":\"ellcert/v1\",\"kind\":\"demo\",\"data\":[1,2]}\n"
        );
        let back: Record<Vec<u64>> = parse_record(text.trim_end()).unwrap();
        assert_eq!(back, Record::new("demo", vec![1, 2]));
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_cell("a,b"), "\"a,b\"");
        assert_eq!(csv_cell("plain"), "plain");
    }
}
