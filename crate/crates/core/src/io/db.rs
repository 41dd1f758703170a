//! Example-database files.
//!
//! ```text
//! needlecast-db v1 mode=<overlapping|disjoint> n=<count>
//! sources=<comma-separated names>
//! g_center,g_nbr1,g_nbr2,g_nbr3,s_nbr1,s_nbr2,s_nbr3,s_out
//! ...
//! ```
//!
//! Record order is part of the format: nearest-neighbor ties resolve by
//! index, so a reload must preserve it.

use std::io::Write;
use std::path::Path;

use super::{data_lines, parse_f64, parse_usize, FormatError};
use crate::exemplar::{Exemplar, ExemplarDb, SamplingMode};

pub fn write_db(path: &Path, db: &ExemplarDb) -> Result<(), FormatError> {
    for name in db.provenance() {
        if name.contains(',') || name.contains('\n') || name.is_empty() {
            return Err(FormatError::InvalidValue(format!("source name `{name}`")));
        }
    }
    let mut out = format!("needlecast-db v1 mode={} n={}\n", db.mode(), db.len());
    out.push_str(&format!("sources={}\n", db.provenance().join(",")));
    for e in db.records() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            e.g_center,
            e.g_nbr[0],
            e.g_nbr[1],
            e.g_nbr[2],
            e.s_nbr[0],
            e.s_nbr[1],
            e.s_nbr[2],
            e.s_out
        ));
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}

pub fn read_db(path: &Path) -> Result<ExemplarDb, FormatError> {
    let body = std::fs::read_to_string(path)?;
    let mut lines = body.lines().map(str::trim_end);

    let header = lines
        .next()
        .ok_or_else(|| FormatError::MalformedHeader("empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "needlecast-db" || fields[1] != "v1" {
        return Err(FormatError::MalformedHeader(format!("`{header}`")));
    }
    let mode: SamplingMode = fields[2]
        .strip_prefix("mode=")
        .ok_or_else(|| FormatError::MalformedHeader(format!("`{}`", fields[2])))?
        .parse()
        .map_err(FormatError::MalformedHeader)?;
    let n = parse_usize(
        fields[3]
            .strip_prefix("n=")
            .ok_or_else(|| FormatError::MalformedHeader(format!("`{}`", fields[3])))?,
        "record count",
    )?;

    let sources_line = lines
        .next()
        .ok_or_else(|| FormatError::MalformedHeader("missing sources line".into()))?;
    let sources = sources_line
        .strip_prefix("sources=")
        .ok_or_else(|| FormatError::MalformedHeader(format!("`{sources_line}`")))?;
    let provenance: Vec<String> = if sources.is_empty() {
        Vec::new()
    } else {
        sources.split(',').map(str::to_string).collect()
    };

    let rest: String = lines.collect::<Vec<_>>().join("\n");
    let mut records = Vec::with_capacity(n);
    for line in data_lines(&rest) {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 8 {
            return Err(FormatError::InvalidValue(format!(
                "record has {} fields, expected 8",
                parts.len()
            )));
        }
        let mut v = [0.0f64; 8];
        for (k, part) in parts.iter().enumerate() {
            v[k] = parse_f64(part, "record field")?;
        }
        for g in &v[..4] {
            if !(0.0..=1.0).contains(g) {
                return Err(FormatError::InvalidValue(format!("gray level {g}")));
            }
        }
        records.push(Exemplar::new(
            v[0],
            [v[1], v[2], v[3]],
            [v[4], v[5], v[6]],
            v[7],
        ));
        if records.len() > n {
            return Err(FormatError::MalformedHeader(format!(
                "more than the declared {n} records"
            )));
        }
    }
    if records.len() < n {
        return Err(FormatError::TruncatedData(format!(
            "{} of {n} records present",
            records.len()
        )));
    }
    Ok(ExemplarDb::new(records, provenance, mode))
}
