//! Depth-matrix files: a `W H spacing` header line, then H rows of W
//! whitespace-separated decimals.

use std::io::Write;
use std::path::Path;

use super::{data_lines, parse_f64, parse_usize, FormatError};
use crate::grid::DepthMap;

pub fn read_depth(path: &Path) -> Result<DepthMap, FormatError> {
    let body = std::fs::read_to_string(path)?;
    let mut lines = data_lines(&body);
    let header = lines
        .next()
        .ok_or_else(|| FormatError::MalformedHeader("empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(FormatError::MalformedHeader(format!(
            "expected `W H spacing`, got `{header}`"
        )));
    }
    let width = parse_usize(fields[0], "width")?;
    let height = parse_usize(fields[1], "height")?;
    let spacing = parse_f64(fields[2], "spacing")?;
    if width == 0 || height == 0 {
        return Err(FormatError::MalformedHeader("zero dimension".into()));
    }
    if spacing <= 0.0 {
        return Err(FormatError::MalformedHeader(format!("spacing {spacing}")));
    }

    let mut z = Vec::with_capacity(width * height);
    for row in 0..height {
        let line = lines
            .next()
            .ok_or_else(|| FormatError::TruncatedData(format!("{row} of {height} rows present")))?;
        let values: Vec<&str> = line.split_whitespace().collect();
        if values.len() != width {
            return Err(FormatError::DimensionMismatch(format!(
                "row {row} has {} entries, expected {width}",
                values.len()
            )));
        }
        for v in values {
            z.push(parse_f64(v, "depth value")?);
        }
    }
    if lines.next().is_some() {
        return Err(FormatError::MalformedHeader(
            "trailing data after grid".into(),
        ));
    }
    Ok(DepthMap::new(width, height, spacing, z))
}

pub fn write_depth(path: &Path, d: &DepthMap) -> Result<(), FormatError> {
    if d.values().iter().any(|v| !v.is_finite()) {
        return Err(FormatError::NonFiniteValue("depth grid".into()));
    }
    let mut out = format!("{} {} {}\n", d.width(), d.height(), d.spacing());
    for i in 0..d.height() {
        let row: Vec<String> = (0..d.width()).map(|j| d.at(i, j).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}
