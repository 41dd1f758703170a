//! Needle-map files and their visualization.
//!
//! ```text
//! needlecast-nm v1 w=<W> h=<H>
//! i,j,slant,tilt,match_distance
//! ...
//! ```
//!
//! One line per assigned pixel, in row-major order.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::Write;
use std::path::Path;

use super::{data_lines, parse_f64, parse_usize, FormatError};
use crate::angles::Orientation;
use crate::grid::NeedleMap;

pub fn write_needle_map(path: &Path, nm: &NeedleMap) -> Result<(), FormatError> {
    let mut out = format!("needlecast-nm v1 w={} h={}\n", nm.width(), nm.height());
    for i in 0..nm.height() {
        for j in 0..nm.width() {
            if let Some(o) = nm.cell(i, j) {
                let d = nm.distance(i, j).expect("assigned cells carry a distance");
                out.push_str(&format!("{i},{j},{},{},{d}\n", o.slant(), o.tilt()));
            }
        }
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}

pub fn read_needle_map(path: &Path) -> Result<NeedleMap, FormatError> {
    let body = std::fs::read_to_string(path)?;
    let mut lines = body.lines().map(str::trim_end);
    let header = lines
        .next()
        .ok_or_else(|| FormatError::MalformedHeader("empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "needlecast-nm" || fields[1] != "v1" {
        return Err(FormatError::MalformedHeader(format!("`{header}`")));
    }
    let w = parse_usize(
        fields[2]
            .strip_prefix("w=")
            .ok_or_else(|| FormatError::MalformedHeader(format!("`{}`", fields[2])))?,
        "width",
    )?;
    let h = parse_usize(
        fields[3]
            .strip_prefix("h=")
            .ok_or_else(|| FormatError::MalformedHeader(format!("`{}`", fields[3])))?,
        "height",
    )?;

    let rest: String = lines.collect::<Vec<_>>().join("\n");
    let mut nm = NeedleMap::empty(w, h);
    for line in data_lines(&rest) {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 5 {
            return Err(FormatError::InvalidValue(format!(
                "record has {} fields, expected 5",
                parts.len()
            )));
        }
        let i = parse_usize(parts[0], "row")?;
        let j = parse_usize(parts[1], "column")?;
        if i >= h || j >= w {
            return Err(FormatError::DimensionMismatch(format!(
                "pixel ({i}, {j}) outside {w}x{h}"
            )));
        }
        if nm.is_assigned(i, j) {
            return Err(FormatError::InvalidValue(format!(
                "duplicate pixel ({i}, {j})"
            )));
        }
        let slant = parse_f64(parts[2], "slant")?;
        let tilt = parse_f64(parts[3], "tilt")?;
        let dist = parse_f64(parts[4], "match distance")?;
        if !(-PI..=PI).contains(&slant) || !(0.0..=FRAC_PI_2).contains(&tilt) {
            return Err(FormatError::InvalidValue(format!(
                "angles ({slant}, {tilt})"
            )));
        }
        if !(0.0..=1.0).contains(&dist) {
            return Err(FormatError::InvalidValue(format!("match distance {dist}")));
        }
        nm.set(i, j, Orientation::new(slant, tilt), dist);
    }
    Ok(nm)
}

/// Writes a PGM triptych: slant, tilt and match distance side by side, each
/// panel as wide as the needle map. Slant maps to gray via (s + pi) / (2 pi),
/// tilt via t / (pi / 2), distance directly; unassigned cells are black.
pub fn render_needle_visualization(nm: &NeedleMap, path: &Path) -> Result<(), FormatError> {
    let (w, h) = (nm.width(), nm.height());
    let img = crate::grid::GrayImage::from_fn(3 * w, h, |i, j| {
        let (panel, j) = (j / w, j % w);
        match nm.cell(i, j) {
            None => 0.0,
            Some(o) => match panel {
                0 => (o.slant() + PI) / TAU,
                1 => o.tilt() / FRAC_PI_2,
                _ => nm.distance(i, j).unwrap_or(0.0),
            },
        }
    });
    super::pgm::write_pgm(path, &img)
}
