//! Kernel files.
//!
//! CSV: header `x1,...,xn,i0_re,i0_im,i1_re,...`, one row per grid point in
//! row-major order.
//!
//! Binary: one line of JSON (sorted keys, `"format": "hgk-1"`) terminated by
//! `\n`, followed by little-endian `f64` values, `n` coordinates then the
//! `2^(r+1)` components for each point in row-major order.

use std::io::{BufRead, Write};

use serde_json::json;

use super::eval::KernelField;
use super::grid::{Axis, GridSpec};
use crate::algebra::{CCDNumber, CDNumber};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: &str = "hgk-1";

fn component_names(level: u8) -> Vec<String> {
    (0..1usize << level)
        .flat_map(|k| [format!("i{k}_re"), format!("i{k}_im")])
        .collect()
}

pub fn write_csv<W: Write>(field: &KernelField, mut out: W) -> Result<()> {
    let grid = &field.grid;
    let mut header: Vec<String> = (1..=grid.n()).map(|k| format!("x{k}")).collect();
    header.extend(component_names(field.level));
    writeln!(out, "{}", header.join(","))?;
    let mut line = String::new();
    for (i, v) in field.values.iter().enumerate() {
        line.clear();
        let x = grid.x_at(&grid.unravel(i));
        let cells = x.into_iter().chain(v.interleaved());
        for (c, value) in cells.enumerate() {
            if c > 0 {
                line.push(',');
            }
            line.push_str(&format!("{value:e}"));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn write_binary<W: Write>(field: &KernelField, mut out: W) -> Result<()> {
    let grid = &field.grid;
    let header = json!({
        "format": FORMAT_VERSION,
        "byte_order": "little",
        "dtype": "f64",
        "level": field.level,
        "t": grid.t(),
        "axes": grid.axes(),
        "points": grid.total_points(),
        "columns": (1..=grid.n())
            .map(|k| format!("x{k}"))
            .chain(component_names(field.level))
            .collect::<Vec<_>>(),
        "boundary_decay": field.boundary_decay,
    });
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    let mut buf = Vec::with_capacity(8 * (grid.n() + (2usize << field.level)));
    for (i, v) in field.values.iter().enumerate() {
        buf.clear();
        for x in grid.x_at(&grid.unravel(i)) {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        for c in v.interleaved() {
            buf.extend_from_slice(&c.to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    Ok(())
}

pub fn read_binary<R: BufRead>(mut input: R) -> Result<KernelField> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    let header: serde_json::Value = serde_json::from_str(line.trim_end())?;
    let field = |key: &str| {
        header
            .get(key)
            .ok_or_else(|| Error::Format(format!("missing header field {key:?}")))
    };
    if field("format")?.as_str() != Some(FORMAT_VERSION) {
        return Err(Error::Format(format!("expected format {FORMAT_VERSION}")));
    }
    let level = field("level")?
        .as_u64()
        .and_then(|l| u8::try_from(l).ok())
        .ok_or_else(|| Error::Format("bad level".into()))?;
    let t = field("t")?
        .as_f64()
        .ok_or_else(|| Error::Format("bad time".into()))?;
    let axes: Vec<Axis> = serde_json::from_value(field("axes")?.clone())?;
    let boundary_decay = field("boundary_decay")?.as_f64().unwrap_or(f64::NAN);
    let grid = GridSpec::new(axes, t)?;
    let dim = 1usize << level;
    let per_point = grid.n() + 2 * dim;

    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() != 8 * per_point * grid.total_points() {
        return Err(Error::Format(format!(
            "payload has {} bytes, expected {}",
            bytes.len(),
            8 * per_point * grid.total_points()
        )));
    }
    let floats: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    let values = floats
        .chunks_exact(per_point)
        .map(|row| {
            let comps = &row[grid.n()..];
            let re = comps.iter().step_by(2).copied().collect();
            let im = comps.iter().skip(1).step_by(2).copied().collect();
            CCDNumber::new(CDNumber::from_coeffs(level, re)?, CDNumber::from_coeffs(level, im)?)
        })
        .collect::<Result<_>>()?;
    Ok(KernelField {
        grid,
        level,
        values,
        boundary_decay,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::random_ccd;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn field() -> KernelField {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let grid = GridSpec::uniform(2, 3.0, 4, 0.5).unwrap();
        let values = (0..16).map(|_| random_ccd(&mut rng, 1)).collect();
        KernelField {
            grid,
            level: 1,
            values,
            boundary_decay: 1e-13,
        }
    }

    #[test]
    fn binary_roundtrip() {
        let f = field();
        let mut buf = Vec::new();
        write_binary(&f, &mut buf).unwrap();
        let header_end = buf.iter().position(|&b| b == b'\n').unwrap();
        let header = std::str::from_utf8(&buf[..header_end]).unwrap();
        assert!(header.contains("\"format\":\"hgk-1\""));
        assert_eq!(read_binary(&buf[..]).unwrap(), f);
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let mut buf = Vec::new();
        write_binary(&field(), &mut buf).unwrap();
        buf.pop();
        assert!(matches!(read_binary(&buf[..]), Err(Error::Format(_))));
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&field(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x1,x2,i0_re,i0_im,i1_re,i1_im");
        assert_eq!(lines.clone().count(), 16);
        assert_eq!(lines.next().unwrap().split(',').count(), 6);
    }
}
