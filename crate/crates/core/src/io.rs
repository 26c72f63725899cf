//! File formats shared by the experiment drivers: binary PGM rasters, CSV
//! number formatting, and the little-endian complex state container.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use faer::{c64, Mat};

use crate::error::{Error, Result};

/// Twelve significant digits, stable across platforms.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

/// Encode a row-major grid as binary PGM, max-normalized to 0..=255.
pub fn pgm_bytes(values: &[f64], width: usize, height: usize) -> Result<Vec<u8>> {
    if width == 0 || height == 0 || values.len() != width * height {
        return Err(Error::InvalidArgument(format!(
            "grid of {} values does not match {width}x{height}",
            values.len()
        )));
    }
    let max = values.iter().cloned().fold(0.0f64, f64::max);
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.reserve(values.len());
    for &v in values {
        let b = if max > 0.0 && v > 0.0 {
            (v / max * 255.0).round().clamp(0.0, 255.0) as u8
        } else {
            0
        };
        out.push(b);
    }
    Ok(out)
}

pub fn write_pgm(path: &Path, values: &[f64], width: usize, height: usize) -> Result<()> {
    let bytes = pgm_bytes(values, width, height)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

const MAGIC: &[u8; 4] = b"SCLQ";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u32)]
pub enum ContainerKind {
    State = 1,
    Operator = 2,
}

/// Header: magic `SCLQ`, N as u64 LE, kind as u32 LE. Body: row-major
/// (re, im) f64 pairs, N values for a state and N*N for an operator.
pub fn encode_state(amplitudes: &[c64]) -> Vec<u8> {
    let mut out = header(amplitudes.len(), ContainerKind::State);
    for z in amplitudes {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

pub fn encode_operator(m: &Mat<c64>) -> Vec<u8> {
    let n = m.nrows();
    let mut out = header(n, ContainerKind::Operator);
    for i in 0..n {
        for j in 0..m.ncols() {
            out.extend_from_slice(&m[(i, j)].re.to_le_bytes());
            out.extend_from_slice(&m[(i, j)].im.to_le_bytes());
        }
    }
    out
}

fn header(n: usize, kind: ContainerKind) -> Vec<u8> {
    let mut out = Vec::with_capacity(16);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(n as u64).to_le_bytes());
    out.extend_from_slice(&(kind as u32).to_le_bytes());
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum Container {
    State(Vec<c64>),
    Operator { n: usize, entries: Vec<c64> },
}

pub fn decode(bytes: &[u8]) -> Result<Container> {
    let bad = |msg: &str| Error::InvalidArgument(format!("state container: {msg}"));
    if bytes.len() < 16 || &bytes[0..4] != MAGIC {
        return Err(bad("missing magic"));
    }
    let n = u64::from_le_bytes(bytes[4..12].try_into().unwrap()) as usize;
    let kind = u32::from_le_bytes(bytes[12..16].try_into().unwrap());
    let count = match kind {
        1 => n,
        2 => n.checked_mul(n).ok_or_else(|| bad("size overflow"))?,
        _ => return Err(bad("unknown kind")),
    };
    let body = &bytes[16..];
    if body.len() != count * 16 {
        return Err(bad("truncated body"));
    }
    let entries: Vec<c64> = body
        .chunks_exact(16)
        .map(|c| {
            c64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            )
        })
        .collect();
    Ok(if kind == 1 {
        Container::State(entries)
    } else {
        Container::Operator { n, entries }
    })
}

pub fn write_container(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

pub fn read_container(path: &Path) -> Result<Container> {
    let mut buf = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut buf))
        .map_err(|e| Error::io(path, e))?;
    decode(&buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_two_by_two() {
        let b = pgm_bytes(&[0.0, 1.0, 1.0, 0.0], 2, 2).unwrap();
        let head = b"P5\n2 2\n255\n";
        assert_eq!(&b[..head.len()], head);
        assert_eq!(&b[head.len()..], &[0, 255, 255, 0]);
    }

    #[test]
    fn pgm_all_zero() {
        let b = pgm_bytes(&[0.0; 6], 3, 2).unwrap();
        assert!(b[b.len() - 6..].iter().all(|&x| x == 0));
    }

    #[test]
    fn pgm_rejects_shape_mismatch() {
        assert!(pgm_bytes(&[1.0; 5], 2, 2).is_err());
        assert!(pgm_bytes(&[], 0, 0).is_err());
    }

    #[test]
    fn container_round_trip() {
        let v = vec![c64::new(1.0, -2.0), c64::new(0.25, 1e-300)];
        assert_eq!(decode(&encode_state(&v)).unwrap(), Container::State(v));
        let m = Mat::from_fn(2, 2, |i, j| c64::new(i as f64, j as f64));
        match decode(&encode_operator(&m)).unwrap() {
            Container::Operator { n, entries } => {
                assert_eq!(n, 2);
                assert_eq!(entries[1], c64::new(0.0, 1.0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn container_rejects_garbage() {
        assert!(decode(b"nope").is_err());
        let mut b = encode_state(&[c64::new(1.0, 0.0)]);
        b.pop();
        assert!(decode(&b).is_err());
    }

    #[test]
    fn number_format_is_fixed_width_mantissa() {
        assert_eq!(fmt_num(1.0), "1.00000000000e0");
        assert_eq!(fmt_num(-0.5), "-5.00000000000e-1");
    }
}
