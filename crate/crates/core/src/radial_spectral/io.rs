//! Field serialization.
//!
//! Binary container (all multi-byte values in the byte order named by the
//! endian tag):
//!
//! | offset | size | content                                    |
//! |--------|------|--------------------------------------------|
//! | 0      | 8    | magic `PCNLSFLD`                           |
//! | 8      | 1    | version, currently 1                       |
//! | 9      | 1    | endian tag, `L` or `B`                     |
//! | 10     | 6    | reserved, zero                             |
//! | 16     | 8    | R as f64                                   |
//! | 24     | 8    | M as u64                                   |
//! | 32     | 16(M-1) | `g_m` as interleaved (re, im) f64 pairs |
//!
//! CSV: header `r,re,im`, one row per interior node, holding the physical
//! values `f(r_m)` rather than `g_m`.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{RadialField, RadialGrid};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"PCNLSFLD";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 32;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Endian {
    #[default]
    Little,
    Big,
}

impl Endian {
    fn tag(self) -> u8 {
        match self {
            Endian::Little => b'L',
            Endian::Big => b'B',
        }
    }

    fn put_f64(self, out: &mut Vec<u8>, v: f64) {
        match self {
            Endian::Little => out.extend_from_slice(&v.to_le_bytes()),
            Endian::Big => out.extend_from_slice(&v.to_be_bytes()),
        }
    }

    fn get_f64(self, b: [u8; 8]) -> f64 {
        match self {
            Endian::Little => f64::from_le_bytes(b),
            Endian::Big => f64::from_be_bytes(b),
        }
    }

    fn get_u64(self, b: [u8; 8]) -> u64 {
        match self {
            Endian::Little => u64::from_le_bytes(b),
            Endian::Big => u64::from_be_bytes(b),
        }
    }
}

pub fn encode_field(field: &RadialField, endian: Endian) -> Vec<u8> {
    let grid = field.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * grid.len());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(endian.tag());
    out.extend_from_slice(&[0u8; 6]);
    endian.put_f64(&mut out, grid.radius());
    match endian {
        Endian::Little => out.extend_from_slice(&(grid.intervals() as u64).to_le_bytes()),
        Endian::Big => out.extend_from_slice(&(grid.intervals() as u64).to_be_bytes()),
    }
    for g in field.samples() {
        endian.put_f64(&mut out, g.re);
        endian.put_f64(&mut out, g.im);
    }
    out
}

fn chunk8(bytes: &[u8], at: usize) -> [u8; 8] {
    let mut b = [0u8; 8];
    b.copy_from_slice(&bytes[at..at + 8]);
    b
}

/// Decodes a binary container, validating every header field and sample.
pub fn decode_field(bytes: &[u8]) -> Result<RadialField> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Decode(format!("truncated header: {} bytes", bytes.len())));
    }
    if &bytes[..8] != MAGIC {
        return Err(Error::Decode("bad magic".into()));
    }
    if bytes[8] != VERSION {
        return Err(Error::Decode(format!("unsupported version {}", bytes[8])));
    }
    let endian = match bytes[9] {
        b'L' => Endian::Little,
        b'B' => Endian::Big,
        t => return Err(Error::Decode(format!("bad endian tag {t:#04x}"))),
    };
    if bytes[10..16].iter().any(|&b| b != 0) {
        return Err(Error::Decode("reserved bytes are not zero".into()));
    }
    let radius = endian.get_f64(chunk8(bytes, 16));
    let intervals = endian.get_u64(chunk8(bytes, 24));
    let intervals = usize::try_from(intervals)
        .map_err(|_| Error::Decode(format!("interval count {intervals} does not fit")))?;
    let grid = RadialGrid::new(radius, intervals).map_err(|e| Error::Decode(e.to_string()))?;
    let expected = (intervals - 1)
        .checked_mul(16)
        .and_then(|p| p.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::Decode("payload size overflows".into()))?;
    if bytes.len() != expected {
        return Err(Error::Decode(format!(
            "payload length mismatch: expected {expected} bytes, got {}",
            bytes.len()
        )));
    }
    let samples = bytes[HEADER_LEN..]
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                endian.get_f64(chunk8(c, 0)),
                endian.get_f64(chunk8(c, 8)),
            )
        })
        .collect();
    RadialField::from_samples(grid, samples).map_err(|e| Error::Decode(e.to_string()))
}

pub fn write_field_csv<W: Write>(field: &RadialField, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["r", "re", "im"])?;
    for (r, f) in field.grid().nodes().zip(field.values()) {
        w.write_record([format!("{r:.17e}"), format!("{:.17e}", f.re), format!("{:.17e}", f.im)])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the CSV form back, reconstructing the grid from the `r` column.
pub fn read_field_csv<R: Read>(reader: R) -> Result<RadialField> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["r", "re", "im"] {
        return Err(Error::Decode(format!("expected header r,re,im, got {:?}", headers)));
    }
    let mut radii = Vec::new();
    let mut values = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(Error::Decode(format!("row with {} columns", rec.len())));
        }
        let parse = |i: usize| -> Result<f64> {
            rec[i]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Decode(format!("bad number {:?}: {e}", &rec[i])))
        };
        radii.push(parse(0)?);
        values.push(Complex64::new(parse(1)?, parse(2)?));
    }
    let intervals = radii.len() + 1;
    let dr = *radii.first().ok_or_else(|| Error::Decode("no rows".into()))?;
    if !(dr.is_finite() && dr > 0.0) {
        return Err(Error::Decode(format!("first node must be positive, got {dr}")));
    }
    let grid = RadialGrid::new(dr * intervals as f64, intervals).map_err(|e| Error::Decode(e.to_string()))?;
    for (i, (&r, node)) in radii.iter().zip(grid.nodes()).enumerate() {
        if (r - node).abs() > 1e-9 * node {
            return Err(Error::Decode(format!("row {i}: r = {r} is off the uniform grid")));
        }
    }
    RadialField::from_values(grid, &values).map_err(|e| Error::Decode(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_spectral::sample_function;
    use proptest::prelude::*;

    fn sample_field() -> RadialField {
        let grid = RadialGrid::new(12.0, 64).unwrap();
        sample_function(grid, |r| Complex64::new((-r * r).exp(), 0.3 * r.sin())).unwrap()
    }

    #[test]
    fn binary_round_trip_both_endians() {
        let f = sample_field();
        for e in [Endian::Little, Endian::Big] {
            let bytes = encode_field(&f, e);
            assert_eq!(bytes.len(), HEADER_LEN + 16 * 63);
            assert_eq!(decode_field(&bytes).unwrap(), f);
        }
    }

    #[test]
    fn binary_rejects_corruption() {
        let f = sample_field();
        let bytes = encode_field(&f, Endian::Little);
        assert!(decode_field(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[9] = b'X';
        assert!(decode_field(&bad).is_err());
        let mut bad = bytes.clone();
        bad[24] = 65; // M = 65, not a power of two
        assert!(decode_field(&bad).is_err());
        let mut bad = bytes;
        bad[HEADER_LEN..HEADER_LEN + 8].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(decode_field(&bad).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let f = sample_field();
        let mut buf = Vec::new();
        write_field_csv(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("r,re,im\n"));
        let back = read_field_csv(buf.as_slice()).unwrap();
        assert_eq!(back.grid(), f.grid());
        for (a, b) in back.samples().iter().zip(f.samples()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn csv_rejects_off_grid_rows() {
        let mut text = String::from("r,re,im\n");
        for i in 1..64 {
            let r = if i == 10 { 10.5 } else { i as f64 };
            text.push_str(&format!("{r},0,0\n"));
        }
        assert!(read_field_csv(text.as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn decoder_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..256)) {
            let _ = decode_field(&bytes);
        }

        #[test]
        fn decoder_survives_header_mutation(pos in 0usize..HEADER_LEN, byte in any::<u8>()) {
            let mut bytes = encode_field(&sample_field(), Endian::Little);
            bytes[pos] = byte;
            let _ = decode_field(&bytes);
        }
    }
}
