//! Per-pixel fate grids and their binary encoding.
//!
//! Layout, all little-endian:
//!
//! ```text
//! offset  size  field
//!      0     4  magic "TNDL"
//!      4     4  px        u32
//!      8     4  py        u32
//!     12     8  center_re f64
//!     20     8  center_im f64
//!     28   9·N  records, row-major, top row first:
//!               fate u8 | value u32 | aux f32
//! ```

use num_complex::Complex64;

use super::Viewport;
use crate::error::{Result, TandelbrotError};

pub const MAGIC: [u8; 4] = *b"TNDL";
pub const HEADER_LEN: usize = 28;
pub const RECORD_LEN: usize = 9;

/// Orbit entered the trap disk (or converged to a root, or left `A_n`).
pub const FATE_ESCAPED: u8 = 0;
pub const FATE_CYCLE: u8 = 1;
pub const FATE_POLE: u8 = 2;
pub const FATE_UNDECIDED: u8 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct TileGrid {
    pub viewport: Viewport,
    pub fate: Vec<u8>,
    /// Escape step for fate 0 and 2, cycle period for fate 1, iteration
    /// count for fate 3.
    pub value: Vec<u32>,
    /// `|multiplier|` for cycles, else 0.
    pub aux: Vec<f32>,
}

/// One pixel of a [`TileGrid`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelRecord {
    pub fate: u8,
    pub value: u32,
    pub aux: f32,
}

impl TileGrid {
    pub fn from_records(viewport: Viewport, records: &[PixelRecord]) -> Self {
        TileGrid {
            viewport,
            fate: records.iter().map(|r| r.fate).collect(),
            value: records.iter().map(|r| r.value).collect(),
            aux: records.iter().map(|r| r.aux).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.fate.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fate.is_empty()
    }

    pub fn record(&self, idx: usize) -> PixelRecord {
        PixelRecord { fate: self.fate[idx], value: self.value[idx], aux: self.aux[idx] }
    }

    pub fn at(&self, i: u32, j: u32) -> PixelRecord {
        self.record(j as usize * self.viewport.px as usize + i as usize)
    }

    pub fn encoded_len(&self) -> usize {
        HEADER_LEN + RECORD_LEN * self.len()
    }
}

pub fn encode_tile(t: &TileGrid) -> Vec<u8> {
    let mut out = Vec::with_capacity(t.encoded_len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&t.viewport.px.to_le_bytes());
    out.extend_from_slice(&t.viewport.py.to_le_bytes());
    out.extend_from_slice(&t.viewport.center.re.to_le_bytes());
    out.extend_from_slice(&t.viewport.center.im.to_le_bytes());
    for idx in 0..t.len() {
        out.push(t.fate[idx]);
        out.extend_from_slice(&t.value[idx].to_le_bytes());
        out.extend_from_slice(&t.aux[idx].to_le_bytes());
    }
    out
}

/// Everything the binary format carries. The viewport width is not part
/// of the format; [`DecodedTile::into_grid`] takes it back.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedTile {
    pub px: u32,
    pub py: u32,
    pub center: Complex64,
    pub fate: Vec<u8>,
    pub value: Vec<u32>,
    pub aux: Vec<f32>,
}

impl DecodedTile {
    pub fn into_grid(self, width: f64) -> Result<TileGrid> {
        let viewport = Viewport::new(self.center, width, self.px, self.py)?;
        Ok(TileGrid { viewport, fate: self.fate, value: self.value, aux: self.aux })
    }
}

fn take<const N: usize>(bytes: &[u8], at: usize) -> [u8; N] {
    bytes[at..at + N].try_into().expect("length checked by caller")
}

pub fn decode_tile(bytes: &[u8]) -> Result<DecodedTile> {
    if bytes.len() < HEADER_LEN {
        return Err(TandelbrotError::MalformedTile(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if bytes[..4] != MAGIC {
        return Err(TandelbrotError::MalformedTile("bad magic".into()));
    }
    let px = u32::from_le_bytes(take(bytes, 4));
    let py = u32::from_le_bytes(take(bytes, 8));
    let center = Complex64::new(f64::from_le_bytes(take(bytes, 12)), f64::from_le_bytes(take(bytes, 20)));
    let n = px as usize * py as usize;
    let expected = n
        .checked_mul(RECORD_LEN)
        .and_then(|r| r.checked_add(HEADER_LEN))
        .ok_or_else(|| TandelbrotError::MalformedTile("size overflow".into()))?;
    if bytes.len() != expected {
        return Err(TandelbrotError::MalformedTile(format!("expected {expected} bytes, got {}", bytes.len())));
    }
    let mut fate = Vec::with_capacity(n);
    let mut value = Vec::with_capacity(n);
    let mut aux = Vec::with_capacity(n);
    for rec in bytes[HEADER_LEN..].chunks_exact(RECORD_LEN) {
        fate.push(rec[0]);
        value.push(u32::from_le_bytes(take(rec, 1)));
        aux.push(f32::from_le_bytes(take(rec, 5)));
    }
    Ok(DecodedTile { px, py, center, fate, value, aux })
}
