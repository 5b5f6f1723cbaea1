use std::io::Write;

use image::{ImageEncoder, RgbaImage};
use serde::{Deserialize, Serialize};

use super::tile::{TileGrid, FATE_CYCLE, FATE_ESCAPED, FATE_POLE, FATE_UNDECIDED};
use crate::error::{Result, TandelbrotError};

/// Colors used by [`colorize`]. Escaping pixels interpolate linearly
/// between `gradient` stops by normalized log escape step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaletteSpec {
    pub inside: [u8; 4],
    pub pole: [u8; 4],
    pub undecided: [u8; 4],
    pub gradient: Vec<[u8; 4]>,
}

impl Default for PaletteSpec {
    fn default() -> Self {
        PaletteSpec {
            inside: [0, 0, 0, 255],
            pole: [230, 30, 40, 255],
            undecided: [0, 0, 0, 255],
            gradient: vec![
                [9, 18, 66, 255],
                [40, 90, 180, 255],
                [235, 240, 245, 255],
                [250, 170, 40, 255],
                [120, 40, 10, 255],
            ],
        }
    }
}

impl PaletteSpec {
    fn ramp(&self, t: f64) -> [u8; 4] {
        match self.gradient.len() {
            0 => self.inside,
            1 => self.gradient[0],
            n => {
                let x = t.clamp(0.0, 1.0) * (n - 1) as f64;
                let i = (x.floor() as usize).min(n - 2);
                let f = x - i as f64;
                let (a, b) = (self.gradient[i], self.gradient[i + 1]);
                let mut out = [0u8; 4];
                for c in 0..4 {
                    out[c] = (a[c] as f64 + f * (b[c] as f64 - a[c] as f64)).round() as u8;
                }
                out
            }
        }
    }
}

/// Maps a fate grid to RGBA. Cycles and undecided pixels are drawn as
/// "inside"; the escape gradient is normalized to the largest escape step
/// present in this grid.
pub fn colorize(grid: &TileGrid, palette: &PaletteSpec) -> RgbaImage {
    let max_step = grid
        .fate
        .iter()
        .zip(&grid.value)
        .filter(|(f, _)| **f == FATE_ESCAPED)
        .map(|(_, v)| *v)
        .max()
        .unwrap_or(0);
    let denom = (1.0 + max_step as f64).ln();
    let mut img = RgbaImage::new(grid.viewport.px, grid.viewport.py);
    for (idx, px) in img.pixels_mut().enumerate() {
        let rgba = match grid.fate[idx] {
            FATE_ESCAPED => {
                let t = if denom > 0.0 { (1.0 + grid.value[idx] as f64).ln() / denom } else { 0.0 };
                palette.ramp(t)
            }
            FATE_CYCLE => palette.inside,
            FATE_POLE => palette.pole,
            FATE_UNDECIDED => palette.undecided,
            _ => palette.undecided,
        };
        px.0 = rgba;
    }
    img
}

pub fn encode_png(img: &RgbaImage) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    image::codecs::png::PngEncoder::new(&mut out)
        .write_image(img.as_raw(), img.width(), img.height(), image::ExtendedColorType::Rgba8)
        .map_err(|e| TandelbrotError::InvalidArgument(format!("png encoding failed: {e}")))?;
    Ok(out)
}

/// Binary PPM (P6); alpha is dropped.
pub fn encode_ppm(img: &RgbaImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(20 + 3 * img.as_raw().len() / 4);
    write!(out, "P6\n{} {}\n255\n", img.width(), img.height()).expect("writing to a Vec cannot fail");
    for px in img.pixels() {
        out.extend_from_slice(&px.0[..3]);
    }
    out
}
