use num_complex::Complex64;

use crate::error::{Result, TandelbrotError};

/// A rectangular window of the complex plane sampled at `px × py` pixel
/// centers. The height follows from the aspect ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub center: Complex64,
    pub width: f64,
    pub px: u32,
    pub py: u32,
}

impl Viewport {
    pub fn new(center: Complex64, width: f64, px: u32, py: u32) -> Result<Self> {
        let vp = Viewport { center, width, px, py };
        vp.validate()?;
        Ok(vp)
    }

    pub fn validate(&self) -> Result<()> {
        if self.px == 0 || self.py == 0 {
            return Err(TandelbrotError::ZeroPixelViewport);
        }
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(TandelbrotError::InvalidArgument(format!("width = {}", self.width)));
        }
        if !(self.center.re.is_finite() && self.center.im.is_finite()) {
            return Err(TandelbrotError::InvalidArgument(format!("center = {}", self.center)));
        }
        Ok(())
    }

    pub fn height(&self) -> f64 {
        self.width * self.py as f64 / self.px as f64
    }

    pub fn len(&self) -> usize {
        self.px as usize * self.py as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Complex coordinate of pixel `(i, j)`: column `i`, row `j`.
    /// Rows are stored top first; the imaginary offset grows with `j`.
    #[inline]
    pub fn pixel(&self, i: u32, j: u32) -> Complex64 {
        let x = ((i as f64 + 0.5) / self.px as f64 - 0.5) * self.width;
        let y = ((j as f64 + 0.5) / self.py as f64 - 0.5) * self.height();
        self.center + Complex64::new(x, y)
    }

    /// All pixel coordinates in row-major order.
    pub fn points(&self) -> Vec<Complex64> {
        (0..self.py).flat_map(|j| (0..self.px).map(move |i| self.pixel(i, j))).collect()
    }

    /// Pixel coordinates lying strictly inside the disk `|z| < radius`.
    pub fn points_in_disk(&self, radius: f64) -> Vec<Complex64> {
        self.points().into_iter().filter(|z| z.norm() < radius).collect()
    }
}
