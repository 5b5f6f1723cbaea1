//! Points of the Riemann sphere.

use num_complex::Complex64;
use serde::{Serialize, Serializer};

/// A point of the Riemann sphere: a finite complex number or infinity.
///
/// Infinity is always explicit; a `Finite` value never holds NaN or an
/// infinite coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    /// Wraps `z`, mapping non-finite coordinates to `Infinity`.
    pub fn from_complex(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            SpherePoint::Finite(z)
        } else {
            SpherePoint::Infinity
        }
    }

    pub fn finite(self) -> Option<Complex64> {
        match self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn is_infinity(self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    /// Chordal distance on the unit sphere, in `[0, 2]`.
    pub fn chordal_distance(self, other: SpherePoint) -> f64 {
        match (self, other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
            (SpherePoint::Finite(z), SpherePoint::Infinity)
            | (SpherePoint::Infinity, SpherePoint::Finite(z)) => {
                2.0 / (1.0 + z.norm_sqr()).sqrt()
            }
            (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
                2.0 * (z - w).norm()
                    / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt())
            }
        }
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::from_complex(z)
    }
}

impl Serialize for SpherePoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            SpherePoint::Finite(z) => crate::json::ComplexJson::from(*z).serialize(serializer),
            SpherePoint::Infinity => serializer.serialize_none(),
        }
    }
}
