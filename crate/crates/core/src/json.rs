//! Wire shapes shared by the CLI and the HTTP API.

use num_complex::Complex64;
use serde::Serialize;

/// `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

/// Serializes a value as compact JSON. Floats are written in the shortest
/// form that parses back to the identical `f64`.
pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("report types always serialize")
}
