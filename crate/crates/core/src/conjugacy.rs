//! Universal constants of the conformal model on the basin of 0.
//!
//! Every `T_α` with `α ∈ 𝔻(0, 1/2)∖{0}` is conformally conjugate on its
//! basin of 0 to `g(z) = C tan(πz)`, with `C` independent of α. `C` is
//! determined by `p*`, the root in (0, 1) of `2x ln(1/x) / (1 − x²) = 1/8`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, TandelbrotError};
use crate::model::ORIGIN_MULTIPLIER;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelConstants {
    pub p_star: f64,
    /// `(1 − p*)/(1 + p*)`, the modulus of the model's fixed point.
    pub t: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

/// `x ↦ 2x ln(1/x) / (1 − x²)`, strictly increasing from (0, 1) onto (0, 1).
pub fn multiplier_function(x: f64) -> f64 {
    2.0 * x * (1.0 / x).ln() / (1.0 - x * x)
}

/// Bisection for `p*`. Returns the midpoint once the bracket's image
/// straddles 1/8 within `tol`.
pub fn solve_pstar(tol: f64) -> f64 {
    let (mut lo, mut hi) = (f64::MIN_POSITIVE, 0.5);
    loop {
        let mid = 0.5 * (lo + hi);
        let r = multiplier_function(mid) - ORIGIN_MULTIPLIER;
        if r.abs() < tol || mid == lo || mid == hi {
            return mid;
        }
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

impl ModelConstants {
    pub fn compute() -> Self {
        let p_star = solve_pstar(1e-15);
        let t = (1.0 - p_star) / (1.0 + p_star);
        let c = t.atanh() / (PI * t);
        ModelConstants { p_star, t, c }
    }

    /// Computed once per process.
    pub fn get() -> &'static ModelConstants {
        static CONSTANTS: OnceLock<ModelConstants> = OnceLock::new();
        CONSTANTS.get_or_init(ModelConstants::compute)
    }

    /// The fixed point `iCt` of `g`.
    pub fn model_fixed_point(&self) -> Complex64 {
        Complex64::new(0.0, self.c * self.t)
    }

    pub fn residual(&self) -> f64 {
        (multiplier_function(self.p_star) - ORIGIN_MULTIPLIER).abs()
    }
}

/// `C = atanh(t)/(πt)`.
pub fn model_constant_c() -> f64 {
    ModelConstants::get().c
}

/// `g(z) = C tan(πz)`; its poles are `1/2 + k`.
pub fn eval_model_g(z: Complex64) -> Result<Complex64> {
    let c = model_constant_c();
    let w = z * PI;
    let cos = w.cos();
    if cos.norm() < 1e-14 {
        return Err(TandelbrotError::PoleInput);
    }
    Ok(c * w.sin() / cos)
}

/// `g′(z) = Cπ / cos²(πz)`.
pub fn eval_model_g_derivative(z: Complex64) -> Result<Complex64> {
    let c = model_constant_c();
    let cos = (z * PI).cos();
    if cos.norm() < 1e-14 {
        return Err(TandelbrotError::PoleInput);
    }
    Ok(c * PI / (cos * cos))
}
