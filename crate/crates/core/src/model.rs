//! The tangent family `T_α(z) = (w − 1)/(αw − 1)`, `w = e^{(α−1)z/8}`.
//!
//! Every map of the family fixes 0 with multiplier 1/8 and has the two
//! asymptotic values 1 and 1/α. Evaluation is overflow safe: along the two
//! tract directions of the essential singularity at infinity the analytic
//! limits (1 and 1/α) are returned explicitly, and near a pole the value is
//! promoted to [`SpherePoint::Infinity`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Result, TandelbrotError};
use crate::sphere::SpherePoint;

/// `ln(f64::MAX)` rounded down; `|e^u|` is finite for `Re u` below this.
pub const EXP_LIMIT: f64 = 709.0;

/// Output magnitude above which a value is treated as a pole hit.
pub const POLE_CUTOFF: f64 = 1e12;

/// The fixed multiplier at the origin.
pub const ORIGIN_MULTIPLIER: f64 = 0.125;

/// How an evaluation reached its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clamp {
    None,
    /// `Re u < −EXP_LIMIT`: `w` underflows and the value is the limit 1.
    UnderflowToOne,
    /// `Re u > EXP_LIMIT`: `w` overflows and the value is the limit 1/α.
    OverflowToRecipAlpha,
    /// The quotient exceeded [`POLE_CUTOFF`].
    PoleOverflowToInfinity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOutcome {
    pub value: SpherePoint,
    pub clamp: Clamp,
}

impl EvalOutcome {
    fn finite(z: Complex64, clamp: Clamp) -> Self {
        EvalOutcome { value: SpherePoint::Finite(z), clamp }
    }

    fn infinity(clamp: Clamp) -> Self {
        EvalOutcome { value: SpherePoint::Infinity, clamp }
    }

    pub fn is_pole(&self) -> bool {
        self.value.is_infinity()
    }
}

/// Computes the Möbius image `(e^u − 1)/(α e^u − 1)` of `e^u` without
/// overflow. Shared by the family itself and its rational approximants.
pub(crate) fn mobius_of_exp(alpha: Complex64, u: Complex64) -> EvalOutcome {
    if u.re < -EXP_LIMIT {
        return EvalOutcome::finite(Complex64::new(1.0, 0.0), Clamp::UnderflowToOne);
    }
    if u.re > EXP_LIMIT {
        return if alpha == Complex64::new(0.0, 0.0) {
            EvalOutcome::infinity(Clamp::OverflowToRecipAlpha)
        } else {
            EvalOutcome::finite(alpha.inv(), Clamp::OverflowToRecipAlpha)
        };
    }
    let one = Complex64::new(1.0, 0.0);
    let (num, den) = if u.re <= 0.0 {
        let w = u.exp();
        (w - one, alpha * w - one)
    } else {
        // divide through by w so nothing overflows
        let v = (-u).exp();
        (one - v, alpha - v)
    };
    quotient_or_pole(num, den)
}

/// Same as [`mobius_of_exp`] but with `w` given directly.
pub(crate) fn mobius(alpha: Complex64, w: Complex64) -> EvalOutcome {
    let one = Complex64::new(1.0, 0.0);
    if !(w.re.is_finite() && w.im.is_finite()) {
        return if alpha == Complex64::new(0.0, 0.0) {
            EvalOutcome::infinity(Clamp::OverflowToRecipAlpha)
        } else {
            EvalOutcome::finite(alpha.inv(), Clamp::OverflowToRecipAlpha)
        };
    }
    if w.norm() <= 1.0 {
        quotient_or_pole(w - one, alpha * w - one)
    } else {
        let v = w.inv();
        quotient_or_pole(one - v, alpha - v)
    }
}

fn quotient_or_pole(num: Complex64, den: Complex64) -> EvalOutcome {
    // |num/den| > cutoff  <=>  |num| > cutoff * |den|, tested without dividing
    if num.norm() > POLE_CUTOFF * den.norm() {
        return EvalOutcome::infinity(Clamp::PoleOverflowToInfinity);
    }
    EvalOutcome::finite(num / den, Clamp::None)
}

/// A member `T_α` of the family; `α ≠ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentParam {
    alpha: Complex64,
}

impl TangentParam {
    pub fn new(alpha: Complex64) -> Result<Self> {
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(TandelbrotError::InvalidArgument(format!("alpha = {alpha}")));
        }
        if alpha == Complex64::new(1.0, 0.0) {
            return Err(TandelbrotError::AlphaIsOne);
        }
        Ok(TangentParam { alpha })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    /// The free asymptotic value 1/α.
    pub fn free_value(&self) -> Result<Complex64> {
        if self.is_zero() {
            return Err(TandelbrotError::AlphaZero);
        }
        Ok(self.alpha.inv())
    }

    fn is_zero(&self) -> bool {
        self.alpha == Complex64::new(0.0, 0.0)
    }

    /// `(α − 1)z/8`, the exponent of `w`.
    #[inline]
    pub fn exponent(&self, z: Complex64) -> Complex64 {
        (self.alpha - 1.0) * z / 8.0
    }

    /// `T_α(z)` for finite `z`.
    #[inline]
    pub fn eval_finite(&self, z: Complex64) -> EvalOutcome {
        mobius_of_exp(self.alpha, self.exponent(z))
    }

    /// `T_α(z)` on the sphere. Infinity is the essential singularity.
    pub fn eval(&self, z: SpherePoint) -> Result<EvalOutcome> {
        match z {
            SpherePoint::Finite(z) => Ok(self.eval_finite(z)),
            SpherePoint::Infinity => Err(TandelbrotError::EssentialSingularityInput),
        }
    }

    /// `T′_α(z) = (α−1)² w / (8 (αw − 1)²)`; `None` at a pole.
    #[inline]
    pub fn derivative_finite(&self, z: Complex64) -> Option<Complex64> {
        let u = self.exponent(z);
        if u.re < -EXP_LIMIT {
            return Some(Complex64::new(0.0, 0.0));
        }
        let am1 = self.alpha - 1.0;
        let d = if u.re <= 0.0 {
            let w = u.exp();
            let den = self.alpha * w - 1.0;
            am1 * am1 * w / (8.0 * den * den)
        } else {
            let v = (-u).exp();
            let den = self.alpha - v;
            am1 * am1 * v / (8.0 * den * den)
        };
        (d.re.is_finite() && d.im.is_finite()).then_some(d)
    }

    pub fn eval_derivative(&self, z: Complex64) -> Result<Complex64> {
        if self.eval_finite(z).is_pole() {
            return Err(TandelbrotError::PoleInput);
        }
        self.derivative_finite(z).ok_or(TandelbrotError::PoleInput)
    }

    /// The `k`-th pole `8(−Log α + 2πik)/(α − 1)` (principal logarithm).
    ///
    /// This labeling is by branch of the logarithm; it is not claimed to
    /// agree with any dynamically defined labeling of the poles.
    pub fn pole(&self, k: i64) -> Result<Complex64> {
        if self.is_zero() {
            return Err(TandelbrotError::NoPoles);
        }
        let log = -self.alpha.ln() + Complex64::new(0.0, 2.0 * PI * k as f64);
        Ok(8.0 * log / (self.alpha - 1.0))
    }

    /// `|α e^{(α−1)z/8} − 1|`; zero exactly at the poles.
    pub fn pole_residual(&self, z: Complex64) -> f64 {
        (self.alpha * self.exponent(z).exp() - 1.0).norm()
    }

    /// Index of the pole closest to `z` under the principal labeling.
    pub fn nearest_pole_index(&self, z: Complex64) -> Result<i64> {
        if self.is_zero() {
            return Err(TandelbrotError::NoPoles);
        }
        // solve (α−1)z/8 = −Log α + 2πik for real k and round
        let k = (self.exponent(z) + self.alpha.ln()) / Complex64::new(0.0, 2.0 * PI);
        Ok(k.re.round() as i64)
    }

    /// `z_α = 1 + 1/α`, the only candidate for a second fixed point of
    /// multiplier 1/8. It is a fixed point only at symmetric parameters.
    pub fn special_fixed_point(&self) -> Result<Complex64> {
        Ok(1.0 + self.free_value()?)
    }

    /// Normalized residual `α² e^{(α²−1)/(8α)} − 1` of the basin-switching
    /// symmetry relation `e^{(α²−1)/(8α)} = 1/α²`.
    ///
    /// Scaling by α² leaves the zero set unchanged and keeps the value well
    /// conditioned for small |α|, where `1/α²` is in the thousands.
    pub fn symmetry_residual(&self) -> Result<Complex64> {
        if self.is_zero() {
            return Err(TandelbrotError::AlphaZero);
        }
        Ok(symmetry_residual_unchecked(self.alpha))
    }

    /// Transports `(α, z)` through the conjugacy `L(z) = αz`, which maps
    /// `T_α` onto `T_{1/α}`: `α T_α(z) = T_{1/α}(αz)`.
    pub fn involution_transport(&self, z: Complex64) -> Result<(TangentParam, Complex64)> {
        let inv = self.free_value()?;
        Ok((TangentParam { alpha: inv }, self.alpha * z))
    }
}

pub(crate) fn symmetry_residual_unchecked(alpha: Complex64) -> Complex64 {
    let e = (alpha * alpha - 1.0) / (8.0 * alpha);
    alpha * alpha * e.exp() - 1.0
}

/// d/dα of [`symmetry_residual_unchecked`].
pub(crate) fn symmetry_residual_derivative(alpha: Complex64) -> Complex64 {
    let e = (alpha * alpha - 1.0) / (8.0 * alpha);
    let de = (1.0 + (alpha * alpha).inv()) / 8.0;
    let ex = e.exp();
    2.0 * alpha * ex + alpha * alpha * ex * de
}
