//! Newton's method `N_a(z) = z − f_a(z)/f_a′(z)` for `f_a(z) = z + a e^z`.
//!
//! Written as `N_a(z) = (z − 1)·u/(1 + u)` with `u = a e^z`. The roots of
//! `f_a` are superattracting fixed points, so the only free singular value
//! is the asymptotic value 0, approached as `Re z → −∞`. Along the other
//! tract direction (`u → ∞`) the map tends to `z − 1`.
//!
//! The shared [`Clamp`] tags keep their tract meaning here:
//! `UnderflowToOne` marks the `u → 0` limit (value 0) and
//! `OverflowToRecipAlpha` the `u → ∞` limit (value `z − 1`).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Result, TandelbrotError};
use crate::model::{Clamp, EvalOutcome, EXP_LIMIT, POLE_CUTOFF};
use crate::orbit::{run_orbit, CycleInfo, IterationSettings, OrbitMap, RawFate};
use crate::sphere::SpherePoint;

/// Residual below which a limit point counts as a root of `f_a`.
pub const ROOT_TOL: f64 = 1e-9;
const STEP_TOL: f64 = 1e-10;
const PERSIST: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonParam {
    a: Complex64,
    log_a: Complex64,
}

impl NewtonParam {
    pub fn new(a: Complex64) -> Result<Self> {
        if !(a.re.is_finite() && a.im.is_finite()) {
            return Err(TandelbrotError::InvalidArgument(format!("a = {a}")));
        }
        if a == Complex64::new(0.0, 0.0) {
            return Err(TandelbrotError::AZero);
        }
        Ok(NewtonParam { a, log_a: a.ln() })
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    /// `a e^z` as `e^{z + Log a}`, with the log-modulus for clamping.
    #[inline]
    fn scaled_exp(&self, z: Complex64) -> (Complex64, f64) {
        let e = z + self.log_a;
        (e.exp(), e.re)
    }

    /// `f_a(z) = z + a e^z`.
    pub fn f(&self, z: Complex64) -> Complex64 {
        z + self.scaled_exp(z).0
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> EvalOutcome {
        let (u, log_mod) = self.scaled_exp(z);
        if log_mod < -EXP_LIMIT {
            return EvalOutcome { value: SpherePoint::Finite(Complex64::new(0.0, 0.0)), clamp: Clamp::UnderflowToOne };
        }
        if log_mod > EXP_LIMIT {
            return EvalOutcome { value: SpherePoint::Finite(z - 1.0), clamp: Clamp::OverflowToRecipAlpha };
        }
        let num = (z - 1.0) * u;
        let den = 1.0 + u;
        if num.norm() > POLE_CUTOFF * den.norm() {
            return EvalOutcome { value: SpherePoint::Infinity, clamp: Clamp::PoleOverflowToInfinity };
        }
        EvalOutcome { value: SpherePoint::Finite(num / den), clamp: Clamp::None }
    }

    /// `N_a′ = f f″/(f′)² = (z + u) u / (1 + u)²`.
    #[inline]
    pub fn derivative_finite(&self, z: Complex64) -> Option<Complex64> {
        let (u, log_mod) = self.scaled_exp(z);
        if log_mod < -EXP_LIMIT {
            return Some(Complex64::new(0.0, 0.0));
        }
        let d = if log_mod > EXP_LIMIT {
            Complex64::new(1.0, 0.0)
        } else if u.norm() <= 1.0 {
            let den = 1.0 + u;
            (z + u) * u / (den * den)
        } else {
            let v = u.inv();
            let den = 1.0 + v;
            (z * v + 1.0) / (den * den)
        };
        (d.re.is_finite() && d.im.is_finite()).then_some(d)
    }

    /// The `k`-th pole `Log(−1/a) + 2πik`, a zero of `1 + a e^z`.
    pub fn pole(&self, k: i64) -> Complex64 {
        (-self.a.inv()).ln() + Complex64::new(0.0, 2.0 * PI * k as f64)
    }

    /// `|1 + a e^z|`.
    pub fn pole_residual(&self, z: Complex64) -> f64 {
        (1.0 + self.scaled_exp(z).0).norm()
    }
}

impl OrbitMap for NewtonParam {
    #[inline]
    fn step(&self, z: Complex64) -> SpherePoint {
        self.eval(z).value
    }

    #[inline]
    fn derivative(&self, z: Complex64) -> Option<Complex64> {
        self.derivative_finite(z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NewtonFate {
    ConvergedToRoot { root: Complex64, steps: u32 },
    AttractingCycle { info: CycleInfo, steps: u32 },
    PoleHit { steps: u32 },
    Undecided { steps: u32 },
}

impl NewtonFate {
    pub fn steps(&self) -> u32 {
        match *self {
            NewtonFate::ConvergedToRoot { steps, .. }
            | NewtonFate::AttractingCycle { steps, .. }
            | NewtonFate::PoleHit { steps }
            | NewtonFate::Undecided { steps } => steps,
        }
    }

    pub fn cycle(&self) -> Option<CycleInfo> {
        match self {
            NewtonFate::AttractingCycle { info, .. } => Some(*info),
            _ => None,
        }
    }
}

/// Period of a `period`-cycle of `f` viewed as a cycle of `f^m`.
pub fn period_under_iterate(period: u32, m: u32) -> u32 {
    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    period / gcd(period, m)
}

/// Classifies the orbit of `z0` under `N_a`.
pub fn classify_newton_from(p: &NewtonParam, z0: Complex64, s: &IterationSettings) -> NewtonFate {
    let mut prev = z0;
    let mut still = 0u32;
    let mut root = None;
    let raw = run_orbit(p, z0, s, |n, z| {
        if n > 0 {
            if (z - prev).norm() < STEP_TOL {
                still += 1;
            } else {
                still = 0;
            }
        }
        prev = z;
        if still >= PERSIST && p.f(z).norm() < ROOT_TOL {
            root = Some(z);
            return true;
        }
        false
    });
    match raw {
        RawFate::Absorbed { steps } => NewtonFate::ConvergedToRoot { root: root.unwrap_or(prev), steps },
        // a superattracting fixed point found by cycle detection is a root
        RawFate::Cycle { info, steps } if info.period == 1 && p.f(info.representative).norm() < ROOT_TOL => {
            NewtonFate::ConvergedToRoot { root: info.representative, steps }
        }
        RawFate::Cycle { info, steps } => NewtonFate::AttractingCycle { info, steps },
        RawFate::Pole { steps } => NewtonFate::PoleHit { steps },
        RawFate::Undecided { steps } => NewtonFate::Undecided { steps },
    }
}

/// Classifies the orbit of the free asymptotic value 0.
pub fn classify_newton_orbit(p: &NewtonParam, s: &IterationSettings) -> Result<NewtonFate> {
    s.validate()?;
    Ok(classify_newton_from(p, Complex64::new(0.0, 0.0), s))
}

/// `1 + a e^{N_a^{n−1}(0)}`; zero when the `n`-th iterate of 0 is ∞.
fn newton_virtual_objective(a: Complex64, n: u32) -> Result<Complex64> {
    let p = NewtonParam::new(a)?;
    let mut z = Complex64::new(0.0, 0.0);
    for _ in 1..n {
        z = p.eval(z).value.finite().ok_or(TandelbrotError::DerivativeThroughPole)?;
    }
    let (u, log_mod) = p.scaled_exp(z);
    if log_mod.abs() > EXP_LIMIT {
        return Err(TandelbrotError::DerivativeThroughPole);
    }
    Ok(1.0 + u)
}

/// A parameter `a` for which the orbit of 0 lands on a pole of `N_a`
/// after `n − 1` steps (complex secant iteration from `a_guess`).
pub fn solve_newton_virtual_cycle(n: u32, a_guess: Complex64, s: &IterationSettings) -> Result<Complex64> {
    if n == 0 {
        return Err(TandelbrotError::InvalidArgument("n must be positive".into()));
    }
    let budget = s.max_iter.clamp(20, 200);
    let mut a0 = a_guess * (1.0 + 1e-6);
    let mut f0 = newton_virtual_objective(a0, n)?;
    let mut a1 = a_guess;
    let mut f1 = newton_virtual_objective(a1, n)?;
    for _ in 0..budget {
        if f1.norm() < 1e-14 {
            return Ok(a1);
        }
        let slope = (f1 - f0) / (a1 - a0);
        if slope.norm() == 0.0 || !(slope.re.is_finite() && slope.im.is_finite()) {
            return Err(TandelbrotError::NoConvergence("secant slope degenerate".into()));
        }
        let a2 = a1 - f1 / slope;
        if (a2 - a1).norm() <= 2.0 * f64::EPSILON * a1.norm() {
            return Ok(a2);
        }
        a0 = a1;
        f0 = f1;
        a1 = a2;
        f1 = newton_virtual_objective(a1, n)?;
    }
    Err(TandelbrotError::NoConvergence(format!("no virtual cycle of length {n}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const COPY_CENTER: Complex64 = Complex64::new(-1.1627, 0.1143);

    #[test]
    fn rejects_zero() {
        assert_eq!(NewtonParam::new(c(0.0, 0.0)), Err(TandelbrotError::AZero));
    }

    #[test]
    fn vanishing_derivative_is_a_pole() {
        let p = NewtonParam::new(c(-1.0, 0.0)).unwrap();
        let o = p.eval(c(0.0, 0.0));
        assert!(o.is_pole());
        assert_eq!(o.clamp, Clamp::PoleOverflowToInfinity);
    }

    #[test]
    fn roots_are_fixed() {
        // real root of z + 0.5 e^z via bisection, independent of N_a
        let f = |x: f64| x + 0.5 * x.exp();
        let (mut lo, mut hi) = (-1.0, 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = c(lo, 0.0);
        let p = NewtonParam::new(c(0.5, 0.0)).unwrap();
        assert!((p.eval(root).value.finite().unwrap() - root).norm() < 1e-15);
    }

    #[test]
    fn far_left_is_the_asymptotic_value() {
        let p = NewtonParam::new(COPY_CENTER).unwrap();
        let v = p.eval(c(-50.0, 0.0)).value.finite().unwrap();
        assert!(v.norm() < 1e-18);
        let o = p.eval(c(-800.0, 3.0));
        assert_eq!(o.clamp, Clamp::UnderflowToOne);
        assert_eq!(o.value, SpherePoint::Finite(c(0.0, 0.0)));
        let o = p.eval(c(800.0, 3.0));
        assert_eq!(o.clamp, Clamp::OverflowToRecipAlpha);
        assert_eq!(o.value, SpherePoint::Finite(c(799.0, 3.0)));
    }

    #[test]
    fn pole_examples() {
        assert_eq!(NewtonParam::new(c(-1.0, 0.0)).unwrap().pole(0), c(0.0, 0.0));
        let p = NewtonParam::new(c(1.0, 0.0)).unwrap().pole(0);
        assert!((p - c(0.0, PI)).norm() < 1e-15);
        let q = NewtonParam::new(COPY_CENTER).unwrap();
        for k in -20..=20 {
            assert!(q.pole_residual(q.pole(k)) < 1e-10);
        }
    }

    #[test]
    fn copy_center_has_square_period_three() {
        let p = NewtonParam::new(COPY_CENTER).unwrap();
        let fate = classify_newton_orbit(&p, &IterationSettings::analysis()).unwrap();
        let info = fate.cycle().expect("attracting cycle");
        assert!([3, 6].contains(&info.period), "period {}", info.period);
        assert_eq!(period_under_iterate(info.period, 2), 3);
        assert!(info.multiplier.norm() < 1.0);
    }

    #[test]
    fn small_real_parameter_converges_to_root() {
        let p = NewtonParam::new(c(-0.2, 0.0)).unwrap();
        match classify_newton_orbit(&p, &IterationSettings::analysis()).unwrap() {
            NewtonFate::ConvergedToRoot { root, .. } => {
                assert!(p.f(root).norm() < ROOT_TOL);
                assert!(root.im.abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn minus_one_half_lands_on_a_repelling_two_cycle() {
        // N_a(1) = 0 for every a, and N_{−1/2}(0) = 1 exactly
        let p = NewtonParam::new(c(-0.5, 0.0)).unwrap();
        assert_eq!(p.eval(c(1.0, 0.0)).value, SpherePoint::Finite(c(0.0, 0.0)));
        let fate = classify_newton_orbit(&p, &IterationSettings::analysis()).unwrap();
        assert!(matches!(fate, NewtonFate::Undecided { .. }), "{fate:?}");
    }

    #[test]
    fn virtual_cycle_parameter_hits_a_pole() {
        let s = IterationSettings::analysis();
        // n = 1 is the trivial a = −1
        let a = solve_newton_virtual_cycle(1, c(-0.9, 0.1), &s).unwrap();
        assert!((a - c(-1.0, 0.0)).norm() < 1e-12);
        // the length-3 virtual cycle next to the copy at COPY_CENTER
        let a = solve_newton_virtual_cycle(3, c(-1.09, 0.16), &s).unwrap();
        assert!((a - c(-1.0906421871220746, 0.1565278423263254)).norm() < 1e-12);
        let p = NewtonParam::new(a).unwrap();
        let fate = classify_newton_orbit(&p, &s).unwrap();
        assert_eq!(fate, NewtonFate::PoleHit { steps: 3 });
    }

    #[test]
    fn period_reduction() {
        assert_eq!(period_under_iterate(6, 2), 3);
        assert_eq!(period_under_iterate(3, 2), 3);
        assert_eq!(period_under_iterate(4, 2), 2);
        assert_eq!(period_under_iterate(1, 2), 1);
    }

    proptest! {
        #[test]
        fn derivative_matches_finite_difference(
            ar in -2.0f64..2.0, ai in -2.0f64..2.0,
            x in -5.0f64..3.0, y in -6.0f64..6.0,
        ) {
            prop_assume!(ar.abs() + ai.abs() > 0.05);
            let p = NewtonParam::new(c(ar, ai)).unwrap();
            let z = c(x, y);
            prop_assume!(p.pole_residual(z) > 1e-2);
            let d = p.derivative_finite(z).unwrap();
            prop_assume!(d.norm() > 1e-6);
            let h = 1e-6;
            let fd = (p.eval(z + h).value.finite().unwrap() - p.eval(z - h).value.finite().unwrap()) / (2.0 * h);
            prop_assert!((d - fd).norm() / d.norm() < 1e-6, "d={d} fd={fd}");
        }

        #[test]
        fn fixed_points_are_roots(
            ar in -2.0f64..2.0, ai in -2.0f64..2.0,
            x in -5.0f64..3.0, y in -6.0f64..6.0,
        ) {
            prop_assume!(ar.abs() + ai.abs() > 0.05);
            let p = NewtonParam::new(c(ar, ai)).unwrap();
            let z = c(x, y);
            prop_assume!(p.pole_residual(z) > 1e-3);
            let step = (p.eval(z).value.finite().unwrap() - z).norm();
            let newton_ratio = (p.f(z) / (1.0 + a_exp(&p, z))).norm();
            prop_assert!((step - newton_ratio).abs() <= 1e-9 * (1.0 + step));
        }
    }

    fn a_exp(p: &NewtonParam, z: Complex64) -> Complex64 {
        p.a() * z.exp()
    }
}
