//! Per-parameter analysis of the Tandelbrot set
//! `𝒯 = {α : T_α^n(1/α) ↛ 0}`.
//!
//! For `|α| < 1` the closed disk of radius 2 lies in the basin of 0 and is
//! forward invariant, so "the orbit of 1/α enters the trap disk" is a
//! definitive escape from 𝒯. Everything else (attracting cycle, pole hit,
//! exhausted budget) is reported as a member, the last one tentatively.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, TandelbrotError};
use crate::json::ComplexJson;
use crate::model::{symmetry_residual_derivative, symmetry_residual_unchecked, TangentParam, EXP_LIMIT};
use crate::orbit::{classify_orbit_unchecked, CycleInfo, IterationSettings, OrbitFate};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    /// `tentative` is set when the budget ran out without a decision.
    InT { tentative: bool },
    /// The orbit of 1/α entered the trap disk at `escape_step`.
    NotInT { escape_step: u32 },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::InT { .. })
    }

    fn from_fate(fate: &OrbitFate) -> Self {
        match *fate {
            OrbitFate::CapturedByZero { steps } => Membership::NotInT { escape_step: steps },
            OrbitFate::AttractingCycle { .. } | OrbitFate::PoleHit { .. } => {
                Membership::InT { tentative: false }
            }
            OrbitFate::Undecided { .. } => Membership::InT { tentative: true },
        }
    }
}

/// Validates α for parameter-plane work: `0 < |α| < 1`.
fn free_param(alpha: Complex64) -> Result<TangentParam> {
    let p = TangentParam::new(alpha)?;
    if alpha == Complex64::new(0.0, 0.0) {
        return Err(TandelbrotError::AlphaZero);
    }
    let r = alpha.norm();
    if r >= 1.0 {
        return Err(TandelbrotError::ParamOutsideDisk(r));
    }
    Ok(p)
}

/// Fate of the free asymptotic value 1/α.
pub fn free_orbit_fate(alpha: Complex64, s: &IterationSettings) -> Result<OrbitFate> {
    let p = free_param(alpha)?;
    s.validate()?;
    Ok(classify_orbit_unchecked(&p, alpha.inv(), s))
}

pub fn tandelbrot_membership(alpha: Complex64, s: &IterationSettings) -> Result<Membership> {
    Ok(Membership::from_fate(&free_orbit_fate(alpha, s)?))
}

/// `∂T_α(z)/∂α`.
fn param_derivative(p: &TangentParam, z: Complex64) -> Complex64 {
    let alpha = p.alpha();
    let u = p.exponent(z);
    if u.re <= 0.0 {
        let w = u.exp();
        let den = alpha * w - 1.0;
        ((alpha - 1.0) * w * z / 8.0 - w * (w - 1.0)) / (den * den)
    } else {
        let v = (-u).exp();
        let den = alpha - v;
        ((alpha - 1.0) * z * v / 8.0 - (1.0 - v)) / (den * den)
    }
}

/// Objective for virtual cycles: `α e^{(α−1) z/8} − 1` at
/// `z = T_α^{n−1}(1/α)`, optionally with its α-derivative.
///
/// Returns `Err(DerivativeThroughPole)` when an intermediate iterate is a
/// pole; the derivative is `None` when an intermediate step was clamped.
fn virtual_cycle_objective(
    alpha: Complex64,
    n: u32,
) -> Result<(Complex64, Complex64, Option<Complex64>)> {
    let p = TangentParam::new(alpha)?;
    let mut z = alpha.inv();
    let mut dz = -(alpha * alpha).inv();
    let mut derivative_ok = true;
    for _ in 1..n {
        let out = p.eval_finite(z);
        let next = out.value.finite().ok_or(TandelbrotError::DerivativeThroughPole)?;
        if out.clamp != crate::model::Clamp::None {
            derivative_ok = false;
        } else {
            let d = p.derivative_finite(z).ok_or(TandelbrotError::DerivativeThroughPole)?;
            dz = param_derivative(&p, z) + d * dz;
        }
        z = next;
    }
    let u = p.exponent(z);
    if u.re.abs() > EXP_LIMIT {
        return Err(TandelbrotError::DerivativeThroughPole);
    }
    let e = u.exp();
    let value = alpha * e - 1.0;
    let derivative = derivative_ok.then(|| e * (1.0 + alpha * (z + (alpha - 1.0) * dz) / 8.0));
    Ok((value, z, derivative))
}

/// A parameter whose free value lands on a pole after `n − 1` steps, so
/// that `T_α^n(1/α) = ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VirtualCycle {
    #[serde(serialize_with = "ser_complex")]
    pub alpha: Complex64,
    pub n: u32,
    /// Principal-branch index of the pole that is hit.
    pub pole_index: i64,
    /// `|T_α^{n−1}(1/α) − pole(α, pole_index)|`.
    pub pole_distance: f64,
}

/// Newton's method in the parameter on the virtual-cycle objective, with a
/// complex secant step whenever the derivative is unavailable.
pub fn solve_virtual_cycle(n: u32, alpha_guess: Complex64, s: &IterationSettings) -> Result<VirtualCycle> {
    if n == 0 {
        return Err(TandelbrotError::InvalidArgument("n must be positive".into()));
    }
    free_param(alpha_guess)?;
    let budget = s.max_iter.clamp(20, 200);
    let mut alpha = alpha_guess;
    let mut prev: Option<(Complex64, Complex64)> = None;
    for _ in 0..budget {
        let (value, z, derivative) = virtual_cycle_objective(alpha, n)?;
        if value.norm() < 1e-14 {
            return finish_virtual_cycle(alpha, n, z);
        }
        let step = match derivative {
            Some(d) if d.norm() > 0.0 => value / d,
            _ => {
                let (pa, pv) = prev.unwrap_or((alpha * (1.0 + 1e-7), {
                    let a = alpha * (1.0 + 1e-7);
                    virtual_cycle_objective(a, n)?.0
                }));
                let slope = (value - pv) / (alpha - pa);
                if slope.norm() == 0.0 || !slope.re.is_finite() {
                    return Err(TandelbrotError::DerivativeThroughPole);
                }
                value / slope
            }
        };
        prev = Some((alpha, value));
        let next = alpha - step;
        if !(next.re.is_finite() && next.im.is_finite()) || next.norm() >= 1.0 || next.norm() == 0.0 {
            return Err(TandelbrotError::NoConvergence("parameter left the unit disk".into()));
        }
        if (next - alpha).norm() < 1e-17 {
            let (_, z, _) = virtual_cycle_objective(next, n)?;
            return finish_virtual_cycle(next, n, z);
        }
        alpha = next;
    }
    Err(TandelbrotError::NoConvergence(format!("virtual cycle of length {n} not found")))
}

fn finish_virtual_cycle(alpha: Complex64, n: u32, z: Complex64) -> Result<VirtualCycle> {
    let p = TangentParam::new(alpha)?;
    let k = p.nearest_pole_index(z)?;
    let pole_distance = (z - p.pole(k)?).norm();
    if pole_distance >= 1e-9 {
        return Err(TandelbrotError::NoConvergence(format!(
            "landed {pole_distance:e} away from pole {k}"
        )));
    }
    Ok(VirtualCycle { alpha, n, pole_index: k, pole_distance })
}

/// Axis-aligned rectangle in the parameter plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl ParamBox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        ParamBox { re_min, re_max, im_min, im_max }
    }

    pub fn around(center: Complex64, half_width: f64) -> Self {
        ParamBox::new(
            center.re - half_width,
            center.re + half_width,
            center.im - half_width,
            center.im + half_width,
        )
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }
}

const SYMMETRY_SEEDS: usize = 48;

/// Roots of the symmetry residual in `bx`, by grid seeding and Newton
/// polishing. Each returned root has residual below 1e−12; the list is
/// sorted by real then imaginary part.
pub fn find_symmetry_parameters(bx: &ParamBox) -> Vec<Complex64> {
    let mut roots: Vec<Complex64> = Vec::new();
    let dx = (bx.re_max - bx.re_min) / SYMMETRY_SEEDS as f64;
    let dy = (bx.im_max - bx.im_min) / SYMMETRY_SEEDS as f64;
    for i in 0..SYMMETRY_SEEDS {
        for j in 0..SYMMETRY_SEEDS {
            let seed = Complex64::new(
                bx.re_min + (i as f64 + 0.5) * dx,
                bx.im_min + (j as f64 + 0.5) * dy,
            );
            let Some(root) = polish_symmetry_root(seed) else { continue };
            if !bx.contains(root) {
                continue;
            }
            let tol = 1e-10 * root.norm();
            if roots.iter().all(|r| (r - root).norm() > tol) {
                roots.push(root);
            }
        }
    }
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal).then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
    });
    roots
}

fn polish_symmetry_root(seed: Complex64) -> Option<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let mut a = seed;
    for _ in 0..60 {
        if a.norm() == 0.0 || a == one {
            return None;
        }
        let r = symmetry_residual_unchecked(a);
        if !(r.re.is_finite() && r.im.is_finite()) {
            return None;
        }
        if r.norm() < 1e-13 {
            break;
        }
        let d = symmetry_residual_derivative(a);
        let next = a - r / d;
        if !(next.re.is_finite() && next.im.is_finite()) {
            return None;
        }
        let done = (next - a).norm() <= 2.0 * f64::EPSILON * a.norm();
        a = next;
        if done {
            break;
        }
    }
    (a.norm() > 0.0 && a != one && symmetry_residual_unchecked(a).norm() < 1e-12).then_some(a)
}

fn real_map(alpha: f64, x: f64) -> f64 {
    let u = (alpha - 1.0) * x / 8.0;
    if u <= 0.0 {
        let w = u.exp();
        (w - 1.0) / (alpha * w - 1.0)
    } else {
        let v = (-u).exp();
        (1.0 - v) / (alpha - v)
    }
}

fn real_derivative(alpha: f64, x: f64) -> f64 {
    let u = (alpha - 1.0) * x / 8.0;
    let am1 = alpha - 1.0;
    if u <= 0.0 {
        let w = u.exp();
        let den = alpha * w - 1.0;
        am1 * am1 * w / (8.0 * den * den)
    } else {
        let v = (-u).exp();
        let den = alpha - v;
        am1 * am1 * v / (8.0 * den * den)
    }
}

/// Real Newton solve of `T_α(x) = x` from `x0`; returns an attracting
/// fixed point or `None`.
fn attracting_real_fixed_point(alpha: f64, x0: f64) -> Option<f64> {
    let mut x = x0;
    for _ in 0..400 {
        let g = real_map(alpha, x) - x;
        if !g.is_finite() {
            return None;
        }
        if g.abs() <= 1e-13 * x.abs().max(1.0) {
            let d = real_derivative(alpha, x);
            return (d.abs() < 1.0).then_some(x);
        }
        let slope = real_derivative(alpha, x) - 1.0;
        if slope == 0.0 || !slope.is_finite() {
            return None;
        }
        let next = x - g / slope;
        if !next.is_finite() || (next - x0).abs() > 0.25 * x0.abs().max(1.0) {
            return None;
        }
        x = next;
    }
    None
}

/// Left end α₀ < 0 of the real interval `(α₀, 0)` of the period-one
/// hyperbolic component.
///
/// The real attracting fixed point is continued from α = −0.001 in steps
/// of 1e−4, halving the step whenever continuation fails, until the
/// bracket around the neutral parameter is tight enough that
/// `|T′_{α₀}(p(α₀)) − 1| ≤ tol`.
pub fn main_component_left_endpoint(tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(TandelbrotError::InvalidArgument(format!("tol = {tol}")));
    }
    let mut alpha = -0.001;
    let mut x = attracting_real_fixed_point(alpha, 1.0 / alpha)
        .ok_or_else(|| TandelbrotError::ContinuationLost("no fixed point at -0.001".into()))?;
    let mut step = 1e-4;
    loop {
        if (1.0 - real_derivative(alpha, x)).abs() <= tol {
            return Ok(alpha);
        }
        if step < f64::EPSILON * alpha.abs() {
            return Err(TandelbrotError::ContinuationLost(format!(
                "bracket collapsed at {alpha} with |T'| = {}",
                real_derivative(alpha, x)
            )));
        }
        let trial = alpha - step;
        if trial <= -1.0 {
            return Err(TandelbrotError::ContinuationLost("reached alpha = -1".into()));
        }
        match attracting_real_fixed_point(trial, x) {
            Some(next) => {
                alpha = trial;
                x = next;
            }
            None => step *= 0.5,
        }
    }
}

/// The real attracting fixed point continued to `alpha`, if it exists.
pub fn main_component_fixed_point(alpha: f64) -> Option<(f64, f64)> {
    attracting_real_fixed_point(alpha, 1.0 / alpha).map(|x| (x, real_derivative(alpha, x)))
}

/// Multiplier of the attracting cycle that captures 1/α.
pub fn multiplier_map(alpha: Complex64, s: &IterationSettings) -> Result<Complex64> {
    match free_orbit_fate(alpha, s)? {
        OrbitFate::AttractingCycle { info, .. } => Ok(info.multiplier),
        _ => Err(TandelbrotError::NotHyperbolic),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamReport {
    pub alpha: Complex64,
    pub membership: Membership,
    pub fate: OrbitFate,
    pub cycle: Option<CycleInfo>,
    pub symmetry_residual: Complex64,
    pub nearest_poles: Vec<Complex64>,
}

const REPORTED_POLES: usize = 5;

pub fn analyze_parameter(alpha: Complex64, s: &IterationSettings) -> Result<ParamReport> {
    let p = free_param(alpha)?;
    s.validate()?;
    let fate = classify_orbit_unchecked(&p, alpha.inv(), s);
    let mut poles: Vec<Complex64> = (-4..=4).filter_map(|k| p.pole(k).ok()).collect();
    poles.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap_or(Ordering::Equal));
    poles.truncate(REPORTED_POLES);
    Ok(ParamReport {
        alpha,
        membership: Membership::from_fate(&fate),
        fate,
        cycle: fate.cycle(),
        symmetry_residual: p.symmetry_residual()?,
        nearest_poles: poles,
    })
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    ComplexJson::from(*z).serialize(s)
}

/// Flat JSON shape of a [`ParamReport`].
#[derive(Debug, Clone, Serialize)]
pub struct ParamReportJson {
    pub alpha: ComplexJson,
    pub membership: &'static str,
    pub period: Option<u32>,
    pub tentative: bool,
    pub escape_step: Option<u32>,
    pub fate: &'static str,
    pub steps: u32,
    pub multiplier: Option<ComplexJson>,
    pub multiplier_abs: Option<f64>,
    pub representative: Option<ComplexJson>,
    pub symmetry_residual: ComplexJson,
    pub nearest_poles: Vec<ComplexJson>,
}

pub fn fate_name(fate: &OrbitFate) -> &'static str {
    match fate {
        OrbitFate::CapturedByZero { .. } => "captured",
        OrbitFate::AttractingCycle { .. } => "cycle",
        OrbitFate::PoleHit { .. } => "pole",
        OrbitFate::Undecided { .. } => "undecided",
    }
}

impl From<&ParamReport> for ParamReportJson {
    fn from(r: &ParamReport) -> Self {
        let (membership, tentative, escape_step) = match r.membership {
            Membership::InT { tentative } => ("InT", tentative, None),
            Membership::NotInT { escape_step } => ("NotInT", false, Some(escape_step)),
        };
        ParamReportJson {
            alpha: r.alpha.into(),
            membership,
            period: r.cycle.map(|c| c.period),
            tentative,
            escape_step,
            fate: fate_name(&r.fate),
            steps: r.fate.steps(),
            multiplier: r.cycle.map(|c| c.multiplier.into()),
            multiplier_abs: r.cycle.map(|c| c.multiplier.norm()),
            representative: r.cycle.map(|c| c.representative.into()),
            symmetry_residual: r.symmetry_residual.into(),
            nearest_poles: r.nearest_poles.iter().map(|&z| z.into()).collect(),
        }
    }
}

impl ParamReport {
    pub fn to_json(&self) -> String {
        crate::json::to_json(&ParamReportJson::from(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const THREE_CYCLE: Complex64 = Complex64::new(-0.021, 0.009);

    #[test]
    fn membership_examples() {
        let s = IterationSettings::analysis();
        assert!(tandelbrot_membership(THREE_CYCLE, &s).unwrap().is_member());
        assert!(matches!(tandelbrot_membership(c(0.8, 0.0), &s).unwrap(), Membership::NotInT { .. }));
        assert_eq!(tandelbrot_membership(c(0.0, 0.0), &s), Err(TandelbrotError::AlphaZero));
        assert!(matches!(
            tandelbrot_membership(c(0.0, 1.2), &s),
            Err(TandelbrotError::ParamOutsideDisk(_))
        ));
    }

    #[test]
    fn parameters_outside_half_disk_escape() {
        let s = IterationSettings::analysis().with_max_iter(10_000);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let th = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = rng.gen_range(0.5..0.999);
            let alpha = Complex64::from_polar(r, th);
            assert!(!tandelbrot_membership(alpha, &s).unwrap().is_member(), "{alpha}");
        }
        // 0.49 e^{iθ} may go either way but must be classified
        for _ in 0..50 {
            let alpha = Complex64::from_polar(0.49, rng.gen_range(0.0..std::f64::consts::TAU));
            tandelbrot_membership(alpha, &s).unwrap();
        }
    }

    #[test]
    fn escape_is_stable_under_more_iterations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let low = IterationSettings::analysis().with_max_iter(200);
        let high = IterationSettings::analysis().with_max_iter(5000);
        for _ in 0..400 {
            let alpha = c(rng.gen_range(-0.1..0.05), rng.gen_range(-0.06..0.06));
            if alpha.norm() < 1e-6 {
                continue;
            }
            if let Membership::NotInT { escape_step } = tandelbrot_membership(alpha, &low).unwrap() {
                assert_eq!(
                    tandelbrot_membership(alpha, &high).unwrap(),
                    Membership::NotInT { escape_step }
                );
            }
        }
    }

    #[test]
    fn capture_agrees_with_transported_orbit() {
        // 1/α captured by T_α  <=>  1 = α·(1/α) captured by T_{1/α} in the disk L(D(0,2))
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = IterationSettings::analysis().with_max_iter(2000);
        for _ in 0..300 {
            let alpha = Complex64::from_polar(rng.gen_range(0.005..0.6), rng.gen_range(0.0..std::f64::consts::TAU));
            let direct = tandelbrot_membership(alpha, &s).unwrap();
            let (q, w) = TangentParam::new(alpha).unwrap().involution_transport(alpha.inv()).unwrap();
            let radius = 2.0 * alpha.norm();
            let mut z = Some(w);
            let mut captured_at = None;
            for step in 0..=s.max_iter {
                let Some(v) = z else { break };
                if v.norm() <= radius {
                    captured_at = Some(step);
                    break;
                }
                z = q.eval_finite(v).value.finite();
            }
            match direct {
                Membership::NotInT { escape_step } => assert_eq!(captured_at, Some(escape_step), "{alpha}"),
                Membership::InT { .. } => assert_eq!(captured_at, None, "{alpha}"),
            }
        }
    }

    #[test]
    fn virtual_cycle_of_length_one() {
        let s = IterationSettings::analysis();
        let vc = solve_virtual_cycle(1, c(-0.0155, 0.017), &s).unwrap();
        let alpha = vc.alpha;
        // independent check: the denominator of T_α vanishes at 1/α
        let den = alpha * ((alpha - 1.0) * alpha.inv() / 8.0).exp() - 1.0;
        assert!(den.norm() < 1e-9);
        assert!(vc.pole_distance < 1e-9);
        // direct iteration blows up at step n
        let p = TangentParam::new(alpha).unwrap();
        assert!(p.eval_finite(alpha.inv()).is_pole());
        // both sides of the boundary are present on a small circle
        let s = IterationSettings::rendering();
        let members: Vec<bool> = (0..64)
            .map(|i| {
                let q = alpha + Complex64::from_polar(1e-3, i as f64 * std::f64::consts::TAU / 64.0);
                tandelbrot_membership(q, &s).unwrap().is_member()
            })
            .collect();
        assert!(members.iter().any(|&m| m) && members.iter().any(|&m| !m));
    }

    #[test]
    fn virtual_cycle_of_length_two() {
        let s = IterationSettings::analysis();
        // seed near the n = 1 solution; the n = 2 objective has roots accumulating there
        let vc = solve_virtual_cycle(2, c(-0.0157, 0.0172), &s);
        if let Ok(vc) = vc {
            let p = TangentParam::new(vc.alpha).unwrap();
            let z1 = p.eval_finite(vc.alpha.inv()).value.finite().unwrap();
            assert!((z1 - p.pole(vc.pole_index).unwrap()).norm() < 1e-9);
            assert!(p.eval_finite(z1).is_pole());
        }
    }

    #[test]
    fn virtual_cycle_rejects_bad_input() {
        let s = IterationSettings::analysis();
        assert!(matches!(solve_virtual_cycle(0, THREE_CYCLE, &s), Err(TandelbrotError::InvalidArgument(_))));
        assert_eq!(solve_virtual_cycle(1, c(0.0, 0.0), &s), Err(TandelbrotError::AlphaZero));
    }

    #[test]
    fn parameter_derivative_matches_difference() {
        let alpha = c(-0.03, 0.02);
        let z = c(3.0, -1.0);
        let h = 1e-7;
        let f = |a: Complex64, z: Complex64| TangentParam::new(a).unwrap().eval_finite(z).value.finite().unwrap();
        let fd = (f(alpha + h, z) - f(alpha - h, z)) / (2.0 * h);
        let d = param_derivative(&TangentParam::new(alpha).unwrap(), z);
        assert!((d - fd).norm() / d.norm() < 1e-6);
        let z = c(-300.0, 10.0); // Re u > 0 branch
        let fd = (f(alpha + h, z) - f(alpha - h, z)) / (2.0 * h);
        let d = param_derivative(&TangentParam::new(alpha).unwrap(), z);
        assert!((d - fd).norm() / d.norm().max(1e-12) < 1e-5);
    }

    #[test]
    fn symmetry_parameters_near_known_values() {
        let roots = find_symmetry_parameters(&ParamBox::new(-0.02, -0.01, -0.001, 0.001));
        assert!(roots.iter().any(|r| (r - c(-0.01484108, 0.0)).norm() < 1e-5), "{roots:?}");
        let target = c(-0.00801734, 0.00675639);
        let roots = find_symmetry_parameters(&ParamBox::around(target, 1e-3));
        assert!(roots.iter().any(|r| (r - target).norm() < 1e-5), "{roots:?}");
        for r in &roots {
            assert!(symmetry_residual_unchecked(*r).norm() < 1e-12);
        }
        for r in find_symmetry_parameters(&ParamBox::new(0.2, 0.3, 0.0, 0.1)) {
            assert!(symmetry_residual_unchecked(r).norm() < 1e-12);
        }
    }

    #[test]
    fn symmetric_root_equals_minus_pstar() {
        // e^{(α²−1)/(8α)} = 1/α² at α = −p reduces to the equation for p*
        let roots = find_symmetry_parameters(&ParamBox::new(-0.02, -0.01, -0.001, 0.001));
        let p = crate::conjugacy::ModelConstants::get().p_star;
        assert!(roots.iter().any(|r| (r + p).norm() < 1e-12));
    }

    #[test]
    fn main_component_endpoint() {
        let tol = 1e-6;
        let a0 = main_component_left_endpoint(tol).unwrap();
        assert!(a0 < -0.001 && a0 > -0.05, "{a0}");
        let (_, d) = main_component_fixed_point(a0).unwrap();
        assert!((d.abs() - 1.0).abs() <= tol);
        let (_, d) = main_component_fixed_point(a0 + 1e-4).unwrap();
        assert!(d.abs() < 1.0);
        assert!(main_component_fixed_point(a0 - 1e-4).is_none());
    }

    #[test]
    fn small_negative_parameter_is_on_period_one_branch() {
        let alpha = -0.001;
        // real Newton on T_α(x) = x, seeded at 1/α
        let (x, d) = main_component_fixed_point(alpha).unwrap();
        assert!(x < 0.0 && d.abs() < 1.0);
        let rho = multiplier_map(c(alpha, 0.0), &IterationSettings::analysis()).unwrap();
        assert!(rho.im.abs() < 1e-15);
        assert!(rho.re > 0.0 && rho.re < 1.0);
    }

    #[test]
    fn multiplier_map_examples() {
        let s = IterationSettings::analysis();
        let rho = multiplier_map(THREE_CYCLE, &s).unwrap();
        assert!(rho.norm() > 0.0 && rho.norm() < 1.0);
        assert_eq!(multiplier_map(c(0.8, 0.0), &s), Err(TandelbrotError::NotHyperbolic));
    }

    #[test]
    fn report_examples() {
        let s = IterationSettings::analysis();
        let r = analyze_parameter(THREE_CYCLE, &s).unwrap();
        assert_eq!(r.membership, Membership::InT { tentative: false });
        assert_eq!(r.cycle.unwrap().period, 3);
        assert!(r.to_json().contains(r#""membership":"InT","period":3"#));

        let r = analyze_parameter(c(0.8, 0.0), &s).unwrap();
        assert!(matches!(r.membership, Membership::NotInT { .. }));
        assert!(r.cycle.is_none());

        let r = analyze_parameter(c(-0.01484108, 0.0), &s).unwrap();
        assert!(r.symmetry_residual.norm() < 1e-4);
        assert_eq!(r.nearest_poles.len(), REPORTED_POLES);

        assert_eq!(analyze_parameter(c(1.0, 0.0), &s), Err(TandelbrotError::AlphaIsOne));
        assert_eq!(analyze_parameter(c(0.0, 0.0), &s), Err(TandelbrotError::AlphaZero));
    }
}
