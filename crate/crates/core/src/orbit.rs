//! Orbit iteration, fate classification and attracting-cycle refinement.
//!
//! The engine is generic over [`OrbitMap`] so the tangent family and the
//! Newton family share Brent cycle detection and Newton refinement. Each
//! family supplies its own absorbing test (trap disk around 0, or
//! convergence to a root).

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, TandelbrotError};
use crate::model::{TangentParam, POLE_CUTOFF};
use crate::sphere::SpherePoint;

/// A holomorphic self-map that can be iterated and differentiated.
pub trait OrbitMap {
    /// One step of the map; `Infinity` marks a pole hit.
    fn step(&self, z: Complex64) -> SpherePoint;
    /// Derivative at a finite non-pole point.
    fn derivative(&self, z: Complex64) -> Option<Complex64>;
}

impl OrbitMap for TangentParam {
    #[inline]
    fn step(&self, z: Complex64) -> SpherePoint {
        self.eval_finite(z).value
    }

    #[inline]
    fn derivative(&self, z: Complex64) -> Option<Complex64> {
        self.derivative_finite(z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationSettings {
    pub max_iter: u32,
    /// Radius of the trap disk around 0. Radius 2 is proven to be
    /// forward invariant only for |α| < 1.
    pub trap_radius: f64,
    pub pole_cutoff: f64,
    /// Distance under which two orbit points count as a repeat.
    pub cycle_tol: f64,
    /// Residual target for Newton refinement of a cycle.
    pub refine_tol: f64,
}

impl IterationSettings {
    /// Defaults for single-parameter analysis (10⁵ iterations).
    pub fn analysis() -> Self {
        IterationSettings {
            max_iter: 100_000,
            trap_radius: 2.0,
            pole_cutoff: POLE_CUTOFF,
            cycle_tol: 1e-9,
            refine_tol: 1e-12,
        }
    }

    /// Defaults for per-pixel rendering (5000 iterations).
    pub fn rendering() -> Self {
        IterationSettings { max_iter: 5000, ..Self::analysis() }
    }

    pub fn with_max_iter(mut self, max_iter: u32) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if self.max_iter == 0
            || !positive(self.trap_radius)
            || !positive(self.pole_cutoff)
            || !positive(self.cycle_tol)
            || !positive(self.refine_tol)
        {
            return Err(TandelbrotError::InvalidArgument(format!("{self:?}")));
        }
        Ok(())
    }
}

impl Default for IterationSettings {
    fn default() -> Self {
        Self::analysis()
    }
}

/// A refined periodic cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleInfo {
    pub period: u32,
    pub representative: Complex64,
    /// Product of the derivative along the cycle.
    pub multiplier: Complex64,
}

impl CycleInfo {
    pub fn is_attracting(&self) -> bool {
        self.multiplier.norm() < 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrbitFate {
    /// The orbit entered the trap disk at `steps`.
    CapturedByZero { steps: u32 },
    AttractingCycle { info: CycleInfo, steps: u32 },
    /// The iterate at `steps` was a pole: the orbit hit the essential
    /// singularity and stops there.
    PoleHit { steps: u32 },
    Undecided { steps: u32 },
}

impl OrbitFate {
    pub fn steps(&self) -> u32 {
        match *self {
            OrbitFate::CapturedByZero { steps }
            | OrbitFate::AttractingCycle { steps, .. }
            | OrbitFate::PoleHit { steps }
            | OrbitFate::Undecided { steps } => steps,
        }
    }

    pub fn cycle(&self) -> Option<CycleInfo> {
        match self {
            OrbitFate::AttractingCycle { info, .. } => Some(*info),
            _ => None,
        }
    }
}

/// Result of the generic engine, before a family names its absorbing state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum RawFate {
    Absorbed { steps: u32 },
    Cycle { info: CycleInfo, steps: u32 },
    Pole { steps: u32 },
    Undecided { steps: u32 },
}

/// `T^n(z)` together with the derivative product along the way.
fn iterate_with_derivative<M: OrbitMap>(
    map: &M,
    z: Complex64,
    n: u32,
) -> Option<(Complex64, Complex64)> {
    let mut z = z;
    let mut d = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        d *= map.derivative(z)?;
        z = map.step(z).finite()?;
    }
    Some((z, d))
}

/// `T^n(z)`, or `None` if the orbit hits a pole first.
pub fn iterate<M: OrbitMap>(map: &M, z: Complex64, n: u32) -> Option<Complex64> {
    let mut z = z;
    for _ in 0..n {
        z = map.step(z).finite()?;
    }
    Some(z)
}

/// The first `n` points of the orbit of `z0`, starting with `z0` itself.
/// Stops after the first pole hit, which is included as `Infinity`.
pub fn orbit_points<M: OrbitMap>(map: &M, z0: Complex64, n: usize) -> Vec<SpherePoint> {
    let mut out = Vec::with_capacity(n);
    let mut z = SpherePoint::Finite(z0);
    while out.len() < n {
        out.push(z);
        match z {
            SpherePoint::Finite(w) => z = map.step(w),
            SpherePoint::Infinity => break,
        }
    }
    out
}

fn residual_scale(z: Complex64) -> f64 {
    z.norm().max(1.0)
}

/// Newton's method on `F(z) = T^period(z) − z`.
///
/// The residual target is `refine_tol` for points of modulus at most 1 and
/// scales with `|z|` beyond that, where absolute accuracy is limited by the
/// floating point spacing.
pub fn refine_cycle<M: OrbitMap>(
    map: &M,
    guess: Complex64,
    period: u32,
    s: &IterationSettings,
) -> Result<CycleInfo> {
    if period == 0 {
        return Err(TandelbrotError::InvalidArgument("period must be positive".into()));
    }
    let lost = || TandelbrotError::NoConvergence("cycle refinement hit a pole".into());
    let mut z = guess;
    for _ in 0..100 {
        let (fz, d) = iterate_with_derivative(map, z, period).ok_or_else(lost)?;
        let residual = fz - z;
        if residual.norm() <= s.refine_tol * residual_scale(z) {
            return Ok(CycleInfo { period, representative: z, multiplier: d });
        }
        let slope = d - 1.0;
        if slope.norm() < 1e-300 {
            return Err(TandelbrotError::DegenerateDerivative);
        }
        let next = z - residual / slope;
        if !(next.re.is_finite() && next.im.is_finite()) {
            return Err(TandelbrotError::NoConvergence("Newton step left the plane".into()));
        }
        if (next - z).norm() <= f64::EPSILON * residual_scale(z) {
            let (fz, multiplier) = iterate_with_derivative(map, next, period).ok_or_else(lost)?;
            if (fz - next).norm() <= s.refine_tol * residual_scale(next) {
                return Ok(CycleInfo { period, representative: next, multiplier });
            }
            return Err(TandelbrotError::NoConvergence("Newton stalled".into()));
        }
        z = next;
    }
    Err(TandelbrotError::NoConvergence("cycle refinement exceeded 100 steps".into()))
}

/// Refines a cycle candidate and reduces its period to the minimal one.
fn refine_minimal<M: OrbitMap>(
    map: &M,
    guess: Complex64,
    period: u32,
    s: &IterationSettings,
) -> Result<CycleInfo> {
    let info = refine_cycle(map, guess, period, s)?;
    for d in (1..period).filter(|d| period % d == 0) {
        if let Some(w) = iterate(map, info.representative, d) {
            if (w - info.representative).norm() < s.cycle_tol * residual_scale(w) {
                return refine_cycle(map, info.representative, d, s);
            }
        }
    }
    Ok(info)
}

/// Brent cycle detection with absorbing-state and pole checks.
///
/// `absorbed(step, z)` is consulted for every iterate including the seed.
/// An approximate repeat is refined by Newton; a confirmed attracting cycle
/// ends the run, a repelling one (only reachable by landing on it exactly)
/// ends it as undecided.
pub(crate) fn run_orbit<M, F>(
    map: &M,
    z0: Complex64,
    s: &IterationSettings,
    mut absorbed: F,
) -> RawFate
where
    M: OrbitMap,
    F: FnMut(u32, Complex64) -> bool,
{
    if absorbed(0, z0) {
        return RawFate::Absorbed { steps: 0 };
    }
    let mut power: u32 = 1;
    let mut lam: u32 = 0;
    let mut tortoise = z0;
    let mut hare = z0;
    let mut n: u32 = 0;
    // a failed refinement is retried only once per Brent window
    let mut refine_blocked = false;
    while n < s.max_iter {
        let next = match map.step(hare) {
            SpherePoint::Finite(w) if w.norm() <= s.pole_cutoff => w,
            _ => return RawFate::Pole { steps: n + 1 },
        };
        hare = next;
        n += 1;
        lam += 1;
        if absorbed(n, hare) {
            return RawFate::Absorbed { steps: n };
        }
        if !refine_blocked && (hare - tortoise).norm() < s.cycle_tol * residual_scale(hare) {
            match refine_minimal(map, hare, lam, s) {
                Ok(info) if info.is_attracting() => {
                    return RawFate::Cycle { info, steps: n };
                }
                Ok(_) => return RawFate::Undecided { steps: n },
                // not converged far enough yet; keep iterating
                Err(_) => refine_blocked = true,
            }
        }
        if lam == power {
            tortoise = hare;
            power = power.saturating_mul(2);
            lam = 0;
            refine_blocked = false;
        }
    }
    RawFate::Undecided { steps: n }
}

/// Classifies the orbit of `z0` under `T_α` for `|α| < 1`.
pub fn classify_orbit(p: &TangentParam, z0: Complex64, s: &IterationSettings) -> Result<OrbitFate> {
    let r = p.alpha().norm();
    if r >= 1.0 {
        return Err(TandelbrotError::ParamOutsideDisk(r));
    }
    if !(z0.re.is_finite() && z0.im.is_finite()) {
        return Err(TandelbrotError::InvalidSeed(format!("{z0}")));
    }
    s.validate()?;
    Ok(classify_orbit_unchecked(p, z0, s))
}

/// [`classify_orbit`] without argument checks, for per-pixel loops.
#[inline]
pub(crate) fn classify_orbit_unchecked(
    p: &TangentParam,
    z0: Complex64,
    s: &IterationSettings,
) -> OrbitFate {
    let trap_sqr = s.trap_radius * s.trap_radius;
    match run_orbit(p, z0, s, |_, z| z.norm_sqr() <= trap_sqr) {
        RawFate::Absorbed { steps } => OrbitFate::CapturedByZero { steps },
        RawFate::Cycle { info, steps } => OrbitFate::AttractingCycle { info, steps },
        RawFate::Pole { steps } => OrbitFate::PoleHit { steps },
        RawFate::Undecided { steps } => OrbitFate::Undecided { steps },
    }
}
