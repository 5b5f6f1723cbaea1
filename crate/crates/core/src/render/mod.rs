//! Parallel per-pixel classification of parameter and dynamical planes.
//!
//! Every pixel is computed independently and the rows are gathered in
//! order, so a grid is bit-identical whatever the worker count.

mod colorize;
mod tile;
mod viewport;

use num_complex::Complex64;
use rayon::prelude::*;

pub use colorize::{colorize, encode_png, encode_ppm, PaletteSpec};
pub use tile::{
    decode_tile, encode_tile, DecodedTile, PixelRecord, TileGrid, FATE_CYCLE, FATE_ESCAPED, FATE_POLE,
    FATE_UNDECIDED, HEADER_LEN, MAGIC, RECORD_LEN,
};
pub use viewport::Viewport;

use crate::error::{Result, TandelbrotError};
use crate::model::TangentParam;
use crate::newton::{classify_newton_from, NewtonFate, NewtonParam};
use crate::orbit::{classify_orbit_unchecked, IterationSettings, OrbitFate};
use crate::rational::AnSpec;

/// Environment variable read by the binaries to size the worker pool.
pub const THREADS_ENV: &str = "TANDELBROT_THREADS";

/// Worker count from `TANDELBROT_THREADS`, if set to a positive integer.
pub fn worker_count_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n: &usize| n > 0)
}

/// Which parameter plane to draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamFamily {
    /// Orbit of the free asymptotic value `1/α` under `T_α`.
    Tangent,
    /// Orbit of the free asymptotic value `0` under `N_a`.
    Newton,
    /// Membership mask of `A_n` and its variants.
    AnMask(AnSpec),
}

/// A fixed map whose dynamical plane is drawn.
#[derive(Debug, Clone, Copy)]
pub enum DynInstance {
    Tangent(TangentParam),
    Newton(NewtonParam),
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn undecided() -> PixelRecord {
    PixelRecord { fate: FATE_UNDECIDED, value: 0, aux: 0.0 }
}

fn from_orbit(f: OrbitFate) -> PixelRecord {
    match f {
        OrbitFate::CapturedByZero { steps } => PixelRecord { fate: FATE_ESCAPED, value: steps, aux: 0.0 },
        OrbitFate::AttractingCycle { info, .. } => {
            PixelRecord { fate: FATE_CYCLE, value: info.period, aux: info.multiplier.norm() as f32 }
        }
        OrbitFate::PoleHit { steps } => PixelRecord { fate: FATE_POLE, value: steps, aux: 0.0 },
        OrbitFate::Undecided { steps } => PixelRecord { fate: FATE_UNDECIDED, value: steps, aux: 0.0 },
    }
}

fn from_newton(f: NewtonFate) -> PixelRecord {
    match f {
        NewtonFate::ConvergedToRoot { steps, .. } => PixelRecord { fate: FATE_ESCAPED, value: steps, aux: 0.0 },
        NewtonFate::AttractingCycle { info, .. } => {
            PixelRecord { fate: FATE_CYCLE, value: info.period, aux: info.multiplier.norm() as f32 }
        }
        NewtonFate::PoleHit { steps } => PixelRecord { fate: FATE_POLE, value: steps, aux: 0.0 },
        NewtonFate::Undecided { steps } => PixelRecord { fate: FATE_UNDECIDED, value: steps, aux: 0.0 },
    }
}

fn tangent_param_pixel(alpha: Complex64, s: &IterationSettings) -> PixelRecord {
    if alpha == ZERO || alpha == ONE || alpha.norm() >= 1.0 {
        return undecided();
    }
    match TangentParam::new(alpha) {
        Ok(p) => from_orbit(classify_orbit_unchecked(&p, alpha.inv(), s)),
        Err(_) => undecided(),
    }
}

fn newton_param_pixel(a: Complex64, s: &IterationSettings) -> PixelRecord {
    match NewtonParam::new(a) {
        Ok(p) => from_newton(classify_newton_from(&p, ZERO, s)),
        Err(_) => undecided(),
    }
}

fn an_pixel(spec: &AnSpec, alpha: Complex64, s: &IterationSettings) -> PixelRecord {
    match spec.member(alpha, s.trap_radius) {
        (true, n) => PixelRecord { fate: FATE_UNDECIDED, value: n, aux: 0.0 },
        (false, step) => PixelRecord { fate: FATE_ESCAPED, value: step, aux: 0.0 },
    }
}

fn check_an_window(spec: &AnSpec, vp: &Viewport) -> Result<()> {
    spec.validate()?;
    crate::rational::check_half_disk(vp)
}

fn render_with<F>(vp: &Viewport, workers: Option<usize>, f: F) -> Result<TileGrid>
where
    F: Fn(Complex64) -> PixelRecord + Sync + Send,
{
    vp.validate()?;
    let run = || -> Vec<PixelRecord> {
        (0..vp.py)
            .into_par_iter()
            .flat_map_iter(|j| {
                let f = &f;
                (0..vp.px).map(move |i| f(vp.pixel(i, j)))
            })
            .collect()
    };
    let records = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| TandelbrotError::InvalidArgument(format!("worker pool: {e}")))?
            .install(run),
        None => run(),
    };
    Ok(TileGrid::from_records(*vp, &records))
}

pub fn render_parameter_plane(family: ParamFamily, vp: &Viewport, s: &IterationSettings) -> Result<TileGrid> {
    render_parameter_plane_with_workers(family, vp, s, None)
}

/// As [`render_parameter_plane`] on a dedicated pool of `workers` threads
/// (`None` uses the global pool).
pub fn render_parameter_plane_with_workers(
    family: ParamFamily,
    vp: &Viewport,
    s: &IterationSettings,
    workers: Option<usize>,
) -> Result<TileGrid> {
    s.validate()?;
    vp.validate()?;
    match family {
        ParamFamily::Tangent => render_with(vp, workers, |a| tangent_param_pixel(a, s)),
        ParamFamily::Newton => render_with(vp, workers, |a| newton_param_pixel(a, s)),
        ParamFamily::AnMask(spec) => {
            check_an_window(&spec, vp)?;
            render_with(vp, workers, |a| an_pixel(&spec, a, s))
        }
    }
}

pub fn render_dynamical_plane(inst: DynInstance, vp: &Viewport, s: &IterationSettings) -> Result<TileGrid> {
    render_dynamical_plane_with_workers(inst, vp, s, None)
}

/// Dynamical plane of a fixed map. For `|α| > 1` the tangent map is
/// drawn through the conjugacy with `T_{1/α}`; `|α| = 1` has no trap disk
/// and every pixel is undecided.
pub fn render_dynamical_plane_with_workers(
    inst: DynInstance,
    vp: &Viewport,
    s: &IterationSettings,
    workers: Option<usize>,
) -> Result<TileGrid> {
    s.validate()?;
    vp.validate()?;
    match inst {
        DynInstance::Tangent(p) => {
            let alpha = p.alpha();
            let r = alpha.norm();
            if r < 1.0 {
                render_with(vp, workers, |z| from_orbit(classify_orbit_unchecked(&p, z, s)))
            } else if r > 1.0 {
                let q = TangentParam::new(alpha.inv())?;
                render_with(vp, workers, |z| from_orbit(classify_orbit_unchecked(&q, alpha * z, s)))
            } else {
                render_with(vp, workers, |_| undecided())
            }
        }
        DynInstance::Newton(p) => render_with(vp, workers, |z| from_newton(classify_newton_from(&p, z, s))),
    }
}
