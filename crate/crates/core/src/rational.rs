//! Rational approximants `T_{α,k} = M_α ∘ P_k ∘ N_α` with
//! `M_α(z) = (z−1)/(αz−1)`, `P_k(z) = (1 + z/k)^k`, `N_α(z) = (α−1)z/8`,
//! and the parameter sets `A_n`, `A_{n,k}` and their δ-bounded variants.
//!
//! `T_{α,k} → T_α` locally uniformly as `k → ∞`, at rate O(1/k).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, TandelbrotError};
use crate::model::{mobius, mobius_of_exp, TangentParam, EXP_LIMIT};
use crate::orbit::IterationSettings;
use crate::render::Viewport;
use crate::sphere::SpherePoint;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalParam {
    alpha: Complex64,
    k: u32,
}

impl RationalParam {
    pub fn new(alpha: Complex64, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(TandelbrotError::InvalidArgument("k must be at least 1".into()));
        }
        TangentParam::new(alpha)?;
        Ok(RationalParam { alpha, k })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `T_{α,k}(z)`.
    pub fn eval(&self, z: Complex64) -> SpherePoint {
        let u = (self.alpha - 1.0) * z / 8.0;
        let k = self.k as f64;
        let x = u / k;
        if x.norm() < 1.0 {
            // (1 + x)^k = exp(k·log1p(x)), accurate for large k
            let exponent = k * log1p(x);
            mobius_of_exp(self.alpha, exponent).value
        } else {
            let b = 1.0 + x;
            let log_mod = k * b.norm().ln();
            if log_mod > EXP_LIMIT {
                return mobius(self.alpha, Complex64::new(f64::INFINITY, 0.0)).value;
            }
            if log_mod < -EXP_LIMIT {
                return mobius(self.alpha, Complex64::new(0.0, 0.0)).value;
            }
            // exact integer power near b = 0, where the logarithm degrades
            mobius(self.alpha, b.powu(self.k)).value
        }
    }

    /// `c_{α,k} = −8k/(α−1)`, the finite critical point; it maps to 1.
    pub fn finite_critical_point(&self) -> Complex64 {
        -8.0 * self.k as f64 / (self.alpha - 1.0)
    }
}

/// Principal `log(1 + x)` for `|x| < 1`, accurate when `x` is small.
fn log1p(x: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * x.re + x.norm_sqr()).ln_1p();
    let im = x.im.atan2(1.0 + x.re);
    Complex64::new(re, im)
}

/// Which parameter set a grid classification computes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnSpec {
    pub n: u32,
    /// `Some(k)` selects the rational approximant `T_{α,k}`.
    pub k: Option<u32>,
    /// `Some(δ)` additionally bounds every iterate by `1/δ`.
    pub delta: Option<f64>,
}

impl AnSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k == Some(0) {
            return Err(TandelbrotError::InvalidArgument("k must be at least 1".into()));
        }
        if let Some(d) = self.delta {
            if !(d.is_finite() && d > 0.0) {
                return Err(TandelbrotError::InvalidArgument(format!("delta = {d}")));
            }
        }
        Ok(())
    }

    /// Membership of one parameter; also returns the first step at which
    /// the orbit left `V = {|z| > trap_radius}` (or `n` for members).
    pub fn member(&self, alpha: Complex64, trap_radius: f64) -> (bool, u32) {
        if alpha == Complex64::new(0.0, 0.0) {
            // 1/α = ∞ ∈ V
            return (self.delta.is_none(), self.n);
        }
        let bound = self.delta.map(|d| 1.0 / d).unwrap_or(f64::INFINITY);
        let tangent = TangentParam::new(alpha).ok();
        let rational = self.k.and_then(|k| RationalParam::new(alpha, k).ok());
        let mut z = alpha.inv();
        for j in 0..=self.n {
            let r = z.norm();
            if r >= bound {
                return (false, j);
            }
            if r <= trap_radius {
                return (false, j);
            }
            if j == self.n {
                break;
            }
            let next = match (rational, tangent) {
                (Some(q), _) => q.eval(z),
                (None, Some(p)) => p.eval_finite(z).value,
                (None, None) => return (false, j),
            };
            match next {
                SpherePoint::Finite(w) => z = w,
                // a pole lies in V and is never mapped back out of it
                SpherePoint::Infinity => return (self.delta.is_none(), self.n),
            }
        }
        (true, self.n)
    }
}

pub(crate) fn check_half_disk(grid: &Viewport) -> Result<()> {
    let half_w = 0.5 * grid.width;
    let half_h = 0.5 * grid.height();
    let corners = [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)];
    for (sx, sy) in corners {
        // outermost pixel centers
        let dx = half_w * (1.0 - 1.0 / grid.px as f64);
        let dy = half_h * (1.0 - 1.0 / grid.py as f64);
        let z = grid.center + Complex64::new(sx * dx, sy * dy);
        if z.norm() >= 0.5 {
            return Err(TandelbrotError::GridOutsideHalfDisk);
        }
    }
    Ok(())
}

/// Row-major membership mask of `A_n` / `A_{n,k}` / `A_n(δ)` on `grid`.
pub fn classify_an_grid(spec: &AnSpec, grid: &Viewport, s: &IterationSettings) -> Result<Vec<bool>> {
    spec.validate()?;
    grid.validate()?;
    check_half_disk(grid)?;
    let trap = s.trap_radius;
    Ok((0..grid.py)
        .into_par_iter()
        .flat_map_iter(|j| (0..grid.px).map(move |i| spec.member(grid.pixel(i, j), trap).0))
        .collect())
}

/// Sup over all sample pairs of the chordal distance between
/// `T_{α,k}(z)` and `T_α(z)`. Samples with α = 1 are skipped.
pub fn approximation_error_on(alphas: &[Complex64], k: u32, zs: &[Complex64]) -> f64 {
    alphas
        .par_iter()
        .filter_map(|&a| Some((TangentParam::new(a).ok()?, RationalParam::new(a, k).ok()?)))
        .map(|(p, q)| {
            zs.iter()
                .map(|&z| q.eval(z).chordal_distance(p.eval_finite(z).value))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// [`approximation_error_on`] over every pixel of two viewports.
pub fn approximation_error(alpha_window: &Viewport, k: u32, z_window: &Viewport) -> f64 {
    approximation_error_on(&alpha_window.points(), k, &z_window.points())
}

/// Largest `|T_{α,k}(z)|` over the samples, for the containment
/// `T_{α,k}(𝔻(0,2)) ⋐ 𝔻(0,r)`. By the maximum principle it suffices to
/// sample the boundary circle.
pub fn trap_image_radius(alphas: &[Complex64], k: u32, zs: &[Complex64]) -> f64 {
    alphas
        .par_iter()
        .filter_map(|&a| RationalParam::new(a, k).ok())
        .map(|q| {
            zs.iter()
                .map(|&z| q.eval(z).finite().map_or(f64::INFINITY, |w| w.norm()))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Smallest power of two `k ≤ max_k` whose images of the boundary samples
/// stay inside radius `r`.
pub fn empirical_k0(alphas: &[Complex64], zs: &[Complex64], r: f64, max_k: u32) -> Option<u32> {
    let mut k = 1u32;
    while k <= max_k {
        if trap_image_radius(alphas, k, zs) < r {
            return Some(k);
        }
        k = k.checked_mul(2)?;
    }
    None
}

/// Sample points of the closed grid disk `|z| < radius`, `n × n` grid.
pub fn disk_samples(radius: f64, n: u32) -> Vec<Complex64> {
    Viewport { center: Complex64::new(0.0, 0.0), width: 2.0 * radius, px: n, py: n }.points_in_disk(radius)
}

/// `n` equally spaced points on the circle `|z| = radius`.
pub fn circle_samples(radius: f64, n: u32) -> Vec<Complex64> {
    (0..n).map(|i| Complex64::from_polar(radius, std::f64::consts::TAU * i as f64 / n as f64)).collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Convergence of `T_{α,k}` to `T_α` over a sample of parameters and points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxReport {
    pub ks: Vec<u32>,
    /// Sup chordal error for each `k`.
    pub errors: Vec<f64>,
    pub slope: f64,
    /// Smallest power of two with `T_{α,k}(∂𝔻(0,2)) ⊂ 𝔻(0, 2)` on the sample.
    pub k0: Option<u32>,
}

/// Errors for `k = 2^lo ..= 2^hi` with `α` sampled in `𝔻(0, 1/2)` and `z`
/// in `𝔻(0, 2)` on `grid × grid` lattices.
pub fn approximation_report(lo: u32, hi: u32, grid: u32) -> ApproxReport {
    let alphas = disk_samples(0.5, grid);
    let zs = disk_samples(2.0, grid);
    let ks: Vec<u32> = (lo..=hi).map(|e| 1u32 << e).collect();
    let errors: Vec<f64> = ks.iter().map(|&k| approximation_error_on(&alphas, k, &zs)).collect();
    let xs: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    let slope = log_log_slope(&xs, &errors);
    let k0 = empirical_k0(&alphas, &circle_samples(2.0, 4 * grid), 2.0, 1 << hi);
    ApproxReport { ks, errors, slope, k0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn origin_fixed_with_multiplier_one_eighth() {
        for (alpha, k) in [(c(0.3, 0.1), 1), (c(-0.4, 0.2), 16), (c(0.0, 0.0), 1000)] {
            let q = RationalParam::new(alpha, k).unwrap();
            assert_eq!(q.eval(c(0.0, 0.0)), SpherePoint::Finite(c(0.0, 0.0)));
            let h = 1e-6;
            let fd = (q.eval(c(h, 0.0)).finite().unwrap() - q.eval(c(-h, 0.0)).finite().unwrap()) / (2.0 * h);
            assert!((fd - 0.125).norm() < 1e-6);
        }
    }

    #[test]
    fn converges_to_the_family() {
        let alpha = c(0.3, 0.0);
        let z = c(1.0, 1.0);
        let q = RationalParam::new(alpha, 2048).unwrap();
        let t = TangentParam::new(alpha).unwrap().eval_finite(z).value.finite().unwrap();
        assert!((q.eval(z).finite().unwrap() - t).norm() < 1e-3);
    }

    #[test]
    fn critical_point_values() {
        assert_eq!(RationalParam::new(c(0.5, 0.0), 4).unwrap().finite_critical_point(), c(64.0, 0.0));
        assert_eq!(RationalParam::new(c(-1.0, 0.0), 8).unwrap().finite_critical_point(), c(32.0, 0.0));
        for (alpha, k) in [(c(0.5, 0.0), 4), (c(-0.3, 0.2), 64), (c(0.1, -0.4), 1024)] {
            let q = RationalParam::new(alpha, k).unwrap();
            let v = q.eval(q.finite_critical_point()).finite().unwrap();
            assert!((v - 1.0).norm() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(RationalParam::new(c(1.0, 0.0), 3), Err(TandelbrotError::AlphaIsOne));
        assert!(RationalParam::new(c(0.2, 0.0), 0).is_err());
    }

    #[test]
    fn far_field_limits() {
        // k = 1 is a Möbius map: z → ∞ sends 1 + u to ∞ and the value to 1/α
        let q = RationalParam::new(c(0.4, 0.0), 1).unwrap();
        let v = q.eval(c(1e300, 0.0)).finite().unwrap();
        assert!((v - 2.5).norm() < 1e-12);
        let q = RationalParam::new(c(0.4, 0.0), 64).unwrap();
        let v = q.eval(c(-1e6, 0.0)).finite().unwrap();
        assert!((v - 2.5).norm() < 1e-12);
    }

    #[test]
    fn log1p_matches_ln() {
        for x in [c(0.3, -0.2), c(-0.5, 0.5), c(1e-12, 1e-13)] {
            let a = log1p(x);
            let b = (1.0 + x).ln();
            assert!((a - b).norm() < 1e-15 * (1.0 + b.norm()) + 1e-28);
        }
        // small-argument accuracy: log(1 + x) ≈ x
        let x = c(1e-17, 2e-17);
        assert!((log1p(x) - x).norm() < 1e-30);
    }

    fn half_grid(px: u32) -> Viewport {
        Viewport::new(c(0.0, 0.0), 0.7, px, px).unwrap()
    }

    #[test]
    fn a_zero_is_everything() {
        let s = IterationSettings::analysis();
        let spec = AnSpec { n: 0, k: None, delta: None };
        assert!(classify_an_grid(&spec, &half_grid(32), &s).unwrap().iter().all(|&m| m));
    }

    #[test]
    fn grid_must_lie_in_half_disk() {
        let s = IterationSettings::analysis();
        let spec = AnSpec { n: 1, k: None, delta: None };
        let vp = Viewport::new(c(0.0, 0.0), 1.2, 8, 8).unwrap();
        assert_eq!(classify_an_grid(&spec, &vp, &s), Err(TandelbrotError::GridOutsideHalfDisk));
    }

    #[test]
    fn masks_are_nested() {
        let s = IterationSettings::analysis();
        let vp = half_grid(96);
        let mut prev: Option<Vec<bool>> = None;
        for n in 0..=6 {
            let m = classify_an_grid(&AnSpec { n, k: None, delta: None }, &vp, &s).unwrap();
            if let Some(p) = &prev {
                assert!(m.iter().zip(p).all(|(&a, &b)| !a || b), "n = {n}");
            }
            prev = Some(m);
        }
    }

    #[test]
    fn delta_bound_shrinks_the_set() {
        let s = IterationSettings::analysis();
        let vp = half_grid(64);
        let plain = classify_an_grid(&AnSpec { n: 3, k: None, delta: None }, &vp, &s).unwrap();
        let bounded = classify_an_grid(&AnSpec { n: 3, k: None, delta: Some(0.01) }, &vp, &s).unwrap();
        assert!(bounded.iter().zip(&plain).all(|(&b, &p)| !b || p));
        assert!(bounded.iter().filter(|&&b| b).count() < plain.iter().filter(|&&p| p).count());
        assert!(AnSpec { n: 1, k: None, delta: Some(-1.0) }.validate().is_err());
    }

    #[test]
    fn error_vanishes_at_origin_and_shrinks_with_k() {
        let alphas: Vec<Complex64> = (0..10).map(|i| Complex64::from_polar(0.45, i as f64 * 0.6)).collect();
        assert_eq!(approximation_error_on(&alphas, 7, &[c(0.0, 0.0)]), 0.0);
        let zs: Vec<Complex64> = (0..10).map(|i| Complex64::from_polar(1.9, i as f64 * 0.6)).collect();
        assert!(approximation_error_on(&alphas, 2048, &zs) < approximation_error_on(&alphas, 64, &zs));
    }

    #[test]
    fn containment_holds_from_k0() {
        let alphas: Vec<Complex64> = (0..24)
            .flat_map(|i| [0.1, 0.3, 0.499].map(|r| Complex64::from_polar(r, i as f64 * 0.2618)))
            .collect();
        let zs: Vec<Complex64> = (0..256).map(|i| Complex64::from_polar(2.0, i as f64 * 0.02454)).collect();
        let k0 = empirical_k0(&alphas, &zs, 1.999, 1 << 12).unwrap();
        // recorded measurement: the sweep passes already at k = 1
        assert_eq!(k0, 1);
        for k in [k0, 8, 256, 4096] {
            assert!(trap_image_radius(&alphas, k, &zs) < 1.999);
        }
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 / x).collect();
        assert!((log_log_slope(&xs, &ys) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn report_converges_at_first_order() {
        let r = approximation_report(4, 9, 24);
        assert_eq!(r.errors.len(), 6);
        assert!((r.slope + 1.0).abs() < 0.3, "{r:?}");
        assert!(r.errors.windows(2).all(|w| w[1] < w[0]));
    }
}
