//! Kernel functions of the convolution families, the generalized
//! characteristic function they induce on measures, product-formula residual
//! reports, Polya-type shape checks, and the weakly-stable density whose
//! cosine transform is the Kendall kernel.

use std::cell::Cell;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::Family;
use crate::measures::{DensityKind, MixtureMeasure};
use crate::numerics::quad::gk15;
use crate::numerics::{
    alternating_series_sum, cos_weighted_integral, gamma, gamma_pq, kingman_kernel_series,
    linspace, quad_with_breakpoints, sin_moment, QuadratureConfig,
};
use crate::real::Real;

/// Kernel Omega of the family at t >= 0, with Omega(0) = 1 exactly. Bounded
/// by one in absolute value; the radial and cosine kernels go negative.
pub fn kernel_eval<T: Real>(family: &Family<T>, t: T) -> Result<T> {
    family.validate()?;
    if !t.is_finite() || t < T::zero() {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t.as_f64(),
            reason: "kernel argument must be nonnegative and finite",
        });
    }
    kernel_value(family, t)
}

/// Kernel without revalidation, for inner loops. Argument must be >= 0.
fn kernel_value<T: Real>(family: &Family<T>, u: T) -> Result<T> {
    let one = T::one();
    Ok(match *family {
        Family::Classical => (-u).exp(),
        Family::Symmetric => u.cos(),
        Family::Stable { alpha } => (-u.powf(alpha)).exp(),
        Family::Kendall { alpha } => (one - u.powf(alpha)).max(T::zero()),
        Family::Max => {
            if u <= one {
                one
            } else {
                T::zero()
            }
        }
        Family::Kingman { s } => kingman_kernel(s, u)?,
        Family::Kucharczak { a, r } => gamma_pq(a, u.powf(r))?.1,
        Family::Ku { alpha, n } => (one - u.powf(alpha)).max(T::zero()).powi(n as i32),
        Family::Diamond { p, alpha } => {
            if u <= one {
                one - p * u.powf(alpha)
            } else {
                T::zero()
            }
        }
        Family::KendallType { c, alpha, p } => {
            if u <= one {
                one - (one + c) * u.powf(alpha) + c * u.powf(alpha * p)
            } else {
                T::zero()
            }
        }
    })
}

/// Normalized radial kernel: the defining series up to a cutoff that keeps
/// its alternating cancellation below ~1e-10 absolute, then the two-sum
/// large-argument expansion of the Bessel factor. Absolute accuracy holds
/// throughout; relative accuracy degrades deep in the decay zone for large
/// orders, where the kernel is already negligible.
fn kingman_kernel<T: Real>(s: T, t: T) -> Result<T> {
    if !t.is_finite() {
        // the kernel decays; infinite tail probes get the limit
        return Ok(T::zero());
    }
    let switch = T::lit(15.0) + s.max(T::zero()) * s.max(T::zero()) * T::lit(0.5);
    if t <= switch {
        return kingman_kernel_series(s, t);
    }
    let pi = T::lit(core::f64::consts::PI);
    let mu = T::lit(4.0) * s * s;
    let eight_t = T::lit(8.0) * t;
    // running a_k / t^k; even k feed the cosine sum, odd k the sine sum
    let mut p = T::one();
    let mut q = T::zero();
    let mut r = T::one();
    for k in 1..=12u32 {
        let odd = T::lit((2 * k - 1) as f64);
        r = r * (mu - odd * odd) / (T::lit(k as f64) * eight_t);
        let sign = if (k / 2) % 2 == 0 { T::one() } else { -T::one() };
        if k % 2 == 0 {
            p += sign * r;
        } else {
            q += sign * r;
        }
    }
    let chi = t - (s * T::lit(0.5) + T::lit(0.25)) * pi;
    let j = (T::lit(2.0) / (pi * t)).sqrt() * (p * chi.cos() - q * chi.sin());
    Ok(gamma(s + T::one()) * (T::lit(2.0) / t).powf(s) * j)
}

fn kernel_is_compact<T: Real>(family: &Family<T>) -> bool {
    matches!(
        family,
        Family::Kendall { .. }
            | Family::Max
            | Family::Ku { .. }
            | Family::Diamond { .. }
            | Family::KendallType { .. }
    )
}

/// Generalized characteristic function: integral of Omega(t s) in s against
/// the measure. One at t = 0 exactly; never clamped, since the radial and
/// cosine kernels legitimately push it negative.
pub fn gen_char_fn<T: Real>(
    family: &Family<T>,
    measure: &MixtureMeasure<T>,
    t: T,
    cfg: &QuadratureConfig<T>,
) -> Result<T> {
    family.validate()?;
    measure.validate()?;
    if !t.is_finite() || t < T::zero() {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t.as_f64(),
            reason: "evaluation point must be nonnegative and finite",
        });
    }
    if t == T::zero() {
        return Ok(T::one());
    }
    let mut acc = T::zero();
    for atom in &measure.atoms {
        acc += atom.w * kernel_value(family, t * atom.loc)?;
    }
    for comp in &measure.continuous {
        acc += comp.w * component_integral(family, &comp.density, t * comp.scale, cfg)?;
    }
    Ok(acc)
}

/// Integral of Omega(u y) against a base density, u = t * scale > 0. Compact
/// kernels cut the range at y = 1/u; the cosine kernel routes through the
/// oscillation-aware integrator.
fn component_integral<T: Real>(
    family: &Family<T>,
    density: &DensityKind<T>,
    u: T,
    cfg: &QuadratureConfig<T>,
) -> Result<T> {
    if matches!(family, Family::Symmetric) {
        let (lo, hi) = density.support();
        return cos_weighted_integral(|y| density.pdf(y, cfg), lo, hi, u, cfg);
    }
    let upper = if kernel_is_compact(family) {
        let cut = u.recip();
        let (lo, _) = density.support();
        if cut <= lo {
            return Ok(T::zero());
        }
        Some(cut)
    } else {
        None
    };
    let captured: Cell<Option<Error>> = Cell::new(None);
    let v = density.integrate_against(
        |y| match kernel_value(family, u * y) {
            Ok(w) => w,
            Err(e) => {
                captured.set(Some(e));
                T::zero()
            }
        },
        upper,
        &[],
        cfg,
    )?;
    match captured.take() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// Pointwise residual |Omega(xt) Omega(yt) - Omega-hat_{delta_x conv delta_y}(t)|
/// over a grid. Zero (up to quadrature) exactly when the kernel reproduces
/// the family's point-mass rule.
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct ProductFormulaReport<T: Real> {
    pub x: T,
    pub y: T,
    pub grid: Vec<T>,
    pub per_point: Vec<T>,
    pub max_residual: T,
}

/// 50 evenly spaced points on [0, 3 / max(x, y, 1)], far enough to cross the
/// compact kernels' support edge.
pub fn default_product_grid<T: Real>(x: T, y: T) -> Vec<T> {
    let span = T::lit(3.0) / x.max(y).max(T::one());
    linspace(T::zero(), span, 50)
}

pub fn product_formula_residual<T: Real>(
    family: &Family<T>,
    x: T,
    y: T,
    grid: &[T],
    cfg: &QuadratureConfig<T>,
) -> Result<ProductFormulaReport<T>> {
    let mu = family.delta_conv(x, y)?;
    let mut per_point = Vec::with_capacity(grid.len());
    let mut max_residual = T::zero();
    for &t in grid {
        let lhs = kernel_eval(family, t * x)? * kernel_eval(family, t * y)?;
        let rhs = gen_char_fn(family, &mu, t, cfg)?;
        let r = (lhs - rhs).abs();
        max_residual = max_residual.max(r);
        per_point.push(r);
    }
    Ok(ProductFormulaReport {
        x,
        y,
        grid: grid.to_vec(),
        per_point,
        max_residual,
    })
}

/// First failure found by [`polya_check`], in check order: value at zero,
/// monotonicity, convexity, tail decay.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind")]
#[serde(bound(serialize = "T: Real"))]
pub enum PolyaViolation<T: Real> {
    NotOneAtZero { value: T },
    Increasing { t0: T, t1: T },
    Concave { t0: T, t1: T, t2: T },
    TailAboveCutoff { t: T, value: T },
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct PolyaReport<T: Real> {
    pub ok: bool,
    pub violation: Option<PolyaViolation<T>>,
}

/// Checks the Polya sufficient conditions for Omega to be a characteristic
/// function on the given grid: Omega(0) = 1 within 1e-12, nonincreasing and
/// convex with 1e-12 slack, and below 1e-6 at the last point. Convexity
/// compares neighboring difference quotients scaled by the half-span, which
/// reduces to plain second differences on uniform grids. The tail bound is an
/// obligation on the caller: the grid must reach far enough into the decay.
pub fn polya_check<T: Real>(family: &Family<T>, grid: &[T]) -> Result<PolyaReport<T>> {
    family.validate()?;
    if grid.len() < 3 {
        return Err(Error::InvalidParameter {
            name: "grid",
            value: grid.len() as f64,
            reason: "need at least three points",
        });
    }
    if grid[0] != T::zero() {
        return Err(Error::InvalidParameter {
            name: "grid",
            value: grid[0].as_f64(),
            reason: "must start at zero to pin the kernel's value there",
        });
    }
    for w in grid.windows(2) {
        if !w[1].is_finite() || w[1] <= w[0] {
            return Err(Error::InvalidParameter {
                name: "grid",
                value: w[1].as_f64(),
                reason: "must be finite and strictly increasing",
            });
        }
    }
    let vals: Vec<T> = grid
        .iter()
        .map(|&t| kernel_eval(family, t))
        .collect::<Result<_>>()?;
    let slack = T::lit(1e-12);
    let fail = |violation| {
        Ok(PolyaReport {
            ok: false,
            violation: Some(violation),
        })
    };
    if (vals[0] - T::one()).abs() > slack {
        return fail(PolyaViolation::NotOneAtZero { value: vals[0] });
    }
    for i in 1..vals.len() {
        if vals[i] > vals[i - 1] + slack {
            return fail(PolyaViolation::Increasing {
                t0: grid[i - 1],
                t1: grid[i],
            });
        }
    }
    for i in 1..vals.len() - 1 {
        let left = (vals[i] - vals[i - 1]) / (grid[i] - grid[i - 1]);
        let right = (vals[i + 1] - vals[i]) / (grid[i + 1] - grid[i]);
        let scaled = (right - left) * (grid[i + 1] - grid[i - 1]) * T::lit(0.5);
        if scaled < -slack {
            return fail(PolyaViolation::Concave {
                t0: grid[i - 1],
                t1: grid[i],
                t2: grid[i + 1],
            });
        }
    }
    let t_last = *grid.last().expect("nonempty");
    let v_last = *vals.last().expect("nonempty");
    if v_last >= T::lit(1e-6) {
        return fail(PolyaViolation::TailAboveCutoff {
            t: t_last,
            value: v_last,
        });
    }
    Ok(PolyaReport {
        ok: true,
        violation: None,
    })
}

/// Symmetric density on the line with cosine transform (1 - |x|^alpha)_+ :
///   g(t) = norm * |t|^{-alpha-1} * integral_0^{|t|} x^{alpha-1} sin x dx.
/// The normalizer is fixed numerically so the total mass is one; integration
/// by parts collapses the defining integral to alpha/pi exactly, and the
/// construction reproduces that constant to ~1e-11.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct WeakStableDensity<T: Real> {
    alpha: T,
    norm: T,
}

/// t^{-alpha-1} * integral_0^t x^{alpha-1} sin x dx, even and analytic
/// through zero. Short series below 1/2 (remainder < 1e-14 there), the sine
/// moment directly above.
fn g_shape<T: Real>(alpha: T, t: T, cfg: &QuadratureConfig<T>) -> T {
    let t = t.abs();
    if t <= T::lit(0.5) {
        let t2 = t * t;
        let mut term = T::one();
        let mut acc = T::zero();
        for j in 0..6u32 {
            acc += term / (alpha + T::lit((2 * j + 1) as f64));
            let k1 = T::lit((2 * j + 2) as f64);
            let k2 = T::lit((2 * j + 3) as f64);
            term = -term * t2 / (k1 * k2);
        }
        return acc;
    }
    t.powf(-alpha - T::one()) * sin_moment(alpha, t, cfg)
}

fn tightened<T: Real>(cfg: &QuadratureConfig<T>, floor: T) -> QuadratureConfig<T> {
    cfg.with_abs_tol(cfg.abs_tol.min(floor))
        .with_rel_tol(cfg.rel_tol.min(floor))
}

impl<T: Real> WeakStableDensity<T> {
    /// Determines the normalizer from the shape integral: direct quadrature
    /// on [0, 32 pi], then integration by parts on the tail, which leaves
    /// only the boundary term and a sine-integral remainder.
    pub fn new(alpha: T, cfg: &QuadratureConfig<T>) -> Result<Self> {
        if !(alpha > T::zero() && alpha <= T::one()) || !alpha.is_finite() {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha.as_f64(),
                reason: "exponent must lie in (0, 1]",
            });
        }
        let pi = T::lit(core::f64::consts::PI);
        let inner = tightened(cfg, T::lit(1e-13));
        let outer = tightened(cfg, T::lit(1e-11));
        let t0 = pi * T::lit(32.0);
        let mut bps = vec![T::lit(0.5)];
        for k in 1..32 {
            bps.push(pi * T::lit(k as f64));
        }
        let head = quad_with_breakpoints(|t| g_shape(alpha, t, &inner), T::zero(), t0, &bps, &outer)?;
        // tail of t^{-alpha-1} m(t): boundary term plus sin(t)/t summed over
        // sign-alternating pi-segments
        let boundary = sin_moment(alpha, t0, &inner) * t0.powf(-alpha) / alpha;
        let si_tail = alternating_series_sum(
            |k| {
                let a = t0 + pi * T::lit(k as f64);
                Ok(gk15(&|t: T| t.sin() / t, a, a + pi).0)
            },
            T::lit(1e-13),
            4000,
        )?;
        let shape_integral = head + boundary + si_tail / alpha;
        Ok(Self {
            alpha,
            norm: (T::lit(2.0) * shape_integral).recip(),
        })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// Normalizing constant of the two-sided density; equals alpha/pi.
    pub fn norm(&self) -> T {
        self.norm
    }

    /// Density at t, even in t. Zero for non-finite arguments.
    pub fn eval(&self, t: T, cfg: &QuadratureConfig<T>) -> T {
        if !t.is_finite() {
            return T::zero();
        }
        self.norm * g_shape(self.alpha, t, cfg)
    }

    /// Total mass by a route independent of the constructor: direct
    /// quadrature on [0, 64 pi], then the tail split around the limiting
    /// sine moment, whose remainder alternates over pi-segments.
    pub fn mass(&self, cfg: &QuadratureConfig<T>) -> Result<T> {
        let pi = T::lit(core::f64::consts::PI);
        let alpha = self.alpha;
        let inner = tightened(cfg, T::lit(1e-13));
        let t1 = pi * T::lit(64.0);
        let mut bps = vec![T::lit(0.5)];
        for k in 1..64 {
            bps.push(pi * T::lit(k as f64));
        }
        let head = quad_with_breakpoints(|t| g_shape(alpha, t, &inner), T::zero(), t1, &bps, cfg)?;
        let m_inf = gamma(alpha) * (pi * alpha * T::lit(0.5)).sin();
        let boundary = m_inf * t1.powf(-alpha) / alpha;
        let corr = alternating_series_sum(
            |k| {
                let a = t1 + pi * T::lit(k as f64);
                let f = |t: T| t.powf(-alpha - T::one()) * (sin_moment(alpha, t, &inner) - m_inf);
                Ok(gk15(&f, a, a + pi).0)
            },
            T::lit(1e-11).min(cfg.abs_tol),
            3000,
        )?;
        Ok(T::lit(2.0) * self.norm * (head + boundary + corr))
    }

    /// The same law folded onto the half line, as a catalog density.
    pub fn half_line_density(&self) -> DensityKind<T> {
        DensityKind::GAlpha {
            alpha: self.alpha,
            norm: self.norm,
        }
    }
}

/// One-shot evaluation; recomputes the normalizer each call, so construct
/// [`WeakStableDensity`] once when evaluating on a grid.
pub fn weak_stable_density_g<T: Real>(alpha: T, t: T, cfg: &QuadratureConfig<T>) -> Result<T> {
    Ok(WeakStableDensity::new(alpha, cfg)?.eval(t, cfg))
}
