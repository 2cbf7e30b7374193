//! Mixture measures on [0, inf): point masses plus weighted continuous
//! components from a fixed density catalog.
//!
//! Every law that the convolution algebra produces is representable here:
//! power laws on [0, 1], Pareto-type tails, Weibull-type kernel laws and
//! their reciprocals, the order-statistic densities of the Kucharczak-Urbanik
//! decomposition, the two-argument radial and Kucharczak convolution
//! densities, the diamond tail, the Kendall-type derived laws, the symmetric
//! weakly-stable density folded onto the half-line, and an interpolated table
//! for numerically inverted results.
//!
//! Values are immutable after construction and safe to share across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::special::{binomial, gamma_pq, lgamma};
use crate::numerics::{quad_integrate, quad_with_breakpoints, QuadratureConfig};
use crate::real::Real;

pub use crate::numerics::quad::quad_integrate as integrate;

/// Point mass at `loc` with probability `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct Atom<T> {
    pub loc: T,
    pub w: T,
}

/// Catalog of continuous densities. Parameters are the base (unscaled) form;
/// dilation is carried by [`ContinuousComponent::scale`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", content = "params", rename_all = "snake_case")]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub enum DensityKind<T: Real> {
    /// beta t^{-beta-1} on [1, inf)
    Pareto { beta: T },
    /// alpha t^{alpha-1} on [0, 1]
    Pow { alpha: T },
    /// CDF exp(-t^{-alpha}) on (0, inf)
    FrechetLike { alpha: T },
    /// (r / Gamma(a)) t^{ar-1} exp(-t^r) on (0, inf)
    WeibullKernel { a: T, r: T },
    /// law of the reciprocal of WeibullKernel: CDF Q(a, t^{-r}) on (0, inf)
    InvWeibullKernel { a: T, r: T },
    /// k-th order statistic of n+k unit Pareto(alpha) draws:
    /// alpha k C(n+k, n) s^{-alpha(n+1)-1} (1 - s^{-alpha})^{k-1} on (1, inf)
    KuOrderstat { alpha: T, k: u32, n: u32 },
    /// minimum of n power-law draws: n alpha t^{alpha-1}(1-t^alpha)^{n-1} on [0, 1]
    KuLom { alpha: T, n: u32 },
    /// radial convolution density on (|x-y|, x+y)
    KingmanRadial { s: T, x: T, y: T },
    /// two-argument convolution density on ((x^r+y^r)^{1/r}, inf), a in (0,1)
    Kucharczak { a: T, r: T, x: T, y: T },
    /// diamond-family tail on [1, inf), p in (0, 1)
    DiamondTail { p: T, alpha: T },
    /// lack-of-memory law of the Kendall-type family on (0, 1)
    KendallTypeLom { c: T, alpha: T, p: T },
    /// max-representation mixing law of the Kendall-type family on [1, inf)
    KendallTypeMixing { c: T, alpha: T, p: T },
    /// symmetric weakly-stable density folded onto [0, inf);
    /// `norm` is the normalizing constant of the two-sided density
    #[serde(rename = "g_alpha")]
    GAlpha { alpha: T, norm: T },
    /// piecewise-linear CDF through `grid` = [(t, F)] pairs
    Table { grid: Vec<(T, T)> },
}

fn positive<T: Real>(name: &'static str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v.as_f64(),
            reason: "must be positive and finite",
        })
    }
}

impl<T: Real> DensityKind<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DensityKind::Pareto { beta } => positive("beta", beta),
            DensityKind::Pow { alpha } => positive("alpha", alpha),
            DensityKind::FrechetLike { alpha } => positive("alpha", alpha),
            DensityKind::WeibullKernel { a, r } | DensityKind::InvWeibullKernel { a, r } => {
                positive("a", a)?;
                positive("r", r)
            }
            DensityKind::KuOrderstat { alpha, k, .. } => {
                positive("alpha", alpha)?;
                if k == 0 {
                    return Err(Error::InvalidParameter {
                        name: "k",
                        value: 0.0,
                        reason: "order statistic index starts at 1",
                    });
                }
                Ok(())
            }
            DensityKind::KuLom { alpha, n } => {
                positive("alpha", alpha)?;
                if n == 0 {
                    return Err(Error::InvalidParameter {
                        name: "n",
                        value: 0.0,
                        reason: "needs at least one draw",
                    });
                }
                Ok(())
            }
            DensityKind::KingmanRadial { s, x, y } => {
                if s <= T::lit(-0.5) {
                    return Err(Error::InvalidParameter {
                        name: "s",
                        value: s.as_f64(),
                        reason: "radial order must exceed -1/2",
                    });
                }
                positive("x", x)?;
                positive("y", y)
            }
            DensityKind::Kucharczak { a, r, x, y } => {
                if a <= T::zero() || a >= T::one() {
                    return Err(Error::InvalidParameter {
                        name: "a",
                        value: a.as_f64(),
                        reason: "density form needs a in (0, 1); a = 1 degenerates to a point mass",
                    });
                }
                positive("r", r)?;
                positive("x", x)?;
                positive("y", y)
            }
            DensityKind::DiamondTail { p, alpha } => {
                positive("alpha", alpha)?;
                if p <= T::zero() || p >= T::one() {
                    return Err(Error::InvalidParameter {
                        name: "p",
                        value: p.as_f64(),
                        reason: "tail density form needs p in (0, 1); p = 1 is a plain power tail",
                    });
                }
                Ok(())
            }
            DensityKind::KendallTypeLom { c, alpha, p }
            | DensityKind::KendallTypeMixing { c, alpha, p } => {
                positive("alpha", alpha)?;
                if p < T::lit(2.0) {
                    return Err(Error::InvalidParameter {
                        name: "p",
                        value: p.as_f64(),
                        reason: "kernel exponent ratio requires p >= 2",
                    });
                }
                if c <= -T::one() {
                    return Err(Error::InvalidParameter {
                        name: "c",
                        value: c.as_f64(),
                        reason: "requires c > -1",
                    });
                }
                Ok(())
            }
            DensityKind::GAlpha { alpha, norm } => {
                positive("alpha", alpha)?;
                positive("norm", norm)
            }
            DensityKind::Table { ref grid } => {
                if grid.len() < 2 {
                    return Err(Error::MalformedMeasure(
                        "table needs at least two grid points".into(),
                    ));
                }
                let mut prev = grid[0];
                if prev.0 < T::zero() || prev.1 < T::zero() {
                    return Err(Error::MalformedMeasure("table starts below zero".into()));
                }
                for &(t, f) in &grid[1..] {
                    if !(t > prev.0) || f < prev.1 {
                        return Err(Error::MalformedMeasure(
                            "table grid must be strictly increasing in t and nondecreasing in F"
                                .into(),
                        ));
                    }
                    prev = (t, f);
                }
                let last = grid.last().expect("nonempty").1;
                if (last - T::one()).abs() > T::lit(1e-9) {
                    return Err(Error::MalformedMeasure(
                        "table CDF must reach 1 at the last grid point".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Support of the base density: (lower, upper); `None` = unbounded above.
    pub fn support(&self) -> (T, Option<T>) {
        match *self {
            DensityKind::Pareto { .. } | DensityKind::KuOrderstat { .. } => (T::one(), None),
            DensityKind::Pow { .. } | DensityKind::KuLom { .. } => (T::zero(), Some(T::one())),
            DensityKind::FrechetLike { .. }
            | DensityKind::WeibullKernel { .. }
            | DensityKind::InvWeibullKernel { .. }
            | DensityKind::GAlpha { .. } => (T::zero(), None),
            DensityKind::KingmanRadial { x, y, .. } => ((x - y).abs(), Some(x + y)),
            DensityKind::Kucharczak { r, x, y, .. } => {
                ((x.powf(r) + y.powf(r)).powf(r.recip()), None)
            }
            DensityKind::DiamondTail { .. } | DensityKind::KendallTypeMixing { .. } => {
                (T::one(), None)
            }
            DensityKind::KendallTypeLom { .. } => (T::zero(), Some(T::one())),
            DensityKind::Table { ref grid } => (
                grid.first().expect("nonempty").0,
                Some(grid.last().expect("nonempty").0),
            ),
        }
    }

    /// Base density at t. Zero outside the support.
    pub fn pdf(&self, t: T, cfg: &QuadratureConfig<T>) -> T {
        let (lo, hi) = self.support();
        if t < lo || hi.map_or(false, |h| t > h) {
            return T::zero();
        }
        match *self {
            DensityKind::Pareto { beta } => beta * t.powf(-beta - T::one()),
            DensityKind::Pow { alpha } => {
                if t == T::zero() {
                    // density endpoint; only quadrature probes see it and nodes are interior
                    return if alpha == T::one() { T::one() } else { T::zero() };
                }
                alpha * t.powf(alpha - T::one())
            }
            DensityKind::FrechetLike { alpha } => {
                if t <= T::zero() {
                    return T::zero();
                }
                alpha * t.powf(-alpha - T::one()) * (-t.powf(-alpha)).exp()
            }
            DensityKind::WeibullKernel { a, r } => {
                if t <= T::zero() {
                    return T::zero();
                }
                (r * (-lgamma(a)).exp()) * t.powf(a * r - T::one()) * (-t.powf(r)).exp()
            }
            DensityKind::InvWeibullKernel { a, r } => {
                if t <= T::zero() {
                    return T::zero();
                }
                (r * (-lgamma(a)).exp()) * t.powf(-a * r - T::one()) * (-t.powf(-r)).exp()
            }
            DensityKind::KuOrderstat { alpha, k, n } => {
                let coeff = alpha * T::lit(k as f64) * binomial::<T>(n + k, n);
                let sa = t.powf(-alpha);
                coeff
                    * t.powf(-alpha * T::lit((n + 1) as f64) - T::one())
                    * (T::one() - sa).powi(k as i32 - 1)
            }
            DensityKind::KuLom { alpha, n } => {
                if t == T::zero() {
                    return if alpha == T::one() {
                        T::lit(n as f64)
                    } else {
                        T::zero()
                    };
                }
                T::lit(n as f64)
                    * alpha
                    * t.powf(alpha - T::one())
                    * (T::one() - t.powf(alpha)).powi(n as i32 - 1)
            }
            DensityKind::KingmanRadial { s, x, y } => {
                let d2 = (t * t - (x - y) * (x - y)) * ((x + y) * (x + y) - t * t);
                if d2 <= T::zero() {
                    return T::zero();
                }
                let c = (lgamma(s + T::one())
                    - lgamma(s + T::lit(0.5))
                    - T::lit(core::f64::consts::PI).ln() * T::lit(0.5))
                .exp();
                let two = T::lit(2.0);
                c * two.powf(T::one() - two * s)
                    * (x * y).powf(-two * s)
                    * t
                    * d2.powf(s - T::lit(0.5))
            }
            DensityKind::Kucharczak { a, r, x, y } => {
                let xr = x.powf(r);
                let yr = y.powf(r);
                let s = t.powf(r);
                let w = s - xr - yr;
                if w <= T::zero() {
                    return T::zero();
                }
                let pi = T::lit(core::f64::consts::PI);
                // image of the unit-exponent law under the r-th root, taken
                // at (x^r, y^r): the normalizer carries the r-th powers
                let norm = r * xr.powf(a) * yr.powf(a) * (pi * a).sin() / pi;
                norm * t.powf(r - a * r - T::one()) * (s + w)
                    / (w.powf(a) * (s - xr) * (s - yr))
            }
            DensityKind::DiamondTail { p, alpha } => {
                let two = T::lit(2.0);
                if (p - T::lit(0.5)).abs() < T::lit(1e-9) {
                    // continuity limit of the closed form below
                    alpha * (T::one() + two * alpha * t.ln()) * t.powf(-two * alpha - T::one())
                } else {
                    let q = alpha * (T::one() - two * p) / (T::one() - p);
                    (alpha / (two * p - T::one()))
                        * (two * p - t.powf(q))
                        * t.powf(-two * alpha - T::one())
                }
            }
            DensityKind::KendallTypeLom { c, alpha, p } => {
                if t == T::zero() {
                    return T::zero();
                }
                alpha
                    * ((T::one() + c) - c * p * t.powf(alpha * (p - T::one())))
                    * t.powf(alpha - T::one())
            }
            DensityKind::KendallTypeMixing { c, alpha, p } => {
                alpha * (T::one() + c) * t.powf(-alpha - T::one())
                    - alpha * c * p * t.powf(-alpha * p - T::one())
            }
            DensityKind::GAlpha { alpha, norm } => {
                if t <= T::zero() {
                    return T::zero();
                }
                let inner = crate::numerics::special::sin_moment(alpha, t, cfg);
                T::lit(2.0) * norm * t.powf(-alpha - T::one()) * inner
            }
            DensityKind::Table { ref grid } => {
                let n = grid.len();
                if t <= grid[0].0 || t >= grid[n - 1].0 {
                    return T::zero();
                }
                let i = grid.partition_point(|&(g, _)| g <= t);
                let (t0, f0) = grid[i - 1];
                let (t1, f1) = grid[i];
                (f1 - f0) / (t1 - t0)
            }
        }
    }

    /// Base CDF at t. Closed form where one exists, quadrature otherwise.
    pub fn cdf(&self, t: T, cfg: &QuadratureConfig<T>) -> Result<T> {
        let (lo, hi) = self.support();
        if t < lo {
            return Ok(T::zero());
        }
        if let Some(h) = hi {
            if t >= h {
                return Ok(T::one());
            }
        }
        let one = T::one();
        match *self {
            DensityKind::Pareto { beta } => Ok(one - t.powf(-beta)),
            DensityKind::Pow { alpha } => Ok(t.powf(alpha).min(one)),
            DensityKind::FrechetLike { alpha } => {
                if t <= T::zero() {
                    Ok(T::zero())
                } else {
                    Ok((-t.powf(-alpha)).exp())
                }
            }
            DensityKind::WeibullKernel { a, r } => {
                if t <= T::zero() {
                    return Ok(T::zero());
                }
                Ok(gamma_pq(a, t.powf(r))?.0)
            }
            DensityKind::InvWeibullKernel { a, r } => {
                if t <= T::zero() {
                    return Ok(T::zero());
                }
                Ok(gamma_pq(a, t.powf(-r))?.1)
            }
            DensityKind::KuOrderstat { alpha, k, n } => {
                // P{k-th of N order statistics <= t} = P{Bin(N, F(t)) >= k}
                let nn = n + k;
                let pr = one - t.powf(-alpha);
                let q = one - pr;
                let mut acc = T::zero();
                for j in k..=nn {
                    acc += binomial::<T>(nn, j)
                        * pr.powi(j as i32)
                        * q.powi((nn - j) as i32);
                }
                Ok(acc.min(one).max(T::zero()))
            }
            DensityKind::KuLom { alpha, n } => {
                Ok(one - (one - t.powf(alpha)).powi(n as i32))
            }
            DensityKind::KingmanRadial { .. } | DensityKind::GAlpha { .. } => {
                let v = quad_integrate(|u| self.pdf(u, cfg), lo, t, cfg)?;
                Ok(v.min(one).max(T::zero()))
            }
            DensityKind::Kucharczak { .. } => {
                let v = self.integrate_kucharczak(|_| one, Some(t), cfg)?;
                Ok(v.min(one).max(T::zero()))
            }
            DensityKind::DiamondTail { p, alpha } => {
                let two = T::lit(2.0);
                if (p - T::lit(0.5)).abs() < T::lit(1e-9) {
                    Ok(one - t.powf(-two * alpha) - alpha * t.powf(-two * alpha) * t.ln())
                } else {
                    let f = (p * (one - t.powf(-two * alpha))
                        - (one - p) * (one - t.powf(-alpha / (one - p))))
                        / (two * p - one);
                    Ok(f.min(one).max(T::zero()))
                }
            }
            DensityKind::KendallTypeLom { c, alpha, p } => {
                Ok((one + c) * t.powf(alpha) - c * t.powf(alpha * p))
            }
            DensityKind::KendallTypeMixing { c, alpha, p } => {
                Ok(one - (one + c) * t.powf(-alpha) + c * t.powf(-alpha * p))
            }
            DensityKind::Table { ref grid } => {
                let n = grid.len();
                if t >= grid[n - 1].0 {
                    return Ok(one);
                }
                let i = grid.partition_point(|&(g, _)| g <= t);
                let (t0, f0) = grid[i - 1];
                let (t1, f1) = grid[i];
                Ok(f0 + (f1 - f0) * (t - t0) / (t1 - t0))
            }
        }
    }

    /// Generalized inverse CDF. Closed form where cheap, bisection otherwise.
    pub fn quantile(&self, u: T, cfg: &QuadratureConfig<T>) -> Result<T> {
        if u < T::zero() || u > T::one() {
            return Err(Error::InvalidParameter {
                name: "u",
                value: u.as_f64(),
                reason: "quantile level must lie in [0, 1]",
            });
        }
        let one = T::one();
        let (lo, hi) = self.support();
        if u == one {
            return match hi {
                Some(h) => Ok(h),
                None => Err(Error::UnboundedQuantile { u: 1.0 }),
            };
        }
        match *self {
            DensityKind::Pareto { beta } => Ok((one - u).powf(-beta.recip())),
            DensityKind::Pow { alpha } => Ok(u.powf(alpha.recip())),
            DensityKind::FrechetLike { alpha } => {
                if u == T::zero() {
                    Ok(T::zero())
                } else {
                    Ok((-u.ln()).powf(-alpha.recip()))
                }
            }
            DensityKind::KuLom { alpha, n } => {
                let inner = one - (one - u).powf(T::lit(n as f64).recip());
                Ok(inner.powf(alpha.recip()))
            }
            DensityKind::Table { ref grid } => {
                let i = grid.partition_point(|&(_, f)| f < u);
                if i == 0 {
                    return Ok(grid[0].0);
                }
                let (t0, f0) = grid[i - 1];
                let (t1, f1) = grid[i.min(grid.len() - 1)];
                if f1 == f0 {
                    return Ok(t0);
                }
                Ok(t0 + (t1 - t0) * (u - f0) / (f1 - f0))
            }
            _ => bisect_quantile(|t| self.cdf(t, cfg), lo, hi, u),
        }
    }

    /// Integral of f against the base density over its support, capped at
    /// `upper` when given. Handles this catalog's singular edges.
    pub fn integrate_against<F: Fn(T) -> T>(
        &self,
        f: F,
        upper: Option<T>,
        breakpoints: &[T],
        cfg: &QuadratureConfig<T>,
    ) -> Result<T> {
        let (lo, hi) = self.support();
        let b = match (upper, hi) {
            (Some(u), Some(h)) => u.min(h),
            (Some(u), None) => u,
            (None, Some(h)) => h,
            (None, None) => T::infinity(),
        };
        if b <= lo {
            return Ok(T::zero());
        }
        if let DensityKind::Kucharczak { .. } = self {
            let cap = if b.is_finite() { Some(b) } else { None };
            return self.integrate_kucharczak(f, cap, cfg);
        }
        quad_with_breakpoints(|t| f(t) * self.pdf(t, cfg), lo, b, breakpoints, cfg)
    }

    /// Kucharczak integrals in the substituted variable u = (t^r - x^r - y^r)^{1-a},
    /// which removes the integrable edge singularity exactly.
    fn integrate_kucharczak<F: Fn(T) -> T>(
        &self,
        f: F,
        upper: Option<T>,
        cfg: &QuadratureConfig<T>,
    ) -> Result<T> {
        let (a, r, x, y) = match *self {
            DensityKind::Kucharczak { a, r, x, y } => (a, r, x, y),
            _ => unreachable!("kucharczak-only path"),
        };
        let one = T::one();
        let xr = x.powf(r);
        let yr = y.powf(r);
        let pi = T::lit(core::f64::consts::PI);
        let norm = xr.powf(a) * yr.powf(a) * (pi * a).sin() / ((one - a) * pi);
        let expo = (one - a).recip();
        let integrand = move |u: T| {
            let s = xr + yr + u.powf(expo);
            let t = s.powf(r.recip());
            f(t) * norm * s.powf(-a) * (s + s - xr - yr) / ((s - xr) * (s - yr))
        };
        let u_max = match upper {
            Some(t) => {
                let w = t.powf(r) - xr - yr;
                if w <= T::zero() {
                    return Ok(T::zero());
                }
                w.powf(one - a)
            }
            None => T::infinity(),
        };
        quad_integrate(integrand, T::zero(), u_max, cfg)
    }

    /// Total mass of the base density, by quadrature; equals 1 for every
    /// correctly normalized catalog entry.
    pub fn mass(&self, cfg: &QuadratureConfig<T>) -> Result<T> {
        self.integrate_against(|_| T::one(), None, &[], cfg)
    }
}

/// Generalized-inverse bisection on a monotone CDF.
fn bisect_quantile<T: Real>(
    cdf: impl Fn(T) -> Result<T>,
    lo0: T,
    hi0: Option<T>,
    u: T,
) -> Result<T> {
    let mut lo = lo0;
    let mut hi = match hi0 {
        Some(h) => h,
        None => {
            let mut h = lo0.max(T::one()) * T::lit(2.0);
            let mut grew = 0;
            while cdf(h)? < u {
                h *= T::lit(2.0);
                grew += 1;
                if grew > 200 {
                    return Err(Error::UnboundedQuantile { u: u.as_f64() });
                }
            }
            h
        }
    };
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid)? >= u {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Weighted continuous component: the law of `scale * X` where X has the base
/// density, carrying probability `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousComponent<T: Real> {
    pub density: DensityKind<T>,
    pub scale: T,
    pub w: T,
}

impl<T: Real> ContinuousComponent<T> {
    pub fn new(density: DensityKind<T>, w: T) -> Self {
        Self {
            density,
            scale: T::one(),
            w,
        }
    }

    pub fn support(&self) -> (T, Option<T>) {
        let (lo, hi) = self.density.support();
        (lo * self.scale, hi.map(|h| h * self.scale))
    }

    /// CDF of the scaled law (weight not applied).
    pub fn cdf(&self, t: T, cfg: &QuadratureConfig<T>) -> Result<T> {
        self.density.cdf(t / self.scale, cfg)
    }

    pub fn quantile(&self, u: T, cfg: &QuadratureConfig<T>) -> Result<T> {
        Ok(self.scale * self.density.quantile(u, cfg)?)
    }

    pub fn pdf(&self, t: T, cfg: &QuadratureConfig<T>) -> T {
        self.density.pdf(t / self.scale, cfg) / self.scale
    }

    /// Integral of f against the scaled law (weight not applied). Breakpoints
    /// are in the scaled variable.
    pub fn integrate_against<F: Fn(T) -> T>(
        &self,
        f: F,
        breakpoints: &[T],
        cfg: &QuadratureConfig<T>,
    ) -> Result<T> {
        let s = self.scale;
        let base_bps: Vec<T> = breakpoints.iter().map(|&b| b / s).collect();
        self.density
            .integrate_against(move |t| f(s * t), None, &base_bps, cfg)
    }
}

#[derive(Serialize)]
#[serde(bound(serialize = "T: Real"))]
struct ComponentRepr<'a, T: Real> {
    #[serde(flatten)]
    density: &'a DensityKind<T>,
    scale: T,
    w: T,
    support: (T, Option<T>),
}

impl<T: Real> Serialize for ContinuousComponent<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        ComponentRepr {
            density: &self.density,
            scale: self.scale,
            w: self.w,
            support: self.support(),
        }
        .serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
struct ComponentDe<T: Real> {
    #[serde(flatten)]
    density: DensityKind<T>,
    scale: Option<T>,
    w: T,
    #[serde(default)]
    #[allow(dead_code)]
    support: Option<serde_json::Value>,
}

impl<'de, T: Real> Deserialize<'de> for ContinuousComponent<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let raw = ComponentDe::deserialize(d)?;
        Ok(ContinuousComponent {
            density: raw.density,
            scale: raw.scale.unwrap_or_else(T::one),
            w: raw.w,
        })
    }
}

/// Probability measure on [0, inf): atoms plus continuous components.
/// Total weight must be 1 within `WEIGHT_TOL`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct MixtureMeasure<T: Real> {
    pub atoms: Vec<Atom<T>>,
    pub continuous: Vec<ContinuousComponent<T>>,
}

pub const WEIGHT_TOL: f64 = 1e-12;

impl<T: Real> MixtureMeasure<T> {
    /// Point mass at `loc`.
    pub fn dirac(loc: T) -> Self {
        Self {
            atoms: vec![Atom { loc, w: T::one() }],
            continuous: Vec::new(),
        }
    }

    pub fn from_parts(
        atoms: Vec<Atom<T>>,
        continuous: Vec<ContinuousComponent<T>>,
    ) -> Result<Self> {
        let m = Self { atoms, continuous };
        m.validate()?;
        Ok(m.normalized())
    }

    /// Checks weights, supports, and component parameters.
    pub fn validate(&self) -> Result<()> {
        let mut total = T::zero();
        for a in &self.atoms {
            if a.loc < T::zero() || !a.loc.is_finite() {
                return Err(Error::MalformedMeasure(format!(
                    "atom location {} outside [0, inf)",
                    a.loc
                )));
            }
            if a.w < T::zero() || a.w > T::one() + T::lit(WEIGHT_TOL) {
                return Err(Error::MalformedMeasure(format!("atom weight {}", a.w)));
            }
            total += a.w;
        }
        for c in &self.continuous {
            c.density.validate()?;
            if c.scale <= T::zero() || !c.scale.is_finite() {
                return Err(Error::MalformedMeasure(format!("component scale {}", c.scale)));
            }
            if c.w < T::zero() || c.w > T::one() + T::lit(WEIGHT_TOL) {
                return Err(Error::MalformedMeasure(format!("component weight {}", c.w)));
            }
            total += c.w;
        }
        let tol = T::lit(WEIGHT_TOL).max(T::epsilon() * T::lit(8.0));
        if (total - T::one()).abs() > tol {
            return Err(Error::WeightSum {
                total: total.as_f64(),
                tolerance: tol.as_f64(),
            });
        }
        Ok(())
    }

    /// Merges equal-location atoms, drops zero-weight parts, sorts atoms.
    fn normalized(mut self) -> Self {
        self.atoms
            .sort_by(|a, b| a.loc.partial_cmp(&b.loc).expect("finite atom locations"));
        let mut merged: Vec<Atom<T>> = Vec::with_capacity(self.atoms.len());
        for a in self.atoms.drain(..) {
            if a.w == T::zero() {
                continue;
            }
            match merged.last_mut() {
                Some(last) if last.loc == a.loc => last.w += a.w,
                _ => merged.push(a),
            }
        }
        self.atoms = merged;
        self.continuous.retain(|c| c.w != T::zero());
        self
    }

    /// Pushforward under t -> a t. Dilation by 0 collapses to the point mass
    /// at 0 by definition.
    pub fn dilate(&self, a: T) -> Self {
        assert!(
            a >= T::zero() && a.is_finite(),
            "dilation factor must be finite and nonnegative"
        );
        if a == T::zero() {
            return Self::dirac(T::zero());
        }
        let atoms = self
            .atoms
            .iter()
            .map(|at| Atom {
                loc: at.loc * a,
                w: at.w,
            })
            .collect();
        let continuous = self
            .continuous
            .iter()
            .map(|c| ContinuousComponent {
                density: c.density.clone(),
                scale: c.scale * a,
                w: c.w,
            })
            .collect();
        Self { atoms, continuous }.normalized()
    }

    /// Convex combination of measures; weights must sum to 1 within tolerance.
    pub fn mix(parts: &[(T, Self)]) -> Result<Self> {
        let total: T = parts.iter().fold(T::zero(), |acc, (w, _)| acc + *w);
        let tol = T::lit(WEIGHT_TOL).max(T::epsilon() * T::lit(8.0));
        if (total - T::one()).abs() > tol {
            return Err(Error::WeightSum {
                total: total.as_f64(),
                tolerance: tol.as_f64(),
            });
        }
        let mut atoms = Vec::new();
        let mut continuous = Vec::new();
        for (w, m) in parts {
            if *w < T::zero() {
                return Err(Error::MalformedMeasure(format!("mixture weight {w}")));
            }
            for a in &m.atoms {
                atoms.push(Atom {
                    loc: a.loc,
                    w: *w * a.w,
                });
            }
            for c in &m.continuous {
                continuous.push(ContinuousComponent {
                    density: c.density.clone(),
                    scale: c.scale,
                    w: *w * c.w,
                });
            }
        }
        Ok(Self { atoms, continuous }.normalized())
    }

    /// Right-continuous CDF.
    pub fn cdf(&self, t: T, cfg: &QuadratureConfig<T>) -> Result<T> {
        let mut acc = T::zero();
        for a in &self.atoms {
            if a.loc <= t {
                acc += a.w;
            }
        }
        for c in &self.continuous {
            acc += c.w * c.cdf(t, cfg)?;
        }
        Ok(acc.min(T::one()))
    }

    /// Left limit of the CDF (excludes an atom exactly at t).
    pub fn cdf_left(&self, t: T, cfg: &QuadratureConfig<T>) -> Result<T> {
        let mut acc = T::zero();
        for a in &self.atoms {
            if a.loc < t {
                acc += a.w;
            }
        }
        for c in &self.continuous {
            acc += c.w * c.cdf(t, cfg)?;
        }
        Ok(acc.min(T::one()))
    }

    /// Strict survival probability P{X > t}.
    pub fn survival(&self, t: T, cfg: &QuadratureConfig<T>) -> Result<T> {
        Ok((T::one() - self.cdf(t, cfg)?).max(T::zero()))
    }

    /// Smallest t with CDF(t) >= u. Errors for u = 1 on unbounded support.
    pub fn quantile(&self, u: T, cfg: &QuadratureConfig<T>) -> Result<T> {
        if u < T::zero() || u > T::one() {
            return Err(Error::InvalidParameter {
                name: "u",
                value: u.as_f64(),
                reason: "quantile level must lie in [0, 1]",
            });
        }
        // Pure-atom fast path is exact.
        if self.continuous.is_empty() {
            let mut acc = T::zero();
            for a in &self.atoms {
                acc += a.w;
                if acc >= u {
                    return Ok(a.loc);
                }
            }
            return Ok(self.atoms.last().map_or(T::zero(), |a| a.loc));
        }
        // Single continuous component: defer to its own (often closed-form)
        // inverse instead of bisecting the mixture CDF.
        if self.atoms.is_empty() && self.continuous.len() == 1 {
            return self.continuous[0].quantile(u, cfg);
        }
        let (lo, hi) = self.support();
        if u == T::one() && hi.is_none() {
            return Err(Error::UnboundedQuantile { u: 1.0 });
        }
        bisect_quantile(|t| self.cdf(t, cfg), lo, hi, u)
    }

    /// Support hull across all parts.
    pub fn support(&self) -> (T, Option<T>) {
        let mut lo = T::infinity();
        let mut hi = Some(T::neg_infinity());
        for a in &self.atoms {
            lo = lo.min(a.loc);
            hi = hi.map(|h| h.max(a.loc));
        }
        for c in &self.continuous {
            let (l, h) = c.support();
            lo = lo.min(l);
            hi = match (hi, h) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
        }
        if lo == T::infinity() {
            lo = T::zero();
        }
        (lo, hi)
    }

    /// Integral of f against the measure, splitting continuous parts at the
    /// supplied breakpoints.
    pub fn integrate_against<F: Fn(T) -> T>(
        &self,
        f: F,
        breakpoints: &[T],
        cfg: &QuadratureConfig<T>,
    ) -> Result<T> {
        let mut acc = T::zero();
        for a in &self.atoms {
            acc += a.w * f(a.loc);
        }
        for c in &self.continuous {
            acc += c.w * c.integrate_against(&f, breakpoints, cfg)?;
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: Self =
            serde_json::from_str(s).map_err(|e| Error::MalformedMeasure(e.to_string()))?;
        m.validate()?;
        Ok(m.normalized())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> QuadratureConfig<f64> {
        QuadratureConfig::default()
    }

    fn pareto(beta: f64) -> DensityKind<f64> {
        DensityKind::Pareto { beta }
    }

    #[test]
    fn pareto_cdf_matches_its_density() {
        let d = pareto(2.0);
        for &t in &[1.2, 2.0, 5.0, 20.0] {
            let by_quad = d.integrate_against(|_| 1.0, Some(t), &[], &cfg()).unwrap();
            assert_relative_eq!(by_quad, d.cdf(t, &cfg()).unwrap(), epsilon = 1e-10);
        }
    }

    #[test]
    fn dilated_pareto_cdf() {
        // law of a*X for X ~ Pareto(beta): CDF 1 - (t/a)^{-beta} on [a, inf)
        let m = MixtureMeasure::from_parts(
            vec![],
            vec![ContinuousComponent::new(pareto(3.0), 1.0)],
        )
        .unwrap()
        .dilate(2.0);
        assert_eq!(m.cdf(1.9, &cfg()).unwrap(), 0.0);
        for &t in &[2.5, 4.0, 10.0] {
            assert_relative_eq!(
                m.cdf(t, &cfg()).unwrap(),
                1.0 - (t / 2.0).powi(-3),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn dirac_quantile_is_exact() {
        let m = MixtureMeasure::dirac(2.5f64);
        for &u in &[0.0, 0.3, 0.999] {
            assert_eq!(m.quantile(u, &cfg()).unwrap(), 2.5);
        }
    }

    #[test]
    fn dilate_by_zero_collapses() {
        let m = MixtureMeasure::from_parts(
            vec![],
            vec![ContinuousComponent::new(pareto(2.0), 1.0)],
        )
        .unwrap();
        assert_eq!(m.dilate(0.0), MixtureMeasure::dirac(0.0));
    }

    #[test]
    fn mixture_weight_sum_is_enforced() {
        let err = MixtureMeasure::from_parts(
            vec![Atom { loc: 1.0, w: 0.6 }],
            vec![ContinuousComponent::new(pareto(2.0), 0.3)],
        );
        assert!(matches!(err, Err(Error::WeightSum { .. })));
    }

    #[test]
    fn kendall_style_mixture_quantile_galois() {
        // (1 - x) delta_1 + x Pareto(2alpha), the basic convolution output shape
        let x = 0.3f64;
        let m = MixtureMeasure::from_parts(
            vec![Atom { loc: 1.0, w: 1.0 - x }],
            vec![ContinuousComponent::new(pareto(2.0), x)],
        )
        .unwrap();
        for &u in &[0.0, 0.2, 0.5, 0.69, 0.7, 0.71, 0.95] {
            let q = m.quantile(u, &cfg()).unwrap();
            let f = m.cdf(q, &cfg()).unwrap();
            assert!(f >= u - 1e-9, "cdf(quantile({u})) = {f}");
        }
        // the atom absorbs all u <= 0.7
        assert_relative_eq!(m.quantile(0.5, &cfg()).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn ku_orderstat_cdf_closed_form_matches_quadrature() {
        let d = DensityKind::KuOrderstat {
            alpha: 1.0f64,
            k: 2,
            n: 3,
        };
        assert_relative_eq!(d.mass(&cfg()).unwrap(), 1.0, epsilon = 1e-10);
        for &t in &[1.1, 1.5, 3.0, 10.0] {
            let by_quad = d.integrate_against(|_| 1.0, Some(t), &[], &cfg()).unwrap();
            assert_relative_eq!(by_quad, d.cdf(t, &cfg()).unwrap(), epsilon = 1e-9);
        }
    }

    #[test]
    fn ku_lom_quantile_closed_form() {
        let d = DensityKind::KuLom { alpha: 2.0f64, n: 3 };
        for &u in &[0.1, 0.5, 0.9] {
            let q = d.quantile(u, &cfg()).unwrap();
            assert_relative_eq!(d.cdf(q, &cfg()).unwrap(), u, epsilon = 1e-12);
        }
    }

    #[test]
    fn weibull_kernel_is_exponential_at_unit_parameters() {
        let d = DensityKind::WeibullKernel { a: 1.0f64, r: 1.0 };
        for &t in &[0.1, 1.0, 3.0] {
            assert_relative_eq!(d.cdf(t, &cfg()).unwrap(), 1.0 - (-t).exp(), epsilon = 1e-12);
            assert_relative_eq!(d.pdf(t, &cfg()), (-t).exp(), epsilon = 1e-12);
        }
    }

    #[test]
    fn inv_weibull_cdf_is_survival_of_reciprocal() {
        let w = DensityKind::WeibullKernel { a: 0.5f64, r: 2.0 };
        let iw = DensityKind::InvWeibullKernel { a: 0.5f64, r: 2.0 };
        for &t in &[0.4, 1.0, 2.5] {
            // P{1/X <= t} = P{X >= 1/t}
            let lhs = iw.cdf(t, &cfg()).unwrap();
            let rhs = 1.0 - w.cdf(1.0 / t, &cfg()).unwrap();
            assert_relative_eq!(lhs, rhs, epsilon = 1e-12);
        }
        assert_relative_eq!(iw.mass(&cfg()).unwrap(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn kingman_radial_half_order_is_triangle_free() {
        // s = 1/2, x = y = 1: the radius law has CDF r^2/4 on [0, 2]
        let d = DensityKind::KingmanRadial {
            s: 0.5f64,
            x: 1.0,
            y: 1.0,
        };
        assert_relative_eq!(d.mass(&cfg()).unwrap(), 1.0, epsilon = 1e-9);
        for &r in &[0.5, 1.0, 1.5] {
            assert_relative_eq!(d.cdf(r, &cfg()).unwrap(), r * r / 4.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn kingman_radial_low_order_mass() {
        let d = DensityKind::KingmanRadial {
            s: 0.0f64,
            x: 0.5,
            y: 1.0,
        };
        // s = 0 has (.)^{-1/2} edge singularities; mass must still be 1
        let cfg9 = QuadratureConfig {
            abs_tol: 1e-9,
            ..cfg()
        };
        assert_relative_eq!(d.mass(&cfg9).unwrap(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn kucharczak_unit_mass_and_support_edge() {
        let d = DensityKind::Kucharczak {
            a: 0.5f64,
            r: 1.0,
            x: 1.0,
            y: 1.0,
        };
        assert_relative_eq!(d.mass(&cfg()).unwrap(), 1.0, epsilon = 1e-8);
        // support starts where the density's root factor turns real
        assert_eq!(d.support().0, 2.0);
        assert_eq!(d.cdf(2.0, &cfg()).unwrap(), 0.0);
        assert!(d.cdf(3.0, &cfg()).unwrap() > 0.0);
    }

    #[test]
    fn diamond_tail_masses() {
        for &p in &[0.2, 0.5, 0.9] {
            for &alpha in &[0.5, 1.0, 2.0] {
                let d = DensityKind::DiamondTail { p, alpha };
                assert_relative_eq!(d.mass(&cfg()).unwrap(), 1.0, epsilon = 1e-9);
                // closed-form CDF against quadrature
                let t = 2.3;
                let by_quad = d.integrate_against(|_| 1.0, Some(t), &[], &cfg()).unwrap();
                assert_relative_eq!(by_quad, d.cdf(t, &cfg()).unwrap(), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn table_component_round_trip() {
        let grid = vec![(0.0f64, 0.0), (1.0, 0.25), (2.0, 1.0)];
        let d = DensityKind::Table { grid };
        d.validate().unwrap();
        assert_relative_eq!(d.cdf(0.5, &cfg()).unwrap(), 0.125);
        assert_relative_eq!(d.quantile(0.5, &cfg()).unwrap(), 4.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(d.mass(&cfg()).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn serde_round_trip_preserves_measure() {
        let m = MixtureMeasure::from_parts(
            vec![Atom { loc: 1.0f64, w: 0.75 }],
            vec![ContinuousComponent {
                density: pareto(2.0),
                scale: 1.5,
                w: 0.25,
            }],
        )
        .unwrap();
        let s = m.to_json();
        let back = MixtureMeasure::from_json(&s).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn serialization_shape_is_stable() {
        let m = MixtureMeasure::from_parts(
            vec![Atom { loc: 1.0f64, w: 0.5 }],
            vec![ContinuousComponent::new(pareto(2.0), 0.5)],
        )
        .unwrap();
        assert_eq!(
            m.to_json(),
            "{\"atoms\":[{\"loc\":1.0,\"w\":0.5}],\"continuous\":[{\"id\":\"pareto\",\"params\":{\"beta\":2.0},\"scale\":1.0,\"w\":0.5,\"support\":[1.0,null]}]}"
        );
    }

    #[test]
    fn integrate_against_counts_atoms() {
        let m = MixtureMeasure::from_parts(
            vec![Atom { loc: 2.0f64, w: 0.5 }],
            vec![ContinuousComponent::new(DensityKind::Pow { alpha: 1.0 }, 0.5)],
        )
        .unwrap();
        // E[t] = 0.5*2 + 0.5*0.5
        let mean = m.integrate_against(|t| t, &[], &cfg()).unwrap();
        assert_relative_eq!(mean, 1.25, epsilon = 1e-10);
    }
}
