//! Adaptive quadrature on the half-line.
//!
//! Segments between breakpoints are integrated by double-exponential rules:
//! tanh-sinh on finite intervals and exp-sinh on infinite tails. These
//! converge at machine precision even across integrable endpoint
//! singularities (x^{-1/2}-type edges, heavy tails), which the density
//! catalog produces routinely. A globally adaptive Gauss-Kronrod 7-15 pair
//! backs them up for integrands with structure the caller did not flag: the
//! panel with the worst error estimate is bisected until the combined
//! estimate meets tolerance or the budget runs out, and the better of the
//! two estimates wins.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::real::Real;

/// Tolerances and limits shared by every quadrature-backed operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig<T: Real> {
    pub abs_tol: T,
    pub rel_tol: T,
    /// Maximum bisection depth per panel.
    pub max_depth: u32,
    /// Mass below which an infinite tail may be truncated by callers that
    /// integrate against a known law.
    pub infinite_tail_cutoff_mass: T,
}

impl<T: Real> Default for QuadratureConfig<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::lit(1e-10),
            rel_tol: T::lit(1e-10),
            max_depth: 60,
            infinite_tail_cutoff_mass: T::lit(1e-12),
        }
    }
}

impl<T: Real> QuadratureConfig<T> {
    pub fn with_abs_tol(mut self, tol: T) -> Self {
        self.abs_tol = tol;
        self
    }

    pub fn with_rel_tol(mut self, tol: T) -> Self {
        self.rel_tol = tol;
        self
    }
}

// Gauss-Kronrod 7-15 nodes and weights (positive abscissae).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn rescale_error<T: Real>(err: T, resabs: T, resasc: T) -> T {
    let mut err = err.abs();
    if resasc != T::zero() && err != T::zero() {
        let scale = (T::lit(200.0) * err / resasc).powf(T::lit(1.5));
        err = if scale < T::one() { resasc * scale } else { resasc };
    }
    let eps50 = T::epsilon() * T::lit(50.0);
    if resabs > T::min_positive_value() / eps50 {
        err = err.max(eps50 * resabs);
    }
    err
}

/// One Kronrod panel: (value, error estimate, integral of |f|).
pub(crate) fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T, T) {
    let half = T::lit(0.5);
    let c = (a + b) * half;
    let h = (b - a) * half;
    let fc = f(c);
    let mut resg = fc * T::lit(WG[3]);
    let mut resk = fc * T::lit(WGK[7]);
    let mut resabs = fc.abs() * T::lit(WGK[7]);
    let mut fv = [T::zero(); 14];
    for i in 0..7 {
        let x = h * T::lit(XGK[i]);
        let f1 = f(c - x);
        let f2 = f(c + x);
        fv[2 * i] = f1;
        fv[2 * i + 1] = f2;
        let fsum = f1 + f2;
        resk += T::lit(WGK[i]) * fsum;
        resabs += T::lit(WGK[i]) * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            resg += T::lit(WG[i / 2]) * fsum;
        }
    }
    let reskh = resk * half;
    let mut resasc = T::lit(WGK[7]) * (fc - reskh).abs();
    for i in 0..7 {
        resasc += T::lit(WGK[i]) * ((fv[2 * i] - reskh).abs() + (fv[2 * i + 1] - reskh).abs());
    }
    let value = resk * h;
    let err = rescale_error((resk - resg) * h, resabs * h.abs(), resasc * h.abs());
    if value.is_finite() {
        (value, err, resabs * h.abs())
    } else {
        (T::zero(), T::infinity(), resabs * h.abs())
    }
}

struct HeapPanel<T> {
    key: u64,
    a: T,
    b: T,
    value: T,
    error: T,
    resabs: T,
    depth: u32,
}

impl<T> HeapPanel<T> {
    fn new(a: T, b: T, value: T, error: T, resabs: T, depth: u32) -> Self
    where
        T: Real,
    {
        let e = error.as_f64();
        let key = if e.is_nan() { u64::MAX } else { e.to_bits() };
        Self {
            key,
            a,
            b,
            value,
            error,
            resabs,
            depth,
        }
    }
}

impl<T> PartialEq for HeapPanel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl<T> Eq for HeapPanel<T> {}
impl<T> PartialOrd for HeapPanel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for HeapPanel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}

const MAX_PANELS: usize = 20_000;

struct Partial<T> {
    value: T,
    error: T,
    resabs: T,
}

/// Globally adaptive integration over a finite interval. Never fails; the
/// caller judges the returned error estimate.
fn adaptive<T: Real, F: Fn(T) -> T>(
    f: &F,
    a: T,
    b: T,
    abs_tol: T,
    rel_tol: T,
    max_depth: u32,
) -> Partial<T> {
    let (v, e, ra) = gk15(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(HeapPanel::new(a, b, v, e, ra, 0));
    let mut total = Partial {
        value: v,
        error: e,
        resabs: ra,
    };
    let mut frozen_error = T::zero();
    let mut panels = 1usize;
    let eps50 = T::epsilon() * T::lit(50.0);
    loop {
        let tol = abs_tol
            .max(rel_tol * total.value.abs())
            .max(eps50 * total.resabs);
        if total.error <= tol || panels >= MAX_PANELS {
            return total;
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => return total,
        };
        let width_floor =
            T::epsilon() * T::lit(8.0) * (worst.a.abs() + worst.b.abs() + T::one());
        if worst.depth >= max_depth || (worst.b - worst.a).abs() <= width_floor {
            // Unsplittable; its error stays in the total permanently.
            frozen_error += worst.error;
            if heap.is_empty() {
                return total;
            }
            continue;
        }
        let mid = (worst.a + worst.b) * T::lit(0.5);
        let (v1, e1, r1) = gk15(f, worst.a, mid);
        let (v2, e2, r2) = gk15(f, mid, worst.b);
        total.value = total.value - worst.value + v1 + v2;
        total.resabs = total.resabs - worst.resabs + r1 + r2;
        // Rebuild the live error sum from the heap contributions.
        total.error = total.error - worst.error + e1 + e2;
        if total.error < frozen_error {
            total.error = frozen_error;
        }
        heap.push(HeapPanel::new(worst.a, mid, v1, e1, r1, worst.depth + 1));
        heap.push(HeapPanel::new(mid, worst.b, v2, e2, r2, worst.depth + 1));
        panels += 1;
    }
}

/// Shared level-doubling driver for the double-exponential rules. `g` is the
/// transformed integrand (weight included); `t_cut` bounds the abscissa
/// parameter where contributions have provably underflowed. Non-finite `g`
/// values are treated as zero, which is exact in the limit for integrable
/// endpoint singularities because the weights decay double-exponentially.
fn de_levels<T: Real, G: Fn(T) -> T>(g: &G, t_cut: T, abs_tol: T, rel_tol: T) -> Partial<T> {
    let safe = |t: T| {
        let v = g(t);
        if v.is_finite() {
            v
        } else {
            T::zero()
        }
    };
    let mut h = T::one();
    let mut sum = safe(T::zero());
    let mut resabs_sum = sum.abs();
    let mut k = T::one();
    while k <= t_cut {
        let p = safe(k);
        let m = safe(-k);
        sum += p + m;
        resabs_sum += p.abs() + m.abs();
        k += T::one();
    }
    let mut value = sum * h;
    let mut resabs = resabs_sum * h;
    let mut prev_diff = T::infinity();
    let mut err = T::infinity();
    let eps50 = T::epsilon() * T::lit(50.0);
    for _level in 0..10 {
        h *= T::lit(0.5);
        let mut odd_sum = T::zero();
        let mut odd_abs = T::zero();
        let mut t = h;
        while t <= t_cut {
            let p = safe(t);
            let m = safe(-t);
            odd_sum += p + m;
            odd_abs += p.abs() + m.abs();
            t += h + h;
        }
        let new_value = value * T::lit(0.5) + odd_sum * h;
        resabs = resabs * T::lit(0.5) + odd_abs * h;
        let diff = (new_value - value).abs();
        value = new_value;
        let floor = eps50 * resabs.max(value.abs());
        err = if diff == T::zero() {
            floor
        } else if prev_diff.is_finite() && prev_diff > diff && prev_diff > T::zero() {
            // double-exponential convergence: extrapolate one more halving
            (diff * (diff / prev_diff)).max(floor)
        } else {
            diff
        };
        prev_diff = diff;
        if err <= abs_tol.max(rel_tol * value.abs()) {
            break;
        }
    }
    Partial {
        value,
        error: err,
        resabs,
    }
}

/// Tanh-sinh rule over a finite interval: x = mid + half tanh((pi/2) sinh t).
/// The offset from the nearer endpoint is computed in exact form so abscissae
/// approach the endpoints to within denormal range without cancellation.
fn tanh_sinh<T: Real, F: Fn(T) -> T>(
    f: &F,
    a: T,
    b: T,
    abs_tol: T,
    rel_tol: T,
) -> Partial<T> {
    let half = (b - a) * T::lit(0.5);
    let pi_2 = T::lit(core::f64::consts::FRAC_PI_2);
    let g = |t: T| {
        let u = pi_2 * t.sinh();
        if u.abs() > T::lit(350.0) {
            return T::zero();
        }
        let sech = u.cosh().recip();
        let w = pi_2 * t.cosh() * sech * sech;
        let e2u = (-(u.abs() + u.abs())).exp();
        let delta = half * (e2u + e2u) / (T::one() + e2u);
        let x = if t >= T::zero() { b - delta } else { a + delta };
        f(x) * w
    };
    // (pi/2) sinh(6.11) > 350, so contributions past there are zero
    let mut part = de_levels(&g, T::lit(6.11), abs_tol / half.max(T::one()), rel_tol);
    part.value *= half;
    part.error *= half;
    part.resabs *= half;
    part
}

/// Exp-sinh rule over [a, inf): x = a + exp((pi/2) sinh t). Covers both a
/// singular lower endpoint and an algebraically or exponentially decaying
/// tail on the same double-exponential grid.
fn exp_sinh<T: Real, F: Fn(T) -> T>(f: &F, a: T, abs_tol: T, rel_tol: T) -> Partial<T> {
    let pi_2 = T::lit(core::f64::consts::FRAC_PI_2);
    let g = |t: T| {
        let u = pi_2 * t.sinh();
        if u.abs() > T::lit(690.0) {
            return T::zero();
        }
        let eu = u.exp();
        f(a + eu) * eu * pi_2 * t.cosh()
    };
    // (pi/2) sinh(6.8) > 690
    de_levels(&g, T::lit(6.8), abs_tol, rel_tol)
}

/// Integrate f over [a, b] with b possibly infinite.
pub fn quad_integrate<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    cfg: &QuadratureConfig<T>,
) -> Result<T> {
    quad_with_breakpoints(f, a, b, &[], cfg)
}

/// Integrate f over [a, b], splitting at the supplied interior breakpoints
/// (kinks, jumps, oscillation period boundaries). Infinite b is folded by
/// u = 1/t past the last breakpoint.
pub fn quad_with_breakpoints<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    breakpoints: &[T],
    cfg: &QuadratureConfig<T>,
) -> Result<T> {
    if a.is_nan() || b.is_nan() || a > b {
        return Err(Error::InvalidParameter {
            name: "interval",
            value: a.as_f64(),
            reason: "requires a <= b",
        });
    }
    if a == b {
        return Ok(T::zero());
    }
    let mut cuts: Vec<T> = breakpoints
        .iter()
        .copied()
        .filter(|t| t.is_finite() && *t > a && *t < b)
        .collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    cuts.dedup();

    let infinite = b.is_infinite();
    let finite_end = if infinite {
        let mut c = a.max(T::one());
        if let Some(&last) = cuts.last() {
            c = c.max(last);
        }
        c
    } else {
        b
    };

    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    for c in cuts {
        if c < finite_end {
            edges.push(c);
        }
    }
    edges.push(finite_end);
    edges.dedup();

    let nseg = (edges.len() - 1) + usize::from(infinite);
    let per_abs = cfg.abs_tol / T::lit(nseg.max(1) as f64);

    let mut total = Partial {
        value: T::zero(),
        error: T::zero(),
        resabs: T::zero(),
    };
    for w in edges.windows(2) {
        let mut part = tanh_sinh(&f, w[0], w[1], per_abs, cfg.rel_tol);
        if part.error > per_abs.max(cfg.rel_tol * part.value.abs()) {
            // unflagged interior structure; let bisection compete
            let alt = adaptive(&f, w[0], w[1], per_abs, cfg.rel_tol, cfg.max_depth);
            if alt.error < part.error {
                part = alt;
            }
        }
        total.value += part.value;
        total.error += part.error;
        total.resabs += part.resabs;
    }
    if infinite {
        let c = finite_end;
        let mut part = exp_sinh(&f, c, per_abs, cfg.rel_tol);
        if part.error > per_abs.max(cfg.rel_tol * part.value.abs()) {
            let g = |u: T| f(u.recip()) / (u * u);
            let alt = adaptive(&g, T::zero(), c.recip(), per_abs, cfg.rel_tol, cfg.max_depth);
            if alt.error < part.error {
                part = alt;
            }
        }
        total.value += part.value;
        total.error += part.error;
        total.resabs += part.resabs;
    }

    let eps50 = T::epsilon() * T::lit(50.0);
    let tol = cfg
        .abs_tol
        .max(cfg.rel_tol * total.value.abs())
        .max(eps50 * total.resabs);
    if total.error <= tol && total.value.is_finite() {
        Ok(total.value)
    } else {
        Err(Error::QuadratureNonConvergence {
            value: total.value.as_f64(),
            estimate: total.error.as_f64(),
        })
    }
}

/// n evenly spaced points from a to b inclusive.
pub fn linspace<T: Real>(a: T, b: T, n: usize) -> Vec<T> {
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![a];
    }
    let step = (b - a) / T::lit((n - 1) as f64);
    (0..n)
        .map(|i| {
            if i == n - 1 {
                b
            } else {
                a + step * T::lit(i as f64)
            }
        })
        .collect()
}

/// Integral of f(y) cos(omega y) over [lo, hi) or [lo, inf). Half-period
/// multiples are quadrature breakpoints; an infinite tail is summed as an
/// alternating series of half-period segments with Euler acceleration, which
/// converges even for slowly decaying power tails.
pub fn cos_weighted_integral<T: Real, F: Fn(T) -> T>(
    f: F,
    lo: T,
    hi: Option<T>,
    omega: T,
    cfg: &QuadratureConfig<T>,
) -> Result<T> {
    if omega < T::zero() || !omega.is_finite() {
        return Err(Error::InvalidParameter {
            name: "omega",
            value: omega.as_f64(),
            reason: "oscillation frequency must be finite and nonnegative",
        });
    }
    let g = |y: T| f(y) * (omega * y).cos();
    if omega == T::zero() {
        return quad_with_breakpoints(g, lo, hi.unwrap_or_else(T::infinity), &[], cfg);
    }
    let halfp = T::lit(core::f64::consts::PI) / omega;
    match hi {
        Some(b) => {
            let span_periods = ((b - lo) / halfp).as_f64();
            let bps: Vec<T> = if span_periods.is_finite() && span_periods < 4096.0 {
                let first = (lo / halfp).floor() + T::one();
                let mut k = first;
                let mut v = Vec::new();
                while k * halfp < b {
                    v.push(k * halfp);
                    k += T::one();
                }
                v
            } else {
                Vec::new()
            };
            quad_with_breakpoints(g, lo, b, &bps, cfg)
        }
        None => {
            let n_head = 64usize;
            let head_end = lo + T::lit(n_head as f64) * halfp;
            let bps: Vec<T> = (1..n_head)
                .map(|k| lo + T::lit(k as f64) * halfp)
                .collect();
            let head = quad_with_breakpoints(&g, lo, head_end, &bps, cfg)?;
            let tail = alternating_series_sum(
                |k| {
                    let a = head_end + T::lit(k as f64) * halfp;
                    let (v, _, _) = gk15(&g, a, a + halfp);
                    Ok(v)
                },
                cfg.abs_tol * T::lit(0.5),
                4000,
            )?;
            Ok(head + tail)
        }
    }
}

/// Sum of terms whose signs eventually alternate (segment integrals of an
/// oscillatory tail), accelerated by iterated averaging of partial sums.
/// Stops when consecutive accelerated estimates agree within `tol`.
pub fn alternating_series_sum<T: Real, F: FnMut(usize) -> Result<T>>(
    mut term: F,
    tol: T,
    max_terms: usize,
) -> Result<T> {
    let mut psum = T::zero();
    let mut prev_row: Vec<T> = Vec::new();
    let mut prev_est = T::nan();
    for k in 0..max_terms {
        psum += term(k)?;
        let mut row = Vec::with_capacity(prev_row.len() + 1);
        row.push(psum);
        for j in 0..prev_row.len() {
            let m = (row[j] + prev_row[j]) * T::lit(0.5);
            row.push(m);
        }
        let est = *row.last().expect("row is nonempty");
        if k >= 3 && (est - prev_est).abs() <= tol {
            return Ok(est);
        }
        prev_est = est;
        prev_row = row;
    }
    Err(Error::SeriesNonConvergence { terms: max_terms })
}

/// Sum_{k>=0} s_k for positive terms with an eventual power-law decay
/// s_k ~ c k^{-beta}, beta > 1. Sums blocks directly and extrapolates the
/// remainder from the fitted exponent, doubling the horizon until two
/// successive estimates agree within `tol`.
pub fn power_tail_sum<T: Real, F: FnMut(usize) -> Result<T>>(
    mut term: F,
    tol: T,
    max_terms: usize,
) -> Result<T> {
    let mut sums: Vec<T> = Vec::new();
    let mut terms: Vec<T> = Vec::new();
    let mut psum = T::zero();
    let mut prev_est = T::nan();
    let mut horizon = 32usize;
    let mut k = 0usize;
    while k < max_terms {
        while k < horizon {
            let t = term(k)?;
            psum += t;
            terms.push(t);
            sums.push(psum);
            k += 1;
        }
        let last = terms[k - 1];
        let mid = terms[k / 2];
        let est = if last <= T::zero() || mid <= T::zero() {
            psum
        } else {
            let beta = (mid / last).ln() / (T::lit(k as f64) / T::lit((k / 2) as f64)).ln();
            if beta > T::one() + T::lit(1e-6) {
                // integral-comparison remainder: sum_{j>k} c j^-beta ~ s_k * k/(beta-1)
                psum + last * T::lit(k as f64) / (beta - T::one())
            } else {
                psum
            }
        };
        if !prev_est.is_nan() && (est - prev_est).abs() <= tol {
            return Ok(est);
        }
        prev_est = est;
        horizon *= 2;
    }
    Err(Error::SeriesNonConvergence { terms: max_terms })
}
