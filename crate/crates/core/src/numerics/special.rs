//! Special functions needed by the kernel and density catalog: log-gamma,
//! the regularized incomplete gamma pair, the normalized Bessel-type series
//! for the radial kernel, and small binomial coefficients.

use crate::error::{Error, Result};
use crate::real::Real;

/// Lanczos approximation, g = 7, 9 coefficients. Relative accuracy is about
/// 1e-13 over the positive axis, which is enough margin for the 1e-12 targets
/// downstream.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for x > 0.
pub fn lgamma<T: Real>(x: T) -> T {
    let pi = T::lit(core::f64::consts::PI);
    if x < T::lit(0.5) {
        // Reflection keeps the series argument away from the poles.
        return (pi / (pi * x).sin()).ln() - lgamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += T::lit(c) / (x + T::lit(i as f64));
    }
    let t = x + T::lit(7.5);
    let half_log_two_pi = T::lit(0.918_938_533_204_672_74);
    half_log_two_pi + (x + T::lit(0.5)) * t.ln() - t + acc.ln()
}

/// Gamma function for x > 0.
pub fn gamma<T: Real>(x: T) -> T {
    lgamma(x).exp()
}

/// The product gamma(a) * gamma(1 - a) for a in (0, 1), via reflection.
pub fn gamma_reflection_product<T: Real>(a: T) -> T {
    let pi = T::lit(core::f64::consts::PI);
    pi / (pi * a).sin()
}

/// Regularized incomplete gamma pair (P, Q) with P + Q = 1, for a > 0, x >= 0.
/// Series for x < a + 1, Lentz continued fraction otherwise; both iterate to
/// a relative target near machine precision (well inside 1e-12).
pub fn gamma_pq<T: Real>(a: T, x: T) -> Result<(T, T)> {
    if a <= T::zero() {
        return Err(Error::InvalidParameter {
            name: "a",
            value: a.as_f64(),
            reason: "shape must be positive",
        });
    }
    if x < T::zero() {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x.as_f64(),
            reason: "argument must be nonnegative",
        });
    }
    if x == T::zero() {
        return Ok((T::zero(), T::one()));
    }
    if !x.is_finite() {
        // quadrature tail probes reach past the largest finite argument
        return Ok((T::one(), T::zero()));
    }
    // exp(-x + a ln x - lgamma(a)) is the shared prefactor of both expansions.
    let log_prefactor = -x + a * x.ln() - lgamma(a);
    let prefactor = log_prefactor.exp();
    let eps = T::epsilon();
    if x < a + T::one() {
        let mut term = T::one() / a;
        let mut sum = term;
        let mut n = T::one();
        for _ in 0..500 {
            term *= x / (a + n);
            sum += term;
            if term.abs() < sum.abs() * eps {
                let p = sum * prefactor;
                return Ok((p, T::one() - p));
            }
            n += T::one();
        }
        Err(Error::SeriesNonConvergence { terms: 500 })
    } else {
        let tiny = T::lit(1e-300).max(T::min_positive_value());
        let mut b = x + T::one() - a;
        let mut c = T::one() / tiny;
        let mut d = T::one() / b;
        let mut h = d;
        for i in 1..500 {
            let an = -T::lit(i as f64) * (T::lit(i as f64) - a);
            b += T::lit(2.0);
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = T::one() / d;
            let delta = d * c;
            h *= delta;
            if (delta - T::one()).abs() < eps {
                let q = prefactor * h;
                return Ok((T::one() - q, q));
            }
        }
        Err(Error::SeriesNonConvergence { terms: 500 })
    }
}

/// Normalized radial kernel series
///   Lambda_s(t) = Gamma(s+1) * sum_m (-1)^m / (m! Gamma(m+1+s)) (t/2)^{2m},
/// computed by term ratios so no gamma evaluations are needed. Lambda_s(0) = 1
/// and for s = 1/2 this is sin(t)/t. Series truncation below 1e-15 of the
/// running sum; alternating cancellation limits use to moderate t, which is
/// all the transform probes need.
pub fn kingman_kernel_series<T: Real>(s: T, t: T) -> Result<T> {
    let q = -(t * t) / T::lit(4.0);
    let mut term = T::one();
    let mut sum = T::one();
    for m in 0..600 {
        let mf = T::lit((m + 1) as f64);
        term *= q / (mf * (mf + s));
        sum += term;
        if term.abs() < T::lit(1e-15) * (sum.abs() + T::one()) {
            return Ok(sum);
        }
    }
    Err(Error::SeriesNonConvergence { terms: 600 })
}

/// Integral of x^{alpha-1} sin x over (0, t), the inner factor of the
/// weakly-stable density. Segmented quadrature up to moderate t; for large t
/// with alpha < 1 the convergent full integral Gamma(alpha) sin(pi alpha/2)
/// is corrected by an accelerated alternating tail. Best-effort: quadrature
/// shortfalls degrade accuracy instead of erroring, since density evaluation
/// cannot propagate failures.
pub fn sin_moment<T: Real>(alpha: T, t: T, cfg: &super::quad::QuadratureConfig<T>) -> T {
    use super::quad::{alternating_series_sum, gk15, quad_integrate};
    if t <= T::zero() {
        return T::zero();
    }
    if alpha == T::one() {
        return T::one() - t.cos();
    }
    let pi = T::lit(core::f64::consts::PI);
    let f = |x: T| {
        if x <= T::zero() {
            T::zero()
        } else {
            x.powf(alpha - T::one()) * x.sin()
        }
    };
    if t <= T::lit(1024.0) || alpha >= T::one() {
        // First segment adaptively (endpoint steepness for small alpha), the
        // rest by fixed panels on pi-length pieces where the integrand is smooth.
        let first_end = pi.min(t);
        let mut acc = match quad_integrate(&f, T::zero(), first_end, cfg) {
            Ok(v) => v,
            Err(Error::QuadratureNonConvergence { value, .. }) => T::lit(value),
            Err(_) => T::zero(),
        };
        let mut a = first_end;
        let mut k = T::one();
        let mut guard = 0u32;
        while a < t && guard < 200_000 {
            let b = (pi * (k + T::one())).min(t);
            acc += gk15(&f, a, b).0;
            a = b;
            k += T::one();
            guard += 1;
        }
        return acc;
    }
    // Large t, alpha in (0, 1): full integral minus the oscillatory remainder,
    // summed over sign-alternating pi-segments starting at t.
    let total = gamma(alpha) * (pi * alpha * T::lit(0.5)).sin();
    let m0 = (t / pi).ceil();
    let tail = alternating_series_sum(
        |k| {
            let (a, b) = if k == 0 {
                (t, pi * m0)
            } else {
                let kk = T::lit(k as f64);
                (pi * (m0 + kk - T::one()), pi * (m0 + kk))
            };
            Ok(gk15(&f, a, b).0)
        },
        cfg.abs_tol * T::lit(0.1),
        2_000,
    )
    .unwrap_or_else(|_| T::zero());
    total - tail
}

/// Binomial coefficient as a scalar; exact in f64 for the small orders the
/// decompositions use.
pub fn binomial<T: Real>(n: u32, k: u32) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = T::one();
    for i in 0..k {
        acc = acc * T::lit((n - i) as f64) / T::lit((i + 1) as f64);
    }
    acc
}
