//! Empirical-distribution machinery for the verification harness: ECDF,
//! atom-aware one- and two-sample Kolmogorov-Smirnov tests, binomial
//! frequency checks, and the numerical cosine transform.
//!
//! Everything here runs at `f64`, matching the simulation layer.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{DensityKind, MixtureMeasure};
use crate::numerics::quad::gk15;
use crate::numerics::{
    alternating_series_sum, power_tail_sum, quad_with_breakpoints, QuadratureConfig,
};
use crate::williamson::CdfPair;

/// KS test outcome; `m` is zero for one-sample tests. `pass` holds exactly
/// when the statistic is below the critical value.
#[derive(Debug, Clone, Serialize)]
pub struct KsReport {
    pub statistic: f64,
    pub n: usize,
    pub m: usize,
    pub critical_value: f64,
    pub significance: f64,
    pub pass: bool,
}

/// Asymptotic KS constants at the two supported significance levels. All
/// acceptance batches have n >= 1e4, so no small-sample correction applies.
fn critical_constant(significance: f64) -> Result<f64> {
    if (significance - 0.01).abs() < 1e-12 {
        Ok(1.63)
    } else if (significance - 0.05).abs() < 1e-12 {
        Ok(1.36)
    } else {
        Err(Error::InvalidParameter {
            name: "significance",
            value: significance,
            reason: "supported levels are 0.01 and 0.05",
        })
    }
}

fn checked_sorted(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyBatch);
    }
    for &v in values {
        if !v.is_finite() {
            return Err(Error::InvalidParameter {
                name: "batch",
                value: v,
                reason: "sample values must be finite",
            });
        }
    }
    let mut xs = values.to_vec();
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values"));
    Ok(xs)
}

/// Fraction of values at or below t: the right-continuous empirical CDF.
pub fn ecdf(values: &[f64], t: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let count = values.iter().filter(|&&v| v <= t).count();
    Ok(count as f64 / values.len() as f64)
}

/// One-sample KS test. `cdf_both(t)` returns (F(t-), F(t)); the two-sided
/// evaluation keeps the statistic exact when F jumps, and tied sample values
/// are grouped so their joint empirical step is compared as one.
pub fn ks_one_sample<F>(values: &[f64], cdf_both: F, significance: f64) -> Result<KsReport>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    let c = critical_constant(significance)?;
    let xs = checked_sorted(values)?;
    let n = xs.len();
    let nf = n as f64;
    let mut statistic = 0.0f64;
    let mut i = 0usize;
    while i < n {
        let v = xs[i];
        let mut j = i + 1;
        while j < n && xs[j] == v {
            j += 1;
        }
        let (fl, fr) = cdf_both(v)?;
        if !fl.is_finite() || !fr.is_finite() {
            return Err(Error::InvalidParameter {
                name: "cdf",
                value: if fl.is_finite() { fr } else { fl },
                reason: "CDF evaluator must return finite values",
            });
        }
        statistic = statistic
            .max((j as f64 / nf - fr).abs())
            .max((i as f64 / nf - fl).abs());
        i = j;
    }
    let critical_value = c / nf.sqrt();
    Ok(KsReport {
        statistic,
        n,
        m: 0,
        critical_value,
        significance,
        pass: statistic < critical_value,
    })
}

/// One-sample KS against a mixture measure, using its exact left limits.
pub fn ks_against_measure(
    values: &[f64],
    measure: &MixtureMeasure<f64>,
    significance: f64,
    cfg: &QuadratureConfig<f64>,
) -> Result<KsReport> {
    ks_one_sample(
        values,
        |t| Ok((measure.cdf_left(t, cfg)?, measure.cdf(t, cfg)?)),
        significance,
    )
}

/// One-sample KS against a transform pair, using its exact left limits.
pub fn ks_against_pair(
    values: &[f64],
    pair: &CdfPair<f64>,
    significance: f64,
) -> Result<KsReport> {
    ks_one_sample(values, |t| Ok((pair.f_left(t)?, pair.f(t)?)), significance)
}

/// One-sample KS against a continuous density, with the CDF computed by a
/// single cumulative sweep over the sorted sample: one quadrature panel per
/// gap, anchored at the smallest value by a full CDF evaluation. Linear in
/// the sample size where per-point CDF quadrature would be quadratic.
/// Assumes the density is smooth between consecutive sample values.
pub fn ks_against_density(
    values: &[f64],
    density: &DensityKind<f64>,
    significance: f64,
    cfg: &QuadratureConfig<f64>,
) -> Result<KsReport> {
    let c = critical_constant(significance)?;
    let xs = checked_sorted(values)?;
    let n = xs.len();
    let nf = n as f64;
    let mut statistic = 0.0f64;
    let mut last: Option<(f64, f64)> = None;
    let mut i = 0usize;
    while i < n {
        let v = xs[i];
        let mut j = i + 1;
        while j < n && xs[j] == v {
            j += 1;
        }
        let f = match last {
            None => density.cdf(v, cfg)?,
            Some((t0, f0)) => (f0 + gk15(&|t: f64| density.pdf(t, cfg), t0, v).0).clamp(0.0, 1.0),
        };
        statistic = statistic
            .max((j as f64 / nf - f).abs())
            .max((i as f64 / nf - f).abs());
        last = Some((v, f));
        i = j;
    }
    let critical_value = c / nf.sqrt();
    Ok(KsReport {
        statistic,
        n,
        m: 0,
        critical_value,
        significance,
        pass: statistic < critical_value,
    })
}

/// Two-sample KS test: sup distance between the two empirical CDFs, walked
/// over the merged distinct values so ties on either side stay exact.
pub fn ks_two_sample(a: &[f64], b: &[f64], significance: f64) -> Result<KsReport> {
    let c = critical_constant(significance)?;
    let xs = checked_sorted(a)?;
    let ys = checked_sorted(b)?;
    let (n, m) = (xs.len(), ys.len());
    let (nf, mf) = (n as f64, m as f64);
    let mut statistic = 0.0f64;
    let (mut i, mut j) = (0usize, 0usize);
    while i < n || j < m {
        let v = match (xs.get(i), ys.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        while i < n && xs[i] == v {
            i += 1;
        }
        while j < m && ys[j] == v {
            j += 1;
        }
        statistic = statistic.max((i as f64 / nf - j as f64 / mf).abs());
    }
    let critical_value = c * ((nf + mf) / (nf * mf)).sqrt();
    Ok(KsReport {
        statistic,
        n,
        m,
        critical_value,
        significance,
        pass: statistic < critical_value,
    })
}

/// Observed frequency against a binomial null: z is the distance from p in
/// units of the null standard error.
#[derive(Debug, Clone, Serialize)]
pub struct FrequencyReport {
    pub observed: f64,
    pub expected: f64,
    pub z: f64,
    pub z_max: f64,
    pub pass: bool,
}

pub fn frequency_check(count: usize, n: usize, p: f64, z_max: f64) -> Result<FrequencyReport> {
    if n == 0 {
        return Err(Error::EmptyBatch);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "null frequency must lie in [0, 1]",
        });
    }
    if !(z_max > 0.0) {
        return Err(Error::InvalidParameter {
            name: "z_max",
            value: z_max,
            reason: "must be positive",
        });
    }
    let observed = count as f64 / n as f64;
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    let z = if sigma == 0.0 {
        if observed == p {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (observed - p).abs() / sigma
    };
    Ok(FrequencyReport {
        observed,
        expected: p,
        z,
        z_max,
        pass: z <= z_max,
    })
}

/// Integral of g(t) cos(xt) over the whole line for an even density g,
/// evaluated on the half line and doubled. Breakpoints sit at multiples of
/// pi (the rhythm of the weakly-stable densities) and of pi/x; the infinite
/// tail is an accelerated alternating series of half-period segments for
/// x > 0 and a power-law extrapolated positive series at x = 0. The stop
/// rules measure stability of the accelerated sums, so for slowly decaying
/// densities the config tolerance is a target, not a certified bound.
pub fn cosine_transform<F: Fn(f64) -> f64>(
    g: F,
    x: f64,
    cfg: &QuadratureConfig<f64>,
) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x,
            reason: "transform argument must be finite",
        });
    }
    let x = x.abs();
    let pi = std::f64::consts::PI;
    let head_end = 128.0 * pi;
    let mut bps: Vec<f64> = (1..128).map(|k| k as f64 * pi).collect();
    if x > 0.0 {
        let halfp = pi / x;
        if head_end / halfp < 4096.0 {
            let mut k = 1.0;
            while k * halfp < head_end {
                bps.push(k * halfp);
                k += 1.0;
            }
            bps.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
            bps.dedup();
        }
    }
    let integrand = |t: f64| g(t) * (x * t).cos();
    let head = quad_with_breakpoints(integrand, 0.0, head_end, &bps, cfg)?;
    let tail = if x == 0.0 {
        power_tail_sum(
            |k| {
                let a = head_end + k as f64 * pi;
                Ok(gk15(&|t: f64| g(t), a, a + pi).0)
            },
            cfg.abs_tol.max(1e-12),
            20_000,
        )?
    } else {
        let halfp = pi / x;
        alternating_series_sum(
            |k| {
                let a = head_end + k as f64 * halfp;
                Ok(gk15(&integrand, a, a + halfp).0)
            },
            cfg.abs_tol * 0.5,
            4000,
        )?
    };
    Ok(2.0 * (head + tail))
}
