//! Seeded random variate generation: base laws by quantile transform or gamma
//! pushforward, order statistics, and the random-variable representation of
//! every constructible convolution.
//!
//! All sampling runs at f64. The generator is ChaCha12 seeded from a 64-bit
//! value with explicit stream splitting, so identical (seed, stream, call
//! sequence) yields identical draws on every platform.

use rand::distributions::Distribution;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::Gamma;

use crate::error::{Error, Result};
use crate::families::Family;
use crate::measures::{DensityKind, MixtureMeasure};
use crate::numerics::QuadratureConfig;

/// Deterministic generator with stream splitting. Streams let parallel or
/// phased work draw from provably disjoint subsequences of one logical seed.
pub struct SeededRng {
    inner: ChaCha12Rng,
    seed: u64,
    stream: u64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha12Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            inner,
            seed,
            stream,
        }
    }

    /// Fresh generator on the same seed but a different stream.
    pub fn substream(&self, stream: u64) -> Self {
        Self::with_stream(self.seed, stream)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform draw in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }
}

/// Draws plus the provenance needed to reproduce them.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub values: Vec<f64>,
    pub seed: u64,
    pub law_descriptor: String,
}

fn pareto_draw(beta: f64, u: f64) -> f64 {
    (1.0 - u).powf(-beta.recip())
}

// survival form keeps draws in (0, 1], so reciprocals never divide by zero
fn pow_draw(alpha: f64, u: f64) -> f64 {
    (1.0 - u).powf(alpha.recip())
}

/// i.i.d. draws from a base law. Quantile transform everywhere except the
/// Weibull-kernel pair, which pushes a gamma(a) variate through t = g^{1/r}
/// (or its reciprocal) to avoid inverting an incomplete-gamma CDF.
pub fn sample_base(law: &DensityKind<f64>, n: usize, rng: &mut SeededRng) -> Result<SampleBatch> {
    law.validate()?;
    let descriptor = serde_json::to_string(law).expect("density serialization is infallible");
    let mut values = Vec::with_capacity(n);
    match *law {
        DensityKind::WeibullKernel { a, r } if a == 1.0 => {
            for _ in 0..n {
                values.push((-(1.0 - rng.uniform()).ln()).powf(r.recip()));
            }
        }
        DensityKind::WeibullKernel { a, r } => {
            let g = Gamma::new(a, 1.0).map_err(|_| Error::InvalidParameter {
                name: "a",
                value: a,
                reason: "gamma shape rejected",
            })?;
            for _ in 0..n {
                values.push(g.sample(&mut rng.inner).powf(r.recip()));
            }
        }
        DensityKind::InvWeibullKernel { a, r } if a == 1.0 => {
            for _ in 0..n {
                values.push((-(1.0 - rng.uniform()).ln()).powf(-r.recip()));
            }
        }
        DensityKind::InvWeibullKernel { a, r } => {
            let g = Gamma::new(a, 1.0).map_err(|_| Error::InvalidParameter {
                name: "a",
                value: a,
                reason: "gamma shape rejected",
            })?;
            for _ in 0..n {
                values.push(g.sample(&mut rng.inner).powf(-r.recip()));
            }
        }
        DensityKind::Kucharczak { .. }
        | DensityKind::KingmanRadial { .. }
        | DensityKind::GAlpha { .. } => {
            return Err(Error::InvalidParameter {
                name: "law",
                value: f64::NAN,
                reason: "two-argument and transform densities are sampled through their convolution or a table",
            });
        }
        _ => {
            let cfg = QuadratureConfig::default();
            for _ in 0..n {
                let u = rng.uniform();
                values.push(law.quantile(u, &cfg)?);
            }
        }
    }
    Ok(SampleBatch {
        values,
        seed: rng.seed,
        law_descriptor: descriptor,
    })
}

/// k-th smallest of n i.i.d. base draws.
pub fn sample_order_stat(
    law: &DensityKind<f64>,
    k: usize,
    n: usize,
    rng: &mut SeededRng,
) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter {
            name: "k",
            value: k as f64,
            reason: "order statistic index must satisfy 1 <= k <= n",
        });
    }
    let mut batch = sample_base(law, n, rng)?.values;
    let (_, kth, _) = batch.select_nth_unstable_by(k - 1, |a, b| {
        a.partial_cmp(b).expect("draws are finite")
    });
    Ok(*kth)
}

/// Kendall convolution draw: the max, escalated to a Pareto(2 alpha) multiple
/// of it with probability (min/max)^alpha.
pub fn sample_kendall_conv(t1: f64, t2: f64, alpha: f64, rng: &mut SeededRng) -> Result<f64> {
    check_alpha(alpha)?;
    check_point(t1, t2)?;
    let m = t1.max(t2);
    if m == 0.0 {
        return Ok(0.0);
    }
    let rho = t1.min(t2) / m;
    if rho == 0.0 {
        // neutral element, exactly
        return Ok(m);
    }
    let u = rng.uniform();
    if u <= rho.powf(alpha) {
        let v = rng.uniform();
        Ok(m * pareto_draw(2.0 * alpha, v))
    } else {
        Ok(m)
    }
}

/// The equivalent two-division form: max{max(t1,t2), min(t1/Z1, t2/Z2)} with
/// Z_i i.i.d. power-law draws.
pub fn sample_kendall_alt(t1: f64, t2: f64, alpha: f64, rng: &mut SeededRng) -> Result<f64> {
    check_alpha(alpha)?;
    check_point(t1, t2)?;
    let z1 = pow_draw(alpha, rng.uniform());
    let z2 = pow_draw(alpha, rng.uniform());
    Ok((t1 / z1).min(t2 / z2).max(t1.max(t2)))
}

/// Radial convolution draw: sqrt(t1^2 + t2^2 + 2 t1 t2 V) where V = 2B - 1
/// and B is Beta(s + 1/2, s + 1/2), realized from two gamma variates.
pub fn sample_kingman_conv(t1: f64, t2: f64, s: f64, rng: &mut SeededRng) -> Result<f64> {
    if !(s > -0.5) {
        return Err(Error::InvalidParameter {
            name: "s",
            value: s,
            reason: "radial order must exceed -1/2",
        });
    }
    check_point(t1, t2)?;
    if t1.min(t2) == 0.0 {
        return Ok(t1.max(t2));
    }
    let shape = s + 0.5;
    let g = Gamma::new(shape, 1.0).map_err(|_| Error::InvalidParameter {
        name: "s",
        value: s,
        reason: "gamma shape rejected",
    })?;
    let g1 = g.sample(&mut rng.inner);
    let g2 = g.sample(&mut rng.inner);
    let v = 2.0 * g1 / (g1 + g2) - 1.0;
    Ok((t1 * t1 + t2 * t2 + 2.0 * t1 * t2 * v).sqrt())
}

/// Order-statistic mixture draw for the Kendall power family: draws
/// Q_1..Q_2n Pareto(alpha) and W_1..W_n power-law variates, locates the
/// branch k with W_{k:n} < rho <= W_{k+1:n}, and returns M Q_{k:n+k}
/// (M itself when k = 0).
pub fn sample_ku_conv(t1: f64, t2: f64, alpha: f64, n: u32, rng: &mut SeededRng) -> Result<f64> {
    check_alpha(alpha)?;
    check_point(t1, t2)?;
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            reason: "kernel power must be at least 1",
        });
    }
    let m = t1.max(t2);
    if m == 0.0 {
        return Ok(0.0);
    }
    let rho = t1.min(t2) / m;
    let nn = n as usize;
    let mut q: Vec<f64> = (0..2 * nn)
        .map(|_| pareto_draw(alpha, rng.uniform()))
        .collect();
    let k = (0..nn)
        .map(|_| pow_draw(alpha, rng.uniform()))
        .filter(|w| *w < rho)
        .count();
    if k == 0 {
        return Ok(m);
    }
    let head = &mut q[..nn + k];
    let (_, kth, _) =
        head.select_nth_unstable_by(k - 1, |a, b| a.partial_cmp(b).expect("finite draws"));
    Ok(m * *kth)
}

/// One draw through a family's convex decomposition: the cumulative weights
/// at rho partition [0, 1] into left-open right-closed cells; a uniform picks
/// the cell and the matching component variate is scaled by the max.
pub fn sample_convex_comb(
    fam: &Family<f64>,
    t1: f64,
    t2: f64,
    rng: &mut SeededRng,
) -> Result<f64> {
    check_point(t1, t2)?;
    let dec = fam.convex_decomposition()?;
    if dec.components.iter().any(|c| c.is_none()) {
        return Err(Error::KendallTypeUnsupported);
    }
    let m = t1.max(t2);
    if m == 0.0 {
        return Ok(0.0);
    }
    let rho = t1.min(t2) / m;
    let pick = pick_cell(&dec.weights_at(rho), rng.uniform());
    let comp = dec.components[pick].as_ref().expect("checked above");
    let v = rng.uniform();
    let cfg = QuadratureConfig::default();
    Ok(m * comp.quantile(v, &cfg)?)
}

/// Cell index under the left-open right-closed cumulative-weight partition:
/// u <= s_0 selects cell 0, otherwise the k with s_{k-1} < u <= s_k. A u past
/// the final cumulative sum (float defect) lands in the last cell.
fn pick_cell(weights: &[f64], u: f64) -> usize {
    let mut cum = 0.0;
    for (k, w) in weights.iter().enumerate() {
        cum += w;
        if u <= cum {
            return k;
        }
    }
    weights.len() - 1
}

/// Reciprocal-representation draw: a variate of 1/(t1 conv t2), built as
/// min(1/t1, 1/t2) times the reciprocal of the selected component draw.
/// The branch variable rho is invariant under taking reciprocals.
pub fn sample_reciprocal_conv(
    fam: &Family<f64>,
    t1: f64,
    t2: f64,
    rng: &mut SeededRng,
) -> Result<f64> {
    if !(t1 > 0.0) || !(t2 > 0.0) || !t1.is_finite() || !t2.is_finite() {
        return Err(Error::NonPositiveInput {
            value: t1.min(t2),
        });
    }
    let (r1, r2) = (t1.recip(), t2.recip());
    // rounding commutes with min/max swap, so the reciprocal pair's branch
    // variable is built from exactly the same two floats
    assert_eq!(r1.min(r2), t1.max(t2).recip());
    assert_eq!(r1.max(r2), t1.min(t2).recip());
    let rho = t1.min(t2) / t1.max(t2);
    let dec = fam.convex_decomposition()?;
    if dec.components.iter().any(|c| c.is_none()) {
        return Err(Error::KendallTypeUnsupported);
    }
    let pick = pick_cell(&dec.weights_at(rho), rng.uniform());
    let comp = dec.components[pick].as_ref().expect("checked above");
    let v = rng.uniform();
    let cfg = QuadratureConfig::default();
    Ok(r1.min(r2) * comp.quantile(v, &cfg)?.recip())
}

/// One draw of delta_t1 conv delta_t2 under the family's own representation.
pub fn sample_family(fam: &Family<f64>, t1: f64, t2: f64, rng: &mut SeededRng) -> Result<f64> {
    fam.validate()?;
    check_point(t1, t2)?;
    match *fam {
        Family::Classical => Ok(t1 + t2),
        Family::Symmetric => {
            if rng.uniform() < 0.5 {
                Ok(t1 + t2)
            } else {
                Ok((t1 - t2).abs())
            }
        }
        Family::Stable { alpha } => {
            if t1.min(t2) == 0.0 {
                // neutral element, exactly
                return Ok(t1.max(t2));
            }
            Ok((t1.powf(alpha) + t2.powf(alpha)).powf(alpha.recip()))
        }
        Family::Max => Ok(t1.max(t2)),
        Family::Kendall { alpha } => sample_kendall_conv(t1, t2, alpha, rng),
        Family::Kingman { s } => sample_kingman_conv(t1, t2, s, rng),
        Family::Ku { alpha, n } => sample_ku_conv(t1, t2, alpha, n, rng),
        Family::Diamond { .. } => sample_convex_comb(fam, t1, t2, rng),
        Family::Kucharczak { a, r } => {
            let loc = (t1.powf(r) + t2.powf(r)).powf(r.recip());
            if a == 1.0 || t1.min(t2) == 0.0 {
                return Ok(if t1.min(t2) == 0.0 { t1.max(t2) } else { loc });
            }
            let d = DensityKind::Kucharczak {
                a,
                r,
                x: t1.min(t2),
                y: t1.max(t2),
            };
            let cfg = QuadratureConfig::default();
            d.quantile(rng.uniform(), &cfg)
        }
        Family::KendallType { .. } => Err(Error::KendallTypeUnsupported),
    }
}

/// n draws of delta_t1 conv delta_t2. Families whose per-draw inverse is
/// quadrature-backed (Kucharczak) amortize one CDF table across the batch.
pub fn sample_family_n(
    fam: &Family<f64>,
    t1: f64,
    t2: f64,
    n: usize,
    rng: &mut SeededRng,
) -> Result<Vec<f64>> {
    fam.validate()?;
    check_point(t1, t2)?;
    if let Family::Kucharczak { a, r } = *fam {
        if a < 1.0 && t1.min(t2) > 0.0 {
            let d = DensityKind::Kucharczak {
                a,
                r,
                x: t1.min(t2),
                y: t1.max(t2),
            };
            let table = QuantileTable::build(&d)?;
            return Ok((0..n).map(|_| table.invert(rng.uniform())).collect());
        }
    }
    (0..n).map(|_| sample_family(fam, t1, t2, rng)).collect()
}

/// i.i.d. draws from a mixture measure: a uniform picks the part by weight,
/// a second inverts the part. Quadrature-backed components are tabulated
/// once per call.
pub fn sample_measure(
    measure: &MixtureMeasure<f64>,
    n: usize,
    rng: &mut SeededRng,
) -> Result<Vec<f64>> {
    measure.validate()?;
    let cfg = QuadratureConfig::default();
    let mut tables: Vec<Option<QuantileTable>> = Vec::with_capacity(measure.continuous.len());
    for c in &measure.continuous {
        match c.density {
            DensityKind::Kucharczak { .. } | DensityKind::KingmanRadial { .. } => {
                tables.push(Some(QuantileTable::build(&c.density)?));
            }
            DensityKind::GAlpha { .. } => {
                return Err(Error::InvalidParameter {
                    name: "law",
                    value: f64::NAN,
                    reason: "the folded weakly-stable density has no sampling path",
                });
            }
            _ => tables.push(None),
        }
    }
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut u = rng.uniform();
        let mut chosen = None;
        for a in &measure.atoms {
            if u <= a.w {
                chosen = Some(a.loc);
                break;
            }
            u -= a.w;
        }
        if let Some(v) = chosen {
            out.push(v);
            continue;
        }
        let mut idx = measure.continuous.len() - 1;
        for (i, c) in measure.continuous.iter().enumerate() {
            if u <= c.w {
                idx = i;
                break;
            }
            u -= c.w;
        }
        let c = &measure.continuous[idx];
        let v = rng.uniform();
        let draw = match &tables[idx] {
            Some(t) => t.invert(v),
            None => c.density.quantile(v, &cfg)?,
        };
        out.push(draw * c.scale);
    }
    Ok(out)
}

/// Tabulated inverse CDF for densities whose exact CDF needs quadrature.
/// Grid masses come from the double-exponential rule per segment, so edge
/// singularities are resolved; unbounded tails extend geometrically until
/// the remaining mass is negligible and draws past the grid extrapolate
/// along the fitted power tail.
pub(crate) struct QuantileTable {
    ts: Vec<f64>,
    fs: Vec<f64>,
    tail_exponent: f64,
}

impl QuantileTable {
    pub(crate) fn build(density: &DensityKind<f64>) -> Result<Self> {
        density.validate()?;
        let cfg = QuadratureConfig::default()
            .with_abs_tol(1e-12)
            .with_rel_tol(1e-10);
        let (lo, hi) = density.support();
        let mut edges = vec![lo];
        match hi {
            Some(h) => {
                // cells cluster cubically at both edges so linear inversion
                // stays faithful across integrable boundary singularities
                let nseg = 1024usize;
                for i in 1..nseg {
                    let w = i as f64 / nseg as f64;
                    edges.push(lo + (h - lo) * w * w * (3.0 - 2.0 * w));
                }
                edges.push(h);
            }
            None => {
                // cubic clustering at the singular lower edge; the geometric
                // tail is grown below, mass-aware
                let span = lo.abs().max(1.0);
                let nhead = 384usize;
                for i in 1..=nhead {
                    let w = i as f64 / nhead as f64;
                    edges.push(lo + span * w * w * w);
                }
            }
        }
        let mut fs = Vec::with_capacity(edges.len());
        fs.push(0.0);
        let mut acc = 0.0;
        for w in edges.windows(2) {
            acc += segment_mass(density, w[0], w[1], &cfg);
            fs.push(acc.min(1.0));
        }
        if hi.is_none() {
            // extend until five consecutive segments carry negligible mass
            let mut t = *edges.last().expect("nonempty grid");
            let mut tiny_run = 0;
            while edges.len() < 6000 && tiny_run < 5 {
                let next = t * 1.05;
                let seg = segment_mass(density, t, next, &cfg);
                acc += seg;
                edges.push(next);
                fs.push(acc.min(1.0));
                t = next;
                if seg < 1e-13 {
                    tiny_run += 1;
                } else {
                    tiny_run = 0;
                }
            }
        }
        // fitted survival exponent for draws beyond the grid
        let tail_exponent = if hi.is_none() {
            let t2 = *edges.last().expect("nonempty grid");
            let t1 = t2 / 1.3;
            let p1 = density.pdf(t1, &cfg);
            let p2 = density.pdf(t2, &cfg);
            if p1 > 0.0 && p2 > 0.0 && p1 > p2 {
                (p1 / p2).ln() / (t2 / t1).ln() - 1.0
            } else {
                f64::INFINITY
            }
        } else {
            f64::INFINITY
        };
        Ok(Self {
            ts: edges,
            fs,
            tail_exponent,
        })
    }

    pub(crate) fn invert(&self, u: f64) -> f64 {
        let last_f = *self.fs.last().expect("nonempty");
        let last_t = *self.ts.last().expect("nonempty");
        if u >= last_f {
            if self.tail_exponent.is_finite() && self.tail_exponent > 0.0 && u < 1.0 {
                let surv_last = (1.0 - last_f).max(f64::MIN_POSITIVE);
                return last_t * (surv_last / (1.0 - u)).powf(self.tail_exponent.recip());
            }
            return last_t;
        }
        let i = self.fs.partition_point(|&f| f < u);
        if i == 0 {
            return self.ts[0];
        }
        let (f0, f1) = (self.fs[i - 1], self.fs[i]);
        let (t0, t1) = (self.ts[i - 1], self.ts[i]);
        if f1 == f0 {
            return t0;
        }
        t0 + (t1 - t0) * (u - f0) / (f1 - f0)
    }
}

fn segment_mass(
    density: &DensityKind<f64>,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig<f64>,
) -> f64 {
    match crate::numerics::quad_integrate(|t| density.pdf(t, cfg), a, b, cfg) {
        Ok(v) => v.max(0.0),
        // a stubborn segment still contributes its best estimate; the table
        // stays monotone because masses are clamped nonnegative
        Err(Error::QuadratureNonConvergence { value, .. }) => value.max(0.0),
        Err(_) => 0.0,
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "must be positive and finite",
        })
    }
}

fn check_point(t1: f64, t2: f64) -> Result<()> {
    if t1 >= 0.0 && t2 >= 0.0 && t1.is_finite() && t2.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "point",
            value: t1.min(t2),
            reason: "point masses live on [0, inf)",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pareto(beta: f64) -> DensityKind<f64> {
        DensityKind::Pareto { beta }
    }

    #[test]
    fn identical_seed_identical_batch() {
        let mut a = SeededRng::new(7);
        let mut b = SeededRng::new(7);
        let ba = sample_base(&pareto(2.0), 64, &mut a).unwrap();
        let bb = sample_base(&pareto(2.0), 64, &mut b).unwrap();
        assert_eq!(ba, bb);
        assert_eq!(ba.seed, 7);
        assert!(ba.values.iter().all(|v| *v >= 1.0));
    }

    #[test]
    fn streams_are_disjoint() {
        let mut a = SeededRng::with_stream(7, 0);
        let mut b = SeededRng::with_stream(7, 1);
        let ba = sample_base(&pareto(2.0), 8, &mut a).unwrap();
        let bb = sample_base(&pareto(2.0), 8, &mut b).unwrap();
        assert_ne!(ba.values, bb.values);
        let c = a.substream(1);
        assert_eq!(c.seed(), 7);
        assert_eq!(c.stream(), 1);
    }

    #[test]
    fn base_rejects_two_argument_densities() {
        let mut rng = SeededRng::new(1);
        let law = DensityKind::Kucharczak {
            a: 0.5,
            r: 1.0,
            x: 0.5,
            y: 1.0,
        };
        assert!(sample_base(&law, 4, &mut rng).is_err());
    }

    #[test]
    fn weibull_base_matches_its_cdf_roughly() {
        // gamma pushforward lands in the right region: median check
        let mut rng = SeededRng::new(11);
        let law = DensityKind::WeibullKernel { a: 2.0, r: 1.5 };
        let batch = sample_base(&law, 4000, &mut rng).unwrap();
        let cfg = QuadratureConfig::default();
        let med = law.quantile(0.5, &cfg).unwrap();
        let below = batch.values.iter().filter(|v| **v <= med).count();
        let frac = below as f64 / 4000.0;
        assert!((frac - 0.5).abs() < 0.03, "median fraction {frac}");
    }

    #[test]
    fn order_stat_bounds_and_errors() {
        let mut rng = SeededRng::new(3);
        assert!(sample_order_stat(&pareto(1.0), 0, 5, &mut rng).is_err());
        assert!(sample_order_stat(&pareto(1.0), 6, 5, &mut rng).is_err());
        let lo = sample_order_stat(&pareto(1.0), 1, 9, &mut rng).unwrap();
        let mut rng2 = SeededRng::new(3);
        let _ = sample_order_stat(&pareto(1.0), 1, 9, &mut rng2).unwrap();
        let hi = sample_order_stat(&pareto(1.0), 9, 9, &mut rng2).unwrap();
        assert!(lo >= 1.0);
        assert!(hi >= lo);
    }

    #[test]
    fn kendall_neutral_and_forced_branches() {
        let mut rng = SeededRng::new(5);
        for _ in 0..50 {
            assert_eq!(sample_kendall_conv(0.7, 0.0, 1.0, &mut rng).unwrap(), 0.7);
            assert_eq!(sample_kendall_conv(0.0, 0.0, 1.0, &mut rng).unwrap(), 0.0);
        }
        // equal arguments always escalate to the Pareto factor
        for _ in 0..200 {
            let v = sample_kendall_conv(1.0, 1.0, 1.0, &mut rng).unwrap();
            assert!(v >= 1.0);
        }
    }

    #[test]
    fn kendall_alt_neutral_exact() {
        let mut rng = SeededRng::new(5);
        for _ in 0..50 {
            assert_eq!(sample_kendall_alt(0.7, 0.0, 1.0, &mut rng).unwrap(), 0.7);
        }
    }

    #[test]
    fn ku_conv_edges() {
        let mut rng = SeededRng::new(9);
        assert!(sample_ku_conv(1.0, 1.0, 1.0, 0, &mut rng).is_err());
        for _ in 0..50 {
            assert_eq!(sample_ku_conv(2.5, 0.0, 1.0, 3, &mut rng).unwrap(), 2.5);
        }
        for _ in 0..50 {
            let v = sample_ku_conv(1.0, 1.0, 1.0, 3, &mut rng).unwrap();
            assert!(v >= 1.0);
        }
    }

    #[test]
    fn kingman_neutral_exact_and_triangle_bounds() {
        let mut rng = SeededRng::new(13);
        assert_eq!(sample_kingman_conv(0.3, 0.0, 0.5, &mut rng).unwrap(), 0.3);
        assert!(sample_kingman_conv(1.0, 1.0, -0.6, &mut rng).is_err());
        for _ in 0..500 {
            let v = sample_kingman_conv(1.0, 2.0, 0.5, &mut rng).unwrap();
            assert!((1.0..=3.0).contains(&v), "radial draw {v} outside [1, 3]");
        }
    }

    #[test]
    fn convex_comb_max_family_is_degenerate() {
        let mut rng = SeededRng::new(17);
        let fam = Family::Max;
        for _ in 0..20 {
            assert_eq!(sample_convex_comb(&fam, 0.5, 1.0, &mut rng).unwrap(), 1.0);
        }
    }

    #[test]
    fn convex_comb_rejects_weight_only_decomposition() {
        let mut rng = SeededRng::new(17);
        let fam = Family::KendallType {
            c: 1.0,
            alpha: 1.0,
            p: 2.0,
        };
        assert!(matches!(
            sample_convex_comb(&fam, 0.5, 1.0, &mut rng),
            Err(Error::KendallTypeUnsupported)
        ));
    }

    #[test]
    fn diamond_branch_frequency() {
        // at equal arguments the tail branch fires with probability p
        let p = 0.3;
        let fam = Family::Diamond { p, alpha: 1.0 };
        let mut rng = SeededRng::new(23);
        let n = 10_000;
        let mut tail = 0;
        for _ in 0..n {
            let v = sample_convex_comb(&fam, 1.0, 1.0, &mut rng).unwrap();
            if v > 1.0 {
                tail += 1;
            }
        }
        let frac = tail as f64 / n as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!(
            (frac - p).abs() < 3.0 * sigma,
            "tail fraction {frac} vs p {p}"
        );
    }

    #[test]
    fn family_dispatch_degenerate_cases() {
        let mut rng = SeededRng::new(29);
        for _ in 0..10 {
            assert_eq!(
                sample_family(&Family::Classical, 3.0, 4.0, &mut rng).unwrap(),
                7.0
            );
            assert_eq!(sample_family(&Family::Max, 0.5, 1.0, &mut rng).unwrap(), 1.0);
        }
        assert!(matches!(
            sample_family(
                &Family::KendallType {
                    c: 1.0,
                    alpha: 1.0,
                    p: 2.0
                },
                1.0,
                2.0,
                &mut rng
            ),
            Err(Error::KendallTypeUnsupported)
        ));
    }

    #[test]
    fn symmetric_coin_frequencies() {
        let mut rng = SeededRng::new(31);
        let n = 10_000;
        let mut sums = 0;
        for _ in 0..n {
            let v = sample_family(&Family::Symmetric, 1.0, 1.0, &mut rng).unwrap();
            assert!(v == 2.0 || v == 0.0);
            if v == 2.0 {
                sums += 1;
            }
        }
        let frac = sums as f64 / n as f64;
        let sigma = 0.5 / (n as f64).sqrt();
        assert!((frac - 0.5).abs() < 3.0 * sigma, "coin fraction {frac}");
    }

    #[test]
    fn stable_neutral_exact() {
        let mut rng = SeededRng::new(37);
        let fam = Family::Stable { alpha: 0.7 };
        assert_eq!(sample_family(&fam, 0.3, 0.0, &mut rng).unwrap(), 0.3);
    }

    #[test]
    fn reciprocal_conv_matches_reciprocal_identity_for_max() {
        let mut rng = SeededRng::new(41);
        for _ in 0..10 {
            let v = sample_reciprocal_conv(&Family::Max, 0.5, 2.0, &mut rng).unwrap();
            assert_eq!(v, 0.5);
        }
        assert!(sample_reciprocal_conv(&Family::Max, 0.0, 2.0, &mut rng).is_err());
    }

    #[test]
    fn kucharczak_table_inverts_cdf() {
        let d = DensityKind::Kucharczak {
            a: 0.5,
            r: 1.0,
            x: 0.5,
            y: 1.0,
        };
        let table = QuantileTable::build(&d).unwrap();
        let cfg = QuadratureConfig::default();
        for &u in &[0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
            let t = table.invert(u);
            let f = d.cdf(t, &cfg).unwrap();
            assert!((f - u).abs() < 2e-3, "u {u} round-trips to {f}");
        }
    }

    #[test]
    fn kucharczak_batch_uses_table_and_stays_in_support() {
        let fam = Family::Kucharczak { a: 0.5, r: 1.0 };
        let mut rng = SeededRng::new(43);
        let draws = sample_family_n(&fam, 0.5, 1.0, 2000, &mut rng).unwrap();
        assert_eq!(draws.len(), 2000);
        assert!(draws.iter().all(|v| *v >= 1.5));
        let mut rng2 = SeededRng::new(43);
        let again = sample_family_n(&fam, 0.5, 1.0, 2000, &mut rng2).unwrap();
        assert_eq!(draws, again);
    }

    #[test]
    fn measure_sampling_splits_atoms_and_tails() {
        use crate::measures::{Atom, ContinuousComponent, MixtureMeasure};
        let m = MixtureMeasure::from_parts(
            vec![Atom { loc: 1.0, w: 0.5 }],
            vec![ContinuousComponent {
                density: pareto(2.0),
                scale: 2.0,
                w: 0.5,
            }],
        )
        .unwrap();
        let mut rng = SeededRng::new(47);
        let n = 10_000;
        let draws = sample_measure(&m, n, &mut rng).unwrap();
        let atom_hits = draws.iter().filter(|v| **v == 1.0).count();
        let frac = atom_hits as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.02, "atom fraction {frac}");
        // scaled Pareto draws start at scale * 1
        assert!(draws.iter().all(|v| *v == 1.0 || *v >= 2.0));
    }
}
