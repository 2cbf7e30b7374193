//! The Williamson transform of order alpha, its exact inversion, and the
//! (F, G) pair algebra that makes Kendall convolution exact: the transform
//! turns convolution into a pointwise product of G's, and the output CDF is
//! recovered from the product without any densification.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measures::{DensityKind, MixtureMeasure};
use crate::numerics::QuadratureConfig;
use crate::real::Real;

pub type Evaluator<T> = Arc<dyn Fn(T) -> Result<T> + Send + Sync>;

/// A CDF F paired with G(t) = Phi(1/t), the Williamson transform of the same
/// measure evaluated at 1/t. Composition is lazy: convolved pairs close over
/// their parents, so the algebra stays exact at every depth.
#[derive(Clone)]
pub struct CdfPair<T: Real> {
    pub alpha: T,
    f: Evaluator<T>,
    /// left limit of F where it jumps; `None` means F is continuous
    f_left: Option<Evaluator<T>>,
    g: Evaluator<T>,
    g_prime: Option<Evaluator<T>>,
    breakpoints: Vec<T>,
    depth: u32,
}

const MAX_DEPTH: u32 = 64;

impl<T: Real> CdfPair<T> {
    pub fn new(
        alpha: T,
        f: Evaluator<T>,
        g: Evaluator<T>,
        g_prime: Option<Evaluator<T>>,
        breakpoints: Vec<T>,
    ) -> Result<Self> {
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha.as_f64(),
                reason: "transform order must be positive and finite",
            });
        }
        let mut breakpoints = breakpoints;
        breakpoints.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        breakpoints.dedup();
        Ok(Self {
            alpha,
            f,
            f_left: None,
            g,
            g_prime,
            breakpoints,
            depth: 0,
        })
    }

    /// Attach an exact left-limit evaluator for a CDF with jumps.
    pub fn with_f_left(mut self, f_left: Evaluator<T>) -> Self {
        self.f_left = Some(f_left);
        self
    }

    pub fn f(&self, t: T) -> Result<T> {
        (self.f)(t)
    }

    /// F(t-), exact at atoms; falls back to F itself for continuous pairs.
    pub fn f_left(&self, t: T) -> Result<T> {
        match &self.f_left {
            Some(ev) => ev(t),
            None => (self.f)(t),
        }
    }

    pub fn g(&self, t: T) -> Result<T> {
        (self.g)(t)
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.g_prime.is_some()
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }
}

/// Transform of a whole measure: integral of (1 - (t s)^alpha)_+ in ds.
/// One at t = 0; decreasing in t; closed forms for atoms and for Pareto and
/// power components, quadrature for the rest.
pub fn williamson<T: Real>(
    m: &MixtureMeasure<T>,
    alpha: T,
    t: T,
    cfg: &QuadratureConfig<T>,
) -> Result<T> {
    check_alpha(alpha)?;
    if t < T::zero() || !t.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t.as_f64(),
            reason: "transform argument must be finite and nonnegative",
        });
    }
    if t == T::zero() {
        return Ok(T::one());
    }
    let one = T::one();
    let mut acc = T::zero();
    for a in &m.atoms {
        if a.loc == T::zero() {
            acc += a.w;
        } else {
            acc += a.w * (one - (t * a.loc).powf(alpha)).max(T::zero());
        }
    }
    for c in &m.continuous {
        // scaled law: Phi_{T_s mu}(t) = Phi_mu(t s)
        let u = t * c.scale;
        let part = match g_base_closed(&c.density, alpha, u.recip()) {
            Some(v) => v,
            None => {
                let cut = u.recip();
                c.density.integrate_against(
                    move |y| (one - (u * y).powf(alpha)).max(T::zero()),
                    Some(cut),
                    &[],
                    cfg,
                )?
            }
        };
        acc += c.w * part;
    }
    Ok(acc.min(one).max(T::zero()))
}

/// G-component of the transform for the named base densities, in the
/// t-orientation G(t) = integral of (1 - (x/t)^alpha)_+ against the density.
fn g_base_closed<T: Real>(density: &DensityKind<T>, alpha: T, t: T) -> Option<T> {
    let one = T::one();
    let zero = T::zero();
    match *density {
        DensityKind::Pareto { beta } => {
            if t <= one {
                return Some(zero);
            }
            if beta == alpha {
                Some(one - t.powf(-alpha) * (one + alpha * t.ln()))
            } else {
                let v = one
                    - t.powf(-beta)
                    - beta * (t.powf(-beta) - t.powf(-alpha)) / (alpha - beta);
                Some(v.min(one).max(zero))
            }
        }
        DensityKind::Pow { alpha: a0 } => {
            if t <= zero {
                return Some(zero);
            }
            if t <= one {
                Some(t.powf(a0) * alpha / (alpha + a0))
            } else {
                Some(one - t.powf(-alpha) * a0 / (alpha + a0))
            }
        }
        _ => None,
    }
}

/// Derivative of `g_base_closed` in t, where defined.
fn g_base_closed_prime<T: Real>(density: &DensityKind<T>, alpha: T, t: T) -> Option<T> {
    let one = T::one();
    let zero = T::zero();
    match *density {
        DensityKind::Pareto { beta } => {
            if t <= one {
                return Some(zero);
            }
            if beta == alpha {
                Some(alpha * alpha * t.powf(-alpha - one) * t.ln())
            } else {
                Some(
                    beta * t.powf(-beta - one)
                        + beta
                            * (beta * t.powf(-beta - one) - alpha * t.powf(-alpha - one))
                            / (alpha - beta),
                )
            }
        }
        DensityKind::Pow { alpha: a0 } => {
            if t <= zero {
                return Some(zero);
            }
            if t <= one {
                Some(a0 * t.powf(a0 - one) * alpha / (alpha + a0))
            } else {
                Some(alpha * t.powf(-alpha - one) * a0 / (alpha + a0))
            }
        }
        _ => None,
    }
}

/// Exact inversion at a continuity point: F(t) = G(t) + t G'(t) / alpha,
/// clamped to [0, 1]. Uses the pair's analytic derivative when it carries
/// one, otherwise a central difference of step h (default max(1e-6, 1e-6 t)).
/// Points within one step of a breakpoint are refused: the one-sided limits
/// differ there and the difference quotient would straddle the jump.
pub fn williamson_invert<T: Real>(pair: &CdfPair<T>, t: T, h: Option<T>) -> Result<T> {
    if !(t > T::zero()) || !t.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t.as_f64(),
            reason: "inversion needs a positive finite point",
        });
    }
    let h_eff = match h {
        Some(v) if v > T::zero() => v,
        _ => T::lit(1e-6).max(T::lit(1e-6) * t),
    };
    if pair
        .breakpoints
        .iter()
        .any(|b| (*b - t).abs() <= h_eff)
    {
        return Err(Error::BreakpointDerivative { t: t.as_f64() });
    }
    let g = pair.g(t)?;
    let gp = match &pair.g_prime {
        Some(d) => d(t)?,
        None => {
            let hi = pair.g(t + h_eff)?;
            let lo = pair.g(t - h_eff)?;
            (hi - lo) / (h_eff + h_eff)
        }
    };
    Ok((g + t * gp / pair.alpha).min(T::one()).max(T::zero()))
}

/// Build the (F, G) pair of a measure. F is the mixture CDF; G carries the
/// transform with closed forms where the catalog has them, and an analytic
/// derivative when every part is closed-form.
pub fn kendall_pair_of<T: Real>(
    m: &MixtureMeasure<T>,
    alpha: T,
    cfg: &QuadratureConfig<T>,
) -> Result<CdfPair<T>> {
    check_alpha(alpha)?;
    m.validate()?;
    let cfg = *cfg;
    let one = T::one();

    let mf = m.clone();
    let f: Evaluator<T> = Arc::new(move |t: T| {
        if t < T::zero() {
            return Ok(T::zero());
        }
        mf.cdf(t, &cfg)
    });

    let mg = m.clone();
    let g: Evaluator<T> = Arc::new(move |t: T| {
        if t < T::zero() {
            return Ok(T::zero());
        }
        if t == T::zero() {
            let w0 = mg
                .atoms
                .iter()
                .filter(|a| a.loc == T::zero())
                .fold(T::zero(), |s, a| s + a.w);
            return Ok(w0);
        }
        let mut acc = T::zero();
        for a in &mg.atoms {
            if a.loc == T::zero() {
                acc += a.w;
            } else {
                acc += a.w * (one - (a.loc / t).powf(alpha)).max(T::zero());
            }
        }
        for c in &mg.continuous {
            let tb = t / c.scale;
            let part = match g_base_closed(&c.density, alpha, tb) {
                Some(v) => v,
                None => {
                    let u = tb.recip();
                    c.density.integrate_against(
                        move |y| (one - (u * y).powf(alpha)).max(T::zero()),
                        Some(tb),
                        &[],
                        &cfg,
                    )?
                }
            };
            acc += c.w * part;
        }
        Ok(acc.min(one).max(T::zero()))
    });

    let all_closed = m
        .continuous
        .iter()
        .all(|c| matches!(c.density, DensityKind::Pareto { .. } | DensityKind::Pow { .. }));
    let g_prime: Option<Evaluator<T>> = if all_closed {
        let md = m.clone();
        Some(Arc::new(move |t: T| {
            if !(t > T::zero()) {
                return Ok(T::zero());
            }
            let mut acc = T::zero();
            for a in &md.atoms {
                if a.loc > T::zero() && t > a.loc {
                    acc += a.w * alpha * a.loc.powf(alpha) * t.powf(-alpha - one);
                }
            }
            for c in &md.continuous {
                let tb = t / c.scale;
                let d = g_base_closed_prime(&c.density, alpha, tb)
                    .expect("closed-form set checked above");
                acc += c.w * d / c.scale;
            }
            Ok(acc)
        }))
    } else {
        None
    };

    let mut breakpoints: Vec<T> = m.atoms.iter().map(|a| a.loc).collect();
    for c in &m.continuous {
        breakpoints.push(c.support().0);
    }
    let pair = CdfPair::new(alpha, f, g, g_prime, breakpoints)?;
    if m.atoms.is_empty() {
        return Ok(pair);
    }
    let ml = m.clone();
    Ok(pair.with_f_left(Arc::new(move |t: T| {
        if t <= T::zero() {
            return Ok(T::zero());
        }
        ml.cdf_left(t, &cfg)
    })))
}

/// Kendall convolution on transform pairs: G multiplies exactly, and the
/// output CDF is F = G1 F2 + G2 F1 - G1 G2.
pub fn kendall_convolve<T: Real>(p1: &CdfPair<T>, p2: &CdfPair<T>) -> Result<CdfPair<T>> {
    if p1.alpha != p2.alpha {
        return Err(Error::AlphaMismatch {
            lhs: p1.alpha.as_f64(),
            rhs: p2.alpha.as_f64(),
        });
    }
    let depth = p1.depth.max(p2.depth) + 1;
    if depth > MAX_DEPTH {
        return Err(Error::DepthExceeded {
            depth,
            cap: MAX_DEPTH,
        });
    }
    let (f1, g1) = (p1.f.clone(), p1.g.clone());
    let (f2, g2) = (p2.f.clone(), p2.g.clone());
    let f: Evaluator<T> = Arc::new(move |t: T| {
        let (a1, b1) = (f1(t)?, g1(t)?);
        let (a2, b2) = (f2(t)?, g2(t)?);
        // algebraically G1 F2 + G2 F1 - G1 G2; this arrangement makes the
        // neutral pair (F = G = 1) drop out exactly
        let v = a1 * a2 - (a1 - b1) * (a2 - b2);
        Ok(v.min(T::one()).max(T::zero()))
    });
    let (ga, gb) = (p1.g.clone(), p2.g.clone());
    let g: Evaluator<T> = Arc::new(move |t: T| Ok(ga(t)? * gb(t)?));
    let g_prime: Option<Evaluator<T>> = match (&p1.g_prime, &p2.g_prime) {
        (Some(d1), Some(d2)) => {
            let (ga, gb) = (p1.g.clone(), p2.g.clone());
            let (d1, d2) = (d1.clone(), d2.clone());
            Some(Arc::new(move |t: T| {
                Ok(d1(t)? * gb(t)? + ga(t)? * d2(t)?)
            }))
        }
        _ => None,
    };
    let f_left: Option<Evaluator<T>> = if p1.f_left.is_some() || p2.f_left.is_some() {
        let l1 = p1.f_left.clone().unwrap_or_else(|| p1.f.clone());
        let l2 = p2.f_left.clone().unwrap_or_else(|| p2.f.clone());
        let (ga, gb) = (p1.g.clone(), p2.g.clone());
        // G is continuous, so the left limit combines the parents' left
        // limits through the same arrangement as F itself
        Some(Arc::new(move |t: T| {
            let (a1, b1) = (l1(t)?, ga(t)?);
            let (a2, b2) = (l2(t)?, gb(t)?);
            let v = a1 * a2 - (a1 - b1) * (a2 - b2);
            Ok(v.min(T::one()).max(T::zero()))
        }))
    } else {
        None
    };
    let mut breakpoints = p1.breakpoints.clone();
    breakpoints.extend_from_slice(&p2.breakpoints);
    let mut pair = CdfPair::new(p1.alpha, f, g, g_prime, breakpoints)?;
    pair.depth = depth;
    pair.f_left = f_left;
    Ok(pair)
}

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha.as_f64(),
            reason: "transform order must be positive and finite",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{Atom, ContinuousComponent};
    use crate::numerics::quad_integrate;

    fn cfg() -> QuadratureConfig<f64> {
        QuadratureConfig::default()
    }

    fn pareto_measure(beta: f64) -> MixtureMeasure<f64> {
        MixtureMeasure::from_parts(
            vec![],
            vec![ContinuousComponent::new(DensityKind::Pareto { beta }, 1.0)],
        )
        .unwrap()
    }

    fn pow_measure(alpha: f64) -> MixtureMeasure<f64> {
        MixtureMeasure::from_parts(
            vec![],
            vec![ContinuousComponent::new(DensityKind::Pow { alpha }, 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn transform_of_point_mass_is_clipped_power() {
        let m = MixtureMeasure::dirac(2.0);
        for &(alpha, t) in &[(1.0, 0.1), (1.0, 0.4), (2.0, 0.3), (0.5, 0.2)] {
            let got = williamson(&m, alpha, t, &cfg()).unwrap();
            let want = (1.0 - (2.0 * t).powf(alpha)).max(0.0);
            assert!((got - want).abs() < 1e-15, "alpha {alpha} t {t}");
        }
        assert_eq!(williamson(&m, 1.0, 0.9, &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn transform_is_one_at_zero() {
        let m = pareto_measure(2.0);
        assert_eq!(williamson(&m, 1.5, 0.0, &cfg()).unwrap(), 1.0);
    }

    #[test]
    fn transform_of_power_law_matches_quadrature_oracle() {
        // closed form: 1 - t^alpha/2 below one, t^{-alpha}/2 above
        let alpha = 1.3;
        let m = pow_measure(alpha);
        for &t in &[0.2, 0.7, 1.0, 1.8, 4.0] {
            let got = williamson(&m, alpha, t, &cfg()).unwrap();
            let want = if t <= 1.0 {
                1.0 - t.powf(alpha) / 2.0
            } else {
                t.powf(-alpha) / 2.0
            };
            assert!((got - want).abs() < 1e-12, "t {t}: {got} vs {want}");
            let cut = 1.0f64.min(1.0 / t);
            let oracle = quad_integrate(
                |s: f64| (1.0 - (t * s).powf(alpha)) * alpha * s.powf(alpha - 1.0),
                0.0,
                cut,
                &cfg(),
            )
            .unwrap();
            assert!((got - oracle).abs() < 1e-9, "t {t}: {got} vs oracle {oracle}");
        }
    }

    #[test]
    fn pair_of_point_mass_has_expected_components() {
        let a = 2.0;
        let alpha = 1.5;
        let pair = kendall_pair_of(&MixtureMeasure::dirac(a), alpha, &cfg()).unwrap();
        assert_eq!(pair.f(1.9).unwrap(), 0.0);
        assert_eq!(pair.f(2.0).unwrap(), 1.0);
        for &t in &[2.5, 4.0, 10.0] {
            let want = 1.0 - (a / t).powf(alpha);
            assert!((pair.g(t).unwrap() - want).abs() < 1e-15);
        }
        assert_eq!(pair.g(1.0).unwrap(), 0.0);
        assert!(pair.has_analytic_derivative());
    }

    #[test]
    fn pair_of_zero_mass_is_identity_pair() {
        let pair = kendall_pair_of(&MixtureMeasure::dirac(0.0), 1.0, &cfg()).unwrap();
        for &t in &[0.0, 0.5, 1.0, 7.0] {
            assert_eq!(pair.f(t).unwrap(), 1.0);
            assert_eq!(pair.g(t).unwrap(), 1.0);
        }
    }

    #[test]
    fn pareto_pair_matches_integral_definition() {
        // G(t) = alpha t^{-alpha} int_0^t x^{alpha-1} F(x) dx, quadrature oracle
        let alpha = 1.0;
        let m = pareto_measure(2.0 * alpha);
        let pair = kendall_pair_of(&m, alpha, &cfg()).unwrap();
        for &t in &[1.5f64, 2.0, 5.0] {
            let closed = (1.0 - t.powf(-alpha)).powi(2);
            let got = pair.g(t).unwrap();
            assert!((got - closed).abs() < 1e-13, "t {t}");
            let mc = m.clone();
            let oracle = alpha
                * t.powf(-alpha)
                * quad_integrate(
                    |x: f64| x.powf(alpha - 1.0) * mc.cdf(x, &cfg()).unwrap(),
                    0.0,
                    t,
                    &cfg(),
                )
                .unwrap();
            assert!((got - oracle).abs() < 1e-9, "t {t}: {got} vs {oracle}");
        }
    }

    #[test]
    fn g_never_exceeds_f() {
        let m = MixtureMeasure::from_parts(
            vec![Atom { loc: 0.7, w: 0.3 }],
            vec![ContinuousComponent::new(
                DensityKind::Pareto { beta: 2.0 },
                0.7,
            )],
        )
        .unwrap();
        let pair = kendall_pair_of(&m, 1.2, &cfg()).unwrap();
        let mut prev_f = 0.0;
        let mut prev_g = 0.0;
        for i in 1..60 {
            let t = 0.2 * i as f64;
            let f = pair.f(t).unwrap();
            let g = pair.g(t).unwrap();
            assert!(g <= f + 1e-12, "t {t}: G {g} > F {f}");
            assert!(f >= prev_f - 1e-12 && g >= prev_g - 1e-12);
            prev_f = f;
            prev_g = g;
        }
    }

    #[test]
    fn inversion_recovers_point_mass_cdf() {
        let pair = kendall_pair_of(&MixtureMeasure::dirac(1.0), 1.0, &cfg()).unwrap();
        for &t in &[1.5, 2.0, 3.0, 10.0] {
            let f = williamson_invert(&pair, t, None).unwrap();
            assert!((f - 1.0).abs() < 1e-12, "t {t}: {f}");
        }
        assert!(matches!(
            williamson_invert(&pair, 1.0, None),
            Err(Error::BreakpointDerivative { .. })
        ));
    }

    #[test]
    fn inversion_round_trips_power_law() {
        let alpha = 1.7;
        let pair = kendall_pair_of(&pow_measure(alpha), alpha, &cfg()).unwrap();
        for i in 1..10 {
            let t = 0.1 * i as f64;
            if t == 1.0 {
                continue;
            }
            let f = williamson_invert(&pair, t, None).unwrap();
            assert!((f - t.powf(alpha)).abs() < 1e-6, "t {t}: {f}");
        }
    }

    #[test]
    fn inversion_of_constant_g_is_constant_one() {
        let g: Evaluator<f64> = Arc::new(|_| Ok(1.0));
        let f: Evaluator<f64> = Arc::new(|_| Ok(1.0));
        let pair = CdfPair::new(1.0, f, g, None, vec![]).unwrap();
        for &t in &[0.3, 1.0, 5.0] {
            assert!((williamson_invert(&pair, t, None).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn unit_deltas_convolve_to_double_pareto() {
        let alpha = 1.0;
        let p = kendall_pair_of(&MixtureMeasure::dirac(1.0), alpha, &cfg()).unwrap();
        let conv = kendall_convolve(&p, &p).unwrap();
        for &t in &[1.0f64, 1.5, 2.0, 5.0, 20.0] {
            let want = 1.0 - t.powf(-2.0 * alpha);
            assert!((conv.f(t).unwrap() - want).abs() < 1e-14, "t {t}");
        }
        assert_eq!(conv.f(0.9).unwrap(), 0.0);
    }

    #[test]
    fn general_deltas_convolve_to_scaled_double_pareto() {
        let alpha = 2.0;
        let (a, b) = (0.5, 1.25);
        let pa = kendall_pair_of(&MixtureMeasure::dirac(a), alpha, &cfg()).unwrap();
        let pb = kendall_pair_of(&MixtureMeasure::dirac(b), alpha, &cfg()).unwrap();
        let conv = kendall_convolve(&pa, &pb).unwrap();
        for &t in &[1.25f64, 1.5, 2.0, 6.0] {
            let want = 1.0 - (a * b).powf(alpha) * t.powf(-2.0 * alpha);
            assert!((conv.f(t).unwrap() - want).abs() < 1e-14, "t {t}");
        }
        // below the larger point the smaller delta has not yet arrived
        assert_eq!(conv.f(1.0).unwrap(), 0.0);
    }

    #[test]
    fn zero_mass_is_neutral_for_pairs() {
        let alpha = 1.5;
        let neutral = kendall_pair_of(&MixtureMeasure::dirac(0.0), alpha, &cfg()).unwrap();
        let m = MixtureMeasure::from_parts(
            vec![Atom { loc: 0.4, w: 0.5 }],
            vec![ContinuousComponent::new(
                DensityKind::Pareto { beta: 3.0 },
                0.5,
            )],
        )
        .unwrap();
        let p = kendall_pair_of(&m, alpha, &cfg()).unwrap();
        let conv = kendall_convolve(&neutral, &p).unwrap();
        for i in 0..40 {
            let t = 0.25 * i as f64;
            assert_eq!(conv.f(t).unwrap(), p.f(t).unwrap(), "t {t}");
            assert_eq!(conv.g(t).unwrap(), p.g(t).unwrap(), "t {t}");
        }
    }

    #[test]
    fn convolution_is_associative_on_a_grid() {
        let alpha = 1.0;
        let p1 = kendall_pair_of(&MixtureMeasure::dirac(0.5), alpha, &cfg()).unwrap();
        let p2 = kendall_pair_of(&MixtureMeasure::dirac(1.0), alpha, &cfg()).unwrap();
        let p3 = kendall_pair_of(&pareto_measure(2.0), alpha, &cfg()).unwrap();
        let left = kendall_convolve(&kendall_convolve(&p1, &p2).unwrap(), &p3).unwrap();
        let right = kendall_convolve(&p1, &kendall_convolve(&p2, &p3).unwrap()).unwrap();
        for i in 1..50 {
            let t = 0.3 * i as f64;
            let lf = left.f(t).unwrap();
            let rf = right.f(t).unwrap();
            assert!((lf - rf).abs() < 1e-9, "t {t}: {lf} vs {rf}");
        }
    }

    #[test]
    fn convolved_f_is_monotone() {
        let alpha = 1.0;
        let p1 = kendall_pair_of(&pareto_measure(2.0), alpha, &cfg()).unwrap();
        let p2 = kendall_pair_of(&pow_measure(1.0), alpha, &cfg()).unwrap();
        let conv = kendall_convolve(&p1, &p2).unwrap();
        let mut prev = 0.0;
        for i in 1..80 {
            let t = 0.1 * i as f64;
            let f = conv.f(t).unwrap();
            assert!(f >= prev - 1e-12, "t {t}");
            prev = f;
        }
    }

    #[test]
    fn alpha_mismatch_is_rejected() {
        let p1 = kendall_pair_of(&MixtureMeasure::dirac(1.0), 1.0, &cfg()).unwrap();
        let p2 = kendall_pair_of(&MixtureMeasure::dirac(1.0), 2.0, &cfg()).unwrap();
        assert!(matches!(
            kendall_convolve(&p1, &p2),
            Err(Error::AlphaMismatch { .. })
        ));
    }

    #[test]
    fn composition_depth_is_capped() {
        let p = kendall_pair_of(&MixtureMeasure::dirac(1.0), 1.0, &cfg()).unwrap();
        let mut acc = p.clone();
        let mut hit_cap = false;
        for _ in 0..70 {
            match kendall_convolve(&acc, &p) {
                Ok(next) => acc = next,
                Err(Error::DepthExceeded { .. }) => {
                    hit_cap = true;
                    break;
                }
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        assert!(hit_cap);
        assert_eq!(acc.depth(), MAX_DEPTH);
    }

    #[test]
    fn quadrature_g_agrees_with_transform_at_reciprocal_argument() {
        // a component without closed form exercises the quadrature path
        let m = MixtureMeasure::from_parts(
            vec![],
            vec![ContinuousComponent::new(
                DensityKind::DiamondTail {
                    p: 0.4,
                    alpha: 1.0,
                },
                1.0,
            )],
        )
        .unwrap();
        let alpha = 1.0;
        let pair = kendall_pair_of(&m, alpha, &cfg()).unwrap();
        assert!(!pair.has_analytic_derivative());
        for &t in &[1.5, 2.5, 6.0] {
            let g = pair.g(t).unwrap();
            let phi = williamson(&m, alpha, 1.0 / t, &cfg()).unwrap();
            assert!((g - phi).abs() < 1e-10, "t {t}: {g} vs {phi}");
            let mc = m.clone();
            let oracle = alpha
                * t.powf(-alpha)
                * quad_integrate(
                    |x: f64| x.powf(alpha - 1.0) * mc.cdf(x, &cfg()).unwrap(),
                    0.0,
                    t,
                    &cfg(),
                )
                .unwrap();
            assert!((g - oracle).abs() < 1e-8, "t {t}: {g} vs {oracle}");
        }
    }

    #[test]
    fn left_limits_see_the_atoms() {
        let m = MixtureMeasure::from_parts(
            vec![Atom { loc: 1.0, w: 0.4 }],
            vec![ContinuousComponent::new(DensityKind::Pow { alpha: 2.0 }, 0.6)],
        )
        .unwrap();
        let pair = kendall_pair_of(&m, 1.0, &cfg()).unwrap();
        assert_eq!(pair.f(1.0).unwrap(), 1.0);
        assert_eq!(pair.f_left(1.0).unwrap(), 0.6);
        // away from the atom the limits coincide
        assert_eq!(pair.f_left(0.5).unwrap(), pair.f(0.5).unwrap());

        let smooth = pareto_measure(2.0);
        let cont = kendall_pair_of(&smooth, 1.0, &cfg()).unwrap();
        assert_eq!(cont.f_left(1.5).unwrap(), cont.f(1.5).unwrap());
    }

    #[test]
    fn convolved_left_limits_capture_the_max_atom() {
        // delta_1 conv delta_2 at alpha 1: atom of weight 1/2 at the max
        let p1 = kendall_pair_of(&MixtureMeasure::dirac(1.0), 1.0, &cfg()).unwrap();
        let p2 = kendall_pair_of(&MixtureMeasure::dirac(2.0), 1.0, &cfg()).unwrap();
        let conv = kendall_convolve(&p1, &p2).unwrap();
        assert!((conv.f(2.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(conv.f_left(2.0).unwrap(), 0.0);
        // continuous above the max: limits agree
        let t = 3.0;
        assert!((conv.f_left(t).unwrap() - conv.f(t).unwrap()).abs() < 1e-15);
    }
}
