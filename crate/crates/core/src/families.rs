//! The convolution family catalog: exact point-mass convolution rules,
//! monotonicity flags, lack-of-memory laws, max-representation mixing laws,
//! and convex decompositions of delta_x conv delta_1.
//!
//! Every operation here is exact algebra on mixture measures; Monte Carlo
//! diagnostics (witness fractions, lack-of-memory residuals) live on the
//! `f64` instantiation and take explicit seeds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{Atom, ContinuousComponent, DensityKind, MixtureMeasure};
use crate::numerics::binomial;
use crate::real::Real;

/// A generalized convolution on measures over the half-line, identified by
/// its kernel shape and parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub enum Family<T: Real> {
    /// delta_x * delta_y = delta_{x+y}
    Classical,
    /// half weight to x+y, half to |x-y|
    Symmetric,
    /// delta_x * delta_y = delta at (x^alpha + y^alpha)^{1/alpha}
    Stable { alpha: T },
    /// atom at the max plus a Pareto(2 alpha) overshoot
    Kendall { alpha: T },
    /// delta_x * delta_y = delta at max(x, y)
    Max,
    /// radial convolution of order s
    Kingman { s: T },
    /// incomplete-gamma kernel family; a = 1 degenerates to the stable rule
    Kucharczak { a: T, r: T },
    /// Kendall raised to kernel power n: order-statistic mixture
    Ku { alpha: T, n: u32 },
    /// interpolates max (p = 0) through Kendall-like (p = 1)
    Diamond { p: T, alpha: T },
    /// three-term kernel; point-mass convolutions are not constructible
    KendallType { c: T, alpha: T, p: T },
}

impl<T: Real> core::fmt::Display for Family<T> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match *self {
            Family::Classical => write!(f, "classical"),
            Family::Symmetric => write!(f, "symmetric"),
            Family::Stable { alpha } => write!(f, "stable(alpha={alpha})"),
            Family::Kendall { alpha } => write!(f, "kendall(alpha={alpha})"),
            Family::Max => write!(f, "max"),
            Family::Kingman { s } => write!(f, "kingman(s={s})"),
            Family::Kucharczak { a, r } => write!(f, "kucharczak(a={a}, r={r})"),
            Family::Ku { alpha, n } => write!(f, "ku(alpha={alpha}, n={n})"),
            Family::Diamond { p, alpha } => write!(f, "diamond(p={p}, alpha={alpha})"),
            Family::KendallType { c, alpha, p } => {
                write!(f, "kendall_type(c={c}, alpha={alpha}, p={p})")
            }
        }
    }
}

/// Which of the five admissible parameter conditions a Kendall-type triple
/// satisfies, if any. Equalities are tested within 1e-12; case 5 is the open
/// interval between the case-2 and case-4 constants.
pub fn is_admissible_kendall_type<T: Real>(c: T, alpha: T, p: T) -> Result<Option<u8>> {
    if alpha <= T::zero() {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha.as_f64(),
            reason: "must be positive",
        });
    }
    if p < T::lit(2.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p.as_f64(),
            reason: "admissibility is stated for p >= 2",
        });
    }
    let tol = T::lit(1e-12);
    let one = T::one();
    let two = T::lit(2.0);
    let c1 = (p - one).recip();
    let c2 = (p * p - one).recip();
    let c3 = (two - p) / (two * (p - one));
    let c4 = (two * (p - one)).recip();
    if (c - c1).abs() <= tol {
        return Ok(Some(1));
    }
    if (c - c2).abs() <= tol {
        return Ok(Some(2));
    }
    if (c - c3).abs() <= tol {
        return Ok(Some(3));
    }
    if (c - c4).abs() <= tol {
        return Ok(Some(4));
    }
    if c > c2 && c < c4 {
        return Ok(Some(5));
    }
    Ok(None)
}

/// Decomposition of delta_x conv delta_1 as a convex combination of fixed
/// measures with x-dependent weights: sum_k w_k(x) lambda_k for x in [0, 1].
/// Components may be `None` where the catalog defines only the weights.
pub struct ConvexDecomposition<T: Real> {
    pub components: Vec<Option<MixtureMeasure<T>>>,
    weight_fns: Vec<Box<dyn Fn(T) -> T + Send + Sync>>,
}

impl<T: Real> ConvexDecomposition<T> {
    pub fn n(&self) -> usize {
        self.weight_fns.len()
    }

    pub fn weights_at(&self, x: T) -> Vec<T> {
        self.weight_fns.iter().map(|w| w(x)).collect()
    }

    /// Largest |sum of weights - 1| over the grid; exactly representable
    /// decompositions stay at rounding level.
    pub fn weight_sum_defect(&self, grid: &[T]) -> T {
        let mut worst = T::zero();
        for &x in grid {
            let s = self
                .weights_at(x)
                .into_iter()
                .fold(T::zero(), |acc, w| acc + w);
            worst = worst.max((s - T::one()).abs());
        }
        worst
    }
}

fn dirac<T: Real>(loc: T) -> MixtureMeasure<T> {
    MixtureMeasure::dirac(loc)
}

impl<T: Real> Family<T> {
    pub fn validate(&self) -> Result<()> {
        let need_pos = |name: &'static str, v: T| -> Result<()> {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    value: v.as_f64(),
                    reason: "must be positive and finite",
                })
            }
        };
        match *self {
            Family::Classical | Family::Symmetric | Family::Max => Ok(()),
            Family::Stable { alpha } | Family::Kendall { alpha } => need_pos("alpha", alpha),
            Family::Kingman { s } => {
                if s > T::lit(-0.5) && s.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter {
                        name: "s",
                        value: s.as_f64(),
                        reason: "radial order must exceed -1/2",
                    })
                }
            }
            Family::Kucharczak { a, r } => {
                need_pos("r", r)?;
                if a > T::zero() && a <= T::one() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter {
                        name: "a",
                        value: a.as_f64(),
                        reason: "requires a in (0, 1]",
                    })
                }
            }
            Family::Ku { alpha, n } => {
                need_pos("alpha", alpha)?;
                if n == 0 {
                    return Err(Error::InvalidParameter {
                        name: "n",
                        value: 0.0,
                        reason: "kernel power must be at least 1",
                    });
                }
                Ok(())
            }
            Family::Diamond { p, alpha } => {
                need_pos("alpha", alpha)?;
                if p >= T::zero() && p <= T::one() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter {
                        name: "p",
                        value: p.as_f64(),
                        reason: "requires p in [0, 1]",
                    })
                }
            }
            Family::KendallType { c, alpha, p } => {
                match is_admissible_kendall_type(c, alpha, p)? {
                    Some(_) => Ok(()),
                    None => Err(Error::NotAdmissible {
                        c: c.as_f64(),
                        alpha: alpha.as_f64(),
                        p: p.as_f64(),
                    }),
                }
            }
        }
    }

    /// Whether delta_x conv delta_y is supported in [max(x,y), inf).
    pub fn is_monotonic(&self) -> bool {
        !matches!(self, Family::Symmetric | Family::Kingman { .. })
    }

    /// The convolution of two point masses, as an explicit mixture.
    /// Commutative by construction and exact at the atoms.
    pub fn delta_conv(&self, x: T, y: T) -> Result<MixtureMeasure<T>> {
        self.validate()?;
        if x < T::zero() || !x.is_finite() || y < T::zero() || !y.is_finite() {
            return Err(Error::InvalidParameter {
                name: "point",
                value: x.min(y).as_f64(),
                reason: "point masses live on [0, inf)",
            });
        }
        let m = x.min(y);
        let big = x.max(y);
        // delta_0 is neutral for every family in the catalog.
        if m == T::zero() {
            return Ok(dirac(big));
        }
        let one = T::one();
        let rho = m / big;
        match *self {
            Family::Classical => Ok(dirac(x + y)),
            Family::Symmetric => MixtureMeasure::from_parts(
                vec![
                    Atom {
                        loc: big - m,
                        w: T::lit(0.5),
                    },
                    Atom {
                        loc: x + y,
                        w: T::lit(0.5),
                    },
                ],
                vec![],
            ),
            Family::Stable { alpha } => {
                Ok(dirac((x.powf(alpha) + y.powf(alpha)).powf(alpha.recip())))
            }
            Family::Max => Ok(dirac(big)),
            Family::Kendall { alpha } => {
                let w_tail = rho.powf(alpha);
                MixtureMeasure::from_parts(
                    vec![Atom {
                        loc: big,
                        w: one - w_tail,
                    }],
                    vec![ContinuousComponent {
                        density: DensityKind::Pareto {
                            beta: alpha + alpha,
                        },
                        scale: big,
                        w: w_tail,
                    }],
                )
            }
            Family::Kingman { s } => MixtureMeasure::from_parts(
                vec![],
                vec![ContinuousComponent::new(
                    DensityKind::KingmanRadial { s, x: m, y: big },
                    one,
                )],
            ),
            Family::Kucharczak { a, r } => {
                let loc = (x.powf(r) + y.powf(r)).powf(r.recip());
                if a == one {
                    return Ok(dirac(loc));
                }
                MixtureMeasure::from_parts(
                    vec![],
                    vec![ContinuousComponent::new(
                        DensityKind::Kucharczak { a, r, x: m, y: big },
                        one,
                    )],
                )
            }
            Family::Ku { alpha, n } => {
                let ra = rho.powf(alpha);
                let q = one - ra;
                let mut atoms = vec![Atom {
                    loc: big,
                    w: q.powi(n as i32),
                }];
                let mut comps = Vec::with_capacity(n as usize);
                for k in 1..=n {
                    let w = binomial::<T>(n, k) * ra.powi(k as i32) * q.powi((n - k) as i32);
                    comps.push(ContinuousComponent {
                        density: DensityKind::KuOrderstat { alpha, k, n },
                        scale: big,
                        w,
                    });
                }
                if atoms[0].w == T::zero() {
                    atoms.clear();
                }
                MixtureMeasure::from_parts(atoms, comps)
            }
            Family::Diamond { p, alpha } => {
                if p == T::zero() {
                    return Ok(dirac(big));
                }
                let w_tail = p * rho.powf(alpha);
                let tail = if p == one {
                    DensityKind::Pareto {
                        beta: alpha + alpha,
                    }
                } else {
                    DensityKind::DiamondTail { p, alpha }
                };
                MixtureMeasure::from_parts(
                    vec![Atom {
                        loc: big,
                        w: one - w_tail,
                    }],
                    vec![ContinuousComponent {
                        density: tail,
                        scale: big,
                        w: w_tail,
                    }],
                )
            }
            Family::KendallType { .. } => Err(Error::KendallTypeUnsupported),
        }
    }

    /// The law whose survival function turns this convolution's "addition"
    /// into multiplication of survivals. Defined when the kernel decreases
    /// monotonically to zero (max returns delta_1 as the degenerate case).
    pub fn lom_law(&self) -> Result<MixtureMeasure<T>> {
        self.validate()?;
        let one = T::one();
        match *self {
            Family::Symmetric | Family::Kingman { .. } => Err(Error::NoLomLaw),
            Family::Classical => MixtureMeasure::from_parts(
                vec![],
                vec![ContinuousComponent::new(
                    DensityKind::WeibullKernel { a: one, r: one },
                    one,
                )],
            ),
            Family::Stable { alpha } => MixtureMeasure::from_parts(
                vec![],
                vec![ContinuousComponent::new(
                    DensityKind::WeibullKernel { a: one, r: alpha },
                    one,
                )],
            ),
            Family::Kendall { alpha } => MixtureMeasure::from_parts(
                vec![],
                vec![ContinuousComponent::new(DensityKind::Pow { alpha }, one)],
            ),
            Family::Max => Ok(dirac(one)),
            Family::Kucharczak { a, r } => MixtureMeasure::from_parts(
                vec![],
                vec![ContinuousComponent::new(
                    DensityKind::WeibullKernel { a, r },
                    one,
                )],
            ),
            Family::Ku { alpha, n } => MixtureMeasure::from_parts(
                vec![],
                vec![ContinuousComponent::new(DensityKind::KuLom { alpha, n }, one)],
            ),
            Family::Diamond { p, alpha } => {
                if p == T::zero() {
                    return Ok(dirac(one));
                }
                MixtureMeasure::from_parts(
                    vec![Atom { loc: one, w: one - p }],
                    vec![ContinuousComponent::new(DensityKind::Pow { alpha }, p)],
                )
            }
            Family::KendallType { c, alpha, p } => MixtureMeasure::from_parts(
                vec![],
                vec![ContinuousComponent::new(
                    DensityKind::KendallTypeLom { c, alpha, p },
                    one,
                )],
            ),
        }
    }

    /// Mixing law of the max-representation: the law with CDF kernel(1/t) on
    /// [1, inf). Requires a kernel that decreases continuously to zero.
    pub fn max_weak_rep_mixing_law(&self) -> Result<MixtureMeasure<T>> {
        self.validate()?;
        let one = T::one();
        match *self {
            Family::Symmetric | Family::Kingman { .. } | Family::Diamond { .. } => {
                Err(Error::KernelNotVanishing)
            }
            Family::Classical => MixtureMeasure::from_parts(
                vec![],
                vec![ContinuousComponent::new(
                    DensityKind::InvWeibullKernel { a: one, r: one },
                    one,
                )],
            ),
            Family::Stable { alpha } => MixtureMeasure::from_parts(
                vec![],
                vec![ContinuousComponent::new(
                    DensityKind::FrechetLike { alpha },
                    one,
                )],
            ),
            Family::Kendall { alpha } => MixtureMeasure::from_parts(
                vec![],
                vec![ContinuousComponent::new(
                    DensityKind::Pareto { beta: alpha },
                    one,
                )],
            ),
            Family::Max => Ok(dirac(one)),
            Family::Kucharczak { a, r } => MixtureMeasure::from_parts(
                vec![],
                vec![ContinuousComponent::new(
                    DensityKind::InvWeibullKernel { a, r },
                    one,
                )],
            ),
            Family::Ku { alpha, n } => MixtureMeasure::from_parts(
                vec![],
                vec![ContinuousComponent::new(
                    DensityKind::KuOrderstat { alpha, k: n, n: 0 },
                    one,
                )],
            ),
            Family::KendallType { c, alpha, p } => MixtureMeasure::from_parts(
                vec![],
                vec![ContinuousComponent::new(
                    DensityKind::KendallTypeMixing { c, alpha, p },
                    one,
                )],
            ),
        }
    }

    /// Finite convex decomposition of delta_x conv delta_1 with x-dependent
    /// weights and fixed components. Kendall-type components are weight-only.
    pub fn convex_decomposition(&self) -> Result<ConvexDecomposition<T>> {
        self.validate()?;
        let one = T::one();
        match *self {
            Family::Kendall { alpha } => Ok(ConvexDecomposition {
                components: vec![
                    Some(dirac(one)),
                    Some(MixtureMeasure::from_parts(
                        vec![],
                        vec![ContinuousComponent::new(
                            DensityKind::Pareto {
                                beta: alpha + alpha,
                            },
                            one,
                        )],
                    )?),
                ],
                weight_fns: vec![
                    Box::new(move |x: T| one - x.powf(alpha)),
                    Box::new(move |x: T| x.powf(alpha)),
                ],
            }),
            Family::Max => Ok(ConvexDecomposition {
                components: vec![Some(dirac(one))],
                weight_fns: vec![Box::new(move |_| one)],
            }),
            Family::Ku { alpha, n } => {
                let mut components = vec![Some(dirac(one))];
                let mut weight_fns: Vec<Box<dyn Fn(T) -> T + Send + Sync>> =
                    vec![Box::new(move |x: T| {
                        (one - x.powf(alpha)).powi(n as i32)
                    })];
                for k in 1..=n {
                    components.push(Some(MixtureMeasure::from_parts(
                        vec![],
                        vec![ContinuousComponent::new(
                            DensityKind::KuOrderstat { alpha, k, n },
                            one,
                        )],
                    )?));
                    weight_fns.push(Box::new(move |x: T| {
                        binomial::<T>(n, k)
                            * x.powf(alpha).powi(k as i32)
                            * (one - x.powf(alpha)).powi((n - k) as i32)
                    }));
                }
                Ok(ConvexDecomposition {
                    components,
                    weight_fns,
                })
            }
            Family::Diamond { p, alpha } => {
                if p == T::zero() {
                    return Ok(ConvexDecomposition {
                        components: vec![Some(dirac(one))],
                        weight_fns: vec![Box::new(move |_| one)],
                    });
                }
                let tail = if p == one {
                    DensityKind::Pareto {
                        beta: alpha + alpha,
                    }
                } else {
                    DensityKind::DiamondTail { p, alpha }
                };
                Ok(ConvexDecomposition {
                    components: vec![
                        Some(dirac(one)),
                        Some(MixtureMeasure::from_parts(
                            vec![],
                            vec![ContinuousComponent::new(tail, one)],
                        )?),
                    ],
                    weight_fns: vec![
                        Box::new(move |x: T| one - p * x.powf(alpha)),
                        Box::new(move |x: T| p * x.powf(alpha)),
                    ],
                })
            }
            Family::KendallType { c, alpha, p } => Ok(ConvexDecomposition {
                components: vec![Some(dirac(one)), None, None],
                weight_fns: vec![
                    Box::new(move |x: T| {
                        one - (one + c) * x.powf(alpha) + c * x.powf(alpha * p)
                    }),
                    Box::new(move |x: T| x.powf(alpha * p)),
                    Box::new(move |x: T| (c + one) * (x.powf(alpha) - x.powf(alpha * p))),
                ],
            }),
            _ => Err(Error::NoConvexDecomposition),
        }
    }
}

impl Family<f64> {
    /// Fraction of n draws of delta_x conv delta_y that land strictly below
    /// max(x, y). Zero for monotonic families; positive for the radial and
    /// symmetric convolutions.
    pub fn monotonicity_witness(&self, x: f64, y: f64, n: usize, seed: u64) -> Result<f64> {
        let mut rng = crate::samplers::SeededRng::new(seed);
        let draws = crate::samplers::sample_family_n(self, x, y, n, &mut rng)?;
        let m = x.max(y);
        let below = draws.iter().filter(|&&z| z < m).count();
        Ok(below as f64 / n.max(1) as f64)
    }

    /// Monte Carlo check of the survival identity P{X > x conv y} =
    /// P{X > x} P{X > y} for X with the family's lack-of-memory law.
    /// The joint term is estimated by sampling x conv y; the product term is
    /// exact. Survival is strict (atoms exactly at the point excluded).
    pub fn lom_residual(&self, x: f64, y: f64, n: usize, seed: u64) -> Result<f64> {
        let law = self.lom_law()?;
        let cfg = crate::numerics::QuadratureConfig::default();
        let mut rng = crate::samplers::SeededRng::new(seed);
        let draws = crate::samplers::sample_family_n(self, x, y, n, &mut rng)?;
        let mut acc = 0.0;
        for z in &draws {
            acc += law.survival(*z, &cfg)?;
        }
        let joint = acc / n.max(1) as f64;
        let product = law.survival(x, &cfg)? * law.survival(y, &cfg)?;
        Ok((joint - product).abs())
    }
}
