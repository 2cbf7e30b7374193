//! Named verification suites: deterministic bundles of oracle checks, run
//! from the command line and mirrored at larger scale by the acceptance
//! tests. Every case reports one statistic against one threshold; a case
//! passes exactly when the statistic is below the threshold.

use serde::Serialize;

use crate::error::Result;
use crate::families::Family;
use crate::kernels::{polya_check, WeakStableDensity};
use crate::measures::{DensityKind, MixtureMeasure};
use crate::numerics::{linspace, QuadratureConfig};
use crate::samplers::{
    sample_base, sample_family, sample_family_n, sample_measure, sample_order_stat, SeededRng,
};
use crate::stats::{
    cosine_transform, frequency_check, ks_against_density, ks_against_pair, ks_two_sample,
};
use crate::williamson::{kendall_convolve, kendall_pair_of};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteName {
    Axioms,
    KendallExact,
    Lom,
    Maxrep,
    Weakstable,
    Orderstat,
    Normalization,
}

impl SuiteName {
    pub const ALL: [SuiteName; 7] = [
        SuiteName::Axioms,
        SuiteName::KendallExact,
        SuiteName::Lom,
        SuiteName::Maxrep,
        SuiteName::Weakstable,
        SuiteName::Orderstat,
        SuiteName::Normalization,
    ];

    pub fn parse(name: &str) -> Option<SuiteName> {
        Self::ALL.iter().copied().find(|s| s.as_str() == name)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Axioms => "axioms",
            SuiteName::KendallExact => "kendall-exact",
            SuiteName::Lom => "lom",
            SuiteName::Maxrep => "maxrep",
            SuiteName::Weakstable => "weakstable",
            SuiteName::Orderstat => "orderstat",
            SuiteName::Normalization => "normalization",
        }
    }
}

impl core::fmt::Display for SuiteName {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    pub id: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: Vec<CaseReport>,
    pub pass: bool,
}

/// Accumulates cases and derives one reproducible stream per case from the
/// master seed: case index i runs on seed + i.
struct Runner {
    seed: u64,
    cases: Vec<CaseReport>,
}

impl Runner {
    fn new(seed: u64) -> Self {
        Runner { seed, cases: Vec::new() }
    }

    fn case_rng(&self) -> SeededRng {
        SeededRng::new(self.seed.wrapping_add(self.cases.len() as u64))
    }

    fn push(&mut self, id: String, statistic: f64, threshold: f64) {
        self.cases.push(CaseReport {
            id,
            statistic,
            threshold,
            pass: statistic < threshold,
        });
    }

    fn push_ks(&mut self, id: String, report: &crate::stats::KsReport) {
        self.cases.push(CaseReport {
            id,
            statistic: report.statistic,
            threshold: report.critical_value,
            pass: report.pass,
        });
    }

    fn finish(self, suite: SuiteName) -> SuiteReport {
        let pass = !self.cases.is_empty() && self.cases.iter().all(|c| c.pass);
        SuiteReport {
            suite: suite.to_string(),
            cases: self.cases,
            pass,
        }
    }
}

/// Run one named suite. The family filter replaces the default roster of the
/// per-family suites (axioms, lom, maxrep); the other suites have fixed case
/// lists and ignore it. Identical inputs produce identical reports.
pub fn run_suite(
    name: SuiteName,
    family: Option<&Family<f64>>,
    seed: u64,
    cfg: &QuadratureConfig<f64>,
) -> Result<SuiteReport> {
    let mut r = Runner::new(seed);
    match name {
        SuiteName::Axioms => axioms_suite(&mut r, family, cfg)?,
        SuiteName::KendallExact => kendall_exact_suite(&mut r, cfg)?,
        SuiteName::Lom => lom_suite(&mut r, family)?,
        SuiteName::Maxrep => maxrep_suite(&mut r, family)?,
        SuiteName::Weakstable => weakstable_suite(&mut r, cfg)?,
        SuiteName::Orderstat => orderstat_suite(&mut r, cfg)?,
        SuiteName::Normalization => normalization_suite(&mut r, cfg)?,
    }
    Ok(r.finish(name))
}

fn default_roster() -> Vec<Family<f64>> {
    vec![
        Family::Classical,
        Family::Symmetric,
        Family::Stable { alpha: 2.0 },
        Family::Kendall { alpha: 1.0 },
        Family::Max,
        Family::Kingman { s: 0.5 },
        Family::Ku { alpha: 1.0, n: 2 },
        Family::Diamond { p: 0.5, alpha: 1.0 },
        Family::Kucharczak { a: 0.5, r: 2.0 },
    ]
}

fn roster(family: Option<&Family<f64>>) -> Vec<Family<f64>> {
    match family {
        Some(f) => vec![f.clone()],
        None => default_roster(),
    }
}

fn grid_gap(
    m1: &MixtureMeasure<f64>,
    m2: &MixtureMeasure<f64>,
    grid: &[f64],
    cfg: &QuadratureConfig<f64>,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for &t in grid {
        worst = worst.max((m1.cdf(t, cfg)? - m2.cdf(t, cfg)?).abs());
    }
    Ok(worst)
}

fn axioms_suite(
    r: &mut Runner,
    family: Option<&Family<f64>>,
    cfg: &QuadratureConfig<f64>,
) -> Result<()> {
    let (x, y, a) = (0.6, 1.1, 1.7);
    let grid = linspace(0.0, 8.0, 41);
    for fam in roster(family) {
        // commutativity: the two orderings build the same mixture
        let gap = grid_gap(&fam.delta_conv(x, y)?, &fam.delta_conv(y, x)?, &grid, cfg)?;
        r.push(format!("axioms/commutativity/{fam}"), gap, 1e-12);

        // neutral element: convolving with delta_0 returns the point mass
        let m = fam.delta_conv(x, 0.0)?;
        let mut gap = 0.0f64;
        for &t in &grid {
            let want = if t >= x { 1.0 } else { 0.0 };
            gap = gap.max((m.cdf(t, cfg)? - want).abs());
        }
        r.push(format!("axioms/neutral-element/{fam}"), gap, 1e-12);

        // homogeneity: dilating the convolution equals convolving dilations
        let gap = grid_gap(
            &fam.delta_conv(x, y)?.dilate(a),
            &fam.delta_conv(a * x, a * y)?,
            &linspace(0.0, 8.0 * a, 41),
            cfg,
        )?;
        r.push(format!("axioms/homogeneity/{fam}"), gap, 1e-9);

        // associativity, Monte Carlo: (X1 conv X2) conv X3 against
        // X1 conv (X2 conv X3) with independent random inputs on each side.
        // Random inputs keep both sides continuous, so the comparison is
        // immune to the one-ulp atom splits a deterministic family would
        // produce at fixed points.
        let n = match fam {
            // per-draw quadrature inversion; keep the smoke check small
            Family::Kucharczak { a, .. } if a < 1.0 => 400,
            _ => 20_000,
        };
        let rng = r.case_rng();
        let assoc_side = |streams: (u64, u64, u64, u64)| -> Result<Vec<f64>> {
            let b1 = sample_base(&DensityKind::Pareto { beta: 3.0 }, n, &mut rng.substream(streams.0))?;
            let b2 = sample_base(&DensityKind::Pow { alpha: 2.0 }, n, &mut rng.substream(streams.1))?;
            let b3 = sample_base(&DensityKind::Pareto { beta: 5.0 }, n, &mut rng.substream(streams.2))?;
            let mut crng = rng.substream(streams.3);
            (0..n)
                .map(|i| {
                    let v = sample_family(&fam, b1.values[i], b2.values[i], &mut crng)?;
                    sample_family(&fam, v, b3.values[i], &mut crng)
                })
                .collect()
        };
        // the right association runs through the same chain with its inputs
        // reordered: X3 conv X2 first, then conv X1
        let rhs_side = |streams: (u64, u64, u64, u64)| -> Result<Vec<f64>> {
            let b1 = sample_base(&DensityKind::Pareto { beta: 3.0 }, n, &mut rng.substream(streams.0))?;
            let b2 = sample_base(&DensityKind::Pow { alpha: 2.0 }, n, &mut rng.substream(streams.1))?;
            let b3 = sample_base(&DensityKind::Pareto { beta: 5.0 }, n, &mut rng.substream(streams.2))?;
            let mut crng = rng.substream(streams.3);
            (0..n)
                .map(|i| {
                    let u = sample_family(&fam, b2.values[i], b3.values[i], &mut crng)?;
                    sample_family(&fam, b1.values[i], u, &mut crng)
                })
                .collect()
        };
        let lhs = assoc_side((1, 2, 3, 4))?;
        let rhs = rhs_side((5, 6, 7, 8))?;
        let rep = ks_two_sample(&lhs, &rhs, 0.01)?;
        r.push_ks(format!("axioms/associativity/{fam}"), &rep);

        // monotonicity: either no draw falls below the max, or the fraction
        // that does matches the law's own left mass (expected-false for the
        // non-monotonic families, reported as a match rather than a failure)
        let n = 10_000;
        let mut rng = r.case_rng();
        let big = x.max(y);
        let draws = sample_family_n(&fam, x, y, n, &mut rng)?;
        let below = draws.iter().filter(|v| **v < big * (1.0 - 1e-12)).count();
        if fam.is_monotonic() {
            r.push(
                format!("axioms/monotonicity/{fam}"),
                below as f64,
                0.5,
            );
        } else {
            let p = fam.delta_conv(x, y)?.cdf_left(big, cfg)?;
            let freq = frequency_check(below, n, p, 3.0)?;
            r.push(
                format!("axioms/monotonicity-expected-left-mass/{fam}"),
                freq.z,
                freq.z_max,
            );
        }
    }
    Ok(())
}

fn kendall_exact_suite(r: &mut Runner, cfg: &QuadratureConfig<f64>) -> Result<()> {
    // sampled draws against the exact convolution of the transform pairs
    for &(t1, t2, alpha) in &[(1.0, 1.0, 1.0), (0.5, 1.0, 1.0), (0.3, 0.7, 2.0)] {
        let mut rng = r.case_rng();
        let fam = Family::Kendall { alpha };
        let draws = sample_family_n(&fam, t1, t2, 20_000, &mut rng)?;
        let p1 = kendall_pair_of(&MixtureMeasure::dirac(t1), alpha, cfg)?;
        let p2 = kendall_pair_of(&MixtureMeasure::dirac(t2), alpha, cfg)?;
        let pair = kendall_convolve(&p1, &p2)?;
        let rep = ks_against_pair(&draws, &pair, 0.01)?;
        r.push_ks(
            format!("kendall-exact/ks/theta1={t1},theta2={t2},alpha={alpha}"),
            &rep,
        );
    }

    // delta_1 conv delta_1 is the Pareto law with index 2 alpha, exactly
    for &alpha in &[0.5, 1.0, 2.0] {
        let p1 = kendall_pair_of(&MixtureMeasure::dirac(1.0), alpha, cfg)?;
        let pair = kendall_convolve(&p1, &p1)?;
        let mut worst = 0.0f64;
        for &t in &linspace(1.0f64, 50.0, 120) {
            let want = 1.0 - t.powf(-2.0 * alpha);
            worst = worst.max((pair.f(t)? - want).abs());
        }
        r.push(format!("kendall-exact/pareto-cdf/alpha={alpha}"), worst, 1e-9);
    }
    Ok(())
}

fn lom_suite(r: &mut Runner, family: Option<&Family<f64>>) -> Result<()> {
    let roster = match family {
        Some(f) => vec![f.clone()],
        None => vec![
            Family::Classical,
            Family::Stable { alpha: 2.0 },
            Family::Kendall { alpha: 1.0 },
            Family::Max,
            Family::Ku { alpha: 1.0, n: 2 },
            Family::Diamond { p: 0.5, alpha: 1.0 },
            Family::Kucharczak { a: 0.5, r: 1.0 },
        ],
    };
    let n = 20_000usize;
    let threshold = 4.0 / (n as f64).sqrt();
    for fam in roster {
        for &(x, y) in &[(0.3, 0.7), (0.7, 1.5), (0.3, 1.5)] {
            let case_seed = r.seed.wrapping_add(r.cases.len() as u64);
            let stat = fam.lom_residual(x, y, n, case_seed)?;
            r.push(format!("lom/residual/{fam}/x={x},y={y}"), stat, threshold);
        }
    }
    Ok(())
}

fn maxrep_suite(r: &mut Runner, family: Option<&Family<f64>>) -> Result<()> {
    let roster = match family {
        Some(f) => vec![f.clone()],
        None => vec![
            Family::Classical,
            Family::Stable { alpha: 2.0 },
            Family::Kendall { alpha: 1.0 },
            Family::Ku { alpha: 1.0, n: 2 },
        ],
    };
    let n = 20_000usize;
    let x1_law = DensityKind::Pareto { beta: 3.0 };
    let x2_law = DensityKind::Pow { alpha: 2.0 };
    for fam in roster {
        let mixing = fam.max_weak_rep_mixing_law()?;
        let rng = r.case_rng();
        let x1 = sample_base(&x1_law, n, &mut rng.substream(1))?.values;
        let x2 = sample_base(&x2_law, n, &mut rng.substream(2))?.values;
        let th1 = sample_measure(&mixing, n, &mut rng.substream(3))?;
        let th2 = sample_measure(&mixing, n, &mut rng.substream(4))?;
        let lhs: Vec<f64> = (0..n)
            .map(|i| (th1[i] * x1[i]).max(th2[i] * x2[i]))
            .collect();

        let y1 = sample_base(&x1_law, n, &mut rng.substream(5))?.values;
        let y2 = sample_base(&x2_law, n, &mut rng.substream(6))?.values;
        let th = sample_measure(&mixing, n, &mut rng.substream(7))?;
        let mut conv_rng = rng.substream(8);
        let mut rhs = Vec::with_capacity(n);
        for i in 0..n {
            rhs.push(th[i] * sample_family(&fam, y1[i], y2[i], &mut conv_rng)?);
        }
        let rep = ks_two_sample(&lhs, &rhs, 0.01)?;
        r.push_ks(format!("maxrep/two-sample/{fam}"), &rep);
    }
    Ok(())
}

fn weakstable_suite(r: &mut Runner, cfg: &QuadratureConfig<f64>) -> Result<()> {
    for &alpha in &[0.5, 1.0] {
        let wsd = WeakStableDensity::new(alpha, cfg)?;
        let mass = wsd.mass(cfg)?;
        r.push(
            format!("weakstable/unit-mass/alpha={alpha}"),
            (mass - 1.0).abs(),
            1e-6,
        );

        // transform recovery at a thinned grid; the acceptance battery runs
        // the full ladder. The slow power tail at alpha = 1/2 certifies to
        // about 1e-5, so the transform is asked for 1e-4 against its 1e-3
        // target.
        let loose = QuadratureConfig::default().with_abs_tol(1e-4);
        let mut worst = 0.0f64;
        for &xv in &[0.0, 0.5, 1.5] {
            let got = cosine_transform(|t| wsd.eval(t, cfg), xv, &loose)?;
            let want = (1.0 - xv.powf(alpha)).max(0.0);
            worst = worst.max((got - want).abs());
        }
        r.push(
            format!("weakstable/transform/alpha={alpha}"),
            worst,
            1e-3,
        );
    }

    // boundary of positive definiteness: the check must accept exponents up
    // to one and reject those beyond
    let grid = linspace(0.0, 4.0, 81);
    let mut mismatches = 0u32;
    for &(alpha, want_ok) in &[
        (0.25, true),
        (0.5, true),
        (1.0, true),
        (1.25, false),
        (2.0, false),
    ] {
        let rep = polya_check(&Family::Kendall { alpha }, &grid)?;
        if rep.ok != want_ok {
            mismatches += 1;
        }
    }
    r.push("weakstable/polya-boundary".to_string(), mismatches as f64, 0.5);
    Ok(())
}

fn orderstat_suite(r: &mut Runner, cfg: &QuadratureConfig<f64>) -> Result<()> {
    for &(alpha, k, n) in &[(1.0, 1u32, 1u32), (1.0, 2, 3), (2.0, 3, 3)] {
        let mut rng = r.case_rng();
        let law = DensityKind::Pareto { beta: alpha };
        let draws: Result<Vec<f64>> = (0..20_000)
            .map(|_| sample_order_stat(&law, k as usize, (n + k) as usize, &mut rng))
            .collect();
        let density = DensityKind::KuOrderstat { alpha, k, n };
        let rep = ks_against_density(&draws?, &density, 0.01, cfg)?;
        r.push_ks(format!("orderstat/ks/alpha={alpha},k={k},n={n}"), &rep);
    }
    Ok(())
}

fn normalization_suite(r: &mut Runner, cfg: &QuadratureConfig<f64>) -> Result<()> {
    for &p in &[0.2, 0.5, 0.9] {
        for &alpha in &[0.5, 1.0, 2.0] {
            let mass = DensityKind::DiamondTail { p, alpha }.mass(cfg)?;
            r.push(
                format!("normalization/diamond-tail/p={p},alpha={alpha}"),
                (mass - 1.0).abs(),
                1e-9,
            );
        }
    }

    let mass = DensityKind::Kucharczak {
        a: 0.5,
        r: 1.0,
        x: 1.0,
        y: 1.0,
    }
    .mass(cfg)?;
    r.push(
        "normalization/kucharczak/a=0.5,r=1,x=1,y=1".to_string(),
        (mass - 1.0).abs(),
        1e-6,
    );

    // the five admissible parameter cases at p = 2, alpha = 1
    let grid = linspace(0.0, 1.0, 21);
    for &c in &[1.0, 1.0 / 3.0, 0.0, 0.5, 0.4] {
        let fam = Family::KendallType { c, alpha: 1.0, p: 2.0 };
        let defect = fam.convex_decomposition()?.weight_sum_defect(&grid);
        r.push(
            format!("normalization/kendall-type-weights/c={c}"),
            defect,
            1e-12,
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig<f64> {
        QuadratureConfig::default()
    }

    #[test]
    fn suite_names_round_trip() {
        for s in SuiteName::ALL {
            assert_eq!(SuiteName::parse(s.as_str()), Some(s));
        }
        assert_eq!(SuiteName::parse("nonsense"), None);
    }

    #[test]
    fn every_suite_passes_on_its_default_roster() {
        for name in SuiteName::ALL {
            let rep = run_suite(name, None, 20_260_816, &cfg()).unwrap();
            let failing: Vec<&CaseReport> = rep.cases.iter().filter(|c| !c.pass).collect();
            assert!(
                rep.pass,
                "suite {name}: {} failing cases: {:?}",
                failing.len(),
                failing
            );
        }
    }

    #[test]
    fn suite_reports_are_deterministic() {
        let a = run_suite(SuiteName::Maxrep, None, 7, &cfg()).unwrap();
        let b = run_suite(SuiteName::Maxrep, None, 7, &cfg()).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn family_filter_restricts_the_roster() {
        let fam = Family::Stable { alpha: 2.0 };
        let rep = run_suite(SuiteName::Axioms, Some(&fam), 7, &cfg()).unwrap();
        assert!(rep.pass);
        assert!(rep.cases.iter().all(|c| c.id.contains("stable")));
        // five axiom cases for a single monotonic family
        assert_eq!(rep.cases.len(), 5);
    }

    #[test]
    fn kingman_monotonicity_is_reported_as_expected_false() {
        let fam = Family::Kingman { s: 0.5 };
        let rep = run_suite(SuiteName::Axioms, Some(&fam), 11, &cfg()).unwrap();
        let case = rep
            .cases
            .iter()
            .find(|c| c.id.contains("monotonicity"))
            .unwrap();
        assert!(case.id.contains("expected-left-mass"));
        assert!(case.pass, "z = {}", case.statistic);
        assert!(rep.pass);
    }
}
