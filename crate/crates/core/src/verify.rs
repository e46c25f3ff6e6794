//! Acceptance suites: numbered criteria, each a list of bounded checks.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{
    developable_check, hyperplane_check, is_harmonic, marginally_trapped_check, second_kind_extract, Hyperplane, LambdaFormula,
};
use crate::curves::{integrate_spherical, make_profile, Curvature, SphericalCurveSpec, SurfaceKind};
use crate::error::Result;
use crate::grid::{GridSpec, SampleGrid};
use crate::minkowski::Bivector;
use crate::ode::{constant_q_profile, solve_first_kind};
use crate::oracle::{compare_laplacians, laplacian_fd};
use crate::polynomial::Polynomial;
use crate::surface::MeridianSurface;

/// Seed of every randomized criterion.
pub const SEED: u64 = 0x6d65_7269_6469_616e;

pub const DEFAULT_H: f64 = 1e-3;

/// Finer step of the halving pair used for the observed order.
pub const ORDER_H: f64 = 2e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Harmonic,
    First,
    Second,
    Oracle,
}

impl Suite {
    pub fn criteria(self) -> &'static [u8] {
        match self {
            Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9],
            Suite::Harmonic => &[2, 3],
            Suite::First => &[4, 5],
            Suite::Second => &[6, 7, 8],
            Suite::Oracle => &[1, 9],
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "all" => Suite::All,
            "harmonic" => Suite::Harmonic,
            "first" => Suite::First,
            "second" => Suite::Second,
            "oracle" => Suite::Oracle,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "relation", rename_all = "snake_case")]
pub enum Bound {
    AtMost { bound: f64 },
    AtLeast { bound: f64 },
    Within { lo: f64, hi: f64 },
}

impl Bound {
    fn holds(&self, v: f64) -> bool {
        match *self {
            Bound::AtMost { bound } => v <= bound,
            Bound::AtLeast { bound } => v >= bound,
            Bound::Within { lo, hi } => v >= lo && v <= hi,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Bound::AtMost { bound } => write!(f, "<= {bound:e}"),
            Bound::AtLeast { bound } => write!(f, ">= {bound:e}"),
            Bound::Within { lo, hi } => write!(f, "in [{lo}, {hi}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub label: String,
    pub value: f64,
    #[serde(flatten)]
    pub bound: Bound,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CriterionOutcome {
    /// One-line summary, e.g. `[PASS] 4 Theorem 5.2(ii) anchor`.
    pub fn summary_line(&self) -> String {
        let worst = self.checks.iter().find(|c| !c.passed).or(self.checks.first());
        let detail = match (&self.error, worst) {
            (Some(e), _) => format!("error: {e}"),
            (None, Some(c)) => format!("{} = {:e} ({})", c.label, c.value, c.bound),
            (None, None) => "no checks".into(),
        };
        format!("[{}] {} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.title, detail)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub criteria: Vec<CriterionOutcome>,
}

struct Checks(Vec<CheckOutcome>);

impl Checks {
    fn new() -> Self {
        Checks(Vec::new())
    }

    fn push(&mut self, label: impl Into<String>, value: f64, bound: Bound) {
        let passed = bound.holds(value);
        self.0.push(CheckOutcome { label: label.into(), value, bound, passed });
    }

    fn at_most(&mut self, label: impl Into<String>, value: f64, bound: f64) {
        self.push(label, value, Bound::AtMost { bound });
    }

    fn at_least(&mut self, label: impl Into<String>, value: f64, bound: f64) {
        self.push(label, value, Bound::AtLeast { bound });
    }
}

pub const TITLES: [&str; 9] = [
    "Oracle agreement",
    "Theorem 4.1 (harmonic, elliptic)",
    "Theorem 4.2(ii) (harmonic, hyperbolic)",
    "Theorem 5.2(ii) anchor",
    "Theorem 5.1 / 5.2(i) ODE profiles",
    "Theorem 6.1(i) anchor",
    "Theorem 6.1(ii) / 6.2(ii) linear profiles",
    "Nonexistence for constant f kappa_m",
    "Frame equations",
];

pub fn run_criterion(id: u8) -> CriterionOutcome {
    let title = TITLES.get(id as usize - 1).copied().unwrap_or("unknown");
    let result = match id {
        1 => oracle_agreement(),
        2 => theorem_4_1(),
        3 => theorem_4_2(),
        4 => theorem_5_2_anchor(),
        5 => first_kind_ode(),
        6 => theorem_6_1_anchor().map(|(c, _)| c),
        7 => linear_profiles(),
        8 => nonexistence(),
        9 => frame_equations(),
        _ => Ok(Checks::new()),
    };
    match result {
        Ok(Checks(checks)) => CriterionOutcome { id, title, passed: !checks.is_empty() && checks.iter().all(|c| c.passed), checks, error: None },
        Err(e) => CriterionOutcome { id, title, passed: false, checks: Vec::new(), error: Some(e.to_string()) },
    }
}

pub fn run_suite(suite: Suite) -> SuiteReport {
    let criteria: Vec<CriterionOutcome> = suite.criteria().iter().map(|&id| run_criterion(id)).collect();
    SuiteReport { suite, passed: criteria.iter().all(|c| c.passed), criteria }
}

fn default_grid(s: &MeridianSurface) -> Result<SampleGrid> {
    SampleGrid::resolve(&GridSpec::default(), s.u_domain(), s.v_domain())
}

fn surface(kind: SurfaceKind, phi: Polynomial, f0: f64, g0: f64, u: (f64, f64), kappa: Curvature, v: (f64, f64)) -> Result<MeridianSurface> {
    let p = make_profile(kind, phi, f0, g0, u)?;
    let c = integrate_spherical(SphericalCurveSpec::new(kind, kappa, v))?;
    MeridianSurface::new(p, c)
}

fn constant_kappa_surface(kind: SurfaceKind, phi: Vec<f64>, f0: f64, u: (f64, f64), kappa: f64) -> Result<MeridianSurface> {
    surface(kind, Polynomial::new(phi), f0, 0.0, u, Curvature::Constant(kappa), (0.0, 2.0))
}

/// Slope angle of degree <= 3, constant kappa in [-3, 3], f0 in [1.5, 3] on `u in [0, 1]`.
pub fn random_surface(rng: &mut ChaCha8Rng, kind: SurfaceKind, polynomial_kappa: bool) -> Result<MeridianSurface> {
    let degree = rng.random_range(0..=3usize);
    let mut coeffs = vec![rng.random_range(-1.0..1.0)];
    coeffs.extend((0..degree).map(|_| rng.random_range(-0.5..0.5)));
    let f0 = rng.random_range(1.5..3.0);
    let kappa = if polynomial_kappa {
        Curvature::Polynomial(Polynomial::new((0..3).map(|_| rng.random_range(-1.0..1.0)).collect()))
    } else {
        Curvature::Constant(rng.random_range(-3.0..3.0))
    };
    surface(kind, Polynomial::new(coeffs), f0, 0.0, (0.0, 1.0), kappa, (0.0, 2.0))
}

fn max_f(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn min_f(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, f64::min)
}

fn oracle_agreement() -> Result<Checks> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut c = Checks::new();
    for kind in [SurfaceKind::Elliptic, SurfaceKind::Hyperbolic] {
        let surfaces = (0..20).map(|_| random_surface(&mut rng, kind, false)).collect::<Result<Vec<_>>>()?;
        let rows = surfaces
            .par_iter()
            .map(|s| {
                let grid = default_grid(s)?;
                let fine = compare_laplacians(s, &grid, DEFAULT_H)?.max_defect;
                // at h = 1e-3 nearly harmonic surfaces already sit on the ~1e-9 noise floor
                let d2 = compare_laplacians(s, &grid, ORDER_H)?.max_defect;
                let d4 = compare_laplacians(s, &grid, 2.0 * ORDER_H)?.max_defect;
                Ok((fine, (d4 / d2).log2()))
            })
            .collect::<Result<Vec<(f64, f64)>>>()?;
        let name = kind.as_str();
        c.at_most(format!("{name}: max defect over 20 surfaces at h = 1e-3"), max_f(rows.iter().map(|r| r.0)), 1e-4);
        c.push(format!("{name}: min convergence order, h = 4e-3 -> 2e-3"), min_f(rows.iter().map(|r| r.1)), Bound::Within { lo: 1.8, hi: 2.2 });
        c.push(format!("{name}: max convergence order, h = 4e-3 -> 2e-3"), max_f(rows.iter().map(|r| r.1)), Bound::Within { lo: 1.8, hi: 2.2 });
    }
    Ok(c)
}

fn theorem_4_1() -> Result<Checks> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    let mut c = Checks::new();
    let mut plane = 0.0_f64;
    for _ in 0..5 {
        let f0 = rng.random_range(0.5..3.0);
        let s = surface(SurfaceKind::Elliptic, Polynomial::constant(0.0), f0, rng.random_range(-1.0..1.0), (0.0, 1.0), Curvature::Constant(0.0), (0.0, 3.0))?;
        plane = plane.max(is_harmonic(&s, &default_grid(&s)?, 1e-8)?.defect);
    }
    c.at_most("planes: max |Delta G|", plane, 1e-8);
    // each violator breaks one of kappa = 0, g' = 0, kappa_m = 0 (the last forces g' != 0 as well)
    let mut worst = f64::INFINITY;
    for i in 0..10 {
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let f0 = rng.random_range(1.0..3.0);
        let (phi, kappa) = match i % 3 {
            0 => (vec![0.0], sign * rng.random_range(0.5..2.0)),
            1 => (vec![sign * rng.random_range(0.3..1.0)], 0.0),
            _ => (vec![0.0, sign * rng.random_range(0.5..1.5)], 0.0),
        };
        let s = constant_kappa_surface(SurfaceKind::Elliptic, phi, f0, (0.0, 1.0), kappa)?;
        worst = worst.min(is_harmonic(&s, &default_grid(&s)?, 1e-8)?.defect);
    }
    c.at_least("10 violators: min of max |Delta G|", worst, 1e-3);
    Ok(c)
}

fn theorem_4_2() -> Result<Checks> {
    let mut c = Checks::new();
    let (mut lap, mut hh, mut dev, mut hnorm, mut coef): (f64, f64, f64, f64, f64) = (0.0, 0.0, 0.0, f64::INFINITY, 0.0);
    for a in [0.7, 1.0, 2.5] {
        for slope in [1.0, -1.0] {
            for kappa in [1.0, -1.0] {
                let s = surface(
                    SurfaceKind::Hyperbolic,
                    Polynomial::constant(FRAC_PI_2 * slope),
                    a,
                    0.3,
                    (0.0, 1.0),
                    Curvature::Constant(kappa),
                    (0.0, 2.0),
                )?;
                let grid = default_grid(&s)?;
                lap = lap.max(is_harmonic(&s, &grid, 1e-8)?.defect);
                let trapped = marginally_trapped_check(&s, &grid, 1e-10)?;
                hh = hh.max(trapped.defect.unwrap_or(f64::INFINITY));
                dev = dev.max(developable_check(&s, &grid, 1e-8)?.defect.unwrap_or(f64::INFINITY));
                for (u, v) in grid.points().into_iter().step_by(97) {
                    let h = s.mean_curvature_vector(u, v)?;
                    let fr = s.frame(u, v)?;
                    hnorm = hnorm.min(h.max_abs());
                    // H = -(1/2a)(g' n1 + kappa n2): both normal components have size 1/(2a)
                    coef = coef.max((h.dot(&fr.n1).abs() - 0.5 / a).abs()).max((h.dot(&fr.n2).abs() - 0.5 / a).abs());
                }
            }
        }
    }
    c.at_most("max |Delta G| over 12 surfaces", lap, 1e-8);
    c.at_most("max |<H, H>|", hh, 1e-10);
    c.at_least("min |H|_inf", hnorm, 1e-3);
    c.at_most("max | |<H, n_i>| - 1/(2a) |", coef, 1e-10);
    c.at_most("developability defect", dev, 1e-8);
    Ok(c)
}

fn theorem_5_2_anchor() -> Result<Checks> {
    let mut c = Checks::new();
    let s = constant_kappa_surface(SurfaceKind::Hyperbolic, vec![FRAC_PI_2], 1.0, (0.0, 1.0), 2.0)?;
    let grid = default_grid(&s)?;
    let points = grid.points();
    let rows = points
        .par_iter()
        .map(|&(u, v)| crate::classify::first_kind_residual(&s, u, v))
        .collect::<Result<Vec<_>>>()?;
    c.at_most("max |lambda + 3|", max_f(rows.iter().map(|r| (r.0 + 3.0).abs())), 1e-9);
    c.at_most("max |Delta G - lambda G|", max_f(rows.iter().map(|r| r.1)), 1e-8);
    let h = hyperplane_check(&s, &grid, Hyperplane::E31, 1e-8)?;
    c.at_most("|theta - ln(3)/2|", (h.theta - 0.5 * 3f64.ln()).abs(), 1e-14);
    c.at_most("E31 containment defect", h.defect, 1e-8);
    Ok(c)
}

fn first_kind_ode() -> Result<Checks> {
    let mut c = Checks::new();
    let cases = [
        (SurfaceKind::Elliptic, 1.0, 0.5, 0.0),
        (SurfaceKind::Elliptic, 1.5, -0.7, 0.4),
        (SurfaceKind::Elliptic, 2.0, 0.9, -0.3),
        (SurfaceKind::Hyperbolic, 1.0, 1.0, 0.2),
        (SurfaceKind::Hyperbolic, 1.5, 2.0, -0.3),
        (SurfaceKind::Hyperbolic, 2.0, -1.2, 0.5),
    ];
    let rows = cases
        .par_iter()
        .map(|&(kind, f0, phi0, p0)| {
            let sol = solve_first_kind(kind, f0, phi0, p0, (0.0, 1.0), 1e-3)?;
            let base = integrate_spherical(SphericalCurveSpec::new(kind, Curvature::Constant(0.0), (0.0, 2.0)))?;
            let s = MeridianSurface::new(sol.to_profile()?, base)?;
            let grid = default_grid(&s)?;
            let (mut residual, mut c_size, mut min_lambda, mut fd_residual): (f64, f64, f64, f64) = (0.0, 0.0, f64::INFINITY, 0.0);
            for (u, v) in grid.points() {
                let lap = s.laplacian_closed(u, v)?;
                let g = s.gauss_map(u, v)?;
                let lambda = lap.dot(&g);
                residual = residual.max(lap.max_abs_diff(&(lambda * g)));
                min_lambda = min_lambda.min(lambda.abs());
                c_size = c_size.max((lap * (1.0 / lambda) - g).max_abs());
                let fd = laplacian_fd(&s, u, v, DEFAULT_H)?;
                fd_residual = fd_residual.max(fd.max_abs_diff(&(lambda * g)));
            }
            Ok((sol.residual_max, residual, min_lambda, c_size, fd_residual))
        })
        .collect::<Result<Vec<_>>>()?;
    c.at_most("max ODE residual", max_f(rows.iter().map(|r| r.0)), 1e-6);
    c.at_most("max |Delta G - lambda G|", max_f(rows.iter().map(|r| r.1)), 1e-5);
    c.at_least("min |lambda|", min_f(rows.iter().map(|r| r.2)), 1e-5);
    c.at_most("max |C|", max_f(rows.iter().map(|r| r.3)), 1e-6);
    c.at_most("finite differences: max |Delta G - lambda G|", max_f(rows.iter().map(|r| r.4)), 1e-4);
    Ok(c)
}

/// Also returns the measured C-constancy noise floor.
fn theorem_6_1_anchor() -> Result<(Checks, f64)> {
    let mut c = Checks::new();
    // f = u + 1, g = 0 on [0.5, 1.5]
    let s = constant_kappa_surface(SurfaceKind::Elliptic, vec![0.0], 1.0, (0.5, 1.5), 2.0)?;
    let grid = default_grid(&s)?;
    let extract = second_kind_extract(&s, &grid, LambdaFormula::Linear, 1e-12)?;
    let (mut lambda_dev, mut formula_dev): (f64, f64) = (0.0, 0.0);
    for (u, v) in grid.points() {
        let p = s.point_data(u, v)?;
        let fr = p.frame;
        let lap = s.laplacian_closed(u, v)?;
        let g = s.gauss_map(u, v)?;
        let expected_c = -0.2 * (fr.x.wedge(&fr.y) + (2.0 * p.jet.df) * fr.y.wedge(&fr.n1));
        formula_dev = formula_dev.max(expected_c.max_abs_diff(&extract.c_estimate));
        let w = g + extract.c_estimate;
        let lambda = euclid(&lap, &w) / euclid(&w, &w);
        lambda_dev = lambda_dev.max((lambda * p.jet.f.powi(2) / 5.0 - 1.0).abs());
    }
    c.at_most("C constancy defect", extract.constancy_defect, 1e-6);
    c.at_most("max |C - (-1/5)(x^y + 2 f' y^n1)|", formula_dev, 1e-6);
    c.at_most("max |lambda f^2 / 5 - 1|", lambda_dev, 1e-6);
    Ok((c, extract.constancy_defect))
}

fn euclid(a: &Bivector, b: &Bivector) -> f64 {
    a.0.iter().zip(b.0.iter()).map(|(x, y)| x * y).sum()
}

fn linear_profiles() -> Result<Checks> {
    let mut c = Checks::new();
    let (mut trapped, mut hnorm, mut contain): (f64, f64, f64) = (0.0, f64::INFINITY, 0.0);
    // (kind, phi, b = g')
    let profiles = [(SurfaceKind::Elliptic, 0.75f64.asinh(), 0.75), (SurfaceKind::Hyperbolic, 0.8f64.asin(), 0.8)];
    for (kind, phi, b) in profiles {
        for kappa in [b, -b] {
            let s = constant_kappa_surface(kind, vec![phi], 1.0, (0.0, 1.0), kappa)?;
            let m = marginally_trapped_check(&s, &default_grid(&s)?, 1e-10)?;
            trapped = trapped.max(m.defect.unwrap_or(f64::INFINITY));
            let grid = default_grid(&s)?;
            hnorm = hnorm.min(min_f(grid.points().into_iter().step_by(101).map(|(u, v)| {
                s.mean_curvature_vector(u, v).map(|h| h.max_abs()).unwrap_or(0.0)
            })));
        }
        for kappa in [2.0, -2.0, 0.3, -0.3] {
            let s = constant_kappa_surface(kind, vec![phi], 1.0, (0.0, 1.0), kappa)?;
            let positive = kappa * kappa - b * b > 0.0;
            let target = match (kind, positive) {
                (SurfaceKind::Elliptic, true) | (SurfaceKind::Hyperbolic, false) => Hyperplane::E3,
                _ => Hyperplane::E31,
            };
            contain = contain.max(hyperplane_check(&s, &default_grid(&s)?, target, 1e-8)?.defect);
        }
    }
    c.at_most("kappa^2 = b^2: max |<H, H>|", trapped, 1e-10);
    c.at_least("kappa^2 = b^2: min |H|_inf", hnorm, 1e-3);
    c.at_most("kappa^2 != b^2: containment defect in predicted hyperplane", contain, 1e-8);
    Ok(c)
}

fn nonexistence() -> Result<Checks> {
    let (_, floor) = theorem_6_1_anchor()?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let mut c = Checks::new();
    for kind in [SurfaceKind::Elliptic, SurfaceKind::Hyperbolic] {
        let mut params = Vec::new();
        while params.len() < 10 {
            let kappa = rng.random_range(0.3..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let a = rng.random_range(0.4..0.8) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let lambda_num: f64 = match kind {
                SurfaceKind::Elliptic => 1.0 + kappa * kappa - a * a,
                SurfaceKind::Hyperbolic => 1.0 - kappa * kappa + a * a,
            };
            if lambda_num.abs() > 0.1 {
                params.push((kappa, a));
            }
        }
        let defects = params
            .par_iter()
            .map(|&(kappa, a)| {
                let (f0, phi0) = match kind {
                    SurfaceKind::Elliptic => (1.5, 0.6f64.copysign(a)),
                    SurfaceKind::Hyperbolic => (2.0, FRAC_PI_2),
                };
                let profile = constant_q_profile(kind, f0, phi0, a, (0.0, 1.0), 1e-3)?;
                let base = integrate_spherical(SphericalCurveSpec::new(kind, Curvature::Constant(kappa), (0.0, 2.0)))?;
                let s = MeridianSurface::new(profile, base)?;
                Ok(second_kind_extract(&s, &default_grid(&s)?, LambdaFormula::ConstantQ { a }, 1e-12)?.constancy_defect)
            })
            .collect::<Result<Vec<f64>>>()?;
        let worst = min_f(defects);
        c.at_least(format!("{}: min C constancy defect over 10 pairs", kind.as_str()), worst, 1e-2);
        c.at_least(format!("{}: min defect / noise floor {floor:.1e}", kind.as_str()), worst / floor.max(f64::MIN_POSITIVE), 100.0);
    }
    Ok(c)
}

fn frame_equations() -> Result<Checks> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    let mut c = Checks::new();
    for kind in [SurfaceKind::Elliptic, SurfaceKind::Hyperbolic] {
        let mut worst = [0.0_f64; 8];
        for i in 0..6 {
            let s = random_surface(&mut rng, kind, i % 2 == 1)?;
            let grid = SampleGrid::resolve(&GridSpec { nu: 7, nv: 7, margin: 0.02 }, s.u_domain(), s.v_domain())?;
            for (u, v) in grid.points() {
                let r = s.frame_equation_residuals(u, v, 1e-4)?;
                for k in 0..8 {
                    worst[k] = worst[k].max(r[k]);
                }
            }
        }
        for (k, name) in crate::surface::FRAME_EQUATION_NAMES.iter().enumerate() {
            c.at_most(format!("{}: {name}", kind.as_str()), worst[k], 1e-6);
        }
    }
    Ok(c)
}
