//! Harmonic / first kind / second kind classification of meridian surfaces
//! and the geometric side properties attached to each case.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::SurfaceKind;
use crate::error::{Error, Result};
use crate::grid::SampleGrid;
use crate::minkowski::{Bivector, SpacetimeVector};
use crate::surface::{laplacian_from, mean_curvature_from, MeridianSurface, PointData};

/// Tolerance ladder. Every field can be overridden from a tolerance file.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub harmonic: f64,
    pub proportionality: f64,
    pub c_constancy: f64,
    pub side_property: f64,
    /// Max deviation accepted when detecting `kappa` const, `g' = 0`, `kappa_m = 0`, `f kappa_m` const.
    pub case_detection: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { harmonic: 1e-6, proportionality: 1e-5, c_constancy: 1e-6, side_property: 1e-6, case_detection: 1e-6 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("harmonic", self.harmonic),
            ("proportionality", self.proportionality),
            ("c_constancy", self.c_constancy),
            ("side_property", self.side_property),
            ("case_detection", self.case_detection),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(name, format!("tolerance must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Harmonic,
    FirstKind,
    SecondKind,
    None,
}

/// Closed forms of `lambda` used when extracting `C`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "formula", rename_all = "snake_case")]
pub enum LambdaFormula {
    /// `(kappa^2 + 1) / f^2` (elliptic), `(1 - kappa^2) / f^2` (hyperbolic): `g' = 0` or a straight profile.
    Linear,
    /// `kappa = 0` with `g' != 0`.
    KappaZero,
    /// `kappa` const and `f kappa_m = a`.
    ConstantQ { a: f64 },
    /// Any `g' != 0`.
    GeneralCaseII,
    /// `<Delta G, G>`, the first-kind value.
    Projection,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Check {
    pub holds: bool,
    pub defect: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LambdaSample {
    pub u: f64,
    pub v: f64,
    pub lambda: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SecondKindExtract {
    pub c_estimate: Bivector,
    pub constancy_defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SideFlag {
    pub holds: bool,
    pub defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hyperplane {
    #[serde(rename = "E3")]
    E3,
    #[serde(rename = "E31")]
    E31,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperplaneCheck {
    pub target: Hyperplane,
    pub holds: bool,
    pub theta: f64,
    /// The constant normal: `n` for `E31`, `n_perp` for `E3`.
    pub normal: SpacetimeVector,
    /// Max of the normal's variation and of `|<z - z0, N>|`.
    pub defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperplaneFlag {
    pub holds: bool,
    pub theta: Option<f64>,
    pub defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SideProperties {
    pub marginally_trapped: SideFlag,
    pub developable: SideFlag,
    #[serde(rename = "hyperplane_E3")]
    pub hyperplane_e3: HyperplaneFlag,
    #[serde(rename = "hyperplane_E31")]
    pub hyperplane_e31: HyperplaneFlag,
}

/// Max deviations behind the case split.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetectedCase {
    pub kappa_mean: f64,
    pub kappa_deviation: f64,
    pub g_prime_max: f64,
    pub g_prime_mean: f64,
    pub kappa_m_max: f64,
    pub q_mean: f64,
    pub q_deviation: f64,
    pub kappa_constant: bool,
    pub kappa_zero: bool,
    pub g_prime_zero: bool,
    pub straight_profile: bool,
    pub q_constant: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationVerdict {
    pub kind: SurfaceKind,
    pub category: Category,
    pub matched_theorem_case: Option<String>,
    pub harmonic_defect: f64,
    pub lambda_formula: Option<LambdaFormula>,
    pub lambda_samples: Vec<LambdaSample>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    /// `max |Delta G - lambda (G + C)|`, with `C = 0` for the first kind.
    pub proportionality_residual: Option<f64>,
    #[serde(rename = "c_estimate")]
    pub c_estimate: Bivector,
    #[serde(rename = "c_constancy_defect")]
    pub c_constancy_defect: f64,
    pub detected: DetectedCase,
    pub side_properties: SideProperties,
    pub tolerances: Tolerances,
    pub notes: Vec<String>,
}

/// Quantities at one grid point, computed once per classification.
#[derive(Clone, Copy, Debug)]
struct Sample {
    u: f64,
    v: f64,
    data: PointData,
    gauss: Bivector,
    laplacian: Bivector,
    point: SpacetimeVector,
}

fn evaluate(s: &MeridianSurface, grid: &SampleGrid) -> Result<Vec<Sample>> {
    grid.points()
        .into_par_iter()
        .map(|(u, v)| {
            let data = s.point_data(u, v)?;
            Ok(Sample {
                u,
                v,
                data,
                gauss: data.frame.x.wedge(&data.frame.y),
                laplacian: laplacian_from(s.kind(), &data),
                point: s.immersion(u, v)?,
            })
        })
        .collect()
}

fn max_by(samples: &[Sample], f: impl Fn(&Sample) -> f64) -> f64 {
    samples.iter().map(f).fold(0.0, f64::max)
}

fn mean_by(samples: &[Sample], f: impl Fn(&Sample) -> f64) -> f64 {
    samples.iter().map(f).sum::<f64>() / samples.len() as f64
}

pub fn is_harmonic(s: &MeridianSurface, grid: &SampleGrid, tol: f64) -> Result<Check> {
    let samples = evaluate(s, grid)?;
    Ok(harmonic_of(&samples, tol))
}

fn harmonic_of(samples: &[Sample], tol: f64) -> Check {
    let defect = max_by(samples, |p| p.laplacian.max_abs());
    Check { holds: defect <= tol, defect }
}

/// `lambda = <Delta G, G>` and the residual `|Delta G - lambda G|`.
pub fn first_kind_residual(s: &MeridianSurface, u: f64, v: f64) -> Result<(f64, f64)> {
    let lap = s.laplacian_closed(u, v)?;
    let g = s.gauss_map(u, v)?;
    let lambda = lap.dot(&g);
    Ok((lambda, lap.max_abs_diff(&(lambda * g))))
}

/// `lambda` if `Delta G = lambda G` holds at the point within `tol` with `|lambda| > tol`.
pub fn first_kind_lambda(s: &MeridianSurface, u: f64, v: f64, tol: f64) -> Result<Option<f64>> {
    let (lambda, residual) = first_kind_residual(s, u, v)?;
    Ok((residual <= tol && lambda.abs() > tol).then_some(lambda))
}

pub fn lambda_value(kind: SurfaceKind, formula: LambdaFormula, p: &PointData, laplacian: &Bivector, gauss: &Bivector) -> f64 {
    let j = &p.jet;
    let (f, df, dg, dq) = (j.f, j.df, j.dg, j.d_f_kappa_m);
    let q = f * j.kappa_m;
    let k2 = p.kappa * p.kappa;
    let f2 = f * f;
    let ell = kind == SurfaceKind::Elliptic;
    match formula {
        LambdaFormula::Linear => (if ell { k2 + 1.0 } else { 1.0 - k2 }) / f2,
        LambdaFormula::KappaZero => {
            let m = if ell { 1.0 - q * q } else { 1.0 + q * q };
            (dg * m - f * df * dq) / (dg * f2)
        }
        LambdaFormula::ConstantQ { a } => (if ell { 1.0 + k2 - a * a } else { 1.0 - k2 + a * a }) / f2,
        LambdaFormula::GeneralCaseII => {
            let m = if ell { 1.0 + k2 - q * q } else { 1.0 - k2 + q * q };
            (dg * m - f * df * dq) / (dg * f2)
        }
        LambdaFormula::Projection => laplacian.dot(gauss),
    }
}

/// `C = Delta G / lambda - G` in ambient coordinates, its grid mean and max deviation.
pub fn second_kind_extract(s: &MeridianSurface, grid: &SampleGrid, formula: LambdaFormula, tol: f64) -> Result<SecondKindExtract> {
    let samples = evaluate(s, grid)?;
    extract_of(s.kind(), &samples, formula, tol).map(|(e, _)| e)
}

fn extract_of(kind: SurfaceKind, samples: &[Sample], formula: LambdaFormula, tol: f64) -> Result<(SecondKindExtract, Vec<f64>)> {
    let mut lambdas = Vec::with_capacity(samples.len());
    let mut cs = Vec::with_capacity(samples.len());
    for p in samples {
        let lambda = lambda_value(kind, formula, &p.data, &p.laplacian, &p.gauss);
        if !(lambda.abs() >= tol) {
            return Err(Error::SingularLambda { u: p.u, v: p.v, value: lambda.abs() });
        }
        lambdas.push(lambda);
        cs.push(p.laplacian * (1.0 / lambda) - p.gauss);
    }
    let mean = cs.iter().fold(Bivector::ZERO, |acc, c| acc + *c) * (1.0 / cs.len() as f64);
    let defect = cs.iter().map(|c| c.max_abs_diff(&mean)).fold(0.0, f64::max);
    Ok((SecondKindExtract { c_estimate: mean, constancy_defect: defect }, lambdas))
}

pub fn marginally_trapped_check(s: &MeridianSurface, grid: &SampleGrid, tol: f64) -> Result<SideFlag> {
    Ok(trapped_of(s.kind(), &evaluate(s, grid)?, tol))
}

fn trapped_of(kind: SurfaceKind, samples: &[Sample], tol: f64) -> SideFlag {
    let hs: Vec<SpacetimeVector> = samples.iter().map(|p| mean_curvature_from(kind, &p.data)).collect();
    let defect = hs.iter().map(|h| h.norm_sqr().abs()).fold(0.0, f64::max);
    let min_norm = hs.iter().map(|h| h.max_abs()).fold(f64::INFINITY, f64::min);
    let holds = defect <= tol && min_norm > tol;
    let note = (!holds && min_norm <= tol).then(|| format!("H vanishes somewhere (min |H| = {min_norm:e})"));
    SideFlag { holds, defect: Some(defect), note }
}

/// Step of the `u` differences of the normal fields.
pub const DEVELOPABLE_STEP: f64 = 1e-4;

pub fn developable_check(s: &MeridianSurface, grid: &SampleGrid, tol: f64) -> Result<SideFlag> {
    let samples = evaluate(s, grid)?;
    developable_of(s, &samples, tol, tol)
}

fn developable_of(s: &MeridianSurface, samples: &[Sample], tol: f64, straight_tol: f64) -> Result<SideFlag> {
    let km = max_by(samples, |p| p.data.jet.kappa_m.abs());
    if km > straight_tol {
        return Ok(SideFlag { holds: false, defect: None, note: Some(format!("profile is not straight (max |kappa_m| = {km:e})")) });
    }
    let (u0, u1) = s.u_domain();
    let h = DEVELOPABLE_STEP;
    let defects = samples
        .par_iter()
        .map(|p| {
            let (a, b) = ((p.u - h).max(u0), (p.u + h).min(u1));
            let fa = s.frame(a, p.v)?;
            let fb = s.frame(b, p.v)?;
            let w = 1.0 / (b - a);
            Ok(((fb.n1 - fa.n1) * w).max_abs().max(((fb.n2 - fa.n2) * w).max_abs()))
        })
        .collect::<Result<Vec<f64>>>()?;
    let defect = defects.into_iter().fold(0.0, f64::max);
    Ok(SideFlag { holds: defect <= tol, defect: Some(defect), note: None })
}

/// Rotation angle making the target's normal constant on a straight profile
/// with slope `g' = b` over a base curve of constant curvature `kappa`.
pub fn hyperplane_theta(kind: SurfaceKind, kappa: f64, b: f64, target: Hyperplane) -> Result<f64> {
    let (alpha, beta) = match kind {
        SurfaceKind::Elliptic => (-kappa, b),
        SurfaceKind::Hyperbolic => (b, -kappa),
    };
    // d n / dv ~ (alpha cosh + beta sinh) y, d n_perp / dv ~ (alpha sinh + beta cosh) y
    let (num, den) = match target {
        Hyperplane::E31 => (-alpha, beta),
        Hyperplane::E3 => (-beta, alpha),
    };
    let r = num / den;
    let arg = (1.0 + r) / (1.0 - r);
    if !(arg > 0.0) || !arg.is_finite() {
        return Err(Error::Regime(format!(
            "log argument {arg} is not positive and finite for {target:?} with kappa = {kappa}, g' = {b}"
        )));
    }
    Ok(0.5 * arg.ln())
}

pub fn hyperplane_check(s: &MeridianSurface, grid: &SampleGrid, target: Hyperplane, tol: f64) -> Result<HyperplaneCheck> {
    let samples = evaluate(s, grid)?;
    hyperplane_of(s.kind(), &samples, target, tol, tol)
}

fn hyperplane_of(kind: SurfaceKind, samples: &[Sample], target: Hyperplane, tol: f64, case_tol: f64) -> Result<HyperplaneCheck> {
    let km = max_by(samples, |p| p.data.jet.kappa_m.abs());
    let kappa = mean_by(samples, |p| p.data.kappa);
    let kdev = max_by(samples, |p| (p.data.kappa - kappa).abs());
    if km > case_tol || kdev > case_tol {
        return Err(Error::Regime(format!(
            "hyperplane rule needs a straight profile and constant kappa (max |kappa_m| = {km:e}, kappa deviation = {kdev:e})"
        )));
    }
    let b = mean_by(samples, |p| p.data.jet.dg);
    let theta = hyperplane_theta(kind, kappa, b, target)?;
    let (ch, sh) = (theta.cosh(), theta.sinh());
    let normal_at = |p: &Sample| match target {
        Hyperplane::E31 => ch * p.data.frame.n1 + sh * p.data.frame.n2,
        Hyperplane::E3 => sh * p.data.frame.n1 + ch * p.data.frame.n2,
    };
    let n0 = normal_at(&samples[0]);
    let z0 = samples[0].point;
    let defect = samples
        .iter()
        .map(|p| (normal_at(p) - n0).max_abs().max((p.point - z0).dot(&n0).abs()))
        .fold(0.0, f64::max);
    Ok(HyperplaneCheck { target, holds: defect <= tol, theta, normal: n0, defect })
}

fn detect(samples: &[Sample], tol: f64) -> DetectedCase {
    let kappa_mean = mean_by(samples, |p| p.data.kappa);
    let kappa_deviation = max_by(samples, |p| (p.data.kappa - kappa_mean).abs());
    let g_prime_max = max_by(samples, |p| p.data.jet.dg.abs());
    let g_prime_mean = mean_by(samples, |p| p.data.jet.dg);
    let kappa_m_max = max_by(samples, |p| p.data.jet.kappa_m.abs());
    let q = |p: &Sample| p.data.jet.f * p.data.jet.kappa_m;
    let q_mean = mean_by(samples, q);
    let q_deviation = max_by(samples, |p| (q(p) - q_mean).abs());
    let kappa_constant = kappa_deviation <= tol;
    DetectedCase {
        kappa_mean,
        kappa_deviation,
        g_prime_max,
        g_prime_mean,
        kappa_m_max,
        q_mean,
        q_deviation,
        kappa_constant,
        kappa_zero: kappa_constant && kappa_mean.abs() <= tol,
        g_prime_zero: g_prime_max <= tol,
        straight_profile: kappa_m_max <= tol,
        q_constant: q_deviation <= tol && q_mean.abs() > tol,
    }
}

fn theorem(kind: SurfaceKind, section: u8, case: Option<&str>) -> String {
    let number = match (section, kind) {
        (4, SurfaceKind::Elliptic) => "4.1",
        (4, SurfaceKind::Hyperbolic) => "4.2",
        (5, SurfaceKind::Elliptic) => "5.1",
        (5, SurfaceKind::Hyperbolic) => "5.2",
        (_, SurfaceKind::Elliptic) => "6.1",
        (_, SurfaceKind::Hyperbolic) => "6.2",
    };
    match case {
        Some(c) => format!("Thm {number}({c})"),
        None => format!("Thm {number}"),
    }
}

fn second_kind_candidates(d: &DetectedCase) -> Vec<(LambdaFormula, Option<&'static str>)> {
    let mut out = Vec::new();
    if d.g_prime_zero {
        if d.kappa_constant {
            out.push((LambdaFormula::Linear, Some("i")));
        }
        return out;
    }
    if d.straight_profile {
        out.push((LambdaFormula::Linear, Some("ii")));
    }
    if d.kappa_zero {
        out.push((LambdaFormula::KappaZero, Some("iii")));
    }
    if d.kappa_constant && !d.kappa_zero && d.q_constant {
        out.push((LambdaFormula::ConstantQ { a: d.q_mean }, None));
    }
    out.push((LambdaFormula::GeneralCaseII, None));
    out
}

fn side_properties(s: &MeridianSurface, samples: &[Sample], tol: &Tolerances, notes: &mut Vec<String>) -> SideProperties {
    let kind = s.kind();
    let developable = developable_of(s, samples, tol.side_property, tol.case_detection).unwrap_or_else(|e| {
        notes.push(format!("developable: {e}"));
        SideFlag { holds: false, defect: None, note: Some(e.to_string()) }
    });
    let hyper = |target| match hyperplane_of(kind, samples, target, tol.side_property, tol.case_detection) {
        Ok(c) => HyperplaneFlag { holds: c.holds, theta: Some(c.theta), defect: Some(c.defect), note: None },
        Err(e) => HyperplaneFlag { holds: false, theta: None, defect: None, note: Some(e.to_string()) },
    };
    SideProperties {
        marginally_trapped: trapped_of(kind, samples, tol.side_property),
        developable,
        hyperplane_e3: hyper(Hyperplane::E3),
        hyperplane_e31: hyper(Hyperplane::E31),
    }
}

/// Runs harmonic, first kind and second kind in that order and attaches the side properties.
pub fn classify_surface(s: &MeridianSurface, grid: &SampleGrid, tol: &Tolerances) -> Result<ClassificationVerdict> {
    tol.validate()?;
    let samples = evaluate(s, grid)?;
    if samples.is_empty() {
        return Err(Error::Domain("empty classification grid".into()));
    }
    let kind = s.kind();
    let detected = detect(&samples, tol.case_detection);
    let mut notes = Vec::new();
    let side_properties = side_properties(s, &samples, tol, &mut notes);
    let harmonic = harmonic_of(&samples, tol.harmonic);
    let mut verdict = ClassificationVerdict {
        kind,
        category: Category::None,
        matched_theorem_case: None,
        harmonic_defect: harmonic.defect,
        lambda_formula: None,
        lambda_samples: Vec::new(),
        lambda_min: None,
        lambda_max: None,
        proportionality_residual: None,
        c_estimate: Bivector::ZERO,
        c_constancy_defect: 0.0,
        detected,
        side_properties,
        tolerances: *tol,
        notes,
    };
    if harmonic.holds {
        verdict.category = Category::Harmonic;
        verdict.matched_theorem_case = Some(match kind {
            SurfaceKind::Elliptic => theorem(kind, 4, None),
            SurfaceKind::Hyperbolic => theorem(kind, 4, Some(if detected.g_prime_zero { "i" } else { "ii" })),
        });
        return Ok(verdict);
    }

    let first: Vec<(f64, f64)> = samples
        .iter()
        .map(|p| {
            let lambda = p.laplacian.dot(&p.gauss);
            (lambda, p.laplacian.max_abs_diff(&(lambda * p.gauss)))
        })
        .collect();
    let residual = first.iter().map(|r| r.1).fold(0.0, f64::max);
    let is_first = first.iter().all(|&(l, r)| r <= tol.proportionality && l.abs() > tol.proportionality);
    if is_first {
        let (extract, lambdas) = extract_of(kind, &samples, LambdaFormula::Projection, tol.proportionality)?;
        let c_size = samples
            .iter()
            .zip(&lambdas)
            .map(|(p, l)| (p.laplacian * (1.0 / l) - p.gauss).max_abs())
            .fold(0.0, f64::max);
        verdict.category = Category::FirstKind;
        verdict.matched_theorem_case = Some(match kind {
            SurfaceKind::Elliptic => theorem(kind, 5, None),
            SurfaceKind::Hyperbolic => theorem(kind, 5, Some(if detected.kappa_zero { "i" } else { "ii" })),
        });
        verdict.lambda_formula = Some(LambdaFormula::Projection);
        set_lambdas(&mut verdict, &samples, &lambdas);
        verdict.proportionality_residual = Some(residual);
        verdict.c_estimate = extract.c_estimate;
        verdict.c_constancy_defect = c_size;
        return Ok(verdict);
    }

    let mut best: Option<(SecondKindExtract, Vec<f64>, LambdaFormula)> = None;
    for (formula, case) in second_kind_candidates(&detected) {
        let (extract, lambdas) = match extract_of(kind, &samples, formula, tol.proportionality) {
            Ok(r) => r,
            Err(e) => {
                verdict.notes.push(format!("{formula:?}: {e}"));
                continue;
            }
        };
        let nonzero = extract.c_estimate.max_abs() > tol.c_constancy;
        if extract.constancy_defect <= tol.c_constancy && nonzero {
            verdict.category = Category::SecondKind;
            verdict.matched_theorem_case = case.map(|c| theorem(kind, 6, Some(c)));
            if case.is_none() {
                verdict.notes.push(format!("constant C found with {formula:?} outside the listed cases"));
            }
            verdict.proportionality_residual = Some(
                samples
                    .iter()
                    .zip(&lambdas)
                    .map(|(p, l)| p.laplacian.max_abs_diff(&(*l * (p.gauss + extract.c_estimate))))
                    .fold(0.0, f64::max),
            );
            best = Some((extract, lambdas, formula));
            break;
        }
        if best.as_ref().is_none_or(|b| extract.constancy_defect < b.0.constancy_defect) {
            best = Some((extract, lambdas, formula));
        }
    }
    if let Some((extract, lambdas, formula)) = best {
        verdict.lambda_formula = Some(formula);
        set_lambdas(&mut verdict, &samples, &lambdas);
        verdict.c_estimate = extract.c_estimate;
        verdict.c_constancy_defect = extract.constancy_defect;
    }
    Ok(verdict)
}

fn set_lambdas(verdict: &mut ClassificationVerdict, samples: &[Sample], lambdas: &[f64]) {
    verdict.lambda_samples = samples.iter().zip(lambdas).map(|(p, &lambda)| LambdaSample { u: p.u, v: p.v, lambda }).collect();
    verdict.lambda_min = lambdas.iter().copied().reduce(f64::min);
    verdict.lambda_max = lambdas.iter().copied().reduce(f64::max);
}
