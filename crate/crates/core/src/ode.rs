//! Fixed-step RK4 solvers for the classifying profile ODEs.
//!
//! Every case is integrated in the state `(f, g, phi, q)` with `f' = cosh phi`,
//! `g' = sinh phi` (elliptic) or `f' = cos phi`, `g' = sin phi` (hyperbolic) and
//! `q = f phi' = f kappa_m`.
//!
//! * First kind: `f q' = f' g'`.
//! * Second kind: the literal equation is `(ln Phi)' = (ln g')'`, so `Phi = c g'`
//!   for a constant `c != 0`. Solving that relation for `q'` gives
//!   `q' = g' (f' + c (1 - q^2)) / (f (1 + c f'))` (elliptic) and
//!   `q' = g' (f' - c (1 + q^2)) / (f (1 - c f'))` (hyperbolic).
//!
//! Residuals are computed from the stored `(f, f', f'')` samples alone, using
//! the equations in their original `sqrt` form. See `docs/derivations.md`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::curves::{ProfileCurve, SurfaceKind};
use crate::error::{Error, OdeError, Result};
use crate::interp::{derivative_4th, UniformGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OdeCase {
    FirstElliptic,
    FirstHyperbolic,
    SecondElliptic,
    SecondHyperbolic,
}

impl OdeCase {
    pub const ALL: [OdeCase; 4] =
        [OdeCase::FirstElliptic, OdeCase::FirstHyperbolic, OdeCase::SecondElliptic, OdeCase::SecondHyperbolic];

    pub fn kind(self) -> SurfaceKind {
        match self {
            OdeCase::FirstElliptic | OdeCase::SecondElliptic => SurfaceKind::Elliptic,
            OdeCase::FirstHyperbolic | OdeCase::SecondHyperbolic => SurfaceKind::Hyperbolic,
        }
    }

    pub fn is_first_kind(self) -> bool {
        matches!(self, OdeCase::FirstElliptic | OdeCase::FirstHyperbolic)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OdeCase::FirstElliptic => "first_elliptic",
            OdeCase::FirstHyperbolic => "first_hyperbolic",
            OdeCase::SecondElliptic => "second_elliptic",
            OdeCase::SecondHyperbolic => "second_hyperbolic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        OdeCase::ALL.into_iter().find(|c| c.as_str() == s)
    }

    fn from_kind(kind: SurfaceKind, first: bool) -> Self {
        match (kind, first) {
            (SurfaceKind::Elliptic, true) => OdeCase::FirstElliptic,
            (SurfaceKind::Hyperbolic, true) => OdeCase::FirstHyperbolic,
            (SurfaceKind::Elliptic, false) => OdeCase::SecondElliptic,
            (SurfaceKind::Hyperbolic, false) => OdeCase::SecondHyperbolic,
        }
    }
}

/// Event-guard thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OdeOptions {
    pub f_min: f64,
    pub phi_bound: f64,
    pub q_bound: f64,
    pub min_abs_g_prime: f64,
    pub min_denominator: f64,
    /// Residual samples with `|g'|` below this are skipped.
    pub residual_g_prime_floor: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            f_min: 1e-6,
            phi_bound: 20.0,
            q_bound: 1e8,
            min_abs_g_prime: 1e-6,
            min_denominator: 1e-6,
            residual_g_prime_floor: 1e-3,
        }
    }
}

/// Initial data, as given by the caller.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum InitialData {
    FirstKind { f0: f64, phi0: f64, p0: f64 },
    SecondKind { f0: f64, df0: f64, d2f0: f64, c: f64 },
    ConstantQ { f0: f64, phi0: f64, a: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OdeSolution {
    pub case: OdeCase,
    pub initial: InitialData,
    pub u_span: (f64, f64),
    pub step: f64,
    pub u: Vec<f64>,
    pub f: Vec<f64>,
    pub df: Vec<f64>,
    pub d2f: Vec<f64>,
    /// Pointwise literal residual; `NaN` where skipped.
    pub residual: Vec<f64>,
    pub residual_max: f64,
    /// Second kind only: residual of the reduced equation for `q` by the same differences.
    pub first_integral_residual: Option<f64>,
    g: Vec<f64>,
    phi: Vec<f64>,
    q: Vec<f64>,
}

type State = [f64; 4];

fn rk4_step(rhs: &impl Fn(&State) -> State, y: &State, h: f64) -> State {
    let add = |a: &State, b: &State, s: f64| -> State { std::array::from_fn(|i| a[i] + s * b[i]) };
    let k1 = rhs(y);
    let k2 = rhs(&add(y, &k1, 0.5 * h));
    let k3 = rhs(&add(y, &k2, 0.5 * h));
    let k4 = rhs(&add(y, &k3, h));
    std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

enum Reduced {
    First,
    Second { c: f64 },
    ConstantQ,
}

struct Integration {
    grid: UniformGrid,
    states: Vec<State>,
}

fn check_state(kind: SurfaceKind, law: &Reduced, y: &State, u: f64, opts: &OdeOptions) -> Result<(), OdeError> {
    let [f, _, phi, q] = *y;
    if y.iter().any(|v| !v.is_finite()) {
        return Err(OdeError::BlowUp { u_stop: u, reason: "non-finite state".into() });
    }
    if f <= opts.f_min {
        return Err(OdeError::BlowUp { u_stop: u, reason: format!("f = {f:e} <= f_min = {:e}", opts.f_min) });
    }
    if phi.abs() > opts.phi_bound {
        return Err(OdeError::BlowUp { u_stop: u, reason: format!("|phi| = {} exceeds bound {}", phi.abs(), opts.phi_bound) });
    }
    if q.abs() > opts.q_bound {
        return Err(OdeError::BlowUp { u_stop: u, reason: format!("|f kappa_m| = {:e} exceeds bound {:e}", q.abs(), opts.q_bound) });
    }
    let (df, dg) = kind.slope(phi);
    if dg.abs() < opts.min_abs_g_prime {
        let what = match kind {
            SurfaceKind::Elliptic => "f'^2 - 1",
            SurfaceKind::Hyperbolic => "1 - f'^2",
        };
        return Err(OdeError::Constraint { u_stop: u, reason: format!("{what} = {:e} reached the regime boundary (f' = {df})", dg * dg) });
    }
    if let Reduced::Second { c } = law {
        let d = match kind {
            SurfaceKind::Elliptic => 1.0 + c * df,
            SurfaceKind::Hyperbolic => 1.0 - c * df,
        };
        if d.abs() < opts.min_denominator {
            let sign = if kind == SurfaceKind::Elliptic { '+' } else { '-' };
            return Err(OdeError::SingularDenominator { u_stop: u, reason: format!("1 {sign} c f' = {d:e}") });
        }
    }
    Ok(())
}

fn integrate(kind: SurfaceKind, law: Reduced, y0: State, u_span: (f64, f64), step: f64, opts: &OdeOptions) -> Result<Integration, OdeError> {
    let (a, b) = u_span;
    if !(step > 0.0) || !step.is_finite() {
        return Err(OdeError::InvalidParameters(format!("step must be positive, got {step}")));
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(OdeError::InvalidParameters(format!("u span [{a}, {b}] must be finite and increasing")));
    }
    let grid = UniformGrid::covering(a, b, step);
    if grid.len < 5 {
        return Err(OdeError::InvalidParameters(format!("u span [{a}, {b}] with step {step} gives fewer than 5 samples")));
    }
    let rhs = |y: &State| -> State {
        let [f, _, phi, q] = *y;
        let (df, dg) = kind.slope(phi);
        let dq = match (&law, kind) {
            (Reduced::First, _) => df * dg / f,
            (Reduced::ConstantQ, _) => 0.0,
            (Reduced::Second { c }, SurfaceKind::Elliptic) => dg * (df + c * (1.0 - q * q)) / (f * (1.0 + c * df)),
            (Reduced::Second { c }, SurfaceKind::Hyperbolic) => dg * (df - c * (1.0 + q * q)) / (f * (1.0 - c * df)),
        };
        [df, dg, q / f, dq]
    };
    check_state(kind, &law, &y0, a, opts)?;
    let mut states = Vec::with_capacity(grid.len);
    states.push(y0);
    for i in 1..grid.len {
        let prev = states[i - 1];
        let next = rk4_step(&rhs, &prev, grid.step);
        // halt at the last admissible sample
        let crossed = kind.slope(next[2]).1.signum() != kind.slope(prev[2]).1.signum();
        if crossed {
            return Err(OdeError::Constraint { u_stop: grid.at(i - 1), reason: "g' changes sign (f'^2 crosses 1)".into() });
        }
        check_state(kind, &law, &next, grid.at(i), opts).map_err(|e| match e {
            OdeError::BlowUp { reason, .. } => OdeError::BlowUp { u_stop: grid.at(i - 1), reason },
            OdeError::Constraint { reason, .. } => OdeError::Constraint { u_stop: grid.at(i - 1), reason },
            OdeError::SingularDenominator { reason, .. } => OdeError::SingularDenominator { u_stop: grid.at(i - 1), reason },
            other => other,
        })?;
        states.push(next);
    }
    Ok(Integration { grid, states })
}

fn check_f0(f0: f64) -> Result<(), OdeError> {
    if !(f0 > 0.0) || !f0.is_finite() {
        return Err(OdeError::InvalidParameters(format!("f0 must be positive, got {f0}")));
    }
    Ok(())
}

fn build(case: OdeCase, initial: InitialData, u_span: (f64, f64), run: Integration, opts: &OdeOptions) -> OdeSolution {
    let kind = case.kind();
    let n = run.grid.len;
    let u: Vec<f64> = (0..n).map(|i| run.grid.at(i)).collect();
    let mut sol = OdeSolution {
        case,
        initial,
        u_span,
        step: run.grid.step,
        u,
        f: Vec::with_capacity(n),
        df: Vec::with_capacity(n),
        d2f: Vec::with_capacity(n),
        residual: Vec::new(),
        residual_max: 0.0,
        first_integral_residual: None,
        g: Vec::with_capacity(n),
        phi: Vec::with_capacity(n),
        q: Vec::with_capacity(n),
    };
        for [f, g, phi, q] in run.states {
        let (df, dg) = kind.slope(phi);
        let d2f = match kind {
            SurfaceKind::Elliptic => dg * q / f,
            SurfaceKind::Hyperbolic => -dg * q / f,
        };
        sol.f.push(f);
        sol.df.push(df);
        sol.d2f.push(d2f);
        sol.g.push(g);
        sol.phi.push(phi);
        sol.q.push(q);
    }
    let r = literal_residuals(case, &sol.f, &sol.df, &sol.d2f, sol.step, opts.residual_g_prime_floor);
    sol.residual_max = interior_max(&r.pointwise, margin(case));
    sol.residual = r.pointwise;
    sol
}

/// Integrates the first-kind system from `(f, phi, f phi') = (f0, phi0, p0)` at `u_span.0`.
pub fn solve_first_kind(kind: SurfaceKind, f0: f64, phi0: f64, p0: f64, u_span: (f64, f64), step: f64) -> Result<OdeSolution> {
    solve_first_kind_with(kind, f0, phi0, p0, u_span, step, &OdeOptions::default())
}

pub fn solve_first_kind_with(
    kind: SurfaceKind,
    f0: f64,
    phi0: f64,
    p0: f64,
    u_span: (f64, f64),
    step: f64,
    opts: &OdeOptions,
) -> Result<OdeSolution> {
    check_f0(f0)?;
    if ![phi0, p0].iter().all(|v| v.is_finite()) {
        return Err(OdeError::InvalidParameters("phi0 and p0 must be finite".into()).into());
    }
    let run = integrate(kind, Reduced::First, [f0, 0.0, phi0, p0], u_span, step, opts)?;
    let case = OdeCase::from_kind(kind, true);
    Ok(build(case, InitialData::FirstKind { f0, phi0, p0 }, u_span, run, opts))
}

/// Integrates the second-kind equation from `(f, f', f'') = (f0, df0, d2f0)` at `u_span.0`
/// along the first integral `Phi = c g'`.
pub fn solve_second_kind(kind: SurfaceKind, f0: f64, df0: f64, d2f0: f64, c: f64, u_span: (f64, f64), step: f64) -> Result<OdeSolution> {
    solve_second_kind_with(kind, f0, df0, d2f0, c, u_span, step, &OdeOptions::default())
}

#[allow(clippy::too_many_arguments)]
pub fn solve_second_kind_with(
    kind: SurfaceKind,
    f0: f64,
    df0: f64,
    d2f0: f64,
    c: f64,
    u_span: (f64, f64),
    step: f64,
    opts: &OdeOptions,
) -> Result<OdeSolution> {
    check_f0(f0)?;
    if c == 0.0 {
        return Err(OdeError::InvalidParameters("c must be nonzero".into()).into());
    }
    if ![df0, d2f0, c].iter().all(|v| v.is_finite()) {
        return Err(OdeError::InvalidParameters("df0, d2f0 and c must be finite".into()).into());
    }
    let phi0 = match kind {
        SurfaceKind::Elliptic if df0 > 1.0 => df0.acosh(),
        SurfaceKind::Elliptic => {
            return Err(OdeError::InvalidParameters(format!("elliptic case needs f'(0) > 1, got {df0}")).into());
        }
        SurfaceKind::Hyperbolic if df0.abs() < 1.0 => df0.acos(),
        SurfaceKind::Hyperbolic => {
            return Err(OdeError::InvalidParameters(format!("hyperbolic case needs |f'(0)| < 1, got {df0}")).into());
        }
    };
    let (_, dg0) = kind.slope(phi0);
    let q0 = match kind {
        SurfaceKind::Elliptic => f0 * d2f0 / dg0,
        SurfaceKind::Hyperbolic => -f0 * d2f0 / dg0,
    };
    let run = integrate(kind, Reduced::Second { c }, [f0, 0.0, phi0, q0], u_span, step, opts)?;
    let case = OdeCase::from_kind(kind, false);
    let mut sol = build(case, InitialData::SecondKind { f0, df0, d2f0, c }, u_span, run, opts);
    let first_integral = reduced_residual(&sol, c);
    sol.first_integral_residual = Some(first_integral);
    let budget = 10.0 * (first_integral + truncation_estimate(&sol, opts)) + roundoff_floor(&sol);
    if sol.residual_max > budget {
        return Err(OdeError::ReductionMismatch { literal: sol.residual_max, first_integral }.into());
    }
    Ok(sol)
}

/// How well the samples satisfy the reduced first-order equation for `q`.
fn reduced_residual(sol: &OdeSolution, c: f64) -> f64 {
    let dq = derivative_4th(&sol.q, sol.step);
    let r: Vec<f64> = (0..sol.u.len())
        .map(|i| {
            let (f, fp, q) = (sol.f[i], sol.df[i], sol.q[i]);
            let (_, gp) = sol.kind().slope(sol.phi[i]);
            let rhs = match sol.kind() {
                SurfaceKind::Elliptic => gp * (fp + c * (1.0 - q * q)) / (f * (1.0 + c * fp)),
                SurfaceKind::Hyperbolic => gp * (fp - c * (1.0 + q * q)) / (f * (1.0 - c * fp)),
            };
            dq[i] - rhs
        })
        .collect();
    interior_max(&r, 2)
}

/// Richardson estimate of the finite-difference truncation in the literal
/// residual: the same residual on every other sample grows 16x if it is
/// truncation, and stays put if the samples violate the equation.
fn truncation_estimate(sol: &OdeSolution, opts: &OdeOptions) -> f64 {
    let n = sol.u.len();
    let k0 = margin(sol.case);
    if n < 4 * k0 + 1 {
        return f64::INFINITY;
    }
    let even = |v: &[f64]| v.iter().step_by(2).copied().collect::<Vec<_>>();
    let coarse =
        literal_residuals(sol.case, &even(&sol.f), &even(&sol.df), &even(&sol.d2f), 2.0 * sol.step, opts.residual_g_prime_floor).pointwise;
    let m = coarse.len();
    (k0..m.saturating_sub(k0))
        .filter_map(|k| {
            let d = (coarse[k] - sol.residual[2 * k]).abs() / 15.0;
            (!d.is_nan()).then_some(d)
        })
        .fold(0.0, f64::max)
}

/// Profile with `f kappa_m` held at the constant `a`.
pub fn constant_q_profile(kind: SurfaceKind, f0: f64, phi0: f64, a: f64, u_span: (f64, f64), step: f64) -> Result<ProfileCurve> {
    check_f0(f0)?;
    let opts = OdeOptions::default();
    let run = integrate(kind, Reduced::ConstantQ, [f0, 0.0, phi0, a], u_span, step, &opts)?;
    let case = OdeCase::from_kind(kind, true);
    build(case, InitialData::ConstantQ { f0, phi0, a }, u_span, run, &opts).to_profile()
}

fn roundoff_floor(sol: &OdeSolution) -> f64 {
    let scale = sol.f.iter().chain(&sol.df).chain(&sol.d2f).fold(1.0_f64, |m, v| m.max(v.abs()));
    1e3 * f64::EPSILON * scale / (sol.step * sol.step)
}

/// Samples at each end excluded from residual maxima. The second-kind
/// residual differentiates twice, so the one-sided end stencils reach two
/// samples further in.
fn margin(case: OdeCase) -> usize {
    if case.is_first_kind() {
        2
    } else {
        4
    }
}

fn interior_max(r: &[f64], margin: usize) -> f64 {
    let n = r.len();
    if n <= 2 * margin {
        return 0.0;
    }
    r[margin..n - margin].iter().filter(|v| !v.is_nan()).fold(0.0, |m, v| m.max(v.abs()))
}

struct Residuals {
    pointwise: Vec<f64>,
}

fn literal_residuals(case: OdeCase, f: &[f64], df: &[f64], d2f: &[f64], h: f64, floor: f64) -> Residuals {
    let n = f.len();
    let elliptic = case.kind() == SurfaceKind::Elliptic;
    // s = f'^2 - 1 (elliptic) or 1 - f'^2 (hyperbolic), g' = sqrt(s)
    let s: Vec<f64> = df.iter().map(|d| if elliptic { d * d - 1.0 } else { 1.0 - d * d }).collect();
    let root: Vec<f64> = s.iter().map(|v| v.max(0.0).sqrt()).collect();
    let skip = |i: usize| root[i] < floor;
    if case.is_first_kind() {
        let inner: Vec<f64> = (0..n).map(|i| f[i] * d2f[i] / root[i]).collect();
        let d_inner = derivative_4th(&inner, h);
        let pointwise = (0..n)
            .map(|i| {
                if skip(i) {
                    f64::NAN
                } else if elliptic {
                    f[i] * d_inner[i] - df[i] * root[i]
                } else {
                    f[i] * d_inner[i] + df[i] * root[i]
                }
            })
            .collect();
        return Residuals { pointwise };
    }
    let w: Vec<f64> = (0..n).map(|i| f[i] * d2f[i]).collect();
    let dw = derivative_4th(&w, h);
    let ln_phi: Vec<f64> = (0..n)
        .map(|i| {
            let (f, fp, fpp, s) = (f[i], df[i], d2f[i], s[i]);
            let (num, den) = if elliptic {
                (f * s * dw[i] - f * f * fp * fpp * fpp - fp * s * s, s * s + f * f * fpp * fpp - f * fp * s * dw[i])
            } else {
                (f * s * dw[i] + f * f * fp * fpp * fpp + fp * s * s, s * s + f * f * fpp * fpp + f * fp * s * dw[i])
            };
            (root[i] * num / den).abs().ln()
        })
        .collect();
    let d_ln_phi = derivative_4th(&ln_phi, h);
    let rhs = |i: usize| df[i] * d2f[i] / if elliptic { s[i] } else { -s[i] };
    let pointwise = (0..n).map(|i| if skip(i) { f64::NAN } else { d_ln_phi[i] - rhs(i) }).collect();
    Residuals { pointwise }
}

/// Max-abs literal residual over interior samples, recomputed from `(f, f', f'')`.
pub fn ode_residual(sol: &OdeSolution) -> f64 {
    let r = literal_residuals(sol.case, &sol.f, &sol.df, &sol.d2f, sol.step, OdeOptions::default().residual_g_prime_floor);
    interior_max(&r.pointwise, margin(sol.case))
}

impl OdeSolution {
    pub fn kind(&self) -> SurfaceKind {
        self.case.kind()
    }

    pub fn u_domain(&self) -> (f64, f64) {
        (self.u[0], *self.u.last().expect("non-empty"))
    }

    /// `c` for second-kind solutions.
    pub fn c(&self) -> Option<f64> {
        match self.initial {
            InitialData::SecondKind { c, .. } => Some(c),
            _ => None,
        }
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    /// Samples of `f kappa_m`.
    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn to_profile(&self) -> Result<ProfileCurve> {
        ProfileCurve::from_samples(self.kind(), &self.u, self.f.clone(), self.g.clone(), self.phi.clone(), self.q.clone())
    }

    /// `u,f,df,d2f,residual` rows with round-trip precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# case={} samples={} step={}", self.case.as_str(), self.u.len(), fmt17(self.step));
        out.push_str("u,f,df,d2f,residual\n");
        for i in 0..self.u.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt17(self.u[i]),
                fmt17(self.f[i]),
                fmt17(self.df[i]),
                fmt17(self.d2f[i]),
                fmt17(self.residual[i])
            );
        }
        out
    }
}

/// Shortest-round-trip is not enough for fixed-width diffs; 17 significant digits.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Parameters of a solve as they appear in configs and on the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OdeRequest {
    pub f0: Option<f64>,
    pub phi0: Option<f64>,
    pub p0: Option<f64>,
    pub df0: Option<f64>,
    pub d2f0: Option<f64>,
    pub c: Option<f64>,
    pub u_span: (f64, f64),
    pub step: f64,
}

impl Default for OdeRequest {
    fn default() -> Self {
        OdeRequest { f0: None, phi0: None, p0: None, df0: None, d2f0: None, c: None, u_span: (0.0, 1.0), step: 1e-3 }
    }
}

impl OdeRequest {
    /// Sets one parameter from a `name=value` override.
    pub fn set(&mut self, name: &str, value: &str) -> Result<()> {
        let parse = |v: &str| v.trim().parse::<f64>().map_err(|_| Error::config(name, format!("cannot parse {v:?} as a number")));
        match name {
            "f0" => self.f0 = Some(parse(value)?),
            "phi0" => self.phi0 = Some(parse(value)?),
            "p0" => self.p0 = Some(parse(value)?),
            "df0" => self.df0 = Some(parse(value)?),
            "d2f0" => self.d2f0 = Some(parse(value)?),
            "c" => self.c = Some(parse(value)?),
            "step" => self.step = parse(value)?,
            "u0" => self.u_span.0 = parse(value)?,
            "u1" => self.u_span.1 = parse(value)?,
            _ => return Err(Error::config(name, "unknown parameter (expected f0, phi0, p0, df0, d2f0, c, step, u0, u1)")),
        }
        Ok(())
    }

    pub fn solve(&self, case: OdeCase) -> Result<OdeSolution> {
        let kind = case.kind();
        let f0 = self.f0.unwrap_or(1.0);
        if case.is_first_kind() {
            solve_first_kind(kind, f0, self.phi0.unwrap_or(0.5), self.p0.unwrap_or(0.0), self.u_span, self.step)
        } else {
            let df0 = self.df0.unwrap_or(match kind {
                SurfaceKind::Elliptic => 1.3,
                SurfaceKind::Hyperbolic => 0.6,
            });
            let c = self.c.unwrap_or(0.5);
            solve_second_kind(kind, self.f0.unwrap_or(1.5), df0, self.d2f0.unwrap_or(0.2), c, self.u_span, self.step)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_elliptic_residual_small() {
        let sol = solve_first_kind(SurfaceKind::Elliptic, 1.0, 0.5, 0.0, (0.0, 1.0), 1e-4).unwrap();
        assert!(sol.residual_max <= 1e-6, "{}", sol.residual_max);
        assert_eq!(sol.u.len(), 10001);
        assert!(sol.df.iter().all(|d| d * d - 1.0 > 0.0));
    }

    #[test]
    fn first_hyperbolic_residual_small() {
        let sol = solve_first_kind(SurfaceKind::Hyperbolic, 1.5, 1.0, 0.3, (0.0, 1.0), 1e-3).unwrap();
        assert!(sol.residual_max <= 1e-6, "{}", sol.residual_max);
        assert!(sol.df.iter().all(|d| d * d < 1.0 && d * d > 0.0));
    }

    #[test]
    fn second_kind_residuals_small() {
        for (kind, df0) in [(SurfaceKind::Elliptic, 1.3), (SurfaceKind::Hyperbolic, 0.6)] {
            let sol = solve_second_kind(kind, 1.5, df0, 0.2, 0.5, (0.0, 1.0), 1e-3).unwrap();
            assert!(sol.residual_max <= 1e-5, "{kind:?}: {}", sol.residual_max);
            assert!(sol.first_integral_residual.unwrap() <= 1e-5);
        }
    }

    #[test]
    fn stationary_start_is_rejected() {
        let e = solve_first_kind(SurfaceKind::Elliptic, 1.0, 0.0, 0.0, (0.0, 1.0), 1e-3).unwrap_err();
        assert!(matches!(e, Error::Ode(OdeError::Constraint { u_stop, .. }) if u_stop == 0.0));
    }

    #[test]
    fn zero_c_is_rejected() {
        let e = solve_second_kind(SurfaceKind::Elliptic, 1.5, 1.3, 0.2, 0.0, (0.0, 1.0), 1e-3).unwrap_err();
        assert!(e.to_string().contains("c must be nonzero"));
    }

    #[test]
    fn second_kind_branch_preconditions() {
        assert!(solve_second_kind(SurfaceKind::Elliptic, 1.5, 0.9, 0.2, 0.5, (0.0, 1.0), 1e-3).is_err());
        assert!(solve_second_kind(SurfaceKind::Hyperbolic, 1.5, 1.2, 0.2, 0.5, (0.0, 1.0), 1e-3).is_err());
    }

    #[test]
    fn regime_violation_reports_stop() {
        // phi runs into pi, where g' = sin(phi) vanishes
        let e = solve_first_kind(SurfaceKind::Hyperbolic, 0.2, 2.8, 1.0, (0.0, 2.0), 1e-3).unwrap_err();
        assert!(matches!(e, Error::Ode(OdeError::Constraint { .. })), "{e}");
        match e {
            Error::Ode(err) => {
                let u = err.u_stop().unwrap();
                assert!(u > 0.0 && u < 2.0, "{err}");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn residual_converges_fourth_order() {
        let r = |h| solve_first_kind(SurfaceKind::Elliptic, 1.0, 0.5, 0.8, (0.0, 1.0), h).unwrap().residual_max;
        let ratio = r(2e-2) / r(1e-2);
        assert!((12.0..=20.0).contains(&ratio), "{ratio}");
        let r2 = |h| solve_second_kind(SurfaceKind::Elliptic, 1.5, 1.3, 0.2, 0.5, (0.0, 1.0), h).unwrap().residual_max;
        let ratio = r2(2e-2) / r2(1e-2);
        assert!((12.0..=20.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn perturbation_grows_residual_proportionally() {
        let sol = solve_first_kind(SurfaceKind::Elliptic, 1.0, 0.5, 0.3, (0.0, 1.0), 1e-3).unwrap();
        let scaled = |k: f64| {
            let mut s = sol.clone();
            s.d2f.iter_mut().for_each(|v| *v *= k);
            ode_residual(&s)
        };
        let (a, b) = (scaled(1.01), scaled(1.02));
        assert!(a > 1e-4, "{a}");
        assert!((b / a - 2.0).abs() < 0.05, "{}", b / a);
    }

    #[test]
    fn linear_profile_residual_is_slope_product() {
        // f = 2u + 1, kappa_m = 0: literal residual is -f' g'
        let n = 21;
        let u: Vec<f64> = (0..n).map(|i| i as f64 * 0.05).collect();
        let mut sol = solve_first_kind(SurfaceKind::Elliptic, 1.0, 0.5, 0.0, (0.0, 1.0), 0.05).unwrap();
        sol.f = u.iter().map(|u| 2.0 * u + 1.0).collect();
        sol.df = vec![2.0; n];
        sol.d2f = vec![0.0; n];
        let r = ode_residual(&sol);
        assert!((r - 2.0 * 3f64.sqrt()).abs() < 1e-12, "{r}");
    }

    #[test]
    fn request_overrides_and_csv() {
        let mut req = OdeRequest::default();
        req.set("step", "0.01").unwrap();
        req.set("c", "0.25").unwrap();
        assert!(req.set("zeta", "1").is_err());
        let sol = req.solve(OdeCase::SecondHyperbolic).unwrap();
        assert_eq!(sol.c(), Some(0.25));
        let csv = sol.to_csv();
        assert_eq!(csv.lines().count(), 2 + sol.u.len());
        let row: Vec<f64> = csv.lines().nth(2).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row[1], sol.f[0]);
    }
}
