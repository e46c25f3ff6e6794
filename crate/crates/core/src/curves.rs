//! Profile (meridian) curves and spherical base curves.
//!
//! A profile is stored through its slope angle `phi`: elliptic profiles have
//! `f' = cosh phi, g' = sinh phi`, hyperbolic ones `f' = cos phi, g' = sin phi`.
//! The unit-speed constraint then holds identically and the profile curvature
//! is `phi'`. The integration constants `f0`, `g0` are the values at `u = 0`.
//!
//! Base curves live on the unit sphere of Euclidean 3-space (elliptic) or on
//! the de Sitter sphere of `span{e2, e3, e4}` (hyperbolic) and are obtained by
//! integrating the linear Frenet system with classical RK4.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::{derivative_4th, hermite3, hermite5, UniformGrid};
use crate::minkowski::SpacetimeVector;
use crate::polynomial::Polynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceKind {
    /// Timelike rotation axis `e4`, base curve on `S^2(1)`.
    Elliptic,
    /// Spacelike rotation axis `e1`, base curve on `S^2_1(1)`.
    Hyperbolic,
}

impl SurfaceKind {
    /// Metric diagonal of the ambient 3-space of the base curve.
    pub fn base_metric(self) -> [f64; 3] {
        match self {
            SurfaceKind::Elliptic => [1.0, 1.0, 1.0],
            SurfaceKind::Hyperbolic => [1.0, 1.0, -1.0],
        }
    }

    /// Target Gram diagonal of the base frame `(l, t, n)`.
    pub fn frame_signs(self) -> [f64; 3] {
        self.base_metric()
    }

    /// Sign in front of `kappa n` in the Frenet equation for `t'`.
    fn frenet_sign(self) -> f64 {
        match self {
            SurfaceKind::Elliptic => 1.0,
            SurfaceKind::Hyperbolic => -1.0,
        }
    }

    /// `(f', g')` of the slope angle `phi`.
    pub fn slope(self, phi: f64) -> (f64, f64) {
        match self {
            SurfaceKind::Elliptic => (phi.cosh(), phi.sinh()),
            SurfaceKind::Hyperbolic => (phi.cos(), phi.sin()),
        }
    }

    /// Embeds a base-curve 3-vector into 4-space.
    pub fn embed(self, w: [f64; 3]) -> SpacetimeVector {
        match self {
            SurfaceKind::Elliptic => SpacetimeVector::new(w[0], w[1], w[2], 0.0),
            SurfaceKind::Hyperbolic => SpacetimeVector::new(0.0, w[0], w[1], w[2]),
        }
    }

    /// The rotation axis carrying `g(u)`.
    pub fn axis(self) -> SpacetimeVector {
        match self {
            SurfaceKind::Elliptic => SpacetimeVector::basis(4),
            SurfaceKind::Hyperbolic => SpacetimeVector::basis(1),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SurfaceKind::Elliptic => "elliptic",
            SurfaceKind::Hyperbolic => "hyperbolic",
        }
    }
}

/// Value and derivatives of a profile at one abscissa.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileJet {
    pub u: f64,
    pub f: f64,
    pub g: f64,
    pub phi: f64,
    /// `f'`
    pub df: f64,
    /// `g'`
    pub dg: f64,
    /// Profile curvature `kappa_m = phi'`.
    pub kappa_m: f64,
    /// `(f kappa_m)'`
    pub d_f_kappa_m: f64,
}

impl ProfileJet {
    /// `f'' = g' kappa_m` (elliptic) or `-g' kappa_m` (hyperbolic).
    pub fn d2f(&self, kind: SurfaceKind) -> f64 {
        match kind {
            SurfaceKind::Elliptic => self.dg * self.kappa_m,
            SurfaceKind::Hyperbolic => -self.dg * self.kappa_m,
        }
    }

    /// `g'' = f' kappa_m` for both kinds.
    pub fn d2g(&self) -> f64 {
        self.df * self.kappa_m
    }
}

/// Gauss-Legendre 5-point rule on `[-1, 1]`.
const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

const QUADRATURE_PANEL: f64 = 1.0 / 64.0;

/// Cumulative integrals of `(f', g')` on a table of short panels.
#[derive(Clone, Debug)]
struct QuadratureTable {
    grid: UniformGrid,
    /// `(int f', int g')` from the grid start to each node.
    cumulative: Vec<(f64, f64)>,
}

impl QuadratureTable {
    fn new(kind: SurfaceKind, phi: &Polynomial, a: f64, b: f64) -> Self {
        let grid = UniformGrid::covering(a, b, QUADRATURE_PANEL);
        let mut cumulative = Vec::with_capacity(grid.len);
        let mut acc = (0.0, 0.0);
        cumulative.push(acc);
        for i in 0..grid.len - 1 {
            let d = panel(kind, phi, grid.at(i), grid.at(i + 1));
            acc = (acc.0 + d.0, acc.1 + d.1);
            cumulative.push(acc);
        }
        QuadratureTable { grid, cumulative }
    }

    fn integral_to(&self, kind: SurfaceKind, phi: &Polynomial, u: f64) -> (f64, f64) {
        let (i, _) = self.grid.locate(u);
        let base = self.cumulative[i];
        let d = panel(kind, phi, self.grid.at(i), u);
        (base.0 + d.0, base.1 + d.1)
    }
}

fn panel(kind: SurfaceKind, phi: &Polynomial, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL5.iter().fold((0.0, 0.0), |acc, &(x, w)| {
        let (df, dg) = kind.slope(phi.eval(mid + half * x));
        (acc.0 + w * half * df, acc.1 + w * half * dg)
    })
}

/// Profile given by samples of `(f, g, phi, q = f phi')` on a uniform grid,
/// typically produced by an ODE solve.
#[derive(Clone, Debug)]
pub struct SampledProfile {
    grid: UniformGrid,
    f: Vec<f64>,
    g: Vec<f64>,
    phi: Vec<f64>,
    q: Vec<f64>,
    /// `q'` from fourth-order differences of the `q` samples.
    dq: Vec<f64>,
}

impl SampledProfile {
    fn jet(&self, kind: SurfaceKind, u: f64) -> ProfileJet {
        let (i, s) = self.grid.locate(u);
        let h = self.grid.step;
        let j = i + 1;
        let (dfi, dgi) = kind.slope(self.phi[i]);
        let (dfj, dgj) = kind.slope(self.phi[j]);
        let (f, _) = hermite3(self.f[i], dfi, self.f[j], dfj, h, s);
        let (g, _) = hermite3(self.g[i], dgi, self.g[j], dgj, h, s);
        let (phi, _) = hermite3(self.phi[i], self.q[i] / self.f[i], self.phi[j], self.q[j] / self.f[j], h, s);
        let (q, dq) = hermite3(self.q[i], self.dq[i], self.q[j], self.dq[j], h, s);
        let (df, dg) = kind.slope(phi);
        ProfileJet { u, f, g, phi, df, dg, kappa_m: q / f, d_f_kappa_m: dq }
    }
}

#[derive(Clone, Debug)]
enum ProfileRepr {
    Polynomial {
        phi: Polynomial,
        dphi: Polynomial,
        d2phi: Polynomial,
        f0: f64,
        g0: f64,
        table: QuadratureTable,
        /// Integrals at `u = 0`, subtracted so that `f(0) = f0`.
        at_zero: (f64, f64),
    },
    Sampled(SampledProfile),
}

/// Meridian curve `m(u) = (f(u), g(u))`.
#[derive(Clone, Debug)]
pub struct ProfileCurve {
    kind: SurfaceKind,
    repr: ProfileRepr,
    u_domain: (f64, f64),
}

/// Number of points used to check `f > 0` on construction.
const POSITIVITY_SAMPLES: usize = 1001;

impl ProfileCurve {
    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn u_domain(&self) -> (f64, f64) {
        self.u_domain
    }

    /// Slope-angle polynomial, if the profile has a closed form.
    pub fn slope_polynomial(&self) -> Option<&Polynomial> {
        match &self.repr {
            ProfileRepr::Polynomial { phi, .. } => Some(phi),
            ProfileRepr::Sampled(_) => None,
        }
    }

    pub fn contains(&self, u: f64) -> bool {
        u >= self.u_domain.0 && u <= self.u_domain.1
    }

    pub fn jet(&self, u: f64) -> Result<ProfileJet> {
        if !self.contains(u) {
            return Err(Error::Domain(format!(
                "u = {u} outside profile domain [{}, {}]",
                self.u_domain.0, self.u_domain.1
            )));
        }
        Ok(self.jet_unchecked(u))
    }

    fn jet_unchecked(&self, u: f64) -> ProfileJet {
        match &self.repr {
            ProfileRepr::Polynomial { phi, dphi, d2phi, f0, g0, table, at_zero } => {
                let p = phi.eval(u);
                let (df, dg) = self.kind.slope(p);
                let (fi, gi) = table.integral_to(self.kind, phi, u);
                let f = f0 + fi - at_zero.0;
                let g = g0 + gi - at_zero.1;
                let k = dphi.eval(u);
                ProfileJet { u, f, g, phi: p, df, dg, kappa_m: k, d_f_kappa_m: df * k + f * d2phi.eval(u) }
            }
            ProfileRepr::Sampled(s) => s.jet(self.kind, u),
        }
    }

    fn check_positive(&self) -> Result<()> {
        let (a, b) = self.u_domain;
        for k in 0..POSITIVITY_SAMPLES {
            let u = a + (b - a) * k as f64 / (POSITIVITY_SAMPLES - 1) as f64;
            let f = self.jet_unchecked(u).f;
            if !(f > 0.0) {
                return Err(Error::Domain(format!("profile f(u) = {f} <= 0 at u = {u}")));
            }
        }
        Ok(())
    }

    /// Builds a profile from uniformly spaced samples of `(f, g, phi, f phi')`.
    pub fn from_samples(
        kind: SurfaceKind,
        u: &[f64],
        f: Vec<f64>,
        g: Vec<f64>,
        phi: Vec<f64>,
        q: Vec<f64>,
    ) -> Result<Self> {
        let n = u.len();
        if n < 5 || [f.len(), g.len(), phi.len(), q.len()].iter().any(|&m| m != n) {
            return Err(Error::Domain(format!("need >= 5 equally long sample arrays, got {n}")));
        }
        let step = (u[n - 1] - u[0]) / (n - 1) as f64;
        if !(step > 0.0) {
            return Err(Error::Domain("sample abscissae must increase".into()));
        }
        let uniform = u.iter().enumerate().all(|(i, &ui)| (ui - (u[0] + i as f64 * step)).abs() <= 1e-9 * (1.0 + ui.abs()));
        if !uniform {
            return Err(Error::Domain("sample abscissae must be uniformly spaced".into()));
        }
        let dq = derivative_4th(&q, step);
        let profile = ProfileCurve {
            kind,
            repr: ProfileRepr::Sampled(SampledProfile {
                grid: UniformGrid { start: u[0], step, len: n },
                f,
                g,
                phi,
                q,
                dq,
            }),
            u_domain: (u[0], u[n - 1]),
        };
        profile.check_positive()?;
        Ok(profile)
    }
}

/// Builds a closed-form profile from its slope angle. `f0`, `g0` are the
/// values of `f`, `g` at `u = 0`, which need not lie in `u_domain`.
pub fn make_profile(kind: SurfaceKind, phi: Polynomial, f0: f64, g0: f64, u_domain: (f64, f64)) -> Result<ProfileCurve> {
    let (a, b) = u_domain;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("invalid u domain [{a}, {b}]")));
    }
    let lo = a.min(0.0);
    let hi = b.max(0.0);
    let table = QuadratureTable::new(kind, &phi, lo, hi);
    let at_zero = table.integral_to(kind, &phi, 0.0);
    let dphi = phi.derivative();
    let d2phi = dphi.derivative();
    let profile = ProfileCurve {
        kind,
        repr: ProfileRepr::Polynomial { phi, dphi, d2phi, f0, g0, table, at_zero },
        u_domain,
    };
    profile.check_positive()?;
    Ok(profile)
}

/// `kappa_m(u) = phi'(u)`.
pub fn profile_curvature(p: &ProfileCurve, u: f64) -> Result<f64> {
    Ok(p.jet(u)?.kappa_m)
}

/// Spherical curvature of a base curve.
#[derive(Clone)]
pub enum Curvature {
    Constant(f64),
    Polynomial(Polynomial),
    /// Arbitrary callable; its derivative is taken by central differences.
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Curvature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Curvature::Constant(c) => f.debug_tuple("Constant").field(c).finish(),
            Curvature::Polynomial(p) => f.debug_tuple("Polynomial").field(p).finish(),
            Curvature::Function(_) => f.write_str("Function(..)"),
        }
    }
}

const KAPPA_DIFF_STEP: f64 = 1e-5;

impl Curvature {
    pub fn eval(&self, v: f64) -> f64 {
        match self {
            Curvature::Constant(c) => *c,
            Curvature::Polynomial(p) => p.eval(v),
            Curvature::Function(k) => k(v),
        }
    }

    /// `d kappa / dv`.
    pub fn derivative(&self, v: f64) -> f64 {
        match self {
            Curvature::Constant(_) => 0.0,
            Curvature::Polynomial(p) => p.derivative().eval(v),
            Curvature::Function(k) => (k(v + KAPPA_DIFF_STEP) - k(v - KAPPA_DIFF_STEP)) / (2.0 * KAPPA_DIFF_STEP),
        }
    }

    /// Constant value when known in closed form.
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            Curvature::Constant(c) => Some(*c),
            Curvature::Polynomial(p) if p.is_constant() => Some(p.eval(0.0)),
            _ => None,
        }
    }
}

/// Base frame `(l, t, n)` as coordinates of the 3-space carrying the curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseFrame {
    pub l: [f64; 3],
    pub t: [f64; 3],
    pub n: [f64; 3],
}

impl Default for BaseFrame {
    fn default() -> Self {
        BaseFrame { l: [1.0, 0.0, 0.0], t: [0.0, 1.0, 0.0], n: [0.0, 0.0, 1.0] }
    }
}

impl BaseFrame {
    fn vectors(&self) -> [[f64; 3]; 3] {
        [self.l, self.t, self.n]
    }

    /// Max deviation of the Gram matrix from the target signs of `kind`.
    pub fn gram_defect(&self, kind: SurfaceKind) -> f64 {
        let metric = kind.base_metric();
        let signs = kind.frame_signs();
        let vs = self.vectors();
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in i..3 {
                let g: f64 = (0..3).map(|k| metric[k] * vs[i][k] * vs[j][k]).sum();
                let target = if i == j { signs[i] } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    fn to_state(self) -> [f64; 9] {
        let mut s = [0.0; 9];
        s[..3].copy_from_slice(&self.l);
        s[3..6].copy_from_slice(&self.t);
        s[6..].copy_from_slice(&self.n);
        s
    }

    fn from_state(s: &[f64; 9]) -> Self {
        BaseFrame { l: [s[0], s[1], s[2]], t: [s[3], s[4], s[5]], n: [s[6], s[7], s[8]] }
    }
}

/// Input of [`integrate_spherical`].
#[derive(Clone, Debug)]
pub struct SphericalCurveSpec {
    pub kind: SurfaceKind,
    pub kappa: Curvature,
    pub initial_frame: BaseFrame,
    pub v_domain: (f64, f64),
    /// Requested RK4 step; shortened so the domain splits into equal steps.
    pub step: f64,
}

impl SphericalCurveSpec {
    pub fn new(kind: SurfaceKind, kappa: Curvature, v_domain: (f64, f64)) -> Self {
        SphericalCurveSpec { kind, kappa, initial_frame: BaseFrame::default(), v_domain, step: DEFAULT_FRENET_STEP }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn with_frame(mut self, frame: BaseFrame) -> Self {
        self.initial_frame = frame;
        self
    }
}

pub const DEFAULT_FRENET_STEP: f64 = 1e-3;

/// Tolerance on the initial frame Gram constraints.
pub const INITIAL_FRAME_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrenetSample {
    pub v: f64,
    pub l: [f64; 3],
    pub t: [f64; 3],
    pub n: [f64; 3],
}

/// Arc-length parametrized curve on `S^2(1)` or `S^2_1(1)` with its Frenet samples.
#[derive(Clone, Debug)]
pub struct SphericalCurve {
    spec: SphericalCurveSpec,
    grid: UniformGrid,
    samples: Vec<FrenetSample>,
}

fn frenet_rhs(kind: SurfaceKind, kappa: f64, s: &[f64; 9]) -> [f64; 9] {
    let sigma = kind.frenet_sign();
    let mut d = [0.0; 9];
    for k in 0..3 {
        let (l, t, n) = (s[k], s[3 + k], s[6 + k]);
        d[k] = t;
        d[3 + k] = sigma * kappa * n - l;
        d[6 + k] = -kappa * t;
    }
    d
}

fn axpy(a: &[f64; 9], h: f64, d: &[f64; 9]) -> [f64; 9] {
    std::array::from_fn(|i| a[i] + h * d[i])
}

impl SphericalCurve {
    pub fn kind(&self) -> SurfaceKind {
        self.spec.kind
    }

    pub fn kappa(&self) -> &Curvature {
        &self.spec.kappa
    }

    pub fn v_domain(&self) -> (f64, f64) {
        self.spec.v_domain
    }

    /// Step actually used by the integrator.
    pub fn step(&self) -> f64 {
        self.grid.step
    }

    pub fn samples(&self) -> &[FrenetSample] {
        &self.samples
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.spec.v_domain.0 && v <= self.spec.v_domain.1
    }

    /// Frame `(l, t, n)` at `v`, quintic Hermite between samples using the
    /// first and second derivatives given by the Frenet equations.
    pub fn frame_at(&self, v: f64) -> Result<BaseFrame> {
        if !self.contains(v) {
            return Err(Error::Domain(format!(
                "v = {v} outside base curve domain [{}, {}]",
                self.spec.v_domain.0, self.spec.v_domain.1
            )));
        }
        let (i, s) = self.grid.locate(v);
        let left = self.jets(i);
        let right = self.jets(i + 1);
        let h = self.grid.step;
        let state: [f64; 9] = std::array::from_fn(|k| hermite5(left[k], right[k], h, s));
        Ok(BaseFrame::from_state(&state))
    }

    /// `[value, first, second]` derivative triples of the nine frame coordinates at sample `i`.
    fn jets(&self, i: usize) -> [[f64; 3]; 9] {
        let sample = &self.samples[i];
        let kind = self.spec.kind;
        let sigma = kind.frenet_sign();
        let kappa = self.spec.kappa.eval(sample.v);
        let dkappa = self.spec.kappa.derivative(sample.v);
        let mut out = [[0.0; 3]; 9];
        for k in 0..3 {
            let (l, t, n) = (sample.l[k], sample.t[k], sample.n[k]);
            let dl = t;
            let dt = sigma * kappa * n - l;
            let dn = -kappa * t;
            let d2l = dt;
            let d2t = sigma * dkappa * n + sigma * kappa * dn - dl;
            let d2n = -dkappa * t - kappa * dt;
            out[k] = [l, dl, d2l];
            out[3 + k] = [t, dt, d2t];
            out[6 + k] = [n, dn, d2n];
        }
        out
    }
}

/// Integrates the Frenet system of the base curve by fixed-step RK4.
pub fn integrate_spherical(spec: SphericalCurveSpec) -> Result<SphericalCurve> {
    let (a, b) = spec.v_domain;
    if !(spec.step > 0.0) {
        return Err(Error::Domain(format!("Frenet step must be positive, got {}", spec.step)));
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("invalid v domain [{a}, {b}]")));
    }
    let defect = spec.initial_frame.gram_defect(spec.kind);
    if defect > INITIAL_FRAME_TOL {
        return Err(Error::Frame(format!(
            "initial frame violates the {} Gram constraints by {defect:e}",
            spec.kind.as_str()
        )));
    }
    let grid = UniformGrid::covering(a, b, spec.step);
    let h = grid.step;
    let kind = spec.kind;
    let mut state = spec.initial_frame.to_state();
    let mut samples = Vec::with_capacity(grid.len);
    let push = |samples: &mut Vec<FrenetSample>, v: f64, s: &[f64; 9]| {
        let fr = BaseFrame::from_state(s);
        samples.push(FrenetSample { v, l: fr.l, t: fr.t, n: fr.n });
    };
    push(&mut samples, grid.at(0), &state);
    for i in 0..grid.len - 1 {
        let v = grid.at(i);
        let k_lo = spec.kappa.eval(v);
        let k_mid = spec.kappa.eval(v + 0.5 * h);
        let k_hi = spec.kappa.eval(v + h);
        let k1 = frenet_rhs(kind, k_lo, &state);
        let k2 = frenet_rhs(kind, k_mid, &axpy(&state, 0.5 * h, &k1));
        let k3 = frenet_rhs(kind, k_mid, &axpy(&state, 0.5 * h, &k2));
        let k4 = frenet_rhs(kind, k_hi, &axpy(&state, h, &k3));
        state = std::array::from_fn(|j| state[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]));
        push(&mut samples, grid.at(i + 1), &state);
    }
    Ok(SphericalCurve { spec, grid, samples })
}

/// Max over samples of the Gram-matrix deviation of `(l, t, n)` from its target.
pub fn gram_defect(c: &SphericalCurve) -> f64 {
    gram_defect_of(c.kind(), c.samples())
}

pub fn gram_defect_of(kind: SurfaceKind, samples: &[FrenetSample]) -> f64 {
    samples
        .iter()
        .map(|s| BaseFrame { l: s.l, t: s.t, n: s.n }.gram_defect(kind))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn plane_generating_profile() {
        let p = make_profile(SurfaceKind::Elliptic, Polynomial::constant(0.0), 1.0, 0.0, (0.0, 1.0)).unwrap();
        for k in 0..=10 {
            let u = k as f64 / 10.0;
            let j = p.jet(u).unwrap();
            assert!(close(j.f, 1.0 + u, 1e-14) && close(j.g, 0.0, 1e-15));
            assert_eq!(profile_curvature(&p, u).unwrap(), 0.0);
        }
    }

    #[test]
    fn hyperbolic_constant_f_profile() {
        let p = make_profile(SurfaceKind::Hyperbolic, Polynomial::constant(FRAC_PI_2), 1.0, 0.0, (0.0, 2.0)).unwrap();
        let j = p.jet(1.5).unwrap();
        assert!(close(j.f, 1.0, 1e-14) && close(j.g, 1.5, 1e-14));
    }

    #[test]
    fn elliptic_sinh_cosh_profile() {
        let p = make_profile(SurfaceKind::Elliptic, Polynomial::new(vec![0.0, 1.0]), 0.0, 1.0, (0.5, 2.0)).unwrap();
        for k in 0..=15 {
            let u = 0.5 + k as f64 * 0.1;
            let j = p.jet(u).unwrap();
            assert!(close(j.f, u.sinh(), 1e-13), "f({u})");
            assert!(close(j.g, u.cosh(), 1e-13), "g({u})");
            assert!(close(j.df * j.df - j.dg * j.dg, 1.0, 1e-12));
            assert!(close(j.kappa_m, 1.0, 0.0));
        }
    }

    #[test]
    fn nonpositive_f_is_rejected() {
        let r = make_profile(SurfaceKind::Elliptic, Polynomial::new(vec![0.0, 1.0]), 0.0, 1.0, (0.0, 1.0));
        assert!(matches!(r, Err(Error::Domain(_))));
        let r = make_profile(SurfaceKind::Hyperbolic, Polynomial::constant(std::f64::consts::PI), 0.5, 0.0, (0.0, 1.0));
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn curvature_matches_finite_differences() {
        // f' g'' - g' f'' by central differences on f, g samples
        for kind in [SurfaceKind::Elliptic, SurfaceKind::Hyperbolic] {
            let p = make_profile(kind, Polynomial::new(vec![0.3, -0.4, 0.25, 0.1]), 2.0, 0.5, (0.0, 1.0)).unwrap();
            let h = 1e-3;
            for &u in &[0.2, 0.5, 0.8] {
                let f = |x: f64| p.jet(x).unwrap().f;
                let g = |x: f64| p.jet(x).unwrap().g;
                let d1 = |y: &dyn Fn(f64) -> f64| (y(u + h) - y(u - h)) / (2.0 * h);
                let d2 = |y: &dyn Fn(f64) -> f64| (y(u + h) - 2.0 * y(u) + y(u - h)) / (h * h);
                let fd = d1(&f) * d2(&g) - d1(&g) * d2(&f);
                let exact = profile_curvature(&p, u).unwrap();
                assert!(close(fd, exact, 1e-5), "{kind:?} u={u}: {fd} vs {exact}");
            }
        }
    }

    #[test]
    fn great_circle() {
        let c = integrate_spherical(SphericalCurveSpec::new(SurfaceKind::Elliptic, Curvature::Constant(0.0), (0.0, 3.0))).unwrap();
        for s in c.samples() {
            assert!(close(s.l[0], s.v.cos(), 1e-12) && close(s.l[1], s.v.sin(), 1e-12) && s.l[2] == 0.0);
        }
        let fr = c.frame_at(1.2345).unwrap();
        assert!(close(fr.l[0], 1.2345_f64.cos(), 1e-12));
        assert!(gram_defect(&c) < 1e-12);
    }

    #[test]
    fn constant_curvature_small_circle() {
        // l'''= -(1+k^2) l', so l moves on a circle of radius 1/sqrt(1+k^2)
        // about the fixed axis (k l + n)/sqrt(1+k^2).
        let k = 1.7;
        let c = integrate_spherical(SphericalCurveSpec::new(SurfaceKind::Elliptic, Curvature::Constant(k), (0.0, 5.0))).unwrap();
        let w = (1.0 + k * k).sqrt();
        let axis = [k / w, 0.0, 1.0 / w];
        let radius = 1.0 / w;
        for s in c.samples().iter().step_by(97) {
            let along: f64 = (0..3).map(|i| s.l[i] * axis[i]).sum();
            let perp: f64 = (0..3).map(|i| (s.l[i] - along * axis[i]).powi(2)).sum::<f64>().sqrt();
            assert!(close(perp, radius, 1e-11), "v={} r={perp}", s.v);
            assert!(close(s.l.iter().map(|x| x * x).sum::<f64>(), 1.0, 1e-12));
        }
    }

    #[test]
    fn hyperbolic_zero_curvature() {
        let c = integrate_spherical(SphericalCurveSpec::new(SurfaceKind::Hyperbolic, Curvature::Constant(0.0), (0.0, 4.0))).unwrap();
        assert!(gram_defect(&c) <= 1e-8);
        for s in c.samples() {
            assert!(close(s.n[2], 1.0, 1e-14) && s.n[0] == 0.0 && s.n[1] == 0.0);
        }
    }

    #[test]
    fn bad_initial_frame() {
        let spec = SphericalCurveSpec::new(SurfaceKind::Hyperbolic, Curvature::Constant(0.0), (0.0, 1.0))
            .with_frame(BaseFrame { l: [1.0, 0.0, 0.0], t: [0.0, 0.0, 1.0], n: [0.0, 1.0, 0.0] });
        assert!(matches!(integrate_spherical(spec), Err(Error::Frame(_))));
    }

    #[test]
    fn perturbed_frame_defect_is_first_order() {
        let c = integrate_spherical(SphericalCurveSpec::new(SurfaceKind::Elliptic, Curvature::Constant(0.5), (0.0, 1.0))).unwrap();
        let delta = 1e-6;
        let mut samples = c.samples().to_vec();
        let s = &mut samples[400];
        for k in 0..3 {
            s.l[k] += delta * s.t[k];
        }
        let d = gram_defect_of(SurfaceKind::Elliptic, &samples);
        assert!(close(d, delta, 1e-11), "{d}");
    }
}
