//! JSON surface configurations (`"schema": 1`) and tolerance files.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::classify::Tolerances;
use crate::curves::{integrate_spherical, make_profile, BaseFrame, Curvature, ProfileCurve, SphericalCurveSpec, SurfaceKind, DEFAULT_FRENET_STEP};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampleGrid};
use crate::ode::{constant_q_profile, OdeCase, OdeRequest};
use crate::polynomial::Polynomial;
use crate::surface::MeridianSurface;

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming a tolerance file; takes precedence over `--tol-file`.
pub const TOL_ENV: &str = "MERIDIAN_LAB_TOL";

/// Accepted slack in `a^2 - b^2 = 1` / `a^2 + b^2 = 1` for linear profiles.
const LINEAR_SLOPE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub schema: u32,
    pub kind: SurfaceKind,
    pub profile: ProfileSpec,
    pub base: BaseSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_domain: Option<(f64, f64)>,
    #[serde(default)]
    pub grid: GridSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    /// `phi(u) = sum coeffs[k] u^k`, with `f(0) = f0`, `g(0) = g0`.
    SlopeAnglePolynomial {
        coeffs: Vec<f64>,
        #[serde(default = "one")]
        f0: f64,
        #[serde(default)]
        g0: f64,
    },
    /// `f = a`, `g = g_slope u + b`, `g_slope = +-1` (hyperbolic only).
    ConstantF { a: f64, g_slope: f64, b: f64 },
    /// `f = a u + a1`, `g = b u + b1`.
    Linear { a: f64, a1: f64, b: f64, b1: f64 },
    /// Profile integrated from one of the classifying ODEs.
    OdeSolution {
        case: OdeCase,
        #[serde(default)]
        params: OdeRequest,
    },
    /// `f kappa_m = a` with `f(0) = f0`, `phi(0) = phi0`, integrated on `u_domain`.
    ConstantFKappaM {
        f0: f64,
        phi0: f64,
        a: f64,
        #[serde(default = "default_step")]
        step: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn default_step() -> f64 {
    1e-3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KappaSpec {
    Constant(f64),
    Polynomial { polynomial: Vec<f64> },
}

impl KappaSpec {
    pub fn curvature(&self) -> Curvature {
        match self {
            KappaSpec::Constant(k) => Curvature::Constant(*k),
            KappaSpec::Polynomial { polynomial } => Curvature::Polynomial(Polynomial::new(polynomial.clone())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseSpec {
    pub kappa: KappaSpec,
    #[serde(default)]
    pub initial_frame: BaseFrame,
    #[serde(default = "default_v_domain")]
    pub v_domain: (f64, f64),
    #[serde(default = "default_frenet_step")]
    pub step: f64,
}

fn default_v_domain() -> (f64, f64) {
    (0.0, 3.0)
}

fn default_frenet_step() -> f64 {
    DEFAULT_FRENET_STEP
}

/// 1-based line of the first occurrence of `"key"` in `text`.
fn line_of(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

fn locate(text: &str, path: &str) -> String {
    let key = path.rsplit('.').find(|k| !k.is_empty() && !k.starts_with('[')).unwrap_or(path);
    match line_of(text, key) {
        Some(line) => format!("line {line}, field {path}"),
        None => format!("field {path}"),
    }
}

/// Deserializes JSON, reporting the failing field path and line.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let location = if path.is_empty() || path == "." {
            format!("line {}, column {}", inner.line(), inner.column())
        } else {
            format!("line {}, column {}, field {path}", inner.line(), inner.column())
        };
        let message = inner.to_string();
        let suffix = format!(" at line {} column {}", inner.line(), inner.column());
        Error::config(location, message.strip_suffix(&suffix).unwrap_or(&message))
    })
}

impl SurfaceConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SurfaceConfig = parse_json(text)?;
        if cfg.schema != SCHEMA_VERSION {
            return Err(Error::config(locate(text, "schema"), format!("unsupported schema {} (expected {SCHEMA_VERSION})", cfg.schema)));
        }
        cfg.validate().map_err(|e| match e {
            Error::Config { location, message } => Error::config(locate(text, &location), message),
            other => other,
        })?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn validate(&self) -> Result<()> {
        if let Some((a, b)) = self.u_domain {
            if !(a < b) {
                return Err(Error::config("u_domain", format!("[{a}, {b}] is not an increasing interval")));
            }
        }
        let (v0, v1) = self.base.v_domain;
        if !(v0 < v1) {
            return Err(Error::config("base.v_domain", format!("[{v0}, {v1}] is not an increasing interval")));
        }
        if self.grid.nu == 0 || self.grid.nv == 0 || !(self.grid.margin >= 0.0) {
            return Err(Error::config("grid", "nu, nv must be positive and margin non-negative"));
        }
        if let ProfileSpec::OdeSolution { case, .. } = &self.profile {
            if case.kind() != self.kind {
                return Err(Error::config("profile.case", format!("{} does not match kind {}", case.as_str(), self.kind.as_str())));
            }
        }
        if !matches!(self.profile, ProfileSpec::OdeSolution { .. }) && self.u_domain.is_none() {
            return Err(Error::config("u_domain", "required for closed-form profiles"));
        }
        Ok(())
    }

    pub fn profile(&self) -> Result<ProfileCurve> {
        let kind = self.kind;
        let loc = |field: &str| format!("profile.{field}");
        match &self.profile {
            ProfileSpec::SlopeAnglePolynomial { coeffs, f0, g0 } => {
                if coeffs.is_empty() {
                    return Err(Error::config(loc("coeffs"), "need at least one coefficient"));
                }
                make_profile(kind, Polynomial::new(coeffs.clone()), *f0, *g0, self.u_domain.expect("validated"))
            }
            ProfileSpec::ConstantF { a, g_slope, b } => {
                if kind != SurfaceKind::Hyperbolic {
                    return Err(Error::config(loc("type"), "constant_f profiles exist only for the hyperbolic kind (elliptic needs |f'| >= 1)"));
                }
                if (g_slope.abs() - 1.0).abs() > LINEAR_SLOPE_TOL {
                    return Err(Error::config(loc("g_slope"), format!("must be +1 or -1, got {g_slope}")));
                }
                let phi = std::f64::consts::FRAC_PI_2.copysign(*g_slope);
                make_profile(kind, Polynomial::constant(phi), *a, *b, self.u_domain.expect("validated"))
            }
            ProfileSpec::Linear { a, a1, b, b1 } => {
                let phi = match kind {
                    SurfaceKind::Elliptic => {
                        if (a * a - b * b - 1.0).abs() > LINEAR_SLOPE_TOL {
                            return Err(Error::config(loc("a"), format!("elliptic linear profile needs a^2 - b^2 = 1, got {}", a * a - b * b)));
                        }
                        if *a < 0.0 {
                            return Err(Error::config(loc("a"), "only the f' >= 1 branch is supported"));
                        }
                        b.asinh()
                    }
                    SurfaceKind::Hyperbolic => {
                        if (a * a + b * b - 1.0).abs() > LINEAR_SLOPE_TOL {
                            return Err(Error::config(loc("a"), format!("hyperbolic linear profile needs a^2 + b^2 = 1, got {}", a * a + b * b)));
                        }
                        b.atan2(*a)
                    }
                };
                make_profile(kind, Polynomial::constant(phi), *a1, *b1, self.u_domain.expect("validated"))
            }
            ProfileSpec::OdeSolution { case, params } => {
                let mut req = params.clone();
                if let Some(span) = self.u_domain {
                    req.u_span = span;
                }
                req.solve(*case)?.to_profile()
            }
            ProfileSpec::ConstantFKappaM { f0, phi0, a, step } => {
                constant_q_profile(kind, *f0, *phi0, *a, self.u_domain.expect("validated"), *step)
            }
        }
    }

    pub fn base_spec(&self) -> SphericalCurveSpec {
        SphericalCurveSpec::new(self.kind, self.base.kappa.curvature(), self.base.v_domain)
            .with_frame(self.base.initial_frame)
            .with_step(self.base.step)
    }

    pub fn build(&self) -> Result<MeridianSurface> {
        let profile = self.profile()?;
        let base = integrate_spherical(self.base_spec())?;
        MeridianSurface::new(profile, base)
    }

    pub fn sample_grid(&self, s: &MeridianSurface) -> Result<SampleGrid> {
        SampleGrid::resolve(&self.grid, s.u_domain(), s.v_domain())
    }
}

/// Tolerance ladder: `MERIDIAN_LAB_TOL` if set, else `file`, else defaults.
pub fn load_tolerances(file: Option<&Path>) -> Result<Tolerances> {
    let env = std::env::var_os(TOL_ENV).filter(|v| !v.is_empty());
    let path = env.as_deref().map(Path::new).or(file);
    let Some(path) = path else {
        return Ok(Tolerances::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let tol: Tolerances = parse_json(&text)?;
    tol.validate()?;
    Ok(tol)
}
