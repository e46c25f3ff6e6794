//! Finite-difference Laplacian of the Gauss map, computed from the definition
//! and used as an independent check of the closed form.
//!
//! With `x = d/du` and `y = (1/f) d/dv`, the tangential parts of the Gauss
//! formulas give `nabla_x x = 0` and `nabla_y y = -(f'/f) x`, so
//!
//! ```text
//! Delta G = -G_uu - G_vv / f^2 - (f'/f) G_u
//! ```
//!
//! in ambient bivector coordinates. The full derivation is in
//! `docs/derivations.md`. Derivatives are three-point central differences
//! (the five-point cross stencil in the `(u, v)` plane); the `v` step is
//! `h / f` so both directions use the same arc-length step.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::SampleGrid;
use crate::minkowski::Bivector;
use crate::surface::MeridianSurface;

pub const DEFAULT_FD_STEP: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LaplacianReport {
    pub u: f64,
    pub v: f64,
    pub closed_form: Bivector,
    pub finite_diff: Bivector,
    /// Max-abs coordinate difference.
    pub defect: f64,
    pub h: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LaplacianComparison {
    pub h: f64,
    pub max_defect: f64,
    pub reports: Vec<LaplacianReport>,
}

/// `Delta G` at `(u, v)` by central differences with arc-length step `h`.
pub fn laplacian_fd(s: &MeridianSurface, u: f64, v: f64, h: f64) -> Result<Bivector> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("finite-difference step must be positive, got {h}")));
    }
    let jet = s.jet(u)?;
    let hv = h / jet.f;
    let (u0, u1) = s.u_domain();
    let (v0, v1) = s.v_domain();
    if u - 2.0 * h < u0 || u + 2.0 * h > u1 || v - 2.0 * hv < v0 || v + 2.0 * hv > v1 {
        return Err(Error::Domain(format!("(u, v) = ({u}, {v}) closer than 2 steps to the boundary (h = {h}, h_v = {hv})")));
    }
    let g = s.gauss_map(u, v)?;
    let gu_plus = s.gauss_map(u + h, v)?;
    let gu_minus = s.gauss_map(u - h, v)?;
    let gv_plus = s.gauss_map(u, v + hv)?;
    let gv_minus = s.gauss_map(u, v - hv)?;
    let g_uu = (gu_plus - 2.0 * g + gu_minus) * (1.0 / (h * h));
    let g_u = (gu_plus - gu_minus) * (0.5 / h);
    // (G(v + h/f) - 2 G + G(v - h/f)) / h^2 is already G_vv / f^2
    let g_vv_over_f2 = (gv_plus - 2.0 * g + gv_minus) * (1.0 / (h * h));
    Ok(-g_uu - g_vv_over_f2 - (jet.df / jet.f) * g_u)
}

pub fn laplacian_report(s: &MeridianSurface, u: f64, v: f64, h: f64) -> Result<LaplacianReport> {
    let closed_form = s.laplacian_closed(u, v)?;
    let finite_diff = laplacian_fd(s, u, v, h)?;
    Ok(LaplacianReport { u, v, closed_form, finite_diff, defect: closed_form.max_abs_diff(&finite_diff), h })
}

/// Closed form against the oracle at every grid point.
pub fn compare_laplacians(s: &MeridianSurface, grid: &SampleGrid, h: f64) -> Result<LaplacianComparison> {
    let reports = grid
        .points()
        .into_par_iter()
        .map(|(u, v)| laplacian_report(s, u, v, h))
        .collect::<Result<Vec<_>>>()?;
    let max_defect = reports.iter().map(|r| r.defect).fold(0.0, f64::max);
    Ok(LaplacianComparison { h, max_defect, reports })
}
