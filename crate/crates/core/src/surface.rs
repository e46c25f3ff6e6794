//! Meridian surfaces `z(u, v) = f(u) l(v) + g(u) a`, with `a = e4` (elliptic)
//! or `a = e1` (hyperbolic), their adapted frames and the closed-form
//! Laplacian of the Gauss map.
//!
//! The first fundamental form is `E = 1, F = 0` and `metric_coefficient = f^2`;
//! the Gauss map is `x ^ y` with `x = z_u`, `y = z_v / f`.

use serde::Serialize;

use crate::curves::{ProfileCurve, ProfileJet, SphericalCurve, SurfaceKind};
use crate::error::{Error, Result};
use crate::minkowski::{orthonormality_defect, Bivector, Isometry, SpacetimeVector};

/// Adapted frame `{x, y, n1, n2}` with signs `(+, +, +, -)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrameAtPoint {
    pub u: f64,
    pub v: f64,
    pub x: SpacetimeVector,
    pub y: SpacetimeVector,
    pub n1: SpacetimeVector,
    pub n2: SpacetimeVector,
}

pub const FRAME_SIGNS: [f64; 4] = [1.0, 1.0, 1.0, -1.0];

impl FrameAtPoint {
    pub fn vectors(&self) -> [SpacetimeVector; 4] {
        [self.x, self.y, self.n1, self.n2]
    }

    pub fn orthonormality_defect(&self) -> f64 {
        orthonormality_defect(&self.vectors(), &FRAME_SIGNS)
    }

    /// The six wedges `x^y, x^n1, x^n2, y^n1, y^n2, n1^n2`.
    pub fn bivector_frame(&self) -> [Bivector; 6] {
        let (x, y, n1, n2) = (self.x, self.y, self.n1, self.n2);
        [x.wedge(&y), x.wedge(&n1), x.wedge(&n2), y.wedge(&n1), y.wedge(&n2), n1.wedge(&n2)]
    }
}

/// Everything needed at one point: profile jet, base curvature and frame.
#[derive(Clone, Copy, Debug)]
pub struct PointData {
    pub jet: ProfileJet,
    pub kappa: f64,
    pub dkappa: f64,
    pub frame: FrameAtPoint,
}

#[derive(Clone, Debug)]
pub struct MeridianSurface {
    kind: SurfaceKind,
    profile: ProfileCurve,
    base: SphericalCurve,
    isometry: Isometry,
}

impl MeridianSurface {
    pub fn new(profile: ProfileCurve, base: SphericalCurve) -> Result<Self> {
        if profile.kind() != base.kind() {
            return Err(Error::Domain(format!(
                "profile is {} but base curve is {}",
                profile.kind().as_str(),
                base.kind().as_str()
            )));
        }
        Ok(MeridianSurface { kind: profile.kind(), profile, base, isometry: Isometry::identity() })
    }

    /// The same surface moved by an ambient isometry; all vectors, points and
    /// bivectors returned afterwards are the transformed ones.
    pub fn with_isometry(mut self, iso: Isometry) -> Self {
        self.isometry = iso.compose(&self.isometry);
        self
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn profile(&self) -> &ProfileCurve {
        &self.profile
    }

    pub fn base(&self) -> &SphericalCurve {
        &self.base
    }

    pub fn isometry(&self) -> &Isometry {
        &self.isometry
    }

    pub fn u_domain(&self) -> (f64, f64) {
        self.profile.u_domain()
    }

    pub fn v_domain(&self) -> (f64, f64) {
        self.base.v_domain()
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        self.profile.contains(u) && self.base.contains(v)
    }

    pub fn jet(&self, u: f64) -> Result<ProfileJet> {
        self.profile.jet(u)
    }

    /// `G = f^2`, the only non-trivial coefficient of the first fundamental form.
    pub fn metric_coefficient(&self, u: f64) -> Result<f64> {
        Ok(self.jet(u)?.f.powi(2))
    }

    pub fn point_data(&self, u: f64, v: f64) -> Result<PointData> {
        let jet = self.profile.jet(u)?;
        let bf = self.base.frame_at(v)?;
        let kappa = self.base.kappa().eval(v);
        let dkappa = self.base.kappa().derivative(v);
        let kind = self.kind;
        let l = kind.embed(bf.l);
        let t = kind.embed(bf.t);
        let n = kind.embed(bf.n);
        let a = kind.axis();
        let (x, n1, n2) = match kind {
            SurfaceKind::Elliptic => (jet.df * l + jet.dg * a, n, jet.dg * l + jet.df * a),
            SurfaceKind::Hyperbolic => (jet.df * l + jet.dg * a, jet.dg * l - jet.df * a, n),
        };
        let iso = &self.isometry;
        let frame = FrameAtPoint {
            u,
            v,
            x: iso.apply_vector(&x),
            y: iso.apply_vector(&t),
            n1: iso.apply_vector(&n1),
            n2: iso.apply_vector(&n2),
        };
        Ok(PointData { jet, kappa, dkappa, frame })
    }

    pub fn immersion(&self, u: f64, v: f64) -> Result<SpacetimeVector> {
        let jet = self.profile.jet(u)?;
        let bf = self.base.frame_at(v)?;
        let z = jet.f * self.kind.embed(bf.l) + jet.g * self.kind.axis();
        Ok(self.isometry.apply_point(&z))
    }

    pub fn frame(&self, u: f64, v: f64) -> Result<FrameAtPoint> {
        Ok(self.point_data(u, v)?.frame)
    }

    pub fn mean_curvature_vector(&self, u: f64, v: f64) -> Result<SpacetimeVector> {
        Ok(mean_curvature_from(self.kind, &self.point_data(u, v)?))
    }

    pub fn gauss_map(&self, u: f64, v: f64) -> Result<Bivector> {
        let fr = self.frame(u, v)?;
        Ok(fr.x.wedge(&fr.y))
    }

    pub fn laplacian_closed(&self, u: f64, v: f64) -> Result<Bivector> {
        Ok(laplacian_from(self.kind, &self.point_data(u, v)?))
    }

    /// Finite-difference residuals of the eight frame derivative formulas at
    /// `(u, v)` with central step `h`, in the order
    /// `x_x, x_y, y_x, y_y, n1_x, n1_y, n2_x, n2_y` where `a_b` means the
    /// ambient derivative of `a` along `b`.
    pub fn frame_equation_residuals(&self, u: f64, v: f64, h: f64) -> Result<[f64; 8]> {
        let p = self.point_data(u, v)?;
        let fr = &p.frame;
        let (f, df, dg, km, k) = (p.jet.f, p.jet.df, p.jet.dg, p.jet.kappa_m, p.kappa);
        let fu_plus = self.frame(u + h, v)?;
        let fu_minus = self.frame(u - h, v)?;
        let fv_plus = self.frame(u, v + h)?;
        let fv_minus = self.frame(u, v - h)?;
        let du = |a: SpacetimeVector, b: SpacetimeVector| (a - b) * (0.5 / h);
        let dv = |a: SpacetimeVector, b: SpacetimeVector| (a - b) * (0.5 / (h * f));
        let zero = SpacetimeVector::ZERO;
        let predicted: [SpacetimeVector; 8] = match self.kind {
            SurfaceKind::Elliptic => [
                km * fr.n2,
                zero,
                (df / f) * fr.y,
                (-df / f) * fr.x + (k / f) * fr.n1 + (dg / f) * fr.n2,
                zero,
                (-k / f) * fr.y,
                km * fr.x,
                (dg / f) * fr.y,
            ],
            SurfaceKind::Hyperbolic => [
                -km * fr.n1,
                zero,
                (df / f) * fr.y,
                (-df / f) * fr.x - (dg / f) * fr.n1 - (k / f) * fr.n2,
                km * fr.x,
                (dg / f) * fr.y,
                zero,
                (-k / f) * fr.y,
            ],
        };
        let measured = [
            du(fu_plus.x, fu_minus.x),
            du(fu_plus.y, fu_minus.y),
            dv(fv_plus.x, fv_minus.x),
            dv(fv_plus.y, fv_minus.y),
            du(fu_plus.n1, fu_minus.n1),
            dv(fv_plus.n1, fv_minus.n1),
            du(fu_plus.n2, fu_minus.n2),
            dv(fv_plus.n2, fv_minus.n2),
        ];
        Ok(std::array::from_fn(|i| (measured[i] - predicted[i]).max_abs()))
    }
}

/// Names of the entries of [`MeridianSurface::frame_equation_residuals`].
pub const FRAME_EQUATION_NAMES: [&str; 8] = ["D_x x", "D_x y", "D_y x", "D_y y", "D_x n1", "D_y n1", "D_x n2", "D_y n2"];

/// `H = 1/2 tr sigma`, read off the normal parts of `D_x x` and `D_y y`.
pub fn mean_curvature_from(kind: SurfaceKind, p: &PointData) -> SpacetimeVector {
    let (f, dg, km, k) = (p.jet.f, p.jet.dg, p.jet.kappa_m, p.kappa);
    let fr = &p.frame;
    match kind {
        SurfaceKind::Elliptic => 0.5 * ((k / f) * fr.n1 + (km + dg / f) * fr.n2),
        SurfaceKind::Hyperbolic => -0.5 * ((km + dg / f) * fr.n1 + (k / f) * fr.n2),
    }
}

/// Coefficients of `Delta G` on the moving bivector frame
/// `[x^y, x^n1, x^n2, y^n1, y^n2, n1^n2]`.
pub fn laplacian_frame_coefficients(kind: SurfaceKind, p: &PointData) -> [f64; 6] {
    let j = &p.jet;
    let (f, df, dg, km, dq) = (j.f, j.df, j.dg, j.kappa_m, j.d_f_kappa_m);
    let (k, dk) = (p.kappa, p.dkappa);
    let f2 = f * f;
    let xy = (k * k - dg * dg - f2 * km * km) / f2;
    let yn = (f * dq - df * dg) / f2;
    match kind {
        SurfaceKind::Elliptic => [xy, -dk / f2, 0.0, -k * df / f2, yn, 0.0],
        SurfaceKind::Hyperbolic => [-xy, 0.0, dk / f2, -yn, k * df / f2, 0.0],
    }
}

pub fn laplacian_from(kind: SurfaceKind, p: &PointData) -> Bivector {
    let coeffs = laplacian_frame_coefficients(kind, p);
    let basis = p.frame.bivector_frame();
    coeffs.iter().zip(basis.iter()).fold(Bivector::ZERO, |acc, (c, b)| if *c == 0.0 { acc } else { acc + *c * *b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{integrate_spherical, make_profile, Curvature, SphericalCurveSpec};
    use crate::polynomial::Polynomial;
    use std::f64::consts::FRAC_PI_2;

    fn surface(kind: SurfaceKind, phi: Vec<f64>, f0: f64, g0: f64, u: (f64, f64), kappa: f64) -> MeridianSurface {
        let p = make_profile(kind, Polynomial::new(phi), f0, g0, u).unwrap();
        let c = integrate_spherical(SphericalCurveSpec::new(kind, Curvature::Constant(kappa), (0.0, 2.0))).unwrap();
        MeridianSurface::new(p, c).unwrap()
    }

    #[test]
    fn elliptic_plane_point() {
        let s = surface(SurfaceKind::Elliptic, vec![0.0], 1.0, 0.0, (0.0, 1.0), 0.0);
        assert_eq!(s.immersion(0.0, 0.0).unwrap(), SpacetimeVector::new(1.0, 0.0, 0.0, 0.0));
        let fr = s.frame(0.3, 0.7).unwrap();
        assert_eq!(fr.n2, SpacetimeVector::basis(4));
        assert_eq!(s.mean_curvature_vector(0.5, 1.0).unwrap(), SpacetimeVector::ZERO);
        assert_eq!(s.laplacian_closed(0.5, 1.0).unwrap(), Bivector::ZERO);
        let g = s.gauss_map(0.2, 0.0).unwrap();
        assert!((g.0[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hyperbolic_constant_f_frame() {
        let s = surface(SurfaceKind::Hyperbolic, vec![FRAC_PI_2], 1.0, 0.0, (0.0, 1.0), 2.0);
        let fr = s.frame(0.4, 0.9).unwrap();
        assert!((fr.x - SpacetimeVector::basis(1)).max_abs() < 1e-15);
        let l = s.kind().embed(s.base().frame_at(0.9).unwrap().l);
        assert!((fr.n1 - l).max_abs() < 1e-15);
        let g = s.gauss_map(0.4, 0.9).unwrap();
        assert!((g.norm_sqr() - 1.0).abs() < 1e-12);
        // Delta G = (1 - kappa^2)/a^2 x^y = -3 x^y
        let lap = s.laplacian_closed(0.4, 0.9).unwrap();
        assert!(lap.max_abs_diff(&(-3.0 * g)) < 1e-14);
    }

    #[test]
    fn elliptic_cone_laplacian_anchor() {
        // f = u, g const, kappa = 2 at u = 1: 4 x^y - 2 y^n1
        let s = surface(SurfaceKind::Elliptic, vec![0.0], 0.0, 0.3, (1.0, 2.0), 2.0);
        let fr = s.frame(1.0, 0.5).unwrap();
        let expected = 4.0 * fr.x.wedge(&fr.y) - 2.0 * fr.y.wedge(&fr.n1);
        assert!(s.laplacian_closed(1.0, 0.5).unwrap().max_abs_diff(&expected) < 1e-13);
    }

    #[test]
    fn frame_is_orthonormal_and_gauss_map_unit() {
        for kind in [SurfaceKind::Elliptic, SurfaceKind::Hyperbolic] {
            let s = surface(kind, vec![0.4, 0.3, -0.2, 0.1], 2.0, 0.0, (0.0, 1.0), -1.3)
                .with_isometry(Isometry::boost(2, 0.5).compose(&Isometry::rotation(1, 3, 0.8)));
            for &(u, v) in &[(0.1, 0.2), (0.5, 1.0), (0.9, 1.9)] {
                let fr = s.frame(u, v).unwrap();
                assert!(fr.orthonormality_defect() < 1e-9);
                let g = s.gauss_map(u, v).unwrap();
                assert!((g.norm_sqr() - 1.0).abs() < 1e-9);
                assert!(g.dot(&fr.x.wedge(&fr.n1)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tangent_vectors_match_immersion_derivatives() {
        for kind in [SurfaceKind::Elliptic, SurfaceKind::Hyperbolic] {
            let s = surface(kind, vec![0.2, -0.5, 0.3], 1.5, 0.2, (0.0, 1.0), 0.7);
            let h = 1e-4;
            let (u, v) = (0.6, 1.1);
            let zu = (s.immersion(u + h, v).unwrap() - s.immersion(u - h, v).unwrap()) * (0.5 / h);
            let zv = (s.immersion(u, v + h).unwrap() - s.immersion(u, v - h).unwrap()) * (0.5 / h);
            let f = s.jet(u).unwrap().f;
            let fr = s.frame(u, v).unwrap();
            assert!((zu - fr.x).max_abs() < 1e-7);
            assert!((zv - f * fr.y).max_abs() < 1e-7);
            assert!((zu.norm_sqr() - 1.0).abs() < 1e-7);
            assert!(zu.dot(&zv).abs() < 1e-7);
            assert!((zv.norm_sqr() / s.metric_coefficient(u).unwrap() - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn mixed_kinds_are_rejected() {
        let p = make_profile(SurfaceKind::Elliptic, Polynomial::constant(0.0), 1.0, 0.0, (0.0, 1.0)).unwrap();
        let c = integrate_spherical(SphericalCurveSpec::new(SurfaceKind::Hyperbolic, Curvature::Constant(0.0), (0.0, 1.0))).unwrap();
        assert!(MeridianSurface::new(p, c).is_err());
    }
}
