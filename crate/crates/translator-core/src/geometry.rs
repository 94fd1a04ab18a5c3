//! Differential geometry on the discrete graph parametrizations: normals,
//! mean curvature, |A|^2, the rotation function, and profile revolution.
//!
//! Conventions (see `CONVENTION_VERSION`):
//! - the reported normal on cylindrical graphs is outward (positive radial
//!   component on near-cylinders); on vertical graphs it points upward
//!   (`<nu, tau> > 0`);
//! - `H` is the sum of the principal curvatures, signed so that the round
//!   cylinder of radius R has `H = 1/R` and the bowl-shaped sphere cap of
//!   radius R has `H = 2/R`. On a translator this is the `H` of
//!   `H = <tau, nu>` with the upward normal; against the reported outward
//!   normal of a cylindrical graph the translator identity reads
//!   `H = <tau, -nu>`.
//!
//! All derivatives are second-order central differences; theta uses periodic
//! stencils. Boundary bands in z are excluded rather than extrapolated.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{CylGrid, CylindricalGraphField, ProfileCurve, ProfileData, VerticalGraphField};

/// Number of z-cells a node must keep from the boundary for curvature stencils.
pub const BOUNDARY_MARGIN: usize = 2;

/// Horizontal offset of a candidate symmetry axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisOffset {
    pub x0: f64,
    pub y0: f64,
}

impl AxisOffset {
    pub const ORIGIN: AxisOffset = AxisOffset { x0: 0.0, y0: 0.0 };

    pub fn new(x0: f64, y0: f64) -> Result<Self> {
        if !x0.is_finite() || !y0.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "axis offset must be finite, got ({x0}, {y0})"
            )));
        }
        Ok(Self { x0, y0 })
    }

    pub fn norm(&self) -> f64 {
        self.x0.hypot(self.y0)
    }
}

/// Pointwise geometric data of a parametrized surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfacePointData {
    pub position: [f64; 3],
    /// Unit normal; outward for cylindrical graphs, upward for vertical graphs.
    pub normal: [f64; 3],
    /// Mean curvature (sum of principal curvatures, cylinder-positive).
    pub mean_curvature: f64,
    /// Squared norm of the second fundamental form.
    pub second_form_sq: f64,
}

fn check_margin(grid: &CylGrid, i: usize, j: usize) -> Result<()> {
    if i < BOUNDARY_MARGIN || i + BOUNDARY_MARGIN >= grid.n_z {
        return Err(Error::BoundaryProximity {
            i,
            j,
            cells: BOUNDARY_MARGIN,
        });
    }
    Ok(())
}

/// Central-difference derivative package of `r` at an interior node.
pub(crate) struct CylDerivs {
    pub r: f64,
    pub r_z: f64,
    pub r_t: f64,
    pub r_zz: f64,
    pub r_tt: f64,
    pub r_zt: f64,
}

pub(crate) fn cyl_derivs(field: &CylindricalGraphField, i: usize, j: usize) -> Result<CylDerivs> {
    let grid = &field.grid;
    check_margin(grid, i, j)?;
    let (dz, dt) = (grid.dz(), grid.dtheta());
    let ji = j as isize;
    let r = field.r(i, j);
    let (rp, rm) = (field.r(i + 1, j), field.r(i - 1, j));
    let (rtp, rtm) = (field.r_wrap(i, ji + 1), field.r_wrap(i, ji - 1));
    let d = CylDerivs {
        r,
        r_z: (rp - rm) / (2.0 * dz),
        r_t: (rtp - rtm) / (2.0 * dt),
        r_zz: (rp - 2.0 * r + rm) / (dz * dz),
        r_tt: (rtp - 2.0 * r + rtm) / (dt * dt),
        r_zt: (field.r_wrap(i + 1, ji + 1) - field.r_wrap(i + 1, ji - 1)
            - field.r_wrap(i - 1, ji + 1)
            + field.r_wrap(i - 1, ji - 1))
            / (4.0 * dz * dt),
    };
    for v in [d.r, d.r_z, d.r_t, d.r_zz, d.r_tt, d.r_zt] {
        if !v.is_finite() {
            return Err(Error::NonFinite { i, j });
        }
    }
    Ok(d)
}

/// Normal, mean curvature and |A|^2 of the cylindrical graph at node `(i, j)`.
pub fn normal_and_curvature_cylindrical(
    field: &CylindricalGraphField,
    i: usize,
    j: usize,
) -> Result<SurfacePointData> {
    let d = cyl_derivs(field, i, j)?;
    let grid = &field.grid;
    let (z, th) = (grid.z(i), grid.theta(j));
    let (ct, st) = (th.cos(), th.sin());
    let CylDerivs {
        r,
        r_z,
        r_t,
        r_zz,
        r_tt,
        r_zt,
    } = d;

    // first fundamental form in (z, theta)
    let e1 = 1.0 + r_z * r_z;
    let f1 = r_z * r_t;
    let g1 = r * r + r_t * r_t;
    let w2 = r * r * e1 + r_t * r_t; // = EG - F^2
    let w = w2.sqrt();

    // second fundamental form against the outward normal
    let e2 = r * r_zz / w;
    let f2 = (r * r_zt - r_z * r_t) / w;
    let g2 = (r * (r_tt - r) - 2.0 * r_t * r_t) / w;

    // cylinder-positive sign: flip the trace taken against the outward normal
    let h = -(e2 * g1 - 2.0 * f2 * f1 + g2 * e1) / w2;

    // |A|^2 = tr(S^2), S = I^{-1} II (sign-independent)
    let s11 = (g1 * e2 - f1 * f2) / w2;
    let s12 = (g1 * f2 - f1 * g2) / w2;
    let s21 = (e1 * f2 - f1 * e2) / w2;
    let s22 = (e1 * g2 - f1 * f2) / w2;
    let a2 = s11 * s11 + 2.0 * s12 * s21 + s22 * s22;

    let normal = [
        (r * ct + r_t * st) / w,
        (r * st - r_t * ct) / w,
        -r * r_z / w,
    ];
    Ok(SurfacePointData {
        position: [r * ct, r * st, z],
        normal,
        mean_curvature: h,
        second_form_sq: a2,
    })
}

/// Normal, mean curvature and |A|^2 of the vertical graph at node `(i, j)`.
pub fn normal_and_curvature_vertical(
    field: &VerticalGraphField,
    i: usize,
    j: usize,
) -> Result<SurfacePointData> {
    let grid = &field.grid;
    if i < BOUNDARY_MARGIN || i + BOUNDARY_MARGIN >= grid.n_s {
        return Err(Error::BoundaryProximity {
            i,
            j,
            cells: BOUNDARY_MARGIN,
        });
    }
    let (ds, dt) = (grid.ds(), grid.dtheta());
    let ji = j as isize;
    let s = grid.s(i);
    let th = grid.theta(j);
    let (ct, st) = (th.cos(), th.sin());
    let h0 = field.h(i, j);
    let (hp, hm) = (field.h(i + 1, j), field.h(i - 1, j));
    let (htp, htm) = (field.h_wrap(i, ji + 1), field.h_wrap(i, ji - 1));
    let h_s = (hp - hm) / (2.0 * ds);
    let h_t = (htp - htm) / (2.0 * dt);
    let h_ss = (hp - 2.0 * h0 + hm) / (ds * ds);
    let h_tt = (htp - 2.0 * h0 + htm) / (dt * dt);
    let h_st = (field.h_wrap(i + 1, ji + 1) - field.h_wrap(i + 1, ji - 1)
        - field.h_wrap(i - 1, ji + 1)
        + field.h_wrap(i - 1, ji - 1))
        / (4.0 * ds * dt);
    for v in [h0, h_s, h_t, h_ss, h_tt, h_st] {
        if !v.is_finite() {
            return Err(Error::NonFinite { i, j });
        }
    }

    // polar -> Cartesian gradient and Hessian
    let hx = h_s * ct - h_t * st / s;
    let hy = h_s * st + h_t * ct / s;
    let radial2 = h_s / s + h_tt / (s * s);
    let mixed = h_st / s - h_t / (s * s);
    let hxx = ct * ct * h_ss + st * st * radial2 - 2.0 * st * ct * mixed;
    let hyy = st * st * h_ss + ct * ct * radial2 + 2.0 * st * ct * mixed;
    let hxy = st * ct * (h_ss - radial2) + (ct * ct - st * st) * mixed;

    let w2 = 1.0 + hx * hx + hy * hy;
    let w = w2.sqrt();
    let h_mean = ((1.0 + hy * hy) * hxx - 2.0 * hx * hy * hxy + (1.0 + hx * hx) * hyy) / (w2 * w);

    // shape operator S = I^{-1} II with I = id + grad h (x) grad h, II = Hess/w
    let det_i = w2;
    let i11 = (1.0 + hy * hy) / det_i;
    let i12 = -(hx * hy) / det_i;
    let i22 = (1.0 + hx * hx) / det_i;
    let (b11, b12, b22) = (hxx / w, hxy / w, hyy / w);
    let s11 = i11 * b11 + i12 * b12;
    let s12 = i11 * b12 + i12 * b22;
    let s21 = i12 * b11 + i22 * b12;
    let s22 = i12 * b12 + i22 * b22;
    let a2 = s11 * s11 + 2.0 * s12 * s21 + s22 * s22;

    Ok(SurfacePointData {
        position: [s * ct, s * st, h0],
        normal: [-hx / w, -hy / w, 1.0 / w],
        mean_curvature: h_mean,
        second_form_sq: a2,
    })
}

/// Rotation function `u = <J_{(x0,y0)}(position), nu>` with
/// `J = (x - x0) d/dy - (y - y0) d/dx`.
pub fn rotation_function(p: &SurfacePointData, axis: &AxisOffset) -> Result<f64> {
    let [x, y, _] = p.position;
    let [nx, ny, _] = p.normal;
    let u = -(y - axis.y0) * nx + (x - axis.x0) * ny;
    if !u.is_finite() {
        return Err(Error::InvalidArgument("non-finite rotation function".into()));
    }
    Ok(u)
}

/// Revolve a graph-in-z profile into an exactly axisymmetric cylindrical field.
pub fn revolve_profile(
    profile: &ProfileCurve,
    z_min: f64,
    z_max: f64,
    n_z: usize,
    n_theta: usize,
) -> Result<CylindricalGraphField> {
    let ProfileData::GraphInZ { .. } = profile.data else {
        return Err(Error::NotGraphical(
            "revolution requires a graph-in-z profile (necked profiles are rejected)".into(),
        ));
    };
    let grid = CylGrid::new(z_min, z_max, n_z, n_theta)?;
    let mut values = Vec::with_capacity(n_z * n_theta);
    for i in 0..n_z {
        let r = profile.eval_r(grid.z(i))?;
        for _ in 0..n_theta {
            values.push(r);
        }
    }
    CylindricalGraphField::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PolarGrid;

    fn cylinder_field(radius: f64, n_z: usize, n_theta: usize) -> CylindricalGraphField {
        let grid = CylGrid::new(0.0, 4.0, n_z, n_theta).unwrap();
        CylindricalGraphField::from_fn(grid, |_, _| radius).unwrap()
    }

    #[test]
    fn cylinder_sqrt2_closed_form() {
        let f = cylinder_field(2f64.sqrt(), 21, 32);
        let p = normal_and_curvature_cylindrical(&f, 10, 5).unwrap();
        assert!((p.mean_curvature - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!((p.second_form_sq - 0.5).abs() < 1e-12);
        // radial outward normal
        let th = f.grid.theta(5);
        assert!((p.normal[0] - th.cos()).abs() < 1e-12);
        assert!((p.normal[1] - th.sin()).abs() < 1e-12);
        assert!(p.normal[2].abs() < 1e-12);
    }

    #[test]
    fn cylinder_h_scaling() {
        for radius in [0.5, 1.0, 3.0] {
            let f = cylinder_field(radius, 15, 16);
            let p = normal_and_curvature_cylindrical(&f, 7, 3).unwrap();
            assert!((p.mean_curvature * radius - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cylinder_convergence_order() {
        // non-constant field so discretization error is non-trivial
        let errs: Vec<f64> = [65usize, 129, 257]
            .iter()
            .map(|&n| {
                let grid = CylGrid::new(4.0, 8.0, n, 32).unwrap();
                let f = CylindricalGraphField::from_fn(grid, |z, _| (2.0 * z).sqrt()).unwrap();
                let mut max_err = 0.0f64;
                for i in BOUNDARY_MARGIN..n - BOUNDARY_MARGIN {
                    let z = grid.z(i);
                    let p = normal_and_curvature_cylindrical(&f, i, 0).unwrap();
                    let fz = 1.0 / (2.0 * z).sqrt();
                    let fzz = -(2.0 * z).powf(-1.5);
                    let exact = 1.0 / ((2.0 * z).sqrt() * (1.0 + fz * fz).sqrt())
                        - fzz / (1.0 + fz * fz).powf(1.5);
                    max_err = max_err.max((p.mean_curvature - exact).abs());
                }
                max_err
            })
            .collect();
        let order1 = (errs[0] / errs[1]).log2();
        let order2 = (errs[1] / errs[2]).log2();
        assert!(order1 > 1.9, "order {order1}");
        assert!(order2 > 1.9, "order {order2}");
    }

    #[test]
    fn boundary_proximity_rejected() {
        let f = cylinder_field(1.0, 11, 8);
        assert!(normal_and_curvature_cylindrical(&f, 1, 0).is_err());
        assert!(normal_and_curvature_cylindrical(&f, 9, 0).is_err());
        assert!(normal_and_curvature_cylindrical(&f, 5, 0).is_ok());
    }

    #[test]
    fn vertical_plane_flat() {
        let grid = PolarGrid::new(1.0, 3.0, 21, 16).unwrap();
        let f = VerticalGraphField::from_fn(grid, |_, _| 7.5).unwrap();
        let p = normal_and_curvature_vertical(&f, 10, 4).unwrap();
        assert!(p.mean_curvature.abs() < 1e-12);
        assert!(p.second_form_sq.abs() < 1e-12);
        assert!((p.normal[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vertical_paraboloid_closed_form() {
        let grid = PolarGrid::new(0.5, 2.5, 201, 16).unwrap();
        let f = VerticalGraphField::from_fn(grid, |s, _| 0.5 * s * s).unwrap();
        for (i, j) in [(50, 0), (100, 5), (150, 11)] {
            let p = normal_and_curvature_vertical(&f, i, j).unwrap();
            let rho = grid.s(i);
            let expect = (2.0 + rho * rho) / (1.0 + rho * rho);
            let got = p.mean_curvature * (1.0 + rho * rho).sqrt();
            assert!((got - expect).abs() < 5e-4, "rho={rho}: {got} vs {expect}");
        }
    }

    #[test]
    fn vertical_sphere_cap_convention() {
        // bowl-shaped cap of the radius-2 sphere: H = 2/R = 1
        let grid = PolarGrid::new(0.2, 1.2, 401, 16).unwrap();
        let f = VerticalGraphField::from_fn(grid, |s, _| 5.0 - (4.0 - s * s).sqrt()).unwrap();
        let p = normal_and_curvature_vertical(&f, 200, 3).unwrap();
        assert!((p.mean_curvature - 1.0).abs() < 1e-4, "{}", p.mean_curvature);
        assert!((p.second_form_sq - 0.5).abs() < 1e-4);
        assert!(p.normal[2] > 0.0);
    }

    #[test]
    fn rotation_function_cylinder_closed_form() {
        let f = cylinder_field(2f64.sqrt(), 15, 64);
        let axis = AxisOffset::new(0.1, 0.0).unwrap();
        let mut sup = 0.0f64;
        for j in 0..64 {
            let p = normal_and_curvature_cylindrical(&f, 7, j).unwrap();
            let u = rotation_function(&p, &axis).unwrap();
            let th = f.grid.theta(j);
            let expect = axis.y0 * th.cos() - axis.x0 * th.sin();
            assert!((u - expect).abs() < 1e-10);
            sup = sup.max(u.abs());
        }
        assert!((sup - 0.1).abs() < 1e-3);
        // own axis: exact symmetry
        let p = normal_and_curvature_cylindrical(&f, 7, 9).unwrap();
        assert!(rotation_function(&p, &AxisOffset::ORIGIN).unwrap().abs() < 1e-14);
    }

    #[test]
    fn rotation_function_vertical_normal() {
        // nu parallel to tau has no horizontal component: u = 0
        let p = SurfacePointData {
            position: [3.0, -2.0, 1.0],
            normal: [0.0, 0.0, 1.0],
            mean_curvature: 0.0,
            second_form_sq: 0.0,
        };
        let u = rotation_function(&p, &AxisOffset::new(0.4, -0.7).unwrap()).unwrap();
        assert_eq!(u, 0.0);
    }

    #[test]
    fn rotation_function_linear_in_offset() {
        let grid = CylGrid::new(1.0, 5.0, 15, 16).unwrap();
        let f =
            CylindricalGraphField::from_fn(grid, |z, th| (2.0 * z).sqrt() + 0.01 * th.cos())
                .unwrap();
        let p = normal_and_curvature_cylindrical(&f, 7, 5).unwrap();
        let a = AxisOffset::new(0.3, -0.2).unwrap();
        let b = AxisOffset::new(-0.1, 0.5).unwrap();
        let ab = AxisOffset::new(a.x0 + b.x0, a.y0 + b.y0).unwrap();
        let (ua, ub) = (
            rotation_function(&p, &a).unwrap(),
            rotation_function(&p, &b).unwrap(),
        );
        let uab = rotation_function(&p, &ab).unwrap();
        let u0 = rotation_function(&p, &AxisOffset::ORIGIN).unwrap();
        assert!((uab - (ua + ub - u0)).abs() < 1e-13);
    }

    #[test]
    fn revolve_constant_profile() {
        let z: Vec<f64> = (0..21).map(|i| i as f64 * 0.2).collect();
        let r = vec![2f64.sqrt(); 21];
        let rz = vec![0.0; 21];
        let p = ProfileCurve::graph_in_z(z, r, rz).unwrap();
        let f = revolve_profile(&p, 0.5, 3.5, 11, 8).unwrap();
        for i in 0..11 {
            for j in 0..8 {
                assert!((f.r(i, j) - 2f64.sqrt()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn revolve_is_theta_independent() {
        let z: Vec<f64> = (0..41).map(|i| 1.0 + i as f64 * 0.1).collect();
        let r: Vec<f64> = z.iter().map(|&z| (2.0 * z).sqrt()).collect();
        let rz: Vec<f64> = z.iter().map(|&z| 1.0 / (2.0 * z).sqrt()).collect();
        let p = ProfileCurve::graph_in_z(z, r, rz).unwrap();
        let f = revolve_profile(&p, 1.2, 4.8, 13, 16).unwrap();
        for i in 0..13 {
            for j in 1..16 {
                assert_eq!(f.r(i, j), f.r(i, 0));
            }
        }
    }
}
