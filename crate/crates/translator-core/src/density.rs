//! Gaussian density and entropy estimates.
//!
//! The density of a surface `M` at center `x0` and scale `rho` is
//!
//! ```text
//! F(x0, rho) = (4 pi rho^2)^{-1} integral_M exp(-|x - x0|^2 / (4 rho^2)) dA,
//! ```
//!
//! computed by tensor-product quadrature with the integrand truncated at
//! `|x - x0| = 8 rho` (relative tail ~ e^{-16}). The entropy is the sup of
//! the density over centers and scales; a grid sweep gives a lower bound.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{CylindricalGraphField, VerticalGraphField};

/// Truncation radius in units of the scale.
const CUTOFF: f64 = 8.0;

/// Quadrature panels per direction for the analytic descriptors.
const N_QUAD: usize = 512;

/// Surface to integrate over: analytic descriptors carry exact area
/// elements, discrete fields use their grid.
#[derive(Debug, Clone, Copy)]
pub enum Surface<'a> {
    /// Plane through `point` with unit `normal`.
    Plane { point: [f64; 3], normal: [f64; 3] },
    Sphere { center: [f64; 3], radius: f64 },
    /// Cylinder of the given radius about the vertical line through `axis_point`.
    VerticalCylinder { axis_point: [f64; 3], radius: f64 },
    Cylindrical(&'a CylindricalGraphField),
    Vertical(&'a VerticalGraphField),
}

/// Density value with its truncation accounting.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DensityResult {
    pub value: f64,
    /// Bound on the mass dropped by the `8 rho` cutoff (heuristic constant
    /// times the exact planar tail `e^{-16}`).
    pub truncation_bound: f64,
    /// False when the surface window ends before the cutoff ball does, so
    /// the reported value misses surface that the cutoff would have kept.
    pub coverage_ok: bool,
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Composite Simpson weights over `n` panels (2n + 1 nodes) on `[a, b]`.
fn simpson(a: f64, b: f64, n: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let m = 2 * n;
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for k in 1..m {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// Gaussian density of a surface at `(x0, rho)`.
pub fn gaussian_density(surface: &Surface, x0: [f64; 3], rho: f64) -> Result<DensityResult> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidArgument(format!("need rho > 0, got {rho}")));
    }
    let cut = CUTOFF * rho;
    let pref = 1.0 / (4.0 * std::f64::consts::PI * rho * rho);
    let kernel = |d2: f64| {
        if d2 > cut * cut {
            0.0
        } else {
            (-d2 / (4.0 * rho * rho)).exp()
        }
    };
    let planar_tail = (-(CUTOFF * CUTOFF) / 4.0).exp();
    let mut coverage_ok = true;

    let integral = match *surface {
        Surface::Plane { point, normal } => {
            let n_len = norm3(normal);
            if !(n_len > 0.0) {
                return Err(Error::InvalidArgument("plane normal must be nonzero".into()));
            }
            let n = [normal[0] / n_len, normal[1] / n_len, normal[2] / n_len];
            // only the signed distance of x0 from the plane enters: in-plane
            // coordinates (u, v) about the foot give |x - x0|^2 = d^2 + u^2 + v^2
            let d = (0..3).map(|k| (x0[k] - point[k]) * n[k]).sum::<f64>();
            simpson(-cut, cut, N_QUAD, |u| {
                simpson(-cut, cut, N_QUAD, |v| kernel(d * d + u * u + v * v))
            })
        }
        Surface::Sphere { center, radius } => {
            if !(radius > 0.0) {
                return Err(Error::NonPositiveRadius(format!("sphere radius {radius}")));
            }
            // spherical coordinates about the sphere center
            let c = center;
            simpson(0.0, std::f64::consts::PI, N_QUAD, |phi| {
                let sin_phi = phi.sin();
                simpson(0.0, std::f64::consts::TAU, N_QUAD, |th| {
                    let x = [
                        c[0] + radius * sin_phi * th.cos(),
                        c[1] + radius * sin_phi * th.sin(),
                        c[2] + radius * phi.cos(),
                    ];
                    let d2 = (0..3).map(|k| (x[k] - x0[k]).powi(2)).sum::<f64>();
                    kernel(d2) * radius * radius * sin_phi
                })
            })
        }
        Surface::VerticalCylinder { axis_point, radius } => {
            if !(radius > 0.0) {
                return Err(Error::NonPositiveRadius(format!("cylinder radius {radius}")));
            }
            let (z_lo, z_hi) = (x0[2] - cut, x0[2] + cut);
            simpson(z_lo, z_hi, N_QUAD, |z| {
                simpson(0.0, std::f64::consts::TAU, N_QUAD, |th| {
                    let x = [
                        axis_point[0] + radius * th.cos(),
                        axis_point[1] + radius * th.sin(),
                        z,
                    ];
                    let d2 = (0..3).map(|k| (x[k] - x0[k]).powi(2)).sum::<f64>();
                    kernel(d2) * radius
                })
            })
        }
        Surface::Cylindrical(field) => {
            let grid = field.grid;
            if grid.z_min > x0[2] - cut || grid.z_max < x0[2] + cut {
                coverage_ok = false;
            }
            let (dz, dt) = (grid.dz(), grid.dtheta());
            // trapezoid in z (central-difference slopes), exact periodic sum in theta
            let rows: Vec<f64> = (1..grid.n_z - 1)
                .into_par_iter()
                .map(|i| {
                    let z = grid.z(i);
                    let mut acc = 0.0;
                    for j in 0..grid.n_theta {
                        let ji = j as isize;
                        let r = field.r(i, j);
                        let r_z = (field.r(i + 1, j) - field.r(i - 1, j)) / (2.0 * dz);
                        let r_t = (field.r_wrap(i, ji + 1) - field.r_wrap(i, ji - 1)) / (2.0 * dt);
                        // dA = sqrt(r^2 (1 + r_z^2) + r_t^2) dz dtheta
                        let area = (r * r * (1.0 + r_z * r_z) + r_t * r_t).sqrt();
                        let th = grid.theta(j);
                        let x = [r * th.cos(), r * th.sin(), z];
                        let d2 = (0..3).map(|k| (x[k] - x0[k]).powi(2)).sum::<f64>();
                        acc += kernel(d2) * area;
                    }
                    acc
                })
                .collect();
            rows.iter().sum::<f64>() * dz * dt
        }
        Surface::Vertical(field) => {
            let grid = field.grid;
            let horiz = (x0[0].hypot(x0[1]) - grid.r_out).max(grid.r_in - x0[0].hypot(x0[1]));
            if horiz > -cut {
                // annulus may end inside the cutoff ball
                coverage_ok = grid.r_in + cut <= x0[0].hypot(x0[1])
                    && x0[0].hypot(x0[1]) + cut <= grid.r_out;
            }
            let (ds, dt) = (grid.ds(), grid.dtheta());
            let rows: Vec<f64> = (1..grid.n_s - 1)
                .into_par_iter()
                .map(|i| {
                    let s = grid.s(i);
                    let mut acc = 0.0;
                    for j in 0..grid.n_theta {
                        let ji = j as isize;
                        let h = field.h(i, j);
                        let h_s = (field.h(i + 1, j) - field.h(i - 1, j)) / (2.0 * ds);
                        let h_t = (field.h_wrap(i, ji + 1) - field.h_wrap(i, ji - 1)) / (2.0 * dt);
                        // dA = sqrt(1 + h_s^2 + (h_t/s)^2) s ds dtheta
                        let area = (1.0 + h_s * h_s + (h_t / s) * (h_t / s)).sqrt() * s;
                        let th = grid.theta(j);
                        let x = [s * th.cos(), s * th.sin(), h];
                        let d2 = (0..3).map(|k| (x[k] - x0[k]).powi(2)).sum::<f64>();
                        acc += kernel(d2) * area;
                    }
                    acc
                })
                .collect();
            rows.iter().sum::<f64>() * ds * dt
        }
    };
    Ok(DensityResult {
        value: pref * integral,
        truncation_bound: 3.0 * planar_tail,
        coverage_ok,
    })
}

/// One row of an entropy sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DensitySample {
    pub center: [f64; 3],
    pub scale: f64,
    pub value: f64,
    pub truncation_bound: f64,
    pub coverage_ok: bool,
}

/// Grid lower bound on the entropy: the sup of the density over the supplied
/// centers and scales.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyEstimate {
    /// Max density over the grid: a lower bound for the entropy.
    pub sup_density: f64,
    pub argmax_center: [f64; 3],
    pub argmax_scale: f64,
    pub samples: Vec<DensitySample>,
    pub any_truncated: bool,
}

impl EntropyEstimate {
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "cx,cy,cz,scale,value,truncation_bound,coverage_ok")?;
        for s in &self.samples {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                s.center[0], s.center[1], s.center[2], s.scale, s.value, s.truncation_bound,
                s.coverage_ok
            )?;
        }
        Ok(())
    }

    pub fn json_summary(&self) -> serde_json::Value {
        serde_json::json!({
            "entropy_lower_bound": self.sup_density,
            "argmax_center": self.argmax_center,
            "argmax_scale": self.argmax_scale,
            "grid_points": self.samples.len(),
            "any_truncated": self.any_truncated,
        })
    }
}

/// Sweep the density over center and scale grids and take the sup.
pub fn entropy_estimate(
    surface: &Surface,
    centers: &[[f64; 3]],
    scales: &[f64],
) -> Result<EntropyEstimate> {
    if centers.is_empty() || scales.is_empty() {
        return Err(Error::InvalidArgument(
            "entropy sweep needs nonempty center and scale grids".into(),
        ));
    }
    let mut samples = Vec::with_capacity(centers.len() * scales.len());
    for &c in centers {
        for &rho in scales {
            let d = gaussian_density(surface, c, rho)?;
            samples.push(DensitySample {
                center: c,
                scale: rho,
                value: d.value,
                truncation_bound: d.truncation_bound,
                coverage_ok: d.coverage_ok,
            });
        }
    }
    let best = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.value.partial_cmp(&b.1.value).unwrap().then(b.0.cmp(&a.0)))
        .map(|(_, s)| *s)
        .unwrap();
    Ok(EntropyEstimate {
        sup_density: best.value,
        argmax_center: best.center,
        argmax_scale: best.scale,
        any_truncated: samples.iter().any(|s| !s.coverage_ok),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{CylGrid, PolarGrid};

    const SPHERE2: f64 = 1.4715177646857693; // 4 / e
    const CYL: f64 = 1.5203469010662807; // sqrt(2 pi / e)

    #[test]
    fn plane_density_is_one() {
        let s = Surface::Plane {
            point: [0.0, 0.0, 1.0],
            normal: [0.0, 0.0, 1.0],
        };
        for rho in [0.3, 1.0, 4.0] {
            let d = gaussian_density(&s, [0.5, -0.2, 1.0], rho).unwrap();
            assert!((d.value - 1.0).abs() < 1e-6, "rho = {rho}: {}", d.value);
            assert!(d.coverage_ok);
        }
        // tilted plane through the center
        let s = Surface::Plane {
            point: [1.0, 1.0, 1.0],
            normal: [1.0, 2.0, 2.0],
        };
        let d = gaussian_density(&s, [1.0, 1.0, 1.0], 1.0).unwrap();
        assert!((d.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn offset_plane_gaussian_factor() {
        // plane at distance a from the center: density = exp(-a^2 / 4 rho^2)
        let s = Surface::Plane {
            point: [0.0, 0.0, 0.0],
            normal: [0.0, 0.0, 1.0],
        };
        let d = gaussian_density(&s, [0.0, 0.0, 1.0], 1.0).unwrap();
        assert!((d.value - (-0.25f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn sphere_density_closed_form() {
        let s = Surface::Sphere {
            center: [0.3, 0.1, -2.0],
            radius: 2.0,
        };
        let d = gaussian_density(&s, [0.3, 0.1, -2.0], 1.0).unwrap();
        assert!((d.value - SPHERE2).abs() < 1e-3, "{}", d.value);
    }

    #[test]
    fn cylinder_density_closed_form() {
        let s = Surface::VerticalCylinder {
            axis_point: [0.0, 0.0, 0.0],
            radius: 2f64.sqrt(),
        };
        let d = gaussian_density(&s, [0.0, 0.0, 3.0], 1.0).unwrap();
        assert!((d.value - CYL).abs() < 1e-3, "{}", d.value);
    }

    #[test]
    fn density_scaling_invariance() {
        for lam in [0.5, 2.0, 3.7] {
            let s = Surface::Sphere {
                center: [1.0 * lam, 0.0, 2.0 * lam],
                radius: 2.0 * lam,
            };
            let d = gaussian_density(&s, [1.0 * lam, 0.0, 2.0 * lam], lam).unwrap();
            assert!((d.value - SPHERE2).abs() < 1e-3, "lam = {lam}: {}", d.value);
        }
    }

    #[test]
    fn density_rigid_motion_invariance() {
        // rotate the plane and its center jointly: same density
        let base = gaussian_density(
            &Surface::Plane {
                point: [0.0, 0.0, 0.0],
                normal: [0.0, 0.0, 1.0],
            },
            [0.0, 0.0, 0.5],
            1.3,
        )
        .unwrap();
        let (c, s) = (0.6f64.cos(), 0.6f64.sin());
        let rotated = gaussian_density(
            &Surface::Plane {
                point: [5.0, -1.0, 2.0],
                normal: [s, 0.0, c],
            },
            [5.0 + 0.5 * s, -1.0, 2.0 + 0.5 * c],
            1.3,
        )
        .unwrap();
        assert!((base.value - rotated.value).abs() < 1e-6);
    }

    #[test]
    fn shrinker_scale_independence() {
        // shrinking-cylinder family at the shrinker scale: constant density
        let mut vals = Vec::new();
        for lam in [0.5, 1.0, 2.0, 4.0] {
            let s = Surface::VerticalCylinder {
                axis_point: [0.0, 0.0, 0.0],
                radius: 2f64.sqrt() * lam,
            };
            vals.push(gaussian_density(&s, [0.0, 0.0, 0.0], lam).unwrap().value);
        }
        for v in &vals {
            assert!((v - CYL).abs() < 1e-3, "{v}");
        }
    }

    #[test]
    fn discrete_cylinder_matches_analytic() {
        let grid = CylGrid::new(-10.0, 10.0, 801, 64).unwrap();
        let f = CylindricalGraphField::from_fn(grid, |_, _| 2f64.sqrt()).unwrap();
        let d = gaussian_density(&Surface::Cylindrical(&f), [0.0, 0.0, 0.0], 1.0).unwrap();
        assert!(d.coverage_ok);
        assert!((d.value - CYL).abs() < 1e-3, "{}", d.value);
    }

    #[test]
    fn truncation_warning_when_window_short() {
        let grid = CylGrid::new(-3.0, 3.0, 61, 32).unwrap();
        let f = CylindricalGraphField::from_fn(grid, |_, _| 2f64.sqrt()).unwrap();
        let d = gaussian_density(&Surface::Cylindrical(&f), [0.0, 0.0, 0.0], 1.0).unwrap();
        assert!(!d.coverage_ok);
        assert!(d.value < CYL);
    }

    #[test]
    fn discrete_vertical_plane_patch() {
        let grid = PolarGrid::new(0.05, 12.0, 1201, 64).unwrap();
        let f = VerticalGraphField::from_fn(grid, |_, _| 0.0).unwrap();
        let d = gaussian_density(&Surface::Vertical(&f), [3.0, 0.0, 0.0], 0.5).unwrap();
        // the annulus hole sits inside the cutoff ball: flagged, value near 1
        assert!((d.value - 1.0).abs() < 1e-3, "{}", d.value);
    }

    #[test]
    fn entropy_cylinder_argmax_at_shrinker_scale() {
        let s = Surface::VerticalCylinder {
            axis_point: [0.0, 0.0, 0.0],
            radius: 2f64.sqrt(),
        };
        let centers = [[0.0, 0.0, 0.0], [0.0, 0.0, 2.0]];
        let scales = [0.5, 0.8, 1.0, 1.3, 2.0];
        let e = entropy_estimate(&s, &centers, &scales).unwrap();
        assert!((e.sup_density - CYL).abs() < 1e-3, "{}", e.sup_density);
        // shrinker scale rho = R / sqrt(2) = 1 wins
        assert_eq!(e.argmax_scale, 1.0);
    }

    #[test]
    fn entropy_plane_flat_in_grid() {
        let s = Surface::Plane {
            point: [0.0, 0.0, 0.0],
            normal: [0.0, 0.0, 1.0],
        };
        let centers = [[0.0, 0.0, 0.0], [1.0, 2.0, 0.0]];
        let scales = [0.7, 1.0, 2.0];
        let e = entropy_estimate(&s, &centers, &scales).unwrap();
        for sample in &e.samples {
            assert!((sample.value - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn entropy_ordering_sphere_below_cylinder() {
        let sphere = Surface::Sphere {
            center: [0.0, 0.0, 0.0],
            radius: 2.0,
        };
        let cyl = Surface::VerticalCylinder {
            axis_point: [0.0, 0.0, 0.0],
            radius: 2f64.sqrt(),
        };
        let centers = [[0.0, 0.0, 0.0]];
        let scales = [1.0];
        let es = entropy_estimate(&sphere, &centers, &scales).unwrap();
        let ec = entropy_estimate(&cyl, &centers, &scales).unwrap();
        assert!(es.sup_density < ec.sup_density);
        assert!((es.sup_density - SPHERE2).abs() < 1e-3);
        assert!((ec.sup_density - CYL).abs() < 1e-3);
    }

    #[test]
    fn rejects_bad_scale_and_empty_grids() {
        let s = Surface::Sphere {
            center: [0.0; 3],
            radius: 1.0,
        };
        assert!(gaussian_density(&s, [0.0; 3], 0.0).is_err());
        assert!(entropy_estimate(&s, &[], &[1.0]).is_err());
        assert!(entropy_estimate(&s, &[[0.0; 3]], &[]).is_err());
    }
}
