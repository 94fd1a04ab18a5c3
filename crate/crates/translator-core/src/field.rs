//! Discrete grid fields and profile curves.
//!
//! Two graph parametrizations are supported: a cylindrical graph `r(z, theta)`
//! around the z-axis (periodic in theta, no duplicated seam column) and a
//! vertical graph `h(s, theta)` over a polar annulus. Rotationally symmetric
//! profiles are stored as `ProfileCurve`, either as a graph `r = f(z)` or as
//! an arclength-parametrized curve in the `(r, z)` half-plane (needed for
//! necks, where the graph form breaks down).

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

pub const CONVENTION_VERSION: &str = "h-cylinder-positive-v1";

/// Shared layout of a cylindrical `(z, theta)` grid.
///
/// Nodes are `z_i = z_min + i * dz` for `i in 0..n_z` with
/// `dz = (z_max - z_min) / (n_z - 1)`, and `theta_j = j * 2 pi / n_theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CylGrid {
    pub z_min: f64,
    pub z_max: f64,
    pub n_z: usize,
    pub n_theta: usize,
}

impl CylGrid {
    pub fn new(z_min: f64, z_max: f64, n_z: usize, n_theta: usize) -> Result<Self> {
        if !(z_max > z_min) || !z_min.is_finite() || !z_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "need z_min < z_max, got [{z_min}, {z_max}]"
            )));
        }
        if n_z < 5 {
            return Err(Error::InvalidGrid(format!("n_z = {n_z} < 5")));
        }
        if n_theta < 8 || n_theta % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "n_theta must be even and >= 8, got {n_theta}"
            )));
        }
        Ok(Self {
            z_min,
            z_max,
            n_z,
            n_theta,
        })
    }

    pub fn dz(&self) -> f64 {
        (self.z_max - self.z_min) / (self.n_z - 1) as f64
    }

    pub fn dtheta(&self) -> f64 {
        std::f64::consts::TAU / self.n_theta as f64
    }

    pub fn z(&self, i: usize) -> f64 {
        self.z_min + i as f64 * self.dz()
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.dtheta()
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n_theta + j
    }

    /// Periodic theta index.
    pub fn wrap_j(&self, j: isize) -> usize {
        j.rem_euclid(self.n_theta as isize) as usize
    }

    /// Index of the grid node nearest to `z`, clamped to the range.
    pub fn nearest_i(&self, z: f64) -> usize {
        let t = ((z - self.z_min) / self.dz()).round();
        (t.max(0.0) as usize).min(self.n_z - 1)
    }
}

/// Cylindrical graph `r(z, theta) > 0`, theta-periodic, row-major in z.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CylindricalGraphField {
    pub grid: CylGrid,
    values: Vec<f64>,
}

impl CylindricalGraphField {
    pub fn new(grid: CylGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_z * grid.n_theta {
            return Err(Error::InvalidGrid(format!(
                "value count {} does not match {}x{} grid",
                values.len(),
                grid.n_z,
                grid.n_theta
            )));
        }
        for (k, &v) in values.iter().enumerate() {
            if !v.is_finite() || v <= 0.0 {
                let (i, j) = (k / grid.n_theta, k % grid.n_theta);
                return Err(Error::InvalidGrid(format!(
                    "radius must be finite and positive, got {v} at node ({i}, {j})"
                )));
            }
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: CylGrid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.n_z * grid.n_theta);
        for i in 0..grid.n_z {
            for j in 0..grid.n_theta {
                values.push(f(grid.z(i), grid.theta(j)));
            }
        }
        Self::new(grid, values)
    }

    pub fn r(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    /// Radius with periodic wraparound in theta.
    pub fn r_wrap(&self, i: usize, j: isize) -> f64 {
        self.values[self.grid.idx(i, self.grid.wrap_j(j))]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// CSV: header comment with grid metadata, then one row per z-line.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        write_grid_csv(w, &self.grid, &self.values, "r")
    }

    pub fn json_descriptor(&self) -> serde_json::Value {
        serde_json::json!({
            "grid": self.grid,
            "units": "length",
            "convention_version": CONVENTION_VERSION,
            "kind": "cylindrical_graph",
        })
    }
}

/// A scalar quantity on a cylindrical grid (remainders, residuals); no sign
/// or positivity constraint, may contain NaN outside its interior mask.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarField {
    pub grid: CylGrid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: CylGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_z * grid.n_theta {
            return Err(Error::InvalidGrid(format!(
                "value count {} does not match {}x{} grid",
                values.len(),
                grid.n_z,
                grid.n_theta
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn v(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    pub fn v_wrap(&self, i: usize, j: isize) -> f64 {
        self.values[self.grid.idx(i, self.grid.wrap_j(j))]
    }

    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        write_grid_csv(w, &self.grid, &self.values, "value")
    }
}

fn write_grid_csv(w: &mut impl Write, grid: &CylGrid, values: &[f64], name: &str) -> Result<()> {
    writeln!(
        w,
        "# {name} on cylindrical grid; z_min={}, z_max={}, n_z={}, n_theta={}, convention={}",
        grid.z_min, grid.z_max, grid.n_z, grid.n_theta, CONVENTION_VERSION
    )?;
    write!(w, "z")?;
    for j in 0..grid.n_theta {
        write!(w, ",theta_{j}")?;
    }
    writeln!(w)?;
    for i in 0..grid.n_z {
        write!(w, "{}", grid.z(i))?;
        for j in 0..grid.n_theta {
            write!(w, ",{}", values[i * grid.n_theta + j])?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Polar annulus grid for vertical graphs: `s_i` uniform in `[r_in, r_out]`,
/// theta periodic as in `CylGrid`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarGrid {
    pub r_in: f64,
    pub r_out: f64,
    pub n_s: usize,
    pub n_theta: usize,
}

impl PolarGrid {
    pub fn new(r_in: f64, r_out: f64, n_s: usize, n_theta: usize) -> Result<Self> {
        if !(r_out > r_in && r_in > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "need r_out > r_in > 0, got [{r_in}, {r_out}]"
            )));
        }
        if n_s < 5 {
            return Err(Error::InvalidGrid(format!("n_s = {n_s} < 5")));
        }
        if n_theta < 8 || n_theta % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "n_theta must be even and >= 8, got {n_theta}"
            )));
        }
        Ok(Self {
            r_in,
            r_out,
            n_s,
            n_theta,
        })
    }

    pub fn ds(&self) -> f64 {
        (self.r_out - self.r_in) / (self.n_s - 1) as f64
    }

    pub fn dtheta(&self) -> f64 {
        std::f64::consts::TAU / self.n_theta as f64
    }

    pub fn s(&self, i: usize) -> f64 {
        self.r_in + i as f64 * self.ds()
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.dtheta()
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n_theta + j
    }

    pub fn wrap_j(&self, j: isize) -> usize {
        j.rem_euclid(self.n_theta as isize) as usize
    }
}

/// Vertical graph `h(s, theta)` over a polar annulus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerticalGraphField {
    pub grid: PolarGrid,
    values: Vec<f64>,
}

impl VerticalGraphField {
    pub fn new(grid: PolarGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_s * grid.n_theta {
            return Err(Error::InvalidGrid(format!(
                "value count {} does not match {}x{} grid",
                values.len(),
                grid.n_s,
                grid.n_theta
            )));
        }
        for (k, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                let (i, j) = (k / grid.n_theta, k % grid.n_theta);
                return Err(Error::InvalidGrid(format!(
                    "height must be finite, got {v} at node ({i}, {j})"
                )));
            }
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: PolarGrid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.n_s * grid.n_theta);
        for i in 0..grid.n_s {
            for j in 0..grid.n_theta {
                values.push(f(grid.s(i), grid.theta(j)));
            }
        }
        Self::new(grid, values)
    }

    pub fn h(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    pub fn h_wrap(&self, i: usize, j: isize) -> f64 {
        self.values[self.grid.idx(i, self.grid.wrap_j(j))]
    }

    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(
            w,
            "# h on polar grid; r_in={}, r_out={}, n_s={}, n_theta={}, convention={}",
            self.grid.r_in, self.grid.r_out, self.grid.n_s, self.grid.n_theta, CONVENTION_VERSION
        )?;
        write!(w, "s")?;
        for j in 0..self.grid.n_theta {
            write!(w, ",theta_{j}")?;
        }
        writeln!(w)?;
        for i in 0..self.grid.n_s {
            write!(w, "{}", self.grid.s(i))?;
            for j in 0..self.grid.n_theta {
                write!(w, ",{}", self.values[self.grid.idx(i, j)])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn json_descriptor(&self) -> serde_json::Value {
        serde_json::json!({
            "grid": self.grid,
            "units": "length",
            "convention_version": CONVENTION_VERSION,
            "kind": "vertical_graph",
        })
    }
}

/// Where an arclength integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ArclengthEnd {
    /// Ran the requested length.
    Length,
    /// Radius reached the axis: bowl-type closure.
    AxisClosure { z: f64 },
}

/// Neck point of an arclength profile: `dr/dsigma = 0` with `r` locally minimal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NeckPoint {
    pub r: f64,
    pub z: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ProfileData {
    /// Graph `r = f(z)`: strictly increasing `z`, with `dr/dz` at each sample.
    GraphInZ {
        z: Vec<f64>,
        r: Vec<f64>,
        r_z: Vec<f64>,
    },
    /// Arclength curve in the `(r, z)` half-plane. `angle` is the tangent
    /// angle from the r-axis: `dr/dsigma = cos(angle)`, `dz/dsigma = sin(angle)`.
    Arclength {
        sigma: Vec<f64>,
        r: Vec<f64>,
        z: Vec<f64>,
        angle: Vec<f64>,
        necks: Vec<NeckPoint>,
        start_end: ArclengthEnd,
        finish_end: ArclengthEnd,
    },
}

/// A rotationally symmetric radius profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileCurve {
    pub data: ProfileData,
}

impl ProfileCurve {
    pub fn graph_in_z(z: Vec<f64>, r: Vec<f64>, r_z: Vec<f64>) -> Result<Self> {
        if z.len() != r.len() || z.len() != r_z.len() || z.len() < 2 {
            return Err(Error::InvalidArgument(
                "graph profile needs matching sample vectors of length >= 2".into(),
            ));
        }
        for k in 1..z.len() {
            if !(z[k] > z[k - 1]) {
                return Err(Error::NotGraphical(format!(
                    "z not strictly increasing at sample {k}"
                )));
            }
        }
        for (k, &rv) in r.iter().enumerate() {
            if !(rv > 0.0) || !rv.is_finite() {
                return Err(Error::NonPositiveRadius(format!("r = {rv} at sample {k}")));
            }
        }
        Ok(Self {
            data: ProfileData::GraphInZ { z, r, r_z },
        })
    }

    pub fn is_graph(&self) -> bool {
        matches!(self.data, ProfileData::GraphInZ { .. })
    }

    pub fn z_range(&self) -> (f64, f64) {
        match &self.data {
            ProfileData::GraphInZ { z, .. } => (z[0], *z.last().unwrap()),
            ProfileData::Arclength { z, .. } => {
                let lo = z.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            }
        }
    }

    /// Evaluate `f(z)` by cubic Hermite interpolation (graph mode only).
    pub fn eval_r(&self, zq: f64) -> Result<f64> {
        self.hermite(zq).map(|(r, _)| r)
    }

    /// Evaluate `f'(z)` from the Hermite interpolant (graph mode only).
    pub fn eval_r_z(&self, zq: f64) -> Result<f64> {
        self.hermite(zq).map(|(_, d)| d)
    }

    fn hermite(&self, zq: f64) -> Result<(f64, f64)> {
        let ProfileData::GraphInZ { z, r, r_z } = &self.data else {
            return Err(Error::NotGraphical(
                "evaluation requires graph-in-z mode".into(),
            ));
        };
        let (z0, z1) = (z[0], *z.last().unwrap());
        if zq < z0 - 1e-12 || zq > z1 + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "z = {zq} outside profile range [{z0}, {z1}]"
            )));
        }
        let k = match z.binary_search_by(|v| v.partial_cmp(&zq).unwrap()) {
            Ok(k) => k.min(z.len() - 2),
            Err(k) => k.saturating_sub(1).min(z.len() - 2),
        };
        let h = z[k + 1] - z[k];
        let t = ((zq - z[k]) / h).clamp(0.0, 1.0);
        let (p0, p1, m0, m1) = (r[k], r[k + 1], r_z[k] * h, r_z[k + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let val = (2.0 * t3 - 3.0 * t2 + 1.0) * p0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * p1
            + (t3 - t2) * m1;
        let dval = ((6.0 * t2 - 6.0 * t) * p0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * p1
            + (3.0 * t2 - 2.0 * t) * m1)
            / h;
        Ok((val, dval))
    }

    /// Number of times the curve crosses the horizontal plane at height `z_plane`
    /// (each crossing is one circle of intersection of the revolved surface).
    pub fn sheets_at_height(&self, z_plane: f64) -> usize {
        let zs: &[f64] = match &self.data {
            ProfileData::GraphInZ { z, .. } => z,
            ProfileData::Arclength { z, .. } => z,
        };
        let mut count = 0;
        for k in 1..zs.len() {
            let (a, b) = (zs[k - 1] - z_plane, zs[k] - z_plane);
            if a == 0.0 {
                continue;
            }
            if a * b < 0.0 || (b == 0.0 && k == zs.len() - 1) {
                count += 1;
            }
        }
        count
    }

    /// Sample pairs `(z, r)`.
    pub fn zr_samples(&self) -> Vec<(f64, f64)> {
        match &self.data {
            ProfileData::GraphInZ { z, r, .. } => z.iter().cloned().zip(r.iter().cloned()).collect(),
            ProfileData::Arclength { z, r, .. } => {
                z.iter().cloned().zip(r.iter().cloned()).collect()
            }
        }
    }

    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        match &self.data {
            ProfileData::GraphInZ { z, r, r_z } => {
                writeln!(w, "z,r,r_z")?;
                for k in 0..z.len() {
                    writeln!(w, "{},{},{}", z[k], r[k], r_z[k])?;
                }
            }
            ProfileData::Arclength {
                sigma, r, z, angle, ..
            } => {
                writeln!(w, "sigma,r,z,angle")?;
                for k in 0..sigma.len() {
                    writeln!(w, "{},{},{},{}", sigma[k], r[k], z[k], angle[k])?;
                }
            }
        }
        Ok(())
    }
}
