//! Dyadic banding and log-log least-squares fits.
//!
//! Decay and growth estimates of the form `sup <= C * z^p` are measured by
//! splitting the z-range into dyadic bands `[2^m, 2^{m+1})`, taking the sup
//! of the quantity per band, and fitting `log sup` against the log of the
//! band center.

use serde::Serialize;

use crate::error::{Error, Result};

/// Per-band supremum record.
#[derive(Debug, Clone, Serialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
    /// Geometric center `sqrt(lo * hi)`.
    pub center: f64,
    pub sup: f64,
    pub count: usize,
}

/// Dyadic band edges `[2^m, 2^{m+1})` covering `[min, max]`. Requires `min > 0`.
pub fn dyadic_band_edges(min: f64, max: f64) -> Result<Vec<(f64, f64)>> {
    if !(min > 0.0 && max > min) {
        return Err(Error::InvalidArgument(format!(
            "dyadic bands need 0 < min < max, got [{min}, {max}]"
        )));
    }
    let m_lo = min.log2().floor() as i32;
    let m_hi = max.log2().ceil() as i32;
    Ok((m_lo..m_hi)
        .map(|m| (2f64.powi(m), 2f64.powi(m + 1)))
        .collect())
}

/// Group `(x, value)` samples into dyadic bands and record the per-band sup of `|value|`.
/// Empty bands are dropped.
pub fn band_sups(samples: &[(f64, f64)]) -> Result<Vec<Band>> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples to band".into()));
    }
    let min = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let max = samples.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    let edges = dyadic_band_edges(min, max * (1.0 + 1e-12))?;
    let mut bands = Vec::new();
    for (lo, hi) in edges {
        let mut sup = 0.0f64;
        let mut count = 0;
        for &(x, v) in samples {
            if x >= lo && x < hi {
                sup = sup.max(v.abs());
                count += 1;
            }
        }
        if count > 0 {
            bands.push(Band {
                lo,
                hi,
                center: (lo * hi).sqrt(),
                sup,
                count,
            });
        }
    }
    Ok(bands)
}

/// Least-squares fit of `y = C * x^p` through `(x, y)` points, in log-log space.
/// Returns `(C, p)`. All `x` and `y` must be strictly positive.
pub fn loglog_fit(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "log-log fit needs >= 2 points, got {}",
            points.len()
        )));
    }
    for &(x, y) in points {
        if !(x > 0.0 && y > 0.0) {
            return Err(Error::DegenerateFit(format!(
                "log-log fit needs positive samples, got ({x}, {y})"
            )));
        }
    }
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(Error::DegenerateFit("degenerate abscissae".into()));
    }
    let p = (n * sxy - sx * sy) / denom;
    let log_c = (sy - p * sx) / n;
    Ok((log_c.exp(), p))
}

/// Fit `sup = C * x^p` through per-band sups; requires at least `min_bands` bands.
pub fn fit_bands(bands: &[Band], min_bands: usize) -> Result<(f64, f64)> {
    if bands.len() < min_bands {
        return Err(Error::InsufficientExtent(format!(
            "need >= {min_bands} dyadic bands, got {}",
            bands.len()
        )));
    }
    let pts: Vec<(f64, f64)> = bands.iter().map(|b| (b.center, b.sup)).collect();
    loglog_fit(&pts)
}
