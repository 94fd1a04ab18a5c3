//! The rotationally symmetric translator ODE in its three forms:
//! `f(z)` (graph), `z(s)` / `phi(s) = z_s` (inverted graph), and the
//! arclength form in the `(r, z)` half-plane (needed through necks).
//!
//! `phi` satisfies
//!
//! ```text
//! phi' = (1 + phi^2) * (1 + gamma(s) - (1/s + delta(s)) * phi)
//! ```
//!
//! whose attracting asymptote is `phi(s) = s - 1/s + O(s^-3)`. The derived
//! curves `psi = phi - s`, `lambda = s psi`, `mu = s^2 (lambda + 1)` have
//! limits `0`, `-1`, `-2`; `asymptotic_diagnostics` measures all three.

use std::io::Write;

use serde::Serialize;

use crate::banding;
use crate::error::{Error, Result};
use crate::field::{ArclengthEnd, NeckPoint, ProfileCurve, ProfileData};

/// Closed-form perturbation envelope `amp * s^{-exp} * cos(freq * ln s)`,
/// applied to both slots of the phi equation independently.
///
/// `freq = 0` gives the pure power envelope. The same struct is reused for
/// the z-form (`a`, `b`) and s-form (`alpha`, `beta`) coefficient pairs; the
/// equation form it belongs to is tracked by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationEnvelope {
    pub gamma_amp: f64,
    pub gamma_exp: f64,
    pub delta_amp: f64,
    pub delta_exp: f64,
    pub osc_freq: f64,
}

impl PerturbationEnvelope {
    pub const ZERO: PerturbationEnvelope = PerturbationEnvelope {
        gamma_amp: 0.0,
        gamma_exp: 9.0,
        delta_amp: 0.0,
        delta_exp: 9.0,
        osc_freq: 0.0,
    };

    pub fn power(amp: f64, exp: f64) -> Result<Self> {
        Self::new(amp, exp, amp, exp, 0.0)
    }

    pub fn new(
        gamma_amp: f64,
        gamma_exp: f64,
        delta_amp: f64,
        delta_exp: f64,
        osc_freq: f64,
    ) -> Result<Self> {
        if gamma_amp < 0.0 || delta_amp < 0.0 {
            return Err(Error::InvalidArgument("envelope amplitudes must be >= 0".into()));
        }
        if (gamma_amp > 0.0 && gamma_exp <= 0.0) || (delta_amp > 0.0 && delta_exp <= 0.0) {
            return Err(Error::InvalidArgument("envelope exponents must be > 0".into()));
        }
        Ok(Self {
            gamma_amp,
            gamma_exp,
            delta_amp,
            delta_exp,
            osc_freq,
        })
    }

    pub fn gamma(&self, s: f64) -> f64 {
        self.gamma_amp * s.powf(-self.gamma_exp) * (self.osc_freq * s.ln()).cos()
    }

    pub fn delta(&self, s: f64) -> f64 {
        self.delta_amp * s.powf(-self.delta_exp) * (self.osc_freq * s.ln()).cos()
    }

    pub fn is_zero(&self) -> bool {
        self.gamma_amp == 0.0 && self.delta_amp == 0.0
    }
}

/// How an adaptive integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PhiOutcome {
    Completed,
    /// The solution escaped to infinity before `s_end`; `s` is the last
    /// accepted abscissa. Not an error: the comparison argument for the
    /// lower bound runs on exactly this behavior.
    BlowUp { s: f64 },
}

/// Adaptive-step samples of `phi(s)` with the envelope they were run under.
#[derive(Debug, Clone, Serialize)]
pub struct PhiTrajectory {
    pub s: Vec<f64>,
    pub phi: Vec<f64>,
    /// RHS values at the samples (slope data for dense output).
    pub dphi: Vec<f64>,
    pub tol: f64,
    pub envelope: PerturbationEnvelope,
    pub outcome: PhiOutcome,
}

impl PhiTrajectory {
    pub fn s_end(&self) -> f64 {
        *self.s.last().unwrap()
    }

    pub fn phi_end(&self) -> f64 {
        *self.phi.last().unwrap()
    }

    pub fn blew_up(&self) -> bool {
        matches!(self.outcome, PhiOutcome::BlowUp { .. })
    }

    /// CSV with the derived asymptotic curves attached.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "s,phi,psi,lambda,mu")?;
        for k in 0..self.s.len() {
            let s = self.s[k];
            let psi = self.phi[k] - s;
            let lambda = s * psi;
            let mu = s * s * (lambda + 1.0);
            writeln!(w, "{},{},{},{},{}", s, self.phi[k], psi, lambda, mu)?;
        }
        Ok(())
    }
}

const DOPRI_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DOPRI_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DOPRI_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub(crate) enum StepEnd<const N: usize> {
    Reached,
    BlowUp,
    Event([f64; N]),
}

/// Dormand-Prince 5(4) with PI step-size control over a fixed-size state.
/// Records every accepted step. `event` may stop the integration early
/// (checked on accepted states).
pub(crate) fn dopri5<const N: usize>(
    f: &dyn Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    tol: f64,
    blow_up_norm: f64,
    mut event: impl FnMut(f64, &[f64; N]) -> bool,
) -> (Vec<f64>, Vec<[f64; N]>, Vec<[f64; N]>, StepEnd<N>) {
    let mut t = t0;
    let mut y = y0;
    let mut dy = f(t, &y);
    let mut ts = vec![t];
    let mut ys = vec![y];
    let mut dys = vec![dy];

    let span = t_end - t0;
    let mut h = (span.abs() * 1e-4).min(0.1).max(1e-8) * span.signum();
    let mut err_prev: f64 = 1.0;
    let mut end = StepEnd::Reached;
    let max_steps = 40_000_000usize;

    'outer: for _ in 0..max_steps {
        if (t_end - t) * span.signum() <= 0.0 {
            break;
        }
        if (t + h - t_end) * span.signum() > 0.0 {
            h = t_end - t;
        }

        let mut k = [[0.0f64; N]; 7];
        k[0] = dy;
        for stage in 1..7 {
            let mut ya = y;
            for (m, ki) in k.iter().enumerate().take(stage) {
                let a = DOPRI_A[stage][m];
                if a != 0.0 {
                    for n in 0..N {
                        ya[n] += h * a * ki[n];
                    }
                }
            }
            k[stage] = f(t + DOPRI_C[stage] * h, &ya);
        }
        // 5th-order solution is stage 7's argument (FSAL)
        let mut y_new = y;
        for (m, ki) in k.iter().enumerate().take(6) {
            let a = DOPRI_A[6][m];
            if a != 0.0 {
                for n in 0..N {
                    y_new[n] += h * a * ki[n];
                }
            }
        }
        let dy_new = k[6];

        let mut err: f64 = 0.0;
        let mut finite = true;
        for n in 0..N {
            let mut e = 0.0;
            for (m, ki) in k.iter().enumerate() {
                e += DOPRI_E[m] * ki[n];
            }
            e *= h;
            let scale = tol + tol * y[n].abs().max(y_new[n].abs());
            err = err.max((e / scale).abs());
            finite &= y_new[n].is_finite();
        }

        if finite && err <= 1.0 {
            t += h;
            y = y_new;
            dy = dy_new;
            ts.push(t);
            ys.push(y);
            dys.push(dy);
            let norm = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if norm > blow_up_norm {
                end = StepEnd::BlowUp;
                break 'outer;
            }
            if event(t, &y) {
                end = StepEnd::Event(y);
                break 'outer;
            }
            let e = err.max(1e-10);
            let fac = 0.9 * e.powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            err_prev = e;
            h *= fac.clamp(0.2, 5.0);
        } else {
            let e = if finite { err } else { 1e10 };
            h *= (0.9 * e.powf(-0.2)).clamp(0.1, 1.0);
            if h.abs() < 1e-13 * t.abs().max(1.0) {
                // step underflow: treat as escape to infinity
                end = StepEnd::BlowUp;
                break 'outer;
            }
        }
    }
    (ts, ys, dys, end)
}

fn check_phi_args(s0: f64, s_end: f64, tol: f64) -> Result<()> {
    if !(s0 > 0.0 && s_end > s0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < s0 < s_end, got s0 = {s0}, s_end = {s_end}"
        )));
    }
    if !(tol > 1e-14 && tol < 1e-3) {
        return Err(Error::InvalidArgument(format!(
            "tol must lie in (1e-14, 1e-3), got {tol}"
        )));
    }
    Ok(())
}

/// Integrate the phi-form of the translator ODE.
pub fn integrate_phi(
    env: &PerturbationEnvelope,
    s0: f64,
    phi0: f64,
    s_end: f64,
    tol: f64,
) -> Result<PhiTrajectory> {
    check_phi_args(s0, s_end, tol)?;
    let env = *env;
    let rhs = move |s: f64, y: &[f64; 1]| {
        let phi = y[0];
        [(1.0 + phi * phi) * (1.0 + env.gamma(s) - (1.0 / s + env.delta(s)) * phi)]
    };
    let (s, y, dy, end) = dopri5(&rhs, s0, [phi0], s_end, tol, 1e8, |_, _| false);
    let outcome = match end {
        StepEnd::BlowUp => PhiOutcome::BlowUp { s: *s.last().unwrap() },
        _ => PhiOutcome::Completed,
    };
    Ok(PhiTrajectory {
        s,
        phi: y.iter().map(|v| v[0]).collect(),
        dphi: dy.iter().map(|v| v[0]).collect(),
        tol,
        envelope: env,
        outcome,
    })
}

/// Integrate the comparison field `phi' = eps (1 + phi^2) / 2`, the lower
/// bound's forcing term. It escapes to infinity in finite s; the returned
/// trajectory carries the blow-up flag.
pub fn integrate_lower_comparison(
    eps: f64,
    s0: f64,
    phi0: f64,
    s_end: f64,
    tol: f64,
) -> Result<PhiTrajectory> {
    check_phi_args(s0, s_end, tol)?;
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("need eps > 0, got {eps}")));
    }
    let rhs = move |_s: f64, y: &[f64; 1]| [eps * (1.0 + y[0] * y[0]) / 2.0];
    let (s, y, dy, end) = dopri5(&rhs, s0, [phi0], s_end, tol, 1e8, |_, _| false);
    let outcome = match end {
        StepEnd::BlowUp => PhiOutcome::BlowUp { s: *s.last().unwrap() },
        _ => PhiOutcome::Completed,
    };
    Ok(PhiTrajectory {
        s,
        phi: y.iter().map(|v| v[0]).collect(),
        dphi: dy.iter().map(|v| v[0]).collect(),
        tol,
        envelope: PerturbationEnvelope::ZERO,
        outcome,
    })
}

/// Tail diagnostics of a phi trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticReport {
    /// `lambda = s (phi - s)` at the final sample.
    pub lambda_end: f64,
    /// `mu = s^2 (lambda + 1)` at the final sample.
    pub mu_end: f64,
    /// Sup of `|lambda + 1|` over the last dyadic band.
    pub tail_lambda_dev: f64,
    /// Sup of `|mu + 2|` over the last dyadic band.
    pub tail_mu_dev: f64,
    /// Sup of `|psi|` over the last dyadic band.
    pub tail_psi: f64,
    /// Log-log slope of `|phi - (s - 1/s)|` over the last dyadic band,
    /// `None` when the remainder is identically below rounding.
    pub remainder_exponent: Option<f64>,
    /// Set when the remainder vanished to rounding and no fit was made.
    pub degenerate_remainder: bool,
}

impl AsymptoticReport {
    pub fn json_summary(&self, traj: &PhiTrajectory) -> serde_json::Value {
        serde_json::json!({
            "tail_lambda": self.lambda_end,
            "tail_mu": self.mu_end,
            "tail_lambda_dev": self.tail_lambda_dev,
            "tail_mu_dev": self.tail_mu_dev,
            "tail_psi": self.tail_psi,
            "remainder_exponent": self.remainder_exponent,
            "degenerate_remainder": self.degenerate_remainder,
            "blowup": traj.blew_up(),
        })
    }
}

/// Compute the derived asymptotic curves and tail fits from a trajectory.
/// The derived curves come exactly from the stored samples; nothing is
/// re-integrated.
pub fn asymptotic_diagnostics(traj: &PhiTrajectory) -> Result<AsymptoticReport> {
    if traj.blew_up() {
        return Err(Error::BlowUp(traj.s_end()));
    }
    let s_end = traj.s_end();
    if s_end < 4.0 * traj.s[0] {
        return Err(Error::InsufficientExtent(format!(
            "trajectory must reach s_end >= 4 s0; got [{}, {}]",
            traj.s[0], s_end
        )));
    }
    let s = traj.s_end();
    let phi = traj.phi_end();
    let lambda_end = s * (phi - s);
    let mu_end = s * s * (lambda_end + 1.0);

    let band_lo = s_end / 2.0;
    let mut tail_lambda_dev = 0.0f64;
    let mut tail_mu_dev = 0.0f64;
    let mut tail_psi = 0.0f64;
    let mut rem_pts: Vec<(f64, f64)> = Vec::new();
    for k in 0..traj.s.len() {
        let sk = traj.s[k];
        if sk < band_lo {
            continue;
        }
        let psi = traj.phi[k] - sk;
        let lambda = sk * psi;
        let mu = sk * sk * (lambda + 1.0);
        tail_lambda_dev = tail_lambda_dev.max((lambda + 1.0).abs());
        tail_mu_dev = tail_mu_dev.max((mu + 2.0).abs());
        tail_psi = tail_psi.max(psi.abs());
        let rem = (traj.phi[k] - (sk - 1.0 / sk)).abs();
        rem_pts.push((sk, rem));
    }
    // below ~100 ulps of phi the remainder is noise, not signal
    let floor = 1e-13 * s_end;
    let clean: Vec<(f64, f64)> = rem_pts.iter().cloned().filter(|&(_, r)| r > floor).collect();
    let (remainder_exponent, degenerate) = if clean.len() < rem_pts.len() / 2 || clean.len() < 8 {
        (None, true)
    } else {
        let (_, p) = banding::loglog_fit(&clean)?;
        (Some(p), false)
    };
    Ok(AsymptoticReport {
        lambda_end,
        mu_end,
        tail_lambda_dev,
        tail_mu_dev,
        tail_psi,
        remainder_exponent,
        degenerate_remainder: degenerate,
    })
}

/// Recover the profile `r = f(z)` from a phi trajectory by quadrature of
/// `z_s = phi` and monotone inversion (`f(z(s)) = s`, `f_z = 1/phi`).
pub fn profile_from_phi(traj: &PhiTrajectory, z_at_s0: f64) -> Result<ProfileCurve> {
    for (&s, &phi) in traj.s.iter().zip(traj.phi.iter()) {
        if !(phi > 0.0) {
            return Err(Error::NotGraphical(format!(
                "phi = {phi} <= 0 at s = {s}: outside the graphical regime"
            )));
        }
    }
    let n = traj.s.len();
    let mut z = Vec::with_capacity(n);
    z.push(z_at_s0);
    for k in 1..n {
        let h = traj.s[k] - traj.s[k - 1];
        // cubic Hermite quadrature using the stored slopes
        let dz = h / 2.0 * (traj.phi[k - 1] + traj.phi[k])
            + h * h / 12.0 * (traj.dphi[k - 1] - traj.dphi[k]);
        z.push(z[k - 1] + dz);
    }
    let r = traj.s.clone();
    let r_z: Vec<f64> = traj.phi.iter().map(|&p| 1.0 / p).collect();
    ProfileCurve::graph_in_z(z, r, r_z)
}

/// Where to start an arclength integration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ArclengthStart {
    pub r: f64,
    pub z: f64,
    /// Initial tangent angle from the r-axis (`pi/2` = straight up).
    pub angle: f64,
}

/// Integrate the translator profile as an arclength curve in the `(r, z)`
/// half-plane, both directions from the start, passing through vertical
/// tangents. The curvature law is `d(angle)/d(sigma) = cos(angle) - sin(angle)/r`
/// (the surface-of-revolution form of `H = <tau, nu>`).
pub fn integrate_profile_arclength(
    start: ArclengthStart,
    length: f64,
    tol: f64,
) -> Result<ProfileCurve> {
    if !(start.r > 0.0) {
        return Err(Error::NonPositiveRadius(format!("start radius {}", start.r)));
    }
    if !(length > 0.0) || !(tol > 1e-14 && tol < 1e-3) {
        return Err(Error::InvalidArgument(
            "need length > 0 and tol in (1e-14, 1e-3)".into(),
        ));
    }
    let r_floor = 1e-9;
    let rhs = move |_t: f64, y: &[f64; 3]| {
        let [r, _z, a] = *y;
        let r_safe = r.max(r_floor);
        [a.cos(), a.sin(), a.cos() - a.sin() / r_safe]
    };

    let run_dir = |dir: f64| {
        let y0 = if dir > 0.0 {
            [start.r, start.z, start.angle]
        } else {
            // traverse the other way: tangent reversed
            [start.r, start.z, start.angle + std::f64::consts::PI]
        };
        let (t, y, _dy, end) = dopri5(
            &rhs,
            0.0,
            y0,
            length,
            tol,
            1e12,
            |_t, y| y[0] <= r_floor * 2.0,
        );
        let terminal = match end {
            StepEnd::Event(y) => ArclengthEnd::AxisClosure { z: y[1] },
            _ => ArclengthEnd::Length,
        };
        (t, y, terminal)
    };

    let (t_fwd, y_fwd, end_fwd) = run_dir(1.0);
    let (t_bwd, y_bwd, end_bwd) = run_dir(-1.0);

    // stitch: backward samples reversed (sigma negated, angle un-reversed)
    let mut sigma = Vec::with_capacity(t_fwd.len() + t_bwd.len() - 1);
    let mut r = Vec::new();
    let mut z = Vec::new();
    let mut angle = Vec::new();
    for k in (1..t_bwd.len()).rev() {
        sigma.push(-t_bwd[k]);
        r.push(y_bwd[k][0]);
        z.push(y_bwd[k][1]);
        angle.push(y_bwd[k][2] - std::f64::consts::PI);
    }
    for k in 0..t_fwd.len() {
        sigma.push(t_fwd[k]);
        r.push(y_fwd[k][0]);
        z.push(y_fwd[k][1]);
        angle.push(y_fwd[k][2]);
    }

    // neck detection: dr/dsigma = cos(angle) crosses zero at a local minimum of r
    let mut necks = Vec::new();
    for k in 1..sigma.len().saturating_sub(1) {
        let (cm, cp) = (angle[k - 1].cos(), angle[k + 1].cos());
        if cm < 0.0 && cp > 0.0 && r[k] > 0.0 {
            necks.push(NeckPoint {
                r: r[k],
                z: z[k],
                sigma: sigma[k],
            });
        }
    }
    // the start itself may be the neck (vertical tangent, r minimal)
    if start.angle.cos().abs() < 1e-12 {
        let near_start = necks.iter().any(|n: &NeckPoint| (n.sigma).abs() < 1e-6);
        let k0 = sigma
            .iter()
            .position(|&s| s == 0.0)
            .unwrap_or(0);
        let locally_minimal = k0 > 0
            && k0 + 1 < r.len()
            && r[k0] <= r[k0 - 1] + 1e-12
            && r[k0] <= r[k0 + 1] + 1e-12;
        if !near_start && locally_minimal {
            necks.push(NeckPoint {
                r: start.r,
                z: start.z,
                sigma: 0.0,
            });
        }
    }
    necks.sort_by(|a, b| a.sigma.partial_cmp(&b.sigma).unwrap());

    Ok(ProfileCurve {
        data: ProfileData::Arclength {
            sigma,
            r,
            z,
            angle,
            necks,
            start_end: end_bwd,
            finish_end: end_fwd,
        },
    })
}

/// Smallest sampled z beyond which `f' > 0` at every node; `+inf` when no
/// such point exists within the samples.
pub fn monotone_from(profile: &ProfileCurve) -> Result<f64> {
    let ProfileData::GraphInZ { z, r_z, .. } = &profile.data else {
        return Err(Error::NotGraphical("monotone_from needs a graph-in-z profile".into()));
    };
    let mut last_bad: Option<usize> = None;
    for (k, &d) in r_z.iter().enumerate() {
        if d <= 0.0 {
            last_bad = Some(k);
        }
    }
    Ok(match last_bad {
        None => z[0],
        Some(k) if k + 1 < z.len() => z[k + 1],
        Some(_) => f64::INFINITY,
    })
}
