//! The Townes soliton: the positive radial ground state of
//! `-Δw + w - w^3 = 0` in the plane, found by shooting on `w(0)`.
//!
//! In radial form the equation reads `w'' + w'/r - w + w^3 = 0` with
//! `w'(0) = 0`. Trial values of `w(0)` that are too small turn back up
//! before reaching zero, values that are too large cross zero; bisection
//! between the two behaviours converges to the soliton. Past the radius at
//! which the two bracketing trajectories separate, the profile is continued
//! by the asymptotic form `c r^{-1/2} e^{-r}`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid};

/// Absolute and relative local error target of the adaptive integrator.
const ODE_TOL: f64 = 1e-12;
/// Taylor start radius near the coordinate singularity.
const TAYLOR_START: f64 = 1e-4;
/// A trajectory falling below this level while still decaying like
/// `e^{-r}` is taken to be the decaying solution.
pub const DECAY_FLOOR: f64 = 1e-7;
/// Default radial table spacing.
pub const DEFAULT_DR: f64 = 0.005;
pub const DEFAULT_R_MAX: f64 = 20.0;
/// Relative separation of the bracketing trajectories at which the
/// numerical profile is no longer trusted.
const SEPARATION_LIMIT: f64 = 1e-4;
/// Allowed relative drop of the tail amplitude below its running maximum.
const TAIL_DRIFT: f64 = 5e-3;

/// Classification of a single shot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShotOutcome {
    /// `w` reached zero at radius `r`: the initial value was too large.
    CrossesZero { r: f64 },
    /// `w` turned upward (or never decayed) while positive: too small.
    StaysPositiveAndGrows { r: f64 },
    /// `w` decayed below [`DECAY_FLOOR`], or reached the horizon still
    /// decreasing, without crossing or turning.
    Decays,
}

#[derive(Debug, Clone)]
struct Trajectory {
    r: Vec<f64>,
    w: Vec<f64>,
    p: Vec<f64>,
    outcome: ShotOutcome,
}

#[inline]
fn rhs(r: f64, w: f64, p: f64) -> (f64, f64) {
    (p, w - w * w * w - p / r)
}

/// One Dormand-Prince 5(4) step. Returns the 5th-order state and the
/// scaled error norm.
fn dp45_step(r: f64, w: f64, p: f64, h: f64) -> (f64, f64, f64) {
    const C2: f64 = 1.0 / 5.0;
    const C3: f64 = 3.0 / 10.0;
    const C4: f64 = 4.0 / 5.0;
    const C5: f64 = 8.0 / 9.0;
    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B5: f64 = -2187.0 / 6784.0;
    const B6: f64 = 11.0 / 84.0;
    // 5th minus 4th order weights
    const E1: f64 = 71.0 / 57600.0;
    const E3: f64 = -71.0 / 16695.0;
    const E4: f64 = 71.0 / 1920.0;
    const E5: f64 = -17253.0 / 339200.0;
    const E6: f64 = 22.0 / 525.0;
    const E7: f64 = -1.0 / 40.0;

    let k1 = rhs(r, w, p);
    let k2 = rhs(r + C2 * h, w + h * A21 * k1.0, p + h * A21 * k1.1);
    let k3 = rhs(
        r + C3 * h,
        w + h * (A31 * k1.0 + A32 * k2.0),
        p + h * (A31 * k1.1 + A32 * k2.1),
    );
    let k4 = rhs(
        r + C4 * h,
        w + h * (A41 * k1.0 + A42 * k2.0 + A43 * k3.0),
        p + h * (A41 * k1.1 + A42 * k2.1 + A43 * k3.1),
    );
    let k5 = rhs(
        r + C5 * h,
        w + h * (A51 * k1.0 + A52 * k2.0 + A53 * k3.0 + A54 * k4.0),
        p + h * (A51 * k1.1 + A52 * k2.1 + A53 * k3.1 + A54 * k4.1),
    );
    let k6 = rhs(
        r + h,
        w + h * (A61 * k1.0 + A62 * k2.0 + A63 * k3.0 + A64 * k4.0 + A65 * k5.0),
        p + h * (A61 * k1.1 + A62 * k2.1 + A63 * k3.1 + A64 * k4.1 + A65 * k5.1),
    );
    let w5 = w + h * (B1 * k1.0 + B3 * k3.0 + B4 * k4.0 + B5 * k5.0 + B6 * k6.0);
    let p5 = p + h * (B1 * k1.1 + B3 * k3.1 + B4 * k4.1 + B5 * k5.1 + B6 * k6.1);
    let k7 = rhs(r + h, w5, p5);
    let ew = h * (E1 * k1.0 + E3 * k3.0 + E4 * k4.0 + E5 * k5.0 + E6 * k6.0 + E7 * k7.0);
    let ep = h * (E1 * k1.1 + E3 * k3.1 + E4 * k4.1 + E5 * k5.1 + E6 * k6.1 + E7 * k7.1);
    let sw = ODE_TOL + ODE_TOL * w.abs().max(w5.abs());
    let sp = ODE_TOL + ODE_TOL * p.abs().max(p5.abs());
    let err = (ew / sw).abs().max((ep / sp).abs());
    (w5, p5, err)
}

/// Integrates from the origin out to `r_max`, sampling every `dr`, and
/// stops at the first classifying event.
fn integrate(w0: f64, r_max: f64, dr: f64) -> Result<Trajectory> {
    let n_out = (r_max / dr).round() as usize;
    let mut traj = Trajectory {
        r: vec![0.0],
        w: vec![w0],
        p: vec![0.0],
        outcome: ShotOutcome::StaysPositiveAndGrows { r: r_max },
    };
    let curv = 0.5 * (w0 - w0 * w0 * w0);
    let mut r = TAYLOR_START;
    let mut w = w0 + 0.5 * curv * r * r;
    let mut p = curv * r;
    let mut h: f64 = 1e-3;

    for k in 1..=n_out {
        let target = k as f64 * dr;
        while r < target {
            let last = h >= target - r;
            let step = if last { target - r } else { h };
            let (w5, p5, err) = dp45_step(r, w, p, step);
            if !(w5.is_finite() && p5.is_finite() && err.is_finite()) {
                return Err(Error::IntegrationFailure {
                    r,
                    reason: "non-finite state".into(),
                });
            }
            if err <= 1.0 {
                let (r_prev, w_prev) = (r, w);
                r = if last { target } else { r + step };
                w = w5;
                p = p5;
                if w <= 0.0 {
                    let rc = r_prev + step * w_prev / (w_prev - w);
                    traj.outcome = ShotOutcome::CrossesZero { r: rc };
                    return Ok(traj);
                }
                if let Some(outcome) = classify_positive(r, w, p) {
                    traj.outcome = outcome;
                    return Ok(traj);
                }
            }
            let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
            h = step * factor.clamp(0.2, 5.0);
            if h < 1e-14 {
                return Err(Error::IntegrationFailure {
                    r,
                    reason: "step size underflow".into(),
                });
            }
        }
        traj.r.push(target);
        traj.w.push(w);
        traj.p.push(p);
    }
    // reached the horizon without an event: still decreasing counts as
    // decaying, a flat trajectory (w0 = 1) as too small
    if p < 0.0 {
        traj.outcome = ShotOutcome::Decays;
    }
    Ok(traj)
}

/// Event test for a positive state.
fn classify_positive(r: f64, w: f64, p: f64) -> Option<ShotOutcome> {
    if p > 0.0 {
        return Some(ShotOutcome::StaysPositiveAndGrows { r });
    }
    // a shot about to cross also passes below the floor, but with a
    // log-derivative far from the decaying -1 - 1/(2r)
    if w < DECAY_FLOOR && (-2.0..-0.5).contains(&(p / w)) {
        return Some(ShotOutcome::Decays);
    }
    None
}

/// Classifies the trajectory started from `w(0) = w0_trial`.
pub fn shoot(w0_trial: f64, r_max: f64) -> Result<ShotOutcome> {
    if !(w0_trial > 0.0) || !w0_trial.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "w0 must be positive, got {w0_trial}"
        )));
    }
    if !(r_max >= 20.0) || !r_max.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "r_max must be at least 20, got {r_max}"
        )));
    }
    Ok(integrate(w0_trial, r_max, DEFAULT_DR)?.outcome)
}

/// Headline constants of a solved profile.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TownesConstants {
    pub w0: f64,
    pub a_star: f64,
    pub i2: f64,
    pub norm_grad2: f64,
    pub norm_l2: f64,
    pub norm_l4: f64,
}

/// Tabulated Townes soliton with its derived constants.
#[derive(Debug, Clone)]
pub struct TownesProfile {
    pub dr: f64,
    pub r_max: f64,
    pub r_samples: Vec<f64>,
    pub w_samples: Vec<f64>,
    pub w_prime: Vec<f64>,
    /// Fritsch-Carlson limited slopes used by the interpolant.
    slopes: Vec<f64>,
    pub w0: f64,
    /// Bracket `(lo, hi)` on `w(0)` at termination.
    pub bracket: (f64, f64),
    /// Radius where the numerical profile hands over to the tail.
    pub r_match: f64,
    /// Tail amplitude: `w(r) = tail_c r^{-1/2} e^{-r}` for `r >= r_match`.
    pub tail_c: f64,
    /// `‖w‖_2^2`, the critical interaction strength.
    pub a_star: f64,
    /// `∫|x|^2 w^2 dx`.
    pub i2: f64,
    pub norm_grad2: f64,
    pub norm_l2: f64,
    pub norm_l4: f64,
}

/// Solves for the Townes profile by bisection on `w(0)`.
pub fn solve_townes(tol: f64, r_max: f64) -> Result<TownesProfile> {
    if !(tol > 1e-14 && tol <= 1e-4) {
        return Err(Error::InvalidParameter(format!(
            "tolerance {tol} outside (1e-14, 1e-4]"
        )));
    }
    if !(r_max >= 20.0) || !r_max.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "r_max must be at least 20, got {r_max}"
        )));
    }
    let dr = {
        // even number of intervals for Simpson's rule
        let n = ((r_max / DEFAULT_DR).round() as usize + 1) & !1;
        r_max / n as f64
    };

    let (mut lo, mut hi) = (0.1, 10.0);
    let too_small = |o: ShotOutcome| matches!(o, ShotOutcome::StaysPositiveAndGrows { .. });
    let too_large = |o: ShotOutcome| matches!(o, ShotOutcome::CrossesZero { .. });
    if !too_small(integrate(lo, r_max, dr)?.outcome)
        || !too_large(integrate(hi, r_max, dr)?.outcome)
    {
        return Err(Error::BracketingFailure { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match integrate(mid, r_max, dr)?.outcome {
            o if too_large(o) => hi = mid,
            ShotOutcome::Decays => {
                lo = mid;
                hi = mid;
            }
            _ => lo = mid,
        }
    }
    let w0 = 0.5 * (lo + hi);
    let mid = integrate(w0, r_max, dr)?;
    let tr_lo = integrate(lo, r_max, dr)?;
    let tr_hi = integrate(hi, r_max, dr)?;

    // last table index where the bracketing shots still agree and the
    // midpoint shot is a positive decreasing curve; past r = 5 the
    // amplitude w sqrt(r) e^r must also stay level, which catches the
    // error shared by all three shots
    let n_common = mid.r.len().min(tr_lo.r.len()).min(tr_hi.r.len());
    let mut k_match = 1;
    let mut c_peak = 0.0_f64;
    for k in 1..n_common {
        let (r, w) = (mid.r[k], mid.w[k]);
        let sep = (tr_hi.w[k] - tr_lo.w[k]).abs();
        if w <= 0.0 || mid.p[k] >= 0.0 || sep > SEPARATION_LIMIT * w {
            break;
        }
        if r >= 5.0 {
            let c = w * r.sqrt() * r.exp();
            if c < (1.0 - TAIL_DRIFT) * c_peak {
                break;
            }
            c_peak = c_peak.max(c);
        }
        k_match = k;
    }
    if k_match < 10 {
        return Err(Error::IntegrationFailure {
            r: mid.r[k_match],
            reason: "profile never separated from the bracketing shots".into(),
        });
    }
    let r_match = mid.r[k_match];
    let tail_c = mid.w[k_match] * r_match.sqrt() * r_match.exp();

    let n = (r_max / dr).round() as usize;
    let mut r_samples = Vec::with_capacity(n + 1);
    let mut w_samples = Vec::with_capacity(n + 1);
    let mut w_prime = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let r = k as f64 * dr;
        r_samples.push(r);
        if k <= k_match {
            w_samples.push(mid.w[k]);
            w_prime.push(mid.p[k]);
        } else {
            w_samples.push(tail_value(tail_c, r));
            w_prime.push(tail_derivative(tail_c, r));
        }
    }
    let slopes = limited_slopes(&w_samples, &w_prime, dr);

    let simpson = |f: &dyn Fn(usize) -> f64| -> f64 {
        let mut s = f(0) + f(n);
        for k in 1..n {
            s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k);
        }
        s * dr / 3.0
    };
    let two_pi = 2.0 * PI;
    // closed-form tails past r_max; w^2 r = c^2 e^{-2r}
    let c2 = tail_c * tail_c;
    let e2 = (-2.0 * r_max).exp();
    let l2 = two_pi * (simpson(&|k| w_samples[k].powi(2) * r_samples[k]) + 0.5 * c2 * e2);
    let grad2 = two_pi * (simpson(&|k| w_prime[k].powi(2) * r_samples[k]) + 0.5 * c2 * e2);
    let l4 = two_pi * simpson(&|k| w_samples[k].powi(4) * r_samples[k]);
    let i2 = two_pi
        * (simpson(&|k| w_samples[k].powi(2) * r_samples[k].powi(3))
            + c2 * e2 * (0.5 * r_max * r_max + 0.5 * r_max + 0.25));

    Ok(TownesProfile {
        dr,
        r_max,
        r_samples,
        w_samples,
        w_prime,
        slopes,
        w0,
        bracket: (lo, hi),
        r_match,
        tail_c,
        a_star: l2,
        i2,
        norm_grad2: grad2,
        norm_l2: l2,
        norm_l4: l4,
    })
}

#[inline]
fn tail_value(c: f64, r: f64) -> f64 {
    c * (-r).exp() / r.sqrt()
}

#[inline]
fn tail_derivative(c: f64, r: f64) -> f64 {
    -c * (-r).exp() / r.sqrt() * (1.0 + 0.5 / r)
}

/// Hermite slopes limited so that each cubic piece stays monotone.
fn limited_slopes(w: &[f64], dw: &[f64], dr: f64) -> Vec<f64> {
    let mut m = dw.to_vec();
    for k in 0..w.len() - 1 {
        let delta = (w[k + 1] - w[k]) / dr;
        if delta == 0.0 {
            m[k] = 0.0;
            m[k + 1] = 0.0;
            continue;
        }
        let alpha = m[k] / delta;
        let beta = m[k + 1] / delta;
        if alpha < 0.0 {
            m[k] = 0.0;
        }
        if beta < 0.0 {
            m[k + 1] = 0.0;
        }
        let s = alpha * alpha + beta * beta;
        if s > 9.0 {
            let t = 3.0 / s.sqrt();
            m[k] = t * alpha * delta;
            m[k + 1] = t * beta * delta;
        }
    }
    m
}

impl TownesProfile {
    pub fn constants(&self) -> TownesConstants {
        TownesConstants {
            w0: self.w0,
            a_star: self.a_star,
            i2: self.i2,
            norm_grad2: self.norm_grad2,
            norm_l2: self.norm_l2,
            norm_l4: self.norm_l4,
        }
    }

    /// `w(r)`, monotone cubic inside the table and the asymptotic tail
    /// beyond it.
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        if r >= self.r_max {
            return tail_value(self.tail_c, r);
        }
        let x = r / self.dr;
        let k = (x.floor() as usize).min(self.w_samples.len() - 2);
        let t = x - k as f64;
        let (y0, y1) = (self.w_samples[k], self.w_samples[k + 1]);
        let (m0, m1) = (self.slopes[k] * self.dr, self.slopes[k + 1] * self.dr);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1
    }

    /// `w'(r)` from the same interpolant.
    pub fn eval_derivative(&self, r: f64) -> f64 {
        let r = r.abs();
        if r >= self.r_max {
            return tail_derivative(self.tail_c, r);
        }
        let x = r / self.dr;
        let k = (x.floor() as usize).min(self.w_samples.len() - 2);
        let t = x - k as f64;
        let (y0, y1) = (self.w_samples[k], self.w_samples[k + 1]);
        let (m0, m1) = (self.slopes[k] * self.dr, self.slopes[k + 1] * self.dr);
        let t2 = t * t;
        ((6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1)
            / self.dr
    }
}

/// `λ = (∫ V w^2)^{1/4}` for `V = x1^2 + Λ x2^2`, using
/// `∫x1^2 w^2 = ∫x2^2 w^2 = i2 / 2`.
pub fn lambda_param(profile: &TownesProfile, lambda_aniso: f64) -> Result<f64> {
    if !(lambda_aniso > 0.0) || !lambda_aniso.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "trap anisotropy must be positive, got {lambda_aniso}"
        )));
    }
    Ok((0.5 * (1.0 + lambda_aniso) * profile.i2).powf(0.25))
}

/// Samples `w(scale |x - center|)` on the grid (real, zero outside).
pub fn interp_to_grid(
    profile: &TownesProfile,
    grid: &Arc<Grid>,
    scale: f64,
    center: [f64; 2],
) -> ComplexField {
    ComplexField::from_fn(grid.clone(), |x, y| {
        let r = scale * (x - center[0]).hypot(y - center[1]);
        Complex64::new(profile.eval(r), 0.0)
    })
}
