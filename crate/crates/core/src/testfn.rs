//! Explicit trial states: a cut-off, rescaled Townes profile concentrated at
//! a minimum of `V_Omega`, carrying the gauge phase of the rotation. Their
//! energies bound the ground-state energy from above and, past the critical
//! mass, decrease without bound as the concentration grows.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::energy::{gp_energy, EnergyBreakdown, PotentialSpec};
use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid};
use crate::townes::{lambda_param, TownesProfile};

/// Default cut-off radius multiplier.
pub const DEFAULT_M: f64 = 4.0;
/// Largest admissible `tau * h`.
pub const MAX_TAU_H: f64 = 0.5;
/// Fewest grid cells the cut-off radius must span.
pub const MIN_CUTOFF_CELLS: f64 = 4.0;
/// Number of scales in the upper-bound scan and its half-width factor.
pub const SCAN_POINTS: usize = 30;
pub const SCAN_FACTOR: f64 = 4.0;

#[derive(Debug, Clone, Copy)]
pub struct TrialParams<'a> {
    pub tau: f64,
    pub x_tau: [f64; 2],
    pub m: f64,
    pub profile: &'a TownesProfile,
}

impl TrialParams<'_> {
    /// Cut-off radius `R = M ln(tau) / tau`.
    pub fn r_tau(&self) -> f64 {
        self.m * self.tau.ln() / self.tau
    }

    fn check(&self, grid: &Grid) -> Result<()> {
        if !(self.tau > 1.0) || !self.tau.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "tau must exceed 1, got {}",
                self.tau
            )));
        }
        if !(self.m > 0.0) || !self.m.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "M must be positive, got {}",
                self.m
            )));
        }
        let r2 = 2.0 * self.r_tau();
        if !grid.spec.contains_ball(self.x_tau, r2) {
            return Err(Error::Geometry(format!(
                "ball of radius {r2} about ({}, {}) leaves the domain",
                self.x_tau[0], self.x_tau[1]
            )));
        }
        let h = grid.h_max();
        let tau_h = self.tau * h;
        if tau_h > MAX_TAU_H {
            return Err(Error::Resolution(format!(
                "tau*h = {tau_h} exceeds {MAX_TAU_H}"
            )));
        }
        // near tau = 1 the cut-off radius shrinks to lattice scale, where
        // the discrete energy is not bounded below
        if self.r_tau() < MIN_CUTOFF_CELLS * h {
            return Err(Error::Resolution(format!(
                "cut-off radius {} spans fewer than {MIN_CUTOFF_CELLS} cells",
                self.r_tau()
            )));
        }
        Ok(())
    }
}

/// `1` on `[0, 1]`, `cos^2(pi (s - 1) / 2)` on `(1, 2)`, `0` beyond.
#[inline]
pub fn cutoff(s: f64) -> f64 {
    if s <= 1.0 {
        1.0
    } else if s < 2.0 {
        (0.5 * std::f64::consts::PI * (s - 1.0)).cos().powi(2)
    } else {
        0.0
    }
}

/// The normalized trial state.
pub fn build_trial(params: &TrialParams, grid: &Arc<Grid>, omega: f64) -> Result<ComplexField> {
    params.check(grid)?;
    let (tau, c, r) = (params.tau, params.x_tau, params.r_tau());
    let w = params.profile;
    let mut u = ComplexField::from_fn(grid.clone(), |x, y| {
        let (dx, dy) = (x - c[0], y - c[1]);
        let d = dx.hypot(dy);
        let phi = cutoff(d / r);
        if phi == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        // x . x_tau_perp with x_perp = (-x2, x1)
        let phase = 0.5 * omega * (y * c[0] - x * c[1]);
        Complex64::from_polar(phi * w.eval(tau * d), phase)
    });
    u.normalize()?;
    Ok(u)
}

pub fn trial_energy(
    params: &TrialParams,
    grid: &Arc<Grid>,
    a: f64,
    pot: &PotentialSpec,
) -> Result<EnergyBreakdown> {
    let u = build_trial(params, grid, pot.omega)?;
    gp_energy(&u, a, pot)
}

/// A minimizer of `V_Omega` on the closed domain and whether it lies on the
/// boundary.
pub fn v_omega_minimum(grid: &Grid, pot: &PotentialSpec) -> ([f64; 2], bool) {
    let inner = pot.v_omega_minimizer(grid);
    let vi = pot.v_omega(inner[0], inner[1]);
    let best = grid
        .spec
        .boundary_samples(4096)
        .into_iter()
        .min_by(|p, q| pot.v_omega(p[0], p[1]).total_cmp(&pot.v_omega(q[0], q[1])));
    match best {
        Some(p) if pot.v_omega(p[0], p[1]) < vi - 1e-12 * (1.0 + vi.abs()) => (p, true),
        _ => (inner, false),
    }
}

/// Center of the trial state at cut-off radius `r_tau`: the minimizer of
/// `V_Omega`, pushed inward by `2 r_tau` along the normal when it lies on
/// the boundary.
pub fn trial_center(grid: &Grid, pot: &PotentialSpec, r_tau: f64) -> Result<[f64; 2]> {
    let (x0, on_boundary) = v_omega_minimum(grid, pot);
    if !on_boundary {
        return Ok(x0);
    }
    let n = grid.spec.outward_normal(x0).ok_or_else(|| {
        Error::Geometry("boundary minimum on a domain without an analytic normal".into())
    })?;
    Ok([x0[0] - 2.0 * r_tau * n[0], x0[1] - 2.0 * r_tau * n[1]])
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperBound {
    pub tau: f64,
    pub energy: EnergyBreakdown,
    /// `(tau, total)` for every admissible scale of the scan.
    pub scan: Vec<(f64, f64)>,
}

/// The least trial energy over log-spaced scales around the predicted
/// blow-up scale `lambda (a* - a)^{-1/4}`. Inadmissible scales (core not
/// resolved, cut-off ball leaving the domain, `tau <= 1`) are skipped.
pub fn optimal_upper_bound(
    grid: &Arc<Grid>,
    profile: &TownesProfile,
    a: f64,
    pot: &PotentialSpec,
) -> Result<UpperBound> {
    pot.validate()?;
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "a must be positive, got {a}"
        )));
    }
    if a >= profile.a_star {
        return Err(Error::Supercritical {
            a,
            a_star: profile.a_star,
        });
    }
    let tau_c = lambda_param(profile, pot.lambda)? * (profile.a_star - a).powf(-0.25);
    let mut best: Option<(f64, EnergyBreakdown)> = None;
    let mut scan = Vec::new();
    for k in 0..SCAN_POINTS {
        let t = 2.0 * k as f64 / (SCAN_POINTS - 1) as f64 - 1.0;
        let tau = tau_c * SCAN_FACTOR.powf(t);
        let m = DEFAULT_M;
        let r = if tau > 1.0 { m * tau.ln() / tau } else { 0.0 };
        let Ok(x_tau) = trial_center(grid, pot, r) else {
            continue;
        };
        let params = TrialParams {
            tau,
            x_tau,
            m,
            profile,
        };
        match trial_energy(&params, grid, a, pot) {
            Ok(e) => {
                scan.push((tau, e.total));
                // strict comparison keeps the smaller tau on ties
                if best.as_ref().is_none_or(|(_, b)| e.total < b.total) {
                    best = Some((tau, e));
                }
            }
            Err(Error::Resolution(_))
            | Err(Error::Geometry(_))
            | Err(Error::InvalidParameter(_)) => {}
            Err(e) => return Err(e),
        }
    }
    match best {
        Some((tau, energy)) => Ok(UpperBound { tau, energy, scan }),
        None => Err(Error::Resolution(format!(
            "no admissible scale in [{}, {}] on this grid",
            tau_c / SCAN_FACTOR,
            tau_c * SCAN_FACTOR
        ))),
    }
}
