//! Blow-up analysis of ground states as `a` approaches `a*`.
//!
//! A minimizer `u` with kinetic length `eps = (∫|∇u|²)^{-1/2}` and peak
//! `x_a` is rescaled as
//!
//! ```text
//! w_a(x) = eps u(eps x + x_a) exp(i (theta - eps Omega x·x_a^perp / 2))
//! ```
//!
//! on the window `|x| <= 12`, with `theta` the phase that brings `w_a`
//! closest to `w / sqrt(a*)`. The limits checked along a sweep are the
//! scaled energy, `mu eps²`, the length scale, the peak location, the
//! profile itself and the rotational current.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::minimize::MinimizeResult;
use crate::townes::{lambda_param, TownesProfile};

/// Half-width of the blow-up window in rescaled units.
pub const WINDOW_HALF_WIDTH: f64 = 12.0;
/// Finest and coarsest admissible window spacing.
const MIN_SPACING: f64 = 0.02;
const MAX_SPACING: f64 = 0.1;

/// Rotates `v` onto the real reference: `theta = -arg Σ v w_ref`, returned
/// in `[0, 2pi)`, and `e^{i theta} v`. The imaginary part of the result is
/// orthogonal to `w_ref`.
pub fn phase_align(v: &[Complex64], w_ref: &[f64]) -> Result<(f64, Vec<Complex64>)> {
    if v.len() != w_ref.len() {
        return Err(Error::InvalidParameter(format!(
            "sample counts differ: {} vs {}",
            v.len(),
            w_ref.len()
        )));
    }
    let overlap: Complex64 = v.iter().zip(w_ref).map(|(z, &w)| z * w).sum();
    let scale: f64 = v.iter().zip(w_ref).map(|(z, &w)| z.norm() * w.abs()).sum();
    if !(overlap.norm() > 1e-14 * scale) {
        return Err(Error::AlignmentDegenerate);
    }
    let theta = (-overlap.arg()).rem_euclid(std::f64::consts::TAU);
    // rem_euclid can round up to exactly 2pi
    let theta = if theta >= std::f64::consts::TAU {
        0.0
    } else {
        theta
    };
    let rot = Complex64::from_polar(1.0, theta);
    Ok((theta, v.iter().map(|z| z * rot).collect()))
}

/// Square lattice `k * spacing`, `|k| <= n_half` per axis, restricted to
/// the disk of radius [`WINDOW_HALF_WIDTH`] (values outside are zero).
#[derive(Debug, Clone)]
pub struct BlowupWindow {
    pub spacing: f64,
    pub n_half: usize,
    /// Row-major, `(2 n_half + 1)^2` values, x fastest.
    pub values: Vec<Complex64>,
}

impl BlowupWindow {
    pub fn side(&self) -> usize {
        2 * self.n_half + 1
    }

    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let s = self.side();
        let off = self.n_half as f64;
        (
            ((idx % s) as f64 - off) * self.spacing,
            ((idx / s) as f64 - off) * self.spacing,
        )
    }

    fn sum<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        (0..self.values.len()).map(f).sum::<f64>() * self.spacing * self.spacing
    }

    pub fn mass(&self) -> f64 {
        self.sum(|n| self.values[n].norm_sqr())
    }

    /// Fourth-order centered gradient; zero beyond the lattice.
    pub fn gradient(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let s = self.side() as isize;
        let at = |i: isize, j: isize| {
            if i < 0 || j < 0 || i >= s || j >= s {
                Complex64::new(0.0, 0.0)
            } else {
                self.values[(j * s + i) as usize]
            }
        };
        let c = 1.0 / (12.0 * self.spacing);
        let mut gx = Vec::with_capacity(self.values.len());
        let mut gy = Vec::with_capacity(self.values.len());
        for j in 0..s {
            for i in 0..s {
                gx.push((8.0 * (at(i + 1, j) - at(i - 1, j)) - (at(i + 2, j) - at(i - 2, j))) * c);
                gy.push((8.0 * (at(i, j + 1) - at(i, j - 1)) - (at(i, j + 2) - at(i, j - 2))) * c);
            }
        }
        (gx, gy)
    }
}

/// The rescaled, gauge-corrected and phase-aligned minimizer.
#[derive(Debug, Clone)]
pub struct RescaledProfile {
    pub window: BlowupWindow,
    pub eps: f64,
    pub theta: f64,
    /// `sup |sqrt(a*) w_a - w|`.
    pub profile_linf: f64,
    /// `|| Im w_a ||_2` over the window.
    pub imag_l2: f64,
    /// `|Omega ∫ x^perp · Im(conj(w_a) ∇w_a)| / eps²`.
    pub rotation_scaled: f64,
    /// `∫ |w_a|²` and `∫ |∇w_a|²` over the window.
    pub window_mass: f64,
    pub window_kinetic: f64,
    /// Some window point fell outside the domain and was taken as zero.
    pub clipped: bool,
}

pub fn rescale_profile(
    result: &MinimizeResult,
    profile: &TownesProfile,
) -> Result<RescaledProfile> {
    if !result.converged {
        return Err(Error::InvalidParameter(format!(
            "minimizer at a = {} did not converge",
            result.a
        )));
    }
    let eps = result.epsilon;
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Degenerate(format!(
            "kinetic length {eps} is not positive"
        )));
    }
    let u = &result.field;
    let grid = u.grid();
    let xa = result.x_max;
    let omega = result.pot.omega;

    // one sample per source node, within sane bounds
    let spacing = (grid.h_max() / eps).clamp(MIN_SPACING, MAX_SPACING);
    let n_half = (WINDOW_HALF_WIDTH / spacing).ceil() as usize;
    let side = 2 * n_half + 1;
    let r2 = WINDOW_HALF_WIDTH * WINDOW_HALF_WIDTH;
    let mut clipped = false;
    let mut values = vec![Complex64::new(0.0, 0.0); side * side];
    let mut reference = vec![0.0; side * side];
    let mut window = BlowupWindow {
        spacing,
        n_half,
        values: Vec::new(),
    };
    for (n, v) in values.iter_mut().enumerate() {
        let (x, y) = window.coords(n);
        if x * x + y * y > r2 {
            continue;
        }
        reference[n] = profile.eval(x.hypot(y));
        let (px, py) = (eps * x + xa[0], eps * y + xa[1]);
        if !grid.spec.contains(px, py) {
            clipped = true;
            continue;
        }
        // x · x_a^perp with x^perp = (-x2, x1)
        let gauge = -0.5 * eps * omega * (y * xa[0] - x * xa[1]);
        *v = u.sample(px, py) * Complex64::from_polar(eps, gauge);
    }

    let (theta, aligned) = phase_align(&values, &reference)?;
    window.values = aligned;
    let root = profile.a_star.sqrt();
    let profile_linf = window
        .values
        .iter()
        .zip(&reference)
        .map(|(z, &w)| (z * root - w).norm())
        .fold(0.0, f64::max);
    let imag_l2 = window.sum(|n| window.values[n].im.powi(2)).sqrt();
    let (gx, gy) = window.gradient();
    let window_kinetic = window.sum(|n| gx[n].norm_sqr() + gy[n].norm_sqr());
    let rotation = window.sum(|n| {
        let (x, y) = window.coords(n);
        let z = window.values[n].conj();
        -y * (z * gx[n]).im + x * (z * gy[n]).im
    });
    Ok(RescaledProfile {
        window_mass: window.mass(),
        window,
        eps,
        theta,
        profile_linf,
        imag_l2,
        rotation_scaled: (omega * rotation).abs() / (eps * eps),
        window_kinetic,
        clipped,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BlowupRecord {
    pub a: f64,
    pub e_a: f64,
    /// `e(a) (a* - a)^{-1/2}`.
    pub scaled_energy: f64,
    pub mu_eps2: f64,
    pub eps: f64,
    /// `(a* - a)^{1/4} / lambda`.
    pub eps_predicted: f64,
    pub x_max: [f64; 2],
    /// `|x_a| (a* - a)^{-1/4}`.
    pub x_scaled: f64,
    pub theta: f64,
    pub profile_linf: f64,
    pub rotation_scaled: f64,
    pub imag_l2: f64,
    pub window_mass: f64,
    pub window_kinetic: f64,
    pub n_local_max: usize,
    pub clipped: bool,
}

/// One record per sweep point; the sweep must share its potential, be
/// converged, subcritical and strictly increasing in `a`.
pub fn blowup_metrics(
    results: &[MinimizeResult],
    profile: &TownesProfile,
) -> Result<Vec<BlowupRecord>> {
    let Some(first) = results.first() else {
        return Ok(Vec::new());
    };
    let pot = first.pot;
    for (k, r) in results.iter().enumerate() {
        if r.pot != pot {
            return Err(Error::InconsistentSweep(format!(
                "point {k} uses a different potential"
            )));
        }
        if !r.converged {
            return Err(Error::InconsistentSweep(format!(
                "point {k} (a = {}) did not converge",
                r.a
            )));
        }
        if !(r.a > 0.0 && r.a < profile.a_star) {
            return Err(Error::InconsistentSweep(format!(
                "a = {} is outside (0, a*)",
                r.a
            )));
        }
        if k > 0 && !(r.a > results[k - 1].a) {
            return Err(Error::InconsistentSweep(
                "interaction strengths must increase".into(),
            ));
        }
    }
    if pot.validation_mode {
        return Err(Error::InconsistentSweep(
            "blow-up analysis needs a trapping potential".into(),
        ));
    }
    let lam = lambda_param(profile, pot.lambda)?;
    results
        .iter()
        .map(|r| {
            let gap = profile.a_star - r.a;
            let rp = rescale_profile(r, profile)?;
            Ok(BlowupRecord {
                a: r.a,
                e_a: r.breakdown.total,
                scaled_energy: r.breakdown.total / gap.sqrt(),
                mu_eps2: r.mu * r.epsilon * r.epsilon,
                eps: r.epsilon,
                eps_predicted: gap.powf(0.25) / lam,
                x_max: r.x_max,
                x_scaled: r.x_max[0].hypot(r.x_max[1]) * gap.powf(-0.25),
                theta: rp.theta,
                profile_linf: rp.profile_linf,
                rotation_scaled: rp.rotation_scaled,
                imag_l2: rp.imag_l2,
                window_mass: rp.window_mass,
                window_kinetic: rp.window_kinetic,
                n_local_max: r.n_local_max,
                clipped: rp.clipped,
            })
        })
        .collect()
}
