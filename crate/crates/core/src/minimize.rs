//! Ground states by normalized gradient flow with continuation in `a`.
//!
//! Each flow step is a preconditioned gradient step on the unit-mass
//! sphere. With `g = H u - mu u` the constrained gradient (`mu` the Rayleigh
//! quotient of the Euler-Lagrange operator `H`) the step solves
//!
//! ```text
//! (I + dt (-Lap + V + sigma)) d = g,     v = (u - dt d) / |u - dt d|,
//! ```
//!
//! `sigma = max(0, -mu)`. Fixed points are exactly the discrete
//! Euler-Lagrange solutions, whatever the accuracy of the inner solve, and
//! for large `dt` the step approaches an inverse-iteration update.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{
    gp_energy, lagrange_multiplier, linear_operator_into, EnergyBreakdown, PotentialSpec,
};
use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid};
use crate::linsolve::ShiftedOperator;
use crate::townes::{interp_to_grid, lambda_param, TownesProfile};

/// Consecutive decreasing steps after which a reduced `dt` is restored.
const RESTORE_AFTER: usize = 10;
/// Window (in accepted steps) of the relative energy-change test.
const ENERGY_WINDOW: usize = 10;
/// Fraction of the grid Nyquist kinetic energy at which a run is declared
/// under-resolved.
const COLLAPSE_FRACTION: f64 = 0.1;
/// Allowed relative energy increase of an accepted step.
const ACCEPT_SLACK: f64 = 1e-12;
const CG_MAX_ITER: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub dt: f64,
    pub tol_energy: f64,
    pub tol_residual: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub linear_solver_tol: f64,
    /// Relative amplitude of the random perturbation added to the initial
    /// field; zero disables it.
    pub perturbation: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 1.0,
            tol_energy: 1e-10,
            tol_residual: 1e-6,
            max_iter: 20_000,
            seed: 0,
            linear_solver_tol: 1e-3,
            perturbation: 0.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |t: f64| t > 0.0 && t < 1.0;
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !unit(self.tol_energy) || !unit(self.tol_residual) || !unit(self.linear_solver_tol) {
            return Err(Error::InvalidParameter(
                "solver tolerances must lie in (0, 1)".into(),
            ));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter(
                "max_iter must be at least 1".into(),
            ));
        }
        if !(self.perturbation >= 0.0) || !self.perturbation.is_finite() {
            return Err(Error::InvalidParameter(
                "perturbation amplitude must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub a: f64,
    pub pot: PotentialSpec,
    pub field: ComplexField,
    pub breakdown: EnergyBreakdown,
    pub mu: f64,
    pub epsilon: f64,
    pub x_max: [f64; 2],
    pub n_local_max: usize,
    pub iterations: usize,
    pub el_residual: f64,
    pub converged: bool,
}

/// Predicted blow-up scale `max(1, lambda (a* - a)^{-1/4})`; 1 without a
/// trap.
pub fn predicted_scale(profile: &TownesProfile, a: f64, pot: &PotentialSpec) -> Result<f64> {
    if pot.validation_mode {
        return Ok(1.0);
    }
    let lam = lambda_param(profile, pot.lambda)?;
    Ok((lam * (profile.a_star - a).powf(-0.25)).max(1.0))
}

fn check_subcritical(profile: &TownesProfile, a: f64) -> Result<()> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "a must be non-negative, got {a}"
        )));
    }
    if a >= profile.a_star {
        return Err(Error::Supercritical {
            a,
            a_star: profile.a_star,
        });
    }
    Ok(())
}

/// Normalized Townes bump at the predicted scale, centered at the minimum
/// of `V_Omega`, optionally with a seeded random perturbation of relative
/// amplitude `perturbation`.
pub fn initial_field(
    grid: &Arc<Grid>,
    profile: &TownesProfile,
    a: f64,
    pot: &PotentialSpec,
    seed: u64,
    perturbation: f64,
) -> Result<ComplexField> {
    check_subcritical(profile, a)?;
    pot.validate()?;
    let tau = predicted_scale(profile, a, pot)?;
    let center = pot.v_omega_minimizer(grid);
    let mut u = interp_to_grid(profile, grid, tau, center);
    if perturbation > 0.0 {
        let amp = perturbation * u.max_abs();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut vals = u.into_values();
        for &n in grid.interior() {
            vals[n] += Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * amp;
        }
        u = ComplexField::from_values(grid.clone(), vals)?;
    }
    u.normalize()?;
    Ok(u)
}

/// Reusable buffers for repeated flow steps at fixed `(a, pot)`.
struct Stepper {
    grid: Arc<Grid>,
    a: f64,
    pot: PotentialSpec,
    v_nodes: Vec<f64>,
    q: Vec<f64>,
    hu: Vec<Complex64>,
    g: Vec<Complex64>,
    d: Vec<Complex64>,
}

/// Gradient data at the current iterate.
struct Gradient {
    mu: f64,
    residual: f64,
}

impl Stepper {
    fn new(grid: Arc<Grid>, a: f64, pot: PotentialSpec) -> Self {
        let len = grid.len();
        let v_nodes = (0..len)
            .map(|n| {
                if grid.is_interior(n) {
                    let (x, y) = grid.coords(n);
                    pot.v(x, y)
                } else {
                    0.0
                }
            })
            .collect();
        let zero = Complex64::new(0.0, 0.0);
        Stepper {
            grid,
            a,
            pot,
            v_nodes,
            q: vec![0.0; len],
            hu: vec![zero; len],
            g: vec![zero; len],
            d: vec![zero; len],
        }
    }

    /// Fills `hu` and `g = H u - mu u` for a normalized `u`.
    fn gradient(&mut self, u: &[Complex64]) -> Gradient {
        let grid = &*self.grid;
        linear_operator_into(grid, &self.pot, u, &mut self.hu);
        let a = self.a;
        self.hu
            .par_iter_mut()
            .zip(u.par_iter())
            .for_each(|(h, &c)| *h -= c * (a * c.norm_sqr()));
        let hu = &self.hu;
        let da = grid.cell_area();
        let mu = grid.sum_interior(|n| (u[n].conj() * hu[n]).re) * da;
        self.g
            .par_iter_mut()
            .enumerate()
            .for_each(|(n, gn)| *gn = hu[n] - u[n] * mu);
        let g = &self.g;
        let residual = (grid.sum_interior(|n| g[n].norm_sqr()) * da).sqrt();
        Gradient { mu, residual }
    }

    /// Trial step from `u` with the gradient currently stored.
    fn trial(&mut self, u: &[Complex64], mu: f64, dt: f64, tol: f64) -> Result<ComplexField> {
        let sigma = (-mu).max(0.0);
        let mask = self.grid.mask();
        let v_nodes = &self.v_nodes;
        self.q
            .par_iter_mut()
            .enumerate()
            .for_each(|(n, q)| *q = if mask[n] { v_nodes[n] + sigma } else { 0.0 });
        let op = ShiftedOperator::new(&self.grid, &self.q, dt);
        op.solve(&self.g, &mut self.d, tol, CG_MAX_ITER)?;
        let d = &self.d;
        let vals: Vec<Complex64> = u
            .par_iter()
            .zip(d.par_iter())
            .map(|(&ui, &di)| ui - di * dt)
            .collect();
        let mut v = ComplexField::from_values(self.grid.clone(), vals)?;
        v.normalize()?;
        Ok(v)
    }
}

/// One flow step from a normalized field.
pub fn flow_step(
    u: &ComplexField,
    a: f64,
    pot: &PotentialSpec,
    dt: f64,
    linear_solver_tol: f64,
) -> Result<ComplexField> {
    require_unit_mass(u)?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let mut s = Stepper::new(u.grid().clone(), a, *pot);
    let grad = s.gradient(u.values());
    s.trial(u.values(), grad.mu, dt, linear_solver_tol)
}

fn require_unit_mass(u: &ComplexField) -> Result<()> {
    let mass = u.mass();
    if (mass - 1.0).abs() > crate::energy::MASS_TOL {
        return Err(Error::NotNormalized { mass });
    }
    Ok(())
}

/// Minimizes from the default initial field.
pub fn solve(
    grid: &Arc<Grid>,
    profile: &TownesProfile,
    a: f64,
    pot: &PotentialSpec,
    config: &SolverConfig,
) -> Result<MinimizeResult> {
    config.validate()?;
    let u0 = initial_field(grid, profile, a, pot, config.seed, config.perturbation)?;
    solve_from(u0, profile, a, pot, config)
}

/// Minimizes starting from `u0` (normalized internally).
pub fn solve_from(
    mut u0: ComplexField,
    profile: &TownesProfile,
    a: f64,
    pot: &PotentialSpec,
    config: &SolverConfig,
) -> Result<MinimizeResult> {
    config.validate()?;
    pot.validate()?;
    check_subcritical(profile, a)?;
    u0.validate()?;
    u0.normalize()?;
    let grid = u0.grid().clone();
    let bound = COLLAPSE_FRACTION * grid.nyquist_kinetic();

    let mut stepper = Stepper::new(grid.clone(), a, *pot);
    let mut u = u0;
    let mut e = gp_energy(&u, a, pot)?;
    let mut history = vec![e.total];
    let mut dt = config.dt;
    let mut streak = 0usize;
    let mut iterations = 0usize;
    let mut converged = false;

    loop {
        let grad = stepper.gradient(u.values());
        let n = history.len();
        if n > ENERGY_WINDOW {
            let old = history[n - 1 - ENERGY_WINDOW];
            let now = history[n - 1];
            if (now - old).abs() <= config.tol_energy * now.abs()
                && grad.residual <= config.tol_residual
            {
                converged = true;
                break;
            }
        }
        if iterations >= config.max_iter {
            break;
        }
        // retry with halved dt until the energy does not increase
        loop {
            iterations += 1;
            let v = stepper.trial(u.values(), grad.mu, dt, config.linear_solver_tol)?;
            let ev = gp_energy(&v, a, pot)?;
            if ev.total <= e.total + ACCEPT_SLACK * e.total.abs() {
                u = v;
                e = ev;
                history.push(e.total);
                streak += 1;
                if streak >= RESTORE_AFTER {
                    dt = config.dt;
                    streak = 0;
                }
                break;
            }
            streak = 0;
            dt *= 0.5;
            if dt < 1e-14 * config.dt || iterations >= config.max_iter {
                break;
            }
        }
        if e.kinetic > bound {
            return Err(Error::UnderResolved {
                kinetic: e.kinetic,
                bound,
            });
        }
        if dt < 1e-14 * config.dt {
            break;
        }
    }
    finish(u, a, pot, e, iterations, converged)
}

fn finish(
    u: ComplexField,
    a: f64,
    pot: &PotentialSpec,
    e: EnergyBreakdown,
    iterations: usize,
    converged: bool,
) -> Result<MinimizeResult> {
    let mu = lagrange_multiplier(e.total, &u, a)?;
    let el_residual = crate::energy::el_residual(&u, a, mu, pot);
    let (x_max, n_local_max) = peak_data(&u);
    Ok(MinimizeResult {
        a,
        pot: *pot,
        breakdown: e,
        mu,
        epsilon: e.kinetic.powf(-0.5),
        x_max,
        n_local_max,
        iterations,
        el_residual,
        converged,
        field: u,
    })
}

/// Sub-node location of the maximum of `|u|` and the number of strict
/// local maxima above 10% of the peak.
pub fn peak_data(u: &ComplexField) -> ([f64; 2], usize) {
    let g = u.grid();
    let v = u.values();
    let nx = g.nx;
    let m = |n: usize| v[n].norm();
    let Some(&top) = g
        .interior()
        .iter()
        .max_by(|&&p, &&q| m(p).total_cmp(&m(q)).then(q.cmp(&p)))
    else {
        return (g.spec.center(), 0);
    };
    let peak = m(top);
    let (x, y) = g.coords(top);
    // parabola through three samples: offset of the vertex in units of h
    let vertex = |fm: f64, f0: f64, fp: f64| {
        let c = fm - 2.0 * f0 + fp;
        if c < 0.0 {
            (0.5 * (fm - fp) / c).clamp(-0.5, 0.5)
        } else {
            0.0
        }
    };
    let x_max = [
        x + g.hx * vertex(m(top - 1), peak, m(top + 1)),
        y + g.hy * vertex(m(top - nx), peak, m(top + nx)),
    ];
    let count = g
        .interior()
        .iter()
        .filter(|&&n| {
            let c = m(n);
            c > 0.1 * peak
                && [
                    n - 1,
                    n + 1,
                    n - nx,
                    n + nx,
                    n - nx - 1,
                    n - nx + 1,
                    n + nx - 1,
                    n + nx + 1,
                ]
                .iter()
                .all(|&k| m(k) < c)
        })
        .count();
    (x_max, count)
}

/// Warm-started solves along an increasing list of interaction strengths.
pub fn continuation_sweep(
    grid: &Arc<Grid>,
    profile: &TownesProfile,
    a_list: &[f64],
    pot: &PotentialSpec,
    config: &SolverConfig,
) -> Result<Vec<MinimizeResult>> {
    for &a in a_list {
        check_subcritical(profile, a)?;
    }
    if a_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(
            "sweep values must be strictly increasing".into(),
        ));
    }
    let mut out: Vec<MinimizeResult> = Vec::with_capacity(a_list.len());
    for &a in a_list {
        let res = match out.last() {
            None => solve(grid, profile, a, pot, config)?,
            Some(prev) => {
                let ratio =
                    predicted_scale(profile, a, pot)? / predicted_scale(profile, prev.a, pot)?;
                let start = rescale_about(&prev.field, prev.x_max, ratio);
                solve_from(start, profile, a, pot, config)?
            }
        };
        out.push(res);
    }
    Ok(out)
}

/// `u(c + (x - c) * ratio)`, i.e. the field compressed by `ratio` about `c`.
fn rescale_about(u: &ComplexField, c: [f64; 2], ratio: f64) -> ComplexField {
    ComplexField::from_fn(u.grid().clone(), |x, y| {
        u.sample(c[0] + (x - c[0]) * ratio, c[1] + (y - c[1]) * ratio)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DomainSpec;
    use crate::townes::solve_townes;
    use std::sync::OnceLock;

    fn profile() -> &'static TownesProfile {
        static P: OnceLock<TownesProfile> = OnceLock::new();
        P.get_or_init(|| solve_townes(1e-12, 20.0).unwrap())
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        assert!(SolverConfig {
            dt: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(SolverConfig {
            tol_energy: 1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(SolverConfig {
            max_iter: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn initial_field_is_normalized_and_seeded() {
        let g = Arc::new(Grid::new(DomainSpec::disk(4.0), 65, 65).unwrap());
        let pot = PotentialSpec::new(2.0, 1.0).unwrap();
        let p = profile();
        let u = initial_field(&g, p, 0.0, &pot, 0, 0.0).unwrap();
        assert!((u.mass() - 1.0).abs() < 1e-10);
        let a = 0.5 * p.a_star;
        let f1 = initial_field(&g, p, a, &pot, 7, 1e-2).unwrap();
        let f2 = initial_field(&g, p, a, &pot, 7, 1e-2).unwrap();
        let f3 = initial_field(&g, p, a, &pot, 8, 1e-2).unwrap();
        assert_eq!(f1, f2);
        assert!(f1 != f3);
        assert!(!f1.is_real());
        assert!(initial_field(&g, p, p.a_star, &pot, 0, 0.0).is_err());
    }

    #[test]
    fn predicted_scale_formula() {
        let p = profile();
        let pot = PotentialSpec::new(2.0, 1.0).unwrap();
        let a = 0.99 * p.a_star;
        let want = lambda_param(p, 2.0).unwrap() * (p.a_star - a).powf(-0.25);
        assert!((predicted_scale(p, a, &pot).unwrap() - want).abs() < 1e-12 * want);
        assert_eq!(
            predicted_scale(p, 0.0, &PotentialSpec::free(0.0).unwrap()).unwrap(),
            1.0
        );
    }

    #[test]
    fn peak_location_is_subnode() {
        let g = Arc::new(Grid::new(DomainSpec::disk(2.0), 41, 41).unwrap());
        let c = [0.123, -0.071];
        let u = ComplexField::from_fn(g.clone(), |x, y| {
            Complex64::new((-((x - c[0]).powi(2) + (y - c[1]).powi(2))).exp(), 0.0)
        });
        let (xm, n) = peak_data(&u);
        assert_eq!(n, 1);
        assert!(
            (xm[0] - c[0]).abs() < 0.1 * g.hx && (xm[1] - c[1]).abs() < 0.1 * g.hy,
            "{xm:?}"
        );
        let two = ComplexField::from_fn(g.clone(), |x, y| {
            Complex64::new(
                (-4.0 * ((x - 0.8).powi(2) + y * y)).exp()
                    + 0.5 * (-4.0 * ((x + 0.8).powi(2) + y * y)).exp(),
                0.0,
            )
        });
        assert_eq!(peak_data(&two).1, 2);
    }

    #[test]
    fn sweep_preconditions() {
        let g = Arc::new(Grid::new(DomainSpec::disk(1.0), 17, 17).unwrap());
        let pot = PotentialSpec::new(2.0, 1.0).unwrap();
        let p = profile();
        let cfg = SolverConfig::default();
        assert!(continuation_sweep(&g, p, &[], &pot, &cfg)
            .unwrap()
            .is_empty());
        assert!(matches!(
            continuation_sweep(&g, p, &[1.0, 1.2 * p.a_star], &pot, &cfg),
            Err(Error::Supercritical { .. })
        ));
        assert!(continuation_sweep(&g, p, &[2.0, 1.0], &pot, &cfg).is_err());
        assert!(matches!(
            solve(&g, p, p.a_star, &pot, &cfg),
            Err(Error::Supercritical { .. })
        ));
    }
}
