//! CSV and JSON report writers. Floats are written in the shortest form
//! that parses back to the same bits (scientific notation for very small or
//! large magnitudes).

use std::path::Path;

use rotgp_core::asymptotics::BlowupRecord;
use rotgp_core::{EnergyBreakdown, MinimizeResult, TownesProfile};

use crate::failure::Failure;

fn f(x: f64) -> String {
    format!("{x:?}")
}

fn writer(path: &Path, header: &[&str]) -> Result<csv::Writer<std::fs::File>, Failure> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))?;
    w.write_record(header)?;
    Ok(w)
}

pub fn write_townes(dir: &Path, p: &TownesProfile) -> Result<(), Failure> {
    let mut w = writer(&dir.join("townes.csv"), &["r", "w", "w_prime"])?;
    for k in 0..p.r_samples.len() {
        w.write_record([f(p.r_samples[k]), f(p.w_samples[k]), f(p.w_prime[k])])?;
    }
    w.flush()?;
    write_json(&dir.join("townes.json"), &p.constants())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))
}

pub const RESULT_COLUMNS: [&str; 18] = [
    "a",
    "a_over_astar",
    "total",
    "kinetic",
    "potential",
    "interaction",
    "rotation",
    "magnetic_kinetic",
    "v_omega_potential",
    "mu",
    "epsilon",
    "x_max_x",
    "x_max_y",
    "n_local_max",
    "iterations",
    "el_residual",
    "converged",
    "field_file",
];

pub fn write_results(
    path: &Path,
    results: &[MinimizeResult],
    a_star: f64,
    fields: &[String],
) -> Result<(), Failure> {
    let mut w = writer(path, &RESULT_COLUMNS)?;
    for (k, r) in results.iter().enumerate() {
        let e = &r.breakdown;
        w.write_record([
            f(r.a),
            f(r.a / a_star),
            f(e.total),
            f(e.kinetic),
            f(e.potential),
            f(e.interaction),
            f(e.rotation),
            f(e.magnetic_kinetic),
            f(e.v_omega_potential),
            f(r.mu),
            f(r.epsilon),
            f(r.x_max[0]),
            f(r.x_max[1]),
            r.n_local_max.to_string(),
            r.iterations.to_string(),
            f(r.el_residual),
            r.converged.to_string(),
            fields.get(k).cloned().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trials(path: &Path, rows: &[(f64, f64, EnergyBreakdown)]) -> Result<(), Failure> {
    let mut w = writer(
        path,
        &[
            "a",
            "tau",
            "kinetic",
            "potential",
            "interaction",
            "rotation",
            "total",
        ],
    )?;
    for (a, tau, e) in rows {
        w.write_record([
            f(*a),
            f(*tau),
            f(e.kinetic),
            f(e.potential),
            f(e.interaction),
            f(e.rotation),
            f(e.total),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_blowup(path: &Path, records: &[BlowupRecord]) -> Result<(), Failure> {
    let mut w = writer(
        path,
        &[
            "a",
            "e_a",
            "scaled_energy",
            "mu_eps2",
            "eps",
            "eps_predicted",
            "x_max_x",
            "x_max_y",
            "x_scaled",
            "theta",
            "profile_linf",
            "rotation_scaled",
            "imag_l2",
            "window_mass",
            "window_kinetic",
            "n_local_max",
            "window_clipped",
        ],
    )?;
    for r in records {
        w.write_record([
            f(r.a),
            f(r.e_a),
            f(r.scaled_energy),
            f(r.mu_eps2),
            f(r.eps),
            f(r.eps_predicted),
            f(r.x_max[0]),
            f(r.x_max[1]),
            f(r.x_scaled),
            f(r.theta),
            f(r.profile_linf),
            f(r.rotation_scaled),
            f(r.imag_l2),
            f(r.window_mass),
            f(r.window_kinetic),
            r.n_local_max.to_string(),
            r.clipped.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
