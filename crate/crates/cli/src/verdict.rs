//! Pass/fail evaluation of a sweep against the blow-up limits, as finite-a
//! surrogates: thresholds on the last sweep point plus monotone trends
//! along the sweep.

use std::collections::BTreeMap;

use rotgp_core::asymptotics::BlowupRecord;
use rotgp_core::MinimizeResult;
use serde::Serialize;
use serde_json::{json, Value};

pub const CHECKS: [&str; 10] = [
    "converged",
    "single-peak",
    "energy-forms",
    "upper-bound-dominance",
    "energy-law",
    "multiplier-law",
    "scale-law",
    "concentration",
    "profile-convergence",
    "rotation-smallness",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub status: Status,
    pub criterion: &'static str,
    pub value: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub checks: BTreeMap<String, CheckResult>,
}

pub struct Inputs<'a> {
    pub results: &'a [MinimizeResult],
    /// Empty outside the trapped, rotating regime where the limits apply.
    pub records: &'a [BlowupRecord],
    pub upper_bounds: &'a [f64],
    /// `2 lambda² / a*`.
    pub energy_target: f64,
    /// `‖w‖_∞ = w(0)`.
    pub w_sup: f64,
}

fn decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

pub fn evaluate(inp: &Inputs, enabled: &[String]) -> Verdict {
    let mut checks = BTreeMap::new();
    for name in enabled {
        if let Some(c) = evaluate_one(inp, name) {
            checks.insert(name.clone(), c);
        }
    }
    let pass = checks.values().all(|c| c.status != Status::Fail);
    Verdict { pass, checks }
}

fn evaluate_one(inp: &Inputs, name: &str) -> Option<CheckResult> {
    let res = inp.results;
    let rec = inp.records;
    let series = |f: fn(&BlowupRecord) -> f64| rec.iter().map(f).collect::<Vec<_>>();
    let asymptotic =
        |criterion: &'static str, body: &dyn Fn(&BlowupRecord) -> (bool, Value)| -> CheckResult {
            match rec.last() {
                None => CheckResult {
                    status: Status::Skipped,
                    criterion,
                    value: Value::Null,
                },
                Some(last) => {
                    let (ok, value) = body(last);
                    CheckResult {
                        status: status(ok),
                        criterion,
                        value,
                    }
                }
            }
        };
    let c = match name {
        "converged" => CheckResult {
            status: status(res.iter().all(|r| r.converged)),
            criterion: "every sweep point converged",
            value: json!(res.iter().map(|r| r.el_residual).collect::<Vec<_>>()),
        },
        "single-peak" => CheckResult {
            status: status(res.iter().all(|r| r.n_local_max == 1)),
            criterion: "one local maximum of |u| at every point",
            value: json!(res.iter().map(|r| r.n_local_max).collect::<Vec<_>>()),
        },
        "energy-forms" => {
            let gap = res
                .iter()
                .map(|r| {
                    (r.breakdown.total - r.breakdown.magnetic_total()).abs()
                        / (1.0 + r.breakdown.total.abs())
                })
                .fold(0.0, f64::max);
            CheckResult {
                status: status(gap <= 1e-10),
                criterion: "both energy forms agree to 1e-10",
                value: json!(gap),
            }
        }
        "upper-bound-dominance" => {
            let ok = res.len() == inp.upper_bounds.len()
                && res
                    .iter()
                    .zip(inp.upper_bounds)
                    .all(|(r, &ub)| r.breakdown.total <= ub + 1e-8);
            CheckResult {
                status: status(ok),
                criterion: "solver energy <= optimal trial energy + 1e-8",
                value: json!(res
                    .iter()
                    .zip(inp.upper_bounds)
                    .map(|(r, ub)| [r.breakdown.total, *ub])
                    .collect::<Vec<_>>()),
            }
        }
        "energy-law" => {
            let t = inp.energy_target;
            let dev: Vec<f64> = rec
                .iter()
                .map(|r| (r.scaled_energy - t).abs() / t)
                .collect();
            asymptotic(
                "scaled energy within 15% of 2 lambda²/a*, deviation decreasing",
                &|last| {
                    (
                        *dev.last().unwrap() <= 0.15 && decreasing(&dev),
                        json!({ "final": last.scaled_energy, "target": t, "deviation": dev }),
                    )
                },
            )
        }
        "multiplier-law" => {
            let m = series(|r| r.mu_eps2);
            let dist: Vec<f64> = m.iter().map(|x| (x + 1.0).abs()).collect();
            asymptotic("mu eps² in [-1.15, -0.85], approaching -1", &|last| {
                (
                    (-1.15..=-0.85).contains(&last.mu_eps2) && decreasing(&dist),
                    json!(m),
                )
            })
        }
        "scale-law" => asymptotic("eps / eps_predicted in [0.85, 1.15]", &|last| {
            let q = last.eps / last.eps_predicted;
            ((0.85..=1.15).contains(&q), json!(q))
        }),
        "concentration" => {
            let x = series(|r| r.x_scaled);
            asymptotic("x_scaled decreasing, final <= 0.2", &|last| {
                (last.x_scaled <= 0.2 && decreasing(&x), json!(x))
            })
        }
        "profile-convergence" => {
            let l = series(|r| r.profile_linf);
            let bound = 0.1 * inp.w_sup;
            asymptotic("sup|u~ - w| decreasing, final <= 0.1 w(0)", &|last| {
                (last.profile_linf <= bound && decreasing(&l), json!(l))
            })
        }
        "rotation-smallness" => {
            let r = series(|r| r.rotation_scaled);
            asymptotic("rotation_scaled decreasing, final <= 0.2", &|last| {
                (last.rotation_scaled <= 0.2 && decreasing(&r), json!(r))
            })
        }
        _ => return None,
    };
    Some(c)
}
