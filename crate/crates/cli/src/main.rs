mod config;
mod failure;
mod output;
mod selftest;
mod verdict;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use rotgp_core::asymptotics::blowup_metrics;
use rotgp_core::field_io::save_field;
use rotgp_core::minimize::{continuation_sweep, solve};
use rotgp_core::testfn::{optimal_upper_bound, trial_center, trial_energy, TrialParams, DEFAULT_M};
use rotgp_core::townes::{lambda_param, solve_townes};
use rotgp_core::{Grid, MinimizeResult, TownesProfile};

use config::RunConfig;
use failure::Failure;

#[derive(Parser)]
#[command(
    name = "rotgp",
    version,
    about = "Rotating Gross-Pitaevskii ground states and blow-up diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the configured one.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write a GPF1 dump of every computed minimizer.
    #[arg(long, global = true)]
    dump_fields: bool,
    /// Seed for the initial-field perturbation; overrides the configured one.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the Townes profile; writes townes.csv and townes.json.
    Townes,
    /// Minimize independently for every configured a; writes solve.csv.
    Solve,
    /// Warm-started continuation over the configured a; writes sweep.csv.
    Sweep,
    /// Trial-state energies; writes testfn.csv.
    Testfn,
    /// Full pipeline: Townes, sweep, blow-up metrics, upper bounds and the
    /// pass/fail verdict. Exit status 0 iff every enabled check passes.
    #[command(visible_alias = "run")]
    Report,
    /// Built-in consistency checks that need no configuration.
    Selftest,
}

struct Ctx {
    cfg: RunConfig,
    out: PathBuf,
}

impl Ctx {
    fn new(cli: &Cli) -> Result<Self, Failure> {
        let path = cli.config.as_ref().ok_or_else(|| {
            Failure::new("config-not-found", "this subcommand needs --config <path>")
        })?;
        let mut cfg = RunConfig::load(path)?;
        if let Some(seed) = cli.seed {
            cfg.solver.seed = seed;
        }
        if cli.dump_fields {
            cfg.outputs.dump_fields = true;
        }
        let out = cli
            .out
            .clone()
            .unwrap_or_else(|| cfg.outputs.directory.clone());
        std::fs::create_dir_all(&out)
            .map_err(|e| Failure::new("io", format!("{}: {e}", out.display())))?;
        Ok(Ctx { cfg, out })
    }

    fn profile(&self) -> Result<TownesProfile, Failure> {
        Ok(solve_townes(self.cfg.townes.tol, self.cfg.townes.r_max)?)
    }

    fn grid(&self) -> Result<Arc<Grid>, Failure> {
        let [nx, ny] = self.cfg.resolution;
        Ok(Arc::new(Grid::new(self.cfg.domain, nx, ny)?))
    }

    /// Dumps each field when enabled and returns the file names.
    fn dump(&self, prefix: &str, results: &[MinimizeResult]) -> Result<Vec<String>, Failure> {
        if !self.cfg.outputs.dump_fields {
            return Ok(Vec::new());
        }
        results
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let name = format!("{prefix}_{k:03}.gpf");
                save_field(&self.out.join(&name), &r.field)?;
                Ok(name)
            })
            .collect()
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::new("invalid-parameter", e.to_string()))?;
    }
    match cli.command {
        Command::Selftest => return Ok(selftest::run()),
        Command::Townes => {
            // the Townes step works without a config, from defaults
            let (settings, out) = match &cli.config {
                Some(_) => {
                    let ctx = Ctx::new(cli)?;
                    (ctx.cfg.townes, ctx.out)
                }
                None => {
                    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
                    std::fs::create_dir_all(&out)?;
                    (config::TownesSettings::default(), out)
                }
            };
            let p = solve_townes(settings.tol, settings.r_max)?;
            output::write_townes(&out, &p)?;
            println!("{}", serde_json::to_string(&p.constants())?);
        }
        Command::Solve => {
            let ctx = Ctx::new(cli)?;
            let (p, g, pot) = (ctx.profile()?, ctx.grid()?, ctx.cfg.potential());
            let a_list = ctx.cfg.a_list(p.a_star);
            // reject the whole request before any work
            if let Some(&a) = a_list.iter().find(|&&a| a >= p.a_star) {
                return Err(rotgp_core::Error::Supercritical {
                    a,
                    a_star: p.a_star,
                }
                .into());
            }
            let results = a_list
                .iter()
                .map(|&a| solve(&g, &p, a, &pot, &ctx.cfg.solver))
                .collect::<Result<Vec<_>, _>>()?;
            let files = ctx.dump("solve", &results)?;
            output::write_results(&ctx.out.join("solve.csv"), &results, p.a_star, &files)?;
        }
        Command::Sweep => {
            let ctx = Ctx::new(cli)?;
            let (p, g, pot) = (ctx.profile()?, ctx.grid()?, ctx.cfg.potential());
            let results =
                continuation_sweep(&g, &p, &ctx.cfg.a_list(p.a_star), &pot, &ctx.cfg.solver)?;
            let files = ctx.dump("sweep", &results)?;
            output::write_results(&ctx.out.join("sweep.csv"), &results, p.a_star, &files)?;
        }
        Command::Testfn => {
            let ctx = Ctx::new(cli)?;
            let rows = testfn_rows(&ctx)?;
            output::write_trials(&ctx.out.join("testfn.csv"), &rows)?;
        }
        Command::Report => return report(&Ctx::new(cli)?),
    }
    Ok(ExitCode::SUCCESS)
}

fn testfn_rows(ctx: &Ctx) -> Result<Vec<(f64, f64, rotgp_core::EnergyBreakdown)>, Failure> {
    let (p, g, pot) = (ctx.profile()?, ctx.grid()?, ctx.cfg.potential());
    let t = &ctx.cfg.testfn;
    let a_list = ctx.cfg.a_list(p.a_star);
    if !t.supercritical {
        if let Some(&a) = a_list.iter().find(|&&a| a >= p.a_star) {
            return Err(rotgp_core::Error::Supercritical {
                a,
                a_star: p.a_star,
            }
            .into());
        }
    }
    let m = t.m.unwrap_or(DEFAULT_M);
    let mut rows = Vec::new();
    for &a in &a_list {
        if t.taus.is_empty() {
            let ub = optimal_upper_bound(&g, &p, a, &pot)?;
            rows.push((a, ub.tau, ub.energy));
        } else {
            for &tau in &t.taus {
                let x_tau = trial_center(&g, &pot, m * tau.ln() / tau)?;
                let params = TrialParams {
                    tau,
                    x_tau,
                    m,
                    profile: &p,
                };
                rows.push((a, tau, trial_energy(&params, &g, a, &pot)?));
            }
        }
    }
    Ok(rows)
}

fn report(ctx: &Ctx) -> Result<ExitCode, Failure> {
    let enabled: Vec<String> = match &ctx.cfg.checks {
        Some(list) => {
            if let Some(bad) = list.iter().find(|c| !verdict::CHECKS.contains(&c.as_str())) {
                return Err(Failure::new(
                    "config-invalid",
                    format!("unknown check {bad:?}"),
                ));
            }
            list.clone()
        }
        None => verdict::CHECKS.iter().map(|s| s.to_string()).collect(),
    };
    let p = ctx.profile()?;
    output::write_townes(&ctx.out, &p)?;
    let (g, pot) = (ctx.grid()?, ctx.cfg.potential());
    let results = continuation_sweep(&g, &p, &ctx.cfg.a_list(p.a_star), &pot, &ctx.cfg.solver)?;
    let files = ctx.dump("sweep", &results)?;
    output::write_results(&ctx.out.join("sweep.csv"), &results, p.a_star, &files)?;

    let asymptotic = pot.blowup_regime() && results.iter().all(|r| r.converged && r.a > 0.0);
    let records = if asymptotic {
        blowup_metrics(&results, &p)?
    } else {
        Vec::new()
    };
    output::write_blowup(&ctx.out.join("blowup.csv"), &records)?;

    let mut rows = Vec::new();
    let mut bounds = Vec::new();
    if !pot.validation_mode {
        for r in &results {
            if r.a > 0.0 {
                let ub = optimal_upper_bound(&g, &p, r.a, &pot)?;
                bounds.push(ub.energy.total);
                rows.push((r.a, ub.tau, ub.energy));
            }
        }
    }
    output::write_trials(&ctx.out.join("testfn.csv"), &rows)?;

    let lam = lambda_param(&p, pot.lambda)?;
    let enabled: Vec<String> = if bounds.len() == results.len() {
        enabled
    } else {
        enabled
            .into_iter()
            .filter(|c| c != "upper-bound-dominance")
            .collect()
    };
    let v = verdict::evaluate(
        &verdict::Inputs {
            results: &results,
            records: &records,
            upper_bounds: &bounds,
            energy_target: 2.0 * lam * lam / p.a_star,
            w_sup: p.w0,
        },
        &enabled,
    );
    output::write_json(&ctx.out.join("verdict.json"), &v)?;
    for (name, c) in &v.checks {
        println!(
            "{:<8} {name}: {}",
            format!("{:?}", c.status).to_uppercase(),
            c.criterion
        );
    }
    Ok(if v.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(2)
        }
    }
}
