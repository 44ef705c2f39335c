use std::path::{Path, PathBuf};

use rotgp_core::{DomainSpec, PotentialSpec, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainSpec,
    /// Nodes per axis, `[nx, ny]`.
    pub resolution: [usize; 2],
    pub potential: PotentialSpec,
    /// Switches the trap off (`V = 0`) regardless of `potential`.
    #[serde(default)]
    pub validation_mode: bool,
    pub a_values: AValues,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub townes: TownesSettings,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub testfn: TestfnSettings,
    /// Checks evaluated by `report`; all of them when absent.
    #[serde(default)]
    pub checks: Option<Vec<String>>,
}

/// Interaction strengths, either absolute or as fractions of `a*`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AValues {
    Values(Vec<f64>),
    Fractions(Vec<f64>),
    /// `count` fractions from `start` to `end` with geometrically shrinking
    /// gaps `1 - a/a*`.
    Geometric {
        start: f64,
        end: f64,
        count: usize,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TownesSettings {
    pub tol: f64,
    pub r_max: f64,
}

impl Default for TownesSettings {
    fn default() -> Self {
        TownesSettings {
            tol: 1e-12,
            r_max: 20.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub directory: PathBuf,
    #[serde(default)]
    pub dump_fields: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            directory: PathBuf::from("out"),
            dump_fields: false,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestfnSettings {
    /// Explicit scales to evaluate at the `V_Omega` minimum. Without them
    /// `testfn` reports the optimal upper bound for each `a`.
    #[serde(default)]
    pub taus: Vec<f64>,
    /// Allows `a >= a*` (only meaningful with explicit `taus`).
    #[serde(default)]
    pub supercritical: bool,
    #[serde(default)]
    pub m: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Failure::new(
                "config-not-found",
                format!("{}: no such file", path.display()),
            ),
            _ => Failure::new("io", format!("{}: {e}", path.display())),
        })?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Failure::new("config-parse", format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), Failure> {
        let bad = |m: String| Err(Failure::new("config-invalid", m));
        if self.resolution.iter().any(|&n| n < 3) {
            return bad(format!(
                "resolution {:?} needs at least 3 nodes per axis",
                self.resolution
            ));
        }
        match &self.a_values {
            AValues::Values(v) | AValues::Fractions(v) if v.is_empty() => {
                return bad("a_values is empty".into())
            }
            AValues::Values(v) | AValues::Fractions(v)
                if v.iter().any(|x| !x.is_finite() || *x < 0.0) =>
            {
                return bad("a_values must be finite and non-negative".into())
            }
            AValues::Geometric { start, end, count }
                if *count == 0
                    || !(0.0..1.0).contains(start)
                    || !(0.0..1.0).contains(end)
                    || end < start =>
            {
                return bad("geometric schedule needs 0 <= start <= end < 1 and count >= 1".into())
            }
            _ => {}
        }
        if self.testfn.taus.iter().any(|&t| !(t > 1.0)) {
            return bad("testfn taus must exceed 1".into());
        }
        Ok(())
    }

    pub fn potential(&self) -> PotentialSpec {
        PotentialSpec {
            validation_mode: self.validation_mode || self.potential.validation_mode,
            ..self.potential
        }
    }

    /// Absolute interaction strengths for critical value `a_star`.
    pub fn a_list(&self, a_star: f64) -> Vec<f64> {
        match &self.a_values {
            AValues::Values(v) => v.clone(),
            AValues::Fractions(f) => f.iter().map(|x| x * a_star).collect(),
            AValues::Geometric { start, end, count } => {
                if *count == 1 {
                    return vec![start * a_star];
                }
                let (g0, g1) = (1.0 - start, 1.0 - end);
                (0..*count)
                    .map(|k| {
                        let t = k as f64 / (*count - 1) as f64;
                        (1.0 - g0 * (g1 / g0).powf(t)) * a_star
                    })
                    .collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_schedule_shrinks_the_gap() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"domain": {"kind": "disk", "radius": 4.0}, "resolution": [33, 33],
                "potential": {"Lambda": 2.0, "Omega": 1.0},
                "a_values": {"geometric": {"start": 0.9, "end": 0.99, "count": 3}}}"#,
        )
        .unwrap();
        let a = cfg.a_list(10.0);
        assert!((a[0] - 9.0).abs() < 1e-12 && (a[2] - 9.9).abs() < 1e-12);
        // gaps 1, 0.316, 0.1
        assert!(((10.0 - a[1]) - 10f64.sqrt() / 10.0).abs() < 1e-12);
        assert_eq!(cfg.solver, SolverConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let r = serde_json::from_str::<RunConfig>(
            r#"{"domain": {"kind": "disk", "radius": 1.0}, "resolution": [9, 9],
                "potential": {"Lambda": 1.0, "Omega": 0.0}, "a_values": {"values": [0.0]}, "extra": 1}"#,
        );
        assert!(r.is_err());
    }
}
