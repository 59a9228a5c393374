use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use vortex_resolution::integrate::IntegratorConfig;
use vortex_resolution::vortex_core::{FullState, Strengths};

/// A run description: central strength, satellite count, initial positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub gamma: f64,
    pub n_sat: usize,
    /// `[re, im]` per vortex, central vortex first.
    pub positions: Vec<[f64; 2]>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.validate()
            .with_context(|| format!("validating {}", path.display()))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        Strengths::ring(self.gamma, self.n_sat)?;
        self.integrator.validate()?;
        if self.positions.len() != self.n_sat + 1 {
            bail!(
                "{} positions given for {} satellites plus the center",
                self.positions.len(),
                self.n_sat
            );
        }
        if self.positions.iter().flatten().any(|x| !x.is_finite()) {
            bail!("positions must be finite");
        }
        for m in 0..self.positions.len() {
            for n in m + 1..self.positions.len() {
                if self.positions[m] == self.positions[n] {
                    bail!("positions {m} and {n} coincide");
                }
            }
        }
        Ok(())
    }

    pub fn strengths(&self) -> Strengths {
        Strengths::ring(self.gamma, self.n_sat).expect("validated on load")
    }

    pub fn state(&self) -> FullState {
        FullState::new(
            self.positions
                .iter()
                .map(|p| Complex64::new(p[0], p[1]))
                .collect(),
        )
    }
}
