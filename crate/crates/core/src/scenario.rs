//! JSON scenario files: reference path, initial state, obstacles and the
//! planner settings, with defaults for every optional section.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collision::Obstacle;
use crate::config::ConfigError;
use crate::evaluation::{CostWeights, VehicleParams};
use crate::frenet::{FrameConfig, ReferencePathInput};
use crate::planner::{ClosedLoopOptions, PlannerSettings, StepMode};
use crate::sampler::SamplingConfig;
use crate::state::EvState;

fn default_goal_margin() -> f64 {
    10.0
}

fn default_max_cycles() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub reference_path: ReferencePathInput,
    pub initial_state: EvState,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
    #[serde(default)]
    pub frame: FrameConfig,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub vehicle: VehicleParams,
    #[serde(default)]
    pub weights: CostWeights,
    /// The closed loop stops once the ego is this close to the path end.
    #[serde(default = "default_goal_margin")]
    pub goal_margin: f64,
    #[serde(default = "default_max_cycles")]
    pub max_cycles: usize,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("IoError: {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("ParseError: line {line} column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("ValidationError: {0}")]
    Validation(#[from] ConfigError),
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let sc: Scenario = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.reference_path.points.len() < 2 {
            return Err(ConfigError::new("reference_path", "needs at least 2 points"));
        }
        let s = &self.initial_state;
        if ![s.x, s.y, s.v, s.a, s.theta].iter().all(|v| v.is_finite()) {
            return Err(ConfigError::new("initial_state", "values must be finite"));
        }
        if s.v < 0.0 {
            return Err(ConfigError::new("initial_state.v", "must be >= 0"));
        }
        self.settings().validate()?;
        for o in &self.obstacles {
            o.validate()?;
        }
        if !(self.goal_margin >= 0.0) {
            return Err(ConfigError::new("goal_margin", "must be >= 0"));
        }
        if self.max_cycles == 0 {
            return Err(ConfigError::new("max_cycles", "must be >= 1"));
        }
        Ok(())
    }

    pub fn settings(&self) -> PlannerSettings {
        PlannerSettings {
            frame: self.frame,
            sampling: self.sampling,
            vehicle: self.vehicle,
            weights: self.weights,
        }
    }

    pub fn loop_options(&self, step: StepMode) -> ClosedLoopOptions {
        ClosedLoopOptions { max_cycles: self.max_cycles, goal_margin: self.goal_margin, step }
    }
}
