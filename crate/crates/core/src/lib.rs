//! Deterministic sampling-based trajectory planning in a Frenet frame.
//!
//! The pipeline builds a curvilinear frame around a reference path once,
//! then per cycle samples quartic/quintic candidate trajectories, filters
//! them for kinematic feasibility and collisions, and picks the cheapest.

pub mod bench;
pub mod bridge;
pub mod cli;
pub mod collision;
pub mod config;
pub mod evaluation;
pub mod frenet;
pub mod geometry;
pub mod planner;
pub mod report;
pub mod sampler;
pub mod scenario;
pub mod state;

pub use collision::{Obstacle, ObstaclePose, Polygon2D};
pub use evaluation::{CostWeights, VehicleParams, Verdict, Violation};
pub use frenet::{FrameConfig, FrenetFrame, ReferencePathInput};
pub use geometry::Point2;
pub use planner::{PlanError, PlanResult, PlannerContext, PlannerSettings};
pub use sampler::SamplingConfig;
pub use state::{EvState, FrenetState, TrajectoryPoint};
