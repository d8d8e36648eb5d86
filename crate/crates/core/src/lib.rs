//! Solver library for large-scale biomass harvest logistics: simultaneous
//! multi-tour routing of harvesting and support units across many fields
//! and plants, minimising accumulated path length while balancing per-tour
//! completion times and harvester waiting times through embedded fleet
//! assignment.

pub mod assign;
pub mod cost;
pub mod error;
pub mod init;
pub mod io;
pub mod model;
pub mod plan;
pub mod rng;
pub mod search;

pub use error::{Error, Result};
pub use cost::{CostModel, Evaluation};
pub use model::{
    generate_scenario, BiogasPlant, Field, HuClass, Location, MachineryPark, PhysicalParams,
    Scenario, ScenarioSpec, SuClass, SupplyUnit,
};
pub use plan::{Plan, Tour};
pub use search::{CaseMode, ExecutionMode, MoveKind, SearchConfig, SearchResult};
