//! Flexible flow shop scheduling with a dual heterogeneous island GA.
//!
//! Island A runs a synchronous cellular GA over integer machine-assignment
//! chromosomes; island B runs a pseudo GA over complementary bit-string pairs.
//! The islands evolve independently and meet every `gap` generations, where
//! an adaptive policy decides from their best fitness values whether, in which
//! direction and how many individuals migrate.

pub mod cellular;
pub mod error;
mod exec;
pub mod generate;
pub mod genome;
pub mod migration;
pub mod model;
pub mod orchestrator;
pub mod problem;
pub mod pseudo;
pub mod rng;

pub use error::{Error, Result};
pub use exec::Exec;
pub use model::{decode, estimate_emax, evaluate, Instance, ObjectiveReport, Schedule};
pub use orchestrator::{run, run_serialized, Mode, RunConfig, RunResult};
pub use problem::{EmaxPolicy, Problem};
