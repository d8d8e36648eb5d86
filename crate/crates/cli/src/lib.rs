//! Library surface of the experiment harness, so integration tests can
//! drive the commands directly.

pub mod commands;
pub mod park;
pub mod report;
