//! Scenario configuration, orchestration, report/CSV emission, and the
//! verification matrix behind the `madelung` binary.

pub mod checkall;
pub mod config;
pub mod report;
pub mod run;
pub mod scenario;
