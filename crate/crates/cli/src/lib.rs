//! Problem files, command dispatch and report rendering for the `twistalg`
//! command line tool.

pub mod app;
pub mod commands;
pub mod format;
pub mod problem;
pub mod report;
