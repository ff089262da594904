//! Configuration, reports, verification harnesses and figures for the
//! `carleson` command-line tool.

pub mod config;
pub mod harness;
pub mod render;
pub mod report;
