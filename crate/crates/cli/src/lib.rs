//! Experiment harness behind the `shapefit` command-line tool: reproducible
//! phase-transition grids and noise sweeps with CSV and SVG outputs.

pub mod experiment;
pub mod plot;
