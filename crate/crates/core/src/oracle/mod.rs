//! Brute-force grid oracle: Crank-Nicolson propagation of the 1D
//! Schrodinger equation, and a finite-dimensional discretization of the
//! measurement for the histories engine.

mod grid;
mod pipeline;
mod runs;

pub use grid::{propagate, CnSolver, GridState, PotentialSpec, Units, EDGE_TOL};
pub use pipeline::{discretize_pipeline, DiscretePipeline, PIPELINE_DIM_CAP};
pub use runs::{richardson, sg_run, transmission_run, GridResolution, SgRun, TransmissionRun};
