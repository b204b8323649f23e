//! Reconstruction of interbank bilateral-exposure matrices from balance-sheet
//! marginals, random support generation, and default-cascade stress testing.
//!
//! The crate is organised bottom-up:
//!
//! - [`types`]: balance sheets, exposure and adjacency matrices, solver reports.
//! - [`metrics`]: entropies, KL divergence, constraint deviation, connectivity.
//! - [`reconstruct`]: dense maximum entropy, RAS and sparse RAS (SRAS).
//! - [`netgen`]: seeded derangements, adjacency supports with exact edge
//!   counts, synthetic balance sheets and ground-truth exposure matrices.
//! - [`contagion`]: cascade simulation, default fractions and logistic fits.
//! - [`experiment`]: the feasibility and contagion sweeps driven by the CLI.
//! - [`io`]: CSV persistence for matrices and balance sheets.

pub mod contagion;
pub mod error;
pub mod experiment;
pub mod io;
pub mod metrics;
pub mod netgen;
pub mod reconstruct;
pub mod types;

pub use error::{Error, Result};
pub use types::{AdjacencyMatrix, BalanceSheet, ExposureMatrix, Method, ReconstructionReport, Termination};
