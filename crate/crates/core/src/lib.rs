//! Reconstruction of 3-D tennis scenes from 2-D broadcast tracking data.

pub mod cine;
pub mod cli;
pub mod config;
pub mod court;
pub mod cues;
pub mod error;
pub mod ingest;
pub mod kinematics;
pub mod metrics;
pub mod projection;
pub mod refine;
pub mod scene;
pub mod scoring;
pub mod sim;

pub use error::{Error, Result};
