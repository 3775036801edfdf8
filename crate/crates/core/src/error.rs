use std::io;

use thiserror::Error;

use crate::analytics::AnalyticsError;
use crate::combinatorics::PermutationError;
use crate::model::{ConfigError, DemandError};
use crate::phy::PhyError;
use crate::placement::PlacementError;
use crate::scheduler::{DocumentError, ScheduleError};

/// Any failure surfaced by the crate's front ends.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Demand(#[from] DemandError),
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error(transparent)]
    Phy(#[from] PhyError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error(transparent)]
    Permutation(#[from] PermutationError),
    #[error("config file: {0}")]
    ConfigFile(String),
    #[error("config is missing `{0}`")]
    MissingKey(&'static str),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}
