use alloc::string::String;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid cuboid: {0}")]
    InvalidCuboid(String),

    #[error("overlap: {0}")]
    Overlap(String),

    #[error("conductor {net} crosses a region boundary or touches the domain boundary")]
    ConductorNotInterior { net: u32 },

    #[error("regions do not tile the domain: {0}")]
    Tiling(String),

    #[error("duplicate id: {0}")]
    DuplicateId(String),

    #[error("invalid permittivity {value} for region {region}")]
    InvalidPermittivity { region: u32, value: f64 },

    #[error("invalid partition parameters: {0}")]
    InvalidParams(String),

    #[error("unknown net {0}")]
    UnknownNet(u32),

    #[error("scene has no conductors")]
    NoConductors,

    #[error("slab count must be at least 1")]
    InvalidSlabCount,

    #[error("non-finite value {value} at {at}")]
    NonFinite { value: f64, at: f64 },

    #[error("assembly: {0}")]
    Assembly(String),

    #[error("matrix not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("singular system: smallest pivot {pivot:e} at row {row}")]
    Singular { row: usize, pivot: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}
