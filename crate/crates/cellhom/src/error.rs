//! Crate-wide error type with stable error codes for machine consumers.

use thiserror::Error;

/// Everything that can go wrong across the library.
///
/// Each variant carries a stable code string (see [`Error::code`]) so that
/// scripted consumers of the CLI can dispatch without parsing messages.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric: max asymmetry {max_asymmetry:.3e} exceeds tolerance {tolerance:.3e}")]
    NotSymmetric { max_asymmetry: f64, tolerance: f64 },

    #[error("map is not unimodular: |det| = {det_abs:.17} deviates from 1 by more than 1e-12")]
    NotUnimodular { det_abs: f64 },

    #[error("axis is not a unit vector: norm = {norm:.17}")]
    NotUnitAxis { norm: f64 },

    #[error("tensor has zero norm; residual is undefined")]
    ZeroTensor,

    #[error("lattice basis is singular: |det B| = {det_abs:.3e} below tolerance {tolerance:.3e}")]
    SingularLattice { det_abs: f64, tolerance: f64 },

    #[error("unknown material `{name}`")]
    UnknownMaterial { name: String },

    #[error("unknown example `{name}`")]
    UnknownExample { name: String },

    #[error("incompatible resolution for example `{example}`: {reason}")]
    IncompatibleResolution { example: String, reason: String },

    #[error("material table index {index} out of range (table has {len} entries)")]
    MaterialIndexOutOfRange { index: usize, len: usize },

    #[error("material table exceeds u16 capacity ({len} entries)")]
    TooManyMaterials { len: usize },

    #[error(
        "grid-incompatible transformation: voxel {voxel:?} maps to lattice coordinates \
         off any voxel center by {mismatch:.3e}"
    )]
    GridIncompatible { voxel: Vec<usize>, mismatch: f64 },

    #[error("material `{material}` is not coercive: coercivity margin {margin:.6e} <= 0")]
    NonCoercive { material: String, margin: f64 },

    #[error("mobility `{material}` is not symmetric positive definite (margin {margin:.6e})")]
    NonSpdMobility { material: String, margin: f64 },

    #[error(
        "conjugate gradient did not converge within {iterations} iterations \
         (best relative residual {residual:.6e})"
    )]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("not a CELLVOX1 file")]
    NotCellvox,

    #[error("unexpected end of voxel payload")]
    TruncatedVoxels,

    #[error("voxel payload length {found} does not match grid size {expected}")]
    VoxelCountMismatch { expected: usize, found: usize },

    #[error("voxel file dimension {found} does not match config dimension {expected}")]
    VoxelDimensionMismatch { expected: usize, found: usize },

    #[error("voxel file grid {found:?} does not match config grid {expected:?}")]
    VoxelGridMismatch { expected: Vec<usize>, found: Vec<usize> },

    #[error("invalid configuration: {reason}")]
    InvalidConfig { reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable, machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "E_DIM_MISMATCH",
            Error::NotSymmetric { .. } => "E_NOT_SYMMETRIC",
            Error::NotUnimodular { .. } => "E_NOT_UNIMODULAR",
            Error::NotUnitAxis { .. } => "E_NOT_UNIT_AXIS",
            Error::ZeroTensor => "E_ZERO_TENSOR",
            Error::SingularLattice { .. } => "E_SINGULAR_LATTICE",
            Error::UnknownMaterial { .. } => "E_UNKNOWN_MATERIAL",
            Error::UnknownExample { .. } => "E_UNKNOWN_EXAMPLE",
            Error::IncompatibleResolution { .. } => "E_INCOMPATIBLE_RESOLUTION",
            Error::MaterialIndexOutOfRange { .. } => "E_MATERIAL_INDEX_RANGE",
            Error::TooManyMaterials { .. } => "E_TOO_MANY_MATERIALS",
            Error::GridIncompatible { .. } => "E_GRID_INCOMPATIBLE",
            Error::NonCoercive { .. } => "E_NON_COERCIVE",
            Error::NonSpdMobility { .. } => "E_NON_SPD_MOBILITY",
            Error::NonConvergence { .. } => "E_NO_CONVERGENCE",
            Error::NotCellvox => "E_VOX_MAGIC",
            Error::TruncatedVoxels => "E_VOX_TRUNCATED",
            Error::VoxelCountMismatch { .. } => "E_VOX_COUNT",
            Error::VoxelDimensionMismatch { .. } => "E_VOX_DIM",
            Error::VoxelGridMismatch { .. } => "E_VOX_GRID",
            Error::InvalidConfig { .. } => "E_CONFIG",
            Error::Io(_) => "E_IO",
            Error::Json(_) => "E_JSON",
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
