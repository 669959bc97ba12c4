//! Builders for the worked example cells: a bilayer laminate, the octant
//! arrangement of a fully anisotropic material, fiber-reinforced cells with
//! tetragonal arrangements, the hexagonal fiber bundle, and a 2D checkerboard.

use super::{rasterize, Cell, GeometryPrimitive, Lattice, PrimitiveKind, UnitCell};
use crate::error::{Error, Result};
use crate::tensor::{Dim, ElasticityTensor, UnimodularMap};
use nalgebra::{DMatrix, DVector};

/// Two-phase material pair used by the laminate and checkerboard builders.
#[derive(Debug, Clone)]
pub struct TwoPhase {
    pub first: ElasticityTensor,
    pub second: ElasticityTensor,
}

impl Default for TwoPhase {
    /// Shear-contrast pair: iso(λ=0, μ=1) and iso(λ=0, μ=3).
    fn default() -> Self {
        TwoPhase {
            first: ElasticityTensor::isotropic(0.0, 1.0, Dim::D3),
            second: ElasticityTensor::isotropic(0.0, 3.0, Dim::D3),
        }
    }
}

impl TwoPhase {
    pub fn default_2d() -> Self {
        TwoPhase {
            first: ElasticityTensor::isotropic(0.0, 1.0, Dim::D2),
            second: ElasticityTensor::isotropic(0.0, 3.0, Dim::D2),
        }
    }
}

/// Matrix/fiber material pair used by the fiber-cell builders.
#[derive(Debug, Clone)]
pub struct MatrixFiber {
    pub matrix: ElasticityTensor,
    pub fiber: ElasticityTensor,
}

impl Default for MatrixFiber {
    fn default() -> Self {
        MatrixFiber {
            matrix: ElasticityTensor::isotropic(1.0, 1.0, Dim::D3),
            fiber: ElasticityTensor::isotropic(5.0, 5.0, Dim::D3),
        }
    }
}

/// A fixed, fully anisotropic, positive-definite elasticity tensor (strictly
/// diagonally dominant Mandel matrix). Used as the default per-octant
/// material of [`orthotropic_octants`]; classifies as triclinic.
pub fn sample_anisotropic() -> ElasticityTensor {
    let m = DMatrix::from_row_slice(
        6,
        6,
        &[
            4.0, 1.2, 0.8, 0.3, -0.2, 0.5, //
            1.2, 3.5, 0.9, -0.4, 0.3, 0.1, //
            0.8, 0.9, 4.2, 0.2, 0.5, -0.3, //
            0.3, -0.4, 0.2, 2.8, 0.4, 0.2, //
            -0.2, 0.3, 0.5, 0.4, 3.1, -0.1, //
            0.5, 0.1, -0.3, 0.2, -0.1, 2.6,
        ],
    );
    ElasticityTensor::from_mandel_matrix(Dim::D3, m).expect("matrix is symmetric")
}

/// Bilayer laminate on Y = (0,1)³ with layers normal to e₃: `first` on
/// lattice coordinate t₃ ∈ [0, f), `second` on [f, 1). The volume fraction is
/// snapped to the grid so the interface lies on element faces.
pub fn laminate(fraction: f64, n: usize, phases: TwoPhase) -> Result<UnitCell> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidConfig {
            reason: format!("laminate fraction {fraction} outside [0,1]"),
        });
    }
    let layers = (fraction * n as f64).round() as usize;
    let layers = layers.min(n);
    let materials = vec![
        ("phase1".to_string(), phases.first),
        ("phase2".to_string(), phases.second),
    ];
    let mut index = Vec::with_capacity(n * n * n);
    for _i in 0..n {
        for _j in 0..n {
            for k in 0..n {
                index.push(if k < layers { 0u16 } else { 1u16 });
            }
        }
    }
    Cell::new(Lattice::unit(3), DVector::zeros(3), vec![n, n, n], materials, index)
}

/// Octant cell realizing the reflection construction: the anisotropic tensor
/// occupies the base octant and each neighboring octant carries the copy
/// conjugated by the reflection that maps it back, so all three coordinate
/// reflections about the cell center are exact symmetries of the voxel
/// field. The cell is anchored at the origin with edge length 2 (the same
/// periodic structure as the (−1,1)³ cell, shifted by one half-period); the
/// base tensor sits on lattice coordinates (0, ½)³.
pub fn orthotropic_octants(n: usize, anisotropic: Option<ElasticityTensor>) -> Result<UnitCell> {
    if n % 2 != 0 {
        return Err(Error::IncompatibleResolution {
            example: "orthotropic_octants".into(),
            reason: format!("grid extent {n} must be even so voxel centers avoid the octant planes"),
        });
    }
    let c_an = anisotropic.unwrap_or_else(sample_anisotropic);
    let reflections: Vec<UnimodularMap> =
        (0..3).map(|a| UnimodularMap::axis_reflection(Dim::D3, a)).collect();

    // Material for octant flags (s₁,s₂,s₃): successive conjugations in axis order.
    let mut materials = Vec::with_capacity(8);
    for s in 0..8usize {
        let signs = [(s >> 2) & 1, (s >> 1) & 1, s & 1];
        let mut c = c_an.clone();
        for (axis, &neg) in signs.iter().enumerate() {
            if neg == 1 {
                c = c.conjugate(&reflections[axis])?;
            }
        }
        let name: String = signs.iter().map(|&b| if b == 1 { 'r' } else { 'o' }).collect();
        materials.push((format!("an_{name}"), c));
    }

    let mut index = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                // Lattice coordinate above 1/2 is the reflected copy.
                let s1 = (2 * i + 1 > n) as usize;
                let s2 = (2 * j + 1 > n) as usize;
                let s3 = (2 * k + 1 > n) as usize;
                index.push(((s1 << 2) | (s2 << 1) | s3) as u16);
            }
        }
    }
    Cell::new(Lattice::cube(3, 2.0)?, DVector::zeros(3), vec![n, n, n], materials, index)
}

/// Fiber arrangements on Y = (−1,1)³.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TetragonalVariant {
    /// One fiber of radius 0.5 whose axis is the y₃-axis.
    SingleFiber,
    /// Four fibers of radius 0.2 along e₃ at in-plane positions (±0.5, ±0.5).
    FourFibers,
    /// Two orthogonal fibers of radius 0.2: one along e₂ through
    /// (y₁, y₃) = (0.5, 0), one along e₃ through (y₁, y₂) = (−0.5, 0).
    OrthogonalFibers,
}

/// Builds one of the tetragonal fiber cells. Needs an even grid so voxel
/// centers avoid the mirror planes.
pub fn tetragonal_fibers(
    variant: TetragonalVariant,
    n: usize,
    mats: MatrixFiber,
) -> Result<UnitCell> {
    if n % 2 != 0 {
        return Err(Error::IncompatibleResolution {
            example: "tetragonal_fibers".into(),
            reason: format!("grid extent {n} must be even"),
        });
    }
    let cylinder = |point: [f64; 3], axis: [f64; 3], radius: f64| GeometryPrimitive {
        kind: PrimitiveKind::Cylinder {
            point: point.to_vec(),
            axis: axis.to_vec(),
            radius,
        },
        material: "fiber".to_string(),
    };
    let primitives: Vec<GeometryPrimitive> = match variant {
        TetragonalVariant::SingleFiber => vec![cylinder([0.0, 0.0, 0.0], [0.0, 0.0, 1.0], 0.5)],
        TetragonalVariant::FourFibers => [(0.5, 0.5), (0.5, -0.5), (-0.5, 0.5), (-0.5, -0.5)]
            .iter()
            .map(|&(x, y)| cylinder([x, y, 0.0], [0.0, 0.0, 1.0], 0.2))
            .collect(),
        TetragonalVariant::OrthogonalFibers => vec![
            cylinder([0.5, 0.0, 0.0], [0.0, 1.0, 0.0], 0.2),
            cylinder([-0.5, 0.0, 0.0], [0.0, 0.0, 1.0], 0.2),
        ],
    };
    let materials = vec![
        ("matrix".to_string(), mats.matrix),
        ("fiber".to_string(), mats.fiber),
    ];
    let origin = DVector::from_column_slice(&[-1.0, -1.0, -1.0]);
    rasterize(
        Lattice::cube(3, 2.0)?,
        origin,
        vec![n, n, n],
        materials,
        &primitives,
        "matrix",
    )
}

/// Hexagonal fiber bundle: the in-plane cell is a rhombus whose sides and
/// short diagonal have length 2 (basis vectors (2,0) and (1,√3)), the third
/// lattice vector is 2·e₃, and unit-radius fibers run along e₃ through the
/// rhombus corners, so adjacent fibers touch. The material field does not
/// vary along the fiber axis, so the grid is (n, n, 1); n is the in-plane
/// resolution and must be the same for both rhombus axes.
pub fn hexagonal_bundle(n: usize, mats: MatrixFiber) -> Result<UnitCell> {
    let sqrt3 = 3.0_f64.sqrt();
    let basis = DMatrix::from_column_slice(
        3,
        3,
        &[2.0, 0.0, 0.0, 1.0, sqrt3, 0.0, 0.0, 0.0, 2.0],
    );
    let corners = [
        [0.0, 0.0],
        [2.0, 0.0],
        [1.0, sqrt3],
        [3.0, sqrt3],
    ];
    let primitives: Vec<GeometryPrimitive> = corners
        .iter()
        .map(|&[x, y]| GeometryPrimitive {
            kind: PrimitiveKind::Cylinder {
                point: vec![x, y, 0.0],
                axis: vec![0.0, 0.0, 1.0],
                radius: 1.0,
            },
            material: "fiber".to_string(),
        })
        .collect();
    let materials = vec![
        ("matrix".to_string(), mats.matrix),
        ("fiber".to_string(), mats.fiber),
    ];
    let origin = DVector::from_column_slice(&[0.0, 0.0, -1.0]);
    rasterize(
        Lattice::new(basis)?,
        origin,
        vec![n, n, 1],
        materials,
        &primitives,
        "matrix",
    )
}

/// 2D checkerboard on Y = (0,1)²: four quadrants with phases alternating by
/// quadrant parity. Even grids keep the quadrant boundaries on voxel faces.
pub fn checkerboard2d(n: usize, phases: TwoPhase) -> Result<UnitCell> {
    if n % 2 != 0 {
        return Err(Error::IncompatibleResolution {
            example: "checkerboard2d".into(),
            reason: format!("grid extent {n} must be even"),
        });
    }
    for (_, c) in [("a", &phases.first), ("b", &phases.second)] {
        if c.dim() != Dim::D2 {
            return Err(Error::DimensionMismatch { expected: 2, found: c.dim().n() });
        }
    }
    let materials = vec![
        ("phase1".to_string(), phases.first),
        ("phase2".to_string(), phases.second),
    ];
    let mut index = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let qi = 2 * i / n;
            let qj = 2 * j / n;
            index.push(((qi + qj) % 2) as u16);
        }
    }
    Cell::new(Lattice::unit(2), DVector::zeros(2), vec![n, n], materials, index)
}

/// Builds an example cell by name with default materials; the names are the
/// ones accepted by the CLI `build-example` subcommand.
pub fn build_named(name: &str, n: usize) -> Result<UnitCell> {
    match name {
        "laminate" => laminate(0.5, n, TwoPhase::default()),
        "orthotropic_octants" => orthotropic_octants(n, None),
        "tetragonal_single_fiber" => {
            tetragonal_fibers(TetragonalVariant::SingleFiber, n, MatrixFiber::default())
        }
        "tetragonal_four_fibers" => {
            tetragonal_fibers(TetragonalVariant::FourFibers, n, MatrixFiber::default())
        }
        "tetragonal_orthogonal_fibers" => {
            tetragonal_fibers(TetragonalVariant::OrthogonalFibers, n, MatrixFiber::default())
        }
        "hexagonal_bundle" => hexagonal_bundle(n, MatrixFiber::default()),
        "checkerboard2d" => checkerboard2d(n, TwoPhase::default_2d()),
        other => Err(Error::UnknownExample { name: other.to_string() }),
    }
}

/// Names accepted by [`build_named`].
pub const EXAMPLE_NAMES: &[&str] = &[
    "laminate",
    "orthotropic_octants",
    "tetragonal_single_fiber",
    "tetragonal_four_fibers",
    "tetragonal_orthogonal_fibers",
    "hexagonal_bundle",
    "checkerboard2d",
];
