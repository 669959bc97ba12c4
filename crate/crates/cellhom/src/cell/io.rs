//! On-disk cell formats: a JSON config describing lattice, grid, materials,
//! and geometry, plus an optional raw voxel file holding explicit material
//! indices.
//!
//! Voxel file layout: ASCII magic `CELLVOX1`, little-endian u32 dimension,
//! u32 grid extents, then row-major u16 material indices with the last
//! lattice index varying fastest.

use super::{rasterize, Cell, GeometryPrimitive, Lattice, PrimitiveKind, UnitCell};
use crate::error::{Error, Result};
use crate::homog::{Mobility, MobilityCell};
use crate::tensor::{Dim, ElasticityTensor};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

const MAGIC: &[u8; 8] = b"CELLVOX1";

/// Material entry of the cell config, tagged by `model`. The elastic models
/// build [`ElasticityTensor`]s; the mobility models build transport
/// mobilities. All floating-point values are 64-bit.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum MaterialSpec {
    Isotropic {
        name: String,
        lambda: f64,
        mu: f64,
    },
    Cubic {
        name: String,
        c11: f64,
        c12: f64,
        c44: f64,
    },
    TransverseIsotropic {
        name: String,
        c11: f64,
        c33: f64,
        c12: f64,
        c13: f64,
        c44: f64,
        #[serde(default)]
        axis: Option<Vec<f64>>,
    },
    Mandel {
        name: String,
        mandel: Vec<Vec<f64>>,
    },
    ScalarMobility {
        name: String,
        m: f64,
    },
    Mobility {
        name: String,
        matrix: Vec<Vec<f64>>,
    },
}

impl MaterialSpec {
    pub fn name(&self) -> &str {
        match self {
            MaterialSpec::Isotropic { name, .. }
            | MaterialSpec::Cubic { name, .. }
            | MaterialSpec::TransverseIsotropic { name, .. }
            | MaterialSpec::Mandel { name, .. }
            | MaterialSpec::ScalarMobility { name, .. }
            | MaterialSpec::Mobility { name, .. } => name,
        }
    }

    fn elastic(&self, dim: Dim) -> Result<ElasticityTensor> {
        match self {
            MaterialSpec::Isotropic { lambda, mu, .. } => {
                Ok(ElasticityTensor::isotropic(*lambda, *mu, dim))
            }
            MaterialSpec::Cubic { c11, c12, c44, .. } => {
                if dim != Dim::D3 {
                    return Err(Error::InvalidConfig {
                        reason: "cubic materials are three-dimensional".into(),
                    });
                }
                Ok(ElasticityTensor::cubic(*c11, *c12, *c44))
            }
            MaterialSpec::TransverseIsotropic { c11, c33, c12, c13, c44, axis, .. } => {
                if dim != Dim::D3 {
                    return Err(Error::InvalidConfig {
                        reason: "transversely isotropic materials are three-dimensional".into(),
                    });
                }
                let axis = axis
                    .clone()
                    .map(|a| DVector::from_vec(a))
                    .unwrap_or_else(|| DVector::from_column_slice(&[0.0, 0.0, 1.0]));
                ElasticityTensor::transverse_isotropic(*c11, *c33, *c12, *c13, *c44, &axis)
            }
            MaterialSpec::Mandel { mandel, .. } => {
                let m = dim.mandel_len();
                if mandel.len() != m || mandel.iter().any(|r| r.len() != m) {
                    return Err(Error::InvalidConfig {
                        reason: format!("mandel matrix must be {m}x{m}"),
                    });
                }
                let flat: Vec<f64> = mandel.iter().flatten().copied().collect();
                ElasticityTensor::from_mandel_matrix(dim, DMatrix::from_row_slice(m, m, &flat))
            }
            MaterialSpec::ScalarMobility { name, .. } | MaterialSpec::Mobility { name, .. } => {
                Err(Error::InvalidConfig {
                    reason: format!("material `{name}` is a mobility, not an elasticity tensor"),
                })
            }
        }
    }

    fn mobility(&self, dim: Dim) -> Result<Mobility> {
        match self {
            MaterialSpec::ScalarMobility { name, m } => {
                Mobility::scalar(dim, *m).map_err(|_| Error::NonSpdMobility {
                    material: name.clone(),
                    margin: *m,
                })
            }
            MaterialSpec::Mobility { name, matrix } => {
                let n = dim.n();
                if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
                    return Err(Error::InvalidConfig {
                        reason: format!("mobility matrix must be {n}x{n}"),
                    });
                }
                let flat: Vec<f64> = matrix.iter().flatten().copied().collect();
                Mobility::new(DMatrix::from_row_slice(n, n, &flat))
                    .map_err(|margin| Error::NonSpdMobility { material: name.clone(), margin })
            }
            other => Err(Error::InvalidConfig {
                reason: format!("material `{}` is not a mobility", other.name()),
            }),
        }
    }
}

/// Geometry entry of the cell config, tagged by `kind`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeometrySpec {
    /// Axis-aligned box in lattice coordinates.
    Box { material: String, min: Vec<f64>, max: Vec<f64> },
    /// Halfspace `normal·t < offset` in lattice coordinates.
    Halfspace { material: String, normal: Vec<f64>, offset: f64 },
    /// Cylinder in Cartesian coordinates (disc in 2D).
    Cylinder {
        material: String,
        point: Vec<f64>,
        #[serde(default)]
        axis: Option<Vec<f64>>,
        radius: f64,
    },
}

impl GeometrySpec {
    fn primitive(&self, dim: usize) -> Result<GeometryPrimitive> {
        let prim = match self {
            GeometrySpec::Box { material, min, max } => GeometryPrimitive {
                kind: PrimitiveKind::Box { min: min.clone(), max: max.clone() },
                material: material.clone(),
            },
            GeometrySpec::Halfspace { material, normal, offset } => GeometryPrimitive {
                kind: PrimitiveKind::Halfspace { normal: normal.clone(), offset: *offset },
                material: material.clone(),
            },
            GeometrySpec::Cylinder { material, point, axis, radius } => {
                let axis = match axis {
                    Some(a) => a.clone(),
                    None if dim == 2 => vec![0.0, 0.0],
                    None => {
                        return Err(Error::InvalidConfig {
                            reason: "3D cylinders need an `axis`".into(),
                        })
                    }
                };
                GeometryPrimitive {
                    kind: PrimitiveKind::Cylinder { point: point.clone(), axis, radius: *radius },
                    material: material.clone(),
                }
            }
        };
        Ok(prim)
    }
}

/// The cell config file. `lattice` holds the basis column vectors b₁…b_d.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellConfig {
    pub dim: usize,
    pub lattice: Vec<Vec<f64>>,
    pub origin: Vec<f64>,
    pub grid: Vec<usize>,
    pub materials: Vec<MaterialSpec>,
    #[serde(default)]
    pub geometry: Vec<GeometrySpec>,
    #[serde(default)]
    pub background: Option<String>,
    /// Optional raw voxel file, relative to the config file's directory.
    /// When present it takes precedence over `geometry`.
    #[serde(default)]
    pub voxels: Option<String>,
}

impl CellConfig {
    pub fn lattice_matrix(&self) -> Result<Lattice> {
        let d = self.dim;
        if self.lattice.len() != d || self.lattice.iter().any(|c| c.len() != d) {
            return Err(Error::InvalidConfig {
                reason: format!("lattice must list {d} column vectors of length {d}"),
            });
        }
        let flat: Vec<f64> = self.lattice.iter().flatten().copied().collect();
        Lattice::new(DMatrix::from_column_slice(d, d, &flat))
    }

    fn origin_vec(&self) -> Result<DVector<f64>> {
        if self.origin.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: self.origin.len(),
            });
        }
        Ok(DVector::from_column_slice(&self.origin))
    }

    fn resolve_indices(&self, config_dir: &Path, num_materials: usize) -> Result<Option<Vec<u16>>> {
        let Some(rel) = &self.voxels else { return Ok(None) };
        let path = config_dir.join(rel);
        let (dim, grid, index) = read_voxels(&path)?;
        if dim != self.dim {
            return Err(Error::VoxelDimensionMismatch { expected: self.dim, found: dim });
        }
        if grid != self.grid {
            return Err(Error::VoxelGridMismatch { expected: self.grid.clone(), found: grid });
        }
        if let Some(&bad) = index.iter().find(|&&i| (i as usize) >= num_materials) {
            return Err(Error::MaterialIndexOutOfRange {
                index: bad as usize,
                len: num_materials,
            });
        }
        Ok(Some(index))
    }

    fn build<M>(&self, config_dir: &Path, materials: Vec<(String, M)>) -> Result<Cell<M>>
    where
        M: Clone,
    {
        let lattice = self.lattice_matrix()?;
        let origin = self.origin_vec()?;
        match self.resolve_indices(config_dir, materials.len())? {
            Some(index) => Cell::new(lattice, origin, self.grid.clone(), materials, index),
            None => {
                let background = self.background.as_deref().ok_or_else(|| Error::InvalidConfig {
                    reason: "config has neither `voxels` nor a `background` for rasterization".into(),
                })?;
                let primitives: Vec<GeometryPrimitive> = self
                    .geometry
                    .iter()
                    .map(|g| g.primitive(self.dim))
                    .collect::<Result<_>>()?;
                rasterize(lattice, origin, self.grid.clone(), materials, &primitives, background)
            }
        }
    }
}

/// Loads an elastic unit cell from a config file (rasterizing geometry or
/// reading the referenced voxel payload).
pub fn load_unit_cell(config_path: &Path) -> Result<UnitCell> {
    let (config, dir) = read_config(config_path)?;
    let dim = Dim::from_n(config.dim)?;
    let materials = config
        .materials
        .iter()
        .map(|spec| Ok((spec.name().to_string(), spec.elastic(dim)?)))
        .collect::<Result<Vec<_>>>()?;
    config.build(&dir, materials)
}

/// Loads a transport cell whose materials are mobility tensors.
pub fn load_mobility_cell(config_path: &Path) -> Result<MobilityCell> {
    let (config, dir) = read_config(config_path)?;
    let dim = Dim::from_n(config.dim)?;
    let materials = config
        .materials
        .iter()
        .map(|spec| Ok((spec.name().to_string(), spec.mobility(dim)?)))
        .collect::<Result<Vec<_>>>()?;
    config.build(&dir, materials)
}

fn read_config(config_path: &Path) -> Result<(CellConfig, PathBuf)> {
    let text = std::fs::read_to_string(config_path)?;
    let config: CellConfig = serde_json::from_str(&text)?;
    let dir = config_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    Ok((config, dir))
}

/// Writes a unit cell as a config JSON plus a raw voxel file next to it.
/// Lossless and byte-stable: reloading reproduces the index array exactly.
pub fn save_unit_cell(cell: &UnitCell, config_path: &Path, voxel_name: &str) -> Result<()> {
    let dim = cell.dim();
    let m = cell.material(0).dim().mandel_len();
    let materials = cell
        .materials()
        .iter()
        .map(|(name, c)| MaterialSpec::Mandel {
            name: name.clone(),
            mandel: (0..m)
                .map(|i| (0..m).map(|j| c.mandel_matrix()[(i, j)]).collect())
                .collect(),
        })
        .collect();
    let config = CellConfig {
        dim,
        lattice: (0..dim)
            .map(|j| cell.lattice().basis_vector(j).iter().copied().collect())
            .collect(),
        origin: cell.origin().iter().copied().collect(),
        grid: cell.grid().to_vec(),
        materials,
        geometry: Vec::new(),
        background: None,
        voxels: Some(voxel_name.to_string()),
    };
    let text = serde_json::to_string_pretty(&config)?;
    std::fs::write(config_path, text)?;
    let dir = config_path.parent().unwrap_or(Path::new("."));
    write_voxels(&dir.join(voxel_name), dim, cell.grid(), cell.index())
}

/// Writes a raw voxel payload.
pub fn write_voxels(path: &Path, dim: usize, grid: &[usize], index: &[u16]) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(MAGIC)?;
    file.write_all(&(dim as u32).to_le_bytes())?;
    for &n in grid {
        file.write_all(&(n as u32).to_le_bytes())?;
    }
    for &i in index {
        file.write_all(&i.to_le_bytes())?;
    }
    file.flush()?;
    Ok(())
}

/// Reads a raw voxel payload, returning (dim, grid, indices).
pub fn read_voxels(path: &Path) -> Result<(usize, Vec<usize>, Vec<u16>)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    parse_voxels(&bytes)
}

fn parse_voxels(bytes: &[u8]) -> Result<(usize, Vec<usize>, Vec<u16>)> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::NotCellvox);
    }
    let mut pos = MAGIC.len();
    let read_u32 = |pos: &mut usize| -> Result<u32> {
        if *pos + 4 > bytes.len() {
            return Err(Error::TruncatedVoxels);
        }
        let v = u32::from_le_bytes(bytes[*pos..*pos + 4].try_into().unwrap());
        *pos += 4;
        Ok(v)
    };
    let dim = read_u32(&mut pos)? as usize;
    if !(1..=8).contains(&dim) {
        return Err(Error::InvalidConfig { reason: format!("implausible voxel dimension {dim}") });
    }
    let mut grid = Vec::with_capacity(dim);
    for _ in 0..dim {
        grid.push(read_u32(&mut pos)? as usize);
    }
    let count: usize = grid.iter().product();
    if bytes.len() < pos + 2 * count {
        return Err(Error::TruncatedVoxels);
    }
    if bytes.len() > pos + 2 * count {
        return Err(Error::InvalidConfig {
            reason: "trailing bytes after voxel payload".into(),
        });
    }
    let index = bytes[pos..]
        .chunks_exact(2)
        .map(|c| u16::from_le_bytes([c[0], c[1]]))
        .collect();
    Ok((dim, grid, index))
}
