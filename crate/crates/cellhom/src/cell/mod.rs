//! Periodic elastic structures: a parallelepiped lattice, a voxel grid in
//! lattice coordinates, a material table, and per-voxel material indices.
//!
//! The voxel grid lives in lattice coordinates: voxel (i₁,…,i_d) occupies the
//! half-open box ∏ [iⱼ/Nⱼ, (iⱼ+1)/Nⱼ) of the unit cube of lattice
//! coordinates, and the material field is constant on each voxel. Half-open
//! boxes resolve measure-zero boundary points deterministically.

pub mod examples;
pub mod io;

use crate::error::{Error, Result};
use crate::tensor::ElasticityTensor;
use nalgebra::{DMatrix, DVector};

/// Parallelepiped lattice: the columns of `basis` are the edge vectors b₁…b_d.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    dim: usize,
    basis: DMatrix<f64>,
    inverse: DMatrix<f64>,
}

impl Lattice {
    /// Builds a lattice, rejecting singular bases. The determinant tolerance
    /// is relative to the product of column norms.
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let dim = basis.nrows();
        if basis.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: basis.ncols() });
        }
        let det = basis.determinant();
        let scale: f64 = (0..dim).map(|j| basis.column(j).norm()).product();
        let tolerance = 1e-12 * scale.max(1e-300);
        if det.abs() <= tolerance {
            return Err(Error::SingularLattice { det_abs: det.abs(), tolerance });
        }
        let inverse = basis.clone().try_inverse().expect("determinant checked above");
        Ok(Lattice { dim, basis, inverse })
    }

    /// Unit hypercube lattice.
    pub fn unit(dim: usize) -> Self {
        Lattice::new(DMatrix::identity(dim, dim)).expect("identity is nonsingular")
    }

    /// Cube lattice with edge length `a`.
    pub fn cube(dim: usize, a: f64) -> Result<Self> {
        Lattice::new(DMatrix::identity(dim, dim) * a)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn basis_vector(&self, i: usize) -> DVector<f64> {
        self.basis.column(i).into_owned()
    }

    /// Cell volume |det B|.
    pub fn volume(&self) -> f64 {
        self.basis.determinant().abs()
    }

    /// Cartesian point → lattice coordinates relative to `origin`.
    pub fn to_lattice(&self, origin: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        &self.inverse * (z - origin)
    }

    /// Lattice coordinates → Cartesian point.
    pub fn to_cartesian(&self, origin: &DVector<f64>, t: &DVector<f64>) -> DVector<f64> {
        origin + &self.basis * t
    }
}

/// Periodic wrap of Eq.-style `{z}_Y`: returns the representative inside the
/// cell anchored at `origin` and the integer lattice coefficients k with
/// `z = wrapped + B·k`.
pub fn wrap(z: &DVector<f64>, lattice: &Lattice, origin: &DVector<f64>) -> (DVector<f64>, Vec<i64>) {
    let t = lattice.to_lattice(origin, z);
    let k: Vec<i64> = t.iter().map(|&v| v.floor() as i64).collect();
    let mut frac = t;
    for (f, &ki) in frac.iter_mut().zip(&k) {
        *f -= ki as f64;
        // Guard against values that round up to 1.0 after subtraction.
        if *f >= 1.0 {
            *f -= 1.0;
        }
        if *f < 0.0 {
            *f += 1.0;
        }
    }
    (lattice.to_cartesian(origin, &frac), k)
}

/// Lattice coordinates wrapped into [0,1)^d.
pub fn wrap_lattice_coords(t: &DVector<f64>) -> DVector<f64> {
    let mut frac = t.clone();
    for f in frac.iter_mut() {
        *f -= f.floor();
        if *f >= 1.0 {
            *f -= 1.0;
        }
        if *f < 0.0 {
            *f += 1.0;
        }
    }
    frac
}

/// A periodic voxel structure carrying one value of type `M` per material.
/// `Cell<ElasticityTensor>` is the elastic unit cell; `Cell` is also reused
/// with mobility tensors for first-order transport.
#[derive(Debug, Clone)]
pub struct Cell<M> {
    lattice: Lattice,
    origin: DVector<f64>,
    grid: Vec<usize>,
    materials: Vec<(String, M)>,
    index: Vec<u16>,
}

/// The periodic elastic structure (Y, ℂ).
pub type UnitCell = Cell<ElasticityTensor>;

impl<M> Cell<M> {
    /// Assembles a cell from parts, validating sizes and index bounds.
    pub fn new(
        lattice: Lattice,
        origin: DVector<f64>,
        grid: Vec<usize>,
        materials: Vec<(String, M)>,
        index: Vec<u16>,
    ) -> Result<Self> {
        if origin.len() != lattice.dim() {
            return Err(Error::DimensionMismatch {
                expected: lattice.dim(),
                found: origin.len(),
            });
        }
        if grid.len() != lattice.dim() || grid.iter().any(|&n| n == 0) {
            return Err(Error::InvalidConfig {
                reason: format!("grid {grid:?} must have {} positive extents", lattice.dim()),
            });
        }
        if materials.is_empty() {
            return Err(Error::InvalidConfig { reason: "material table is empty".into() });
        }
        if materials.len() > u16::MAX as usize + 1 {
            return Err(Error::TooManyMaterials { len: materials.len() });
        }
        let expected: usize = grid.iter().product();
        if index.len() != expected {
            return Err(Error::VoxelCountMismatch { expected, found: index.len() });
        }
        if let Some(&bad) = index.iter().find(|&&i| (i as usize) >= materials.len()) {
            return Err(Error::MaterialIndexOutOfRange {
                index: bad as usize,
                len: materials.len(),
            });
        }
        Ok(Cell { lattice, origin, grid, materials, index })
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn origin(&self) -> &DVector<f64> {
        &self.origin
    }

    pub fn grid(&self) -> &[usize] {
        &self.grid
    }

    pub fn materials(&self) -> &[(String, M)] {
        &self.materials
    }

    pub fn material(&self, i: usize) -> &M {
        &self.materials[i].1
    }

    pub fn index(&self) -> &[u16] {
        &self.index
    }

    pub fn num_voxels(&self) -> usize {
        self.index.len()
    }

    /// Row-major linear index; the last lattice index varies fastest.
    pub fn linear_index(&self, coords: &[usize]) -> usize {
        let mut idx = 0;
        for (c, &n) in coords.iter().zip(&self.grid) {
            debug_assert!(*c < n);
            idx = idx * n + c;
        }
        idx
    }

    /// Inverse of [`Cell::linear_index`].
    pub fn voxel_coords(&self, mut linear: usize) -> Vec<usize> {
        let mut coords = vec![0; self.grid.len()];
        for (c, &n) in coords.iter_mut().rev().zip(self.grid.iter().rev()) {
            *c = linear % n;
            linear /= n;
        }
        coords
    }

    /// Lattice coordinates of the center of a voxel.
    pub fn voxel_center_lattice(&self, coords: &[usize]) -> DVector<f64> {
        DVector::from_iterator(
            self.grid.len(),
            coords
                .iter()
                .zip(&self.grid)
                .map(|(&c, &n)| (c as f64 + 0.5) / n as f64),
        )
    }

    /// Cartesian coordinates of the center of a voxel.
    pub fn voxel_center(&self, coords: &[usize]) -> DVector<f64> {
        let t = self.voxel_center_lattice(coords);
        self.lattice.to_cartesian(&self.origin, &t)
    }

    /// Material index at an arbitrary point of space (periodic extension):
    /// wrap into the cell, then voxel lookup with half-open boxes.
    pub fn material_index_at(&self, z: &DVector<f64>) -> usize {
        let t = self.lattice.to_lattice(&self.origin, z);
        let frac = wrap_lattice_coords(&t);
        let mut idx = 0;
        for (j, &n) in self.grid.iter().enumerate() {
            let mut c = (frac[j] * n as f64).floor() as isize;
            if c < 0 {
                c = 0;
            }
            if c as usize >= n {
                c = n as isize - 1;
            }
            idx = idx * n + c as usize;
        }
        self.index[idx]  as usize
    }

    /// Samples the periodic material field: `ℂ(z) = ℂ({z}_Y)`.
    pub fn sample(&self, z: &DVector<f64>) -> &M {
        &self.materials[self.material_index_at(z)].1
    }

    /// Volume fraction occupied by each material.
    pub fn volume_fractions(&self) -> Vec<f64> {
        let mut counts = vec![0usize; self.materials.len()];
        for &i in &self.index {
            counts[i as usize] += 1;
        }
        let total = self.index.len() as f64;
        counts.into_iter().map(|c| c as f64 / total).collect()
    }

    /// Replaces the material table, keeping geometry and indices.
    pub fn map_materials<N>(self, f: impl Fn(&str, M) -> N) -> Cell<N> {
        Cell {
            lattice: self.lattice,
            origin: self.origin,
            grid: self.grid,
            materials: self
                .materials
                .into_iter()
                .map(|(name, m)| {
                    let mapped = f(&name, m);
                    (name, mapped)
                })
                .collect(),
            index: self.index,
        }
    }
}

/// Geometric primitive used by [`rasterize`]. Boxes and halfspaces are
/// expressed in lattice coordinates of the unit cube; cylinders in Cartesian
/// coordinates. Later primitives take precedence over earlier ones.
#[derive(Debug, Clone)]
pub enum PrimitiveKind {
    /// Axis-aligned box in lattice coordinates: min ≤ t < max per axis.
    Box { min: Vec<f64>, max: Vec<f64> },
    /// Halfspace in lattice coordinates: normal·t < offset.
    Halfspace { normal: Vec<f64>, offset: f64 },
    /// Infinite cylinder in Cartesian coordinates: distance from the line
    /// through `point` with unit direction `axis` at most `radius`.
    /// In 2D, `axis` is ignored and the primitive is a disc.
    Cylinder { point: Vec<f64>, axis: Vec<f64>, radius: f64 },
}

/// A primitive plus the material it paints.
#[derive(Debug, Clone)]
pub struct GeometryPrimitive {
    pub kind: PrimitiveKind,
    pub material: String,
}

impl GeometryPrimitive {
    /// Whether the primitive contains the point with lattice coordinates `t`
    /// and Cartesian coordinates `z`.
    fn contains(&self, t: &DVector<f64>, z: &DVector<f64>) -> bool {
        match &self.kind {
            PrimitiveKind::Box { min, max } => t
                .iter()
                .zip(min.iter().zip(max))
                .all(|(&v, (&lo, &hi))| v >= lo && v < hi),
            PrimitiveKind::Halfspace { normal, offset } => {
                let dot: f64 = t.iter().zip(normal).map(|(&v, &n)| v * n).sum();
                dot < *offset
            }
            PrimitiveKind::Cylinder { point, axis, radius } => {
                let mut d: Vec<f64> = z.iter().zip(point).map(|(&a, &b)| a - b).collect();
                if z.len() == 3 {
                    let dot: f64 = d.iter().zip(axis).map(|(&a, &b)| a * b).sum();
                    for (di, &ai) in d.iter_mut().zip(axis) {
                        *di -= dot * ai;
                    }
                }
                let dist2: f64 = d.iter().map(|&v| v * v).sum();
                dist2 <= radius * radius
            }
        }
    }
}

/// Rasterizes primitives onto a voxel grid by testing voxel centers in
/// order; the last matching primitive wins and unmatched voxels take the
/// background material. Deterministic: identical inputs give identical
/// index arrays bit for bit.
pub fn rasterize<M>(
    lattice: Lattice,
    origin: DVector<f64>,
    grid: Vec<usize>,
    materials: Vec<(String, M)>,
    primitives: &[GeometryPrimitive],
    background: &str,
) -> Result<Cell<M>> {
    let find = |name: &str| -> Result<u16> {
        materials
            .iter()
            .position(|(n, _)| n == name)
            .map(|i| i as u16)
            .ok_or_else(|| Error::UnknownMaterial { name: name.to_string() })
    };
    let bg = find(background)?;
    let prim_ids: Vec<u16> = primitives
        .iter()
        .map(|p| find(&p.material))
        .collect::<Result<_>>()?;

    let nvox: usize = grid.iter().product();
    let dim = lattice.dim();
    let mut index = vec![bg; nvox];
    let mut coords = vec![0usize; dim];
    for lin in 0..nvox {
        let mut rem = lin;
        for j in (0..dim).rev() {
            coords[j] = rem % grid[j];
            rem /= grid[j];
        }
        let t = DVector::from_iterator(
            dim,
            coords
                .iter()
                .zip(&grid)
                .map(|(&c, &n)| (c as f64 + 0.5) / n as f64),
        );
        let z = lattice.to_cartesian(&origin, &t);
        for (p, &mat) in primitives.iter().zip(&prim_ids) {
            if p.contains(&t, &z) {
                index[lin] = mat;
            }
        }
    }
    Cell::new(lattice, origin, grid, materials, index)
}
