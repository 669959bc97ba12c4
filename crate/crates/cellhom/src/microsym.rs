//! Affine volume-preserving symmetries of a periodic elastic structure:
//! evaluating and composing them, verifying the pointwise field identity
//! `ℂ(z) = H[ℂ(h⁻¹(z))(HᵀEH)]Hᵀ` on the voxel grid, transforming a cell to
//! an equivalent one over h(Y), and searching a finite symmetry catalog.
//!
//! Checks are exact rather than interpolated: a candidate map must send
//! every voxel center onto a voxel center modulo the lattice (within 1e-9 in
//! lattice coordinates), otherwise it is rejected loudly. Interpolating a
//! discontinuous coefficient field would manufacture residuals that the
//! pointwise identity never had.

use crate::cell::{wrap_lattice_coords, Cell, Lattice, UnitCell};
use crate::error::{Error, Result};
use crate::tensor::{ElasticityTensor, UnimodularMap};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Lattice-coordinate tolerance for voxel-center alignment.
const GRID_TOL: f64 = 1e-9;

/// An affine volume-preserving transformation `h(z) = z₀ + a + H(z − z₀)`.
#[derive(Debug, Clone)]
pub struct AffineSymmetry {
    z0: DVector<f64>,
    a: DVector<f64>,
    map: UnimodularMap,
}

impl AffineSymmetry {
    pub fn new(z0: DVector<f64>, a: DVector<f64>, map: UnimodularMap) -> Result<Self> {
        let n = map.dim().n();
        if z0.len() != n || a.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: z0.len().max(a.len()) });
        }
        Ok(AffineSymmetry { z0, a, map })
    }

    /// Pure translation by `a`.
    pub fn translation(a: DVector<f64>) -> Result<Self> {
        let dim = crate::tensor::Dim::from_n(a.len())?;
        let z0 = DVector::zeros(a.len());
        AffineSymmetry::new(z0, a, UnimodularMap::identity(dim))
    }

    /// Linear-part map about a fixed point, with no translation.
    pub fn about_point(z0: DVector<f64>, map: UnimodularMap) -> Result<Self> {
        let a = DVector::zeros(z0.len());
        AffineSymmetry::new(z0, a, map)
    }

    pub fn identity(dim: crate::tensor::Dim) -> Self {
        AffineSymmetry {
            z0: DVector::zeros(dim.n()),
            a: DVector::zeros(dim.n()),
            map: UnimodularMap::identity(dim),
        }
    }

    pub fn map(&self) -> &UnimodularMap {
        &self.map
    }

    pub fn z0(&self) -> &DVector<f64> {
        &self.z0
    }

    pub fn translation_part(&self) -> &DVector<f64> {
        &self.a
    }

    pub fn dim(&self) -> crate::tensor::Dim {
        self.map.dim()
    }

    pub fn evaluate(&self, z: &DVector<f64>) -> DVector<f64> {
        &self.z0 + &self.a + self.map.matrix() * (z - &self.z0)
    }

    /// The inverse transformation, in the same canonical form about z₀.
    pub fn inverse(&self) -> AffineSymmetry {
        let inv = self.map.inverse();
        let a = -(inv.matrix() * &self.a);
        AffineSymmetry { z0: self.z0.clone(), a, map: inv }
    }

    /// Function composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &AffineSymmetry) -> Result<AffineSymmetry> {
        let map = self.map.compose(other.map())?;
        let a = self.evaluate(&other.evaluate(&self.z0)) - &self.z0;
        Ok(AffineSymmetry { z0: self.z0.clone(), a, map })
    }

    /// The total translation `w` in `h(z) = Hz + w`.
    pub fn cartesian_offset(&self) -> DVector<f64> {
        &self.z0 + &self.a - self.map.matrix() * &self.z0
    }
}

/// Wire format: `{"z0": [...], "a": [...], "H": [[row], ...]}`.
#[derive(Serialize, Deserialize)]
struct AffineWire {
    z0: Vec<f64>,
    a: Vec<f64>,
    #[serde(rename = "H")]
    h: Vec<Vec<f64>>,
}

impl Serialize for AffineSymmetry {
    fn serialize<S: serde::Serializer>(&self, sr: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim().n();
        AffineWire {
            z0: self.z0.iter().copied().collect(),
            a: self.a.iter().copied().collect(),
            h: (0..n)
                .map(|i| (0..n).map(|j| self.map.matrix()[(i, j)]).collect())
                .collect(),
        }
        .serialize(sr)
    }
}

impl<'de> Deserialize<'de> for AffineSymmetry {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let wire = AffineWire::deserialize(de)?;
        let n = wire.h.len();
        if wire.h.iter().any(|r| r.len() != n) {
            return Err(D::Error::custom("H must be square"));
        }
        let flat: Vec<f64> = wire.h.iter().flatten().copied().collect();
        let map = UnimodularMap::new(DMatrix::from_row_slice(n, n, &flat)).map_err(D::Error::custom)?;
        AffineSymmetry::new(
            DVector::from_vec(wire.z0),
            DVector::from_vec(wire.a),
            map,
        )
        .map_err(D::Error::custom)
    }
}

/// Result of a micro-symmetry check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MicroSymmetryReport {
    /// Max over voxels of ‖ℂ(z) − conj(ℂ(h⁻¹(z)), H)‖_F, normalized by the
    /// largest material norm.
    pub residual: f64,
    pub pass: bool,
    pub per_voxel_worst: WorstVoxel,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorstVoxel {
    /// Row-major linear voxel index.
    pub index: usize,
    pub value: f64,
}

/// For every voxel of `cell`, the linear index of the voxel containing the
/// image of its center under `h` (wrapped into the cell). Errors if any
/// image misses all voxel centers by more than 1e-9 in lattice coordinates,
/// naming the worst-offending voxel.
fn voxel_image_map<M>(cell: &Cell<M>, h: &AffineSymmetry) -> Result<Vec<usize>> {
    let dim = cell.dim();
    let lattice = cell.lattice();
    let grid = cell.grid();
    let nvox = cell.num_voxels();
    let mut map = Vec::with_capacity(nvox);
    let mut worst = 0.0_f64;
    let mut worst_voxel = vec![0usize; dim];
    for lin in 0..nvox {
        let coords = cell.voxel_coords(lin);
        let z = cell.voxel_center(&coords);
        let image = h.evaluate(&z);
        let t = wrap_lattice_coords(&lattice.to_lattice(cell.origin(), &image));
        let mut src = 0usize;
        let mut mismatch = 0.0_f64;
        for (j, &n) in grid.iter().enumerate() {
            let u = t[j] * n as f64 - 0.5;
            let mut i = u.round() as isize;
            // u ∈ [−0.5, n − 0.5); round can only leave range at the ends.
            mismatch = mismatch.max((u - i as f64).abs() / n as f64);
            if i < 0 {
                i += n as isize;
            }
            if i >= n as isize {
                i -= n as isize;
            }
            src = src * n + i as usize;
        }
        if mismatch > worst {
            worst = mismatch;
            worst_voxel = coords;
        }
        map.push(src);
    }
    if worst > GRID_TOL {
        return Err(Error::GridIncompatible { voxel: worst_voxel, mismatch: worst });
    }
    Ok(map)
}

/// Checks whether `h` is a symmetry of the periodic elastic structure by
/// evaluating the discrete field identity at every voxel center. The residual
/// is exact: materials are compared through precomputed conjugated copies,
/// so structural symmetries report exactly zero.
pub fn check_micro_symmetry(
    cell: &UnitCell,
    h: &AffineSymmetry,
    tol: f64,
) -> Result<MicroSymmetryReport> {
    if h.dim().n() != cell.dim() {
        return Err(Error::DimensionMismatch { expected: cell.dim(), found: h.dim().n() });
    }
    // h⁻¹ maps the target voxel back to its source.
    let source = voxel_image_map(cell, &h.inverse())?;
    let mats = cell.materials();
    let conjugated: Vec<ElasticityTensor> = mats
        .iter()
        .map(|(_, c)| c.conjugate(h.map()))
        .collect::<Result<_>>()?;
    let max_norm = mats
        .iter()
        .map(|(_, c)| c.norm())
        .fold(0.0_f64, f64::max)
        .max(1e-300);
    let nmat = mats.len();
    let mut dist = vec![0.0_f64; nmat * nmat];
    for i in 0..nmat {
        for j in 0..nmat {
            dist[i * nmat + j] =
                (mats[i].1.mandel_matrix() - conjugated[j].mandel_matrix()).norm() / max_norm;
        }
    }
    let index = cell.index();
    let mut worst = WorstVoxel { index: 0, value: 0.0 };
    for (lin, &idx) in index.iter().enumerate() {
        let d = dist[idx as usize * nmat + index[source[lin]] as usize];
        if d > worst.value {
            worst = WorstVoxel { index: lin, value: d };
        }
    }
    Ok(MicroSymmetryReport { residual: worst.value, pass: worst.value <= tol, per_voxel_worst: worst })
}

/// Per-direction result of the induced-periodicity probe.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodicityCheck {
    pub direction: usize,
    /// Max over voxel centers of the normalized distance between ℂ(z + Hbᵢ)
    /// and ℂ(z).
    pub max_distance: f64,
    pub pass: bool,
}

/// Verifies that the field is Hbᵢ-periodic for each lattice direction, probing
/// all voxel centers. Meaningful when `h` is a symmetry of the structure; the
/// probe itself is total and never interpolates.
pub fn induced_periodicity_check(
    cell: &UnitCell,
    h: &AffineSymmetry,
    tol: f64,
) -> Result<Vec<PeriodicityCheck>> {
    if h.dim().n() != cell.dim() {
        return Err(Error::DimensionMismatch { expected: cell.dim(), found: h.dim().n() });
    }
    let mats = cell.materials();
    let max_norm = mats.iter().map(|(_, c)| c.norm()).fold(0.0_f64, f64::max).max(1e-300);
    let nmat = mats.len();
    let mut dist = vec![0.0_f64; nmat * nmat];
    for i in 0..nmat {
        for j in 0..nmat {
            dist[i * nmat + j] =
                (mats[i].1.mandel_matrix() - mats[j].1.mandel_matrix()).norm() / max_norm;
        }
    }
    let mut checks = Vec::with_capacity(cell.dim());
    for dir in 0..cell.dim() {
        let shifted_b = h.map().matrix() * cell.lattice().basis_vector(dir);
        let mut max_distance = 0.0_f64;
        for lin in 0..cell.num_voxels() {
            let coords = cell.voxel_coords(lin);
            let z = cell.voxel_center(&coords);
            let here = cell.index()[lin] as usize;
            let there = cell.material_index_at(&(&z + &shifted_b));
            max_distance = max_distance.max(dist[here * nmat + there]);
        }
        checks.push(PeriodicityCheck { direction: dir, max_distance, pass: max_distance <= tol });
    }
    Ok(checks)
}

/// Transforms a cell by a grid-compatible map: the result lives on the cell
/// h(Y) with basis HB and carries the conjugated material field
/// `ℂ̂(ŷ) = ℂ_H(h⁻¹(ŷ))`, which has the same periodic extension as the
/// original when `h` is a symmetry. Conjugated materials are deduplicated by
/// relative Frobenius distance ≤ 1e-12.
pub fn transform_cell(cell: &UnitCell, h: &AffineSymmetry) -> Result<UnitCell> {
    if h.dim().n() != cell.dim() {
        return Err(Error::DimensionMismatch { expected: cell.dim(), found: h.dim().n() });
    }
    // Reject maps that do not respect the voxel grid.
    voxel_image_map(cell, &h.inverse())?;

    // The grid travels with h: the new voxel at grid position g has center
    // h(center_g), and h⁻¹ brings it back exactly, so indices are unchanged
    // and only the material table is conjugated.
    let conjugated: Vec<ElasticityTensor> = cell
        .materials()
        .iter()
        .map(|(_, c)| c.conjugate(h.map()))
        .collect::<Result<_>>()?;

    let mut table: Vec<(String, ElasticityTensor)> = Vec::new();
    let mut remap = Vec::with_capacity(conjugated.len());
    for (k, c) in conjugated.into_iter().enumerate() {
        let scale = c.norm().max(1.0);
        let existing = table
            .iter()
            .position(|(_, t)| (t.mandel_matrix() - c.mandel_matrix()).norm() <= 1e-12 * scale);
        match existing {
            Some(i) => remap.push(i as u16),
            None => {
                remap.push(table.len() as u16);
                table.push((cell.materials()[k].0.clone(), c));
            }
        }
    }
    let index: Vec<u16> = cell.index().iter().map(|&i| remap[i as usize]).collect();

    let new_basis = h.map().matrix() * cell.lattice().basis();
    let lattice = Lattice::new(new_basis)?;
    let origin = h.evaluate(cell.origin());
    Cell::new(lattice, origin, cell.grid().to_vec(), table, index)
}

/// One detected symmetry with its residual.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectedSymmetry {
    pub label: String,
    pub symmetry: AffineSymmetry,
    pub residual: f64,
}

/// Outcome of a catalog search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectionReport {
    pub passing: Vec<DetectedSymmetry>,
    /// Candidates whose maps do not respect the voxel grid; skipped, not errors.
    pub skipped_incompatible: usize,
    pub failed: usize,
}

/// Whether the cell's lattice is the hexagonal rhombic one: equal-length
/// in-plane basis vectors at 60°, with the remaining axis orthogonal (3D).
fn is_hexagonal_lattice<M>(cell: &Cell<M>) -> bool {
    let b = cell.lattice().basis();
    let dim = cell.dim();
    let (b1, b2) = (b.column(0), b.column(1));
    let cos = b1.dot(&b2) / (b1.norm() * b2.norm());
    let planar = (b1.norm() - b2.norm()).abs() <= 1e-9 * b1.norm() && (cos - 0.5).abs() <= 1e-9;
    if dim == 2 {
        return planar;
    }
    let b3 = b.column(2);
    planar
        && b1[2].abs() <= 1e-12
        && b2[2].abs() <= 1e-12
        && b3[0].abs() <= 1e-12
        && b3[1].abs() <= 1e-12
}

fn linear_catalog<M>(cell: &Cell<M>) -> Vec<(String, UnimodularMap)> {
    use crate::tensor::Dim;
    let mut cat = Vec::new();
    match cell.dim() {
        3 => {
            cat.push(("identity".to_string(), UnimodularMap::identity(Dim::D3)));
            cat.push(("inversion".to_string(), UnimodularMap::inversion(Dim::D3)));
            for axis in 0..3 {
                cat.push((format!("half_turn_e{}", axis + 1), UnimodularMap::half_turn(axis)));
                cat.push((
                    format!("reflection_e{}", axis + 1),
                    UnimodularMap::axis_reflection(Dim::D3, axis),
                ));
                cat.push((format!("quarter_turn_e{}", axis + 1), UnimodularMap::quarter_turn(axis)));
            }
            if is_hexagonal_lattice(cell) {
                let e3 = DVector::from_column_slice(&[0.0, 0.0, 1.0]);
                cat.push((
                    "hex_turn_e3".to_string(),
                    UnimodularMap::rotation_about_axis(&e3, std::f64::consts::PI / 3.0).unwrap(),
                ));
            }
        }
        2 => {
            cat.push(("identity".to_string(), UnimodularMap::identity(Dim::D2)));
            cat.push(("inversion".to_string(), UnimodularMap::inversion(Dim::D2)));
            for axis in 0..2 {
                cat.push((
                    format!("reflection_e{}", axis + 1),
                    UnimodularMap::axis_reflection(Dim::D2, axis),
                ));
            }
            cat.push((
                "quarter_turn".to_string(),
                UnimodularMap::rotation_2d(std::f64::consts::FRAC_PI_2),
            ));
            if is_hexagonal_lattice(cell) {
                cat.push(("hex_turn".to_string(), UnimodularMap::rotation_2d(std::f64::consts::PI / 3.0)));
            }
        }
        _ => unreachable!("cells are 2- or 3-dimensional"),
    }
    cat
}

/// Tests a finite catalog of candidate symmetries: the linear parts above,
/// centered at the cell corners/center/half-period offsets, combined with
/// half-period translations. Grid-incompatible candidates are skipped with a
/// count; duplicates modulo lattice translations are removed.
pub fn detect_symmetries(cell: &UnitCell, tol: f64) -> Result<DetectionReport> {
    let dim = cell.dim();
    let lattice = cell.lattice();

    // Centers: origin + B·c for c ∈ {0, ½}^dim (includes corners and center).
    let mut centers = Vec::new();
    for mask in 0..(1usize << dim) {
        let c = DVector::from_iterator(
            dim,
            (0..dim).map(|j| if mask & (1 << j) != 0 { 0.5 } else { 0.0 }),
        );
        centers.push(lattice.to_cartesian(cell.origin(), &c));
    }
    // Translations: 0, bᵢ/2, (bᵢ+bⱼ)/2.
    let mut translations = vec![DVector::zeros(dim)];
    for i in 0..dim {
        translations.push(lattice.basis_vector(i) * 0.5);
        for j in (i + 1)..dim {
            translations.push((lattice.basis_vector(i) + lattice.basis_vector(j)) * 0.5);
        }
    }

    let inv_basis = lattice.basis().clone().try_inverse().expect("lattice is invertible");
    let mut passing: Vec<DetectedSymmetry> = Vec::new();
    let mut seen: Vec<(DMatrix<f64>, DVector<f64>)> = Vec::new();
    let mut skipped = 0usize;
    let mut failed = 0usize;

    for (label, map) in linear_catalog(cell) {
        for z0 in &centers {
            for a in &translations {
                let h = AffineSymmetry::new(z0.clone(), a.clone(), map.clone())?;
                // Canonical form modulo lattice translations.
                let offset = wrap_lattice_coords(&(&inv_basis * h.cartesian_offset()));
                let duplicate = seen.iter().any(|(m, v)| {
                    (m - map.matrix()).norm() <= 1e-12
                        && v.iter().zip(offset.iter()).all(|(&x, &y)| {
                            let d = (x - y).abs();
                            d.min((1.0 - d).abs()) <= 1e-9
                        })
                });
                if duplicate {
                    continue;
                }
                seen.push((map.matrix().clone(), offset));
                match check_micro_symmetry(cell, &h, tol) {
                    Ok(report) if report.pass => passing.push(DetectedSymmetry {
                        label: label.clone(),
                        symmetry: h,
                        residual: report.residual,
                    }),
                    Ok(_) => failed += 1,
                    Err(Error::GridIncompatible { .. }) => skipped += 1,
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(DetectionReport { passing, skipped_incompatible: skipped, failed })
}
