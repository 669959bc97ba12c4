//! Mandel algebra for symmetric second-order tensors, elasticity (fourth-order)
//! tensors, and the conjugation action of unimodular maps.
//!
//! Everything is stored in the orthonormal Mandel basis: off-diagonal entries of
//! a symmetric tensor carry a factor of √2, so the Mandel inner product of two
//! coordinate vectors equals the Frobenius inner product of the full tensors,
//! fourth-order tensors with major symmetry become symmetric m×m matrices, and
//! the action `E ↦ HᵀEH` becomes an m×m matrix acting on Mandel coordinates.
//!
//! Component ordering is fixed: 3D → (11, 22, 33, 23, 13, 12), 2D → (11, 22, 12).

mod classify;

pub use classify::{classify, generator_catalog, Classification, ResidualEntry, SymmetryClass};

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub(crate) const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Spatial dimension. The library supports the plane and full space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dim {
    D2,
    D3,
}

impl Dim {
    /// Number of spatial coordinates (2 or 3).
    pub fn n(self) -> usize {
        match self {
            Dim::D2 => 2,
            Dim::D3 => 3,
        }
    }

    /// Length of the Mandel vector, n(n+1)/2 (3 in 2D, 6 in 3D).
    pub fn mandel_len(self) -> usize {
        match self {
            Dim::D2 => 3,
            Dim::D3 => 6,
        }
    }

    pub fn from_n(n: usize) -> Result<Self> {
        match n {
            2 => Ok(Dim::D2),
            3 => Ok(Dim::D3),
            _ => Err(Error::DimensionMismatch { expected: 3, found: n }),
        }
    }

    /// Index pairs (i, j), i ≤ j, in Mandel order.
    pub fn mandel_pairs(self) -> &'static [(usize, usize)] {
        match self {
            Dim::D2 => &[(0, 0), (1, 1), (0, 1)],
            Dim::D3 => &[(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)],
        }
    }
}

/// A symmetric second-order tensor in Mandel coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor2 {
    dim: Dim,
    mandel: DVector<f64>,
}

impl SymTensor2 {
    /// Zero tensor.
    pub fn zero(dim: Dim) -> Self {
        SymTensor2 {
            dim,
            mandel: DVector::zeros(dim.mandel_len()),
        }
    }

    /// Identity tensor.
    pub fn identity(dim: Dim) -> Self {
        let mut t = Self::zero(dim);
        for i in 0..dim.n() {
            t.mandel[i] = 1.0;
        }
        t
    }

    /// Builds from Mandel coordinates (√2 convention on shears).
    pub fn from_mandel(dim: Dim, mandel: DVector<f64>) -> Result<Self> {
        if mandel.len() != dim.mandel_len() {
            return Err(Error::DimensionMismatch {
                expected: dim.mandel_len(),
                found: mandel.len(),
            });
        }
        Ok(SymTensor2 { dim, mandel })
    }

    /// The k-th Mandel basis tensor (unit Mandel vector).
    pub fn basis(dim: Dim, k: usize) -> Self {
        let mut t = Self::zero(dim);
        t.mandel[k] = 1.0;
        t
    }

    /// Builds from a full symmetric matrix. Rejects inputs whose asymmetry
    /// exceeds `1e-12 · max(1, ‖A‖_F)` and reports the offending magnitude.
    pub fn from_matrix(full: &DMatrix<f64>) -> Result<Self> {
        let n = full.nrows();
        if full.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: full.ncols() });
        }
        let dim = Dim::from_n(n)?;
        let tolerance = 1e-12 * full.norm().max(1.0);
        let mut max_asym = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                max_asym = max_asym.max((full[(i, j)] - full[(j, i)]).abs());
            }
        }
        if max_asym > tolerance {
            return Err(Error::NotSymmetric { max_asymmetry: max_asym, tolerance });
        }
        let mut mandel = DVector::zeros(dim.mandel_len());
        for (k, &(i, j)) in dim.mandel_pairs().iter().enumerate() {
            mandel[k] = if i == j {
                full[(i, i)]
            } else {
                SQRT_2 * 0.5 * (full[(i, j)] + full[(j, i)])
            };
        }
        Ok(SymTensor2 { dim, mandel })
    }

    /// Reconstructs the full symmetric matrix.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.dim.n();
        let mut full = DMatrix::zeros(n, n);
        for (k, &(i, j)) in self.dim.mandel_pairs().iter().enumerate() {
            if i == j {
                full[(i, i)] = self.mandel[k];
            } else {
                let v = self.mandel[k] / SQRT_2;
                full[(i, j)] = v;
                full[(j, i)] = v;
            }
        }
        full
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn mandel(&self) -> &DVector<f64> {
        &self.mandel
    }

    /// Frobenius norm (equals the Euclidean norm of the Mandel vector).
    pub fn norm(&self) -> f64 {
        self.mandel.norm()
    }

    /// Frobenius inner product.
    pub fn dot(&self, other: &SymTensor2) -> f64 {
        self.mandel.dot(&other.mandel)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim.n()).map(|i| self.mandel[i]).sum()
    }
}

/// A fourth-order elasticity tensor with minor and major symmetries, stored as
/// a symmetric m×m matrix in the Mandel basis. Minor symmetries are structural:
/// the representation cannot encode their violation.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticityTensor {
    dim: Dim,
    mandel: DMatrix<f64>,
}

impl ElasticityTensor {
    /// Builds from an m×m Mandel matrix; asymmetry beyond `1e-12·‖·‖_F` is rejected.
    pub fn from_mandel_matrix(dim: Dim, mandel: DMatrix<f64>) -> Result<Self> {
        let m = dim.mandel_len();
        if mandel.nrows() != m || mandel.ncols() != m {
            return Err(Error::DimensionMismatch { expected: m, found: mandel.nrows() });
        }
        let tolerance = 1e-12 * mandel.norm().max(1.0);
        let mut max_asym = 0.0_f64;
        for i in 0..m {
            for j in (i + 1)..m {
                max_asym = max_asym.max((mandel[(i, j)] - mandel[(j, i)]).abs());
            }
        }
        if max_asym > tolerance {
            return Err(Error::NotSymmetric { max_asymmetry: max_asym, tolerance });
        }
        Ok(ElasticityTensor { dim, mandel })
    }

    /// Builds from a Mandel matrix that is symmetric only up to `tol`, storing
    /// the symmetric part. Returns the tensor and the measured asymmetry.
    /// Used for solver output, where major symmetry holds to solver tolerance.
    pub fn from_mandel_symmetrized(dim: Dim, mandel: DMatrix<f64>, tol: f64) -> Result<(Self, f64)> {
        let m = dim.mandel_len();
        if mandel.nrows() != m || mandel.ncols() != m {
            return Err(Error::DimensionMismatch { expected: m, found: mandel.nrows() });
        }
        let asym = (&mandel - mandel.transpose()).norm() / mandel.norm().max(1e-300);
        if asym > tol {
            return Err(Error::NotSymmetric { max_asymmetry: asym, tolerance: tol });
        }
        let sym = (&mandel + mandel.transpose()) * 0.5;
        Ok((ElasticityTensor { dim, mandel: sym }, asym))
    }

    /// Isotropic tensor with Lamé parameters: `C E = 2μE + λ(tr E)I`.
    pub fn isotropic(lambda: f64, mu: f64, dim: Dim) -> Self {
        let n = dim.n();
        let m = dim.mandel_len();
        let mut c = DMatrix::zeros(m, m);
        for i in 0..n {
            for j in 0..n {
                c[(i, j)] += lambda;
            }
            c[(i, i)] += 2.0 * mu;
        }
        for k in n..m {
            c[(k, k)] = 2.0 * mu;
        }
        ElasticityTensor { dim, mandel: c }
    }

    /// Cubic tensor (3D) from the three classical constants. In the Mandel
    /// basis the shear diagonal carries 2·c44.
    pub fn cubic(c11: f64, c12: f64, c44: f64) -> Self {
        let mut c = DMatrix::zeros(6, 6);
        for i in 0..3 {
            for j in 0..3 {
                c[(i, j)] = if i == j { c11 } else { c12 };
            }
        }
        for k in 3..6 {
            c[(k, k)] = 2.0 * c44;
        }
        ElasticityTensor { dim: Dim::D3, mandel: c }
    }

    /// Transversely isotropic tensor about `axis` (3D), parameterized by the
    /// five constants of the tensor expressed about e₃:
    /// c11 (= c22), c33, c12, c13 (= c23), c44 (out-of-plane shear).
    /// The in-plane shear modulus is forced to (c11 − c12)/2.
    pub fn transverse_isotropic(
        c11: f64,
        c33: f64,
        c12: f64,
        c13: f64,
        c44: f64,
        axis: &DVector<f64>,
    ) -> Result<Self> {
        let mut c = DMatrix::zeros(6, 6);
        c[(0, 0)] = c11;
        c[(1, 1)] = c11;
        c[(2, 2)] = c33;
        c[(0, 1)] = c12;
        c[(1, 0)] = c12;
        c[(0, 2)] = c13;
        c[(2, 0)] = c13;
        c[(1, 2)] = c13;
        c[(2, 1)] = c13;
        c[(3, 3)] = 2.0 * c44;
        c[(4, 4)] = 2.0 * c44;
        c[(5, 5)] = c11 - c12; // Mandel scaling of (c11 - c12)/2
        let about_e3 = ElasticityTensor { dim: Dim::D3, mandel: c };
        if axis.len() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: axis.len() });
        }
        let e3 = DVector::from_column_slice(&[0.0, 0.0, 1.0]);
        if (axis - &e3).norm() <= 1e-14 {
            return Ok(about_e3);
        }
        // Rotate e₃ onto the requested axis and conjugate.
        let rot = UnimodularMap::rotation_between(&e3, axis)?;
        about_e3.conjugate(&rot)
    }

    /// Elasticity tensor of a material that is fluid in the plane orthogonal
    /// to e₃ (3D): the Hessian of the energy `W(E) = a·E₃₃² + b·det(E_p)`,
    /// where E_p is the in-plane block. Indefinite for b ≠ 0 and singular on
    /// the out-of-plane shears.
    pub fn in_plane_fluid(a: f64, b: f64) -> Self {
        // W = a·v₃² + b·(v₁v₂ − v₆²/2) in Mandel coordinates; C = ∂²W/∂E².
        let mut c = DMatrix::zeros(6, 6);
        c[(2, 2)] = 2.0 * a;
        c[(0, 1)] = b;
        c[(1, 0)] = b;
        c[(5, 5)] = -b;
        ElasticityTensor { dim: Dim::D3, mandel: c }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn mandel_matrix(&self) -> &DMatrix<f64> {
        &self.mandel
    }

    /// Frobenius norm of the Mandel matrix.
    pub fn norm(&self) -> f64 {
        self.mandel.norm()
    }

    /// Applies the tensor to a symmetric strain: a Mandel matrix–vector product.
    pub fn apply(&self, e: &SymTensor2) -> Result<SymTensor2> {
        if e.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim.n(),
                found: e.dim.n(),
            });
        }
        Ok(SymTensor2 {
            dim: self.dim,
            mandel: &self.mandel * &e.mandel,
        })
    }

    /// Component C_ijkl of the full fourth-order tensor (minor symmetries
    /// reconstructed from the Mandel representation).
    pub fn component(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let pairs = self.dim.mandel_pairs();
        let locate = |a: usize, b: usize| -> usize {
            let (p, q) = if a <= b { (a, b) } else { (b, a) };
            pairs.iter().position(|&x| x == (p, q)).expect("index in range")
        };
        let alpha = locate(i, j);
        let beta = locate(k, l);
        let mut v = self.mandel[(alpha, beta)];
        if i != j {
            v /= SQRT_2;
        }
        if k != l {
            v /= SQRT_2;
        }
        v
    }

    /// Conjugation by a unimodular map: returns C_H with
    /// `C_H(E) = H [C(HᵀEH)] Hᵀ` for all symmetric E, realized as the Mandel
    /// congruence `Pᵀ C P` where P represents `E ↦ HᵀEH`. Major symmetry is
    /// preserved because `(PᵀCP)ᵀ = PᵀCᵀP`.
    pub fn conjugate(&self, h: &UnimodularMap) -> Result<Self> {
        if h.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim.n(),
                found: h.dim.n(),
            });
        }
        let p = h.strain_action();
        let conjugated = p.transpose() * &self.mandel * &p;
        Ok(ElasticityTensor { dim: self.dim, mandel: conjugated })
    }

    /// Relative symmetry residual `‖C − C_H‖_F / ‖C‖_F`; zero exactly when H
    /// is a material symmetry of C.
    pub fn sym_residual(&self, h: &UnimodularMap) -> Result<f64> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::ZeroTensor);
        }
        let conj = self.conjugate(h)?;
        Ok((&self.mandel - &conj.mandel).norm() / norm)
    }

    /// Coercivity margin: the smallest eigenvalue of the Mandel matrix. Since
    /// the Mandel inner product is the Frobenius inner product, this equals
    /// the best constant α with `α|E|² ≤ E·CE`. Negative values are valid
    /// returns and mean the material is not coercive.
    pub fn coercivity_margin(&self) -> f64 {
        let eig = self.mandel.clone().symmetric_eigenvalues();
        eig.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Mandel-matrix inverse, used for the Reuss bound.
    pub fn inverse(&self) -> Option<Self> {
        self.mandel.clone().try_inverse().map(|inv| ElasticityTensor {
            dim: self.dim,
            mandel: inv,
        })
    }
}

/// A volume-preserving linear map: |det H| = 1 within 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct UnimodularMap {
    dim: Dim,
    matrix: DMatrix<f64>,
}

impl UnimodularMap {
    /// Validates |det| − 1| ≤ 1e-12 and wraps the matrix.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.ncols() });
        }
        let dim = Dim::from_n(n)?;
        let det_abs = matrix.determinant().abs();
        if (det_abs - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnimodular { det_abs });
        }
        Ok(UnimodularMap { dim, matrix })
    }

    pub fn identity(dim: Dim) -> Self {
        UnimodularMap {
            dim,
            matrix: DMatrix::identity(dim.n(), dim.n()),
        }
    }

    /// −I (central inversion).
    pub fn inversion(dim: Dim) -> Self {
        UnimodularMap {
            dim,
            matrix: -DMatrix::identity(dim.n(), dim.n()),
        }
    }

    /// Right-handed rotation through `phi` about the unit vector `axis` (3D),
    /// by the Rodrigues construction.
    pub fn rotation_about_axis(axis: &DVector<f64>, phi: f64) -> Result<Self> {
        if axis.len() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: axis.len() });
        }
        let norm = axis.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnitAxis { norm });
        }
        let (a1, a2, a3) = (axis[0], axis[1], axis[2]);
        let cross = DMatrix::from_row_slice(3, 3, &[0.0, -a3, a2, a3, 0.0, -a1, -a2, a1, 0.0]);
        let outer = axis * axis.transpose();
        let eye = DMatrix::identity(3, 3);
        let matrix = eye * phi.cos() + cross * phi.sin() + outer * (1.0 - phi.cos());
        Ok(UnimodularMap { dim: Dim::D3, matrix })
    }

    /// Planar rotation through `phi` (2D).
    pub fn rotation_2d(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        UnimodularMap {
            dim: Dim::D2,
            matrix: DMatrix::from_row_slice(2, 2, &[c, -s, s, c]),
        }
    }

    /// Reflection with respect to the plane (line in 2D) through the origin
    /// with unit normal `a`: `I − 2aaᵀ`. In 3D this equals −R^π_a.
    pub fn reflection(axis: &DVector<f64>) -> Result<Self> {
        let n = axis.len();
        let dim = Dim::from_n(n)?;
        let norm = axis.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnitAxis { norm });
        }
        let matrix = DMatrix::identity(n, n) - 2.0 * (axis * axis.transpose());
        Ok(UnimodularMap { dim, matrix })
    }

    /// Exact half turn (rotation by π) about coordinate axis `axis` (3D).
    pub fn half_turn(axis: usize) -> Self {
        let mut m = -DMatrix::identity(3, 3);
        m[(axis, axis)] = 1.0;
        UnimodularMap { dim: Dim::D3, matrix: m }
    }

    /// Exact quarter turn (rotation by π/2) about coordinate axis `axis` (3D).
    /// Entries are exactly 0 and ±1, so conjugation by this map is an exact
    /// signed permutation in floating point.
    pub fn quarter_turn(axis: usize) -> Self {
        let m = match axis {
            0 => DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0]),
            1 => DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0]),
            2 => DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
            _ => panic!("axis index out of range"),
        };
        UnimodularMap { dim: Dim::D3, matrix: m }
    }

    /// Exact reflection across the plane with normal along coordinate axis
    /// `axis` (= −R^π there); works in 2D and 3D.
    pub fn axis_reflection(dim: Dim, axis: usize) -> Self {
        let n = dim.n();
        assert!(axis < n, "axis index out of range");
        let mut m = DMatrix::identity(n, n);
        m[(axis, axis)] = -1.0;
        UnimodularMap { dim, matrix: m }
    }

    /// Exact three-fold rotation about the cube diagonal (1,1,1)/√3: the
    /// cyclic coordinate permutation e₁→e₂→e₃→e₁.
    pub fn cube_diagonal_turn() -> Self {
        let m = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        UnimodularMap { dim: Dim::D3, matrix: m }
    }

    /// Rotation carrying unit vector `from` onto unit vector `to` (3D).
    pub fn rotation_between(from: &DVector<f64>, to: &DVector<f64>) -> Result<Self> {
        for v in [from, to] {
            if (v.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::NotUnitAxis { norm: v.norm() });
            }
        }
        let cos = from.dot(to).clamp(-1.0, 1.0);
        if cos > 1.0 - 1e-14 {
            return Ok(Self::identity(Dim::D3));
        }
        if cos < -1.0 + 1e-14 {
            // Opposite vectors: rotate by π about any axis orthogonal to `from`.
            let pick = if from[0].abs() < 0.9 {
                DVector::from_column_slice(&[1.0, 0.0, 0.0])
            } else {
                DVector::from_column_slice(&[0.0, 1.0, 0.0])
            };
            let mut axis = &pick - from * from.dot(&pick);
            axis /= axis.norm();
            return Self::rotation_about_axis(&axis, std::f64::consts::PI);
        }
        let mut axis = DVector::zeros(3);
        axis[0] = from[1] * to[2] - from[2] * to[1];
        axis[1] = from[2] * to[0] - from[0] * to[2];
        axis[2] = from[0] * to[1] - from[1] * to[0];
        let angle = axis.norm().atan2(cos);
        axis /= axis.norm();
        Self::rotation_about_axis(&axis, angle)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn inverse(&self) -> Self {
        let inv = self
            .matrix
            .clone()
            .try_inverse()
            .expect("unimodular maps are invertible");
        UnimodularMap { dim: self.dim, matrix: inv }
    }

    pub fn compose(&self, other: &UnimodularMap) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim.n(),
                found: other.dim.n(),
            });
        }
        Ok(UnimodularMap {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// Whether HᵀH = I within `tol`.
    pub fn is_orthogonal(&self, tol: f64) -> bool {
        let n = self.dim.n();
        let gram = self.matrix.transpose() * &self.matrix;
        (gram - DMatrix::identity(n, n)).norm() <= tol
    }

    /// The m×m Mandel matrix P of the strain action `E ↦ HᵀEH`.
    ///
    /// Entries are evaluated analytically from the components of H, so maps
    /// with 0/±1 entries produce exact signed permutations. For Mandel pairs
    /// α=(p,q), β=(r,s):
    ///
    /// ```text
    /// P[αβ] = H_rp H_rq                      (p = q, r = s)
    ///       = √2 · H_rp H_sp                 (p = q, r < s)
    ///       = √2 · H_rp H_rq                 (p < q, r = s)
    ///       = H_rp H_sq + H_sp H_rq          (p < q, r < s)
    /// ```
    pub fn strain_action(&self) -> DMatrix<f64> {
        let dim = self.dim;
        let pairs = dim.mandel_pairs();
        let m = dim.mandel_len();
        let h = &self.matrix;
        let mut p = DMatrix::zeros(m, m);
        for (alpha, &(pp, qq)) in pairs.iter().enumerate() {
            for (beta, &(rr, ss)) in pairs.iter().enumerate() {
                p[(alpha, beta)] = match (pp == qq, rr == ss) {
                    (true, true) => h[(rr, pp)] * h[(rr, pp)],
                    (true, false) => SQRT_2 * h[(rr, pp)] * h[(ss, pp)],
                    (false, true) => SQRT_2 * h[(rr, pp)] * h[(rr, qq)],
                    (false, false) => h[(rr, pp)] * h[(ss, qq)] + h[(ss, pp)] * h[(rr, qq)],
                };
            }
        }
        p
    }

    /// Applies the map to a vector.
    pub fn apply_vec(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }
}

/// JSON wire format for elasticity tensors: `{"dim": n, "mandel": [[...]]}`
/// with the row-major m×m Mandel matrix.
#[derive(Serialize, Deserialize)]
struct TensorWire {
    dim: usize,
    mandel: Vec<Vec<f64>>,
}

impl Serialize for ElasticityTensor {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let m = self.dim.mandel_len();
        let rows = (0..m)
            .map(|i| (0..m).map(|j| self.mandel[(i, j)]).collect())
            .collect();
        TensorWire { dim: self.dim.n(), mandel: rows }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ElasticityTensor {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let wire = TensorWire::deserialize(deserializer)?;
        let dim = Dim::from_n(wire.dim).map_err(D::Error::custom)?;
        let m = dim.mandel_len();
        if wire.mandel.len() != m || wire.mandel.iter().any(|row| row.len() != m) {
            return Err(D::Error::custom(format!("mandel matrix must be {m}x{m}")));
        }
        let flat: Vec<f64> = wire.mandel.into_iter().flatten().collect();
        let matrix = DMatrix::from_row_slice(m, m, &flat);
        ElasticityTensor::from_mandel_matrix(dim, matrix).map_err(D::Error::custom)
    }
}
