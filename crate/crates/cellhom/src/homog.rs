//! Assembly of the macroscopic elasticity tensor from cell solutions,
//! classical Voigt/Reuss bounds, macroscopic symmetry checks, and the
//! first-order transport analogue.
//!
//! The macroscopic tensor is built column by column: for each Mandel basis
//! strain E_k the cell problem is solved and the k-th column is the Mandel
//! vector of the averaged flux `⨍ ℂ(y)[E_k + ∇w] dy`, evaluated with the
//! same quadrature as the solve so the discrete energy identities (major
//! symmetry, Voigt–Reuss sandwich) hold to solver tolerance.

use crate::cell::{Cell, UnitCell};
use crate::error::{Error, Result};
use crate::solver::{fe, CellOperator, SolverOptions};
use crate::tensor::{
    classify, generator_catalog, Classification, Dim, ElasticityTensor, SymTensor2, SymmetryClass,
    UnimodularMap,
};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Per-load-case solver statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveStats {
    pub case: String,
    pub iterations: usize,
    pub residual: f64,
}

/// One symmetry candidate of the macroscopic report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MacroCandidate {
    pub label: String,
    #[serde(rename = "H")]
    pub h: Vec<Vec<f64>>,
    pub residual: f64,
    pub pass: bool,
}

/// Residual table plus classification of the macroscopic tensor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MacroSymmetryReport {
    pub candidates: Vec<MacroCandidate>,
    pub class: SymmetryClass,
    pub ambiguous_with: Vec<SymmetryClass>,
}

/// The homogenization result: macroscopic tensor, bounds, solver stats, and
/// the optional symmetry analysis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EffectiveTensorReport {
    #[serde(rename = "C0")]
    pub c0: ElasticityTensor,
    pub voigt: ElasticityTensor,
    /// Inverse of the averaged inverse; absent when a material margin is
    /// below 1e-12 (the bound would be numerically meaningless).
    pub reuss: Option<ElasticityTensor>,
    pub solves: Vec<SolveStats>,
    /// Relative asymmetry of the raw Mandel matrix before symmetrization.
    pub asymmetry: f64,
    pub symmetry: Option<MacroSymmetryReport>,
}

/// Options for [`effective_tensor`].
#[derive(Debug, Clone)]
pub struct HomogenizeOptions {
    pub solver: SolverOptions,
    /// Evaluate the generator catalog on C⁰ and classify it.
    pub with_symmetry: bool,
    /// Residual threshold for the symmetry table and classification.
    pub symmetry_tol: f64,
}

impl Default for HomogenizeOptions {
    fn default() -> Self {
        HomogenizeOptions {
            solver: SolverOptions::default(),
            with_symmetry: true,
            symmetry_tol: 1e-6,
        }
    }
}

/// Mandel basis load labels, e.g. `E11`, `E23`.
fn case_label(dim: Dim, k: usize) -> String {
    let (i, j) = dim.mandel_pairs()[k];
    format!("E{}{}", i + 1, j + 1)
}

/// Computes the macroscopic elasticity tensor of a coercive cell by solving
/// one cell problem per Mandel basis strain.
pub fn effective_tensor(cell: &UnitCell, options: &HomogenizeOptions) -> Result<EffectiveTensorReport> {
    let dim = Dim::from_n(cell.dim())?;
    let m = dim.mandel_len();
    let op = CellOperator::new(cell, options.solver.clone())?;

    let mut raw = DMatrix::zeros(m, m);
    let mut solves = Vec::with_capacity(m);
    for k in 0..m {
        let load = SymTensor2::basis(dim, k);
        let sol = op.solve(&load).map_err(|e| match e {
            Error::NonConvergence { iterations, residual } => Error::NonConvergence {
                iterations,
                residual,
            },
            other => other,
        })?;
        let flux = op.average_flux(&load, &sol)?;
        raw.set_column(k, flux.mandel());
        solves.push(SolveStats {
            case: case_label(dim, k),
            iterations: sol.iterations,
            residual: sol.achieved_residual,
        });
    }

    // Major symmetry of C⁰ holds to solver tolerance; symmetrize within a
    // generous gate and report the measured asymmetry.
    let gate = (100.0 * options.solver.cg_tol).max(1e-12);
    let (c0, asymmetry) = ElasticityTensor::from_mandel_symmetrized(dim, raw, gate)?;

    let voigt = voigt_average(cell)?;
    let reuss = reuss_average(cell)?;

    let symmetry = if options.with_symmetry {
        Some(macro_symmetry_report(&c0, options.symmetry_tol)?)
    } else {
        None
    };

    Ok(EffectiveTensorReport { c0, voigt, reuss, solves, asymmetry, symmetry })
}

/// Volume average of the material field (the Voigt bound).
pub fn voigt_average(cell: &UnitCell) -> Result<ElasticityTensor> {
    let dim = Dim::from_n(cell.dim())?;
    let m = dim.mandel_len();
    let fractions = cell.volume_fractions();
    let mut acc = DMatrix::zeros(m, m);
    for (frac, (_, c)) in fractions.iter().zip(cell.materials()) {
        acc += c.mandel_matrix() * *frac;
    }
    ElasticityTensor::from_mandel_matrix(dim, acc)
}

/// Inverse of the volume-averaged inverse (the Reuss bound). Returns `None`
/// when any material's coercivity margin is below 1e-12.
pub fn reuss_average(cell: &UnitCell) -> Result<Option<ElasticityTensor>> {
    let dim = Dim::from_n(cell.dim())?;
    let m = dim.mandel_len();
    let fractions = cell.volume_fractions();
    let mut acc = DMatrix::zeros(m, m);
    for (frac, (_, c)) in fractions.iter().zip(cell.materials()) {
        if c.coercivity_margin() < 1e-12 {
            return Ok(None);
        }
        let inv = c.inverse().expect("margin checked above");
        acc += inv.mandel_matrix() * *frac;
    }
    let inv = acc.try_inverse().ok_or_else(|| Error::InvalidConfig {
        reason: "averaged compliance is singular".into(),
    })?;
    Ok(Some(ElasticityTensor::from_mandel_matrix(dim, inv)?))
}

/// Smallest eigenvalue of `a − b` in the Mandel representation; nonnegative
/// (to tolerance) when `a` dominates `b` in quadratic-form order.
pub fn ordering_margin(a: &ElasticityTensor, b: &ElasticityTensor) -> f64 {
    let diff = a.mandel_matrix() - b.mandel_matrix();
    let sym = (&diff + diff.transpose()) * 0.5;
    sym.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Result of a single macroscopic symmetry check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MacroCheck {
    pub residual: f64,
    pub pass: bool,
}

/// Checks whether H is a material symmetry of the macroscopic tensor.
pub fn check_macro_symmetry(c0: &ElasticityTensor, h: &UnimodularMap, tol: f64) -> Result<MacroCheck> {
    let residual = c0.sym_residual(h)?;
    Ok(MacroCheck { residual, pass: residual <= tol })
}

/// Classifies the macroscopic tensor against the generator catalog.
pub fn classify_macro(c0: &ElasticityTensor, tol: f64) -> Result<Classification> {
    classify(c0, tol)
}

fn macro_symmetry_report(c0: &ElasticityTensor, tol: f64) -> Result<MacroSymmetryReport> {
    let classification = classify(c0, tol)?;
    let catalog = generator_catalog(c0.dim());
    let n = c0.dim().n();
    let candidates = catalog
        .into_iter()
        .zip(&classification.residuals)
        .map(|((label, map), entry)| MacroCandidate {
            label,
            h: (0..n)
                .map(|i| (0..n).map(|j| map.matrix()[(i, j)]).collect())
                .collect(),
            residual: entry.residual,
            pass: entry.pass,
        })
        .collect();
    Ok(MacroSymmetryReport {
        candidates,
        class: classification.class,
        ambiguous_with: classification.ambiguous_with,
    })
}

/// CSV export of the Mandel matrix: m rows, 17 significant digits, row-major.
pub fn mandel_csv(c: &ElasticityTensor) -> String {
    let m = c.dim().mandel_len();
    let mut out = String::new();
    for i in 0..m {
        let row: Vec<String> = (0..m).map(|j| format!("{:.16e}", c.mandel_matrix()[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// First-order transport
// ---------------------------------------------------------------------------

/// Symmetric positive-definite mobility tensor of a first-order transport
/// law (diffusion, heat conduction, dielectric induction).
#[derive(Debug, Clone, PartialEq)]
pub struct Mobility {
    matrix: DMatrix<f64>,
}

impl Mobility {
    /// Validates symmetry and positive-definiteness; the error payload is
    /// the offending margin (smallest eigenvalue, or −asymmetry).
    pub fn new(matrix: DMatrix<f64>) -> std::result::Result<Self, f64> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(f64::NEG_INFINITY);
        }
        let asym = (&matrix - matrix.transpose()).norm();
        if asym > 1e-12 * matrix.norm().max(1.0) {
            return Err(-asym);
        }
        let sym = (&matrix + matrix.transpose()) * 0.5;
        let min_eig = sym
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig <= 0.0 {
            return Err(min_eig);
        }
        Ok(Mobility { matrix: sym })
    }

    /// Isotropic mobility `m·I`.
    pub fn scalar(dim: Dim, m: f64) -> std::result::Result<Self, f64> {
        Mobility::new(DMatrix::identity(dim.n(), dim.n()) * m)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// A periodic structure carrying mobilities instead of elasticity tensors.
pub type MobilityCell = Cell<Mobility>;

/// Macroscopic mobility report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransportReport {
    /// Row-major macroscopic mobility matrix.
    #[serde(rename = "M0")]
    pub m0: Vec<Vec<f64>>,
    pub solves: Vec<SolveStats>,
    pub asymmetry: f64,
}

impl TransportReport {
    pub fn m0_matrix(&self) -> DMatrix<f64> {
        let n = self.m0.len();
        let flat: Vec<f64> = self.m0.iter().flatten().copied().collect();
        DMatrix::from_row_slice(n, n, &flat)
    }
}

/// Macroscopic symmetry residual for second-order conjugation:
/// `‖M − H M Hᵀ‖_F / ‖M‖_F`.
pub fn transport_sym_residual(m0: &DMatrix<f64>, h: &UnimodularMap) -> f64 {
    let conj = h.matrix() * m0 * h.matrix().transpose();
    (m0 - conj).norm() / m0.norm().max(1e-300)
}

/// Solves the scalar cell problems `∫ M(y)(eⱼ + ∇χʲ)·∇v dy = 0` for each
/// basis direction and averages the fluxes into the macroscopic mobility:
/// `M⁰ᵢⱼ = ⨍ M(∇χʲ + eⱼ)·eᵢ dy`. Same elements, quadrature, and conjugate
/// gradients as the elastic solver, with scalar nodal unknowns.
pub fn effective_transport(cell: &MobilityCell, options: &SolverOptions) -> Result<TransportReport> {
    if !(options.cg_tol > 0.0 && options.cg_tol < 1.0) {
        return Err(Error::InvalidConfig {
            reason: format!("cg_tol {} outside (0,1)", options.cg_tol),
        });
    }
    let dim = cell.dim();
    for (name, m) in cell.materials() {
        if m.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: m.dim() });
        }
        let _ = name;
    }
    let grid = fe::PeriodicGrid::new(cell.grid());
    let plan = fe::GatherPlan::new(&grid);

    let mut j = cell.lattice().basis().clone();
    for (col, &n) in cell.grid().iter().enumerate() {
        let scaled = j.column(col) / n as f64;
        j.set_column(col, &scaled);
    }
    let det_j = j.determinant().abs();
    let j_inv_t = j.clone().try_inverse().expect("lattice nonsingular").transpose();
    let grads = fe::physical_gradients(&grid, &j_inv_t);
    let quad_w = grid.quad_weight();
    let corners = grid.corners();

    let ke: Vec<Vec<f64>> = cell
        .materials()
        .iter()
        .map(|(_, m)| {
            let mut k = vec![0.0; corners * corners];
            for per_corner in &grads {
                for a in 0..corners {
                    let ma = m.matrix() * &per_corner[a];
                    for b in 0..corners {
                        k[a * corners + b] += quad_w * det_j * per_corner[b].dot(&ma);
                    }
                }
            }
            k
        })
        .collect();
    let family = fe::ElementFamily { ke, dofs: 1 };
    let diag = fe::gather_diagonal(&grid, &family, cell.index());
    let nnodes = grid.num_cells;
    let parallel = !options.deterministic;
    let max_iter = options
        .max_iter
        .unwrap_or_else(|| (10.0 * dim as f64 * (nnodes as f64).powf(1.0 / dim as f64)).ceil() as usize)
        .max(100);

    let volume = cell.lattice().volume();
    let mut m0 = DMatrix::zeros(dim, dim);
    let mut solves = Vec::with_capacity(dim);
    for dir in 0..dim {
        let e_dir = DVector::from_iterator(dim, (0..dim).map(|i| if i == dir { 1.0 } else { 0.0 }));
        let mut ge_scale = 0.0_f64;
        let ge: Vec<Vec<f64>> = cell
            .materials()
            .iter()
            .map(|(_, m)| {
                let flux = m.matrix() * &e_dir;
                let mut g = vec![0.0; corners];
                for per_corner in &grads {
                    for (l, grad_l) in per_corner.iter().enumerate() {
                        g[l] += quad_w * det_j * grad_l.dot(&flux);
                    }
                }
                let norm: f64 = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                ge_scale = ge_scale.max(norm);
                g
            })
            .collect();
        let mut b = vec![0.0; nnodes];
        fe::gather_rhs(&grid, 1, &plan, cell.index(), &ge, &mut b);
        for v in b.iter_mut() {
            *v = -*v;
        }
        let b_floor = 1e-12 * ge_scale * corners as f64 * (nnodes as f64).sqrt();
        let apply = |x: &[f64], y: &mut [f64]| {
            fe::gather_matvec(&grid, &family, &plan, cell.index(), x, y, parallel);
        };
        let result = fe::pcg(apply, &diag, &b, 1, options.cg_tol, max_iter, b_floor)
            .map_err(|(iterations, residual)| Error::NonConvergence { iterations, residual })?;

        // Average flux ⨍ M(∇χ + e_dir).
        let chi = &result.x;
        let mut acc = DVector::zeros(dim);
        let n = &grid.n;
        let mut coords = vec![0usize; dim];
        for e in 0..grid.num_cells {
            let mut rem = e;
            for jx in (0..dim).rev() {
                coords[jx] = rem % n[jx];
                rem /= n[jx];
            }
            let mut nodes = [0usize; 8];
            for l in 0..corners {
                let mut idx = 0usize;
                for jx in 0..dim {
                    let lj = (l >> (dim - 1 - jx)) & 1;
                    let c = coords[jx] + lj;
                    let c = if c == n[jx] { 0 } else { c };
                    idx = idx * n[jx] + c;
                }
                nodes[l] = idx;
            }
            let m = cell.material(cell.index()[e] as usize);
            for (q, per_corner) in grads.iter().enumerate() {
                let _ = q;
                let mut g = e_dir.clone();
                for (l, grad_l) in per_corner.iter().enumerate() {
                    g += grad_l * chi[nodes[l]];
                }
                acc += quad_w * det_j * (m.matrix() * g);
            }
        }
        m0.set_column(dir, &(acc / volume));
        solves.push(SolveStats {
            case: format!("e{}", dir + 1),
            iterations: result.iterations,
            residual: result.relative_residual,
        });
    }

    let asymmetry = (&m0 - m0.transpose()).norm() / m0.norm().max(1e-300);
    let gate = (100.0 * options.cg_tol).max(1e-12);
    if asymmetry > gate {
        return Err(Error::NotSymmetric { max_asymmetry: asymmetry, tolerance: gate });
    }
    let sym = (&m0 + m0.transpose()) * 0.5;
    Ok(TransportReport {
        m0: (0..dim).map(|i| (0..dim).map(|j| sym[(i, j)]).collect()).collect(),
        solves,
        asymmetry,
    })
}

/// Bilayer mobility cell on Y = (0,1)^dim with layers normal to the last
/// axis: scalar mobility `m1` on the lower half, `m2` on the upper half.
pub fn bilayer_mobility(dim: Dim, m1: f64, m2: f64, n: usize) -> Result<MobilityCell> {
    let d = dim.n();
    let materials = vec![
        (
            "m1".to_string(),
            Mobility::scalar(dim, m1).map_err(|margin| Error::NonSpdMobility {
                material: "m1".into(),
                margin,
            })?,
        ),
        (
            "m2".to_string(),
            Mobility::scalar(dim, m2).map_err(|margin| Error::NonSpdMobility {
                material: "m2".into(),
                margin,
            })?,
        ),
    ];
    let grid = vec![n; d];
    let nvox: usize = grid.iter().product();
    let mut index = Vec::with_capacity(nvox);
    for lin in 0..nvox {
        let last = lin % n;
        index.push(if last < n / 2 { 0u16 } else { 1u16 });
    }
    Cell::new(crate::cell::Lattice::unit(d), DVector::zeros(d), grid, materials, index)
}

/// 2D checkerboard mobility cell with scalar phases `m1`, `m2`.
pub fn checkerboard_mobility(m1: f64, m2: f64, n: usize) -> Result<MobilityCell> {
    if n % 2 != 0 {
        return Err(Error::IncompatibleResolution {
            example: "checkerboard2d".into(),
            reason: format!("grid extent {n} must be even"),
        });
    }
    let materials = vec![
        (
            "m1".to_string(),
            Mobility::scalar(Dim::D2, m1).map_err(|margin| Error::NonSpdMobility {
                material: "m1".into(),
                margin,
            })?,
        ),
        (
            "m2".to_string(),
            Mobility::scalar(Dim::D2, m2).map_err(|margin| Error::NonSpdMobility {
                material: "m2".into(),
                margin,
            })?,
        ),
    ];
    let mut index = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            index.push((((2 * i / n) + (2 * j / n)) % 2) as u16);
        }
    }
    Cell::new(
        crate::cell::Lattice::unit(2),
        DVector::zeros(2),
        vec![n, n],
        materials,
        index,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell::examples::{self, TwoPhase};
    use crate::cell::Lattice;

    fn constant_cell(c: ElasticityTensor, n: usize) -> UnitCell {
        let d = c.dim().n();
        Cell::new(
            Lattice::unit(d),
            DVector::zeros(d),
            vec![n; d],
            vec![("only".to_string(), c)],
            vec![0; n.pow(d as u32)],
        )
        .unwrap()
    }

    #[test]
    fn constant_material_reproduces_itself() {
        let c = ElasticityTensor::isotropic(1.3, 0.7, Dim::D3);
        let cell = constant_cell(c.clone(), 4);
        let report = effective_tensor(&cell, &HomogenizeOptions::default()).unwrap();
        let rel = (report.c0.mandel_matrix() - c.mandel_matrix()).norm() / c.norm();
        assert!(rel <= 1e-12, "relative error {rel}");
        assert_eq!(report.symmetry.as_ref().unwrap().class, SymmetryClass::Isotropic);
    }

    #[test]
    fn laminate_shear_moduli_match_means() {
        let cell = examples::laminate(0.5, 8, TwoPhase::default()).unwrap();
        let report = effective_tensor(&cell, &HomogenizeOptions::default()).unwrap();
        let c0 = report.c0.mandel_matrix();
        // Axial shear (13): Mandel diagonal is 2μ_eff with μ_eff the harmonic
        // mean 1.5; in-plane shear (12): arithmetic mean 2.0.
        assert!((c0[(4, 4)] - 3.0).abs() <= 1e-8, "axial {}", c0[(4, 4)]);
        assert!((c0[(5, 5)] - 4.0).abs() <= 1e-8, "in-plane {}", c0[(5, 5)]);
        // Same for the 23-shear by in-plane isotropy of the layering.
        assert!((c0[(3, 3)] - 3.0).abs() <= 1e-8);
        assert!(report.asymmetry <= 1e-9);
    }

    #[test]
    fn voigt_reuss_sandwich_on_laminate() {
        let cell = examples::laminate(0.5, 8, TwoPhase::default()).unwrap();
        let report = effective_tensor(&cell, &HomogenizeOptions::default()).unwrap();
        let scale = report.c0.norm();
        let upper = ordering_margin(&report.voigt, &report.c0);
        let lower = ordering_margin(&report.c0, report.reuss.as_ref().unwrap());
        assert!(upper >= -1e-9 * scale, "voigt margin {upper}");
        assert!(lower >= -1e-9 * scale, "reuss margin {lower}");
    }

    #[test]
    fn macro_symmetry_of_constant_isotropic_cell() {
        let c = ElasticityTensor::isotropic(1.0, 1.0, Dim::D3);
        let cell = constant_cell(c, 4);
        let report = effective_tensor(&cell, &HomogenizeOptions::default()).unwrap();
        let axis = DVector::from_column_slice(&[1.0, 2.0, 2.0]).normalize();
        let rot = UnimodularMap::rotation_about_axis(&axis, 0.7).unwrap();
        let check = check_macro_symmetry(&report.c0, &rot, 1e-12).unwrap();
        assert!(check.pass, "residual {}", check.residual);
    }

    #[test]
    fn csv_round_trips_to_17_digits() {
        let c = ElasticityTensor::cubic(3.0, 1.0, 0.9);
        let csv = mandel_csv(&c);
        let parsed: Vec<Vec<f64>> = csv
            .lines()
            .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
            .collect();
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(parsed[i][j], c.mandel_matrix()[(i, j)]);
            }
        }
    }

    #[test]
    fn constant_mobility_reproduces_itself() {
        let m = Mobility::new(DMatrix::from_row_slice(3, 3, &[
            2.0, 0.3, 0.0, //
            0.3, 1.5, 0.1, //
            0.0, 0.1, 1.0,
        ]))
        .unwrap();
        let cell: MobilityCell = Cell::new(
            Lattice::unit(3),
            DVector::zeros(3),
            vec![4, 4, 4],
            vec![("only".to_string(), m.clone())],
            vec![0; 64],
        )
        .unwrap();
        let report = effective_transport(&cell, &SolverOptions::default()).unwrap();
        let rel = (report.m0_matrix() - m.matrix()).norm() / m.matrix().norm();
        assert!(rel <= 1e-12, "relative error {rel}");
    }

    #[test]
    fn bilayer_mobility_series_parallel() {
        let cell = bilayer_mobility(Dim::D3, 1.0, 3.0, 8).unwrap();
        let report = effective_transport(&cell, &SolverOptions::default()).unwrap();
        let m0 = report.m0_matrix();
        assert!((m0[(2, 2)] - 1.5).abs() <= 1e-8, "series {}", m0[(2, 2)]);
        assert!((m0[(0, 0)] - 2.0).abs() <= 1e-8, "parallel {}", m0[(0, 0)]);
        assert!((m0[(1, 1)] - 2.0).abs() <= 1e-8);
    }

    #[test]
    fn non_spd_mobility_rejected() {
        assert!(Mobility::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -0.5])).is_err());
        assert!(Mobility::scalar(Dim::D2, 0.0).is_err());
    }

    #[test]
    fn report_json_has_contract_fields() {
        let cell = examples::laminate(0.5, 4, TwoPhase::default()).unwrap();
        let report = effective_tensor(&cell, &HomogenizeOptions::default()).unwrap();
        let value = serde_json::to_value(&report).unwrap();
        assert!(value.get("C0").is_some());
        assert!(value.get("voigt").is_some());
        assert!(value.get("reuss").is_some());
        assert!(value["solves"].as_array().unwrap().len() == 6);
        assert!(value["symmetry"]["candidates"].as_array().is_some());
        assert!(value["symmetry"]["class"].is_string());
    }
}
