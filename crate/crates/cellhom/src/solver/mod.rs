//! Periodic cell-problem solver: for a macroscopic strain E, finds the
//! zero-mean periodic displacement fluctuation w with
//! `∫ ℂ(y)[E + ∇w]·∇v dy = 0` for every periodic test field v, using
//! multilinear elements on the voxel grid and preconditioned conjugate
//! gradients on the quotient space of fields modulo constants.

pub(crate) mod fe;

pub use fe::PeriodicGrid;

use crate::cell::UnitCell;
use crate::error::{Error, Result};
use crate::tensor::{Dim, SymTensor2};
use fe::{ElementFamily, GatherPlan};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Options shared by all solves on a cell.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Relative residual target for conjugate gradients.
    pub cg_tol: f64,
    /// Iteration cap; `None` uses `10 · dim · (∏Nᵢ)^{1/dim}`, floored at 100.
    pub max_iter: Option<usize>,
    /// Force serial loops. The gather design makes results identical with
    /// or without threads; the flag pins the execution path regardless.
    pub deterministic: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { cg_tol: 1e-10, max_iter: None, deterministic: false }
    }
}

impl SolverOptions {
    fn resolved_max_iter(&self, dim: usize, num_cells: usize) -> usize {
        self.max_iter.unwrap_or_else(|| {
            let mean = (num_cells as f64).powf(1.0 / dim as f64);
            ((10.0 * dim as f64 * mean).ceil() as usize).max(100)
        })
    }
}

/// A cell problem: one macroscopic strain load on one cell.
pub struct CellProblem<'a> {
    pub cell: &'a UnitCell,
    pub load: SymTensor2,
    pub options: SolverOptions,
}

impl CellProblem<'_> {
    pub fn solve(&self) -> Result<CellSolution> {
        CellOperator::new(self.cell, self.options.clone())?.solve(&self.load)
    }
}

/// Solves a single cell problem. For repeated loads on the same cell, build
/// a [`CellOperator`] once and reuse it.
pub fn solve_cell_problem(
    cell: &UnitCell,
    load: &SymTensor2,
    options: &SolverOptions,
) -> Result<CellSolution> {
    CellOperator::new(cell, options.clone())?.solve(load)
}

/// Periodic displacement fluctuation and its gradients.
#[derive(Debug, Clone)]
pub struct CellSolution {
    /// Nodal fluctuation, `num_nodes × dim` interleaved, zero mean per
    /// component; nodes are identified periodically (one per voxel corner).
    w: Vec<f64>,
    /// Per-element, per-quadrature-point gradient `∇w`, row-major dim×dim.
    grad: Vec<f64>,
    dim: usize,
    nq: usize,
    pub iterations: usize,
    pub achieved_residual: f64,
}

impl CellSolution {
    pub fn nodal(&self) -> &[f64] {
        &self.w
    }

    pub fn dofs_per_node(&self) -> usize {
        self.dim
    }

    pub fn num_quadrature_points(&self) -> usize {
        self.nq
    }

    /// Gradient `(∇w)_{rc} = ∂w_r/∂y_c` at one quadrature point.
    pub fn gradient(&self, element: usize, q: usize) -> DMatrix<f64> {
        let d = self.dim;
        let base = (element * self.nq + q) * d * d;
        DMatrix::from_row_slice(d, d, &self.grad[base..base + d * d])
    }

    /// Mean of the nodal field per component (diagnostic; ~0 by construction).
    pub fn component_means(&self) -> Vec<f64> {
        let nodes = self.w.len() / self.dim;
        (0..self.dim)
            .map(|c| self.w.iter().skip(c).step_by(self.dim).sum::<f64>() / nodes as f64)
            .collect()
    }
}

/// Per-material check of the well-posedness assumptions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaterialCheck {
    pub name: String,
    pub frobenius_norm: f64,
    pub coercivity_margin: f64,
}

/// Boundedness and coercivity report for a cell's material table. The
/// boundedness constant M is finite for any finite table; coercivity needs
/// every margin strictly positive. Major symmetry is structural in the
/// Mandel representation and minor symmetries cannot be violated by it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssumptionsReport {
    pub materials: Vec<MaterialCheck>,
    /// Largest Frobenius norm over the table (the boundedness constant).
    pub bound: f64,
    /// Smallest coercivity margin over the table (the best α).
    pub alpha: f64,
    pub major_symmetric: bool,
    pub pass: bool,
}

/// Checks boundedness, measurability (trivial for voxel fields), coercivity,
/// and symmetry of a cell's material table. Report-only: never errors.
pub fn validate_assumptions(cell: &UnitCell) -> AssumptionsReport {
    let materials: Vec<MaterialCheck> = cell
        .materials()
        .iter()
        .map(|(name, c)| MaterialCheck {
            name: name.clone(),
            frobenius_norm: c.norm(),
            coercivity_margin: c.coercivity_margin(),
        })
        .collect();
    let bound = materials.iter().map(|m| m.frobenius_norm).fold(0.0, f64::max);
    let alpha = materials
        .iter()
        .map(|m| m.coercivity_margin)
        .fold(f64::INFINITY, f64::min);
    AssumptionsReport { materials, bound, alpha, major_symmetric: true, pass: alpha > 0.0 }
}

/// The assembled (matrix-free) operator for one cell: per-material element
/// stiffness, Jacobi diagonal, and quadrature tables. Building it validates
/// coercivity; solving reuses everything across load cases.
pub struct CellOperator<'a> {
    cell: &'a UnitCell,
    options: SolverOptions,
    grid: PeriodicGrid,
    plan: GatherPlan,
    family: ElementFamily,
    diag: Vec<f64>,
    /// Physical shape gradients per quadrature point and corner.
    grads: Vec<Vec<DVector<f64>>>,
    /// Mandel strain-displacement matrix per quadrature point (m × nloc).
    b_mats: Vec<DMatrix<f64>>,
    det_j: f64,
    quad_w: f64,
}

impl<'a> CellOperator<'a> {
    pub fn new(cell: &'a UnitCell, options: SolverOptions) -> Result<Self> {
        if !(options.cg_tol > 0.0 && options.cg_tol < 1.0) {
            return Err(Error::InvalidConfig {
                reason: format!("cg_tol {} outside (0,1)", options.cg_tol),
            });
        }
        for (name, c) in cell.materials() {
            let margin = c.coercivity_margin();
            if margin <= 0.0 {
                return Err(Error::NonCoercive { material: name.clone(), margin });
            }
        }
        let dim = cell.dim();
        let dim_t = Dim::from_n(dim)?;
        let m = dim_t.mandel_len();
        let grid = PeriodicGrid::new(cell.grid());
        let plan = GatherPlan::new(&grid);

        // Constant element Jacobian J = B · diag(1/Nⱼ).
        let mut j = cell.lattice().basis().clone();
        for (col, &n) in cell.grid().iter().enumerate() {
            let scaled = j.column(col) / n as f64;
            j.set_column(col, &scaled);
        }
        let det_j = j.determinant().abs();
        let j_inv_t = j
            .clone()
            .try_inverse()
            .expect("lattice nonsingular")
            .transpose();
        let grads = fe::physical_gradients(&grid, &j_inv_t);
        let quad_w = grid.quad_weight();

        let corners = grid.corners();
        let nloc = corners * dim;
        let pairs = dim_t.mandel_pairs();
        let b_mats: Vec<DMatrix<f64>> = grads
            .iter()
            .map(|per_corner| {
                let mut b = DMatrix::zeros(m, nloc);
                for (l, g) in per_corner.iter().enumerate() {
                    for d in 0..dim {
                        let col = l * dim + d;
                        for (row, &(p, q)) in pairs.iter().enumerate() {
                            b[(row, col)] = if p == q {
                                if d == p {
                                    g[p]
                                } else {
                                    0.0
                                }
                            } else {
                                let mut v = 0.0;
                                if d == p {
                                    v += g[q];
                                }
                                if d == q {
                                    v += g[p];
                                }
                                v / crate::tensor::SQRT_2
                            };
                        }
                    }
                }
                b
            })
            .collect();

        let ke: Vec<Vec<f64>> = cell
            .materials()
            .iter()
            .map(|(_, c)| {
                let mut k = DMatrix::zeros(nloc, nloc);
                for b in &b_mats {
                    k += quad_w * det_j * b.transpose() * c.mandel_matrix() * b;
                }
                let mut flat = vec![0.0; nloc * nloc];
                for r in 0..nloc {
                    for cidx in 0..nloc {
                        flat[r * nloc + cidx] = k[(r, cidx)];
                    }
                }
                flat
            })
            .collect();
        let family = ElementFamily { ke, dofs: dim };
        let diag = fe::gather_diagonal(&grid, &family, cell.index());

        Ok(CellOperator {
            cell,
            options,
            grid,
            plan,
            family,
            diag,
            grads,
            b_mats,
            det_j,
            quad_w,
        })
    }

    pub fn cell(&self) -> &UnitCell {
        self.cell
    }

    pub fn num_quadrature_points(&self) -> usize {
        self.grid.corners()
    }

    /// Element volume factor |det J|.
    pub fn det_j(&self) -> f64 {
        self.det_j
    }

    pub fn quad_weight(&self) -> f64 {
        self.quad_w
    }

    /// Solves the cell problem for one macroscopic strain.
    pub fn solve(&self, load: &SymTensor2) -> Result<CellSolution> {
        let dim = self.cell.dim();
        if load.dim().n() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: load.dim().n() });
        }
        let corners = self.grid.corners();
        let nloc = corners * dim;

        // Per-material element load: ge = Σ_q w·|J|·Bᵀ(C·εE).
        let mut ge_scale = 0.0_f64;
        let ge: Vec<Vec<f64>> = self
            .cell
            .materials()
            .iter()
            .map(|(_, c)| {
                let sigma = c.mandel_matrix() * load.mandel();
                let mut g = DVector::zeros(nloc);
                for b in &self.b_mats {
                    g += self.quad_w * self.det_j * b.transpose() * &sigma;
                }
                ge_scale = ge_scale.max(g.norm());
                g.iter().copied().collect()
            })
            .collect();

        let nnodes = self.grid.num_cells;
        let ndof = nnodes * dim;
        let mut b = vec![0.0; ndof];
        fe::gather_rhs(&self.grid, dim, &self.plan, self.cell.index(), &ge, &mut b);
        for v in b.iter_mut() {
            *v = -*v;
        }

        // Loads that vanish identically (constant cells, zero strain) only
        // leave cancellation noise in b; skip the solve.
        let b_floor = 1e-12 * ge_scale * corners as f64 * (nnodes as f64).sqrt();

        let parallel = !self.options.deterministic;
        let apply = |x: &[f64], y: &mut [f64]| {
            fe::gather_matvec(
                &self.grid,
                &self.family,
                &self.plan,
                self.cell.index(),
                x,
                y,
                parallel,
            );
        };
        let max_iter = self.options.resolved_max_iter(dim, self.grid.num_cells);
        let result = fe::pcg(apply, &self.diag, &b, dim, self.options.cg_tol, max_iter, b_floor)
            .map_err(|(iterations, residual)| Error::NonConvergence { iterations, residual })?;

        let grad = self.gradients(&result.x);
        Ok(CellSolution {
            w: result.x,
            grad,
            dim,
            nq: corners,
            iterations: result.iterations,
            achieved_residual: result.relative_residual,
        })
    }

    /// Per-element, per-quadrature-point gradients of a nodal field.
    fn gradients(&self, w: &[f64]) -> Vec<f64> {
        let dim = self.cell.dim();
        let corners = self.grid.corners();
        let n = &self.grid.n;
        let nel = self.grid.num_cells;
        let mut grad = vec![0.0; nel * corners * dim * dim];
        let mut coords = vec![0usize; dim];
        for e in 0..nel {
            let mut rem = e;
            for j in (0..dim).rev() {
                coords[j] = rem % n[j];
                rem /= n[j];
            }
            // Corner node indices with periodic wrap.
            let mut nodes = [0usize; 8];
            for l in 0..corners {
                let mut idx = 0usize;
                for j in 0..dim {
                    let lj = (l >> (dim - 1 - j)) & 1;
                    let c = coords[j] + lj;
                    let c = if c == n[j] { 0 } else { c };
                    idx = idx * n[j] + c;
                }
                nodes[l] = idx;
            }
            for q in 0..corners {
                let base = (e * corners + q) * dim * dim;
                for l in 0..corners {
                    let g = &self.grads[q][l];
                    let wbase = nodes[l] * dim;
                    for r in 0..dim {
                        let wr = w[wbase + r];
                        for c in 0..dim {
                            grad[base + r * dim + c] += wr * g[c];
                        }
                    }
                }
            }
        }
        grad
    }

    /// The volume-averaged flux `⨍ ℂ(y)[E + ∇w] dy`, evaluated with the same
    /// quadrature as the solve.
    pub fn average_flux(&self, load: &SymTensor2, solution: &CellSolution) -> Result<SymTensor2> {
        let dim = self.cell.dim();
        let dim_t = Dim::from_n(dim)?;
        let m = dim_t.mandel_len();
        let corners = self.grid.corners();
        let mut acc = DVector::zeros(m);
        let index = self.cell.index();
        for e in 0..self.grid.num_cells {
            let c = self.cell.material(index[e] as usize);
            for q in 0..corners {
                let g = solution.gradient(e, q);
                let strain = SymTensor2::from_matrix(&((&g + g.transpose()) * 0.5))
                    .expect("symmetrized gradient");
                let total = load.mandel() + strain.mandel();
                acc += self.quad_w * self.det_j * c.mandel_matrix() * total;
            }
        }
        let volume = self.cell.lattice().volume();
        SymTensor2::from_mandel(dim_t, acc / volume)
    }
}
