//! Residual-threshold classification of elasticity tensors against a fixed
//! catalog of symmetry generators.
//!
//! The class lattice is the standard refinement order
//! triclinic ⊂ monoclinic ⊂ orthotropic ⊂ {tetragonal, trigonal}
//! ⊂ {cubic, transversely isotropic} ⊂ isotropic. A class passes when every
//! generator in its requirement set has residual ≤ tol; the most symmetric
//! passing class is reported, and incomparable ties are reported rather than
//! resolved.

use super::{Dim, ElasticityTensor, UnimodularMap};
use crate::error::Result;
use serde::{Deserialize, Serialize};

/// Golden angle in radians, used to sample rotations about e₃ at angles that
/// avoid every crystallographic multiple.
const GOLDEN_ANGLE: f64 = 2.399963229728653;

const SAMPLED_ANGLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryClass {
    Triclinic,
    Monoclinic,
    Orthotropic,
    Tetragonal,
    Trigonal,
    Cubic,
    TransverselyIsotropic,
    Isotropic,
}

impl std::fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            SymmetryClass::Triclinic => "triclinic",
            SymmetryClass::Monoclinic => "monoclinic",
            SymmetryClass::Orthotropic => "orthotropic",
            SymmetryClass::Tetragonal => "tetragonal",
            SymmetryClass::Trigonal => "trigonal",
            SymmetryClass::Cubic => "cubic",
            SymmetryClass::TransverselyIsotropic => "transversely_isotropic",
            SymmetryClass::Isotropic => "isotropic",
        };
        f.write_str(name)
    }
}

impl SymmetryClass {
    /// Strictly-less-symmetric-than relation of the class lattice.
    fn below(self, other: SymmetryClass) -> bool {
        use SymmetryClass::*;
        if self == other {
            return false;
        }
        match (self, other) {
            (Triclinic, _) => true,
            (Monoclinic, Triclinic) => false,
            (Monoclinic, _) => true,
            (Orthotropic, Tetragonal | Trigonal | Cubic | TransverselyIsotropic | Isotropic) => true,
            (Tetragonal | Trigonal, Cubic | TransverselyIsotropic | Isotropic) => true,
            (Cubic | TransverselyIsotropic, Isotropic) => true,
            _ => false,
        }
    }
}

/// One row of the residual table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub label: String,
    pub residual: f64,
    pub pass: bool,
}

/// Result of a classification run: the most symmetric passing class, the
/// incomparable ties if any, and the full residual table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Classification {
    pub class: SymmetryClass,
    /// Non-empty when two incomparable classes both pass; contains all
    /// maximal passing classes in that case (including `class`).
    pub ambiguous_with: Vec<SymmetryClass>,
    pub residuals: Vec<ResidualEntry>,
}

/// The fixed generator catalog used by [`classify`], as (label, map) pairs.
pub fn generator_catalog(dim: Dim) -> Vec<(String, UnimodularMap)> {
    let mut gens = Vec::new();
    let mut push = |label: &str, map: UnimodularMap| {
        gens.push((label.to_string(), map));
    };
    match dim {
        Dim::D3 => {
            push("inversion", UnimodularMap::inversion(Dim::D3));
            for axis in 0..3 {
                push(
                    &format!("reflection_e{}", axis + 1),
                    UnimodularMap::axis_reflection(Dim::D3, axis),
                );
            }
            for axis in 0..3 {
                push(&format!("quarter_turn_e{}", axis + 1), UnimodularMap::quarter_turn(axis));
            }
            push("cube_diagonal_turn", UnimodularMap::cube_diagonal_turn());
            let e3 = nalgebra::DVector::from_column_slice(&[0.0, 0.0, 1.0]);
            push(
                "hex_turn_e3",
                UnimodularMap::rotation_about_axis(&e3, std::f64::consts::PI / 3.0).unwrap(),
            );
            for k in 1..=SAMPLED_ANGLES {
                let theta = (k as f64 * GOLDEN_ANGLE) % std::f64::consts::TAU;
                push(
                    &format!("rot_e3_golden_{k}"),
                    UnimodularMap::rotation_about_axis(&e3, theta).unwrap(),
                );
            }
        }
        Dim::D2 => {
            push("inversion", UnimodularMap::inversion(Dim::D2));
            for axis in 0..2 {
                push(
                    &format!("reflection_e{}", axis + 1),
                    UnimodularMap::axis_reflection(Dim::D2, axis),
                );
            }
            push("quarter_turn", UnimodularMap::rotation_2d(std::f64::consts::FRAC_PI_2));
            push("hex_turn", UnimodularMap::rotation_2d(std::f64::consts::PI / 3.0));
            for k in 1..=SAMPLED_ANGLES {
                let theta = (k as f64 * GOLDEN_ANGLE) % std::f64::consts::TAU;
                push(&format!("rot_golden_{k}"), UnimodularMap::rotation_2d(theta));
            }
        }
    }
    gens
}

/// Evaluates the symmetry residual of `c` against the generator catalog and
/// returns the most symmetric class all of whose generators pass `tol`.
pub fn classify(c: &ElasticityTensor, tol: f64) -> Result<Classification> {
    assert!(tol > 0.0, "classification tolerance must be positive");
    let dim = c.dim();
    let gens = generator_catalog(dim);
    let mut residuals = Vec::with_capacity(gens.len());
    for (label, map) in &gens {
        let residual = c.sym_residual(map)?;
        residuals.push(ResidualEntry {
            label: label.clone(),
            residual,
            pass: residual <= tol,
        });
    }
    let pass = |label: &str| -> bool {
        residuals.iter().any(|r| r.label == label && r.pass)
    };

    use SymmetryClass::*;
    let mut passing = vec![Triclinic];
    match dim {
        Dim::D3 => {
            let refl: Vec<bool> = (1..=3).map(|i| pass(&format!("reflection_e{i}"))).collect();
            let quarters: Vec<bool> =
                (1..=3).map(|i| pass(&format!("quarter_turn_e{i}"))).collect();
            let ortho = refl.iter().all(|&b| b);
            let any_quarter = quarters.iter().any(|&b| b);
            let all_quarters = quarters.iter().all(|&b| b);
            let diag3 = pass("cube_diagonal_turn");
            let hex = pass("hex_turn_e3");
            let sampled = (1..=SAMPLED_ANGLES).all(|k| pass(&format!("rot_e3_golden_{k}")));

            if refl.iter().any(|&b| b) {
                passing.push(Monoclinic);
            }
            if ortho {
                passing.push(Orthotropic);
            }
            if ortho && any_quarter {
                passing.push(Tetragonal);
            }
            if diag3 {
                passing.push(Trigonal);
            }
            if ortho && all_quarters && diag3 {
                passing.push(Cubic);
            }
            if ortho && quarters[2] && hex && sampled {
                passing.push(TransverselyIsotropic);
            }
            if residuals.iter().all(|r| r.pass) {
                passing.push(Isotropic);
            }
        }
        Dim::D2 => {
            let refl: Vec<bool> = (1..=2).map(|i| pass(&format!("reflection_e{i}"))).collect();
            let ortho = refl.iter().all(|&b| b);
            if refl.iter().any(|&b| b) {
                passing.push(Monoclinic);
            }
            if ortho {
                passing.push(Orthotropic);
            }
            if ortho && pass("quarter_turn") {
                passing.push(Tetragonal);
            }
            if residuals.iter().all(|r| r.pass) {
                passing.push(Isotropic);
            }
        }
    }

    let maximal: Vec<SymmetryClass> = passing
        .iter()
        .copied()
        .filter(|&a| !passing.iter().any(|&b| a.below(b)))
        .collect();
    let class = maximal[0];
    let ambiguous_with = if maximal.len() > 1 { maximal } else { Vec::new() };
    Ok(Classification { class, ambiguous_with, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn isotropic_classifies_isotropic() {
        let c = ElasticityTensor::isotropic(1.0, 1.0, Dim::D3);
        let report = classify(&c, 1e-10).unwrap();
        assert_eq!(report.class, SymmetryClass::Isotropic);
        assert!(report.ambiguous_with.is_empty());
        assert!(report.residuals.iter().all(|r| r.residual <= 1e-14));
    }

    #[test]
    fn cubic_with_detuned_shear_is_cubic_not_isotropic() {
        // c44 ≠ (c11 − c12)/2, so rotations at generic angles fail.
        let c = ElasticityTensor::cubic(3.0, 1.0, 0.9);
        let report = classify(&c, 1e-8).unwrap();
        assert_eq!(report.class, SymmetryClass::Cubic);
        let golden = report
            .residuals
            .iter()
            .find(|r| r.label == "rot_e3_golden_1")
            .unwrap();
        assert!(golden.residual > 1e-8);
    }

    #[test]
    fn transverse_isotropic_classifies_hexagonal() {
        let e3 = DVector::from_column_slice(&[0.0, 0.0, 1.0]);
        let c = ElasticityTensor::transverse_isotropic(4.0, 6.0, 1.5, 1.1, 1.3, &e3).unwrap();
        let report = classify(&c, 1e-10).unwrap();
        assert_eq!(report.class, SymmetryClass::TransverselyIsotropic);
        for r in &report.residuals {
            if r.label.starts_with("rot_e3_golden") {
                assert!(r.residual <= 1e-12, "{}: {}", r.label, r.residual);
            }
        }
    }

    #[test]
    fn generic_symmetric_matrix_is_triclinic() {
        // Fixed fully anisotropic SPD matrix; every non-inversion generator fails.
        let a = DMatrix::from_row_slice(
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
        let c = ElasticityTensor::from_mandel_matrix(Dim::D3, a).unwrap();
        let report = classify(&c, 1e-6).unwrap();
        assert_eq!(report.class, SymmetryClass::Triclinic);
        for r in &report.residuals {
            if r.label != "inversion" {
                assert!(r.residual > 1e-6, "{} unexpectedly passes", r.label);
            }
        }
    }

    #[test]
    fn isotropic_2d() {
        let c = ElasticityTensor::isotropic(0.7, 1.3, Dim::D2);
        let report = classify(&c, 1e-10).unwrap();
        assert_eq!(report.class, SymmetryClass::Isotropic);
    }
}
