//! The stacked matrix `M_S` and the commutant test on the adjoint side.
//!
//! A real matrix `L` commutes with `Ad_U` iff
//! `(I ⊗ Ad_U − Ad_{U†} ⊗ I) vec L = 0` (column-major `vec`), so the
//! commutant of `Ad_S` is the kernel of the vertical stack of these blocks.
//! It always contains `vec I`; the set can only be universal if that is all.

use std::collections::HashSet;

use nalgebra::DVector;
use rayon::prelude::*;
use thiserror::Error;

use crate::adjoint::adjoint_of;
use crate::linalg::{
    kernel_basis, kernel_dimension, unvectorize, vectorize, RealMatrix, UnitaryGate,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GateSetError {
    #[error("a gate set needs at least one gate")]
    Empty,
    #[error("gate {name:?} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("gate name {0:?} is used twice")]
    DuplicateName(String),
}

/// Nonempty, ordered list of same-dimension gates with unique names.
#[derive(Debug, Clone)]
pub struct GateSet {
    d: usize,
    gates: Vec<UnitaryGate>,
}

impl GateSet {
    pub fn new(gates: Vec<UnitaryGate>) -> Result<Self, GateSetError> {
        let d = gates.first().ok_or(GateSetError::Empty)?.dim();
        let mut seen = HashSet::new();
        for g in &gates {
            if g.dim() != d {
                return Err(GateSetError::DimensionMismatch {
                    name: g.name().to_owned(),
                    expected: d,
                    found: g.dim(),
                });
            }
            if !seen.insert(g.name()) {
                return Err(GateSetError::DuplicateName(g.name().to_owned()));
            }
        }
        Ok(Self { d, gates })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn gates(&self) -> &[UnitaryGate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// A new set with `gate` appended.
    pub fn with_gate(&self, gate: UnitaryGate) -> Result<Self, GateSetError> {
        let mut gates = self.gates.clone();
        gates.push(gate);
        Self::new(gates)
    }
}

fn kron(a: &RealMatrix, b: &RealMatrix) -> RealMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    RealMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

fn block(u: &UnitaryGate) -> RealMatrix {
    // gates in a GateSet are validated, so the adjoint cannot fail
    let ad = adjoint_of(u).expect("validated gate").into_matrix();
    let ad_inv = adjoint_of(&u.inverse())
        .expect("validated gate")
        .into_matrix();
    let n = ad.nrows();
    let eye = RealMatrix::identity(n, n);
    kron(&eye, &ad) - kron(&ad_inv, &eye)
}

/// `n(d²−1)² × (d²−1)²` stack of `I ⊗ Ad_{U_i} − Ad_{U_i†} ⊗ I`, in gate order.
pub fn build_ms(s: &GateSet) -> RealMatrix {
    let blocks: Vec<RealMatrix> = s.gates().par_iter().map(block).collect();
    let cols = blocks[0].ncols();
    let rows = blocks[0].nrows();
    let mut out = RealMatrix::zeros(rows * blocks.len(), cols);
    for (i, b) in blocks.iter().enumerate() {
        out.view_mut((i * rows, 0), (rows, cols)).copy_from(b);
    }
    out
}

#[derive(Debug, Clone)]
pub struct CommutantReport {
    pub kernel_dim: usize,
    pub trivial: bool,
    /// A non-scalar `L` commuting with every `Ad_{U_i}`, unit HS norm.
    pub witness: Option<RealMatrix>,
}

/// First test of the decision procedure: is the commutant of `Ad_S` just `ℝ·I`?
pub fn necessary_condition(s: &GateSet, tol_rank: f64) -> CommutantReport {
    let ms = build_ms(s);
    let kernel_dim = kernel_dimension(&ms, tol_rank);
    let trivial = kernel_dim == 1;
    let witness = if kernel_dim >= 2 {
        commutant_witness(&ms, tol_rank)
    } else {
        None
    };
    CommutantReport {
        kernel_dim,
        trivial,
        witness,
    }
}

fn commutant_witness(ms: &RealMatrix, tol_rank: f64) -> Option<RealMatrix> {
    let n = (ms.ncols() as f64).sqrt().round() as usize;
    let id = vectorize(&RealMatrix::identity(n, n)) / (n as f64).sqrt();
    // the kernel vector with the smallest overlap with vec I leaves the most after projection
    let best = kernel_basis(ms, tol_rank)
        .into_iter()
        .map(|v| {
            let r: DVector<f64> = &v - &id * id.dot(&v);
            r
        })
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))?;
    let norm = best.norm();
    if norm < 1e-6 {
        return None;
    }
    let mut w = best / norm;
    let pivot = w
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(0.0);
    if pivot < 0.0 {
        w = -w;
    }
    Some(unvectorize(&w, n, n))
}
