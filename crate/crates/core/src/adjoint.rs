//! Orthonormal bases of su(d) and the adjoint representation.
//!
//! The inner product on su(d) is `(X|Y) = −½ tr XY`. In an orthonormal basis
//! `{X_i}` the adjoint matrix has entries `(Ad_U)_ij = −½ tr(X_i U X_j U⁻¹)`,
//! which makes `U ↦ Ad_U` a homomorphism into SO(d²−1).
//!
//! Basis ordering is frozen:
//! - `d = 2`: `(Z, Y, X) = (−iσ₃, iσ₁, iσ₂)`, matching [`crate::su2geom`] so
//!   that `Ad_{U(φ,k)} = O(2φ, k)` holds entry for entry.
//! - `d ≥ 3`: `i` times the generalized Gell-Mann matrices, scaled to unit
//!   norm: symmetric off-diagonal pairs `(j, k)`, `j < k`, in row-major order,
//!   then the antisymmetric pairs in the same order, then the `d − 1` diagonal
//!   matrices.

use std::sync::{Arc, OnceLock};

use nalgebra::DVector;
use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{ComplexMatrix, LinalgError, RealMatrix, UnitaryGate};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdjointError {
    #[error("su(d) needs d >= 2, got {0}")]
    BadDimension(usize),
    #[error(transparent)]
    NotUnitary(#[from] LinalgError),
}

/// Orthonormal basis of su(d).
#[derive(Debug, Clone)]
pub struct SuBasis {
    d: usize,
    elements: Vec<ComplexMatrix>,
}

impl SuBasis {
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of basis elements, `d² − 1`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    /// Coordinates `(X_i | X)` of an element of su(d).
    pub fn coordinates(&self, x: &ComplexMatrix) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.elements.iter().map(|e| inner(e, x)))
    }

    /// `Σ c_i X_i`.
    pub fn combine(&self, coeffs: &DVector<f64>) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d, self.d);
        for (e, &w) in self.elements.iter().zip(coeffs.iter()) {
            out += e * Complex64::new(w, 0.0);
        }
        out
    }
}

/// `−½ tr XY`, real part.
pub fn inner(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    trace_product(x, y).re * -0.5
}

/// `tr(AB)` without forming the product.
fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

fn build_basis(d: usize) -> SuBasis {
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let mut elements = Vec::with_capacity(d * d - 1);
    if d == 2 {
        let z = ComplexMatrix::from_row_slice(2, 2, &[-i, 0.0 * one, 0.0 * one, i]);
        let y = ComplexMatrix::from_row_slice(2, 2, &[0.0 * one, i, i, 0.0 * one]);
        let x = ComplexMatrix::from_row_slice(2, 2, &[0.0 * one, one, -one, 0.0 * one]);
        elements.extend([z, y, x]);
        return SuBasis { d, elements };
    }
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|j| (j + 1..d).map(move |k| (j, k)))
        .collect();
    for &(j, k) in &pairs {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(j, k)] = i;
        m[(k, j)] = i;
        elements.push(m);
    }
    for &(j, k) in &pairs {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(j, k)] = one;
        m[(k, j)] = -one;
        elements.push(m);
    }
    for l in 1..d {
        let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut m = ComplexMatrix::zeros(d, d);
        for j in 0..l {
            m[(j, j)] = i * scale;
        }
        m[(l, l)] = i * (-(l as f64) * scale);
        elements.push(m);
    }
    SuBasis { d, elements }
}

const CACHED_DIMS: usize = 16;

/// The frozen orthonormal basis of su(d); cached for `d ≤ 16`.
pub fn su_basis(d: usize) -> Result<Arc<SuBasis>, AdjointError> {
    static CACHE: [OnceLock<Arc<SuBasis>>; CACHED_DIMS + 1] =
        [const { OnceLock::new() }; CACHED_DIMS + 1];
    if d < 2 {
        return Err(AdjointError::BadDimension(d));
    }
    if d <= CACHED_DIMS {
        return Ok(CACHE[d].get_or_init(|| Arc::new(build_basis(d))).clone());
    }
    Ok(Arc::new(build_basis(d)))
}

/// Real `(d²−1)×(d²−1)` matrix of `Ad_U` in the frozen basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointMatrix {
    d: usize,
    matrix: RealMatrix,
}

impl AdjointMatrix {
    pub(crate) fn from_matrix(d: usize, matrix: RealMatrix) -> Self {
        Self { d, matrix }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.matrix
    }

    /// `‖AᵀA − I‖_max`.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        (self.matrix.transpose() * &self.matrix - RealMatrix::identity(n, n))
            .abs()
            .max()
    }
}

/// `(Ad_U)_ij = −½ tr(X_i U X_j U†)`.
pub fn adjoint_of(u: &UnitaryGate) -> Result<AdjointMatrix, AdjointError> {
    let (unitarity, det) = u.deviations();
    if unitarity.is_nan()
        || det.is_nan()
        || unitarity > crate::linalg::TOL_UNITARY
        || det > crate::linalg::TOL_UNITARY
    {
        // re-run validation for the precise error
        UnitaryGate::new(u.name(), u.matrix().clone())?;
    }
    let d = u.dim();
    let basis = su_basis(d)?;
    let n = basis.len();
    let um = u.matrix();
    let u_dag = um.adjoint();
    let conj: Vec<ComplexMatrix> = basis.elements().iter().map(|x| um * x * &u_dag).collect();
    let matrix = RealMatrix::from_fn(n, n, |i, j| inner(&basis.elements()[i], &conj[j]));
    Ok(AdjointMatrix { d, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_special_unitary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gram_defect(b: &SuBasis) -> f64 {
        let mut worst = 0.0_f64;
        for (i, x) in b.elements().iter().enumerate() {
            for (j, y) in b.elements().iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((inner(x, y) - target).abs());
            }
        }
        worst
    }

    #[test]
    fn basis_sizes_and_orthonormality() {
        assert!(matches!(su_basis(1), Err(AdjointError::BadDimension(1))));
        for (d, n) in [(2, 3), (3, 8), (4, 15), (5, 24)] {
            let b = su_basis(d).unwrap();
            assert_eq!(b.len(), n);
            assert!(gram_defect(&b) < 1e-12, "d={d}");
            for x in b.elements() {
                let tr: Complex64 = (0..d).map(|k| x[(k, k)]).sum();
                assert!(tr.norm() < 1e-12);
                assert!((x + x.adjoint()).iter().all(|z| z.norm() < 1e-12));
            }
        }
    }

    #[test]
    fn su2_basis_is_z_y_x() {
        let b = su_basis(2).unwrap();
        let i = Complex64::new(0.0, 1.0);
        assert_eq!(b.elements()[0][(0, 0)], -i);
        assert_eq!(b.elements()[1][(0, 1)], i);
        assert_eq!(b.elements()[2][(0, 1)], Complex64::new(1.0, 0.0));
        for x in b.elements() {
            assert!((inner(x, x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn gell_mann_ordering_d3() {
        let b = su_basis(3).unwrap();
        let i = Complex64::new(0.0, 1.0);
        // symmetric (0,1), (0,2), (1,2)
        assert_eq!(b.elements()[0][(0, 1)], i);
        assert_eq!(b.elements()[1][(0, 2)], i);
        assert_eq!(b.elements()[2][(1, 2)], i);
        // antisymmetric
        assert_eq!(b.elements()[3][(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(b.elements()[5][(2, 1)], Complex64::new(-1.0, 0.0));
        // diagonal i·λ₃, i·λ₈
        assert_eq!(b.elements()[6][(1, 1)], -i);
        assert!((b.elements()[7][(2, 2)] - i * (-2.0 / 3f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn basis_is_cached() {
        let a = su_basis(4).unwrap();
        let b = su_basis(4).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn adjoint_of_identity_and_center() {
        for d in 2..=5 {
            let n = d * d - 1;
            let ad = adjoint_of(&UnitaryGate::identity(d)).unwrap();
            assert!((ad.matrix() - RealMatrix::identity(n, n)).abs().max() < 1e-15);
            for m in 0..d {
                let alpha = Complex64::from_polar(1.0, std::f64::consts::TAU * m as f64 / d as f64);
                let z = UnitaryGate::new("z", ComplexMatrix::identity(d, d) * alpha).unwrap();
                let ad = adjoint_of(&z).unwrap();
                assert!((ad.matrix() - RealMatrix::identity(n, n)).abs().max() < 1e-14);
            }
        }
    }

    #[test]
    fn adjoint_rejects_non_unitary() {
        let bad = UnitaryGate::from_trusted(
            "bad",
            ComplexMatrix::identity(2, 2) * Complex64::new(2.0, 0.0),
        );
        assert!(matches!(adjoint_of(&bad), Err(AdjointError::NotUnitary(_))));
    }

    #[test]
    fn coordinates_round_trip() {
        let b = su_basis(3).unwrap();
        let c = DVector::from_fn(8, |i, _| (i as f64) * 0.3 - 1.0);
        let x = b.combine(&c);
        assert!((b.coordinates(&x) - c).abs().max() < 1e-14);
    }

    #[test]
    fn adjoint_is_orthogonal_with_unit_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for d in 2..=4 {
            for _ in 0..10 {
                let ad = adjoint_of(&haar_special_unitary(d, &mut rng)).unwrap();
                assert!(ad.orthogonality_defect() < 1e-12);
                assert!((ad.matrix().determinant() - 1.0).abs() < 1e-10);
            }
        }
    }
}
