//! Dense complex and real matrix primitives.
//!
//! Everything here works on `nalgebra` dynamic matrices. The numerical
//! contracts (unitarity tolerance, relative rank tolerance, singular floor)
//! are fixed constants so that every caller makes the same decisions.

use std::f64::consts::TAU;
use std::fmt;

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

pub type ComplexMatrix = DMatrix<Complex64>;
pub type RealMatrix = DMatrix<f64>;

/// Hilbert-Schmidt tolerance for accepting a matrix as special unitary.
pub const TOL_UNITARY: f64 = 1e-8;
/// Default rank tolerance, relative to the largest singular value.
pub const TOL_RANK: f64 = 1e-9;
/// Smallest singular value accepted by [`project_to_special_unitary`].
pub const SINGULAR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension must be at least 2, got {0}")]
    BadDimension(usize),
    #[error("gate `{name}` has non-finite entries")]
    NonFinite { name: String },
    #[error("gate `{name}` violates {invariant}: deviation {deviation:.3e} exceeds {tol:.1e}")]
    NotUnitary {
        name: String,
        invariant: &'static str,
        deviation: f64,
        tol: f64,
    },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is singular: smallest singular value {0:.3e}")]
    Singular(f64),
}

/// A named d×d special-unitary matrix.
#[derive(Clone, PartialEq)]
pub struct UnitaryGate {
    name: String,
    matrix: ComplexMatrix,
}

impl fmt::Debug for UnitaryGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UnitaryGate({}, {})", self.name, self.matrix)
    }
}

impl UnitaryGate {
    /// Validates `matrix` against the special-unitary invariants.
    pub fn new(name: impl Into<String>, matrix: ComplexMatrix) -> Result<Self, LinalgError> {
        let name = name.into();
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(LinalgError::NotSquare { rows, cols });
        }
        if rows < 2 {
            return Err(LinalgError::BadDimension(rows));
        }
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(LinalgError::NonFinite { name });
        }
        let gate = Self { name, matrix };
        gate.check_invariants()?;
        Ok(gate)
    }

    /// Wraps a matrix known to be special unitary up to rounding (products of
    /// validated gates, projections).
    pub(crate) fn from_trusted(name: impl Into<String>, matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.is_square());
        Self {
            name: name.into(),
            matrix,
        }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_trusted("I", ComplexMatrix::identity(d, d))
    }

    /// Returns `‖U†U − I‖` and `|det U − 1|`.
    pub fn deviations(&self) -> (f64, f64) {
        let d = self.dim();
        let gram = self.matrix.adjoint() * &self.matrix;
        let unitarity = hs_norm(&(gram - ComplexMatrix::identity(d, d)));
        let det = (self.matrix.determinant() - Complex64::new(1.0, 0.0)).norm();
        (unitarity, det)
    }

    fn check_invariants(&self) -> Result<(), LinalgError> {
        let (unitarity, det) = self.deviations();
        if unitarity.is_nan() || unitarity > TOL_UNITARY {
            return Err(LinalgError::NotUnitary {
                name: self.name.clone(),
                invariant: "unitarity ‖U†U − I‖",
                deviation: unitarity,
                tol: TOL_UNITARY,
            });
        }
        if det.is_nan() || det > TOL_UNITARY {
            return Err(LinalgError::NotUnitary {
                name: self.name.clone(),
                invariant: "unit determinant |det U − 1|",
                deviation: det,
                tol: TOL_UNITARY,
            });
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// U⁻¹ = U†.
    pub fn inverse(&self) -> Self {
        Self::from_trusted(format!("{}^-1", self.name), self.matrix.adjoint())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.dim() != other.dim() {
            return Err(LinalgError::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(Self::from_trusted(
            format!("{}{}", self.name, other.name),
            &self.matrix * &other.matrix,
        ))
    }

    /// Uⁿ by repeated squaring; `pow(0)` is the identity.
    pub fn pow(&self, n: u32) -> Self {
        let d = self.dim();
        let mut acc = ComplexMatrix::identity(d, d);
        let mut base = self.matrix.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Self::from_trusted(format!("{}^{}", self.name, n), acc)
    }

    /// Hilbert-Schmidt distance to another gate of the same dimension.
    pub fn distance(&self, other: &Self) -> f64 {
        hs_norm(&(&self.matrix - &other.matrix))
    }
}

/// The d eigenphases of a unitary, each in `[0, 2π)`, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenphaseList(Vec<f64>);

impl EigenphaseList {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Distance of Σφ_i from the nearest multiple of 2π.
    pub fn sum_defect(&self) -> f64 {
        let s = self.0.iter().sum::<f64>().rem_euclid(TAU);
        s.min(TAU - s)
    }
}

/// `√(tr M M†)`.
pub fn hs_norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenvalues of a square complex matrix, read off the diagonal of its
/// complex Schur form.
pub fn complex_eigenvalues(m: &ComplexMatrix) -> Vec<Complex64> {
    let d = m.nrows();
    if d == 2 {
        // closed form on the traceless part: λ = t/2 ± √(b² + m₀₁m₁₀) with
        // b = (m₀₀ − m₁₁)/2 stays accurate when the eigenvalues nearly coincide
        let half_tr = (m[(0, 0)] + m[(1, 1)]) * 0.5;
        let b = (m[(0, 0)] - m[(1, 1)]) * 0.5;
        let mu = (b * b + m[(0, 1)] * m[(1, 0)]).sqrt();
        return vec![half_tr - mu, half_tr + mu];
    }
    let (_, t) = nalgebra::Schur::new(m.clone()).unpack();
    (0..d).map(|i| t[(i, i)]).collect()
}

/// Eigenphases of `u`, sorted ascending; ties keep eigenvector order.
pub fn eigenphases(u: &UnitaryGate) -> Result<EigenphaseList, LinalgError> {
    u.check_invariants()?;
    let mut phases: Vec<f64> = complex_eigenvalues(u.matrix())
        .into_iter()
        .map(|z| {
            let p = z.arg().rem_euclid(TAU);
            // a phase of −0 or −1e−17 lands on 2π after rem_euclid
            if TAU - p < 1e-14 {
                0.0
            } else {
                p
            }
        })
        .collect();
    phases.sort_by(|a, b| a.total_cmp(b));
    Ok(EigenphaseList(phases))
}

fn pad_to_tall<T: ComplexField>(m: &DMatrix<T>) -> DMatrix<T> {
    let (rows, cols) = m.shape();
    if rows >= cols {
        return m.clone();
    }
    let mut padded = DMatrix::<T>::zeros(cols, cols);
    padded.view_mut((0, 0), (rows, cols)).copy_from(m);
    padded
}

/// Number of singular values `σ_i ≤ tol_rank · σ_max`; the zero matrix has
/// kernel dimension `cols`.
pub fn kernel_dimension<T>(m: &DMatrix<T>, tol_rank: f64) -> usize
where
    T: ComplexField<RealField = f64>,
{
    let cols = m.ncols();
    let sv = pad_to_tall(m).singular_values();
    let sigma_max = sv.iter().cloned().fold(0.0_f64, f64::max);
    if sigma_max == 0.0 {
        return cols;
    }
    sv.iter().filter(|&&s| s <= tol_rank * sigma_max).count()
}

/// Orthonormal basis of the numerical null space of a real matrix, using the
/// same relative threshold as [`kernel_dimension`].
pub fn kernel_basis(m: &RealMatrix, tol_rank: f64) -> Vec<DVector<f64>> {
    let cols = m.ncols();
    let svd = nalgebra::SVD::new(pad_to_tall(m), false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    if sigma_max == 0.0 {
        return (0..cols)
            .map(|i| DVector::from_fn(cols, |j, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
    }
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= tol_rank * sigma_max)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect()
}

/// Column-major stacking.
pub fn vectorize<T: nalgebra::Scalar>(m: &DMatrix<T>) -> DVector<T> {
    DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vectorize`].
pub fn unvectorize<T: nalgebra::Scalar>(v: &DVector<T>, rows: usize, cols: usize) -> DMatrix<T> {
    assert_eq!(v.len(), rows * cols, "vector length must equal rows*cols");
    DMatrix::from_column_slice(rows, cols, v.as_slice())
}

/// `U1 U2 U1⁻¹ U2⁻¹`.
pub fn group_commutator(u1: &UnitaryGate, u2: &UnitaryGate) -> Result<UnitaryGate, LinalgError> {
    if u1.dim() != u2.dim() {
        return Err(LinalgError::DimensionMismatch(u1.dim(), u2.dim()));
    }
    let a = u1.matrix();
    let b = u2.matrix();
    let m = a * b * a.adjoint() * b.adjoint();
    Ok(UnitaryGate::from_trusted(
        format!("[{},{}]", u1.name(), u2.name()),
        m,
    ))
}

/// Unitary polar factor of `m`, rescaled by a d-th root of its inverse
/// determinant.
pub fn project_to_special_unitary(m: &ComplexMatrix) -> Result<UnitaryGate, LinalgError> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(LinalgError::NotSquare { rows, cols });
    }
    if rows < 2 {
        return Err(LinalgError::BadDimension(rows));
    }
    let svd = m.clone().svd(true, true);
    let sigma_min = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if sigma_min.is_nan() || sigma_min < SINGULAR_FLOOR {
        return Err(LinalgError::Singular(sigma_min));
    }
    let w = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let unitary = w * v_t;
    let theta = unitary.determinant().arg();
    let phase = Complex64::from_polar(1.0, -theta / rows as f64);
    Ok(UnitaryGate::from_trusted("projected", unitary * phase))
}

/// Haar-distributed element of SU(d): QR of a complex Gaussian matrix with the
/// phases of R's diagonal pushed into Q, then determinant normalisation.
pub fn haar_special_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> UnitaryGate {
    let z = ComplexMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let ph = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= ph;
        }
    }
    let theta = q.determinant().arg();
    let phase = Complex64::from_polar(1.0, -theta / d as f64);
    UnitaryGate::from_trusted("haar", q * phase)
}

/// Largest entrywise modulus of `a − b`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn hadamard() -> ComplexMatrix {
        let a = c(0.0, FRAC_1_SQRT_2);
        ComplexMatrix::from_row_slice(2, 2, &[a, a, a, -a])
    }

    fn phase(phi: f64) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::from_polar(1.0, -phi),
            Complex64::from_polar(1.0, phi),
        ]))
    }

    #[test]
    fn hs_norm_examples() {
        assert_eq!(hs_norm(&ComplexMatrix::zeros(2, 2)), 0.0);
        for d in 2..6 {
            let n = hs_norm(&ComplexMatrix::identity(d, d));
            assert!((n - (d as f64).sqrt()).abs() < 1e-15);
        }
        let diff = hadamard() - ComplexMatrix::identity(2, 2);
        let mut brute = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let z = diff[(i, j)];
                brute += z.re * z.re + z.im * z.im;
            }
        }
        // |i/√2 − 1|² + 2|i/√2|² + |−i/√2 − 1|² = 4
        assert!((brute - 4.0).abs() < 1e-14);
        assert!((hs_norm(&diff) - brute.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn eigenphase_examples() {
        let id = UnitaryGate::identity(2);
        assert_eq!(eigenphases(&id).unwrap().as_slice(), &[0.0, 0.0]);

        let t = UnitaryGate::new("T", phase(FRAC_PI_4)).unwrap();
        let p = eigenphases(&t).unwrap();
        assert!((p.as_slice()[0] - FRAC_PI_4).abs() < 1e-12);
        assert!((p.as_slice()[1] - 7.0 * FRAC_PI_4).abs() < 1e-12);

        let h = UnitaryGate::new("H", hadamard()).unwrap();
        let p = eigenphases(&h).unwrap();
        assert!((p.as_slice()[0] - PI / 2.0).abs() < 1e-12);
        assert!((p.as_slice()[1] - 3.0 * PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn eigenphases_near_scalar_keep_full_precision() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let v = haar_special_unitary(2, &mut rng);
            let m = v.matrix()
                * ComplexMatrix::identity(2, 2)
                * Complex64::new(-1.0, 0.0)
                * v.matrix().adjoint();
            let p = eigenphases(&UnitaryGate::new("c", m).unwrap()).unwrap();
            for x in p.as_slice() {
                assert!((x - PI).abs() < 1e-14, "{x}");
            }
        }
    }

    #[test]
    fn eigenphases_reject_drifted_gate() {
        let bad = UnitaryGate::from_trusted("bad", ComplexMatrix::identity(2, 2) * c(1.1, 0.0));
        assert!(matches!(
            eigenphases(&bad),
            Err(LinalgError::NotUnitary { .. })
        ));
    }

    #[test]
    fn kernel_dimension_examples() {
        assert_eq!(kernel_dimension(&RealMatrix::zeros(3, 3), TOL_RANK), 3);
        assert_eq!(kernel_dimension(&RealMatrix::identity(9, 9), TOL_RANK), 0);
        let m = RealMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 1e-15]));
        assert_eq!(kernel_dimension(&m, 1e-9), 1);
        // wide matrices have at least cols - rows null directions
        let wide = RealMatrix::from_row_slice(1, 3, &[1.0, 2.0, 3.0]);
        assert_eq!(kernel_dimension(&wide, TOL_RANK), 2);
        assert_eq!(kernel_basis(&wide, TOL_RANK).len(), 2);
    }

    #[test]
    fn vectorize_examples() {
        let (a, b, cc, d) = (1.0, 2.0, 3.0, 4.0);
        let m = RealMatrix::from_row_slice(2, 2, &[a, b, cc, d]);
        assert_eq!(vectorize(&m).as_slice(), &[a, cc, b, d]);
        let id = RealMatrix::identity(2, 2);
        assert_eq!(vectorize(&id).as_slice(), &[1.0, 0.0, 0.0, 1.0]);
        let rect = RealMatrix::zeros(2, 3);
        assert_eq!(vectorize(&rect).len(), 6);
        assert_eq!(unvectorize(&vectorize(&m), 2, 2), m);
    }

    #[test]
    fn group_commutator_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = haar_special_unitary(3, &mut rng);
        let k = group_commutator(&u, &u).unwrap();
        assert!(hs_norm(&(k.matrix() - ComplexMatrix::identity(3, 3))) < 1e-12);

        let t1 = UnitaryGate::new("a", phase(0.3)).unwrap();
        let t2 = UnitaryGate::new("b", phase(1.7)).unwrap();
        let k = group_commutator(&t1, &t2).unwrap();
        assert!(hs_norm(&(k.matrix() - ComplexMatrix::identity(2, 2))) < 1e-14);

        let v = haar_special_unitary(2, &mut rng);
        assert!(matches!(
            group_commutator(&u, &v),
            Err(LinalgError::DimensionMismatch(3, 2))
        ));
    }

    #[test]
    fn projection_examples() {
        let h = UnitaryGate::new("H", hadamard()).unwrap();
        let p = project_to_special_unitary(h.matrix()).unwrap();
        assert!(max_abs_diff(p.matrix(), h.matrix()) < 1e-14);

        let scaled = ComplexMatrix::identity(2, 2) * c(1.000001, 0.0);
        let p = project_to_special_unitary(&scaled).unwrap();
        assert!(max_abs_diff(p.matrix(), &ComplexMatrix::identity(2, 2)) < 1e-14);

        let singular = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        );
        assert!(matches!(
            project_to_special_unitary(&singular),
            Err(LinalgError::Singular(_))
        ));
    }

    #[test]
    fn validation_rejects_bad_input() {
        let m = ComplexMatrix::identity(2, 2) * c(1.05, 0.0);
        assert!(matches!(
            UnitaryGate::new("x", m),
            Err(LinalgError::NotUnitary { .. })
        ));
        // unitary but det = -1
        let m = ComplexMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
        match UnitaryGate::new("z", m) {
            Err(LinalgError::NotUnitary { invariant, .. }) => {
                assert!(invariant.contains("determinant"))
            }
            other => panic!("unexpected {other:?}"),
        }
        let m = ComplexMatrix::from_element(2, 2, c(f64::NAN, 0.0));
        assert!(matches!(
            UnitaryGate::new("n", m),
            Err(LinalgError::NonFinite { .. })
        ));
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            UnitaryGate::new("r", m),
            Err(LinalgError::NotSquare { .. })
        ));
    }

    #[test]
    fn haar_samples_are_special_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 2..=5 {
            for _ in 0..20 {
                let u = haar_special_unitary(d, &mut rng);
                let (a, b) = u.deviations();
                assert!(a < 1e-12 && b < 1e-12, "d={d}: {a} {b}");
            }
        }
    }

    #[test]
    fn pow_matches_repeated_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = haar_special_unitary(3, &mut rng);
        let mut acc = ComplexMatrix::identity(3, 3);
        for n in 0..9u32 {
            assert!(max_abs_diff(u.pow(n).matrix(), &acc) < 1e-12);
            acc = &acc * u.matrix();
        }
    }
}
