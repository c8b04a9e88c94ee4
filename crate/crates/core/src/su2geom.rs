//! Axis-angle geometry of SU(2) and SO(3).
//!
//! An SU(2) element is written `U(φ, k) = I cos φ + sin φ (k_x X + k_y Y + k_z Z)`
//! with
//!
//! ```text
//! X = iσ₂ = [[0, 1], [-1, 0]]
//! Y = iσ₁ = [[0, i], [i, 0]]
//! Z = -iσ₃ = [[-i, 0], [0, i]]
//! ```
//!
//! With this choice `U(φ, e_z)` is the phase gate `diag(e^{-iφ}, e^{iφ})`,
//! `U(π/2, e_x)` is `[[0, 1], [-1, 0]]`, and the adjoint image of `U(φ, k)` in
//! the basis `(Z, Y, X)` is exactly the rotation `O(2φ, k)` produced by
//! [`so3_from_axis_angle`]. The generators satisfy `XY = -Z` (a left-handed
//! quaternion triple), which fixes the sign of the cross term in
//! [`compose_axis_angle`]. The Hadamard gate `(i/√2)[[1, 1], [1, -1]]` is
//! `U(π/2, (0, 1, -1)/√2)` in this parametrisation.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::sync::OnceLock;

use nalgebra::DVector;
use num_complex::Complex64;
use thiserror::Error;

use crate::adjoint::AdjointMatrix;
use crate::linalg::{hs_norm, ComplexMatrix, RealMatrix, UnitaryGate};

const UNIT_TOL: f64 = 1e-12;
const DEGENERATE_SIN: f64 = 1e-12;
/// Angle and orthogonality tolerance used by [`commutant_trivial_su2`].
pub const FACT_TOL: f64 = 1e-9;
/// Default tolerance for exceptional-angle detection.
pub const EXCEPTIONAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Su2Error {
    #[error("axis {0:?} is not a unit vector")]
    NonUnitAxis([f64; 3]),
    #[error("expected a 2x2 gate, got dimension {0}")]
    DimensionMismatch(usize),
    #[error("composition is ±I (γ = {}); axis is undefined", fallback.phi())]
    DegenerateComposition { fallback: AxisAngle },
    #[error("the two gates commute; the commutant criterion needs a noncommuting pair")]
    CommutingPair,
}

pub type Vec3 = [f64; 3];

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm3(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Rotation angle `φ` and unit axis `k` of an SU(2) element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAngle {
    phi: f64,
    k: Vec3,
}

impl AxisAngle {
    pub fn new(phi: f64, k: Vec3) -> Result<Self, Su2Error> {
        if !phi.is_finite()
            || !k.iter().all(|x| x.is_finite())
            || (dot(&k, &k) - 1.0).abs() > UNIT_TOL
        {
            return Err(Su2Error::NonUnitAxis(k));
        }
        Ok(Self { phi, k })
    }

    /// Normalises `k` first; fails only for a zero or non-finite axis.
    pub fn normalized(phi: f64, k: Vec3) -> Result<Self, Su2Error> {
        let n = norm3(&k);
        if n.is_nan() || n <= 0.0 || !n.is_finite() {
            return Err(Su2Error::NonUnitAxis(k));
        }
        Self::new(phi, [k[0] / n, k[1] / n, k[2] / n])
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn axis(&self) -> Vec3 {
        self.k
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `I cos φ + sin φ (k_x X + k_y Y + k_z Z)`.
pub fn su2_from_axis_angle(a: &AxisAngle) -> UnitaryGate {
    let (s, co) = a.phi.sin_cos();
    let [kx, ky, kz] = a.k;
    let m = ComplexMatrix::from_row_slice(
        2,
        2,
        &[
            c(co, -s * kz),
            c(s * kx, s * ky),
            c(-s * kx, s * ky),
            c(co, s * kz),
        ],
    );
    UnitaryGate::from_trusted(format!("U({:.6},{:?})", a.phi, a.k), m)
}

/// `X_ij = E_ij − E_ji` on R³ (0-based indices).
fn so3_generator(i: usize, j: usize) -> RealMatrix {
    let mut m = RealMatrix::zeros(3, 3);
    m[(i, j)] = 1.0;
    m[(j, i)] = -1.0;
    m
}

/// `O(φ, k) = I + sin φ K + 2 sin²(φ/2) K²` with `K = −k_x X₁₂ + k_y X₁₃ − k_z X₂₃`.
pub fn so3_from_axis_angle(phi: f64, k: Vec3) -> Result<AdjointMatrix, Su2Error> {
    let a = AxisAngle::new(phi, k)?;
    let [kx, ky, kz] = a.k;
    let gen = so3_generator(0, 1) * (-kx) + so3_generator(0, 2) * ky + so3_generator(1, 2) * (-kz);
    let half = (phi / 2.0).sin();
    let m = RealMatrix::identity(3, 3) + &gen * phi.sin() + &gen * &gen * (2.0 * half * half);
    Ok(AdjointMatrix::from_matrix(2, m))
}

/// Axis-angle of the product `U(a1) U(a2)`, with `γ ∈ [0, π]`.
pub fn compose_axis_angle(a1: &AxisAngle, a2: &AxisAngle) -> Result<AxisAngle, Su2Error> {
    let (s1, c1) = a1.phi.sin_cos();
    let (s2, c2) = a2.phi.sin_cos();
    let cos_gamma = c1 * c2 - s1 * s2 * dot(&a1.k, &a2.k);
    let kx = cross(&a1.k, &a2.k);
    // sin γ · k₁₂; the cross term carries a minus sign because XY = −Z
    let v: Vec3 = std::array::from_fn(|i| a1.k[i] * s1 * c2 + a2.k[i] * s2 * c1 - kx[i] * s1 * s2);
    let sin_gamma = norm3(&v);
    if sin_gamma < DEGENERATE_SIN {
        let phi = if cos_gamma >= 0.0 { 0.0 } else { PI };
        return Err(Su2Error::DegenerateComposition {
            fallback: AxisAngle {
                phi,
                k: [0.0, 0.0, 1.0],
            },
        });
    }
    let gamma = sin_gamma.atan2(cos_gamma);
    Ok(AxisAngle {
        phi: gamma,
        k: [v[0] / sin_gamma, v[1] / sin_gamma, v[2] / sin_gamma],
    })
}

/// Inverse of [`su2_from_axis_angle`] with `φ ∈ [0, π]`; `±I` map to axis `e_z`.
pub fn axis_angle_from_su2(u: &UnitaryGate) -> Result<AxisAngle, Su2Error> {
    if u.dim() != 2 {
        return Err(Su2Error::DimensionMismatch(u.dim()));
    }
    let m = u.matrix();
    let cos_phi = 0.5 * (m[(0, 0)].re + m[(1, 1)].re);
    let v: Vec3 = [
        0.5 * (m[(0, 1)].re - m[(1, 0)].re),
        0.5 * (m[(0, 1)].im + m[(1, 0)].im),
        0.5 * (m[(1, 1)].im - m[(0, 0)].im),
    ];
    let sin_phi = norm3(&v);
    if sin_phi < DEGENERATE_SIN {
        let phi = if cos_phi >= 0.0 { 0.0 } else { PI };
        return Ok(AxisAngle {
            phi,
            k: [0.0, 0.0, 1.0],
        });
    }
    Ok(AxisAngle {
        phi: sin_phi.atan2(cos_phi),
        k: [v[0] / sin_phi, v[1] / sin_phi, v[2] / sin_phi],
    })
}

fn is_odd_half_pi(phi: f64) -> bool {
    (phi.rem_euclid(PI) - PI / 2.0).abs() <= FACT_TOL
}

/// Whether the commutant of `{Ad U(a1), Ad U(a2)}` is only the real multiples
/// of the identity, for a noncommuting pair.
pub fn commutant_trivial_su2(a1: &AxisAngle, a2: &AxisAngle) -> Result<bool, Su2Error> {
    let u1 = su2_from_axis_angle(a1);
    let u2 = su2_from_axis_angle(a2);
    let comm = u1.matrix() * u2.matrix() - u2.matrix() * u1.matrix();
    if hs_norm(&comm) <= 1e-8 {
        return Err(Su2Error::CommutingPair);
    }
    let odd1 = is_odd_half_pi(a1.phi);
    let odd2 = is_odd_half_pi(a2.phi);
    let perpendicular = dot(&a1.k, &a2.k).abs() <= FACT_TOL;
    let enlarged = (odd1 && odd2) || ((odd1 || odd2) && perpendicular);
    Ok(!enlarged)
}

/// The 24 angles `kπ/i ∈ [0, 2π)`, `1 ≤ i ≤ 6`, `gcd(k, i) = 1`.
#[derive(Debug, Clone)]
pub struct ExceptionalAngleTable {
    entries: Vec<(u32, u32, f64)>,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl ExceptionalAngleTable {
    fn build() -> Self {
        let mut entries = Vec::new();
        for den in 1..=6u32 {
            for num in 0..2 * den {
                if gcd(num, den) == 1 {
                    entries.push((num, den, num as f64 * PI / den as f64));
                }
            }
        }
        entries.sort_by(|a, b| a.2.total_cmp(&b.2));
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Angles in ascending order.
    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.2)
    }

    /// `(k, i)` pairs, angle `kπ/i`.
    pub fn fractions(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.entries.iter().map(|e| (e.0, e.1))
    }

    /// Whether `phi mod 2π` is within `tol` (circularly) of an entry.
    pub fn contains(&self, phi: f64, tol: f64) -> bool {
        let x = phi.rem_euclid(TAU);
        self.angles().any(|a| {
            let d = (x - a).abs();
            d.min(TAU - d) <= tol
        })
    }
}

pub fn exceptional_angle_table() -> &'static ExceptionalAngleTable {
    static TABLE: OnceLock<ExceptionalAngleTable> = OnceLock::new();
    TABLE.get_or_init(ExceptionalAngleTable::build)
}

/// Best rational approximation `p/q` of `phi/π` with `q ≤ max_den`, found from
/// continued-fraction convergents; returned only when `|phi − pπ/q| ≤ tol`.
pub fn rational_multiple_of_pi(phi: f64, max_den: u64, tol: f64) -> Option<(i64, u64)> {
    let x = phi / PI;
    let (mut h_prev, mut h) = (1i64, x.floor() as i64);
    let (mut k_prev, mut k) = (0u64, 1u64);
    let mut frac = x - x.floor();
    let mut best = (h, k);
    loop {
        if (phi - best.0 as f64 * PI / best.1 as f64).abs() <= tol {
            return Some(best);
        }
        if frac.abs() < 1e-15 {
            return None;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        let a = a as i64;
        let h_next = a * h + h_prev;
        let k_next = a as u64 * k + k_prev;
        if k_next > max_den {
            return None;
        }
        (h_prev, h) = (h, h_next);
        (k_prev, k) = (k, k_next);
        best = (h, k);
    }
}

/// Whether `phi mod 2π` is one of the 24 exceptional SU(2) angles within `tol`.
pub fn is_exceptional_angle(phi: f64, tol: f64) -> bool {
    let by_table = exceptional_angle_table().contains(phi, tol);
    if tol <= 1e-6 {
        let by_rational = rational_multiple_of_pi(phi.rem_euclid(TAU), 6, tol).is_some()
            || rational_multiple_of_pi(phi.rem_euclid(TAU) - TAU, 6, tol).is_some();
        debug_assert_eq!(
            by_table, by_rational,
            "table and rational detection disagree at {phi}"
        );
    }
    by_table
}

/// The Hadamard gate `(i/√2)[[1, 1], [1, −1]]`, which has determinant 1.
pub fn hadamard() -> UnitaryGate {
    let a = c(0.0, FRAC_1_SQRT_2);
    UnitaryGate::from_trusted("H", ComplexMatrix::from_row_slice(2, 2, &[a, a, a, -a]))
}

/// The phase gate `T_φ = diag(e^{−iφ}, e^{iφ})`.
pub fn phase_gate(phi: f64) -> UnitaryGate {
    let diag = DVector::from_vec(vec![
        Complex64::from_polar(1.0, -phi),
        Complex64::from_polar(1.0, phi),
    ]);
    UnitaryGate::from_trusted("T", ComplexMatrix::from_diagonal(&diag))
}
