//! Center elements, the Hilbert–Schmidt balls around them, and exceptional
//! spectra.
//!
//! `B_α` is the ball of radius `1/√2` around `αI`, `α^d = 1`, and `ℬ` is the
//! union of these balls. Membership is decided from the eigenphases through
//! `Σ sin²((φ_i − θ_m)/2) < 1/8`. The inequality is strict. Sums within
//! `1e-12` of `1/8` are treated as outside and flagged as boundary hits, so
//! a rounding artefact can never produce a universality claim.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::linalg::{eigenphases, EigenphaseList, UnitaryGate};
use crate::su2geom::{is_exceptional_angle, EXCEPTIONAL_TOL};

pub const BALL_BOUND: f64 = 0.125;
pub const BOUNDARY_TOL: f64 = 1e-12;
pub const TOL_CENTER: f64 = 1e-8;
/// Largest power any SU(2) element needs to enter `ℬ`.
pub const N_SU2: u32 = 6;
const PHASE_TOL: f64 = 1e-9;

/// `α_m I` with `α_m = e^{iθ_m}`, `θ_m = 2πm/d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterElement {
    pub m: usize,
    pub theta: f64,
    pub alpha: Complex64,
}

pub fn center_elements(d: usize) -> Vec<CenterElement> {
    (0..d)
        .map(|m| {
            let theta = TAU * m as f64 / d as f64;
            CenterElement {
                m,
                theta,
                alpha: Complex64::from_polar(1.0, theta),
            }
        })
        .collect()
}

/// `‖U − αI‖` from `‖U − αI‖² = 2d − 2 Re(α̅ tr U)`.
pub fn distance_to_center(u: &UnitaryGate, c: &CenterElement) -> f64 {
    let tr = u.matrix().trace();
    let d = u.dim() as f64;
    let sq = 2.0 * d - 2.0 * (c.alpha.conj() * tr).re;
    if sq > 1e-4 {
        return sq.sqrt();
    }
    // the trace form cancels near the center; sum the entries instead
    let m = u.matrix();
    let mut acc = 0.0;
    for j in 0..u.dim() {
        for i in 0..u.dim() {
            let z = if i == j {
                m[(i, j)] - c.alpha
            } else {
                m[(i, j)]
            };
            acc += z.norm_sqr();
        }
    }
    acc.sqrt()
}

fn min_center_distance(u: &UnitaryGate) -> f64 {
    center_elements(u.dim())
        .iter()
        .map(|c| distance_to_center(u, c))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallMembership {
    pub in_ball: bool,
    /// Nearest center when `in_ball`.
    pub center: Option<CenterElement>,
    pub distance: f64,
    /// Some ball sum fell within `BOUNDARY_TOL` of `1/8`.
    pub boundary: bool,
}

fn ball_sum(phases: &[f64], theta: f64) -> f64 {
    phases
        .iter()
        .map(|p| ((p - theta) / 2.0).sin().powi(2))
        .sum()
}

fn membership_from_phases(u: &UnitaryGate, phases: &[f64]) -> BallMembership {
    let mut best: Option<(CenterElement, f64)> = None;
    let mut boundary = false;
    let mut nearest = f64::INFINITY;
    for c in center_elements(u.dim()) {
        let sum = ball_sum(phases, c.theta);
        let dist = distance_to_center(u, &c);
        nearest = nearest.min(dist);
        if (sum - BALL_BOUND).abs() <= BOUNDARY_TOL {
            boundary = true;
            continue;
        }
        if sum < BALL_BOUND && best.is_none_or(|(_, bd)| dist < bd) {
            best = Some((c, dist));
        }
    }
    match best {
        Some((c, dist)) => BallMembership {
            in_ball: true,
            center: Some(c),
            distance: dist,
            boundary,
        },
        None => BallMembership {
            in_ball: false,
            center: None,
            distance: nearest,
            boundary,
        },
    }
}

/// Membership of `U` in `ℬ`; `distance` is to the chosen center, or to the
/// nearest center when outside.
pub fn ball_membership(u: &UnitaryGate) -> BallMembership {
    match eigenphases(u) {
        Ok(p) => membership_from_phases(u, p.as_slice()),
        Err(_) => BallMembership {
            in_ball: false,
            center: None,
            distance: min_center_distance(u),
            boundary: false,
        },
    }
}

/// `U ∈ ℬ ∖ Z(SU(d))`.
pub fn in_ball_not_center(u: &UnitaryGate, tol_center: f64) -> bool {
    ball_membership(u).in_ball && min_center_distance(u) > tol_center
}

/// Outcome of scanning `U, U², …, U^{n_max}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EscapeSearch {
    /// First power landing in `ℬ ∖ Z`.
    pub power: Option<u32>,
    /// Some scanned power sat on a ball boundary.
    pub boundary_hit: bool,
}

/// Smallest `1 ≤ n ≤ n_max` with `Uⁿ ∈ ℬ`.
pub fn power_into_ball(u: &UnitaryGate, n_max: u32) -> Option<u32> {
    let mut p = u.clone();
    for n in 1..=n_max {
        if ball_membership(&p).in_ball {
            return Some(n);
        }
        p = UnitaryGate::from_trusted(u.name(), p.matrix() * u.matrix());
    }
    None
}

/// Smallest `1 ≤ n ≤ n_max` with `Uⁿ ∈ ℬ ∖ Z`. Powers are evaluated on the
/// eigenphases (`nφ_i`), so long scans do not accumulate product drift.
pub fn escape_search(u: &UnitaryGate, n_max: u32, tol_center: f64) -> EscapeSearch {
    let Ok(phases) = eigenphases(u) else {
        return EscapeSearch::default();
    };
    let d = u.dim();
    let mut out = EscapeSearch::default();
    for n in 1..=n_max {
        let scaled: Vec<f64> = phases
            .as_slice()
            .iter()
            .map(|p| (p * n as f64).rem_euclid(TAU))
            .collect();
        let mut found = false;
        for c in center_elements(d) {
            let sum = ball_sum(&scaled, c.theta);
            if (sum - BALL_BOUND).abs() <= BOUNDARY_TOL {
                out.boundary_hit = true;
                continue;
            }
            // ‖Uⁿ − αI‖² = 4 Σ sin²((nφ_i − θ)/2)
            if sum < BALL_BOUND && 2.0 * sum.sqrt() > tol_center {
                found = true;
            }
        }
        if found && !is_center_power(&scaled, d, tol_center) {
            out.power = Some(n);
            return out;
        }
    }
    out
}

fn is_center_power(phases: &[f64], d: usize, tol_center: f64) -> bool {
    center_elements(d)
        .iter()
        .any(|c| 2.0 * ball_sum(phases, c.theta).sqrt() <= tol_center)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumClass {
    pub phases: EigenphaseList,
    pub in_ball: bool,
    pub exceptional: bool,
    /// Smallest power entering `ℬ`, if any up to the bound.
    pub n_power: Option<u32>,
}

fn circular_gap(a: f64, b: f64) -> f64 {
    let r = (a - b).rem_euclid(TAU);
    r.min(TAU - r)
}

/// Exceptional: outside `ℬ`, and for some `1 ≤ n ≤ n_bound` all `e^{inφ_i}`
/// equal one common center scalar.
pub fn is_exceptional_spectrum(
    u: &UnitaryGate,
    n_bound: u32,
) -> Result<SpectrumClass, crate::linalg::LinalgError> {
    let phases = eigenphases(u)?;
    let in_ball = membership_from_phases(u, phases.as_slice()).in_ball;
    let n_power = power_into_ball(u, n_bound);
    let exceptional = !in_ball
        && (1..=n_bound).any(|n| {
            center_elements(u.dim()).iter().any(|c| {
                phases
                    .as_slice()
                    .iter()
                    .all(|p| circular_gap(p * n as f64, c.theta) <= PHASE_TOL * n as f64)
            })
        });
    if u.dim() == 2 && n_bound == N_SU2 && !in_ball {
        debug_assert_eq!(
            exceptional,
            is_exceptional_angle(phases.as_slice()[0], EXCEPTIONAL_TOL),
            "phases {:?}",
            phases
        );
    }
    Ok(SpectrumClass {
        phases,
        in_ball,
        exceptional,
        n_power,
    })
}
