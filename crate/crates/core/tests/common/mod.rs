#![allow(dead_code)]

use std::f64::consts::PI;

use qudecide::commutant::GateSet;
use qudecide::linalg::{haar_special_unitary, UnitaryGate};
use qudecide::oracle::closure_enumerate;
use qudecide::su2geom::{
    exceptional_angle_table, hadamard, phase_gate, su2_from_axis_angle, AxisAngle,
};
use rand::Rng;

pub fn ht(phi: f64) -> GateSet {
    GateSet::new(vec![hadamard(), phase_gate(phi)]).unwrap()
}

pub fn named(gates: Vec<UnitaryGate>) -> GateSet {
    GateSet::new(
        gates
            .into_iter()
            .enumerate()
            .map(|(i, g)| g.renamed(format!("U{}", i + 1)))
            .collect(),
    )
    .unwrap()
}

pub fn aa(phi: f64, k: [f64; 3]) -> UnitaryGate {
    su2_from_axis_angle(&AxisAngle::normalized(phi, k).unwrap())
}

/// `{U(1.0, e_z), U(π/2, e_x)}`.
pub fn perpendicular_pair() -> GateSet {
    named(vec![
        aa(1.0, [0.0, 0.0, 1.0]),
        aa(PI / 2.0, [1.0, 0.0, 0.0]),
    ])
}

pub fn random_axis(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// A table angle other than `0` and `π`.
pub fn random_exceptional_angle(rng: &mut impl Rng) -> f64 {
    let angles: Vec<f64> = exceptional_angle_table()
        .angles()
        .filter(|a| a.abs() > 1e-9 && (a - PI).abs() > 1e-9)
        .collect();
    angles[rng.random_range(0..angles.len())]
}

pub fn random_exceptional_pair(rng: &mut impl Rng) -> GateSet {
    let a = random_exceptional_angle(rng);
    let b = random_exceptional_angle(rng);
    named(vec![aa(a, random_axis(rng)), aa(b, random_axis(rng))])
}

#[derive(Debug, Clone, Copy)]
pub enum Polyhedral {
    Tetrahedral,
    Octahedral,
    Icosahedral,
}

pub fn polyhedral_generators(kind: Polyhedral) -> GateSet {
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    match kind {
        Polyhedral::Tetrahedral => named(vec![
            aa(PI / 2.0, [1.0, 0.0, 0.0]),
            aa(PI / 3.0, [1.0, 1.0, 1.0]),
        ]),
        Polyhedral::Octahedral => ht(PI / 4.0),
        Polyhedral::Icosahedral => named(vec![
            aa(PI / 3.0, [1.0, 1.0, 1.0]),
            aa(PI / 5.0, [0.0, 1.0, golden]),
        ]),
    }
}

pub fn polyhedral_elements(kind: Polyhedral) -> Vec<UnitaryGate> {
    let r = closure_enumerate(&polyhedral_generators(kind), 1000, 1e-8);
    assert!(!r.overflowed);
    r.elements
}

fn is_central(u: &UnitaryGate) -> bool {
    let m = u.matrix();
    m[(0, 1)].norm() < 1e-8 && (m[(0, 0)].re.abs() - 1.0).abs() < 1e-8
}

/// Two random non-central elements of a binary polyhedral group, jointly conjugated by a Haar-random gate.
pub fn random_finite_pair(rng: &mut impl Rng) -> GateSet {
    let kind = [
        Polyhedral::Tetrahedral,
        Polyhedral::Octahedral,
        Polyhedral::Icosahedral,
    ][rng.random_range(0..3)];
    let elems: Vec<UnitaryGate> = polyhedral_elements(kind)
        .into_iter()
        .filter(|u| !is_central(u))
        .collect();
    let a = &elems[rng.random_range(0..elems.len())];
    let b = &elems[rng.random_range(0..elems.len())];
    let v = haar_special_unitary(2, rng);
    let conj = |u: &UnitaryGate| {
        qudecide::linalg::project_to_special_unitary(
            &(v.matrix() * u.matrix() * v.matrix().adjoint()),
        )
        .unwrap()
    };
    named(vec![conj(a), conj(b)])
}
