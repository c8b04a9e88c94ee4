//! Brute-force cross-checks that share no code with the decider's word
//! expansion: a full closure enumeration and an ε-net coverage estimate.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::commutant::GateSet;
use crate::linalg::{haar_special_unitary, project_to_special_unitary, ComplexMatrix, UnitaryGate};

/// Covering radius below which words are known to reach every ball.
pub const EPSILON_TARGET: f64 = 0.353_553_390_593_273_73; // 1/(2√2)

#[derive(Debug, Clone)]
pub struct ClosureResult {
    pub elements: Vec<UnitaryGate>,
    pub order: usize,
    pub generations: usize,
    pub overflowed: bool,
}

fn naive_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let n = a.nrows();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += a[(i, k)] * b[(k, j)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Elements sorted by `Re tr`; since `|Δ tr| ≤ √d ‖Δ‖`, only a window of
/// that width needs an exact comparison.
struct TraceSorted {
    items: Vec<(f64, ComplexMatrix)>,
    window: f64,
    tol: f64,
}

impl TraceSorted {
    fn contains(&self, m: &ComplexMatrix) -> bool {
        let t = m.trace().re;
        let start = self.items.partition_point(|(x, _)| *x < t - self.window);
        self.items[start..]
            .iter()
            .take_while(|(x, _)| *x <= t + self.window)
            .any(|(_, e)| frobenius_distance(e, m) <= self.tol)
    }

    fn insert(&mut self, m: ComplexMatrix) -> bool {
        if self.contains(&m) {
            return false;
        }
        let t = m.trace().re;
        let at = self.items.partition_point(|(x, _)| *x < t);
        self.items.insert(at, (t, m));
        true
    }
}

/// Closure of `{I} ∪ S` under multiplication. Each generation multiplies all
/// pairs of known elements; stops at a fixed point or once `cap` is exceeded.
pub fn closure_enumerate(s: &GateSet, cap: usize, tol_eq: f64) -> ClosureResult {
    let d = s.d();
    let mut set = TraceSorted {
        items: Vec::new(),
        window: (d as f64).sqrt() * tol_eq,
        tol: tol_eq,
    };
    let mut elements: Vec<ComplexMatrix> = Vec::new();
    for m in std::iter::once(ComplexMatrix::identity(d, d))
        .chain(s.gates().iter().map(|g| g.matrix().clone()))
    {
        if set.insert(m.clone()) {
            elements.push(m);
        }
    }
    let mut generations = 0;
    let mut overflowed = elements.len() > cap;
    let mut fresh_from = 0;
    while !overflowed {
        generations += 1;
        let known = elements.len();
        let mut added = false;
        'outer: for i in 0..known {
            for j in 0..known {
                // pairs among old elements were already multiplied
                if i < fresh_from && j < fresh_from {
                    continue;
                }
                let p = naive_mul(&elements[i], &elements[j]);
                let p = project_to_special_unitary(&p)
                    .map(UnitaryGate::into_matrix)
                    .unwrap_or(p);
                if set.insert(p.clone()) {
                    elements.push(p);
                    added = true;
                    if elements.len() > cap {
                        overflowed = true;
                        break 'outer;
                    }
                }
            }
        }
        fresh_from = known;
        if !added {
            break;
        }
    }
    let order = elements.len();
    let elements = elements
        .into_iter()
        .map(|m| UnitaryGate::from_trusted("element", m))
        .collect();
    ClosureResult {
        elements,
        order,
        generations,
        overflowed,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub word_length_cap: usize,
    pub samples: usize,
    pub seed: u64,
    pub words: usize,
    /// Worst distance from a Haar sample to its nearest word.
    pub max_min_distance: f64,
    pub epsilon_target: f64,
}

/// All distinct words of length `≤ cap`, identity included.
fn words_up_to(s: &GateSet, cap: usize) -> Vec<ComplexMatrix> {
    let d = s.d();
    let mut seen = TraceSorted {
        items: Vec::new(),
        window: (d as f64).sqrt() * 1e-10,
        tol: 1e-10,
    };
    let mut all = vec![ComplexMatrix::identity(d, d)];
    seen.insert(all[0].clone());
    let mut layer = all.clone();
    for _ in 0..cap {
        let mut next = Vec::new();
        for w in &layer {
            for g in s.gates() {
                let p = naive_mul(w, g.matrix());
                if seen.insert(p.clone()) {
                    next.push(p);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

/// Haar sample `i` of a run: stream `i` of the seeded generator.
pub fn haar_sample(d: usize, seed: u64, i: u64) -> UnitaryGate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    haar_special_unitary(d, &mut rng)
}

/// Worst-case HS distance from `samples` Haar-random targets to the nearest
/// word of length `≤ word_length_cap`.
pub fn epsilon_net_coverage(
    s: &GateSet,
    word_length_cap: usize,
    samples: usize,
    seed: u64,
) -> CoverageReport {
    let words = words_up_to(s, word_length_cap);
    let d = s.d();
    let max_min_distance = (0..samples.max(1) as u64)
        .into_par_iter()
        .map(|i| {
            let v = haar_sample(d, seed, i);
            words
                .iter()
                .map(|w| frobenius_distance(w, v.matrix()))
                .fold(f64::INFINITY, f64::min)
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(0.0, f64::max);
    CoverageReport {
        word_length_cap,
        samples: samples.max(1),
        seed,
        words: words.len(),
        max_min_distance,
        epsilon_target: EPSILON_TARGET,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ballspec::{is_exceptional_spectrum, N_SU2};
    use crate::su2geom::{hadamard, phase_gate};
    use std::f64::consts::PI;

    fn ht(phi: f64) -> GateSet {
        GateSet::new(vec![hadamard(), phase_gate(phi)]).unwrap()
    }

    #[test]
    fn epsilon_constant() {
        assert!((EPSILON_TARGET - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-16);
    }

    #[test]
    fn closure_orders() {
        assert_eq!(closure_enumerate(&ht(PI / 4.0), 1000, 1e-8).order, 48);
        assert_eq!(closure_enumerate(&ht(PI / 2.0), 1000, 1e-8).order, 16);
        let r = closure_enumerate(&GateSet::new(vec![hadamard()]).unwrap(), 1000, 1e-8);
        assert_eq!((r.order, r.overflowed), (4, false));
        let r = closure_enumerate(&ht(0.6), 500, 1e-8);
        assert!(r.overflowed);
    }

    #[test]
    fn closure_is_closed() {
        let r = closure_enumerate(&ht(PI / 4.0), 1000, 1e-8);
        let mut set = TraceSorted {
            items: Vec::new(),
            window: 2f64.sqrt() * 1e-8,
            tol: 1e-8,
        };
        for e in &r.elements {
            set.insert(e.matrix().clone());
        }
        assert!(set.contains(&ComplexMatrix::identity(2, 2)));
        for a in &r.elements {
            for b in &r.elements {
                assert!(set.contains(&(a.matrix() * b.matrix())));
            }
        }
    }

    #[test]
    fn octahedral_spectra_are_exceptional_or_central() {
        let r = closure_enumerate(&ht(PI / 4.0), 1000, 1e-8);
        let mut exceptional = 0;
        for e in &r.elements {
            let c = is_exceptional_spectrum(e, N_SU2).unwrap();
            // the only elements inside the balls are ±I
            assert!(c.exceptional || (c.in_ball && (e.matrix()[(0, 0)].norm() - 1.0).abs() < 1e-8));
            exceptional += c.exceptional as usize;
        }
        assert_eq!(exceptional, 46);
    }

    #[test]
    fn coverage_basics() {
        let s = ht(0.6);
        let r0 = epsilon_net_coverage(&s, 0, 50, 7);
        assert_eq!(r0.words, 1);
        assert!(r0.max_min_distance <= 8f64.sqrt());
        let mut last = r0.max_min_distance;
        for cap in 1..=6 {
            let r = epsilon_net_coverage(&s, cap, 50, 7);
            assert!(r.max_min_distance <= last);
            last = r.max_min_distance;
        }
        let again = epsilon_net_coverage(&s, 6, 50, 7);
        assert_eq!(again.max_min_distance.to_bits(), last.to_bits());
    }

    #[test]
    fn haar_streams_differ() {
        let a = haar_sample(2, 1, 0);
        let b = haar_sample(2, 1, 1);
        assert!(a.distance(&b) > 1e-3);
        assert_eq!(a.matrix(), haar_sample(2, 1, 0).matrix());
    }
}
