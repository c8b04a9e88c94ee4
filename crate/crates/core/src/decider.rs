//! Universality decision for a gate set.
//!
//! 1. Commutant test: if `Ad_S` has a non-scalar commutant, the set is not
//!    universal and the procedure stops (optionally enumerating the group to
//!    report whether it is finite).
//! 2. For `d = 2`, a generator with a non-exceptional spectrum, or one already
//!    in `ℬ ∖ Z`, settles universality immediately.
//! 3. Otherwise words are generated breadth-first, `l = 1, 2, …`. If some
//!    power `wⁿ`, `n ≤ n_power_max`, of a word lands in `ℬ ∖ Z` the set is
//!    universal. If a generation adds nothing new, the group is finite.
//!
//! Step 3 stops on an element of `ℬ ∖ Z` alone. Together with a trivial
//! commutant this suffices: the commutator argument behind it needs a second
//! element not commuting with the first, and a trivial commutant guarantees
//! such a generator exists.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::ballspec::{ball_membership, escape_search, is_exceptional_spectrum, N_SU2, TOL_CENTER};
use crate::commutant::{necessary_condition, GateSet};
use crate::linalg::{project_to_special_unitary, RealMatrix, UnitaryGate, TOL_RANK};
use crate::su2geom::axis_angle_from_su2;

pub const TOL_EQ: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeciderError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("group exceeds {limit} elements")]
    GroupTooLarge { limit: usize },
    #[error("the set is already universal; nothing to fix")]
    AlreadyUniversal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeciderConfig {
    pub tol_rank: f64,
    pub tol_eq: f64,
    pub tol_center: f64,
    pub max_word_len: usize,
    pub max_group_size: usize,
    pub n_power_max: u32,
    /// Enumerate the group after a failed commutant test to report its order.
    pub classify_non_universal: bool,
}

impl DeciderConfig {
    pub fn for_dimension(d: usize) -> Self {
        let two = d == 2;
        Self {
            tol_rank: TOL_RANK,
            tol_eq: TOL_EQ,
            tol_center: TOL_CENTER,
            max_word_len: if two { 13 } else { 20 },
            max_group_size: 10_000,
            n_power_max: if two { N_SU2 } else { 64 },
            classify_non_universal: true,
        }
    }

    pub fn validate(&self) -> Result<(), DeciderError> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !(positive(self.tol_rank) && positive(self.tol_eq) && positive(self.tol_center)) {
            return Err(DeciderError::InvalidConfig(
                "tolerances must be positive and finite".into(),
            ));
        }
        if self.max_word_len == 0 || self.max_group_size == 0 || self.n_power_max == 0 {
            return Err(DeciderError::InvalidConfig(
                "limits must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Product of generators, letters are indices into the gate set.
#[derive(Debug, Clone)]
pub struct Word {
    pub letters: Vec<usize>,
    pub product: UnitaryGate,
}

impl Word {
    pub fn identity(d: usize) -> Self {
        Self {
            letters: Vec::new(),
            product: UnitaryGate::identity(d),
        }
    }

    pub fn generator(s: &GateSet, i: usize) -> Self {
        Self {
            letters: vec![i],
            product: s.gates()[i].clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn names(&self, s: &GateSet) -> Vec<String> {
        self.letters
            .iter()
            .map(|&i| s.gates()[i].name().to_owned())
            .collect()
    }

    fn extend(&self, s: &GateSet, g: usize) -> Self {
        let raw = self.product.matrix() * s.gates()[g].matrix();
        // unitary factors keep the product far from singular
        let product =
            project_to_special_unitary(&raw).expect("product of unitaries is nonsingular");
        let mut letters = self.letters.clone();
        letters.push(g);
        Self { letters, product }
    }
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub word: Word,
    /// `word^power ∈ ℬ ∖ Z`.
    pub power: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    Universal,
    FiniteGroup,
    /// Rejected by the commutant test.
    NotUniversal,
    Inconclusive,
}

impl VerdictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Universal => "universal",
            Self::FiniteGroup => "finite",
            Self::NotUniversal => "not_universal",
            Self::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub kernel_dim: usize,
    pub witness: Option<Witness>,
    /// Non-scalar matrix commuting with every `Ad_{U_i}`, when the commutant test fails.
    pub commutant_witness: Option<RealMatrix>,
    /// Group order: the finite-group verdict, or the classified group after a failed commutant test.
    pub order: Option<usize>,
    pub terminating_l: Option<usize>,
    pub reason: Option<String>,
    pub warnings: Vec<String>,
}

impl Verdict {
    fn new(kind: VerdictKind, kernel_dim: usize) -> Self {
        Self {
            kind,
            kernel_dim,
            witness: None,
            commutant_witness: None,
            order: None,
            terminating_l: None,
            reason: None,
            warnings: Vec::new(),
        }
    }
}

type Key = (i64, i64, i64);

/// Known group elements with a bucketed lookup on three real coordinates.
struct WordIndex {
    words: Vec<Word>,
    buckets: HashMap<Key, Vec<usize>>,
    width: f64,
    tol_eq: f64,
}

impl WordIndex {
    fn new(tol_eq: f64) -> Self {
        Self {
            words: Vec::new(),
            buckets: HashMap::new(),
            width: 10.0 * tol_eq,
            tol_eq,
        }
    }

    fn key(&self, u: &UnitaryGate) -> Key {
        let m = u.matrix();
        let f = |x: f64| (x / self.width).floor() as i64;
        (f(m[(0, 0)].re), f(m[(0, 0)].im), f(m[(1, 0)].re))
    }

    fn find(&self, u: &UnitaryGate) -> Option<usize> {
        let (a, b, c) = self.key(u);
        for da in -1..=1 {
            for db in -1..=1 {
                for dc in -1..=1 {
                    if let Some(ids) = self.buckets.get(&(a + da, b + db, c + dc)) {
                        if let Some(&i) = ids
                            .iter()
                            .find(|&&i| self.words[i].product.distance(u) <= self.tol_eq)
                        {
                            return Some(i);
                        }
                    }
                }
            }
        }
        None
    }

    /// Inserts unless already present; returns whether the word was new.
    fn insert(&mut self, w: Word) -> bool {
        if self.find(&w.product).is_some() {
            return false;
        }
        let k = self.key(&w.product);
        self.buckets.entry(k).or_default().push(self.words.len());
        self.words.push(w);
        true
    }

    fn len(&self) -> usize {
        self.words.len()
    }
}

/// Right-multiplies every frontier word by every generator, in order, and
/// keeps the products not yet in `index`.
fn next_generation(
    frontier: &[Word],
    s: &GateSet,
    index: &mut WordIndex,
    limit: usize,
) -> Result<Vec<Word>, DeciderError> {
    let candidates: Vec<Word> = frontier
        .par_iter()
        .flat_map_iter(|w| (0..s.len()).map(move |g| w.extend(s, g)))
        .collect();
    let mut fresh = Vec::new();
    for w in candidates {
        if index.insert(w.clone()) {
            if index.len() > limit {
                return Err(DeciderError::GroupTooLarge { limit });
            }
            fresh.push(w);
        }
    }
    Ok(fresh)
}

/// `current` plus every product `w · g` not already present within `tol_eq`.
/// Output is in shortlex order when `current` is.
pub fn expand_words(
    current: &[Word],
    s: &GateSet,
    tol_eq: f64,
    max_group_size: usize,
) -> Result<Vec<Word>, DeciderError> {
    let mut index = WordIndex::new(tol_eq);
    for w in current {
        index.insert(w.clone());
    }
    next_generation(current, s, &mut index, max_group_size)?;
    Ok(index.words)
}

/// Order of `⟨S⟩` by word expansion, if it closes within the limits.
fn enumerate_group(s: &GateSet, cfg: &DeciderConfig) -> Option<usize> {
    let mut index = WordIndex::new(cfg.tol_eq);
    let mut frontier: Vec<Word> = (0..s.len())
        .map(|i| Word::generator(s, i))
        .filter(|w| index.insert(w.clone()))
        .collect();
    for _ in 1..cfg.max_word_len {
        frontier = next_generation(&frontier, s, &mut index, cfg.max_group_size).ok()?;
        if frontier.is_empty() {
            return Some(index.len());
        }
    }
    None
}

const BOUNDARY_WARNING: &str =
    "an element sat on the boundary of a center ball and was treated as outside; the verdict is conservative";

/// First word in `frontier` with a power in `ℬ ∖ Z`.
fn search_frontier(
    frontier: &[Word],
    cfg: &DeciderConfig,
    warnings: &mut Vec<String>,
) -> Option<Witness> {
    let results: Vec<_> = frontier
        .par_iter()
        .map(|w| escape_search(&w.product, cfg.n_power_max, cfg.tol_center))
        .collect();
    if results.iter().any(|r| r.boundary_hit) && !warnings.iter().any(|w| w == BOUNDARY_WARNING) {
        warnings.push(BOUNDARY_WARNING.into());
    }
    results.iter().zip(frontier).find_map(|(r, w)| {
        r.power.map(|power| Witness {
            word: w.clone(),
            power,
        })
    })
}

/// SU(2) shortcut: a generator in `ℬ ∖ Z`, or one with a non-exceptional
/// spectrum, decides universality once the commutant is trivial.
fn su2_fast_path(s: &GateSet, cfg: &DeciderConfig) -> Option<Witness> {
    for (i, g) in s.gates().iter().enumerate() {
        let member = ball_membership(g);
        let candidate = if member.in_ball {
            true
        } else {
            is_exceptional_spectrum(g, N_SU2).is_ok_and(|c| !c.exceptional)
        };
        if !candidate {
            continue;
        }
        if let Some(power) = escape_search(g, N_SU2.max(cfg.n_power_max), cfg.tol_center).power {
            return Some(Witness {
                word: Word::generator(s, i),
                power,
            });
        }
    }
    None
}

pub fn decide(s: &GateSet, cfg: &DeciderConfig) -> Result<Verdict, DeciderError> {
    cfg.validate()?;
    let report = necessary_condition(s, cfg.tol_rank);
    let mut warnings = Vec::new();
    if s.d() == 2 && s.len() > 2 {
        warnings.push(format!(
            "{} generators in SU(2): the word-length cap {} is only guaranteed for two generators",
            s.len(),
            cfg.max_word_len
        ));
    }

    if !report.trivial {
        let mut v = Verdict::new(VerdictKind::NotUniversal, report.kernel_dim);
        v.commutant_witness = report.witness;
        v.reason = Some(format!(
            "adjoint commutant has dimension {} > 1",
            report.kernel_dim
        ));
        if cfg.classify_non_universal {
            v.order = enumerate_group(s, cfg);
            if v.order.is_none() {
                warnings.push(
                    "group did not close within the word and size limits; it may be infinite"
                        .into(),
                );
            }
        }
        v.warnings = warnings;
        return Ok(v);
    }

    if s.d() == 2 {
        if let Some(w) = su2_fast_path(s, cfg) {
            let mut v = Verdict::new(VerdictKind::Universal, report.kernel_dim);
            v.witness = Some(w);
            v.terminating_l = Some(1);
            v.warnings = warnings;
            return Ok(v);
        }
    }

    let mut index = WordIndex::new(cfg.tol_eq);
    let mut frontier: Vec<Word> = (0..s.len())
        .map(|i| Word::generator(s, i))
        .filter(|w| index.insert(w.clone()))
        .collect();
    let mut l = 1;
    loop {
        if let Some(w) = search_frontier(&frontier, cfg, &mut warnings) {
            let mut v = Verdict::new(VerdictKind::Universal, report.kernel_dim);
            v.witness = Some(w);
            v.terminating_l = Some(l);
            v.warnings = warnings;
            return Ok(v);
        }
        l += 1;
        let inconclusive = |reason: String, warnings: Vec<String>| {
            let mut v = Verdict::new(VerdictKind::Inconclusive, report.kernel_dim);
            v.reason = Some(reason);
            v.warnings = warnings;
            Ok(v)
        };
        if l > cfg.max_word_len {
            return inconclusive(
                format!("no decision with words up to length {}", cfg.max_word_len),
                warnings,
            );
        }
        frontier = match next_generation(&frontier, s, &mut index, cfg.max_group_size) {
            Ok(f) => f,
            Err(DeciderError::GroupTooLarge { limit }) => {
                return inconclusive(
                    format!("more than {limit} distinct elements at word length {l}"),
                    warnings,
                )
            }
            Err(e) => return Err(e),
        };
        if frontier.is_empty() {
            let mut v = Verdict::new(VerdictKind::FiniteGroup, report.kernel_dim);
            v.order = Some(index.len());
            v.terminating_l = Some(l);
            v.warnings = warnings;
            return Ok(v);
        }
    }
}

fn fmt_axis(k: [f64; 3]) -> String {
    format!("({:.4}, {:.4}, {:.4})", k[0], k[1], k[2])
}

/// What kind of gate would make a non-universal set universal.
pub fn suggest_fix(s: &GateSet, v: &Verdict) -> Result<String, DeciderError> {
    let mut out = String::new();
    match (v.kind, s.d()) {
        (VerdictKind::Universal, _) => return Err(DeciderError::AlreadyUniversal),
        (VerdictKind::NotUniversal, 2) => {
            let axes: Vec<String> = s
                .gates()
                .iter()
                .filter_map(|g| axis_angle_from_su2(g).ok())
                .filter(|a| a.phi().sin().abs() > 1e-12)
                .map(|a| fmt_axis(a.axis()))
                .collect();
            let _ = write!(
                out,
                "add a gate U(γ, k) with γ not a multiple of π (a non-exceptional γ, i.e. not kπ/i for i ≤ 6, also \
                 settles universality directly) and axis k neither parallel nor orthogonal to"
            );
            if axes.is_empty() {
                out.push_str(" any other generator axis");
            } else {
                let _ = write!(out, " {}", axes.join(", "));
            }
        }
        (VerdictKind::NotUniversal, d) => {
            let _ = write!(
                out,
                "the adjoint commutant has dimension {}; add a gate V ∈ SU({d}) whose adjoint matrix does not commute \
                 with the reported commutant witness L (a generic random gate works)",
                v.kernel_dim
            );
        }
        (VerdictKind::FiniteGroup, 2) => {
            let _ = write!(
                out,
                "the gates generate a finite group of order {}; add any gate U(ψ, k) with a non-exceptional ψ \
                 (not kπ/i for i ≤ 6) and arbitrary axis k",
                v.order.unwrap_or(0)
            );
        }
        (VerdictKind::FiniteGroup, d) => {
            let _ = write!(
                out,
                "the gates generate a finite group of order {}; add a gate of SU({d}) outside it, e.g. one whose \
                 eigenphases are not rational multiples of π",
                v.order.unwrap_or(0)
            );
        }
        (VerdictKind::Inconclusive, _) => {
            let _ = write!(
                out,
                "no decision within the limits ({}); raise max_word_len / max_group_size / n_power_max, or add a \
                 generic gate",
                v.reason.as_deref().unwrap_or("limits reached")
            );
        }
    }
    Ok(out)
}
