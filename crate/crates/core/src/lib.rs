//! Deciding universality of one-qudit gate sets.
//!
//! [`decider::decide`] runs the full procedure on a [`commutant::GateSet`];
//! [`oracle`] holds independent brute-force checks and [`cli`] the
//! `qudecide` command line.

pub mod adjoint;
pub mod ballspec;
pub mod cli;
pub mod commutant;
pub mod decider;
pub mod linalg;
pub mod oracle;
pub mod su2geom;

pub use commutant::GateSet;
pub use decider::{decide, DeciderConfig, Verdict, VerdictKind};
pub use linalg::UnitaryGate;
