//! The Lovász Local Lemma as data, as a decision procedure and as a
//! constructive solver.
//!
//! Two events are treated as dependent iff their supports intersect.

mod certificate;
mod solver;
mod system;

use thiserror::Error;

pub use certificate::{
    check_certificate, CertificateReport, ClassSlack, LllCertificate, LogNum, Verdict,
    MARGINAL_SLACK,
};
pub use solver::{resample_solve, SolveOutcome, DEFAULT_MAX_ROUNDS};
pub use system::{
    dependency_degrees, enumerate_probability, event_probability, rational_ln, BadEvent,
    ConstraintSystem, EventKind, DEFAULT_ENUMERATION_CAP,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LllError {
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("invalid constraint system: {0}")]
    InvalidSystem(String),
    #[error("event {event}: support has more than {cap} assignments")]
    CapExceeded { event: usize, cap: u64 },
}
