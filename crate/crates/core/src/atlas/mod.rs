//! Boolean-atom tallies over quasirandom feasible points, and their
//! comparison with closed-form reference probabilities.
//!
//! Points are drawn uniformly (Lebesgue measure) from the feasible Q region.
//! The map from Q to the density matrix is affine, so this is the
//! Hilbert-Schmidt measure restricted to the family.

mod checkpoint;
mod expr;
mod reference;
mod report;
mod tally;

use thiserror::Error;

pub use checkpoint::{check_resumable, checkpoint_load, checkpoint_save, from_json, to_json, CHECKPOINT_VERSION};
pub use expr::{BooleanExpr, ExprError};
pub use reference::{eval_exact_d3, exact_atom_masses_d3, exact_atoms_d3, exact_reference, reference_table, ExactReference, RefKind};
pub use report::{atom_rows, binomial_se, closed_forms_within, compare_report, write_csv, AtomRow, EstimateReport, ReportRow};
pub use tally::{assignment_label, assignment_name, canonical_atom_order, eval_masses, extend, tally, AtomTally};

use crate::criteria::CriteriaError;
use crate::quasirandom::SequenceError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AtlasError {
    #[error("tally has no feasible points")]
    EmptyTally,
    #[error("tallies differ in family, predicates, sequence or thresholds")]
    IncompatibleTallies,
    #[error("raw index range overflows")]
    IndexOverflow,
    #[error("unknown reference {0:?}")]
    UnknownReference(String),
    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),
    #[error("checkpoint does not match the requested run: {0} differs")]
    CheckpointMismatch(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}
