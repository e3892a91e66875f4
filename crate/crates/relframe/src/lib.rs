//! Toolkit for relevance logic over relation-algebraic frames.
//!
//! The crate provides:
//!
//! * [`syntax`] — predicate terms (the equational language of relation
//!   algebras extended with relevance-logic connectives), a parser, a
//!   printer, and desugaring of derived operators;
//! * [`frames`] — finite frames, their complex algebras over bit-mask
//!   subset values, frame conditions, and classification;
//! * [`racheck`] — equational axiom checking on complex algebras,
//!   relational-basis existence, and the diamond property;
//! * [`validity`] — bit-parallel validity checking of predicates over
//!   frames, with counterexample search;
//! * [`sequent`] — an n-variable sequent calculus: proof-script checking,
//!   derived-rule macro expansion, a corpus of built-in proofs, and a
//!   bounded backward proof search;
//! * [`translate`] — first-order formulas over binary relation symbols,
//!   their standard translations into predicate terms, and a direct
//!   model-theoretic evaluator used as a semantic oracle;
//! * [`census`] — enumeration and counting of frames by symmetry type,
//!   with canonical forms and random sampling.

pub mod census;
pub mod frames;
pub mod racheck;
pub mod sequent;
pub mod syntax;
pub mod translate;
pub mod validity;

pub use frames::{builtin_frame, Frame, SubsetValue};
pub use syntax::{desugar, parse_predicate, PredicateTerm};
