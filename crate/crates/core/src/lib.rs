//! Symbolic reversibility decisions for infinite trees.
//!
//! A structure is reversible when every bijective endomorphism (condensation)
//! is an automorphism. This crate describes trees symbolically, decides
//! reversibility for a fragment of well-founded trees, and emits certificates
//! with witness condensations that can be checked on finite windows.

pub mod cardinal;
pub mod classify;
pub mod corpus;
pub mod expr;
pub mod ordinal;
pub mod seq;
pub mod wellorder;
pub mod window;

pub use cardinal::{card_product, Card, CardValue, TriBool};
pub use classify::{
    classify, cross_check, explain, Certificate, ConsistencyReport, RuleId, Verdict, Witness,
};
pub use corpus::{run_corpus, CorpusReport};
pub use expr::{normalize, parse_expr, render_expr, ParseError, Part, TreeExpr};
pub use ordinal::Ordinal;
pub use seq::{is_reversible_sequence, SeqDescriptor, SeqVerdict};
pub use wellorder::{classify_wellorder_union, WellOrderFamily};
pub use window::{
    check_condensation_window, instantiate_witness, verify_witness, WindowParams, WindowReport,
    WitnessDescriptor,
};
