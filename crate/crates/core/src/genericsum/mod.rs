//! Generic orthogonal sums: graded restriction of similitudes along the
//! weight filtration, the three outer-conditions decision procedure for
//! diagonal forms with independent weights, and explicit example
//! constructors over the rational and Gaussian base fields.

pub mod decide;
pub mod examples;
pub mod grading;

pub use decide::{
    decide_out_generic, detect_family, odd_family_a3, Family, OutReport, OutStatus,
    OutcomeEntry, PatternOutcome, PatternRecord, SimilitudeSummary,
};
pub use examples::{
    construct_even_example, decide_realizable_discriminant, verify_unitary_example,
    EvenExample,
};
pub use grading::{
    graded_restriction, lex_compare, norm_nu, FormalTerm, FormalVector, GradedBlocks,
    ValueVector,
};
