//! Semantic checks: virtual ABoxes, chase-based certain answers and the
//! comparison of two specifications on sample data.

pub mod abox;
pub mod answer;
pub mod chase;
pub mod insep;

pub use abox::{virtual_abox, ABox};
pub use answer::{
    certain_answers_cq, certain_answers_datalog, certain_answers_spec, certain_answers_spec_all,
    certain_answers_spec_chase, model_answers, Answers, DEFAULT_DEPTH,
};
pub use chase::{chase, ChaseModel, ChaseOptions, Reasoner, INCONSISTENT_MARKER};
pub use insep::{atomic_queries, check_inseparable, Comparison, InsepReport, Relation};
