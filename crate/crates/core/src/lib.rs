//! Merge-conflict resolution with few-shot prompts.
//!
//! The pipeline curates conflict descriptions from version-control history
//! and compiler diagnostics ([`mining`]), renders them into token-budgeted
//! prompts ([`prompt`]), sends them to a completion backend ([`backend`]) and
//! scores the suggested resolutions ([`eval`]). [`stringmerge`] is a symbolic
//! baseline that needs no model at all.

pub mod backend;
pub mod editseq;
pub mod eval;
pub mod mining;
pub mod model;
pub mod prompt;
pub mod stringmerge;
