//! Subcommand implementations for the lab binary.

pub mod bench;
pub mod gen_data;
pub mod mismatch;
pub mod phase_export;
pub mod sdp_run;
pub mod train_eval;
