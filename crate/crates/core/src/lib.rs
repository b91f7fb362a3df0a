//! Evaluation harness for visually prompted vision-language tasks.
//!
//! The crate renders parameterised visual markers onto clean images, pushes
//! the stimuli through a controlled JPEG stage, queries models (live
//! OpenAI-compatible endpoints or a seeded synthetic responder), and measures
//! how much accuracy and leaderboard rank depend on those non-semantic
//! choices.
//!
//! | module | role |
//! |---|---|
//! | [`model`] | task items, datasets, records, correctness matrix |
//! | [`marker`] | marker styles and deterministic rasterisation |
//! | [`forge`] | raw depth / keypoint corpora to task items |
//! | [`jpeg`] | pinned baseline JPEG encoder and the compression stage |
//! | [`infer`] | prompts, answer parsing, transports, cache, sweeps |
//! | [`stats`] | Wilson and bootstrap intervals, variance ratio, splits, ranks |
//! | [`board`] | leaderboards, manipulation search, chart reports |
//! | [`pipeline`] | run configuration and the end-to-end driver |
//! | [`cli`] | subcommands behind the `vpeval` binary |
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod board;
pub mod cli;
pub mod error;
pub mod forge;
pub mod infer;
pub mod jpeg;
pub mod marker;
pub mod model;
pub mod pipeline;
pub mod rng;
pub mod stats;
pub mod store;
pub mod synth;

pub use error::{Error, Result};
pub use model::{
    build_matrix, validate_dataset, AnnotatedPoint, Compression, Condition, CorrectnessMatrix,
    EvalDataset, EvalRecord, TaskItem, TaskKind,
};
