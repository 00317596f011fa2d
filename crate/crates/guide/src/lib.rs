//! Doc-test harness for the book under `book/`.
//!
//! mdBook renders the chapters but cannot execute their Rust snippets, so
//! each chapter is also included here as module documentation:
//! `cargo test -p patdiv-guide --doc` compiles and runs every ```rust
//! block in the book against the current `patdiv` API. A snippet that
//! drifts from the code fails the workspace test run.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/diversity-indices.md")]
pub mod diversity_indices {}

#[doc = include_str!("../../../book/src/disparity.md")]
pub mod disparity {}

#[doc = include_str!("../../../book/src/annual-series.md")]
pub mod annual_series {}

#[doc = include_str!("../../../book/src/spectral-analysis.md")]
pub mod spectral_analysis {}

#[doc = include_str!("../../../book/src/correlations.md")]
pub mod correlations {}

#[doc = include_str!("../../../book/src/synthetic-corpora.md")]
pub mod synthetic_corpora {}

#[doc = include_str!("../../../book/src/file-formats.md")]
pub mod file_formats {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
