//! Diversity indices and life-cycle detection for patent classification
//! time series.
//!
//! Given a corpus of patent records — each tagged with a year and a set of
//! classification codes — this crate derives per-year code distributions
//! and computes the Rao-Stirling family of diversity indices over them,
//! optionally weighted by a disparity matrix of 1 − cosine distances
//! between codes. Annual series of indices or entity counts can then be
//! detrended, smoothed with moving averages, decomposed into a periodogram
//! to locate dominant multi-year cycles, and correlated pairwise with
//! Spearman rank statistics.
//!
//! ```
//! use patdiv::corpus::YearlyDistribution;
//! use patdiv::indices::{gini_simpson, simpson};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let dist = YearlyDistribution::new(
//!     1990,
//!     [("H01L".to_string(), 0.5), ("C01B".to_string(), 0.3), ("C23C".to_string(), 0.2)],
//!     10,
//! )?;
//! assert!((simpson(&dist) - 0.38).abs() < 1e-12);
//! assert!((simpson(&dist) + gini_simpson(&dist) - 1.0).abs() < 1e-12);
//! # Ok(())
//! # }
//! ```
//!
//! A synthetic-corpus generator with known ground truth ([`synth`]) closes
//! the loop: corpora with a configured diversity cycle and inventor
//! lead/lag exercise the whole pipeline end to end. The `patdiv` CLI
//! exposes every step as a subcommand over the CSV formats in [`io`].

pub mod corpus;
pub mod indices;
pub mod io;
mod kahan;
pub mod proximity;
pub mod rankstats;
pub mod series;
pub mod spectral;
pub mod synth;

pub use corpus::{build_distributions, entity_counts, Corpus, PatentRecord, YearlyDistribution};
pub use indices::{gini_simpson, rao_stirling, simpson, IndexKind, MissingDisparity};
pub use proximity::{build_disparity_from_cooccurrence, cosine, ClassVector, DisparityMatrix};
pub use rankstats::{correlation_matrix, spearman, CorrelationMatrix, CorrelationResult};
pub use series::AnnualSeries;
pub use spectral::{detrend_diff, dominant_cycle, moving_average, periodogram, Periodogram};
pub use synth::SynthSpec;
