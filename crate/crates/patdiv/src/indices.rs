//! The diversity-index family over a single year's classification
//! distribution.
//!
//! For proportions `p_i` and a disparity matrix `d_ij`:
//!
//! ```text
//! simpson      = Σ_i p_i²                  (= Herfindahl-Hirschman)
//! gini_simpson = 1 − simpson = Σ_{i≠j} p_i p_j   (= variety)
//! rao_stirling = Σ_{ij} p_i p_j d_ij
//! ```
//!
//! The diagonal never contributes to `rao_stirling` because `d_ii = 0`, so
//! the ordered-pair sum equals twice the unordered off-diagonal sum. With
//! all off-diagonal disparity equal to one, `rao_stirling` collapses to
//! `gini_simpson`; with disparities in [0, 1] it is attenuated term by term,
//! giving `0 ≤ rao_stirling ≤ gini_simpson`.
//!
//! Sums are accumulated with compensated summation so these identities hold
//! to 1e-12 even for distributions with thousands of classes.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::corpus::YearlyDistribution;
use crate::kahan::KahanSum;
use crate::proximity::DisparityMatrix;
use crate::series::AnnualSeries;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndicesError {
    #[error("code {0:?} is absent from the disparity matrix")]
    MissingCode(String),
    #[error("rao_stirling requested without a disparity matrix")]
    MatrixRequired,
    #[error("duplicate year {0} in distribution collection")]
    DuplicateYear(i32),
    #[error("no index kinds requested")]
    NoKinds,
}

/// The index family. `Variety`/`GiniSimpson` are the same number, as are
/// `Simpson`/`Herfindahl`; both names are kept because the literature uses
/// them interchangeably.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexKind {
    RaoStirling,
    Variety,
    GiniSimpson,
    Simpson,
    Herfindahl,
}

impl IndexKind {
    pub const ALL: [IndexKind; 5] = [
        IndexKind::RaoStirling,
        IndexKind::Variety,
        IndexKind::GiniSimpson,
        IndexKind::Simpson,
        IndexKind::Herfindahl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IndexKind::RaoStirling => "rao_stirling",
            IndexKind::Variety => "variety",
            IndexKind::GiniSimpson => "gini_simpson",
            IndexKind::Simpson => "simpson",
            IndexKind::Herfindahl => "herfindahl",
        }
    }

    pub fn parse(name: &str) -> Option<IndexKind> {
        IndexKind::ALL.iter().copied().find(|k| k.name() == name)
    }
}

impl std::fmt::Display for IndexKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Simpson (Herfindahl-Hirschman) concentration: Σ p_i².
///
/// Equals 1 for a single class and 1/k for k equiprobable classes.
pub fn simpson(dist: &YearlyDistribution) -> f64 {
    let mut acc = KahanSum::new();
    for &p in dist.proportions().values() {
        acc.add(p * p);
    }
    acc.total()
}

/// Alias for [`simpson`].
pub fn herfindahl(dist: &YearlyDistribution) -> f64 {
    simpson(dist)
}

/// Gini-Simpson diversity (variety): 1 − Σ p_i² = Σ_{i≠j} p_i p_j.
pub fn gini_simpson(dist: &YearlyDistribution) -> f64 {
    1.0 - simpson(dist)
}

/// Alias for [`gini_simpson`].
pub fn variety(dist: &YearlyDistribution) -> f64 {
    gini_simpson(dist)
}

/// Policy for codes present in a distribution but absent from the
/// disparity matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum MissingDisparity {
    /// Fail with [`IndicesError::MissingCode`] naming the first offender.
    #[default]
    Error,
    /// Substitute a constant disparity for every pair involving an unknown
    /// code (1.0 treats unknown codes as maximally distant).
    Substitute(f64),
}

/// Rao-Stirling value plus the codes that fell back to a substituted
/// disparity (empty under the strict policy).
#[derive(Debug, Clone, PartialEq)]
pub struct RaoStirlingResult {
    pub value: f64,
    pub substituted: BTreeSet<String>,
}

/// Rao-Stirling diversity Σ_{ij} p_i p_j d_ij under the strict
/// missing-code policy.
pub fn rao_stirling(
    dist: &YearlyDistribution,
    disparity: &DisparityMatrix,
) -> Result<f64, IndicesError> {
    rao_stirling_with(dist, disparity, MissingDisparity::Error).map(|r| r.value)
}

/// Rao-Stirling diversity with an explicit missing-code policy.
///
/// The sum runs over ordered pairs; the diagonal contributes nothing since
/// `d_ii = 0`, and each unordered pair is therefore counted twice.
/// Substitutions are reported in the result and logged as warnings.
pub fn rao_stirling_with(
    dist: &YearlyDistribution,
    disparity: &DisparityMatrix,
    missing: MissingDisparity,
) -> Result<RaoStirlingResult, IndicesError> {
    let codes: Vec<&str> = dist.proportions().keys().map(String::as_str).collect();
    let probs: Vec<f64> = dist.proportions().values().copied().collect();

    let mut substituted = BTreeSet::new();
    let mut lookup: Vec<Option<usize>> = Vec::with_capacity(codes.len());
    for code in &codes {
        match disparity.index_of(code) {
            Some(idx) => lookup.push(Some(idx)),
            None => match missing {
                MissingDisparity::Error => {
                    return Err(IndicesError::MissingCode(code.to_string()))
                }
                MissingDisparity::Substitute(_) => {
                    substituted.insert(code.to_string());
                    lookup.push(None);
                }
            },
        }
    }
    if !substituted.is_empty() {
        let constant = match missing {
            MissingDisparity::Substitute(c) => c,
            MissingDisparity::Error => unreachable!(),
        };
        log::warn!(
            "rao_stirling: {} code(s) absent from disparity matrix in year {}, substituting d = {}: {:?}",
            substituted.len(),
            dist.year(),
            constant,
            substituted
        );
    }

    // Upper triangle only; the symmetric matrix makes the ordered-pair sum
    // twice the unordered one.
    let mut acc = KahanSum::new();
    for i in 0..codes.len() {
        for j in (i + 1)..codes.len() {
            let d = match (lookup[i], lookup[j]) {
                (Some(a), Some(b)) => disparity.get_by_index(a, b),
                // Distinct codes, at least one unknown: substituted constant.
                _ => match missing {
                    MissingDisparity::Substitute(c) => c,
                    MissingDisparity::Error => unreachable!(),
                },
            };
            acc.add(2.0 * probs[i] * probs[j] * d);
        }
    }
    Ok(RaoStirlingResult { value: acc.total(), substituted })
}

/// Vectorizes the indices over a year-ordered distribution collection into
/// one [`AnnualSeries`] per requested kind, named after the kind. Years
/// without a distribution become missing points.
pub fn index_series(
    dists: &[YearlyDistribution],
    kinds: &[IndexKind],
    disparity: Option<&DisparityMatrix>,
    missing: MissingDisparity,
) -> Result<Vec<AnnualSeries>, IndicesError> {
    if kinds.is_empty() {
        return Err(IndicesError::NoKinds);
    }
    if kinds.contains(&IndexKind::RaoStirling) && disparity.is_none() {
        return Err(IndicesError::MatrixRequired);
    }
    let mut seen_years = BTreeSet::new();
    for dist in dists {
        if !seen_years.insert(dist.year()) {
            return Err(IndicesError::DuplicateYear(dist.year()));
        }
    }

    let mut out = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let mut points = Vec::with_capacity(dists.len());
        for dist in dists {
            let value = match kind {
                IndexKind::Simpson | IndexKind::Herfindahl => simpson(dist),
                IndexKind::GiniSimpson | IndexKind::Variety => gini_simpson(dist),
                IndexKind::RaoStirling => {
                    let matrix = disparity.expect("checked above");
                    rao_stirling_with(dist, matrix, missing)?.value
                }
            };
            points.push((dist.year(), Some(value)));
        }
        let series = AnnualSeries::new(kind.name(), points)
            .expect("distribution years are strictly increasing and indices finite");
        out.push(series);
    }
    Ok(out)
}
