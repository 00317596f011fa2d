//! Patent corpus data model.
//!
//! A [`Corpus`] is an ordered collection of [`PatentRecord`]s. From it the
//! rest of the crate derives per-year classification distributions (the
//! `p_i` that the diversity indices consume) and per-year entity counts
//! (patents, distinct inventors, distinct assignees).
//!
//! Counting is whole-counting of deduplicated (patent, code) pairs: a patent
//! carrying k distinct codes contributes one assignment to each of the k
//! codes. Fractional (1/k) counting is deliberately not offered.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::series::AnnualSeries;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorpusError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("patent id is empty")]
    EmptyId,
    #[error("duplicate patent id {0:?}")]
    DuplicateId(String),
    #[error("patent {0:?} has no classification codes")]
    NoClasses(String),
    #[error("patent {id:?} has an empty string in its {field} set")]
    EmptyEntry { id: String, field: &'static str },
    #[error("year window {0}..={1} outside corpus years")]
    WindowOutsideCorpus(i32, i32),
    #[error("year window {0}..={1} is inverted")]
    InvertedWindow(i32, i32),
    #[error("proportions for year {year} sum to {sum}, not 1")]
    ProportionsDoNotSumToOne { year: i32, sum: f64 },
    #[error("non-positive proportion for code {code:?} in year {year}")]
    NonPositiveProportion { year: i32, code: String },
}

/// One patent: an opaque unique id, a calendar year, and sets of
/// classification codes, inventor ids, and assignee ids.
///
/// The sets are deduplicated and may not contain empty strings; `classes`
/// must be non-empty. Inventors and assignees may be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatentRecord {
    pub id: String,
    pub year: i32,
    pub classes: BTreeSet<String>,
    pub inventors: BTreeSet<String>,
    pub assignees: BTreeSet<String>,
}

impl PatentRecord {
    /// Validates and builds a record. Duplicate entries in the iterators are
    /// collapsed; empty strings are rejected.
    pub fn new(
        id: impl Into<String>,
        year: i32,
        classes: impl IntoIterator<Item = String>,
        inventors: impl IntoIterator<Item = String>,
        assignees: impl IntoIterator<Item = String>,
    ) -> Result<Self, CorpusError> {
        let id = id.into();
        if id.is_empty() {
            return Err(CorpusError::EmptyId);
        }
        let classes = collect_set(&id, "classes", classes)?;
        if classes.is_empty() {
            return Err(CorpusError::NoClasses(id));
        }
        let inventors = collect_set(&id, "inventors", inventors)?;
        let assignees = collect_set(&id, "assignees", assignees)?;
        Ok(PatentRecord { id, year, classes, inventors, assignees })
    }
}

fn collect_set(
    id: &str,
    field: &'static str,
    items: impl IntoIterator<Item = String>,
) -> Result<BTreeSet<String>, CorpusError> {
    let mut set = BTreeSet::new();
    for item in items {
        if item.is_empty() {
            return Err(CorpusError::EmptyEntry { id: id.to_string(), field });
        }
        set.insert(item);
    }
    Ok(set)
}

/// A non-empty collection of patent records with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    records: Vec<PatentRecord>,
    year_range: (i32, i32),
}

impl Corpus {
    /// Builds a corpus, checking id uniqueness and deriving the year range.
    pub fn new(records: Vec<PatentRecord>) -> Result<Self, CorpusError> {
        if records.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        let mut seen = HashSet::with_capacity(records.len());
        let mut min_year = i32::MAX;
        let mut max_year = i32::MIN;
        for record in &records {
            if !seen.insert(record.id.as_str()) {
                return Err(CorpusError::DuplicateId(record.id.clone()));
            }
            min_year = min_year.min(record.year);
            max_year = max_year.max(record.year);
        }
        Ok(Corpus { records, year_range: (min_year, max_year) })
    }

    pub fn records(&self) -> &[PatentRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Inclusive (min, max) year over all records.
    pub fn year_range(&self) -> (i32, i32) {
        self.year_range
    }

    /// Sorted list of distinct classification codes in the corpus.
    pub fn distinct_codes(&self) -> Vec<String> {
        let mut codes = BTreeSet::new();
        for record in &self.records {
            codes.extend(record.classes.iter().cloned());
        }
        codes.into_iter().collect()
    }
}

/// Per-year mapping from classification code to its proportion of that
/// year's (patent, code) assignments.
#[derive(Debug, Clone, PartialEq)]
pub struct YearlyDistribution {
    year: i32,
    proportions: BTreeMap<String, f64>,
    assignment_count: u64,
}

impl YearlyDistribution {
    /// Tolerance for the sum-to-one invariant.
    pub const SUM_TOLERANCE: f64 = 1e-9;

    /// Builds a distribution from explicit proportions. Every proportion
    /// must be strictly positive and the sum must be 1 within 1e-9.
    pub fn new(
        year: i32,
        proportions: impl IntoIterator<Item = (String, f64)>,
        assignment_count: u64,
    ) -> Result<Self, CorpusError> {
        let proportions: BTreeMap<String, f64> = proportions.into_iter().collect();
        let mut sum = 0.0;
        for (code, &p) in &proportions {
            if !p.is_finite() || p <= 0.0 {
                return Err(CorpusError::NonPositiveProportion { year, code: code.clone() });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(CorpusError::ProportionsDoNotSumToOne { year, sum });
        }
        Ok(YearlyDistribution { year, proportions, assignment_count })
    }

    /// Builds a distribution from per-code assignment counts.
    pub fn from_counts(
        year: i32,
        counts: impl IntoIterator<Item = (String, u64)>,
    ) -> Result<Self, CorpusError> {
        let counts: BTreeMap<String, u64> = counts.into_iter().collect();
        let total: u64 = counts.values().sum();
        let proportions = counts
            .into_iter()
            .filter(|&(_, c)| c > 0)
            .map(|(code, c)| (code, c as f64 / total as f64));
        Self::new(year, proportions, total)
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    /// Code → proportion map; zero-count codes are absent, every stored
    /// proportion is > 0.
    pub fn proportions(&self) -> &BTreeMap<String, f64> {
        &self.proportions
    }

    /// Total (patent, code) assignments behind this distribution.
    pub fn assignment_count(&self) -> u64 {
        self.assignment_count
    }

    /// Number of distinct codes with nonzero proportion.
    pub fn support(&self) -> usize {
        self.proportions.len()
    }
}

/// Derives one [`YearlyDistribution`] per year holding at least one patent.
///
/// When `year_window` is given, only years inside the inclusive window are
/// considered; the window must overlap the corpus year range. Years with no
/// patents produce no distribution — they surface as missing values
/// downstream, never as zero diversity.
pub fn build_distributions(
    corpus: &Corpus,
    year_window: Option<(i32, i32)>,
) -> Result<Vec<YearlyDistribution>, CorpusError> {
    let (lo, hi) = match year_window {
        Some((lo, hi)) => {
            if lo > hi {
                return Err(CorpusError::InvertedWindow(lo, hi));
            }
            let (min, max) = corpus.year_range();
            if hi < min || lo > max {
                return Err(CorpusError::WindowOutsideCorpus(lo, hi));
            }
            (lo, hi)
        }
        None => corpus.year_range(),
    };

    let mut per_year: BTreeMap<i32, BTreeMap<String, u64>> = BTreeMap::new();
    for record in corpus.records() {
        if record.year < lo || record.year > hi {
            continue;
        }
        let counts = per_year.entry(record.year).or_default();
        for code in &record.classes {
            *counts.entry(code.clone()).or_insert(0) += 1;
        }
    }

    per_year
        .into_iter()
        .map(|(year, counts)| YearlyDistribution::from_counts(year, counts))
        .collect()
}

/// Per-year counts of patents, distinct inventors, and distinct assignees.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityCounts {
    pub patents: AnnualSeries,
    pub inventors: AnnualSeries,
    pub assignees: AnnualSeries,
}

/// Counts patents, distinct inventor ids, and distinct assignee ids per
/// year. Identity is exact string equality; years with no patents are
/// missing from all three series.
pub fn entity_counts(corpus: &Corpus) -> EntityCounts {
    struct YearTally<'a> {
        patents: u64,
        inventors: HashSet<&'a str>,
        assignees: HashSet<&'a str>,
    }

    let mut per_year: BTreeMap<i32, YearTally> = BTreeMap::new();
    for record in corpus.records() {
        let tally = per_year.entry(record.year).or_insert_with(|| YearTally {
            patents: 0,
            inventors: HashSet::new(),
            assignees: HashSet::new(),
        });
        tally.patents += 1;
        tally.inventors.extend(record.inventors.iter().map(String::as_str));
        tally.assignees.extend(record.assignees.iter().map(String::as_str));
    }

    let series = |name: &str, pick: fn(&YearTally) -> u64| {
        AnnualSeries::from_values(
            name,
            per_year.iter().map(|(&year, tally)| (year, pick(tally) as f64)),
        )
        .expect("per-year counts are finite and year-sorted")
    };
    EntityCounts {
        patents: series("patents", |t| t.patents),
        inventors: series("inventors", |t| t.inventors.len() as u64),
        assignees: series("assignees", |t| t.assignees.len() as u64),
    }
}
