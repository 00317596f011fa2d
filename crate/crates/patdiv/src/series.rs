//! Year-indexed numeric series.
//!
//! An [`AnnualSeries`] holds one value per calendar year, with explicit
//! missing markers for years inside the covered span that have no data.
//! Missing is never conflated with zero: a year with no patents has a
//! missing diversity value, not a diversity of 0.
//!
//! Series are stored in canonical form: the points cover every year from
//! the first to the last year that carries a value, interior years without
//! data are explicit `None` entries, and leading/trailing missing years are
//! trimmed. Two series constructed from the same (year, value) data compare
//! equal regardless of how the gaps were spelled on input.

use thiserror::Error;

/// Errors from constructing or manipulating an [`AnnualSeries`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("years must be strictly increasing (year {0} repeated or out of order)")]
    NonIncreasingYears(i32),
    #[error("non-finite value at year {0}")]
    NonFiniteValue(i32),
}

/// One point of an annual series: a year and an optional value.
pub type SeriesPoint = (i32, Option<f64>);

/// A named, year-indexed series of finite `f64` values with explicit
/// missing markers.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnualSeries {
    name: String,
    points: Vec<SeriesPoint>,
}

impl AnnualSeries {
    /// Builds a series from (year, optional value) pairs.
    ///
    /// Years must be strictly increasing and values finite. The result is
    /// canonicalized: interior gaps become explicit `None`, edges are
    /// trimmed to the first/last present value.
    pub fn new(
        name: impl Into<String>,
        points: impl IntoIterator<Item = SeriesPoint>,
    ) -> Result<Self, SeriesError> {
        let mut raw: Vec<SeriesPoint> = Vec::new();
        for (year, value) in points {
            if let Some(last) = raw.last() {
                if year <= last.0 {
                    return Err(SeriesError::NonIncreasingYears(year));
                }
            }
            if let Some(v) = value {
                if !v.is_finite() {
                    return Err(SeriesError::NonFiniteValue(year));
                }
            }
            raw.push((year, value));
        }

        // Trim leading/trailing missing, then fill interior gaps explicitly.
        let first = raw.iter().position(|(_, v)| v.is_some());
        let mut canonical = Vec::new();
        if let Some(first) = first {
            let last = raw.iter().rposition(|(_, v)| v.is_some()).unwrap();
            let mut expect = raw[first].0;
            for &(year, value) in &raw[first..=last] {
                while expect < year {
                    canonical.push((expect, None));
                    expect += 1;
                }
                canonical.push((year, value));
                expect = year + 1;
            }
        }
        Ok(AnnualSeries { name: name.into(), points: canonical })
    }

    /// Builds a series with every listed year present.
    pub fn from_values(
        name: impl Into<String>,
        values: impl IntoIterator<Item = (i32, f64)>,
    ) -> Result<Self, SeriesError> {
        Self::new(name, values.into_iter().map(|(y, v)| (y, Some(v))))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rename(&self, name: impl Into<String>) -> Self {
        AnnualSeries { name: name.into(), points: self.points.clone() }
    }

    /// All points in year order, one per year of the covered span.
    pub fn points(&self) -> &[SeriesPoint] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of years carrying a value.
    pub fn len(&self) -> usize {
        self.points.iter().filter(|(_, v)| v.is_some()).count()
    }

    /// Inclusive (first, last) year of the span, if any point exists.
    pub fn span(&self) -> Option<(i32, i32)> {
        match (self.points.first(), self.points.last()) {
            (Some(&(a, _)), Some(&(b, _))) => Some((a, b)),
            _ => None,
        }
    }

    /// Value at a year; `None` if the year is missing or outside the span.
    pub fn value_at(&self, year: i32) -> Option<f64> {
        let (first, _) = self.span()?;
        let idx = usize::try_from(year.checked_sub(first)?).ok()?;
        self.points.get(idx).and_then(|&(_, v)| v)
    }

    /// Iterates over the present (year, value) pairs.
    pub fn present(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.points.iter().filter_map(|&(y, v)| v.map(|v| (y, v)))
    }

    /// Splits the series into maximal runs of consecutive years that all
    /// carry a value. Detrending, moving averages, and periodograms operate
    /// on these runs and never bridge a gap.
    pub fn contiguous_runs(&self) -> Vec<Run> {
        let mut runs = Vec::new();
        let mut current: Option<Run> = None;
        for &(year, value) in &self.points {
            match value {
                Some(v) => match current.as_mut() {
                    Some(run) => run.values.push(v),
                    None => current = Some(Run { start_year: year, values: vec![v] }),
                },
                None => {
                    if let Some(run) = current.take() {
                        runs.push(run);
                    }
                }
            }
        }
        if let Some(run) = current {
            runs.push(run);
        }
        runs
    }
}

/// A maximal gap-free stretch of an [`AnnualSeries`].
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub start_year: i32,
    pub values: Vec<f64>,
}

impl Run {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.values.len() as i32).map(move |offset| self.start_year + offset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaps_become_explicit_and_edges_trim() {
        let a = AnnualSeries::new(
            "a",
            vec![(1989, None), (1990, Some(1.0)), (1992, Some(2.0)), (1994, None)],
        )
        .unwrap();
        assert_eq!(
            a.points(),
            &[(1990, Some(1.0)), (1991, None), (1992, Some(2.0))]
        );
        assert_eq!(a.span(), Some((1990, 1992)));
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn equivalent_inputs_compare_equal() {
        let sparse = AnnualSeries::new("x", vec![(1, Some(1.0)), (3, Some(3.0))]).unwrap();
        let explicit =
            AnnualSeries::new("x", vec![(1, Some(1.0)), (2, None), (3, Some(3.0))]).unwrap();
        assert_eq!(sparse, explicit);
    }

    #[test]
    fn rejects_out_of_order_years() {
        let err = AnnualSeries::from_values("x", vec![(1990, 1.0), (1990, 2.0)]).unwrap_err();
        assert_eq!(err, SeriesError::NonIncreasingYears(1990));
    }

    #[test]
    fn rejects_non_finite() {
        let err = AnnualSeries::from_values("x", vec![(1990, f64::NAN)]).unwrap_err();
        assert_eq!(err, SeriesError::NonFiniteValue(1990));
    }

    #[test]
    fn all_missing_collapses_to_empty() {
        let s = AnnualSeries::new("x", vec![(1990, None), (1991, None)]).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.span(), None);
    }

    #[test]
    fn runs_split_on_gaps() {
        let s = AnnualSeries::new(
            "x",
            vec![
                (1, Some(1.0)),
                (2, Some(2.0)),
                (3, None),
                (4, Some(4.0)),
            ],
        )
        .unwrap();
        let runs = s.contiguous_runs();
        assert_eq!(runs.len(), 2);
        assert_eq!(runs[0], Run { start_year: 1, values: vec![1.0, 2.0] });
        assert_eq!(runs[1], Run { start_year: 4, values: vec![4.0] });
    }

    #[test]
    fn value_at_respects_gaps() {
        let s = AnnualSeries::new("x", vec![(1, Some(1.0)), (3, Some(3.0))]).unwrap();
        assert_eq!(s.value_at(1), Some(1.0));
        assert_eq!(s.value_at(2), None);
        assert_eq!(s.value_at(3), Some(3.0));
        assert_eq!(s.value_at(0), None);
        assert_eq!(s.value_at(9), None);
    }
}
