//! Spearman rank-order correlation between annual series, with two-tailed
//! significance and correlation matrices across many series.
//!
//! Spearman's rho is the Pearson correlation of the rank vectors, with
//! average ranks for ties. Significance uses the t approximation
//! `t = rho·√((n−2)/(1−rho²))` with n−2 degrees of freedom, two-tailed;
//! rho = ±1 yields p = 0. Matrix cells star at the 0.05 (`*`) and 0.01
//! (`**`) levels.
//!
//! Years missing in either series are deleted pairwise per cell, so each
//! correlation uses the maximal common support and reports its own n.

use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::series::AnnualSeries;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RankStatsError {
    #[error("need at least 3 common years, found {0}")]
    TooFewCommonYears(usize),
    #[error("undefined correlation: {0:?} has zero rank variance")]
    ZeroVariance(String),
    #[error("need at least 2 series, found {0}")]
    TooFewSeries(usize),
    #[error("duplicate series name {0:?}")]
    DuplicateName(String),
}

/// Significance stars at the two-tailed 0.05 / 0.01 levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stars {
    None,
    P05,
    P01,
}

impl Stars {
    pub fn from_p_value(p: f64) -> Stars {
        if p <= 0.01 {
            Stars::P01
        } else if p <= 0.05 {
            Stars::P05
        } else {
            Stars::None
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stars::None => "",
            Stars::P05 => "*",
            Stars::P01 => "**",
        }
    }
}

impl std::fmt::Display for Stars {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One Spearman correlation: rho, the number of paired observations, the
/// two-tailed p-value, and its stars.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult {
    pub rho: f64,
    pub n: usize,
    pub p_value: f64,
    pub stars: Stars,
}

impl CorrelationResult {
    fn new(rho: f64, n: usize, p_value: f64) -> Self {
        CorrelationResult { rho, n, p_value, stars: Stars::from_p_value(p_value) }
    }

    /// The definitional self-correlation cell: rho = 1 without stars, as
    /// correlation tables conventionally print their diagonal.
    fn diagonal(n: usize) -> Self {
        CorrelationResult { rho: 1.0, n, p_value: 0.0, stars: Stars::None }
    }

    /// Formats rho in correlation-table style: three decimals, no leading
    /// zero, stars appended — e.g. `.835**` or `-.518**`.
    pub fn table_cell(&self) -> String {
        format!("{}{}", format_rho(self.rho), self.stars)
    }
}

fn format_rho(rho: f64) -> String {
    let mut text = format!("{:.3}", rho);
    if text == "-0.000" {
        text = "0.000".to_string();
    }
    if let Some(rest) = text.strip_prefix("0.") {
        text = format!(".{rest}");
    } else if let Some(rest) = text.strip_prefix("-0.") {
        text = format!("-.{rest}");
    }
    text
}

/// Average ranks (1-based) with midranks for ties.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share the average of ranks i+1..=j+1
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = rank;
        }
        i = j + 1;
    }
    out
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut sx = 0.0;
    let mut sy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        num += (a - mx) * (b - my);
        sx += (a - mx) * (a - mx);
        sy += (b - my) * (b - my);
    }
    if sx == 0.0 || sy == 0.0 {
        return None;
    }
    Some((num / (sx.sqrt() * sy.sqrt())).clamp(-1.0, 1.0))
}

/// Two-tailed p for Spearman's rho via the t approximation with n−2
/// degrees of freedom.
fn p_value_two_tailed(rho: f64, n: usize) -> f64 {
    if rho.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0)
}

/// Spearman rank correlation over the years present in both series.
pub fn spearman(x: &AnnualSeries, y: &AnnualSeries) -> Result<CorrelationResult, RankStatsError> {
    let mut xv = Vec::new();
    let mut yv = Vec::new();
    for (year, value) in x.present() {
        if let Some(other) = y.value_at(year) {
            xv.push(value);
            yv.push(other);
        }
    }
    let n = xv.len();
    if n < 3 {
        return Err(RankStatsError::TooFewCommonYears(n));
    }
    let rx = ranks(&xv);
    let ry = ranks(&yv);
    // Rank vectors are equal (or mirror-images) exactly when the relation
    // is perfectly monotone; report ±1 without rounding noise.
    let mirrored = rx
        .iter()
        .zip(&ry)
        .all(|(a, b)| a + b == (n + 1) as f64);
    let constant = rx.iter().all(|&r| r == rx[0]);
    let rho = if constant || ry.iter().all(|&r| r == ry[0]) {
        let flat = if constant { x } else { y };
        return Err(RankStatsError::ZeroVariance(flat.name().to_string()));
    } else if rx == ry {
        1.0
    } else if mirrored {
        -1.0
    } else {
        pearson(&rx, &ry).expect("non-constant rank vectors have variance")
    };
    Ok(CorrelationResult::new(rho, n, p_value_two_tailed(rho, n)))
}

/// A symmetric matrix of pairwise Spearman correlations. Cells that could
/// not be computed carry the per-pair error instead of a value.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    pub cells: Vec<Vec<Result<CorrelationResult, RankStatsError>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, row: usize, col: usize) -> &Result<CorrelationResult, RankStatsError> {
        &self.cells[row][col]
    }
}

/// Builds the pairwise correlation matrix over named series.
///
/// With `include_year` a synthetic `year` series (value = year, spanning
/// all input years) is prepended, turning the first row/column into a
/// monotone-trend test for every series. Each cell is computed on its own
/// pairwise-deleted support; failures stay local to their cell.
pub fn correlation_matrix(
    series: &[AnnualSeries],
    include_year: bool,
) -> Result<CorrelationMatrix, RankStatsError> {
    if series.len() < 2 {
        return Err(RankStatsError::TooFewSeries(series.len()));
    }

    let mut all: Vec<AnnualSeries> = Vec::with_capacity(series.len() + 1);
    if include_year {
        let lo = series.iter().filter_map(|s| s.span()).map(|(a, _)| a).min();
        let hi = series.iter().filter_map(|s| s.span()).map(|(_, b)| b).max();
        let points = match (lo, hi) {
            (Some(lo), Some(hi)) => (lo..=hi).map(|y| (y, f64::from(y))).collect(),
            _ => Vec::new(),
        };
        all.push(AnnualSeries::from_values("year", points).expect("years are increasing"));
    }
    all.extend_from_slice(series);

    let mut names = Vec::with_capacity(all.len());
    for s in &all {
        if names.contains(&s.name().to_string()) {
            return Err(RankStatsError::DuplicateName(s.name().to_string()));
        }
        names.push(s.name().to_string());
    }

    let k = all.len();
    let mut cells: Vec<Vec<Result<CorrelationResult, RankStatsError>>> =
        vec![vec![Err(RankStatsError::TooFewCommonYears(0)); k]; k];
    for i in 0..k {
        cells[i][i] = Ok(CorrelationResult::diagonal(all[i].len()));
        for j in (i + 1)..k {
            let cell = spearman(&all[i], &all[j]);
            cells[i][j] = cell.clone();
            cells[j][i] = cell;
        }
    }
    Ok(CorrelationMatrix { names, cells })
}
