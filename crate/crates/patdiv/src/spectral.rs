//! Detrending, moving averages, and periodogram analysis of annual series.
//!
//! The periodogram of a mean-removed series x_0..x_{n-1} (n even) is
//! evaluated at the Fourier frequencies f_k = k/n, k = 1..n/2:
//!
//! ```text
//! c_k = Σ_t x_t cos(2πkt/n)        s_k = Σ_t x_t sin(2πkt/n)
//! I(f_k) = (2/n)(c_k² + s_k²)      for k < n/2
//! I(0.5) = (1/n) c_{n/2}²          at the Nyquist frequency
//! ```
//!
//! This scaling satisfies Parseval's identity Σ_k I(f_k) = Σ_t (x_t − x̄)²,
//! so a peak at frequency f over n observations reads directly as f·n
//! cycles in the window. Odd-length input drops its earliest observation
//! to make n even. No tapering, padding, or smoothing is applied; trend
//! leakage into the lowest bins is handled by first-differencing
//! ([`detrend_diff`]) before the transform.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::series::AnnualSeries;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("need at least {needed} contiguous points, found {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("series has gaps; select a contiguous run before spectral analysis")]
    NonContiguous,
    #[error("moving-average window must be odd, got {0}")]
    EvenWindow(usize),
    #[error("moving-average window must be positive")]
    ZeroWindow,
    #[error("no periodogram ordinate above the exclusion threshold {0}")]
    AllExcluded(f64),
}

/// First differences x(t) − x(t−1) within each contiguous run.
///
/// The output point sits at the later year t; each run shrinks by one and
/// gaps are never differenced across. The result is named `<input>_diff`.
pub fn detrend_diff(series: &AnnualSeries) -> Result<AnnualSeries, SpectralError> {
    let runs = series.contiguous_runs();
    let longest = runs.iter().map(|r| r.len()).max().unwrap_or(0);
    if longest < 2 {
        return Err(SpectralError::TooFewPoints { needed: 2, got: longest });
    }
    let mut points = Vec::new();
    for run in &runs {
        for (offset, pair) in run.values.windows(2).enumerate() {
            points.push((run.start_year + offset as i32 + 1, Some(pair[1] - pair[0])));
        }
    }
    points.sort_by_key(|&(y, _)| y);
    Ok(AnnualSeries::new(format!("{}_diff", series.name()), points)
        .expect("differences of finite values at distinct years"))
}

/// Centered moving average over an odd window.
///
/// Output exists only where the full window fits inside one contiguous run,
/// so `window/2` years fall away at each run edge. `window = 1` is the
/// identity. The series name is preserved.
pub fn moving_average(series: &AnnualSeries, window: usize) -> Result<AnnualSeries, SpectralError> {
    if window == 0 {
        return Err(SpectralError::ZeroWindow);
    }
    if window.is_multiple_of(2) {
        return Err(SpectralError::EvenWindow(window));
    }
    let half = window / 2;
    let mut points = Vec::new();
    for run in series.contiguous_runs() {
        if run.len() < window {
            continue;
        }
        for (offset, chunk) in run.values.windows(window).enumerate() {
            let mean = chunk.iter().sum::<f64>() / window as f64;
            points.push((run.start_year + (offset + half) as i32, Some(mean)));
        }
    }
    points.sort_by_key(|&(y, _)| y);
    Ok(AnnualSeries::new(series.name(), points)
        .expect("window means of finite values at distinct years"))
}

/// Raw periodogram of a mean-removed annual series.
#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram {
    /// Even number of observations actually transformed.
    pub n: usize,
    /// (frequency, intensity) at f_k = k/n for k = 1..n/2; the last
    /// frequency is 0.5 (Nyquist).
    pub ordinates: Vec<(f64, f64)>,
    /// The mean is always removed before the transform.
    pub mean_removed: bool,
    /// True when the earliest observation was dropped to make n even.
    pub dropped_first: bool,
}

impl Periodogram {
    /// Sum of intensities; equals the sum of squared deviations from the
    /// mean (Parseval).
    pub fn total_intensity(&self) -> f64 {
        self.ordinates.iter().map(|&(_, i)| i).sum()
    }
}

/// Computes the periodogram of a gap-free series.
///
/// The series must form a single contiguous run of at least 4 points; a
/// run of odd length loses its earliest observation.
pub fn periodogram(series: &AnnualSeries) -> Result<Periodogram, SpectralError> {
    let runs = series.contiguous_runs();
    if runs.len() != 1 {
        return Err(SpectralError::NonContiguous);
    }
    let run = &runs[0];
    if run.len() < 4 {
        return Err(SpectralError::TooFewPoints { needed: 4, got: run.len() });
    }

    let dropped_first = run.len() % 2 == 1;
    let values = if dropped_first { &run.values[1..] } else { &run.values[..] };
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let x: Vec<f64> = values.iter().map(|v| v - mean).collect();

    let mut ordinates = Vec::with_capacity(n / 2);
    for k in 1..=n / 2 {
        let mut c = 0.0;
        let mut s = 0.0;
        for (t, &xt) in x.iter().enumerate() {
            let phase = TAU * (k as f64) * (t as f64) / (n as f64);
            c += xt * phase.cos();
            s += xt * phase.sin();
        }
        let intensity = if k < n / 2 {
            (2.0 / n as f64) * (c * c + s * s)
        } else {
            // At Nyquist cos² sums to n rather than n/2 and the sine term
            // vanishes, so the weight halves.
            (1.0 / n as f64) * (c * c)
        };
        ordinates.push((k as f64 / n as f64, intensity.max(0.0)));
    }
    Ok(Periodogram { n, ordinates, mean_removed: true, dropped_first })
}

/// Dominant frequency of a periodogram and its reading in cycles.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleEstimate {
    /// Frequency of the maximum intensity, in (0, 0.5].
    pub dominant_frequency: f64,
    /// dominant_frequency × n: how many cycles fit in the window.
    pub cycle_count: f64,
    /// 1 / dominant_frequency.
    pub period_years: f64,
    /// Set when the top two intensities are within 1e-9 of each other
    /// (includes the all-zero spectrum).
    pub degenerate: bool,
}

/// Intensity gap under which the top two ordinates count as tied.
const TIE_TOLERANCE: f64 = 1e-9;

/// Picks the frequency of maximum intensity, ignoring ordinates at or
/// below `exclude_below`. Ties break toward the lower frequency and set
/// the `degenerate` flag.
pub fn dominant_cycle(
    pgram: &Periodogram,
    exclude_below: f64,
) -> Result<CycleEstimate, SpectralError> {
    let mut best: Option<(f64, f64)> = None;
    let mut runner_up = f64::NEG_INFINITY;
    for &(freq, intensity) in &pgram.ordinates {
        if freq <= exclude_below {
            continue;
        }
        match best {
            // Strict inequality keeps the lower frequency on ties.
            Some((_, top)) if intensity > top => {
                runner_up = top;
                best = Some((freq, intensity));
            }
            Some(_) => runner_up = runner_up.max(intensity),
            None => best = Some((freq, intensity)),
        }
    }
    let (freq, top) = best.ok_or(SpectralError::AllExcluded(exclude_below))?;
    let degenerate = runner_up.is_finite() && (top - runner_up).abs() <= TIE_TOLERANCE;
    Ok(CycleEstimate {
        dominant_frequency: freq,
        cycle_count: freq * pgram.n as f64,
        period_years: 1.0 / freq,
        degenerate,
    })
}
