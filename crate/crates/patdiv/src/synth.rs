//! Synthetic patent corpora with known ground truth.
//!
//! The generator produces corpora whose per-year Gini-Simpson diversity
//! follows a configured oscillation
//!
//! ```text
//! G(t) = G₀ + A·sin(2πt / T)
//! ```
//!
//! and whose distinct-inventor counts follow the same oscillation shifted
//! by a configurable number of years. That makes a generated corpus an
//! end-to-end oracle: the analysis pipeline must recover the period T and
//! the inventor lead/lag from nothing but the emitted patent records.
//!
//! Concentration is controlled by a two-regime mixture: one dominant class
//! receives extra weight w on top of a uniform background over the k-class
//! pool. Its Simpson value is S(w) = w²(1 − 1/k) + 1/k, so the mixing
//! weight that hits a target S has the closed form
//!
//! ```text
//! w = √((S − 1/k) / (1 − 1/k))
//! ```
//!
//! Each patent draws exactly one class from that mixture, keeping the
//! measured proportions an unbiased multinomial sample of the target
//! distribution. Generation uses ChaCha8, a fixed portable generator, so a
//! seed pins the corpus bit for bit on every platform.

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::{Corpus, PatentRecord};
use crate::series::AnnualSeries;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("years ({years}) must cover at least two full periods of {period} years")]
    TooFewYears { years: usize, period: f64 },
    #[error("period_years must be positive and finite")]
    BadPeriod,
    #[error("patents_per_year must be at least 1")]
    NoPatents,
    #[error("growth factor must be positive and finite")]
    BadGrowth,
    #[error("class_pool must be at least 2")]
    TinyClassPool,
    #[error("concentration_amplitude must lie in [0, 1)")]
    BadAmplitude,
    #[error("base_gini − amplitude must be ≥ 0, got {0}")]
    GiniFloor(f64),
    #[error("base_gini + amplitude must be ≤ 1 − 1/class_pool, got {got} > {max}")]
    GiniCeiling { got: f64, max: f64 },
}

/// Parameters of a synthetic corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    /// Number of consecutive years to generate.
    pub years: usize,
    /// Ground-truth cycle period T, in years.
    pub period_years: f64,
    /// Patent count in the first year.
    pub patents_per_year: u32,
    /// Exponential growth factor per year (1.0 = flat).
    pub growth: f64,
    /// Number of classification codes available.
    pub class_pool: usize,
    /// Center G₀ of the Gini-Simpson oscillation.
    pub base_gini: f64,
    /// Amplitude A of the oscillation; 0 gives a flat series.
    pub concentration_amplitude: f64,
    /// Years by which inventor counts trail the variety (negative = lead).
    pub inventor_lag_years: i32,
    /// RNG seed; equal seeds give bit-identical corpora.
    pub seed: u64,
    /// Calendar year of the first generated year.
    pub start_year: i32,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            years: 30,
            period_years: 10.0,
            patents_per_year: 200,
            growth: 1.05,
            class_pool: 25,
            base_gini: 0.55,
            concentration_amplitude: 0.15,
            inventor_lag_years: 0,
            seed: 0,
            start_year: 1975,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if !self.period_years.is_finite() || self.period_years <= 0.0 {
            return Err(SynthError::BadPeriod);
        }
        if (self.years as f64) < 2.0 * self.period_years {
            return Err(SynthError::TooFewYears { years: self.years, period: self.period_years });
        }
        if self.patents_per_year < 1 {
            return Err(SynthError::NoPatents);
        }
        if !self.growth.is_finite() || self.growth <= 0.0 {
            return Err(SynthError::BadGrowth);
        }
        if self.class_pool < 2 {
            return Err(SynthError::TinyClassPool);
        }
        let a = self.concentration_amplitude;
        if !(0.0..1.0).contains(&a) {
            return Err(SynthError::BadAmplitude);
        }
        if self.base_gini - a < 0.0 {
            return Err(SynthError::GiniFloor(self.base_gini - a));
        }
        let max = 1.0 - 1.0 / self.class_pool as f64;
        if self.base_gini + a > max {
            return Err(SynthError::GiniCeiling { got: self.base_gini + a, max });
        }
        Ok(())
    }

    /// Target Gini-Simpson at year offset t.
    fn gini_at(&self, t: f64) -> f64 {
        self.base_gini
            + self.concentration_amplitude
                * (std::f64::consts::TAU * t / self.period_years).sin()
    }

    fn count_at(&self, t: usize) -> u64 {
        let raw = self.patents_per_year as f64 * self.growth.powi(t as i32);
        raw.round().max(1.0) as u64
    }

    /// Relative amplitude used for the inventor oscillation.
    fn relative_amplitude(&self) -> f64 {
        if self.base_gini > 0.0 {
            self.concentration_amplitude / self.base_gini
        } else {
            0.0
        }
    }

    fn inventor_target(&self, t: usize) -> u64 {
        let shifted = t as f64 - self.inventor_lag_years as f64;
        let osc = 1.0
            + self.relative_amplitude()
                * (std::f64::consts::TAU * shifted / self.period_years).sin();
        (self.patents_per_year as f64 * self.growth.powi(t as i32) * osc)
            .round()
            .max(0.0) as u64
    }
}

/// Generates a corpus realizing the given parameters. Deterministic for a
/// fixed seed; the seed is embedded in every patent id for provenance.
pub fn generate(spec: &SynthSpec) -> Result<Corpus, SynthError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let k = spec.class_pool;
    let code_width = (k - 1).to_string().len();
    let uniform_floor = 1.0 / k as f64;

    let mut records = Vec::new();
    for t in 0..spec.years {
        let year = spec.start_year + t as i32;
        let patents = spec.count_at(t) as usize;

        // Closed-form mixing weight for the target Simpson value.
        let target_simpson = 1.0 - spec.gini_at(t as f64);
        let w = ((target_simpson - uniform_floor) / (1.0 - uniform_floor))
            .max(0.0)
            .sqrt();

        let mut year_records = Vec::with_capacity(patents);
        for idx in 0..patents {
            let class_idx = if rng.random::<f64>() < w {
                0
            } else {
                rng.random_range(0..k)
            };
            let record = PatentRecord::new(
                format!("S{:08x}-{year}-{idx:04}", spec.seed),
                year,
                std::iter::once(format!("C{class_idx:0code_width$}")),
                std::iter::empty(),
                std::iter::empty(),
            )
            .expect("generated fields are non-empty");
            year_records.push(record);
        }

        // Distinct inventors: draw the target number of ids from a pool
        // that grows with the patent volume, then hand each id to a patent
        // round-robin so the year's distinct count is exact (capped by two
        // slots per patent).
        let slots = 2 * patents as u64;
        let inventors = spec.inventor_target(t).min(slots) as usize;
        let pool = (4 * patents + 4).max(inventors);
        for (slot, id) in sample_indices(&mut rng, pool, inventors).into_iter().enumerate() {
            year_records[slot % patents]
                .inventors
                .insert(format!("I{id}"));
        }

        // Single assignee per patent from a small growing pool.
        let assignee_pool = (patents / 3).max(2);
        for record in &mut year_records {
            let id = rng.random_range(0..assignee_pool);
            record.assignees.insert(format!("A{id}"));
        }

        records.extend(year_records);
    }
    Ok(Corpus::new(records).expect("ids are unique and years valid"))
}

/// The noise-free G(t) curve the generator targets, one point per year.
pub fn ground_truth(spec: &SynthSpec) -> Result<AnnualSeries, SynthError> {
    spec.validate()?;
    let points = (0..spec.years)
        .map(|t| (spec.start_year + t as i32, spec.gini_at(t as f64)));
    Ok(AnnualSeries::from_values("gini_simpson_truth", points)
        .expect("consecutive years, finite values"))
}
