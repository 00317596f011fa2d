//! Disparity matrices d_ij = 1 − cosine over classification codes.
//!
//! Cosine similarity between class profile vectors is the "technological
//! proximity" underlying the disparity. Profiles can come from an external
//! matrix file or be built here from co-classification: each code's vector
//! counts how often it shares a patent with every code, itself included.
//!
//! A valid [`DisparityMatrix`] is exactly symmetric, has an exactly zero
//! diagonal (a class is never distant from itself), and all entries in
//! [0, 1]. The diagonal is forced to zero after computation rather than
//! trusted to floating point.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::corpus::Corpus;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProximityError {
    #[error("class vector for {0:?} has no positive weight")]
    ZeroVector(String),
    #[error("negative weight for dimension {dim:?} in class vector {code:?}")]
    NegativeWeight { code: String, dim: String },
    #[error("degenerate code set")]
    DegenerateCodeSet,
    #[error("duplicate code {0:?} in matrix")]
    DuplicateCode(String),
    #[error("matrix shape is {rows}x{cols}, expected {n}x{n} for {n} codes")]
    ShapeMismatch { rows: usize, cols: usize, n: usize },
    #[error("invalid disparity matrix: {0}")]
    Invalid(ValidationReport),
}

/// A classification code's profile: nonnegative weights over arbitrary
/// dimension labels, with at least one strictly positive weight.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassVector {
    code: String,
    weights: BTreeMap<String, f64>,
}

impl ClassVector {
    pub fn new(
        code: impl Into<String>,
        weights: impl IntoIterator<Item = (String, f64)>,
    ) -> Result<Self, ProximityError> {
        let code = code.into();
        let weights: BTreeMap<String, f64> = weights.into_iter().collect();
        let mut any_positive = false;
        for (dim, &w) in &weights {
            if w < 0.0 || !w.is_finite() {
                return Err(ProximityError::NegativeWeight { code, dim: dim.clone() });
            }
            any_positive |= w > 0.0;
        }
        if !any_positive {
            return Err(ProximityError::ZeroVector(code));
        }
        Ok(ClassVector { code, weights })
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn weights(&self) -> &BTreeMap<String, f64> {
        &self.weights
    }
}

/// Cosine similarity over the union of dimensions, absent dimensions
/// counting as zero. Nonnegative weights keep the result in [0, 1]; it is
/// clamped there to absorb rounding, with a warning if the excursion
/// exceeds 1e-9.
pub fn cosine(u: &ClassVector, v: &ClassVector) -> f64 {
    let mut dot = 0.0;
    for (dim, &uw) in &u.weights {
        if let Some(&vw) = v.weights.get(dim) {
            dot += uw * vw;
        }
    }
    let norm_sq = |cv: &ClassVector| cv.weights.values().map(|w| w * w).sum::<f64>();
    let raw = dot / (norm_sq(u).sqrt() * norm_sq(v).sqrt());
    clamp_unit(raw, "cosine")
}

fn clamp_unit(raw: f64, what: &str) -> f64 {
    if raw < 0.0 {
        if raw < -1e-9 {
            log::warn!("{what} value {raw} clamped to 0");
        }
        0.0
    } else if raw > 1.0 {
        if raw > 1.0 + 1e-9 {
            log::warn!("{what} value {raw} clamped to 1");
        }
        1.0
    } else {
        raw
    }
}

/// A single invariant violation found while checking a matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixViolation {
    NonzeroDiagonal { index: usize, value: f64 },
    Asymmetry { row: usize, col: usize, value: f64, mirrored: f64 },
    OutOfRange { row: usize, col: usize, value: f64 },
}

impl std::fmt::Display for MatrixViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MatrixViolation::NonzeroDiagonal { index, value } => {
                write!(f, "nonzero diagonal at {index}: {value}")
            }
            MatrixViolation::Asymmetry { row, col, value, mirrored } => {
                write!(f, "asymmetry at ({row}, {col}): {value} vs {mirrored}")
            }
            MatrixViolation::OutOfRange { row, col, value } => {
                write!(f, "entry out of [0, 1] at ({row}, {col}): {value}")
            }
        }
    }
}

/// All violations found in a candidate matrix; displays the first ten.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<MatrixViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        const SHOWN: usize = 10;
        if self.violations.is_empty() {
            return write!(f, "no violations");
        }
        let mut first = true;
        for v in self.violations.iter().take(SHOWN) {
            if !first {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        if self.violations.len() > SHOWN {
            write!(f, " (+{} more)", self.violations.len() - SHOWN)?;
        }
        Ok(())
    }
}

/// Checks symmetry (exact), zero diagonal (exact), and the [0, 1] range on
/// a dense row-major square matrix.
pub fn validate_matrix(n: usize, values: &[f64]) -> ValidationReport {
    let mut report = ValidationReport::default();
    for i in 0..n {
        let d = values[i * n + i];
        if d != 0.0 {
            report.violations.push(MatrixViolation::NonzeroDiagonal { index: i, value: d });
        }
        for j in 0..n {
            let v = values[i * n + j];
            if !(0.0..=1.0).contains(&v) || v.is_nan() {
                report.violations.push(MatrixViolation::OutOfRange { row: i, col: j, value: v });
            }
            if j > i {
                let m = values[j * n + i];
                // Bitwise equality; symmetry is never approximate here.
                if v.to_bits() != m.to_bits() {
                    report.violations.push(MatrixViolation::Asymmetry {
                        row: i,
                        col: j,
                        value: v,
                        mirrored: m,
                    });
                }
            }
        }
    }
    report
}

/// Symmetric disparity matrix over an ordered code list, zero diagonal,
/// entries in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct DisparityMatrix {
    codes: Vec<String>,
    index: HashMap<String, usize>,
    values: Vec<f64>, // dense row-major n*n
}

impl DisparityMatrix {
    /// Builds and validates a matrix from row-major rows.
    pub fn from_rows(codes: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self, ProximityError> {
        let n = codes.len();
        if n < 1 {
            return Err(ProximityError::DegenerateCodeSet);
        }
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(ProximityError::ShapeMismatch {
                rows: rows.len(),
                cols: rows.first().map_or(0, Vec::len),
                n,
            });
        }
        let values: Vec<f64> = rows.into_iter().flatten().collect();
        Self::from_flat(codes, values)
    }

    fn from_flat(codes: Vec<String>, values: Vec<f64>) -> Result<Self, ProximityError> {
        let n = codes.len();
        let mut index = HashMap::with_capacity(n);
        for (i, code) in codes.iter().enumerate() {
            if index.insert(code.clone(), i).is_some() {
                return Err(ProximityError::DuplicateCode(code.clone()));
            }
        }
        let report = validate_matrix(n, &values);
        if !report.is_valid() {
            return Err(ProximityError::Invalid(report));
        }
        Ok(DisparityMatrix { codes, index, values })
    }

    /// A matrix with every off-diagonal disparity equal to `d`. With
    /// `d = 1.0` Rao-Stirling reduces to the Gini-Simpson index.
    pub fn uniform(codes: Vec<String>, d: f64) -> Result<Self, ProximityError> {
        let n = codes.len();
        let mut values = vec![d; n * n];
        for i in 0..n {
            values[i * n + i] = 0.0;
        }
        Self::from_flat(codes, values)
    }

    pub fn codes(&self) -> &[String] {
        &self.codes
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn index_of(&self, code: &str) -> Option<usize> {
        self.index.get(code).copied()
    }

    /// Disparity by code pair; `None` if either code is unknown.
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        Some(self.get_by_index(self.index_of(a)?, self.index_of(b)?))
    }

    pub fn get_by_index(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.codes.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.codes.len();
        &self.values[i * n..(i + 1) * n]
    }

    /// Re-checks the invariants; always empty for a constructed matrix.
    pub fn validate(&self) -> ValidationReport {
        validate_matrix(self.codes.len(), &self.values)
    }
}

/// Builds a disparity matrix from co-classification profiles.
///
/// For each code, the profile vector counts, over all patents, co-assignment
/// with every code including itself: a patent classed {A, B} adds one to
/// A's counts for both A and B, and likewise for B. Entries are
/// 1 − cosine between profiles, the diagonal is forced to exactly zero, and
/// the result is symmetric by construction. Counts are integers, so the
/// matrix is bit-identical under any permutation of the corpus.
pub fn build_disparity_from_cooccurrence(corpus: &Corpus) -> Result<DisparityMatrix, ProximityError> {
    let codes = corpus.distinct_codes();
    let n = codes.len();
    if n < 2 {
        return Err(ProximityError::DegenerateCodeSet);
    }
    let index: HashMap<&str, usize> =
        codes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();

    // profiles[i][j] = number of patents carrying both code i and code j
    // (i == j counts every patent carrying code i).
    let mut profiles = vec![vec![0u64; n]; n];
    for record in corpus.records() {
        let ids: Vec<usize> = record.classes.iter().map(|c| index[c.as_str()]).collect();
        for &a in &ids {
            for &b in &ids {
                profiles[a][b] += 1;
            }
        }
    }

    let norms: Vec<f64> = profiles
        .iter()
        .map(|row| row.iter().map(|&c| (c as f64) * (c as f64)).sum::<f64>().sqrt())
        .collect();

    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            // Identical integer profiles are at zero disparity by
            // definition; skipping the arithmetic keeps them exactly there.
            let d = if profiles[i] == profiles[j] {
                0.0
            } else {
                let dot: f64 = profiles[i]
                    .iter()
                    .zip(&profiles[j])
                    .map(|(&a, &b)| (a as f64) * (b as f64))
                    .sum();
                let cos = clamp_unit(dot / (norms[i] * norms[j]), "co-occurrence cosine");
                clamp_unit(1.0 - cos, "co-occurrence disparity")
            };
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    // Diagonal is exactly zero by initialization.
    DisparityMatrix::from_flat(codes, values)
}
