//! Core data carriers: observed samples and unit-length directions.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A regression sample: `n` observations of a scalar response paired with
/// `p` predictors.
///
/// Rows of `x` are observations, columns are predictors. Construction
/// validates shape and finiteness once so numerical code can assume both.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    y: DVector<f64>,
    x: DMatrix<f64>,
}

impl DataSet {
    /// Builds a data set from a response vector and a predictor matrix
    /// whose rows are observations.
    ///
    /// Fails with [`Error::EmptyData`] when there are no rows, with
    /// [`Error::InvalidInput`] on a shape mismatch or `p == 0`, and with
    /// [`Error::NonFinite`] if any entry is NaN or infinite.
    pub fn new(y: DVector<f64>, x: DMatrix<f64>) -> Result<Self> {
        if y.is_empty() || x.nrows() == 0 {
            return Err(Error::EmptyData);
        }
        if x.ncols() == 0 {
            return Err(Error::InvalidInput("predictor matrix has no columns".into()));
        }
        if y.len() != x.nrows() {
            return Err(Error::InvalidInput(format!(
                "response length {} does not match {} predictor rows",
                y.len(),
                x.nrows()
            )));
        }
        if y.len() < 2 {
            return Err(Error::InvalidInput(
                "at least two observations are required".into(),
            ));
        }
        if y.iter().any(|v| !v.is_finite()) || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { y, x })
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// Number of predictors.
    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Response vector.
    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    /// Predictor matrix (rows are observations).
    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    /// Predictor row `i` as a column vector.
    pub fn row(&self, i: usize) -> DVector<f64> {
        self.x.row(i).transpose()
    }

    /// Same predictors with a replacement response of matching length.
    pub fn with_response(&self, y: DVector<f64>) -> Result<Self> {
        Self::new(y, self.x.clone())
    }

    /// Same response with a replacement predictor matrix of matching rows.
    pub fn with_predictors(&self, x: DMatrix<f64>) -> Result<Self> {
        Self::new(self.y.clone(), x)
    }
}

/// A unit-length direction in predictor space.
///
/// Directions are normalised on construction and given a canonical
/// orientation: the component of largest absolute value is positive,
/// ties broken by the lowest index. Two estimates of the same axis
/// therefore compare equal regardless of the sign the solver produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    v: DVector<f64>,
}

impl Direction {
    /// Norm below which a vector is considered to carry no direction.
    pub const MIN_NORM: f64 = 1e-12;

    /// Normalises `v` and applies the canonical orientation.
    ///
    /// Returns `None` when the norm of `v` is below [`Self::MIN_NORM`] or
    /// any entry is non-finite.
    pub fn new(v: DVector<f64>) -> Option<Self> {
        if v.iter().any(|e| !e.is_finite()) {
            return None;
        }
        let norm = v.norm();
        if norm < Self::MIN_NORM {
            return None;
        }
        let mut unit = v / norm;
        // Canonical orientation: flip so the largest-magnitude entry is
        // positive; ties resolved in favour of the lowest index.
        let mut lead = 0usize;
        for (i, e) in unit.iter().enumerate() {
            if e.abs() > unit[lead].abs() {
                lead = i;
            }
        }
        if unit[lead] < 0.0 {
            unit.neg_mut();
        }
        Some(Self { v: unit })
    }

    /// Like [`Self::new`] but maps failure to [`Error::ZeroSlope`], the
    /// error used when a fitted slope cannot define a direction.
    pub fn from_slope(v: DVector<f64>) -> Result<Self> {
        Self::new(v).ok_or(Error::ZeroSlope)
    }

    /// The unit vector.
    pub fn as_vector(&self) -> &DVector<f64> {
        &self.v
    }

    /// Dimension of the direction.
    pub fn len(&self) -> usize {
        self.v.len()
    }

    /// True when the direction has no components (never for constructed
    /// values; present to satisfy the `len`/`is_empty` convention).
    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Projection of every predictor row onto this direction.
    pub fn project(&self, x: &DMatrix<f64>) -> DVector<f64> {
        x * &self.v
    }
}

/// An ordered collection of directions with per-direction weights.
///
/// Weights are whatever scalar the producing estimator orders its output
/// by (eigenvalues for spectral methods, slope norms for regressions);
/// each producer documents its convention.
#[derive(Debug, Clone)]
pub struct DirectionSet {
    /// Directions, strongest first by the producer's ordering.
    pub directions: Vec<Direction>,
    /// One weight per direction, aligned with `directions`.
    pub weights: Vec<f64>,
}

impl DirectionSet {
    /// Builds a set, validating the alignment of directions and weights.
    pub fn new(directions: Vec<Direction>, weights: Vec<f64>) -> Result<Self> {
        if directions.len() != weights.len() {
            return Err(Error::InvalidInput(format!(
                "{} directions but {} weights",
                directions.len(),
                weights.len()
            )));
        }
        Ok(Self { directions, weights })
    }

    /// Number of directions held.
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    /// True when the set holds no directions.
    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// The leading direction, if any.
    pub fn first(&self) -> Option<&Direction> {
        self.directions.first()
    }

    /// Directions stacked as columns of a `p x k` matrix.
    pub fn as_matrix(&self) -> DMatrix<f64> {
        let p = self.directions.first().map_or(0, Direction::len);
        let mut m = DMatrix::zeros(p, self.directions.len());
        for (j, d) in self.directions.iter().enumerate() {
            m.set_column(j, d.as_vector());
        }
        m
    }
}
