use nalgebra::{DMatrix, DVector};

use crate::error::{DriftError, Result};

/// An ordered set of `n` points in `d` dimensions, the universal input of
/// every analysis in this crate.
///
/// Rows are points, columns are features. Construction validates the
/// invariants (non-empty, all entries finite, id/name lengths consistent),
/// so a `PointCloud` in hand is always usable.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: DMatrix<f64>,
    ids: Option<Vec<String>>,
    feature_names: Option<Vec<String>>,
}

impl PointCloud {
    /// Build a cloud from an `n x d` matrix plus optional per-point ids and
    /// per-feature names.
    pub fn new(
        points: DMatrix<f64>,
        ids: Option<Vec<String>>,
        feature_names: Option<Vec<String>>,
    ) -> Result<Self> {
        let cloud = PointCloud {
            points,
            ids,
            feature_names,
        };
        cloud.validate()?;
        Ok(cloud)
    }

    /// Build a cloud from row vectors. All rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(DriftError::EmptyCloud);
        }
        let d = rows[0].len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(DriftError::RaggedRows {
                    row: i,
                    expected: d,
                    actual: row.len(),
                });
            }
        }
        let points = DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
        Self::new(points, None, None)
    }

    /// Re-check every invariant; returns `Ok(())` when the cloud is valid.
    pub fn validate(&self) -> Result<()> {
        if self.points.nrows() == 0 || self.points.ncols() == 0 {
            return Err(DriftError::EmptyCloud);
        }
        for i in 0..self.points.nrows() {
            for j in 0..self.points.ncols() {
                if !self.points[(i, j)].is_finite() {
                    return Err(DriftError::NonFinite { row: i, col: j });
                }
            }
        }
        if let Some(ids) = &self.ids {
            if ids.len() != self.points.nrows() {
                return Err(DriftError::ShapeMismatch {
                    what: "ids",
                    expected: self.points.nrows(),
                    actual: ids.len(),
                });
            }
        }
        if let Some(names) = &self.feature_names {
            if names.len() != self.points.ncols() {
                return Err(DriftError::ShapeMismatch {
                    what: "feature_names",
                    expected: self.points.ncols(),
                    actual: names.len(),
                });
            }
        }
        Ok(())
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    /// Feature dimension.
    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    /// The underlying `n x d` matrix.
    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    /// Point `i` as an owned column vector.
    pub fn point(&self, i: usize) -> DVector<f64> {
        self.points.row(i).transpose()
    }

    /// Iterate points as owned column vectors.
    pub fn iter_points(&self) -> impl Iterator<Item = DVector<f64>> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Column `j` as a plain sample vector.
    pub fn feature_column(&self, j: usize) -> Vec<f64> {
        self.points.column(j).iter().copied().collect()
    }

    pub fn ids(&self) -> Option<&[String]> {
        self.ids.as_deref()
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    /// Apply `f` to every point, producing a new cloud with the same ids
    /// and feature names (caller keeps the dimension unchanged).
    pub fn map_points(&self, f: impl Fn(DVector<f64>) -> DVector<f64>) -> Result<Self> {
        let rows: Vec<Vec<f64>> = self
            .iter_points()
            .map(|p| f(p).iter().copied().collect())
            .collect();
        let d = rows[0].len();
        let points = DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
        PointCloud::new(points, self.ids.clone(), self.feature_names.clone())
    }
}

/// Validate a cloud and hand it back unchanged.
///
/// Constructors already validate; this exists for callers that assemble a
/// cloud from deserialized parts and want one explicit checkpoint.
pub fn validate_cloud(cloud: PointCloud) -> Result<PointCloud> {
    cloud.validate()?;
    Ok(cloud)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valid_cloud_passes() {
        let cloud = PointCloud::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let cloud = validate_cloud(cloud).unwrap();
        assert_eq!(cloud.len(), 2);
        assert_eq!(cloud.dim(), 2);
    }

    #[test]
    fn nan_entry_reports_position() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, f64::NAN, 1.0, 1.0]);
        let err = PointCloud::new(m, None, None).unwrap_err();
        match err {
            DriftError::NonFinite { row, col } => {
                assert_eq!((row, col), (0, 1));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn empty_cloud_rejected() {
        let err = PointCloud::from_rows(&[]).unwrap_err();
        assert!(matches!(err, DriftError::EmptyCloud));

        let m = DMatrix::<f64>::zeros(0, 2);
        let err = PointCloud::new(m, None, None).unwrap_err();
        assert!(matches!(err, DriftError::EmptyCloud));
    }

    #[test]
    fn id_length_mismatch_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 1.0]);
        let err = PointCloud::new(m, Some(vec!["a".into()]), None).unwrap_err();
        assert!(matches!(
            err,
            DriftError::ShapeMismatch { what: "ids", .. }
        ));
    }

    #[test]
    fn feature_name_length_mismatch_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 1.0]);
        let err = PointCloud::new(m, None, Some(vec!["x".into()])).unwrap_err();
        assert!(matches!(
            err,
            DriftError::ShapeMismatch {
                what: "feature_names",
                ..
            }
        ));
    }
}
