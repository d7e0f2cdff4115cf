use crate::error::{Error, Result};

/// Row-major feature matrix with boolean labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Vec<f64>,
    pub y: Vec<bool>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(x: Vec<f64>, y: Vec<bool>, feature_names: Vec<String>) -> Result<Dataset> {
        let d = feature_names.len();
        if y.is_empty() {
            return Err(Error::Dataset("no rows".into()));
        }
        if d == 0 {
            return Err(Error::Dataset("no features".into()));
        }
        if x.len() != y.len() * d {
            return Err(Error::Dataset(format!(
                "matrix has {} values, expected {} rows x {} features",
                x.len(),
                y.len(),
                d
            )));
        }
        if let Some(pos) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::Dataset(format!(
                "non-finite value at row {}, feature {}",
                pos / d,
                feature_names[pos % d]
            )));
        }
        Ok(Dataset { x, y, feature_names })
    }

    /// Build from rows; names default to `x0, x1, ...`.
    pub fn from_rows(rows: &[Vec<f64>], y: Vec<bool>) -> Result<Dataset> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Dataset("ragged rows".into()));
        }
        let names = (0..d).map(|j| format!("x{j}")).collect();
        Dataset::new(rows.concat(), y, names)
    }

    pub fn n_rows(&self) -> usize {
        self.y.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.n_features();
        &self.x[i * d..(i + 1) * d]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.x[i * self.n_features() + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.x.chunks_exact(self.n_features())
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut x = Vec::with_capacity(indices.len() * self.n_features());
        for &i in indices {
            x.extend_from_slice(self.row(i));
        }
        Dataset {
            x,
            y: indices.iter().map(|&i| self.y[i]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    pub fn positives(&self) -> usize {
        self.y.iter().filter(|&&v| v).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes_and_values() {
        assert!(Dataset::new(vec![], vec![], vec!["a".into()]).is_err());
        assert!(Dataset::new(vec![1.0], vec![true, false], vec!["a".into()]).is_err());
        assert!(Dataset::new(vec![f64::NAN], vec![true], vec!["a".into()]).is_err());
    }

    #[test]
    fn subset_keeps_order() {
        let d = Dataset::from_rows(
            &[vec![0.0, 1.0], vec![2.0, 3.0], vec![4.0, 5.0]],
            vec![true, false, true],
        )
        .unwrap();
        let s = d.subset(&[2, 0]);
        assert_eq!(s.row(0), &[4.0, 5.0]);
        assert_eq!(s.y, vec![true, true]);
        assert_eq!(d.value(1, 1), 3.0);
    }
}
