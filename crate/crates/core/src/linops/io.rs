use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CMat, GeneratorMatrix};
use crate::error::{Error, Result};

/// JSON matrix layout: `{"dim": n, "entries": [[re, im], ...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMat) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::invalid("only square matrices are stored in this format"));
        }
        let n = m.nrows();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let z = m[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        Ok(MatrixFile { dim: n, entries })
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::invalid("matrix file: dim must be positive"));
        }
        if self.entries.len() != n * n {
            return Err(Error::invalid(format!(
                "matrix file: expected {} entries for dim {n}, found {}",
                n * n,
                self.entries.len()
            )));
        }
        if self
            .entries
            .iter()
            .any(|[re, im]| !re.is_finite() || !im.is_finite())
        {
            return Err(Error::invalid("matrix file: non-finite entry"));
        }
        Ok(CMat::from_fn(n, n, |i, j| {
            let [re, im] = self.entries[i * n + j];
            Complex64::new(re, im)
        }))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("matrix file: {e}")))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

impl GeneratorMatrix {
    /// Load and validate a generator from a JSON matrix file.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let m = MatrixFile::from_json(&text)?.to_matrix()?;
        Self::with_label(path.display().to_string(), m)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::new(MatrixFile::from_json(text)?.to_matrix()?)
    }

    pub fn to_json(&self) -> Result<String> {
        MatrixFile::from_matrix(self.entries())?.to_json()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_validation() {
        let a = GeneratorMatrix::from_real_rows(&[&[-1.0, 0.5], &[0.0, -2.0]]).unwrap();
        let json = a.to_json().unwrap();
        assert_eq!(json, r#"{"dim":2,"entries":[[-1.0,0.0],[0.5,0.0],[0.0,0.0],[-2.0,0.0]]}"#);
        let back = GeneratorMatrix::from_json_str(&json).unwrap();
        assert_eq!(back.entries(), a.entries());

        assert!(GeneratorMatrix::from_json_str(r#"{"dim":2,"entries":[[-1.0,0.0]]}"#).is_err());
        // Unstable matrices are rejected on load.
        assert!(matches!(
            GeneratorMatrix::from_json_str(r#"{"dim":1,"entries":[[1.0,0.0]]}"#),
            Err(Error::NotStable { .. })
        ));
        assert!(GeneratorMatrix::from_json_str("{not json").is_err());
    }
}
