//! JSON file formats.
//!
//! Matrices are `{"d": 2, "entries": [[[re, im], ...], ...]}` (row-major),
//! families are `{"T": <matrix or null>, "members": [<matrix>, ...]}` and
//! weights are `{"v": [...]}`.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;

#[derive(Serialize, Deserialize)]
pub struct MatrixJson {
    pub d: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<MatrixJson> for HermitianMatrix {
    type Error = Error;
    fn try_from(m: MatrixJson) -> Result<Self> {
        if m.entries.len() != m.d {
            return Err(Error::BadShape {
                expected: m.d,
                got: m.entries.len(),
            });
        }
        let rows: Vec<Vec<Complex64>> = m
            .entries
            .iter()
            .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect();
        if rows.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        HermitianMatrix::from_rows(&rows)
    }
}

impl From<HermitianMatrix> for MatrixJson {
    fn from(h: HermitianMatrix) -> Self {
        MatrixJson {
            d: h.dim(),
            entries: h
                .rows()
                .into_iter()
                .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyJson {
    #[serde(rename = "T", default)]
    pub t: Option<HermitianMatrix>,
    pub members: Vec<HermitianMatrix>,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json(value)?)?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Parses `identity:d` or loads a matrix file.
pub fn parse_operator(spec: &str) -> Result<HermitianMatrix> {
    if let Some(d) = spec.strip_prefix("identity:") {
        let d: usize = d
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad dimension in '{spec}'")))?;
        if d == 0 {
            return Err(Error::EmptyMatrix);
        }
        return Ok(HermitianMatrix::identity(d));
    }
    read_json(Path::new(spec))
}

pub fn read_family(path: &Path) -> Result<FamilyJson> {
    let fam: FamilyJson = read_json(path)?;
    if fam.members.is_empty() {
        return Err(Error::EmptyFamily);
    }
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let m = HermitianMatrix::from_rows(&[
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.1, 0.3)],
            vec![Complex64::new(0.1, -0.3), Complex64::new(-2.5, 0.0)],
        ])
        .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.starts_with("{\"d\":2,\"entries\":[[[1.0,0.0],[0.1,0.3]]"));
        let back: HermitianMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(
            serde_json::from_str::<HermitianMatrix>(r#"{"d":2,"entries":[[[1,0],[1,0]]]}"#)
                .is_err()
        );
        assert!(serde_json::from_str::<HermitianMatrix>(
            r#"{"d":2,"entries":[[[1,0],[1,0]],[[2,0],[1,0]]]}"#
        )
        .is_err());
    }

    #[test]
    fn family_without_t() {
        let f: FamilyJson =
            serde_json::from_str(r#"{"members":[{"d":1,"entries":[[[1,0]]]}]}"#).unwrap();
        assert!(f.t.is_none());
        assert_eq!(f.members.len(), 1);
    }

    #[test]
    fn identity_shorthand() {
        assert_eq!(
            parse_operator("identity:3").unwrap(),
            HermitianMatrix::identity(3)
        );
        assert!(parse_operator("identity:x").is_err());
        assert!(parse_operator("identity:0").is_err());
    }
}
