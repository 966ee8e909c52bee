//! JSON formats for arrays and matrices. Coefficients travel as decimal (or
//! `p/q`) strings so nothing is lost to floating point.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::ExteriorArray;
use crate::hessian::HessianMatrix;
use crate::linalg::Matrix;
use crate::multiindex::MultiIndex;
use crate::ring::{format_rational, parse_rational, Rationals, Ring};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayEntry {
    #[serde(rename = "I")]
    pub i: Vec<usize>,
    pub c: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayJson {
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub entries: Vec<ArrayEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub rows: Vec<Vec<String>>,
}

/// Parses an array document. Indices must be strictly increasing and appear
/// at most once; zero coefficients may be omitted.
pub fn parse_array(text: &str) -> Result<ExteriorArray<BigRational>> {
    let doc: ArrayJson = serde_json::from_str(text)?;
    array_from_json(&doc)
}

pub fn array_from_json(doc: &ArrayJson) -> Result<ExteriorArray<BigRational>> {
    let mut a = ExteriorArray::new(doc.k, doc.n)?;
    let mut seen = BTreeSet::new();
    for e in &doc.entries {
        if e.i.len() != doc.k {
            return Err(Error::InvalidIndex(format!("{:?} has {} entries, expected {}", e.i, e.i.len(), doc.k)));
        }
        let idx = MultiIndex::new(e.i.clone(), doc.n)?;
        if !seen.insert(idx.clone()) {
            return Err(Error::InvalidIndex(format!("{:?} appears twice", e.i)));
        }
        a.set(&Rationals, idx, parse_rational(&e.c)?)?;
    }
    Ok(a)
}

pub fn array_to_json(a: &ExteriorArray<BigRational>) -> ArrayJson {
    let entries = a
        .entries()
        .filter(|(_, v)| !Rationals.is_zero(v))
        .map(|(i, v)| ArrayEntry { i: i.values().to_vec(), c: format_rational(v) })
        .collect();
    ArrayJson { k: a.k(), n: a.n(), entries }
}

/// Parses a matrix document into a Hessian, checking the side length and
/// the block structure.
pub fn parse_hessian(text: &str) -> Result<HessianMatrix<BigRational>> {
    let doc: MatrixJson = serde_json::from_str(text)?;
    hessian_from_json(&doc)
}

pub fn hessian_from_json(doc: &MatrixJson) -> Result<HessianMatrix<BigRational>> {
    if doc.k == 0 || doc.n <= doc.k {
        return Err(Error::InvalidParameters(format!("need 0 < k < N, got k={}, N={}", doc.k, doc.n)));
    }
    let rows: Vec<Vec<BigRational>> = doc
        .rows
        .iter()
        .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let h = HessianMatrix::from_matrix(doc.k, doc.n, Matrix::from_rows(rows)?)?;
    h.check_structure(&Rationals).map_err(Error::Inconsistent)?;
    Ok(h)
}

pub fn matrix_to_json<T: Clone>(k: usize, n: usize, m: &Matrix<T>, fmt: impl Fn(&T) -> String) -> MatrixJson {
    MatrixJson { k, n, rows: m.to_rows().iter().map(|r| r.iter().map(&fmt).collect()).collect() }
}

pub fn hessian_to_json(h: &HessianMatrix<BigRational>) -> MatrixJson {
    matrix_to_json(h.k(), h.n(), h.matrix(), format_rational)
}

/// Integer entries, as needed by exact rank and modular determinants.
pub fn integer_matrix(m: &Matrix<BigRational>) -> Result<Matrix<BigInt>> {
    m.try_map(|v| {
        if v.is_integer() {
            Ok(v.to_integer())
        } else {
            Err(Error::Parse(format!("entry {} is not an integer", format_rational(v))))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn array_roundtrip() {
        let text = r#"{"k":2,"N":4,"entries":[{"I":[1,2],"c":"3"},{"I":[3,4],"c":"-1/2"}]}"#;
        let a = parse_array(text).unwrap();
        let back = array_to_json(&a);
        assert_eq!(back.entries.len(), 2);
        assert_eq!(back.entries[1].c, "-1/2");
        assert_eq!(array_from_json(&back).unwrap(), a);
    }

    #[test]
    fn rejects_unsorted_and_repeated() {
        assert!(parse_array(r#"{"k":2,"N":4,"entries":[{"I":[2,1],"c":"1"}]}"#).is_err());
        assert!(parse_array(r#"{"k":2,"N":4,"entries":[{"I":[1,1],"c":"1"}]}"#).is_err());
        let twice = r#"{"k":2,"N":4,"entries":[{"I":[1,2],"c":"1"},{"I":[1,2],"c":"2"}]}"#;
        assert!(parse_array(twice).is_err());
        assert!(parse_array(r#"{"k":2,"N":4,"entries":[{"I":[1,2,3],"c":"1"}]}"#).is_err());
        assert!(parse_array(r#"{"k":2,"N":4,"entries":[{"I":[1,2],"c":"x"}]}"#).is_err());
    }

    #[test]
    fn matrix_structure_is_checked() {
        let a = parse_array(r#"{"k":2,"N":4,"entries":[{"I":[3,4],"c":"5"}]}"#).unwrap();
        let h = crate::hessian::assemble(&Rationals, &a).unwrap();
        let text = serde_json::to_string(&hessian_to_json(&h)).unwrap();
        assert_eq!(parse_hessian(&text).unwrap(), h);
        let bad = r#"{"k":2,"N":3,"rows":[["0","1"],["-1","0"]]}"#;
        assert!(parse_hessian(bad).is_err());
        let ragged = r#"{"k":2,"N":3,"rows":[["0","1"],["-1"]]}"#;
        assert!(parse_hessian(ragged).is_err());
    }
}
