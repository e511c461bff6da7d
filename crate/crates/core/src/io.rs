//! JSON encodings. Rationals are written as `"p/q"` strings (integers as
//! `"p"`); words use formatter syntax with `""` for the empty word.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::certify::Certificate;
use crate::cyclic::CyclicVector;
use crate::eval::{EvalError, MatrixTuple, RationalMatrix};
use crate::moment::{validate_sequence, Atom, MomentError, Realization, TracialMomentSequence};
use crate::poly::{ParseError, Scalar, Word};
use crate::witness::WitnessReport;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid rational {0:?}")]
    Rational(String),
    #[error("invalid word: {0}")]
    Word(#[from] ParseError),
    #[error("tuple declares g = {declared} but lists {found} matrices")]
    TupleLength { declared: usize, found: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Moment(#[from] MomentError),
}

pub fn parse_rational(s: &str) -> Result<Scalar, FormatError> {
    let t = s.trim();
    match t.split_once('/') {
        Some((_, den)) if den.trim_start_matches('+').chars().all(|c| c == '0') => {
            Err(FormatError::Rational(s.to_string()))
        }
        _ => Scalar::from_str(t).map_err(|_| FormatError::Rational(s.to_string())),
    }
}

fn rational_strings(v: &[Scalar]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

#[derive(Serialize, Deserialize)]
struct TupleWire {
    n: usize,
    g: usize,
    matrices: Vec<Vec<Vec<String>>>,
}

fn tuple_to_wire(t: &MatrixTuple) -> TupleWire {
    TupleWire {
        n: t.n(),
        g: t.g(),
        matrices: t
            .matrices()
            .iter()
            .map(|m| m.rows().map(rational_strings).collect())
            .collect(),
    }
}

fn tuple_from_wire(w: TupleWire) -> Result<MatrixTuple, FormatError> {
    if w.matrices.len() != w.g {
        return Err(FormatError::TupleLength {
            declared: w.g,
            found: w.matrices.len(),
        });
    }
    let mut matrices = Vec::with_capacity(w.g);
    for m in w.matrices {
        let rows = m
            .iter()
            .map(|row| row.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        matrices.push(RationalMatrix::from_rows(rows)?);
    }
    Ok(MatrixTuple::new(w.n, matrices)?)
}

pub fn tuple_to_json(t: &MatrixTuple) -> Value {
    serde_json::to_value(tuple_to_wire(t)).expect("serializable")
}

pub fn tuple_from_json(v: &Value) -> Result<MatrixTuple, FormatError> {
    tuple_from_wire(TupleWire::deserialize(v)?)
}

pub fn tuple_from_str(s: &str) -> Result<MatrixTuple, FormatError> {
    tuple_from_wire(serde_json::from_str(s)?)
}

pub fn cyclic_to_json(v: &CyclicVector) -> Value {
    Value::Object(
        v.iter()
            .map(|(k, c)| (k.key(), Value::String(c.to_string())))
            .collect(),
    )
}

pub fn cyclic_from_json(v: &Value, nvars: usize) -> Result<CyclicVector, FormatError> {
    let map = BTreeMap::<String, String>::deserialize(v)?;
    let mut coords = Vec::with_capacity(map.len());
    for (k, c) in map {
        coords.push((Word::parse(&k, nvars)?, parse_rational(&c)?));
    }
    Ok(CyclicVector::from_coords(nvars, coords))
}

#[derive(Serialize, Deserialize)]
struct MomentsWire {
    g: usize,
    d: usize,
    moments: BTreeMap<String, String>,
}

/// Writes every class of degree `<= d`, zeros included.
pub fn moments_to_json(l: &TracialMomentSequence) -> Value {
    let moments = l
        .all_values()
        .into_iter()
        .map(|(k, v)| (k.key(), v.to_string()))
        .collect();
    serde_json::to_value(MomentsWire {
        g: l.g(),
        d: l.d(),
        moments,
    })
    .expect("serializable")
}

fn moments_from_wire(w: MomentsWire) -> Result<TracialMomentSequence, FormatError> {
    let raw = w
        .moments
        .iter()
        .map(|(k, v)| Ok((k.clone(), parse_rational(v)?)))
        .collect::<Result<BTreeMap<_, _>, FormatError>>()?;
    Ok(validate_sequence(&raw, w.g, w.d)?)
}

pub fn moments_from_json(v: &Value) -> Result<TracialMomentSequence, FormatError> {
    moments_from_wire(MomentsWire::deserialize(v)?)
}

pub fn moments_from_str(s: &str) -> Result<TracialMomentSequence, FormatError> {
    moments_from_wire(serde_json::from_str(s)?)
}

#[derive(Serialize, Deserialize)]
struct AtomWire {
    weight: String,
    tuple: TupleWire,
}

#[derive(Serialize, Deserialize)]
struct RealizationWire {
    g: usize,
    d: usize,
    atoms: Vec<AtomWire>,
}

pub fn realization_to_json(r: &Realization) -> Value {
    serde_json::to_value(RealizationWire {
        g: r.g,
        d: r.d,
        atoms: r
            .atoms
            .iter()
            .map(|a| AtomWire {
                weight: a.weight.to_string(),
                tuple: tuple_to_wire(&a.tuple),
            })
            .collect(),
    })
    .expect("serializable")
}

fn realization_from_wire(w: RealizationWire) -> Result<Realization, FormatError> {
    let mut atoms = Vec::with_capacity(w.atoms.len());
    for a in w.atoms {
        let tuple = tuple_from_wire(a.tuple)?;
        if tuple.g() != w.g {
            return Err(FormatError::TupleLength {
                declared: w.g,
                found: tuple.g(),
            });
        }
        atoms.push(Atom {
            weight: parse_rational(&a.weight)?,
            tuple,
        });
    }
    Ok(Realization {
        g: w.g,
        d: w.d,
        atoms,
    })
}

pub fn realization_from_json(v: &Value) -> Result<Realization, FormatError> {
    realization_from_wire(RealizationWire::deserialize(v)?)
}

pub fn realization_from_str(s: &str) -> Result<Realization, FormatError> {
    realization_from_wire(serde_json::from_str(s)?)
}

#[derive(Serialize, Deserialize)]
struct CertificateWire {
    implication_holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scalar_combination: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cyc_combination: Option<Vec<String>>,
}

pub fn certificate_to_json(c: &Certificate) -> Value {
    serde_json::to_value(CertificateWire {
        implication_holds: c.implication_holds,
        scalar_combination: c.scalar_combination.as_deref().map(rational_strings),
        cyc_combination: c.cyc_combination.as_deref().map(rational_strings),
    })
    .expect("serializable")
}

pub fn certificate_from_json(v: &Value) -> Result<Certificate, FormatError> {
    let w = CertificateWire::deserialize(v)?;
    let parse = |xs: Option<Vec<String>>| -> Result<Option<Vec<Scalar>>, FormatError> {
        xs.map(|xs| xs.iter().map(|s| parse_rational(s)).collect())
            .transpose()
    };
    Ok(Certificate {
        implication_holds: w.implication_holds,
        scalar_combination: parse(w.scalar_combination)?,
        cyc_combination: parse(w.cyc_combination)?,
    })
}

/// Witness report; matrices are row-major `[re, im]` pairs.
pub fn witness_to_json(r: &WitnessReport) -> Value {
    let t = &r.tuple;
    let matrices: Vec<Vec<Vec<[f64; 2]>>> = t
        .matrices()
        .iter()
        .map(|m| {
            (0..t.n())
                .map(|i| (0..t.n()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect()
        })
        .collect();
    serde_json::json!({
        "n": t.n(),
        "g": t.g(),
        "constraint_residual": r.constraint_residual,
        "target_value": r.target_value,
        "iterations": r.iterations,
        "restarts": r.restarts,
        "matrices": matrices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclic::cyclic_canonicalize;
    use crate::moment::realize;
    use crate::poly::FreePoly;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/6").unwrap(), Scalar::new(1.into(), 2.into()));
        assert_eq!(parse_rational("-4").unwrap(), Scalar::from_integer((-4).into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a").is_err());
        assert_eq!(Scalar::new(1.into(), 2.into()).to_string(), "1/2");
    }

    #[test]
    fn cyclic_vector_keys() {
        let f = FreePoly::parse("1 + x2*x1 + x1*x2", 2).unwrap();
        let v = cyclic_canonicalize(&f);
        let json = cyclic_to_json(&v);
        assert_eq!(json, serde_json::json!({"": "1", "x1*x2": "2"}));
        assert_eq!(cyclic_from_json(&json, 2).unwrap(), v);
    }

    #[test]
    fn moments_document() {
        let doc = r#"{"g": 2, "d": 2, "moments": {"": "1", "x1": "1/2", "x2*x1": "3", "x1*x2": "3"}}"#;
        let l = moments_from_str(doc).unwrap();
        let back = moments_from_json(&moments_to_json(&l)).unwrap();
        assert_eq!(back, l);
        let bad = r#"{"g": 2, "d": 2, "moments": {"x2*x1": "3", "x1*x2": "2"}}"#;
        assert!(matches!(
            moments_from_str(bad),
            Err(FormatError::Moment(MomentError::Conflict { .. }))
        ));
    }

    #[test]
    fn realization_document() {
        let l = moments_from_str(r#"{"g": 1, "d": 2, "moments": {"": "1", "x1": "2", "x1*x1": "1/3"}}"#).unwrap();
        let r = realize(&l);
        let json = realization_to_json(&r);
        assert_eq!(realization_from_json(&json).unwrap(), r);
        assert_eq!(json["atoms"][0]["tuple"]["matrices"][0][0][0], "2");
    }

    #[test]
    fn absent_combination_is_omitted() {
        let c = crate::certify::certify(&[FreePoly::one(1)], &FreePoly::parse("x1", 1).unwrap());
        let json = certificate_to_json(&c);
        assert_eq!(json, serde_json::json!({"implication_holds": true, "scalar_combination": ["1"]}));
        assert_eq!(certificate_from_json(&json).unwrap(), c);
    }

    #[test]
    fn tuple_shape_errors() {
        assert!(matches!(
            tuple_from_str(r#"{"n": 1, "g": 2, "matrices": [[["1"]]]}"#),
            Err(FormatError::TupleLength { declared: 2, found: 1 })
        ));
        assert!(tuple_from_str(r#"{"n": 2, "g": 1, "matrices": [[["1"]]]}"#).is_err());
        assert!(tuple_from_str(r#"{"n": 2, "g": 1, "matrices": [[["1", "2"], ["3"]]]}"#).is_err());
    }
}
