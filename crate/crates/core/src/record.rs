//! JSON records and the vector file format.
//!
//! Field order is fixed by struct declaration order, and every double is
//! written with 17 significant digits (`%.17g`), so identical inputs give
//! byte-identical output.

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::averages::{AverageResult, McEstimate, Method};
use crate::error::{Error, Result};
use crate::numcore::CVector;
use crate::sicsearch::SearchResult;
use crate::subspace::Space;

/// Formats like C's `%.17g`.
pub fn fmt17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    } else {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// A double serialized through [`fmt17`]; non-finite values become `null`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct J17(pub f64);

impl Serialize for J17 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let number: serde_json::Number =
            fmt17(self.0).parse().map_err(serde::ser::Error::custom)?;
        number.serialize(s)
    }
}

/// `{dim, space, method, value, exact, std_error, n_samples, seed}`.
#[derive(Clone, Debug, Serialize)]
pub struct AverageRecord {
    pub dim: usize,
    pub space: String,
    pub method: String,
    pub value: J17,
    pub exact: Option<String>,
    pub std_error: Option<J17>,
    pub n_samples: Option<usize>,
    pub seed: Option<[u64; 2]>,
}

impl AverageRecord {
    pub fn from_result(r: &AverageResult) -> Self {
        Self {
            dim: r.dim,
            space: r.space.as_str().into(),
            method: r.method.as_str().into(),
            value: J17(r.value),
            exact: r.exact.as_ref().map(ToString::to_string),
            std_error: None,
            n_samples: None,
            seed: None,
        }
    }

    pub fn from_mc(dim: usize, space: Space, est: &McEstimate) -> Self {
        Self {
            dim,
            space: space.as_str().into(),
            method: Method::MonteCarlo.as_str().into(),
            value: J17(est.mean),
            exact: None,
            std_error: Some(J17(est.std_error)),
            n_samples: Some(est.n_samples),
            seed: Some([est.seed.0, est.seed.1]),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchRecord {
    pub dim: usize,
    pub space: String,
    pub mode: String,
    pub best_value: J17,
    pub converged: bool,
    pub restarts_used: usize,
    pub iterations: usize,
    pub grad_norm: J17,
    pub sic_deviation: J17,
    pub best_vector: Vec<[J17; 2]>,
    pub history: Vec<(usize, J17)>,
}

impl SearchRecord {
    pub fn new(space: Space, mode: &str, r: &SearchResult, sic_deviation: f64) -> Self {
        Self {
            dim: r.best_vector.dim(),
            space: space.as_str().into(),
            mode: mode.into(),
            best_value: J17(r.best_value),
            converged: r.converged,
            restarts_used: r.restarts_used,
            iterations: r.iterations,
            grad_norm: J17(r.grad_norm),
            sic_deviation: J17(sic_deviation),
            best_vector: r
                .best_vector
                .entries()
                .iter()
                .map(|z| [J17(z.re), J17(z.im)])
                .collect(),
            history: r.history.iter().map(|&(i, v)| (i, J17(v))).collect(),
        }
    }
}

/// On-disk vector: `{"dim": N, "entries": [[re, im], ...], "label": "..."}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorFile {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// Norm tolerance for vectors read from disk.
pub const FILE_UNIT_TOL: f64 = 1e-9;

/// A parsed vector, and whether it had to be renormalized by more than roundoff.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedVector {
    pub vector: CVector,
    pub renormalized: bool,
    pub label: Option<String>,
}

impl VectorFile {
    pub fn from_vector(v: &CVector, label: Option<String>) -> Self {
        Self {
            dim: v.dim(),
            entries: v.entries().iter().map(|z| [z.re, z.im]).collect(),
            label,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("malformed vector file: {e}")))
    }

    /// Validates and converts. Vectors off unit norm by more than
    /// [`FILE_UNIT_TOL`] are rejected.
    pub fn to_vector(&self) -> Result<LoadedVector> {
        if self.entries.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: self.entries.len(),
            });
        }
        if self.dim == 0 {
            return Err(Error::InvalidArgument("vector file has dim 0".into()));
        }
        let raw = CVector::new(
            self.entries
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect(),
        );
        let deviation = (raw.norm_sqr() - 1.0).abs();
        if deviation > FILE_UNIT_TOL || !deviation.is_finite() {
            return Err(Error::Norm { deviation });
        }
        // raw components are kept bit-exact unless they need more than roundoff
        let renormalized = deviation > crate::numcore::UNIT_TOL;
        Ok(LoadedVector {
            renormalized,
            vector: if renormalized { raw.normalized() } else { raw },
            label: self.label.clone(),
        })
    }

    /// Serialized with [`J17`] doubles.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            dim: usize,
            entries: Vec<[J17; 2]>,
            #[serde(skip_serializing_if = "Option::is_none")]
            label: &'a Option<String>,
        }
        let out = Out {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|&[a, b]| [J17(a), J17(b)])
                .collect(),
            label: &self.label,
        };
        serde_json::to_string_pretty(&out).expect("plain data serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fmt17_matches_printf() {
        assert_eq!(fmt17(128.625), "128.625");
        assert_eq!(fmt17(0.1), "0.10000000000000001");
        assert_eq!(fmt17(14.291666666666666), "14.291666666666666");
        assert_eq!(fmt17(1e-20), "9.9999999999999995e-21");
        assert_eq!(fmt17(0.0), "0");
        assert_eq!(fmt17(-2.5), "-2.5");
        assert_eq!(fmt17(1e20), "1e+20");
    }

    proptest! {
        #[test]
        fn fmt17_round_trips(x in proptest::num::f64::NORMAL) {
            let s = fmt17(x);
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
            prop_assert!(s.parse::<serde_json::Number>().is_ok());
        }

        #[test]
        fn vector_file_round_trip_preserves_phases(
            parts in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..8)
        ) {
            let raw = CVector::new(parts.iter().map(|&(a, b)| Complex64::new(a, b)).collect());
            prop_assume!(raw.norm() > 1e-3);
            let v = raw.normalized();
            let text = VectorFile::from_vector(&v, Some("x".into())).to_json();
            let back = VectorFile::parse(&text).unwrap().to_vector().unwrap();
            prop_assert_eq!(back.vector.max_abs_diff(&v), 0.0);
            prop_assert_eq!(back.label.as_deref(), Some("x"));
        }
    }

    #[test]
    fn vector_file_validation() {
        let f = VectorFile::parse(r#"{"dim": 2, "entries": [[1.0, 0.0], [0.0, 0.0]]}"#).unwrap();
        assert!(!f.to_vector().unwrap().renormalized);
        let f = VectorFile::parse(r#"{"dim": 2, "entries": [[1.0000000001, 0.0], [0.0, 0.0]]}"#)
            .unwrap();
        assert!(f.to_vector().unwrap().renormalized);
        let f = VectorFile::parse(r#"{"dim": 2, "entries": [[1.1, 0.0], [0.0, 0.0]]}"#).unwrap();
        assert!(matches!(f.to_vector(), Err(Error::Norm { .. })));
        let f = VectorFile::parse(r#"{"dim": 3, "entries": [[1.0, 0.0]]}"#).unwrap();
        assert!(matches!(f.to_vector(), Err(Error::Dimension { .. })));
        assert!(VectorFile::parse("{").is_err());
    }

    #[test]
    fn average_record_layout() {
        let r = crate::averages::analytic_avg_fh(7).unwrap();
        let json = serde_json::to_string(&AverageRecord::from_result(&r)).unwrap();
        assert_eq!(
            json,
            r#"{"dim":7,"space":"full","method":"analytic","value":14.291666666666666,"exact":"343/24","std_error":null,"n_samples":null,"seed":null}"#
        );
    }
}
