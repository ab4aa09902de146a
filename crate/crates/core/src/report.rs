//! Serialization helpers: integers travel as decimal strings.

use std::fmt::Display;

use serde::ser::SerializeSeq;
use serde::Serializer;

pub(crate) fn decimal<S: Serializer, T: Display>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub(crate) fn decimal_seq<S: Serializer, T: Display>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

pub(crate) fn real<S: Serializer>(
    v: &crate::arith::HighPrecisionReal,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_decimal_string(30))
}

pub(crate) fn ratio<S: Serializer>(v: &num_rational::BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}
