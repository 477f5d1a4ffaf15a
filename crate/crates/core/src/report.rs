//! Serialization helpers for report structs.

use num_rational::BigRational;
use serde::Serializer;

/// Writes an exact rational as `"p/q"` (or `"p"` for integers).
pub fn ser_rational<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}
