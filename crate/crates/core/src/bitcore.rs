//! Points of the Boolean cube and dense function tables.
//!
//! Coordinate `x_i` (1-based in the usual mathematical notation) is bit
//! `i - 1` of the integer encoding. Written as a string, the first character
//! is coordinate 1, so `"1100"` has bits 0 and 1 set. Every module and every
//! file format uses this encoding.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Largest dimension a dense table may have.
pub const MAX_TABLE_DIM: u32 = 32;

/// Largest dimension of a point.
pub const MAX_POINT_DIM: u32 = 64;

/// A point of `{0,1}^dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitVector {
    bits: u64,
    dim: u32,
}

#[inline]
pub(crate) fn low_mask(dim: u32) -> u64 {
    if dim >= 64 {
        u64::MAX
    } else {
        (1u64 << dim) - 1
    }
}

impl BitVector {
    /// Builds a point, rejecting bits at or above `dim`.
    pub fn new(bits: u64, dim: u32) -> Result<Self> {
        if dim > MAX_POINT_DIM {
            return Err(Error::DimensionTooLarge {
                what: "points",
                dim,
                limit: MAX_POINT_DIM,
            });
        }
        if bits & !low_mask(dim) != 0 {
            return Err(Error::InvalidArgument(format!(
                "bits {bits:#x} do not fit in dimension {dim}"
            )));
        }
        Ok(Self { bits, dim })
    }

    pub fn zero(dim: u32) -> Self {
        Self { bits: 0, dim }
    }

    pub fn ones(dim: u32) -> Self {
        Self {
            bits: low_mask(dim),
            dim,
        }
    }

    /// The standard basis vector `e_i`, `i` 0-based.
    pub fn unit(i: u32, dim: u32) -> Self {
        assert!(i < dim, "coordinate {i} out of range for dimension {dim}");
        Self { bits: 1 << i, dim }
    }

    pub fn from_coordinates(coords: &[u32], dim: u32) -> Result<Self> {
        let mut bits = 0u64;
        for &c in coords {
            if c >= dim {
                return Err(Error::InvalidArgument(format!(
                    "coordinate {c} out of range for dimension {dim}"
                )));
            }
            bits |= 1 << c;
        }
        Self::new(bits, dim)
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Index into a dense table.
    #[inline]
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    /// Hamming weight.
    #[inline]
    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    #[inline]
    pub fn get(&self, i: u32) -> bool {
        (self.bits >> i) & 1 == 1
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Ok(Self {
            bits: self.bits ^ other.bits,
            dim: self.dim,
        })
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Ok(Self {
            bits: self.bits & other.bits,
            dim: self.dim,
        })
    }

    pub fn complement(&self) -> Self {
        Self {
            bits: !self.bits & low_mask(self.dim),
            dim: self.dim,
        }
    }

    /// Set coordinates, 0-based, ascending.
    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.dim).filter(move |&i| self.get(i))
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let dim = u32::try_from(s.len()).map_err(|_| Error::Parse("bit string too long".into()))?;
        let mut bits = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' if i < 64 => bits |= 1 << i,
                _ => return Err(Error::Parse(format!("invalid bit string {s:?}"))),
            }
        }
        Self::new(bits, dim)
    }
}

/// Hamming weight of a raw encoded point.
#[inline]
pub fn weight(v: &BitVector) -> u32 {
    v.weight()
}

/// Neumaier-compensated running sum. Summation order is the caller's
/// iteration order, so results are reproducible bit for bit.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.carry += (self.sum - t) + value;
        } else {
            self.carry += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<CompensatedSum>().total()
}

/// A real-valued function on `{0,1}^dim`, stored densely in index order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealFunctionTable {
    dim: u32,
    values: Vec<f64>,
}

impl RealFunctionTable {
    pub fn new(dim: u32, values: Vec<f64>) -> Result<Self> {
        if dim > MAX_TABLE_DIM {
            return Err(Error::DimensionTooLarge {
                what: "dense tables",
                dim,
                limit: MAX_TABLE_DIM,
            });
        }
        let expected = 1usize << dim;
        if values.len() != expected {
            return Err(Error::TableLength {
                dim,
                expected,
                found: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { dim, values })
    }

    /// Tabulates `f` over every encoded point.
    pub fn from_fn(dim: u32, f: impl Fn(u64) -> f64) -> Result<Self> {
        if dim > MAX_TABLE_DIM {
            return Err(Error::DimensionTooLarge {
                what: "dense tables",
                dim,
                limit: MAX_TABLE_DIM,
            });
        }
        Self::new(dim, (0..1u64 << dim).map(f).collect())
    }

    pub fn constant(dim: u32, c: f64) -> Result<Self> {
        Self::from_fn(dim, |_| c)
    }

    /// The character `chi_S` as a ±1 table.
    pub fn character(dim: u32, subset: u64) -> Result<Self> {
        Self::from_fn(dim, |x| {
            if (x & subset).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            }
        })
    }

    /// `(-1)^{f(x)}` for a 0/1 table.
    pub fn from_boolean(dim: u32, bits: &[bool]) -> Result<Self> {
        Self::new(dim, bits.iter().map(|&b| if b { -1.0 } else { 1.0 }).collect())
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, index: u64) -> f64 {
        self.values[index as usize]
    }

    pub fn at(&self, x: &BitVector) -> Result<f64> {
        check_dim(self.dim, x.dim())?;
        Ok(self.values[x.index()])
    }

    /// Expectation under the uniform measure.
    pub fn mean(&self) -> f64 {
        compensated_sum(self.values.iter().copied()) / self.values.len() as f64
    }

    /// `E[|f|]`.
    pub fn l1_mean(&self) -> f64 {
        compensated_sum(self.values.iter().map(|v| v.abs())) / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.dim, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Self::new(
            self.dim,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }
}

/// Applies `combiner` entrywise across equally sized tables.
pub fn pointwise_combine(
    tables: &[&RealFunctionTable],
    combiner: impl Fn(&[f64]) -> f64,
) -> Result<RealFunctionTable> {
    let first = tables
        .first()
        .ok_or_else(|| Error::InvalidArgument("no tables to combine".into()))?;
    for t in &tables[1..] {
        check_dim(first.dim, t.dim)?;
    }
    let mut scratch = vec![0.0; tables.len()];
    let values = (0..first.len())
        .map(|i| {
            for (slot, t) in scratch.iter_mut().zip(tables) {
                *slot = t.values[i];
            }
            combiner(&scratch)
        })
        .collect();
    RealFunctionTable::new(first.dim, values)
}

/// Reading and writing the plain-text table format.
///
/// ```text
/// dim=3
/// 1 0.5 -1 0 0 0 2 1
/// ```
///
/// or, for Boolean functions, `bits=3` followed by an 8-character 0/1
/// string (whitespace ignored). Entries are in index order.
pub mod table_file {
    use super::*;

    /// A parsed table file. Boolean files keep their 0/1 values.
    #[derive(Clone, Debug, PartialEq)]
    pub enum TableFile {
        Real(RealFunctionTable),
        Boolean { dim: u32, bits: Vec<bool> },
    }

    impl TableFile {
        pub fn dim(&self) -> u32 {
            match self {
                TableFile::Real(t) => t.dim(),
                TableFile::Boolean { dim, .. } => *dim,
            }
        }

        /// Real tables as-is; Boolean ones as their 0/1 values.
        pub fn into_real(self) -> Result<RealFunctionTable> {
            match self {
                TableFile::Real(t) => Ok(t),
                TableFile::Boolean { dim, bits } => RealFunctionTable::new(
                    dim,
                    bits.into_iter().map(|b| if b { 1.0 } else { 0.0 }).collect(),
                ),
            }
        }

        /// Boolean view; real tables must hold only 0 and 1.
        pub fn into_boolean(self) -> Result<(u32, Vec<bool>)> {
            match self {
                TableFile::Boolean { dim, bits } => Ok((dim, bits)),
                TableFile::Real(t) => {
                    let dim = t.dim();
                    let bits = t
                        .values()
                        .iter()
                        .enumerate()
                        .map(|(index, &v)| {
                            if v == 0.0 {
                                Ok(false)
                            } else if v == 1.0 {
                                Ok(true)
                            } else {
                                Err(Error::ValueOutOfRange {
                                    index,
                                    value: v,
                                    allowed: "{0, 1}",
                                })
                            }
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok((dim, bits))
                }
            }
        }
    }

    fn parse_header(line: &str) -> Result<(&str, u32)> {
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected `dim=<m>` or `bits=<m>`, got {line:?}")))?;
        let dim: u32 = value
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad dimension in header {line:?}")))?;
        if dim > MAX_TABLE_DIM {
            return Err(Error::DimensionTooLarge {
                what: "table files",
                dim,
                limit: MAX_TABLE_DIM,
            });
        }
        Ok((key.trim(), dim))
    }

    pub fn parse(text: &str) -> Result<TableFile> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty table file".into()))?;
        let (key, dim) = parse_header(header.trim())?;
        let expected = 1usize << dim;
        let body: Vec<&str> = lines.flat_map(|l| l.split_whitespace()).collect();
        match key {
            "dim" => {
                let values = body
                    .iter()
                    .map(|tok| {
                        tok.parse::<f64>()
                            .map_err(|_| Error::Parse(format!("bad value {tok:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(TableFile::Real(RealFunctionTable::new(dim, values)?))
            }
            "bits" => {
                let bits = body
                    .concat()
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(Error::Parse(format!("bad bit character {c:?}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                if bits.len() != expected {
                    return Err(Error::TableLength {
                        dim,
                        expected,
                        found: bits.len(),
                    });
                }
                Ok(TableFile::Boolean { dim, bits })
            }
            other => Err(Error::Parse(format!("unknown header key {other:?}"))),
        }
    }

    /// Writes a real table, eight values per line.
    pub fn write_real(table: &RealFunctionTable) -> String {
        let mut out = format!("dim={}\n", table.dim());
        for chunk in table.values().chunks(8) {
            let line: Vec<String> = chunk.iter().map(|v| format!("{v}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn write_boolean(dim: u32, bits: &[bool]) -> String {
        let mut out = format!("bits={dim}\n");
        out.extend(bits.iter().map(|&b| if b { '1' } else { '0' }));
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn weight_examples() {
        assert_eq!(weight(&bv("0000")), 0);
        assert_eq!(weight(&bv("1100")), 2);
        assert_eq!(weight(&BitVector::ones(8)), 8);
    }

    #[test]
    fn xor_and_examples() {
        assert_eq!(bv("1100").xor(&bv("1010")).unwrap(), bv("0110"));
        assert_eq!(bv("1100").and(&bv("1010")).unwrap(), bv("1000"));
        let v = bv("1011");
        assert_eq!(v.xor(&v).unwrap(), BitVector::zero(4));
        assert!(matches!(
            bv("110").xor(&bv("1100")),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn string_encoding_is_little_endian() {
        let v = bv("1000");
        assert_eq!(v.bits(), 1);
        assert_eq!(v.to_string(), "1000");
        assert!(BitVector::new(0b10000, 4).is_err());
    }

    #[test]
    fn xor_group_laws_dim4() {
        for a in 0..16u64 {
            for b in 0..16u64 {
                let (u, v) = (BitVector::new(a, 4).unwrap(), BitVector::new(b, 4).unwrap());
                assert_eq!(u.xor(&v).unwrap(), v.xor(&u).unwrap());
                assert_eq!(u.xor(&u).unwrap(), BitVector::zero(4));
                for c in 0..16u64 {
                    let w = BitVector::new(c, 4).unwrap();
                    assert_eq!(
                        u.xor(&v).unwrap().xor(&w).unwrap(),
                        u.xor(&v.xor(&w).unwrap()).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn xor_weight_identity_dim8() {
        for a in 0..256u64 {
            for b in 0..256u64 {
                let (u, v) = (BitVector::new(a, 8).unwrap(), BitVector::new(b, 8).unwrap());
                let lhs = u.xor(&v).unwrap().weight() as i64;
                let rhs =
                    u.weight() as i64 + v.weight() as i64 - 2 * u.and(&v).unwrap().weight() as i64;
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn pointwise_examples() {
        let t = RealFunctionTable::from_fn(3, |x| x as f64 * 0.5 - 1.0).unwrap();
        let ones = RealFunctionTable::constant(3, 1.0).unwrap();
        let prod = pointwise_combine(&[&t, &ones], |v| v[0] * v[1]).unwrap();
        assert_eq!(prod, t);
        let diff = pointwise_combine(&[&t, &t], |v| v[0] - v[1]).unwrap();
        assert!(diff.values().iter().all(|&v| v == 0.0));
        let other = RealFunctionTable::constant(4, 1.0).unwrap();
        assert!(pointwise_combine(&[&t, &other], |v| v[0]).is_err());
    }

    #[test]
    fn table_rejects_bad_input() {
        assert!(matches!(
            RealFunctionTable::new(2, vec![0.0; 3]),
            Err(Error::TableLength { .. })
        ));
        assert!(matches!(
            RealFunctionTable::new(1, vec![0.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        ));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut values = vec![1e16];
        values.extend(std::iter::repeat_n(1.0, 1000));
        values.push(-1e16);
        assert_eq!(compensated_sum(values), 1000.0);
    }

    #[test]
    fn table_file_formats() {
        use table_file::*;
        let t = RealFunctionTable::from_fn(4, |x| x as f64 / 3.0 - 2.0).unwrap();
        let parsed = parse(&write_real(&t)).unwrap();
        assert_eq!(parsed, TableFile::Real(t));

        let parsed = parse("bits=2\n0110\n").unwrap();
        assert_eq!(
            parsed.clone().into_boolean().unwrap(),
            (2, vec![false, true, true, false])
        );
        assert_eq!(parsed.into_real().unwrap().values(), &[0.0, 1.0, 1.0, 0.0]);

        assert!(parse("bits=2\n011\n").is_err());
        assert!(parse("dim=1\n1 x\n").is_err());
        assert!(parse("size=1\n1 2\n").is_err());
        assert!(parse("").is_err());
    }
}
