//! Order primitives on the nonnegative orthant.
//!
//! Everything here is exact in the sense that zero coordinates are never
//! snapped: a coordinate is on the boundary only if it is exactly `0.0`.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};
use crate::num;

/// A point of the closed cone `R^n_+`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "Vec<f64>", into = "Vec<f64>")
)]
pub struct PointVec(Vec<f64>);

impl PointVec {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyVector);
        }
        for (index, &value) in coords.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if value < 0.0 {
                return Err(Error::NegativeEntry { index, value });
            }
        }
        Ok(PointVec(coords))
    }

    /// Like [`PointVec::new`] but clamps `-0.0` and tiny negative rounding
    /// noise (above `-1e-300`) to zero.
    pub(crate) fn from_image(mut coords: Vec<f64>) -> Result<Self> {
        for v in coords.iter_mut() {
            if *v < 0.0 && *v > -1e-300 {
                *v = 0.0;
            }
        }
        Self::new(coords)
    }

    pub fn ones(dim: usize) -> Self {
        PointVec(vec![1.0; dim.max(1)])
    }

    pub fn zeros(dim: usize) -> Self {
        PointVec(vec![0.0; dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn is_interior(&self) -> bool {
        self.0.iter().all(|&v| v > 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|v| v * c).collect())
    }

    pub fn max_coord(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_coord(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `self <= other` in the cone order, with relative slack `rel`.
    pub fn le_cone(&self, other: &PointVec, rel: f64) -> bool {
        self.dim() == other.dim()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(&a, &b)| num::le_rel(a, b, rel))
    }
}

impl TryFrom<Vec<f64>> for PointVec {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        PointVec::new(v)
    }
}

impl From<PointVec> for Vec<f64> {
    fn from(p: PointVec) -> Self {
        p.0
    }
}

impl AsRef<[f64]> for PointVec {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// A nonnegative real number or `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedRatio {
    Finite(f64),
    Infinite,
}

impl ExtendedRatio {
    pub(crate) fn from_f64(v: f64) -> Self {
        if v.is_finite() {
            ExtendedRatio::Finite(v)
        } else {
            ExtendedRatio::Infinite
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedRatio::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            ExtendedRatio::Finite(v) => Some(v),
            ExtendedRatio::Infinite => None,
        }
    }

    /// The value as an `f64`, with `+inf` mapped to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    /// Natural log, with `log(+inf) = +inf`.
    pub fn ln(&self) -> f64 {
        match *self {
            ExtendedRatio::Finite(v) => num::ln(v),
            ExtendedRatio::Infinite => f64::INFINITY,
        }
    }
}

impl PartialOrd for ExtendedRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use ExtendedRatio::*;
        match (self, other) {
            (Infinite, Infinite) => Some(Ordering::Equal),
            (Infinite, Finite(_)) => Some(Ordering::Greater),
            (Finite(_), Infinite) => Some(Ordering::Less),
            (Finite(a), Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for ExtendedRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedRatio::Finite(v) => write!(f, "{v}"),
            ExtendedRatio::Infinite => f.write_str("inf"),
        }
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for ExtendedRatio {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        match *self {
            ExtendedRatio::Finite(v) => s.serialize_f64(v),
            ExtendedRatio::Infinite => s.serialize_str("inf"),
        }
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for ExtendedRatio {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(alloc::string::String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) if v >= 0.0 => Ok(ExtendedRatio::Finite(v)),
            Raw::Str(s) if s == "inf" => Ok(ExtendedRatio::Infinite),
            _ => Err(serde::de::Error::custom(
                "expected a nonnegative number or \"inf\"",
            )),
        }
    }
}

/// Cone-level choices: the functional `psi(x) = <w, x>` and the unit `u`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConeContext {
    psi_weights: Vec<f64>,
    unit: PointVec,
}

impl ConeContext {
    /// `psi = sum of coordinates`, `u = (1, ..., 1)`.
    pub fn new(dim: usize) -> Self {
        ConeContext {
            psi_weights: vec![1.0; dim.max(1)],
            unit: PointVec::ones(dim),
        }
    }

    pub fn with_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyVector);
        }
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter(
                "psi weights must be strictly positive",
            ));
        }
        let dim = weights.len();
        Ok(ConeContext {
            psi_weights: weights,
            unit: PointVec::ones(dim),
        })
    }

    pub fn with_unit(mut self, unit: PointVec) -> Result<Self> {
        check_dims(self.dim(), unit.dim())?;
        if !unit.is_interior() {
            return Err(Error::NotInterior);
        }
        self.unit = unit;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.psi_weights.len()
    }

    pub fn psi_weights(&self) -> &[f64] {
        &self.psi_weights
    }

    pub fn unit(&self) -> &PointVec {
        &self.unit
    }

    /// Normality constant of the orthant with a monotone norm.
    pub fn normality_delta(&self) -> f64 {
        1.0
    }

    pub fn psi(&self, x: &[f64]) -> f64 {
        self.psi_weights.iter().zip(x).map(|(w, v)| w * v).sum()
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

// Raw slice versions used by the numerical engines. `f64::INFINITY` stands
// for +inf and never escapes through the public API.

pub(crate) fn upper_ratio(x: &[f64], y: &[f64]) -> f64 {
    let mut best = 0.0f64;
    for (&a, &b) in x.iter().zip(y) {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return f64::INFINITY;
        }
        let r = a / b;
        if r > best {
            best = r;
        }
    }
    best
}

pub(crate) fn lower_ratio(x: &[f64], y: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for (&a, &b) in x.iter().zip(y) {
        if b > 0.0 {
            let r = a / b;
            if r < best {
                best = r;
            }
        }
    }
    best
}

fn same_support(x: &[f64], y: &[f64]) -> bool {
    x.iter().zip(y).all(|(&a, &b)| (a == 0.0) == (b == 0.0))
}

pub(crate) fn thompson_raw(x: &[f64], y: &[f64]) -> f64 {
    if !same_support(x, y) {
        return f64::INFINITY;
    }
    if x.iter().all(|&v| v == 0.0) {
        return 0.0;
    }
    let m = upper_ratio(x, y).max(upper_ratio(y, x));
    num::ln(m).max(0.0)
}

pub(crate) fn hilbert_raw(x: &[f64], y: &[f64]) -> f64 {
    if !same_support(x, y) {
        return f64::INFINITY;
    }
    if x.iter().all(|&v| v == 0.0) {
        return 0.0;
    }
    let big = upper_ratio(x, y);
    let small = lower_ratio(x, y);
    num::ln(big / small).max(0.0)
}

/// `M(x/y) = inf { b : x <= b y }`.
pub fn dominance_upper(x: &PointVec, y: &PointVec) -> Result<ExtendedRatio> {
    check_dims(x.dim(), y.dim())?;
    Ok(ExtendedRatio::from_f64(upper_ratio(&x.0, &y.0)))
}

/// `m(x/y) = sup { a : a y <= x }`.
pub fn dominance_lower(x: &PointVec, y: &PointVec) -> Result<ExtendedRatio> {
    check_dims(x.dim(), y.dim())?;
    Ok(ExtendedRatio::from_f64(lower_ratio(&x.0, &y.0)))
}

/// Thompson's part metric. Points in different parts are at distance `+inf`.
pub fn thompson_distance(x: &PointVec, y: &PointVec) -> Result<ExtendedRatio> {
    check_dims(x.dim(), y.dim())?;
    Ok(ExtendedRatio::from_f64(thompson_raw(&x.0, &y.0)))
}

/// Hilbert's projective metric.
pub fn hilbert_distance(x: &PointVec, y: &PointVec) -> Result<ExtendedRatio> {
    check_dims(x.dim(), y.dim())?;
    Ok(ExtendedRatio::from_f64(hilbert_raw(&x.0, &y.0)))
}

/// The order-unit norm `||y||_base = M(y/base)`.
pub fn order_unit_norm(y: &PointVec, base: &PointVec) -> Result<f64> {
    check_dims(base.dim(), y.dim())?;
    if !base.is_interior() {
        return Err(Error::NotInterior);
    }
    Ok(upper_ratio(&y.0, &base.0))
}

/// Rescales `x` onto the slice `{ psi = c }`.
pub fn slice_normalize(x: &PointVec, c: f64, ctx: &ConeContext) -> Result<PointVec> {
    check_dims(ctx.dim(), x.dim())?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter("slice level must be positive"));
    }
    let p = ctx.psi(&x.0);
    if p <= 0.0 {
        return Err(Error::ZeroVector);
    }
    PointVec::new(x.0.iter().map(|v| c * v / p).collect())
}
