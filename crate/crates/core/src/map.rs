//! Expression trees for continuous order-preserving maps on the orthant.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::activation::Activation;
use crate::cone::PointVec;
use crate::error::{Error, Result};
use crate::num;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")
)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix with nonnegative finite entries.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = Self::new_signed(rows)?;
        if let Some((index, &value)) = m.data.iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(Error::NegativeEntry { index, value });
        }
        Ok(m)
    }

    /// Builds a matrix that may have negative entries. Such a matrix does not
    /// preserve the cone; it exists so that property checks can be exercised
    /// on maps that should fail them.
    pub fn new_signed(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 || rows[0].is_empty() {
            return Err(Error::EmptyVector);
        }
        let c = rows[0].len();
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != c {
                return Err(Error::RaggedMatrix { row: i });
            }
            data.extend(row);
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        let m = Matrix { rows, cols, data };
        if let Some((index, &value)) = m.data.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(if value.is_finite() {
                Error::NegativeEntry { index, value }
            } else {
                Error::NonFinite { index }
            });
        }
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in d.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    /// `u w^T`.
    pub fn outer(u: &[f64], w: &[f64]) -> Self {
        let mut data = Vec::with_capacity(u.len() * w.len());
        for &a in u {
            data.extend(w.iter().map(|&b| a * b));
        }
        Matrix {
            rows: u.len(),
            cols: w.len(),
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&v| v >= 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Matrix::new(rows)
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        m.to_rows()
    }
}

/// Structural homogeneity class of a map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Degree {
    /// `f(lx) = l^d f(x)` for all `l > 0`.
    Homogeneous(f64),
    /// `f(lx) <= l f(x)` for all `l >= 1`, but not homogeneous by structure.
    Subhomogeneous,
    Unknown,
}

impl Degree {
    pub fn is_homogeneous(self) -> bool {
        matches!(self, Degree::Homogeneous(d) if d == 1.0)
    }

    pub fn is_subhomogeneous(self) -> bool {
        match self {
            Degree::Homogeneous(d) => d <= 1.0,
            Degree::Subhomogeneous => true,
            Degree::Unknown => false,
        }
    }
}

fn snap_degree(d: f64) -> f64 {
    if num::abs(d - 1.0) < 1e-12 {
        1.0
    } else {
        d
    }
}

/// Result of a zero-limit computation: either a homogeneous map or the
/// flag that `f(cx)/c` blows up as `c -> 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum Asymptotic {
    Map(MapExpr),
    Divergent,
}

impl Asymptotic {
    pub fn into_map(self) -> Option<MapExpr> {
        match self {
            Asymptotic::Map(m) => Some(m),
            Asymptotic::Divergent => None,
        }
    }
}

/// A map `R^n_+ -> R^m_+` as an expression tree.
///
/// Entrywise nodes (`Power`, `Activation`) and index nodes work in any
/// dimension; `Linear` and `Constant` fix their output dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum MapExpr {
    Linear(Matrix),
    /// `x_i -> x_i^alpha`, with `0^alpha = 0`.
    Power(f64),
    Activation(Activation),
    /// The constant map `x -> b`.
    Constant(PointVec),
    Sum(Vec<MapExpr>),
    Scale(f64, Box<MapExpr>),
    /// `outer(inner(x))`.
    Compose(Box<MapExpr>, Box<MapExpr>),
    /// Returns the input with `min_{i in S} x_i` appended.
    MinAugment(Vec<usize>),
    /// One output coordinate `(1/x_i + 1/x_j)^{-1}`, zero if either input is zero.
    HarmonicMean(usize, usize),
    /// Returns `(x_{i_1}, ..., x_{i_k})`.
    Select(Vec<usize>),
}

impl MapExpr {
    pub fn linear(rows: Vec<Vec<f64>>) -> Result<Self> {
        Ok(MapExpr::Linear(Matrix::new(rows)?))
    }

    pub fn identity() -> Self {
        MapExpr::Activation(Activation::Identity)
    }

    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter("power exponent must be positive"));
        }
        Ok(MapExpr::Power(alpha))
    }

    pub fn scale(c: f64, f: MapExpr) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter("scale factor must be nonnegative"));
        }
        Ok(MapExpr::Scale(c, Box::new(f)))
    }

    pub fn compose(outer: MapExpr, inner: MapExpr) -> Self {
        MapExpr::Compose(Box::new(outer), Box::new(inner))
    }

    /// Chains maps so that the last one is applied first.
    pub fn chain(maps: Vec<MapExpr>) -> Result<Self> {
        let mut it = maps.into_iter().rev();
        let mut acc = it.next().ok_or(Error::EmptyFamily)?;
        for outer in it {
            acc = MapExpr::compose(outer, acc);
        }
        Ok(acc)
    }

    /// The layer `x -> A x + phi(B x) + b`.
    pub fn ann(a: Matrix, b: Matrix, bias: PointVec, activation: Activation) -> Result<Self> {
        let mismatch = |expected, found| Err(Error::DimensionMismatch { expected, found });
        if a.rows() != b.rows() {
            return mismatch(a.rows(), b.rows());
        }
        if a.cols() != b.cols() {
            return mismatch(a.cols(), b.cols());
        }
        if bias.dim() != a.rows() {
            return mismatch(a.rows(), bias.dim());
        }
        let mut terms = vec![
            MapExpr::Linear(a),
            MapExpr::compose(MapExpr::Activation(activation), MapExpr::Linear(b)),
        ];
        if !bias.is_zero() {
            terms.push(MapExpr::Constant(bias));
        }
        Ok(MapExpr::Sum(terms))
    }

    /// The power-mean layer `x -> (B (A x)^alpha)^{1/alpha}`.
    pub fn power_mean(a: Matrix, b: Matrix, alpha: f64) -> Result<Self> {
        MapExpr::chain(vec![
            MapExpr::power(1.0 / alpha)?,
            MapExpr::Linear(b),
            MapExpr::power(alpha)?,
            MapExpr::Linear(a),
        ])
    }

    /// Checks parameters and dimension chaining for input dimension `n`,
    /// returning the output dimension.
    pub fn output_dim(&self, n: usize) -> Result<usize> {
        let in_range = |i: usize| {
            if i < n {
                Ok(())
            } else {
                Err(Error::IndexOutOfRange { index: i, len: n })
            }
        };
        match self {
            MapExpr::Linear(a) => {
                if a.cols() != n {
                    return Err(Error::DimensionMismatch {
                        expected: a.cols(),
                        found: n,
                    });
                }
                Ok(a.rows())
            }
            MapExpr::Power(alpha) => {
                if !(*alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::InvalidParameter("power exponent must be positive"));
                }
                Ok(n)
            }
            MapExpr::Activation(_) => Ok(n),
            MapExpr::Constant(b) => Ok(b.dim()),
            MapExpr::Sum(terms) => {
                let (first, rest) = terms.split_first().ok_or(Error::EmptyFamily)?;
                let m = first.output_dim(n)?;
                for t in rest {
                    let k = t.output_dim(n)?;
                    if k != m {
                        return Err(Error::DimensionMismatch {
                            expected: m,
                            found: k,
                        });
                    }
                }
                Ok(m)
            }
            MapExpr::Scale(c, f) => {
                if !(*c >= 0.0 && c.is_finite()) {
                    return Err(Error::InvalidParameter("scale factor must be nonnegative"));
                }
                f.output_dim(n)
            }
            MapExpr::Compose(outer, inner) => outer.output_dim(inner.output_dim(n)?),
            MapExpr::MinAugment(subset) => {
                if subset.is_empty() {
                    return Err(Error::InvalidParameter("empty coordinate subset"));
                }
                subset.iter().try_for_each(|&i| in_range(i))?;
                Ok(n + 1)
            }
            MapExpr::HarmonicMean(i, j) => {
                in_range(*i)?;
                in_range(*j)?;
                Ok(1)
            }
            MapExpr::Select(idx) => {
                if idx.is_empty() {
                    return Err(Error::InvalidParameter("empty coordinate selection"));
                }
                idx.iter().try_for_each(|&i| in_range(i))?;
                Ok(idx.len())
            }
        }
    }

    /// Evaluates without dimension checks. Callers must have validated the
    /// expression with [`MapExpr::output_dim`].
    pub(crate) fn eval_raw(&self, x: &[f64]) -> Vec<f64> {
        match self {
            MapExpr::Linear(a) => a.apply(x),
            MapExpr::Power(alpha) => x
                .iter()
                .map(|&v| if v == 0.0 { 0.0 } else { num::powf(v, *alpha) })
                .collect(),
            MapExpr::Activation(a) => x.iter().map(|&v| a.eval(v)).collect(),
            MapExpr::Constant(b) => b.coords().to_vec(),
            MapExpr::Sum(terms) => {
                let mut acc = terms[0].eval_raw(x);
                for t in &terms[1..] {
                    for (s, v) in acc.iter_mut().zip(t.eval_raw(x)) {
                        *s += v;
                    }
                }
                acc
            }
            MapExpr::Scale(c, f) => {
                let mut y = f.eval_raw(x);
                y.iter_mut().for_each(|v| *v *= c);
                y
            }
            MapExpr::Compose(outer, inner) => outer.eval_raw(&inner.eval_raw(x)),
            MapExpr::MinAugment(subset) => {
                let m = subset.iter().map(|&i| x[i]).fold(f64::INFINITY, f64::min);
                let mut y = x.to_vec();
                y.push(m);
                y
            }
            MapExpr::HarmonicMean(i, j) => {
                let (a, b) = (x[*i], x[*j]);
                if a == 0.0 || b == 0.0 {
                    vec![0.0]
                } else {
                    vec![a * b / (a + b)]
                }
            }
            MapExpr::Select(idx) => idx.iter().map(|&i| x[i]).collect(),
        }
    }

    pub fn evaluate(&self, x: &PointVec) -> Result<PointVec> {
        self.output_dim(x.dim())?;
        PointVec::from_image(self.eval_raw(x.coords()))
    }

    /// Structural homogeneity class, computed bottom-up.
    pub fn degree(&self) -> Degree {
        use Degree::*;
        match self {
            MapExpr::Linear(_)
            | MapExpr::MinAugment(_)
            | MapExpr::HarmonicMean(..)
            | MapExpr::Select(_) => Homogeneous(1.0),
            MapExpr::Power(alpha) => Homogeneous(*alpha),
            MapExpr::Activation(a) => {
                if a.is_linear() {
                    Homogeneous(1.0)
                } else {
                    Subhomogeneous
                }
            }
            MapExpr::Constant(b) => {
                if b.is_zero() {
                    Homogeneous(1.0)
                } else {
                    Subhomogeneous
                }
            }
            MapExpr::Sum(terms) => {
                let degs: Vec<Degree> = terms.iter().map(MapExpr::degree).collect();
                match degs.first() {
                    Some(&Homogeneous(d)) if degs.iter().all(|&g| g == Homogeneous(d)) => {
                        Homogeneous(d)
                    }
                    _ if degs.iter().all(|g| g.is_subhomogeneous()) => Subhomogeneous,
                    _ => Unknown,
                }
            }
            MapExpr::Scale(_, f) => f.degree(),
            MapExpr::Compose(outer, inner) => match (outer.degree(), inner.degree()) {
                (Homogeneous(a), Homogeneous(b)) => Homogeneous(snap_degree(a * b)),
                (o, i) if o.is_subhomogeneous() && i.is_subhomogeneous() => Subhomogeneous,
                _ => Unknown,
            },
        }
    }

    /// Folds every purely linear subtree into a single `Linear` node.
    pub fn simplify(&self, n: usize) -> Result<MapExpr> {
        let out = self.output_dim(n)?;
        Ok(match self {
            MapExpr::Linear(_) => self.clone(),
            MapExpr::Activation(a) if a.is_linear() => MapExpr::Linear(Matrix::identity(n)),
            MapExpr::Power(alpha) if *alpha == 1.0 => MapExpr::Linear(Matrix::identity(n)),
            MapExpr::Constant(b) if b.is_zero() => MapExpr::Linear(Matrix::zeros(out, n)),
            MapExpr::Select(idx) => {
                let mut m = Matrix::zeros(idx.len(), n);
                for (r, &i) in idx.iter().enumerate() {
                    m.data[r * n + i] = 1.0;
                }
                MapExpr::Linear(m)
            }
            MapExpr::Scale(c, _) if *c == 0.0 => MapExpr::Linear(Matrix::zeros(out, n)),
            MapExpr::Scale(c, f) => match f.simplify(n)? {
                MapExpr::Linear(a) => MapExpr::Linear(a.scale(*c)),
                g => MapExpr::Scale(*c, Box::new(g)),
            },
            MapExpr::Sum(terms) => {
                let terms = terms
                    .iter()
                    .map(|t| t.simplify(n))
                    .collect::<Result<Vec<_>>>()?;
                if terms.iter().all(|t| matches!(t, MapExpr::Linear(_))) {
                    let mut acc = Matrix::zeros(out, n);
                    for t in &terms {
                        if let MapExpr::Linear(a) = t {
                            acc = acc.add(a)?;
                        }
                    }
                    MapExpr::Linear(acc)
                } else {
                    MapExpr::Sum(terms)
                }
            }
            MapExpr::Compose(outer, inner) => {
                let mid = inner.output_dim(n)?;
                match (outer.simplify(mid)?, inner.simplify(n)?) {
                    (MapExpr::Linear(a), MapExpr::Linear(b)) => MapExpr::Linear(a.mul(&b)?),
                    (o, i) => MapExpr::compose(o, i),
                }
            }
            _ => self.clone(),
        })
    }

    fn zero_limit(&self) -> Result<Asymptotic> {
        if self.degree().is_homogeneous() {
            return Ok(Asymptotic::Map(self.clone()));
        }
        Ok(match self {
            MapExpr::Power(_) => {
                return Err(Error::NoClosedForm(
                    "entrywise power of degree other than 1",
                ))
            }
            MapExpr::Activation(a) => {
                if a.at_zero() > 0.0 {
                    Asymptotic::Divergent
                } else {
                    Asymptotic::Map(MapExpr::Scale(
                        a.slope_at_zero(),
                        Box::new(Self::identity()),
                    ))
                }
            }
            MapExpr::Constant(_) => Asymptotic::Divergent,
            MapExpr::Sum(terms) => {
                let mut out = Vec::with_capacity(terms.len());
                for t in terms {
                    match t.zero_limit()? {
                        Asymptotic::Map(m) => out.push(m),
                        Asymptotic::Divergent => return Ok(Asymptotic::Divergent),
                    }
                }
                Asymptotic::Map(MapExpr::Sum(out))
            }
            MapExpr::Scale(c, f) => {
                if *c == 0.0 {
                    Asymptotic::Map(self.clone())
                } else {
                    match f.zero_limit()? {
                        Asymptotic::Map(m) => Asymptotic::Map(MapExpr::Scale(*c, Box::new(m))),
                        Asymptotic::Divergent => Asymptotic::Divergent,
                    }
                }
            }
            MapExpr::Compose(outer, inner) => match (outer.zero_limit()?, inner.zero_limit()?) {
                (Asymptotic::Map(o), Asymptotic::Map(i)) => Asymptotic::Map(MapExpr::compose(o, i)),
                _ => Asymptotic::Divergent,
            },
            _ => return Err(Error::NoClosedForm("node of unknown degree")),
        })
    }

    fn infinity_limit(&self) -> Result<MapExpr> {
        if self.degree().is_homogeneous() {
            return Ok(self.clone());
        }
        Ok(match self {
            MapExpr::Power(_) => {
                return Err(Error::NoClosedForm(
                    "entrywise power of degree other than 1",
                ))
            }
            MapExpr::Activation(a) => {
                MapExpr::Scale(a.slope_at_infinity(), Box::new(Self::identity()))
            }
            MapExpr::Constant(_) => MapExpr::Scale(0.0, Box::new(self.clone())),
            MapExpr::Sum(terms) => MapExpr::Sum(
                terms
                    .iter()
                    .map(MapExpr::infinity_limit)
                    .collect::<Result<Vec<_>>>()?,
            ),
            MapExpr::Scale(c, f) => MapExpr::Scale(*c, Box::new(f.infinity_limit()?)),
            MapExpr::Compose(outer, inner) => {
                MapExpr::compose(outer.infinity_limit()?, inner.infinity_limit()?)
            }
            _ => return Err(Error::NoClosedForm("node of unknown degree")),
        })
    }

    /// `f_0(x) = lim_{c -> 0} f(cx)/c` on inputs of dimension `n`.
    ///
    /// Homogeneous maps are returned unchanged. Otherwise the limit is built
    /// node by node and linear pieces are folded, so a layer
    /// `A x + phi(B x)` becomes `Linear(A + phi'(0) B)`.
    pub fn asymptotic_zero(&self, n: usize) -> Result<Asymptotic> {
        self.output_dim(n)?;
        if self.degree().is_homogeneous() {
            return Ok(Asymptotic::Map(self.clone()));
        }
        if !self.degree().is_subhomogeneous() {
            return Err(Error::NoClosedForm(
                "map that is not subhomogeneous by structure",
            ));
        }
        match self.zero_limit()? {
            Asymptotic::Map(m) => Ok(Asymptotic::Map(m.simplify(n)?)),
            Asymptotic::Divergent => Ok(Asymptotic::Divergent),
        }
    }

    /// `f_inf(x) = lim_{c -> inf} f(cx)/c` on inputs of dimension `n`.
    pub fn asymptotic_infinity(&self, n: usize) -> Result<MapExpr> {
        self.output_dim(n)?;
        if self.degree().is_homogeneous() {
            return Ok(self.clone());
        }
        if !self.degree().is_subhomogeneous() {
            return Err(Error::NoClosedForm(
                "map that is not subhomogeneous by structure",
            ));
        }
        self.infinity_limit()?.simplify(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(v: &[f64]) -> PointVec {
        PointVec::new(v.to_vec()).unwrap()
    }

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn saturating_1d() -> MapExpr {
        MapExpr::Activation(Activation::Saturating)
    }

    #[test]
    fn linear_eval() {
        let f = MapExpr::linear(vec![vec![1., 1.], vec![0., 1.]]).unwrap();
        assert_eq!(f.evaluate(&p(&[1., 1.])).unwrap(), p(&[2., 1.]));
        assert!(f.evaluate(&p(&[1., 1., 1.])).is_err());
    }

    #[test]
    fn harmonic_mean_eval() {
        let f = MapExpr::HarmonicMean(0, 1);
        assert_eq!(f.evaluate(&p(&[1., 1.])).unwrap(), p(&[0.5]));
        assert_eq!(f.evaluate(&p(&[0., 3.])).unwrap(), p(&[0.]));
        assert_relative_eq!(f.evaluate(&p(&[2., 6.])).unwrap().coords()[0], 1.5);
    }

    #[test]
    fn ann_at_origin() {
        let f = MapExpr::ann(
            Matrix::zeros(2, 2),
            Matrix::identity(2),
            PointVec::zeros(2),
            Activation::Tanh,
        )
        .unwrap();
        assert_eq!(f.evaluate(&p(&[0., 0.])).unwrap(), p(&[0., 0.]));
    }

    #[test]
    fn min_augment_and_select() {
        let f = MapExpr::MinAugment(vec![0, 2]);
        assert_eq!(f.evaluate(&p(&[3., 1., 2.])).unwrap(), p(&[3., 1., 2., 2.]));
        let g = MapExpr::Select(vec![2, 0]);
        assert_eq!(g.evaluate(&p(&[3., 1., 2.])).unwrap(), p(&[2., 3.]));
        assert!(MapExpr::Select(vec![5]).output_dim(2).is_err());
    }

    #[test]
    fn saturating_two_ways() {
        // x/(1+x) as a harmonic mean of x and 1.
        let built = MapExpr::compose(
            MapExpr::HarmonicMean(0, 1),
            MapExpr::Sum(vec![
                MapExpr::linear(vec![vec![1.0], vec![0.0]]).unwrap(),
                MapExpr::Constant(p(&[0.0, 1.0])),
            ]),
        );
        for x in [0.0, 0.3, 1.0, 7.5, 1e6] {
            let a = built.evaluate(&p(&[x])).unwrap().coords()[0];
            let b = saturating_1d().evaluate(&p(&[x])).unwrap().coords()[0];
            assert_relative_eq!(a, b, max_relative = 1e-14);
        }
        assert_eq!(built.degree(), Degree::Subhomogeneous);
    }

    #[test]
    fn power_zero_convention() {
        let f = MapExpr::power(0.5).unwrap();
        assert_eq!(f.evaluate(&p(&[0., 4.])).unwrap(), p(&[0., 2.]));
        assert!(MapExpr::power(0.0).is_err());
        assert!(MapExpr::power(-1.0).is_err());
    }

    #[test]
    fn degrees() {
        let a = m(&[&[1., 0.], &[0., 1.]]);
        assert_eq!(
            MapExpr::Linear(a.clone()).degree(),
            Degree::Homogeneous(1.0)
        );
        let pm = MapExpr::power_mean(a.clone(), a.clone(), 0.3).unwrap();
        assert!(pm.degree().is_homogeneous());
        let ann = MapExpr::ann(a.clone(), a.clone(), p(&[1., 0.]), Activation::Tanh).unwrap();
        assert_eq!(ann.degree(), Degree::Subhomogeneous);
        let sq = MapExpr::compose(
            MapExpr::power(2.0).unwrap(),
            MapExpr::Activation(Activation::Tanh),
        );
        assert_eq!(sq.degree(), Degree::Unknown);
        let mixed = MapExpr::Sum(vec![MapExpr::power(2.0).unwrap(), MapExpr::identity()]);
        assert_eq!(mixed.degree(), Degree::Unknown);
    }

    #[test]
    fn zero_limit_of_ann_is_linear() {
        let a = m(&[&[0.5, 0.1], &[0.2, 0.3]]);
        let b = m(&[&[0.4, 0.0], &[0.1, 0.7]]);
        let f = MapExpr::ann(a.clone(), b.clone(), PointVec::zeros(2), Activation::Tanh).unwrap();
        let f0 = f.asymptotic_zero(2).unwrap();
        assert_eq!(f0, Asymptotic::Map(MapExpr::Linear(a.add(&b).unwrap())));
        let finf = f.asymptotic_infinity(2).unwrap();
        assert_eq!(finf, MapExpr::Linear(a.clone()));

        let g = MapExpr::ann(
            a.clone(),
            b.clone(),
            PointVec::zeros(2),
            Activation::Softplus,
        )
        .unwrap();
        assert_eq!(g.asymptotic_zero(2).unwrap(), Asymptotic::Divergent);
        assert_eq!(
            g.asymptotic_infinity(2).unwrap(),
            MapExpr::Linear(a.add(&b).unwrap())
        );
    }

    #[test]
    fn bias_diverges_at_zero_and_drops_at_infinity() {
        let a = m(&[&[0.5, 0.1], &[0.2, 0.3]]);
        let b = m(&[&[0.4, 0.0], &[0.1, 0.7]]);
        let f = MapExpr::ann(a.clone(), b, p(&[0.1, 0.0]), Activation::Tanh).unwrap();
        assert_eq!(f.asymptotic_zero(2).unwrap(), Asymptotic::Divergent);
        assert_eq!(f.asymptotic_infinity(2).unwrap(), MapExpr::Linear(a));
    }

    #[test]
    fn homogeneous_limits_are_identity_operations() {
        let f = MapExpr::power_mean(
            m(&[&[0.8, 0.1], &[0.1, 0.8]]),
            m(&[&[0.8, 0.2], &[0., 0.8]]),
            0.3,
        )
        .unwrap();
        assert_eq!(f.asymptotic_zero(2).unwrap(), Asymptotic::Map(f.clone()));
        assert_eq!(f.asymptotic_infinity(2).unwrap(), f);
    }

    #[test]
    fn saturating_limits() {
        let f = saturating_1d();
        assert_eq!(
            f.asymptotic_zero(1).unwrap(),
            Asymptotic::Map(MapExpr::Linear(Matrix::identity(1)))
        );
        assert_eq!(
            f.asymptotic_infinity(1).unwrap(),
            MapExpr::Linear(Matrix::zeros(1, 1))
        );
    }

    #[test]
    fn unsupported_shapes_error() {
        let f = MapExpr::Sum(vec![
            MapExpr::power(0.5).unwrap(),
            MapExpr::Activation(Activation::Tanh),
        ]);
        assert!(f.degree().is_subhomogeneous());
        assert!(matches!(f.asymptotic_zero(2), Err(Error::NoClosedForm(_))));
        assert!(matches!(
            f.asymptotic_infinity(2),
            Err(Error::NoClosedForm(_))
        ));
        let g = MapExpr::power(2.0).unwrap();
        assert!(matches!(g.asymptotic_zero(1), Err(Error::NoClosedForm(_))));
    }

    #[test]
    fn simplify_preserves_values() {
        let f = MapExpr::Sum(vec![
            MapExpr::Select(vec![1, 0]),
            MapExpr::scale(2.0, MapExpr::Linear(m(&[&[0.1, 0.2], &[0.3, 0.4]]))).unwrap(),
            MapExpr::compose(MapExpr::identity(), MapExpr::Constant(PointVec::zeros(2))),
        ]);
        let s = f.simplify(2).unwrap();
        assert!(matches!(s, MapExpr::Linear(_)));
        let x = p(&[0.7, 1.9]);
        let (a, b) = (f.evaluate(&x).unwrap(), s.evaluate(&x).unwrap());
        for (u, v) in a.coords().iter().zip(b.coords()) {
            assert_relative_eq!(u, v, max_relative = 1e-15);
        }
    }

    #[test]
    fn signed_matrix_output_leaves_cone() {
        let f = MapExpr::Linear(Matrix::new_signed(vec![vec![1.0, -1.0]]).unwrap());
        assert!(f.evaluate(&p(&[0.0, 1.0])).is_err());
        assert!(Matrix::new(vec![vec![1.0, -1.0]]).is_err());
    }

    #[test]
    fn matrix_algebra() {
        let a1 = m(&[&[1., 1.], &[0., 1.]]);
        let a2 = m(&[&[0.9, 0.], &[0.9, 0.9]]);
        let prod = a1.mul(&a2).unwrap();
        assert_relative_eq!(prod.get(0, 0), 1.8);
        assert_relative_eq!(prod.get(0, 1), 0.9);
        assert_relative_eq!(prod.get(1, 0), 0.9);
        assert_relative_eq!(prod.get(1, 1), 0.9);
        assert!(Matrix::new(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
