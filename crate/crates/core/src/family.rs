//! Finite families of maps and words over them.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::cone::{check_dims, PointVec};
use crate::error::{Error, Result};
use crate::map::{Asymptotic, Degree, MapExpr};

/// An index sequence `[i_1, ..., i_k]` standing for `f_{i_1} o ... o f_{i_k}`.
///
/// The rightmost map is applied first. Indices are zero-based in memory;
/// `Display` and serialization use one-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "Vec<usize>", into = "Vec<usize>")
)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(Word(indices))
    }

    pub fn from_one_based(indices: &[usize]) -> Result<Self> {
        let mut out = Vec::with_capacity(indices.len());
        for &i in indices {
            if i == 0 {
                return Err(Error::IndexOutOfRange { index: 0, len: 0 });
            }
            out.push(i - 1);
        }
        Word::new(out)
    }

    /// The empty word, used only as the generator path of a starting vertex.
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    /// `f_i o self`.
    pub fn prepend(&self, i: usize) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(i);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    /// The lexicographically smallest cyclic rotation.
    pub fn canonical_rotation(&self) -> Word {
        let n = self.0.len();
        (0..n)
            .map(|s| {
                let mut v = self.0[s..].to_vec();
                v.extend_from_slice(&self.0[..s]);
                v
            })
            .min()
            .map(Word)
            .unwrap_or_else(Word::empty)
    }

    pub fn is_canonical_rotation(&self) -> bool {
        is_canonical(&self.0)
    }
}

pub(crate) fn is_canonical(w: &[usize]) -> bool {
    (1..w.len()).all(|s| {
        let rot = w[s..].iter().chain(&w[..s]);
        w.iter().cmp(rot) != core::cmp::Ordering::Greater
    })
}

impl TryFrom<Vec<usize>> for Word {
    type Error = Error;
    /// Accepts the empty list so that generator paths round-trip.
    fn try_from(v: Vec<usize>) -> Result<Self> {
        if v.is_empty() {
            return Ok(Word::empty());
        }
        Word::from_one_based(&v)
    }
}

impl From<Word> for Vec<usize> {
    fn from(w: Word) -> Self {
        w.one_based()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str("]")
    }
}

/// A nonempty list of maps `R^n_+ -> R^n_+`.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    dim: usize,
    maps: Vec<MapExpr>,
    labels: Vec<String>,
    degrees: Vec<Degree>,
}

impl Family {
    pub fn new(dim: usize, maps: Vec<MapExpr>) -> Result<Self> {
        let labels = (1..=maps.len()).map(|i| format!("f{i}")).collect();
        Self::with_labels(dim, maps, labels)
    }

    pub fn with_labels(dim: usize, maps: Vec<MapExpr>, labels: Vec<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyVector);
        }
        if maps.is_empty() {
            return Err(Error::EmptyFamily);
        }
        check_dims(maps.len(), labels.len())?;
        for f in &maps {
            check_dims(dim, f.output_dim(dim)?)?;
        }
        let degrees = maps.iter().map(MapExpr::degree).collect();
        Ok(Family {
            dim,
            maps,
            labels,
            degrees,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn maps(&self) -> &[MapExpr] {
        &self.maps
    }

    pub fn get(&self, i: usize) -> Option<&MapExpr> {
        self.maps.get(i)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degrees(&self) -> &[Degree] {
        &self.degrees
    }

    /// Errors with the first member that is not 1-homogeneous by structure.
    pub fn require_homogeneous(&self) -> Result<()> {
        match self.degrees.iter().position(|d| !d.is_homogeneous()) {
            Some(member) => Err(Error::NotHomogeneous { member }),
            None => Ok(()),
        }
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        if w.is_empty() {
            return Err(Error::EmptyWord);
        }
        match w.indices().iter().find(|&&i| i >= self.maps.len()) {
            Some(&index) => Err(Error::IndexOutOfRange {
                index,
                len: self.maps.len(),
            }),
            None => Ok(()),
        }
    }

    pub(crate) fn apply_word_raw(&self, w: &[usize], x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for &i in w.iter().rev() {
            y = self.maps[i].eval_raw(&y);
        }
        y
    }

    pub fn evaluate_word(&self, w: &Word, x: &PointVec) -> Result<PointVec> {
        self.check_word(w)?;
        check_dims(self.dim, x.dim())?;
        PointVec::from_image(self.apply_word_raw(w.indices(), x.coords()))
    }

    /// The composite `f_{i_1} o ... o f_{i_k}` as a single expression.
    pub fn word_map(&self, w: &Word) -> Result<MapExpr> {
        self.check_word(w)?;
        MapExpr::chain(w.indices().iter().map(|&i| self.maps[i].clone()).collect())
    }

    /// Every member multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Family> {
        let maps = self
            .maps
            .iter()
            .map(|f| MapExpr::scale(c, f.clone()))
            .collect::<Result<Vec<_>>>()?;
        Family::with_labels(self.dim, maps, self.labels.clone())
    }

    /// The family of zero limits, or `None` when some member diverges.
    pub fn zero_family(&self) -> Result<Option<Family>> {
        let mut maps = Vec::with_capacity(self.maps.len());
        for f in &self.maps {
            match f.asymptotic_zero(self.dim)? {
                Asymptotic::Map(m) => maps.push(m),
                Asymptotic::Divergent => return Ok(None),
            }
        }
        Family::with_labels(self.dim, maps, self.labels.clone()).map(Some)
    }

    pub fn infinity_family(&self) -> Result<Family> {
        let maps = self
            .maps
            .iter()
            .map(|f| f.asymptotic_infinity(self.dim))
            .collect::<Result<Vec<_>>>()?;
        Family::with_labels(self.dim, maps, self.labels.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn p(v: &[f64]) -> PointVec {
        PointVec::new(v.to_vec()).unwrap()
    }

    fn ex2() -> Family {
        Family::new(
            2,
            vec![
                MapExpr::linear(vec![vec![1., 1.], vec![0., 1.]]).unwrap(),
                MapExpr::linear(vec![vec![0.9, 0.], vec![0.9, 0.9]]).unwrap(),
            ],
        )
        .unwrap()
    }

    /// The one place the composition convention is pinned down: `[i, j]`
    /// applies `f_j` first.
    #[test]
    fn word_applies_rightmost_map_first() {
        let fam = ex2();
        let w = Word::from_one_based(&[1, 2]).unwrap();
        let y = fam.evaluate_word(&w, &p(&[1., 0.])).unwrap();
        assert_relative_eq!(y.coords()[0], 1.8, max_relative = 1e-15);
        assert_relative_eq!(y.coords()[1], 0.9, max_relative = 1e-15);
        let flipped = fam
            .evaluate_word(&Word::from_one_based(&[2, 1]).unwrap(), &p(&[1., 0.]))
            .unwrap();
        assert_ne!(flipped, y);
    }

    #[test]
    fn single_letter_and_repeats() {
        let fam = ex2();
        let x = p(&[0.3, 2.0]);
        let one = fam.evaluate_word(&Word::new(vec![0]).unwrap(), &x).unwrap();
        assert_eq!(one, fam.maps()[0].evaluate(&x).unwrap());
        let twice = fam
            .evaluate_word(&Word::new(vec![0, 0]).unwrap(), &x)
            .unwrap();
        assert_eq!(twice, fam.maps()[0].evaluate(&one).unwrap());
        let composed = fam.word_map(&Word::new(vec![0, 1]).unwrap()).unwrap();
        assert_eq!(
            composed.evaluate(&x).unwrap(),
            fam.evaluate_word(&Word::new(vec![0, 1]).unwrap(), &x)
                .unwrap()
        );
    }

    #[test]
    fn bad_words_and_families() {
        let fam = ex2();
        assert!(fam.check_word(&Word::new(vec![2]).unwrap()).is_err());
        assert!(Word::new(vec![]).is_err());
        assert!(Word::from_one_based(&[0]).is_err());
        assert_eq!(Family::new(2, vec![]), Err(Error::EmptyFamily));
        let wrong = MapExpr::linear(vec![vec![1., 1., 1.]]).unwrap();
        assert!(Family::new(2, vec![wrong]).is_err());
    }

    #[test]
    fn rotations() {
        let w = Word::new(vec![1, 0, 1]).unwrap();
        assert_eq!(w.canonical_rotation(), Word::new(vec![0, 1, 1]).unwrap());
        assert!(!w.is_canonical_rotation());
        assert!(Word::new(vec![0, 1, 1]).unwrap().is_canonical_rotation());
        assert!(Word::new(vec![0, 1, 0, 1]).unwrap().is_canonical_rotation());
        assert_eq!(alloc::format!("{w}"), "[2,1,2]");
    }

    #[test]
    fn homogeneity_requirement() {
        use crate::activation::Activation;
        let fam = ex2();
        assert!(fam.require_homogeneous().is_ok());
        let ann = MapExpr::ann(
            crate::map::Matrix::identity(2),
            crate::map::Matrix::identity(2),
            PointVec::zeros(2),
            Activation::Tanh,
        )
        .unwrap();
        let f2 = Family::new(2, vec![fam.maps()[0].clone(), ann]).unwrap();
        assert_eq!(
            f2.require_homogeneous(),
            Err(Error::NotHomogeneous { member: 1 })
        );
    }
}
