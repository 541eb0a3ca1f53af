//! Randomized checks of the structural properties a map is supposed to have.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::map::{Degree, MapExpr};
use crate::num;

/// Relative slack for every comparison made by the checks.
pub const REL_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PropertyKind {
    OrderPreservation,
    Subhomogeneity,
    Homogeneity,
}

/// A failed check. For order preservation `y >= x` was expected to give
/// `f(y) >= f(x)`; for the scaling checks `y = lambda x`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Violation {
    pub kind: PropertyKind,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub lambda: f64,
    pub coordinate: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PropertyReport {
    pub samples: usize,
    pub degree: DegreeTag,
    pub violations: Vec<Violation>,
}

/// Serializable mirror of [`Degree`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DegreeTag {
    Homogeneous(f64),
    Subhomogeneous,
    Unknown,
}

impl From<Degree> for DegreeTag {
    fn from(d: Degree) -> Self {
        match d {
            Degree::Homogeneous(a) => DegreeTag::Homogeneous(a),
            Degree::Subhomogeneous => DegreeTag::Subhomogeneous,
            Degree::Unknown => DegreeTag::Unknown,
        }
    }
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: PropertyKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

pub(crate) fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let (a, b) = (num::ln(lo), num::ln(hi));
    num::exp(a + (b - a) * rng.gen::<f64>())
}

/// A point with log-uniform coordinates in `[1e-3, 1e3]`, each set to zero
/// with probability `zero_prob`.
pub(crate) fn random_point<R: Rng>(rng: &mut R, dim: usize, zero_prob: f64) -> Vec<f64> {
    (0..dim)
        .map(|_| {
            if rng.gen::<f64>() < zero_prob {
                0.0
            } else {
                log_uniform(rng, 1e-3, 1e3)
            }
        })
        .collect()
}

fn first_excess(lhs: &[f64], rhs: &[f64]) -> Option<usize> {
    lhs.iter()
        .zip(rhs)
        .position(|(&a, &b)| !num::le_rel(a, b, REL_SLACK))
}

/// Samples `samples` tuples `(x, y >= x, lambda)` and checks order
/// preservation, subhomogeneity and, when the structural degree is `d`,
/// the identity `f(lambda x) = lambda^d f(x)`.
pub fn check_properties(
    f: &MapExpr,
    dim: usize,
    samples: usize,
    seed: u64,
) -> Result<PropertyReport> {
    f.output_dim(dim)?;
    let degree = f.degree();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    for _ in 0..samples {
        let x = random_point(&mut rng, dim, 0.1);
        let y: Vec<f64> = x
            .iter()
            .map(|&v| {
                if rng.gen::<f64>() < 0.3 {
                    v
                } else {
                    v + log_uniform(&mut rng, 1e-3, 1e3)
                }
            })
            .collect();
        let lambda = log_uniform(&mut rng, 1.0, 1e3);
        let fx = f.eval_raw(&x);
        let fy = f.eval_raw(&y);
        if let Some(i) = first_excess(&fx, &fy) {
            violations.push(Violation {
                kind: PropertyKind::OrderPreservation,
                x: x.clone(),
                y: y.clone(),
                lambda: 1.0,
                coordinate: i,
                lhs: fx[i],
                rhs: fy[i],
            });
        }
        let lx: Vec<f64> = x.iter().map(|v| v * lambda).collect();
        let flx = f.eval_raw(&lx);
        let scaled: Vec<f64> = fx.iter().map(|v| v * lambda).collect();
        if let Some(i) = first_excess(&flx, &scaled) {
            violations.push(Violation {
                kind: PropertyKind::Subhomogeneity,
                x: x.clone(),
                y: lx.clone(),
                lambda,
                coordinate: i,
                lhs: flx[i],
                rhs: scaled[i],
            });
        }
        if let Degree::Homogeneous(d) = degree {
            let factor = num::powf(lambda, d);
            let want: Vec<f64> = fx.iter().map(|v| v * factor).collect();
            let bad = first_excess(&flx, &want).or_else(|| first_excess(&want, &flx));
            if let Some(i) = bad {
                violations.push(Violation {
                    kind: PropertyKind::Homogeneity,
                    x,
                    y: lx,
                    lambda,
                    coordinate: i,
                    lhs: flx[i],
                    rhs: want[i],
                });
            }
        }
    }
    Ok(PropertyReport {
        samples,
        degree: degree.into(),
        violations,
    })
}
