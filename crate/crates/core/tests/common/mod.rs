//! Families and helpers shared by the integration tests.
#![allow(dead_code)]

use conejsr_core::{Activation, Family, MapExpr, Matrix, PointVec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn mat(rows: &[&[f64]]) -> Matrix {
    Matrix::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

pub fn pt(v: &[f64]) -> PointVec {
    PointVec::new(v.to_vec()).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The linear pair with `A1 A2` spectrum maximizing.
pub fn linear_pair() -> Family {
    Family::new(
        2,
        vec![
            MapExpr::Linear(mat(&[&[1., 1.], &[0., 1.]])),
            MapExpr::Linear(mat(&[&[0.9, 0.], &[0.9, 0.9]])),
        ],
    )
    .unwrap()
}

pub const PM_A1: [[f64; 2]; 2] = [[0.8, 0.1], [0.1, 0.8]];
pub const PM_A2: [[f64; 2]; 2] = [[0.8, 0.0], [0.1, 0.8]];
pub const PM_B1: [[f64; 2]; 2] = [[0.8, 0.2], [0.0, 0.8]];
pub const PM_B2: [[f64; 2]; 2] = [[0.9, 0.0], [0.8, 0.7]];

fn m2(a: [[f64; 2]; 2]) -> Matrix {
    mat(&[&a[0], &a[1]])
}

/// `f_i(x) = (B_i (A_i x)^{a_i})^{1/a_i}` with exponents `a1` and `a2`.
pub fn power_mean_pair(a1: f64, a2: f64) -> Family {
    Family::new(
        2,
        vec![
            MapExpr::power_mean(m2(PM_A1), m2(PM_B1), a1).unwrap(),
            MapExpr::power_mean(m2(PM_A2), m2(PM_B2), a2).unwrap(),
        ],
    )
    .unwrap()
}

/// `x -> (x1 + M_{-1}(x1, x2), x2)`.
pub fn harmonic_shift() -> MapExpr {
    MapExpr::Sum(vec![
        MapExpr::identity(),
        MapExpr::compose(
            MapExpr::Linear(mat(&[&[1.], &[0.]])),
            MapExpr::HarmonicMean(0, 1),
        ),
    ])
}

/// `M_{-1}(a, b) = (1/a + 1/b)^{-1}`, computed directly as an oracle for
/// the expression tree.
pub fn harmonic_mean(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        1.0 / (1.0 / a + 1.0 / b)
    }
}

pub fn random_nonneg(r: &mut ChaCha8Rng, rows: usize, cols: usize, zero_prob: f64) -> Matrix {
    let data = (0..rows * cols)
        .map(|_| {
            if r.gen::<f64>() < zero_prob {
                0.0
            } else {
                r.gen::<f64>()
            }
        })
        .collect();
    Matrix::from_row_major(rows, cols, data).unwrap()
}

/// A sparse nonnegative matrix made irreducible by a positive cycle.
pub fn random_irreducible(r: &mut ChaCha8Rng, n: usize) -> Matrix {
    let mut rows = random_nonneg(r, n, n, 0.6).to_rows();
    for i in 0..n {
        rows[i][(i + 1) % n] += 0.1 + r.gen::<f64>();
    }
    Matrix::new(rows).unwrap()
}

/// `x -> A x + phi(B x) + b` with random nonnegative `A`, `B` and bias.
pub fn random_ann(r: &mut ChaCha8Rng, n: usize, act: Activation, bias: bool) -> MapExpr {
    let a = random_nonneg(r, n, n, 0.3);
    let b = random_nonneg(r, n, n, 0.3);
    let bias = if bias {
        PointVec::new((0..n).map(|_| r.gen::<f64>()).collect()).unwrap()
    } else {
        PointVec::zeros(n)
    };
    MapExpr::ann(a, b, bias, act).unwrap()
}

/// Positive vector with log-uniform coordinates in `[1e-3, 1e3]`.
pub fn random_interior(r: &mut ChaCha8Rng, n: usize) -> PointVec {
    PointVec::new((0..n).map(|_| 10f64.powf(r.gen_range(-3.0..3.0))).collect()).unwrap()
}

/// Like [`random_interior`] but each coordinate is zero with probability 0.2.
pub fn random_point(r: &mut ChaCha8Rng, n: usize) -> PointVec {
    PointVec::new(
        (0..n)
            .map(|_| {
                if r.gen::<f64>() < 0.2 {
                    0.0
                } else {
                    10f64.powf(r.gen_range(-3.0..3.0))
                }
            })
            .collect(),
    )
    .unwrap()
}

/// Perron root from a dense eigensolver: largest eigenvalue modulus.
pub fn dense_spectral_radius(m: &Matrix) -> f64 {
    let n = m.rows();
    let d = nalgebra::DMatrix::from_fn(n, n, |i, j| m.get(i, j));
    d.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Product of a word's matrices, rightmost applied first.
pub fn word_matrix(mats: &[Matrix], word: &[usize]) -> Matrix {
    let n = mats[0].rows();
    word.iter()
        .fold(Matrix::identity(n), |acc, &i| acc.mul(&mats[i]).unwrap())
}
