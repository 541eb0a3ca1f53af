//! Certification of the joint spectral radius by a finitely generated
//! monotone prenorm grown from the eigenvector of a candidate product.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cone::{check_dims, lower_ratio, thompson_raw, upper_ratio, ConeContext, PointVec};
use crate::error::{Error, Result};
use crate::family::{Family, Word};
use crate::map::MapExpr;
use crate::num;
use crate::perron::{power_engine, PowerConfig};
use crate::props::log_uniform;

/// `Theta(x) = min_j M(x/z_j)` for a finite set of vertices `z_j`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FinitePrenorm {
    pub vertices: Vec<PointVec>,
    /// Path from the starting eigenvector to each vertex in the normalized
    /// family. The starting vertex has the empty word.
    pub generator_words: Vec<Word>,
    /// Expansion round in which each vertex was created (0 for the start).
    pub rounds: Vec<usize>,
}

impl FinitePrenorm {
    pub fn single(z: PointVec) -> Self {
        FinitePrenorm {
            vertices: vec![z],
            generator_words: vec![Word::empty()],
            rounds: vec![0],
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Removes vertex `j`, for tests that tamper with certificates.
    pub fn remove(&mut self, j: usize) {
        self.vertices.remove(j);
        self.generator_words.remove(j);
        self.rounds.remove(j);
    }

    /// Whether `M(z_j/z_h) > 1` for every pair `j != h`.
    pub fn pairwise_non_dominated(&self) -> bool {
        let v = &self.vertices;
        (0..v.len()).all(|j| {
            (0..v.len()).all(|h| j == h || upper_ratio(v[j].coords(), v[h].coords()) > 1.0)
        })
    }
}

fn theta_raw(vertices: &[PointVec], x: &[f64]) -> f64 {
    vertices
        .iter()
        .map(|z| upper_ratio(x, z.coords()))
        .fold(f64::INFINITY, f64::min)
}

pub fn prenorm_value(p: &FinitePrenorm, x: &PointVec) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::EmptyVector);
    }
    check_dims(p.vertices[0].dim(), x.dim())?;
    Ok(theta_raw(&p.vertices, x.coords()))
}

/// `max_j Theta(f(z_j))`, the operator value of `f` for the prenorm.
pub fn prenorm_operator_value(p: &FinitePrenorm, f: &MapExpr) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::EmptyVector);
    }
    let n = p.vertices[0].dim();
    check_dims(n, f.output_dim(n)?)?;
    Ok(p.vertices
        .iter()
        .map(|z| theta_raw(&p.vertices, &f.eval_raw(z.coords())))
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlgoConfig {
    pub dom_tol: f64,
    pub strict_witness_tol: f64,
    pub max_vertices: usize,
    pub max_restarts: usize,
    pub extended_smp_update: bool,
    pub power: PowerConfig,
}

impl Default for AlgoConfig {
    fn default() -> Self {
        AlgoConfig {
            dom_tol: 1e-9,
            strict_witness_tol: 1e-9,
            max_vertices: 10_000,
            max_restarts: 50,
            extended_smp_update: false,
            power: PowerConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CertStatus {
    Certified,
    BudgetExceeded,
    /// The run stopped on a better candidate product it could not pursue
    /// (restart budget spent or a repeated candidate).
    SmpUpdated(Word),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Restart {
    pub from: Word,
    pub to: Word,
    pub alpha_before: f64,
    pub witness_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Certificate {
    pub smp_word: Word,
    pub alpha: f64,
    pub prenorm: FinitePrenorm,
    pub tol: f64,
    pub witness_tol: f64,
    pub status: CertStatus,
    /// Frontier rounds of the final pass, including the last one that adds
    /// no vertex.
    pub rounds: usize,
    pub restarts: Vec<Restart>,
    pub cycle_detected: bool,
    /// `d_T(f*(x*), alpha^k x*)` at the starting vertex.
    pub eigen_residual: f64,
}

enum Pass {
    Done { rounds: usize, budget: bool },
    Witness { to: Word, ratio: f64 },
}

struct Grower<'a> {
    family: &'a Family,
    alpha: f64,
    cfg: &'a AlgoConfig,
    vertices: Vec<Vec<f64>>,
    words: Vec<Word>,
    rounds: Vec<usize>,
    alive: Vec<bool>,
}

impl Grower<'_> {
    fn image(&self, i: usize, z: &[f64]) -> Vec<f64> {
        let mut y = self.family.maps()[i].eval_raw(z);
        y.iter_mut().for_each(|v| *v /= self.alpha);
        y
    }

    fn covered(&self, y: &[f64]) -> bool {
        self.vertices
            .iter()
            .zip(&self.alive)
            .any(|(z, &a)| a && upper_ratio(y, z) <= 1.0 + self.cfg.dom_tol)
    }

    fn push(&mut self, y: Vec<f64>, word: Word, round: usize) -> usize {
        // Vertices lying below the new one no longer shape the prenorm; the
        // starting vertex is kept for the eigen-equation check.
        for h in 1..self.vertices.len() {
            if self.alive[h] && self.vertices[h].iter().zip(&y).all(|(a, b)| a <= b) {
                self.alive[h] = false;
            }
        }
        self.vertices.push(y);
        self.words.push(word);
        self.rounds.push(round);
        self.alive.push(true);
        self.vertices.len() - 1
    }

    fn run(&mut self) -> Pass {
        let mut frontier = vec![0usize];
        let mut round = 0;
        while !frontier.is_empty() {
            round += 1;
            let mut next = Vec::new();
            for &j in &frontier {
                if !self.alive[j] {
                    continue;
                }
                for i in 0..self.family.len() {
                    let y = self.image(i, &self.vertices[j]);
                    let lit = lower_ratio(&y, &self.vertices[j]);
                    if lit > 1.0 + self.cfg.strict_witness_tol {
                        return Pass::Witness {
                            to: Word::new(vec![i]).expect("nonempty"),
                            ratio: lit,
                        };
                    }
                    if self.cfg.extended_smp_update {
                        let ext = lower_ratio(&y, &self.vertices[0]);
                        if ext > 1.0 + self.cfg.strict_witness_tol {
                            return Pass::Witness {
                                to: self.words[j].prepend(i),
                                ratio: ext,
                            };
                        }
                    }
                    if !self.covered(&y) {
                        let word = self.words[j].prepend(i);
                        next.push(self.push(y, word, round));
                        // Pruned vertices count too: a run whose new vertices keep
                        // dominating the old ones would otherwise never stop.
                        if self.vertices.len() > self.cfg.max_vertices {
                            return Pass::Done {
                                rounds: round,
                                budget: true,
                            };
                        }
                    }
                }
            }
            frontier = next;
        }
        Pass::Done {
            rounds: round,
            budget: false,
        }
    }

    fn prenorm(&self) -> Result<FinitePrenorm> {
        let mut p = FinitePrenorm {
            vertices: Vec::new(),
            generator_words: Vec::new(),
            rounds: Vec::new(),
        };
        for j in 0..self.vertices.len() {
            if self.alive[j] {
                p.vertices
                    .push(PointVec::from_image(self.vertices[j].clone())?);
                p.generator_words.push(self.words[j].clone());
                p.rounds.push(self.rounds[j]);
            }
        }
        Ok(p)
    }
}

fn word_residual(family: &Family, w: &Word, alpha: f64, z: &[f64]) -> f64 {
    let fz = family.apply_word_raw(w.indices(), z);
    let ak = num::powf(alpha, w.len() as f64);
    let scaled: Vec<f64> = z.iter().map(|v| ak * v).collect();
    thompson_raw(&fz, &scaled)
}

/// Grows a finitely generated prenorm from the eigenvector of the candidate
/// product `initial_smp`, restarting on a better single-map candidate.
pub fn run_polytope(
    family: &Family,
    initial_smp: &Word,
    ctx: &ConeContext,
    cfg: &AlgoConfig,
) -> Result<Certificate> {
    check_dims(ctx.dim(), family.dim())?;
    family.require_homogeneous()?;
    family.check_word(initial_smp)?;
    if !(cfg.dom_tol > 0.0 && cfg.strict_witness_tol > 0.0) {
        return Err(Error::InvalidParameter("tolerances must be positive"));
    }
    let mut smp = initial_smp.clone();
    let mut restarts: Vec<Restart> = Vec::new();
    let mut seen = vec![smp.canonical_rotation()];
    let power = PowerConfig {
        epsilon_perturb: 0.0,
        slice_c: 1.0,
        ..cfg.power.clone()
    };
    loop {
        let apply = |x: &[f64]| family.apply_word_raw(smp.indices(), x);
        let eig = power_engine(&apply, ctx.unit().coords(), ctx, &power, None)?;
        if eig.boundary || !eig.vector.is_interior() {
            return Err(Error::BoundaryEigenvector);
        }
        let alpha = num::powf(eig.value, 1.0 / smp.len() as f64);
        let xs = eig.vector.coords().to_vec();
        let eigen_residual = word_residual(family, &smp, alpha, &xs);
        let mut grower = Grower {
            family,
            alpha,
            cfg,
            vertices: vec![xs],
            words: vec![Word::empty()],
            rounds: vec![0],
            alive: vec![true],
        };
        let pass = grower.run();
        let finish = |status, rounds, restarts, cycle_detected, grower: &Grower| {
            Ok(Certificate {
                smp_word: smp.clone(),
                alpha,
                prenorm: grower.prenorm()?,
                tol: cfg.dom_tol,
                witness_tol: cfg.strict_witness_tol,
                status,
                rounds,
                restarts,
                cycle_detected,
                eigen_residual,
            })
        };
        match pass {
            Pass::Done { rounds, budget } => {
                let status = if budget {
                    CertStatus::BudgetExceeded
                } else {
                    CertStatus::Certified
                };
                return finish(status, rounds, restarts, false, &grower);
            }
            Pass::Witness { to, ratio } => {
                restarts.push(Restart {
                    from: smp.clone(),
                    to: to.clone(),
                    alpha_before: alpha,
                    witness_ratio: ratio,
                });
                let key = to.canonical_rotation();
                let cycle = seen.contains(&key);
                if cycle || restarts.len() > cfg.max_restarts {
                    return finish(CertStatus::SmpUpdated(to), 0, restarts, cycle, &grower);
                }
                seen.push(key);
                smp = to;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum VerifyFailure {
    NotCertified,
    EmptyPrenorm,
    VertexNotInterior {
        vertex: usize,
    },
    /// `min_h M(f_i(z_j)/z_h) / alpha` exceeds `1 + tol`.
    Condition1 {
        map: usize,
        vertex: usize,
        ratio: f64,
    },
    /// No vertex satisfies the eigen-equation of the candidate product.
    Condition2 {
        residual: f64,
    },
    Sample {
        map: usize,
        ratio: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerifyReport {
    pub ok: bool,
    pub first_violation: Option<VerifyFailure>,
    /// `max_{i,j} min_h M(f_i(z_j)/z_h) / alpha`.
    pub condition1_max: f64,
    /// Smallest eigen-equation residual over the vertices.
    pub eigen_residual: f64,
    /// Largest `Theta(f_i(x)) / (alpha Theta(x))` over the random samples.
    pub sampled_max_ratio: f64,
    pub samples: usize,
}

/// Re-checks a certificate from scratch against the family.
pub fn verify_certificate(
    family: &Family,
    cert: &Certificate,
    n_random: usize,
    seed: u64,
) -> Result<VerifyReport> {
    family.check_word(&cert.smp_word)?;
    let mut report = VerifyReport {
        ok: false,
        first_violation: None,
        condition1_max: f64::INFINITY,
        eigen_residual: f64::INFINITY,
        sampled_max_ratio: f64::INFINITY,
        samples: n_random,
    };
    let fail = |mut r: VerifyReport, why| {
        r.first_violation = Some(why);
        Ok(r)
    };
    if cert.status != CertStatus::Certified {
        return fail(report, VerifyFailure::NotCertified);
    }
    let verts = &cert.prenorm.vertices;
    if verts.is_empty() {
        return fail(report, VerifyFailure::EmptyPrenorm);
    }
    for (j, z) in verts.iter().enumerate() {
        check_dims(family.dim(), z.dim())?;
        if !z.is_interior() {
            return fail(report, VerifyFailure::VertexNotInterior { vertex: j });
        }
    }
    let tol = cert.tol;
    let alpha = cert.alpha;
    let mut worst = 0.0f64;
    let mut first_bad = None;
    for (i, f) in family.maps().iter().enumerate() {
        for (j, z) in verts.iter().enumerate() {
            let r = theta_raw(verts, &f.eval_raw(z.coords())) / alpha;
            worst = worst.max(r);
            if r > 1.0 + tol && first_bad.is_none() {
                first_bad = Some(VerifyFailure::Condition1 {
                    map: i,
                    vertex: j,
                    ratio: r,
                });
            }
        }
    }
    report.condition1_max = worst;
    if let Some(why) = first_bad {
        return fail(report, why);
    }
    let residual = verts
        .iter()
        .map(|z| word_residual(family, &cert.smp_word, alpha, z.coords()))
        .fold(f64::INFINITY, f64::min);
    report.eigen_residual = residual;
    if !(residual <= tol) {
        return fail(report, VerifyFailure::Condition2 { residual });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = family.dim();
    let mut sampled = 0.0f64;
    for _ in 0..n_random {
        let x: Vec<f64> = (0..n).map(|_| log_uniform(&mut rng, 1e-3, 1e3)).collect();
        let tx = theta_raw(verts, &x);
        let i = rng.gen_range(0..family.len());
        let r = theta_raw(verts, &family.maps()[i].eval_raw(&x)) / (alpha * tx);
        sampled = sampled.max(r);
        if r > (1.0 + tol) * (1.0 + 1e-12) {
            report.sampled_max_ratio = sampled;
            return fail(report, VerifyFailure::Sample { map: i, ratio: r });
        }
    }
    report.sampled_max_ratio = sampled;
    report.ok = true;
    Ok(report)
}
