//! Brute-force bounds on the joint spectral radius over all words up to a
//! given length.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cone::{check_dims, thompson_raw, upper_ratio, ConeContext, ExtendedRatio, PointVec};
use crate::error::{Error, Result};
use crate::family::{Family, Word};
use crate::num;
use crate::perron::{power_engine, slice_spectral_radius, PowerConfig};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BracketConfig {
    /// Interior base point for the upper bounds; the cone unit when `None`.
    pub base_point: Option<PointVec>,
    /// Total number of words the enumeration may visit.
    pub max_words: usize,
    /// Power-iteration cap per word beyond `full_budget_depth`.
    pub deep_iter_cap: usize,
    pub full_budget_depth: usize,
    pub power: PowerConfig,
}

impl Default for BracketConfig {
    fn default() -> Self {
        BracketConfig {
            base_point: None,
            max_words: 1 << 20,
            deep_iter_cap: 500,
            full_budget_depth: 3,
            power: PowerConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DepthRow {
    pub k: usize,
    /// `max_w rho(f_w)^{1/k}` over words of length `k`.
    pub lower_k: f64,
    /// `max_w M(f_w(u)/u)^{1/k}` over words of length `k`.
    pub upper_k: f64,
    pub best_word: Word,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JsrBracket {
    pub lower: f64,
    pub upper: f64,
    pub depth: usize,
    pub witness_word: Word,
    pub rows: Vec<DepthRow>,
    /// Set when the word budget stopped the enumeration before `k_max`.
    pub truncated: bool,
}

const WITNESS_TIE: f64 = 1e-12;

struct Level {
    words: Vec<Vec<usize>>,
    images: Vec<Vec<f64>>,
}

fn base_point(ctx: &ConeContext, cfg: &BracketConfig) -> Result<PointVec> {
    let u = cfg.base_point.clone().unwrap_or_else(|| ctx.unit().clone());
    check_dims(ctx.dim(), u.dim())?;
    if !u.is_interior() {
        return Err(Error::NotInterior);
    }
    Ok(u)
}

/// Certified lower bound on `rho(f_w)` from the Collatz-Wielandt data of a
/// power iteration started at `u`.
fn word_radius_lower(
    family: &Family,
    w: &[usize],
    u: &[f64],
    ctx: &ConeContext,
    cfg: &BracketConfig,
) -> Result<f64> {
    let mut power = cfg.power.clone();
    power.epsilon_perturb = 0.0;
    if w.len() > cfg.full_budget_depth {
        power.max_iters = power.max_iters.min(cfg.deep_iter_cap);
    }
    let apply = |x: &[f64]| family.apply_word_raw(w, x);
    match power_engine(&apply, u, ctx, &power, None) {
        Ok(e) => Ok(e.lower),
        Err(Error::CollapsedOrbit) => Ok(0.0),
        Err(e) => Err(e),
    }
}

fn root(v: f64, k: usize) -> f64 {
    if k == 1 {
        v
    } else {
        num::powf(v, 1.0 / k as f64)
    }
}

fn check_depth(family: &Family, k_max: usize) -> Result<()> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be at least 1"));
    }
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    Ok(())
}

/// Enumerates words level by level. `visit` sees each level once, with
/// words in lexicographic order.
fn enumerate(
    family: &Family,
    k_max: usize,
    u: &[f64],
    max_words: usize,
    mut visit: impl FnMut(usize, &Level) -> Result<()>,
) -> Result<(usize, bool)> {
    let n = family.len();
    let mut level = Level {
        words: vec![Vec::new()],
        images: vec![u.to_vec()],
    };
    let mut visited = 0usize;
    for k in 1..=k_max {
        let count = level.words.len() * n;
        if k > 1 && visited.saturating_add(count) > max_words {
            return Ok((k - 1, true));
        }
        visited += count;
        let mut next = Level {
            words: Vec::with_capacity(count),
            images: Vec::with_capacity(count),
        };
        for i in 0..n {
            let f = &family.maps()[i];
            for (w, img) in level.words.iter().zip(&level.images) {
                let mut word = Vec::with_capacity(k);
                word.push(i);
                word.extend_from_slice(w);
                next.words.push(word);
                next.images.push(f.eval_raw(img));
            }
        }
        level = next;
        visit(k, &level)?;
    }
    Ok((k_max, false))
}

/// Brackets the joint spectral radius of a family of 1-homogeneous maps by
/// enumerating every word of length at most `k_max`.
pub fn jsr_bracket(
    family: &Family,
    k_max: usize,
    ctx: &ConeContext,
    cfg: &BracketConfig,
) -> Result<JsrBracket> {
    check_depth(family, k_max)?;
    check_dims(ctx.dim(), family.dim())?;
    family.require_homogeneous()?;
    let u = base_point(ctx, cfg)?;
    let mut rows = Vec::new();
    let (depth, truncated) = enumerate(family, k_max, u.coords(), cfg.max_words, |k, level| {
        let mut upper_k = 0.0f64;
        let mut lower_k = f64::NEG_INFINITY;
        let mut best = Vec::new();
        for (w, img) in level.words.iter().zip(&level.images) {
            upper_k = upper_k.max(root(upper_ratio(img, u.coords()), k));
            if !crate::family::is_canonical(w) {
                continue;
            }
            let l = root(word_radius_lower(family, w, u.coords(), ctx, cfg)?, k);
            if l > lower_k {
                lower_k = l;
                best = w.clone();
            }
        }
        rows.push(DepthRow {
            k,
            lower_k,
            upper_k,
            best_word: Word::new(best)?,
        });
        Ok(())
    })?;
    // Powers of a word tie with the word itself; keep the shortest witness
    // unless a longer one is better beyond rounding.
    let best = rows.iter().fold(&rows[0], |acc, r| {
        if r.lower_k > acc.lower_k * (1.0 + WITNESS_TIE) {
            r
        } else {
            acc
        }
    });
    Ok(JsrBracket {
        lower: best.lower_k,
        witness_word: best.best_word.clone(),
        upper: rows.iter().map(|r| r.upper_k).fold(f64::INFINITY, f64::min),
        depth,
        rows,
        truncated,
    })
}

/// `sup rho(f_w)^{1/|w|}` over words of length at most `k_max`, with the
/// word attaining it. Increasing `k_max` never decreases the value.
pub fn generalized_jsr_partial(
    family: &Family,
    k_max: usize,
    ctx: &ConeContext,
    cfg: &BracketConfig,
) -> Result<(f64, Word)> {
    let b = jsr_bracket(family, k_max, ctx, cfg)?;
    Ok((b.lower, b.witness_word))
}

/// Lower estimate `max_w rho^c(f_w)^{1/|w|}` for a subhomogeneous family,
/// using slice spectral radii at level `c`.
pub fn slice_lower_estimate(
    family: &Family,
    k_max: usize,
    c: f64,
    ctx: &ConeContext,
    cfg: &BracketConfig,
) -> Result<(f64, Word)> {
    check_depth(family, k_max)?;
    check_dims(ctx.dim(), family.dim())?;
    let u = ctx.unit().coords().to_vec();
    let mut best = (f64::NEG_INFINITY, Word::empty());
    enumerate(family, k_max, &u, cfg.max_words, |k, level| {
        for w in &level.words {
            let word = Word::new(w.clone())?;
            let g = family.word_map(&word)?;
            let e = slice_spectral_radius(&g, c, ctx, &cfg.power)?;
            let v = root(e.value, k);
            if v > best.0 {
                best = (v, word);
            }
        }
        Ok(())
    })?;
    Ok(best)
}

/// Bounds for a subhomogeneous family through its asymptotic families:
/// `rho(F_inf) <= rho(F) <= rho(F_0)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Sandwich {
    pub infinity: JsrBracket,
    /// `None` when some member has a divergent zero limit.
    pub zero: Option<JsrBracket>,
    pub lower: f64,
    pub upper: ExtendedRatio,
}

pub fn subhomogeneous_sandwich(
    family: &Family,
    k_max: usize,
    ctx: &ConeContext,
    cfg: &BracketConfig,
) -> Result<Sandwich> {
    let inf_family = family.infinity_family()?;
    let infinity = jsr_bracket(&inf_family, k_max, ctx, cfg)?;
    let zero = match family.zero_family()? {
        Some(f0) => Some(jsr_bracket(&f0, k_max, ctx, cfg)?),
        None => None,
    };
    Ok(Sandwich {
        lower: infinity.lower,
        upper: zero
            .as_ref()
            .map_or(ExtendedRatio::Infinite, |z| ExtendedRatio::Finite(z.upper)),
        infinity,
        zero,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrajectoryConfig {
    pub radius: f64,
    pub horizon: usize,
    pub trials: usize,
    pub seed: u64,
    /// Growth rate used to fit the prefactor, typically an upper bound on
    /// the joint spectral radius plus a margin.
    pub rate: f64,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        TrajectoryConfig {
            radius: 0.1,
            horizon: 20,
            trials: 32,
            seed: 0,
            rate: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrajectoryViolation {
    pub trial: usize,
    pub step: usize,
    pub initial: f64,
    pub observed: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrajectoryReport {
    pub trials: usize,
    pub horizon: usize,
    /// Whether every member is subhomogeneous by structure, so that the
    /// Thompson check is expected to hold.
    pub applicable: bool,
    pub nonexpansive_violations: Vec<TrajectoryViolation>,
    /// Largest Thompson distance seen at each step.
    pub max_thompson: Vec<f64>,
    /// `max_k ||x_k - y_k|| / (rate^k ||x - y||)`.
    pub fitted_prefactor: f64,
    pub rate: f64,
    /// Largest one-step ratio `||x_k - y_k|| / ||x_{k-1} - y_{k-1}||`.
    pub max_step_growth: f64,
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| num::abs(p - q))
        .fold(0.0, f64::max)
}

/// Follows pairs of nearby trajectories under random switching.
///
/// The Thompson distance between the two orbits must never grow; any growth
/// beyond `1e-10` relative slack is recorded as a violation. The sup-norm
/// gap is summarized by the fitted prefactor for `cfg.rate`.
pub fn trajectory_divergence_check(
    family: &Family,
    x: &PointVec,
    cfg: &TrajectoryConfig,
) -> Result<TrajectoryReport> {
    check_dims(family.dim(), x.dim())?;
    if !(cfg.radius >= 0.0 && cfg.radius < x.min_coord()) {
        return Err(Error::NotInterior);
    }
    if !(cfg.rate > 0.0) {
        return Err(Error::InvalidParameter("rate must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut report = TrajectoryReport {
        trials: cfg.trials,
        horizon: cfg.horizon,
        applicable: family.degrees().iter().all(|d| d.is_subhomogeneous()),
        nonexpansive_violations: Vec::new(),
        max_thompson: vec![0.0; cfg.horizon],
        fitted_prefactor: 0.0,
        rate: cfg.rate,
        max_step_growth: 0.0,
    };
    for trial in 0..cfg.trials {
        let mut a = x.coords().to_vec();
        let mut b: Vec<f64> = a
            .iter()
            .map(|&v| v + cfg.radius * (2.0 * rng.gen::<f64>() - 1.0))
            .collect();
        let d0 = thompson_raw(&a, &b);
        let n0 = sup_dist(&a, &b);
        let mut prev = n0;
        let mut scale = 1.0;
        for step in 0..cfg.horizon {
            let i = rng.gen_range(0..family.len());
            a = family.maps()[i].eval_raw(&a);
            b = family.maps()[i].eval_raw(&b);
            let d = thompson_raw(&a, &b);
            report.max_thompson[step] = report.max_thompson[step].max(d);
            if !num::le_rel(d, d0, 1e-10) && d - d0 > 1e-15 {
                report.nonexpansive_violations.push(TrajectoryViolation {
                    trial,
                    step: step + 1,
                    initial: d0,
                    observed: d,
                });
            }
            let gap = sup_dist(&a, &b);
            scale *= cfg.rate;
            if n0 > 0.0 {
                report.fitted_prefactor = report.fitted_prefactor.max(gap / (scale * n0));
            }
            if prev > 0.0 {
                report.max_step_growth = report.max_step_growth.max(gap / prev);
            }
            prev = gap;
        }
    }
    Ok(report)
}
