//! Nonlinear power iteration, Collatz-Wielandt brackets and slice
//! eigenvalue curves.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cone::{
    check_dims, hilbert_raw, lower_ratio, thompson_raw, upper_ratio, ConeContext, ExtendedRatio,
    PointVec,
};
use crate::error::{Error, Result};
use crate::map::{Asymptotic, MapExpr, Matrix};
use crate::num;
use crate::props::random_point;

/// Iterates whose smallest coordinate is below this fraction of the largest
/// are reported as boundary eigenvectors.
pub const BOUNDARY_RATIO: f64 = 1e-9;

/// Iterations without a 0.1% residual improvement before the iteration
/// switches to the shifted map `x -> f(x) + s x`.
const STALL_WINDOW: usize = 64;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerConfig {
    pub max_iters: usize,
    pub hilbert_tol: f64,
    pub epsilon_perturb: f64,
    pub slice_c: f64,
    /// Random interior restarts used by the slice iteration.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig {
            max_iters: 10_000,
            hilbert_tol: 1e-13,
            epsilon_perturb: 0.0,
            slice_c: 1.0,
            restarts: 8,
            seed: 0,
        }
    }
}

impl PowerConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be at least 1"));
        }
        if !(self.hilbert_tol > 0.0) {
            return Err(Error::InvalidParameter("hilbert_tol must be positive"));
        }
        if !(self.epsilon_perturb >= 0.0) {
            return Err(Error::InvalidParameter(
                "epsilon_perturb must be nonnegative",
            ));
        }
        if !(self.slice_c > 0.0 && self.slice_c.is_finite()) {
            return Err(Error::InvalidParameter("slice_c must be positive"));
        }
        Ok(())
    }
}

/// An approximate eigenpair with its certified bracket.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EigenPair {
    pub vector: PointVec,
    pub value: f64,
    /// Hilbert distance `d_H(f(x), x)` for homogeneous maps, Thompson
    /// distance `d_T(f(x), value x)` on a slice.
    pub residual: ExtendedRatio,
    /// Largest `m(f(x)/x)` seen along the orbit.
    pub lower: f64,
    /// Smallest `M(f(x)/x)` over interior iterates.
    pub upper: ExtendedRatio,
    pub iterations: usize,
    pub converged: bool,
    pub boundary: bool,
}

/// Per-iteration data, exposed for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterStat {
    pub lower: f64,
    pub upper: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CwBracket {
    pub lower: f64,
    /// `None` when the point is on the boundary.
    pub upper: Option<f64>,
}

fn is_boundary(x: &[f64]) -> bool {
    let max = x.iter().copied().fold(0.0, f64::max);
    x.iter().any(|&v| v < BOUNDARY_RATIO * max)
}

/// `x` with the coordinates below `BOUNDARY_RATIO * max` set to zero, or
/// `None` when no coordinate is that small.
fn truncate_to_face(x: &[f64]) -> Option<Vec<f64>> {
    let cut = BOUNDARY_RATIO * x.iter().copied().fold(0.0, f64::max);
    x.iter()
        .any(|&v| v < cut)
        .then(|| x.iter().map(|&v| if v < cut { 0.0 } else { v }).collect())
}

fn rescale(y: &[f64], c: f64, p: f64) -> Vec<f64> {
    y.iter().map(|v| c * v / p).collect()
}

/// Power iteration on an arbitrary homogeneous operator.
pub(crate) fn power_engine(
    apply: &dyn Fn(&[f64]) -> Vec<f64>,
    x0: &[f64],
    ctx: &ConeContext,
    cfg: &PowerConfig,
    mut trace: Option<&mut Vec<IterStat>>,
) -> Result<EigenPair> {
    let c = cfg.slice_c;
    let p0 = ctx.psi(x0);
    if p0 <= 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut x = rescale(x0, c, p0);
    let mut lower = 0.0f64;
    let mut upper = f64::INFINITY;
    let mut best_res = f64::INFINITY;
    let mut stall = 0usize;
    let mut shift = 0.0f64;
    let mut res = f64::INFINITY;
    let mut ratio = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        iterations += 1;
        let y = apply(&x);
        let py = ctx.psi(&y);
        if !(py > 0.0) {
            return Err(Error::CollapsedOrbit);
        }
        let m = lower_ratio(&y, &x);
        let big = upper_ratio(&y, &x);
        lower = lower.max(m);
        let interior = x.iter().all(|&v| v > 0.0);
        if interior {
            upper = upper.min(big);
        }
        res = hilbert_raw(&y, &x);
        ratio = py / ctx.psi(&x);
        if let Some(t) = trace.as_deref_mut() {
            t.push(IterStat {
                lower: m,
                upper: if interior { big } else { f64::INFINITY },
                residual: res,
            });
        }
        if res < cfg.hilbert_tol {
            converged = true;
            break;
        }
        // Near the boundary the iterate approaches a face without reaching
        // it; the truncated point still gives a valid lower bound and may
        // already be an eigenvector.
        if let Some(xt) = truncate_to_face(&x) {
            let yt = apply(&xt);
            let pt = ctx.psi(&yt);
            if pt > 0.0 {
                lower = lower.max(lower_ratio(&yt, &xt));
                let rt = hilbert_raw(&yt, &xt);
                if rt < cfg.hilbert_tol {
                    res = rt;
                    ratio = pt / ctx.psi(&xt);
                    x = xt;
                    converged = true;
                    break;
                }
            }
        }
        if res < best_res * (1.0 - 1e-3) {
            best_res = res;
            stall = 0;
        } else {
            stall += 1;
            if stall >= STALL_WINDOW && shift == 0.0 {
                shift = ratio;
                stall = 0;
            }
        }
        let next: Vec<f64> = if shift > 0.0 {
            y.iter().zip(&x).map(|(a, b)| a + shift * b).collect()
        } else {
            y
        };
        let pn = ctx.psi(&next);
        x = rescale(&next, c, pn);
    }
    let value = if converged {
        let mut v = ratio.max(lower);
        if upper.is_finite() {
            v = v.min(upper);
        }
        v
    } else {
        lower
    };
    Ok(EigenPair {
        boundary: is_boundary(&x),
        vector: PointVec::from_image(x)?,
        value,
        residual: ExtendedRatio::from_f64(res),
        lower,
        upper: ExtendedRatio::from_f64(upper),
        iterations,
        converged,
    })
}

fn require_homogeneous(f: &MapExpr) -> Result<()> {
    if f.degree().is_homogeneous() {
        Ok(())
    } else {
        Err(Error::NotHomogeneous { member: 0 })
    }
}

type Evaluator<'a> = Box<dyn Fn(&[f64]) -> Vec<f64> + 'a>;

fn perturbed<'a>(f: &'a MapExpr, eps: f64, ctx: &'a ConeContext) -> Evaluator<'a> {
    if eps > 0.0 {
        Box::new(move |x: &[f64]| {
            let s = eps * ctx.psi(x);
            let mut y = f.eval_raw(x);
            for (v, u) in y.iter_mut().zip(ctx.unit().coords()) {
                *v += s * u;
            }
            y
        })
    } else {
        Box::new(move |x: &[f64]| f.eval_raw(x))
    }
}

/// Approximates the cone spectral radius of a 1-homogeneous map.
///
/// Stops once `d_H(f(x), x) < hilbert_tol`. If the budget runs out the
/// best lower bound is returned with `converged = false`.
pub fn power_iterate(
    f: &MapExpr,
    x0: &PointVec,
    ctx: &ConeContext,
    cfg: &PowerConfig,
) -> Result<EigenPair> {
    power_iterate_traced(f, x0, ctx, cfg, None)
}

/// [`power_iterate`] that also records per-step bracket data.
pub fn power_iterate_traced(
    f: &MapExpr,
    x0: &PointVec,
    ctx: &ConeContext,
    cfg: &PowerConfig,
    trace: Option<&mut Vec<IterStat>>,
) -> Result<EigenPair> {
    cfg.validate()?;
    check_dims(ctx.dim(), x0.dim())?;
    check_dims(ctx.dim(), f.output_dim(x0.dim())?)?;
    require_homogeneous(f)?;
    if !x0.is_interior() {
        return Err(Error::NotInterior);
    }
    let apply = perturbed(f, cfg.epsilon_perturb, ctx);
    power_engine(&*apply, x0.coords(), ctx, cfg, trace)
}

/// `(m(f(x)/x), M(f(x)/x))`. The upper value is only a bound on the
/// spectral radius when `x` is interior, so it is `None` otherwise.
pub fn collatz_wielandt_bracket(f: &MapExpr, x: &PointVec) -> Result<CwBracket> {
    check_dims(x.dim(), f.output_dim(x.dim())?)?;
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    let y = f.eval_raw(x.coords());
    Ok(CwBracket {
        lower: lower_ratio(&y, x.coords()),
        upper: x.is_interior().then(|| upper_ratio(&y, x.coords())),
    })
}

/// `f_eps(x) = f(x) + eps psi(x) u`.
pub fn perturb_interior(f: &MapExpr, eps: f64, ctx: &ConeContext) -> Result<MapExpr> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter("perturbation must be positive"));
    }
    let rank_one = Matrix::outer(ctx.unit().coords(), ctx.psi_weights());
    Ok(MapExpr::Sum(vec![
        f.clone(),
        MapExpr::scale(eps, MapExpr::Linear(rank_one))?,
    ]))
}

fn slice_engine(
    f: &MapExpr,
    x0: Vec<f64>,
    c: f64,
    ctx: &ConeContext,
    cfg: &PowerConfig,
) -> Result<EigenPair> {
    let mut x = x0;
    let mut eps = cfg.epsilon_perturb;
    let mut lower = 0.0f64;
    let mut upper = f64::INFINITY;
    let mut best_res = f64::INFINITY;
    let mut stall = 0usize;
    let mut damped = false;
    let mut res = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    let mut y = Vec::new();
    while iterations < cfg.max_iters {
        iterations += 1;
        y = f.eval_raw(&x);
        if eps > 0.0 {
            let s = eps * ctx.psi(&x);
            for (v, u) in y.iter_mut().zip(ctx.unit().coords()) {
                *v += s * u;
            }
        }
        let py = ctx.psi(&y);
        if !(py > 0.0) {
            return Ok(EigenPair {
                boundary: is_boundary(&x),
                vector: PointVec::from_image(x)?,
                value: 0.0,
                residual: ExtendedRatio::Finite(0.0),
                lower: 0.0,
                upper: ExtendedRatio::Finite(0.0),
                iterations,
                converged: true,
            });
        }
        lower = lower.max(lower_ratio(&y, &x));
        if x.iter().all(|&v| v > 0.0) {
            upper = upper.min(upper_ratio(&y, &x));
        }
        res = hilbert_raw(&y, &x);
        if res < cfg.hilbert_tol {
            converged = true;
            break;
        }
        if res < best_res * (1.0 - 1e-3) {
            best_res = res;
            stall = 0;
        } else {
            stall += 1;
            if stall >= STALL_WINDOW {
                damped = true;
                stall = 0;
            }
        }
        let t = rescale(&y, c, py);
        x = if damped {
            x.iter().zip(&t).map(|(a, b)| 0.5 * (a + b)).collect()
        } else {
            t
        };
        if eps == 0.0 && is_boundary(&x) {
            eps = 1e-12;
        }
    }
    let value = if converged { ctx.psi(&y) / c } else { lower };
    let scaled: Vec<f64> = x.iter().map(|v| value * v).collect();
    let residual = if converged {
        thompson_raw(&y, &scaled)
    } else {
        res
    };
    Ok(EigenPair {
        boundary: is_boundary(&x),
        vector: PointVec::from_image(x)?,
        value,
        residual: ExtendedRatio::from_f64(residual),
        lower,
        upper: ExtendedRatio::from_f64(upper),
        iterations,
        converged,
    })
}

/// The largest eigenvalue of `f` with eigenvector on `{ psi = c }`.
///
/// Runs the normalized iteration `x -> c f(x)/psi(f(x))` from `c u/psi(u)`
/// and from `cfg.restarts` seeded random interior points, keeping the
/// largest value found.
pub fn slice_spectral_radius(
    f: &MapExpr,
    c: f64,
    ctx: &ConeContext,
    cfg: &PowerConfig,
) -> Result<EigenPair> {
    cfg.validate()?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter("slice level must be positive"));
    }
    let n = ctx.dim();
    check_dims(n, f.output_dim(n)?)?;
    if !f.degree().is_subhomogeneous() {
        return Err(Error::InvalidParameter(
            "map is not subhomogeneous by structure",
        ));
    }
    let u = ctx.unit().coords();
    let mut best = slice_engine(f, rescale(u, c, ctx.psi(u)), c, ctx, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.restarts {
        let start = random_point(&mut rng, n, 0.0);
        let p = ctx.psi(&start);
        let cand = slice_engine(f, rescale(&start, c, p), c, ctx, cfg)?;
        let better = match (cand.converged, best.converged) {
            (true, false) => true,
            (false, true) => false,
            _ => cand.value > best.value,
        };
        if better {
            best = cand;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CurveRow {
    pub c: f64,
    pub rho_c: f64,
    pub residual: ExtendedRatio,
    pub converged: bool,
    /// Checks against the previous grid point; always true on the first row.
    pub monotone_ok: bool,
}

/// An extrapolated endpoint of the curve against the spectral radius of
/// the matching asymptotic map, when that has a closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LimitCheck {
    pub extrapolated: f64,
    pub reference: Option<f64>,
}

impl LimitCheck {
    pub fn error(&self) -> Option<f64> {
        self.reference.map(|r| num::abs(r - self.extrapolated))
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CurveReport {
    pub rows: Vec<CurveRow>,
    pub all_monotone: bool,
    pub unconverged: Vec<usize>,
    pub zero_limit: LimitCheck,
    pub infinity_limit: LimitCheck,
}

/// Relative slack used for the monotonicity checks along the curve.
pub const CURVE_SLACK: f64 = 1e-9;

fn spectral_radius_or_zero(f: &MapExpr, ctx: &ConeContext, cfg: &PowerConfig) -> Result<f64> {
    let base = PowerConfig {
        epsilon_perturb: 0.0,
        ..cfg.clone()
    };
    match power_iterate(f, ctx.unit(), ctx, &base) {
        Ok(e) => Ok(e.value),
        Err(Error::CollapsedOrbit) => Ok(0.0),
        Err(e) => Err(e),
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty slice grid"));
    }
    if grid.iter().any(|&c| !(c > 0.0 && c.is_finite())) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "slice grid must be positive and strictly increasing",
        ));
    }
    Ok(())
}

/// Builds the report for points already computed on `grid`.
pub fn curve_report(
    f: &MapExpr,
    grid: &[f64],
    points: &[EigenPair],
    ctx: &ConeContext,
    cfg: &PowerConfig,
) -> Result<CurveReport> {
    check_grid(grid)?;
    check_dims(grid.len(), points.len())?;
    let mut rows = Vec::with_capacity(grid.len());
    for (i, (&c, e)) in grid.iter().zip(points).enumerate() {
        let monotone_ok = if i == 0 {
            true
        } else {
            let (c1, prev) = (grid[i - 1], &points[i - 1]);
            let (r1, r2) = (prev.value, e.value);
            num::le_rel(r2, r1, CURVE_SLACK)
                && num::le_rel(r1, c / c1 * r2, CURVE_SLACK)
                && prev.vector.le_cone(&e.vector, CURVE_SLACK)
        };
        rows.push(CurveRow {
            c,
            rho_c: e.value,
            residual: e.residual,
            converged: e.converged,
            monotone_ok,
        });
    }
    let n = ctx.dim();
    let zero_ref = match f.asymptotic_zero(n) {
        Ok(Asymptotic::Map(g)) => Some(spectral_radius_or_zero(&g, ctx, cfg)?),
        _ => None,
    };
    let inf_ref = match f.asymptotic_infinity(n) {
        Ok(g) => Some(spectral_radius_or_zero(&g, ctx, cfg)?),
        Err(_) => None,
    };
    let k = rows.len();
    let (zero_est, inf_est) = if k == 1 {
        (rows[0].rho_c, rows[0].rho_c)
    } else {
        let (c1, c2, r1, r2) = (grid[0], grid[1], rows[0].rho_c, rows[1].rho_c);
        let z = r1 - c1 * (r2 - r1) / (c2 - c1);
        let (tn, tp) = (1.0 / grid[k - 1], 1.0 / grid[k - 2]);
        let (rn, rp) = (rows[k - 1].rho_c, rows[k - 2].rho_c);
        let inf = rn - tn * (rp - rn) / (tp - tn);
        (z.max(0.0), inf.max(0.0))
    };
    Ok(CurveReport {
        all_monotone: rows.iter().all(|r| r.monotone_ok),
        unconverged: rows
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.converged)
            .map(|(i, _)| i)
            .collect(),
        rows,
        zero_limit: LimitCheck {
            extrapolated: zero_est,
            reference: zero_ref,
        },
        infinity_limit: LimitCheck {
            extrapolated: inf_est,
            reference: inf_ref,
        },
    })
}

/// Slice spectral radii across an increasing grid of levels.
pub fn eigencurve(
    f: &MapExpr,
    grid: &[f64],
    ctx: &ConeContext,
    cfg: &PowerConfig,
) -> Result<(Vec<EigenPair>, CurveReport)> {
    check_grid(grid)?;
    let points = grid
        .iter()
        .map(|&c| slice_spectral_radius(f, c, ctx, cfg))
        .collect::<Result<Vec<_>>>()?;
    let report = curve_report(f, grid, &points, ctx, cfg)?;
    Ok((points, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::Activation;
    use approx::assert_relative_eq;

    fn p(v: &[f64]) -> PointVec {
        PointVec::new(v.to_vec()).unwrap()
    }

    fn lin(rows: &[&[f64]]) -> MapExpr {
        MapExpr::linear(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn identity_has_radius_one() {
        let ctx = ConeContext::new(3);
        let e = power_iterate(
            &MapExpr::identity(),
            &p(&[1., 5., 2.]),
            &ctx,
            &PowerConfig::default(),
        )
        .unwrap();
        assert!(e.converged);
        assert_relative_eq!(e.value, 1.0);
    }

    #[test]
    fn periodic_matrix() {
        let ctx = ConeContext::new(2);
        let f = lin(&[&[0., 2.], &[0.5, 0.]]);
        let e = power_iterate(&f, &p(&[1., 1.]), &ctx, &PowerConfig::default()).unwrap();
        assert!(e.converged);
        assert_relative_eq!(e.value, 1.0, max_relative = 1e-12);
        let v = e.vector.coords();
        assert_relative_eq!(v[0] / v[1], 2.0, max_relative = 1e-10);
    }

    #[test]
    fn boundary_eigenvector_via_lower_bound() {
        let ctx = ConeContext::new(2);
        let f = lin(&[&[4., 0.], &[0., 0.25]]);
        let e = power_iterate(&f, &p(&[1., 1.]), &ctx, &PowerConfig::default()).unwrap();
        assert!(e.boundary);
        assert_relative_eq!(e.value, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn collapsed_orbit() {
        let ctx = ConeContext::new(2);
        let f = lin(&[&[0., 1.], &[0., 0.]]);
        assert_eq!(
            power_iterate(&f, &p(&[1., 1.]), &ctx, &PowerConfig::default()),
            Err(Error::CollapsedOrbit)
        );
    }

    #[test]
    fn rejects_non_homogeneous_and_boundary_start() {
        let ctx = ConeContext::new(1);
        let cfg = PowerConfig::default();
        let f = MapExpr::Activation(Activation::Tanh);
        assert!(matches!(
            power_iterate(&f, &p(&[1.]), &ctx, &cfg),
            Err(Error::NotHomogeneous { .. })
        ));
        let ctx2 = ConeContext::new(2);
        assert_eq!(
            power_iterate(&MapExpr::identity(), &p(&[1., 0.]), &ctx2, &cfg),
            Err(Error::NotInterior)
        );
    }

    #[test]
    fn cw_examples() {
        let three = MapExpr::scale(3.0, MapExpr::identity()).unwrap();
        let b = collatz_wielandt_bracket(&three, &p(&[1., 2.])).unwrap();
        assert_relative_eq!(b.lower, 3.0);
        assert_relative_eq!(b.upper.unwrap(), 3.0);
        let f = lin(&[&[0., 2.], &[0.5, 0.]]);
        let b = collatz_wielandt_bracket(&f, &p(&[1., 1.])).unwrap();
        assert_eq!((b.lower, b.upper), (0.5, Some(2.0)));
        let b = collatz_wielandt_bracket(&f, &p(&[2., 1.])).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, Some(1.0)));
        let b = collatz_wielandt_bracket(&f, &p(&[1., 0.])).unwrap();
        assert_eq!(b.upper, None);
    }

    #[test]
    fn perturbation_of_zero_map() {
        let ctx = ConeContext::new(3);
        let zero = MapExpr::Linear(Matrix::zeros(3, 3));
        let g = perturb_interior(&zero, 1.0, &ctx).unwrap();
        assert_eq!(g.evaluate(&p(&[1., 2., 3.])).unwrap(), p(&[6., 6., 6.]));
        let e = power_iterate(&g, &p(&[1., 1., 1.]), &ctx, &PowerConfig::default()).unwrap();
        assert_relative_eq!(e.value, 3.0, max_relative = 1e-12);
        assert!(perturb_interior(&zero, 0.0, &ctx).is_err());
    }

    #[test]
    fn perturbation_dominates_and_decreases() {
        let ctx = ConeContext::new(2);
        let f = lin(&[&[4., 0.], &[0., 0.25]]);
        let mut prev = f64::INFINITY;
        for eps in [1e-2, 1e-4, 1e-6] {
            let g = perturb_interior(&f, eps, &ctx).unwrap();
            let x = p(&[0.3, 2.0]);
            assert!(f
                .evaluate(&x)
                .unwrap()
                .le_cone(&g.evaluate(&x).unwrap(), 0.0));
            let e = power_iterate(&g, &p(&[1., 1.]), &ctx, &PowerConfig::default()).unwrap();
            assert!(e.value < prev);
            assert!(e.value >= 4.0);
            prev = e.value;
        }
        assert!(prev - 4.0 < 1e-5);
    }

    #[test]
    fn saturating_slice_radius() {
        let ctx = ConeContext::new(1);
        let f = MapExpr::Activation(Activation::Saturating);
        for c in [0.1, 1.0, 10.0] {
            let e = slice_spectral_radius(&f, c, &ctx, &PowerConfig::default()).unwrap();
            assert_relative_eq!(e.value, 1.0 / (1.0 + c), max_relative = 1e-12);
            assert!(e.residual.to_f64() < 1e-12);
        }
    }

    #[test]
    fn slice_matches_power_for_homogeneous() {
        let ctx = ConeContext::new(2);
        let f = lin(&[&[1.8, 0.9], &[0.9, 0.9]]);
        let cfg = PowerConfig::default();
        let pw = power_iterate(&f, ctx.unit(), &ctx, &cfg).unwrap();
        for c in [1e-3, 1.0, 1e3] {
            let s = slice_spectral_radius(&f, c, &ctx, &cfg).unwrap();
            assert_relative_eq!(s.value, pw.value, max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_on_slice() {
        let ctx = ConeContext::new(2);
        let f = MapExpr::Linear(Matrix::zeros(2, 2));
        let e = slice_spectral_radius(&f, 1.0, &ctx, &PowerConfig::default()).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn flat_curve_for_homogeneous() {
        let ctx = ConeContext::new(2);
        let f = lin(&[&[1.0, 0.5], &[0.2, 0.7]]);
        let (_, rep) = eigencurve(&f, &[0.1, 1.0, 10.0], &ctx, &PowerConfig::default()).unwrap();
        assert!(rep.all_monotone);
        let r0 = rep.rows[0].rho_c;
        for r in &rep.rows {
            assert_relative_eq!(r.rho_c, r0, max_relative = 1e-12);
        }
    }

    #[test]
    fn curve_rejects_bad_grid() {
        let ctx = ConeContext::new(1);
        let f = MapExpr::identity();
        let cfg = PowerConfig::default();
        assert!(eigencurve(&f, &[1.0, 1.0], &ctx, &cfg).is_err());
        assert!(eigencurve(&f, &[], &ctx, &cfg).is_err());
        assert!(eigencurve(&f, &[-1.0, 1.0], &ctx, &cfg).is_err());
    }
}
