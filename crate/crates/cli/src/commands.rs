//! Command-line surface and dispatch.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use conejsr_core::bounds::TrajectoryConfig;
use conejsr_core::perron::curve_report;
use conejsr_core::{
    check_properties, eigencurve, jsr_bracket, perturb_interior, power_iterate, run_polytope,
    slice_spectral_radius, subhomogeneous_sandwich, trajectory_divergence_check,
    verify_certificate, AlgoConfig, BracketConfig, CertStatus, Certificate, ConeContext, EigenPair,
    Family, MapExpr, PointVec, PowerConfig, Word,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::record::{csv_string, digest, ResultRecord, VERSION};
use crate::spec::load_family;

#[derive(Debug, Parser)]
#[command(
    name = "conejsr",
    version,
    about = "Cone spectral radii and joint spectral radius certificates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for every random choice in the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the JSON record; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Where to write the CSV side file; defaults to `<out>.<kind>.csv`.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Worker cap for parallel sections.
    #[arg(long, global = true, env = "CONEJSR_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Screen each member for order preservation and (sub)homogeneity.
    Props(PropsArgs),
    /// Spectral radius of one member or word.
    Spectral(SpectralArgs),
    /// Slice spectral radii over a grid of levels.
    Eigencurve(CurveArgs),
    /// Joint spectral radius bracket by word enumeration.
    Jsr(JsrArgs),
    /// Bounds through the asymptotic families.
    Sandwich(SandwichArgs),
    /// Grow an extremal prenorm certificate.
    Polytope(PolytopeArgs),
    /// Re-check a certificate.
    Verify(VerifyArgs),
    /// Follow nearby trajectories under random switching.
    Trajectory(TrajectoryArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct PropsArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SpectralArgs {
    #[arg(long)]
    pub family: PathBuf,
    /// One-based member index.
    #[arg(long, default_value_t = 1, conflicts_with = "word")]
    pub map: usize,
    /// One-based word, e.g. `1,2` for f1 o f2.
    #[arg(long, value_delimiter = ',')]
    pub word: Option<Vec<usize>>,
    /// Add `eps psi(x) u` before iterating.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Slice level for maps that are not homogeneous.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct CurveArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub map: usize,
    /// Explicit increasing levels, e.g. `0.1,1,10`.
    #[arg(long, value_delimiter = ',')]
    pub cgrid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-3)]
    pub cmin: f64,
    #[arg(long, default_value_t = 1e3)]
    pub cmax: f64,
    /// Log-spaced points between `cmin` and `cmax` when no grid is given.
    #[arg(long, default_value_t = 13)]
    pub points: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct JsrArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, default_value_t = 6)]
    pub kmax: usize,
    /// Interior base point for the upper bounds, e.g. `1,2`.
    #[arg(long, value_delimiter = ',')]
    pub base_point: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1 << 20)]
    pub max_words: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SandwichArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub kmax: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct PolytopeArgs {
    #[arg(long)]
    pub family: PathBuf,
    /// One-based candidate product; the best word up to length 4 when absent.
    #[arg(long, value_delimiter = ',')]
    pub smp: Option<Vec<usize>>,
    #[arg(long, default_value_t = 1e-9)]
    pub dom_tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub witness_tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_vertices: usize,
    #[arg(long, default_value_t = 50)]
    pub max_restarts: usize,
    /// Also restart on longer products found along the generator paths.
    #[arg(long)]
    pub extended: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub family: PathBuf,
    /// A certificate, or the record written by `polytope`.
    #[arg(long)]
    pub cert: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct TrajectoryArgs {
    #[arg(long)]
    pub family: PathBuf,
    /// Starting point; all ones when absent.
    #[arg(long, value_delimiter = ',')]
    pub x: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.1)]
    pub radius: f64,
    #[arg(long, default_value_t = 20)]
    pub horizon: usize,
    #[arg(long, default_value_t = 32)]
    pub trials: usize,
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
}

/// Process exit status of a finished run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Error = 1,
    VerificationFailed = 2,
    BudgetExhausted = 3,
}

/// A finished run: the record, an optional CSV side file and the status.
pub struct Outcome {
    pub record: ResultRecord,
    /// `(kind, csv body)`.
    pub side: Option<(&'static str, String)>,
    pub exit: Exit,
}

struct Partial {
    outputs: Value,
    warnings: Vec<String>,
    side: Option<(&'static str, String)>,
    exit: Exit,
}

impl Partial {
    fn ok(outputs: Value) -> Self {
        Partial {
            outputs,
            warnings: Vec::new(),
            side: None,
            exit: Exit::Success,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn member(family: &Family, one_based: usize) -> Result<&MapExpr> {
    one_based
        .checked_sub(1)
        .and_then(|i| family.get(i))
        .ok_or_else(|| {
            anyhow!(
                "--map {one_based} is out of range for a family of {}",
                family.len()
            )
        })
}

fn word(family: &Family, one_based: &[usize]) -> Result<Word> {
    let w = Word::from_one_based(one_based).map_err(|e| anyhow!("word {one_based:?}: {e}"))?;
    family
        .check_word(&w)
        .map_err(|e| anyhow!("word {w}: {e}"))?;
    Ok(w)
}

fn threads(cli: &Cli) -> usize {
    cli.threads
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let start = Instant::now();
    let (name, params, family_path) = match &cli.command {
        Command::Props(a) => ("props", to_value(a)?, &a.family),
        Command::Spectral(a) => ("spectral", to_value(a)?, &a.family),
        Command::Eigencurve(a) => ("eigencurve", to_value(a)?, &a.family),
        Command::Jsr(a) => ("jsr", to_value(a)?, &a.family),
        Command::Sandwich(a) => ("sandwich", to_value(a)?, &a.family),
        Command::Polytope(a) => ("polytope", to_value(a)?, &a.family),
        Command::Verify(a) => ("verify", to_value(a)?, &a.family),
        Command::Trajectory(a) => ("trajectory", to_value(a)?, &a.family),
    };
    let loaded = load_family(family_path, cli.seed)?;
    let fam = &loaded.family;
    let mut inputs = vec![loaded.bytes.clone()];
    let ctx = ConeContext::new(fam.dim());
    let power = PowerConfig {
        seed: cli.seed,
        ..PowerConfig::default()
    };
    let part = match &cli.command {
        Command::Props(a) => props(fam, a, cli.seed)?,
        Command::Spectral(a) => spectral(fam, a, &ctx, &power)?,
        Command::Eigencurve(a) => curve(fam, a, &ctx, &power, threads(cli))?,
        Command::Jsr(a) => jsr(fam, a, &ctx, &power)?,
        Command::Sandwich(a) => {
            let cfg = BracketConfig {
                power: power.clone(),
                ..BracketConfig::default()
            };
            Partial::ok(to_value(&subhomogeneous_sandwich(
                fam, a.kmax, &ctx, &cfg,
            )?)?)
        }
        Command::Polytope(a) => polytope(fam, a, &ctx, &power)?,
        Command::Verify(a) => {
            let bytes =
                fs::read(&a.cert).with_context(|| format!("reading {}", a.cert.display()))?;
            let cert = parse_certificate(&bytes)?;
            inputs.push(bytes);
            let report = verify_certificate(fam, &cert, a.samples, cli.seed)?;
            Partial {
                warnings: Vec::new(),
                exit: if report.ok {
                    Exit::Success
                } else {
                    Exit::VerificationFailed
                },
                outputs: to_value(&report)?,
                side: None,
            }
        }
        Command::Trajectory(a) => {
            let x = match &a.x {
                Some(v) => PointVec::new(v.clone())?,
                None => PointVec::ones(fam.dim()),
            };
            let cfg = TrajectoryConfig {
                radius: a.radius,
                horizon: a.horizon,
                trials: a.trials,
                seed: cli.seed,
                rate: a.rate,
            };
            Partial::ok(to_value(&trajectory_divergence_check(fam, &x, &cfg)?)?)
        }
    };
    let mut warnings = loaded.warnings;
    warnings.extend(part.warnings);
    let refs: Vec<&[u8]> = inputs.iter().map(|b| b.as_slice()).collect();
    Ok(Outcome {
        record: ResultRecord {
            command: name.to_string(),
            inputs_digest: digest(&refs),
            parameters: params,
            outputs: part.outputs,
            warnings,
            timing_ms: start.elapsed().as_secs_f64() * 1e3,
            version: VERSION,
        },
        side: part.side,
        exit: part.exit,
    })
}

fn props(fam: &Family, a: &PropsArgs, seed: u64) -> Result<Partial> {
    let mut members = Vec::new();
    for (k, f) in fam.maps().iter().enumerate() {
        let report = check_properties(f, fam.dim(), a.samples, seed)?;
        members.push(json!({
            "member": k + 1,
            "label": fam.labels()[k],
            "degree": format!("{:?}", fam.degrees()[k]),
            "passed": report.passed(),
            "report": report,
        }));
    }
    Ok(Partial::ok(json!({ "members": members })))
}

fn spectral(
    fam: &Family,
    a: &SpectralArgs,
    ctx: &ConeContext,
    power: &PowerConfig,
) -> Result<Partial> {
    let (f, target) = match &a.word {
        Some(w) => {
            let w = word(fam, w)?;
            (fam.word_map(&w)?, w.to_string())
        }
        None => (member(fam, a.map)?.clone(), format!("[{}]", a.map)),
    };
    let cfg = PowerConfig {
        max_iters: a.max_iters,
        slice_c: a.c,
        ..power.clone()
    };
    let (method, pair): (&str, EigenPair) = if f.degree().is_homogeneous() {
        let g = match a.epsilon {
            Some(eps) => perturb_interior(&f, eps, ctx)?,
            None => f,
        };
        ("power", power_iterate(&g, ctx.unit(), ctx, &cfg)?)
    } else {
        let cfg = PowerConfig {
            epsilon_perturb: a.epsilon.unwrap_or(0.0),
            ..cfg
        };
        ("slice", slice_spectral_radius(&f, a.c, ctx, &cfg)?)
    };
    let mut part = Partial::ok(json!({ "target": target, "method": method, "eigenpair": pair }));
    if !pair.converged {
        part.warnings.push(format!(
            "{} iterations without reaching the residual tolerance; value bracketed in [{}, {}]",
            pair.iterations, pair.lower, pair.upper
        ));
    }
    Ok(part)
}

fn grid(a: &CurveArgs) -> Result<Vec<f64>> {
    if let Some(g) = &a.cgrid {
        return Ok(g.clone());
    }
    if !(a.cmin > 0.0 && a.cmax > a.cmin && a.points >= 2) {
        bail!("need 0 < cmin < cmax and at least 2 points");
    }
    let (lo, hi) = (a.cmin.ln(), a.cmax.ln());
    let last = (a.points - 1) as f64;
    Ok((0..a.points)
        .map(|i| match i {
            0 => a.cmin,
            i if i == a.points - 1 => a.cmax,
            i => (lo + (hi - lo) * i as f64 / last).exp(),
        })
        .collect())
}

fn curve(
    fam: &Family,
    a: &CurveArgs,
    ctx: &ConeContext,
    power: &PowerConfig,
    workers: usize,
) -> Result<Partial> {
    let f = member(fam, a.map)?;
    let grid = grid(a)?;
    let (points, report) = if workers <= 1 || grid.len() <= 1 {
        eigencurve(f, &grid, ctx, power)?
    } else {
        // Grid points are independent; results are merged back in grid order.
        let workers = workers.min(grid.len());
        let mut slots: Vec<Option<conejsr_core::Result<EigenPair>>> = vec![None; grid.len()];
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let grid = &grid;
                    s.spawn(move || {
                        (w..grid.len())
                            .step_by(workers)
                            .map(|i| (i, slice_spectral_radius(f, grid[i], ctx, power)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (i, r) in h.join().expect("eigencurve worker panicked") {
                    slots[i] = Some(r);
                }
            }
        });
        let points = slots
            .into_iter()
            .map(|r| r.expect("every grid point is assigned"))
            .collect::<conejsr_core::Result<Vec<_>>>()?;
        let report = curve_report(f, &grid, &points, ctx, power)?;
        (points, report)
    };
    let csv = csv_string(&report.rows)?;
    let warnings = report
        .rows
        .iter()
        .filter(|r| !r.converged)
        .map(|r| {
            format!(
                "slice iteration at c = {} stopped before the residual tolerance",
                r.c
            )
        })
        .collect();
    Ok(Partial {
        warnings,
        outputs: json!({ "map": a.map, "report": report, "eigenvectors": points.iter().map(|p| &p.vector).collect::<Vec<_>>() }),
        side: Some(("curve", csv)),
        exit: Exit::Success,
    })
}

#[derive(Serialize)]
struct JsrRow {
    k: usize,
    lower_k: f64,
    upper_k: f64,
    best_word: String,
}

fn jsr(fam: &Family, a: &JsrArgs, ctx: &ConeContext, power: &PowerConfig) -> Result<Partial> {
    let cfg = BracketConfig {
        base_point: a.base_point.clone().map(PointVec::new).transpose()?,
        max_words: a.max_words,
        power: power.clone(),
        ..BracketConfig::default()
    };
    let b = jsr_bracket(fam, a.kmax, ctx, &cfg)?;
    let rows: Vec<JsrRow> = b
        .rows
        .iter()
        .map(|r| JsrRow {
            k: r.k,
            lower_k: r.lower_k,
            upper_k: r.upper_k,
            best_word: r.best_word.to_string(),
        })
        .collect();
    Ok(Partial {
        warnings: Vec::new(),
        outputs: to_value(&b)?,
        side: Some(("jsr", csv_string(&rows)?)),
        exit: if b.truncated {
            Exit::BudgetExhausted
        } else {
            Exit::Success
        },
    })
}

#[derive(Serialize)]
struct VertexRow {
    round: usize,
    vertex: usize,
    x1: f64,
    x2: f64,
    word: String,
}

fn polytope(
    fam: &Family,
    a: &PolytopeArgs,
    ctx: &ConeContext,
    power: &PowerConfig,
) -> Result<Partial> {
    let smp = match &a.smp {
        Some(w) => word(fam, w)?,
        None => {
            let cfg = BracketConfig {
                power: power.clone(),
                ..BracketConfig::default()
            };
            jsr_bracket(fam, 4, ctx, &cfg)?.witness_word
        }
    };
    let cfg = AlgoConfig {
        dom_tol: a.dom_tol,
        strict_witness_tol: a.witness_tol,
        max_vertices: a.max_vertices,
        max_restarts: a.max_restarts,
        extended_smp_update: a.extended,
        power: power.clone(),
    };
    let cert = run_polytope(fam, &smp, ctx, &cfg)?;
    let side = if fam.dim() == 2 {
        let p = &cert.prenorm;
        let mut rows: Vec<VertexRow> = (0..p.len())
            .map(|j| VertexRow {
                round: p.rounds[j],
                vertex: j,
                x1: p.vertices[j].coords()[0],
                x2: p.vertices[j].coords()[1],
                word: p.generator_words[j].to_string(),
            })
            .collect();
        rows.sort_by_key(|r| (r.round, r.vertex));
        Some(("vertices", csv_string(&rows)?))
    } else {
        None
    };
    let exit = match cert.status {
        CertStatus::Certified => Exit::Success,
        CertStatus::BudgetExceeded | CertStatus::SmpUpdated(_) => Exit::BudgetExhausted,
    };
    Ok(Partial {
        warnings: Vec::new(),
        outputs: json!({
            "initial_smp": smp,
            "alpha_15": format!("{:.14e}", cert.alpha),
            "vertex_count": cert.prenorm.len(),
            "certificate": cert,
        }),
        side,
        exit,
    })
}

/// Accepts a bare certificate, `{ "certificate": .. }`, or a `polytope` record.
pub fn parse_certificate(bytes: &[u8]) -> Result<Certificate> {
    let v: Value = serde_json::from_slice(bytes).context("certificate is not JSON")?;
    let inner = v
        .pointer("/outputs/certificate")
        .or_else(|| v.get("certificate"))
        .unwrap_or(&v);
    serde_json::from_value(inner.clone()).context("certificate does not match the expected fields")
}
