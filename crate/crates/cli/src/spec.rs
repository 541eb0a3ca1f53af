//! The family file format.
//!
//! ```json
//! { "dim": 2,
//!   "maps": [ { "kind": "linear", "matrix": [[1, 1], [0, 1]] },
//!             { "kind": "ann", "A": [[0.5, 0], [0, 0.5]], "B": [[1, 0], [0, 1]],
//!               "b": [0.1, 0], "activation": "tanh", "label": "layer" } ] }
//! ```
//!
//! Map nodes are tagged by `kind`; composite nodes nest. Only top-level
//! members take a `label`.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use conejsr_core::{check_properties, Activation, Family, MapExpr, Matrix, PointVec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub dim: usize,
    pub maps: Vec<MemberSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(flatten)]
    pub map: MapSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Identity,
    Linear {
        matrix: Vec<Vec<f64>>,
    },
    /// `x -> A x + phi(B x) + b`; `b` defaults to zero.
    Ann {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        #[serde(rename = "B")]
        w: Vec<Vec<f64>>,
        #[serde(default, rename = "b", skip_serializing_if = "Option::is_none")]
        bias: Option<Vec<f64>>,
        activation: Activation,
    },
    #[serde(alias = "entrywise_power")]
    Power {
        alpha: f64,
    },
    Activation {
        activation: Activation,
    },
    #[serde(alias = "const_shift")]
    Constant {
        value: Vec<f64>,
    },
    Sum {
        terms: Vec<MapSpec>,
    },
    Scale {
        c: f64,
        map: Box<MapSpec>,
    },
    /// `outer o inner`.
    Compose {
        outer: Box<MapSpec>,
        inner: Box<MapSpec>,
    },
    /// Composition of a list, the last entry applied first.
    Chain {
        maps: Vec<MapSpec>,
    },
    MinAugment {
        subset: Vec<usize>,
    },
    HarmonicMean {
        i: usize,
        j: usize,
    },
    #[serde(alias = "coord_select")]
    Select {
        indices: Vec<usize>,
    },
    /// `x -> (B (A x)^alpha)^{1/alpha}`.
    PowerMean {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        #[serde(rename = "B")]
        w: Vec<Vec<f64>>,
        alpha: f64,
    },
}

fn matrix(rows: &[Vec<f64>], field: &str) -> Result<Matrix> {
    Matrix::new(rows.to_vec()).map_err(|e| anyhow!("{field}: {e}"))
}

impl MapSpec {
    /// Builds the expression, naming the offending field on error.
    pub fn build(&self, path: &str) -> Result<MapExpr> {
        let at = |f: &str| format!("{path}.{f}");
        let wrap = |r: conejsr_core::Result<MapExpr>| r.map_err(|e| anyhow!("{path}: {e}"));
        Ok(match self {
            MapSpec::Identity => MapExpr::identity(),
            MapSpec::Linear { matrix: m } => MapExpr::Linear(matrix(m, &at("matrix"))?),
            MapSpec::Ann {
                a,
                w,
                bias,
                activation,
            } => {
                let a = matrix(a, &at("A"))?;
                let b = matrix(w, &at("B"))?;
                let bias = match bias {
                    Some(v) => PointVec::new(v.clone()).map_err(|e| anyhow!("{}: {e}", at("b")))?,
                    None => PointVec::zeros(a.rows()),
                };
                wrap(MapExpr::ann(a, b, bias, *activation))?
            }
            MapSpec::Power { alpha } => wrap(MapExpr::power(*alpha))?,
            MapSpec::Activation { activation } => MapExpr::Activation(*activation),
            MapSpec::Constant { value } => MapExpr::Constant(
                PointVec::new(value.clone()).map_err(|e| anyhow!("{}: {e}", at("value")))?,
            ),
            MapSpec::Sum { terms } => MapExpr::Sum(
                terms
                    .iter()
                    .enumerate()
                    .map(|(k, t)| t.build(&format!("{path}.terms[{k}]")))
                    .collect::<Result<_>>()?,
            ),
            MapSpec::Scale { c, map } => wrap(MapExpr::scale(*c, map.build(&at("map"))?))?,
            MapSpec::Compose { outer, inner } => {
                MapExpr::compose(outer.build(&at("outer"))?, inner.build(&at("inner"))?)
            }
            MapSpec::Chain { maps } => wrap(MapExpr::chain(
                maps.iter()
                    .enumerate()
                    .map(|(k, m)| m.build(&format!("{path}.maps[{k}]")))
                    .collect::<Result<_>>()?,
            ))?,
            MapSpec::MinAugment { subset } => MapExpr::MinAugment(subset.clone()),
            MapSpec::HarmonicMean { i, j } => MapExpr::HarmonicMean(*i, *j),
            MapSpec::Select { indices } => MapExpr::Select(indices.clone()),
            MapSpec::PowerMean { a, w, alpha } => wrap(MapExpr::power_mean(
                matrix(a, &at("A"))?,
                matrix(w, &at("B"))?,
                *alpha,
            ))?,
        })
    }

    /// The file form of an expression. Composite constructors such as `ann`
    /// come back as their expanded trees.
    pub fn from_expr(f: &MapExpr) -> MapSpec {
        match f {
            MapExpr::Linear(m) => MapSpec::Linear {
                matrix: m.to_rows(),
            },
            MapExpr::Power(alpha) => MapSpec::Power { alpha: *alpha },
            MapExpr::Activation(a) => MapSpec::Activation { activation: *a },
            MapExpr::Constant(v) => MapSpec::Constant {
                value: v.coords().to_vec(),
            },
            MapExpr::Sum(terms) => MapSpec::Sum {
                terms: terms.iter().map(MapSpec::from_expr).collect(),
            },
            MapExpr::Scale(c, g) => MapSpec::Scale {
                c: *c,
                map: Box::new(MapSpec::from_expr(g)),
            },
            MapExpr::Compose(o, i) => MapSpec::Compose {
                outer: Box::new(MapSpec::from_expr(o)),
                inner: Box::new(MapSpec::from_expr(i)),
            },
            MapExpr::MinAugment(s) => MapSpec::MinAugment { subset: s.clone() },
            MapExpr::HarmonicMean(i, j) => MapSpec::HarmonicMean { i: *i, j: *j },
            MapExpr::Select(idx) => MapSpec::Select {
                indices: idx.clone(),
            },
        }
    }
}

impl FamilySpec {
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            anyhow!(
                "family schema error at `{path}` (line {}, column {}): {inner}",
                inner.line(),
                inner.column()
            )
        })
    }

    pub fn build(&self) -> Result<Family> {
        if self.maps.is_empty() {
            bail!("family schema error at `maps`: the map list is empty");
        }
        let mut maps = Vec::with_capacity(self.maps.len());
        let mut labels = Vec::with_capacity(self.maps.len());
        for (k, m) in self.maps.iter().enumerate() {
            maps.push(m.map.build(&format!("maps[{k}]"))?);
            labels.push(m.label.clone().unwrap_or_else(|| format!("f{}", k + 1)));
        }
        Family::with_labels(self.dim, maps, labels).map_err(|e| anyhow!("family: {e}"))
    }

    pub fn from_family(family: &Family) -> Self {
        FamilySpec {
            dim: family.dim(),
            maps: family
                .maps()
                .iter()
                .zip(family.labels())
                .map(|(f, l)| MemberSpec {
                    label: Some(l.clone()),
                    map: MapSpec::from_expr(f),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("family specs always serialize")
    }
}

/// A family loaded from disk, with the raw bytes kept for digests.
pub struct Loaded {
    pub family: Family,
    pub bytes: Vec<u8>,
    pub warnings: Vec<String>,
}

/// Samples per member for the property screen run on every load.
pub const LOAD_SAMPLES: usize = 256;

/// Parses and builds a family, then screens each member with
/// [`check_properties`]. Violations become warnings, not errors.
pub fn load_family(path: &Path, seed: u64) -> Result<Loaded> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let text =
        std::str::from_utf8(&bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let family = FamilySpec::parse(text)?.build()?;
    let mut warnings = Vec::new();
    for (k, f) in family.maps().iter().enumerate() {
        let report = check_properties(f, family.dim(), LOAD_SAMPLES, seed)?;
        if !report.passed() {
            let first = &report.violations[0];
            warnings.push(format!(
                "member {} ({}): {} property violations in {} samples, first: {:?} at coordinate {}",
                k + 1,
                family.labels()[k],
                report.violations.len(),
                report.samples,
                first.kind,
                first.coordinate
            ));
        }
    }
    Ok(Loaded {
        family,
        bytes,
        warnings,
    })
}

pub fn save_family(family: &Family, path: &Path) -> Result<()> {
    fs::write(path, FamilySpec::from_family(family).to_json())
        .with_context(|| format!("writing {}", path.display()))
}
