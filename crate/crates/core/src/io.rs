//! JSON model and map files.
//!
//! Rationals are written as strings (`"3/2"`, `"-1"`). Classes are coordinate
//! arrays over the basis lists stored in the same file. The cup table lists
//! each nonzero product once, with `i <= j`; an entry without its mirror is
//! taken to be symmetric. Canonical files (the output of [`model_to_json`] and
//! [`map_to_json`]) round-trip byte for byte.

use std::path::Path;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::blowup::{projective3, standard_x, standard_z};
use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use crate::map::{standard_jx, MapParts, PseudoIsoModel};
use crate::rat::Rat;
use crate::ring::{
    BlowupCenter, BlowupStep, CurveEntry, CurveFlags, H11Class, H22Class, ModelParts, VarietyModel,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub name: String,
    pub h11_basis: Vec<String>,
    pub h22_basis: Vec<String>,
    /// Row `i` pairs the `i`-th divisor with every curve basis element.
    pub pairing: Vec<Vec<Rat>>,
    pub cup: Vec<CupEntry>,
    pub canonical: Vec<Rat>,
    pub curves: IndexMap<String, CurveRecord>,
    #[serde(default)]
    pub provenance: Vec<StepRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CupEntry {
    pub i: usize,
    pub j: usize,
    pub result: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveRecord {
    pub class: Vec<Rat>,
    pub effective: bool,
    pub nef_generator: bool,
    pub indeterminacy_eligible: bool,
    #[serde(default = "yes")]
    pub rational: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    Point,
    RationalCurve,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepRecord {
    pub kind: StepKind,
    pub center_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_class: Option<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal_degree: Option<Rat>,
    pub new_divisor: String,
    pub new_curve: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub name: String,
    /// Built-in model name (`P3`, `X`, `Z`) or path relative to the map file.
    pub source: String,
    pub target: String,
    /// Row-major; column `j` is the pullback of the `j`-th target divisor.
    pub m11: Vec<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m22: Option<Vec<Vec<Rat>>>,
    pub involution: bool,
    #[serde(default)]
    pub indeterminacy_forward: Vec<String>,
    #[serde(default)]
    pub indeterminacy_backward: Vec<String>,
}

impl From<&VarietyModel> for ModelFile {
    fn from(m: &VarietyModel) -> Self {
        let p = m.parts();
        let n = m.h11();
        let mut cup = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let c = m.cup_entry(i, j);
                let symmetric = m.cup_entry(j, i) == c;
                // The mirror of a symmetric entry is implied.
                let keep = if i <= j {
                    !c.is_zero() || !symmetric
                } else {
                    !symmetric
                };
                if !keep {
                    continue;
                }
                cup.push(CupEntry {
                    i,
                    j,
                    result: c.coeffs().to_vec(),
                });
            }
        }
        ModelFile {
            name: p.name.clone(),
            h11_basis: p.h11_basis.clone(),
            h22_basis: p.h22_basis.clone(),
            pairing: p.pairing.row_vecs(),
            cup,
            canonical: p.canonical.coeffs().to_vec(),
            curves: p
                .curves
                .iter()
                .map(|c| {
                    (
                        c.name.clone(),
                        CurveRecord {
                            class: c.class.coeffs().to_vec(),
                            effective: c.flags.effective,
                            nef_generator: c.flags.nef_generator,
                            indeterminacy_eligible: c.flags.indeterminacy_eligible,
                            rational: c.flags.rational,
                        },
                    )
                })
                .collect(),
            provenance: p.provenance.iter().map(StepRecord::from).collect(),
        }
    }
}

impl From<&BlowupStep> for StepRecord {
    fn from(s: &BlowupStep) -> Self {
        let (kind, center_class, normal_degree) = match &s.center {
            BlowupCenter::Point { .. } => (StepKind::Point, None, None),
            BlowupCenter::RationalCurve {
                class,
                normal_degree,
                ..
            } => (
                StepKind::RationalCurve,
                Some(class.coeffs().to_vec()),
                Some(normal_degree.clone()),
            ),
        };
        StepRecord {
            kind,
            center_name: s.center.name().to_string(),
            center_class,
            normal_degree,
            new_divisor: s.new_divisor.clone(),
            new_curve: s.new_curve.clone(),
        }
    }
}

impl TryFrom<StepRecord> for BlowupStep {
    type Error = Error;

    fn try_from(r: StepRecord) -> Result<Self> {
        let center = match r.kind {
            StepKind::Point => BlowupCenter::Point {
                name: r.center_name,
            },
            StepKind::RationalCurve => {
                let (Some(class), Some(normal_degree)) = (r.center_class, r.normal_degree) else {
                    return Err(Error::InvalidModel(format!(
                        "curve step {:?} needs center_class and normal_degree",
                        r.center_name
                    )));
                };
                BlowupCenter::RationalCurve {
                    name: r.center_name,
                    class: H22Class::new(class),
                    normal_degree,
                }
            }
        };
        Ok(BlowupStep {
            center,
            new_divisor: r.new_divisor,
            new_curve: r.new_curve,
        })
    }
}

impl TryFrom<ModelFile> for VarietyModel {
    type Error = Error;

    /// Checks shapes only; see [`VarietyModel::validate`] for consistency.
    fn try_from(f: ModelFile) -> Result<Self> {
        let n1 = f.h11_basis.len();
        let n2 = f.h22_basis.len();
        let pairing = if f.pairing.is_empty() {
            RatMatrix::zeros(0, n2)
        } else {
            RatMatrix::from_rows(f.pairing)?
        };
        let mut explicit = vec![false; n1 * n1];
        let mut cup = vec![H22Class::zero(n2); n1 * n1];
        for e in &f.cup {
            if e.i >= n1 || e.j >= n1 {
                return Err(Error::InvalidModel(format!(
                    "cup index ({}, {}) out of range",
                    e.i, e.j
                )));
            }
            if e.result.len() != n2 {
                return Err(Error::DimensionMismatch {
                    context: "cup table entry",
                    expected: n2,
                    found: e.result.len(),
                });
            }
            if explicit[e.i * n1 + e.j] {
                return Err(Error::InvalidModel(format!(
                    "cup entry ({}, {}) given twice",
                    e.i, e.j
                )));
            }
            explicit[e.i * n1 + e.j] = true;
            cup[e.i * n1 + e.j] = H22Class::new(e.result.clone());
        }
        for e in &f.cup {
            if !explicit[e.j * n1 + e.i] {
                cup[e.j * n1 + e.i] = H22Class::new(e.result.clone());
            }
        }
        let curves = f
            .curves
            .into_iter()
            .map(|(name, r)| CurveEntry {
                name,
                class: H22Class::new(r.class),
                flags: CurveFlags {
                    effective: r.effective,
                    nef_generator: r.nef_generator,
                    indeterminacy_eligible: r.indeterminacy_eligible,
                    rational: r.rational,
                },
            })
            .collect();
        let provenance = f
            .provenance
            .into_iter()
            .map(BlowupStep::try_from)
            .collect::<Result<Vec<_>>>()?;
        VarietyModel::new(ModelParts {
            name: f.name,
            h11_basis: f.h11_basis,
            h22_basis: f.h22_basis,
            pairing,
            cup,
            canonical: H11Class::new(f.canonical),
            curves,
            provenance,
        })
    }
}

fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn model_to_json(m: &VarietyModel) -> String {
    to_pretty_json(&ModelFile::from(m))
}

/// Parses a model file. The result has the right shapes but is not validated.
pub fn parse_model(text: &str) -> Result<VarietyModel> {
    let file: ModelFile = serde_json::from_str(text)?;
    VarietyModel::try_from(file)
}

impl From<&PseudoIsoModel> for MapFile {
    fn from(map: &PseudoIsoModel) -> Self {
        let p = map.parts();
        MapFile {
            name: p.name.clone(),
            source: p.source.name().to_string(),
            target: p.target.name().to_string(),
            m11: p.m11.row_vecs(),
            m22: p.m22.as_ref().map(RatMatrix::row_vecs),
            involution: p.involution,
            indeterminacy_forward: p.indeterminacy_forward.clone(),
            indeterminacy_backward: p.indeterminacy_backward.clone(),
        }
    }
}

impl MapFile {
    /// Builds the map, obtaining models through `resolve`. A shared
    /// source/target reference is resolved once.
    pub fn into_map(
        self,
        mut resolve: impl FnMut(&str) -> Result<Arc<VarietyModel>>,
    ) -> Result<PseudoIsoModel> {
        let source = resolve(&self.source)?;
        let target = if self.target == self.source {
            source.clone()
        } else {
            resolve(&self.target)?
        };
        let matrix = |rows: Vec<Vec<Rat>>, cols: usize| {
            if rows.is_empty() {
                Ok(RatMatrix::zeros(0, cols))
            } else {
                RatMatrix::from_rows(rows)
            }
        };
        let m11 = matrix(self.m11, target.h11())?;
        let m22 = self.m22.map(|m| matrix(m, target.h22())).transpose()?;
        PseudoIsoModel::new(MapParts {
            name: self.name,
            source,
            target,
            m11,
            m22,
            involution: self.involution,
            indeterminacy_forward: self.indeterminacy_forward,
            indeterminacy_backward: self.indeterminacy_backward,
        })
    }
}

pub fn map_to_json(map: &PseudoIsoModel) -> String {
    to_pretty_json(&MapFile::from(map))
}

pub fn parse_map_file(text: &str) -> Result<MapFile> {
    Ok(serde_json::from_str(text)?)
}

/// Built-in model by name: `P3`, `X` or `Z`.
pub fn builtin_model(name: &str) -> Option<VarietyModel> {
    match name {
        "P3" => Some(projective3()),
        "X" => Some(standard_x()),
        "Z" => Some(standard_z()),
        _ => None,
    }
}

/// Built-in map by name: `JX`.
pub fn builtin_map(name: &str) -> Option<PseudoIsoModel> {
    match name {
        "JX" => Some(standard_jx()),
        _ => None,
    }
}

pub const BUILTIN_NAMES: [&str; 4] = ["P3", "X", "Z", "JX"];

/// Canonical JSON of a built-in model or map.
pub fn builtin_json(name: &str) -> Option<String> {
    builtin_model(name)
        .map(|m| model_to_json(&m))
        .or_else(|| builtin_map(name).map(|m| map_to_json(&m)))
}

/// A built-in model name, or else a path to a model file.
pub fn load_model(spec: &str, base_dir: Option<&Path>) -> Result<VarietyModel> {
    if let Some(m) = builtin_model(spec) {
        return Ok(m);
    }
    let path = match base_dir {
        Some(dir) => dir.join(spec),
        None => spec.into(),
    };
    parse_model(&std::fs::read_to_string(path)?)
}

/// A built-in map name, or else a path to a map file whose model references
/// are resolved relative to the file.
pub fn load_map(spec: &str) -> Result<PseudoIsoModel> {
    if let Some(m) = builtin_map(spec) {
        return Ok(m);
    }
    let path = Path::new(spec);
    let file = parse_map_file(&std::fs::read_to_string(path)?)?;
    let dir = path.parent();
    file.into_map(|s| load_model(s, dir).map(Arc::new))
}
