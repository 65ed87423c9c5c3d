//! JSON document formats for fields, atlases and cochains. Expressions are
//! strings in the parser grammar; exact numbers print as `a/b` or
//! `a/b+c/d*i`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Monomial, MultiPoly, RationalFunction};
use crate::atlas::{AtlasError, Roles, TransitionAtlas};
use crate::cech::{CechCochain, CechError, CochainKind, Frames, Matrix};
use crate::jet::{IdealSpec, JetError, JetFraction, VectorFieldJet};
use crate::parse::{parse_polynomial, parse_rational, ParseError};
use crate::residue::{surface_vars, FieldMode, ResidueError, SurfaceFieldInput};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("in `{context}`: {source}")]
    Parse { context: String, source: ParseError },
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Atlas(#[from] AtlasError),
    #[error(transparent)]
    Cech(#[from] CechError),
    #[error(transparent)]
    Residue(#[from] ResidueError),
    #[error("{0}")]
    Invalid(String),
}

impl DocumentError {
    pub fn code(&self) -> &'static str {
        match self {
            DocumentError::Json(_) => "MalformedJson",
            DocumentError::Parse { source, .. } => source.code(),
            DocumentError::Jet(e) => e.code(),
            DocumentError::Atlas(e) => e.code(),
            DocumentError::Cech(e) => e.code(),
            DocumentError::Residue(e) => e.code(),
            DocumentError::Invalid(_) => "InvalidDocument",
        }
    }
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, DocumentError> {
    serde_json::from_str(text).map_err(|e| DocumentError::Json(e.to_string()))
}

fn parse_poly_in(text: &str, ideal: &IdealSpec, context: &str) -> Result<MultiPoly, DocumentError> {
    parse_polynomial(text, ideal.vars()).map_err(|source| DocumentError::Parse { context: context.to_string(), source })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariablesDoc {
    pub normal: Vec<String>,
    pub tangential: Vec<String>,
    #[serde(default)]
    pub foliation: Vec<String>,
}

impl VariablesDoc {
    pub fn roles(&self) -> Result<Roles, AtlasError> {
        Roles::new(&self.normal, &self.tangential, &self.foliation)
    }
}

fn default_order() -> u32 {
    1
}

/// One or more fields over a shared coordinate split, plus the optional
/// extras some commands read (`function`, `form`, `frame`, `mode`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDocument {
    pub variables: VariablesDoc,
    #[serde(default = "default_order")]
    pub order: u32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub components: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub form: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frame: Vec<String>,
}

impl FieldDocument {
    pub fn ideal(&self) -> Result<IdealSpec, DocumentError> {
        self.variables.roles()?;
        Ok(IdealSpec::new(&self.variables.normal, &self.variables.tangential, self.order)?)
    }

    fn field_from(&self, ideal: &IdealSpec, map: &BTreeMap<String, String>) -> Result<VectorFieldJet, DocumentError> {
        let mut polys = BTreeMap::new();
        for (name, text) in map {
            if ideal.index_of(name).is_none() {
                return Err(DocumentError::Invalid(format!("component `{}` is not a declared variable", name)));
            }
            polys.insert(name.clone(), parse_poly_in(text, ideal, name)?);
        }
        Ok(VectorFieldJet::from_map(ideal, &polys)?)
    }

    /// `components` first (when present), then each entry of `fields`.
    pub fn vector_fields(&self) -> Result<Vec<VectorFieldJet>, DocumentError> {
        let ideal = self.ideal()?;
        let mut out = Vec::new();
        if !self.components.is_empty() {
            out.push(self.field_from(&ideal, &self.components)?);
        }
        for f in &self.fields {
            out.push(self.field_from(&ideal, f)?);
        }
        Ok(out)
    }

    pub fn mode(&self) -> Result<FieldMode, DocumentError> {
        match &self.mode {
            None => Ok(FieldMode::Tangential),
            Some(m) => FieldMode::parse(m)
                .ok_or_else(|| DocumentError::Invalid(format!("mode must be tangential or transversal, got `{}`", m))),
        }
    }

    /// The planar field `A ∂/∂n + B ∂/∂t` for one normal variable `n` and one
    /// tangential variable `t`, renamed to `x`, `y`.
    pub fn surface_input(&self) -> Result<SurfaceFieldInput, DocumentError> {
        let v = &self.variables;
        if v.normal.len() != 1 || v.tangential.len() != 1 {
            return Err(DocumentError::Invalid("residue commands need one normal and one tangential variable".into()));
        }
        let ideal = IdealSpec::new(&v.normal, &v.tangential, 1)?;
        let get = |name: &str| -> Result<MultiPoly, DocumentError> {
            let p = match self.components.get(name) {
                Some(text) => parse_poly_in(text, &ideal, name)?,
                None => MultiPoly::zero(ideal.vars()),
            };
            let sv = surface_vars();
            Ok(MultiPoly::from_terms(&sv, p.terms().map(|(m, c)| (Monomial::from_exponents(m.exponents()), c.clone()))))
        };
        for name in self.components.keys() {
            if ideal.index_of(name).is_none() {
                return Err(DocumentError::Invalid(format!("component `{}` is not a declared variable", name)));
            }
        }
        Ok(SurfaceFieldInput::new(get(&v.normal[0])?, get(&v.tangential[0])?, self.mode()?)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub from: String,
    pub to: String,
    pub map: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtlasDocument {
    pub charts: Vec<String>,
    pub roles: VariablesDoc,
    #[serde(default = "default_order")]
    pub order: u32,
    pub transitions: Vec<TransitionDoc>,
    #[serde(default)]
    pub overlaps: Vec<[String; 2]>,
    #[serde(default)]
    pub triples: Vec<[String; 3]>,
}

impl AtlasDocument {
    pub fn build(&self) -> Result<TransitionAtlas, DocumentError> {
        let roles = self.roles.roles()?;
        let vars = roles.ideal(0).vars().clone();
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for t in &self.transitions {
            let mut map = BTreeMap::new();
            for (name, text) in &t.map {
                let f = parse_rational(text, &vars).map_err(|source| DocumentError::Parse {
                    context: format!("{}->{} {}", t.from, t.to, name),
                    source,
                })?;
                map.insert(name.clone(), f);
            }
            transitions.push((t.from.clone(), t.to.clone(), map));
        }
        Ok(TransitionAtlas::new(
            self.charts.clone(),
            roles,
            self.order,
            transitions,
            self.overlaps.iter().map(|[a, b]| (a.clone(), b.clone())).collect(),
            self.triples.clone(),
        )?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDoc {
    pub charts: Vec<String>,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CochainDocument {
    pub kind: String,
    pub degree: usize,
    /// Informational on input; filled in on output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cols: Vec<String>,
    pub components: Vec<ComponentDoc>,
}

impl CochainDocument {
    pub fn from_cochain(c: &CechCochain) -> Self {
        CochainDocument {
            kind: c.kind().as_str().to_string(),
            degree: c.degree(),
            order: Some(c.order()),
            rows: c.frames().rows.clone(),
            cols: c.frames().cols.clone(),
            components: c
                .components()
                .iter()
                .map(|(k, m)| ComponentDoc {
                    charts: k.clone(),
                    matrix: m.iter().map(|r| r.iter().map(|e| e.to_string()).collect()).collect(),
                })
                .collect(),
        }
    }

    pub fn kind(&self) -> Result<CochainKind, DocumentError> {
        CochainKind::parse(&self.kind)
            .ok_or_else(|| DocumentError::Invalid(format!("kind must be atiyah or normal, got `{}`", self.kind)))
    }

    pub fn build(&self, atlas: &TransitionAtlas) -> Result<CechCochain, DocumentError> {
        let kind = self.kind()?;
        let frames = Frames::of(atlas, kind);
        if !self.rows.is_empty() && self.rows != frames.rows {
            return Err(CechError::FrameMismatch(format!("rows {:?}, expected {:?}", self.rows, frames.rows)).into());
        }
        if !self.cols.is_empty() && self.cols != frames.cols {
            return Err(CechError::FrameMismatch(format!("cols {:?}, expected {:?}", self.cols, frames.cols)).into());
        }
        if let Some(k) = self.order {
            if k != frames.ideal.order() {
                return Err(CechError::FrameMismatch(format!("order {}, expected {}", k, frames.ideal.order())).into());
            }
        }
        let mut components = BTreeMap::new();
        for c in &self.components {
            let m: Matrix = c
                .matrix
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|text| {
                            let f: RationalFunction = parse_rational(text, frames.ideal.vars()).map_err(|source| {
                                DocumentError::Parse { context: format!("component {}", c.charts.join(",")), source }
                            })?;
                            Ok(JetFraction::from_rational(&f, &frames.ideal)?)
                        })
                        .collect::<Result<Vec<_>, DocumentError>>()
                })
                .collect::<Result<_, _>>()?;
            if components.insert(c.charts.clone(), m).is_some() {
                return Err(DocumentError::Invalid(format!("component {:?} given twice", c.charts)));
            }
        }
        Ok(CechCochain::new(self.degree, kind, atlas, components)?)
    }
}

/// Input of the splitting commands: an atlas, a degree-0 cochain `sigma`
/// and, for `verify-splitting`, an optional degree-1 cochain (the obstruction
/// of `sigma`'s kind is used when absent).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplittingDocument {
    pub atlas: AtlasDocument,
    pub sigma: CochainDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cochain: Option<CochainDocument>,
}
