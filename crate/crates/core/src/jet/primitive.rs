use std::collections::BTreeMap;

use crate::algebra::{rational, AlgebraError, MultiPoly};

use super::{truncate, IdealSpec, JetClass, JetError, VectorFieldJet};

fn frame_indices(ideal: &IdealSpec, frame: &[String]) -> Result<Vec<usize>, JetError> {
    frame
        .iter()
        .map(|name| {
            if !ideal.is_tangential(name) {
                return Err(JetError::NotTangentialVariable(name.clone()));
            }
            Ok(ideal.index_of(name).expect("tangential variable is in the chart"))
        })
        .collect()
}

/// Primitive of the closed form `Σ c_i dz^i` over the frame variables,
/// vanishing where all frame variables vanish. Integrates along the straight
/// segment from the origin: a term `c · z^a` of the `i`-th coefficient
/// contributes `c / (|a| + 1) · z^a · z^i`, where `|a|` counts frame
/// exponents only. Other variables behave as parameters.
pub(crate) fn primitive_raw(coeffs: &[MultiPoly], frame: &[usize], names: &[String]) -> Result<MultiPoly, JetError> {
    let vars = coeffs[0].vars().clone();
    for a in 0..frame.len() {
        for b in a + 1..frame.len() {
            let lhs = coeffs[a].derivative_at(frame[b]);
            let rhs = coeffs[b].derivative_at(frame[a]);
            if lhs != rhs {
                return Err(JetError::NotClosed { first: names[a].clone(), second: names[b].clone() });
            }
        }
    }
    let mut h = MultiPoly::zero(&vars);
    for (c, &i) in coeffs.iter().zip(frame) {
        let terms = c.terms().map(|(m, coef)| {
            let d = m.partial_degree(frame) as i64;
            let mut m2 = m.clone();
            *m2.exponent_mut(i) += 1;
            (m2, coef.scale(&rational(1, d + 1)))
        });
        let part = MultiPoly::from_terms(&vars, terms);
        h = &h + &part;
    }
    Ok(h)
}

/// Holomorphic Poincaré step on jets. Missing frame entries are zero.
pub fn primitive_of_closed_1form(
    ideal: &IdealSpec,
    coeffs: &BTreeMap<String, JetClass>,
) -> Result<JetClass, JetError> {
    let names: Vec<String> = coeffs.keys().cloned().collect();
    let frame = frame_indices(ideal, &names)?;
    let mut reps = Vec::with_capacity(names.len());
    for c in coeffs.values() {
        if c.ideal() != ideal {
            return Err(JetError::IdealMismatch);
        }
        reps.push(c.rep().clone());
    }
    if reps.is_empty() {
        return Ok(JetClass::zero(ideal));
    }
    let h = primitive_raw(&reps, &frame, &names)?;
    truncate(&h, ideal)
}

/// A vector field with arbitrary (not necessarily canonical) polynomial
/// representatives of its jet coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldExtension {
    pub ideal: IdealSpec,
    pub components: Vec<MultiPoly>,
}

impl FieldExtension {
    pub fn new(ideal: &IdealSpec, components: Vec<MultiPoly>) -> Result<Self, JetError> {
        if components.len() != ideal.nvars() || components.iter().any(|p| p.vars() != ideal.vars()) {
            return Err(JetError::Algebra(AlgebraError::VariableMismatch {
                left: ideal.vars().to_vec(),
                right: components.first().map(|p| p.vars().to_vec()).unwrap_or_default(),
            }));
        }
        Ok(FieldExtension { ideal: ideal.clone(), components })
    }

    pub fn class(&self) -> Result<VectorFieldJet, JetError> {
        super::classify_field(&self.components, &self.ideal)
    }

    /// Whether `[∂/∂z^i, self] = 0` holds identically for every frame index.
    pub fn commutes_with(&self, frame: &[String]) -> bool {
        frame.iter().all(|name| {
            let i = self.ideal.index_of(name).expect("frame variable in chart");
            self.components.iter().all(|c| c.derivative_at(i).is_zero())
        })
    }
}

/// Replaces each component `g` by `g - h`, where `h` is the primitive of the
/// closed form `Σ_i ∂g/∂z^i dz^i` over the frame. The result has no frame
/// dependence at all and agrees with the input modulo `I_S^(k+1)` because
/// every `∂g/∂z^i` already lies there.
pub fn normalize_commuting_extension(w: &FieldExtension, frame: &[String]) -> Result<FieldExtension, JetError> {
    let idx = frame_indices(&w.ideal, frame)?;
    let class = w.class()?;
    if !class.status().is_logarithmic() {
        return Err(JetError::NotLogarithmic);
    }
    for (name, &i) in frame.iter().zip(&idx) {
        for (h, c) in w.components.iter().enumerate() {
            let d = truncate(&c.derivative_at(i), &w.ideal)?;
            if !d.is_zero() {
                return Err(JetError::PreconditionFailed(format!(
                    "[d/d{}, w] has nonzero {} component {} modulo I^{}",
                    name,
                    w.ideal.vars()[h],
                    d,
                    w.ideal.order() + 1
                )));
            }
        }
    }
    if idx.is_empty() {
        return Ok(w.clone());
    }
    let mut out = Vec::with_capacity(w.components.len());
    for g in &w.components {
        let dg: Vec<MultiPoly> = idx.iter().map(|&i| g.derivative_at(i)).collect();
        let h = primitive_raw(&dg, &idx, frame)
            .map_err(|e| JetError::PreconditionFailed(format!("internal: exact differential not closed ({})", e)))?;
        out.push(g - &h);
    }
    Ok(FieldExtension { ideal: w.ideal.clone(), components: out })
}

/// Jet-level form of [`normalize_commuting_extension`]: checks the
/// precondition on the class and returns the normalized class. Canonical
/// representatives already satisfy the conclusion, so this validates and
/// returns the input.
pub fn normalize_commuting_representative(w: &VectorFieldJet, frame: &[String]) -> Result<VectorFieldJet, JetError> {
    let ext = FieldExtension {
        ideal: w.ideal().clone(),
        components: w.components().iter().map(|c| c.rep().clone()).collect(),
    };
    normalize_commuting_extension(&ext, frame)?.class()
}
