use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{AlgebraError, MultiPoly};

use super::class::mul_truncated;
use super::{IdealSpec, JetClass, JetError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldStatus {
    /// Some normal component does not vanish on `S`.
    General,
    /// Every normal component lies in `I_S`.
    Logarithmic,
    /// A field on `S` itself (the output of [`restrict_to_S`]).
    Tangential,
}

impl FieldStatus {
    pub fn is_logarithmic(self) -> bool {
        !matches!(self, FieldStatus::General)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FieldStatus::General => "general",
            FieldStatus::Logarithmic => "logarithmic",
            FieldStatus::Tangential => "tangential",
        }
    }
}

/// `Σ a^h ∂/∂z^h` with jet coefficients, one per chart variable in the
/// ideal's order (normal first).
#[derive(Clone, PartialEq, Eq)]
pub struct VectorFieldJet {
    ideal: IdealSpec,
    components: Vec<JetClass>,
    status: FieldStatus,
}

fn status_of(ideal: &IdealSpec, components: &[JetClass]) -> FieldStatus {
    if components[..ideal.codim()].iter().all(JetClass::vanishes_on_s) {
        FieldStatus::Logarithmic
    } else {
        FieldStatus::General
    }
}

/// Truncates each component and computes the status.
pub fn classify_field(components: &[MultiPoly], ideal: &IdealSpec) -> Result<VectorFieldJet, JetError> {
    if components.len() != ideal.nvars() {
        return Err(JetError::Algebra(AlgebraError::VariableMismatch {
            left: ideal.vars().to_vec(),
            right: components.iter().map(|p| format!("{}", p)).collect(),
        }));
    }
    let comps = components
        .iter()
        .map(|p| super::truncate(p, ideal))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VectorFieldJet::from_classes(ideal, comps))
}

impl VectorFieldJet {
    pub fn from_classes(ideal: &IdealSpec, components: Vec<JetClass>) -> Self {
        assert_eq!(components.len(), ideal.nvars());
        let status = status_of(ideal, &components);
        VectorFieldJet { ideal: ideal.clone(), components, status }
    }

    /// Components given by variable name; absent names are zero.
    pub fn from_map(ideal: &IdealSpec, map: &BTreeMap<String, MultiPoly>) -> Result<Self, JetError> {
        for name in map.keys() {
            if ideal.index_of(name).is_none() {
                return Err(JetError::Algebra(AlgebraError::UnknownVariable(name.clone())));
            }
        }
        let comps: Vec<MultiPoly> = ideal
            .vars()
            .iter()
            .map(|v| map.get(v).cloned().unwrap_or_else(|| MultiPoly::zero(ideal.vars())))
            .collect();
        classify_field(&comps, ideal)
    }

    pub fn zero(ideal: &IdealSpec) -> Self {
        Self::from_classes(ideal, vec![JetClass::zero(ideal); ideal.nvars()])
    }

    /// The coordinate field `∂/∂name`.
    pub fn coordinate(ideal: &IdealSpec, name: &str) -> Result<Self, JetError> {
        let i = ideal
            .index_of(name)
            .ok_or_else(|| JetError::Algebra(AlgebraError::UnknownVariable(name.to_string())))?;
        let mut comps = vec![JetClass::zero(ideal); ideal.nvars()];
        comps[i] = JetClass::one(ideal);
        Ok(Self::from_classes(ideal, comps))
    }

    pub fn ideal(&self) -> &IdealSpec {
        &self.ideal
    }

    pub fn status(&self) -> FieldStatus {
        self.status
    }

    pub fn components(&self) -> &[JetClass] {
        &self.components
    }

    pub fn component(&self, name: &str) -> Option<&JetClass> {
        self.ideal.index_of(name).map(|i| &self.components[i])
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(JetClass::is_zero)
    }

    fn require_log(&self) -> Result<(), JetError> {
        if self.status.is_logarithmic() {
            Ok(())
        } else {
            Err(JetError::NotLogarithmic)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, JetError> {
        if self.ideal != other.ideal {
            return Err(JetError::IdealMismatch);
        }
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_classes(&self.ideal, comps))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, JetError> {
        self.try_add(&other.scale_const(&(-1).into()))
    }

    pub fn scale_const(&self, c: &crate::algebra::GaussianRational) -> Self {
        let comps = self.components.iter().map(|a| a.scale(c)).collect();
        VectorFieldJet { ideal: self.ideal.clone(), components: comps, status: self.status }
    }

    /// `g · v`.
    pub fn scale(&self, g: &JetClass) -> Result<Self, JetError> {
        let comps = self
            .components
            .iter()
            .map(|a| g.try_mul(a))
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = Self::from_classes(&self.ideal, comps);
        if self.status == FieldStatus::Tangential {
            out.status = FieldStatus::Tangential;
        }
        Ok(out)
    }

    /// `v(f)` on representatives, without the status check.
    pub(crate) fn apply_raw(&self, f: &MultiPoly) -> MultiPoly {
        let mut acc = MultiPoly::zero(self.ideal.vars());
        for (i, a) in self.components.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let df = f.derivative_at(i);
            if df.is_zero() {
                continue;
            }
            acc = &acc + &mul_truncated(a.rep(), &df, &self.ideal);
        }
        acc
    }
}

/// Action of a logarithmic field as a derivation of `O_M / I_S^(k+1)`.
pub fn jet_apply(v: &VectorFieldJet, f: &JetClass) -> Result<JetClass, JetError> {
    v.require_log()?;
    if v.ideal != *f.ideal() {
        return Err(JetError::IdealMismatch);
    }
    Ok(JetClass::truncating(&v.ideal, &v.apply_raw(f.rep())))
}

/// `[u, v]^h = u(v^h) - v(u^h)`, truncated.
pub fn jet_bracket(u: &VectorFieldJet, v: &VectorFieldJet) -> Result<VectorFieldJet, JetError> {
    u.require_log()?;
    v.require_log()?;
    if u.ideal != v.ideal {
        return Err(JetError::IdealMismatch);
    }
    let comps = u
        .components
        .iter()
        .zip(&v.components)
        .map(|(uh, vh)| {
            let p = &u.apply_raw(vh.rep()) - &v.apply_raw(uh.rep());
            JetClass::truncating(&u.ideal, &p)
        })
        .collect();
    let mut out = VectorFieldJet::from_classes(&u.ideal, comps);
    if u.status == FieldStatus::Tangential && v.status == FieldStatus::Tangential {
        out.status = FieldStatus::Tangential;
    }
    Ok(out)
}

/// Restriction of a logarithmic field to `S`: a field in the tangential
/// variables only, at order 0.
#[allow(non_snake_case)]
pub fn restrict_to_S(v: &VectorFieldJet) -> Result<VectorFieldJet, JetError> {
    v.require_log()?;
    let target = v.ideal.on_s();
    let m = v.ideal.codim();
    let comps = v.components[m..]
        .iter()
        .map(|a| {
            let on_s = a.rep().vanish_at(v.ideal.normal_indices());
            let p = on_s.reembed(target.vars())?;
            Ok(JetClass::from_canonical(&target, p))
        })
        .collect::<Result<Vec<_>, JetError>>()?;
    Ok(VectorFieldJet { ideal: target, components: comps, status: FieldStatus::Tangential })
}

impl fmt::Display for VectorFieldJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, a) in self.ideal.vars().iter().zip(&self.components) {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if a.rep().len() > 1 {
                write!(f, "({})*d/d{}", a, name)?;
            } else {
                write!(f, "{}*d/d{}", a, name)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for VectorFieldJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}, {:?}]", self, self.status.as_str(), self.ideal)
    }
}
