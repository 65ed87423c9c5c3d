//! The universal partial connection on `N_(F,M)`, its curvature, and exact
//! residues for a field `A ∂/∂x + B ∂/∂y` near `S = {x = 0}` in the plane.

mod transform;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::algebra::{laurent_expand, residue_coefficient, vars, AlgebraError, GaussianRational, MultiPoly, Vars};
use crate::atlas::{splitting_projection, AtlasError, SplittingData};
use crate::exec::Exec;
use crate::jet::{jet_bracket, restrict_to_S, IdealSpec, JetClass, JetError, VectorFieldJet};
use crate::parse::{parse_polynomial, ParseError};

pub use transform::{chart_residues, two_chart_transform, ChartResidues};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResidueError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Atlas(#[from] AtlasError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("B vanishes identically on S; the singular set is not isolated in this chart")]
    ZeroOnS,
    #[error("field is not tangent to the foliation along S: {0}")]
    NotTangential(String),
    #[error("operation needs a {expected} input, got {found}")]
    ModeMismatch { expected: &'static str, found: &'static str },
    #[error("`{0}` is not a non-foliation frame direction")]
    NotAFrameDirection(String),
    #[error("transformed field has a pole at y' = 0: {0}")]
    PoleInSecondChart(String),
}

impl ResidueError {
    pub fn code(&self) -> &'static str {
        match self {
            ResidueError::Algebra(e) => e.code(),
            ResidueError::Jet(e) => e.code(),
            ResidueError::Atlas(e) => e.code(),
            ResidueError::Parse(e) => e.code(),
            ResidueError::ZeroOnS => "ZeroOnS",
            ResidueError::NotTangential(_) => "NotTangential",
            ResidueError::ModeMismatch { .. } => "ModeMismatch",
            ResidueError::NotAFrameDirection(_) => "NotAFrameDirection",
            ResidueError::PoleInSecondChart(_) => "PoleInSecondChart",
        }
    }
}

/// The field of a non-foliation direction under the universal connection,
/// `δ_v(∂_t) = pr [v, ∂_t]`: on representatives the coefficient of `∂_h` is
/// `-∂v^h/∂z^t` restricted to `S`, for every non-foliation `h`.
pub fn universal_connection_apply(
    v: &VectorFieldJet,
    t: &str,
    foliation: &[String],
) -> Result<BTreeMap<String, JetClass>, ResidueError> {
    let ideal = v.ideal();
    require_tangential(v, foliation)?;
    if ideal.index_of(t).is_none() || foliation.iter().any(|f| f == t) {
        return Err(ResidueError::NotAFrameDirection(t.to_string()));
    }
    let on_s = ideal.with_order(0);
    let mut out = BTreeMap::new();
    for (h, c) in ideal.vars().iter().zip(v.components()) {
        if foliation.contains(h) {
            continue;
        }
        let d = c.rep().partial_derivative(t)?;
        out.insert(h.clone(), JetClass::truncating(&on_s, &(-&d)));
    }
    Ok(out)
}

/// Logarithmic, order at least one, and no transverse component on `S`.
fn require_tangential(v: &VectorFieldJet, foliation: &[String]) -> Result<(), ResidueError> {
    let ideal = v.ideal();
    if ideal.order() < 1 {
        return Err(ResidueError::NotTangential("the connection needs first-order jets".into()));
    }
    if !v.status().is_logarithmic() {
        return Err(ResidueError::NotTangential(format!("{} has a normal component off I_S", v)));
    }
    for f in foliation {
        if !ideal.is_tangential(f) {
            return Err(JetError::NotTangentialVariable(f.clone()).into());
        }
    }
    for (name, c) in ideal.vars().iter().zip(v.components()).skip(ideal.codim()) {
        if !foliation.contains(name) && !c.vanishes_on_s() {
            return Err(ResidueError::NotTangential(format!("transverse component {} = {}", name, c)));
        }
    }
    Ok(())
}

/// Row `h`, column `t`: coefficient of `∂_h` in `δ_v(∂_t)`.
fn connection_matrix(v: &VectorFieldJet, frame: &[String], foliation: &[String]) -> Result<Vec<Vec<JetClass>>, ResidueError> {
    let cols = frame
        .iter()
        .map(|t| universal_connection_apply(v, t, foliation))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(frame.iter().map(|h| cols.iter().map(|c| c[h].clone()).collect()).collect())
}

/// Curvature `δ_u δ_v - δ_v δ_u - δ_[u,v]` on the non-foliation frame,
/// returned as a matrix (row `h`, column `t`) of classes on `S`.
///
/// With `δ_v(f ∂_t) = v|_S(f) ∂_t + f M_v ∂_t` this is
/// `u|_S(M_v) - v|_S(M_u) + M_u M_v - M_v M_u - M_[u,v]`.
pub fn flatness_check(
    u: &VectorFieldJet,
    v: &VectorFieldJet,
    foliation: &[String],
) -> Result<Vec<Vec<JetClass>>, ResidueError> {
    if u.ideal() != v.ideal() {
        return Err(JetError::IdealMismatch.into());
    }
    let ideal = u.ideal().clone();
    let frame: Vec<String> = ideal.vars().iter().filter(|n| !foliation.contains(n)).cloned().collect();
    let mu = connection_matrix(u, &frame, foliation)?;
    let mv = connection_matrix(v, &frame, foliation)?;
    let muv = connection_matrix(&jet_bracket(u, v)?, &frame, foliation)?;
    let on_s = ideal.with_order(0);
    let us = restrict_to_S(u)?;
    let vs = restrict_to_S(v)?;
    let s_ideal = us.ideal().clone();
    // derivative of a class on S along a field on S, back in ambient variables
    let along = |w: &VectorFieldJet, f: &JetClass| -> Result<JetClass, ResidueError> {
        let p = f.rep().reembed(s_ideal.vars())?;
        let mut acc = MultiPoly::zero(s_ideal.vars());
        for (i, c) in w.components().iter().enumerate() {
            acc = &acc + &(c.rep() * &p.derivative_at(i));
        }
        Ok(JetClass::truncating(&on_s, &acc.reembed(on_s.vars())?))
    };
    let n = frame.len();
    let mut out = vec![vec![JetClass::zero(&on_s); n]; n];
    for h in 0..n {
        for t in 0..n {
            let mut acc = along(&us, &mv[h][t])?.try_sub(&along(&vs, &mu[h][t])?)?;
            for g in 0..n {
                acc = acc.try_add(&mu[h][g].try_mul(&mv[g][t])?)?;
                acc = acc.try_sub(&mv[h][g].try_mul(&mu[g][t])?)?;
            }
            out[h][t] = acc.try_sub(&muv[h][t])?;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldMode {
    /// `A ∈ I_S`: the field is logarithmic along `S`.
    Tangential,
    /// `A` unrestricted; only the splitting projection of `[A]_2` matters.
    Transversal,
}

impl FieldMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldMode::Tangential => "tangential",
            FieldMode::Transversal => "transversal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "tangential" => Some(FieldMode::Tangential),
            "transversal" => Some(FieldMode::Transversal),
            _ => None,
        }
    }
}

/// Variables `[x, y]` with `S = {x = 0}`.
pub fn surface_vars() -> Vars {
    static VARS: OnceLock<Vars> = OnceLock::new();
    VARS.get_or_init(|| vars(["x", "y"])).clone()
}

fn line_vars() -> Vars {
    static VARS: OnceLock<Vars> = OnceLock::new();
    VARS.get_or_init(|| vars(["y"])).clone()
}

/// `A ∂/∂x + B ∂/∂y` in the plane, `S = {x = 0}`, foliation direction `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceFieldInput {
    a: MultiPoly,
    b: MultiPoly,
    mode: FieldMode,
}

impl SurfaceFieldInput {
    pub fn new(a: MultiPoly, b: MultiPoly, mode: FieldMode) -> Result<Self, ResidueError> {
        let vs = surface_vars();
        let a = a.reembed(&vs)?;
        let b = b.reembed(&vs)?;
        if mode == FieldMode::Tangential && !a.vanish_at(&[0]).is_zero() {
            return Err(ResidueError::NotTangential(format!("A = {} is not in I_S", a)));
        }
        Ok(SurfaceFieldInput { a, b, mode })
    }

    pub fn parse(a: &str, b: &str, mode: FieldMode) -> Result<Self, ResidueError> {
        let vs = surface_vars();
        Self::new(parse_polynomial(a, &vs)?, parse_polynomial(b, &vs)?, mode)
    }

    pub fn a(&self) -> &MultiPoly {
        &self.a
    }

    pub fn b(&self) -> &MultiPoly {
        &self.b
    }

    pub fn mode(&self) -> FieldMode {
        self.mode
    }

    pub fn ideal() -> IdealSpec {
        IdealSpec::new(&["x"], &["y"], 1).expect("distinct names")
    }

    /// The first-order jet of the field.
    pub fn jet(&self) -> Result<VectorFieldJet, ResidueError> {
        Ok(crate::jet::classify_field(&[self.a.clone(), self.b.clone()], &Self::ideal())?)
    }

    fn require(&self, mode: FieldMode) -> Result<(), ResidueError> {
        if self.mode != mode {
            return Err(ResidueError::ModeMismatch { expected: mode.as_str(), found: self.mode.as_str() });
        }
        Ok(())
    }

    /// `(∂A/∂x + ∂B/∂y)|_(x=0)` and `B|_(x=0)`, as polynomials in `y`.
    fn integrand(&self) -> Result<(MultiPoly, MultiPoly), ResidueError> {
        let num = &self.a.partial_derivative("x")? + &self.b.partial_derivative("y")?;
        Ok((on_s(&num)?, self.b_on_s()?))
    }

    fn b_on_s(&self) -> Result<MultiPoly, ResidueError> {
        let b = on_s(&self.b)?;
        if b.is_zero() {
            return Err(ResidueError::ZeroOnS);
        }
        Ok(b)
    }
}

fn on_s(p: &MultiPoly) -> Result<MultiPoly, ResidueError> {
    Ok(p.vanish_at(&[0]).reembed(&line_vars())?)
}

/// `(num / den) dy` on `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeromorphicForm1D {
    num: MultiPoly,
    den: MultiPoly,
}

impl MeromorphicForm1D {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self, ResidueError> {
        if den.is_zero() {
            return Err(AlgebraError::ZeroDenominator.into());
        }
        let lv = line_vars();
        Ok(MeromorphicForm1D { num: num.reembed(&lv)?, den: den.reembed(&lv)? })
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Coefficient of `y^-1 dy` at the origin.
    pub fn residue(&self) -> Result<GaussianRational, ResidueError> {
        Ok(residue_coefficient(&laurent_expand(&self.num, &self.den, "y", -1)?)?)
    }

    /// Equality as rational functions.
    pub fn same_form(&self, other: &MeromorphicForm1D) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

impl fmt::Display for MeromorphicForm1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rf = crate::algebra::RationalFunction::new(self.num.clone(), self.den.clone()).map_err(|_| fmt::Error)?;
        if rf.is_polynomial() {
            write!(f, "({}) dy", rf)
        } else {
            write!(f, "{} dy", rf)
        }
    }
}

/// `-[(∂A/∂x)/B]_1 dy`.
pub fn connection_matrix_2d(input: &SurfaceFieldInput) -> Result<MeromorphicForm1D, ResidueError> {
    input.require(FieldMode::Tangential)?;
    let b = input.b_on_s()?;
    let num = -&on_s(&input.a.partial_derivative("x")?)?;
    MeromorphicForm1D::new(num, b)
}

/// `[(1/B) ∂A/∂x]_1 dy + [dB/B]_1`.
pub fn bott_difference_form_2d(input: &SurfaceFieldInput) -> Result<MeromorphicForm1D, ResidueError> {
    input.require(FieldMode::Tangential)?;
    let (num, den) = input.integrand()?;
    MeromorphicForm1D::new(num, den)
}

/// Residue at the origin of `((∂A/∂x + ∂B/∂y) / B)|_(x=0) dy`.
pub fn kls_residue(input: &SurfaceFieldInput) -> Result<GaussianRational, ResidueError> {
    bott_difference_form_2d(input)?.residue()
}

/// Projects `[A]_2` by the splitting data, then takes [`kls_residue`].
pub fn transversal_residue(
    input: &SurfaceFieldInput,
    data: &SplittingData,
    chart: &str,
) -> Result<GaussianRational, ResidueError> {
    let ideal = SurfaceFieldInput::ideal();
    if data.ideal() != &ideal {
        return Err(JetError::IdealMismatch.into());
    }
    let jet = crate::jet::classify_field(&[input.a.clone(), input.b.clone()], &ideal)?;
    let w = splitting_projection(&jet, data, chart)?;
    let projected = SurfaceFieldInput::new(
        w.components()[0].rep().clone(),
        input.b.clone(),
        FieldMode::Tangential,
    )?;
    kls_residue(&projected)
}

pub fn kls_residue_batch(inputs: &[SurfaceFieldInput], exec: Exec) -> Vec<Result<GaussianRational, ResidueError>> {
    exec.map(inputs, kls_residue)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;

    fn field(a: &str, b: &str) -> SurfaceFieldInput {
        SurfaceFieldInput::parse(a, b, FieldMode::Tangential).unwrap()
    }

    fn form(num: &str, den: &str) -> MeromorphicForm1D {
        let lv = line_vars();
        MeromorphicForm1D::new(parse_polynomial(num, &lv).unwrap(), parse_polynomial(den, &lv).unwrap()).unwrap()
    }

    fn fol() -> Vec<String> {
        vec!["y".to_string()]
    }

    fn r(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    #[test]
    fn connection_coefficients() {
        let apply = |a: &str, b: &str| {
            let v = field(a, b).jet().unwrap();
            universal_connection_apply(&v, "x", &fol()).unwrap()["x"].rep().to_string()
        };
        assert_eq!(apply("0", "y"), "0");
        assert_eq!(apply("x*y", "y"), "-y");
        assert_eq!(apply("x", "0"), "-1");
        let v = field("x", "y").jet().unwrap();
        assert!(matches!(universal_connection_apply(&v, "y", &fol()), Err(ResidueError::NotAFrameDirection(_))));
        let general = crate::jet::classify_field(
            &[parse_polynomial("1", &surface_vars()).unwrap(), MultiPoly::zero(&surface_vars())],
            &SurfaceFieldInput::ideal(),
        )
        .unwrap();
        assert!(matches!(universal_connection_apply(&general, "x", &fol()), Err(ResidueError::NotTangential(_))));
    }

    #[test]
    fn flat_examples() {
        let u = field("x*y", "y").jet().unwrap();
        assert!(flatness_check(&u, &u, &fol()).unwrap().iter().flatten().all(JetClass::is_zero));
        let u = field("0", "y").jet().unwrap();
        let v = field("0", "1").jet().unwrap();
        assert!(flatness_check(&u, &v, &fol()).unwrap().iter().flatten().all(JetClass::is_zero));
        let w = field("x*(1+y)", "y^2 + x").jet().unwrap();
        let f = JetClass::truncating(w.ideal(), &parse_polynomial("1 + x + y^3", &surface_vars()).unwrap());
        let g = JetClass::truncating(w.ideal(), &parse_polynomial("y - 2*x*y", &surface_vars()).unwrap());
        let c = flatness_check(&w.scale(&f).unwrap(), &w.scale(&g).unwrap(), &fol()).unwrap();
        assert!(c.iter().flatten().all(JetClass::is_zero));
    }

    #[test]
    fn connection_matrix_examples() {
        assert!(connection_matrix_2d(&field("0", "y")).unwrap().is_zero());
        assert!(connection_matrix_2d(&field("x*y", "y")).unwrap().same_form(&form("-1", "1")));
        assert!(connection_matrix_2d(&field("x", "y")).unwrap().same_form(&form("-1", "y")));
        assert!(matches!(connection_matrix_2d(&field("x", "x")), Err(ResidueError::ZeroOnS)));
    }

    #[test]
    fn bott_form_examples() {
        assert!(bott_difference_form_2d(&field("x", "y")).unwrap().same_form(&form("2", "y")));
        assert!(bott_difference_form_2d(&field("0", "y^2")).unwrap().same_form(&form("2", "y")));
        assert!(bott_difference_form_2d(&field("0", "1 + y")).unwrap().same_form(&form("1", "1 + y")));
    }

    #[test]
    fn residue_examples() {
        assert_eq!(kls_residue(&field("x", "y")).unwrap(), r(2));
        assert_eq!(kls_residue(&field("x*y", "y")).unwrap(), r(1));
        assert_eq!(kls_residue(&field("x", "1 + y")).unwrap(), r(0));
        assert_eq!(kls_residue(&field("0", "y^2")).unwrap(), r(2));
        assert_eq!(kls_residue(&field("x/2", "3*y")).unwrap(), GaussianRational::from_ratio(7, 6));
        assert!(matches!(kls_residue(&field("x", "x*y")), Err(ResidueError::ZeroOnS)));
        let t = SurfaceFieldInput::parse("x", "y", FieldMode::Transversal).unwrap();
        assert!(matches!(kls_residue(&t), Err(ResidueError::ModeMismatch { .. })));
        assert!(matches!(
            SurfaceFieldInput::parse("1 + x", "y", FieldMode::Tangential),
            Err(ResidueError::NotTangential(_))
        ));
    }

    #[test]
    fn transversal_examples() {
        let data = SplittingData::local(&SurfaceFieldInput::ideal());
        let t = |a: &str, b: &str| {
            let input = SurfaceFieldInput::parse(a, b, FieldMode::Transversal).unwrap();
            transversal_residue(&input, &data, "local").unwrap()
        };
        assert_eq!(t("1", "y"), r(1));
        assert_eq!(t("x + 5", "y"), r(2));
        assert_eq!(t("x*y^2 + x^2", "y^3 + y"), kls_residue(&field("x*y^2 + x^2", "y^3 + y")).unwrap());
    }

    #[test]
    fn batch_matches_single() {
        let inputs = vec![field("x", "y"), field("x*y", "y"), field("0", "y^2")];
        let seq = kls_residue_batch(&inputs, Exec::Sequential);
        let par = kls_residue_batch(&inputs, Exec::Parallel);
        assert_eq!(seq, par);
    }
}
