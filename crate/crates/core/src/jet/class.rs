use std::fmt;

use num::Zero;

use crate::algebra::{GaussianRational, MultiPoly, RationalFunction};

use super::{IdealSpec, JetError};

/// A class `[f]_(k+1)` in `O_M / I_S^(k+1)`, held by its canonical
/// representative: no monomial of normal degree above `k`.
#[derive(Clone, PartialEq, Eq)]
pub struct JetClass {
    ideal: IdealSpec,
    rep: MultiPoly,
}

fn drop_high(p: &MultiPoly, ideal: &IdealSpec) -> MultiPoly {
    let k = ideal.order();
    let m = ideal.codim();
    p.filter_terms(|mono| mono.exponents()[..m].iter().sum::<u32>() <= k)
}

/// Canonical class of `p`.
pub fn truncate(p: &MultiPoly, ideal: &IdealSpec) -> Result<JetClass, JetError> {
    if p.vars() != ideal.vars() {
        return Err(crate::algebra::AlgebraError::VariableMismatch {
            left: p.vars().to_vec(),
            right: ideal.vars().to_vec(),
        }
        .into());
    }
    Ok(JetClass { ideal: ideal.clone(), rep: drop_high(p, ideal) })
}

impl JetClass {
    pub(crate) fn from_canonical(ideal: &IdealSpec, rep: MultiPoly) -> Self {
        debug_assert!(drop_high(&rep, ideal) == rep);
        JetClass { ideal: ideal.clone(), rep }
    }

    pub(crate) fn truncating(ideal: &IdealSpec, p: &MultiPoly) -> Self {
        JetClass { ideal: ideal.clone(), rep: drop_high(p, ideal) }
    }

    pub fn zero(ideal: &IdealSpec) -> Self {
        JetClass { ideal: ideal.clone(), rep: MultiPoly::zero(ideal.vars()) }
    }

    pub fn one(ideal: &IdealSpec) -> Self {
        JetClass { ideal: ideal.clone(), rep: MultiPoly::one(ideal.vars()) }
    }

    pub fn constant(ideal: &IdealSpec, c: GaussianRational) -> Self {
        JetClass { ideal: ideal.clone(), rep: MultiPoly::constant(ideal.vars(), c) }
    }

    pub fn var(ideal: &IdealSpec, name: &str) -> Result<Self, JetError> {
        truncate(&MultiPoly::var(ideal.vars(), name)?, ideal)
    }

    pub fn ideal(&self) -> &IdealSpec {
        &self.ideal
    }

    pub fn rep(&self) -> &MultiPoly {
        &self.rep
    }

    pub fn into_rep(self) -> MultiPoly {
        self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }

    /// True when the class lies in `I_S`, i.e. vanishes on `S`.
    pub fn vanishes_on_s(&self) -> bool {
        let m = self.ideal.codim();
        self.rep.terms().all(|(mono, _)| mono.exponents()[..m].iter().any(|&e| e > 0))
    }

    /// Whether the class lies in `I_S^j`.
    pub fn in_ideal_power(&self, j: u32) -> bool {
        self.rep.terms().all(|(mono, _)| self.ideal.normal_degree(mono) >= j)
    }

    fn check(&self, other: &JetClass) -> Result<(), JetError> {
        if self.ideal == other.ideal {
            Ok(())
        } else {
            Err(JetError::IdealMismatch)
        }
    }

    pub fn try_add(&self, other: &JetClass) -> Result<JetClass, JetError> {
        self.check(other)?;
        Ok(JetClass { ideal: self.ideal.clone(), rep: &self.rep + &other.rep })
    }

    pub fn try_sub(&self, other: &JetClass) -> Result<JetClass, JetError> {
        self.check(other)?;
        Ok(JetClass { ideal: self.ideal.clone(), rep: &self.rep - &other.rep })
    }

    /// Truncated product; monomials beyond the order are never formed.
    pub fn try_mul(&self, other: &JetClass) -> Result<JetClass, JetError> {
        self.check(other)?;
        Ok(JetClass { ideal: self.ideal.clone(), rep: mul_truncated(&self.rep, &other.rep, &self.ideal) })
    }

    pub fn neg(&self) -> JetClass {
        JetClass { ideal: self.ideal.clone(), rep: -&self.rep }
    }

    pub fn scale(&self, c: &GaussianRational) -> JetClass {
        JetClass { ideal: self.ideal.clone(), rep: self.rep.scale(c) }
    }

    /// Class of `∂f/∂z` for a tangential `z`; well defined on classes since
    /// tangential derivatives preserve normal degree.
    pub fn tangential_derivative(&self, var: &str) -> Result<JetClass, JetError> {
        if !self.ideal.is_tangential(var) {
            return Err(JetError::NotTangentialVariable(var.to_string()));
        }
        Ok(JetClass { ideal: self.ideal.clone(), rep: self.rep.partial_derivative(var)? })
    }

    /// Image under `O_(S(k)) -> O_(S(j))` for `j ≤ k`.
    pub fn with_order(&self, j: u32) -> JetClass {
        let ideal = self.ideal.with_order(j);
        JetClass::truncating(&ideal, &self.rep)
    }

    /// Restriction to `S`: the order-0 class.
    pub fn restrict(&self) -> JetClass {
        self.with_order(0)
    }
}

pub(crate) fn mul_truncated(a: &MultiPoly, b: &MultiPoly, ideal: &IdealSpec) -> MultiPoly {
    let k = ideal.order();
    let m = ideal.codim();
    a.mul_filtered(b, |mono| mono.exponents()[..m].iter().sum::<u32>() <= k)
}

impl fmt::Display for JetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

impl fmt::Debug for JetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]_{}", self.rep, self.ideal.order() + 1)
    }
}

/// Quotient `num / den` of jets with `den` a unit (nonzero at the origin).
/// Needed because inverses of units such as `1 + y` are not polynomial.
#[derive(Clone)]
pub struct JetFraction {
    num: JetClass,
    den: JetClass,
}

impl JetFraction {
    pub fn new(num: JetClass, den: JetClass) -> Result<Self, JetError> {
        num.check(&den)?;
        if den.rep.constant_term().is_zero() {
            return Err(JetError::NotUnit);
        }
        Ok(JetFraction { num, den }.tidy())
    }

    pub fn from_class(num: JetClass) -> Self {
        let den = JetClass::one(&num.ideal);
        JetFraction { num, den }
    }

    pub fn zero(ideal: &IdealSpec) -> Self {
        Self::from_class(JetClass::zero(ideal))
    }

    pub fn one(ideal: &IdealSpec) -> Self {
        Self::from_class(JetClass::one(ideal))
    }

    pub fn from_rational(f: &RationalFunction, ideal: &IdealSpec) -> Result<Self, JetError> {
        Self::new(truncate(f.num(), ideal)?, truncate(f.den(), ideal)?)
    }

    /// Scales so the denominator's constant term is one, and drops a
    /// denominator that has become constant.
    fn tidy(self) -> Self {
        let c = self.den.rep.constant_term();
        let inv = c.inv().expect("unit denominator");
        let (num, den) = if num::One::is_one(&inv) {
            (self.num, self.den)
        } else {
            (self.num.scale(&inv), self.den.scale(&inv))
        };
        if num.is_zero() {
            return JetFraction::zero(&num.ideal);
        }
        JetFraction { num, den }
    }

    pub fn ideal(&self) -> &IdealSpec {
        &self.num.ideal
    }

    pub fn num(&self) -> &JetClass {
        &self.num
    }

    pub fn den(&self) -> &JetClass {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_class(&self) -> bool {
        self.den.rep.is_constant()
    }

    pub fn try_add(&self, other: &JetFraction) -> Result<JetFraction, JetError> {
        if self.den == other.den {
            return Ok(JetFraction { num: self.num.try_add(&other.num)?, den: self.den.clone() }.tidy());
        }
        let n = self.num.try_mul(&other.den)?.try_add(&other.num.try_mul(&self.den)?)?;
        let d = self.den.try_mul(&other.den)?;
        Ok(JetFraction { num: n, den: d }.tidy())
    }

    pub fn try_sub(&self, other: &JetFraction) -> Result<JetFraction, JetError> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &JetFraction) -> Result<JetFraction, JetError> {
        Ok(JetFraction { num: self.num.try_mul(&other.num)?, den: self.den.try_mul(&other.den)? }.tidy())
    }

    pub fn neg(&self) -> JetFraction {
        JetFraction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn restrict(&self) -> JetFraction {
        JetFraction { num: self.num.restrict(), den: self.den.restrict() }.tidy()
    }

    pub fn with_order(&self, j: u32) -> JetFraction {
        JetFraction { num: self.num.with_order(j), den: self.den.with_order(j) }.tidy()
    }

    /// Numerator and denominator as a rational function (reduced where the
    /// cheap normalization allows).
    pub fn to_rational(&self) -> RationalFunction {
        RationalFunction::new(self.num.rep.clone(), self.den.rep.clone()).expect("unit denominator")
    }
}

/// Equality in the local ring: `a/b = c/d` iff `[ad - cb] = 0`, valid because
/// both denominators are units.
impl PartialEq for JetFraction {
    fn eq(&self, other: &Self) -> bool {
        if self.num.ideal != other.num.ideal {
            return false;
        }
        if self.den == other.den {
            return self.num == other.num;
        }
        let lhs = self.num.try_mul(&other.den).expect("same ideal");
        let rhs = other.num.try_mul(&self.den).expect("same ideal");
        lhs == rhs
    }
}

impl Eq for JetFraction {}

impl fmt::Display for JetFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_rational())
    }
}

impl fmt::Debug for JetFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]_{}", self.to_rational(), self.ideal().order() + 1)
    }
}
