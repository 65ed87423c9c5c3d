use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};

use super::{AlgebraError, GaussianRational, MultiPoly, Vars};

/// Quotient `num / den` of two polynomials over one variable list.
///
/// Normalization is partial: common monomial factors are cancelled, exact
/// polynomial quotients are detected, and the denominator is scaled so that
/// its constant term (or, failing that, its leading coefficient) is one.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: MultiPoly,
    den: MultiPoly,
}

impl RationalFunction {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        if !num.same_vars(&den) {
            return Err(AlgebraError::VariableMismatch {
                left: num.vars().to_vec(),
                right: den.vars().to_vec(),
            });
        }
        Ok(Self::normalized(num, den))
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let den = MultiPoly::one(p.vars());
        RationalFunction { num: p, den }
    }

    pub fn zero(vars: &Vars) -> Self {
        Self::from_poly(MultiPoly::zero(vars))
    }

    pub fn one(vars: &Vars) -> Self {
        Self::from_poly(MultiPoly::one(vars))
    }

    fn normalized(num: MultiPoly, den: MultiPoly) -> Self {
        let vars = num.vars().clone();
        if num.is_zero() {
            return Self::zero(&vars);
        }
        let g = num.monomial_content().gcd(&den.monomial_content());
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_monomial(&g), den.div_monomial(&g))
        };
        if let Some((n, d)) = cancel_univariate(&num, &den) {
            num = n;
            den = d;
        }
        if !den.is_constant() {
            if let Some(q) = num.exact_div(&den) {
                num = q;
                den = MultiPoly::one(&vars);
            } else if !num.is_constant() {
                if let Some(q) = den.exact_div(&num) {
                    num = MultiPoly::one(&vars);
                    den = q;
                }
            }
        }
        let lead = {
            let c0 = den.constant_term();
            if c0.is_zero() {
                den.leading_term().map(|(_, c)| c.clone()).unwrap_or_else(GaussianRational::one)
            } else {
                c0
            }
        };
        if !lead.is_one() {
            let inv = lead.inv().expect("nonzero denominator coefficient");
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RationalFunction { num, den }
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn vars(&self) -> &Vars {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The polynomial value, if the denominator has cancelled.
    pub fn to_poly(&self) -> Result<MultiPoly, AlgebraError> {
        if self.den.is_constant() {
            let inv = self.den.constant_term().inv().ok_or(AlgebraError::ZeroDenominator)?;
            Ok(self.num.scale(&inv))
        } else {
            Err(AlgebraError::NotPolynomial(self.to_string()))
        }
    }

    /// Whether the denominator is a unit at the origin.
    pub fn has_unit_denominator(&self) -> bool {
        !self.den.constant_term().is_zero()
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.den == other.den {
            return Self::new(self.num.try_add(&other.num)?, self.den.clone());
        }
        let n = self.num.try_mul(&other.den)?.try_add(&other.num.try_mul(&self.den)?)?;
        Self::new(n, self.den.try_mul(&other.den)?)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        Self::new(self.num.try_mul(&other.num)?, self.den.try_mul(&other.den)?)
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, AlgebraError> {
        if other.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Self::new(self.num.try_mul(&other.den)?, self.den.try_mul(&other.num)?)
    }

    pub fn neg(&self) -> Self {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self::normalized(self.num.scale(c), self.den.clone())
    }

    pub fn pow(&self, e: u32) -> Self {
        Self::normalized(self.num.pow(e), self.den.pow(e))
    }

    /// Quotient rule: `(n' d - n d') / d²`.
    pub fn partial_derivative(&self, var: &str) -> Result<Self, AlgebraError> {
        let dn = self.num.partial_derivative(var)?;
        if self.den.is_constant() {
            return Ok(Self::normalized(dn, self.den.clone()));
        }
        let dd = self.den.partial_derivative(var)?;
        let n = &(&dn * &self.den) - &(&self.num * &dd);
        Ok(Self::normalized(n, &self.den * &self.den))
    }

    /// Numerator of the quotient-rule derivative, before dividing by `den²`.
    pub fn derivative_numerator(&self, var: &str) -> Result<MultiPoly, AlgebraError> {
        let dn = self.num.partial_derivative(var)?;
        let dd = self.den.partial_derivative(var)?;
        Ok(&(&dn * &self.den) - &(&self.num * &dd))
    }

    /// Composition: every variable of this function is replaced by its image
    /// (all images over one shared list). Missing variables must be bound.
    pub fn compose(&self, images: &BTreeMap<String, RationalFunction>, target: &Vars) -> Result<Self, AlgebraError> {
        let n = compose_poly(&self.num, images, target)?;
        let d = compose_poly(&self.den, images, target)?;
        n.try_div(&d)
    }

    /// Sets the listed variables to constants, keeping the variable list.
    pub fn bind_all(&self, bindings: &[(String, GaussianRational)]) -> Result<Self, AlgebraError> {
        let mut n = self.num.clone();
        let mut d = self.den.clone();
        for (v, c) in bindings {
            n = n.bind(v, c)?;
            d = d.bind(v, c)?;
        }
        Self::new(n, d)
    }

    pub fn reembed(&self, target: &Vars) -> Result<Self, AlgebraError> {
        Ok(RationalFunction { num: self.num.reembed(target)?, den: self.den.reembed(target)? })
    }
}

/// The one variable both polynomials live in, if there is exactly one.
fn common_variable(a: &MultiPoly, b: &MultiPoly) -> Option<usize> {
    let mut found = None;
    for p in [a, b] {
        for (m, _) in p.terms() {
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    match found {
                        None => found = Some(i),
                        Some(j) if j != i => return None,
                        _ => {}
                    }
                }
            }
        }
    }
    found
}

fn dense(p: &MultiPoly, var: usize) -> Vec<GaussianRational> {
    let mut c = vec![GaussianRational::zero(); p.degree_in(var) as usize + 1];
    for (m, a) in p.terms() {
        c[m.exponents()[var] as usize] = a.clone();
    }
    c
}

fn trim(c: &mut Vec<GaussianRational>) {
    while c.len() > 1 && c.last().is_some_and(|a| a.is_zero()) {
        c.pop();
    }
    if c.is_empty() {
        c.push(GaussianRational::zero());
    }
}

/// Remainder of `a` by `b` (both dense, `b` with nonzero leading coefficient).
fn rem(mut a: Vec<GaussianRational>, b: &[GaussianRational]) -> Vec<GaussianRational> {
    let lead_inv = b.last().and_then(|l| l.inv()).expect("nonzero leading coefficient");
    while a.len() >= b.len() && !(a.len() == 1 && a[0].is_zero()) {
        let shift = a.len() - b.len();
        let f = a.last().unwrap() * &lead_inv;
        for (i, bc) in b.iter().enumerate() {
            a[shift + i] = &a[shift + i] - &(&f * bc);
        }
        a.pop();
        trim(&mut a);
    }
    a
}

/// Quotient of `a` by `b` when the division is exact.
fn quo(a: &[GaussianRational], b: &[GaussianRational]) -> Vec<GaussianRational> {
    let mut a = a.to_vec();
    let lead_inv = b.last().and_then(|l| l.inv()).expect("nonzero leading coefficient");
    let mut q = vec![GaussianRational::zero(); a.len() + 1 - b.len()];
    while a.len() >= b.len() {
        let shift = a.len() - b.len();
        let f = a.last().unwrap() * &lead_inv;
        for (i, bc) in b.iter().enumerate() {
            a[shift + i] = &a[shift + i] - &(&f * bc);
        }
        q[shift] = f;
        a.pop();
    }
    q
}

/// Cancels the Euclidean gcd of two polynomials in the same single variable.
fn cancel_univariate(num: &MultiPoly, den: &MultiPoly) -> Option<(MultiPoly, MultiPoly)> {
    let var = common_variable(num, den)?;
    if num.degree_in(var) == 0 || den.degree_in(var) == 0 {
        return None;
    }
    let (n, d) = (dense(num, var), dense(den, var));
    let (mut a, mut b) = (n.clone(), d.clone());
    while !(b.len() == 1 && b[0].is_zero()) {
        let r = rem(a, &b);
        a = b;
        b = r;
    }
    if a.len() < 2 {
        return None;
    }
    let vars = num.vars();
    let name = &vars[var];
    let back = |c: &[GaussianRational]| MultiPoly::from_univariate(vars, name, c).expect("variable of the list");
    Some((back(&quo(&n, &a)), back(&quo(&d, &a))))
}

/// Evaluates a polynomial at rational-function arguments by clearing
/// denominators once per variable: with `f_i = a_i / b_i` and `D_i` the degree
/// in variable `i`, the value is `Σ c Π a_i^e b_i^(D_i - e)` over `Π b_i^D_i`.
pub(crate) fn compose_poly(
    p: &MultiPoly,
    images: &BTreeMap<String, RationalFunction>,
    target: &Vars,
) -> Result<RationalFunction, AlgebraError> {
    let n = p.nvars();
    let mut parts: Vec<Option<(&MultiPoly, &MultiPoly)>> = Vec::with_capacity(n);
    let mut degs = Vec::with_capacity(n);
    for (i, name) in p.vars().iter().enumerate() {
        let d = p.degree_in(i);
        degs.push(d);
        match images.get(name) {
            Some(f) => {
                if !(f.vars() == target) {
                    return Err(AlgebraError::VariableMismatch {
                        left: target.to_vec(),
                        right: f.vars().to_vec(),
                    });
                }
                parts.push(Some((&f.num, &f.den)));
            }
            None if d == 0 => parts.push(None),
            None => return Err(AlgebraError::UnknownVariable(name.clone())),
        }
    }
    let mut num_pows: Vec<Vec<MultiPoly>> = Vec::with_capacity(n);
    let mut den_pows: Vec<Vec<MultiPoly>> = Vec::with_capacity(n);
    for (i, part) in parts.iter().enumerate() {
        let mut np = vec![MultiPoly::one(target)];
        let mut dp = vec![MultiPoly::one(target)];
        if let Some((a, b)) = part {
            for _ in 0..degs[i] {
                let next_n = np.last().unwrap() * *a;
                np.push(next_n);
                let next_d = if b.is_constant() && b.constant_term().is_one() {
                    MultiPoly::one(target)
                } else {
                    dp.last().unwrap() * *b
                };
                dp.push(next_d);
            }
        }
        num_pows.push(np);
        den_pows.push(dp);
    }
    let mut total = MultiPoly::zero(target);
    for (m, c) in p.terms() {
        let mut t = MultiPoly::constant(target, c.clone());
        for (i, &e) in m.exponents().iter().enumerate() {
            if parts[i].is_none() {
                continue;
            }
            let d = degs[i];
            if e > 0 {
                t = &t * &num_pows[i][e as usize];
            }
            if d > e {
                t = &t * &den_pows[i][(d - e) as usize];
            }
        }
        total = &total + &t;
    }
    let mut den = MultiPoly::one(target);
    for (i, part) in parts.iter().enumerate() {
        if part.is_some() && degs[i] > 0 {
            den = &den * &den_pows[i][degs[i] as usize];
        }
    }
    RationalFunction::new(total, den)
}

/// Least common multiple of the coefficient denominators.
fn denominator_lcm(p: &MultiPoly) -> num::BigInt {
    use num::Integer;
    let mut l = num::BigInt::one();
    for (_, c) in p.terms() {
        for part in [&c.re, &c.im] {
            l = l.lcm(part.denom());
        }
    }
    l
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() && self.den.constant_term().is_one() {
            return write!(f, "{}", self.num);
        }
        // print with integer denominator coefficients where possible
        let l = GaussianRational::from_rational(super::Rational::from_integer(denominator_lcm(&self.den)));
        let (num, den) = (self.num.scale(&l), self.den.scale(&l));
        if num.len() > 1 || num.terms().any(|(_, c)| !c.is_real()) {
            write!(f, "({})/", num)?;
        } else {
            write!(f, "{}/", num)?;
        }
        let bare = den.len() == 1
            && den.terms().all(|(m, c)| c.is_one() && m.exponents().iter().filter(|&&e| e > 0).count() == 1);
        if bare {
            write!(f, "{}", den)
        } else {
            write!(f, "({})", den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({})", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::vars;

    fn v() -> Vars {
        vars(["x", "y"])
    }

    fn p(name: &str) -> MultiPoly {
        MultiPoly::var(&v(), name).unwrap()
    }

    #[test]
    fn cancels_common_factors() {
        let x = p("x");
        let y = p("y");
        let one = MultiPoly::one(&v());
        let f = RationalFunction::new(&x * &(&one + &y), &(&x * &y) * &(&one + &y)).unwrap();
        assert_eq!(f.num(), &MultiPoly::one(&v()));
        assert_eq!(f.den(), &y);
    }

    #[test]
    fn quotient_rule() {
        let x = p("x");
        let y = p("y");
        let one = MultiPoly::one(&v());
        let f = RationalFunction::new(x.clone(), &one + &y).unwrap();
        let d = f.partial_derivative("y").unwrap();
        let expected = RationalFunction::new(-&x, (&one + &y).pow(2)).unwrap();
        assert_eq!(d, expected);
    }

    #[test]
    fn composition_with_inverse_is_identity() {
        // x' = x/(1+y), y' = y  composed with  x = x'(1+y')
        let x = p("x");
        let y = p("y");
        let one = MultiPoly::one(&v());
        let fwd = RationalFunction::new(x.clone(), &one + &y).unwrap();
        let back = RationalFunction::from_poly(&x * &(&one + &y));
        let mut images = BTreeMap::new();
        images.insert("x".to_string(), back);
        images.insert("y".to_string(), RationalFunction::from_poly(y.clone()));
        let id = fwd.compose(&images, &v()).unwrap();
        assert_eq!(id, RationalFunction::from_poly(x));
    }

    #[test]
    fn cancels_univariate_gcd() {
        let y = p("y");
        let one = MultiPoly::one(&v());
        let a = &(&y - &one) * &(&y + &one);
        let f = RationalFunction::new(a, (&y + &one).pow(2)).unwrap();
        assert_eq!(f, RationalFunction::new(&y - &one, &y + &one).unwrap());
        assert_eq!(f.to_string(), "(y - 1)/(y + 1)");
    }

    #[test]
    fn display() {
        let x = p("x");
        let y = p("y");
        let one = MultiPoly::one(&v());
        let f = RationalFunction::new(x.clone(), &one + &y).unwrap();
        assert_eq!(f.to_string(), "x/(y + 1)");
        let half = RationalFunction::new(MultiPoly::one(&v()), &(&one + &one) + &y).unwrap();
        assert_eq!(half.to_string(), "1/(y + 2)");
    }
}
