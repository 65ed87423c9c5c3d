use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::{One, Zero};
use num_complex::Complex64;
use smallvec::SmallVec;

use super::{AlgebraError, GaussianRational};

/// Shared, ordered list of variable names.
pub type Vars = Arc<[String]>;

pub fn vars<I, S>(names: I) -> Vars
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    names.into_iter().map(Into::into).collect::<Vec<_>>().into()
}

/// Exponent vector, one entry per variable of the owning polynomial.
///
/// Ordered graded-lexicographically: total degree first, then the exponent
/// of the first variable, then the second, and so on.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(SmallVec<[u32; 4]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn unit(nvars: usize, index: usize) -> Self {
        let mut m = Self::one(nvars);
        m.0[index] = 1;
        m
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Sum of the exponents at the given positions.
    pub fn partial_degree(&self, indices: &[usize]) -> u32 {
        indices.iter().map(|&i| self.0[i]).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(self.0.iter()).map(|(b, a)| b - a).collect())
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub(crate) fn exponent_mut(&mut self, i: usize) -> &mut u32 {
        &mut self.0[i]
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.as_slice().cmp(other.0.as_slice()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// The two-operand ring operations exposed by [`poly_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

pub fn poly_arith(op: ArithOp, a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
    }
}

/// Sparse multivariate polynomial with Gaussian-rational coefficients.
///
/// Zero coefficients are never stored, so two polynomials over the same
/// variable list are equal exactly when their term maps are.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Vars,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl MultiPoly {
    pub fn zero(vars: &Vars) -> Self {
        MultiPoly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, GaussianRational::one())
    }

    pub fn constant(vars: &Vars, c: GaussianRational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(vars.len()), c);
        }
        p
    }

    pub fn from_int(vars: &Vars, n: i64) -> Self {
        Self::constant(vars, GaussianRational::from_int(n))
    }

    pub fn var(vars: &Vars, name: &str) -> Result<Self, AlgebraError> {
        let i = index_of(vars, name)?;
        Ok(Self::var_at(vars, i))
    }

    pub fn var_at(vars: &Vars, index: usize) -> Self {
        let mut p = Self::zero(vars);
        p.terms.insert(Monomial::unit(vars.len(), index), GaussianRational::one());
        p
    }

    pub fn monomial(vars: &Vars, m: Monomial, c: GaussianRational) -> Self {
        debug_assert_eq!(m.exponents().len(), vars.len());
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms<I>(vars: &Vars, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, GaussianRational)>,
    {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            debug_assert_eq!(m.exponents().len(), vars.len());
            p.add_term(m, &c);
        }
        p
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn same_vars(&self, other: &MultiPoly) -> bool {
        Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn coeff(&self, m: &Monomial) -> GaussianRational {
        self.terms.get(m).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.coeff(&Monomial::one(self.nvars()))
    }

    /// Highest total degree, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn degree_in(&self, index: usize) -> u32 {
        self.terms.keys().map(|m| m.exponents()[index]).max().unwrap_or(0)
    }

    /// Leading term under graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &GaussianRational)> {
        self.terms.iter().next_back()
    }

    pub fn has_real_coefficients(&self) -> bool {
        self.terms.values().all(GaussianRational::is_real)
    }

    fn add_term(&mut self, m: Monomial, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_vars(&self, other: &MultiPoly) -> Result<(), AlgebraError> {
        if self.same_vars(other) {
            Ok(())
        } else {
            Err(AlgebraError::VariableMismatch {
                left: self.vars.to_vec(),
                right: other.vars.to_vec(),
            })
        }
    }

    pub fn try_add(&self, other: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &-c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
        self.check_vars(other)?;
        Ok(self.mul_filtered(other, |_| true))
    }

    /// Product keeping only monomials accepted by `keep`. Used for truncated
    /// multiplication, where skipped products never need to be formed.
    pub fn mul_filtered<F>(&self, other: &MultiPoly, keep: F) -> MultiPoly
    where
        F: Fn(&Monomial) -> bool,
    {
        assert!(self.same_vars(other), "polynomials over different variable lists");
        let mut out = MultiPoly::zero(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                if keep(&m) {
                    out.add_term(m, &(ca * cb));
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &GaussianRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(&self.vars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Keeps the terms whose monomial satisfies `pred`.
    pub fn filter_terms<F>(&self, pred: F) -> MultiPoly
    where
        F: Fn(&Monomial) -> bool,
    {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| pred(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn partial_derivative(&self, var: &str) -> Result<MultiPoly, AlgebraError> {
        let i = index_of(&self.vars, var)?;
        Ok(self.derivative_at(i))
    }

    pub fn derivative_at(&self, index: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.exponents()[index];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            *dm.exponent_mut(index) -= 1;
            out.add_term(dm, &c.scale(&super::rational(e as i64, 1)));
        }
        out
    }

    /// Polynomial composition. Every bound variable must belong to this
    /// polynomial's list and all images must share one variable list, which
    /// becomes the list of the result. Unbound variables are carried over by
    /// name and must exist in that list.
    pub fn substitute(&self, bindings: &BTreeMap<String, MultiPoly>) -> Result<MultiPoly, AlgebraError> {
        for name in bindings.keys() {
            index_of(&self.vars, name)?;
        }
        let target: Vars = match bindings.values().next() {
            Some(p) => p.vars.clone(),
            None => return Ok(self.clone()),
        };
        for p in bindings.values() {
            if !(Arc::ptr_eq(&p.vars, &target) || p.vars == target) {
                return Err(AlgebraError::VariableMismatch {
                    left: target.to_vec(),
                    right: p.vars.to_vec(),
                });
            }
        }
        let mut images = Vec::with_capacity(self.nvars());
        for (i, name) in self.vars.iter().enumerate() {
            let image = match bindings.get(name) {
                Some(p) => p.clone(),
                None if self.degree_in(i) == 0 => MultiPoly::zero(&target),
                None => match target.iter().position(|v| v == name) {
                    Some(j) => MultiPoly::var_at(&target, j),
                    None => {
                        return Err(AlgebraError::VariableMismatch {
                            left: self.vars.to_vec(),
                            right: target.to_vec(),
                        })
                    }
                },
            };
            images.push(image);
        }
        Ok(self.compose(&images, &target))
    }

    /// Composition with one image per variable (positional).
    pub fn compose(&self, images: &[MultiPoly], target: &Vars) -> MultiPoly {
        debug_assert_eq!(images.len(), self.nvars());
        let mut powers: Vec<Vec<MultiPoly>> = images.iter().map(|p| vec![MultiPoly::one(&p.vars)]).collect();
        let mut out = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut term = MultiPoly::constant(target, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &images[i];
                    powers[i].push(next);
                }
                term = &term * &powers[i][e as usize];
            }
            out = &out + &term;
        }
        out
    }

    /// Substitutes a constant for one variable, keeping the variable list.
    pub fn bind(&self, var: &str, value: &GaussianRational) -> Result<MultiPoly, AlgebraError> {
        let i = index_of(&self.vars, var)?;
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.exponents()[i];
            let mut m2 = m.clone();
            *m2.exponent_mut(i) = 0;
            out.add_term(m2, &(c * &value.pow(e)));
        }
        Ok(out)
    }

    /// Sets every variable at `indices` to zero.
    pub fn vanish_at(&self, indices: &[usize]) -> MultiPoly {
        self.filter_terms(|m| m.partial_degree(indices) == 0)
    }

    /// Rewrites the polynomial over another variable list, matching by name.
    pub fn reembed(&self, target: &Vars) -> Result<MultiPoly, AlgebraError> {
        let mut map = Vec::with_capacity(self.nvars());
        for (i, name) in self.vars.iter().enumerate() {
            let j = target.iter().position(|v| v == name);
            if j.is_none() && self.degree_in(i) > 0 {
                return Err(AlgebraError::UnknownVariable(name.clone()));
            }
            map.push(j);
        }
        let mut out = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut nm = Monomial::one(target.len());
            for (i, &e) in m.exponents().iter().enumerate() {
                if let Some(j) = map[i] {
                    *nm.exponent_mut(j) += e;
                }
            }
            out.add_term(nm, c);
        }
        Ok(out)
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        debug_assert_eq!(point.len(), self.nvars());
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_complex64();
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    t *= x.powu(e);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval(&self, point: &[GaussianRational]) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    t = &t * &x.pow(e);
                }
            }
            acc += &t;
        }
        acc
    }

    /// Coefficients `[c0, c1, ..]` of a polynomial that only involves `var`.
    pub fn univariate_coeffs(&self, var: &str) -> Result<Vec<GaussianRational>, AlgebraError> {
        let i = index_of(&self.vars, var)?;
        let mut out: Vec<GaussianRational> = Vec::new();
        for (m, c) in &self.terms {
            if m.exponents().iter().enumerate().any(|(j, &e)| j != i && e > 0) {
                return Err(AlgebraError::NotUnivariate(var.to_string()));
            }
            let e = m.exponents()[i] as usize;
            if out.len() <= e {
                out.resize(e + 1, GaussianRational::zero());
            }
            out[e] = c.clone();
        }
        Ok(out)
    }

    /// Builds `sum c_k var^k` over the given list.
    pub fn from_univariate(vars: &Vars, var: &str, coeffs: &[GaussianRational]) -> Result<MultiPoly, AlgebraError> {
        let i = index_of(vars, var)?;
        let mut p = MultiPoly::zero(vars);
        for (k, c) in coeffs.iter().enumerate() {
            let mut m = Monomial::one(vars.len());
            *m.exponent_mut(i) = k as u32;
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Greatest monomial dividing every term (one for the zero polynomial).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::one(self.nvars()),
            Some(first) => it.fold(first.clone(), |acc, m| acc.gcd(m)),
        }
    }

    pub fn div_monomial(&self, d: &Monomial) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (d.quotient_of(m), c.clone())).collect(),
        }
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder. For a single divisor the graded-lex division algorithm has a
    /// zero remainder exactly when the divisor divides.
    pub fn exact_div(&self, divisor: &MultiPoly) -> Option<MultiPoly> {
        assert!(self.same_vars(divisor));
        let (lm, lc) = divisor.leading_term()?;
        let lc_inv = lc.inv()?;
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero(&self.vars);
        while let Some((m, c)) = rem.leading_term() {
            if !lm.divides(m) {
                return None;
            }
            let qm = lm.quotient_of(m);
            let qc = c * &lc_inv;
            let t = MultiPoly::monomial(&self.vars, qm, qc);
            rem = &rem - &(&t * divisor);
            quot = &quot + &t;
        }
        Some(quot)
    }
}

pub(crate) fn index_of(vars: &Vars, name: &str) -> Result<usize, AlgebraError> {
    vars.iter()
        .position(|v| v == name)
        .ok_or_else(|| AlgebraError::UnknownVariable(name.to_string()))
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.try_add(rhs).expect("polynomials over different variable lists")
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.try_sub(rhs).expect("polynomials over different variable lists")
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.try_mul(rhs).expect("polynomials over different variable lists")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

fn write_coeff_prefix(f: &mut fmt::Formatter<'_>, c: &GaussianRational, is_unit_monomial: bool) -> fmt::Result {
    if c.is_real() {
        if is_unit_monomial {
            write!(f, "{}", c)
        } else if c.is_one() {
            Ok(())
        } else {
            write!(f, "{}*", c)
        }
    } else if c.re.is_zero() {
        // pure imaginary: prints as "3*i", "i"
        if is_unit_monomial {
            write!(f, "{}", c)
        } else {
            write!(f, "{}*", c)
        }
    } else if is_unit_monomial {
        write!(f, "({})", c)
    } else {
        write!(f, "({})*", c)
    }
}

/// Prints in descending graded-lex order, e.g. `x^2*y - 3/2*x + 1`. The output
/// re-parses under the expression grammar to an equal polynomial.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = if c.is_real() {
                c.re < num::zero()
            } else {
                c.re.is_zero() && c.im < num::zero()
            };
            let c = if negative { -c } else { c.clone() };
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            write_coeff_prefix(f, &c, m.is_one())?;
            let mut first = true;
            for (name, &e) in self.vars.iter().zip(m.exponents()) {
                if e == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                if e == 1 {
                    write!(f, "{}", name)?;
                } else {
                    write!(f, "{}^{}", name, e)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{}]({})", self.vars.join(","), self)
    }
}
