use std::fmt;

use num::Zero;

use super::{AlgebraError, GaussianRational, MultiPoly};

/// Truncated Laurent series `Σ c_e var^e` for `min_exponent ≤ e ≤ order`.
///
/// The coefficient at `min_exponent` is nonzero unless the series vanishes up
/// to `order`, in which case `min_exponent == order` and the only stored
/// coefficient is zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentSeries {
    var: String,
    min_exponent: i64,
    order: i64,
    coeffs: Vec<GaussianRational>,
}

impl LaurentSeries {
    pub fn zero(var: &str, order: i64) -> Self {
        LaurentSeries {
            var: var.to_string(),
            min_exponent: order,
            order,
            coeffs: vec![GaussianRational::zero()],
        }
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn min_exponent(&self) -> i64 {
        self.min_exponent
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn coefficients(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Coefficient of `var^e`; zero outside the stored window.
    pub fn coeff(&self, e: i64) -> GaussianRational {
        if e < self.min_exponent || e > self.order {
            return GaussianRational::zero();
        }
        self.coeffs[(e - self.min_exponent) as usize].clone()
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let e = self.min_exponent + k as i64;
            match e {
                0 => write!(f, "({})", c)?,
                1 => write!(f, "({})*{}", c, self.var)?,
                _ => write!(f, "({})*{}^({})", c, self.var, e)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O({}^{})", self.var, self.order + 1)
    }
}

fn valuation(c: &[GaussianRational]) -> Option<usize> {
    c.iter().position(|a| !a.is_zero())
}

/// Expands `num / den` in powers of `var` up to and including `order`.
///
/// Both polynomials must involve only `var`. The denominator is written as
/// `var^d · u` with `u(0) ≠ 0` and `1/u` is produced by the usual power-series
/// recurrence.
pub fn laurent_expand(num: &MultiPoly, den: &MultiPoly, var: &str, order: i64) -> Result<LaurentSeries, AlgebraError> {
    let dc = den.univariate_coeffs(var)?;
    let nc = num.univariate_coeffs(var)?;
    let d = valuation(&dc).ok_or(AlgebraError::ZeroDenominator)?;
    let v = match valuation(&nc) {
        Some(v) => v,
        None => return Ok(LaurentSeries::zero(var, order)),
    };
    let min_exponent = v as i64 - d as i64;
    if min_exponent > order {
        return Ok(LaurentSeries::zero(var, order));
    }
    let len = (order - min_exponent + 1) as usize;
    let u = &dc[d..];
    let n = &nc[v..];
    let u0_inv = u[0].inv().expect("nonzero by choice of valuation");
    // inv[j] = -(Σ_{i=1..j} u[i] inv[j-i]) / u[0]
    let mut inv: Vec<GaussianRational> = Vec::with_capacity(len);
    inv.push(u0_inv.clone());
    for j in 1..len {
        let mut acc = GaussianRational::zero();
        for i in 1..=j.min(u.len() - 1) {
            acc += &(&u[i] * &inv[j - i]);
        }
        inv.push(-(&acc * &u0_inv));
    }
    let mut coeffs = Vec::with_capacity(len);
    for j in 0..len {
        let mut acc = GaussianRational::zero();
        for i in 0..=j.min(n.len() - 1) {
            acc += &(&n[i] * &inv[j - i]);
        }
        coeffs.push(acc);
    }
    Ok(LaurentSeries { var: var.to_string(), min_exponent, order, coeffs })
}

/// Coefficient of `var^-1`.
pub fn residue_coefficient(s: &LaurentSeries) -> Result<GaussianRational, AlgebraError> {
    if s.order < -1 {
        return Err(AlgebraError::InsufficientOrder(s.order));
    }
    Ok(s.coeff(-1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{vars, Vars};

    fn yv() -> Vars {
        vars(["y"])
    }

    fn poly(c: &[i64]) -> MultiPoly {
        let coeffs: Vec<GaussianRational> = c.iter().map(|&a| a.into()).collect();
        MultiPoly::from_univariate(&yv(), "y", &coeffs).unwrap()
    }

    /// Long division of power series, independent of the recurrence above:
    /// repeatedly cancel the lowest remaining term of the numerator.
    fn long_division(num: &[i64], den: &[i64], terms: usize) -> Vec<GaussianRational> {
        let d = den.iter().position(|&a| a != 0).unwrap();
        let u: Vec<GaussianRational> = den[d..].iter().map(|&a| a.into()).collect();
        let mut rem: Vec<GaussianRational> = num.iter().map(|&a| a.into()).collect();
        rem.resize(terms + u.len(), GaussianRational::zero());
        let mut out = Vec::new();
        for j in 0..terms {
            let q = rem[j].checked_div(&u[0]).unwrap();
            for (i, ui) in u.iter().enumerate() {
                rem[j + i] -= &(&q * ui);
            }
            out.push(q);
        }
        out
    }

    #[test]
    fn monomial_inverse() {
        let s = laurent_expand(&poly(&[1]), &poly(&[0, 1]), "y", 2).unwrap();
        assert_eq!(s.min_exponent(), -1);
        assert_eq!(s.coeff(-1), 1.into());
        assert!(s.coeff(0).is_zero() && s.coeff(1).is_zero() && s.coeff(2).is_zero());
    }

    #[test]
    fn term_by_term() {
        let s = laurent_expand(&poly(&[1, 1]), &poly(&[0, 0, 1]), "y", 1).unwrap();
        assert_eq!(s.coeff(-2), 1.into());
        assert_eq!(s.coeff(-1), 1.into());
        assert!(s.coeff(0).is_zero());
    }

    #[test]
    fn geometric_inversion_matches_long_division() {
        let s = laurent_expand(&poly(&[2]), &poly(&[0, 1, 1]), "y", 4).unwrap();
        let expected = long_division(&[2], &[0, 1, 1], 6);
        assert_eq!(s.min_exponent(), -1);
        for (k, c) in expected.iter().enumerate() {
            assert_eq!(&s.coeff(k as i64 - 1), c);
        }
        assert_eq!(residue_coefficient(&s).unwrap(), 2.into());
        assert_eq!(s.coeff(0), (-2).into());
    }

    #[test]
    fn residues() {
        let s = laurent_expand(&poly(&[1, 1]), &poly(&[0, 1]), "y", 0).unwrap();
        assert_eq!(residue_coefficient(&s).unwrap(), 1.into());
        let t = laurent_expand(&poly(&[1, 0, 0, 5]), &poly(&[0, 0, 1]), "y", 2).unwrap();
        assert!(residue_coefficient(&t).unwrap().is_zero());
        let low = laurent_expand(&poly(&[1]), &poly(&[0, 0, 1]), "y", -2).unwrap();
        assert!(matches!(residue_coefficient(&low), Err(AlgebraError::InsufficientOrder(-2))));
    }

    #[test]
    fn zero_denominator() {
        assert!(matches!(
            laurent_expand(&poly(&[1]), &poly(&[]), "y", 0),
            Err(AlgebraError::ZeroDenominator)
        ));
    }
}
