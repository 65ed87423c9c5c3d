//! Two-chart model of a line bundle of degree `d` over the projective line:
//! `y' = 1/y`, `x' = x / y^d`.

use std::collections::BTreeMap;

use num::Zero;

use crate::algebra::{GaussianRational, Monomial, MultiPoly};

use super::{kls_residue, surface_vars, FieldMode, ResidueError, SurfaceFieldInput};

/// The field in the second chart, in the same variable names `x`, `y`.
///
/// `A' = v(x') = A y^-d - d x y^(-d-1) B` and `B' = v(y') = -B / y²`,
/// rewritten with `x = x' y'^-d`, `y = 1/y'`.
pub fn two_chart_transform(input: &SurfaceFieldInput, d: u32) -> Result<SurfaceFieldInput, ResidueError> {
    let d = d as i64;
    let mut a_terms: BTreeMap<(u32, i64), GaussianRational> = BTreeMap::new();
    let mut b_terms: BTreeMap<(u32, i64), GaussianRational> = BTreeMap::new();
    let push = |map: &mut BTreeMap<(u32, i64), GaussianRational>, key, c: GaussianRational| {
        let e = map.entry(key).or_insert_with(GaussianRational::zero);
        *e = &*e + &c;
    };
    for (m, c) in input.a().terms() {
        let (a, b) = (m.exponents()[0], m.exponents()[1] as i64);
        push(&mut a_terms, (a, d - a as i64 * d - b), c.clone());
    }
    for (m, c) in input.b().terms() {
        let (a, b) = (m.exponents()[0], m.exponents()[1] as i64);
        let dc = c.scale(&crate::algebra::Rational::from_integer(d.into()));
        push(&mut a_terms, (a + 1, -(a as i64) * d - b + 1), -dc);
        push(&mut b_terms, (a, -(a as i64) * d - b + 2), -c.clone());
    }
    let vs = surface_vars();
    let build = |terms: BTreeMap<(u32, i64), GaussianRational>| -> Result<MultiPoly, ResidueError> {
        let mut out = Vec::new();
        for ((a, b), c) in terms {
            if c.is_zero() {
                continue;
            }
            if b < 0 {
                return Err(ResidueError::PoleInSecondChart(format!("{} * x^{} * y^{}", c, a, b)));
            }
            out.push((Monomial::from_exponents(&[a, b as u32]), c));
        }
        Ok(MultiPoly::from_terms(&vs, out))
    };
    SurfaceFieldInput::new(build(a_terms)?, build(b_terms)?, FieldMode::Tangential)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartResidues {
    pub degree: u32,
    pub first: GaussianRational,
    pub second: GaussianRational,
}

impl ChartResidues {
    pub fn total(&self) -> GaussianRational {
        &self.first + &self.second
    }
}

/// Residues at `y = 0` in both charts.
pub fn chart_residues(input: &SurfaceFieldInput, d: u32) -> Result<ChartResidues, ResidueError> {
    let other = two_chart_transform(input, d)?;
    Ok(ChartResidues { degree: d, first: kls_residue(input)?, second: kls_residue(&other)? })
}
