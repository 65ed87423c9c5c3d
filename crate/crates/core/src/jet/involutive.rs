use std::collections::BTreeMap;

use num::Zero;

use crate::algebra::{rank, solve, GaussianRational, Monomial, MultiPoly, Vars};

use super::{jet_bracket, restrict_to_S, IdealSpec, JetClass, JetError, VectorFieldJet};

/// `[g_a, g_b] = Σ_j coefficients[j] · g_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipWitness {
    pub pair: (usize, usize),
    pub coefficients: Vec<JetClass>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvolutivityResult {
    Involutive(Vec<MembershipWitness>),
    /// The bracket of this pair is not in the span even after restricting to
    /// `S` and working modulo a power of the maximal ideal at the origin.
    NotInvolutive { pair: (usize, usize), bracket: VectorFieldJet },
    /// Pairs for which no witness was found within the degree bound but
    /// non-membership could not be certified.
    Inconclusive { pairs: Vec<(usize, usize)> },
}

/// Monomials over `vars` of total degree ≤ `bound` accepted by `keep`.
fn monomials_up_to(nvars: usize, bound: u32, keep: &dyn Fn(&Monomial) -> bool) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; nvars];
    fn rec(i: usize, left: u32, exps: &mut Vec<u32>, out: &mut Vec<Monomial>, keep: &dyn Fn(&Monomial) -> bool) {
        if i == exps.len() {
            let m = Monomial::from_exponents(exps);
            if keep(&m) {
                out.push(m);
            }
            return;
        }
        for e in 0..=left {
            exps[i] = e;
            rec(i + 1, left - e, exps, out, keep);
        }
        exps[i] = 0;
    }
    if nvars == 0 {
        out.push(Monomial::one(0));
        return out;
    }
    rec(0, bound, &mut exps, &mut out, keep);
    out
}

/// Solves `Σ_j c_j · gens_j = target` componentwise with each `c_j` a
/// combination of `basis` monomials, after applying `reduce` to every product.
fn span_solve(
    vars: &Vars,
    gens: &[Vec<MultiPoly>],
    target: &[MultiPoly],
    basis: &[Monomial],
    reduce: &dyn Fn(&MultiPoly) -> MultiPoly,
) -> Option<Vec<MultiPoly>> {
    let ncols = gens.len() * basis.len();
    let mut rows: BTreeMap<(usize, Monomial), Vec<GaussianRational>> = BTreeMap::new();
    for (j, g) in gens.iter().enumerate() {
        for (b, m) in basis.iter().enumerate() {
            let col = j * basis.len() + b;
            let mono = MultiPoly::monomial(vars, m.clone(), GaussianRational::from_int(1));
            for (h, gh) in g.iter().enumerate() {
                let prod = reduce(&(&mono * gh));
                for (pm, c) in prod.terms() {
                    let row = rows
                        .entry((h, pm.clone()))
                        .or_insert_with(|| vec![GaussianRational::zero(); ncols]);
                    row[col] = c.clone();
                }
            }
        }
    }
    for (h, t) in target.iter().enumerate() {
        for (pm, _) in reduce(t).terms() {
            rows.entry((h, pm.clone())).or_insert_with(|| vec![GaussianRational::zero(); ncols]);
        }
    }
    let mut a = Vec::with_capacity(rows.len());
    let mut rhs = Vec::with_capacity(rows.len());
    for ((h, m), row) in rows {
        rhs.push(reduce(&target[h]).coeff(&m));
        a.push(row);
    }
    let x = solve(&a, &rhs, ncols)?;
    Some(
        (0..gens.len())
            .map(|j| {
                MultiPoly::from_terms(
                    vars,
                    basis.iter().enumerate().map(|(b, m)| (m.clone(), x[j * basis.len() + b].clone())),
                )
            })
            .collect(),
    )
}

fn reps(v: &VectorFieldJet) -> Vec<MultiPoly> {
    v.components().iter().map(|c| c.rep().clone()).collect()
}

/// Degree-bounded involutivity test for the span of `gens`.
pub fn involutivity_check(gens: &[VectorFieldJet], degree_bound: u32) -> Result<InvolutivityResult, JetError> {
    let first = gens.first().ok_or(JetError::EmptyGenerators)?;
    let ideal: IdealSpec = first.ideal().clone();
    for g in gens {
        if g.ideal() != &ideal {
            return Err(JetError::IdealMismatch);
        }
        if !g.status().is_logarithmic() {
            return Err(JetError::NotLogarithmic);
        }
    }
    let k = ideal.order();
    let basis = monomials_up_to(ideal.nvars(), degree_bound, &|m| ideal.normal_degree(m) <= k);
    let gen_reps: Vec<Vec<MultiPoly>> = gens.iter().map(reps).collect();
    let truncate = |p: &MultiPoly| p.filter_terms(|m| ideal.normal_degree(m) <= k);

    let on_s: Vec<VectorFieldJet> = gens.iter().map(restrict_to_S).collect::<Result<_, _>>()?;
    let s_ideal = ideal.on_s();
    let s_basis = monomials_up_to(s_ideal.nvars(), degree_bound, &|_| true);
    let s_reps: Vec<Vec<MultiPoly>> = on_s.iter().map(reps).collect();
    let jet_at_origin = |p: &MultiPoly| p.filter_terms(|m| m.degree() <= degree_bound);

    let mut witnesses = Vec::new();
    let mut open = Vec::new();
    for a in 0..gens.len() {
        for b in a + 1..gens.len() {
            let br = jet_bracket(&gens[a], &gens[b])?;
            if let Some(coeffs) = span_solve(ideal.vars(), &gen_reps, &reps(&br), &basis, &truncate) {
                witnesses.push(MembershipWitness {
                    pair: (a, b),
                    coefficients: coeffs.iter().map(|c| JetClass::truncating(&ideal, c)).collect(),
                });
                continue;
            }
            let br_s = reps(&restrict_to_S(&br)?);
            if span_solve(s_ideal.vars(), &s_reps, &br_s, &s_basis, &jet_at_origin).is_none() {
                return Ok(InvolutivityResult::NotInvolutive { pair: (a, b), bracket: br });
            }
            open.push((a, b));
        }
    }
    if open.is_empty() {
        Ok(InvolutivityResult::Involutive(witnesses))
    } else {
        Ok(InvolutivityResult::Inconclusive { pairs: open })
    }
}

/// Rank of the generators restricted to `S`, evaluated at a point of `S`
/// given in tangential coordinates.
pub fn rank_at(gens: &[VectorFieldJet], point: &[GaussianRational]) -> Result<usize, JetError> {
    let rows = gens
        .iter()
        .map(|g| {
            let r = restrict_to_S(g)?;
            Ok(r.components().iter().map(|c| c.rep().eval(point)).collect())
        })
        .collect::<Result<Vec<Vec<GaussianRational>>, JetError>>()?;
    Ok(rank(&rows))
}
