#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use jetfol::algebra::{GaussianRational, Monomial, MultiPoly, Vars};
use jetfol::atlas::TransitionAtlas;
use jetfol::cech::{entry_from_poly, CechCochain, CochainKind, Frames};
use jetfol::document::{from_json, AtlasDocument, FieldDocument};
use jetfol::jet::{classify_field, IdealSpec, JetFraction, VectorFieldJet};
use jetfol::parse::parse_number;
use jetfol::residue::{FieldMode, SurfaceFieldInput};
use num::Zero;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("data")
}

pub fn read(rel: &str) -> String {
    fs::read_to_string(data_dir().join(rel)).unwrap_or_else(|e| panic!("{}: {}", rel, e))
}

pub fn field_doc(name: &str) -> FieldDocument {
    from_json(&read(&format!("fields/{}.json", name))).unwrap()
}

pub fn atlas(name: &str) -> TransitionAtlas {
    let doc: AtlasDocument = from_json(&read(&format!("atlases/{}.json", name))).unwrap();
    doc.build().unwrap_or_else(|e| panic!("{}: {}", name, e))
}

pub fn atlas_names() -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(data_dir().join("atlases"))
        .unwrap()
        .map(|e| e.unwrap().path().file_stem().unwrap().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[derive(Deserialize)]
pub struct ResidueCase {
    pub name: String,
    pub residue: String,
}

impl ResidueCase {
    pub fn input(&self) -> SurfaceFieldInput {
        field_doc(&self.name).surface_input().unwrap()
    }

    pub fn expected(&self) -> GaussianRational {
        parse_number(&self.residue).unwrap()
    }
}

pub fn residue_corpus() -> Vec<ResidueCase> {
    serde_json::from_str(&read("residues.json")).unwrap()
}

/// Small nonzero-ish rational in [-4, 4] with denominator up to 3.
pub fn coeff(rng: &mut ChaCha8Rng) -> GaussianRational {
    GaussianRational::from_ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

/// Random polynomial with up to `terms` terms of total degree ≤ `deg`.
pub fn poly(rng: &mut ChaCha8Rng, vars: &Vars, deg: u32, terms: usize) -> MultiPoly {
    let n = vars.len();
    let items = (0..rng.gen_range(0..=terms)).map(|_| {
        let mut left = rng.gen_range(0..=deg);
        let mut e = vec![0u32; n];
        for slot in e.iter_mut() {
            let k = rng.gen_range(0..=left);
            *slot = k;
            left -= k;
        }
        (Monomial::from_exponents(&e), coeff(rng))
    });
    let items: Vec<_> = items.collect();
    MultiPoly::from_terms(vars, items)
}

/// Random element of `I_S`: `Σ_r x_r · p_r`.
pub fn in_ideal(rng: &mut ChaCha8Rng, ideal: &IdealSpec, deg: u32, terms: usize) -> MultiPoly {
    let vars = ideal.vars();
    let mut acc = MultiPoly::zero(vars);
    for r in ideal.normal() {
        let x = MultiPoly::var(vars, r).unwrap();
        acc = &acc + &(&x * &poly(rng, vars, deg, terms));
    }
    acc
}

/// Random logarithmic field: normal components in `I_S`.
pub fn log_field(rng: &mut ChaCha8Rng, ideal: &IdealSpec, deg: u32, terms: usize) -> VectorFieldJet {
    classify_field(&log_reps(rng, ideal, deg, terms), ideal).unwrap()
}

pub fn log_reps(rng: &mut ChaCha8Rng, ideal: &IdealSpec, deg: u32, terms: usize) -> Vec<MultiPoly> {
    (0..ideal.nvars())
        .map(|h| {
            if h < ideal.codim() {
                in_ideal(rng, ideal, deg, terms)
            } else {
                poly(rng, ideal.vars(), deg, terms)
            }
        })
        .collect()
}

/// Random element of `I_S^(k+1)`.
pub fn deep(rng: &mut ChaCha8Rng, ideal: &IdealSpec, deg: u32, terms: usize) -> MultiPoly {
    let vars = ideal.vars();
    let mut acc = MultiPoly::zero(vars);
    for r in ideal.normal() {
        let x = MultiPoly::var(vars, r).unwrap();
        acc = &acc + &(&x.pow(ideal.order() + 1) * &poly(rng, vars, deg, terms));
    }
    acc
}

/// Random `B` with `B(0, y)` not identically zero, and `A` in the given mode.
pub fn surface_input(rng: &mut ChaCha8Rng, mode: FieldMode) -> SurfaceFieldInput {
    let vars = jetfol::residue::surface_vars();
    let x = MultiPoly::var(&vars, "x").unwrap();
    let a = match mode {
        FieldMode::Tangential => &x * &poly(rng, &vars, 3, 4),
        FieldMode::Transversal => poly(rng, &vars, 4, 6),
    };
    loop {
        let b = poly(rng, &vars, 4, 5);
        if !b.vanish_at(&[0]).is_zero() {
            return SurfaceFieldInput::new(a, b, mode).unwrap();
        }
    }
}

/// Raw bracket of representatives, no truncation.
pub fn raw_bracket(u: &[MultiPoly], v: &[MultiPoly]) -> Vec<MultiPoly> {
    (0..u.len())
        .map(|h| {
            let mut acc = MultiPoly::zero(u[0].vars());
            for j in 0..u.len() {
                acc = &acc + &(&u[j] * &v[h].derivative_at(j));
                acc = &acc - &(&v[j] * &u[h].derivative_at(j));
            }
            acc
        })
        .collect()
}

pub fn raw_apply(v: &[MultiPoly], f: &MultiPoly) -> MultiPoly {
    let mut acc = MultiPoly::zero(f.vars());
    for (j, c) in v.iter().enumerate() {
        acc = &acc + &(c * &f.derivative_at(j));
    }
    acc
}

/// Proptest strategy: polynomial over `vars` from a list of (exponents, numerator, denominator).
pub fn poly_strategy(vars: Vars, deg: u32, terms: usize) -> impl Strategy<Value = MultiPoly> {
    let n = vars.len();
    prop::collection::vec((prop::collection::vec(0..=deg, n), -5i64..=5, 1i64..=4), 0..=terms).prop_map(move |ts| {
        let items: Vec<_> = ts
            .into_iter()
            .filter(|(e, _, _)| e.iter().sum::<u32>() <= deg)
            .map(|(e, a, b)| (Monomial::from_exponents(&e), GaussianRational::from_ratio(a, b)))
            .collect();
        MultiPoly::from_terms(&vars, items)
    })
}

/// Coefficients of `p(0, y)` by power of `y`.
pub fn on_s_coeffs(p: &MultiPoly) -> Vec<GaussianRational> {
    let mut c = Vec::new();
    for (m, a) in p.terms() {
        let e = m.exponents();
        if e[0] != 0 {
            continue;
        }
        let k = e[1] as usize;
        if c.len() <= k {
            c.resize(k + 1, GaussianRational::zero());
        }
        c[k] = &c[k] + a;
    }
    c
}

/// Coefficient of `y^-1` in `num / den` for dense univariate coefficient lists.
/// Long division of power series after stripping the lowest power of `y` from `den`.
pub fn dense_residue(num: &[GaussianRational], den: &[GaussianRational]) -> GaussianRational {
    let m = den.iter().position(|c| !c.is_zero()).expect("den is not zero");
    if m == 0 {
        return GaussianRational::zero();
    }
    let d = &den[m..];
    let inv = d[0].inv().unwrap();
    let mut q: Vec<GaussianRational> = Vec::with_capacity(m);
    for k in 0..m {
        let mut acc = num.get(k).cloned().unwrap_or_else(GaussianRational::zero);
        for (j, qj) in q.iter().enumerate() {
            if let Some(dk) = d.get(k - j) {
                acc = &acc - &(qj * dk);
            }
        }
        q.push(&acc * &inv);
    }
    q[m - 1].clone()
}

/// Independent residue of `((A_x + B_y)/B)|_(x=0)`.
pub fn expected_residue(a: &MultiPoly, b: &MultiPoly) -> GaussianRational {
    let num = &a.partial_derivative("x").unwrap() + &b.partial_derivative("y").unwrap();
    dense_residue(&on_s_coeffs(&num), &on_s_coeffs(b))
}

/// Field whose poles off the origin stay outside `|y| = 2`, for the numeric oracle.
pub fn oracle_friendly_input(rng: &mut ChaCha8Rng) -> SurfaceFieldInput {
    let vars = jetfol::residue::surface_vars();
    let x = MultiPoly::var(&vars, "x").unwrap();
    let y = MultiPoly::var(&vars, "y").unwrap();
    let a = &x * &poly(rng, &vars, 3, 4);
    let small = |rng: &mut ChaCha8Rng| GaussianRational::from_ratio(rng.gen_range(-1..=1), rng.gen_range(5..=9));
    let unit = MultiPoly::from_terms(
        &vars,
        vec![
            (Monomial::from_exponents(&[0, 0]), GaussianRational::from_ratio(rng.gen_range(1..=3), 1)),
            (Monomial::from_exponents(&[0, 1]), small(rng)),
            (Monomial::from_exponents(&[0, 2]), small(rng)),
            (Monomial::from_exponents(&[1, 1]), coeff(rng)),
        ],
    );
    let b = &y.pow(rng.gen_range(1..=4)) * &unit;
    SurfaceFieldInput::new(a, b, FieldMode::Tangential).unwrap()
}

/// Random degree-0 cochain of the given kind with small polynomial entries.
pub fn random_sigma(rng: &mut ChaCha8Rng, atlas: &TransitionAtlas, kind: CochainKind) -> CechCochain {
    let frames = Frames::of(atlas, kind);
    let vars = frames.ideal.vars().clone();
    let mut components = BTreeMap::new();
    for chart in atlas.charts() {
        let m: Vec<Vec<JetFraction>> = frames
            .rows
            .iter()
            .map(|_| {
                frames
                    .cols
                    .iter()
                    .map(|_| entry_from_poly(&poly(rng, &vars, 2, 3), &frames.ideal).unwrap())
                    .collect()
            })
            .collect();
        components.insert(vec![chart.clone()], m);
    }
    CechCochain::new(0, kind, atlas, components).unwrap()
}
