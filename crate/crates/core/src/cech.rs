//! Čech cochains with jet-valued matrix components: the Atiyah obstruction,
//! the normal-bundle extension obstruction, coboundaries and the extension
//! generators built from a splitting cochain.
//!
//! Frame convention: a degree-1 component for the pair `(a, b)` is expressed
//! in the frames and coordinates of `a`. Only one orientation per pair is
//! stored; the other is obtained by transport and negation.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{AlgebraError, MultiPoly, RationalFunction, Vars};
use crate::atlas::{AtlasError, PairGeometry, TransitionAtlas};
use crate::exec::Exec;
use crate::jet::{truncate, IdealSpec, JetClass, JetError, JetFraction, VectorFieldJet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CechError {
    #[error(transparent)]
    Atlas(#[from] AtlasError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("cochain has no component for the pair ({0}, {1})")]
    MissingPair(String, String),
    #[error("cochain has no component for chart `{0}`")]
    MissingChart(String),
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),
    #[error("entry ({row}, {col}) on chart `{chart}` is not in I_S: {entry}")]
    NotNormalized { chart: String, row: String, col: String, entry: String },
    #[error("entry ({row}, {col}) on chart `{chart}` is not polynomial: {entry}")]
    NotPolynomial { chart: String, row: String, col: String, entry: String },
    #[error("malformed cochain: {0}")]
    Shape(String),
}

impl CechError {
    pub fn code(&self) -> &'static str {
        match self {
            CechError::Atlas(e) => e.code(),
            CechError::Jet(e) => e.code(),
            CechError::Algebra(e) => e.code(),
            CechError::MissingPair(..) => "MissingPair",
            CechError::MissingChart(_) => "MissingChart",
            CechError::FrameMismatch(_) => "FrameMismatch",
            CechError::NotNormalized { .. } => "NotNormalized",
            CechError::NotPolynomial { .. } => "NotPolynomial",
            CechError::Shape(_) => "MalformedCochain",
        }
    }
}

/// Which Hom-bundle the components live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CochainKind {
    /// `F ⊗ N_S -> N_(F,M)`: rows are normal and transverse directions,
    /// columns are (foliation, normal) pairs; entries are classes on `S`.
    Atiyah,
    /// `F -> ` fiber-linear vertical fields on `N_S`: rows are normal
    /// directions, columns foliation directions; entries are functions of the
    /// fiber coordinates `v_*` and the tangential coordinates, modulo `v²`.
    NormalExtension,
}

impl CochainKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CochainKind::Atiyah => "atiyah",
            CochainKind::NormalExtension => "normal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "atiyah" => Some(CochainKind::Atiyah),
            "normal" => Some(CochainKind::NormalExtension),
            _ => None,
        }
    }
}

pub type Matrix = Vec<Vec<JetFraction>>;

/// Row names, column names and entry ideal of a cochain kind over an atlas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frames {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub ideal: IdealSpec,
}

impl Frames {
    pub fn of(atlas: &TransitionAtlas, kind: CochainKind) -> Frames {
        let roles = atlas.roles();
        match kind {
            CochainKind::Atiyah => Frames {
                rows: roles.non_foliation(),
                cols: roles
                    .foliation()
                    .iter()
                    .flat_map(|j| roles.normal().iter().map(move |s| format!("({},{})", j, s)))
                    .collect(),
                ideal: atlas.ideal(0),
            },
            CochainKind::NormalExtension => Frames {
                rows: roles.normal().to_vec(),
                cols: roles.foliation().to_vec(),
                ideal: IdealSpec::new(&roles.fiber_names(), roles.tangential(), 1)
                    .expect("fiber names are fresh"),
            },
        }
    }

    pub fn zero_matrix(&self) -> Matrix {
        vec![vec![JetFraction::zero(&self.ideal); self.cols.len()]; self.rows.len()]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CechCochain {
    degree: usize,
    kind: CochainKind,
    frames: Frames,
    components: BTreeMap<Vec<String>, Matrix>,
}

impl CechCochain {
    /// Keys are one chart name (degree 0) or two (degree 1).
    pub fn new(
        degree: usize,
        kind: CochainKind,
        atlas: &TransitionAtlas,
        components: BTreeMap<Vec<String>, Matrix>,
    ) -> Result<Self, CechError> {
        if degree > 1 {
            return Err(CechError::Shape(format!("degree {} is not supported", degree)));
        }
        let frames = Frames::of(atlas, kind);
        for (key, m) in &components {
            if key.len() != degree + 1 {
                return Err(CechError::Shape(format!("key {:?} does not match degree {}", key, degree)));
            }
            for c in key {
                if !atlas.has_chart(c) {
                    return Err(AtlasError::UnknownChart(c.clone()).into());
                }
            }
            if degree == 1 && !atlas.overlaps().contains(&sorted(&key[0], &key[1])) {
                return Err(CechError::Shape(format!("charts {} and {} do not overlap", key[0], key[1])));
            }
            if m.len() != frames.rows.len() || m.iter().any(|r| r.len() != frames.cols.len()) {
                return Err(CechError::Shape(format!(
                    "component {:?} must be {}x{}",
                    key,
                    frames.rows.len(),
                    frames.cols.len()
                )));
            }
            if m.iter().flatten().any(|e| e.ideal() != &frames.ideal) {
                return Err(CechError::FrameMismatch(format!("entries of {:?} are over the wrong ideal", key)));
            }
        }
        Ok(CechCochain { degree, kind, frames, components })
    }

    pub fn zero(degree: usize, kind: CochainKind, atlas: &TransitionAtlas) -> Self {
        let frames = Frames::of(atlas, kind);
        let keys: Vec<Vec<String>> = if degree == 0 {
            atlas.charts().iter().map(|c| vec![c.clone()]).collect()
        } else {
            atlas.overlaps().iter().map(|(a, b)| vec![a.clone(), b.clone()]).collect()
        };
        let components = keys.into_iter().map(|k| (k, frames.zero_matrix())).collect();
        CechCochain { degree, kind, frames, components }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> CochainKind {
        self.kind
    }

    pub fn frames(&self) -> &Frames {
        &self.frames
    }

    pub fn order(&self) -> u32 {
        self.frames.ideal.order()
    }

    pub fn components(&self) -> &BTreeMap<Vec<String>, Matrix> {
        &self.components
    }

    pub fn component(&self, key: &[String]) -> Option<&Matrix> {
        self.components.get(key)
    }

    pub fn set_component(&mut self, key: Vec<String>, m: Matrix) {
        self.components.insert(key, m);
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().flatten().flatten().all(JetFraction::is_zero)
    }

    /// Component of the ordered pair `(a, b)` in `a`-frames, reversing a
    /// stored `(b, a)` component if needed.
    pub fn pair(&self, atlas: &TransitionAtlas, a: &str, b: &str) -> Result<Matrix, CechError> {
        if let Some(m) = self.components.get(&[a.to_string(), b.to_string()][..]) {
            return Ok(m.clone());
        }
        if let Some(m) = self.components.get(&[b.to_string(), a.to_string()][..]) {
            let g = atlas.geometry(a, b)?;
            let t = transport(&g, self.kind, &self.frames, atlas, m)?;
            return Ok(neg(&t));
        }
        Err(CechError::MissingPair(a.to_string(), b.to_string()))
    }

    fn chart(&self, a: &str) -> Result<&Matrix, CechError> {
        self.components.get(&[a.to_string()][..]).ok_or_else(|| CechError::MissingChart(a.to_string()))
    }

    fn same_frames(&self, other: &CechCochain) -> Result<(), CechError> {
        if self.kind != other.kind || self.frames != other.frames {
            return Err(CechError::FrameMismatch(format!(
                "{} cochain at order {} vs {} cochain at order {}",
                self.kind.as_str(),
                self.order(),
                other.kind.as_str(),
                other.order()
            )));
        }
        Ok(())
    }
}

fn sorted(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

fn neg(m: &Matrix) -> Matrix {
    m.iter().map(|r| r.iter().map(JetFraction::neg).collect()).collect()
}

fn sub(a: &Matrix, b: &Matrix) -> Result<Matrix, CechError> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.try_sub(y).map_err(CechError::from)).collect())
        .collect()
}

fn add(a: &Matrix, b: &Matrix) -> Result<Matrix, CechError> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.try_add(y).map_err(CechError::from)).collect())
        .collect()
}

fn entry(f: &RationalFunction, ideal: &IdealSpec) -> Result<JetFraction, CechError> {
    let f = f.reembed(ideal.vars())?;
    Ok(JetFraction::from_rational(&f, ideal)?)
}

struct Indexer<'a>(&'a Vars);

impl Indexer<'_> {
    fn at(&self, name: &str) -> usize {
        self.0.iter().position(|v| v == name).expect("template variable")
    }
}

/// Transports a matrix given in `b`-frames (the `to` chart of `g`) into the
/// frames of `a`.
#[allow(clippy::needless_range_loop)]
fn transport(
    g: &PairGeometry,
    kind: CochainKind,
    frames: &Frames,
    atlas: &TransitionAtlas,
    m: &Matrix,
) -> Result<Matrix, CechError> {
    let roles = atlas.roles();
    let tv = atlas.vars().clone();
    let ix = Indexer(&tv);
    let ev = frames.ideal.vars().clone();
    // coefficient substitution z_b -> z_a on S
    let mut images: BTreeMap<String, RationalFunction> = BTreeMap::new();
    for p in roles.tangential() {
        images.insert(p.clone(), g.images_on_s[p].reembed(&ev)?);
    }
    match kind {
        CochainKind::Atiyah => {
            for r in roles.normal() {
                images.insert(r.clone(), RationalFunction::zero(&ev));
            }
        }
        CochainKind::NormalExtension => {
            for (r, vr) in roles.normal().iter().zip(roles.fiber_names()) {
                let mut acc = RationalFunction::zero(&ev);
                for (s, vs) in roles.normal().iter().zip(roles.fiber_names()) {
                    let q = g.forward[ix.at(r)][ix.at(s)].reembed(&ev)?;
                    let v = RationalFunction::from_poly(MultiPoly::var(&ev, &vs)?);
                    acc = acc.try_add(&q.try_mul(&v)?)?;
                }
                images.insert(vr, acc);
            }
        }
    }
    let composed: Vec<Vec<RationalFunction>> = m
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    if e.is_zero() {
                        Ok(RationalFunction::zero(&ev))
                    } else {
                        e.to_rational().compose(&images, &ev)
                    }
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let row_index: Vec<usize> = frames.rows.iter().map(|r| ix.at(r)).collect();
    let p = |t_out: usize, t_in: usize| g.backward[row_index[t_out]][row_index[t_in]].reembed(&ev);
    let fol = roles.foliation();
    let f = |j: usize, i: usize| g.forward[ix.at(&fol[j])][ix.at(&fol[i])].reembed(&ev);
    // column action: matrix C with out[.][c'] = Σ_c in[.][c] · C[c][c']
    let ncols = frames.cols.len();
    let mut col_map: Vec<Vec<RationalFunction>> = vec![vec![RationalFunction::zero(&ev); ncols]; ncols];
    match kind {
        CochainKind::Atiyah => {
            let normal = roles.normal();
            let m_n = normal.len();
            for j in 0..fol.len() {
                for s in 0..m_n {
                    for i2 in 0..fol.len() {
                        for s2 in 0..m_n {
                            let q = g.forward[ix.at(&normal[s])][ix.at(&normal[s2])].reembed(&ev)?;
                            col_map[j * m_n + s][i2 * m_n + s2] = f(j, i2)?.try_mul(&q)?;
                        }
                    }
                }
            }
        }
        CochainKind::NormalExtension => {
            for j in 0..fol.len() {
                for i2 in 0..fol.len() {
                    col_map[j][i2] = f(j, i2)?;
                }
            }
        }
    }
    let nrows = frames.rows.len();
    let mut out = Vec::with_capacity(nrows);
    for t_out in 0..nrows {
        let mut row = Vec::with_capacity(ncols);
        for c_out in 0..ncols {
            let mut acc = RationalFunction::zero(&ev);
            for t_in in 0..nrows {
                let pt = p(t_out, t_in)?;
                if pt.is_zero() {
                    continue;
                }
                for c_in in 0..ncols {
                    let e = &composed[t_in][c_in];
                    let cm = &col_map[c_in][c_out];
                    if e.is_zero() || cm.is_zero() {
                        continue;
                    }
                    acc = acc.try_add(&pt.try_mul(e)?.try_mul(cm)?)?;
                }
            }
            row.push(entry(&acc, &frames.ideal)?);
        }
        out.push(row);
    }
    Ok(out)
}

fn obstruction<F>(atlas: &TransitionAtlas, kind: CochainKind, exec: Exec, f: F) -> Result<CechCochain, CechError>
where
    F: Fn(&PairGeometry, &Frames) -> Result<Matrix, CechError> + Sync + Send,
{
    atlas.require_adapted()?;
    let frames = Frames::of(atlas, kind);
    let pairs = atlas.overlaps().to_vec();
    let mats = exec.try_map(&pairs, |(a, b)| {
        let g = atlas.geometry(a, b)?;
        f(&g, &frames).map(|m| (vec![a.clone(), b.clone()], m))
    })?;
    Ok(CechCochain { degree: 1, kind, frames, components: mats.into_iter().collect() })
}

/// Degree-1 cochain `[Σ_r ∂²z_a^t/∂z_b^r∂z_b^j · ∂z_b^r/∂z_a^s]_1`, with the
/// foliation index moved to `a`-frames.
pub fn atiyah_obstruction_with(atlas: &TransitionAtlas, exec: Exec) -> Result<CechCochain, CechError> {
    let roles = atlas.roles().clone();
    let tv = atlas.vars().clone();
    obstruction(atlas, CochainKind::Atiyah, exec, |g, frames| {
        let ix = Indexer(&tv);
        let back = atlas.transition(&g.to, &g.from)?;
        let normal = roles.normal();
        let fol = roles.foliation();
        let m_n = normal.len();
        let mut m = frames.zero_matrix();
        for (row, t) in frames.rows.iter().enumerate() {
            // h[r][j] = ∂²z_a^t / ∂z_b^r ∂z_b^j on S, in a-coordinates
            let mut h = Vec::with_capacity(m_n);
            for r in normal {
                let d_r = back[ix.at(t)].partial_derivative(r)?;
                let mut hr = Vec::with_capacity(fol.len());
                for j in fol {
                    hr.push(d_r.partial_derivative(j)?.compose(&g.images_on_s, &tv)?);
                }
                h.push(hr);
            }
            for i2 in 0..fol.len() {
                for s2 in 0..m_n {
                    let mut acc = RationalFunction::zero(&tv);
                    for (j, jn) in fol.iter().enumerate() {
                        let fj = &g.forward[ix.at(jn)][ix.at(&fol[i2])];
                        if fj.is_zero() {
                            continue;
                        }
                        for (r, rn) in normal.iter().enumerate() {
                            let q = &g.forward[ix.at(rn)][ix.at(&normal[s2])];
                            if h[r][j].is_zero() || q.is_zero() {
                                continue;
                            }
                            acc = acc.try_add(&fj.try_mul(&h[r][j])?.try_mul(q)?)?;
                        }
                    }
                    m[row][i2 * m_n + s2] = entry(&acc, &frames.ideal)?;
                }
            }
        }
        Ok(m)
    })
}

pub fn atiyah_obstruction(atlas: &TransitionAtlas) -> Result<CechCochain, CechError> {
    atiyah_obstruction_with(atlas, Exec::default())
}

/// Degree-1 cochain `-Σ_(r,s) P^r'_r · v^s · ∂Q^r_s/∂z_a^i`, where
/// `Q = ∂z_b^normal/∂z_a^normal` and `P = Q⁻¹` on `S`: the vertical
/// difference between the horizontal lifts of a foliation direction in the
/// two normal-bundle trivializations.
pub fn normal_extension_obstruction_with(atlas: &TransitionAtlas, exec: Exec) -> Result<CechCochain, CechError> {
    let roles = atlas.roles().clone();
    let tv = atlas.vars().clone();
    obstruction(atlas, CochainKind::NormalExtension, exec, |g, frames| {
        let ix = Indexer(&tv);
        let ev = frames.ideal.vars().clone();
        let normal = roles.normal();
        let fibers = roles.fiber_names();
        let mut m = frames.zero_matrix();
        for (row, r2) in normal.iter().enumerate() {
            for (col, i) in roles.foliation().iter().enumerate() {
                let mut acc = RationalFunction::zero(&ev);
                for r in normal {
                    let p = g.backward[ix.at(r2)][ix.at(r)].reembed(&ev)?;
                    if p.is_zero() {
                        continue;
                    }
                    for (s, vs) in normal.iter().zip(&fibers) {
                        let dq = g.forward[ix.at(r)][ix.at(s)].partial_derivative(i)?.reembed(&ev)?;
                        if dq.is_zero() {
                            continue;
                        }
                        let v = RationalFunction::from_poly(MultiPoly::var(&ev, vs)?);
                        acc = acc.try_sub(&p.try_mul(&dq)?.try_mul(&v)?)?;
                    }
                }
                let e = entry(&acc, &frames.ideal)?;
                debug_assert!(e.num().rep().terms().all(|(mono, _)| frames.ideal.normal_degree(mono) == 1));
                m[row][col] = e;
            }
        }
        Ok(m)
    })
}

pub fn normal_extension_obstruction(atlas: &TransitionAtlas) -> Result<CechCochain, CechError> {
    normal_extension_obstruction_with(atlas, Exec::default())
}

/// Outcome of the cocycle identity on each declared triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleReport {
    pub triples: Vec<([String; 3], bool)>,
}

impl CocycleReport {
    pub fn holds(&self) -> bool {
        self.triples.iter().all(|(_, ok)| *ok)
    }
}

/// For each declared triple, sorted as `a < b < c`, checks
/// `c_ab + transport_(b->a)(c_bc) - c_ac = 0` in `a`-frames.
pub fn verify_cocycle(c: &CechCochain, atlas: &TransitionAtlas) -> Result<CocycleReport, CechError> {
    if c.degree != 1 {
        return Err(CechError::Shape("cocycle check needs a degree-1 cochain".into()));
    }
    if c.frames != Frames::of(atlas, c.kind) {
        return Err(CechError::FrameMismatch("cochain frames do not match the atlas".into()));
    }
    let mut out = Vec::new();
    for t in atlas.triples() {
        let mut s = t.clone();
        s.sort();
        let [a, b, cc] = &s;
        let ab = c.pair(atlas, a, b)?;
        let bc = c.pair(atlas, b, cc)?;
        let ac = c.pair(atlas, a, cc)?;
        let g = atlas.geometry(a, b)?;
        let bc_a = transport(&g, c.kind, &c.frames, atlas, &bc)?;
        let total = sub(&add(&ab, &bc_a)?, &ac)?;
        out.push((t.clone(), total.iter().flatten().all(JetFraction::is_zero)));
    }
    Ok(CocycleReport { triples: out })
}

/// `(δσ)_ab = transport_(b->a)(σ_b) - σ_a` on every overlap.
pub fn coboundary(sigma: &CechCochain, atlas: &TransitionAtlas) -> Result<CechCochain, CechError> {
    if sigma.degree != 0 {
        return Err(CechError::Shape("coboundary needs a degree-0 cochain".into()));
    }
    let mut components = BTreeMap::new();
    for (a, b) in atlas.overlaps() {
        components.insert(vec![a.clone(), b.clone()], coboundary_pair(sigma, atlas, a, b)?);
    }
    Ok(CechCochain { degree: 1, kind: sigma.kind, frames: sigma.frames.clone(), components })
}

fn coboundary_pair(sigma: &CechCochain, atlas: &TransitionAtlas, a: &str, b: &str) -> Result<Matrix, CechError> {
    let g = atlas.geometry(a, b)?;
    let sb = transport(&g, sigma.kind, &sigma.frames, atlas, sigma.chart(b)?)?;
    sub(&sb, sigma.chart(a)?)
}

/// Whether `c` is the coboundary of `sigma` on every overlap of the atlas.
pub fn verify_splitting(c: &CechCochain, sigma: &CechCochain, atlas: &TransitionAtlas) -> Result<bool, CechError> {
    if c.degree != 1 || sigma.degree != 0 {
        return Err(CechError::FrameMismatch("expected a degree-1 cochain and a degree-0 cochain".into()));
    }
    c.same_frames(sigma)?;
    for (a, b) in atlas.overlaps() {
        let lhs = c.pair(atlas, a, b)?;
        let rhs = coboundary_pair(sigma, atlas, a, b)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For each chart and foliation index `j`, the field
/// `∂/∂z^j - Σ_s c^s_j ∂/∂v^s` on the normal bundle.
pub fn extension_generators(
    sigma: &CechCochain,
    atlas: &TransitionAtlas,
) -> Result<BTreeMap<String, Vec<VectorFieldJet>>, CechError> {
    if sigma.degree != 0 || sigma.kind != CochainKind::NormalExtension {
        return Err(CechError::FrameMismatch("expected a degree-0 normal-bundle cochain".into()));
    }
    let ideal = &sigma.frames.ideal;
    let m = ideal.codim();
    let mut out = BTreeMap::new();
    for chart in atlas.charts() {
        let mat = sigma.chart(chart)?;
        let mut gens = Vec::new();
        for (col, j) in sigma.frames.cols.iter().enumerate() {
            let mut comps = vec![JetClass::zero(ideal); ideal.nvars()];
            for (row, r) in sigma.frames.rows.iter().enumerate() {
                let e = &mat[row][col];
                let describe = || (chart.clone(), r.clone(), j.clone(), e.to_string());
                if !e.is_class() {
                    let (chart, row, col, entry) = describe();
                    return Err(CechError::NotPolynomial { chart, row, col, entry });
                }
                let class = e.num().scale(&e.den().rep().constant_term().inv().expect("unit"));
                if !class.vanishes_on_s() {
                    let (chart, row, col, entry) = describe();
                    return Err(CechError::NotNormalized { chart, row, col, entry });
                }
                comps[row] = class.neg();
            }
            let jdx = ideal.index_of(j).expect("foliation variable is tangential");
            comps[jdx] = JetClass::one(ideal);
            debug_assert!(jdx >= m);
            gens.push(VectorFieldJet::from_classes(ideal, comps));
        }
        out.insert(chart.clone(), gens);
    }
    Ok(out)
}

/// Jet class of a polynomial as a cochain entry.
pub fn entry_from_poly(p: &MultiPoly, ideal: &IdealSpec) -> Result<JetFraction, CechError> {
    Ok(JetFraction::from_class(truncate(p, ideal)?))
}

impl fmt::Display for CechCochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} cochain, degree {}, order {}", self.kind.as_str(), self.degree, self.order())?;
        writeln!(f, "rows: {}", self.frames.rows.join(" "))?;
        writeln!(f, "cols: {}", self.frames.cols.join(" "))?;
        for (key, m) in &self.components {
            writeln!(f, "[{}]", key.join(","))?;
            for row in m {
                let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
                writeln!(f, "  {}", cells.join(" | "))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::Roles;
    use crate::parse::{parse_polynomial, parse_rational};

    type Maps<'a> = (&'a str, &'a str, [&'a str; 2]);

    fn atlas(charts: &[&str], order: u32, maps: &[Maps], triples: &[[&str; 3]]) -> TransitionAtlas {
        let roles = Roles::new(&["x"], &["y"], &["y"]).unwrap();
        let vars = roles.ideal(0).vars().clone();
        let transitions = maps
            .iter()
            .map(|(a, b, e)| {
                let m = [("x", e[0]), ("y", e[1])]
                    .iter()
                    .map(|(k, v)| (k.to_string(), parse_rational(v, &vars).unwrap()))
                    .collect();
                (a.to_string(), b.to_string(), m)
            })
            .collect();
        TransitionAtlas::new(
            charts.iter().map(|c| c.to_string()).collect(),
            roles,
            order,
            transitions,
            vec![],
            triples.iter().map(|t| t.map(str::to_string)).collect(),
        )
        .unwrap()
    }

    fn twisted() -> TransitionAtlas {
        atlas(&["a", "b"], 2, &[("a", "b", ["x*(1+y)", "y"]), ("b", "a", ["x/(1+y)", "y"])], &[])
    }

    /// Three charts; inverses are only valid modulo I_S².
    fn triple() -> TransitionAtlas {
        let c_to_a = "x/((1+y^2/4)*(1+y/2))";
        atlas(
            &["a", "b", "c"],
            1,
            &[
                ("a", "b", ["x*(1+y)", "y + x"]),
                ("b", "a", ["x/(1+y)", "y - x/(1+y)"]),
                ("b", "c", ["x*(1+y^2)", "2*y"]),
                ("c", "b", ["x/(1+y^2/4)", "y/2"]),
                ("a", "c", ["x*(1+y)*(1+y^2)", "2*y + 2*x"]),
                ("c", "a", [c_to_a, &format!("y/2 - {}", c_to_a)]),
            ],
            &[["a", "b", "c"]],
        )
    }

    fn frac(text: &str, ideal: &IdealSpec) -> JetFraction {
        JetFraction::from_rational(&parse_rational(text, ideal.vars()).unwrap(), ideal).unwrap()
    }

    fn key(a: &str, b: &str) -> Vec<String> {
        vec![a.to_string(), b.to_string()]
    }

    #[test]
    fn product_atlas_has_no_obstruction() {
        let a = atlas(&["a", "b"], 2, &[("a", "b", ["2*x", "y"]), ("b", "a", ["x/2", "y"])], &[]);
        assert!(atiyah_obstruction(&a).unwrap().is_zero());
        assert!(normal_extension_obstruction(&a).unwrap().is_zero());
    }

    #[test]
    fn twist_obstructions() {
        let a = twisted();
        let c = atiyah_obstruction(&a).unwrap();
        let ideal = c.frames().ideal.clone();
        assert_eq!(c.frames().cols, vec!["(y,x)".to_string()]);
        assert_eq!(c.component(&key("a", "b")).unwrap()[0][0], frac("-1/(1+y)", &ideal));
        let n = normal_extension_obstruction(&a).unwrap();
        let ideal = n.frames().ideal.clone();
        assert_eq!(n.component(&key("a", "b")).unwrap()[0][0], frac("-v_x/(1+y)", &ideal));
        assert!(n.components().values().flatten().flatten().all(|e| e.restrict().is_zero()));
    }

    #[test]
    fn first_order_extension_kills_atiyah() {
        let a = atlas(&["a", "b"], 1, &[("a", "b", ["x*(1+x*y)", "y"]), ("b", "a", ["x - x^2*y", "y"])], &[]);
        assert!(a.check_extension_condition(1).unwrap().passed());
        assert!(atiyah_obstruction(&a).unwrap().is_zero());
    }

    #[test]
    fn reversed_orientation_is_negated_transport() {
        let a = twisted();
        let c = atiyah_obstruction(&a).unwrap();
        let ba = c.pair(&a, "b", "a").unwrap();
        let ideal = c.frames().ideal.clone();
        // -1/(1+y) in b-coordinates transported back: y_a = y_b on S
        assert_eq!(ba[0][0], frac("1/(1+y)", &ideal));
    }

    #[test]
    fn obstructions_are_cocycles() {
        let a = triple();
        for c in [atiyah_obstruction(&a).unwrap(), normal_extension_obstruction(&a).unwrap()] {
            assert!(!c.is_zero());
            assert!(verify_cocycle(&c, &a).unwrap().holds(), "{}", c);
            let mut bad = c.clone();
            let ab = key("a", "b");
            let mut m = bad.component(&ab).unwrap().clone();
            let one = match c.kind() {
                CochainKind::Atiyah => JetFraction::one(&c.frames().ideal),
                CochainKind::NormalExtension => frac("v_x", &c.frames().ideal),
            };
            m[0][0] = m[0][0].try_add(&one).unwrap();
            bad.set_component(ab, m);
            assert!(!verify_cocycle(&bad, &a).unwrap().holds());
        }
        assert!(verify_cocycle(&CechCochain::zero(1, CochainKind::Atiyah, &a), &a).unwrap().holds());
    }

    #[test]
    fn missing_pair_is_reported() {
        let a = triple();
        let mut c = atiyah_obstruction(&a).unwrap();
        c.components.remove(&key("b", "c"));
        assert!(matches!(verify_cocycle(&c, &a), Err(CechError::MissingPair(..))));
    }

    #[test]
    fn coboundaries_split() {
        let a = triple();
        for kind in [CochainKind::Atiyah, CochainKind::NormalExtension] {
            let frames = Frames::of(&a, kind);
            let texts = match kind {
                CochainKind::Atiyah => ["y^2 + 1", "3*y", "1/(1-y)"],
                CochainKind::NormalExtension => ["y*v_x", "v_x/(2+y)", "-v_x"],
            };
            let components = a
                .charts()
                .iter()
                .zip(texts)
                .map(|(c, t)| (vec![c.clone()], vec![vec![frac(t, &frames.ideal)]]))
                .collect();
            let sigma = CechCochain::new(0, kind, &a, components).unwrap();
            let d = coboundary(&sigma, &a).unwrap();
            assert!(verify_cocycle(&d, &a).unwrap().holds());
            assert!(verify_splitting(&d, &sigma, &a).unwrap());
            let mut off = sigma.clone();
            off.set_component(vec!["b".into()], vec![vec![frac(texts[0], &frames.ideal)]]);
            assert!(!verify_splitting(&d, &off, &a).unwrap());
        }
        let z1 = CechCochain::zero(1, CochainKind::Atiyah, &a);
        let z0 = CechCochain::zero(0, CochainKind::Atiyah, &a);
        assert!(verify_splitting(&z1, &z0, &a).unwrap());
        let n0 = CechCochain::zero(0, CochainKind::NormalExtension, &a);
        assert!(matches!(verify_splitting(&z1, &n0, &a), Err(CechError::FrameMismatch(_))));
    }

    #[test]
    fn generators_from_splitting() {
        let a = twisted();
        let frames = Frames::of(&a, CochainKind::NormalExtension);
        let make = |t: &str| {
            let components =
                a.charts().iter().map(|c| (vec![c.clone()], vec![vec![frac(t, &frames.ideal)]])).collect();
            CechCochain::new(0, CochainKind::NormalExtension, &a, components).unwrap()
        };
        let field = |c: [&str; 2]| {
            let ps: Vec<MultiPoly> = c.iter().map(|e| parse_polynomial(e, frames.ideal.vars()).unwrap()).collect();
            crate::jet::classify_field(&ps, &frames.ideal).unwrap()
        };
        let g = extension_generators(&make("0"), &a).unwrap();
        assert_eq!(g["a"], vec![field(["0", "1"])]);
        let g = extension_generators(&make("v_x"), &a).unwrap();
        assert_eq!(g["b"], vec![field(["-v_x", "1"])]);
        assert!(g["b"][0].status().is_logarithmic());
        assert_eq!(crate::jet::restrict_to_S(&g["b"][0]).unwrap().component("y").unwrap().rep().to_string(), "1");
        assert!(matches!(extension_generators(&make("1"), &a), Err(CechError::NotNormalized { .. })));
    }
}
