//! Charts, transition maps, and the atlas-level conditions: adaptedness,
//! extendability to the k-th infinitesimal neighborhood, k-splitting, and
//! the canonical splitting projection.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num::Zero;
use thiserror::Error;

use crate::algebra::{AlgebraError, GaussianRational, MultiPoly, RationalFunction, Vars};
use crate::exec::Exec;
use crate::jet::{truncate, IdealSpec, JetClass, JetError, VectorFieldJet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtlasError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("invalid variable roles: {0}")]
    Roles(String),
    #[error("unknown chart `{0}`")]
    UnknownChart(String),
    #[error("chart `{0}` declared twice")]
    DuplicateChart(String),
    #[error("transition {from}->{to}, component {component}: {reason}")]
    MalformedTransition { from: String, to: String, component: String, reason: String },
    #[error("missing transition {from}->{to}")]
    MissingTransition { from: String, to: String },
    #[error("transitions are inconsistent on {charts}: component {component} differs by {residual} modulo I^{power}")]
    Inconsistent { charts: String, component: String, residual: String, power: u32 },
    #[error("atlas is not adapted: transition {from}->{to}, component {component}: {detail}")]
    NotAdapted { from: String, to: String, component: String, detail: String },
    #[error("expected a field at order {expected}, found order {found}")]
    OrderMismatch { expected: u32, found: u32 },
}

impl AtlasError {
    pub fn code(&self) -> &'static str {
        match self {
            AtlasError::Algebra(e) => e.code(),
            AtlasError::Jet(e) => e.code(),
            AtlasError::Roles(_) => "InvalidRoles",
            AtlasError::UnknownChart(_) => "UnknownChart",
            AtlasError::DuplicateChart(_) => "DuplicateChart",
            AtlasError::MalformedTransition { .. } => "MalformedTransition",
            AtlasError::MissingTransition { .. } => "MissingTransition",
            AtlasError::Inconsistent { .. } => "Inconsistent",
            AtlasError::NotAdapted { .. } => "NotAdapted",
            AtlasError::OrderMismatch { .. } => "OrderMismatch",
        }
    }
}

/// Variable-role template shared by all charts. The chart variable list is
/// `normal ++ tangential`; the foliation directions are a subset of the
/// tangential ones and the rest of the tangential directions are transverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Roles {
    normal: Vec<String>,
    tangential: Vec<String>,
    foliation: Vec<String>,
}

impl Roles {
    pub fn new<S: AsRef<str>>(normal: &[S], tangential: &[S], foliation: &[S]) -> Result<Self, AtlasError> {
        let own = |v: &[S]| v.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>();
        let (normal, tangential, foliation) = (own(normal), own(tangential), own(foliation));
        let mut seen = BTreeSet::new();
        for v in normal.iter().chain(&tangential) {
            if v == "i" {
                return Err(AtlasError::Roles("`i` is reserved for the imaginary unit".into()));
            }
            if !seen.insert(v) {
                return Err(AtlasError::Roles(format!("`{}` appears twice", v)));
            }
        }
        for f in &foliation {
            if !tangential.contains(f) {
                return Err(AtlasError::Roles(format!("foliation variable `{}` is not tangential", f)));
            }
        }
        let mut foliation_sorted = Vec::new();
        for t in &tangential {
            if foliation.contains(t) {
                foliation_sorted.push(t.clone());
            }
        }
        Ok(Roles { normal, tangential, foliation: foliation_sorted })
    }

    pub fn normal(&self) -> &[String] {
        &self.normal
    }

    pub fn tangential(&self) -> &[String] {
        &self.tangential
    }

    pub fn foliation(&self) -> &[String] {
        &self.foliation
    }

    pub fn transverse(&self) -> Vec<String> {
        self.tangential.iter().filter(|t| !self.foliation.contains(t)).cloned().collect()
    }

    /// Normal and transverse directions, in chart order: the frame of the
    /// normal sheaf of the foliation.
    pub fn non_foliation(&self) -> Vec<String> {
        self.all().into_iter().filter(|t| !self.foliation.contains(t)).collect()
    }

    pub fn all(&self) -> Vec<String> {
        self.normal.iter().chain(&self.tangential).cloned().collect()
    }

    pub fn is_normal(&self, name: &str) -> bool {
        self.normal.iter().any(|n| n == name)
    }

    pub fn is_foliation(&self, name: &str) -> bool {
        self.foliation.iter().any(|n| n == name)
    }

    pub fn ideal(&self, order: u32) -> IdealSpec {
        IdealSpec::new(&self.normal, &self.tangential, order).expect("roles are disjoint")
    }

    /// Fiber coordinate names of the normal bundle: `v_` + normal name.
    pub fn fiber_names(&self) -> Vec<String> {
        self.normal.iter().map(|n| format!("v_{}", n)).collect()
    }
}

/// One offending component in a per-pair check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Target-chart variable whose expression fails.
    pub component: String,
    /// Source-chart variable of the offending derivative, if any.
    pub derivative: Option<String>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairResult {
    pub from: String,
    pub to: String,
    pub violations: Vec<Violation>,
}

impl PairResult {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtlasReport {
    pub check: String,
    pub pairs: Vec<PairResult>,
}

impl AtlasReport {
    pub fn passed(&self) -> bool {
        self.pairs.iter().all(PairResult::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PairResult> {
        self.pairs.iter().filter(|p| !p.passed())
    }
}

impl fmt::Display for AtlasReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.pairs {
            if p.passed() {
                writeln!(f, "{} {}->{}: pass", self.check, p.from, p.to)?;
            }
            for v in &p.violations {
                match &v.derivative {
                    Some(d) => writeln!(f, "{} {}->{}: FAIL d{}/d{}: {}", self.check, p.from, p.to, v.component, d, v.detail)?,
                    None => writeln!(f, "{} {}->{}: FAIL {}: {}", self.check, p.from, p.to, v.component, v.detail)?,
                }
            }
        }
        Ok(())
    }
}

/// Named charts with rational transition maps between them.
///
/// For an ordered pair `(a, b)` the map gives every `b`-coordinate as a
/// rational function of the `a`-coordinates; both use the template names.
#[derive(Clone, Debug)]
pub struct TransitionAtlas {
    charts: Vec<String>,
    roles: Roles,
    order: u32,
    ideal: IdealSpec,
    transitions: BTreeMap<(String, String), Arc<Vec<RationalFunction>>>,
    overlaps: Vec<(String, String)>,
    triples: Vec<[String; 3]>,
}

fn sorted_pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl TransitionAtlas {
    /// Builds and validates an atlas: unit denominators at the chart center,
    /// both directions for each overlap, inverse consistency modulo
    /// `I_S^(order+1)`, and cocycle consistency on declared triples.
    pub fn new(
        charts: Vec<String>,
        roles: Roles,
        order: u32,
        transitions: Vec<(String, String, BTreeMap<String, RationalFunction>)>,
        overlaps: Vec<(String, String)>,
        triples: Vec<[String; 3]>,
    ) -> Result<Self, AtlasError> {
        let mut seen = BTreeSet::new();
        for c in &charts {
            if !seen.insert(c.clone()) {
                return Err(AtlasError::DuplicateChart(c.clone()));
            }
        }
        let ideal = roles.ideal(order);
        let vars = ideal.vars().clone();
        let mut map = BTreeMap::new();
        let mut pairs: BTreeSet<(String, String)> = BTreeSet::new();
        for (from, to, comps) in transitions {
            for c in [&from, &to] {
                if !seen.contains(c) {
                    return Err(AtlasError::UnknownChart(c.clone()));
                }
            }
            let malformed = |component: &str, reason: String| AtlasError::MalformedTransition {
                from: from.clone(),
                to: to.clone(),
                component: component.to_string(),
                reason,
            };
            for name in comps.keys() {
                if !vars.contains(name) {
                    return Err(malformed(name, "not a chart variable".into()));
                }
            }
            let mut list = Vec::with_capacity(vars.len());
            for v in vars.iter() {
                let f = comps.get(v).ok_or_else(|| malformed(v, "missing component".into()))?;
                if f.vars() != &vars {
                    return Err(malformed(v, "expression over the wrong variables".into()));
                }
                if !f.has_unit_denominator() {
                    return Err(malformed(v, format!("denominator {} vanishes at the chart center", f.den())));
                }
                list.push(f.clone());
            }
            pairs.insert(sorted_pair(&from, &to));
            map.insert((from, to), Arc::new(list));
        }
        for (a, b) in &overlaps {
            for c in [a, b] {
                if !seen.contains(c) {
                    return Err(AtlasError::UnknownChart(c.clone()));
                }
            }
            pairs.insert(sorted_pair(a, b));
        }
        for (a, b) in &pairs {
            for (f, t) in [(a, b), (b, a)] {
                if !map.contains_key(&(f.clone(), t.clone())) {
                    return Err(AtlasError::MissingTransition { from: f.clone(), to: t.clone() });
                }
            }
        }
        for [a, b, c] in &triples {
            for (f, t) in [(a, b), (b, c), (a, c)] {
                if !seen.contains(f) {
                    return Err(AtlasError::UnknownChart(f.clone()));
                }
                if !map.contains_key(&(f.clone(), t.clone())) {
                    return Err(AtlasError::MissingTransition { from: f.clone(), to: t.clone() });
                }
            }
        }
        let atlas = TransitionAtlas {
            charts,
            roles,
            order,
            ideal,
            transitions: map,
            overlaps: pairs.into_iter().collect(),
            triples,
        };
        atlas.check_consistency()?;
        Ok(atlas)
    }

    fn check_consistency(&self) -> Result<(), AtlasError> {
        let k = self.order;
        let vars = self.vars().clone();
        let ident: BTreeMap<String, RationalFunction> = vars
            .iter()
            .map(|v| (v.clone(), RationalFunction::from_poly(MultiPoly::var(&vars, v).expect("template var"))))
            .collect();
        let mismatch = |charts: String, h: usize, lhs: &RationalFunction, rhs: &RationalFunction| -> Result<(), AtlasError> {
            let diff = lhs.try_sub(rhs)?;
            let residual = truncate(diff.num(), &self.ideal)?;
            if residual.is_zero() {
                Ok(())
            } else {
                Err(AtlasError::Inconsistent { charts, component: vars[h].clone(), residual: residual.to_string(), power: k + 1 })
            }
        };
        for (a, b) in &self.overlaps {
            let round = self.compose_maps(&[a, b, a])?;
            for (h, f) in round.iter().enumerate() {
                mismatch(format!("{}->{}->{}", a, b, a), h, f, &ident[&vars[h]])?;
            }
        }
        for [a, b, c] in &self.triples {
            let via = self.compose_maps(&[a, b, c])?;
            let direct = self.transition(a, c)?;
            for (h, f) in via.iter().enumerate() {
                mismatch(format!("{}->{}->{}", a, b, c), h, f, &direct[h])?;
            }
        }
        Ok(())
    }

    /// Composite map along a chain of charts, as functions of the first
    /// chart's coordinates.
    fn compose_maps(&self, chain: &[&String]) -> Result<Vec<RationalFunction>, AtlasError> {
        let vars = self.vars().clone();
        let mut current: Vec<RationalFunction> = self.transition(chain[0], chain[1])?.to_vec();
        for w in chain[1..].windows(2) {
            let next = self.transition(w[0], w[1])?;
            let images: BTreeMap<String, RationalFunction> =
                vars.iter().cloned().zip(current.iter().cloned()).collect();
            current = next.iter().map(|f| f.compose(&images, &vars)).collect::<Result<_, _>>()?;
        }
        Ok(current)
    }

    pub fn charts(&self) -> &[String] {
        &self.charts
    }

    pub fn roles(&self) -> &Roles {
        &self.roles
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn vars(&self) -> &Vars {
        self.ideal.vars()
    }

    /// The ideal of `S` at the given order over the template variables.
    pub fn ideal(&self, order: u32) -> IdealSpec {
        self.ideal.with_order(order)
    }

    /// Unordered overlapping pairs, each as `(first, second)` in name order.
    pub fn overlaps(&self) -> &[(String, String)] {
        &self.overlaps
    }

    pub fn triples(&self) -> &[[String; 3]] {
        &self.triples
    }

    pub fn has_chart(&self, name: &str) -> bool {
        self.charts.iter().any(|c| c == name)
    }

    pub fn transition(&self, from: &str, to: &str) -> Result<&[RationalFunction], AtlasError> {
        for c in [from, to] {
            if !self.has_chart(c) {
                return Err(AtlasError::UnknownChart(c.to_string()));
            }
        }
        self.transitions
            .get(&(from.to_string(), to.to_string()))
            .map(|v| v.as_slice())
            .ok_or_else(|| AtlasError::MissingTransition { from: from.to_string(), to: to.to_string() })
    }

    /// All ordered pairs with a transition.
    pub fn ordered_pairs(&self) -> Vec<(String, String)> {
        self.transitions.keys().cloned().collect()
    }

    fn index(&self, name: &str) -> usize {
        self.ideal.index_of(name).expect("template variable")
    }

    /// Numerator of `∂ z_to^target / ∂ z_from^wrt` by the quotient rule; its
    /// denominator is a unit, so ideal membership is decided by this alone.
    fn jacobian_numerator(&self, from: &str, to: &str, target: &str, wrt: &str) -> Result<MultiPoly, AtlasError> {
        let f = &self.transition(from, to)?[self.index(target)];
        Ok(f.derivative_numerator(wrt)?)
    }

    /// Per ordered pair, in parallel when asked to.
    fn per_pair<F>(&self, check: &str, exec: Exec, f: F) -> Result<AtlasReport, AtlasError>
    where
        F: Fn(&str, &str) -> Result<Vec<Violation>, AtlasError> + Sync + Send,
    {
        let pairs = self.ordered_pairs();
        let results = exec.try_map(&pairs, |(a, b)| -> Result<PairResult, AtlasError> {
            Ok(PairResult { from: a.clone(), to: b.clone(), violations: f(a, b)? })
        })?;
        Ok(AtlasReport { check: check.to_string(), pairs: results })
    }

    /// Adapted to `S`: every normal target coordinate vanishes on `S`.
    /// Adapted to the foliation: every non-foliation target coordinate has
    /// foliation derivatives vanishing on `S`.
    pub fn check_adapted_with(&self, exec: Exec) -> Result<AtlasReport, AtlasError> {
        let on_s = self.ideal(0);
        self.per_pair("adapted", exec, |a, b| {
            let maps = self.transition(a, b)?;
            let mut out = Vec::new();
            for r in &self.roles.normal {
                let num = maps[self.index(r)].num();
                let c = truncate(num, &on_s)?;
                if !c.is_zero() {
                    out.push(Violation {
                        component: r.clone(),
                        derivative: None,
                        detail: format!("numerator restricted to S is {}, not in I_S", c),
                    });
                }
            }
            for t in self.roles.non_foliation() {
                for i in &self.roles.foliation {
                    let c = truncate(&self.jacobian_numerator(a, b, &t, i)?, &on_s)?;
                    if !c.is_zero() {
                        out.push(Violation {
                            component: t.clone(),
                            derivative: Some(i.clone()),
                            detail: format!("foliation direction not preserved on S: numerator {}", c),
                        });
                    }
                }
            }
            Ok(out)
        })
    }

    pub fn check_adapted(&self) -> Result<AtlasReport, AtlasError> {
        self.check_adapted_with(Exec::default())
    }

    pub(crate) fn require_adapted(&self) -> Result<(), AtlasError> {
        let report = self.check_adapted()?;
        if let Some(p) = report.failures().next() {
            let v = &p.violations[0];
            return Err(AtlasError::NotAdapted {
                from: p.from.clone(),
                to: p.to.clone(),
                component: v.component.clone(),
                detail: v.detail.clone(),
            });
        }
        Ok(())
    }

    /// `[∂z_b^t / ∂z_a^i]_(k+1) = 0` for non-foliation `t`, foliation `i`.
    pub fn check_extension_condition_with(&self, k: u32, exec: Exec) -> Result<AtlasReport, AtlasError> {
        self.require_adapted()?;
        let ideal = self.ideal(k);
        self.per_pair(&format!("extend-{}", k), exec, |a, b| {
            let mut out = Vec::new();
            for t in self.roles.non_foliation() {
                for i in &self.roles.foliation {
                    let c = truncate(&self.jacobian_numerator(a, b, &t, i)?, &ideal)?;
                    if !c.is_zero() {
                        out.push(Violation {
                            component: t.clone(),
                            derivative: Some(i.clone()),
                            detail: format!("[numerator]_{} = {}", k + 1, c),
                        });
                    }
                }
            }
            Ok(out)
        })
    }

    pub fn check_extension_condition(&self, k: u32) -> Result<AtlasReport, AtlasError> {
        self.check_extension_condition_with(k, Exec::default())
    }

    /// `∂z_b^p / ∂z_a^r ∈ I_S^k` for tangential `p`, normal `r`.
    pub fn check_k_splitting_with(&self, k: u32, exec: Exec) -> Result<AtlasReport, AtlasError> {
        self.require_adapted()?;
        let below = (k > 0).then(|| self.ideal(k - 1));
        self.per_pair(&format!("split-{}", k), exec, |a, b| {
            let mut out = Vec::new();
            let Some(below) = &below else { return Ok(out) };
            for p in &self.roles.tangential {
                for r in &self.roles.normal {
                    let low = truncate(&self.jacobian_numerator(a, b, p, r)?, below)?;
                    if !low.is_zero() {
                        out.push(Violation {
                            component: p.clone(),
                            derivative: Some(r.clone()),
                            detail: format!("numerator has terms of normal degree below {}: {}", k, low),
                        });
                    }
                }
            }
            Ok(out)
        })
    }

    pub fn check_k_splitting(&self, k: u32) -> Result<AtlasReport, AtlasError> {
        self.check_k_splitting_with(k, Exec::default())
    }

    /// Jacobian data of the transition `from -> to` restricted to `S`,
    /// everything expressed in `from`-coordinates.
    pub fn geometry(&self, from: &str, to: &str) -> Result<PairGeometry, AtlasError> {
        PairGeometry::new(self, from, to)
    }
}

fn restrict_rf(f: &RationalFunction, normal: &[(String, GaussianRational)]) -> Result<RationalFunction, AtlasError> {
    Ok(f.bind_all(normal)?)
}

/// Restricted Jacobians of a transition `a -> b`, in `a`-coordinates.
#[derive(Clone, Debug)]
pub struct PairGeometry {
    pub from: String,
    pub to: String,
    /// `forward[p][q] = ∂z_b^p / ∂z_a^q` on `S`.
    pub forward: Vec<Vec<RationalFunction>>,
    /// `backward[p][q] = ∂z_a^p / ∂z_b^q` on `S`, composed with the
    /// transition so that it is a function of `a`-coordinates.
    pub backward: Vec<Vec<RationalFunction>>,
    /// Images of the `b`-coordinates restricted to `S` (normal ones are zero).
    pub images_on_s: BTreeMap<String, RationalFunction>,
}

impl PairGeometry {
    fn new(atlas: &TransitionAtlas, a: &str, b: &str) -> Result<Self, AtlasError> {
        let vars = atlas.vars().clone();
        let zero = GaussianRational::zero();
        let normal: Vec<(String, GaussianRational)> =
            atlas.roles.normal.iter().map(|n| (n.clone(), zero.clone())).collect();
        let fwd_maps = atlas.transition(a, b)?;
        let back_maps = atlas.transition(b, a)?;
        let mut images_on_s = BTreeMap::new();
        for (v, f) in vars.iter().zip(fwd_maps) {
            let img = if atlas.roles.is_normal(v) {
                RationalFunction::zero(&vars)
            } else {
                restrict_rf(f, &normal)?
            };
            images_on_s.insert(v.clone(), img);
        }
        let mut forward = Vec::with_capacity(vars.len());
        let mut backward = Vec::with_capacity(vars.len());
        for (fwd, back) in fwd_maps.iter().zip(back_maps) {
            let mut frow = Vec::with_capacity(vars.len());
            let mut brow = Vec::with_capacity(vars.len());
            for q in vars.iter() {
                frow.push(restrict_rf(&fwd.partial_derivative(q)?, &normal)?);
                let d = back.partial_derivative(q)?;
                brow.push(d.compose(&images_on_s, &vars)?);
            }
            forward.push(frow);
            backward.push(brow);
        }
        Ok(PairGeometry { from: a.to_string(), to: b.to_string(), forward, backward, images_on_s })
    }
}

/// The canonical θ₁-derivation of an adapted chart,
/// `ρ̃([f]_2) = [f - f|_(normal = 0)]_2`, for an atlas or a single chart.
#[derive(Clone, Debug)]
pub struct SplittingData {
    atlas: Option<Arc<TransitionAtlas>>,
    ideal: IdealSpec,
}

impl SplittingData {
    pub fn new(atlas: Arc<TransitionAtlas>) -> Self {
        let ideal = atlas.ideal(1);
        SplittingData { atlas: Some(atlas), ideal }
    }

    /// Splitting data for one chart with the given coordinate split.
    pub fn local(ideal: &IdealSpec) -> Self {
        SplittingData { atlas: None, ideal: ideal.with_order(1) }
    }

    pub fn ideal(&self) -> &IdealSpec {
        &self.ideal
    }

    pub fn atlas(&self) -> Option<&TransitionAtlas> {
        self.atlas.as_deref()
    }

    pub fn rho(&self, f: &JetClass) -> Result<JetClass, AtlasError> {
        if f.ideal() != &self.ideal {
            return Err(AtlasError::OrderMismatch { expected: 1, found: f.ideal().order() });
        }
        let on_s = f.rep().vanish_at(self.ideal.normal_indices());
        Ok(truncate(&(f.rep() - &on_s), &self.ideal)?)
    }
}

/// `f^h ∂_h ↦ ρ̃(f^r) ∂_r + f^p ∂_p` on a chart of the splitting data.
pub fn splitting_projection(v: &VectorFieldJet, data: &SplittingData, chart: &str) -> Result<VectorFieldJet, AtlasError> {
    if let Some(atlas) = data.atlas() {
        if !atlas.has_chart(chart) {
            return Err(AtlasError::UnknownChart(chart.to_string()));
        }
    }
    if v.ideal().order() != 1 {
        return Err(AtlasError::OrderMismatch { expected: 1, found: v.ideal().order() });
    }
    if v.ideal() != data.ideal() {
        return Err(AtlasError::Jet(JetError::IdealMismatch));
    }
    let m = v.ideal().codim();
    let comps = v
        .components()
        .iter()
        .enumerate()
        .map(|(h, c)| if h < m { data.rho(c) } else { Ok(c.clone()) })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VectorFieldJet::from_classes(v.ideal(), comps))
}
