use std::fmt;
use std::sync::Arc;

use crate::algebra::{vars, Monomial, Vars};

use super::JetError;

#[derive(PartialEq, Eq)]
struct Inner {
    normal: Vec<String>,
    tangential: Vec<String>,
    order: u32,
    vars: Vars,
    normal_idx: Vec<usize>,
}

/// The ideal `I_S` generated by the normal variables, together with the
/// truncation order `k` of `O_M / I_S^(k+1)`.
///
/// The chart's variable list is `normal ++ tangential`. Cloning is cheap.
#[derive(Clone)]
pub struct IdealSpec(Arc<Inner>);

impl IdealSpec {
    pub fn new<S: AsRef<str>>(normal: &[S], tangential: &[S], order: u32) -> Result<Self, JetError> {
        let normal: Vec<String> = normal.iter().map(|s| s.as_ref().to_string()).collect();
        let tangential: Vec<String> = tangential.iter().map(|s| s.as_ref().to_string()).collect();
        let mut seen = std::collections::BTreeSet::new();
        for v in normal.iter().chain(&tangential) {
            if !seen.insert(v.clone()) {
                return Err(JetError::OverlappingRoles(v.clone()));
            }
        }
        let all = vars(normal.iter().chain(&tangential).cloned());
        let normal_idx = (0..normal.len()).collect();
        Ok(IdealSpec(Arc::new(Inner { normal, tangential, order, vars: all, normal_idx })))
    }

    pub fn normal(&self) -> &[String] {
        &self.0.normal
    }

    pub fn tangential(&self) -> &[String] {
        &self.0.tangential
    }

    pub fn order(&self) -> u32 {
        self.0.order
    }

    pub fn vars(&self) -> &Vars {
        &self.0.vars
    }

    pub fn nvars(&self) -> usize {
        self.0.vars.len()
    }

    pub fn codim(&self) -> usize {
        self.0.normal.len()
    }

    pub fn normal_indices(&self) -> &[usize] {
        &self.0.normal_idx
    }

    pub fn tangential_indices(&self) -> std::ops::Range<usize> {
        self.codim()..self.nvars()
    }

    pub fn is_normal_index(&self, i: usize) -> bool {
        i < self.codim()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.vars.iter().position(|v| v == name)
    }

    pub fn is_tangential(&self, name: &str) -> bool {
        self.0.tangential.iter().any(|v| v == name)
    }

    /// Total degree in the normal variables.
    pub fn normal_degree(&self, m: &Monomial) -> u32 {
        m.exponents()[..self.codim()].iter().sum()
    }

    /// Same variables, different truncation order.
    pub fn with_order(&self, order: u32) -> IdealSpec {
        if order == self.order() {
            return self.clone();
        }
        IdealSpec(Arc::new(Inner {
            normal: self.0.normal.clone(),
            tangential: self.0.tangential.clone(),
            order,
            vars: self.0.vars.clone(),
            normal_idx: self.0.normal_idx.clone(),
        }))
    }

    /// The ideal of `S` inside itself: no normal variables, order 0.
    pub fn on_s(&self) -> IdealSpec {
        IdealSpec::new::<String>(&[], &self.0.tangential, 0).expect("tangential names are distinct")
    }
}

impl PartialEq for IdealSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for IdealSpec {}

impl fmt::Debug for IdealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "IdealSpec(normal=[{}], tangential=[{}], k={})",
            self.0.normal.join(","),
            self.0.tangential.join(","),
            self.0.order
        )
    }
}
