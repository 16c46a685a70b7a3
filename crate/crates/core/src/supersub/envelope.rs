//! Piecewise envelopes: pointwise min or max over smooth branches.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type BranchFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Super,
    Sub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeCase {
    C1,
    C2,
    Annihilating,
    Monostable,
    Sandwich,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combine {
    Single,
    Min,
    Max,
}

/// How a branch is expected to behave under N[u] = ∂ₜu − ∂ₓₓu − f(u).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchKind {
    /// An exact traveling front: N = 0 up to discretization.
    Exact,
    /// A constant equilibrium.
    Equilibrium,
    /// A constructed branch expected to satisfy the role's inequality.
    Constructed,
}

#[derive(Clone)]
pub struct Branch {
    pub name: String,
    pub kind: BranchKind,
    eval: BranchFn,
}

impl Branch {
    pub fn new(name: &str, kind: BranchKind, eval: BranchFn) -> Self {
        Self { name: name.to_string(), kind, eval }
    }

    pub fn constant(name: &str, value: f64) -> Self {
        Self::new(name, BranchKind::Equilibrium, Arc::new(move |_, _| value))
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        (self.eval)(x, t)
    }
}

impl fmt::Debug for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Branch({}, {:?})", self.name, self.kind)
    }
}

#[derive(Debug, Clone)]
pub struct Envelope {
    pub role: Role,
    pub case: EnvelopeCase,
    pub combine: Combine,
    pub branches: Vec<Branch>,
    /// Closed validity interval in time.
    pub t_min: f64,
    pub t_max: f64,
    /// Human-readable description of where branches switch.
    pub kink_locus: String,
}

impl Envelope {
    pub fn new(
        role: Role,
        case: EnvelopeCase,
        combine: Combine,
        branches: Vec<Branch>,
        (t_min, t_max): (f64, f64),
        kink_locus: &str,
    ) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::Construction("envelope without branches".into()));
        }
        if combine == Combine::Single && branches.len() != 1 {
            return Err(Error::Construction("single-branch envelope with several branches".into()));
        }
        if !(t_min < t_max) {
            return Err(Error::Construction(format!("empty validity interval [{t_min}, {t_max}]")));
        }
        Ok(Self { role, case, combine, branches, t_min, t_max, kink_locus: kink_locus.to_string() })
    }

    pub fn is_valid_at(&self, t: f64) -> bool {
        t >= self.t_min - 1e-12 && t <= self.t_max + 1e-12
    }

    /// Index of the branch that attains the min/max (first on ties).
    pub fn active(&self, x: f64, t: f64) -> usize {
        let mut best = 0;
        let mut val = self.branches[0].eval(x, t);
        for (i, b) in self.branches.iter().enumerate().skip(1) {
            let v = b.eval(x, t);
            let better = match self.combine {
                Combine::Min => v < val,
                Combine::Max => v > val,
                Combine::Single => false,
            };
            if better {
                best = i;
                val = v;
            }
        }
        best
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        let vals = self.branches.iter().map(|b| b.eval(x, t));
        match self.combine {
            Combine::Single | Combine::Min => vals.fold(f64::INFINITY, f64::min),
            Combine::Max => vals.fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Envelope values on a grid at time t.
    pub fn sample(&self, xs: &[f64], t: f64) -> Vec<f64> {
        xs.iter().map(|&x| self.eval(x, t)).collect()
    }

    /// A closure view usable as Dirichlet data or initial data.
    pub fn as_fn(&self) -> BranchFn {
        let e = self.clone();
        Arc::new(move |x, t| e.eval(x, t))
    }
}
