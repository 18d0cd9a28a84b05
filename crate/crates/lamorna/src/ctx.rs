//! Ordered typing contexts and the typing judgement
//! `Ω | Γ | f1 ⊢ e : [f2]_x T`.

use std::collections::BTreeSet;
use std::fmt;

use crate::ident::Ident;
use crate::potential::PotExpr;
use crate::term::Term;
use crate::types::{self, TypeExpr};

/// An ordered sequence of bindings with no duplicate identifiers. Both the
/// potential context Ω and the type context Γ use this shape.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Ctx(Vec<(Ident, TypeExpr)>);

impl Ctx {
    pub fn empty() -> Self {
        Ctx(Vec::new())
    }

    pub fn from(bindings: Vec<(Ident, TypeExpr)>) -> Self {
        let mut c = Ctx::empty();
        for (x, t) in bindings {
            c.push(x, t);
        }
        c
    }

    pub fn push(&mut self, x: Ident, t: TypeExpr) {
        debug_assert!(self.lookup(&x).is_none(), "duplicate binding {x}");
        self.0.push((x, t));
    }

    pub fn extended(&self, x: Ident, t: TypeExpr) -> Ctx {
        let mut c = self.clone();
        c.push(x, t);
        c
    }

    pub fn lookup(&self, x: &Ident) -> Option<&TypeExpr> {
        self.0.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    pub fn contains(&self, x: &Ident) -> bool {
        self.lookup(x).is_some()
    }

    pub fn remove(&self, x: &Ident) -> Ctx {
        Ctx(self.0.iter().filter(|(y, _)| y != x).cloned().collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Ident, TypeExpr)> {
        self.0.iter()
    }

    pub fn dom(&self) -> BTreeSet<Ident> {
        self.0.iter().map(|(x, _)| x.clone()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Free variables of all carried types.
    pub fn fv(&self) -> BTreeSet<Ident> {
        let mut s = BTreeSet::new();
        for (_, t) in &self.0 {
            s.extend(types::fv_type(t));
        }
        s
    }

    /// Both contexts of a judgement must agree on shared variables.
    pub fn shares_types_with(&self, other: &Ctx) -> bool {
        self.0.iter().all(|(x, t)| match other.lookup(x) {
            Some(t2) => types::alpha_eq_type(t, t2),
            None => true,
        })
    }
}

impl fmt::Display for Ctx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "·");
        }
        for (i, (x, t)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x} : {t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Ctx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `Ω | Γ | f1 ⊢ e : [f2]_x T`.
#[derive(Clone, PartialEq, Eq)]
pub struct Judgement {
    pub omega: Ctx,
    pub gamma: Ctx,
    pub in_pot: PotExpr,
    pub term: Term,
    pub out_pot: PotExpr,
    pub ty: TypeExpr,
    pub binder: Ident,
}

impl fmt::Display for Judgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} | {} | {} |- {} : [{}]_{} {}",
            self.omega, self.gamma, self.in_pot, self.term, self.out_pot, self.binder, self.ty
        )
    }
}

impl fmt::Debug for Judgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
