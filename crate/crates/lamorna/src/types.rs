//! Types of the calculus: base `int`, products, potential-annotated
//! dependent arrows, potential-polymorphic quantifiers, and simplified
//! inductive datatypes `ind{ C_i(T_i, m_i) }` where `m_i` counts the copies
//! of the inductive type itself carried by constructor `i`.

use std::collections::BTreeSet;
use std::fmt;
use std::rc::Rc;

use crate::ident::Ident;
use crate::potential::{self, PotExpr};
use crate::term::Term;

#[derive(Clone, PartialEq, Eq)]
pub enum TypeExpr {
    Int,
    Prod(Box<TypeExpr>, Box<TypeExpr>),
    Arrow(Box<ArrowType>),
    Poly(Box<PolyType>),
    Ind(Rc<IndType>),
}

/// `[arg_pot]_arg_binder arg_type -> [res_pot]_res_binder res_type`.
///
/// `arg_pot` and `arg_type` may mention `arg_binder` and ambient variables;
/// `res_pot` and `res_type` may additionally mention `res_binder`.
#[derive(Clone, PartialEq, Eq)]
pub struct ArrowType {
    pub arg_binder: Ident,
    pub arg_pot: PotExpr,
    pub arg_type: TypeExpr,
    pub res_binder: Ident,
    pub res_pot: PotExpr,
    pub res_type: TypeExpr,
}

/// Potential polymorphism `forall binder : domain . body`; instantiated with
/// pre-values only.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyType {
    pub binder: Ident,
    pub domain: TypeExpr,
    pub body: TypeExpr,
}

#[derive(Clone)]
pub struct IndType {
    /// Display name; ignored by equality.
    pub name: String,
    pub ctors: Vec<Ctor>,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Ctor {
    pub name: String,
    pub content: TypeExpr,
    pub copies: usize,
}

impl PartialEq for IndType {
    fn eq(&self, other: &Self) -> bool {
        self.ctors == other.ctors
    }
}
impl Eq for IndType {}

impl IndType {
    pub fn ctor_index(&self, name: &str) -> Option<usize> {
        self.ctors.iter().position(|c| c.name == name)
    }

    /// Constructor names must be pairwise distinct and copies are already
    /// nonnegative by construction.
    pub fn well_formed(&self) -> bool {
        let names: BTreeSet<&str> = self.ctors.iter().map(|c| c.name.as_str()).collect();
        names.len() == self.ctors.len()
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::Int => write!(f, "int"),
            TypeExpr::Prod(a, b) => write!(f, "({a} * {b})"),
            TypeExpr::Arrow(ar) => write!(
                f,
                "([{}]_{} {} -> [{}]_{} {})",
                ar.arg_pot, ar.arg_binder, ar.arg_type, ar.res_pot, ar.res_binder, ar.res_type
            ),
            TypeExpr::Poly(p) => write!(f, "(forall {} : {} . {})", p.binder, p.domain, p.body),
            TypeExpr::Ind(i) => write!(f, "{}", i.name),
        }
    }
}

impl fmt::Debug for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl TypeExpr {
    pub fn arrow(
        arg_binder: Ident,
        arg_pot: PotExpr,
        arg_type: TypeExpr,
        res_binder: Ident,
        res_pot: PotExpr,
        res_type: TypeExpr,
    ) -> TypeExpr {
        TypeExpr::Arrow(Box::new(ArrowType {
            arg_binder,
            arg_pot,
            arg_type,
            res_binder,
            res_pot,
            res_type,
        }))
    }

    pub fn prod(a: TypeExpr, b: TypeExpr) -> TypeExpr {
        TypeExpr::Prod(Box::new(a), Box::new(b))
    }

    pub fn poly(binder: Ident, domain: TypeExpr, body: TypeExpr) -> TypeExpr {
        TypeExpr::Poly(Box::new(PolyType { binder, domain, body }))
    }
}

// Library encodings used by every corpus program.

pub fn unit_type() -> Rc<IndType> {
    Rc::new(IndType {
        name: "Unit".into(),
        ctors: vec![Ctor { name: "unit".into(), content: TypeExpr::Int, copies: 0 }],
    })
}

pub fn bool_type() -> Rc<IndType> {
    let unit = TypeExpr::Ind(unit_type());
    Rc::new(IndType {
        name: "Bool".into(),
        ctors: vec![
            Ctor { name: "false".into(), content: unit.clone(), copies: 0 },
            Ctor { name: "true".into(), content: unit, copies: 0 },
        ],
    })
}

pub fn nat_type() -> Rc<IndType> {
    let unit = TypeExpr::Ind(unit_type());
    Rc::new(IndType {
        name: "Nat".into(),
        ctors: vec![
            Ctor { name: "zero".into(), content: unit.clone(), copies: 0 },
            Ctor { name: "succ".into(), content: unit, copies: 1 },
        ],
    })
}

pub fn list_type(elem: TypeExpr) -> Rc<IndType> {
    let unit = TypeExpr::Ind(unit_type());
    Rc::new(IndType {
        name: format!("List({elem})"),
        ctors: vec![
            Ctor { name: "nil".into(), content: unit, copies: 0 },
            Ctor { name: "cons".into(), content: elem, copies: 1 },
        ],
    })
}

pub fn tree_type(elem: TypeExpr) -> Rc<IndType> {
    let unit = TypeExpr::Ind(unit_type());
    Rc::new(IndType {
        name: format!("Tree({elem})"),
        ctors: vec![
            Ctor { name: "leaf".into(), content: elem, copies: 0 },
            Ctor { name: "node".into(), content: unit, copies: 2 },
        ],
    })
}

/// Sum encoding from the AARA fragment: `T1 + T2`.
pub fn sum_type(left: TypeExpr, right: TypeExpr) -> Rc<IndType> {
    Rc::new(IndType {
        name: format!("({left} + {right})"),
        ctors: vec![
            Ctor { name: "left".into(), content: left, copies: 0 },
            Ctor { name: "right".into(), content: right, copies: 0 },
        ],
    })
}

/// Free variables of a type, following the arrow clause that removes the
/// result binder from the result side and the argument binder from the
/// whole.
pub fn fv_type(t: &TypeExpr) -> BTreeSet<Ident> {
    match t {
        TypeExpr::Int => BTreeSet::new(),
        TypeExpr::Prod(a, b) => {
            let mut s = fv_type(a);
            s.extend(fv_type(b));
            s
        }
        TypeExpr::Arrow(ar) => {
            let mut res: BTreeSet<Ident> = potential::fv_pot(&ar.res_pot);
            res.extend(fv_type(&ar.res_type));
            res.remove(&ar.res_binder);
            let mut s = potential::fv_pot(&ar.arg_pot);
            s.extend(fv_type(&ar.arg_type));
            s.extend(res);
            s.remove(&ar.arg_binder);
            s
        }
        TypeExpr::Poly(p) => {
            let mut body = fv_type(&p.body);
            body.remove(&p.binder);
            let mut s = fv_type(&p.domain);
            s.extend(body);
            s
        }
        TypeExpr::Ind(ind) => {
            let mut s = BTreeSet::new();
            for c in &ind.ctors {
                s.extend(fv_type(&c.content));
            }
            s
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaptureRisk {
    pub binder: Ident,
}

/// `t[x ↦ v]` for a pre-value `v`. Binders in `t` must already be fresh
/// with respect to `x` and `fv(v)`; otherwise `CaptureRisk` is reported and
/// the caller must freshen first.
pub fn subst_type(t: &TypeExpr, x: &Ident, v: &Term) -> Result<TypeExpr, CaptureRisk> {
    let fv_v: BTreeSet<Ident> = crate::term::fv_term(v);
    subst_type_in(t, x, v, &fv_v)
}

pub(crate) fn subst_type_in(
    t: &TypeExpr,
    x: &Ident,
    v: &Term,
    fv_v: &BTreeSet<Ident>,
) -> Result<TypeExpr, CaptureRisk> {
    let guard = |binder: &Ident| -> Result<(), CaptureRisk> {
        if binder == x || fv_v.contains(binder) {
            Err(CaptureRisk { binder: binder.clone() })
        } else {
            Ok(())
        }
    };
    Ok(match t {
        TypeExpr::Int => TypeExpr::Int,
        TypeExpr::Prod(a, b) => {
            TypeExpr::prod(subst_type_in(a, x, v, fv_v)?, subst_type_in(b, x, v, fv_v)?)
        }
        TypeExpr::Arrow(ar) => {
            guard(&ar.arg_binder)?;
            guard(&ar.res_binder)?;
            TypeExpr::arrow(
                ar.arg_binder.clone(),
                potential::subst_pot_in(&ar.arg_pot, x, v, fv_v)?,
                subst_type_in(&ar.arg_type, x, v, fv_v)?,
                ar.res_binder.clone(),
                potential::subst_pot_in(&ar.res_pot, x, v, fv_v)?,
                subst_type_in(&ar.res_type, x, v, fv_v)?,
            )
        }
        TypeExpr::Poly(p) => {
            guard(&p.binder)?;
            TypeExpr::poly(
                p.binder.clone(),
                subst_type_in(&p.domain, x, v, fv_v)?,
                subst_type_in(&p.body, x, v, fv_v)?,
            )
        }
        TypeExpr::Ind(ind) => {
            let ctors = ind
                .ctors
                .iter()
                .map(|c| {
                    Ok(Ctor {
                        name: c.name.clone(),
                        content: subst_type_in(&c.content, x, v, fv_v)?,
                        copies: c.copies,
                    })
                })
                .collect::<Result<Vec<_>, CaptureRisk>>()?;
            TypeExpr::Ind(Rc::new(IndType { name: ind.name.clone(), ctors }))
        }
    })
}

/// Alpha-equivalence of types: identical up to consistent renaming of bound
/// identifiers (arrow binders, poly binders, and all binders inside
/// potentials).
pub fn alpha_eq_type(a: &TypeExpr, b: &TypeExpr) -> bool {
    alpha_type(a, b, &mut Vec::new())
}

pub(crate) type BinderEnv = Vec<(Ident, Ident)>;

pub(crate) fn env_matches(env: &BinderEnv, a: &Ident, b: &Ident) -> bool {
    for (x, y) in env.iter().rev() {
        let la = x == a;
        let lb = y == b;
        if la || lb {
            return la && lb;
        }
    }
    a == b
}

pub(crate) fn alpha_type(a: &TypeExpr, b: &TypeExpr, env: &mut BinderEnv) -> bool {
    match (a, b) {
        (TypeExpr::Int, TypeExpr::Int) => true,
        (TypeExpr::Prod(a1, a2), TypeExpr::Prod(b1, b2)) => {
            alpha_type(a1, b1, env) && alpha_type(a2, b2, env)
        }
        (TypeExpr::Arrow(x), TypeExpr::Arrow(y)) => {
            if !alpha_type(&x.arg_type, &y.arg_type, env) {
                return false;
            }
            env.push((x.arg_binder.clone(), y.arg_binder.clone()));
            let arg_ok = potential::alpha_pot(&x.arg_pot, &y.arg_pot, env);
            let res_ok = arg_ok && {
                env.push((x.res_binder.clone(), y.res_binder.clone()));
                let ok = potential::alpha_pot(&x.res_pot, &y.res_pot, env)
                    && alpha_type(&x.res_type, &y.res_type, env);
                env.pop();
                ok
            };
            env.pop();
            res_ok
        }
        (TypeExpr::Poly(x), TypeExpr::Poly(y)) => {
            if !alpha_type(&x.domain, &y.domain, env) {
                return false;
            }
            env.push((x.binder.clone(), y.binder.clone()));
            let ok = alpha_type(&x.body, &y.body, env);
            env.pop();
            ok
        }
        (TypeExpr::Ind(x), TypeExpr::Ind(y)) => {
            x.ctors.len() == y.ctors.len()
                && x.ctors.iter().zip(&y.ctors).all(|(c, d)| {
                    c.name == d.name && c.copies == d.copies && alpha_type(&c.content, &d.content, env)
                })
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotExpr;

    fn li() -> TypeExpr {
        TypeExpr::Ind(list_type(TypeExpr::Int))
    }

    #[test]
    fn encodings_are_well_formed() {
        for ind in [unit_type(), bool_type(), nat_type(), list_type(TypeExpr::Int), tree_type(TypeExpr::Int)] {
            assert!(ind.well_formed());
        }
        assert_eq!(list_type(TypeExpr::Int).ctor_index("cons"), Some(1));
    }

    #[test]
    fn fv_int_is_empty() {
        assert!(fv_type(&TypeExpr::Int).is_empty());
    }

    #[test]
    fn arrow_fv_removes_binders() {
        // [length(x)]_y List -> [length(y)]_y ... inner binder occurrences drop.
        let x = Ident::source("x");
        let y = Ident::source("y");
        let arrow = TypeExpr::arrow(
            y.clone(),
            crate::potential::length_of(&x),
            li(),
            Ident::source("r"),
            crate::potential::length_of(&y),
            li(),
        );
        let fv = fv_type(&arrow);
        assert!(fv.contains(&x));
        assert!(!fv.contains(&y));
    }

    #[test]
    fn alpha_eq_renames_binders() {
        let mk = |b: &str| {
            TypeExpr::arrow(
                Ident::source(b),
                PotExpr::zero(),
                li(),
                Ident::source("r"),
                PotExpr::zero(),
                li(),
            )
        };
        assert!(alpha_eq_type(&mk("x"), &mk("y")));
    }

    #[test]
    fn alpha_eq_distinguishes_free_vars() {
        let free = |b: &str| {
            TypeExpr::arrow(
                Ident::source("a"),
                crate::potential::length_of(&Ident::source(b)),
                li(),
                Ident::source("r"),
                PotExpr::zero(),
                li(),
            )
        };
        assert!(!alpha_eq_type(&free("x"), &free("y")));
        assert!(alpha_eq_type(&free("x"), &free("x")));
    }
}
