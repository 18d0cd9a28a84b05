//! Expressions, values, and pre-values of the calculus, with
//! classification, free variables, capture-avoiding substitution, and
//! alpha-equivalence.

use std::collections::BTreeSet;
use std::fmt;
use std::rc::Rc;

use crate::ident::Ident;
use crate::potential;
use crate::types::{self, CaptureRisk, IndType, TypeExpr};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OpKind {
    Add,
    Sub,
    Mul,
    Lt,
}

impl OpKind {
    pub fn arity(&self) -> usize {
        2
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            OpKind::Add => "+",
            OpKind::Sub => "-",
            OpKind::Mul => "*",
            OpKind::Lt => "<",
        }
    }

    /// Result type of the operation; `<` produces the Bool encoding, the
    /// arithmetic ops stay in int.
    pub fn result_type(&self) -> TypeExpr {
        match self {
            OpKind::Lt => TypeExpr::Ind(types::bool_type()),
            _ => TypeExpr::Int,
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub enum Term {
    Var(Ident),
    Int(i64),
    Op(OpKind, Vec<Term>),
    /// `fun x . e`, annotation optional for parsing and evaluation but
    /// required (or reconstructed from an expected arrow) by the typer.
    Abs { binder: Ident, anno: Option<TypeExpr>, body: Box<Term> },
    /// `Lam x : T . e`, potential polymorphism.
    PotAbs { binder: Ident, domain: TypeExpr, body: Box<Term> },
    App(Box<Term>, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Proj1(Box<Term>),
    Proj2(Box<Term>),
    Fix { binder: Ident, anno: TypeExpr, body: Box<Term> },
    Tick(i64, Box<Term>),
    Let { binder: Ident, bound: Box<Term>, body: Box<Term> },
    /// `C_i(e0, e1..em)`: the inductive type is carried explicitly so that
    /// constructor indices stay unambiguous.
    Con { ind: Rc<IndType>, ctor: usize, content: Box<Term>, rec_args: Vec<Term> },
    /// `matd(e, { C_i(x0, x1..xm) -> e_i })`; branch binders are the content
    /// binder followed by one binder per copy.
    Matd { scrutinee: Box<Term>, branches: Vec<Branch> },
}

#[derive(Clone, PartialEq, Eq)]
pub struct Branch {
    pub ctor: usize,
    pub binders: Vec<Ident>,
    pub body: Term,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Class {
    Value,
    PreValue,
    Neither,
}

/// Grammar classification. Values: literals, abstractions, pairs of values,
/// constructors of values. Pre-values additionally allow variables and
/// arithmetic operations over pre-values.
pub fn classify_term(t: &Term) -> Class {
    match t {
        Term::Int(_) | Term::Abs { .. } | Term::PotAbs { .. } => Class::Value,
        Term::Var(_) => Class::PreValue,
        Term::Op(_, args) => {
            if args.iter().all(|a| classify_term(a) != Class::Neither) {
                Class::PreValue
            } else {
                Class::Neither
            }
        }
        Term::Pair(a, b) => join_class(classify_term(a), classify_term(b)),
        Term::Con { content, rec_args, .. } => {
            let mut c = classify_term(content);
            for a in rec_args {
                c = join_class(c, classify_term(a));
            }
            c
        }
        _ => Class::Neither,
    }
}

fn join_class(a: Class, b: Class) -> Class {
    match (a, b) {
        (Class::Value, Class::Value) => Class::Value,
        (Class::Neither, _) | (_, Class::Neither) => Class::Neither,
        _ => Class::PreValue,
    }
}

pub fn is_value(t: &Term) -> bool {
    classify_term(t) == Class::Value
}

pub fn is_prevalue(t: &Term) -> bool {
    classify_term(t) != Class::Neither
}

/// Term-level free variables. Annotations are not scanned; see [`typefv`].
pub fn fv_term(t: &Term) -> BTreeSet<Ident> {
    let mut s = BTreeSet::new();
    fv_term_into(t, &mut s, &mut Vec::new());
    s
}

fn fv_term_into(t: &Term, out: &mut BTreeSet<Ident>, bound: &mut Vec<Ident>) {
    match t {
        Term::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Term::Int(_) => {}
        Term::Op(_, args) => {
            for a in args {
                fv_term_into(a, out, bound);
            }
        }
        Term::Abs { binder, body, .. }
        | Term::PotAbs { binder, body, .. }
        | Term::Fix { binder, body, .. } => {
            bound.push(binder.clone());
            fv_term_into(body, out, bound);
            bound.pop();
        }
        Term::App(a, b) | Term::Pair(a, b) => {
            fv_term_into(a, out, bound);
            fv_term_into(b, out, bound);
        }
        Term::Proj1(e) | Term::Proj2(e) | Term::Tick(_, e) => fv_term_into(e, out, bound),
        Term::Let { binder, bound: rhs, body } => {
            fv_term_into(rhs, out, bound);
            bound.push(binder.clone());
            fv_term_into(body, out, bound);
            bound.pop();
        }
        Term::Con { content, rec_args, .. } => {
            fv_term_into(content, out, bound);
            for a in rec_args {
                fv_term_into(a, out, bound);
            }
        }
        Term::Matd { scrutinee, branches } => {
            fv_term_into(scrutinee, out, bound);
            for br in branches {
                let n = bound.len();
                bound.extend(br.binders.iter().cloned());
                fv_term_into(&br.body, out, bound);
                bound.truncate(n);
            }
        }
    }
}

/// Identifiers occurring free inside type or potential annotations embedded
/// in `t`. This is the `typefv` used by the fixpoint side condition: a fix
/// binder may occur in its body as a term but not inside annotations.
pub fn typefv(t: &Term) -> BTreeSet<Ident> {
    let mut s = BTreeSet::new();
    typefv_into(t, &mut s);
    s
}

fn typefv_into(t: &Term, out: &mut BTreeSet<Ident>) {
    match t {
        Term::Var(_) | Term::Int(_) => {}
        Term::Op(_, args) => args.iter().for_each(|a| typefv_into(a, out)),
        Term::Abs { anno, body, .. } => {
            if let Some(ty) = anno {
                out.extend(types::fv_type(ty));
            }
            typefv_into(body, out);
        }
        Term::PotAbs { domain, body, .. } => {
            out.extend(types::fv_type(domain));
            typefv_into(body, out);
        }
        Term::Fix { anno, body, .. } => {
            out.extend(types::fv_type(anno));
            typefv_into(body, out);
        }
        Term::App(a, b) | Term::Pair(a, b) => {
            typefv_into(a, out);
            typefv_into(b, out);
        }
        Term::Proj1(e) | Term::Proj2(e) | Term::Tick(_, e) => typefv_into(e, out),
        Term::Let { bound, body, .. } => {
            typefv_into(bound, out);
            typefv_into(body, out);
        }
        Term::Con { ind, content, rec_args, .. } => {
            for c in &ind.ctors {
                out.extend(types::fv_type(&c.content));
            }
            typefv_into(content, out);
            rec_args.iter().for_each(|a| typefv_into(a, out));
        }
        Term::Matd { scrutinee, branches } => {
            typefv_into(scrutinee, out);
            branches.iter().for_each(|b| typefv_into(&b.body, out));
        }
    }
}

/// `t[x ↦ v]`. `v` must be a pre-value; binders in `t` that equal `x` or
/// occur free in `v` raise `CaptureRisk` (the caller freshens first).
/// Annotations are substituted as well, per the appendix clauses.
pub fn subst_term(t: &Term, x: &Ident, v: &Term) -> Result<Term, CaptureRisk> {
    let fv_v = fv_term(v);
    subst_term_in(t, x, v, &fv_v)
}

pub(crate) fn subst_term_in(
    t: &Term,
    x: &Ident,
    v: &Term,
    fv_v: &BTreeSet<Ident>,
) -> Result<Term, CaptureRisk> {
    let guard = |binder: &Ident| -> Result<(), CaptureRisk> {
        if binder == x || fv_v.contains(binder) {
            Err(CaptureRisk { binder: binder.clone() })
        } else {
            Ok(())
        }
    };
    Ok(match t {
        Term::Var(y) => {
            if y == x {
                v.clone()
            } else {
                t.clone()
            }
        }
        Term::Int(_) => t.clone(),
        Term::Op(op, args) => Term::Op(
            *op,
            args.iter().map(|a| subst_term_in(a, x, v, fv_v)).collect::<Result<_, _>>()?,
        ),
        Term::Abs { binder, anno, body } => {
            guard(binder)?;
            Term::Abs {
                binder: binder.clone(),
                anno: anno.as_ref().map(|ty| types::subst_type_in(ty, x, v, fv_v)).transpose()?,
                body: Box::new(subst_term_in(body, x, v, fv_v)?),
            }
        }
        Term::PotAbs { binder, domain, body } => {
            guard(binder)?;
            Term::PotAbs {
                binder: binder.clone(),
                domain: types::subst_type_in(domain, x, v, fv_v)?,
                body: Box::new(subst_term_in(body, x, v, fv_v)?),
            }
        }
        Term::Fix { binder, anno, body } => {
            guard(binder)?;
            Term::Fix {
                binder: binder.clone(),
                anno: types::subst_type_in(anno, x, v, fv_v)?,
                body: Box::new(subst_term_in(body, x, v, fv_v)?),
            }
        }
        Term::App(a, b) => Term::App(
            Box::new(subst_term_in(a, x, v, fv_v)?),
            Box::new(subst_term_in(b, x, v, fv_v)?),
        ),
        Term::Pair(a, b) => Term::Pair(
            Box::new(subst_term_in(a, x, v, fv_v)?),
            Box::new(subst_term_in(b, x, v, fv_v)?),
        ),
        Term::Proj1(e) => Term::Proj1(Box::new(subst_term_in(e, x, v, fv_v)?)),
        Term::Proj2(e) => Term::Proj2(Box::new(subst_term_in(e, x, v, fv_v)?)),
        Term::Tick(p, e) => Term::Tick(*p, Box::new(subst_term_in(e, x, v, fv_v)?)),
        Term::Let { binder, bound, body } => {
            guard(binder)?;
            Term::Let {
                binder: binder.clone(),
                bound: Box::new(subst_term_in(bound, x, v, fv_v)?),
                body: Box::new(subst_term_in(body, x, v, fv_v)?),
            }
        }
        Term::Con { ind, ctor, content, rec_args } => Term::Con {
            ind: ind.clone(),
            ctor: *ctor,
            content: Box::new(subst_term_in(content, x, v, fv_v)?),
            rec_args: rec_args.iter().map(|a| subst_term_in(a, x, v, fv_v)).collect::<Result<_, _>>()?,
        },
        Term::Matd { scrutinee, branches } => Term::Matd {
            scrutinee: Box::new(subst_term_in(scrutinee, x, v, fv_v)?),
            branches: branches
                .iter()
                .map(|br| {
                    for b in &br.binders {
                        guard(b)?;
                    }
                    Ok(Branch {
                        ctor: br.ctor,
                        binders: br.binders.clone(),
                        body: subst_term_in(&br.body, x, v, fv_v)?,
                    })
                })
                .collect::<Result<_, _>>()?,
        },
    })
}

pub fn alpha_eq_term(a: &Term, b: &Term) -> bool {
    alpha_term(a, b, &mut Vec::new())
}

pub(crate) fn alpha_term(a: &Term, b: &Term, env: &mut types::BinderEnv) -> bool {
    use Term::*;
    match (a, b) {
        (Var(x), Var(y)) => types::env_matches(env, x, y),
        (Int(i), Int(j)) => i == j,
        (Op(o1, a1), Op(o2, a2)) => {
            o1 == o2 && a1.len() == a2.len() && a1.iter().zip(a2).all(|(x, y)| alpha_term(x, y, env))
        }
        (Abs { binder: x, anno: t1, body: e1 }, Abs { binder: y, anno: t2, body: e2 }) => {
            let anno_ok = match (t1, t2) {
                (None, None) => true,
                (Some(t1), Some(t2)) => types::alpha_type(t1, t2, env),
                _ => false,
            };
            anno_ok && {
                env.push((x.clone(), y.clone()));
                let ok = alpha_term(e1, e2, env);
                env.pop();
                ok
            }
        }
        (PotAbs { binder: x, domain: d1, body: e1 }, PotAbs { binder: y, domain: d2, body: e2 }) => {
            types::alpha_type(d1, d2, env) && {
                env.push((x.clone(), y.clone()));
                let ok = alpha_term(e1, e2, env);
                env.pop();
                ok
            }
        }
        (Fix { binder: x, anno: t1, body: e1 }, Fix { binder: y, anno: t2, body: e2 }) => {
            types::alpha_type(t1, t2, env) && {
                env.push((x.clone(), y.clone()));
                let ok = alpha_term(e1, e2, env);
                env.pop();
                ok
            }
        }
        (App(a1, b1), App(a2, b2)) | (Pair(a1, b1), Pair(a2, b2)) => {
            alpha_term(a1, a2, env) && alpha_term(b1, b2, env)
        }
        (Proj1(x), Proj1(y)) | (Proj2(x), Proj2(y)) => alpha_term(x, y, env),
        (Tick(p, x), Tick(q, y)) => p == q && alpha_term(x, y, env),
        (Let { binder: x, bound: r1, body: e1 }, Let { binder: y, bound: r2, body: e2 }) => {
            alpha_term(r1, r2, env) && {
                env.push((x.clone(), y.clone()));
                let ok = alpha_term(e1, e2, env);
                env.pop();
                ok
            }
        }
        (
            Con { ind: i1, ctor: c1, content: e1, rec_args: r1 },
            Con { ind: i2, ctor: c2, content: e2, rec_args: r2 },
        ) => {
            c1 == c2
                && types::alpha_type(&TypeExpr::Ind(i1.clone()), &TypeExpr::Ind(i2.clone()), env)
                && alpha_term(e1, e2, env)
                && r1.len() == r2.len()
                && r1.iter().zip(r2).all(|(x, y)| alpha_term(x, y, env))
        }
        (Matd { scrutinee: s1, branches: b1 }, Matd { scrutinee: s2, branches: b2 }) => {
            alpha_term(s1, s2, env)
                && b1.len() == b2.len()
                && b1.iter().zip(b2).all(|(x, y)| {
                    x.ctor == y.ctor && x.binders.len() == y.binders.len() && {
                        let n = env.len();
                        for (bx, by) in x.binders.iter().zip(&y.binders) {
                            env.push((bx.clone(), by.clone()));
                        }
                        let ok = alpha_term(&x.body, &y.body, env);
                        env.truncate(n);
                        ok
                    }
                })
        }
        _ => false,
    }
}

// Value construction helpers for the library encodings.

pub fn unit_value() -> Term {
    Term::Con { ind: types::unit_type(), ctor: 0, content: Box::new(Term::Int(0)), rec_args: vec![] }
}

pub fn bool_value(b: bool) -> Term {
    Term::Con {
        ind: types::bool_type(),
        ctor: if b { 1 } else { 0 },
        content: Box::new(unit_value()),
        rec_args: vec![],
    }
}

pub fn nat_value(n: usize) -> Term {
    let nat = types::nat_type();
    let mut v = Term::Con { ind: nat.clone(), ctor: 0, content: Box::new(unit_value()), rec_args: vec![] };
    for _ in 0..n {
        v = Term::Con { ind: nat.clone(), ctor: 1, content: Box::new(unit_value()), rec_args: vec![v] };
    }
    v
}

pub fn list_value(elem_ty: TypeExpr, items: Vec<Term>) -> Term {
    let list = types::list_type(elem_ty);
    let mut v = Term::Con { ind: list.clone(), ctor: 0, content: Box::new(unit_value()), rec_args: vec![] };
    for item in items.into_iter().rev() {
        v = Term::Con { ind: list.clone(), ctor: 1, content: Box::new(item), rec_args: vec![v] };
    }
    v
}

pub fn int_list(items: &[i64]) -> Term {
    list_value(TypeExpr::Int, items.iter().map(|i| Term::Int(*i)).collect())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::syntax::printer::write_term(f, self)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// Keep the potential module linked in for doc purposes; terms and
// potentials substitute into each other.
#[allow(unused_imports)]
use potential as _potential;

#[cfg(test)]
mod tests {
    use super::*;

    fn li() -> TypeExpr {
        TypeExpr::Ind(types::list_type(TypeExpr::Int))
    }

    #[test]
    fn classify_follows_the_grammar() {
        // λx:List int. x is a value
        let lam = Term::Abs {
            binder: Ident::source("x"),
            anno: Some(li()),
            body: Box::new(Term::Var(Ident::source("x"))),
        };
        assert_eq!(classify_term(&lam), Class::Value);
        // a bare variable is a pre-value but not a value
        assert_eq!(classify_term(&Term::Var(Ident::source("x"))), Class::PreValue);
        // an application is neither
        let app = Term::App(Box::new(lam), Box::new(Term::Int(1)));
        assert_eq!(classify_term(&app), Class::Neither);
    }

    #[test]
    fn values_are_prevalues() {
        for v in [Term::Int(3), int_list(&[1, 2]), Term::Pair(Box::new(Term::Int(1)), Box::new(Term::Int(2)))] {
            assert_eq!(classify_term(&v), Class::Value);
            assert!(is_prevalue(&v));
        }
    }

    #[test]
    fn subst_replaces_free_occurrences_only() {
        let x = Ident::source("x");
        let y = Ident::source("y");
        // let y = x in y  — substituting x leaves the bound y alone
        let t = Term::Let {
            binder: y.clone(),
            bound: Box::new(Term::Var(x.clone())),
            body: Box::new(Term::Var(y.clone())),
        };
        let r = subst_term(&t, &x, &Term::Int(7)).unwrap();
        match r {
            Term::Let { bound, body, .. } => {
                assert_eq!(*bound, Term::Int(7));
                assert_eq!(*body, Term::Var(y));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn subst_detects_capture() {
        let x = Ident::source("x");
        let t = Term::Abs { binder: x.clone(), anno: None, body: Box::new(Term::Var(x.clone())) };
        assert!(subst_term(&t, &x, &Term::Int(1)).is_err());
    }

    #[test]
    fn typefv_sees_annotations() {
        let x = Ident::source("x");
        let anno = TypeExpr::arrow(
            Ident::source("a"),
            crate::potential::length_of(&x),
            li(),
            Ident::source("r"),
            crate::potential::PotExpr::zero(),
            li(),
        );
        let t = Term::Abs { binder: Ident::source("w"), anno: Some(anno), body: Box::new(Term::Int(0)) };
        assert!(typefv(&t).contains(&x));
        assert!(fv_term(&t).is_empty());
    }
}
