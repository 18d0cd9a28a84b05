//! Renderer for terms, types, and potentials. The output parses back to an
//! alpha-equivalent AST (round-trip property in the parser tests).

use std::fmt;

use num_traits::{One, Signed};

use crate::potential::{PotArg, PotExpr, Proj};
use crate::term::{OpKind, Term};

pub fn render_term(t: &Term) -> String {
    let mut s = String::new();
    let _ = fmt::write(&mut s, format_args!("{t}"));
    s
}

pub fn write_term(f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
    match t {
        Term::Var(x) => write!(f, "{x}"),
        Term::Int(i) => {
            if *i < 0 {
                write!(f, "({i})")
            } else {
                write!(f, "{i}")
            }
        }
        Term::Op(op, args) => {
            write!(f, "(")?;
            write_term(f, &args[0])?;
            write!(f, " {} ", op.symbol())?;
            write_term(f, &args[1])?;
            write!(f, ")")
        }
        Term::Abs { binder, anno, body } => {
            write!(f, "(fun {binder}")?;
            if let Some(ty) = anno {
                write!(f, " : {ty}")?;
            }
            write!(f, " . ")?;
            write_term(f, body)?;
            write!(f, ")")
        }
        Term::PotAbs { binder, domain, body } => {
            write!(f, "(Lam {binder} : {domain} . ")?;
            write_term(f, body)?;
            write!(f, ")")
        }
        Term::App(a, b) => {
            write!(f, "(")?;
            write_term(f, a)?;
            write!(f, " ")?;
            write_term(f, b)?;
            write!(f, ")")
        }
        Term::Pair(a, b) => {
            write!(f, "(")?;
            write_term(f, a)?;
            write!(f, ", ")?;
            write_term(f, b)?;
            write!(f, ")")
        }
        Term::Proj1(e) => {
            write!(f, "(fst ")?;
            write_term(f, e)?;
            write!(f, ")")
        }
        Term::Proj2(e) => {
            write!(f, "(snd ")?;
            write_term(f, e)?;
            write!(f, ")")
        }
        Term::Fix { binder, anno, body } => {
            write!(f, "(fix {binder} : {anno} . ")?;
            write_term(f, body)?;
            write!(f, ")")
        }
        Term::Tick(p, e) => {
            write!(f, "(tick {p} ")?;
            write_term(f, e)?;
            write!(f, ")")
        }
        Term::Let { binder, bound, body } => {
            write!(f, "(let {binder} = ")?;
            write_term(f, bound)?;
            write!(f, " in ")?;
            write_term(f, body)?;
            write!(f, ")")
        }
        Term::Con { ind, ctor, content, rec_args } => {
            let name = ind.ctors.get(*ctor).map(|c| c.name.as_str()).unwrap_or("?");
            write!(f, "{name}@{}(", ind.name)?;
            write_term(f, content)?;
            for a in rec_args {
                write!(f, ", ")?;
                write_term(f, a)?;
            }
            write!(f, ")")
        }
        Term::Matd { scrutinee, branches } => {
            write!(f, "matd ")?;
            write_term(f, scrutinee)?;
            write!(f, " {{ ")?;
            for (i, br) in branches.iter().enumerate() {
                if i > 0 {
                    write!(f, " | ")?;
                }
                write!(f, "#{}(", br.ctor)?;
                for (j, b) in br.binders.iter().enumerate() {
                    if j > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{b}")?;
                }
                write!(f, ") -> ")?;
                write_term(f, &br.body)?;
            }
            write!(f, " }}")
        }
    }
}

pub fn render_pot(p: &PotExpr) -> String {
    let mut s = String::new();
    let _ = fmt::write(&mut s, format_args!("{p}"));
    s
}

fn write_arg(f: &mut fmt::Formatter<'_>, a: &PotArg) -> fmt::Result {
    match a {
        PotArg::Path(p) => write!(f, "{p}"),
        PotArg::Val { val, projs } => {
            write!(f, "<")?;
            write_term(f, val)?;
            write!(f, ">")?;
            for p in projs {
                write!(f, ".{}", if *p == Proj::Fst { 1 } else { 2 })?;
            }
            Ok(())
        }
    }
}

pub fn write_pot(f: &mut fmt::Formatter<'_>, p: &PotExpr) -> fmt::Result {
    match p {
        PotExpr::Const(c) => {
            if c.is_integer() {
                write!(f, "{}", c.numer())
            } else {
                write!(f, "{}/{}", c.numer(), c.denom())
            }
        }
        PotExpr::PosInf => write!(f, "inf"),
        PotExpr::Var(a) => write_arg(f, a),
        PotExpr::Sum(fs) => {
            if fs.is_empty() {
                return write!(f, "0");
            }
            write!(f, "(")?;
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, " + ")?;
                }
                write_pot(f, g)?;
            }
            write!(f, ")")
        }
        PotExpr::Scale(q, g) => {
            if *q == -num_rational::BigRational::one() {
                write!(f, "(- ")?;
                write_pot(f, g)?;
                write!(f, ")")
            } else {
                if q.is_integer() && !q.is_negative() {
                    write!(f, "({} * ", q.numer())?;
                } else if q.is_integer() {
                    write!(f, "(({}) * ", q.numer())?;
                } else {
                    write!(f, "({}/{} * ", q.numer(), q.denom())?;
                }
                write_pot(f, g)?;
                write!(f, ")")
            }
        }
        PotExpr::Mul(fs) => {
            write!(f, "(")?;
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, " * ")?;
                }
                write_pot(f, g)?;
            }
            write!(f, ")")
        }
        PotExpr::Rec(m, a) => {
            match &m.name {
                Some(n) => write!(f, "{n}(")?,
                None => {
                    write!(f, "matd[")?;
                    for (i, br) in m.branches.iter().enumerate() {
                        if i > 0 {
                            write!(f, " | ")?;
                        }
                        write!(f, "#{i}(")?;
                        for (j, b) in br.binders.iter().enumerate() {
                            if j > 0 {
                                write!(f, ",")?;
                            }
                            write!(f, "{b}")?;
                        }
                        write!(f, ") -> ")?;
                        write_pot(f, &br.body)?;
                    }
                    write!(f, "](")?;
                }
            }
            write_arg(f, a)?;
            write!(f, ")")
        }
        PotExpr::SelfApp(s, a) => {
            write!(f, "{s}(")?;
            write_arg(f, a)?;
            write!(f, ")")
        }
        PotExpr::MinOver(x, dom, g) => {
            write!(f, "(min {x} : {dom} . ")?;
            write_pot(f, g)?;
            write!(f, ")")
        }
        PotExpr::MaxOver(x, dom, g) => {
            write!(f, "(max {x} : {dom} . ")?;
            write_pot(f, g)?;
            write!(f, ")")
        }
        PotExpr::Min2(a, b) => {
            write!(f, "min(")?;
            write_pot(f, a)?;
            write!(f, ", ")?;
            write_pot(f, b)?;
            write!(f, ")")
        }
        PotExpr::Max2(a, b) => {
            write!(f, "max(")?;
            write_pot(f, a)?;
            write!(f, ", ")?;
            write_pot(f, b)?;
            write!(f, ")")
        }
    }
}
