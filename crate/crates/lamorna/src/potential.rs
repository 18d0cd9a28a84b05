//! Potential functions: exact rationals plus `+∞`, variables addressed by
//! projection paths, linear and non-linear arithmetic, primitive recursions
//! over inductive values (measures), and symbolic min/max binders.

use std::collections::BTreeSet;
use std::fmt;
use std::rc::Rc;

use num_traits::{One, Signed, Zero};

use crate::ctx::Ctx;
use crate::ident::Ident;
use crate::term::{self, Term};
use crate::types::{self, BinderEnv, CaptureRisk, IndType, TypeExpr};

pub type Rat = num_rational::BigRational;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Proj {
    Fst,
    Snd,
}

/// A variable addressed through pair projections, e.g. `x.1.2`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Path {
    pub root: Ident,
    pub projs: Vec<Proj>,
}

impl Path {
    pub fn var(root: Ident) -> Self {
        Path { root, projs: vec![] }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)?;
        for p in &self.projs {
            write!(f, ".{}", if *p == Proj::Fst { 1 } else { 2 })?;
        }
        Ok(())
    }
}

/// Argument of a measure application or variable occurrence: either a path,
/// or a substituted pre-value with leftover projections kept symbolic.
#[derive(Clone, PartialEq, Eq)]
pub enum PotArg {
    Path(Path),
    Val { val: Box<Term>, projs: Vec<Proj> },
}

impl PotArg {
    pub fn var(x: &Ident) -> Self {
        PotArg::Path(Path::var(x.clone()))
    }
}

/// A primitive recursion template over one inductive type. Branch bodies may
/// refer to the branch binders and recurse through `SelfApp(self_binder, _)`
/// on recursive binders only, which guarantees termination by structural
/// descent. A measure whose bodies never use the self binder is a one-level
/// case analysis.
#[derive(Clone)]
pub struct Measure {
    /// Display name, ignored by equality.
    pub name: Option<String>,
    pub self_binder: Ident,
    pub ind: Rc<IndType>,
    pub branches: Vec<PotBranch>,
}

#[derive(Clone, PartialEq, Eq)]
pub struct PotBranch {
    pub binders: Vec<Ident>,
    pub body: PotExpr,
}

impl PartialEq for Measure {
    fn eq(&self, other: &Self) -> bool {
        alpha_eq_measure(self, other)
    }
}
impl Eq for Measure {}

pub fn alpha_eq_measure(a: &Measure, b: &Measure) -> bool {
    if a.ind != b.ind || a.branches.len() != b.branches.len() {
        return false;
    }
    let mut env: BinderEnv = vec![(a.self_binder.clone(), b.self_binder.clone())];
    a.branches.iter().zip(&b.branches).all(|(x, y)| {
        x.binders.len() == y.binders.len() && {
            let n = env.len();
            for (bx, by) in x.binders.iter().zip(&y.binders) {
                env.push((bx.clone(), by.clone()));
            }
            let ok = alpha_pot(&x.body, &y.body, &mut env);
            env.truncate(n);
            ok
        }
    })
}

#[derive(Clone, PartialEq, Eq)]
pub enum PotExpr {
    Const(Rat),
    PosInf,
    Var(PotArg),
    /// n-ary sum; the empty sum is 0.
    Sum(Vec<PotExpr>),
    /// scalar multiple `q · f`; `q = -1` is negation.
    Scale(Rat, Box<PotExpr>),
    /// non-linear product of factors.
    Mul(Vec<PotExpr>),
    /// measure (primitive recursion) applied to an argument.
    Rec(Rc<Measure>, PotArg),
    /// recursive call on a structural component, only inside measure bodies.
    SelfApp(Ident, PotArg),
    MinOver(Ident, TypeExpr, Box<PotExpr>),
    MaxOver(Ident, TypeExpr, Box<PotExpr>),
    Min2(Box<PotExpr>, Box<PotExpr>),
    Max2(Box<PotExpr>, Box<PotExpr>),
}

impl PotExpr {
    pub fn zero() -> PotExpr {
        PotExpr::Const(Rat::zero())
    }

    pub fn cnst(n: i64) -> PotExpr {
        PotExpr::Const(Rat::from_integer(n.into()))
    }

    pub fn var(x: &Ident) -> PotExpr {
        PotExpr::Var(PotArg::var(x))
    }

    pub fn add(a: PotExpr, b: PotExpr) -> PotExpr {
        PotExpr::Sum(vec![a, b])
    }

    pub fn sub(a: PotExpr, b: PotExpr) -> PotExpr {
        PotExpr::Sum(vec![a, PotExpr::Scale(-Rat::one(), Box::new(b))])
    }

    pub fn scale(q: Rat, f: PotExpr) -> PotExpr {
        PotExpr::Scale(q, Box::new(f))
    }

    pub fn mul(a: PotExpr, b: PotExpr) -> PotExpr {
        PotExpr::Mul(vec![a, b])
    }

    pub fn min2(a: PotExpr, b: PotExpr) -> PotExpr {
        PotExpr::Min2(Box::new(a), Box::new(b))
    }

    pub fn max2(a: PotExpr, b: PotExpr) -> PotExpr {
        PotExpr::Max2(Box::new(a), Box::new(b))
    }

    pub fn is_zero_const(&self) -> bool {
        matches!(self, PotExpr::Const(c) if c.is_zero())
    }
}

/// The standard list length measure.
pub fn length_measure(elem: TypeExpr) -> Rc<Measure> {
    let ind = types::list_type(elem);
    let f = Ident::source("%len");
    let x0 = Ident::source("%x0");
    let x1 = Ident::source("%x1");
    Rc::new(Measure {
        name: Some("length".into()),
        self_binder: f.clone(),
        ind,
        branches: vec![
            PotBranch { binders: vec![x0.clone()], body: PotExpr::zero() },
            PotBranch {
                binders: vec![x0, x1.clone()],
                body: PotExpr::add(PotExpr::cnst(1), PotExpr::SelfApp(f, PotArg::var(&x1))),
            },
        ],
    })
}

/// `length(x)` over `List(int)`, a convenience used all over the tests.
pub fn length_of(x: &Ident) -> PotExpr {
    PotExpr::Rec(length_measure(TypeExpr::Int), PotArg::var(x))
}

/// The successor-counting measure over the Nat encoding.
pub fn count_measure() -> Rc<Measure> {
    let ind = types::nat_type();
    let f = Ident::source("%cnt");
    let x0 = Ident::source("%x0");
    let x1 = Ident::source("%x1");
    Rc::new(Measure {
        name: Some("count".into()),
        self_binder: f.clone(),
        ind,
        branches: vec![
            PotBranch { binders: vec![x0.clone()], body: PotExpr::zero() },
            PotBranch {
                binders: vec![x0, x1.clone()],
                body: PotExpr::add(PotExpr::cnst(1), PotExpr::SelfApp(f, PotArg::var(&x1))),
            },
        ],
    })
}

pub fn count_of(x: &Ident) -> PotExpr {
    PotExpr::Rec(count_measure(), PotArg::var(x))
}

// ---------------------------------------------------------------------------
// Free variables
// ---------------------------------------------------------------------------

pub fn fv_pot(f: &PotExpr) -> BTreeSet<Ident> {
    let mut s = BTreeSet::new();
    fv_pot_into(f, &mut s, &mut Vec::new());
    s
}

fn fv_arg_into(a: &PotArg, out: &mut BTreeSet<Ident>, bound: &mut Vec<Ident>) {
    match a {
        PotArg::Path(p) => {
            if !bound.contains(&p.root) {
                out.insert(p.root.clone());
            }
        }
        PotArg::Val { val, .. } => {
            for x in term::fv_term(val) {
                if !bound.contains(&x) {
                    out.insert(x);
                }
            }
        }
    }
}

fn fv_pot_into(f: &PotExpr, out: &mut BTreeSet<Ident>, bound: &mut Vec<Ident>) {
    match f {
        PotExpr::Const(_) | PotExpr::PosInf => {}
        PotExpr::Var(a) => fv_arg_into(a, out, bound),
        PotExpr::Sum(fs) | PotExpr::Mul(fs) => fs.iter().for_each(|g| fv_pot_into(g, out, bound)),
        PotExpr::Scale(_, g) => fv_pot_into(g, out, bound),
        PotExpr::Rec(m, a) => {
            fv_arg_into(a, out, bound);
            let n = bound.len();
            bound.push(m.self_binder.clone());
            for br in &m.branches {
                let k = bound.len();
                bound.extend(br.binders.iter().cloned());
                fv_pot_into(&br.body, out, bound);
                bound.truncate(k);
            }
            bound.truncate(n);
        }
        PotExpr::SelfApp(self_b, a) => {
            if !bound.contains(self_b) {
                out.insert(self_b.clone());
            }
            fv_arg_into(a, out, bound);
        }
        PotExpr::MinOver(x, dom, g) | PotExpr::MaxOver(x, dom, g) => {
            out.extend(types::fv_type(dom));
            bound.push(x.clone());
            fv_pot_into(g, out, bound);
            bound.pop();
        }
        PotExpr::Min2(a, b) | PotExpr::Max2(a, b) => {
            fv_pot_into(a, out, bound);
            fv_pot_into(b, out, bound);
        }
    }
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

/// `f[x ↦ pv]` for a pre-value `pv`. Paths rooted at `x` are re-rooted at
/// `pv`, with projections pushed into pair pre-values where possible and
/// kept symbolic otherwise.
pub fn subst_pot(f: &PotExpr, x: &Ident, pv: &Term) -> Result<PotExpr, CaptureRisk> {
    let fv_v = term::fv_term(pv);
    subst_pot_in(f, x, pv, &fv_v)
}

pub(crate) fn subst_pot_in(
    f: &PotExpr,
    x: &Ident,
    pv: &Term,
    fv_v: &BTreeSet<Ident>,
) -> Result<PotExpr, CaptureRisk> {
    let guard = |binder: &Ident| -> Result<(), CaptureRisk> {
        if binder == x || fv_v.contains(binder) {
            Err(CaptureRisk { binder: binder.clone() })
        } else {
            Ok(())
        }
    };
    Ok(match f {
        PotExpr::Const(_) | PotExpr::PosInf => f.clone(),
        PotExpr::Var(a) => match subst_arg(a, x, pv, fv_v)? {
            SubstArg::Unchanged => f.clone(),
            SubstArg::Arg(a2) => PotExpr::Var(a2),
            SubstArg::Resolved(g) => g,
        },
        PotExpr::Sum(fs) => PotExpr::Sum(
            fs.iter().map(|g| subst_pot_in(g, x, pv, fv_v)).collect::<Result<_, _>>()?,
        ),
        PotExpr::Mul(fs) => PotExpr::Mul(
            fs.iter().map(|g| subst_pot_in(g, x, pv, fv_v)).collect::<Result<_, _>>()?,
        ),
        PotExpr::Scale(q, g) => PotExpr::Scale(q.clone(), Box::new(subst_pot_in(g, x, pv, fv_v)?)),
        PotExpr::Rec(m, a) => {
            // Measure templates are closed under their own binders; ambient
            // occurrences inside branch bodies are substituted as well.
            guard(&m.self_binder).ok();
            let m2 = subst_measure(m, x, pv, fv_v)?;
            match subst_arg(a, x, pv, fv_v)? {
                SubstArg::Unchanged => PotExpr::Rec(m2, a.clone()),
                SubstArg::Arg(a2) => PotExpr::Rec(m2, a2),
                SubstArg::Resolved(_) => PotExpr::Rec(m2, val_arg(pv.clone(), vec![])),
            }
        }
        PotExpr::SelfApp(s, a) => {
            let a2 = match subst_arg(a, x, pv, fv_v)? {
                SubstArg::Unchanged => a.clone(),
                SubstArg::Arg(a2) => a2,
                SubstArg::Resolved(_) => val_arg(pv.clone(), vec![]),
            };
            PotExpr::SelfApp(s.clone(), a2)
        }
        PotExpr::MinOver(b, dom, g) => {
            guard(b)?;
            PotExpr::MinOver(
                b.clone(),
                types::subst_type_in(dom, x, pv, fv_v)?,
                Box::new(subst_pot_in(g, x, pv, fv_v)?),
            )
        }
        PotExpr::MaxOver(b, dom, g) => {
            guard(b)?;
            PotExpr::MaxOver(
                b.clone(),
                types::subst_type_in(dom, x, pv, fv_v)?,
                Box::new(subst_pot_in(g, x, pv, fv_v)?),
            )
        }
        PotExpr::Min2(a, b) => {
            PotExpr::min2(subst_pot_in(a, x, pv, fv_v)?, subst_pot_in(b, x, pv, fv_v)?)
        }
        PotExpr::Max2(a, b) => {
            PotExpr::max2(subst_pot_in(a, x, pv, fv_v)?, subst_pot_in(b, x, pv, fv_v)?)
        }
    })
}

fn subst_measure(
    m: &Rc<Measure>,
    x: &Ident,
    pv: &Term,
    fv_v: &BTreeSet<Ident>,
) -> Result<Rc<Measure>, CaptureRisk> {
    let mut changed = false;
    let mut branches = Vec::with_capacity(m.branches.len());
    for br in &m.branches {
        if br.binders.iter().any(|b| b == x) {
            // shadowed inside this branch
            branches.push(br.clone());
            continue;
        }
        for b in &br.binders {
            if fv_v.contains(b) {
                return Err(CaptureRisk { binder: b.clone() });
            }
        }
        let body = subst_pot_in(&br.body, x, pv, fv_v)?;
        if body != br.body {
            changed = true;
        }
        branches.push(PotBranch { binders: br.binders.clone(), body });
    }
    if changed {
        Ok(Rc::new(Measure {
            name: m.name.clone(),
            self_binder: m.self_binder.clone(),
            ind: m.ind.clone(),
            branches,
        }))
    } else {
        Ok(m.clone())
    }
}

enum SubstArg {
    Unchanged,
    Arg(PotArg),
    /// Path fully resolved into a potential expression (int-typed position).
    Resolved(PotExpr),
}

pub(crate) fn val_arg(val: Term, projs: Vec<Proj>) -> PotArg {
    PotArg::Val { val: Box::new(val), projs }
}

/// Resolve as many projections into pair pre-values as possible.
pub(crate) fn resolve_projs(val: &Term, projs: &[Proj]) -> (Term, Vec<Proj>) {
    let mut cur = val.clone();
    let mut i = 0;
    while i < projs.len() {
        match (&cur, projs[i]) {
            (Term::Pair(a, _), Proj::Fst) => cur = (**a).clone(),
            (Term::Pair(_, b), Proj::Snd) => cur = (**b).clone(),
            _ => break,
        }
        i += 1;
    }
    (cur, projs[i..].to_vec())
}

fn subst_arg(a: &PotArg, x: &Ident, pv: &Term, fv_v: &BTreeSet<Ident>) -> Result<SubstArg, CaptureRisk> {
    match a {
        PotArg::Path(p) if p.root == *x => {
            let (resolved, rest) = resolve_projs(pv, &p.projs);
            if rest.is_empty() {
                match &resolved {
                    Term::Var(y) => Ok(SubstArg::Arg(PotArg::Path(Path::var(y.clone())))),
                    Term::Int(i) => Ok(SubstArg::Resolved(PotExpr::cnst(*i))),
                    Term::Op(op, args) => Ok(SubstArg::Resolved(embed_int_prevalue(*op, args)?)),
                    _ => Ok(SubstArg::Arg(val_arg(resolved, vec![]))),
                }
            } else {
                match &resolved {
                    Term::Var(y) => {
                        Ok(SubstArg::Arg(PotArg::Path(Path { root: y.clone(), projs: rest })))
                    }
                    _ => Ok(SubstArg::Arg(val_arg(resolved, rest))),
                }
            }
        }
        PotArg::Path(_) => Ok(SubstArg::Unchanged),
        PotArg::Val { val, projs } => {
            let val2 = term::subst_term_in(val, x, pv, fv_v)?;
            if val2 == **val {
                Ok(SubstArg::Unchanged)
            } else {
                let (resolved, rest) = resolve_projs(&val2, projs);
                Ok(SubstArg::Arg(val_arg(resolved, rest)))
            }
        }
    }
}

/// Embed an int-typed arithmetic pre-value into the potential language.
fn embed_int_prevalue(op: term::OpKind, args: &[Term]) -> Result<PotExpr, CaptureRisk> {
    let embed = |t: &Term| -> Result<PotExpr, CaptureRisk> {
        match t {
            Term::Int(i) => Ok(PotExpr::cnst(*i)),
            Term::Var(y) => Ok(PotExpr::var(y)),
            Term::Op(op, args) => embed_int_prevalue(*op, args),
            other => Ok(PotExpr::Var(val_arg(other.clone(), vec![]))),
        }
    };
    let a = embed(&args[0])?;
    let b = embed(&args[1])?;
    Ok(match op {
        term::OpKind::Add => PotExpr::add(a, b),
        term::OpKind::Sub => PotExpr::sub(a, b),
        term::OpKind::Mul => PotExpr::mul(a, b),
        term::OpKind::Lt => PotExpr::Var(val_arg(Term::Op(op, args.to_vec()), vec![])),
    })
}

// ---------------------------------------------------------------------------
// Alpha equivalence
// ---------------------------------------------------------------------------

pub fn alpha_eq_pot(a: &PotExpr, b: &PotExpr) -> bool {
    alpha_pot(a, b, &mut Vec::new())
}

fn alpha_arg(a: &PotArg, b: &PotArg, env: &mut BinderEnv) -> bool {
    match (a, b) {
        (PotArg::Path(p), PotArg::Path(q)) => {
            p.projs == q.projs && types::env_matches(env, &p.root, &q.root)
        }
        (PotArg::Val { val: v1, projs: p1 }, PotArg::Val { val: v2, projs: p2 }) => {
            p1 == p2 && term::alpha_term(v1, v2, env)
        }
        _ => false,
    }
}

pub(crate) fn alpha_pot(a: &PotExpr, b: &PotExpr, env: &mut BinderEnv) -> bool {
    use PotExpr::*;
    match (a, b) {
        (Const(x), Const(y)) => x == y,
        (PosInf, PosInf) => true,
        (Var(x), Var(y)) => alpha_arg(x, y, env),
        (Sum(xs), Sum(ys)) | (Mul(xs), Mul(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_pot(x, y, env))
        }
        (Scale(q, x), Scale(r, y)) => q == r && alpha_pot(x, y, env),
        (Rec(m, x), Rec(n, y)) => {
            alpha_arg(x, y, env) && {
                // measure templates compare with their own binder pairing
                alpha_measures_under(m, n, env)
            }
        }
        (SelfApp(s, x), SelfApp(t, y)) => types::env_matches(env, s, t) && alpha_arg(x, y, env),
        (MinOver(x, d1, f), MinOver(y, d2, g)) | (MaxOver(x, d1, f), MaxOver(y, d2, g)) => {
            types::alpha_type(d1, d2, env) && {
                env.push((x.clone(), y.clone()));
                let ok = alpha_pot(f, g, env);
                env.pop();
                ok
            }
        }
        (Min2(a1, b1), Min2(a2, b2)) | (Max2(a1, b1), Max2(a2, b2)) => {
            alpha_pot(a1, a2, env) && alpha_pot(b1, b2, env)
        }
        _ => false,
    }
}

fn alpha_measures_under(m: &Measure, n: &Measure, env: &mut BinderEnv) -> bool {
    if m.ind != n.ind || m.branches.len() != n.branches.len() {
        return false;
    }
    env.push((m.self_binder.clone(), n.self_binder.clone()));
    let ok = m.branches.iter().zip(&n.branches).all(|(x, y)| {
        x.binders.len() == y.binders.len() && {
            let k = env.len();
            for (bx, by) in x.binders.iter().zip(&y.binders) {
                env.push((bx.clone(), by.clone()));
            }
            let r = alpha_pot(&x.body, &y.body, env);
            env.truncate(k);
            r
        }
    });
    env.pop();
    ok
}

// ---------------------------------------------------------------------------
// Well-formedness
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WfError {
    /// variable (path root) not bound in either context
    UnboundVariable(Ident),
    /// path does not resolve to the required type
    PathType(String),
    /// a variable carries different types in the two contexts
    ContextClash(Ident),
    /// non-linear factors must draw on pairwise-disjoint context slices
    NonLinearOverlap(Ident),
    /// self binder applied to something that is not a recursive binder
    NonStructuralRecursion(Ident),
    /// measure branch count does not match the inductive type
    MeasureShape(String),
}

impl fmt::Display for WfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WfError::UnboundVariable(x) => write!(f, "unbound variable {x} in potential"),
            WfError::PathType(m) => write!(f, "ill-typed path: {m}"),
            WfError::ContextClash(x) => write!(f, "{x} bound with different types in the two contexts"),
            WfError::NonLinearOverlap(x) => {
                write!(f, "non-linear factors share the variable {x}")
            }
            WfError::NonStructuralRecursion(x) => {
                write!(f, "recursive call on non-recursive binder {x}")
            }
            WfError::MeasureShape(m) => write!(f, "malformed measure: {m}"),
        }
    }
}

/// Type of a path under the two contexts, following projections through
/// products.
pub fn path_type(omega: &Ctx, gamma: &Ctx, p: &Path) -> Result<TypeExpr, WfError> {
    let to = omega.lookup(&p.root);
    let tg = gamma.lookup(&p.root);
    let mut ty = match (to, tg) {
        (Some(a), Some(b)) => {
            if types::alpha_eq_type(a, b) {
                a.clone()
            } else {
                return Err(WfError::ContextClash(p.root.clone()));
            }
        }
        (Some(a), None) => a.clone(),
        (None, Some(b)) => b.clone(),
        (None, None) => return Err(WfError::UnboundVariable(p.root.clone())),
    };
    for proj in &p.projs {
        ty = match (ty, proj) {
            (TypeExpr::Prod(a, _), Proj::Fst) => *a,
            (TypeExpr::Prod(_, b), Proj::Snd) => *b,
            (other, _) => return Err(WfError::PathType(format!("projection from non-product {other}"))),
        };
    }
    Ok(ty)
}

/// Well-formedness per the potential-function rules: constants anywhere;
/// int variables from Ω ∪ Γ; linear ops under one context; non-linear ops
/// under pairwise-disjoint slices of the context; primitive recursion in
/// PCons shape with an int-typed self binder. A variable common to both
/// contexts must carry the same type in both.
pub fn wf_potential(omega: &Ctx, gamma: &Ctx, f: &PotExpr) -> Result<(), WfError> {
    for (x, t) in omega.iter() {
        if let Some(t2) = gamma.lookup(x) {
            if !types::alpha_eq_type(t, t2) {
                return Err(WfError::ContextClash(x.clone()));
            }
        }
    }
    wf_pot(omega, gamma, f)
}

fn wf_pot(omega: &Ctx, gamma: &Ctx, f: &PotExpr) -> Result<(), WfError> {
    match f {
        PotExpr::Const(_) | PotExpr::PosInf => Ok(()),
        PotExpr::Var(a) => match a {
            PotArg::Path(p) => {
                let ty = path_type(omega, gamma, p)?;
                if ty == TypeExpr::Int {
                    Ok(())
                } else {
                    Err(WfError::PathType(format!("{p} : {ty} used as int")))
                }
            }
            PotArg::Val { .. } => Ok(()),
        },
        PotExpr::Sum(fs) => fs.iter().try_for_each(|g| wf_pot(omega, gamma, g)),
        PotExpr::Scale(_, g) => wf_pot(omega, gamma, g),
        PotExpr::Mul(fs) => {
            // POp-Non-Linear: factors draw on pairwise-disjoint context
            // slices. Enforced literally via the factors' free variables.
            let fvs: Vec<BTreeSet<Ident>> = fs.iter().map(fv_pot).collect();
            for i in 0..fvs.len() {
                for j in (i + 1)..fvs.len() {
                    if let Some(x) = fvs[i].intersection(&fvs[j]).next() {
                        return Err(WfError::NonLinearOverlap(x.clone()));
                    }
                }
            }
            fs.iter().try_for_each(|g| wf_pot(omega, gamma, g))
        }
        PotExpr::Rec(m, a) => {
            let arg_ty = match a {
                PotArg::Path(p) => Some(path_type(omega, gamma, p)?),
                PotArg::Val { .. } => None,
            };
            if let Some(ty) = arg_ty {
                if ty != TypeExpr::Ind(m.ind.clone()) {
                    return Err(WfError::PathType(format!("measure scrutinee has type {ty}")));
                }
            }
            wf_measure(omega, gamma, m)
        }
        PotExpr::SelfApp(s, _) => Err(WfError::NonStructuralRecursion(s.clone())),
        PotExpr::MinOver(x, dom, g) | PotExpr::MaxOver(x, dom, g) => {
            let mut om = omega.clone();
            om.push(x.clone(), dom.clone());
            wf_pot(&om, gamma, g)
        }
        PotExpr::Min2(a, b) | PotExpr::Max2(a, b) => {
            wf_pot(omega, gamma, a)?;
            wf_pot(omega, gamma, b)
        }
    }
}

/// PCons shape: one branch per constructor; branch `i` binds the content at
/// the constructor's content type and `m_i` recursive binders at the
/// inductive type; the self binder may only be applied to recursive binders.
pub fn wf_measure(omega: &Ctx, gamma: &Ctx, m: &Measure) -> Result<(), WfError> {
    if m.branches.len() != m.ind.ctors.len() {
        return Err(WfError::MeasureShape(format!(
            "{} branches for {} constructors",
            m.branches.len(),
            m.ind.ctors.len()
        )));
    }
    for (i, br) in m.branches.iter().enumerate() {
        let ctor = &m.ind.ctors[i];
        if br.binders.len() != 1 + ctor.copies {
            return Err(WfError::MeasureShape(format!(
                "branch {} binds {} names, expected {}",
                ctor.name,
                br.binders.len(),
                1 + ctor.copies
            )));
        }
        let mut om = omega.clone();
        om.push(br.binders[0].clone(), ctor.content.clone());
        let recursive: BTreeSet<&Ident> = br.binders[1..].iter().collect();
        for b in &br.binders[1..] {
            om.push(b.clone(), TypeExpr::Ind(m.ind.clone()));
        }
        wf_measure_body(&om, gamma, &br.body, &m.self_binder, &recursive)?;
    }
    Ok(())
}

fn wf_measure_body(
    omega: &Ctx,
    gamma: &Ctx,
    f: &PotExpr,
    self_binder: &Ident,
    recursive: &BTreeSet<&Ident>,
) -> Result<(), WfError> {
    match f {
        PotExpr::SelfApp(s, a) => {
            if s != self_binder {
                return Err(WfError::NonStructuralRecursion(s.clone()));
            }
            match a {
                PotArg::Path(p) if p.projs.is_empty() && recursive.contains(&p.root) => Ok(()),
                _ => Err(WfError::NonStructuralRecursion(s.clone())),
            }
        }
        PotExpr::Sum(fs) | PotExpr::Mul(fs) => fs
            .iter()
            .try_for_each(|g| wf_measure_body(omega, gamma, g, self_binder, recursive)),
        PotExpr::Scale(_, g) => wf_measure_body(omega, gamma, g, self_binder, recursive),
        PotExpr::Min2(a, b) | PotExpr::Max2(a, b) => {
            wf_measure_body(omega, gamma, a, self_binder, recursive)?;
            wf_measure_body(omega, gamma, b, self_binder, recursive)
        }
        other => wf_pot(omega, gamma, other),
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Extended rationals: finite values and `+∞`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Ext {
    Finite(Rat),
    PosInf,
}

impl Ext {
    pub fn zero() -> Ext {
        Ext::Finite(Rat::zero())
    }

    pub fn add(&self, other: &Ext) -> Ext {
        match (self, other) {
            (Ext::Finite(a), Ext::Finite(b)) => Ext::Finite(a + b),
            _ => Ext::PosInf,
        }
    }

    pub fn mul(&self, other: &Ext) -> Ext {
        match (self, other) {
            (Ext::Finite(a), Ext::Finite(b)) => Ext::Finite(a * b),
            (Ext::Finite(a), Ext::PosInf) | (Ext::PosInf, Ext::Finite(a)) => {
                if a.is_zero() {
                    Ext::zero()
                } else {
                    Ext::PosInf
                }
            }
            _ => Ext::PosInf,
        }
    }

    pub fn scale(&self, q: &Rat) -> Ext {
        match self {
            Ext::Finite(a) => Ext::Finite(a * q),
            Ext::PosInf => {
                if q.is_zero() {
                    Ext::zero()
                } else {
                    Ext::PosInf
                }
            }
        }
    }

    pub fn min(&self, other: &Ext) -> Ext {
        match (self, other) {
            (Ext::Finite(a), Ext::Finite(b)) => Ext::Finite(a.min(b).clone()),
            (Ext::Finite(a), Ext::PosInf) | (Ext::PosInf, Ext::Finite(a)) => Ext::Finite(a.clone()),
            _ => Ext::PosInf,
        }
    }

    pub fn max(&self, other: &Ext) -> Ext {
        match (self, other) {
            (Ext::Finite(a), Ext::Finite(b)) => Ext::Finite(a.max(b).clone()),
            _ => Ext::PosInf,
        }
    }

    pub fn le(&self, other: &Ext) -> bool {
        match (self, other) {
            (Ext::Finite(a), Ext::Finite(b)) => a <= b,
            (_, Ext::PosInf) => true,
            (Ext::PosInf, Ext::Finite(_)) => false,
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Finite(r) => write!(f, "{r}"),
            Ext::PosInf => write!(f, "inf"),
        }
    }
}

pub type MeasureEnv = std::collections::BTreeMap<Ident, Term>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PotEvalError {
    UnboundVariable(Ident),
    /// a MinOver/MaxOver survived simplification
    UnresolvedBinder(Ident),
    IllTyped(String),
}

impl fmt::Display for PotEvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotEvalError::UnboundVariable(x) => write!(f, "unbound variable {x}"),
            PotEvalError::UnresolvedBinder(x) => write!(f, "unresolved min/max binder {x}"),
            PotEvalError::IllTyped(m) => write!(f, "ill-typed potential: {m}"),
        }
    }
}

/// Total on well-formed inputs whose variables are bound to values in `env`.
/// Primitive recursions unfold structurally; surviving Min/Max binders are
/// an error (simplify must eliminate them first).
pub fn eval_potential(f: &PotExpr, env: &MeasureEnv) -> Result<Ext, PotEvalError> {
    match f {
        PotExpr::Const(c) => Ok(Ext::Finite(c.clone())),
        PotExpr::PosInf => Ok(Ext::PosInf),
        PotExpr::Var(a) => {
            let v = resolve_arg(a, env)?;
            match v {
                Term::Int(i) => Ok(Ext::Finite(Rat::from_integer(i.into()))),
                other => Err(PotEvalError::IllTyped(format!("variable resolved to non-int {other}"))),
            }
        }
        PotExpr::Sum(fs) => {
            let mut acc = Ext::zero();
            for g in fs {
                acc = acc.add(&eval_potential(g, env)?);
            }
            Ok(acc)
        }
        PotExpr::Mul(fs) => {
            let mut acc = Ext::Finite(Rat::one());
            for g in fs {
                acc = acc.mul(&eval_potential(g, env)?);
            }
            Ok(acc)
        }
        PotExpr::Scale(q, g) => {
            if q.is_negative() {
                match eval_potential(g, env)? {
                    Ext::Finite(a) => Ok(Ext::Finite(a * q)),
                    Ext::PosInf => Err(PotEvalError::IllTyped("negative scale of +inf".into())),
                }
            } else {
                Ok(eval_potential(g, env)?.scale(q))
            }
        }
        PotExpr::Rec(m, a) => {
            let v = resolve_arg(a, env)?;
            eval_measure(m, &v, env)
        }
        PotExpr::SelfApp(s, _) => Err(PotEvalError::UnboundVariable(s.clone())),
        PotExpr::MinOver(x, _, _) | PotExpr::MaxOver(x, _, _) => {
            Err(PotEvalError::UnresolvedBinder(x.clone()))
        }
        PotExpr::Min2(a, b) => Ok(eval_potential(a, env)?.min(&eval_potential(b, env)?)),
        PotExpr::Max2(a, b) => Ok(eval_potential(a, env)?.max(&eval_potential(b, env)?)),
    }
}

fn resolve_arg(a: &PotArg, env: &MeasureEnv) -> Result<Term, PotEvalError> {
    match a {
        PotArg::Path(p) => {
            let mut v = env
                .get(&p.root)
                .cloned()
                .ok_or_else(|| PotEvalError::UnboundVariable(p.root.clone()))?;
            for proj in &p.projs {
                v = match (v, proj) {
                    (Term::Pair(a, _), Proj::Fst) => *a,
                    (Term::Pair(_, b), Proj::Snd) => *b,
                    (other, _) => {
                        return Err(PotEvalError::IllTyped(format!("projection from {other}")))
                    }
                };
            }
            Ok(v)
        }
        PotArg::Val { val, projs } => {
            let mut t = (**val).clone();
            for (x, v) in env.iter() {
                if term::fv_term(&t).contains(x) {
                    t = term::subst_term(&t, x, v)
                        .map_err(|e| PotEvalError::IllTyped(format!("capture during env subst: {}", e.binder)))?;
                }
            }
            let t = eval_closed_prevalue(&t)?;
            let (resolved, rest) = resolve_projs(&t, projs);
            if rest.is_empty() {
                Ok(resolved)
            } else {
                Err(PotEvalError::IllTyped("unresolvable projections".into()))
            }
        }
    }
}

/// Reduce a closed pre-value to a value by folding arithmetic operations.
pub fn eval_closed_prevalue(t: &Term) -> Result<Term, PotEvalError> {
    Ok(match t {
        Term::Var(x) => return Err(PotEvalError::UnboundVariable(x.clone())),
        Term::Int(_) | Term::Abs { .. } | Term::PotAbs { .. } => t.clone(),
        Term::Op(op, args) => {
            let vals = args.iter().map(eval_closed_prevalue).collect::<Result<Vec<_>, _>>()?;
            match (vals[0].clone(), vals[1].clone()) {
                (Term::Int(a), Term::Int(b)) => match op {
                    term::OpKind::Add => Term::Int(a + b),
                    term::OpKind::Sub => Term::Int(a - b),
                    term::OpKind::Mul => Term::Int(a * b),
                    term::OpKind::Lt => term::bool_value(a < b),
                },
                _ => return Err(PotEvalError::IllTyped("arithmetic on non-int".into())),
            }
        }
        Term::Pair(a, b) => Term::Pair(
            Box::new(eval_closed_prevalue(a)?),
            Box::new(eval_closed_prevalue(b)?),
        ),
        Term::Con { ind, ctor, content, rec_args } => Term::Con {
            ind: ind.clone(),
            ctor: *ctor,
            content: Box::new(eval_closed_prevalue(content)?),
            rec_args: rec_args.iter().map(eval_closed_prevalue).collect::<Result<_, _>>()?,
        },
        other => return Err(PotEvalError::IllTyped(format!("not a pre-value: {other}"))),
    })
}

fn eval_measure(m: &Measure, v: &Term, env: &MeasureEnv) -> Result<Ext, PotEvalError> {
    match v {
        Term::Con { ctor, content, rec_args, .. } => {
            let br = m
                .branches
                .get(*ctor)
                .ok_or_else(|| PotEvalError::IllTyped("constructor index out of range".into()))?;
            if br.binders.len() != 1 + rec_args.len() {
                return Err(PotEvalError::IllTyped("measure arity mismatch".into()));
            }
            let mut local = env.clone();
            local.insert(br.binders[0].clone(), (**content).clone());
            for (b, a) in br.binders[1..].iter().zip(rec_args) {
                local.insert(b.clone(), a.clone());
            }
            eval_measure_body(m, &br.body, &local)
        }
        other => Err(PotEvalError::IllTyped(format!("measure applied to non-constructor {other}"))),
    }
}

fn eval_measure_body(m: &Measure, f: &PotExpr, env: &MeasureEnv) -> Result<Ext, PotEvalError> {
    match f {
        PotExpr::SelfApp(s, a) if *s == m.self_binder => {
            let v = resolve_arg(a, env)?;
            eval_measure(m, &v, env)
        }
        PotExpr::Sum(fs) => {
            let mut acc = Ext::zero();
            for g in fs {
                acc = acc.add(&eval_measure_body(m, g, env)?);
            }
            Ok(acc)
        }
        PotExpr::Mul(fs) => {
            let mut acc = Ext::Finite(Rat::one());
            for g in fs {
                acc = acc.mul(&eval_measure_body(m, g, env)?);
            }
            Ok(acc)
        }
        PotExpr::Scale(q, g) => Ok(eval_measure_body(m, g, env)?.scale(q)),
        PotExpr::Min2(a, b) => Ok(eval_measure_body(m, a, env)?.min(&eval_measure_body(m, b, env)?)),
        PotExpr::Max2(a, b) => Ok(eval_measure_body(m, b, env)?.max(&eval_measure_body(m, a, env)?)),
        other => eval_potential(other, env),
    }
}

impl fmt::Display for PotExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::syntax::printer::write_pot(f, self)
    }
}

impl fmt::Debug for PotExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::int_list;

    fn env1(x: &Ident, v: Term) -> MeasureEnv {
        let mut e = MeasureEnv::new();
        e.insert(x.clone(), v);
        e
    }

    #[test]
    fn const_evaluates_to_itself() {
        let f = PotExpr::cnst(5);
        assert_eq!(eval_potential(&f, &MeasureEnv::new()).unwrap(), Ext::Finite(crate::rint(5)));
    }

    #[test]
    fn length_unfolds_structurally() {
        // oracle: direct unfolding of the recursion on a concrete list
        let x = Ident::source("x");
        let f = length_of(&x);
        let env = env1(&x, int_list(&[1, 2]));
        assert_eq!(eval_potential(&f, &env).unwrap(), Ext::Finite(crate::rint(2)));
        let env0 = env1(&x, int_list(&[]));
        assert_eq!(eval_potential(&f, &env0).unwrap(), Ext::Finite(crate::rint(0)));
    }

    #[test]
    fn half_quadratic_at_three() {
        // ½·(n² + 3·n) at n = 3 is 9
        let n = Ident::source("n");
        let f = PotExpr::scale(
            crate::rat(1, 2),
            PotExpr::add(
                PotExpr::mul(PotExpr::var(&n), PotExpr::var(&n)),
                PotExpr::scale(crate::rint(3), PotExpr::var(&n)),
            ),
        );
        let env = env1(&n, Term::Int(3));
        assert_eq!(eval_potential(&f, &env).unwrap(), Ext::Finite(crate::rint(9)));
    }

    #[test]
    fn wf_examples() {
        let x = Ident::source("x");
        let y = Ident::source("y");
        let gamma = Ctx::from(vec![(x.clone(), TypeExpr::Ind(types::list_type(TypeExpr::Int)))]);
        let omega = Ctx::empty();
        // constants are always fine
        assert!(wf_potential(&omega, &gamma, &PotExpr::cnst(5)).is_ok());
        // length(x) with x bound to a list
        assert!(wf_potential(&omega, &gamma, &length_of(&x)).is_ok());
        // unbound int variable
        assert_eq!(
            wf_potential(&omega, &gamma, &PotExpr::var(&y)),
            Err(WfError::UnboundVariable(y))
        );
    }

    #[test]
    fn nonlinear_factors_must_not_share_variables() {
        let x = Ident::source("x");
        let gamma = Ctx::from(vec![(x.clone(), TypeExpr::Ind(types::list_type(TypeExpr::Int)))]);
        let sq = PotExpr::mul(length_of(&x), length_of(&x));
        assert!(matches!(
            wf_potential(&Ctx::empty(), &gamma, &sq),
            Err(WfError::NonLinearOverlap(_))
        ));
    }

    #[test]
    fn subst_reroots_measures() {
        // (length(w))[w ↦ x] = length(x)
        let w = Ident::source("w");
        let x = Ident::source("x");
        let f = length_of(&w);
        let g = subst_pot(&f, &w, &Term::Var(x.clone())).unwrap();
        assert!(alpha_eq_pot(&g, &length_of(&x)));
        // identity when the variable is not free
        let h = subst_pot(&f, &x, &Term::Int(3)).unwrap();
        assert!(alpha_eq_pot(&h, &f));
    }

    #[test]
    fn subst_into_value_unfolds_on_eval() {
        // ([length(x)] ..)[x ↦ cons(1, nil)] evaluates to 1
        let x = Ident::source("x");
        let f = length_of(&x);
        let g = subst_pot(&f, &x, &int_list(&[1])).unwrap();
        assert_eq!(eval_potential(&g, &MeasureEnv::new()).unwrap(), Ext::Finite(crate::rint(1)));
    }

    #[test]
    fn subst_commutes_with_eval() {
        let x = Ident::source("x");
        let f = PotExpr::add(length_of(&x), PotExpr::cnst(2));
        let v = int_list(&[4, 5, 6]);
        let substituted = subst_pot(&f, &x, &v).unwrap();
        let direct = eval_potential(&substituted, &MeasureEnv::new()).unwrap();
        let via_env = eval_potential(&f, &env1(&x, v)).unwrap();
        assert_eq!(direct, via_env);
    }

    #[test]
    fn pair_paths_resolve() {
        // f = x.1 with x ↦ (7, nil) resolves to 7
        let x = Ident::source("x");
        let f = PotExpr::Var(PotArg::Path(Path { root: x.clone(), projs: vec![Proj::Fst] }));
        let g = subst_pot(&f, &x, &Term::Pair(Box::new(Term::Int(7)), Box::new(int_list(&[])))).unwrap();
        assert_eq!(g, PotExpr::cnst(7));
    }

    #[test]
    fn min_max_binders_do_not_evaluate() {
        let x = Ident::source("x");
        let f = PotExpr::MinOver(
            x.clone(),
            TypeExpr::Ind(types::list_type(TypeExpr::Int)),
            Box::new(length_of(&x)),
        );
        assert_eq!(
            eval_potential(&f, &MeasureEnv::new()),
            Err(PotEvalError::UnresolvedBinder(x))
        );
    }
}
