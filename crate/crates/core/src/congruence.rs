//! Canonical forms modulo structural congruence and beta-eta equality.
//!
//! Terms are normalized into a nameless representation where membrane
//! parallel and system composition are sorted, flattened multisets with
//! their units removed. Two well-typed terms are congruent exactly when
//! their canonical forms are equal.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::syntax::{Action, ActionKind, Name, Term};
use crate::typing::{type_of, Type, TypeError};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CAction {
    pub kind: ActionKind,
    pub name: Name,
    pub arg: Option<Box<Canon>>,
}

/// A term in canonical form.
///
/// `Par(vec![])` is the empty membrane and `Comp(vec![])` the empty
/// system. Multisets never hold a single element or a nested node of the
/// same kind, and are kept sorted by the derived order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Canon {
    /// De Bruijn index of a bound variable.
    Bound(u32),
    Free(String),
    App(Box<Canon>, Box<Canon>),
    Lam(Type, Box<Canon>),
    Prefix(CAction, Box<Canon>),
    Par(Vec<Canon>),
    Comp(Vec<Canon>),
    Cell(Box<Canon>, Box<Canon>),
}

pub use Canon as CanonicalTerm;

impl Canon {
    pub const ZERO: Canon = Canon::Par(Vec::new());
    pub const VOID: Canon = Canon::Comp(Vec::new());

    pub fn is_zero(&self) -> bool {
        matches!(self, Canon::Par(xs) if xs.is_empty())
    }

    pub fn is_void(&self) -> bool {
        matches!(self, Canon::Comp(xs) if xs.is_empty())
    }

    /// Parallel components of a membrane (empty for `0`).
    pub fn par_items(&self) -> &[Canon] {
        match self {
            Canon::Par(xs) => xs,
            other => std::slice::from_ref(other),
        }
    }

    /// Composition components of a system (empty for `void`).
    pub fn comp_items(&self) -> &[Canon] {
        match self {
            Canon::Comp(xs) => xs,
            other => std::slice::from_ref(other),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Canon::Bound(_) | Canon::Free(_) | Canon::App(..) | Canon::Lam(..) => false,
            Canon::Prefix(a, c) => a.arg.as_deref().is_none_or(Canon::is_ground) && c.is_ground(),
            Canon::Par(xs) | Canon::Comp(xs) => xs.iter().all(Canon::is_ground),
            Canon::Cell(m, b) => m.is_ground() && b.is_ground(),
        }
    }

    /// Whether de Bruijn index `idx` (relative to the root) occurs free.
    fn occurs(&self, idx: u32) -> bool {
        match self {
            Canon::Bound(k) => *k == idx,
            Canon::Free(_) => false,
            Canon::App(f, a) => f.occurs(idx) || a.occurs(idx),
            Canon::Lam(_, b) => b.occurs(idx + 1),
            Canon::Prefix(a, c) => a.arg.as_deref().is_some_and(|x| x.occurs(idx)) || c.occurs(idx),
            Canon::Par(xs) | Canon::Comp(xs) => xs.iter().any(|x| x.occurs(idx)),
            Canon::Cell(m, b) => m.occurs(idx) || b.occurs(idx),
        }
    }

    /// Whether any index at or above `depth` occurs free.
    fn has_loose(&self, depth: u32) -> bool {
        match self {
            Canon::Bound(k) => *k >= depth,
            Canon::Free(_) => false,
            Canon::App(f, a) => f.has_loose(depth) || a.has_loose(depth),
            Canon::Lam(_, b) => b.has_loose(depth + 1),
            Canon::Prefix(a, c) => {
                a.arg.as_deref().is_some_and(|x| x.has_loose(depth)) || c.has_loose(depth)
            }
            Canon::Par(xs) | Canon::Comp(xs) => xs.iter().any(|x| x.has_loose(depth)),
            Canon::Cell(m, b) => m.has_loose(depth) || b.has_loose(depth),
        }
    }

    /// Converts back to a surface term, choosing fresh binder names.
    pub fn to_term(&self) -> Term {
        let mut free = BTreeSet::new();
        self.free_vars(&mut free);
        let mut scope = Vec::new();
        self.to_term_in(&mut scope, &free)
    }

    fn free_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Canon::Bound(_) => {}
            Canon::Free(x) => {
                out.insert(x.clone());
            }
            Canon::App(f, a) => {
                f.free_vars(out);
                a.free_vars(out);
            }
            Canon::Lam(_, b) => b.free_vars(out),
            Canon::Prefix(a, c) => {
                if let Some(x) = &a.arg {
                    x.free_vars(out);
                }
                c.free_vars(out);
            }
            Canon::Par(xs) | Canon::Comp(xs) => xs.iter().for_each(|x| x.free_vars(out)),
            Canon::Cell(m, b) => {
                m.free_vars(out);
                b.free_vars(out);
            }
        }
    }

    fn to_term_in(&self, scope: &mut Vec<String>, free: &BTreeSet<String>) -> Term {
        match self {
            Canon::Bound(k) => Term::Var(scope[scope.len() - 1 - *k as usize].clone()),
            Canon::Free(x) => Term::Var(x.clone()),
            Canon::App(f, a) => Term::app(f.to_term_in(scope, free), a.to_term_in(scope, free)),
            Canon::Lam(ty, b) => {
                let base = match ty {
                    Type::Sys => "X",
                    Type::Mem => "y",
                    Type::Act => "a",
                    Type::Arrow(..) => "Z",
                };
                let name = (0..)
                    .map(|i| {
                        if i == 0 {
                            base.to_string()
                        } else {
                            format!("{base}{i}")
                        }
                    })
                    .find(|c| !scope.contains(c) && !free.contains(c))
                    .expect("unbounded name supply");
                scope.push(name.clone());
                let body = b.to_term_in(scope, free);
                scope.pop();
                Term::lambda(name, ty.clone(), body)
            }
            Canon::Prefix(a, c) => {
                let arg = a
                    .arg
                    .as_deref()
                    .map(|x| Box::new(x.to_term_in(scope, free)));
                let action = Action {
                    kind: a.kind,
                    name: a.name.clone(),
                    arg,
                };
                Term::prefix(action, c.to_term_in(scope, free))
            }
            Canon::Par(xs) => xs
                .iter()
                .map(|x| x.to_term_in(scope, free))
                .reduce(Term::par)
                .unwrap_or(Term::ZeroMem),
            Canon::Comp(xs) => xs
                .iter()
                .map(|x| x.to_term_in(scope, free))
                .reduce(Term::comp)
                .unwrap_or(Term::VoidSys),
            Canon::Cell(m, b) => Term::cell(m.to_term_in(scope, free), b.to_term_in(scope, free)),
        }
    }

    /// Type of a closed canonical term, if it has one.
    pub fn closed_type(&self) -> Option<Type> {
        fn go(t: &Canon, ctx: &mut Vec<Type>) -> Option<Type> {
            match t {
                Canon::Bound(k) => ctx.get(ctx.len().checked_sub(1 + *k as usize)?).cloned(),
                Canon::Free(_) => None,
                Canon::App(f, _) => match go(f, ctx)? {
                    Type::Arrow(_, cod) => Some(*cod),
                    _ => None,
                },
                Canon::Lam(ty, b) => {
                    ctx.push(ty.clone());
                    let cod = go(b, ctx);
                    ctx.pop();
                    Some(Type::arrow(ty.clone(), cod?))
                }
                Canon::Prefix(..) | Canon::Par(_) => Some(Type::Mem),
                Canon::Comp(_) | Canon::Cell(..) => Some(Type::Sys),
            }
        }
        go(self, &mut Vec::new())
    }
}

impl fmt::Display for Canon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_term().fmt(f)
    }
}

pub fn par(items: impl IntoIterator<Item = Canon>) -> Canon {
    let mut out = Vec::new();
    for item in items {
        match item {
            Canon::Par(xs) => out.extend(xs),
            other => out.push(other),
        }
    }
    out.sort();
    if out.len() == 1 {
        out.pop().unwrap()
    } else {
        Canon::Par(out)
    }
}

pub fn comp(items: impl IntoIterator<Item = Canon>) -> Canon {
    let mut out = Vec::new();
    for item in items {
        match item {
            Canon::Comp(xs) => out.extend(xs),
            other => out.push(other),
        }
    }
    out.sort();
    if out.len() == 1 {
        out.pop().unwrap()
    } else {
        Canon::Comp(out)
    }
}

pub fn cell(mem: Canon, body: Canon) -> Canon {
    if mem.is_zero() && body.is_void() {
        Canon::VOID
    } else {
        Canon::Cell(Box::new(mem), Box::new(body))
    }
}

pub fn prefix(kind: ActionKind, name: Name, arg: Option<Canon>, cont: Canon) -> Canon {
    Canon::Prefix(
        CAction {
            kind,
            name,
            arg: arg.map(Box::new),
        },
        Box::new(cont),
    )
}

/// Abstraction with eta contraction.
pub fn lam(ty: Type, body: Canon) -> Canon {
    if let Canon::App(f, a) = &body {
        if **a == Canon::Bound(0) && !f.occurs(0) {
            return shift(f, -1, 0);
        }
    }
    Canon::Lam(ty, Box::new(body))
}

/// Application with hereditary beta reduction.
pub fn app(f: Canon, arg: Canon) -> Canon {
    match f {
        Canon::Lam(_, body) => subst_top(&body, &arg),
        f => Canon::App(Box::new(f), Box::new(arg)),
    }
}

fn map_bound(t: &Canon, depth: u32, on: &impl Fn(u32, u32) -> Canon) -> Canon {
    match t {
        Canon::Bound(k) => on(*k, depth),
        Canon::Free(_) => t.clone(),
        Canon::App(f, a) => app(map_bound(f, depth, on), map_bound(a, depth, on)),
        Canon::Lam(ty, b) => lam(ty.clone(), map_bound(b, depth + 1, on)),
        Canon::Prefix(a, c) => prefix(
            a.kind,
            a.name.clone(),
            a.arg.as_deref().map(|x| map_bound(x, depth, on)),
            map_bound(c, depth, on),
        ),
        Canon::Par(xs) => par(xs.iter().map(|x| map_bound(x, depth, on))),
        Canon::Comp(xs) => comp(xs.iter().map(|x| map_bound(x, depth, on))),
        Canon::Cell(m, b) => cell(map_bound(m, depth, on), map_bound(b, depth, on)),
    }
}

fn shift(t: &Canon, by: i64, cutoff: u32) -> Canon {
    if by == 0 || !t.has_loose(cutoff) {
        return t.clone();
    }
    map_bound(t, 0, &|k, depth| {
        if k >= cutoff + depth {
            Canon::Bound(u32::try_from(i64::from(k) + by).expect("index underflow"))
        } else {
            Canon::Bound(k)
        }
    })
}

/// Replaces index 0 of `body` by `arg` and lowers the remaining indices.
fn subst_top(body: &Canon, arg: &Canon) -> Canon {
    if !body.has_loose(0) {
        return body.clone();
    }
    map_bound(body, 0, &|k, depth| match k.cmp(&depth) {
        std::cmp::Ordering::Equal => shift(arg, i64::from(depth), 0),
        std::cmp::Ordering::Greater => Canon::Bound(k - 1),
        std::cmp::Ordering::Less => Canon::Bound(k),
    })
}

fn from_term(t: &Term, ctx: &mut Vec<String>) -> Canon {
    match t {
        Term::ZeroMem => Canon::ZERO,
        Term::VoidSys => Canon::VOID,
        Term::Var(x) => match ctx.iter().rev().position(|y| y == x) {
            Some(i) => Canon::Bound(i as u32),
            None => Canon::Free(x.clone()),
        },
        Term::Prefix(a, c) => prefix(
            a.kind,
            a.name.clone(),
            a.arg.as_deref().map(|x| from_term(x, ctx)),
            from_term(c, ctx),
        ),
        Term::MemPar(l, r) => par([from_term(l, ctx), from_term(r, ctx)]),
        Term::SysComp(l, r) => comp([from_term(l, ctx), from_term(r, ctx)]),
        Term::Cell(m, b) => cell(from_term(m, ctx), from_term(b, ctx)),
        Term::Lambda(x, ty, b) => {
            ctx.push(x.clone());
            let body = from_term(b, ctx);
            ctx.pop();
            lam(ty.clone(), body)
        }
        Term::App(f, a) => app(from_term(f, ctx), from_term(a, ctx)),
    }
}

/// Canonical form of a well-typed term.
pub fn normalize(term: &Term) -> Canon {
    from_term(term, &mut Vec::new())
}

/// Identity of a congruence class: equal keys iff congruent terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassKey(Arc<Canon>);

impl ClassKey {
    pub fn of(term: &Term) -> ClassKey {
        ClassKey(Arc::new(normalize(term)))
    }

    pub fn canon(&self) -> &Canon {
        &self.0
    }

    /// Stable textual encoding of the class.
    pub fn key(&self) -> String {
        self.to_string()
    }

    pub fn term(&self) -> Term {
        self.0.to_term()
    }
}

impl From<Canon> for ClassKey {
    fn from(c: Canon) -> ClassKey {
        ClassKey(Arc::new(c))
    }
}

impl fmt::Display for ClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for ClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

pub type ClassSet = BTreeSet<ClassKey>;

/// Decides structural congruence of two terms of the same type.
pub fn equiv(m: &Term, n: &Term) -> Result<bool, TypeError> {
    let tm = type_of(m)?;
    let tn = type_of(n)?;
    if tm != tn {
        return Err(TypeError::Mismatch {
            term: n.to_string(),
            expected: tm,
            found: tn,
        });
    }
    Ok(normalize(m) == normalize(n))
}

/// All well-typed applications `M(N)` with `M` in `fs` and `N` in `args`.
pub fn class_apply(fs: &ClassSet, args: &ClassSet) -> ClassSet {
    let arg_types: Vec<_> = args.iter().map(|a| (a, a.canon().closed_type())).collect();
    let mut out = ClassSet::new();
    for f in fs {
        let Some(Type::Arrow(dom, _)) = f.canon().closed_type() else {
            continue;
        };
        for (a, at) in &arg_types {
            if at.as_ref() == Some(&*dom) {
                out.insert(ClassKey::from(app(f.canon().clone(), a.canon().clone())));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Residual {
    /// `{ N | N | σ ∈ T }`
    MemPar(Canon),
    /// `{ N | N o P ∈ T }`
    SysComp(Canon),
    /// `{ N | σ[N] ∈ T }`
    CellBody(Canon),
}

pub(crate) fn multiset_minus(whole: &[Canon], part: &[Canon]) -> Option<Vec<Canon>> {
    let mut rest = whole.to_vec();
    for p in part {
        let at = rest.iter().position(|x| x == p)?;
        rest.remove(at);
    }
    Some(rest)
}

pub fn class_residual(set: &ClassSet, mode: &Residual) -> ClassSet {
    let mut out = ClassSet::new();
    for key in set {
        let c = key.canon();
        let found = match mode {
            Residual::MemPar(sigma) => {
                if c.closed_type() != Some(Type::Mem) {
                    None
                } else {
                    multiset_minus(c.par_items(), sigma.par_items()).map(par)
                }
            }
            Residual::SysComp(p) => {
                if c.closed_type() != Some(Type::Sys) {
                    None
                } else {
                    multiset_minus(c.comp_items(), p.comp_items()).map(comp)
                }
            }
            Residual::CellBody(sigma) => match c {
                Canon::Cell(m, b) if **m == *sigma => Some((**b).clone()),
                _ if c.is_void() && sigma.is_zero() => Some(Canon::VOID),
                _ => None,
            },
        };
        if let Some(n) = found {
            out.insert(ClassKey::from(n));
        }
    }
    out
}
