//! Linear type checking for terms and the meta-syntax.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::syntax::{render, Term};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Sys,
    Mem,
    Act,
    Arrow(Box<Type>, Box<Type>),
}

impl Type {
    pub fn arrow(dom: Type, cod: Type) -> Type {
        Type::Arrow(Box::new(dom), Box::new(cod))
    }

    /// `(sys -> sys) -> sys`, the type of phago residues.
    pub fn phago_residue() -> Type {
        Type::arrow(Type::arrow(Type::Sys, Type::Sys), Type::Sys)
    }

    /// `sys -> sys`, the type of cophago residues.
    pub fn cophago_residue() -> Type {
        Type::arrow(Type::Sys, Type::Sys)
    }

    /// `sys -> mem -> sys`, the type of exo residues.
    pub fn exo_residue() -> Type {
        Type::arrow(Type::Sys, Type::arrow(Type::Mem, Type::Sys))
    }

    pub fn is_base(&self) -> bool {
        !matches!(self, Type::Arrow(..))
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Sys => f.write_str("sys"),
            Type::Mem => f.write_str("mem"),
            Type::Act => f.write_str("act"),
            Type::Arrow(d, c) if d.is_base() => write!(f, "{d} -> {c}"),
            Type::Arrow(d, c) => write!(f, "({d}) -> {c}"),
        }
    }
}

pub type TypeEnv = BTreeMap<String, Type>;
pub type UsedVars = BTreeSet<String>;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("type mismatch in `{term}`: expected {expected}, found {found}")]
    Mismatch {
        term: String,
        expected: Type,
        found: Type,
    },
    #[error("variable `${var}` is used more than once")]
    LinearityViolation { var: String },
    #[error("unbound variable `${var}`")]
    UnboundVariable { var: String },
    #[error("argument of `{action}` must be a membrane, found {found}")]
    ActionArgError { action: String, found: Type },
    #[error("`{term}` is not a function and cannot be applied")]
    NotAFunction { term: String },
}

fn mismatch(term: &Term, expected: Type, found: Type) -> TypeError {
    TypeError::Mismatch {
        term: render(term),
        expected,
        found,
    }
}

fn disjoint_union(mut a: UsedVars, b: UsedVars) -> Result<UsedVars, TypeError> {
    if let Some(var) = a.intersection(&b).next() {
        return Err(TypeError::LinearityViolation { var: var.clone() });
    }
    a.extend(b);
    Ok(a)
}

/// Synthesizes the type of `term` under `env` together with the set of
/// variables it consumes. Every variable may be consumed at most once.
pub fn infer(env: &TypeEnv, term: &Term) -> Result<(Type, UsedVars), TypeError> {
    match term {
        Term::ZeroMem => Ok((Type::Mem, UsedVars::new())),
        Term::VoidSys => Ok((Type::Sys, UsedVars::new())),
        Term::Var(x) => match env.get(x) {
            Some(t) => Ok((t.clone(), UsedVars::from([x.clone()]))),
            None => Err(TypeError::UnboundVariable { var: x.clone() }),
        },
        Term::Prefix(action, cont) => {
            let mut used = UsedVars::new();
            if let Some(arg) = &action.arg {
                let (t, u) = infer(env, arg)?;
                if t != Type::Mem {
                    return Err(TypeError::ActionArgError {
                        action: format!("{} {}", action.kind.keyword(), action.name),
                        found: t,
                    });
                }
                used = u;
            }
            let u = expect(env, cont, Type::Mem)?;
            Ok((Type::Mem, disjoint_union(used, u)?))
        }
        Term::MemPar(l, r) => binary(env, l, r, Type::Mem, Type::Mem, Type::Mem),
        Term::SysComp(l, r) => binary(env, l, r, Type::Sys, Type::Sys, Type::Sys),
        Term::Cell(m, b) => binary(env, m, b, Type::Mem, Type::Sys, Type::Sys),
        Term::Lambda(x, ty, body) => {
            let mut inner = env.clone();
            inner.insert(x.clone(), ty.clone());
            let (t, mut used) = infer(&inner, body)?;
            used.remove(x);
            Ok((Type::arrow(ty.clone(), t), used))
        }
        Term::App(f, a) => {
            let (ft, fu) = infer(env, f)?;
            let Type::Arrow(dom, cod) = ft else {
                return Err(TypeError::NotAFunction { term: render(f) });
            };
            let au = expect(env, a, *dom)?;
            Ok((*cod, disjoint_union(fu, au)?))
        }
    }
}

fn expect(env: &TypeEnv, term: &Term, want: Type) -> Result<UsedVars, TypeError> {
    let (t, used) = infer(env, term)?;
    if t != want {
        return Err(mismatch(term, want, t));
    }
    Ok(used)
}

fn binary(
    env: &TypeEnv,
    l: &Term,
    r: &Term,
    lt: Type,
    rt: Type,
    out: Type,
) -> Result<(Type, UsedVars), TypeError> {
    let lu = expect(env, l, lt)?;
    let ru = expect(env, r, rt)?;
    Ok((out, disjoint_union(lu, ru)?))
}

/// Succeeds iff `term` has type `expected` under `env`.
pub fn check(env: &TypeEnv, term: &Term, expected: &Type) -> Result<(), TypeError> {
    let (t, _) = infer(env, term)?;
    if t != *expected {
        return Err(mismatch(term, expected.clone(), t));
    }
    Ok(())
}

/// Type of a closed term.
pub fn type_of(term: &Term) -> Result<Type, TypeError> {
    infer(&TypeEnv::new(), term).map(|(t, _)| t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn ty(src: &str) -> Result<Type, TypeError> {
        type_of(&parse_term(src).unwrap())
    }

    #[test]
    fn ground_cells() {
        let (t, used) = infer(&TypeEnv::new(), &parse_term("0[void]").unwrap()).unwrap();
        assert_eq!(t, Type::Sys);
        assert!(used.is_empty());
        assert_eq!(ty("phago n | cophago m{exo k}").unwrap(), Type::Mem);
    }

    #[test]
    fn residue_types() {
        assert_eq!(
            ty("\\Z:sys->sys. $Z(phago n[void])").unwrap(),
            Type::phago_residue()
        );
        assert_eq!(
            ty("\\X:sys. 0[pino k{0}[$X] o void]").unwrap(),
            Type::cophago_residue()
        );
        let exo = parse_term("\\X:sys. \\y:mem. (exo n | $y)[$X] o 0[void]").unwrap();
        assert_eq!(check(&TypeEnv::new(), &exo, &Type::exo_residue()), Ok(()));
    }

    #[test]
    fn linearity() {
        let env = TypeEnv::from([("x".to_string(), Type::Mem)]);
        let t = parse_term("$x | $x").unwrap();
        assert_eq!(
            infer(&env, &t),
            Err(TypeError::LinearityViolation { var: "x".into() })
        );
        let t = parse_term("\\X:sys. $X o $X").unwrap();
        assert!(matches!(
            type_of(&t),
            Err(TypeError::LinearityViolation { .. })
        ));
    }

    #[test]
    fn unused_variables_are_fine() {
        assert_eq!(
            ty("\\X:sys. void").unwrap(),
            Type::arrow(Type::Sys, Type::Sys)
        );
    }

    #[test]
    fn shadowing() {
        let t = ty("\\X:mem. \\X:sys. $X").unwrap();
        assert_eq!(t, Type::arrow(Type::Mem, Type::arrow(Type::Sys, Type::Sys)));
    }

    #[test]
    fn errors() {
        assert!(matches!(ty("void[void]"), Err(TypeError::Mismatch { .. })));
        assert!(matches!(ty("$q"), Err(TypeError::UnboundVariable { .. })));
        assert!(matches!(
            ty("pino n{void}"),
            Err(TypeError::ActionArgError { .. })
        ));
        assert!(matches!(
            ty("(0[void])(void)"),
            Err(TypeError::NotAFunction { .. })
        ));
        assert!(matches!(
            ty("(\\X:sys. $X)(0)"),
            Err(TypeError::Mismatch { .. })
        ));
        assert!(check(&TypeEnv::new(), &Term::VoidSys, &Type::Sys).is_ok());
        assert!(matches!(
            check(&TypeEnv::new(), &Term::VoidSys, &Type::Mem),
            Err(TypeError::Mismatch { .. })
        ));
    }

    #[test]
    fn display() {
        assert_eq!(Type::phago_residue().to_string(), "(sys -> sys) -> sys");
        assert_eq!(Type::exo_residue().to_string(), "sys -> mem -> sys");
        let t = Type::phago_residue();
        assert_eq!(
            parse_term(&format!("\\F:{t}. void"))
                .map(|t| type_of(&t).unwrap())
                .unwrap(),
            Type::arrow(t, Type::Sys)
        );
    }
}
