//! Term corpora: exhaustive enumeration by size, random generation and
//! random congruence-preserving rewriting.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::syntax::{Action, ActionKind, Name, Term};

fn actions_without_arg() -> [ActionKind; 3] {
    [ActionKind::Phago, ActionKind::Exo, ActionKind::CoExo]
}

fn actions_with_arg() -> [ActionKind; 2] {
    [ActionKind::CoPhago, ActionKind::Pino]
}

/// Ground membranes and systems indexed by exact size.
pub struct Enumeration {
    mems: Vec<Vec<Term>>,
    syss: Vec<Vec<Term>>,
}

impl Enumeration {
    /// Enumerates every ground term of size at most `max_size` whose action
    /// names are drawn from `names`.
    pub fn new(max_size: usize, names: &[Name]) -> Enumeration {
        let mut mems: Vec<Vec<Term>> = vec![Vec::new(); max_size + 1];
        let mut syss: Vec<Vec<Term>> = vec![Vec::new(); max_size + 1];
        for s in 1..=max_size {
            if s == 1 {
                mems[1].push(Term::ZeroMem);
                syss[1].push(Term::VoidSys);
                continue;
            }
            // Systems of size s only need membranes up to s - 2.
            if s + 2 <= max_size {
                let mut out = Vec::new();
                for kind in actions_without_arg() {
                    for n in names {
                        for c in &mems[s - 1] {
                            out.push(Term::prefix(Action::simple(kind, n.clone()), c.clone()));
                        }
                    }
                }
                for a in 1..s - 1 {
                    let c = s - 1 - a;
                    for kind in actions_with_arg() {
                        for n in names {
                            for arg in &mems[a] {
                                for cont in &mems[c] {
                                    let act = Action::with_arg(kind, n.clone(), arg.clone());
                                    out.push(Term::prefix(act, cont.clone()));
                                }
                            }
                        }
                    }
                    for l in &mems[a] {
                        for r in &mems[c] {
                            out.push(Term::par(l.clone(), r.clone()));
                        }
                    }
                }
                mems[s] = out;
            }
            let mut out = Vec::new();
            for a in 1..s - 1 {
                let b = s - 1 - a;
                for m in &mems[a] {
                    for body in &syss[b] {
                        out.push(Term::cell(m.clone(), body.clone()));
                    }
                }
                for l in &syss[a] {
                    for r in &syss[b] {
                        out.push(Term::comp(l.clone(), r.clone()));
                    }
                }
            }
            syss[s] = out;
        }
        Enumeration { mems, syss }
    }

    pub fn systems(&self) -> impl Iterator<Item = &Term> {
        self.syss.iter().flatten()
    }

    pub fn systems_of_size(&self, size: usize) -> &[Term] {
        self.syss.get(size).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn membranes_of_size(&self, size: usize) -> &[Term] {
        self.mems.get(size).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Random ground membrane of size close to `budget`.
pub fn random_membrane<R: Rng + ?Sized>(rng: &mut R, budget: usize, names: &[Name]) -> Term {
    if budget <= 1 {
        return Term::ZeroMem;
    }
    let name = names.choose(rng).expect("at least one name").clone();
    if budget >= 3 && rng.random_bool(0.3) {
        let l = rng.random_range(1..budget - 1);
        return Term::par(
            random_membrane(rng, l, names),
            random_membrane(rng, budget - 1 - l, names),
        );
    }
    let kind = *ActionKind::ALL.choose(rng).expect("nonempty");
    if kind.takes_arg() {
        let arg = if budget >= 3 {
            rng.random_range(1..budget - 1)
        } else {
            1
        };
        let cont = budget.saturating_sub(1 + arg).max(1);
        let action = Action::with_arg(kind, name, random_membrane(rng, arg, names));
        Term::prefix(action, random_membrane(rng, cont, names))
    } else {
        Term::prefix(
            Action::simple(kind, name),
            random_membrane(rng, budget - 1, names),
        )
    }
}

/// Random ground system of size close to `budget`.
pub fn random_system<R: Rng + ?Sized>(rng: &mut R, budget: usize, names: &[Name]) -> Term {
    if budget <= 2 {
        return Term::VoidSys;
    }
    let l = rng.random_range(1..budget - 1);
    let r = budget - 1 - l;
    if rng.random_bool(0.65) {
        Term::cell(
            random_membrane(rng, l.max(2), names),
            random_system(rng, r, names),
        )
    } else {
        Term::comp(random_system(rng, l, names), random_system(rng, r, names))
    }
}

/// Rewrites `term` by randomly chosen structural congruence axioms:
/// commutativity, associativity, units and empty-cell collapse, at every
/// position including action arguments.
pub fn congruent_variant<R: Rng + ?Sized>(rng: &mut R, term: &Term) -> Term {
    let t = match term {
        Term::Prefix(a, c) => {
            let arg = a
                .arg
                .as_deref()
                .map(|x| Box::new(congruent_variant(rng, x)));
            let action = Action {
                kind: a.kind,
                name: a.name.clone(),
                arg,
            };
            Term::prefix(action, congruent_variant(rng, c))
        }
        Term::MemPar(l, r) => Term::par(congruent_variant(rng, l), congruent_variant(rng, r)),
        Term::SysComp(l, r) => Term::comp(congruent_variant(rng, l), congruent_variant(rng, r)),
        Term::Cell(m, b) => Term::cell(congruent_variant(rng, m), congruent_variant(rng, b)),
        other => other.clone(),
    };
    let t = match t {
        Term::MemPar(l, r) if rng.random_bool(0.5) => Term::par(*r, *l),
        Term::SysComp(l, r) if rng.random_bool(0.5) => Term::comp(*r, *l),
        other => other,
    };
    let t = match t {
        Term::MemPar(l, r) => match *l {
            Term::MemPar(a, b) if rng.random_bool(0.5) => Term::par(*a, Term::par(*b, *r)),
            Term::ZeroMem if rng.random_bool(0.5) => *r,
            l => Term::par(l, *r),
        },
        Term::SysComp(l, r) => match *l {
            Term::SysComp(a, b) if rng.random_bool(0.5) => Term::comp(*a, Term::comp(*b, *r)),
            Term::VoidSys if rng.random_bool(0.5) => *r,
            l => Term::comp(l, *r),
        },
        Term::Cell(m, b) if matches!(*m, Term::ZeroMem) && matches!(*b, Term::VoidSys) => {
            if rng.random_bool(0.5) {
                Term::VoidSys
            } else {
                Term::Cell(m, b)
            }
        }
        other => other,
    };
    match t {
        Term::ZeroMem if rng.random_bool(0.2) => Term::par(Term::ZeroMem, Term::ZeroMem),
        Term::VoidSys if rng.random_bool(0.2) => Term::cell(Term::ZeroMem, Term::VoidSys),
        Term::VoidSys if rng.random_bool(0.2) => Term::comp(Term::VoidSys, Term::VoidSys),
        t @ (Term::Prefix(..) | Term::MemPar(..)) if rng.random_bool(0.1) => {
            Term::par(t, Term::ZeroMem)
        }
        t @ (Term::Cell(..) | Term::SysComp(..)) if rng.random_bool(0.1) => {
            Term::comp(Term::VoidSys, t)
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::normalize;
    use crate::typing::{type_of, Type};
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn names() -> Vec<Name> {
        vec![Name::new("n").unwrap(), Name::new("m").unwrap()]
    }

    #[test]
    fn enumeration_counts() {
        let e = Enumeration::new(6, &names());
        let counts: Vec<usize> = (1..=6).map(|s| e.systems_of_size(s).len()).collect();
        assert_eq!(counts, vec![1, 0, 2, 6, 47, 336]);
        assert_eq!(e.membranes_of_size(3).len(), 41);
        assert!(e
            .systems()
            .all(|t| t.size() <= 6 && type_of(t) == Ok(Type::Sys)));
    }

    #[test]
    fn variants_are_congruent() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(7);
        for _ in 0..300 {
            let p = random_system(&mut rng, 14, &names());
            assert_eq!(type_of(&p), Ok(Type::Sys));
            let q = congruent_variant(&mut rng, &p);
            assert_eq!(normalize(&p), normalize(&q), "{p} vs {q}");
        }
    }
}
