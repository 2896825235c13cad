//! Querying residue measures by the shape of the systems they can produce.
//!
//! A residue is applied to a generic argument whose unconstrained parts are
//! free variables; the result is then matched against ground systems modulo
//! associativity, commutativity and units.

use crate::congruence::{app, cell, comp, lam, Canon, ClassSet};
use crate::lts::SysLabel;
use crate::typing::Type;

use super::{Rate, SysBehaviour};

const TAU: &str = "tau";
const RHO: &str = "rho";
const REST: &str = "R";

fn free(name: &str) -> Canon {
    Canon::Free(name.to_string())
}

/// The residue applied to the generic argument of its label:
/// `F(λX. $tau[$rho[X] o $R])`, `A($tau[$R])` or `S($R)($tau)`.
/// Identity targets are returned unchanged.
pub fn instantiation_template(label: &SysLabel, residue: &Canon) -> Canon {
    match label {
        SysLabel::Id => residue.clone(),
        SysLabel::Phago(_) => {
            let body = cell(
                free(TAU),
                comp([cell(free(RHO), Canon::Bound(0)), free(REST)]),
            );
            app(residue.clone(), lam(Type::Sys, body))
        }
        SysLabel::CoPhago(_) => app(residue.clone(), cell(free(TAU), free(REST))),
        SysLabel::Exo(_) => app(app(residue.clone(), free(REST)), free(TAU)),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Sort {
    Mem,
    Sys,
}

fn items(c: &Canon, sort: Sort) -> &[Canon] {
    match sort {
        Sort::Mem => c.par_items(),
        Sort::Sys => c.comp_items(),
    }
}

/// Whether some instantiation of the free variables of `pattern` (each
/// occurring once) is congruent to the ground system `target`.
pub(crate) fn matches(pattern: &Canon, target: &Canon) -> bool {
    match_multiset(
        items(pattern, Sort::Sys),
        items(target, Sort::Sys),
        Sort::Sys,
    )
}

fn match_multiset(ps: &[Canon], ks: &[Canon], sort: Sort) -> bool {
    let absorbs = ps.iter().any(|p| matches!(p, Canon::Free(_)));
    let fixed: Vec<&Canon> = ps.iter().filter(|p| !matches!(p, Canon::Free(_))).collect();
    if !absorbs && fixed.len() > ks.len() && fixed.iter().all(|p| p.is_ground()) {
        return false;
    }
    let mut used = vec![false; ks.len()];
    assign(&fixed, ks, &mut used, absorbs, sort)
}

fn assign(ps: &[&Canon], ks: &[Canon], used: &mut [bool], absorbs: bool, sort: Sort) -> bool {
    let Some((p, rest)) = ps.split_first() else {
        return absorbs || used.iter().all(|u| *u);
    };
    if vanishes(p, sort) && assign(rest, ks, used, absorbs, sort) {
        return true;
    }
    for j in 0..ks.len() {
        if used[j] || (j > 0 && !used[j - 1] && ks[j] == ks[j - 1]) {
            continue;
        }
        if item_matches(p, &ks[j]) {
            used[j] = true;
            let ok = assign(rest, ks, used, absorbs, sort);
            used[j] = false;
            if ok {
                return true;
            }
        }
    }
    false
}

fn vanishes(p: &Canon, sort: Sort) -> bool {
    match (p, sort) {
        (Canon::Cell(m, b), Sort::Sys) => {
            match_multiset(items(m, Sort::Mem), &[], Sort::Mem)
                && match_multiset(items(b, Sort::Sys), &[], Sort::Sys)
        }
        _ => false,
    }
}

fn item_matches(p: &Canon, k: &Canon) -> bool {
    if p.is_ground() {
        return p == k;
    }
    match (p, k) {
        (Canon::Cell(pm, pb), Canon::Cell(km, kb)) => {
            match_multiset(items(pm, Sort::Mem), items(km, Sort::Mem), Sort::Mem)
                && match_multiset(items(pb, Sort::Sys), items(kb, Sort::Sys), Sort::Sys)
        }
        (Canon::Prefix(pa, pc), Canon::Prefix(ka, kc)) => {
            let args = match (&pa.arg, &ka.arg) {
                (None, None) => true,
                (Some(x), Some(y)) => {
                    match_multiset(items(x, Sort::Mem), items(y, Sort::Mem), Sort::Mem)
                }
                _ => false,
            };
            pa.kind == ka.kind
                && pa.name == ka.name
                && args
                && match_multiset(items(pc, Sort::Mem), items(kc, Sort::Mem), Sort::Mem)
        }
        _ => false,
    }
}

/// Evaluates a system behaviour on a set of ground systems through the
/// shapes its residues can take.
///
/// For `id` this is the measure of `set`. For a residue label it is the
/// total rate of those residues that yield some member of `set` for some
/// choice of the partner.
pub fn sos_query(behaviour: &SysBehaviour, label: &SysLabel, set: &ClassSet) -> Rate {
    let Some(m) = behaviour.get(label) else {
        return Rate::zero();
    };
    if *label == SysLabel::Id {
        return m.eval(set);
    }
    let mut total = Rate::zero();
    for (residue, r) in m.iter() {
        let pattern = instantiation_template(label, residue.canon());
        if set
            .iter()
            .any(|k| k.canon().is_ground() && is_system(k.canon()) && matches(&pattern, k.canon()))
        {
            total += r;
        }
    }
    total
}

fn is_system(c: &Canon) -> bool {
    matches!(c, Canon::Comp(_) | Canon::Cell(..))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::{normalize, ClassKey};
    use crate::syntax::parse_term;

    fn c(src: &str) -> Canon {
        normalize(&parse_term(src).unwrap())
    }

    /// Opens the leading lambdas of `src`, outermost first, as `names`.
    fn pat(names: &[&str], src: &str) -> Canon {
        fn go(c: Canon, names: &[&str]) -> Canon {
            match c {
                Canon::Bound(i) => free(names[names.len() - 1 - i as usize]),
                Canon::Cell(m, b) => cell(go(*m, names), go(*b, names)),
                Canon::Comp(xs) => comp(xs.into_iter().map(|x| go(x, names))),
                Canon::Par(xs) => crate::congruence::par(xs.into_iter().map(|x| go(x, names))),
                other => other,
            }
        }
        let mut body = c(src);
        for _ in names {
            let Canon::Lam(_, b) = body else {
                panic!("expected a lambda")
            };
            body = *b;
        }
        go(body, names)
    }

    #[test]
    fn multiset_remainders() {
        let p = pat(&[REST], "\\R:sys. exo n[void] o $R");
        assert!(matches(&p, &c("exo n[void]")));
        assert!(matches(&p, &c("exo n[void] o phago m[void]")));
        assert!(!matches(&p, &c("phago m[void]")));
    }

    #[test]
    fn cells_may_vanish() {
        let p = pat(&[REST, TAU], "\\R:sys. \\t:mem. $t[$R]");
        assert!(matches(&p, &c("void")));
        assert!(matches(&p, &c("exo n[void]")));
        assert!(!matches(&p, &c("exo n[void] o exo n[void]")));
    }

    #[test]
    fn nested_membranes() {
        let p = pat(
            &[REST, TAU],
            "\\R:sys. \\t:mem. (exo n | $t)[$R o 0[phago m[void]]]",
        );
        assert!(matches(&p, &c("(exo n | pino k{0})[0[phago m[void]]]")));
        assert!(!matches(&p, &c("(exo n | pino k{0})[phago m[void]]")));
    }

    #[test]
    fn query_counts_each_residue_once() {
        let table = super::super::RateTable::uniform(Rate::integer(3));
        let p = parse_term("cophago n{0}[void] o exo m[void]").unwrap();
        let b = super::super::sos_sys(&p, &table).unwrap();
        let label = SysLabel::parse("cophago n").unwrap();
        for (target, rate) in [
            ("exo m[void]", 3),
            ("0[0[exo k[void]]] o exo m[void]", 3),
            ("0[exo k[void]] o exo m[void]", 0),
            ("phago m[void]", 0),
        ] {
            let set: ClassSet = [ClassKey::from(c(target))].into();
            assert_eq!(sos_query(&b, &label, &set), Rate::integer(rate), "{target}");
        }
    }
}
