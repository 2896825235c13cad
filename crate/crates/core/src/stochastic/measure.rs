use std::collections::BTreeMap;

use crate::congruence::{app, cell, comp, lam, normalize, par, Canon, ClassKey, ClassSet};
use crate::lts::{ground_view, MemLabel, SysLabel};
use crate::syntax::{Action, ActionKind, Term};
use crate::typing::Type;

use super::shape::instantiation_template;
use super::{Rate, RateError, RateTable};

/// Finite-support measure over congruence classes. Zero entries are never
/// stored, so structural equality is equality of measures.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Measure(BTreeMap<ClassKey, Rate>);

impl Measure {
    pub fn new() -> Measure {
        Measure::default()
    }

    pub fn dirac(key: ClassKey, rate: Rate) -> Measure {
        let mut m = Measure::new();
        m.add(key, &rate);
        m
    }

    pub fn add(&mut self, key: ClassKey, rate: &Rate) {
        if rate.is_zero() {
            return;
        }
        *self.0.entry(key).or_default() += rate;
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, key: &ClassKey) -> Rate {
        self.0.get(key).cloned().unwrap_or_else(Rate::zero)
    }

    /// Mass on a finite union of classes.
    pub fn eval(&self, set: &ClassSet) -> Rate {
        if set.len() < self.0.len() {
            set.iter().filter_map(|k| self.0.get(k)).cloned().sum()
        } else {
            self.0
                .iter()
                .filter(|(k, _)| set.contains(*k))
                .map(|(_, r)| r.clone())
                .sum()
        }
    }

    pub fn total(&self) -> Rate {
        self.0.values().cloned().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ClassKey, &Rate)> {
        self.0.iter()
    }

    pub fn support(&self) -> ClassSet {
        self.0.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
}

/// Label-indexed measures of a membrane; absent labels carry the null measure.
pub type MemBehaviour = BTreeMap<MemLabel, Measure>;

/// Label-indexed measures of a system. The `id` measure ranges over ground
/// systems, the others over residues.
pub type SysBehaviour = BTreeMap<SysLabel, Measure>;

fn put<L: Ord>(b: &mut BTreeMap<L, Measure>, label: L, key: Canon, rate: &Rate) {
    if rate.is_zero() {
        return;
    }
    b.entry(label).or_default().add(ClassKey::from(key), rate);
}

pub(crate) fn mem_label(action: &Action) -> MemLabel {
    let name = action.name.clone();
    let arg = || ClassKey::of(action.arg.as_deref().expect("argument present"));
    match action.kind {
        ActionKind::Phago => MemLabel::Phago(name),
        ActionKind::CoPhago => MemLabel::CoPhago(name, arg()),
        ActionKind::Exo => MemLabel::Exo(name),
        ActionKind::CoExo => MemLabel::CoExo(name),
        ActionKind::Pino => MemLabel::Pino(name, arg()),
    }
}

/// The behaviour of `ε.σ`: a single Dirac measure on `[σ]`.
pub fn dirac_prefix(
    action: &Action,
    sigma: &Term,
    rates: &RateTable,
) -> Result<MemBehaviour, RateError> {
    let rate = rates.lookup(action.kind, &action.name)?;
    let mut b = MemBehaviour::new();
    put(&mut b, mem_label(action), normalize(sigma), &rate);
    Ok(b)
}

/// Parallel combination of the behaviours of `σ` and `τ`.
pub fn mem_par(
    left: &MemBehaviour,
    sigma: &Term,
    tau: &Term,
    right: &MemBehaviour,
) -> MemBehaviour {
    let (s, t) = (normalize(sigma), normalize(tau));
    let mut out = MemBehaviour::new();
    for (label, m) in left {
        for (k, r) in m.iter() {
            put(
                &mut out,
                label.clone(),
                par([k.canon().clone(), t.clone()]),
                r,
            );
        }
    }
    for (label, m) in right {
        for (k, r) in m.iter() {
            put(
                &mut out,
                label.clone(),
                par([s.clone(), k.canon().clone()]),
                r,
            );
        }
    }
    out
}

fn phago_type() -> Type {
    Type::arrow(Type::Sys, Type::Sys)
}

/// Places a residue or reduct of one component next to its sibling.
fn beside(label: &SysLabel, residue: &Canon, sibling: &Canon) -> Canon {
    match label {
        SysLabel::Id => comp([residue.clone(), sibling.clone()]),
        SysLabel::Phago(_) => lam(
            phago_type(),
            comp([app(residue.clone(), Canon::Bound(0)), sibling.clone()]),
        ),
        SysLabel::CoPhago(_) => lam(
            Type::Sys,
            comp([app(residue.clone(), Canon::Bound(0)), sibling.clone()]),
        ),
        SysLabel::Exo(_) => {
            let inner = comp([Canon::Bound(1), sibling.clone()]);
            lam(
                Type::Sys,
                lam(Type::Mem, app(app(residue.clone(), inner), Canon::Bound(0))),
            )
        }
    }
}

/// Composition of the behaviours of `P` and `Q`, including phago
/// synchronisation between the two sides.
pub fn sys_comp(
    left: &SysBehaviour,
    p: &Term,
    q: &Term,
    right: &SysBehaviour,
    rates: &RateTable,
) -> Result<SysBehaviour, RateError> {
    let (pc, qc) = (normalize(p), normalize(q));
    let mut out = SysBehaviour::new();
    for (mine, sibling) in [(left, &qc), (right, &pc)] {
        for (label, m) in mine {
            for (k, r) in m.iter() {
                put(
                    &mut out,
                    label.clone(),
                    beside(label, k.canon(), sibling),
                    r,
                );
            }
        }
    }
    for (phagos, cophagos) in [(left, right), (right, left)] {
        for (label, fm) in phagos {
            let SysLabel::Phago(n) = label else { continue };
            let Some(am) = cophagos.get(&SysLabel::CoPhago(n.clone())) else {
                continue;
            };
            let pair = rates.lookup(ActionKind::Phago, n)?;
            for (f, r1) in fm.iter() {
                for (a, r2) in am.iter() {
                    let target = app(f.canon().clone(), a.canon().clone());
                    put(&mut out, SysLabel::Id, target, &(&(r1 * r2) / &pair));
                }
            }
        }
    }
    Ok(out)
}

/// Behaviour of `σ[P]` from the behaviour `mu` of `P` and `nu` of `σ`.
pub fn sys_loc(
    mu: &SysBehaviour,
    sigma: &Term,
    p: &Term,
    nu: &MemBehaviour,
    rates: &RateTable,
) -> Result<SysBehaviour, RateError> {
    let (sc, pc) = (normalize(sigma), normalize(p));
    let mut out = SysBehaviour::new();
    if let Some(ids) = mu.get(&SysLabel::Id) {
        for (k, r) in ids.iter() {
            put(
                &mut out,
                SysLabel::Id,
                cell(sc.clone(), k.canon().clone()),
                r,
            );
        }
    }
    for (label, m) in nu {
        for (k, r) in m.iter() {
            let s2 = k.canon().clone();
            match label {
                MemLabel::Phago(n) => {
                    let residue = lam(phago_type(), app(Canon::Bound(0), cell(s2, pc.clone())));
                    put(&mut out, SysLabel::Phago(n.clone()), residue, r);
                }
                MemLabel::CoPhago(n, rho) => {
                    let body = comp([cell(rho.canon().clone(), Canon::Bound(0)), pc.clone()]);
                    put(
                        &mut out,
                        SysLabel::CoPhago(n.clone()),
                        lam(Type::Sys, cell(s2, body)),
                        r,
                    );
                }
                MemLabel::Exo(n) => {
                    let inner = cell(par([s2, Canon::Bound(0)]), Canon::Bound(1));
                    let residue = lam(Type::Sys, lam(Type::Mem, comp([inner, pc.clone()])));
                    put(&mut out, SysLabel::Exo(n.clone()), residue, r);
                }
                MemLabel::Pino(_, rho) => {
                    let body = comp([cell(rho.canon().clone(), Canon::VOID), pc.clone()]);
                    put(&mut out, SysLabel::Id, cell(s2, body), r);
                }
                MemLabel::CoExo(n) => {
                    let Some(exos) = mu.get(&SysLabel::Exo(n.clone())) else {
                        continue;
                    };
                    let pair = rates.lookup(ActionKind::Exo, n)?;
                    for (s, r1) in exos.iter() {
                        let target = app(app(s.canon().clone(), Canon::VOID), s2.clone());
                        put(&mut out, SysLabel::Id, target, &(&(r1 * r) / &pair));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Structural semantics of a membrane.
pub fn sos_mem(sigma: &Term, rates: &RateTable) -> Result<MemBehaviour, RateError> {
    match sigma {
        Term::Prefix(action, cont) => dirac_prefix(action, cont, rates),
        Term::MemPar(l, r) => Ok(mem_par(&sos_mem(l, rates)?, l, r, &sos_mem(r, rates)?)),
        _ => Ok(MemBehaviour::new()),
    }
}

/// Structural semantics of a system.
pub fn sos_sys(p: &Term, rates: &RateTable) -> Result<SysBehaviour, RateError> {
    fn go(p: &Term, rates: &RateTable) -> Result<SysBehaviour, RateError> {
        match p {
            Term::Cell(sigma, body) => sys_loc(
                &go(body, rates)?,
                sigma,
                body,
                &sos_mem(sigma, rates)?,
                rates,
            ),
            Term::SysComp(l, r) => sys_comp(&go(l, rates)?, l, r, &go(r, rates)?, rates),
            _ => Ok(SysBehaviour::new()),
        }
    }
    go(&ground_view(p), rates)
}

/// One entry of the pointwise rated semantics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointwiseEntry {
    pub label: SysLabel,
    /// Ground target for `id`, otherwise the residue class.
    pub target: ClassKey,
    /// For residues: the residue applied to generic arguments, with the
    /// free variables `$tau`, `$rho` and `$R` marking the unconstrained parts.
    pub template: Option<Canon>,
    pub rate: Rate,
}

/// Pointwise rated transitions `P --(α, r)--> target`.
pub fn pointwise(p: &Term, rates: &RateTable) -> Result<Vec<PointwiseEntry>, RateError> {
    let mut out = Vec::new();
    for (label, m) in sos_sys(p, rates)? {
        for (k, r) in m.iter() {
            let template = match label {
                SysLabel::Id => None,
                _ => Some(instantiation_template(&label, k.canon())),
            };
            out.push(PointwiseEntry {
                label: label.clone(),
                target: k.clone(),
                template,
                rate: r.clone(),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_membrane, parse_system, Name};

    fn rates() -> RateTable {
        RateTable::parse("phago n = 2\nexo m = 3\npino k = 5\nexo k = 7").unwrap()
    }

    fn key(src: &str) -> ClassKey {
        ClassKey::of(&crate::syntax::parse_term(src).unwrap())
    }

    #[test]
    fn units() {
        assert!(sos_sys(&Term::VoidSys, &rates()).unwrap().is_empty());
        assert!(sos_mem(&Term::ZeroMem, &rates()).unwrap().is_empty());
    }

    #[test]
    fn dirac() {
        let a = Action::simple(ActionKind::Phago, Name::new("n").unwrap());
        let b = dirac_prefix(&a, &Term::ZeroMem, &rates()).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(
            b[&MemLabel::Phago(a.name.clone())].get(&key("0")),
            Rate::integer(2)
        );
        let a = Action::simple(ActionKind::Phago, Name::new("zz").unwrap());
        assert!(dirac_prefix(&a, &Term::ZeroMem, &rates()).is_err());
    }

    #[test]
    fn par_collisions_add_up() {
        let s = parse_membrane("phago n | phago n").unwrap();
        let b = sos_mem(&s, &rates()).unwrap();
        let m = &b[&MemLabel::Phago(Name::new("n").unwrap())];
        assert_eq!(m.len(), 1);
        assert_eq!(m.get(&key("phago n")), Rate::integer(4));
    }

    #[test]
    fn pino_and_exo_sync() {
        let p = parse_system("pino k{exo m}.coexo m[void]").unwrap();
        let b = sos_sys(&p, &rates()).unwrap();
        assert_eq!(
            b[&SysLabel::Id].get(&key("coexo m[exo m[void]]")),
            Rate::integer(5)
        );
        let p = parse_system("coexo m[exo m.phago n[coexo k[void]] o exo k[void]]").unwrap();
        let b = sos_sys(&p, &rates()).unwrap();
        let want = key("phago n[exo k[void]] o coexo k[void]");
        assert_eq!(b[&SysLabel::Id].get(&want), Rate::integer(3));
        assert_eq!(b.len(), 1);
    }

    #[test]
    fn phago_sync() {
        let p = parse_system("phago n.exo m[void] o cophago n{pino k{0}}.coexo k[void]").unwrap();
        let b = sos_sys(&p, &rates()).unwrap();
        let want = key("coexo k[pino k{0}[exo m[void]]]");
        assert_eq!(b[&SysLabel::Id].get(&want), Rate::integer(2));
        assert_eq!(
            b[&SysLabel::Phago(Name::new("n").unwrap())].total(),
            Rate::integer(2)
        );
    }
}
