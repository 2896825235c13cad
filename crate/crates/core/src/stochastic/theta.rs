//! Rate functions defined by recursion on the syntax.
//!
//! `theta_sys` evaluates the system semantics directly on canonical forms,
//! decomposing a system into the pieces that can interact, without going
//! through the measure combinators. `meta_theta` follows the recursion over
//! meta-terms, where residue queries are answered by inverting the
//! constructions applied to their arguments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::congruence::{
    app, cell, class_residual, comp, lam, multiset_minus, normalize, par, Canon, ClassKey,
    ClassSet, Residual,
};
use crate::lts::{ground_view, mem_steps, sys_steps, MemLabel, SysLabel};
use crate::syntax::{ActionKind, Name, Term};
use crate::typing::Type;

use super::measure::mem_label;
use super::{Rate, RateError, RateTable};

/// A transition label of either sort.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Mem(MemLabel),
    Sys(SysLabel),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Mem(l) => l.fmt(f),
            Label::Sys(l) => l.fmt(f),
        }
    }
}

struct PhagoPiece {
    name: Name,
    /// The engulfed cell `σ'[Q]`.
    inner: Canon,
    outer: Vec<Canon>,
    rate: Rate,
}

struct CoPhagoPiece {
    name: Name,
    sigma: Canon,
    rho: Canon,
    body: Canon,
    outer: Vec<Canon>,
    rate: Rate,
}

struct ExoPiece {
    name: Name,
    sigma: Canon,
    /// Contents expelled by the exocytosis.
    body: Canon,
    /// Siblings that stay within the merged membrane.
    inside: Vec<Canon>,
    rate: Rate,
}

#[derive(Default)]
struct Pieces {
    phago: Vec<PhagoPiece>,
    cophago: Vec<CoPhagoPiece>,
    exo: Vec<ExoPiece>,
    id: Vec<(Canon, Rate)>,
}

fn without(items: &[Canon], skip: &[usize]) -> Vec<Canon> {
    items
        .iter()
        .enumerate()
        .filter(|(i, _)| !skip.contains(i))
        .map(|(_, c)| c.clone())
        .collect()
}

fn pieces(p: &Canon, rates: &RateTable) -> Result<Pieces, RateError> {
    match p {
        Canon::Cell(m, b) => return cell_pieces(m, b, rates),
        Canon::Comp(_) => {}
        _ => return Ok(Pieces::default()),
    }
    let items = p.comp_items();
    let per: Vec<Pieces> = items
        .iter()
        .map(|it| pieces(it, rates))
        .collect::<Result<_, _>>()?;
    let mut out = Pieces::default();
    for (i, part) in per.iter().enumerate() {
        let sib = without(items, &[i]);
        for ph in &part.phago {
            let outer = ph.outer.iter().chain(&sib).cloned().collect();
            out.phago.push(PhagoPiece {
                outer,
                name: ph.name.clone(),
                inner: ph.inner.clone(),
                rate: ph.rate.clone(),
            });
        }
        for co in &part.cophago {
            out.cophago.push(CoPhagoPiece {
                name: co.name.clone(),
                sigma: co.sigma.clone(),
                rho: co.rho.clone(),
                body: co.body.clone(),
                outer: co.outer.iter().chain(&sib).cloned().collect(),
                rate: co.rate.clone(),
            });
        }
        for ex in &part.exo {
            out.exo.push(ExoPiece {
                name: ex.name.clone(),
                sigma: ex.sigma.clone(),
                body: ex.body.clone(),
                inside: ex.inside.iter().chain(&sib).cloned().collect(),
                rate: ex.rate.clone(),
            });
        }
        for (t, r) in &part.id {
            out.id.push((
                comp(std::iter::once(t.clone()).chain(sib.iter().cloned())),
                r.clone(),
            ));
        }
    }
    for (i, left) in per.iter().enumerate() {
        for (j, right) in per.iter().enumerate() {
            if i == j {
                continue;
            }
            let rest = without(items, &[i, j]);
            for ph in &left.phago {
                for co in right.cophago.iter().filter(|co| co.name == ph.name) {
                    let engulfed = cell(co.rho.clone(), ph.inner.clone());
                    let host = cell(co.sigma.clone(), comp([engulfed, co.body.clone()]));
                    let all = std::iter::once(host)
                        .chain(ph.outer.iter().cloned())
                        .chain(co.outer.iter().cloned())
                        .chain(rest.iter().cloned());
                    let rate =
                        &(&ph.rate * &co.rate) / &rates.lookup(ActionKind::Phago, &ph.name)?;
                    out.id.push((comp(all), rate));
                }
            }
        }
    }
    Ok(out)
}

fn cell_pieces(m: &Canon, b: &Canon, rates: &RateTable) -> Result<Pieces, RateError> {
    let mut out = Pieces::default();
    let mut coexo = Vec::new();
    let items = m.par_items();
    for (i, it) in items.iter().enumerate() {
        let Canon::Prefix(a, cont) = it else { continue };
        let s2 = par(without(items, &[i]).into_iter().chain([(**cont).clone()]));
        let rate = rates.lookup(a.kind, &a.name)?;
        let name = a.name.clone();
        let arg = || a.arg.as_deref().cloned().expect("argument present");
        match a.kind {
            ActionKind::Phago => out.phago.push(PhagoPiece {
                name,
                inner: cell(s2, b.clone()),
                outer: vec![],
                rate,
            }),
            ActionKind::CoPhago => out.cophago.push(CoPhagoPiece {
                name,
                sigma: s2,
                rho: arg(),
                body: b.clone(),
                outer: vec![],
                rate,
            }),
            ActionKind::Exo => out.exo.push(ExoPiece {
                name,
                sigma: s2,
                body: b.clone(),
                inside: vec![],
                rate,
            }),
            ActionKind::CoExo => coexo.push((name, s2, rate)),
            ActionKind::Pino => out
                .id
                .push((cell(s2, comp([cell(arg(), Canon::VOID), b.clone()])), rate)),
        }
    }
    let inner = pieces(b, rates)?;
    for (t, r) in inner.id {
        out.id.push((cell(m.clone(), t), r));
    }
    for ex in &inner.exo {
        for (name, s2, r2) in coexo.iter().filter(|(n, ..)| *n == ex.name) {
            let merged = cell(
                par([ex.sigma.clone(), s2.clone()]),
                comp(ex.inside.iter().cloned()),
            );
            let rate = &(&ex.rate * r2) / &rates.lookup(ActionKind::Exo, name)?;
            out.id.push((comp([merged, ex.body.clone()]), rate));
        }
    }
    Ok(out)
}

fn phago_fits(ph: &PhagoPiece, k: &Canon) -> bool {
    let Some(rest) = multiset_minus(k.comp_items(), &ph.outer) else {
        return false;
    };
    match rest.as_slice() {
        [] => ph.inner.is_void(),
        [Canon::Cell(_, x)] => {
            ph.inner.is_void()
                || x.comp_items()
                    .iter()
                    .any(|it| matches!(it, Canon::Cell(_, c) if **c == ph.inner))
        }
        _ => false,
    }
}

fn cophago_fits(co: &CoPhagoPiece, k: &Canon) -> bool {
    let Some(rest) = multiset_minus(k.comp_items(), &co.outer) else {
        return false;
    };
    match rest.as_slice() {
        [] => co.sigma.is_zero() && co.body.is_void() && co.rho.is_zero(),
        [Canon::Cell(m, e)] if **m == co.sigma => {
            let Some(rest) = multiset_minus(e.comp_items(), co.body.comp_items()) else {
                return false;
            };
            match rest.as_slice() {
                [] => co.rho.is_zero(),
                [Canon::Cell(r, y)] => **r == co.rho && y.comp_items().len() <= 1,
                _ => false,
            }
        }
        _ => false,
    }
}

fn exo_fits(ex: &ExoPiece, k: &Canon) -> bool {
    let Some(rest) = multiset_minus(k.comp_items(), ex.body.comp_items()) else {
        return false;
    };
    match rest.as_slice() {
        [] => ex.sigma.is_zero() && ex.inside.is_empty(),
        [Canon::Cell(m, b)] => {
            multiset_minus(m.par_items(), ex.sigma.par_items()).is_some()
                && multiset_minus(b.comp_items(), &ex.inside).is_some()
        }
        _ => false,
    }
}

/// The system rate function evaluated by recursion on `p`.
///
/// For `id` the result is the total rate into `set`. For a residue label it
/// is the total rate of residues that produce some member of `set` for some
/// choice of the interaction partner.
pub fn theta_sys(
    label: &SysLabel,
    p: &Term,
    set: &ClassSet,
    rates: &RateTable,
) -> Result<Rate, RateError> {
    let pc = normalize(&ground_view(p));
    let pcs = pieces(&pc, rates)?;
    let targets: Vec<&Canon> = set
        .iter()
        .map(ClassKey::canon)
        .filter(|k| k.is_ground())
        .collect();
    let any = |fits: &dyn Fn(&Canon) -> bool| targets.iter().any(|k| fits(k));
    let mut total = Rate::zero();
    match label {
        SysLabel::Id => {
            for (t, r) in &pcs.id {
                if set.contains(&ClassKey::from(t.clone())) {
                    total += r;
                }
            }
        }
        SysLabel::Phago(n) => {
            for ph in pcs.phago.iter().filter(|x| x.name == *n) {
                if any(&|k| phago_fits(ph, k)) {
                    total += &ph.rate;
                }
            }
        }
        SysLabel::CoPhago(n) => {
            for co in pcs.cophago.iter().filter(|x| x.name == *n) {
                if any(&|k| cophago_fits(co, k)) {
                    total += &co.rate;
                }
            }
        }
        SysLabel::Exo(n) => {
            for ex in pcs.exo.iter().filter(|x| x.name == *n) {
                if any(&|k| exo_fits(ex, k)) {
                    total += &ex.rate;
                }
            }
        }
    }
    Ok(total)
}

fn phago_arrow() -> Type {
    Type::arrow(Type::Sys, Type::Sys)
}

fn singleton(c: Canon) -> ClassSet {
    ClassSet::from([ClassKey::from(c)])
}

/// `{ σ | λZ. Z(σ[N]) ∈ T }`
fn phago_inverse(set: &ClassSet, n: &Canon) -> ClassSet {
    let mut out = ClassSet::new();
    for k in set {
        let Canon::Lam(ty, body) = k.canon() else {
            continue;
        };
        if *ty != phago_arrow() {
            continue;
        }
        let Canon::App(f, c) = &**body else { continue };
        if **f != Canon::Bound(0) {
            continue;
        }
        match &**c {
            Canon::Cell(m, b) if **b == *n => {
                out.insert(ClassKey::from((**m).clone()));
            }
            c if c.is_void() && n.is_void() => {
                out.insert(ClassKey::from(Canon::ZERO));
            }
            _ => {}
        }
    }
    out
}

/// `{ (ρ, σ) | λX. σ[ρ[X] o N] ∈ T }`, grouped by `ρ`.
fn cophago_inverse(set: &ClassSet, n: &Canon) -> BTreeMap<ClassKey, ClassSet> {
    let mut out: BTreeMap<ClassKey, ClassSet> = BTreeMap::new();
    for k in set {
        let Canon::Lam(Type::Sys, body) = k.canon() else {
            continue;
        };
        let Canon::Cell(m, e) = &**body else { continue };
        let Some(rest) = multiset_minus(e.comp_items(), n.comp_items()) else {
            continue;
        };
        if let [Canon::Cell(rho, x)] = rest.as_slice() {
            if **x == Canon::Bound(0) {
                out.entry(ClassKey::from((**rho).clone()))
                    .or_default()
                    .insert(ClassKey::from((**m).clone()));
            }
        }
    }
    out
}

/// `{ σ | λX. λy. (σ | y)[X] o N ∈ T }`
fn exo_inverse(set: &ClassSet, n: &Canon) -> ClassSet {
    let mut out = ClassSet::new();
    for k in set {
        let Canon::Lam(Type::Sys, inner) = k.canon() else {
            continue;
        };
        let Canon::Lam(Type::Mem, body) = &**inner else {
            continue;
        };
        let Some(rest) = multiset_minus(body.comp_items(), n.comp_items()) else {
            continue;
        };
        let [Canon::Cell(m, x)] = rest.as_slice() else {
            continue;
        };
        if **x != Canon::Bound(1) {
            continue;
        }
        if let Some(sigma) = multiset_minus(m.par_items(), &[Canon::Bound(0)]) {
            out.insert(ClassKey::from(par(sigma)));
        }
    }
    out
}

/// `{ σ | σ[ρ[void] o N] ∈ T }`
fn pino_inverse(set: &ClassSet, rho: &Canon, n: &Canon) -> ClassSet {
    let want = comp([cell(rho.clone(), Canon::VOID), n.clone()]);
    let mut out = ClassSet::new();
    for k in set {
        match k.canon() {
            Canon::Cell(m, e) if **e == want => {
                out.insert(ClassKey::from((**m).clone()));
            }
            c if c.is_void() && want.is_void() => {
                out.insert(ClassKey::from(Canon::ZERO));
            }
            _ => {}
        }
    }
    out
}

/// `{ F | λZ. F(Z) o N ∈ T }` for phago (`arg` = `sys -> sys`) and cophago
/// (`arg` = `sys`) residues.
fn comp_inverse(set: &ClassSet, arg: &Type, n: &Canon) -> ClassSet {
    let mut out = ClassSet::new();
    for k in set {
        let Canon::Lam(ty, body) = k.canon() else {
            continue;
        };
        if ty != arg {
            continue;
        }
        if let Some(rest) = multiset_minus(body.comp_items(), n.comp_items()) {
            out.insert(ClassKey::from(lam(arg.clone(), comp(rest))));
        }
    }
    out
}

/// Removes `n` from the composition that holds the bound system variable.
fn strip_beside_var(c: &Canon, var: u32, n: &Canon) -> Option<Canon> {
    if c.comp_items().contains(&Canon::Bound(var)) {
        return multiset_minus(c.comp_items(), n.comp_items()).map(comp);
    }
    let items = c.comp_items();
    for (i, it) in items.iter().enumerate() {
        if let Canon::Cell(m, b) = it {
            if let Some(b2) = strip_beside_var(b, var, n) {
                let mut new = without(items, &[i]);
                new.push(cell((**m).clone(), b2));
                return Some(comp(new));
            }
        }
    }
    None
}

/// `{ S | λX. λy. S(X o N)(y) ∈ T }`
fn exo_comp_inverse(set: &ClassSet, n: &Canon) -> ClassSet {
    let mut out = ClassSet::new();
    for k in set {
        let Canon::Lam(Type::Sys, inner) = k.canon() else {
            continue;
        };
        let Canon::Lam(Type::Mem, body) = &**inner else {
            continue;
        };
        if let Some(b2) = strip_beside_var(body, 1, n) {
            out.insert(ClassKey::from(lam(Type::Sys, lam(Type::Mem, b2))));
        }
    }
    out
}

fn sys_supports(p: &Term, label: &SysLabel) -> BTreeSet<ClassKey> {
    sys_steps(p)
        .into_iter()
        .filter(|t| t.label == *label)
        .map(|t| t.target)
        .collect()
}

/// The rate function defined by recursion on meta-terms.
///
/// `meta_theta(α, M, T)` is the total rate at which `M` performs `α` into
/// the union of the classes in `T`; residue labels expect sets of residues.
pub fn meta_theta(
    label: &Label,
    m: &Term,
    set: &ClassSet,
    rates: &RateTable,
) -> Result<Rate, RateError> {
    if set.is_empty() {
        return Ok(Rate::zero());
    }
    match m {
        Term::Prefix(action, cont) => {
            if *label == Label::Mem(mem_label(action)) && set.contains(&ClassKey::of(cont)) {
                rates.lookup(action.kind, &action.name)
            } else {
                Ok(Rate::zero())
            }
        }
        Term::MemPar(l, r) => {
            if !matches!(label, Label::Mem(_)) {
                return Ok(Rate::zero());
            }
            let from_r = meta_theta(
                label,
                r,
                &class_residual(set, &Residual::MemPar(normalize(l))),
                rates,
            )?;
            let from_l = meta_theta(
                label,
                l,
                &class_residual(set, &Residual::MemPar(normalize(r))),
                rates,
            )?;
            Ok(from_r + from_l)
        }
        Term::Cell(sigma, body) => match label {
            Label::Sys(sl) => theta_cell(sl, sigma, body, set, rates),
            Label::Mem(_) => Ok(Rate::zero()),
        },
        Term::SysComp(l, r) => match label {
            Label::Sys(sl) => theta_comp(sl, l, r, set, rates),
            Label::Mem(_) => Ok(Rate::zero()),
        },
        Term::App(..) => {
            let nf = normalize(m).to_term();
            if matches!(nf, Term::App(..)) {
                return Ok(Rate::zero());
            }
            meta_theta(label, &nf, set, rates)
        }
        Term::ZeroMem | Term::VoidSys | Term::Var(_) | Term::Lambda(..) => Ok(Rate::zero()),
    }
}

fn theta_cell(
    label: &SysLabel,
    sigma: &Term,
    body: &Term,
    set: &ClassSet,
    rates: &RateTable,
) -> Result<Rate, RateError> {
    let n = normalize(body);
    match label {
        SysLabel::Phago(name) => meta_theta(
            &Label::Mem(MemLabel::Phago(name.clone())),
            sigma,
            &phago_inverse(set, &n),
            rates,
        ),
        SysLabel::CoPhago(name) => {
            let mut total = Rate::zero();
            for (rho, sigmas) in cophago_inverse(set, &n) {
                let l = Label::Mem(MemLabel::CoPhago(name.clone(), rho));
                total += &meta_theta(&l, sigma, &sigmas, rates)?;
            }
            Ok(total)
        }
        SysLabel::Exo(name) => meta_theta(
            &Label::Mem(MemLabel::Exo(name.clone())),
            sigma,
            &exo_inverse(set, &n),
            rates,
        ),
        SysLabel::Id => {
            let inside = class_residual(set, &Residual::CellBody(normalize(sigma)));
            let mut total = meta_theta(&Label::Sys(SysLabel::Id), body, &inside, rates)?;
            let steps = mem_steps(sigma);
            let pinos: BTreeSet<MemLabel> = steps
                .iter()
                .filter(|s| matches!(s.label, MemLabel::Pino(..)))
                .map(|s| s.label.clone())
                .collect();
            for l in pinos {
                let MemLabel::Pino(_, rho) = &l else {
                    unreachable!()
                };
                let sigmas = pino_inverse(set, rho.canon(), &n);
                total += &meta_theta(&Label::Mem(l.clone()), sigma, &sigmas, rates)?;
            }
            let coexos: BTreeSet<(Name, ClassKey)> = steps
                .iter()
                .filter(|s| matches!(s.label, MemLabel::CoExo(_)))
                .map(|s| (s.label.name().clone(), ClassKey::of(&s.target)))
                .collect();
            for (name, s2) in coexos {
                let exo = SysLabel::Exo(name.clone());
                for s in sys_supports(body, &exo) {
                    let target = app(app(s.canon().clone(), Canon::VOID), s2.canon().clone());
                    if !set.contains(&ClassKey::from(target)) {
                        continue;
                    }
                    let r1 =
                        meta_theta(&Label::Sys(exo.clone()), body, &ClassSet::from([s]), rates)?;
                    let coexo = Label::Mem(MemLabel::CoExo(name.clone()));
                    let r2 = meta_theta(&coexo, sigma, &ClassSet::from([s2.clone()]), rates)?;
                    total += &(&(&r1 * &r2) / &rates.lookup(ActionKind::Exo, &name)?);
                }
            }
            Ok(total)
        }
    }
}

fn theta_comp(
    label: &SysLabel,
    l: &Term,
    r: &Term,
    set: &ClassSet,
    rates: &RateTable,
) -> Result<Rate, RateError> {
    let (lc, rc) = (normalize(l), normalize(r));
    let sides = [(r, &lc), (l, &rc)];
    let mut total = Rate::zero();
    for (me, sibling) in sides {
        let sub = match label {
            SysLabel::Id => class_residual(set, &Residual::SysComp(sibling.clone())),
            SysLabel::Phago(_) => comp_inverse(set, &phago_arrow(), sibling),
            SysLabel::CoPhago(_) => comp_inverse(set, &Type::Sys, sibling),
            SysLabel::Exo(_) => exo_comp_inverse(set, sibling),
        };
        total += &meta_theta(&Label::Sys(label.clone()), me, &sub, rates)?;
    }
    if *label != SysLabel::Id {
        return Ok(total);
    }
    for (ph_side, co_side) in [(l, r), (r, l)] {
        let phagos: BTreeSet<Name> = sys_steps(ph_side)
            .into_iter()
            .filter_map(|t| match t.label {
                SysLabel::Phago(n) => Some(n),
                _ => None,
            })
            .collect();
        for name in phagos {
            let (ph, co) = (
                SysLabel::Phago(name.clone()),
                SysLabel::CoPhago(name.clone()),
            );
            let fs = sys_supports(ph_side, &ph);
            let as_ = sys_supports(co_side, &co);
            for f in &fs {
                for a in &as_ {
                    if !set.contains(&ClassKey::from(app(f.canon().clone(), a.canon().clone()))) {
                        continue;
                    }
                    let r1 = meta_theta(
                        &Label::Sys(ph.clone()),
                        ph_side,
                        &singleton(f.canon().clone()),
                        rates,
                    )?;
                    let r2 = meta_theta(
                        &Label::Sys(co.clone()),
                        co_side,
                        &singleton(a.canon().clone()),
                        rates,
                    )?;
                    total += &(&(&r1 * &r2) / &rates.lookup(ActionKind::Phago, &name)?);
                }
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_system;

    fn rates() -> RateTable {
        RateTable::uniform(Rate::integer(2))
    }

    fn set(srcs: &[&str]) -> ClassSet {
        srcs.iter()
            .map(|s| ClassKey::of(&crate::syntax::parse_term(s).unwrap()))
            .collect()
    }

    #[test]
    fn pino_rate() {
        let p = parse_system("pino k{0}[void]").unwrap();
        let t = set(&["0[0[void]]"]);
        assert_eq!(
            theta_sys(&SysLabel::Id, &p, &t, &rates()).unwrap(),
            Rate::integer(2)
        );
        let l = Label::Sys(SysLabel::Id);
        assert_eq!(meta_theta(&l, &p, &t, &rates()).unwrap(), Rate::integer(2));
    }

    #[test]
    fn phago_sync_rate() {
        let p = parse_system("phago n[void] o cophago n{0}[void]").unwrap();
        let t = set(&["0[0[0[void]]]"]);
        assert_eq!(
            theta_sys(&SysLabel::Id, &p, &t, &rates()).unwrap(),
            Rate::integer(2)
        );
        let l = Label::Sys(SysLabel::Id);
        assert_eq!(meta_theta(&l, &p, &t, &rates()).unwrap(), Rate::integer(2));
    }

    #[test]
    fn residue_sets() {
        let p = parse_system("phago n[void] o exo m[void]").unwrap();
        let f = sys_steps(&p)
            .into_iter()
            .find(|t| t.label.family() == "phago")
            .unwrap();
        let l = Label::Sys(f.label.clone());
        assert_eq!(
            meta_theta(&l, &p, &ClassSet::from([f.target]), &rates()).unwrap(),
            Rate::integer(2)
        );
        let shapes = set(&["0[0[0[void]] o void] o exo m[void]", "exo m[void]"]);
        assert_eq!(
            theta_sys(&f.label, &p, &shapes, &rates()).unwrap(),
            Rate::integer(2)
        );
    }
}
