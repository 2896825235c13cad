//! Labelled transitions, the reduction relation and derivation trees.
//!
//! Transitions are derived on surface terms so that every rule of the
//! transition system appears literally in the recorded derivation. Targets
//! of system transitions are either ground systems (label `id`) or
//! residues: abstractions waiting for the partner of an interaction.

use std::fmt;

use crate::congruence::{self, normalize, Canon, ClassKey};
use crate::syntax::{ActionKind, Name, Term};
use crate::typing::Type;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MemLabel {
    Phago(Name),
    CoPhago(Name, ClassKey),
    Exo(Name),
    CoExo(Name),
    Pino(Name, ClassKey),
}

impl MemLabel {
    pub fn name(&self) -> &Name {
        match self {
            MemLabel::Phago(n)
            | MemLabel::CoPhago(n, _)
            | MemLabel::Exo(n)
            | MemLabel::CoExo(n)
            | MemLabel::Pino(n, _) => n,
        }
    }

    pub fn kind(&self) -> ActionKind {
        match self {
            MemLabel::Phago(_) => ActionKind::Phago,
            MemLabel::CoPhago(..) => ActionKind::CoPhago,
            MemLabel::Exo(_) => ActionKind::Exo,
            MemLabel::CoExo(_) => ActionKind::CoExo,
            MemLabel::Pino(..) => ActionKind::Pino,
        }
    }
}

impl fmt::Display for MemLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MemLabel::CoPhago(n, a) => write!(f, "cophago {n}{{{a}}}"),
            MemLabel::Pino(n, a) => write!(f, "pino {n}{{{a}}}"),
            other => write!(f, "{} {}", other.kind().keyword(), other.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SysLabel {
    Id,
    Phago(Name),
    CoPhago(Name),
    Exo(Name),
}

impl SysLabel {
    /// Type of the targets carried by transitions with this label.
    pub fn target_type(&self) -> Type {
        match self {
            SysLabel::Id => Type::Sys,
            SysLabel::Phago(_) => Type::phago_residue(),
            SysLabel::CoPhago(_) => Type::cophago_residue(),
            SysLabel::Exo(_) => Type::exo_residue(),
        }
    }

    pub fn name(&self) -> Option<&Name> {
        match self {
            SysLabel::Id => None,
            SysLabel::Phago(n) | SysLabel::CoPhago(n) | SysLabel::Exo(n) => Some(n),
        }
    }

    /// Parses `id`, `phago n`, `cophago n` or `exo n`.
    pub fn parse(text: &str) -> Option<SysLabel> {
        let mut words = text.split_whitespace();
        let head = words.next()?;
        let name = words.next().map(Name::new);
        if words.next().is_some() {
            return None;
        }
        match (head, name) {
            ("id", None) => Some(SysLabel::Id),
            ("phago", Some(Ok(n))) => Some(SysLabel::Phago(n)),
            ("cophago", Some(Ok(n))) => Some(SysLabel::CoPhago(n)),
            ("exo", Some(Ok(n))) => Some(SysLabel::Exo(n)),
            _ => None,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            SysLabel::Id => "id",
            SysLabel::Phago(_) => "phago",
            SysLabel::CoPhago(_) => "cophago",
            SysLabel::Exo(_) => "exo",
        }
    }
}

impl fmt::Display for SysLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.name() {
            None => f.write_str("id"),
            Some(n) => write!(f, "{} {n}", self.family()),
        }
    }
}

/// Tree of rule names justifying a transition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: &'static str,
    pub premises: Vec<Derivation>,
    /// The fired action, recorded on prefix axioms.
    pub action: Option<MemLabel>,
}

impl Derivation {
    fn leaf(rule: &'static str, action: MemLabel) -> Derivation {
        Derivation {
            rule,
            premises: Vec::new(),
            action: Some(action),
        }
    }

    fn over(rule: &'static str, premises: Vec<Derivation>) -> Derivation {
        Derivation {
            rule,
            premises,
            action: None,
        }
    }

    /// Actions fired by the prefix axioms of the derivation, left to right.
    pub fn actions(&self) -> Vec<&MemLabel> {
        let mut out: Vec<&MemLabel> = self.action.iter().collect();
        for p in &self.premises {
            out.extend(p.actions());
        }
        out
    }

    /// Compact nested form, e.g. `id-phago-L(phago(L-par(phago-pref)), ...)`.
    pub fn compact(&self) -> String {
        if self.premises.is_empty() {
            return self.rule.to_string();
        }
        let inner: Vec<_> = self.premises.iter().map(Derivation::compact).collect();
        format!("{}({})", self.rule, inner.join(", "))
    }

    /// Indented multi-line rendering, one rule per line.
    pub fn tree(&self) -> String {
        fn go(d: &Derivation, depth: usize, out: &mut String) {
            out.push_str(&"  ".repeat(depth));
            out.push_str(d.rule);
            out.push('\n');
            for p in &d.premises {
                go(p, depth + 1, out);
            }
        }
        let mut out = String::new();
        go(self, 0, &mut out);
        out
    }
}

#[derive(Clone, Debug)]
pub struct MemStep {
    pub label: MemLabel,
    /// The membrane argument of a cophago or pino action.
    pub arg: Option<Term>,
    pub target: Term,
    pub derivation: Derivation,
}

/// A system transition on surface terms.
#[derive(Clone, Debug)]
pub struct SysStep {
    pub label: SysLabel,
    pub target: Term,
    pub derivation: Derivation,
}

/// A system transition with its target identified up to congruence.
#[derive(Clone, Debug)]
pub struct Transition {
    pub label: SysLabel,
    pub target: ClassKey,
    pub derivation: Derivation,
}

fn pref_rule(kind: ActionKind) -> &'static str {
    match kind {
        ActionKind::Phago => "phago-pref",
        ActionKind::CoPhago => "cophago-pref",
        ActionKind::Exo => "exo-pref",
        ActionKind::CoExo => "coexo-pref",
        ActionKind::Pino => "pino-pref",
    }
}

/// Transitions of a membrane term, one per reachable prefix occurrence.
pub fn mem_steps(sigma: &Term) -> Vec<MemStep> {
    match sigma {
        Term::Prefix(action, cont) => {
            let arg = action.arg.as_deref().cloned();
            let key = || ClassKey::of(arg.as_ref().expect("argument present"));
            let name = action.name.clone();
            let label = match action.kind {
                ActionKind::Phago => MemLabel::Phago(name),
                ActionKind::CoPhago => MemLabel::CoPhago(name, key()),
                ActionKind::Exo => MemLabel::Exo(name),
                ActionKind::CoExo => MemLabel::CoExo(name),
                ActionKind::Pino => MemLabel::Pino(name, key()),
            };
            vec![MemStep {
                label: label.clone(),
                arg,
                target: (**cont).clone(),
                derivation: Derivation::leaf(pref_rule(action.kind), label),
            }]
        }
        Term::MemPar(l, r) => {
            let mut out = Vec::new();
            for s in mem_steps(l) {
                out.push(MemStep {
                    target: Term::par(s.target, (**r).clone()),
                    derivation: Derivation::over("L-par", vec![s.derivation]),
                    ..s
                });
            }
            for s in mem_steps(r) {
                out.push(MemStep {
                    target: Term::par((**l).clone(), s.target),
                    derivation: Derivation::over("R-par", vec![s.derivation]),
                    ..s
                });
            }
            out
        }
        _ => Vec::new(),
    }
}

fn var(x: &str) -> Term {
    Term::var(x)
}

fn sys_to_sys() -> Type {
    Type::arrow(Type::Sys, Type::Sys)
}

/// `λZ. Z(σ'[P])`
pub(crate) fn phago_residue(sigma2: Term, p: Term) -> Term {
    Term::lambda(
        "Z",
        sys_to_sys(),
        Term::app(var("Z"), Term::cell(sigma2, p)),
    )
}

/// `λX. σ'[ρ[X] o P]`
pub(crate) fn cophago_residue(sigma2: Term, rho: Term, p: Term) -> Term {
    Term::lambda(
        "X",
        Type::Sys,
        Term::cell(sigma2, Term::comp(Term::cell(rho, var("X")), p)),
    )
}

/// `λX. λy. (σ' | y)[X] o P`
pub(crate) fn exo_residue(sigma2: Term, p: Term) -> Term {
    Term::lambda(
        "X",
        Type::Sys,
        Term::lambda(
            "y",
            Type::Mem,
            Term::comp(Term::cell(Term::par(sigma2, var("y")), var("X")), p),
        ),
    )
}

/// `σ'[ρ[void] o P]`
pub(crate) fn pino_target(sigma2: Term, rho: Term, p: Term) -> Term {
    Term::cell(sigma2, Term::comp(Term::cell(rho, Term::VoidSys), p))
}

/// `S(void)(σ')`
pub(crate) fn exo_target(s: Term, sigma2: Term) -> Term {
    Term::app(Term::app(s, Term::VoidSys), sigma2)
}

/// Wraps a residue of the left (or right) component of `P o Q` so that the
/// sibling `other` travels with it.
pub(crate) fn wrap_residue(label: &SysLabel, residue: Term, other: &Term, left: bool) -> Term {
    let join = |x: Term| {
        if left {
            Term::comp(x, other.clone())
        } else {
            Term::comp(other.clone(), x)
        }
    };
    match label {
        SysLabel::Id => join(residue),
        SysLabel::Phago(_) => Term::lambda("Z", sys_to_sys(), join(Term::app(residue, var("Z")))),
        SysLabel::CoPhago(_) => Term::lambda("X", Type::Sys, join(Term::app(residue, var("X")))),
        SysLabel::Exo(_) => Term::lambda(
            "X",
            Type::Sys,
            Term::lambda(
                "y",
                Type::Mem,
                Term::app(Term::app(residue, join(var("X"))), var("y")),
            ),
        ),
    }
}

fn comp_rule(label: &SysLabel, left: bool) -> &'static str {
    match (label, left) {
        (SysLabel::Id, true) => "L-comp-id",
        (SysLabel::Id, false) => "R-comp-id",
        (SysLabel::Phago(_), true) => "L-comp-phago",
        (SysLabel::Phago(_), false) => "R-comp-phago",
        (SysLabel::CoPhago(_), true) => "L-comp-cophago",
        (SysLabel::CoPhago(_), false) => "R-comp-cophago",
        (SysLabel::Exo(_), true) => "L-comp-exo",
        (SysLabel::Exo(_), false) => "R-comp-exo",
    }
}

/// Brings a system into a shape the rules can inspect: meta-level
/// redexes are evaluated first.
pub(crate) fn ground_view(p: &Term) -> std::borrow::Cow<'_, Term> {
    if p.is_ground() {
        std::borrow::Cow::Borrowed(p)
    } else {
        std::borrow::Cow::Owned(normalize(p).to_term())
    }
}

/// All derivable transitions of a system, on surface terms.
pub fn sys_steps_raw(p: &Term) -> Vec<SysStep> {
    let p = ground_view(p);
    derive(&p)
}

fn derive(p: &Term) -> Vec<SysStep> {
    match p {
        Term::Cell(sigma, body) => {
            let body_steps = derive(body);
            let mut out = Vec::new();
            for m in mem_steps(sigma) {
                let sigma2 = m.target.clone();
                let body = (**body).clone();
                match &m.label {
                    MemLabel::Phago(n) => out.push(SysStep {
                        label: SysLabel::Phago(n.clone()),
                        target: phago_residue(sigma2, body),
                        derivation: Derivation::over("phago", vec![m.derivation]),
                    }),
                    MemLabel::CoPhago(n, _) => out.push(SysStep {
                        label: SysLabel::CoPhago(n.clone()),
                        target: cophago_residue(sigma2, m.arg.clone().unwrap(), body),
                        derivation: Derivation::over("cophago", vec![m.derivation]),
                    }),
                    MemLabel::Exo(n) => out.push(SysStep {
                        label: SysLabel::Exo(n.clone()),
                        target: exo_residue(sigma2, body),
                        derivation: Derivation::over("exo", vec![m.derivation]),
                    }),
                    MemLabel::Pino(..) => out.push(SysStep {
                        label: SysLabel::Id,
                        target: pino_target(sigma2, m.arg.clone().unwrap(), body),
                        derivation: Derivation::over("id-pino", vec![m.derivation]),
                    }),
                    MemLabel::CoExo(n) => {
                        for s in &body_steps {
                            if s.label == SysLabel::Exo(n.clone()) {
                                out.push(SysStep {
                                    label: SysLabel::Id,
                                    target: exo_target(s.target.clone(), sigma2.clone()),
                                    derivation: Derivation::over(
                                        "id-exo",
                                        vec![s.derivation.clone(), m.derivation.clone()],
                                    ),
                                });
                            }
                        }
                    }
                }
            }
            for s in body_steps {
                if s.label == SysLabel::Id {
                    out.push(SysStep {
                        label: SysLabel::Id,
                        target: Term::cell((**sigma).clone(), s.target),
                        derivation: Derivation::over("id-loc", vec![s.derivation]),
                    });
                }
            }
            out
        }
        Term::SysComp(l, r) => {
            let ls = derive(l);
            let rs = derive(r);
            let mut out = Vec::new();
            for (steps, other, left) in [(&ls, r, true), (&rs, l, false)] {
                for s in steps {
                    out.push(SysStep {
                        label: s.label.clone(),
                        target: wrap_residue(&s.label, s.target.clone(), other, left),
                        derivation: Derivation::over(
                            comp_rule(&s.label, left),
                            vec![s.derivation.clone()],
                        ),
                    });
                }
            }
            for (phagos, cophagos, rule) in [(&ls, &rs, "id-phago-L"), (&rs, &ls, "id-phago-R")] {
                for f in phagos {
                    let SysLabel::Phago(n) = &f.label else {
                        continue;
                    };
                    for a in cophagos {
                        if a.label == SysLabel::CoPhago(n.clone()) {
                            out.push(SysStep {
                                label: SysLabel::Id,
                                target: Term::app(f.target.clone(), a.target.clone()),
                                derivation: Derivation::over(
                                    rule,
                                    vec![f.derivation.clone(), a.derivation.clone()],
                                ),
                            });
                        }
                    }
                }
            }
            out
        }
        _ => Vec::new(),
    }
}

/// All transitions of a system with congruence-canonical targets.
pub fn sys_steps(p: &Term) -> Vec<Transition> {
    sys_steps_raw(p)
        .into_iter()
        .map(|s| Transition {
            label: s.label,
            target: ClassKey::of(&s.target),
            derivation: s.derivation,
        })
        .collect()
}

/// Number of action prefixes reachable by the rules (not under arguments).
pub fn prefix_count(t: &Term) -> usize {
    match t {
        Term::Prefix(_, c) => 1 + prefix_count(c),
        Term::MemPar(l, r) | Term::SysComp(l, r) | Term::Cell(l, r) | Term::App(l, r) => {
            prefix_count(l) + prefix_count(r)
        }
        Term::Lambda(_, _, b) => prefix_count(b),
        _ => 0,
    }
}

/// One-step reducts of a system, computed on canonical forms.
pub fn reduce(p: &Term) -> Vec<Canon> {
    reduce_canon(&normalize(p))
}

fn split_prefix(sigma: &Canon, i: usize) -> Option<(&congruence::CAction, Canon)> {
    let items = sigma.par_items();
    let Canon::Prefix(a, cont) = &items[i] else {
        return None;
    };
    let rest = items
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, x)| x.clone())
        .chain(std::iter::once((**cont).clone()));
    Some((a, congruence::par(rest)))
}

fn without(items: &[Canon], skip: &[usize]) -> Vec<Canon> {
    items
        .iter()
        .enumerate()
        .filter(|(j, _)| !skip.contains(j))
        .map(|(_, x)| x.clone())
        .collect()
}

pub fn reduce_canon(p: &Canon) -> Vec<Canon> {
    let items = p.comp_items();
    let mut out = Vec::new();
    let rebuild = |skip: &[usize], new: Canon| {
        let mut rest = without(items, skip);
        rest.push(new);
        congruence::comp(rest)
    };
    for (i, item) in items.iter().enumerate() {
        let Canon::Cell(sigma, body) = item else {
            continue;
        };
        for a in 0..sigma.par_items().len() {
            let Some((act, sigma_rest)) = split_prefix(sigma, a) else {
                continue;
            };
            match act.kind {
                ActionKind::Pino => {
                    let rho = (**act.arg.as_ref().unwrap()).clone();
                    let inner =
                        congruence::comp([congruence::cell(rho, Canon::VOID), (**body).clone()]);
                    out.push(rebuild(&[i], congruence::cell(sigma_rest, inner)));
                }
                ActionKind::Phago => {
                    for (j, other) in items.iter().enumerate() {
                        let Canon::Cell(tau, q) = other else { continue };
                        if j == i {
                            continue;
                        }
                        for b in 0..tau.par_items().len() {
                            let Some((co, tau_rest)) = split_prefix(tau, b) else {
                                continue;
                            };
                            if co.kind != ActionKind::CoPhago || co.name != act.name {
                                continue;
                            }
                            let rho = (**co.arg.as_ref().unwrap()).clone();
                            let engulfed = congruence::cell(
                                rho,
                                congruence::cell(sigma_rest.clone(), (**body).clone()),
                            );
                            let new = congruence::cell(
                                tau_rest,
                                congruence::comp([engulfed, (**q).clone()]),
                            );
                            out.push(rebuild(&[i, j], new));
                        }
                    }
                }
                ActionKind::CoExo => {
                    let inner = body.comp_items();
                    for (k, child) in inner.iter().enumerate() {
                        let Canon::Cell(s2, p2) = child else { continue };
                        for b in 0..s2.par_items().len() {
                            let Some((ex, s2_rest)) = split_prefix(s2, b) else {
                                continue;
                            };
                            if ex.kind != ActionKind::Exo || ex.name != act.name {
                                continue;
                            }
                            let merged = congruence::par([s2_rest, sigma_rest.clone()]);
                            let outer =
                                congruence::cell(merged, congruence::comp(without(inner, &[k])));
                            out.push(rebuild(&[i], congruence::comp([outer, (**p2).clone()])));
                        }
                    }
                }
                ActionKind::CoPhago | ActionKind::Exo => {}
            }
        }
        for reduct in reduce_canon(body) {
            out.push(rebuild(&[i], congruence::cell((**sigma).clone(), reduct)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::normalize;
    use crate::syntax::{parse_membrane, parse_system, parse_term};
    use crate::typing::type_of;

    fn labels(steps: &[MemStep]) -> Vec<String> {
        steps.iter().map(|s| s.label.to_string()).collect()
    }

    #[test]
    fn membrane_steps() {
        assert!(mem_steps(&Term::ZeroMem).is_empty());
        let s = mem_steps(&parse_membrane("phago n.exo m").unwrap());
        assert_eq!(labels(&s), ["phago n"]);
        assert_eq!(s[0].target, parse_membrane("exo m").unwrap());
        let s = mem_steps(&parse_membrane("phago n | phago n").unwrap());
        assert_eq!(s.len(), 2);
        assert_eq!(ClassKey::of(&s[0].target), ClassKey::of(&s[1].target));
        assert_eq!(s[0].derivation.compact(), "L-par(phago-pref)");
        assert_eq!(s[1].derivation.compact(), "R-par(phago-pref)");
        let s = mem_steps(&parse_membrane("pino n{exo k | 0}").unwrap());
        assert_eq!(labels(&s), ["pino n{exo k}"]);
    }

    #[test]
    fn red_phago_derivation() {
        let p = parse_system(
            "(phago n.exo a | coexo b)[void] o (cophago n{pino c{0}}.exo d | exo e)[phago f[void]]",
        )
        .unwrap();
        let ids: Vec<_> = sys_steps(&p)
            .into_iter()
            .filter(|t| t.label == SysLabel::Id)
            .collect();
        assert_eq!(ids.len(), 1);
        let expected =
            parse_system("(exo d | exo e)[pino c{0}[(exo a | coexo b)[void]] o phago f[void]]")
                .unwrap();
        assert_eq!(ids[0].target, ClassKey::of(&expected));
        assert_eq!(
            ids[0].derivation.compact(),
            "id-phago-L(phago(L-par(phago-pref)), cophago(L-par(cophago-pref)))"
        );
    }

    #[test]
    fn residues() {
        let p = parse_system("phago n.exo k[coexo m[void]]").unwrap();
        let s = sys_steps(&p);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].label, SysLabel::Phago(Name::new("n").unwrap()));
        let r = parse_term("\\Z:sys->sys. $Z(exo k[coexo m[void]])").unwrap();
        assert_eq!(s[0].target, ClassKey::of(&r));
        for step in sys_steps_raw(
            &parse_system("phago n[void] o cophago n{0}[void] o exo k[void]").unwrap(),
        ) {
            assert_eq!(
                type_of(&step.target).unwrap(),
                step.label.target_type(),
                "{step:?}"
            );
        }
    }

    #[test]
    fn exo_and_pino() {
        let p =
            parse_system("coexo m.exo k[exo m.phago a[phago b[void]] o phago c[void]]").unwrap();
        let ids: Vec<_> = sys_steps(&p)
            .into_iter()
            .filter(|t| t.label == SysLabel::Id)
            .collect();
        assert_eq!(ids.len(), 1);
        let want = parse_system("(phago a | exo k)[phago c[void]] o phago b[void]").unwrap();
        assert_eq!(ids[0].target, ClassKey::of(&want));
        assert_eq!(
            ids[0].derivation.compact(),
            "id-exo(L-comp-exo(exo(exo-pref)), coexo-pref)"
        );
        let p = parse_system("pino n{exo k}.phago a[void]").unwrap();
        let ids = sys_steps(&p);
        assert_eq!(
            ids[0].target,
            ClassKey::of(&parse_system("phago a[exo k[void]]").unwrap())
        );
        let reducts = reduce(&p);
        assert_eq!(
            reducts,
            vec![normalize(&parse_system("phago a[exo k[]]").unwrap())]
        );
    }

    #[test]
    fn nothing_moves_in_void() {
        assert!(sys_steps(&Term::VoidSys).is_empty());
        assert!(reduce(&Term::VoidSys).is_empty());
        assert!(sys_steps(&parse_system("0[phago n[void]]").unwrap()).is_empty());
    }

    #[test]
    fn labels_parse() {
        for l in ["id", "phago n", "cophago n", "exo k"] {
            assert_eq!(SysLabel::parse(l).unwrap().to_string(), l);
        }
        assert!(SysLabel::parse("coexo n").is_none());
        assert!(SysLabel::parse("phago").is_none());
    }
}
