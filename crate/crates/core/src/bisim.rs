//! Strong and rate bisimulation by partition refinement.
//!
//! Residues are compared through a finite family of instantiations. States
//! reached by instantiating a residue live one layer deeper than the state
//! that produced it; at the deepest layer residues are compared by label
//! only. Every refutation is sound, while `Bisimilar` holds relative to the
//! family and the depth.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::congruence::{app, cell, comp, lam, normalize, Canon, ClassKey};
use crate::lts::{ground_view, sys_steps, MemLabel, SysLabel};
use crate::stochastic::{sos_sys, Rate, RateError, RateTable};
use crate::syntax::{parse_membrane, parse_system, Action, ActionKind, Name, ParseError, Term};
use crate::typing::Type;

pub const DEFAULT_STATE_BUDGET: usize = 100_000;

/// Finite test sets standing in for the universally quantified arguments
/// of residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstFamily {
    mem: Vec<Canon>,
    sys: Vec<Canon>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("line {line}: expected `mem: <membrane>` or `sys: <system>`")]
    Syntax { line: usize },
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
}

impl InstFamily {
    /// A family over the given fillers; `0` and `void` are always included.
    pub fn new(
        mem: impl IntoIterator<Item = Canon>,
        sys: impl IntoIterator<Item = Canon>,
    ) -> InstFamily {
        let mem: BTreeSet<Canon> = mem.into_iter().chain([Canon::ZERO]).collect();
        let sys: BTreeSet<Canon> = sys.into_iter().chain([Canon::VOID]).collect();
        InstFamily {
            mem: mem.into_iter().collect(),
            sys: sys.into_iter().collect(),
        }
    }

    /// For each name: the membranes `0`, `phago n`, `cophago n{0}`, `exo n`,
    /// `coexo n`, `pino n{0}`, and the systems `void` and `m[void]` for each
    /// such membrane `m`.
    pub fn default_for<'a>(names: impl IntoIterator<Item = &'a Name>) -> InstFamily {
        let mut mem = vec![Canon::ZERO];
        for n in names {
            for kind in ActionKind::ALL {
                let action = if kind.takes_arg() {
                    Action::with_arg(kind, n.clone(), Term::ZeroMem)
                } else {
                    Action::simple(kind, n.clone())
                };
                mem.push(normalize(&Term::prefix(action, Term::ZeroMem)));
            }
        }
        let sys: Vec<Canon> = mem.iter().map(|m| cell(m.clone(), Canon::VOID)).collect();
        InstFamily::new(mem, sys)
    }

    /// The default family over the names of both systems.
    pub fn for_systems(p: &Term, q: &Term) -> InstFamily {
        let names: BTreeSet<Name> = p.names().into_iter().chain(q.names()).collect();
        InstFamily::default_for(&names)
    }

    /// Reads lines `mem: <membrane>` and `sys: <system>`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<InstFamily, FamilyError> {
        let (mut mem, mut sys) = (Vec::new(), Vec::new());
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((head, body)) = content.split_once(':') else {
                return Err(FamilyError::Syntax { line });
            };
            let parsed = match head.trim() {
                "mem" => parse_membrane(body).map(|t| mem.push(normalize(&t))),
                "sys" => parse_system(body).map(|t| sys.push(normalize(&t))),
                _ => return Err(FamilyError::Syntax { line }),
            };
            parsed.map_err(|source| FamilyError::Parse { line, source })?;
        }
        Ok(InstFamily::new(mem, sys))
    }

    pub fn mem_fillers(&self) -> &[Canon] {
        &self.mem
    }

    pub fn sys_fillers(&self) -> &[Canon] {
        &self.sys
    }

    /// Contexts `λX. σ[ρ[X] o R]` offered to phago residues.
    pub fn phago_contexts(&self) -> Vec<Canon> {
        let mut out = Vec::new();
        for sigma in &self.mem {
            for rho in &self.mem {
                for r in &self.sys {
                    let inner = comp([cell(rho.clone(), Canon::Bound(0)), r.clone()]);
                    out.push(lam(Type::Sys, cell(sigma.clone(), inner)));
                }
            }
        }
        out
    }

    /// Arguments supplied to residues of `label`, in a fixed order.
    pub fn arguments(&self, label: &SysLabel) -> Vec<Vec<Canon>> {
        match label {
            SysLabel::Id => Vec::new(),
            SysLabel::Phago(_) => self.phago_contexts().into_iter().map(|c| vec![c]).collect(),
            SysLabel::CoPhago(_) => self.sys.iter().map(|s| vec![s.clone()]).collect(),
            SysLabel::Exo(_) => self
                .sys
                .iter()
                .flat_map(|s| self.mem.iter().map(move |m| vec![s.clone(), m.clone()]))
                .collect(),
        }
    }
}

fn describe_args(args: &[Canon]) -> String {
    let parts: Vec<String> = args
        .iter()
        .map(|a| ClassKey::from(a.clone()).to_string())
        .collect();
    parts.join(", ")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisimOptions {
    /// Number of residue instantiations followed before comparing residues
    /// by label only.
    pub depth: usize,
    pub budget: usize,
}

impl Default for BisimOptions {
    fn default() -> BisimOptions {
        BisimOptions {
            depth: 1,
            budget: DEFAULT_STATE_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BisimError {
    #[error("state budget of {budget} states exceeded")]
    StateBudgetExceeded { budget: usize },
    #[error(transparent)]
    Rate(#[from] RateError),
}

/// Why two systems are not bisimilar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Moves leading from the initial pair to a pair that differs in one step.
    pub path: Vec<String>,
    /// The label of the distinguishing step.
    pub label: SysLabel,
    /// Human-readable account of the difference.
    pub detail: String,
    /// Actions fired by the distinguishing transitions.
    pub via: Vec<String>,
    /// Rates of the two sides into the witness block (rate mode only).
    pub rates: Option<(Rate, Rate)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Bisimilar,
    Distinguished(Box<Witness>),
}

impl Verdict {
    pub fn is_bisimilar(&self) -> bool {
        matches!(self, Verdict::Bisimilar)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Bisimilar => f.write_str("Bisimilar"),
            Verdict::Distinguished(w) => {
                write!(f, "Distinguished by {}", w.label)?;
                if !w.via.is_empty() {
                    write!(f, " (via {})", w.via.join(", "))?;
                }
                write!(f, ": {}", w.detail)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct BisimReport {
    pub verdict: Verdict,
    pub states: usize,
    pub blocks: usize,
    pub iterations: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Strong,
    Rate,
}

struct Residue {
    rate: Rate,
    /// Instantiation targets, in the order of the family's arguments.
    targets: Vec<usize>,
}

struct Node {
    key: ClassKey,
    layer: usize,
    id: BTreeMap<usize, Rate>,
    residues: BTreeMap<SysLabel, Vec<Residue>>,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Signature {
    Strong {
        id: BTreeSet<usize>,
        res: BTreeMap<SysLabel, BTreeSet<Vec<usize>>>,
    },
    StrongEdge {
        id: BTreeSet<usize>,
        labels: BTreeSet<SysLabel>,
    },
    Rate {
        id: BTreeMap<usize, Rate>,
        res: BTreeMap<SysLabel, BTreeMap<BTreeSet<usize>, Rate>>,
    },
    RateEdge {
        id: BTreeMap<usize, Rate>,
        res: BTreeMap<SysLabel, Rate>,
    },
}

struct Graph {
    mode: Mode,
    depth: usize,
    nodes: Vec<Node>,
    args: BTreeMap<SysLabel, Vec<Vec<Canon>>>,
}

impl Graph {
    fn build(
        mode: Mode,
        roots: &[&Term],
        rates: &RateTable,
        fam: &InstFamily,
        opts: &BisimOptions,
    ) -> Result<Graph, BisimError> {
        let mut g = Graph {
            mode,
            depth: opts.depth,
            nodes: Vec::new(),
            args: BTreeMap::new(),
        };
        let mut index: HashMap<(ClassKey, usize), usize> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut intern =
            |g: &mut Graph, key: ClassKey, layer: usize, queue: &mut VecDeque<usize>| {
                *index.entry((key.clone(), layer)).or_insert_with(|| {
                    g.nodes.push(Node {
                        key,
                        layer,
                        id: BTreeMap::new(),
                        residues: BTreeMap::new(),
                    });
                    queue.push_back(g.nodes.len() - 1);
                    g.nodes.len() - 1
                })
            };
        for root in roots {
            intern(&mut g, ClassKey::of(&ground_view(root)), 0, &mut queue);
        }
        while let Some(i) = queue.pop_front() {
            if g.nodes.len() > opts.budget {
                return Err(BisimError::StateBudgetExceeded {
                    budget: opts.budget,
                });
            }
            let (key, layer) = (g.nodes[i].key.clone(), g.nodes[i].layer);
            let mut id = BTreeMap::new();
            let mut residues: BTreeMap<SysLabel, Vec<Residue>> = BTreeMap::new();
            for (label, target, rate) in successors(mode, &key, rates)? {
                if label == SysLabel::Id {
                    let j = intern(&mut g, target, layer, &mut queue);
                    *id.entry(j).or_insert_with(Rate::zero) += &rate;
                    continue;
                }
                let mut targets = Vec::new();
                if layer < g.depth {
                    let args = g
                        .args
                        .entry(label.clone())
                        .or_insert_with(|| fam.arguments(&label))
                        .clone();
                    for a in &args {
                        let inst = a
                            .iter()
                            .fold(target.canon().clone(), |f, x| app(f, x.clone()));
                        targets.push(intern(&mut g, ClassKey::from(inst), layer + 1, &mut queue));
                    }
                }
                residues
                    .entry(label)
                    .or_default()
                    .push(Residue { rate, targets });
            }
            g.nodes[i].id = id;
            g.nodes[i].residues = residues;
        }
        if g.nodes.len() > opts.budget {
            return Err(BisimError::StateBudgetExceeded {
                budget: opts.budget,
            });
        }
        Ok(g)
    }

    fn signature(&self, i: usize, block: &[usize]) -> Signature {
        let node = &self.nodes[i];
        let edge = node.layer >= self.depth;
        match (self.mode, edge) {
            (Mode::Strong, false) => Signature::Strong {
                id: node.id.keys().map(|j| block[*j]).collect(),
                res: node
                    .residues
                    .iter()
                    .map(|(l, rs)| {
                        let profiles = rs
                            .iter()
                            .map(|r| r.targets.iter().map(|t| block[*t]).collect())
                            .collect();
                        (l.clone(), profiles)
                    })
                    .collect(),
            },
            (Mode::Strong, true) => Signature::StrongEdge {
                id: node.id.keys().map(|j| block[*j]).collect(),
                labels: node.residues.keys().cloned().collect(),
            },
            (Mode::Rate, false) => {
                let mut res: BTreeMap<SysLabel, BTreeMap<BTreeSet<usize>, Rate>> = BTreeMap::new();
                for (l, rs) in &node.residues {
                    let entry = res.entry(l.clone()).or_default();
                    for r in rs {
                        let hits: BTreeSet<usize> = r.targets.iter().map(|t| block[*t]).collect();
                        *entry.entry(hits).or_insert_with(Rate::zero) += &r.rate;
                    }
                }
                Signature::Rate {
                    id: self.id_rates(i, block),
                    res,
                }
            }
            (Mode::Rate, true) => Signature::RateEdge {
                id: self.id_rates(i, block),
                res: node
                    .residues
                    .iter()
                    .map(|(l, rs)| (l.clone(), rs.iter().map(|r| r.rate.clone()).sum()))
                    .collect(),
            },
        }
    }

    fn id_rates(&self, i: usize, block: &[usize]) -> BTreeMap<usize, Rate> {
        let mut out: BTreeMap<usize, Rate> = BTreeMap::new();
        for (j, r) in &self.nodes[i].id {
            *out.entry(block[*j]).or_insert_with(Rate::zero) += r;
        }
        out
    }

    /// Partitions from the initial one (by layer) to the fixpoint.
    fn refine(&self) -> Vec<Vec<usize>> {
        let mut history = vec![self.nodes.iter().map(|n| n.layer).collect::<Vec<_>>()];
        loop {
            let block = history.last().expect("nonempty");
            let sigs: Vec<(usize, Signature)> = (0..self.nodes.len())
                .map(|i| (block[i], self.signature(i, block)))
                .collect();
            let mut numbering: BTreeMap<&(usize, Signature), usize> = BTreeMap::new();
            for s in &sigs {
                numbering.entry(s).or_insert(0);
            }
            for (k, v) in numbering.values_mut().enumerate() {
                *v = k;
            }
            let next: Vec<usize> = sigs.iter().map(|s| numbering[s]).collect();
            let before = block.iter().collect::<BTreeSet<_>>().len();
            let after = numbering.len();
            history.push(next);
            if after == before {
                return history;
            }
        }
    }
}

fn successors(
    mode: Mode,
    key: &ClassKey,
    rates: &RateTable,
) -> Result<Vec<(SysLabel, ClassKey, Rate)>, BisimError> {
    let term = key.term();
    match mode {
        Mode::Strong => Ok(sys_steps(&term)
            .into_iter()
            .map(|t| (t.label, t.target, Rate::integer(1)))
            .collect()),
        Mode::Rate => {
            let mut out = Vec::new();
            for (label, m) in sos_sys(&term, rates)? {
                for (k, r) in m.iter() {
                    out.push((label.clone(), k.clone(), r.clone()));
                }
            }
            Ok(out)
        }
    }
}

fn via(p: &ClassKey, label: &SysLabel) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for t in sys_steps(&p.term()) {
        if t.label == *label {
            for a in t.derivation.actions() {
                out.insert(action_family(a));
            }
        }
    }
    out
}

fn action_family(a: &MemLabel) -> String {
    format!("{} {}", a.kind().keyword(), a.name())
}

struct Explainer<'g> {
    g: &'g Graph,
    history: Vec<Vec<usize>>,
    rate_mode: bool,
}

impl Explainer<'_> {
    fn split_level(&self, a: usize, b: usize) -> Option<usize> {
        self.history.iter().position(|blk| blk[a] != blk[b])
    }

    fn explain(&self, a: usize, b: usize) -> Witness {
        let mut path = Vec::new();
        let (mut a, mut b) = (a, b);
        loop {
            let level = self.split_level(a, b).expect("distinguished pair");
            if level == 0 {
                return self.finish(
                    path,
                    SysLabel::Id,
                    "states lie at different depths".into(),
                    a,
                    b,
                );
            }
            let prev = &self.history[level - 1];
            match self.step(a, b, prev) {
                Step::Done(label, detail, rates) => {
                    let mut w = self.finish(path, label, detail, a, b);
                    w.rates = rates;
                    return w;
                }
                Step::Descend(label, note, a2, b2) => {
                    path.push(format!("{label}{note}"));
                    if self.split_level(a2, b2).is_none() {
                        return self.finish(path, label, "no further difference".into(), a, b);
                    }
                    a = a2;
                    b = b2;
                }
            }
        }
    }

    fn finish(
        &self,
        path: Vec<String>,
        label: SysLabel,
        detail: String,
        a: usize,
        b: usize,
    ) -> Witness {
        let (ka, kb) = (&self.g.nodes[a].key, &self.g.nodes[b].key);
        let mut actions = BTreeSet::new();
        actions.extend(via(ka, &label));
        actions.extend(via(kb, &label));
        Witness {
            path,
            label,
            detail,
            via: actions.into_iter().collect(),
            rates: None,
        }
    }

    /// Names a block by one of the `near` states in it, falling back to
    /// any member.
    fn representative(&self, block: usize, level: &[usize], near: &[usize]) -> String {
        let i = near
            .iter()
            .copied()
            .find(|j| level[*j] == block)
            .or_else(|| level.iter().position(|b| *b == block))
            .expect("block has a member");
        format!("[{}]", self.g.nodes[i].key)
    }

    fn step(&self, a: usize, b: usize, prev: &[usize]) -> Step {
        let g = self.g;
        let (na, nb) = (&g.nodes[a], &g.nodes[b]);
        let sides = [(a, b, "left"), (b, a, "right")];
        if self.rate_mode {
            let (ra, rb) = (g.id_rates(a, prev), g.id_rates(b, prev));
            let blocks: BTreeSet<usize> = ra.keys().chain(rb.keys()).copied().collect();
            for blk in blocks {
                let (x, y) = (
                    ra.get(&blk).cloned().unwrap_or_default(),
                    rb.get(&blk).cloned().unwrap_or_default(),
                );
                if x != y {
                    let near: Vec<usize> = na.id.keys().chain(nb.id.keys()).copied().collect();
                    let detail = format!(
                        "rates {x} vs {y} into the block of {}",
                        self.representative(blk, prev, &near)
                    );
                    return Step::Done(SysLabel::Id, detail, Some((x, y)));
                }
            }
            let labels: BTreeSet<&SysLabel> =
                na.residues.keys().chain(nb.residues.keys()).collect();
            for l in labels {
                let agg = |n: &Node| -> BTreeMap<BTreeSet<usize>, Rate> {
                    let mut out: BTreeMap<BTreeSet<usize>, Rate> = BTreeMap::new();
                    for r in n.residues.get(l).into_iter().flatten() {
                        let hits = r.targets.iter().map(|t| prev[*t]).collect();
                        *out.entry(hits).or_insert_with(Rate::zero) += &r.rate;
                    }
                    out
                };
                let (x, y) = (agg(na), agg(nb));
                if x != y {
                    let total =
                        |m: &BTreeMap<BTreeSet<usize>, Rate>| m.values().cloned().sum::<Rate>();
                    let (tx, ty) = (total(&x), total(&y));
                    let sets: BTreeSet<&BTreeSet<usize>> = x.keys().chain(y.keys()).collect();
                    for s in sets {
                        let (rx, ry) = (
                            x.get(s).cloned().unwrap_or_default(),
                            y.get(s).cloned().unwrap_or_default(),
                        );
                        if rx != ry {
                            let near: Vec<usize> = [na, nb]
                                .into_iter()
                                .flat_map(|n| n.residues.get(l).into_iter().flatten())
                                .flat_map(|r| r.targets.iter().copied())
                                .collect();
                            let reps: Vec<String> = s
                                .iter()
                                .map(|b| self.representative(*b, prev, &near))
                                .collect();
                            let detail = format!(
                                "residue rates {rx} vs {ry} landing in {{{}}}",
                                reps.join(", ")
                            );
                            return Step::Done(l.clone(), detail, Some((rx, ry)));
                        }
                    }
                    return Step::Done(
                        l.clone(),
                        format!("total rates {tx} vs {ty}"),
                        Some((tx, ty)),
                    );
                }
            }
            return Step::Done(SysLabel::Id, "signatures differ".into(), None);
        }
        for (p, q, side) in sides {
            let (np, nq) = (&g.nodes[p], &g.nodes[q]);
            let qblocks: BTreeSet<usize> = nq.id.keys().map(|j| prev[*j]).collect();
            for j in np.id.keys() {
                if !qblocks.contains(&prev[*j]) {
                    let Some(q2) = nq.id.keys().next() else {
                        let detail = format!("only the {side} system can perform id");
                        return Step::Done(SysLabel::Id, detail, None);
                    };
                    return Step::Descend(SysLabel::Id, String::new(), *j, *q2);
                }
            }
        }
        for (p, q, side) in sides {
            let (np, nq) = (&g.nodes[p], &g.nodes[q]);
            for (l, rs) in &np.residues {
                let Some(qs) = nq.residues.get(l) else {
                    return Step::Done(
                        l.clone(),
                        format!("only the {side} system can perform {l}"),
                        None,
                    );
                };
                let profile = |r: &Residue| r.targets.iter().map(|t| prev[*t]).collect::<Vec<_>>();
                let theirs: BTreeSet<Vec<usize>> = qs.iter().map(profile).collect();
                for r in rs {
                    let mine = profile(r);
                    if theirs.contains(&mine) {
                        continue;
                    }
                    let other = &qs[0];
                    let k =
                        (0..mine.len()).find(|k| prev[r.targets[*k]] != prev[other.targets[*k]]);
                    let Some(k) = k else {
                        return Step::Done(l.clone(), "residues differ".into(), None);
                    };
                    let args = &g.args[l][k];
                    let note = format!(" applied to ({})", describe_args(args));
                    return Step::Descend(l.clone(), note, r.targets[k], other.targets[k]);
                }
            }
        }
        Step::Done(SysLabel::Id, "signatures differ".into(), None)
    }
}

enum Step {
    Done(SysLabel, String, Option<(Rate, Rate)>),
    Descend(SysLabel, String, usize, usize),
}

fn run(
    mode: Mode,
    p: &Term,
    q: &Term,
    rates: &RateTable,
    fam: &InstFamily,
    opts: &BisimOptions,
) -> Result<BisimReport, BisimError> {
    let g = Graph::build(mode, &[p, q], rates, fam, opts)?;
    let history = g.refine();
    let last = history.last().expect("nonempty");
    let (a, b) = (index_of(&g, p), index_of(&g, q));
    let verdict = if last[a] == last[b] {
        Verdict::Bisimilar
    } else {
        let ex = Explainer {
            g: &g,
            history: history.clone(),
            rate_mode: mode == Mode::Rate,
        };
        Verdict::Distinguished(Box::new(ex.explain(a, b)))
    };
    let blocks = last.iter().collect::<BTreeSet<_>>().len();
    Ok(BisimReport {
        verdict,
        states: g.nodes.len(),
        blocks,
        iterations: history.len() - 1,
    })
}

fn index_of(g: &Graph, q: &Term) -> usize {
    let key = ClassKey::of(&ground_view(q));
    g.nodes
        .iter()
        .position(|n| n.layer == 0 && n.key == key)
        .expect("root present")
}

/// Strong bisimulation: residues must be matched argument by argument.
pub fn strong_bisim(
    p: &Term,
    q: &Term,
    fam: &InstFamily,
    opts: &BisimOptions,
) -> Result<BisimReport, BisimError> {
    run(Mode::Strong, p, q, &RateTable::new(), fam, opts)
}

/// Rate bisimulation: equal total rates per label into every block, with
/// residues aggregated by the set of blocks their instantiations reach.
pub fn rate_bisim(
    p: &Term,
    q: &Term,
    rates: &RateTable,
    fam: &InstFamily,
    opts: &BisimOptions,
) -> Result<BisimReport, BisimError> {
    run(Mode::Rate, p, q, rates, fam, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(src: &str) -> Term {
        parse_system(src).unwrap()
    }

    fn strong(a: &str, b: &str) -> Verdict {
        let (p, q) = (sys(a), sys(b));
        strong_bisim(
            &p,
            &q,
            &InstFamily::for_systems(&p, &q),
            &BisimOptions::default(),
        )
        .unwrap()
        .verdict
    }

    fn rated(a: &str, b: &str) -> Verdict {
        let (p, q) = (sys(a), sys(b));
        let rates = RateTable::uniform(Rate::integer(2));
        rate_bisim(
            &p,
            &q,
            &rates,
            &InstFamily::for_systems(&p, &q),
            &BisimOptions::default(),
        )
        .unwrap()
        .verdict
    }

    #[test]
    fn default_family() {
        let fam = InstFamily::default_for(&[Name::new("n").unwrap()]);
        assert_eq!(fam.mem_fillers().len(), 6);
        assert_eq!(fam.sys_fillers().len(), 6);
        assert_eq!(fam.phago_contexts().len(), 216);
    }

    #[test]
    fn family_file() {
        let fam = InstFamily::parse("# fillers\nmem: exo k\nsys: phago k[]\n").unwrap();
        assert_eq!(fam.mem_fillers().len(), 2);
        assert_eq!(fam.sys_fillers().len(), 2);
        assert!(matches!(
            InstFamily::parse("foo: 0"),
            Err(FamilyError::Syntax { line: 1 })
        ));
        assert!(matches!(
            InstFamily::parse("mem: [["),
            Err(FamilyError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn inert_cell_is_void() {
        assert!(strong("0[phago n[void]]", "void").is_bisimilar());
        assert!(rated("0[phago n[void]]", "void").is_bisimilar());
    }

    #[test]
    fn different_labels() {
        let Verdict::Distinguished(w) = strong("phago n[void]", "exo n[void]") else {
            panic!()
        };
        assert!(w.path.is_empty());
        assert!(matches!(w.label, SysLabel::Phago(_) | SysLabel::Exo(_)));
    }

    #[test]
    fn residues_are_instantiated() {
        // The engulfed cells differ, which only shows after instantiation.
        let v = strong("phago n.exo m[void]", "phago n[void]");
        let Verdict::Distinguished(w) = v else {
            panic!("{v}")
        };
        assert_eq!(w.path.len(), 1, "{w:?}");
        let v = strong("phago n.pino m{0}[void]", "phago n[void]");
        let Verdict::Distinguished(w) = v else {
            panic!("{v}")
        };
        assert_eq!((w.path.len(), w.label), (1, SysLabel::Id));
        // An inner exo can never fire through the inert wrapper.
        assert!(strong("phago n[exo m[void]]", "phago n[coexo m[void]]").is_bisimilar());
    }

    #[test]
    fn rates_matter() {
        let v = rated("(pino n{0} | pino n{0})[void]", "pino n{0}.pino n{0}[void]");
        let Verdict::Distinguished(w) = v else {
            panic!()
        };
        assert_eq!(w.label, SysLabel::Id);
        assert_eq!(w.via, vec!["pino n".to_string()]);
        assert_eq!(w.rates, Some((Rate::integer(4), Rate::integer(2))));
        assert!(
            strong("(pino n{0} | pino n{0})[void]", "pino n{0}.pino n{0}[void]").is_bisimilar()
        );
    }

    #[test]
    fn budget() {
        let p = sys("pino n{0}[void]");
        let opts = BisimOptions {
            depth: 1,
            budget: 1,
        };
        let fam = InstFamily::for_systems(&p, &p);
        assert_eq!(
            strong_bisim(&p, &p, &fam, &opts).unwrap_err(),
            BisimError::StateBudgetExceeded { budget: 1 }
        );
    }
}
